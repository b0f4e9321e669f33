use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{1..m}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 1-based images; `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m];
        let mut out = Vec::with_capacity(m);
        for &img in images {
            if img == 0 || img > m || seen[img - 1] {
                return Err(Error::MalformedPermutation(format!("{images:?}")));
            }
            seen[img - 1] = true;
            out.push((img - 1) as u32);
        }
        Ok(Self { images: out })
    }

    /// Parses cycle notation such as `"(1 2)(3 4)"` or `"id"` on `degree` points.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let bad = || Error::MalformedPermutation(text.to_string());
        let trimmed = text.trim();
        let mut images: Vec<u32> = (0..degree as u32).collect();
        if trimmed == "id" || trimmed.is_empty() || trimmed == "()" {
            return Ok(Self { images });
        }
        let mut seen = vec![false; degree];
        let mut rest = trimmed;
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            for &p in &points {
                if p == 0 || p > degree || seen[p - 1] {
                    return Err(bad());
                }
                seen[p - 1] = true;
            }
            for (i, &p) in points.iter().enumerate() {
                let next = points[(i + 1) % points.len()];
                images[p - 1] = (next - 1) as u32;
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Self { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Image of the 1-based point `point`.
    pub fn apply(&self, point: usize) -> usize {
        self.images[point - 1] as usize + 1
    }

    /// Composition applying `self` first, then `other`. Words map to products
    /// in reading order, so this makes `x -> phi(x)` a homomorphism.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&i| other.images[i as usize]).collect(),
        }
    }

    pub fn is_involution(&self) -> bool {
        self.then(self).is_identity()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut visited = vec![false; self.degree()];
        let mut wrote = false;
        for start in 0..self.degree() {
            if visited[start] || self.images[start] as usize == start {
                continue;
            }
            f.write_str("(")?;
            let mut cur = start;
            let mut first = true;
            while !visited[cur] {
                visited[cur] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{}", cur + 1)?;
                first = false;
                cur = self.images[cur] as usize;
            }
            f.write_str(")")?;
            wrote = true;
        }
        if !wrote {
            f.write_str("id")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses cycle notation, inferring the degree from the largest point.
    fn from_str(s: &str) -> Result<Self> {
        let degree = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Self::parse_cycles(s, degree)
    }
}
