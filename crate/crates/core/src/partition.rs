//! Normal subgroups of the free product and the partition of the tree they
//! induce.
//!
//! Finite-index subgroups are kernels of homomorphisms into finite
//! permutation groups. Because every generator is an involution, any
//! assignment of involutive permutations to the generators extends to a
//! homomorphism, so an [`InvolutiveHom`] is just such an assignment. Cosets
//! of the kernel correspond one-to-one with elements of the image group.
//!
//! The infinite-index kernel of the projection onto two generators is handled
//! by [`ZProjection`], whose cosets are labelled by the integers.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::word::{GroupParams, ReducedWord};

/// Default cap on the size of the image group.
pub const DEFAULT_MAX_IMAGE: usize = 10_000;

/// Assigns coset labels to words. The subgroup itself carries label 0.
pub trait CosetLabeling {
    fn label(&self, x: &ReducedWord) -> i64;

    fn in_kernel(&self, x: &ReducedWord) -> bool {
        self.label(x) == 0
    }
}

/// A homomorphism from the free product into a permutation group, given by
/// the involutions assigned to each generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutiveHom {
    params: GroupParams,
    images: Vec<Permutation>,
}

impl InvolutiveHom {
    pub fn new(params: GroupParams, images: Vec<Permutation>) -> Result<Self> {
        if images.len() != params.generators() {
            return Err(Error::WrongImageCount {
                expected: params.generators(),
                got: images.len(),
            });
        }
        let degree = images[0].degree();
        for (i, p) in images.iter().enumerate() {
            if p.degree() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    got: p.degree(),
                });
            }
            if !p.is_involution() {
                return Err(Error::NotInvolution(i + 1));
            }
        }
        Ok(Self { params, images })
    }

    /// Parses one cycle-notation string per generator on `degree` points.
    pub fn from_cycles<S: AsRef<str>>(params: GroupParams, degree: usize, cycles: &[S]) -> Result<Self> {
        let images = cycles
            .iter()
            .map(|c| Permutation::parse_cycles(c.as_ref(), degree))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, images)
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn degree(&self) -> usize {
        self.images[0].degree()
    }

    /// Image of the generator `a_index` (1-based).
    pub fn generator_image(&self, index: usize) -> &Permutation {
        &self.images[index - 1]
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    /// Image of a word: the product of its letters' images in reading order.
    pub fn image_of(&self, x: &ReducedWord) -> Permutation {
        assert_eq!(x.params(), self.params, "word and homomorphism differ in k");
        x.letters().fold(Permutation::identity(self.degree()), |acc, l| {
            acc.then(self.generator_image(l))
        })
    }
}

/// Enumerates the image group by breadth-first closure from the identity,
/// generators in ascending order. Returns the elements together with a
/// shortest word mapping to each.
pub fn image_closure(hom: &InvolutiveHom, cap: usize) -> Result<(Vec<Permutation>, Vec<ReducedWord>)> {
    let params = hom.params();
    let identity = Permutation::identity(hom.degree());
    let mut elements = vec![identity.clone()];
    let mut words = vec![params.identity()];
    let mut seen: HashMap<Permutation, usize> = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for m in 1..=params.generators() {
            let next = elements[i].then(hom.generator_image(m));
            if seen.contains_key(&next) {
                continue;
            }
            if elements.len() == cap {
                return Err(Error::ImageTooLarge { cap });
            }
            seen.insert(next.clone(), elements.len());
            queue.push_back(elements.len());
            words.push(words[i].times_generator(m)?);
            elements.push(next);
        }
    }
    Ok((elements, words))
}

/// `Q[i][j]` counts generators `a_m` with `g_i phi(a_m) = g_j`.
pub fn q_matrix(hom: &InvolutiveHom, cosets: &[Permutation]) -> Vec<Vec<u32>> {
    let lookup: HashMap<&Permutation, usize> = cosets.iter().enumerate().map(|(i, p)| (p, i)).collect();
    cosets
        .iter()
        .map(|g| {
            let mut row = vec![0u32; cosets.len()];
            for gen in hom.images() {
                row[lookup[&g.then(gen)]] += 1;
            }
            row
        })
        .collect()
}

/// Cosets of a finite-index normal subgroup with their neighbour-count matrix.
#[derive(Debug, Clone)]
pub struct CosetPartition {
    hom: InvolutiveHom,
    cosets: Vec<Permutation>,
    representatives: Vec<ReducedWord>,
    lookup: HashMap<Permutation, usize>,
    q: Vec<Vec<u32>>,
}

impl CosetPartition {
    pub fn new(hom: InvolutiveHom) -> Result<Self> {
        Self::with_cap(hom, DEFAULT_MAX_IMAGE)
    }

    pub fn with_cap(hom: InvolutiveHom, cap: usize) -> Result<Self> {
        let (cosets, representatives) = image_closure(&hom, cap)?;
        let q = q_matrix(&hom, &cosets);
        let lookup = cosets.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        Ok(Self {
            hom,
            cosets,
            representatives,
            lookup,
            q,
        })
    }

    pub fn hom(&self) -> &InvolutiveHom {
        &self.hom
    }

    pub fn params(&self) -> GroupParams {
        self.hom.params()
    }

    /// Index of the subgroup.
    pub fn r(&self) -> usize {
        self.cosets.len()
    }

    pub fn cosets(&self) -> &[Permutation] {
        &self.cosets
    }

    pub fn representatives(&self) -> &[ReducedWord] {
        &self.representatives
    }

    pub fn q(&self) -> &[Vec<u32>] {
        &self.q
    }

    /// `Q(H_0)`, the neighbour counts of the identity.
    pub fn q_h0(&self) -> &[u32] {
        &self.q[0]
    }

    /// `N(H_0)`, the number of cosets the identity has neighbours in.
    pub fn n_h0(&self) -> usize {
        self.q[0].iter().filter(|&&c| c != 0).count()
    }

    pub fn coset_of(&self, x: &ReducedWord) -> usize {
        self.lookup[&self.hom.image_of(x)]
    }

    /// Neighbour counts per coset computed directly from the neighbours of `x`.
    pub fn q_vector_of_word(&self, x: &ReducedWord) -> Vec<u32> {
        let mut counts = vec![0u32; self.r()];
        for y in x.neighbors() {
            counts[self.coset_of(&y)] += 1;
        }
        counts
    }
}

impl CosetLabeling for CosetPartition {
    fn label(&self, x: &ReducedWord) -> i64 {
        self.coset_of(x) as i64
    }
}

/// `K = G_k`, index 1.
pub fn catalog_trivial(params: GroupParams) -> InvolutiveHom {
    InvolutiveHom::new(params, vec![Permutation::identity(1); params.generators()])
        .expect("identity images are involutions")
}

/// `H_A`: generators in `A` map to the transposition of two points.
pub fn catalog_h_a(params: GroupParams, a: &[usize]) -> Result<InvolutiveHom> {
    if a.is_empty() {
        return Err(Error::InvalidSubgroup("H_A needs a nonempty set A".into()));
    }
    for &i in a {
        params.check_index(i)?;
    }
    let swap = Permutation::from_images(&[2, 1])?;
    let images = (1..=params.generators())
        .map(|m| {
            if a.contains(&m) {
                swap.clone()
            } else {
                Permutation::identity(2)
            }
        })
        .collect();
    InvolutiveHom::new(params, images)
}

/// Words of even length, `H_A` with `A` every generator.
pub fn catalog_even(params: GroupParams) -> InvolutiveHom {
    let all: Vec<usize> = (1..=params.generators()).collect();
    catalog_h_a(params, &all).expect("nonempty")
}

/// `H_{a_i a_j}`: `a_i -> (1 2)`, `a_j -> (2 3)`, others fixed; the image is
/// the symmetric group on three points.
pub fn catalog_h_pair(params: GroupParams, i: usize, j: usize) -> Result<InvolutiveHom> {
    params.check_index(i)?;
    params.check_index(j)?;
    if i == j {
        return Err(Error::InvalidSubgroup(format!(
            "hpair needs distinct generators, got {i},{j}"
        )));
    }
    let images = (1..=params.generators())
        .map(|m| {
            let cycles = if m == i {
                "(1 2)"
            } else if m == j {
                "(2 3)"
            } else {
                "id"
            };
            Permutation::parse_cycles(cycles, 3)
        })
        .collect::<Result<Vec<_>>>()?;
    InvolutiveHom::new(params, images)
}

/// `H_{1} ∩ H_{2}`: words with an even number of both `a_1` and `a_2`.
///
/// `a_1 -> (1 2)(3 4)` and `a_2 -> (1 3)(2 4)` generate the Klein four-group.
/// Breadth-first coset order is then (even, even), (odd, even), (even, odd),
/// (odd, odd) in the parities of the `a_1` and `a_2` counts.
pub fn catalog_h_cap(params: GroupParams) -> InvolutiveHom {
    let images = (1..=params.generators())
        .map(|m| match m {
            1 => "(1 2)(3 4)",
            2 => "(1 3)(2 4)",
            _ => "id",
        })
        .collect::<Vec<_>>();
    InvolutiveHom::from_cycles(params, 4, &images).expect("valid involutions")
}

/// The kernel of the projection onto the free product of `a_{m1}` and
/// `a_{m2}`; its cosets are labelled by the integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZProjection {
    params: GroupParams,
    m1: usize,
    m2: usize,
}

impl ZProjection {
    /// The pair is stored in ascending order.
    pub fn new(params: GroupParams, a: usize, b: usize) -> Result<Self> {
        params.check_index(a)?;
        params.check_index(b)?;
        if a == b {
            return Err(Error::InvalidSubgroup(format!(
                "zM needs two distinct generators, got {a},{b}"
            )));
        }
        Ok(Self {
            params,
            m1: a.min(b),
            m2: a.max(b),
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    /// Signed length of the projected word: `+l` when it starts with
    /// `a_{m1}`, `-l` when it starts with `a_{m2}`.
    pub fn z_coset_index(&self, x: &ReducedWord) -> i64 {
        let mut stack: Vec<usize> = Vec::new();
        for l in x.letters() {
            if l != self.m1 && l != self.m2 {
                continue;
            }
            if stack.last() == Some(&l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        match stack.first() {
            None => 0,
            Some(&first) if first == self.m1 => stack.len() as i64,
            Some(_) => -(stack.len() as i64),
        }
    }

    /// Coset labels of the `k + 1` neighbours of `x`, sorted.
    pub fn z_neighbor_profile(&self, x: &ReducedWord) -> Vec<i64> {
        let mut profile: Vec<i64> = x.neighbors().iter().map(|y| self.z_coset_index(y)).collect();
        profile.sort_unstable();
        profile
    }
}

impl CosetLabeling for ZProjection {
    fn label(&self, x: &ReducedWord) -> i64 {
        self.z_coset_index(x)
    }
}

/// Subgroups addressable by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupSpec {
    Trivial,
    Even,
    HA(Vec<usize>),
    HPair(usize, usize),
    HCap,
    ZM(usize, usize),
}

/// A subgroup resolved against a tree order.
#[derive(Debug, Clone)]
pub enum Subgroup {
    Finite(InvolutiveHom),
    Infinite(ZProjection),
}

impl SubgroupSpec {
    pub fn resolve(&self, params: GroupParams) -> Result<Subgroup> {
        Ok(match self {
            SubgroupSpec::Trivial => Subgroup::Finite(catalog_trivial(params)),
            SubgroupSpec::Even => Subgroup::Finite(catalog_even(params)),
            SubgroupSpec::HA(a) => Subgroup::Finite(catalog_h_a(params, a)?),
            SubgroupSpec::HPair(i, j) => Subgroup::Finite(catalog_h_pair(params, *i, *j)?),
            SubgroupSpec::HCap => Subgroup::Finite(catalog_h_cap(params)),
            SubgroupSpec::ZM(a, b) => Subgroup::Infinite(ZProjection::new(params, *a, *b)?),
        })
    }

    /// Every finite-index catalog entry for the given order: trivial, even,
    /// each `H_A`, each `H_{a_i a_j}` and the intersection.
    pub fn finite_catalog(params: GroupParams) -> Vec<SubgroupSpec> {
        let n = params.generators();
        let mut specs = vec![SubgroupSpec::Trivial, SubgroupSpec::Even];
        for mask in 1u32..(1 << n) {
            let a: Vec<usize> = (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
            specs.push(SubgroupSpec::HA(a));
        }
        for i in 1..=n {
            for j in i + 1..=n {
                specs.push(SubgroupSpec::HPair(i, j));
            }
        }
        specs.push(SubgroupSpec::HCap);
        specs
    }
}

fn parse_indices(list: &str, text: &str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidSubgroup(text.to_string()))
        })
        .collect()
}

impl FromStr for SubgroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let invalid = || Error::InvalidSubgroup(text.to_string());
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (text, None),
        };
        match (name, args) {
            ("trivial", None) => Ok(SubgroupSpec::Trivial),
            ("even", None) => Ok(SubgroupSpec::Even),
            ("hcap", None) => Ok(SubgroupSpec::HCap),
            ("hA", Some(a)) => {
                let mut idx = parse_indices(a, text)?;
                idx.sort_unstable();
                idx.dedup();
                Ok(SubgroupSpec::HA(idx))
            }
            ("hpair", Some(a)) => match parse_indices(a, text)?.as_slice() {
                &[i, j] => Ok(SubgroupSpec::HPair(i, j)),
                _ => Err(invalid()),
            },
            ("zM", Some(a)) => match parse_indices(a, text)?.as_slice() {
                &[i, j] => Ok(SubgroupSpec::ZM(i, j)),
                _ => Err(invalid()),
            },
            _ => Err(invalid()),
        }
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        match self {
            SubgroupSpec::Trivial => f.write_str("trivial"),
            SubgroupSpec::Even => f.write_str("even"),
            SubgroupSpec::HA(a) => write!(f, "hA:{}", join(a)),
            SubgroupSpec::HPair(i, j) => write!(f, "hpair:{i},{j}"),
            SubgroupSpec::HCap => f.write_str("hcap"),
            SubgroupSpec::ZM(i, j) => write!(f, "zM:{i},{j}"),
        }
    }
}
