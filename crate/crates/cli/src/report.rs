//! JSON and CSV result files.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};
use cayley_spectra::ChainClass;
use serde::{Deserialize, Serialize};

use crate::config::HomSpec;

/// `D_K` sign convention recorded in every spectral report.
pub const DK_CONVENTION: &str = "det(M - E I), coefficients in ascending powers of E";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub notes: Vec<String>,
}

impl Metadata {
    pub fn new(notes: Vec<String>) -> Self {
        Self {
            tool: "cayley-spectra".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            notes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetRow {
    pub index: usize,
    pub representative: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub metadata: Metadata,
    pub k: usize,
    pub subgroup: String,
    pub hom: HomSpec,
    pub r: usize,
    pub cosets: Vec<CosetRow>,
    pub q: Vec<Vec<u32>>,
    pub q_h0: Vec<u32>,
    pub n_h0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub index: usize,
    pub energy: f64,
    pub multiplicity: usize,
    pub components: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub metadata: Metadata,
    pub k: usize,
    pub subgroup: String,
    pub hom: HomSpec,
    pub r: usize,
    pub q: Vec<Vec<u32>>,
    pub epsilon: f64,
    pub potential: Vec<f64>,
    pub convention: cayley_spectra::Convention,
    pub dk_coefficients: Vec<f64>,
    pub dk_exact: bool,
    pub residual_tolerance: f64,
    pub solutions: Vec<SolutionRow>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub lambda1: [f64; 2],
    pub lambda2: [f64; 2],
    pub c1: [f64; 2],
    pub c2: [f64; 2],
    pub degenerate: bool,
    pub classification: ChainClass,
    /// Unbounded on one side, so a pointwise solution that is not square-summable.
    pub pointwise_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub n: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub metadata: Metadata,
    pub k: usize,
    pub subgroup: String,
    pub epsilon: f64,
    /// One value for a constant potential, otherwise one period.
    pub potential: Vec<f64>,
    pub energy: f64,
    pub convention: cayley_spectra::Convention,
    pub closed_form: Option<ClosedForm>,
    pub real: bool,
    pub sequence: Vec<SequenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationCheck {
    pub label: String,
    pub energy: f64,
    #[serde(rename = "R")]
    pub radius: usize,
    pub interior_count: usize,
    pub max_residual: f64,
    pub worst_vertex: String,
    pub tolerance: f64,
    pub periodicity_trials: usize,
    pub periodicity_witness: Option<[String; 2]>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub metadata: Metadata,
    pub source: String,
    pub seed: u64,
    pub checks: Vec<VerificationCheck>,
    pub pass: bool,
}

/// Any report file, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Report {
    Partition(PartitionReport),
    Spectrum(SpectrumReport),
    Chain(ChainReport),
    Verification(VerificationReport),
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed report")
    }

    pub fn to_csv(&self) -> Result<Option<String>> {
        let mut buf = Vec::new();
        match self {
            Report::Partition(p) => write_partition_csv(p, &mut buf)?,
            Report::Spectrum(s) => write_spectrum_csv(&s.solutions, s.r, &mut buf)?,
            Report::Chain(c) => write_sequence_csv(&c.sequence, &mut buf)?,
            Report::Verification(_) => return Ok(None),
        }
        Ok(Some(String::from_utf8(buf)?))
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_partition_csv<W: Write>(p: &PartitionReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["coset".to_string(), "representative".to_string()];
    header.extend((0..p.r).map(|j| format!("q_{j}")));
    w.write_record(&header)?;
    for (c, row) in p.cosets.iter().zip(&p.q) {
        let mut rec = vec![c.index.to_string(), c.representative.clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns: index, E, multiplicity, phi_1..phi_r, residual.
pub fn write_spectrum_csv<W: Write>(rows: &[SolutionRow], r: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["index".to_string(), "E".to_string(), "multiplicity".to_string()];
    header.extend((1..=r).map(|j| format!("phi_{j}")));
    header.push("residual".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.index.to_string(), fmt_f64(row.energy), row.multiplicity.to_string()];
        rec.extend(row.components.iter().map(|&c| fmt_f64(c)));
        rec.push(fmt_f64(row.residual));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(input: R) -> Result<Vec<SolutionRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let width = reader.headers()?.len();
    if width < 4 {
        bail!("spectrum table needs at least 4 columns");
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let num = |i: usize| -> Result<f64> { Ok(record[i].parse::<f64>()?) };
        rows.push(SolutionRow {
            index: record[0].parse()?,
            energy: num(1)?,
            multiplicity: record[2].parse()?,
            components: (3..width - 1).map(num).collect::<Result<_>>()?,
            residual: num(width - 1)?,
        });
    }
    Ok(rows)
}

/// Columns: n, re, im.
pub fn write_sequence_csv<W: Write>(rows: &[SequenceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "re", "im"])?;
    for row in rows {
        w.write_record([row.n.to_string(), fmt_f64(row.re), fmt_f64(row.im)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sequence_csv<R: Read>(input: R) -> Result<Vec<SequenceRow>> {
    let mut reader = csv::Reader::from_reader(input);
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok(SequenceRow {
                n: rec[0].parse()?,
                re: rec[1].parse()?,
                im: rec[2].parse()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 123456789.12345679, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(3.5), "3.5000000000000000e0");
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let rows = vec![
            SolutionRow {
                index: 0,
                energy: -2.5413812651491097,
                multiplicity: 1,
                components: vec![0.7630199824727257, -0.6463748961301956],
                residual: 4.440892098500626e-16,
            },
            SolutionRow {
                index: 1,
                energy: 3.5413812651491097,
                multiplicity: 1,
                components: vec![0.6463748961301956, 0.7630199824727257],
                residual: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_spectrum_csv(&rows, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,E,multiplicity,phi_1,phi_2,residual\n"));
        assert_eq!(read_spectrum_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn sequence_csv_round_trip() {
        let rows: Vec<SequenceRow> = (-3..=3)
            .map(|n| SequenceRow {
                n,
                re: (n as f64 * 0.7).cos(),
                im: (n as f64 * 0.7).sin() / 3.0,
            })
            .collect();
        let mut buf = Vec::new();
        write_sequence_csv(&rows, &mut buf).unwrap();
        assert_eq!(read_sequence_csv(buf.as_slice()).unwrap(), rows);
    }
}
