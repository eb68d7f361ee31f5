//! JSON and CSV file formats.
//!
//! * matrix: `{"n": 2, "entries": [[[re, im], ...], ...]}` (row-major) or
//!   CSV with one row per line and cells like `1.5`, `2-0.5j`;
//! * blocks: `{"n": 2, "N": 4, "blocks": [[matrix, ...], ...]}`;
//! * spectral data: `{"factor_type": "TypeII_inf", "head": [[mu, m], ...],
//!   "tail": {"ratio": r, "mult": m, "start": s} | null}`;
//! * Δ spectrum: `{"lattice": {"base": 10}, "mult": "inf"}` or
//!   `{"entries": [[lambda, n | "inf"], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::block_factor::{BlockOperator, BlockVector};
use crate::error::{Error, Result};
use crate::finite_factor::MatrixElement;
use crate::scalar::Real;
use crate::spectral::{DeltaSpectrum, EnumerationBounds, FactorType, GeometricTail, Multiplicity, SpectralData};

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(m: &MatrixElement<T>) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let z = m.get(r, c);
                        [z.re.as_f64(), z.im.as_f64()]
                    })
                    .collect()
            })
            .collect();
        Self { n, entries }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<MatrixElement<T>> {
        if self.entries.len() != self.n {
            return Err(Error::ShapeMismatch { expected: self.n, rows: self.entries.len(), cols: self.n });
        }
        let rows: Vec<Vec<(f64, f64)>> =
            self.entries.iter().map(|row| row.iter().map(|z| (z[0], z[1])).collect()).collect();
        MatrixElement::from_rows(&rows)
    }
}

pub fn parse_matrix_json<T: Real>(text: &str) -> Result<MatrixElement<T>> {
    serde_json::from_str::<MatrixFile>(text).map_err(format_err)?.to_matrix()
}

pub fn matrix_to_json<T: Real>(m: &MatrixElement<T>) -> serde_json::Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("plain data serializes")
}

/// Parses `a`, `bj`, `a+bj` or `a-bj` (`i` is accepted for `j`).
pub fn parse_complex(cell: &str) -> Result<(f64, f64)> {
    let s: String = cell.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Format(format!("cannot parse complex number {cell:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['j', 'i']) else {
        return s.parse().map(|re| (re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            t => t.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => Ok((body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok((0.0, imag(body)?)),
    }
}

pub fn parse_matrix_csv<T: Real>(text: &str) -> Result<MatrixElement<T>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(format_err)?;
        rows.push(record.iter().map(parse_complex).collect::<Result<Vec<_>>>()?);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty matrix".into()));
    }
    MatrixElement::from_rows(&rows)
}

pub fn matrix_to_csv<T: Real>(m: &MatrixElement<T>) -> String {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in 0..m.dim() {
        let row = (0..m.dim()).map(|c| {
            let z = m.get(r, c);
            format!("{}{:+}j", z.re.as_f64(), z.im.as_f64())
        });
        writer.write_record(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Reads a matrix, choosing CSV for `.csv` files and JSON otherwise.
pub fn read_matrix<T: Real>(path: &Path) -> Result<MatrixElement<T>> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_matrix_csv(&text),
        _ => parse_matrix_json(&text),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockFile {
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    pub blocks: Vec<Vec<MatrixFile>>,
}

impl BlockFile {
    fn rows<T: Real>(&self) -> Result<Vec<Vec<MatrixElement<T>>>> {
        if self.blocks.len() != self.size || self.blocks.iter().any(|r| r.len() != self.size) {
            return Err(Error::Format(format!("expected {0} x {0} blocks", self.size)));
        }
        self.blocks.iter().map(|r| r.iter().map(MatrixFile::to_matrix).collect()).collect()
    }

    fn from_rows<T: Real>(n: usize, rows: &[Vec<MatrixElement<T>>]) -> Self {
        let blocks = rows.iter().map(|r| r.iter().map(MatrixFile::from_matrix).collect()).collect();
        Self { n, size: rows.len(), blocks }
    }

    pub fn to_vector<T: Real>(&self) -> Result<BlockVector<T>> {
        BlockVector::new(self.n, self.rows()?)
    }

    pub fn to_operator<T: Real>(&self) -> Result<BlockOperator<T>> {
        BlockOperator::new(self.n, self.rows()?)
    }

    pub fn from_vector<T: Real>(u: &BlockVector<T>) -> Self {
        Self::from_rows(u.n(), &u.rows())
    }

    pub fn from_operator<T: Real>(t: &BlockOperator<T>) -> Self {
        Self::from_rows(t.n(), &t.rows())
    }
}

pub fn parse_blocks(text: &str) -> Result<BlockFile> {
    serde_json::from_str(text).map_err(format_err)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub factor_type: FactorType,
    #[serde(default)]
    pub head: Vec<(f64, f64)>,
    #[serde(default)]
    pub tail: Option<GeometricTail>,
    /// Rescale `μ` to `Σ m_k μ_k = 1` instead of rejecting unnormalized data.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub normalize: bool,
}

impl SpectrumFile {
    pub fn from_data(s: &SpectralData) -> Self {
        Self { factor_type: s.factor_type(), head: s.head().to_vec(), tail: s.tail().copied(), normalize: false }
    }

    pub fn to_data(&self) -> Result<SpectralData> {
        let (ft, head, tail) = (self.factor_type, self.head.clone(), self.tail);
        if self.normalize {
            SpectralData::normalized(ft, head, tail)
        } else {
            SpectralData::new(ft, head, tail)
        }
    }
}

pub fn parse_spectral_data(text: &str) -> Result<SpectralData> {
    serde_json::from_str::<SpectrumFile>(text).map_err(format_err)?.to_data()
}

pub fn spectral_data_to_json(s: &SpectralData) -> serde_json::Value {
    serde_json::to_value(SpectrumFile::from_data(s)).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetFile {
    Lattice { lattice: LatticeSpec, mult: Multiplicity },
    Entries { entries: Vec<(f64, Multiplicity)> },
}

impl TargetFile {
    pub fn from_spectrum(d: &DeltaSpectrum) -> Self {
        match d.lattice_spec() {
            Some(l) => Self::Lattice { lattice: LatticeSpec { base: l.base }, mult: l.mult },
            None => Self::Entries { entries: d.entries().to_vec() },
        }
    }

    pub fn to_spectrum(&self) -> Result<DeltaSpectrum> {
        match self {
            Self::Lattice { lattice, mult } => DeltaSpectrum::lattice(lattice.base, *mult),
            Self::Entries { entries } => DeltaSpectrum::from_entries(entries.clone()),
        }
    }
}

pub fn parse_target(text: &str) -> Result<DeltaSpectrum> {
    serde_json::from_str::<TargetFile>(text).map_err(format_err)?.to_spectrum()
}

/// Input of the `enumerate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRequest {
    pub target: TargetFile,
    pub factor_type: FactorType,
    #[serde(default)]
    pub bounds: EnumerationBounds,
}

pub fn parse_enumeration_request(text: &str) -> Result<EnumerationRequest> {
    serde_json::from_str(text).map_err(format_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_cells() {
        assert_eq!(parse_complex("1.5").unwrap(), (1.5, 0.0));
        assert_eq!(parse_complex("2-0.5j").unwrap(), (2.0, -0.5));
        assert_eq!(parse_complex(" -1e-3+2E+2i ").unwrap(), (-1e-3, 200.0));
        assert_eq!(parse_complex("3j").unwrap(), (0.0, 3.0));
        assert_eq!(parse_complex("-j").unwrap(), (0.0, -1.0));
        assert_eq!(parse_complex("1-j").unwrap(), (1.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn matrix_round_trips() {
        let m = MatrixElement::<f64>::from_rows(&[vec![(1.0, 0.5), (0.0, -2.0)], vec![(3.25, 0.0), (-1.0, 1e-3)]])
            .unwrap();
        let json = matrix_to_json(&m).to_string();
        assert_eq!(parse_matrix_json::<f64>(&json).unwrap(), m);
        let csv = matrix_to_csv(&m);
        assert_eq!(parse_matrix_csv::<f64>(&csv).unwrap(), m);
    }

    #[test]
    fn malformed_matrices() {
        assert!(parse_matrix_json::<f64>(r#"{"n": 2, "entries": [[[1, 0]]]}"#).is_err());
        assert!(parse_matrix_csv::<f64>("1,2\n3").is_err());
        assert!(parse_matrix_json::<f64>("not json").is_err());
    }

    #[test]
    fn spectral_round_trip() {
        let text = r#"{"factor_type": "TypeII_inf", "head": [[0.9082568807339449, 1]],
            "tail": {"ratio": 0.01, "mult": 1, "start": 0.09082568807339449}}"#;
        let s = parse_spectral_data(text).unwrap();
        assert_eq!(s.head().len(), 1);
        let again = spectral_data_to_json(&s).to_string();
        assert_eq!(parse_spectral_data(&again).unwrap(), s);
        let raw = r#"{"factor_type": "TypeI_finite", "head": [[2, 1], [1, 1]], "normalize": true}"#;
        assert!((parse_spectral_data(raw).unwrap().total_weight() - 1.0).abs() < 1e-12);
        assert!(parse_spectral_data(r#"{"factor_type": "TypeI_finite", "head": [[2, 1]]}"#).is_err());
    }

    #[test]
    fn targets() {
        let t = parse_target(r#"{"lattice": {"base": 10}, "mult": "inf"}"#).unwrap();
        assert_eq!(t.multiplicity(100.0), Some(Multiplicity::Infinite));
        let t = parse_target(r#"{"entries": [[0.5, 1], [1, 2], [2, 1]]}"#).unwrap();
        assert_eq!(t.multiplicity(2.0), Some(Multiplicity::Finite(1.0)));
        assert!(parse_target(r#"{"entries": [[2, 1]]}"#).is_err());
    }

    #[test]
    fn enumeration_request_defaults() {
        let r = parse_enumeration_request(
            r#"{"target": {"lattice": {"base": 10}, "mult": "inf"}, "factor_type": "TypeII_inf",
                "bounds": {"max_head": 2}}"#,
        )
        .unwrap();
        assert_eq!(r.bounds.max_head, 2);
        assert_eq!(r.bounds.cutoff, EnumerationBounds::default().cutoff);
    }
}
