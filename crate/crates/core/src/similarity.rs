//! Pairwise attribute similarity.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Corpus, Payload};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Exponential,
    Cosine,
}

impl Kernel {
    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Exponential => "exponential",
            Kernel::Cosine => "cosine",
        }
    }

    pub fn accepts(self, kind: AttributeKind) -> bool {
        match self {
            Kernel::Linear | Kernel::Exponential => kind == AttributeKind::Numeric,
            Kernel::Cosine => kind == AttributeKind::Vector,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn check_finite(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Argument(format!("non-finite similarity input ({a}, {b})")))
    }
}

/// `1 / (1 + |a - b|)`
pub fn linear_similarity(a: f64, b: f64) -> Result<f64> {
    check_finite(a, b)?;
    Ok(1.0 / (1.0 + (a - b).abs()))
}

/// `exp(-|a - b|)`
pub fn exponential_similarity(a: f64, b: f64) -> Result<f64> {
    check_finite(a, b)?;
    Ok((-(a - b).abs()).exp())
}

/// Cosine of the angle between `u` and `v`; zero when either has zero norm.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Argument(format!(
            "cosine of vectors with lengths {} and {}",
            u.len(),
            v.len()
        )));
    }
    let nu = norm(u);
    let nv = norm(v);
    Ok(cosine_with_norms(u, v, nu, nv))
}

fn norm(u: &[f64]) -> f64 {
    u.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn cosine_with_norms(u: &[f64], v: &[f64], nu: f64, nv: f64) -> f64 {
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    (dot / (nu * nv)).clamp(-1.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityMatrix {
    pub attribute: String,
    pub kernel: Kernel,
    pub values: DMatrix<f64>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    /// Similarities with negative entries clamped to zero, as used for
    /// graph edges and unexpectedness.
    pub fn nonnegative(&self) -> DMatrix<f64> {
        self.values.map(|v| v.max(0.0))
    }

    /// Writes the `CSIM` dump: a 16-byte header (magic, u32 m, u32 reserved,
    /// 4 zero padding bytes) followed by m*m little-endian f64 values in
    /// row-major order.
    pub fn write_binary<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let m = self.len();
        out.write_all(b"CSIM")?;
        out.write_all(&(m as u32).to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        out.write_all(&[0u8; 4])?;
        let mut buf = Vec::with_capacity(m * m * 8);
        for i in 0..m {
            for j in 0..m {
                buf.extend_from_slice(&self.values[(i, j)].to_le_bytes());
            }
        }
        out.write_all(&buf)
    }

    pub fn read_binary<R: Read>(
        mut input: R,
        attribute: impl Into<String>,
        kernel: Kernel,
    ) -> Result<Self> {
        let bad = |msg: &str| Error::Integrity(format!("similarity dump: {msg}"));
        let mut header = [0u8; 16];
        input
            .read_exact(&mut header)
            .map_err(|_| bad("truncated header"))?;
        if &header[..4] != b"CSIM" {
            return Err(bad("bad magic"));
        }
        let m = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let mut body = Vec::new();
        input
            .read_to_end(&mut body)
            .map_err(|_| bad("unreadable body"))?;
        if body.len() != m * m * 8 {
            return Err(bad("body length does not match header"));
        }
        let values = DMatrix::from_fn(m, m, |i, j| {
            let at = (i * m + j) * 8;
            f64::from_le_bytes(body[at..at + 8].try_into().unwrap())
        });
        Ok(Self {
            attribute: attribute.into(),
            kernel,
            values,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_binary(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, attribute: impl Into<String>, kernel: Kernel) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(std::io::BufReader::new(file), attribute, kernel)
    }
}

/// Which kernels to run for numeric attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NumericKernels {
    /// Linear and exponential, each as its own graph.
    #[default]
    Both,
    /// Only the kernel declared in the schema.
    Declared,
}

pub fn kernels_for(kind: AttributeKind, declared: Kernel, numeric: NumericKernels) -> Vec<Kernel> {
    match (kind, numeric) {
        (AttributeKind::Numeric, NumericKernels::Both) => vec![Kernel::Linear, Kernel::Exponential],
        _ => vec![declared],
    }
}

pub fn build_similarity_matrix(
    corpus: &Corpus,
    attribute: &str,
    kernel: Kernel,
) -> Result<SimilarityMatrix> {
    let k = corpus
        .attribute_index(attribute)
        .ok_or_else(|| Error::Schema(format!("unknown attribute `{attribute}`")))?;
    let spec = &corpus.attributes[k];
    if !kernel.accepts(spec.kind) {
        return Err(Error::Schema(format!(
            "kernel {kernel} does not apply to {:?} attribute `{attribute}`",
            spec.kind
        )));
    }
    let m = corpus.len();
    let mut values = DMatrix::zeros(m, m);

    match spec.kind {
        AttributeKind::Numeric => {
            let xs = corpus
                .artifacts
                .iter()
                .map(|a| match a.values[k] {
                    Payload::Scalar(v) => Ok(v),
                    _ => Err(Error::Argument(format!(
                        "attribute `{attribute}` has missing values; impute first"
                    ))),
                })
                .collect::<Result<Vec<f64>>>()?;
            let f = match kernel {
                Kernel::Linear => linear_similarity,
                _ => exponential_similarity,
            };
            let rows = map_rows(m, |i| (i..m).map(|j| f(xs[i], xs[j])).collect::<Result<Vec<_>>>());
            fill_symmetric(&mut values, rows?);
        }
        AttributeKind::Vector => {
            let vs = corpus
                .artifacts
                .iter()
                .map(|a| match &a.values[k] {
                    Payload::Vector(v) => Ok(v.as_slice()),
                    _ => Err(Error::Argument(format!(
                        "attribute `{attribute}` has missing values; impute first"
                    ))),
                })
                .collect::<Result<Vec<&[f64]>>>()?;
            let norms: Vec<f64> = vs.iter().map(|v| norm(v)).collect();
            let rows = map_rows(m, |i| {
                Ok((i..m)
                    .map(|j| cosine_with_norms(vs[i], vs[j], norms[i], norms[j]))
                    .collect())
            });
            fill_symmetric(&mut values, rows?);
        }
    }

    Ok(SimilarityMatrix {
        attribute: attribute.to_string(),
        kernel,
        values,
    })
}

/// Upper-triangle rows `(i, i..m)` computed independently per `i`.
fn map_rows<F>(m: usize, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(usize) -> Result<Vec<f64>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..m).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..m).map(f).collect()
    }
}

fn fill_symmetric(values: &mut DMatrix<f64>, rows: Vec<Vec<f64>>) {
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let j = i + offset;
            values[(i, j)] = v;
            values[(j, i)] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ArtifactRecord, AttributeSpec};

    #[test]
    fn linear_examples() {
        assert_eq!(linear_similarity(2.0, 2.0).unwrap(), 1.0);
        assert_eq!(linear_similarity(0.0, 1.0).unwrap(), 0.5);
        assert_eq!(linear_similarity(0.0, 3.0).unwrap(), 0.25);
        assert!(linear_similarity(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn exponential_examples() {
        assert_eq!(exponential_similarity(5.0, 5.0).unwrap(), 1.0);
        assert!((exponential_similarity(0.0, 1.0).unwrap() - 0.36788).abs() < 1e-5);
        assert!((exponential_similarity(-1.0, 1.0).unwrap() - (-2f64).exp()).abs() < 1e-12);
        assert!(exponential_similarity(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(cosine_similarity(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(cosine_similarity(&[1.0], &[1.0, 2.0]).is_err());
    }

    fn vector_corpus(rows: &[&[f64]]) -> Corpus {
        let dim = rows[0].len();
        Corpus::new(
            vec![AttributeSpec::vector("plot", dim)],
            rows.iter()
                .enumerate()
                .map(|(i, r)| ArtifactRecord {
                    id: format!("a{i}"),
                    year: 2000 + i as i32,
                    values: vec![Payload::Vector(r.to_vec())],
                })
                .collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn single_artifact_matrix() {
        let corpus = Corpus::new(
            vec![AttributeSpec::numeric("runtime", Kernel::Linear)],
            vec![ArtifactRecord {
                id: "x".into(),
                year: 1999,
                values: vec![Payload::Scalar(0.3)],
            }],
            vec![],
        )
        .unwrap();
        let sim = build_similarity_matrix(&corpus, "runtime", Kernel::Linear).unwrap();
        assert_eq!(sim.values, DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn identical_vectors_all_ones() {
        let corpus = vector_corpus(&[&[0.3, -1.2, 2.0], &[0.3, -1.2, 2.0]]);
        let sim = build_similarity_matrix(&corpus, "plot", Kernel::Cosine).unwrap();
        for v in sim.values.iter() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_kind_mismatch() {
        let corpus = vector_corpus(&[&[1.0, 0.0]]);
        assert!(matches!(
            build_similarity_matrix(&corpus, "plot", Kernel::Linear),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            build_similarity_matrix(&corpus, "nope", Kernel::Cosine),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn negative_cosine_clamped_for_edges() {
        let corpus = vector_corpus(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        let sim = build_similarity_matrix(&corpus, "plot", Kernel::Cosine).unwrap();
        assert_eq!(sim.values[(0, 1)], -1.0);
        assert_eq!(sim.nonnegative()[(0, 1)], 0.0);
    }

    #[test]
    fn binary_dump_roundtrip() {
        let corpus = vector_corpus(&[&[1.0, 0.5], &[0.2, 0.1], &[-0.3, 2.0]]);
        let sim = build_similarity_matrix(&corpus, "plot", Kernel::Cosine).unwrap();
        let mut buf = Vec::new();
        sim.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 9 * 8);
        assert_eq!(&buf[..4], b"CSIM");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 0);
        assert_eq!(&buf[12..16], &[0u8; 4]);
        let back = SimilarityMatrix::read_binary(buf.as_slice(), "plot", Kernel::Cosine).unwrap();
        assert_eq!(back, sim);
        assert!(SimilarityMatrix::read_binary(&buf[..20], "plot", Kernel::Cosine).is_err());
    }
}
