//! Dense real matrices with an attached norm convention.
//!
//! Dimensions stay small here (the fixtures live in `R^1`..`R^3`, generated
//! systems rarely exceed `R^6`), so everything is straightforward dense
//! arithmetic in fixed loop order.

use crate::error::{Error, Result};

/// Which vector norm the ambient space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    L2,
    LInf,
}

impl NormKind {
    /// Dual pairing: l1 <-> linf, l2 <-> l2.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn vector_norm(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::LInf => v.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }

    pub fn parse(s: &str) -> Option<NormKind> {
        match s {
            "l1" => Some(NormKind::L1),
            "l2" => Some(NormKind::L2),
            "linf" => Some(NormKind::LInf),
            _ => None,
        }
    }
}

/// A d x d real matrix acting on `R^d`, with the norm convention it is
/// measured in. Row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    dim: usize,
    norm: NormKind,
    entries: Vec<f64>,
}

impl LinearOperator {
    pub fn from_entries(dim: usize, norm: NormKind, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, norm, entries })
    }

    pub fn identity(dim: usize, norm: NormKind) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, norm, entries }
    }

    pub fn zero(dim: usize, norm: NormKind) -> Self {
        Self {
            dim,
            norm,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn diagonal(norm: NormKind, diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut entries = vec![0.0; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            entries[i * dim + i] = *d;
        }
        Self { dim, norm, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            let mut acc = 0.0;
            for j in 0..self.dim {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    entries[i * d + j] += a * other.get(k, j);
                }
            }
        }
        Ok(LinearOperator {
            dim: d,
            norm: self.norm,
            entries,
        })
    }

    pub fn transpose(&self) -> LinearOperator {
        let d = self.dim;
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.get(i, j);
            }
        }
        LinearOperator {
            dim: d,
            norm: self.norm,
            entries,
        }
    }

    pub fn sub(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(LinearOperator {
            dim: self.dim,
            norm: self.norm,
            entries,
        })
    }

    pub fn add(&self, other: &LinearOperator) -> Result<LinearOperator> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(LinearOperator {
            dim: self.dim,
            norm: self.norm,
            entries,
        })
    }

    pub fn scaled(&self, c: f64) -> LinearOperator {
        LinearOperator {
            dim: self.dim,
            norm: self.norm,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Operator norm induced by `norm_kind`.
    ///
    /// l1: max absolute column sum; linf: max absolute row sum;
    /// l2: largest singular value.
    pub fn operator_norm(&self) -> f64 {
        let d = self.dim;
        match self.norm {
            NormKind::L1 => {
                let mut best = 0.0f64;
                for j in 0..d {
                    let mut col = 0.0;
                    for i in 0..d {
                        col += self.get(i, j).abs();
                    }
                    best = best.max(col);
                }
                best
            }
            NormKind::LInf => {
                let mut best = 0.0f64;
                for i in 0..d {
                    let mut row = 0.0;
                    for j in 0..d {
                        row += self.get(i, j).abs();
                    }
                    best = best.max(row);
                }
                best
            }
            NormKind::L2 => {
                // sqrt of the largest eigenvalue of A^T A
                let at = self.transpose();
                let ata = at.matmul(self).expect("square");
                sym_eig_max(&ata.entries, d).max(0.0).sqrt()
            }
        }
    }

    /// True when the entries are bit-exactly the identity matrix.
    pub fn is_exact_identity(&self) -> bool {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                if self.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<LinearOperator> {
        let d = self.dim;
        let mut a = self.entries.clone();
        let mut inv = LinearOperator::identity(d, self.norm).entries;
        for col in 0..d {
            let mut pivot = col;
            for r in col + 1..d {
                if a[r * d + col].abs() > a[pivot * d + col].abs() {
                    pivot = r;
                }
            }
            if a[pivot * d + col].abs() < 1e-300 {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                for j in 0..d {
                    a.swap(col * d + j, pivot * d + j);
                    inv.swap(col * d + j, pivot * d + j);
                }
            }
            let p = a[col * d + col];
            for j in 0..d {
                a[col * d + j] /= p;
                inv[col * d + j] /= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * d + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] -= f * a[col * d + j];
                    inv[r * d + j] -= f * inv[col * d + j];
                }
            }
        }
        LinearOperator::from_entries(d, self.norm, inv)
    }

    /// Defect `max |(P^2 - P)_{ij}|`, zero for exact projectors.
    pub fn idempotency_defect(&self) -> f64 {
        let p2 = self.matmul(self).expect("square");
        p2.sub(self).expect("square").max_abs_entry()
    }
}

/// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
fn sym_eig_max(entries: &[f64], d: usize) -> f64 {
    if d == 1 {
        return entries[0];
    }
    let mut a = entries.to_vec();
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return 0.0;
    }
    let tol = 1e-15 * frob;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in p + 1..d {
                off = off.max(a[p * d + q].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..d {
        best = best.max(a[i * d + i]);
    }
    best
}
