//! Lie algebra structure constants and the Lie-Poisson bracket.
//!
//! A finite-dimensional Lie-Poisson structure on R^n is fixed by the
//! structure constants C^{ij}_k of an n-dimensional Lie algebra through
//! J^{ij}(z) = C^{ij}_k z^k. This module stores validated structure
//! constants and evaluates the bivector J, the Poisson bracket of two
//! gradient covectors, and the anchor map J# that turns a covector into a
//! tangent vector.
//!
//! Covectors and vectors are both plain `&[f64]` slices; the variance
//! distinction is a documentation convention, since every metric in this
//! crate is Euclidean.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Absolute tolerance for the antisymmetry and Jacobi checks performed at
/// construction time.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Levi-Civita symbol on {0, 1, 2}; zero whenever an index repeats.
pub(crate) fn epsilon(i: usize, j: usize, k: usize) -> f64 {
    let (i, j, k) = (i as i64, j as i64, k as i64);
    (((j - i) * (k - j) * (k - i)) / 2) as f64
}

/// Structure constants C^{ij}_k of an n-dimensional Lie algebra, stored
/// flat with the upper antisymmetric pair first: entry (i, j, k) lives at
/// (i*n + j)*n + k.
///
/// Construction validates antisymmetry in (i, j) and the Jacobi identity,
/// so any value of this type downstream is a genuine Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    c: Vec<f64>,
}

impl StructureConstants {
    /// Validate and wrap raw constants. `c` must have length `dim^3` and is
    /// indexed as (i*dim + j)*dim + k.
    pub fn new(dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let sc = StructureConstants { dim, c };
        sc.check_antisymmetry()?;
        sc.check_jacobi()?;
        Ok(sc)
    }

    /// so(3): C^{ij}_k = -eps_{ijk}, dimension 3. The induced Lie-Poisson
    /// bracket is the free rigid body bracket on angular momentum space.
    pub fn so3() -> Self {
        let mut c = vec![0.0; 27];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[(i * 3 + j) * 3 + k] = -epsilon(i, j, k);
                }
            }
        }
        StructureConstants { dim: 3, c }
    }

    /// se(3) = so(3) semidirect R^3: the heavy top algebra on coordinates
    /// (L^1, L^2, L^3, Gamma^1, Gamma^2, Gamma^3). The L-L block closes on
    /// L with -eps, the mixed L-Gamma blocks close on Gamma, and Gamma-Gamma
    /// commutes. The sign of the mixed block is the one that reproduces the
    /// rigid body equations Gamma_dot = Gamma x omega.
    pub fn heavy_top() -> Self {
        let n = 6;
        let mut c = vec![0.0; n * n * n];
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    let eps = epsilon(a, b, k);
                    c[(a * n + b) * n + k] = -eps;
                    c[(a * n + (b + 3)) * n + (k + 3)] = -eps;
                    c[((b + 3) * n + a) * n + (k + 3)] = eps;
                }
            }
        }
        StructureConstants { dim: 6, c }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry C^{ij}_k.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    let m = self.get(j, i, k);
                    if (v + m).abs() > VALIDATION_TOL {
                        return Err(Error::NotAntisymmetric {
                            i,
                            j,
                            k,
                            value: v,
                            mirrored: m,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_jacobi(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut acc = 0.0;
                        for a in 0..n {
                            acc += self.get(i, j, a) * self.get(a, k, l)
                                + self.get(j, k, a) * self.get(a, i, l)
                                + self.get(k, i, a) * self.get(a, j, l);
                        }
                        if acc.abs() > VALIDATION_TOL {
                            return Err(Error::JacobiViolation {
                                i,
                                j,
                                k,
                                l,
                                residual: acc.abs(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }
}

/// Contravariant metric g^{ij}, symmetric. Everything shipped here uses the
/// Euclidean identity metric; the type exists so that index raising stays
/// an explicit step rather than a silent assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    g: Mat,
}

impl Metric {
    /// Identity metric on n coordinates.
    pub fn euclidean(n: usize) -> Self {
        Metric {
            g: Mat::identity(n),
        }
    }

    /// Wrap an explicit symmetric matrix.
    pub fn new(g: Mat) -> Result<Self> {
        let n = g.rows();
        if g.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.cols(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if (g[(i, j)] - g[(j, i)]).abs() > VALIDATION_TOL {
                    return Err(Error::NonFinite("asymmetric metric"));
                }
            }
        }
        Ok(Metric { g })
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &Mat {
        &self.g
    }

    /// Pairing g(alpha, beta) = alpha_i g^{ij} beta_j of two covectors.
    pub fn pairing(&self, alpha: &[f64], beta: &[f64]) -> f64 {
        let n = self.g.rows();
        assert_eq!(alpha.len(), n);
        assert_eq!(beta.len(), n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += alpha[i] * self.g[(i, j)] * beta[j];
            }
        }
        acc
    }
}

/// Poisson bivector J^{ij}(z) = C^{ij}_k z^k as an antisymmetric matrix.
pub fn lie_poisson_bivector(c: &StructureConstants, z: &[f64]) -> Result<Mat> {
    c.check_len(z)?;
    let n = c.dim();
    let mut j_mat = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += c.get(i, j, k) * z[k];
            }
            j_mat[(i, j)] = acc;
        }
    }
    Ok(j_mat)
}

/// Bracket {F, G}(z) = dF_i J^{ij}(z) dG_j of two gradient covectors.
pub fn poisson_bracket(c: &StructureConstants, z: &[f64], df: &[f64], dg: &[f64]) -> Result<f64> {
    c.check_len(z)?;
    c.check_len(df)?;
    c.check_len(dg)?;
    let n = c.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                acc += df[i] * c.get(i, j, k) * z[k] * dg[j];
            }
        }
    }
    Ok(acc)
}

/// Anchor map J#: the tangent vector v with v[j] = alpha_i J^{ij}(z), so
/// that <beta, v> = J(alpha, beta) for every covector beta.
pub fn anchor_apply(c: &StructureConstants, z: &[f64], alpha: &[f64]) -> Result<Vec<f64>> {
    c.check_len(z)?;
    c.check_len(alpha)?;
    let n = c.dim();
    let mut v = vec![0.0; n];
    for j in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += alpha[i] * c.get(i, j, k) * z[k];
            }
        }
        v[j] = acc;
    }
    Ok(v)
}
