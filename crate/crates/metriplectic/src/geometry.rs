//! Contravariant Riemann-Poisson geometry.
//!
//! For a Lie-Poisson bivector and a constant Euclidean metric the
//! contravariant Levi-Civita connection has constant coefficients
//! Gamma^{ij}_k = (C^{ij}_k - C^{jk}_i + C^{ki}_j) / 2, and its curvature is
//! an algebraic contraction of those coefficients. This module computes
//! both in closed form, contracts the curvature into the 4-bracket and the
//! symmetric metriplectic matrix, and provides slow finite-difference
//! oracles (Koszul bracket, six-term connection formula, curvature as a
//! composition of connections) that rederive everything from the defining
//! identities for cross-checking.

use crate::algebra::{lie_poisson_bivector, StructureConstants};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Relative scale of the central finite-difference step used inside the
/// oracles: h = FD_SCALE * max(1, |z|_inf). J is polynomial and g constant,
/// so truncation error at this step is negligible against the 1e-6
/// cross-check tolerances.
pub const FD_SCALE: f64 = 1e-5;

/// Coarser step for the outer differentiation in the curvature composition
/// oracle. The fields being differentiated there are themselves produced by
/// the six-term oracle and carry roundoff of order 1e-11, so the step must
/// be large enough that noise/h stays below the cross-check tolerance.
pub const COMPOSITION_FD_SCALE: f64 = 1e-3;

/// A covector field: z -> (alpha_1(z), ..., alpha_n(z)).
pub type CovectorField<'a> = dyn Fn(&[f64]) -> Vec<f64> + 'a;

/// A matrix-valued field, used for bivectors J(z) and metrics g(z).
pub type MatrixField<'a> = dyn Fn(&[f64]) -> Mat + 'a;

fn fd_step(z: &[f64], scale: f64) -> f64 {
    let zmax = z.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    scale * zmax.max(1.0)
}

/// Connection coefficients Gamma^{ij}_k, constant because the bivector is
/// linear and the metric constant. Stored flat at (i*n + j)*n + k.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    dim: usize,
    gamma: Vec<f64>,
}

impl ConnectionCoefficients {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry Gamma^{ij}_k.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Largest violation of Gamma^{ij}_k - Gamma^{ji}_k = C^{ij}_k, the
    /// torsion-free condition for a Lie-Poisson bivector.
    pub fn torsion_residual(&self, c: &StructureConstants) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.get(i, j, k) - self.get(j, i, k) - c.get(i, j, k);
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// Largest violation of Gamma^{ij}_k + Gamma^{ik}_j = 0, the metric
    /// compatibility condition specialized to g = identity.
    pub fn compatibility_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }
}

/// Contravariant Levi-Civita connection for a Lie-Poisson bivector and the
/// Euclidean metric: Gamma^{ij}_k = (C^{ij}_k - C^{jk}_i + C^{ki}_j) / 2.
pub fn connection_euclidean(c: &StructureConstants) -> ConnectionCoefficients {
    let n = c.dim();
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] =
                    0.5 * (c.get(i, j, k) - c.get(j, k, i) + c.get(k, i, j));
            }
        }
    }
    ConnectionCoefficients { dim: n, gamma }
}

/// Fully contravariant curvature tensor R^{ijkl} (last index raised by the
/// Euclidean metric). Stored flat at ((i*n + j)*n + k)*n + l.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    r: Vec<f64>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry R^{ijkl}.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.r[(((i * self.dim) + j) * self.dim + k) * self.dim + l]
    }

    /// Largest violation across the three index symmetries
    /// R^{ijkl} = -R^{jikl} = -R^{ijlk} = R^{klij}.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        worst = worst.max((v + self.get(j, i, k, l)).abs());
                        worst = worst.max((v + self.get(i, j, l, k)).abs());
                        worst = worst.max((v - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest violation of the first Bianchi identity
    /// R^{ijkl} + R^{jkil} + R^{kijl} = 0.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Indices and values of all nonzero entries, for reporting.
    pub fn nonzero_entries(&self, tol: f64) -> Vec<((usize, usize, usize, usize), f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        if v.abs() > tol {
                            out.push(((i, j, k, l), v));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Curvature of a constant-coefficient connection:
///
///   R^{ijk}_l = sum_a (Gamma^{ik}_a Gamma^{ja}_l - Gamma^{jk}_a Gamma^{ia}_l
///                      + C^{ij}_a Gamma^{ak}_l)
///
/// i.e. the composition R(alpha, beta)gamma = D_beta D_alpha gamma
/// - D_alpha D_beta gamma + D_{[alpha, beta]} gamma. The orientation of the
/// composition is fixed so that contracting twice with an energy gradient
/// yields a positive semidefinite dissipative matrix; see
/// `curvature_composition_oracle`, which implements the same orientation
/// directly from connection evaluations.
pub fn curvature_constant_gamma(
    c: &StructureConstants,
    gamma: &ConnectionCoefficients,
) -> CurvatureTensor {
    let n = c.dim();
    let mut r = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += gamma.get(i, k, a) * gamma.get(j, a, l)
                            - gamma.get(j, k, a) * gamma.get(i, a, l)
                            + c.get(i, j, a) * gamma.get(a, k, l);
                    }
                    r[(((i * n) + j) * n + k) * n + l] = acc;
                }
            }
        }
    }
    CurvatureTensor { dim: n, r }
}

/// Curvature 4-bracket (F, K; G, N) = R^{ijkl} dF_i dK_j dG_k dN_l.
pub fn four_bracket(
    r: &CurvatureTensor,
    df: &[f64],
    dk: &[f64],
    dg: &[f64],
    dn: &[f64],
) -> Result<f64> {
    let n = r.dim;
    for v in [df, dk, dg, dn] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * df[i] * dk[j] * dg[k] * dn[l];
                }
            }
        }
    }
    Ok(acc)
}

/// Symmetric metriplectic matrix M[i][k] = R^{ijkl} dH_j dH_l, so that
/// (F, G) = dF^T M dG realizes the bracket (F, H; G, H). M is positive
/// semidefinite and annihilates dH.
pub fn metriplectic_matrix(r: &CurvatureTensor, dh: &[f64]) -> Result<Mat> {
    let n = r.dim;
    if dh.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dh.len(),
        });
    }
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * dh[j] * dh[l];
                }
            }
            m[(i, k)] = acc;
        }
    }
    Ok(m)
}

fn covector_partial(field: &CovectorField, z: &[f64], l: usize, h: f64) -> Vec<f64> {
    let mut zp = z.to_vec();
    let mut zm = z.to_vec();
    zp[l] += h;
    zm[l] -= h;
    let fp = field(&zp);
    let fm = field(&zm);
    fp.iter().zip(&fm).map(|(p, m)| (p - m) / (2.0 * h)).collect()
}

/// Koszul bracket of two covector fields over a Lie-Poisson bivector,
/// evaluated at z:
///
///   [alpha, beta]_k = alpha_i beta_j C^{ij}_k
///                     + (J# alpha)^l d_l beta_k - (J# beta)^l d_l alpha_k
///
/// The bivector derivative is exact (dJ^{ij}/dz^k = C^{ij}_k); the field
/// derivatives are central differences. For basis covectors the result is
/// the constant covector C^{ij}_k, i.e. [dz^i, dz^j] = d{z^i, z^j}.
pub fn koszul_bracket(
    c: &StructureConstants,
    z: &[f64],
    alpha: &CovectorField,
    beta: &CovectorField,
) -> Result<Vec<f64>> {
    let n = c.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    let a = alpha(z);
    let b = beta(z);
    for v in [&a, &b] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let jm = lie_poisson_bivector(c, z)?;
    let h = fd_step(z, FD_SCALE);
    let mut out = vec![0.0; n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                out[k] += a[i] * b[j] * c.get(i, j, k);
            }
        }
    }
    for l in 0..n {
        let mut wa = 0.0;
        let mut wb = 0.0;
        for i in 0..n {
            wa += a[i] * jm[(i, l)];
            wb += b[i] * jm[(i, l)];
        }
        if wa != 0.0 {
            let db = covector_partial(beta, z, l, h);
            for k in 0..n {
                out[k] += wa * db[k];
            }
        }
        if wb != 0.0 {
            let da = covector_partial(alpha, z, l, h);
            for k in 0..n {
                out[k] -= wb * da[k];
            }
        }
    }
    Ok(out)
}

/// Koszul bracket for an arbitrary bivector field, with the bivector
/// derivative also taken by finite differences. Used by the oracles, which
/// must not assume the Lie-Poisson form they are checking.
pub fn koszul_bracket_general(
    jf: &MatrixField,
    z: &[f64],
    alpha: &CovectorField,
    beta: &CovectorField,
    scale: f64,
) -> Vec<f64> {
    let n = z.len();
    let a = alpha(z);
    let b = beta(z);
    let jm = jf(z);
    let h = fd_step(z, scale);
    let mut out = vec![0.0; n];
    // d_k J^{ij} term
    for k in 0..n {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[k] += h;
        zm[k] -= h;
        let jp = jf(&zp);
        let jmn = jf(&zm);
        for i in 0..n {
            for j in 0..n {
                out[k] += a[i] * b[j] * (jp[(i, j)] - jmn[(i, j)]) / (2.0 * h);
            }
        }
    }
    // anchor terms
    for l in 0..n {
        let mut wa = 0.0;
        let mut wb = 0.0;
        for i in 0..n {
            wa += a[i] * jm[(i, l)];
            wb += b[i] * jm[(i, l)];
        }
        let db = covector_partial(beta, z, l, h);
        let da = covector_partial(alpha, z, l, h);
        for k in 0..n {
            out[k] += wa * db[k] - wb * da[k];
        }
    }
    out
}

fn connection_oracle_with_scale(
    jf: &MatrixField,
    gf: &MatrixField,
    z: &[f64],
    alpha: &CovectorField,
    beta: &CovectorField,
    scale: f64,
) -> Result<Vec<f64>> {
    let n = z.len();
    let h = fd_step(z, scale);
    let jm = jf(z);
    let gm = gf(z);
    let a0 = alpha(z);
    let b0 = beta(z);

    // Every derivative below is a central difference built from the same
    // 2n displaced evaluations of each field, collected once up front.
    let mut a_p = Vec::with_capacity(n);
    let mut a_m = Vec::with_capacity(n);
    let mut b_p = Vec::with_capacity(n);
    let mut b_m = Vec::with_capacity(n);
    let mut j_p = Vec::with_capacity(n);
    let mut j_m = Vec::with_capacity(n);
    let mut g_p = Vec::with_capacity(n);
    let mut g_m = Vec::with_capacity(n);
    for l in 0..n {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[l] += h;
        zm[l] -= h;
        a_p.push(alpha(&zp));
        a_m.push(alpha(&zm));
        b_p.push(beta(&zp));
        b_m.push(beta(&zm));
        j_p.push(jf(&zp));
        j_m.push(jf(&zm));
        g_p.push(gf(&zp));
        g_m.push(gf(&zm));
    }
    let dj = |l: usize, i: usize, j: usize| (j_p[l][(i, j)] - j_m[l][(i, j)]) / (2.0 * h);
    let da = |l: usize, k: usize| (a_p[l][k] - a_m[l][k]) / (2.0 * h);
    let db = |l: usize, k: usize| (b_p[l][k] - b_m[l][k]) / (2.0 * h);

    // Anchor vectors at z.
    let mut wa = vec![0.0; n];
    let mut wb = vec![0.0; n];
    for l in 0..n {
        for i in 0..n {
            wa[l] += a0[i] * jm[(i, l)];
            wb[l] += b0[i] * jm[(i, l)];
        }
    }

    // Koszul bracket [alpha, beta] at z.
    let mut kb_ab = vec![0.0; n];
    for k in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += a0[i] * b0[j] * dj(k, i, j);
            }
        }
        for l in 0..n {
            acc += wa[l] * db(l, k) - wb[l] * da(l, k);
        }
        kb_ab[k] = acc;
    }

    let pair = |u: &[f64], v: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += u[i] * gm[(i, j)] * v[j];
            }
        }
        acc
    };

    let mut rhs = vec![0.0; n];
    for c in 0..n {
        let mut total = 0.0;

        // J#(alpha)[g(beta, e_c)] + J#(beta)[g(e_c, alpha)]
        // - J#(e_c)[g(alpha, beta)], each a directional derivative of a
        // scalar field assembled at the displaced points.
        for l in 0..n {
            let mut f_p = 0.0;
            let mut f_m = 0.0;
            for j in 0..n {
                f_p += b_p[l][j] * g_p[l][(j, c)];
                f_m += b_m[l][j] * g_m[l][(j, c)];
            }
            total += wa[l] * (f_p - f_m) / (2.0 * h);

            f_p = 0.0;
            f_m = 0.0;
            for i in 0..n {
                f_p += g_p[l][(c, i)] * a_p[l][i];
                f_m += g_m[l][(c, i)] * a_m[l][i];
            }
            total += wb[l] * (f_p - f_m) / (2.0 * h);

            f_p = 0.0;
            f_m = 0.0;
            for i in 0..n {
                for j in 0..n {
                    f_p += a_p[l][i] * g_p[l][(i, j)] * b_p[l][j];
                    f_m += a_m[l][i] * g_m[l][(i, j)] * b_m[l][j];
                }
            }
            total -= jm[(c, l)] * (f_p - f_m) / (2.0 * h);
        }

        // + g([alpha, beta], e_c)
        let e_c: Vec<f64> = (0..n).map(|m| if m == c { 1.0 } else { 0.0 }).collect();
        total += pair(&kb_ab, &e_c);

        // - g([beta, e_c], alpha) with
        // [beta, e_c]_k = b_i d_k J^{ic} - J^{cl} d_l beta_k
        let mut kb_bc = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += b0[i] * dj(k, i, c);
            }
            for l in 0..n {
                acc -= jm[(c, l)] * db(l, k);
            }
            kb_bc[k] = acc;
        }
        total -= pair(&kb_bc, &a0);

        // + g([e_c, alpha], beta) with
        // [e_c, alpha]_k = a_j d_k J^{cj} + J^{cl} d_l alpha_k
        let mut kb_ca = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a0[j] * dj(k, c, j);
            }
            for l in 0..n {
                acc += jm[(c, l)] * da(l, k);
            }
            kb_ca[k] = acc;
        }
        total += pair(&kb_ca, &b0);

        if !total.is_finite() {
            return Err(Error::NonFinite("connection oracle"));
        }
        rhs[c] = total;
    }

    // Solve 2 g(D_alpha beta, e_c) = rhs for the covector components.
    let mut two_g = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            two_g[(i, j)] = 2.0 * gm[(i, j)];
        }
    }
    two_g.solve(&rhs)
}

/// Independent evaluation of the contravariant Levi-Civita connection
/// D_alpha beta at z from the six-term Koszul-type formula
///
///   2 g(D_alpha beta, gamma) = J#(alpha)[g(beta, gamma)]
///                            - J#(gamma)[g(alpha, beta)]
///                            + J#(beta)[g(gamma, alpha)]
///                            + g([alpha, beta], gamma)
///                            - g([beta, gamma], alpha)
///                            + g([gamma, alpha], beta)
///
/// with all field derivatives by central differences. Slow and only used to
/// cross-check `connection_euclidean`, which it must match on basis forms
/// for any Lie-Poisson bivector with constant metric.
pub fn connection_general_oracle(
    jf: &MatrixField,
    gf: &MatrixField,
    z: &[f64],
    alpha: &CovectorField,
    beta: &CovectorField,
) -> Result<Vec<f64>> {
    connection_oracle_with_scale(jf, gf, z, alpha, beta, FD_SCALE)
}

/// Covector components of R(dz^i, dz^j) dz^k at z, computed by composing
/// the six-term connection oracle per the definition
///
///   R(alpha, beta)gamma = D_beta D_alpha gamma - D_alpha D_beta gamma
///                         + D_{[alpha, beta]} gamma
///
/// (the same orientation as `curvature_constant_gamma`). The outer
/// derivatives use the coarser step so that roundoff in the inner oracle
/// evaluations does not swamp the difference quotients.
pub fn curvature_composition_oracle(
    jf: &MatrixField,
    gf: &MatrixField,
    z: &[f64],
    i: usize,
    j: usize,
    k: usize,
) -> Result<Vec<f64>> {
    let n = z.len();
    let basis = |idx: usize| {
        move |_y: &[f64]| -> Vec<f64> {
            let mut e = vec![0.0; n];
            e[idx] = 1.0;
            e
        }
    };
    let di = basis(i);
    let dj = basis(j);
    let dk = basis(k);

    let d_i_k = |y: &[f64]| -> Vec<f64> {
        connection_oracle_with_scale(jf, gf, y, &di, &dk, FD_SCALE)
            .expect("inner connection oracle evaluation failed")
    };
    let d_j_k = |y: &[f64]| -> Vec<f64> {
        connection_oracle_with_scale(jf, gf, y, &dj, &dk, FD_SCALE)
            .expect("inner connection oracle evaluation failed")
    };
    let bracket_ij =
        |y: &[f64]| -> Vec<f64> { koszul_bracket_general(jf, y, &di, &dj, FD_SCALE) };

    let term1 = connection_oracle_with_scale(jf, gf, z, &dj, &d_i_k, COMPOSITION_FD_SCALE)?;
    let term2 = connection_oracle_with_scale(jf, gf, z, &di, &d_j_k, COMPOSITION_FD_SCALE)?;
    let term3 = connection_oracle_with_scale(jf, gf, z, &bracket_ij, &dk, COMPOSITION_FD_SCALE)?;

    Ok((0..n).map(|l| term1[l] - term2[l] + term3[l]).collect())
}
