//! The free rigid body and the symmetric heavy top as metriplectic systems.
//!
//! Both systems share the pattern: a Lie-Poisson bracket generates the
//! conservative motion from the Hamiltonian, and the curvature-derived
//! symmetric bracket generates dissipation from an entropy S = C(casimir).
//! The rigid body lives on R^3 with casimir |L|^2; the heavy top lives on
//! R^6 = (L, Gamma) with casimir Gamma . L. Dissipation never touches the
//! Gamma equations and conserves energy exactly; it grows S.

use crate::algebra::{lie_poisson_bivector, StructureConstants};
use crate::error::{Error, Result};
use crate::geometry::{metriplectic_matrix, CurvatureTensor};

/// The curvature bracket carries an overall factor 1/4 relative to the
/// classical double-bracket matrix w^2 I - w w^T. The model equations use
/// the classical normalization, so the metriplectic matrix is scaled by
/// this constant wherever the dissipative flow is assembled from geometry.
pub const DISSIPATION_NORMALIZATION: f64 = 4.0;

/// Principal moments of inertia and the gravitational coupling xi
/// (the coefficient of Gamma^3 in the heavy top Hamiltonian).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParams {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub xi: f64,
}

impl TopParams {
    pub fn new(i1: f64, i2: f64, i3: f64, xi: f64) -> Result<Self> {
        if !(i1 > 0.0 && i2 > 0.0 && i3 > 0.0) {
            return Err(Error::NonPositiveInertia { i1, i2, i3 });
        }
        Ok(TopParams { i1, i2, i3, xi })
    }

    /// Symmetric top with i1 = i2.
    pub fn symmetric(i1: f64, i3: f64, xi: f64) -> Result<Self> {
        TopParams::new(i1, i1, i3, xi)
    }

    /// The heavy top equations of motion assume i1 = i2; reject anything
    /// else rather than integrating the wrong system.
    pub fn require_symmetric(&self) -> Result<()> {
        if (self.i1 - self.i2).abs() > 1e-12 * self.i1.max(self.i2) {
            return Err(Error::AsymmetricTop {
                i1: self.i1,
                i2: self.i2,
            });
        }
        Ok(())
    }

    fn omega(&self, l: &[f64]) -> [f64; 3] {
        [l[0] / self.i1, l[1] / self.i2, l[2] / self.i3]
    }
}

/// The three entropy generator families C shipped with the models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// C(x) = lambda x
    Linear,
    /// C(x) = lambda ln x, defined for x > 0
    Log,
    /// C(x) = (lambda / 2) x^2
    Quadratic,
}

/// Entropy generator S = C(x) evaluated on a casimir. lambda >= 0 is the
/// dissipation strength; lambda = 0 switches dissipation off. Negative
/// lambda would make S decrease along the flow and is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    kind: GeneratorKind,
    lambda: f64,
}

impl Generator {
    pub fn new(kind: GeneratorKind, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::NegativeLambda(lambda));
        }
        Ok(Generator { kind, lambda })
    }

    pub fn linear(lambda: f64) -> Result<Self> {
        Generator::new(GeneratorKind::Linear, lambda)
    }

    pub fn log(lambda: f64) -> Result<Self> {
        Generator::new(GeneratorKind::Log, lambda)
    }

    pub fn quadratic(lambda: f64) -> Result<Self> {
        Generator::new(GeneratorKind::Quadratic, lambda)
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// C(x).
    pub fn value(&self, x: f64) -> Result<f64> {
        match self.kind {
            GeneratorKind::Linear => Ok(self.lambda * x),
            GeneratorKind::Log => {
                if x <= 0.0 {
                    Err(Error::GeneratorDomain(x))
                } else {
                    Ok(self.lambda * x.ln())
                }
            }
            GeneratorKind::Quadratic => Ok(0.5 * self.lambda * x * x),
        }
    }

    /// C'(x), the scalar multiplying the dissipative vector field.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        match self.kind {
            GeneratorKind::Linear => Ok(self.lambda),
            GeneratorKind::Log => {
                if x <= 0.0 {
                    Err(Error::GeneratorDomain(x))
                } else {
                    Ok(self.lambda / x)
                }
            }
            GeneratorKind::Quadratic => Ok(self.lambda * x),
        }
    }
}

/// Conserved and monitored quantities at a single phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    /// Energy H.
    pub h: f64,
    /// Entropy S = C(c1).
    pub s: f64,
    /// Casimir fed to the generator: Gamma . L for the heavy top,
    /// |L|^2 for the rigid body.
    pub c1: f64,
    /// Second casimir: |Gamma|^2 for the heavy top, |L|^2 again for the
    /// rigid body.
    pub c2: f64,
    /// Angle between omega and Gamma (heavy top) or omega and L (rigid
    /// body), in [0, pi].
    pub theta: f64,
}

fn check_phase_dim(z: &[f64]) -> Result<()> {
    if z.len() != 3 && z.len() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            got: z.len(),
        });
    }
    Ok(())
}

/// Energy. For dim 6: H = (1/2) sum (L^i)^2 / I_i + xi Gamma^3; for dim 3
/// the same kinetic term without the gravity potential.
pub fn hamiltonian(params: &TopParams, z: &[f64]) -> Result<f64> {
    check_phase_dim(z)?;
    let kinetic = 0.5
        * (z[0] * z[0] / params.i1 + z[1] * z[1] / params.i2 + z[2] * z[2] / params.i3);
    if z.len() == 3 {
        Ok(kinetic)
    } else {
        Ok(kinetic + params.xi * z[5])
    }
}

/// Gradient of H: (omega, 0, 0, xi) for the heavy top, omega alone for the
/// rigid body.
pub fn hamiltonian_gradient(params: &TopParams, z: &[f64]) -> Result<Vec<f64>> {
    check_phase_dim(z)?;
    let w = params.omega(&z[..3]);
    if z.len() == 3 {
        Ok(w.to_vec())
    } else {
        Ok(vec![w[0], w[1], w[2], 0.0, 0.0, params.xi])
    }
}

/// Casimir argument of the generator and its gradient covector.
fn casimir_and_gradient(z: &[f64]) -> (f64, Vec<f64>) {
    if z.len() == 3 {
        let c1 = z.iter().map(|v| v * v).sum();
        (c1, z.iter().map(|v| 2.0 * v).collect())
    } else {
        let (l, g) = (&z[..3], &z[3..]);
        let c1 = l.iter().zip(g).map(|(a, b)| a * b).sum();
        (c1, vec![g[0], g[1], g[2], l[0], l[1], l[2]])
    }
}

/// Right-hand side of the symmetric heavy top with entropy generator, as
/// the explicit six-component system; requires i1 = i2. The Gamma equations
/// carry no dissipative term.
pub fn heavy_top_rhs(params: &TopParams, gen: &Generator, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            got: z.len(),
        });
    }
    params.require_symmetric()?;
    let (i1, i3, xi) = (params.i1, params.i3, params.xi);
    let (l1, l2, l3, g1, g2, g3) = (z[0], z[1], z[2], z[3], z[4], z[5]);
    let kp = gen.derivative(g1 * l1 + g2 * l2 + g3 * l3)?;

    let ld1 = -l2 * l3 * (1.0 / i1 - 1.0 / i3) + xi * g2
        + kp * ((l2 * l2 / (i1 * i1) + l3 * l3 / (i3 * i3)) * g1
            - (l1 * l2 / (i1 * i1)) * g2
            - (l1 * l3 / (i1 * i3)) * g3);
    let ld2 = l1 * l3 * (1.0 / i1 - 1.0 / i3) - xi * g1
        + kp * (-(l1 * l2 / (i1 * i1)) * g1
            + (l1 * l1 / (i1 * i1) + l3 * l3 / (i3 * i3)) * g2
            - (l2 * l3 / (i1 * i3)) * g3);
    let ld3 = kp
        * (-(l1 * l3 / (i1 * i3)) * g1 - (l2 * l3 / (i1 * i3)) * g2
            + (l2 * l2 / (i1 * i1) + l1 * l1 / (i1 * i1)) * g3);
    let gd1 = g2 * l3 / i3 - g3 * l2 / i1;
    let gd2 = g3 * l1 / i1 - g1 * l3 / i3;
    let gd3 = g1 * l2 / i1 - g2 * l1 / i1;
    Ok(vec![ld1, ld2, ld3, gd1, gd2, gd3])
}

/// Right-hand side of the dissipative free rigid body on R^3:
/// L_dot = L x omega + 2 C'(|L|^2) (|omega|^2 L - (omega . L) omega).
pub fn frb_rhs(params: &TopParams, gen: &Generator, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: z.len(),
        });
    }
    let w = params.omega(z);
    let (c1, _) = casimir_and_gradient(z);
    let kp = gen.derivative(c1)?;
    let w2: f64 = w.iter().map(|v| v * v).sum();
    let wl: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
    let cross = [
        z[1] * w[2] - z[2] * w[1],
        z[2] * w[0] - z[0] * w[2],
        z[0] * w[1] - z[1] * w[0],
    ];
    Ok((0..3)
        .map(|i| cross[i] + 2.0 * kp * (w2 * z[i] - wl * w[i]))
        .collect())
}

/// The same right-hand side assembled from the bracket machinery:
/// z_dot^i = {z^i, H} + (z^i, S) = (J dH)^i + 4 (M(dH) dS)^i, with M the
/// curvature metriplectic matrix. Exists to pin the explicit systems above
/// to the geometry pipeline; the two must agree to roundoff.
pub fn rhs_from_brackets(
    c: &StructureConstants,
    r: &CurvatureTensor,
    params: &TopParams,
    gen: &Generator,
    z: &[f64],
) -> Result<Vec<f64>> {
    check_phase_dim(z)?;
    if c.dim() != z.len() || r.dim() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: c.dim(),
        });
    }
    if z.len() == 6 {
        params.require_symmetric()?;
    }
    let dh = hamiltonian_gradient(params, z)?;
    let (c1, grad_c1) = casimir_and_gradient(z);
    let kp = gen.derivative(c1)?;
    let ds: Vec<f64> = grad_c1.iter().map(|v| kp * v).collect();

    let j = lie_poisson_bivector(c, z)?;
    let m = metriplectic_matrix(r, &dh)?;
    let conservative = j.matvec(&dh);
    let dissipative = m.matvec(&ds);
    Ok(conservative
        .iter()
        .zip(&dissipative)
        .map(|(a, b)| a + DISSIPATION_NORMALIZATION * b)
        .collect())
}

/// Instantaneous entropy production rate S_dot >= 0. Closed form
/// C'(c1)^2 (|omega|^2 |Gamma|^2 - (omega . Gamma)^2) for the heavy top and
/// 4 C'(c1)^2 (|omega|^2 |L|^2 - (omega . L)^2) for the rigid body; equal to
/// dS^T (4 M) dS.
pub fn entropy_production(params: &TopParams, gen: &Generator, z: &[f64]) -> Result<f64> {
    check_phase_dim(z)?;
    let w = params.omega(&z[..3]);
    let w2: f64 = w.iter().map(|v| v * v).sum();
    let (c1, _) = casimir_and_gradient(z);
    let kp = gen.derivative(c1)?;
    if z.len() == 3 {
        let l2: f64 = z.iter().map(|v| v * v).sum();
        let wl: f64 = w.iter().zip(z).map(|(a, b)| a * b).sum();
        Ok(4.0 * kp * kp * (w2 * l2 - wl * wl))
    } else {
        let g = &z[3..];
        let g2: f64 = g.iter().map(|v| v * v).sum();
        let wg: f64 = w.iter().zip(g).map(|(a, b)| a * b).sum();
        Ok(kp * kp * (w2 * g2 - wg * wg))
    }
}

/// Energy, entropy, both casimirs, and the misalignment angle at z.
pub fn observables(params: &TopParams, gen: &Generator, z: &[f64]) -> Result<Observables> {
    check_phase_dim(z)?;
    let h = hamiltonian(params, z)?;
    let (c1, _) = casimir_and_gradient(z);
    let s = gen.value(c1)?;
    let w = params.omega(&z[..3]);
    let other = if z.len() == 3 { &z[..3] } else { &z[3..] };
    let c2: f64 = other.iter().map(|v| v * v).sum();
    let cross = [
        w[1] * other[2] - w[2] * other[1],
        w[2] * other[0] - w[0] * other[2],
        w[0] * other[1] - w[1] * other[0],
    ];
    let cross_norm = cross.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = w.iter().zip(other).map(|(a, b)| a * b).sum();
    let theta = cross_norm.atan2(dot);
    Ok(Observables { h, s, c1, c2, theta })
}
