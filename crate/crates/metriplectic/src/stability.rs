//! Linear stability of aligned heavy-top equilibria.
//!
//! Aligned states (0, 0, L3, 0, 0, Gamma3) are equilibria of the dissipative
//! heavy top for every generator. This module builds the Jacobian of the
//! flow at such a state, computes its spectrum with a dense real
//! eigensolver (balancing, Householder reduction to Hessenberg form, then
//! Francis double-shift QR), classifies the equilibrium, and, for the
//! Linear and Log generators at the 2:1 inertia ratio, evaluates the two
//! complexified roots in closed form for cross-checking.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::models::{Generator, GeneratorKind, TopParams};
use num_complex::Complex64;

/// Eigenvalues with |Re| at or below this are treated as lying on the
/// imaginary axis when classifying, and eigenvalues with modulus at or
/// below it as the structural zeros of the aligned linearization.
pub const ZERO_TOL: f64 = 1e-10;

/// An aligned equilibrium, parameterized by the two surviving components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    l3: f64,
    g3: f64,
}

impl Equilibrium {
    /// Both components must be finite and strictly positive; the closed
    /// forms and the Log generator's domain assume it.
    pub fn new(l3: f64, g3: f64) -> Result<Self> {
        if l3 > 0.0 && g3 > 0.0 && l3.is_finite() && g3.is_finite() {
            Ok(Equilibrium { l3, g3 })
        } else {
            Err(Error::InvalidEquilibrium { l3, g3 })
        }
    }

    pub fn l3(&self) -> f64 {
        self.l3
    }

    pub fn g3(&self) -> f64 {
        self.g3
    }

    /// The six-component phase point this equilibrium sits at.
    pub fn state(&self) -> [f64; 6] {
        [0.0, 0.0, self.l3, 0.0, 0.0, self.g3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityClass {
    /// Every eigenvalue off the structural kernel has negative real part.
    Stable,
    /// Some eigenvalue has positive real part.
    Unstable,
    /// No positive real parts, but a nonzero eigenvalue sits on the
    /// imaginary axis (the conservative case).
    Marginal,
}

/// Everything `classify` computes about one equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub matrix: Mat,
    pub spectrum: Vec<Complex64>,
    pub classification: StabilityClass,
    /// The two complexified roots when a closed form exists (Linear and
    /// Log generators, 2:1 inertia ratio only).
    pub closed_form: Option<(Complex64, Complex64)>,
}

/// Jacobian of the heavy-top flow at an aligned equilibrium, rows ordered
/// (dL1, dL2, dL3, dGamma1, dGamma2, dGamma3). The third and sixth rows
/// vanish identically: L3 and Gamma3 are free parameters of the aligned
/// family, so the kernel is two-dimensional.
pub fn linearize(params: &TopParams, gen: &Generator, eq: &Equilibrium) -> Result<Mat> {
    params.require_symmetric()?;
    let (i1, i3, xi) = (params.i1, params.i3, params.xi);
    let (l3, g3) = (eq.l3, eq.g3);
    let kappa = gen.derivative(l3 * g3)?;
    let a = l3 * (1.0 / i1 - 1.0 / i3);
    let b = l3 / i3;
    let c = g3 / i1;
    let d = kappa * l3 * g3 / (i1 * i3);
    let e = kappa * l3 * l3 / (i3 * i3);
    Ok(Mat::from_rows(&[
        vec![-d, -a, 0.0, e, xi, 0.0],
        vec![a, -d, 0.0, -xi, e, 0.0],
        vec![0.0; 6],
        vec![0.0, -c, 0.0, 0.0, b, 0.0],
        vec![c, 0.0, 0.0, -b, 0.0, 0.0],
        vec![0.0; 6],
    ]))
}

/// The aligned equilibrium loses spectral stability where (L3)^2 crosses
/// 4 Gamma3 I1 xi; below this the gravitational torque wins over the
/// gyroscopic restoring term.
pub fn stability_boundary_l3(g3: f64, i1: f64, xi: f64) -> f64 {
    (4.0 * g3 * i1 * xi).sqrt()
}

fn balance(a: &mut Mat) {
    let n = a.rows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            while c < row / 2.0 {
                f *= 2.0;
                c *= 4.0;
            }
            while c > row * 2.0 {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + row) / f < 0.95 * total {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            return;
        }
    }
}

fn hessenberg(a: &mut Mat) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)] * a[(i, k)];
        }
        if norm2 == 0.0 {
            continue;
        }
        let alpha = -norm2.sqrt().copysign(a[(k + 1, k)]);
        let mut v = vec![0.0; n];
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        for j in 0..n {
            let mut s = 0.0;
            for i in k + 1..n {
                s += v[i] * a[(i, j)];
            }
            let s2 = 2.0 * s / vv;
            for i in k + 1..n {
                a[(i, j)] -= s2 * v[i];
            }
        }
        for i in 0..n {
            let mut s = 0.0;
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            let s2 = 2.0 * s / vv;
            for j in k + 1..n {
                a[(i, j)] -= s2 * v[j];
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix. Consumes the
/// matrix and returns the unsorted eigenvalues.
fn hessenberg_eigenvalues(h: &mut Mat) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[(i, j)].abs();
        }
    }
    let mut eig = Vec::with_capacity(n);
    if anorm == 0.0 {
        eig.resize(n, Complex64::new(0.0, 0.0));
        return Ok(eig);
    }
    let mut hi = n; // eigenvalues below index hi are deflated
    let mut shift_accum = 0.0;
    let mut sweeps = 0usize;
    let max_sweeps = 60 * n.max(1);
    while hi > 0 {
        let mut its = 0usize;
        loop {
            // Look for a negligible subdiagonal entry splitting the block.
            let mut lo = hi - 1;
            while lo > 0 {
                let s = h[(lo - 1, lo - 1)].abs() + h[(lo, lo)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if h[(lo, lo - 1)].abs() <= eps * s {
                    h[(lo, lo - 1)] = 0.0;
                    break;
                }
                lo -= 1;
            }
            let x = h[(hi - 1, hi - 1)];
            if lo == hi - 1 {
                eig.push(Complex64::new(x + shift_accum, 0.0));
                hi -= 1;
                break;
            }
            let y = h[(hi - 2, hi - 2)];
            let w = h[(hi - 1, hi - 2)] * h[(hi - 2, hi - 1)];
            if lo == hi - 2 {
                // 2x2 block: eigenvalues of [[y, *], [*, x]].
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let root = q.abs().sqrt();
                let base = x + shift_accum;
                if q >= 0.0 {
                    let z = p + root.copysign(p);
                    let lam1 = base + z;
                    let lam2 = if z != 0.0 { base - w / z } else { lam1 };
                    eig.push(Complex64::new(lam1, 0.0));
                    eig.push(Complex64::new(lam2, 0.0));
                } else {
                    eig.push(Complex64::new(base + p, root));
                    eig.push(Complex64::new(base + p, -root));
                }
                hi -= 2;
                break;
            }
            sweeps += 1;
            if sweeps > max_sweeps {
                return Err(Error::EigenNonConvergence(sweeps));
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its > 0 && its % 10 == 0 {
                // Exceptional shift to break symmetry-induced cycling.
                shift_accum += x;
                for i in 0..hi {
                    h[(i, i)] -= x;
                }
                let s = h[(hi - 1, hi - 2)].abs() + h[(hi - 2, hi - 3)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // Find the sweep start: two consecutive small subdiagonals.
            let mut m = hi - 3;
            let (mut p, mut q, mut r);
            loop {
                let z = h[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - rr - ss;
                r = h[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == lo {
                    break;
                }
                let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..hi {
                h[(i, i - 2)] = 0.0;
                if i > m + 2 {
                    h[(i, i - 3)] = 0.0;
                }
            }
            // Chase the bulge from m to the bottom of the block.
            for k in m..hi - 1 {
                let last_pair = k == hi - 2;
                let mut scale = 1.0;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if last_pair { 0.0 } else { h[(k + 2, k - 1)] };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale == 0.0 {
                        continue;
                    }
                    p /= scale;
                    q /= scale;
                    r /= scale;
                }
                let sigma = (p * p + q * q + r * r).sqrt().copysign(p);
                if sigma == 0.0 {
                    continue;
                }
                if k == m {
                    if lo != m {
                        h[(k, k - 1)] = -h[(k, k - 1)];
                    }
                } else {
                    h[(k, k - 1)] = -sigma * scale;
                    h[(k + 1, k - 1)] = 0.0;
                    if !last_pair {
                        h[(k + 2, k - 1)] = 0.0;
                    }
                }
                // Householder vector for (p, q, r) -> (-sigma, 0, 0).
                let v1 = p + sigma;
                let (v2, v3) = (q, r);
                let beta = 1.0 / (sigma * v1);
                for j in k..hi {
                    let mut s = v1 * h[(k, j)] + v2 * h[(k + 1, j)];
                    if !last_pair {
                        s += v3 * h[(k + 2, j)];
                    }
                    s *= beta;
                    h[(k, j)] -= s * v1;
                    h[(k + 1, j)] -= s * v2;
                    if !last_pair {
                        h[(k + 2, j)] -= s * v3;
                    }
                }
                let imax = (k + 3).min(hi - 1);
                for i in lo..=imax {
                    let mut s = v1 * h[(i, k)] + v2 * h[(i, k + 1)];
                    if !last_pair {
                        s += v3 * h[(i, k + 2)];
                    }
                    s *= beta;
                    h[(i, k)] -= s * v1;
                    h[(i, k + 1)] -= s * v2;
                    if !last_pair {
                        h[(i, k + 2)] -= s * v3;
                    }
                }
            }
        }
    }
    Ok(eig)
}

/// All eigenvalues of a square real matrix, sorted by real part and then
/// imaginary part.
pub fn spectrum(m: &Mat) -> Result<Vec<Complex64>> {
    assert_eq!(m.rows(), m.cols(), "spectrum needs a square matrix");
    if m.max_abs().is_nan() || m.max_abs().is_infinite() {
        return Err(Error::NonFinite("spectrum input"));
    }
    let mut work = m.clone();
    balance(&mut work);
    hessenberg(&mut work);
    let mut eig = hessenberg_eigenvalues(&mut work)?;
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Relative residual ||M v - lambda v|| / ||v|| of the eigenpair obtained
/// by one step of complex inverse iteration at lambda.
pub fn eigen_residual(m: &Mat, lambda: Complex64) -> Result<f64> {
    let n = m.rows();
    let mut shift = lambda;
    for attempt in 0..3 {
        let mut a: Vec<Complex64> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut v = Complex64::new(m[(i, j)], 0.0);
                if i == j {
                    v -= shift;
                }
                a.push(v);
            }
        }
        let mut b = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
        if complex_solve_in_place(&mut a, &mut b, n).is_ok() {
            let norm = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 && norm.is_finite() {
                for v in b.iter_mut() {
                    *v /= norm;
                }
                let mut res = 0.0;
                for i in 0..n {
                    let mut mv = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        mv += m[(i, j)] * b[j];
                    }
                    res += (mv - lambda * b[i]).norm_sqr();
                }
                return Ok(res.sqrt());
            }
        }
        // Exactly singular shift: nudge off the eigenvalue and retry.
        let nudge = 1e-12 * (1.0 + lambda.norm()) * (attempt + 1) as f64;
        shift = lambda + Complex64::new(nudge, nudge);
    }
    Err(Error::SingularMatrix)
}

fn complex_solve_in_place(
    a: &mut [Complex64],
    b: &mut [Complex64],
    n: usize,
) -> std::result::Result<(), ()> {
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].norm();
        for row in col + 1..n {
            let cand = a[row * n + col].norm();
            if cand > best {
                best = cand;
                piv = row;
            }
        }
        if best == 0.0 {
            return Err(());
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            b.swap(piv, col);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col + 1..n {
                let t = a[col * n + j];
                a[row * n + j] -= f * t;
            }
            b[row] -= f * b[col];
            a[row * n + col] = Complex64::new(0.0, 0.0);
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[col * n + j] * b[j];
        }
        b[col] = s / a[col * n + col];
    }
    Ok(())
}

fn complex_sqrt(x: f64) -> Complex64 {
    if x >= 0.0 {
        Complex64::new(x.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-x).sqrt())
    }
}

/// The two complexified roots of the aligned linearization in closed form.
/// Available for the Linear and Log generators at the exact 2:1 inertia
/// ratio; the Quadratic generator couples the radicand to the state in a
/// way that has no such expression, and other ratios break the reduction
/// to a single quadratic.
pub fn closed_form_ab(
    params: &TopParams,
    gen: &Generator,
    eq: &Equilibrium,
) -> Result<(Complex64, Complex64)> {
    params.require_symmetric()?;
    let (i1, i3, xi) = (params.i1, params.i3, params.xi);
    if (i3 - 2.0 * i1).abs() > 1e-12 * i3.abs().max(2.0 * i1.abs()) {
        return Err(Error::NotTwoToOne { i1, i3 });
    }
    let (l3, g3) = (eq.l3, eq.g3);
    let lam = gen.lambda();
    let (linear_coeff, rad, denom) = match gen.kind() {
        GeneratorKind::Linear => {
            let p = g3 * l3 * lam;
            (
                p,
                p * p - 4.0 * i1 * i1 * l3 * l3 + 16.0 * g3 * i1 * i1 * i1 * xi,
                4.0 * i1 * i1,
            )
        }
        GeneratorKind::Log => {
            let p = g3 * lam;
            (
                p,
                p * p + g3 * g3 * (16.0 * g3 * i1 * i1 * i1 * xi - 4.0 * i1 * i1 * l3 * l3),
                4.0 * i1 * i1 * g3,
            )
        }
        GeneratorKind::Quadratic => return Err(Error::NoClosedForm),
    };
    let root = complex_sqrt(rad);
    let a = (Complex64::new(-linear_coeff, 0.0) - root) / denom;
    let b = (Complex64::new(-linear_coeff, 0.0) + root) / denom;
    Ok((a, b))
}

fn classify_spectrum(eig: &[Complex64]) -> StabilityClass {
    let mut unstable = false;
    let mut marginal = false;
    for lam in eig {
        if lam.norm() <= ZERO_TOL {
            continue;
        }
        if lam.re > ZERO_TOL {
            unstable = true;
        } else if lam.re.abs() <= ZERO_TOL {
            marginal = true;
        }
    }
    if unstable {
        StabilityClass::Unstable
    } else if marginal {
        StabilityClass::Marginal
    } else {
        StabilityClass::Stable
    }
}

/// Linearize, solve for the spectrum, classify, and attach the closed-form
/// roots when they exist.
pub fn classify(params: &TopParams, gen: &Generator, eq: &Equilibrium) -> Result<StabilityReport> {
    let matrix = linearize(params, gen, eq)?;
    let spectrum = spectrum(&matrix)?;
    let classification = classify_spectrum(&spectrum);
    let closed_form = match closed_form_ab(params, gen, eq) {
        Ok(pair) => Some(pair),
        Err(Error::NoClosedForm) | Err(Error::NotTwoToOne { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(StabilityReport {
        matrix,
        spectrum,
        classification,
        closed_form,
    })
}
