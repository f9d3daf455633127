//! Numerical kernel: 2x2 spectral norms, a Hermitian eigensolver, bisection,
//! and bracketed maximization.
//!
//! Everything here is deterministic: fixed sweep orders, fixed grids, no
//! randomness. Tolerances follow the absolute-relative hybrid convention
//! `tol * max(1, scale)` so that answers stay meaningful near zero and for
//! large operands alike.

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Largest negative radicand (relative to `tr^2`) treated as round-off in
/// [`norm_mat2`]; anything more negative is reported as a defect.
pub const RADICAND_CLAMP_REL: f64 = 1e-12;

/// Off-diagonal mass threshold, relative to the Frobenius norm, at which the
/// Jacobi iteration is declared converged.
pub const JACOBI_OFF_REL: f64 = 1e-13;

/// Width, relative to the original bracket, to which grid champions are
/// refined by golden-section search.
pub const REFINE_WIDTH_REL: f64 = 1e-12;

const JACOBI_MAX_SWEEPS: usize = 60;

/// 2x2 complex matrix with row-major entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e11: Complex,
    pub e12: Complex,
    pub e21: Complex,
    pub e22: Complex,
}

impl Mat2 {
    pub fn new(e11: Complex, e12: Complex, e21: Complex, e22: Complex) -> Self {
        Mat2 { e11, e12, e21, e22 }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Mat2 {
        Mat2 {
            e11: self.e11.conj(),
            e12: self.e21.conj(),
            e21: self.e12.conj(),
            e22: self.e22.conj(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            e11: self.e11 * rhs.e11 + self.e12 * rhs.e21,
            e12: self.e11 * rhs.e12 + self.e12 * rhs.e22,
            e21: self.e21 * rhs.e11 + self.e22 * rhs.e21,
            e22: self.e21 * rhs.e12 + self.e22 * rhs.e22,
        }
    }

    fn entries(&self) -> [Complex; 4] {
        [self.e11, self.e12, self.e21, self.e22]
    }

    fn check_finite(&self) -> Result<()> {
        for e in self.entries() {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "matrix entry {e} is not finite"
                )));
            }
        }
        Ok(())
    }
}

/// Spectral norm of a 2x2 complex matrix via the closed form
/// `norm^2 = (tr + sqrt(tr^2 - 4 det)) / 2` applied to `M* M`,
/// where `tr = tr(M* M)` and `det = det(M* M) = |det M|^2`.
///
/// The radicand is nonnegative in exact arithmetic; negative round-off within
/// `RADICAND_CLAMP_REL * max(1, tr^2)` is clamped to zero and anything worse
/// is an internal-consistency failure.
pub fn norm_mat2(m: &Mat2) -> Result<f64> {
    m.check_finite()?;
    let tr: f64 = m.entries().iter().map(|e| e.norm_sqr()).sum();
    let det = (m.e11 * m.e22 - m.e12 * m.e21).norm_sqr();
    let radicand = clamp_radicand(tr * tr - 4.0 * det, tr * tr)?;
    Ok(((tr + radicand.sqrt()) * 0.5).sqrt())
}

/// Clamps a slightly negative discriminant to zero; rejects real negativity.
pub(crate) fn clamp_radicand(radicand: f64, scale: f64) -> Result<f64> {
    if radicand >= 0.0 {
        return Ok(radicand);
    }
    if radicand >= -RADICAND_CLAMP_REL * scale.max(1.0) {
        return Ok(0.0);
    }
    Err(Error::InternalConsistency(format!(
        "discriminant {radicand:e} negative beyond round-off (scale {scale:e})"
    )))
}

/// Hermitian matrix, row-major, with the symmetry checked at construction:
/// `entry(i, j) == conj(entry(j, i))` exactly, so diagonals are real.
#[derive(Debug, Clone)]
pub struct HermMatrix {
    n: usize,
    data: Vec<Complex>,
}

impl HermMatrix {
    /// Validates dimensions, finiteness, and exact Hermitian symmetry.
    pub fn new(n: usize, data: Vec<Complex>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("Hermitian matrix of dimension 0".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        for e in &data {
            if !e.re.is_finite() || !e.im.is_finite() {
                return Err(Error::InvalidInput(format!("entry {e} is not finite")));
            }
        }
        for i in 0..n {
            for j in i..n {
                if data[i * n + j] != data[j * n + i].conj() {
                    return Err(Error::InvalidInput(format!(
                        "entries ({i},{j}) and ({j},{i}) are not conjugate"
                    )));
                }
            }
        }
        Ok(HermMatrix { n, data })
    }

    /// Builds from a generator for the upper triangle; the strict lower
    /// triangle is mirrored by conjugation and diagonals keep only their
    /// real part, so the result is Hermitian by construction.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("Hermitian matrix of dimension 0".into()));
        }
        let mut data = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::InvalidInput(format!("entry {v} is not finite")));
                }
                if i == j {
                    data[i * n + i] = Complex::new(v.re, 0.0);
                } else {
                    data[i * n + j] = v;
                    data[j * n + i] = v.conj();
                }
            }
        }
        Ok(HermMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.data[i * self.n + j]
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn raw(&self) -> &[Complex] {
        &self.data
    }
}

/// Largest eigenvalue of a Hermitian matrix, computed by cyclic Jacobi
/// sweeps until the off-diagonal Frobenius mass drops below
/// `JACOBI_OFF_REL * frobenius(H)`.
pub fn herm_max_eig(h: &HermMatrix) -> Result<f64> {
    let mut a = h.raw().to_vec();
    jacobi_hermitian(h.dim(), &mut a, None)?;
    let n = h.dim();
    let max = (0..n)
        .map(|i| a[i * n + i].re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(max)
}

/// In-place cyclic Jacobi diagonalization of a Hermitian matrix stored
/// row-major in `a`. When `v` is given (row-major, initialized to identity)
/// the applied rotations accumulate into it so its columns end up as the
/// eigenvectors. Returns the number of sweeps used.
///
/// Sweep order is row-major over pairs `(p, q)`, `p < q`, so the run is
/// bit-deterministic for fixed input.
pub(crate) fn jacobi_hermitian(
    n: usize,
    a: &mut [Complex],
    mut v: Option<&mut [Complex]>,
) -> Result<usize> {
    debug_assert_eq!(a.len(), n * n);
    let fro = a.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
    if fro == 0.0 || n == 1 {
        return Ok(0);
    }
    let target = JACOBI_OFF_REL * fro;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_mass(n, a);
        if off <= target {
            return Ok(sweep);
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let beta = apq.norm();
                if beta == 0.0 {
                    continue;
                }
                let phase = apq / beta;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Same angle as the real symmetric case, on |a_pq|. For the
                // rotation orientation below the stable tangent root needs
                // the (p,p) - (q,q) difference in the numerator.
                let theta = (app - aqq) / (2.0 * beta);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                for k in 0..n {
                    let hkp = a[k * n + p];
                    let hkq = a[k * n + q];
                    a[k * n + p] = hkp * c + hkq * spc;
                    a[k * n + q] = hkq * c - hkp * sp;
                }
                for k in 0..n {
                    let hpk = a[p * n + k];
                    let hqk = a[q * n + k];
                    a[p * n + k] = hpk * c + hqk * sp;
                    a[q * n + k] = hqk * c - hpk * spc;
                }
                // The rotation annihilates (p,q) by construction; pin the
                // residual round-off and keep diagonals exactly real.
                a[p * n + q] = Complex::new(0.0, 0.0);
                a[q * n + p] = Complex::new(0.0, 0.0);
                a[p * n + p] = Complex::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex::new(a[q * n + q].re, 0.0);
                if let Some(vm) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = vm[k * n + p];
                        let vkq = vm[k * n + q];
                        vm[k * n + p] = vkp * c + vkq * spc;
                        vm[k * n + q] = vkq * c - vkp * sp;
                    }
                }
            }
        }
    }
    let off = off_diagonal_mass(n, a);
    if off <= target {
        return Ok(JACOBI_MAX_SWEEPS);
    }
    Err(Error::InternalConsistency(format!(
        "Jacobi iteration stalled: off-diagonal mass {off:e} above target {target:e}"
    )))
}

fn off_diagonal_mass(n: usize, a: &[Complex]) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Nonempty open interval `(lo, hi)` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Bracket(format!("endpoints ({lo}, {hi}) must be finite")));
        }
        if lo >= hi {
            return Err(Error::Bracket(format!(
                "lower endpoint {lo} is not below upper endpoint {hi}"
            )));
        }
        Ok(Bracket { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Bisection root finding on a bracket with a sign change.
///
/// Shrinks the bracket by midpoints until its width is at most `tol`
/// (or the midpoint degenerates to an endpoint at f64 resolution) and
/// returns the final midpoint.
pub fn bisect_root(f: impl Fn(f64) -> f64, bracket: &Bracket, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let mut lo = bracket.lo();
    let mut hi = bracket.hi();
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change: f({lo}) = {flo:e}, f({hi}) = {fhi:e}"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at f64 resolution
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximizes `f` over a closed bracket: uniform grid of `grid_n` points
/// (endpoints included), then golden-section refinement of the best grid
/// champions. Returns `(argmax, max)`.
pub fn maximize_on_interval(
    f: impl Fn(f64) -> f64,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<(f64, f64)> {
    let cands = maximize_candidates_on_interval(&f, bracket, grid_n)?;
    // Deterministic tie break: highest value, then smallest argument.
    let mut best = cands[0];
    for &(x, fx) in &cands[1..] {
        if fx > best.1 || (fx == best.1 && x < best.0) {
            best = (x, fx);
        }
    }
    Ok(best)
}

/// Grid-plus-refinement maximizer candidates for `f` on a bracket: both
/// endpoints plus golden-section refinements of the best three grid-local
/// maxima, each refined to width `REFINE_WIDTH_REL * width`. The true
/// maximizer of a smooth `f` is within refinement width of some candidate.
pub fn maximize_candidates_on_interval(
    f: impl Fn(f64) -> f64,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<Vec<(f64, f64)>> {
    if grid_n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points, got {grid_n}"
        )));
    }
    let lo = bracket.lo();
    let hi = bracket.hi();
    let step = (hi - lo) / (grid_n - 1) as f64;
    let ts: Vec<f64> = (0..grid_n)
        .map(|i| if i + 1 == grid_n { hi } else { lo + i as f64 * step })
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();

    let mut champions: Vec<usize> = (0..grid_n)
        .filter(|&i| {
            let left_ok = i == 0 || vals[i] >= vals[i - 1];
            let right_ok = i + 1 == grid_n || vals[i] >= vals[i + 1];
            left_ok && right_ok
        })
        .collect();
    champions.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap().then(a.cmp(&b)));
    champions.truncate(3);

    let refine_tol = REFINE_WIDTH_REL * (hi - lo);
    let mut cands = vec![(ts[0], vals[0]), (ts[grid_n - 1], vals[grid_n - 1])];
    for &i in &champions {
        let a = ts[i.saturating_sub(1)];
        let b = ts[(i + 1).min(grid_n - 1)];
        if b > a {
            cands.push(golden_max(&f, a, b, refine_tol));
        } else {
            cands.push((ts[i], vals[i]));
        }
    }
    Ok(cands)
}

/// Golden-section maximization on `[a, b]`, tracking the best point seen
/// (endpoints included) so the result never falls below a grid value.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iter = 0usize;
    while b - a > tol && x1 < x2 && iter < 400 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        for &(x, fx) in &[(x1, f1), (x2, f2)] {
            if fx > best.1 {
                best = (x, fx);
            }
        }
        iter += 1;
    }
    best
}
