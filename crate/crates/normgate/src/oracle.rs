//! Brute-force cross-checks for the closed forms.
//!
//! Everything here works on explicit dense matrices and eigensolves: build
//! the block operator `T = [[a I, A], [c A*, b phi(|A|)]]` entry by entry,
//! take norms through Gram-matrix diagonalization, and compare against the
//! curve and block-norm formulas. Deliberately independent of the closed
//! forms so a bug cannot hide on both sides.

use crate::curves::{eval_f, norm_block_constant, ParamSet};
use crate::error::{Error, Result};
use crate::numkit::{jacobi_hermitian, Complex};
use crate::phicrit::{standard_battery, PhiFunction};
use crate::specop::{block_norm, SpectrumSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        for z in &data {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput(format!("matrix entry {z} is not finite")));
            }
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        DenseMatrix::new(rows, cols, vec![Complex::new(0.0, 0.0); rows * cols])
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix::new(rows, cols, data)
    }

    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        DenseMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        self.data[i * self.cols + j] = value;
    }

    pub fn adjoint(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.data[i * self.cols + j].conj());
            }
        }
        DenseMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = vec![Complex::new(0.0, 0.0); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let lik = self.data[i * self.cols + k];
                for j in 0..rhs.cols {
                    data[i * rhs.cols + j] += lik * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(DenseMatrix { rows: self.rows, cols: rhs.cols, data })
    }

    pub fn scale(&self, k: Complex) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| k * z).collect(),
        }
    }
}

/// Gram matrix of the smaller side (`M M*` or `M* M`), with exact conjugate
/// symmetry imposed by mirroring the upper triangle.
fn small_gram(m: &DenseMatrix) -> (usize, Vec<Complex>) {
    let take_left = m.rows <= m.cols; // G = M M* when wide, M* M when tall
    let k = m.rows.min(m.cols);
    let inner = m.rows.max(m.cols);
    let mut g = vec![Complex::new(0.0, 0.0); k * k];
    for i in 0..k {
        for j in i..k {
            let mut s = Complex::new(0.0, 0.0);
            for l in 0..inner {
                s += if take_left {
                    m.get(i, l) * m.get(j, l).conj()
                } else {
                    m.get(l, i).conj() * m.get(l, j)
                };
            }
            if i == j {
                g[i * k + i] = Complex::new(s.re, 0.0);
            } else {
                g[i * k + j] = s;
                g[j * k + i] = s.conj();
            }
        }
    }
    (k, g)
}

/// Operator norm of a dense matrix: square root of the top eigenvalue of
/// the smaller Gram matrix.
pub fn matrix_norm(m: &DenseMatrix) -> Result<f64> {
    let (k, mut g) = small_gram(m);
    jacobi_hermitian(k, &mut g, None)?;
    let lam = (0..k)
        .map(|i| g[i * k + i].re)
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(lam.sqrt())
}

/// `phi(|A|)` by functional calculus: diagonalize `A* A`, apply
/// `phi(sqrt(lambda))` to the eigenvalues, rebuild. Returns a `cols x cols`
/// matrix.
fn phi_of_modulus(a: &DenseMatrix, phi: &PhiFunction) -> Result<DenseMatrix> {
    let m = a.cols;
    let mut g = vec![Complex::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in i..m {
            let mut s = Complex::new(0.0, 0.0);
            for l in 0..a.rows {
                s += a.get(l, i).conj() * a.get(l, j);
            }
            if i == j {
                g[i * m + i] = Complex::new(s.re, 0.0);
            } else {
                g[i * m + j] = s;
                g[j * m + i] = s.conj();
            }
        }
    }
    let mut v = vec![Complex::new(0.0, 0.0); m * m];
    for i in 0..m {
        v[i * m + i] = Complex::new(1.0, 0.0);
    }
    jacobi_hermitian(m, &mut g, Some(&mut v))?;
    let mut vals = Vec::with_capacity(m);
    for i in 0..m {
        // Gram eigenvalues are nonnegative up to round-off.
        let lam = g[i * m + i].re.max(0.0);
        vals.push(phi.eval(lam.sqrt())?);
    }
    DenseMatrix::from_fn(m, m, |i, j| {
        let mut s = Complex::new(0.0, 0.0);
        for k in 0..m {
            s += v[i * m + k] * vals[k] * v[j * m + k].conj();
        }
        s
    })
}

/// Assembles the block operator `[[a I, A], [c A*, b phi(|A|)]]` as a dense
/// `(rows + cols)`-square matrix.
pub fn build_block_operator(
    p: &ParamSet,
    a_mat: &DenseMatrix,
    phi: &PhiFunction,
) -> Result<DenseMatrix> {
    p.check_finite()?;
    let (n, m) = (a_mat.rows, a_mat.cols);
    let gain = phi_of_modulus(a_mat, phi)?;
    DenseMatrix::from_fn(n + m, n + m, |i, j| match (i < n, j < n) {
        (true, true) => {
            if i == j {
                p.a
            } else {
                Complex::new(0.0, 0.0)
            }
        }
        (true, false) => a_mat.get(i, j - n),
        (false, true) => p.c * a_mat.get(j, i - n).conj(),
        (false, false) => p.b * gain.get(i - n, j - n),
    })
}

/// `(A A*)^{1/2}` by eigendecomposition: the positive square matrix whose
/// spectrum carries the block operator's reduction.
pub fn modulus_of_adjoint(a_mat: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a_mat.rows;
    let mut g = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = Complex::new(0.0, 0.0);
            for l in 0..a_mat.cols {
                s += a_mat.get(i, l) * a_mat.get(j, l).conj();
            }
            if i == j {
                g[i * n + i] = Complex::new(s.re, 0.0);
            } else {
                g[i * n + j] = s;
                g[j * n + i] = s.conj();
            }
        }
    }
    let mut v = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex::new(1.0, 0.0);
    }
    jacobi_hermitian(n, &mut g, Some(&mut v))?;
    let roots: Vec<f64> = (0..n).map(|i| g[i * n + i].re.max(0.0).sqrt()).collect();
    DenseMatrix::from_fn(n, n, |i, j| {
        let mut s = Complex::new(0.0, 0.0);
        for k in 0..n {
            s += v[i * n + k] * roots[k] * v[j * n + k].conj();
        }
        s
    })
}

/// Norms of the block operator and of its companion built on the modulus of
/// the adjoint base (`A` replaced by `(A A*)^{1/2}`). The two agree whenever
/// the gain satisfies the standing hypothesis `phi(t) >= phi(0) >= 0` on
/// `[0, |A|]`, which is checked on a grid first.
pub fn companion_norms(
    p: &ParamSet,
    a_mat: &DenseMatrix,
    phi: &PhiFunction,
) -> Result<(f64, f64)> {
    crate::specop::check_phi_hypothesis(phi, matrix_norm(a_mat)?)?;
    let t = build_block_operator(p, a_mat, phi)?;
    let t_tilde = build_block_operator(p, &modulus_of_adjoint(a_mat)?, phi)?;
    Ok((matrix_norm(&t)?, matrix_norm(&t_tilde)?))
}

/// Constant-gain block norm three ways: the closed form, the variant with
/// the scale factor on the norm term dropped (a plausible but wrong
/// formula), and the brute-force dense norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGainReport {
    pub closed: f64,
    pub misprinted: f64,
    pub brute: f64,
}

pub fn constant_gain_comparison(p: &ParamSet, a_mat: &DenseMatrix) -> Result<ConstantGainReport> {
    let norm_a = matrix_norm(a_mat)?;
    let closed = norm_block_constant(p, norm_a)?;
    let misprinted = misprinted_block_constant(p, norm_a);
    let one = PhiFunction::power(1.0, 0.0, 0.0)?;
    let brute = matrix_norm(&build_block_operator(p, a_mat, &one)?)?;
    Ok(ConstantGainReport { closed, misprinted, brute })
}

/// The wrong constant-gain trace term `|a|^2 + |b|^2 + |c|^2 + 1`: the
/// factor multiplying the squared base norm lost. Kept as a regression
/// fixture so the comparison stays honest.
fn misprinted_block_constant(p: &ParamSet, norm_a: f64) -> f64 {
    let (a2, b2, c2) = (p.a.norm_sqr(), p.b.norm_sqr(), p.c.norm_sqr());
    let t2 = norm_a * norm_a;
    let r = a2 + b2 + c2 + 1.0;
    let k = (p.b + p.a.conj() * p.c).norm_sqr() + (p.a + p.b.conj() * p.c).norm_sqr();
    let radicand = ((a2 - b2) * (a2 - b2) + (c2 - 1.0) * (c2 - 1.0) * t2 * t2 + 2.0 * k * t2)
        .max(0.0);
    (0.5 * (r + radicand.sqrt())).sqrt()
}

/// Brute-force check of the spectral block norm for a purely atomic
/// spectrum: builds `A` as the diagonal of the eigenvalues and compares the
/// dense norm against the spectral formula. Returns `(closed, brute)`.
pub fn compare_block_norm(
    spec: &SpectrumSpec,
    p: &ParamSet,
    phi: &PhiFunction,
) -> Result<(f64, f64)> {
    if !spec.intervals().is_empty() || spec.sequence().is_some() || !spec.limit_points().is_empty()
    {
        return Err(Error::Precondition(
            "brute-force comparison needs a finite, purely atomic spectrum".into(),
        ));
    }
    let closed = block_norm(spec, p, phi)?;
    let a_mat = DenseMatrix::from_diag(spec.eigenvalues())?;
    let brute = matrix_norm(&build_block_operator(p, &a_mat, phi)?)?;
    Ok((closed, brute))
}

/// Randomized cross-validation battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Trials per check.
    pub trials: usize,
    /// Largest matrix dimension drawn.
    pub max_dim: usize,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig { seed: 42, trials: 25, max_dim: 8 }
    }
}

/// Worst relative deviations seen by the battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryReport {
    pub trials: usize,
    /// Curve formula vs dense norm of the two-by-two matrix.
    pub max_curve_dev: f64,
    /// Spectral block norm vs dense norm for diagonal bases.
    pub max_block_dev: f64,
    /// Block operator vs its adjoint-base companion.
    pub max_companion_dev: f64,
    pub tol: f64,
    pub all_within: bool,
}

impl std::fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "trials per check: {}", self.trials)?;
        writeln!(f, "curve vs dense     : {:.16e}", self.max_curve_dev)?;
        writeln!(f, "block vs dense     : {:.16e}", self.max_block_dev)?;
        writeln!(f, "block vs companion : {:.16e}", self.max_companion_dev)?;
        write!(
            f,
            "tolerance {:.16e}: {}",
            self.tol,
            if self.all_within { "ALL WITHIN" } else { "DEVIATION EXCEEDED" }
        )
    }
}

pub const BATTERY_TOL: f64 = 1e-9;

fn rand_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex {
    Complex::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
}

fn rand_params(rng: &mut ChaCha8Rng) -> ParamSet {
    ParamSet::new(
        rand_complex(rng, 2.0),
        rand_complex(rng, 2.0),
        rand_complex(rng, 2.0),
    )
}

fn rel_dev(x: f64, y: f64) -> f64 {
    (x - y).abs() / x.abs().max(1.0)
}

/// Runs the randomized battery: each check draws fresh parameters, a gain
/// from the standard family, and (where needed) a random base matrix, then
/// compares closed forms against dense-matrix norms.
pub fn run_battery(config: &BatteryConfig) -> Result<BatteryReport> {
    if config.max_dim == 0 {
        return Err(Error::InvalidInput("battery max_dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gains = standard_battery();
    let mut max_curve = 0.0f64;
    let mut max_block = 0.0f64;
    let mut max_companion = 0.0f64;

    for _ in 0..config.trials {
        // Curve formula against the dense norm of the actual two-by-two.
        let p = rand_params(&mut rng);
        let phi = &gains[rng.gen_range(0..gains.len())];
        let t = rng.gen_range(0.0..=3.0);
        let closed = eval_f(&p, phi, t)?;
        let m = crate::curves::make_mt(&p, phi, t)?;
        let dense = DenseMatrix::new(2, 2, vec![m.e11, m.e12, m.e21, m.e22])?;
        max_curve = max_curve.max(rel_dev(closed, matrix_norm(&dense)?));
    }

    for _ in 0..config.trials {
        // Spectral block norm against the dense norm for diagonal bases.
        let p = rand_params(&mut rng);
        let phi = &gains[rng.gen_range(0..gains.len())];
        let k = rng.gen_range(1..=config.max_dim);
        let eigs: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..=3.0)).collect();
        let spec = SpectrumSpec::finite(eigs)?;
        let (closed, brute) = compare_block_norm(&spec, &p, phi)?;
        max_block = max_block.max(rel_dev(closed, brute));
    }

    for _ in 0..config.trials {
        // Block operator against its adjoint-base companion.
        let p = rand_params(&mut rng);
        let phi = &gains[rng.gen_range(0..gains.len())];
        let n = rng.gen_range(1..=config.max_dim);
        let m = rng.gen_range(1..=config.max_dim);
        let a_mat = DenseMatrix::from_fn(n, m, |_, _| rand_complex(&mut rng, 1.0))?;
        let (t_norm, tilde_norm) = companion_norms(&p, &a_mat, phi)?;
        max_companion = max_companion.max(rel_dev(t_norm, tilde_norm));
    }

    let all_within =
        max_curve <= BATTERY_TOL && max_block <= BATTERY_TOL && max_companion <= BATTERY_TOL;
    Ok(BatteryReport {
        trials: config.trials,
        max_curve_dev: max_curve,
        max_block_dev: max_block,
        max_companion_dev: max_companion,
        tol: BATTERY_TOL,
        all_within,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn norm_of_identity_and_rank_one() {
        let id = DenseMatrix::from_diag(&[1.0, 1.0, 1.0]).unwrap();
        assert!((matrix_norm(&id).unwrap() - 1.0).abs() < 1e-14);
        // Column vector (1, 2, 2): norm 3.
        let col = DenseMatrix::new(3, 1, vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0)]).unwrap();
        assert!((matrix_norm(&col).unwrap() - 3.0).abs() < 1e-13);
        // And its adjoint row.
        assert!((matrix_norm(&col.adjoint()).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn scalar_base_reduces_to_curve_formula() {
        let p = ParamSet::new(cx(1.5, -0.5), cx(0.25, 1.0), cx(-1.0, 0.75));
        let phi = PhiFunction::log(2.0).unwrap();
        for &t in &[0.0, 0.3, 1.0, 2.7] {
            let a_mat = DenseMatrix::new(1, 1, vec![cx(t, 0.0)]).unwrap();
            let brute = matrix_norm(&build_block_operator(&p, &a_mat, &phi).unwrap()).unwrap();
            let closed = eval_f(&p, &phi, t).unwrap();
            assert!(
                (brute - closed).abs() <= 1e-12 * closed.max(1.0),
                "t = {t}: {brute} vs {closed}"
            );
        }
    }

    #[test]
    fn diagonal_base_takes_max_over_eigenvalues() {
        let p = ParamSet::new(cx(-0.8, 0.3), cx(1.1, 0.0), cx(0.4, -1.2));
        let phi = PhiFunction::power(0.0, 1.0, 2.0).unwrap();
        let eigs = [0.2, 1.7, 0.9, 2.4, 0.0];
        let a_mat = DenseMatrix::from_diag(&eigs).unwrap();
        let brute = matrix_norm(&build_block_operator(&p, &a_mat, &phi).unwrap()).unwrap();
        let best = eigs
            .iter()
            .map(|&t| eval_f(&p, &phi, t).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (brute - best).abs() <= 1e-10 * best.max(1.0),
            "{brute} vs {best}"
        );
    }

    #[test]
    fn zero_base_gives_diagonal_norm() {
        let p = ParamSet::new(cx(2.0, 0.0), cx(-1.0, 0.0), cx(0.5, 0.5));
        let phi = PhiFunction::power(1.0, 1.0, 1.0).unwrap(); // phi(0) = 1
        let a_mat = DenseMatrix::zeros(3, 2).unwrap();
        let brute = matrix_norm(&build_block_operator(&p, &a_mat, &phi).unwrap()).unwrap();
        // At t = 0 the blocks decouple: max(|a|, |b| phi(0)).
        let expect = p.a.norm().max(p.b.norm() * 1.0);
        assert!((brute - expect).abs() < 1e-12, "{brute} vs {expect}");
    }

    #[test]
    fn adjoint_modulus_squares_back() {
        let a_mat = DenseMatrix::new(
            2,
            3,
            vec![
                cx(1.0, 0.0),
                cx(0.0, 2.0),
                cx(-1.0, 1.0),
                cx(0.5, 0.0),
                cx(0.0, 0.0),
                cx(1.5, -0.5),
            ],
        )
        .unwrap();
        let modulus = modulus_of_adjoint(&a_mat).unwrap();
        assert_eq!(modulus.rows(), 2);
        // Hermitian, and its square recovers A A*.
        let sq = modulus.mul(&modulus).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let direct: Complex = (0..3)
                    .map(|l| a_mat.get(i, l) * a_mat.get(j, l).conj())
                    .sum();
                assert!(
                    (sq.get(i, j) - direct).norm() <= 1e-12 * direct.norm().max(1.0),
                    "entry ({i}, {j})"
                );
                assert!((modulus.get(i, j) - modulus.get(j, i).conj()).norm() <= 1e-13);
            }
        }
        // On a diagonal base the modulus is the diagonal itself.
        let d = DenseMatrix::from_diag(&[0.25, 2.0]).unwrap();
        let dm = modulus_of_adjoint(&d).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((dm.get(i, j) - d.get(i, j)).norm() <= 1e-13);
            }
        }
    }

    #[test]
    fn companion_has_equal_norm_on_rectangular_base() {
        let p = ParamSet::new(cx(0.9, 0.4), cx(-1.3, 0.2), cx(0.6, -0.8));
        let phi = PhiFunction::power(0.0, 1.0, 0.5).unwrap();
        let a_mat = DenseMatrix::new(
            3,
            2,
            vec![
                cx(1.0, 0.5),
                cx(-0.25, 0.0),
                cx(0.0, -1.5),
                cx(0.75, 0.75),
                cx(2.0, 0.0),
                cx(-0.5, 0.25),
            ],
        )
        .unwrap();
        let (t_norm, tilde_norm) = companion_norms(&p, &a_mat, &phi).unwrap();
        assert!(
            (t_norm - tilde_norm).abs() <= 1e-10 * t_norm.max(1.0),
            "{t_norm} vs {tilde_norm}"
        );
    }

    #[test]
    fn constant_gain_closed_matches_brute_and_exposes_wrong_trace() {
        // Pure off-diagonal case: the true norm is the base norm itself.
        let p0 = ParamSet::from_re(0.0, 0.0, 0.0);
        let a_mat = DenseMatrix::from_diag(&[3.0, 1.0]).unwrap();
        let rep = constant_gain_comparison(&p0, &a_mat).unwrap();
        assert!((rep.closed - 3.0).abs() < 1e-12, "closed {}", rep.closed);
        assert!((rep.brute - 3.0).abs() < 1e-10, "brute {}", rep.brute);
        assert!((rep.misprinted - 5.0f64.sqrt()).abs() < 1e-12);
        assert!((rep.misprinted - rep.brute).abs() > 0.1);

        let p = ParamSet::new(cx(1.0, -2.0), cx(0.5, 0.5), cx(-1.5, 0.25));
        let rep = constant_gain_comparison(&p, &a_mat).unwrap();
        assert!(
            (rep.closed - rep.brute).abs() <= 1e-10 * rep.brute.max(1.0),
            "{} vs {}",
            rep.closed,
            rep.brute
        );
    }

    #[test]
    fn top_eigenvector_achieves_the_norm() {
        let p = ParamSet::new(cx(0.7, 0.1), cx(1.2, -0.4), cx(-0.9, 0.6));
        let phi = PhiFunction::log(1.0).unwrap();
        let a_mat = DenseMatrix::new(
            2,
            2,
            vec![cx(1.0, 0.0), cx(0.5, -0.5), cx(0.0, 1.0), cx(-0.75, 0.25)],
        )
        .unwrap();
        let t = build_block_operator(&p, &a_mat, &phi).unwrap();
        let norm = matrix_norm(&t).unwrap();

        // Diagonalize T* T with vectors and push the top eigenvector through.
        let n = t.rows();
        let mut g = vec![cx(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let mut s = cx(0.0, 0.0);
                for l in 0..n {
                    s += t.get(l, i).conj() * t.get(l, j);
                }
                if i == j {
                    g[i * n + i] = cx(s.re, 0.0);
                } else {
                    g[i * n + j] = s;
                    g[j * n + i] = s.conj();
                }
            }
        }
        let mut v = vec![cx(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = cx(1.0, 0.0);
        }
        jacobi_hermitian(n, &mut g, Some(&mut v)).unwrap();
        let best = (0..n)
            .max_by(|&i, &j| g[i * n + i].re.partial_cmp(&g[j * n + j].re).unwrap())
            .unwrap();
        let mut out = vec![cx(0.0, 0.0); n];
        let mut len2 = 0.0;
        for i in 0..n {
            let ui = v[i * n + best];
            len2 += ui.norm_sqr();
            for r in 0..n {
                out[r] += t.get(r, i) * ui;
            }
        }
        let achieved = (out.iter().map(|z| z.norm_sqr()).sum::<f64>() / len2).sqrt();
        assert!(
            achieved >= norm * (1.0 - 1e-8),
            "eigenvector achieves {achieved} of {norm}"
        );
    }

    #[test]
    fn matrix_norm_matches_power_iteration() {
        // Independent oracle: power iteration on M* M from a fixed seed.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64 - 1.0
        };
        let m = DenseMatrix::from_fn(8, 6, |_, _| cx(next(), next())).unwrap();
        let norm = matrix_norm(&m).unwrap();

        let gram = m.adjoint().mul(&m).unwrap();
        let mut x: Vec<Complex> = (0..6).map(|_| cx(next(), next())).collect();
        let mut lam = 0.0;
        for _ in 0..500 {
            let mut y = vec![cx(0.0, 0.0); 6];
            for i in 0..6 {
                for j in 0..6 {
                    y[i] += gram.get(i, j) * x[j];
                }
            }
            let len = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in &mut y {
                *z /= len;
            }
            lam = len; // |G x| for unit x converges to the top eigenvalue
            x = y;
        }
        assert!(
            (norm - lam.sqrt()).abs() <= 1e-9 * norm.max(1.0),
            "{norm} vs {}",
            lam.sqrt()
        );
    }

    #[test]
    fn unit_base_norm_makes_both_trace_forms_agree() {
        // At base norm 1 the corrected and uncorrected trace terms coincide.
        let p = ParamSet::new(cx(0.3, -1.1), cx(0.8, 0.2), cx(-0.4, 0.9));
        let a_mat = DenseMatrix::from_diag(&[1.0, 0.5]).unwrap();
        let rep = constant_gain_comparison(&p, &a_mat).unwrap();
        assert!(
            (rep.closed - rep.misprinted).abs() <= 1e-12,
            "{} vs {}",
            rep.closed,
            rep.misprinted
        );
        assert!((rep.closed - rep.brute).abs() <= 1e-10 * rep.brute.max(1.0));
    }

    #[test]
    fn battery_is_clean_and_deterministic() {
        let config = BatteryConfig { seed: 7, trials: 6, max_dim: 5 };
        let first = run_battery(&config).unwrap();
        assert!(first.all_within, "{first}");
        let second = run_battery(&config).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn battery_with_no_trials_is_trivially_clean() {
        let report = run_battery(&BatteryConfig { seed: 1, trials: 0, max_dim: 4 }).unwrap();
        assert!(report.all_within);
        assert_eq!(report.max_curve_dev, 0.0);
    }

    #[test]
    fn dense_matrix_validation() {
        assert!(DenseMatrix::zeros(0, 2).is_err());
        assert!(DenseMatrix::new(2, 2, vec![cx(0.0, 0.0); 3]).is_err());
        assert!(DenseMatrix::new(1, 1, vec![cx(f64::NAN, 0.0)]).is_err());
        let a = DenseMatrix::from_fn(2, 3, |i, j| cx((i + j) as f64, 1.0)).unwrap();
        assert_eq!(a.adjoint().rows(), 3);
        assert_eq!(a.adjoint().get(2, 1), cx(3.0, -1.0));
        assert!(a.mul(&a).is_err());
        let sq = a.mul(&a.adjoint()).unwrap();
        assert_eq!(sq.rows(), 2);
        assert_eq!(sq.cols(), 2);
    }
}
