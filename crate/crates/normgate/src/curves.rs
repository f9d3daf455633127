//! Norm curves of the gain-coupled family and the shift family.
//!
//! For parameters `a, b, c` and a gain `phi`, the family is
//! `M_t = [[a, t], [c t, b phi(t)]]` and the curve of interest is
//! `t -> |M_t|` (spectral norm). Writing `A_t = M_t* M_t`, the curve admits
//! the closed form
//!
//! ```text
//! a11(t) = |a|^2 + |c|^2 t^2        h(t) = a + conj(b) c phi(t)
//! a22(t) = t^2 + |b|^2 phi(t)^2     g(t) = (a11 - a22)^2 + 4 t^2 |h|^2
//! |M_t|^2 = (a11 + a22 + sqrt(g)) / 2
//! ```
//!
//! The shift family `N_s = [[a, d], [c, s]]` moves a single entry instead
//! and is classified here by exact sign conditions on `Re(conj(a) c d)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::numkit::{Bracket, Complex, Mat2};
use crate::phicrit::PhiFunction;

/// Default relative tie tolerance for the grid monotonicity falsifier.
pub const TIE_TOL: f64 = 1e-11;

/// Parameters of the gain-coupled family `[[a, t], [c t, b phi(t)]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
}

impl ParamSet {
    pub fn new(a: Complex, b: Complex, c: Complex) -> Self {
        ParamSet { a, b, c }
    }

    pub fn from_re(a: f64, b: f64, c: f64) -> Self {
        ParamSet {
            a: Complex::new(a, 0.0),
            b: Complex::new(b, 0.0),
            c: Complex::new(c, 0.0),
        }
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "parameter {name} = {v} is not finite"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the shift family `[[a, d], [c, s]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsParams {
    pub a: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl NsParams {
    pub fn new(a: Complex, c: Complex, d: Complex) -> Self {
        NsParams { a, c, d }
    }
}

/// One point of a sampled norm curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub value: f64,
}

/// Outcome of the grid monotonicity falsifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneVerdict {
    StrictlyIncreasingOnGrid,
    ViolationFound,
}

/// Report of [`check_monotone_grid`]; on a violation, `witness` holds the
/// adjacent grid pair `(t1, t2)`, `t1 < t2`, at which the curve failed to
/// rise beyond the tie tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneReport {
    pub verdict: MonotoneVerdict,
    pub witness: Option<(f64, f64)>,
}

/// Strictness classes of the shift-family norm curve `s -> |N_s|` on
/// `[0, infinity)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NsCase {
    /// `Re(conj(a) c d) > 0`.
    StrictCaseI,
    /// `Re(conj(a) c d) = 0` with `c` or `d` nonzero.
    StrictCaseII,
    /// `a = c = d = 0`; the curve is `s` itself.
    StrictCaseIII,
    /// Not strictly increasing (negative real part, or a plateau at
    /// `max(|a|, s)` when `c = d = 0` with `a` nonzero).
    NotStrict,
}

impl std::fmt::Display for NsCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NsCase::StrictCaseI => "STRICT_CASE_I",
            NsCase::StrictCaseII => "STRICT_CASE_II",
            NsCase::StrictCaseIII => "STRICT_CASE_III",
            NsCase::NotStrict => "NOT_STRICT",
        })
    }
}

/// Builds the family member `M_t = [[a, t], [c t, b phi(t)]]`.
pub fn make_mt(p: &ParamSet, phi: &PhiFunction, t: f64) -> Result<Mat2> {
    p.check_finite()?;
    let phival = phi.eval(t)?;
    Ok(Mat2::new(
        p.a,
        Complex::new(t, 0.0),
        p.c * t,
        p.b * phival,
    ))
}

fn diag_terms(p: &ParamSet, phival: f64, t: f64) -> (f64, f64) {
    let a11 = p.a.norm_sqr() + p.c.norm_sqr() * t * t;
    let a22 = t * t + p.b.norm_sqr() * phival * phival;
    (a11, a22)
}

/// Off-diagonal witness `h(t) = a + conj(b) c phi(t)` of `M_t* M_t`.
pub fn eval_h(p: &ParamSet, phi: &PhiFunction, t: f64) -> Result<Complex> {
    p.check_finite()?;
    Ok(p.a + p.b.conj() * p.c * phi.eval(t)?)
}

/// Discriminant `g(t) = (a11 - a22)^2 + 4 t^2 |h(t)|^2`; nonnegative by
/// construction.
pub fn eval_g(p: &ParamSet, phi: &PhiFunction, t: f64) -> Result<f64> {
    p.check_finite()?;
    let phival = phi.eval(t)?;
    let (a11, a22) = diag_terms(p, phival, t);
    let h = p.a + p.b.conj() * p.c * phival;
    Ok((a11 - a22) * (a11 - a22) + 4.0 * t * t * h.norm_sqr())
}

/// Norm curve `|M_t|` via the closed form
/// `|M_t|^2 = (a11 + a22 + sqrt(g)) / 2`.
pub fn eval_f(p: &ParamSet, phi: &PhiFunction, t: f64) -> Result<f64> {
    p.check_finite()?;
    let phival = phi.eval(t)?;
    let (a11, a22) = diag_terms(p, phival, t);
    let h = p.a + p.b.conj() * p.c * phival;
    let g = (a11 - a22) * (a11 - a22) + 4.0 * t * t * h.norm_sqr();
    Ok(((a11 + a22 + g.sqrt()) * 0.5).sqrt())
}

/// Norm of the constant-gain block operator `[[a I, A], [c A*, b I]]` as a
/// function of `|A|` alone:
///
/// ```text
/// r = |a|^2 + |b|^2 + (|c|^2 + 1) n^2        (n = |A|)
/// k = |b + conj(a) c|^2 + |a + conj(b) c|^2
/// |S|^2 = (r + sqrt((|a|^2 - |b|^2)^2 + (|c|^2 - 1)^2 n^4 + 2 k n^2)) / 2
/// ```
///
/// This agrees with `eval_f` under the constant gain `phi = 1` at `t = n`;
/// the two are kept as separate code paths and cross-checked in tests.
pub fn norm_block_constant(p: &ParamSet, norm_a: f64) -> Result<f64> {
    p.check_finite()?;
    if !norm_a.is_finite() || norm_a < 0.0 {
        return Err(Error::InvalidInput(format!(
            "operator norm must be finite and nonnegative, got {norm_a}"
        )));
    }
    let asq = p.a.norm_sqr();
    let bsq = p.b.norm_sqr();
    let csq = p.c.norm_sqr();
    let n2 = norm_a * norm_a;
    let r = asq + bsq + (csq + 1.0) * n2;
    let k = (p.b + p.a.conj() * p.c).norm_sqr() + (p.a + p.b.conj() * p.c).norm_sqr();
    let radicand = (asq - bsq) * (asq - bsq) + (csq - 1.0) * (csq - 1.0) * n2 * n2 + 2.0 * k * n2;
    Ok(((r + radicand.sqrt()) * 0.5).sqrt())
}

/// Exact classification of the shift-family curve `s -> |N_s|`.
///
/// The comparisons are exact floating-point tests; boundary classes are
/// meant for inputs that hit them exactly.
pub fn classify_ns(q: &NsParams) -> NsCase {
    let zero = Complex::new(0.0, 0.0);
    let sign = (q.a.conj() * q.c * q.d).re;
    if sign > 0.0 {
        NsCase::StrictCaseI
    } else if sign == 0.0 && (q.c != zero || q.d != zero) {
        NsCase::StrictCaseII
    } else if q.a == zero && q.c == zero && q.d == zero {
        NsCase::StrictCaseIII
    } else {
        NsCase::NotStrict
    }
}

/// Norm of the shift family member `N_s = [[a, d], [c, s]]` via
/// `|N_s|^2 = (tr + sqrt((s^2 + |d|^2 - |a|^2 - |c|^2)^2 + 4 |a conj(d) + c s|^2)) / 2`.
pub fn eval_ns_norm(q: &NsParams, s: f64) -> Result<f64> {
    if !s.is_finite() || s < 0.0 {
        return Err(Error::Domain(format!(
            "shift must be finite and nonnegative, got {s}"
        )));
    }
    let asq = q.a.norm_sqr();
    let csq = q.c.norm_sqr();
    let dsq = q.d.norm_sqr();
    let tr = asq + csq + dsq + s * s;
    let diff = s * s + dsq - asq - csq;
    let cross = q.a * q.d.conj() + q.c * s;
    let radicand = diff * diff + 4.0 * cross.norm_sqr();
    Ok(((tr + radicand.sqrt()) * 0.5).sqrt())
}

/// Characteristic value `Phi(t) = (L - a11(t)) (L - a22(t)) - t^2 |h(t)|^2`
/// of `M_t* M_t` at `L = lambda0`; zero exactly when `lambda0` is an
/// eigenvalue of `M_t* M_t`.
pub fn eval_phi_det(p: &ParamSet, phi: &PhiFunction, lambda0: f64, t: f64) -> Result<f64> {
    p.check_finite()?;
    if !lambda0.is_finite() {
        return Err(Error::InvalidInput(format!("lambda0 = {lambda0} is not finite")));
    }
    let phival = phi.eval(t)?;
    let (a11, a22) = diag_terms(p, phival, t);
    let h = p.a + p.b.conj() * p.c * phival;
    Ok((lambda0 - a11) * (lambda0 - a22) - t * t * h.norm_sqr())
}

/// Grid falsifier for strict monotone increase: scans `grid_n` uniform
/// points (endpoints included) and reports the first adjacent pair that
/// fails to rise by more than `tie_tol * max(1, |value|)`.
///
/// A clean pass proves nothing beyond the grid; a violation is a concrete
/// witness.
pub fn check_monotone_grid(
    f: impl Fn(f64) -> f64,
    bracket: &Bracket,
    grid_n: usize,
    tie_tol: f64,
) -> Result<MonotoneReport> {
    if grid_n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points, got {grid_n}"
        )));
    }
    let lo = bracket.lo();
    let hi = bracket.hi();
    let step = (hi - lo) / (grid_n - 1) as f64;
    let mut prev_t = lo;
    let mut prev_v = f(lo);
    for i in 1..grid_n {
        let t = if i + 1 == grid_n { hi } else { lo + i as f64 * step };
        let v = f(t);
        if v <= prev_v + tie_tol * prev_v.abs().max(1.0) {
            return Ok(MonotoneReport {
                verdict: MonotoneVerdict::ViolationFound,
                witness: Some((prev_t, t)),
            });
        }
        prev_t = t;
        prev_v = v;
    }
    Ok(MonotoneReport {
        verdict: MonotoneVerdict::StrictlyIncreasingOnGrid,
        witness: None,
    })
}

/// Samples the norm curve on a uniform grid (endpoints included).
pub fn sample_curve(
    p: &ParamSet,
    phi: &PhiFunction,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<Vec<CurveSample>> {
    if grid_n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points, got {grid_n}"
        )));
    }
    let lo = bracket.lo();
    let hi = bracket.hi();
    let step = (hi - lo) / (grid_n - 1) as f64;
    (0..grid_n)
        .map(|i| {
            let t = if i + 1 == grid_n { hi } else { lo + i as f64 * step };
            Ok(CurveSample { t, value: eval_f(p, phi, t)? })
        })
        .collect()
}

/// Writes samples as CSV with header `t,norm`, 17 significant digits.
pub fn write_curve_csv(w: &mut impl Write, samples: &[CurveSample]) -> std::io::Result<()> {
    writeln!(w, "t,norm")?;
    for s in samples {
        writeln!(w, "{:.16e},{:.16e}", s.t, s.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::norm_mat2;

    fn cx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn quintic_pair() -> (ParamSet, PhiFunction) {
        (
            ParamSet::from_re(-2.0, 2.0, 1.0),
            PhiFunction::power(0.0, 1.0, 5.0).unwrap(),
        )
    }

    #[test]
    fn curve_value_at_one_is_sqrt_five() {
        let (p, phi) = quintic_pair();
        let f1 = eval_f(&p, &phi, 1.0).unwrap();
        assert!((f1 - 5f64.sqrt()).abs() < 1e-14, "f(1) = {f1}");
    }

    #[test]
    fn curve_peak_near_reference_point() {
        let (p, phi) = quintic_pair();
        let f = eval_f(&p, &phi, 0.9431).unwrap();
        assert!((f - 2.2384).abs() < 5e-4, "f(0.9431) = {f}");
        assert!(f > eval_f(&p, &phi, 1.0).unwrap());
    }

    #[test]
    fn closed_form_matches_matrix_route() {
        let (p, phi) = quintic_pair();
        for &t in &[0.0, 0.3, 0.9431, 1.0, 1.7] {
            let direct = eval_f(&p, &phi, t).unwrap();
            let m = make_mt(&p, &phi, t).unwrap();
            let via_norm = norm_mat2(&m).unwrap();
            assert!(
                (direct - via_norm).abs() <= 1e-12 * via_norm.max(1.0),
                "t = {t}: {direct} vs {via_norm}"
            );
        }
    }

    #[test]
    fn equivalent_parameterizations_agree() {
        // Doubling the gain and halving b leaves the matrix unchanged.
        let (p1, phi1) = quintic_pair();
        let p2 = ParamSet::from_re(-2.0, 1.0, 1.0);
        let phi2 = PhiFunction::power(0.0, 2.0, 5.0).unwrap();
        for &t in &[0.2, 0.5, 0.9431, 1.0, 1.3] {
            let f1 = eval_f(&p1, &phi1, t).unwrap();
            let f2 = eval_f(&p2, &phi2, t).unwrap();
            assert!((f1 - f2).abs() <= 1e-13 * f1.max(1.0));
        }
    }

    #[test]
    fn discriminant_vanishes_where_diag_and_offdiag_balance() {
        // For a = -b phi(t0) and c = 1 both g-terms vanish at t0 = 1.
        let p = ParamSet::from_re(-2.0, 1.0, 1.0);
        let phi = PhiFunction::power(0.0, 2.0, 5.0).unwrap();
        assert_eq!(eval_h(&p, &phi, 1.0).unwrap(), cx(0.0, 0.0));
        assert_eq!(eval_g(&p, &phi, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_params_zero_gain_gives_identity_curve() {
        let p = ParamSet::from_re(0.0, 0.0, 0.0);
        let phi = PhiFunction::power(0.0, 0.0, 0.0).unwrap();
        for &t in &[0.0, 0.5, 1.0, 2.5] {
            assert_eq!(eval_f(&p, &phi, t).unwrap(), t);
        }
    }

    #[test]
    fn constant_block_norm_reduces_to_operator_norm() {
        let p = ParamSet::from_re(0.0, 0.0, 0.0);
        assert_eq!(norm_block_constant(&p, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn constant_block_norm_at_zero_takes_max_diagonal() {
        let p = ParamSet::from_re(1.0, 1.0, 1.0);
        assert_eq!(norm_block_constant(&p, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn constant_block_matches_unit_gain_curve() {
        let one = PhiFunction::power(1.0, 0.0, 0.0).unwrap();
        let cases = [
            ParamSet::new(cx(1.0, 0.5), cx(-0.3, 0.2), cx(0.7, -1.1)),
            ParamSet::from_re(-2.0, 2.0, 1.0),
            ParamSet::new(cx(0.0, 1.0), cx(2.0, 0.0), cx(0.0, -0.5)),
        ];
        for p in cases {
            for &t in &[0.0, 0.4, 1.0, 2.3] {
                let via_block = norm_block_constant(&p, t).unwrap();
                let via_curve = eval_f(&p, &one, t).unwrap();
                assert!(
                    (via_block - via_curve).abs() <= 1e-12 * via_curve.max(1.0),
                    "t = {t}: {via_block} vs {via_curve}"
                );
            }
        }
    }

    #[test]
    fn negative_operator_norm_rejected() {
        let p = ParamSet::from_re(1.0, 1.0, 1.0);
        assert!(norm_block_constant(&p, -1.0).is_err());
    }

    #[test]
    fn shift_family_classification() {
        let one = cx(1.0, 0.0);
        let zero = cx(0.0, 0.0);
        assert_eq!(classify_ns(&NsParams::new(one, one, one)), NsCase::StrictCaseI);
        assert_eq!(classify_ns(&NsParams::new(one, zero, one)), NsCase::StrictCaseII);
        assert_eq!(classify_ns(&NsParams::new(zero, zero, zero)), NsCase::StrictCaseIII);
        assert_eq!(classify_ns(&NsParams::new(one, zero, zero)), NsCase::NotStrict);
        assert_eq!(
            classify_ns(&NsParams::new(one, one, cx(-1.0, 0.0))),
            NsCase::NotStrict
        );
        // Purely imaginary product lands in the boundary class.
        assert_eq!(
            classify_ns(&NsParams::new(one, cx(0.0, 1.0), one)),
            NsCase::StrictCaseII
        );
    }

    #[test]
    fn shift_norm_matches_matrix_route() {
        let q = NsParams::new(cx(1.0, -0.4), cx(0.3, 0.8), cx(-1.2, 0.1));
        for &s in &[0.0, 0.7, 1.9, 4.2] {
            let direct = eval_ns_norm(&q, s).unwrap();
            let m = Mat2::new(q.a, q.d, q.c, cx(s, 0.0));
            let via_norm = norm_mat2(&m).unwrap();
            assert!(
                (direct - via_norm).abs() <= 1e-12 * via_norm.max(1.0),
                "s = {s}: {direct} vs {via_norm}"
            );
        }
    }

    #[test]
    fn shift_norm_plateau_when_only_a_nonzero() {
        let q = NsParams::new(cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0));
        assert_eq!(eval_ns_norm(&q, 0.5).unwrap(), 2.0);
        assert_eq!(eval_ns_norm(&q, 2.0).unwrap(), 2.0);
        assert_eq!(eval_ns_norm(&q, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn characteristic_value_vanishes_at_curve() {
        let (p, phi) = quintic_pair();
        for &t in &[0.3, 0.9, 1.4] {
            let lambda0 = eval_f(&p, &phi, t).unwrap().powi(2);
            let det = eval_phi_det(&p, &phi, lambda0, t).unwrap();
            assert!(det.abs() < 1e-10 * lambda0 * lambda0, "t = {t}: det {det:e}");
        }
    }

    #[test]
    fn monotone_grid_passes_increasing() {
        let b = Bracket::new(0.0, 1.0).unwrap();
        let report = check_monotone_grid(|t| t, &b, 64, TIE_TOL).unwrap();
        assert_eq!(report.verdict, MonotoneVerdict::StrictlyIncreasingOnGrid);
        assert!(report.witness.is_none());
    }

    #[test]
    fn monotone_grid_catches_decrease_and_plateau() {
        let b = Bracket::new(0.0, 1.0).unwrap();
        let report = check_monotone_grid(|t| -t, &b, 64, TIE_TOL).unwrap();
        assert_eq!(report.verdict, MonotoneVerdict::ViolationFound);
        let (t1, t2) = report.witness.unwrap();
        assert!(t1 < t2 && t1 == 0.0);

        let report = check_monotone_grid(|t| t.min(0.5), &b, 64, TIE_TOL).unwrap();
        assert_eq!(report.verdict, MonotoneVerdict::ViolationFound);
        let (t1, t2) = report.witness.unwrap();
        assert!(t1 >= 0.5 - 1.0 / 63.0 && t2 > t1);
    }

    #[test]
    fn curve_csv_format() {
        let p = ParamSet::from_re(0.0, 0.0, 0.0);
        let phi = PhiFunction::power(0.0, 0.0, 0.0).unwrap();
        let b = Bracket::new(0.0, 1.0).unwrap();
        let samples = sample_curve(&p, &phi, &b, 3).unwrap();
        let mut out = Vec::new();
        write_curve_csv(&mut out, &samples).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,norm"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0].parse::<f64>().unwrap(), 0.0);
        let mid: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(mid[0].parse::<f64>().unwrap(), 0.5);
        assert_eq!(mid[1].parse::<f64>().unwrap(), 0.5);
    }
}
