//! Construction of non-monotone norm curves.
//!
//! When a gain rises faster than the quarter-slope inequality allows at some
//! `t0` (that is, `t0 phi'(t0) > 4 phi(t0)`), parameters can be chosen so
//! that the norm curve strictly decreases just left of `t0`:
//!
//! ```text
//! b = sqrt(margin / (phi'(t0) (t0 phi'(t0) - 4 phi(t0))))
//! a = -b phi(t0),  c = 1,  any margin > 4 t0
//! ```
//!
//! With that choice the squared curve has one-sided slopes `d1 - d2 > 0`
//! (left) and `-d1 - d2 < 0` (right) at `t0`, where
//! `d1 = b phi'(t0) sqrt(t0^2 + b^2 phi(t0)^2)` and
//! `d2 = 2 t0 + b^2 phi(t0) phi'(t0)`; the sign of `d1 - d2` follows from
//! `d1^2 - d2^2 = t0 (margin - 4 t0)`. The constructor verifies the gap and
//! hunts down a concrete grid point witnessing the decrease.

use crate::curves::{self, check_monotone_grid, ParamSet, TIE_TOL};
use crate::error::{Error, Result};
use crate::numkit::{bisect_root, Bracket, Complex};
use crate::phicrit::PhiFunction;

/// Minimal decrease `f(t_lo) - f(t0)` accepted for a witness.
pub const WITNESS_GAP_MIN: f64 = 1e-12;

/// Points per scan window in the witness search.
const WITNESS_GRID: usize = 64;

/// Number of window halvings attempted in the witness search.
const WITNESS_SHRINKS: usize = 12;

/// A constructed non-monotone configuration.
#[derive(Debug, Clone)]
pub struct CounterexampleResult {
    /// Parameters `(a, b, c)` realizing the decrease.
    pub params: ParamSet,
    /// Point at which the curve turns.
    pub t0: f64,
    /// Left-slope magnitude component of the squared curve.
    pub d1: f64,
    /// Symmetric slope component of the squared curve.
    pub d2: f64,
    /// `d1^2 - d2^2`; positive exactly when the construction succeeds.
    pub slope_gap: f64,
    /// Pair `(t_lo, t0)` with `t_lo < t0` and `f(t_lo) > f(t0)`.
    pub decrease_witness: (f64, f64),
}

impl std::fmt::Display for CounterexampleResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "non-monotone configuration at t0 = {:.16e}", self.t0)?;
        writeln!(f, "  a = {}", crate::format_complex_17(&self.params.a))?;
        writeln!(f, "  b = {}", crate::format_complex_17(&self.params.b))?;
        writeln!(f, "  c = {}", crate::format_complex_17(&self.params.c))?;
        writeln!(f, "  d1 = {:.16e}", self.d1)?;
        writeln!(f, "  d2 = {:.16e}", self.d2)?;
        writeln!(f, "  slope gap d1^2 - d2^2 = {:.16e}", self.slope_gap)?;
        write!(
            f,
            "  decrease witness: f({:.16e}) > f({:.16e})",
            self.decrease_witness.0, self.decrease_witness.1
        )
    }
}

/// Builds parameters whose norm curve decreases left of `t0`.
///
/// Preconditions: `t0 > 0`, the gain is nonnegative at `t0` and violates the
/// quarter-slope inequality there (`t0 phi'(t0) > 4 phi(t0)`), and `margin`
/// (default `4 t0 + 1`) exceeds `4 t0`.
pub fn construct(
    phi: &PhiFunction,
    t0: f64,
    margin: Option<f64>,
) -> Result<CounterexampleResult> {
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "turning point must be finite and positive, got {t0}"
        )));
    }
    let margin = margin.unwrap_or(4.0 * t0 + 1.0);
    if !margin.is_finite() || margin <= 4.0 * t0 {
        return Err(Error::InvalidInput(format!(
            "margin {margin} must exceed 4 t0 = {}",
            4.0 * t0
        )));
    }
    let phi0 = phi.eval(t0)?;
    if phi0 < 0.0 {
        return Err(Error::Precondition(format!(
            "gain must be nonnegative at t0: phi({t0}) = {phi0:e}"
        )));
    }
    let dphi0 = phi.eval_derivative(t0)?;
    let excess = t0 * dphi0 - 4.0 * phi0;
    if excess <= 0.0 {
        return Err(Error::Precondition(format!(
            "quarter-slope inequality holds at t0 = {t0}: t0 phi' = {:e} <= 4 phi = {:e}",
            t0 * dphi0,
            4.0 * phi0
        )));
    }
    let b = (margin / (dphi0 * excess)).sqrt();
    let params = ParamSet::new(
        Complex::new(-b * phi0, 0.0),
        Complex::new(b, 0.0),
        Complex::new(1.0, 0.0),
    );
    let d1 = b * dphi0 * (t0 * t0 + b * b * phi0 * phi0).sqrt();
    let d2 = 2.0 * t0 + b * b * phi0 * dphi0;
    let slope_gap = d1 * d1 - d2 * d2;
    if !(slope_gap > 0.0) || d1 <= d2 {
        return Err(Error::InternalConsistency(format!(
            "slope gap not positive: d1 = {d1:e}, d2 = {d2:e}, gap = {slope_gap:e}"
        )));
    }
    let decrease_witness = find_decrease_witness(&params, phi, t0)?;
    Ok(CounterexampleResult { params, t0, d1, d2, slope_gap, decrease_witness })
}

/// Scans `[t0 (1 - delta), t0)` with shrinking `delta` for a point where the
/// curve exceeds its value at `t0` by more than `WITNESS_GAP_MIN`.
fn find_decrease_witness(
    params: &ParamSet,
    phi: &PhiFunction,
    t0: f64,
) -> Result<(f64, f64)> {
    let f_t0 = curves::eval_f(params, phi, t0)?;
    let mut delta = 0.5;
    for _ in 0..WITNESS_SHRINKS {
        let lo = t0 * (1.0 - delta);
        let step = (t0 - lo) / WITNESS_GRID as f64;
        let mut best: Option<(f64, f64)> = None;
        for j in 0..WITNESS_GRID {
            let t = lo + j as f64 * step;
            let v = curves::eval_f(params, phi, t)?;
            if best.map_or(true, |(_, bv)| v > bv) {
                best = Some((t, v));
            }
        }
        if let Some((t, v)) = best {
            if v - f_t0 > WITNESS_GAP_MIN {
                return Ok((t, t0));
            }
        }
        delta *= 0.5;
    }
    Err(Error::InternalConsistency(format!(
        "no decrease witness found left of t0 = {t0}"
    )))
}

/// Scripted walkthrough of the canonical quintic-gain counterexample,
/// rebuilt from scratch and checked at every step.
#[derive(Debug, Clone)]
pub struct Ex24Report {
    /// Analytic lower root bound `4^(-1/5)` for the turning point.
    pub t_lower: f64,
    /// Slope polynomial `15 t^8 - 10 t^3 - 1` at `t_lower` (negative).
    pub h_at_lower: f64,
    /// The same polynomial at 1 (positive).
    pub h_at_one: f64,
    /// Peak of the curve, the root of the slope polynomial.
    pub t_star: f64,
    pub f_at_t_star: f64,
    pub f_at_one: f64,
    /// Left end of the first grid pair at which the curve stops rising.
    pub witness_t: f64,
    /// Parameters `(-2, 2, 1)` paired with the plain quintic gain.
    pub params: ParamSet,
    pub increases_before_peak: bool,
    pub decreases_after_peak: bool,
}

impl Ex24Report {
    /// Machine-readable key-value view.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("t_star", format!("{:.16e}", self.t_star)),
            ("f_at_t_star", format!("{:.16e}", self.f_at_t_star)),
            ("f_at_1", format!("{:.16e}", self.f_at_one)),
            ("witness_t", format!("{:.16e}", self.witness_t)),
            ("params_a", crate::format_complex_17(&self.params.a)),
            ("params_b", crate::format_complex_17(&self.params.b)),
            ("params_c", crate::format_complex_17(&self.params.c)),
        ]
    }
}

impl std::fmt::Display for Ex24Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "quintic-gain counterexample: M_t = [[-2, t], [t, 2 t^5]]"
        )?;
        writeln!(
            f,
            "  slope polynomial 15 t^8 - 10 t^3 - 1: {:.16e} at {:.16e}, {:.16e} at 1",
            self.h_at_lower, self.t_lower, self.h_at_one
        )?;
        writeln!(f, "  peak t* = {:.16e}", self.t_star)?;
        writeln!(f, "  f(t*) = {:.16e}", self.f_at_t_star)?;
        writeln!(f, "  f(1)  = {:.16e}", self.f_at_one)?;
        writeln!(
            f,
            "  grid: rising on [0, t*]: {}, falling on [t*, 1]: {}",
            self.increases_before_peak, self.decreases_after_peak
        )?;
        write!(f, "  first non-rising grid pair starts at t = {:.16e}", self.witness_t)
    }
}

fn ensure(cond: bool, msg: impl Fn() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ReproductionFailed(msg()))
    }
}

/// Rebuilds the quintic-gain counterexample and verifies every recorded
/// property; any mismatch is a reproduction failure.
pub fn reproduce_example24() -> Result<Ex24Report> {
    let params = ParamSet::from_re(-2.0, 2.0, 1.0);
    let phi = PhiFunction::power(0.0, 1.0, 5.0)?;
    let slope = |t: f64| 15.0 * t.powi(8) - 10.0 * t.powi(3) - 1.0;

    // Lower bound for the peak: at t1 = 4^(-1/5) the slope polynomial equals
    // -(25/4) t1^3 - 1, manifestly negative.
    let t_lower = 4f64.powf(-0.2);
    let h_at_lower = slope(t_lower);
    let closed = -(25.0 / 4.0) * t_lower.powi(3) - 1.0;
    ensure((h_at_lower - closed).abs() <= 1e-12, || {
        format!("slope at 4^(-1/5): {h_at_lower:e} vs closed form {closed:e}")
    })?;
    let h_at_one = slope(1.0);
    ensure(h_at_lower < 0.0 && h_at_one > 0.0, || {
        format!("expected sign change: {h_at_lower:e} .. {h_at_one:e}")
    })?;

    let bracket = Bracket::new(t_lower, 1.0)?;
    let t_star = bisect_root(slope, &bracket, 1e-12)?;

    // Closed-form curve for these parameters on [0, 1].
    let f_closed = |t: f64| {
        let t5 = t.powi(5);
        1.0 - t5 + (t5 * t5 + 2.0 * t5 + t * t + 1.0).sqrt()
    };
    let f_at_t_star = f_closed(t_star);
    let f_at_one = f_closed(1.0);
    ensure((f_at_one - 5f64.sqrt()).abs() <= 1e-14, || {
        format!("f(1) = {f_at_one} should be sqrt(5)")
    })?;
    ensure(f_at_t_star > f_at_one, || {
        format!("no decrease: f(t*) = {f_at_t_star} vs f(1) = {f_at_one}")
    })?;

    // The closed form must match the generic curve for both equivalent
    // parameterizations.
    let params2 = ParamSet::from_re(-2.0, 1.0, 1.0);
    let phi2 = PhiFunction::power(0.0, 2.0, 5.0)?;
    for i in 0..=100 {
        let t = i as f64 / 100.0;
        let reference = f_closed(t);
        for (p, g) in [(&params, &phi), (&params2, &phi2)] {
            let v = curves::eval_f(p, g, t)?;
            ensure((v - reference).abs() <= 1e-12 * reference.max(1.0), || {
                format!("closed form mismatch at t = {t}: {v} vs {reference}")
            })?;
        }
    }

    // Shape on the two sides of the peak, on grids.
    let rising = check_monotone_grid(
        f_closed,
        &Bracket::new(0.0, t_star)?,
        1024,
        TIE_TOL,
    )?;
    let falling = check_monotone_grid(
        |t| -f_closed(t),
        &Bracket::new(t_star, 1.0)?,
        1024,
        TIE_TOL,
    )?;
    let increases_before_peak =
        rising.verdict == curves::MonotoneVerdict::StrictlyIncreasingOnGrid;
    let decreases_after_peak =
        falling.verdict == curves::MonotoneVerdict::StrictlyIncreasingOnGrid;
    ensure(increases_before_peak, || "curve failed to rise on [0, t*]".into())?;
    ensure(decreases_after_peak, || "curve failed to fall on [t*, 1]".into())?;

    // On the full interval the falsifier must find a witness next to the peak.
    let full = check_monotone_grid(
        |t| curves::eval_f(&params, &phi, t).expect("gain is total on [0, 1]"),
        &Bracket::new(0.0, 1.0)?,
        4096,
        TIE_TOL,
    )?;
    let (witness_t, witness_t2) = match (full.verdict, full.witness) {
        (curves::MonotoneVerdict::ViolationFound, Some(pair)) => pair,
        _ => {
            return Err(Error::ReproductionFailed(
                "full-interval falsifier missed the peak".into(),
            ))
        }
    };
    let grid_step = 1.0 / 4095.0;
    ensure(
        (witness_t - t_star).abs() <= 2.0 * grid_step
            && (witness_t2 - t_star).abs() <= 2.0 * grid_step,
        || format!("witness pair ({witness_t}, {witness_t2}) not near peak {t_star}"),
    )?;

    Ok(Ex24Report {
        t_lower,
        h_at_lower,
        h_at_one,
        t_star,
        f_at_t_star,
        f_at_one,
        witness_t,
        params,
        increases_before_peak,
        decreases_after_peak,
    })
}
