//! Scalar gain functions and monotonicity certificates.
//!
//! A gain function `phi` feeds the family `M_t = [[a, t], [c t, b phi(t)]]`.
//! The norm curve `t -> |M_t|` is strictly increasing for every choice of
//! parameters exactly when `phi(t) >= t phi'(t) / 4` holds for all positive
//! `t`; this module decides that inequality symbolically where the family
//! allows it and by grid evidence otherwise.

use crate::curves::ParamSet;
use crate::error::{Error, Result};
use crate::numkit::Bracket;

/// Relative step for finite-difference derivatives of table and preset gains.
pub const FD_STEP_REL: f64 = 1e-6;

/// Minimal relative rise between consecutive grid values for a gain to count
/// as strictly increasing on that grid.
pub const STRICT_RISE_REL: f64 = 1e-13;

/// Slack for the grid check of the quarter-slope inequality; deficits inside
/// this band are too close to call and yield an inconclusive certificate.
pub const COND_B_NUMERIC_SLACK: f64 = 1e-8;

/// Relative slack for the fourth-power envelope comparison.
pub const COND_A_SLACK_REL: f64 = 1e-12;

/// Nonnegative scalar gain function on `t >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFunction {
    /// `offset + coeff * t^exponent`, all three parameters nonnegative.
    Power { offset: f64, coeff: f64, exponent: f64 },
    /// `ln(1 + rate * t)` with `rate > 0`.
    Log { rate: f64 },
    /// Piecewise-linear interpolant of `(t, value)` samples sorted strictly
    /// ascending in `t`; evaluation outside the sampled range is an error.
    Table { samples: Vec<(f64, f64)> },
    /// Named built-in gain evaluated directly, differentiated numerically.
    Preset(PhiPreset),
}

/// Built-in gains available as presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiPreset {
    /// `exp(t) - 1`
    Expm1,
    /// `sinh(t)`
    Sinh,
}

impl PhiFunction {
    pub fn power(offset: f64, coeff: f64, exponent: f64) -> Result<Self> {
        for (name, v) in [("offset", offset), ("coeff", coeff), ("exponent", exponent)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "power gain {name} must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(PhiFunction::Power { offset, coeff, exponent })
    }

    pub fn log(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "log gain rate must be finite and positive, got {rate}"
            )));
        }
        Ok(PhiFunction::Log { rate })
    }

    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "table gain needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for &(t, v) in &samples {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "table sample ({t}, {v}) is not finite"
                )));
            }
        }
        if samples[0].0 < 0.0 {
            return Err(Error::InvalidInput(format!(
                "table abscissae must be nonnegative, start at {}",
                samples[0].0
            )));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidInput(format!(
                    "table abscissae must be strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(PhiFunction::Table { samples })
    }

    /// Parses a two-column CSV body into a table gain. The first line is
    /// skipped when it does not parse as numbers, so both `t,phi` and
    /// `t,norm` curve exports load directly.
    pub fn table_from_csv_str(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (t, v) = match (cols.next(), cols.next(), cols.next()) {
                (Some(t), Some(v), None) => (t.trim(), v.trim()),
                _ => {
                    return Err(Error::SpecFormat(format!(
                        "line {}: expected two comma-separated columns",
                        lineno + 1
                    )))
                }
            };
            match (t.parse::<f64>(), v.parse::<f64>()) {
                (Ok(t), Ok(v)) => samples.push((t, v)),
                _ if lineno == 0 => continue, // header row
                _ => {
                    return Err(Error::SpecFormat(format!(
                        "line {}: cannot parse '{t}' or '{v}' as numbers",
                        lineno + 1
                    )))
                }
            }
        }
        PhiFunction::table(samples)
    }

    pub fn table_from_csv_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        PhiFunction::table_from_csv_str(&text)
    }

    /// Closed domain of definition `[lo, hi]` (`hi` infinite except for tables).
    pub fn domain(&self) -> (f64, f64) {
        match self {
            PhiFunction::Table { samples } => (samples[0].0, samples[samples.len() - 1].0),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// Evaluates the gain at `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!(
                "gain argument must be finite and nonnegative, got {t}"
            )));
        }
        match self {
            PhiFunction::Power { offset, coeff, exponent } => {
                Ok(offset + coeff * t.powf(*exponent))
            }
            PhiFunction::Log { rate } => Ok((1.0 + rate * t).ln()),
            PhiFunction::Table { samples } => {
                let (lo, hi) = self.domain();
                if t < lo || t > hi {
                    return Err(Error::Domain(format!(
                        "table gain sampled on [{lo}, {hi}] cannot be evaluated at {t}"
                    )));
                }
                let idx = samples.partition_point(|&(s, _)| s <= t);
                if idx == samples.len() {
                    return Ok(samples[samples.len() - 1].1);
                }
                let (t0, v0) = samples[idx - 1];
                let (t1, v1) = samples[idx];
                Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
            PhiFunction::Preset(p) => Ok(match p {
                PhiPreset::Expm1 => t.exp_m1(),
                PhiPreset::Sinh => t.sinh(),
            }),
        }
    }

    /// Derivative at `t > 0`: closed form for power and log gains, central
    /// finite difference with step `FD_STEP_REL * max(1, t)` for tables and
    /// presets (one-sided at domain boundaries).
    pub fn eval_derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Domain(format!(
                "derivative argument must be finite and positive, got {t}"
            )));
        }
        match self {
            PhiFunction::Power { coeff, exponent, .. } => {
                if *coeff == 0.0 || *exponent == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(coeff * exponent * t.powf(exponent - 1.0))
                }
            }
            PhiFunction::Log { rate } => Ok(rate / (1.0 + rate * t)),
            PhiFunction::Table { .. } | PhiFunction::Preset(_) => {
                let (lo, hi) = self.domain();
                if t < lo || t > hi {
                    return Err(Error::Domain(format!(
                        "derivative argument {t} outside domain [{lo}, {hi}]"
                    )));
                }
                let h = FD_STEP_REL * t.abs().max(1.0);
                let a = (t - h).max(lo);
                let b = (t + h).min(hi);
                if b <= a {
                    return Err(Error::Domain(format!(
                        "domain [{lo}, {hi}] too narrow for a difference quotient at {t}"
                    )));
                }
                Ok((self.eval(b)? - self.eval(a)?) / (b - a))
            }
        }
    }
}

impl std::fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PhiFunction::Power { offset, coeff, exponent } => {
                write!(f, "power:{offset},{coeff},{exponent}")
            }
            PhiFunction::Log { rate } => write!(f, "log:{rate}"),
            PhiFunction::Table { samples } => write!(f, "table:<{} samples>", samples.len()),
            PhiFunction::Preset(PhiPreset::Expm1) => write!(f, "preset:expm1"),
            PhiFunction::Preset(PhiPreset::Sinh) => write!(f, "preset:sinh"),
        }
    }
}

/// Evaluates a gain; free-function form of [`PhiFunction::eval`].
pub fn eval_phi(phi: &PhiFunction, t: f64) -> Result<f64> {
    phi.eval(t)
}

/// Derivative of a gain; free-function form of [`PhiFunction::eval_derivative`].
pub fn eval_dphi(phi: &PhiFunction, t: f64) -> Result<f64> {
    phi.eval_derivative(t)
}

/// Certificate outcome for the quarter-slope inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    CertifiedMonotone,
    CertifiedNotCondB,
    Inconclusive,
}

impl std::fmt::Display for CertStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CertStatus::CertifiedMonotone => "CERTIFIED_MONOTONE",
            CertStatus::CertifiedNotCondB => "CERTIFIED_NOT_COND_B",
            CertStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Which argument produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Justification {
    /// Quarter-slope inequality established directly.
    Thm21B,
    /// Power-gain exponent rule: certifiable exactly when the exponent is at
    /// most 4 (or the gain is constant).
    Cor24Alpha,
    /// Logarithmic gains always satisfy the quarter-slope inequality.
    Cor26Log,
    /// Parameter sign condition that certifies the curve irrespective of the
    /// gain.
    Cor27Params,
    /// Grid evidence only; no symbolic argument.
    NumericOnly,
}

impl std::fmt::Display for Justification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Justification::Thm21B => "THM21_B",
            Justification::Cor24Alpha => "COR24_ALPHA",
            Justification::Cor26Log => "COR26_LOG",
            Justification::Cor27Params => "COR27_PARAMS",
            Justification::NumericOnly => "NUMERIC_ONLY",
        })
    }
}

/// Result of a monotonicity-condition check.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub status: CertStatus,
    pub justification: Justification,
    /// A `t` at which the quarter-slope inequality fails, when one is known.
    pub violation_point: Option<f64>,
}

impl Certificate {
    fn monotone(justification: Justification) -> Self {
        Certificate { status: CertStatus::CertifiedMonotone, justification, violation_point: None }
    }
}

impl std::fmt::Display for Certificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.status, self.justification)?;
        if let Some(t) = self.violation_point {
            write!(f, " violation at t = {t:.16e}")?;
        }
        Ok(())
    }
}

/// Decides whether `phi(t) >= t phi'(t) / 4` holds for all positive `t`.
///
/// Power gains are decided symbolically: constants and exponents at most 4
/// certify, larger exponents fail with a concrete violation point.
/// Logarithmic gains always certify. Table and preset gains are checked on a
/// uniform `grid_n`-point grid over `bracket` (grid-scoped evidence only) and
/// must be nonnegative and strictly increasing there.
pub fn check_condition_b(
    phi: &PhiFunction,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<Certificate> {
    match phi {
        PhiFunction::Power { offset, coeff, exponent } => {
            if *coeff == 0.0 || *exponent == 0.0 {
                // Constant gain: monotonicity holds by the fixed-gain block
                // norm formula, no slope condition needed.
                return Ok(Certificate::monotone(Justification::Cor24Alpha));
            }
            if *exponent <= 4.0 {
                return Ok(Certificate::monotone(Justification::Cor24Alpha));
            }
            // offset * t^(-exponent) + coeff >= coeff * exponent / 4 fails
            // once t^exponent > 4 offset / (coeff (exponent - 4)).
            let t_crit = if *offset == 0.0 {
                0.0
            } else {
                (4.0 * offset / (coeff * (exponent - 4.0))).powf(1.0 / exponent)
            };
            Ok(Certificate {
                status: CertStatus::CertifiedNotCondB,
                justification: Justification::Cor24Alpha,
                violation_point: Some((2.0 * t_crit).max(1.0)),
            })
        }
        PhiFunction::Log { .. } => Ok(Certificate::monotone(Justification::Cor26Log)),
        PhiFunction::Table { .. } | PhiFunction::Preset(_) => {
            check_condition_b_on_grid(phi, bracket, grid_n)
        }
    }
}

fn check_condition_b_on_grid(
    phi: &PhiFunction,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<Certificate> {
    let ts = grid(bracket, grid_n)?;
    let values = ts.iter().map(|&t| phi.eval(t)).collect::<Result<Vec<_>>>()?;
    if values[0] < 0.0 {
        return Err(Error::Precondition(format!(
            "gain must be nonnegative: phi({}) = {:e}",
            ts[0], values[0]
        )));
    }
    for i in 0..ts.len() - 1 {
        if values[i + 1] - values[i] <= STRICT_RISE_REL * values[i].abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "gain must be strictly increasing: phi({}) = {:e}, phi({}) = {:e}",
                ts[i],
                values[i],
                ts[i + 1],
                values[i + 1]
            )));
        }
    }
    let mut worst_deficit = f64::NEG_INFINITY;
    for (&t, &v) in ts.iter().zip(&values) {
        if t <= 0.0 {
            continue; // inequality is trivial at t = 0 for a nonnegative gain
        }
        let deficit = 0.25 * t * phi.eval_derivative(t)? - v;
        let slack = COND_B_NUMERIC_SLACK * v.abs().max(1.0);
        if deficit > slack {
            return Ok(Certificate {
                status: CertStatus::CertifiedNotCondB,
                justification: Justification::NumericOnly,
                violation_point: Some(t),
            });
        }
        worst_deficit = worst_deficit.max(deficit / v.abs().max(1.0));
    }
    if worst_deficit > -COND_B_NUMERIC_SLACK {
        return Ok(Certificate {
            status: CertStatus::Inconclusive,
            justification: Justification::NumericOnly,
            violation_point: None,
        });
    }
    Ok(Certificate::monotone(Justification::NumericOnly))
}

/// Grid check of the fourth-power envelope: `phi(t) <= phi(t0) (t/t0)^4`
/// (with relative slack `COND_A_SLACK_REL`) over a bracket contained in
/// `[t0, infinity)`.
pub fn check_condition_a(
    phi: &PhiFunction,
    t0: f64,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<bool> {
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::Precondition(format!(
            "envelope base point must be positive, got {t0}"
        )));
    }
    if bracket.lo() < t0 {
        return Err(Error::Precondition(format!(
            "bracket [{}, {}] must start at or above t0 = {t0}",
            bracket.lo(),
            bracket.hi()
        )));
    }
    let phi0 = phi.eval(t0)?;
    for t in grid(bracket, grid_n)? {
        let envelope = phi0 * (t / t0).powi(4) * (1.0 + COND_A_SLACK_REL);
        if phi.eval(t)? > envelope {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sign condition on the matrix parameters which certifies a strictly
/// increasing norm curve for every nonnegative strictly increasing gain:
/// `Re(conj(a) conj(b) c) >= 0`.
pub fn param_certificate(p: &ParamSet) -> bool {
    (p.a.conj() * p.b.conj() * p.c).re >= 0.0
}

/// Whether the gain is strictly increasing (and nonnegative) on the bracket:
/// symbolic for power and log gains, a `grid_n`-point grid check otherwise.
pub fn phi_strictly_increasing(
    phi: &PhiFunction,
    bracket: &Bracket,
    grid_n: usize,
) -> Result<bool> {
    match phi {
        PhiFunction::Power { coeff, exponent, .. } => Ok(*coeff > 0.0 && *exponent > 0.0),
        PhiFunction::Log { .. } => Ok(true),
        PhiFunction::Table { .. } | PhiFunction::Preset(_) => {
            let ts = grid(bracket, grid_n)?;
            let values = ts.iter().map(|&t| phi.eval(t)).collect::<Result<Vec<_>>>()?;
            if values[0] < 0.0 {
                return Ok(false);
            }
            Ok(values
                .windows(2)
                .all(|w| w[1] - w[0] > STRICT_RISE_REL * w[0].abs().max(1.0)))
        }
    }
}

/// Gains exercised by randomized cross-checks: power gains across the
/// certifiable/non-certifiable exponent boundary plus two log gains.
pub fn standard_battery() -> Vec<PhiFunction> {
    let mut battery: Vec<PhiFunction> = [0.5, 1.0, 2.0, 3.0, 4.0, 4.5, 5.0]
        .iter()
        .map(|&e| PhiFunction::power(0.0, 1.0, e).unwrap())
        .collect();
    battery.push(PhiFunction::log(1.0).unwrap());
    battery.push(PhiFunction::log(3.0).unwrap());
    battery
}

fn grid(bracket: &Bracket, grid_n: usize) -> Result<Vec<f64>> {
    if grid_n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs at least 2 points, got {grid_n}"
        )));
    }
    let lo = bracket.lo();
    let hi = bracket.hi();
    let step = (hi - lo) / (grid_n - 1) as f64;
    Ok((0..grid_n)
        .map(|i| if i + 1 == grid_n { hi } else { lo + i as f64 * step })
        .collect())
}
