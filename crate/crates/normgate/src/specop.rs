//! Attainment analysis for block operators built from spectral data.
//!
//! The operator under study is `T = [[a I, A], [c A*, b phi(|A|)]]` for a
//! bounded positive-side description of `A`: the spectrum `sigma` of the
//! modulus `|A*|` (intervals, isolated eigenvalues, an eigenvalue sequence,
//! limit points) inside `[0, bound]`. Unitarily `T` reduces to the family
//! `M_t` over `t in sigma`, so
//!
//! ```text
//! |T| = max { |M_t| : t in sigma }
//! ```
//!
//! and `T` attains its norm exactly when some maximizing `t` is an
//! eigenvalue. The decision ladder: a monotone norm curve transfers
//! attainment to the base operator; otherwise the maximizer set `Omega` is
//! located numerically and intersected with the point spectrum.

use crate::curves::{eval_f, ParamSet};
use crate::error::{Error, Result};
use crate::numkit::{maximize_candidates_on_interval, Bracket};
use crate::phicrit::{
    check_condition_b, param_certificate, phi_strictly_increasing, CertStatus, Justification,
    PhiFunction,
};

/// Relative threshold below the block norm within which a point counts as a
/// maximizer candidate.
pub const OMEGA_REL_TOL: f64 = 1e-9;

/// Cluster radius for maximizer candidates, relative to `max(1, bound)`.
pub const CLUSTER_RADIUS_REL: f64 = 1e-6;

/// A point-spectrum miss within this multiple of the cluster radius is too
/// close to call and downgrades the verdict to unknown.
pub const NEAR_MISS_FACTOR: f64 = 10.0;

/// Membership tolerance for `sup sigma` in the point spectrum, relative to
/// `max(1, bound)`.
pub const SUP_MEMBER_TOL: f64 = 1e-12;

/// Grid sizes for the gain-hypothesis check and per-interval maximization.
pub const HYPOTHESIS_GRID: usize = 4096;
pub const INTERVAL_GRID: usize = 4096;

/// Guard on declared sequence lengths.
const SEQUENCE_N_CAP: usize = 10_000_000;

/// Named eigenvalue sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// `sqrt((n + 1) / (n + 2))`, the modulus spectrum of the shift on the
    /// weighted square-summable space with those weights.
    Bergman,
}

/// A generated eigenvalue sequence, truncated at index `n_max` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenSequence {
    pub kind: SequenceKind,
    pub n_max: usize,
}

impl EigenSequence {
    pub fn value(&self, n: usize) -> f64 {
        match self.kind {
            SequenceKind::Bergman => ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_max).map(|n| self.value(n))
    }
}

/// Validated description of the spectrum of `|A*|`.
///
/// `sigma` is the union of the closed intervals, the explicit eigenvalues,
/// the sequence values, and the limit points; eigenvalues and sequence
/// values form the point spectrum. Everything lies in `[0, bound]` and
/// `sigma` is nonempty, so `sup sigma` is the norm of the base operator.
#[derive(Debug, Clone)]
pub struct SpectrumSpec {
    bound: f64,
    intervals: Vec<(f64, f64)>,
    eigenvalues: Vec<f64>,
    sequence: Option<EigenSequence>,
    limit_points: Vec<f64>,
}

impl SpectrumSpec {
    pub fn new(
        bound: f64,
        intervals: Vec<(f64, f64)>,
        eigenvalues: Vec<f64>,
        sequence: Option<EigenSequence>,
        limit_points: Vec<f64>,
    ) -> Result<Self> {
        if !bound.is_finite() || bound <= 0.0 {
            return Err(Error::SpecFormat(format!(
                "bound must be finite and positive, got {bound}"
            )));
        }
        for &(lo, hi) in &intervals {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::SpecFormat(format!(
                    "interval [{lo}, {hi}] is not a valid closed interval"
                )));
            }
            if lo < 0.0 || hi > bound {
                return Err(Error::SpecFormat(format!(
                    "interval [{lo}, {hi}] leaves [0, {bound}]"
                )));
            }
        }
        for (name, list) in [("eigenvalue", &eigenvalues), ("limit point", &limit_points)] {
            for &v in list {
                if !v.is_finite() || v < 0.0 || v > bound {
                    return Err(Error::SpecFormat(format!(
                        "{name} {v} leaves [0, {bound}]"
                    )));
                }
            }
        }
        if let Some(seq) = &sequence {
            if seq.n_max > SEQUENCE_N_CAP {
                return Err(Error::SpecFormat(format!(
                    "sequence length {} exceeds cap {SEQUENCE_N_CAP}",
                    seq.n_max
                )));
            }
            for v in seq.values() {
                if v < 0.0 || v > bound {
                    return Err(Error::SpecFormat(format!(
                        "sequence value {v} leaves [0, {bound}]"
                    )));
                }
            }
        }
        if intervals.is_empty()
            && eigenvalues.is_empty()
            && sequence.is_none()
            && limit_points.is_empty()
        {
            return Err(Error::SpecFormat("spectrum is empty".into()));
        }
        Ok(SpectrumSpec { bound, intervals, eigenvalues, sequence, limit_points })
    }

    /// Finite spectrum consisting purely of eigenvalues.
    pub fn finite(eigenvalues: Vec<f64>) -> Result<Self> {
        let sup = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bound = if sup > 0.0 { sup } else { 1.0 };
        SpectrumSpec::new(bound, Vec::new(), eigenvalues, None, Vec::new())
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn sequence(&self) -> Option<&EigenSequence> {
        self.sequence.as_ref()
    }

    pub fn limit_points(&self) -> &[f64] {
        &self.limit_points
    }

    /// All point-spectrum values: explicit eigenvalues plus sequence values.
    pub fn point_spectrum_values(&self) -> Vec<f64> {
        let mut out = self.eigenvalues.clone();
        if let Some(seq) = &self.sequence {
            out.extend(seq.values());
        }
        out
    }

    /// `sup sigma`, the norm of the base operator.
    pub fn sup_sigma(&self) -> f64 {
        let mut sup = f64::NEG_INFINITY;
        for &(_, hi) in &self.intervals {
            sup = sup.max(hi);
        }
        for &v in self.eigenvalues.iter().chain(&self.limit_points) {
            sup = sup.max(v);
        }
        if let Some(seq) = &self.sequence {
            for v in seq.values() {
                sup = sup.max(v);
            }
        }
        sup
    }

    /// Loads and validates the JSON description. Unknown fields are
    /// rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: SpecFile = serde_json::from_str(text)
            .map_err(|e| Error::SpecFormat(format!("bad JSON: {e}")))?;
        raw.build()
    }

    pub fn from_json_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        SpectrumSpec::from_json_str(&text)
    }
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    bound: f64,
    #[serde(default)]
    intervals: Vec<[f64; 2]>,
    #[serde(default)]
    eigenvalues: Vec<f64>,
    #[serde(default)]
    sequence: Option<SequenceFile>,
    #[serde(default)]
    limit_points: Vec<f64>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceFile {
    preset: String,
    n_max: usize,
}

impl SpecFile {
    fn build(self) -> Result<SpectrumSpec> {
        let sequence = match self.sequence {
            None => None,
            Some(s) => {
                let kind = match s.preset.as_str() {
                    "bergman" => SequenceKind::Bergman,
                    other => {
                        return Err(Error::SpecFormat(format!(
                            "unknown sequence preset '{other}'"
                        )))
                    }
                };
                Some(EigenSequence { kind, n_max: s.n_max })
            }
        };
        SpectrumSpec::new(
            self.bound,
            self.intervals.iter().map(|&[lo, hi]| (lo, hi)).collect(),
            self.eigenvalues,
            sequence,
            self.limit_points,
        )
    }
}

/// Built-in spectra used by the scripted reproductions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpecPreset {
    /// Sequence spectrum `sqrt((n+1)/(n+2))` with limit point 1; the sup is
    /// not an eigenvalue, so the base operator does not attain its norm.
    Bergman { n_max: usize },
    /// Multiplication by the identity function on `[0, d]`: purely
    /// continuous spectrum, no eigenvalues at all.
    MultOp { d: f64 },
    /// Band `[0, t1]` plus the isolated eigenvalue 1 (the collapsed image of
    /// `[t2, 1]`); requires `0 < t1 < t2 < 1`.
    Ex313 { t1: f64, t2: f64 },
}

/// Builds the spectrum description for a preset.
pub fn preset(which: &SpecPreset) -> Result<SpectrumSpec> {
    match *which {
        SpecPreset::Bergman { n_max } => SpectrumSpec::new(
            1.0,
            Vec::new(),
            Vec::new(),
            Some(EigenSequence { kind: SequenceKind::Bergman, n_max }),
            vec![1.0],
        ),
        SpecPreset::MultOp { d } => {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::SpecFormat(format!(
                    "multiplication preset needs d > 0, got {d}"
                )));
            }
            SpectrumSpec::new(d, vec![(0.0, d)], Vec::new(), None, Vec::new())
        }
        SpecPreset::Ex313 { t1, t2 } => {
            if !(t1.is_finite() && t2.is_finite() && 0.0 < t1 && t1 < t2 && t2 < 1.0) {
                return Err(Error::SpecFormat(format!(
                    "band-plus-eigenvalue preset needs 0 < t1 < t2 < 1, got ({t1}, {t2})"
                )));
            }
            SpectrumSpec::new(1.0, vec![(0.0, t1)], vec![1.0], None, Vec::new())
        }
    }
}

/// Whether the base operator attains its norm: `sup sigma` lies in the point
/// spectrum, within `SUP_MEMBER_TOL * max(1, bound)`.
pub fn attains_base(spec: &SpectrumSpec) -> bool {
    let sup = spec.sup_sigma();
    let tol = SUP_MEMBER_TOL * spec.bound.max(1.0);
    spec.point_spectrum_values().iter().any(|&v| (v - sup).abs() <= tol)
}

/// The maximizer set of the norm curve over the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaSet {
    /// Cluster representatives, ascending; each attains the block norm up to
    /// the relative tolerance.
    pub points: Vec<f64>,
    pub is_singleton: bool,
    /// Relative tolerance used for membership.
    pub tol: f64,
}

/// How a verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VerdictCertificate {
    /// A maximizer which is also an eigenvalue; the block operator attains
    /// its norm on the corresponding eigenvector.
    Lemma36Witness(f64),
    /// A single maximizer separated from the point spectrum.
    Lemma35Singleton,
    /// Monotone norm curve: attainment transfers from the base operator.
    Thm38Monotone,
    /// Several maximizer clusters; no attainment rule applies.
    OmegaNotSingleton,
}

impl std::fmt::Display for VerdictCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictCertificate::Lemma36Witness(t0) => {
                write!(f, "LEMMA_36_WITNESS(t0={t0:.16e})")
            }
            VerdictCertificate::Lemma35Singleton => f.write_str("LEMMA_35_SINGLETON"),
            VerdictCertificate::Thm38Monotone => f.write_str("THM_38_MONOTONE"),
            VerdictCertificate::OmegaNotSingleton => f.write_str("OMEGA_NOT_SINGLETON"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttainmentStatus {
    Attains,
    NotAttains,
    Unknown,
}

impl std::fmt::Display for AttainmentStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AttainmentStatus::Attains => "ATTAINS",
            AttainmentStatus::NotAttains => "NOT_ATTAINS",
            AttainmentStatus::Unknown => "UNKNOWN",
        })
    }
}

/// Attainment decision with its justification; `numeric` marks verdicts that
/// rest on the maximizer-location tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttainmentVerdict {
    pub status: AttainmentStatus,
    pub certificate: VerdictCertificate,
    pub numeric: bool,
}

impl std::fmt::Display for AttainmentVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} via {} ({})",
            self.status,
            self.certificate,
            if self.numeric { "numeric" } else { "symbolic" }
        )
    }
}

/// Verifies the standing hypothesis on the gain: `phi(t) >= phi(0) >= 0`
/// sampled on a uniform grid over `[0, bound]`.
pub(crate) fn check_phi_hypothesis(phi: &PhiFunction, bound: f64) -> Result<()> {
    let phi0 = phi.eval(0.0)?;
    if phi0 < 0.0 {
        return Err(Error::Precondition(format!(
            "gain must satisfy phi(0) >= 0, got {phi0:e}"
        )));
    }
    let step = bound / (HYPOTHESIS_GRID - 1) as f64;
    for i in 1..HYPOTHESIS_GRID {
        let t = if i + 1 == HYPOTHESIS_GRID { bound } else { i as f64 * step };
        let v = phi.eval(t)?;
        if v < phi0 {
            return Err(Error::Precondition(format!(
                "gain dips below phi(0) = {phi0:e}: phi({t}) = {v:e}"
            )));
        }
    }
    Ok(())
}

/// Maximizer candidates `(t, f(t))` over the whole spectrum: golden-refined
/// champions and endpoints for each interval, direct evaluations for
/// eigenvalues, sequence values, and limit points.
fn maximizer_candidates(
    spec: &SpectrumSpec,
    p: &ParamSet,
    phi: &PhiFunction,
) -> Result<Vec<(f64, f64)>> {
    check_phi_hypothesis(phi, spec.bound)?;
    eval_f(p, phi, 0.0)?; // surface parameter problems eagerly
    let curve = |t: f64| {
        eval_f(p, phi, t).expect("gain validated on [0, bound] by the hypothesis check")
    };
    let mut out = Vec::new();
    for &(lo, hi) in &spec.intervals {
        if hi > lo {
            let bracket = Bracket::new(lo, hi)?;
            out.extend(maximize_candidates_on_interval(curve, &bracket, INTERVAL_GRID)?);
        } else {
            out.push((lo, curve(lo)));
        }
    }
    for &v in spec.eigenvalues.iter().chain(&spec.limit_points) {
        out.push((v, eval_f(p, phi, v)?));
    }
    if let Some(seq) = &spec.sequence {
        for v in seq.values() {
            out.push((v, eval_f(p, phi, v)?));
        }
    }
    if out.is_empty() {
        return Err(Error::InternalConsistency("no maximizer candidates".into()));
    }
    Ok(out)
}

/// Norm of the block operator: the maximum of the norm curve over the
/// spectrum.
pub fn block_norm(spec: &SpectrumSpec, p: &ParamSet, phi: &PhiFunction) -> Result<f64> {
    let cands = maximizer_candidates(spec, p, phi)?;
    Ok(cands.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max))
}

/// Locates the maximizer set: candidates within `tol` (relative) of the
/// block norm, clustered with radius `CLUSTER_RADIUS_REL * max(1, bound)`;
/// each cluster is represented by its best point.
pub fn compute_omega(
    spec: &SpectrumSpec,
    p: &ParamSet,
    phi: &PhiFunction,
    tol: f64,
) -> Result<OmegaSet> {
    if !tol.is_finite() || tol < 0.0 || tol >= 1.0 {
        return Err(Error::InvalidInput(format!(
            "omega tolerance must lie in [0, 1), got {tol}"
        )));
    }
    let cands = maximizer_candidates(spec, p, phi)?;
    let t_norm = cands.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
    let threshold = t_norm * (1.0 - tol);
    let mut qualifying: Vec<(f64, f64)> =
        cands.into_iter().filter(|&(_, v)| v >= threshold).collect();
    qualifying.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let radius = CLUSTER_RADIUS_REL * spec.bound.max(1.0);
    let mut points = Vec::new();
    let mut cluster_best: Option<(f64, f64)> = None;
    let mut cluster_end = f64::NEG_INFINITY;
    for (t, v) in qualifying {
        match cluster_best {
            Some((bt, bv)) if t - cluster_end <= radius => {
                if v > bv || (v == bv && t < bt) {
                    cluster_best = Some((t, v));
                }
                cluster_end = t;
            }
            Some((bt, _)) => {
                points.push(bt);
                cluster_best = Some((t, v));
                cluster_end = t;
            }
            None => {
                cluster_best = Some((t, v));
                cluster_end = t;
            }
        }
    }
    if let Some((bt, _)) = cluster_best {
        points.push(bt);
    }
    Ok(OmegaSet { is_singleton: points.len() == 1, points, tol })
}

/// Full decision ladder.
///
/// 1. A symbolic monotonicity certificate (gain certified, or the parameter
///    sign condition with a strictly increasing gain) transfers the question
///    to the base operator.
/// 2. Otherwise the maximizer set is intersected with the point spectrum: a
///    hit is attainment with a concrete witness; a singleton maximizer
///    cleanly separated from the point spectrum rules attainment out; a
///    near-miss or a non-singleton maximizer set stays unknown.
pub fn decide_attainment(
    spec: &SpectrumSpec,
    p: &ParamSet,
    phi: &PhiFunction,
) -> Result<AttainmentVerdict> {
    check_phi_hypothesis(phi, spec.bound)?;
    if monotone_certified(p, phi, spec.bound) {
        let status = if attains_base(spec) {
            AttainmentStatus::Attains
        } else {
            AttainmentStatus::NotAttains
        };
        return Ok(AttainmentVerdict {
            status,
            certificate: VerdictCertificate::Thm38Monotone,
            numeric: false,
        });
    }
    decide_attainment_numeric(spec, p, phi)
}

/// Whether a symbolic certificate guarantees a strictly increasing norm
/// curve on `[0, bound]` for these parameters. Grid-scoped (numeric-only)
/// certificates do not count.
fn monotone_certified(p: &ParamSet, phi: &PhiFunction, bound: f64) -> bool {
    let bracket = match Bracket::new(0.0, bound) {
        Ok(b) => b,
        Err(_) => return false,
    };
    if let Ok(cert) = check_condition_b(phi, &bracket, HYPOTHESIS_GRID) {
        if cert.status == CertStatus::CertifiedMonotone
            && cert.justification != Justification::NumericOnly
        {
            return true;
        }
    }
    param_certificate(p)
        && matches!(phi_strictly_increasing(phi, &bracket, HYPOTHESIS_GRID), Ok(true))
}

/// The maximizer-set arm of the ladder, usable directly when the monotone
/// shortcut is not wanted.
pub fn decide_attainment_numeric(
    spec: &SpectrumSpec,
    p: &ParamSet,
    phi: &PhiFunction,
) -> Result<AttainmentVerdict> {
    let omega = compute_omega(spec, p, phi, OMEGA_REL_TOL)?;
    let radius = CLUSTER_RADIUS_REL * spec.bound.max(1.0);
    let sigma_p = spec.point_spectrum_values();
    let mut hit: Option<(f64, f64)> = None; // (distance, eigenvalue)
    let mut near_miss = false;
    for &w in &omega.points {
        for &s in &sigma_p {
            let d = (w - s).abs();
            if d <= radius {
                if hit.map_or(true, |(hd, _)| d < hd) {
                    hit = Some((d, s));
                }
            } else if d <= NEAR_MISS_FACTOR * radius {
                near_miss = true;
            }
        }
    }
    let verdict = match hit {
        Some((_, s)) => AttainmentVerdict {
            status: AttainmentStatus::Attains,
            certificate: VerdictCertificate::Lemma36Witness(s),
            numeric: true,
        },
        None if near_miss => AttainmentVerdict {
            status: AttainmentStatus::Unknown,
            certificate: if omega.is_singleton {
                VerdictCertificate::Lemma35Singleton
            } else {
                VerdictCertificate::OmegaNotSingleton
            },
            numeric: true,
        },
        None if omega.is_singleton => AttainmentVerdict {
            status: AttainmentStatus::NotAttains,
            certificate: VerdictCertificate::Lemma35Singleton,
            numeric: true,
        },
        None => AttainmentVerdict {
            status: AttainmentStatus::Unknown,
            certificate: VerdictCertificate::OmegaNotSingleton,
            numeric: true,
        },
    };
    Ok(verdict)
}
