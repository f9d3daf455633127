//! Norm curves, monotonicity certificates, and norm-attainment analysis for
//! the two-parameter operator matrix family
//!
//! ```text
//! M_t = [[a, t], [c t, b phi(t)]],       t >= 0,
//! ```
//!
//! and for the block operator it models,
//!
//! ```text
//! T = [[a I, A], [c A*, b phi(|A|)]].
//! ```
//!
//! The crate answers three questions about a gain `phi` and parameters
//! `(a, b, c)`:
//!
//! * Is `t -> |M_t|` strictly increasing — certifiably, for every choice of
//!   parameters? ([`phicrit`])
//! * If not, what does a concrete non-monotone instance look like, with a
//!   verified decrease? ([`counterex`])
//! * Does `T` attain its norm, given the spectrum of the base operator's
//!   modulus? ([`specop`])
//!
//! Closed forms live in [`curves`]; every one of them is cross-checked
//! against dense-matrix brute force in [`oracle`].

#![forbid(unsafe_code)]

pub mod counterex;
pub mod curves;
pub mod error;
pub mod numkit;
pub mod oracle;
pub mod phicrit;
pub mod specop;

pub use counterex::{construct, reproduce_example24, CounterexampleResult, Ex24Report, WITNESS_GAP_MIN};
pub use curves::{
    check_monotone_grid, classify_ns, eval_f, eval_ns_norm, eval_phi_det, make_mt,
    norm_block_constant, sample_curve, write_curve_csv, CurveSample, MonotoneReport,
    MonotoneVerdict, NsCase, NsParams, ParamSet, TIE_TOL,
};
pub use error::{Error, Result};
pub use numkit::{herm_max_eig, norm_mat2, Bracket, Complex, HermMatrix, Mat2};
pub use oracle::{
    build_block_operator, companion_norms, compare_block_norm, constant_gain_comparison,
    matrix_norm, run_battery, BatteryConfig, BatteryReport, ConstantGainReport, DenseMatrix,
    BATTERY_TOL,
};
pub use phicrit::{
    check_condition_a, check_condition_b, param_certificate, phi_strictly_increasing,
    standard_battery, CertStatus, Certificate, Justification, PhiFunction, COND_A_SLACK_REL,
    COND_B_NUMERIC_SLACK, FD_STEP_REL, STRICT_RISE_REL,
};
pub use specop::{
    attains_base, block_norm, compute_omega, decide_attainment, decide_attainment_numeric,
    preset, AttainmentStatus, AttainmentVerdict, EigenSequence, OmegaSet, SequenceKind,
    SpecPreset, SpectrumSpec, VerdictCertificate, CLUSTER_RADIUS_REL, NEAR_MISS_FACTOR,
    OMEGA_REL_TOL, SUP_MEMBER_TOL,
};

/// Formats a complex value at full round-trip precision: bare real part when
/// the imaginary part is exactly zero, otherwise `re{+/-}im i`.
pub fn format_complex_17(z: &Complex) -> String {
    if z.im == 0.0 {
        format!("{:.16e}", z.re)
    } else {
        format!("{:.16e}{:+.16e}i", z.re, z.im)
    }
}
