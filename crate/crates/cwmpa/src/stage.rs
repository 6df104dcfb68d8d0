//! Single amplification stage.
//!
//! One stage prepares `(|0⟩ + |1⟩)/√2 ⊗ |+⟩`, applies the control phase
//! `theta` on path 1, and post-selects the path state
//! `cos χ|0⟩ + sin χ|1⟩`. Near `χ = −(π/4 + δ)` the surviving pointer's
//! relative phase is amplified to `γ ≈ arctan(θ/(1 + cot χ))` at the cost of
//! success probability `sin²δ`.
//!
//! The exact pipeline runs entirely on amplitudes from [`crate::statevec`].
//! The first-order closed forms and the readout error model live here as
//! plain functions so they can be compared against the exact values.
//!
//! Number handling is tuned for the regime the stage targets, where both
//! `theta` and `delta` are small: `cos χ + sin χ` is evaluated as
//! `−√2 sin δ` (an exact identity) and `1 − cos θ` as `2 sin²(θ/2)`; the
//! naive forms lose all significant digits exactly where the amplification
//! is interesting.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::statevec::{CompositeState, PointerState, SystemKet};

/// Largest admissible |delta| for the delta parametrization.
pub const DELTA_LIMIT: f64 = FRAC_PI_4;

/// How the post-selection angle is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PostSelection {
    /// Raw post-selection angle χ.
    Chi(f64),
    /// Deviation δ from the forbidden point, with χ = −(π/4 + δ).
    Delta(f64),
}

/// Parameters for one amplification stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSpec {
    theta: f64,
    selection: PostSelection,
}

impl StageSpec {
    /// Stage with post-selection χ = −(π/4 + δ). `delta = 0` is the
    /// forbidden point and is rejected outright.
    pub fn with_delta(theta: f64, delta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain("theta must be finite".to_string()));
        }
        if delta == 0.0 {
            return Err(Error::forbidden("delta = 0"));
        }
        if !delta.is_finite() || delta.abs() >= DELTA_LIMIT {
            return Err(Error::Domain(format!(
                "delta must satisfy 0 < |delta| < pi/4, got {delta}"
            )));
        }
        Ok(StageSpec {
            theta,
            selection: PostSelection::Delta(delta),
        })
    }

    /// Stage with an explicit post-selection angle χ.
    pub fn with_chi(theta: f64, chi: f64) -> Result<Self> {
        if !theta.is_finite() || !chi.is_finite() {
            return Err(Error::Domain("theta and chi must be finite".to_string()));
        }
        Ok(StageSpec {
            theta,
            selection: PostSelection::Chi(chi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn selection(&self) -> PostSelection {
        self.selection
    }

    /// The post-selection angle χ, resolving the delta form.
    pub fn chi(&self) -> f64 {
        match self.selection {
            PostSelection::Chi(chi) => chi,
            PostSelection::Delta(delta) => -(FRAC_PI_4 + delta),
        }
    }

    /// Deviation of the post-selection from the forbidden orientation,
    /// δ = −(χ + π/4).
    pub fn implied_delta(&self) -> f64 {
        match self.selection {
            PostSelection::Delta(delta) => delta,
            PostSelection::Chi(chi) => -(chi + FRAC_PI_4),
        }
    }

    /// (cos χ, sin χ) in a cancellation-free form. For the delta form these
    /// come from the angle-addition identities so that
    /// cos χ + sin χ = −√2 sin δ holds exactly in the computed values.
    fn post_selection_components(&self) -> (f64, f64) {
        match self.selection {
            PostSelection::Chi(chi) => (chi.cos(), chi.sin()),
            PostSelection::Delta(delta) => {
                let (s, c) = delta.sin_cos();
                ((c - s) * FRAC_1_SQRT_2, -(c + s) * FRAC_1_SQRT_2)
            }
        }
    }

    /// Stable value of 1 + cot χ, the denominator of the first-order phase.
    fn first_order_denominator(&self) -> f64 {
        match self.selection {
            PostSelection::Delta(delta) => {
                let t = delta.tan();
                2.0 * t / (1.0 + t)
            }
            PostSelection::Chi(chi) => SQRT_2 * (chi + FRAC_PI_4).sin() / chi.sin(),
        }
    }
}

/// Exact and first-order outcomes of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    /// Relative phase of the exact post-selected pointer.
    pub gamma_exact: f64,
    /// First-order phase arctan(θ/(1 + cot χ)), continuous through the
    /// orthogonality point.
    pub gamma_first_order: f64,
    /// gamma_exact / theta (1 when theta = 0).
    pub h_exact: f64,
    /// gamma_first_order / theta (1 when theta = 0).
    pub h_first_order: f64,
    /// Exact post-selection success probability.
    pub success_prob: f64,
    /// The surviving pointer, unnormalized.
    pub pointer: PointerState,
}

/// χ = −(π/4 + δ). The forbidden point δ = 0 is rejected.
pub fn chi_from_delta(delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::forbidden("delta = 0"));
    }
    if !delta.is_finite() {
        return Err(Error::Domain("delta must be finite".to_string()));
    }
    Ok(-(FRAC_PI_4 + delta))
}

/// Phase of `ratio + e^{iθ}` on the principal branch:
/// `atan2(sin θ, cos θ + ratio)`.
///
/// `ratio` generalizes cot χ; in the cascades it takes the role of the
/// reference-to-signal amplitude ratio of each post-selection. Note the
/// reference direction here is the positive real axis: for post-selections
/// past orthogonality (ratio < −1) this differs by π from the phase relative
/// to the surviving no-signal amplitude.
pub fn gamma_first_order(theta: f64, ratio: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Domain("theta must be finite".to_string()));
    }
    let y = theta.sin();
    let x = theta.cos() + ratio;
    if y == 0.0 && x == 0.0 {
        return Err(Error::PhaseLost);
    }
    Ok(y.atan2(x))
}

/// Amplification factor `gamma_first_order(θ, cot χ)/θ` for a post-selection
/// at angle χ.
pub fn amp_factor_chi(theta: f64, chi: f64) -> Result<f64> {
    if theta == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    if !chi.is_finite() {
        return Err(Error::Domain("chi must be finite".to_string()));
    }
    let ratio = chi.cos() / chi.sin();
    Ok(gamma_first_order(theta, ratio)? / theta)
}

/// Closed-form amplification factor `arctan(θ/δ)/θ` of the delta
/// parametrization, where δ is the deviation of cot χ from −1.
pub fn amp_factor_delta(theta: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::forbidden("delta = 0"));
    }
    if theta == 0.0 {
        return Err(Error::DegenerateSignal);
    }
    if !theta.is_finite() || !delta.is_finite() {
        return Err(Error::Domain("theta and delta must be finite".to_string()));
    }
    Ok((theta / delta).atan() / theta)
}

/// Run the exact single-stage pipeline.
pub fn run_stage_exact(spec: &StageSpec) -> Result<StageResult> {
    let theta = spec.theta();
    let (cos_chi, sin_chi) = spec.post_selection_components();
    let system = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])?;
    let state = CompositeState::tensor(&system, &PointerState::plus())?
        .apply_control_phase(1, theta)?;
    let post = SystemKet::from_real(&[cos_chi, sin_chi])?;
    let (pointer, success_prob) = state.post_select_full(&post)?;
    let gamma_exact = pointer.extract_phase()?;
    // arctan is odd and continuous through the orthogonality point, so this
    // matches the pipeline branch on both sides of the forbidden delta.
    let gamma_first_order = (theta / spec.first_order_denominator()).atan();
    let (h_exact, h_first_order) = if theta == 0.0 {
        (1.0, 1.0)
    } else {
        (gamma_exact / theta, gamma_first_order / theta)
    };
    Ok(StageResult {
        gamma_exact,
        gamma_first_order,
        h_exact,
        h_first_order,
        success_prob,
        pointer,
    })
}

/// Which denominator the closed-form readout error uses; the two printed
/// variants of the expression differ by a square root and are not
/// reconcilable, so both are available for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenominatorForm {
    /// √((cos χ + sin χ)² − sin 2χ·(1 − cos θ)) — consistent with the
    /// circular-basis readout expression; the primary form.
    SquareRoot,
    /// The same expression without the square root.
    AsPrinted,
}

/// Closed-form error of estimating γ from the circular-basis readout of the
/// exact (unequal-weight) pointer, primary square-root form:
///
/// Δγ = (|cos χ + sin χ| / √((cos χ + sin χ)² − sin 2χ·(1 − cos θ)) − 1)·tan γ
///
/// The leading factor is a modulus ratio, hence the absolute value.
pub fn delta_gamma_exact(theta: f64, chi: f64) -> Result<f64> {
    delta_gamma_form(theta, chi, DenominatorForm::SquareRoot)
}

/// [`delta_gamma_exact`] with an explicit choice of denominator form.
pub fn delta_gamma_form(theta: f64, chi: f64, form: DenominatorForm) -> Result<f64> {
    if !theta.is_finite() || !chi.is_finite() {
        return Err(Error::Domain("theta and chi must be finite".to_string()));
    }
    let c_sum = SQRT_2 * (chi + FRAC_PI_4).sin(); // cos χ + sin χ
    if c_sum == 0.0 {
        return Err(Error::forbidden("chi = -pi/4"));
    }
    let eps_cos = 2.0 * (theta / 2.0).sin().powi(2); // 1 − cos θ
    let b_sqr = c_sum * c_sum - (2.0 * chi).sin() * eps_cos; // |amp_V|² scale
    if b_sqr <= 0.0 {
        return Err(Error::PhaseLost);
    }
    let prefactor = match form {
        DenominatorForm::SquareRoot => c_sum.abs() / b_sqr.sqrt(),
        DenominatorForm::AsPrinted => c_sum.abs() / b_sqr,
    };
    // tan γ = sin θ·sin χ / (sin χ cos θ + cos χ), cancellation-controlled.
    let den = c_sum - chi.sin() * eps_cos;
    if den == 0.0 {
        return Err(Error::Domain(
            "quadrature point: tan gamma is undefined".to_string(),
        ));
    }
    let tan_gamma = theta.sin() * chi.sin() / den;
    Ok((prefactor - 1.0) * tan_gamma)
}

/// Scale bound h̄²|θ|³/4 on |γ_exact − γ_first_order| with h̄ = 1/|δ|.
pub fn delta_gamma_bound(theta: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::forbidden("delta = 0"));
    }
    Ok(theta.abs().powi(3) / (4.0 * delta * delta))
}

/// Circular-basis readout normalized by the vertical amplitude's weight,
/// `Im(conj(amp_h)·amp_v) / |amp_v|²`.
///
/// This is the convention behind the closed-form error model: the readout is
/// calibrated as if the pointer still had the first-order equal-weight form,
/// so the horizontal/vertical modulus mismatch shows up as a phase error.
pub fn sigma_r_equal_weight(pointer: &PointerState) -> Result<f64> {
    let v_sqr = pointer.amp_v().norm_sqr();
    if v_sqr == 0.0 {
        return Err(Error::PhaseLost);
    }
    let h = pointer.amp_h();
    let v = pointer.amp_v();
    Ok((h.re * v.im - h.im * v.re) / v_sqr)
}
