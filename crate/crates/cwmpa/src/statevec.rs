//! Dense complex state vectors for small path ⊗ polarization systems.
//!
//! The path degree of freedom (the "system") has dimension `d`, the
//! polarization pointer is the two-level `{H, V}` space. A [`CompositeState`]
//! stores the full d×2 amplitude table exactly; post-selection and branch
//! merges operate on raw amplitudes so that no first-order approximation ever
//! enters this layer.
//!
//! Squared norms and inner products accumulate with Neumaier-compensated
//! summation so the 1e-13 level invariants hold up to dimensions of a few
//! hundred.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Tolerance for normalization checks on states, kets, and mixing pairs.
pub const NORM_TOL: f64 = 1e-12;

/// Relative amplitude threshold below which a pointer component counts as
/// lost. Below this the relative phase is numerically meaningless and the
/// configuration is in the forbidden delta → 0 regime.
pub const PHASE_AMP_REL_THRESHOLD: f64 = 1e-12;

/// Polarization basis label, ordered {H, V}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    #[inline]
    fn idx(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

/// Compensated (Kahan/Neumaier) accumulator for the norm and inner-product
/// sums.
#[derive(Debug, Default, Clone, Copy)]
struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

fn all_finite(amps: &[Complex64]) -> bool {
    amps.iter().all(|a| a.re.is_finite() && a.im.is_finite())
}

/// Reduce an angle to the principal branch (−π, π].
fn principal(mut angle: f64) -> f64 {
    if angle > PI {
        angle -= 2.0 * PI;
    } else if angle <= -PI {
        angle += 2.0 * PI;
    }
    angle
}

/// Two-level polarization pointer.
///
/// Unnormalized pointers are first-class: post-selection returns the raw
/// surviving amplitudes, whose squared norm is the success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    amp_h: Complex64,
    amp_v: Complex64,
    normalized: bool,
}

impl PointerState {
    /// A pointer that must already be unit-norm (within [`NORM_TOL`]).
    pub fn new_normalized(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        let p = Self::unnormalized(amp_h, amp_v)?;
        let n2 = p.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization {
                context: "pointer state",
                norm_sqr: n2,
            });
        }
        Ok(PointerState {
            normalized: true,
            ..p
        })
    }

    /// A pointer carrying its raw post-selection weight.
    pub fn unnormalized(amp_h: Complex64, amp_v: Complex64) -> Result<Self> {
        if !all_finite(&[amp_h, amp_v]) {
            return Err(Error::Domain(
                "pointer amplitudes must be finite".to_string(),
            ));
        }
        Ok(PointerState {
            amp_h,
            amp_v,
            normalized: false,
        })
    }

    /// The diagonal state (|H⟩ + |V⟩)/√2.
    pub fn plus() -> Self {
        PointerState {
            amp_h: Complex64::new(FRAC_1_SQRT_2, 0.0),
            amp_v: Complex64::new(FRAC_1_SQRT_2, 0.0),
            normalized: true,
        }
    }

    pub fn amp_h(&self) -> Complex64 {
        self.amp_h
    }

    pub fn amp_v(&self) -> Complex64 {
        self.amp_v
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// |amp_h|² + |amp_v|², compensated.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        acc.add(self.amp_h.re * self.amp_h.re);
        acc.add(self.amp_h.im * self.amp_h.im);
        acc.add(self.amp_v.re * self.amp_v.re);
        acc.add(self.amp_v.im * self.amp_v.im);
        acc.value()
    }

    /// Rescale to unit norm, keeping the phase information intact.
    pub fn normalize(&self) -> Result<PointerState> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::PhaseLost);
        }
        let s = 1.0 / n2.sqrt();
        Ok(PointerState {
            amp_h: self.amp_h * s,
            amp_v: self.amp_v * s,
            normalized: true,
        })
    }

    /// Expectation of the circular-basis observable |R⟩⟨R| − |L⟩⟨L| of the
    /// normalized pointer, with |R⟩ = (|H⟩ + i|V⟩)/√2 and
    /// |L⟩ = (|H⟩ − i|V⟩)/√2.
    ///
    /// Equals `2·Im(conj(amp_h)·amp_v) / (|amp_h|² + |amp_v|²)`, which is
    /// `sin γ` on the equatorial state (|H⟩ + e^{iγ}|V⟩)/√2. The result is
    /// clamped to [−1, 1] to absorb rounding at the poles.
    pub fn sigma_r_expectation(&self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::PhaseLost);
        }
        let im = self.amp_h.re * self.amp_v.im - self.amp_h.im * self.amp_v.re;
        Ok((2.0 * im / n2).clamp(-1.0, 1.0))
    }

    /// Relative H → V phase, `arg(amp_v) − arg(amp_h)`, reduced to (−π, π].
    ///
    /// Invariant under global phases and positive rescaling. Fails with
    /// [`Error::PhaseLost`] when either amplitude is below
    /// [`PHASE_AMP_REL_THRESHOLD`] relative to the pointer norm: with one
    /// component gone the signal is a global phase and cannot be recovered.
    pub fn extract_phase(&self) -> Result<f64> {
        let norm = self.norm_sqr().sqrt();
        let floor = PHASE_AMP_REL_THRESHOLD * norm;
        if norm == 0.0 || self.amp_h.norm() <= floor || self.amp_v.norm() <= floor {
            return Err(Error::PhaseLost);
        }
        Ok(principal(self.amp_v.arg() - self.amp_h.arg()))
    }
}

/// Path-space ket of dimension d ≥ 2.
///
/// Coefficients are stored as complex numbers; the constructors mirroring the
/// physical setups accept real coefficients only.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemKet {
    amps: Vec<Complex64>,
}

impl SystemKet {
    /// Build from real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::from_complex(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Build from complex amplitudes.
    pub fn from_complex(amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::Dimension(format!(
                "system ket needs dim >= 2, got {}",
                amps.len()
            )));
        }
        if !all_finite(&amps) {
            return Err(Error::Domain("ket amplitudes must be finite".to_string()));
        }
        if amps.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
            return Err(Error::Normalization {
                context: "system ket",
                norm_sqr: 0.0,
            });
        }
        Ok(SystemKet { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, path: usize) -> Complex64 {
        self.amps[path]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for a in &self.amps {
            acc.add(a.re * a.re);
            acc.add(a.im * a.im);
        }
        acc.value()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }
}

/// Exact d×2 amplitude table over path ⊗ polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeState {
    amps: Vec<[Complex64; 2]>,
}

impl CompositeState {
    /// Build directly from an amplitude table. The total squared norm must
    /// lie in (0, 1 + [`NORM_TOL`]].
    pub fn from_amps(amps: Vec<[Complex64; 2]>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension(
                "composite state needs at least one path branch".to_string(),
            ));
        }
        for row in &amps {
            if !all_finite(row) {
                return Err(Error::Domain(
                    "composite amplitudes must be finite".to_string(),
                ));
            }
        }
        let state = CompositeState { amps };
        let n2 = state.norm_sqr();
        if n2 <= 0.0 || n2 > 1.0 + NORM_TOL {
            return Err(Error::Normalization {
                context: "composite state",
                norm_sqr: n2,
            });
        }
        Ok(state)
    }

    /// Product state `system ⊗ pointer`; both inputs must be unit-norm.
    pub fn tensor(system: &SystemKet, pointer: &PointerState) -> Result<CompositeState> {
        if !system.is_normalized() {
            return Err(Error::Normalization {
                context: "system ket",
                norm_sqr: system.norm_sqr(),
            });
        }
        let pn2 = pointer.norm_sqr();
        if (pn2 - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization {
                context: "pointer state",
                norm_sqr: pn2,
            });
        }
        let amps = system
            .amps
            .iter()
            .map(|&s| [s * pointer.amp_h, s * pointer.amp_v])
            .collect();
        Ok(CompositeState { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, path: usize, pol: Pol) -> Complex64 {
        self.amps[path][pol.idx()]
    }

    /// The (unnormalized) pointer carried by one path branch.
    pub fn branch_pointer(&self, path: usize) -> Result<PointerState> {
        if path >= self.dim() {
            return Err(Error::Dimension(format!(
                "branch {path} out of range for dim {}",
                self.dim()
            )));
        }
        PointerState::unnormalized(self.amps[path][0], self.amps[path][1])
    }

    /// Total squared norm, compensated.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = NeumaierSum::default();
        for row in &self.amps {
            for a in row {
                acc.add(a.re * a.re);
                acc.add(a.im * a.im);
            }
        }
        acc.value()
    }

    /// Control-phase unitary: multiply the V amplitude of `target_path` by
    /// e^{iθ}, leaving everything else untouched. Norm-preserving.
    pub fn apply_control_phase(&self, target_path: usize, theta: f64) -> Result<CompositeState> {
        if target_path >= self.dim() {
            return Err(Error::Dimension(format!(
                "control-phase target {target_path} out of range for dim {}",
                self.dim()
            )));
        }
        if !theta.is_finite() {
            return Err(Error::Domain("theta must be finite".to_string()));
        }
        let mut amps = self.amps.clone();
        amps[target_path][1] *= Complex64::new(theta.cos(), theta.sin());
        Ok(CompositeState { amps })
    }

    /// Full post-selection onto `ket`: returns the surviving pointer
    /// `amp_q = Σ_p conj(ket_p)·amps[p][q]` (unnormalized) together with the
    /// success probability `|amp_H|² + |amp_V|²`.
    pub fn post_select_full(&self, ket: &SystemKet) -> Result<(PointerState, f64)> {
        if ket.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "post-selection ket dim {} != state dim {}",
                ket.dim(),
                self.dim()
            )));
        }
        if !ket.is_normalized() {
            return Err(Error::Normalization {
                context: "post-selection ket",
                norm_sqr: ket.norm_sqr(),
            });
        }
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for (q, slot) in out.iter_mut().enumerate() {
            let mut re = NeumaierSum::default();
            let mut im = NeumaierSum::default();
            for (p, row) in self.amps.iter().enumerate() {
                let term = ket.amps[p].conj() * row[q];
                re.add(term.re);
                im.add(term.im);
            }
            *slot = Complex64::new(re.value(), im.value());
        }
        let pointer = PointerState::unnormalized(out[0], out[1])?;
        let prob = pointer.norm_sqr().min(1.0);
        Ok((pointer, prob))
    }

    /// Partial post-selection in the {i, j} subspace: branches i and j are
    /// replaced by the single branch |μ⟩ = d|i⟩ + f|j⟩ carrying the pointer
    /// amplitude `d·amps[i] + f·amps[j]`; all other branches pass through.
    ///
    /// The merged branch takes the position `min(i, j)` and the output
    /// dimension drops by one. The output squared norm is the success
    /// probability of the projection and never exceeds the input norm.
    pub fn merge_branches(&self, i: usize, j: usize, mix: (f64, f64)) -> Result<CompositeState> {
        if i == j {
            return Err(Error::Dimension(format!("merge_branches needs i != j, got {i}")));
        }
        if i >= self.dim() || j >= self.dim() {
            return Err(Error::Dimension(format!(
                "merge indices ({i}, {j}) out of range for dim {}",
                self.dim()
            )));
        }
        let (d, f) = mix;
        if !d.is_finite() || !f.is_finite() {
            return Err(Error::Domain("mix coefficients must be finite".to_string()));
        }
        let mix_norm = d * d + f * f;
        if (mix_norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Normalization {
                context: "mixing coefficients",
                norm_sqr: mix_norm,
            });
        }
        let merged = [
            self.amps[i][0] * d + self.amps[j][0] * f,
            self.amps[i][1] * d + self.amps[j][1] * f,
        ];
        let lo = i.min(j);
        let hi = i.max(j);
        let mut amps = Vec::with_capacity(self.dim() - 1);
        for (p, row) in self.amps.iter().enumerate() {
            if p == lo {
                amps.push(merged);
            } else if p != hi {
                amps.push(*row);
            }
        }
        let out = CompositeState { amps };
        if out.norm_sqr() == 0.0 {
            return Err(Error::forbidden("merge: projection annihilated the state"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn tensor_balanced_gives_quarter_amplitudes() {
        let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        for p in 0..2 {
            for pol in [Pol::H, Pol::V] {
                close(state.amp(p, pol).re, 0.5, 1e-15);
                close(state.amp(p, pol).im, 0.0, 0.0);
            }
        }
        close(state.norm_sqr(), 1.0, 1e-14);
    }

    #[test]
    fn tensor_basis_kets() {
        let sys = SystemKet::from_real(&[1.0, 0.0]).unwrap();
        let ptr = PointerState::new_normalized(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let state = CompositeState::tensor(&sys, &ptr).unwrap();
        assert_eq!(state.amp(0, Pol::H), c(1.0, 0.0));
        assert_eq!(state.amp(0, Pol::V), c(0.0, 0.0));
        assert_eq!(state.amp(1, Pol::H), c(0.0, 0.0));
        assert_eq!(state.amp(1, Pol::V), c(0.0, 0.0));
    }

    #[test]
    fn tensor_three_path_plus_pointer() {
        let coeffs = [0.6, 0.48, 0.64];
        let sys = SystemKet::from_real(&coeffs).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        for (p, &cf) in coeffs.iter().enumerate() {
            close(state.amp(p, Pol::H).re, cf * FRAC_1_SQRT_2, 1e-15);
            close(state.amp(p, Pol::V).re, cf * FRAC_1_SQRT_2, 1e-15);
        }
    }

    #[test]
    fn tensor_rejects_unnormalized_input() {
        let sys = SystemKet::from_real(&[1.0, 1.0]).unwrap();
        let err = CompositeState::tensor(&sys, &PointerState::plus()).unwrap_err();
        assert!(matches!(err, Error::Normalization { .. }));
    }

    #[test]
    fn control_phase_identity_at_zero() {
        let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let rotated = state.apply_control_phase(1, 0.0).unwrap();
        assert_eq!(state, rotated);
    }

    #[test]
    fn control_phase_rotates_target_v_only() {
        let theta = 0.37;
        let sys = SystemKet::from_real(&[0.0, 1.0]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let rotated = state.apply_control_phase(1, theta).unwrap();
        close(rotated.amp(1, Pol::H).re, FRAC_1_SQRT_2, 1e-15);
        close(rotated.amp(1, Pol::V).re, FRAC_1_SQRT_2 * theta.cos(), 1e-15);
        close(rotated.amp(1, Pol::V).im, FRAC_1_SQRT_2 * theta.sin(), 1e-15);
    }

    #[test]
    fn control_phase_preserves_norm() {
        let amps = vec![
            [c(0.31, -0.2), c(0.11, 0.4)],
            [c(-0.25, 0.33), c(0.52, 0.17)],
        ];
        let state = CompositeState::from_amps(amps).unwrap();
        let before = state.norm_sqr();
        let after = state.apply_control_phase(0, 0.3).unwrap().norm_sqr();
        close(before, after, 1e-14);
    }

    #[test]
    fn control_phase_index_out_of_range() {
        let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        assert!(matches!(
            state.apply_control_phase(2, 0.1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn post_select_prob_is_sin_sq_delta_at_zero_theta() {
        // Post-selecting the theta = 0 balanced state at chi = -(pi/4 + delta)
        // succeeds with probability sin^2(delta).
        for delta in [1e-3, 1e-2, 0.3] {
            let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
            let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
            let cos_chi = (delta.cos() - delta.sin()) * FRAC_1_SQRT_2;
            let sin_chi = -(delta.cos() + delta.sin()) * FRAC_1_SQRT_2;
            let ket = SystemKet::from_real(&[cos_chi, sin_chi]).unwrap();
            let (_, prob) = state.post_select_full(&ket).unwrap();
            close(prob, delta.sin().powi(2), 1e-13);
        }
    }

    #[test]
    fn post_select_onto_support_is_certain() {
        let sys = SystemKet::from_real(&[0.8, 0.6]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let (pointer, prob) = state.post_select_full(&sys).unwrap();
        close(prob, 1.0, 1e-13);
        close(pointer.norm_sqr(), 1.0, 1e-13);
    }

    #[test]
    fn post_select_orthogonal_branch_is_impossible() {
        let sys = SystemKet::from_real(&[1.0, 0.0]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let ortho = SystemKet::from_real(&[0.0, 1.0]).unwrap();
        let (pointer, prob) = state.post_select_full(&ortho).unwrap();
        assert_eq!(prob, 0.0);
        assert_eq!(pointer.amp_h(), c(0.0, 0.0));
        assert_eq!(pointer.amp_v(), c(0.0, 0.0));
    }

    #[test]
    fn post_select_dimension_mismatch() {
        let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let ket = SystemKet::from_real(&[1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            state.post_select_full(&ket),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn merge_matches_structure_and_probability() {
        // d = 3 state with mixing (d, f): merged V amplitude is
        // (b d + c f e^{i theta})/sqrt(2) exactly.
        let (a, b, cc) = (0.48, 0.6, 0.64);
        let theta = 0.21;
        let (d, f) = (0.28, 0.96);
        let sys = SystemKet::from_real(&[a, b, cc]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus())
            .unwrap()
            .apply_control_phase(2, theta)
            .unwrap();
        let merged = state.merge_branches(1, 2, (d, f)).unwrap();
        assert_eq!(merged.dim(), 2);
        let q = b * d + cc * f;
        close(merged.amp(1, Pol::H).re, q * FRAC_1_SQRT_2, 1e-15);
        let expect_v = Complex64::new(b * d, 0.0)
            + Complex64::new(cc * f, 0.0) * Complex64::new(theta.cos(), theta.sin());
        close(merged.amp(1, Pol::V).re, expect_v.re * FRAC_1_SQRT_2, 1e-15);
        close(merged.amp(1, Pol::V).im, expect_v.im * FRAC_1_SQRT_2, 1e-15);
        // untouched branch
        close(merged.amp(0, Pol::H).re, a * FRAC_1_SQRT_2, 1e-15);
        // success probability = a^2 + |bd + cf e^{i theta}|^2
        let expect_prob = a * a + expect_v.norm_sqr();
        close(merged.norm_sqr(), expect_prob, 1e-14);
        assert!(merged.norm_sqr() <= state.norm_sqr() + 1e-14);
    }

    #[test]
    fn merge_with_unit_mix_deletes_other_branch() {
        let sys = SystemKet::from_real(&[0.6, 0.48, 0.64]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let merged = state.merge_branches(1, 2, (1.0, 0.0)).unwrap();
        close(merged.amp(1, Pol::H).re, 0.48 * FRAC_1_SQRT_2, 1e-15);
        close(merged.amp(0, Pol::H).re, 0.6 * FRAC_1_SQRT_2, 1e-15);
    }

    #[test]
    fn merge_keeps_plus_pointer_without_signal() {
        let sys = SystemKet::from_real(&[0.6, 0.48, 0.64]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        let merged = state.merge_branches(1, 2, (0.28, 0.96)).unwrap();
        let ptr = merged.branch_pointer(1).unwrap();
        close(ptr.extract_phase().unwrap(), 0.0, 0.0);
    }

    #[test]
    fn merge_rejects_bad_arguments() {
        let sys = SystemKet::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus()).unwrap();
        assert!(matches!(
            state.merge_branches(1, 1, (1.0, 0.0)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            state.merge_branches(0, 1, (0.9, 0.9)),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn sigma_r_is_sin_gamma_on_equator() {
        for k in -8..=8 {
            let gamma = k as f64 * PI / 8.5;
            let ptr = PointerState::new_normalized(
                c(FRAC_1_SQRT_2, 0.0),
                Complex64::from_polar(FRAC_1_SQRT_2, gamma),
            )
            .unwrap();
            close(ptr.sigma_r_expectation().unwrap(), gamma.sin(), 1e-13);
        }
    }

    #[test]
    fn sigma_r_vanishes_on_h() {
        let ptr = PointerState::new_normalized(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(ptr.sigma_r_expectation().unwrap(), 0.0);
    }

    #[test]
    fn sigma_r_zero_norm_is_phase_lost() {
        let ptr = PointerState::unnormalized(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(matches!(ptr.sigma_r_expectation(), Err(Error::PhaseLost)));
    }

    #[test]
    fn extract_phase_by_construction() {
        let ptr = PointerState::new_normalized(
            c(FRAC_1_SQRT_2, 0.0),
            Complex64::from_polar(FRAC_1_SQRT_2, 0.3),
        )
        .unwrap();
        close(ptr.extract_phase().unwrap(), 0.3, 1e-15);
    }

    #[test]
    fn extract_phase_global_phase_invariant() {
        let ptr = PointerState::new_normalized(
            Complex64::from_polar(FRAC_1_SQRT_2, 1.1),
            Complex64::from_polar(FRAC_1_SQRT_2, 1.4),
        )
        .unwrap();
        close(ptr.extract_phase().unwrap(), 0.3, 1e-12);
    }

    #[test]
    fn extract_phase_single_component_is_lost() {
        let ptr = PointerState::new_normalized(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(matches!(ptr.extract_phase(), Err(Error::PhaseLost)));
    }

    #[test]
    fn merge_then_post_select_equals_one_shot() {
        // Projecting within {1, 2} and then post-selecting the reduced state
        // equals post-selecting the lifted 3-dimensional ket directly.
        let sys = SystemKet::from_real(&[0.48, 0.6, 0.64]).unwrap();
        let state = CompositeState::tensor(&sys, &PointerState::plus())
            .unwrap()
            .apply_control_phase(2, 1e-3)
            .unwrap();
        let (d, f) = (0.6, 0.8);
        let (m, n) = (0.28, 0.96);
        let merged = state.merge_branches(1, 2, (d, f)).unwrap();
        let reduced_ket = SystemKet::from_real(&[m, n]).unwrap();
        let (p_two, prob_two) = merged.post_select_full(&reduced_ket).unwrap();
        let lifted = SystemKet::from_real(&[m, n * d, n * f]).unwrap();
        let (p_one, prob_one) = state.post_select_full(&lifted).unwrap();
        close(p_two.amp_h().re, p_one.amp_h().re, 1e-13);
        close(p_two.amp_v().re, p_one.amp_v().re, 1e-13);
        close(p_two.amp_v().im, p_one.amp_v().im, 1e-13);
        close(prob_two, prob_one, 1e-13);
    }

    #[test]
    fn composite_rejects_nonpositive_norm() {
        assert!(matches!(
            CompositeState::from_amps(vec![[c(0.0, 0.0), c(0.0, 0.0)]]),
            Err(Error::Normalization { .. })
        ));
        assert!(matches!(
            CompositeState::from_amps(vec![[c(1.0, 0.0), c(1.0, 0.0)]]),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn system_ket_needs_two_dims_and_support() {
        assert!(matches!(
            SystemKet::from_real(&[1.0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            SystemKet::from_real(&[0.0, 0.0]),
            Err(Error::Normalization { .. })
        ));
    }
}
