//! Witness and stabilizer Rényi entropy formulas on a Pauli spectrum.
//!
//! Everything is in nats. `0·ln 0` is taken to be `0`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{MagicError, Result};
use crate::pauli::PauliSpectrum;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.5) || !alpha.is_finite() {
        return Err(MagicError::domain(format!("Rényi index {alpha} must be ≥ 1/2")));
    }
    Ok(())
}

fn dim(spec: &PauliSpectrum) -> f64 {
    (1u64 << spec.num_qubits()) as f64
}

fn xlogx_sq(b: f64) -> f64 {
    let b2 = b * b;
    if b2 == 0.0 {
        0.0
    } else {
        b2 * b2.ln()
    }
}

/// `A_α = 2^{-n} Σ_P |β_P|^{2α}`.
pub fn moment_a(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(spec.power_sum(alpha) / dim(spec))
}

/// Sum of `|β_P|^{2α}` over the non-identity Paulis.
fn filtered_power_sum(spec: &PauliSpectrum, alpha: f64) -> f64 {
    let e = 2.0 * alpha;
    spec.values()[1..].iter().map(|v| v.abs().powf(e)).sum()
}

fn check_filterable(spec: &PauliSpectrum) -> Result<()> {
    let d = dim(spec);
    if d * spec.purity() - 1.0 <= 1e-12 {
        return Err(MagicError::FilteredUndefined);
    }
    Ok(())
}

/// `Ã_α = (2ⁿA_α − 1)/(2ⁿ − 1)`, the moment with the identity removed.
pub fn filtered_moment(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_filterable(spec)?;
    Ok(filtered_power_sum(spec, alpha) / (dim(spec) - 1.0))
}

/// `W_α`, with the `α = 1` case taken from its closed-form limit.
pub fn witness_w(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let s2 = spec.renyi2_entropy()?;
    if alpha == 1.0 {
        return Ok(shannon_term(spec) - 2.0 * s2);
    }
    witness_from_moments(alpha, moment_a(spec, alpha)?, spec.purity())
}

/// `W_α` from `A_α` and the purity, for `α ≠ 1`. Used where the spectrum
/// itself is never formed.
pub fn witness_from_moments(alpha: f64, a_alpha: f64, purity: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(MagicError::domain("α = 1 needs the full spectrum"));
    }
    if !(a_alpha > 0.0) || !(purity > 0.0) {
        return Err(MagicError::InvalidState("moments must be positive".into()));
    }
    let s2 = -purity.ln();
    Ok(a_alpha.ln() / (1.0 - alpha) - (1.0 - 2.0 * alpha) / (1.0 - alpha) * s2)
}

/// `W̃_α` on `n` qubits from `A_α` and the purity, for `α ≠ 1`.
pub fn filtered_witness_from_moments(n: usize, alpha: f64, a_alpha: f64, purity: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Err(MagicError::domain("α = 1 needs the full spectrum"));
    }
    let d = (1u64 << n) as f64;
    if d * purity - 1.0 <= 1e-12 {
        return Err(MagicError::FilteredUndefined);
    }
    let af = (d * a_alpha - 1.0) / (d - 1.0);
    let a1 = (d * purity - 1.0) / (d - 1.0);
    if !(af > 0.0) {
        return Err(MagicError::InvalidState("filtered moment is not positive".into()));
    }
    Ok(af.ln() / (1.0 - alpha) + (1.0 - 2.0 * alpha) / (1.0 - alpha) * a1.ln())
}

/// `−Σ_P 2^{-n} β_P²/tr ρ² · ln β_P²`.
fn shannon_term(spec: &PauliSpectrum) -> f64 {
    let norm = dim(spec) * spec.purity();
    -spec.values().iter().map(|&b| xlogx_sq(b)).sum::<f64>() / norm
}

/// Mixed-state stabilizer Rényi entropy `M_α = (1−α)⁻¹(ln A_α + S₂)`.
pub fn mixed_sre(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let s2 = spec.renyi2_entropy()?;
    if alpha == 1.0 {
        return Ok(shannon_term(spec));
    }
    Ok((moment_a(spec, alpha)?.ln() + s2) / (1.0 - alpha))
}

/// Filtered witness `W̃_α`.
pub fn filtered_witness(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let a1 = filtered_moment(spec, 1.0)?;
    if alpha == 1.0 {
        let norm = dim(spec) * spec.purity() - 1.0;
        let h = -spec.values()[1..].iter().map(|&b| xlogx_sq(b)).sum::<f64>() / norm;
        return Ok(h + 2.0 * a1.ln());
    }
    let a = filtered_moment(spec, alpha)?;
    Ok(a.ln() / (1.0 - alpha) + (1.0 - 2.0 * alpha) / (1.0 - alpha) * a1.ln())
}

/// Filtered SRE `M̃_α = W̃_α − 2 ln Ã₁`; for pure states this is
/// `(1−α)⁻¹ ln Ã_α`.
pub fn filtered_sre(spec: &PauliSpectrum, alpha: f64) -> Result<f64> {
    let a1 = filtered_moment(spec, 1.0)?;
    Ok(filtered_witness(spec, alpha)? - 2.0 * a1.ln())
}

/// Stabilizer norm `D = A_{1/2}` and its filtered version `D̃`.
pub fn stabilizer_norms(spec: &PauliSpectrum) -> Result<(f64, f64)> {
    let d = moment_a(spec, 0.5)?;
    let df = filtered_moment(spec, 0.5)?;
    Ok((d, df))
}

/// Every witness quantity for one `(state, α)` pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub alpha: f64,
    pub a_alpha: f64,
    /// `None` for the maximally mixed state, where filtering is undefined.
    pub a_filtered: Option<f64>,
    pub s2: f64,
    pub m_alpha: f64,
    pub w: f64,
    pub w_filtered: Option<f64>,
    pub d: f64,
    pub d_filtered: Option<f64>,
}

pub fn witness_report(spec: &PauliSpectrum, alpha: f64) -> Result<WitnessReport> {
    check_alpha(alpha)?;
    let filterable = check_filterable(spec).is_ok();
    let opt = |r: Result<f64>| if filterable { r.ok() } else { None };
    Ok(WitnessReport {
        alpha,
        a_alpha: moment_a(spec, alpha)?,
        a_filtered: opt(filtered_moment(spec, alpha)),
        s2: spec.renyi2_entropy()?,
        m_alpha: mixed_sre(spec, alpha)?,
        w: witness_w(spec, alpha)?,
        w_filtered: opt(filtered_witness(spec, alpha)),
        d: moment_a(spec, 0.5)?,
        d_filtered: opt(filtered_moment(spec, 0.5)),
    })
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(MagicError::domain(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Closed forms `(W_α, W̃_α)` for `(1−p)|T⟩⟨T| + p I/2`.
///
/// `W̃_α` is `None` at `p = 1`.
pub fn depolarized_t_reference(alpha: f64, p: f64) -> Result<(f64, Option<f64>)> {
    check_alpha(alpha)?;
    check_probability(p)?;
    let q = 1.0 - p;
    let purity_term = ((p * p - 2.0 * p + 2.0) / 2.0).ln();
    let w = if alpha == 1.0 {
        // β² = 1 on I and q²/2 on X, Y
        let tr = (1.0 + q * q) / 2.0;
        let h = if q == 0.0 { 0.0 } else { -(q * q) * (q * q / 2.0).ln() / 2.0 / tr };
        h + 2.0 * tr.ln()
    } else {
        let a = (1.0 + q.powf(2.0 * alpha) * 2f64.powf(1.0 - alpha)) / 2.0;
        a.ln() / (1.0 - alpha) + (1.0 - 2.0 * alpha) / (1.0 - alpha) * purity_term
    };
    let wf = (p < 1.0).then(|| (2.0 * q * q).ln());
    Ok((w, wf))
}

/// Large-`n` mixed-state SRE of a depolarized Haar-typical state.
pub fn typical_sre_reference(n: usize, alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_probability(p)?;
    if alpha == 1.0 {
        return Err(MagicError::domain("typical reference undefined at α = 1"));
    }
    if n == 0 {
        return Err(MagicError::domain("need at least one qubit"));
    }
    let d = 2f64.powi(n as i32);
    let eta = d * d;
    let b = 2.0 / (d + 2.0);
    let moment = (eta - 1.0) * b.powf(alpha) * gamma(alpha + 0.5) * (1.0 - p).powf(2.0 * alpha)
        / (PI.sqrt() * d)
        + 1.0 / d;
    let s2 = typical_s2(n, p);
    Ok((moment.ln() + s2) / (1.0 - alpha))
}

/// `S₂` of `(1−p)|ψ⟩⟨ψ| + p I/2ⁿ` for pure `ψ`.
pub fn typical_s2(n: usize, p: f64) -> f64 {
    let d = 2f64.powi(n as i32);
    -((1.0 - p).powi(2) + p * (2.0 - p) / d).ln()
}

/// Critical `β` for exponential noise `p = 1 − 2^{−βn}` below which the
/// witness of a depolarized typical state stays positive.
///
/// The unfiltered `α = 1` value is the `½` of the `½ ≤ α < 1` band.
pub fn exponential_noise_threshold(alpha: f64, filtered: bool) -> Result<f64> {
    check_alpha(alpha)?;
    if filtered || alpha <= 1.0 {
        Ok(0.5)
    } else {
        Ok(1.0 / (4.0 * alpha - 2.0))
    }
}

/// `−2n ln 2`, the witness of `I/2ⁿ` at every α.
pub fn maximally_mixed_witness(n: usize) -> f64 {
    -2.0 * n as f64 * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensityMatrix;
    use crate::pauli::pauli_spectrum;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn t_state() -> DensityMatrix {
        let ph = Complex64::from_polar(1.0, -FRAC_PI_4);
        DensityMatrix::from_pure(&[Complex64::new(FRAC_1_SQRT_2, 0.0), ph * FRAC_1_SQRT_2]).unwrap()
    }

    fn depolarized_t(p: f64) -> PauliSpectrum {
        let mut rho = t_state();
        rho.global_depolarize(p);
        pauli_spectrum(&rho).unwrap()
    }

    #[test]
    fn t_state_values() {
        let s = pauli_spectrum(&t_state()).unwrap();
        assert!((moment_a(&s, 3.0).unwrap() - 0.625).abs() < 1e-14);
        assert!((witness_w(&s, 3.0).unwrap() - 0.5 * (8.0f64 / 5.0).ln()).abs() < 1e-12);
        let (d, df) = stabilizer_norms(&s).unwrap();
        assert!((d - (1.0 + SQRT_2) / 2.0).abs() < 1e-14);
        assert!((df - SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed() {
        let s = pauli_spectrum(&DensityMatrix::maximally_mixed(3)).unwrap();
        for a in [0.5, 1.0, 2.0, 3.0] {
            assert!((witness_w(&s, a).unwrap() - maximally_mixed_witness(3)).abs() < 1e-12);
            assert!((moment_a(&s, a).unwrap() - 0.125).abs() < 1e-15);
        }
        assert!(matches!(filtered_moment(&s, 2.0), Err(MagicError::FilteredUndefined)));
        let r = witness_report(&s, 2.0).unwrap();
        assert!(r.w_filtered.is_none());
    }

    #[test]
    fn stabilizer_state_is_zero() {
        let s = pauli_spectrum(&DensityMatrix::zero_state(2)).unwrap();
        for a in [0.5, 1.0, 2.0, 3.0] {
            assert!(witness_w(&s, a).unwrap().abs() < 1e-14);
            assert!(filtered_witness(&s, a).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_below_half_rejected() {
        let s = pauli_spectrum(&t_state()).unwrap();
        assert!(moment_a(&s, 0.4).is_err());
    }

    #[test]
    fn depolarized_t_closed_forms_match_pipeline() {
        for p in [0.0, 0.1, 0.2, 0.29, 0.5, 0.9] {
            let s = depolarized_t(p);
            for a in [0.5, 1.0, 2.0, 3.0] {
                let (w, wf) = depolarized_t_reference(a, p).unwrap();
                assert!((witness_w(&s, a).unwrap() - w).abs() < 1e-10, "p={p} a={a}");
                assert!((filtered_witness(&s, a).unwrap() - wf.unwrap()).abs() < 1e-10);
            }
        }
        let (w, _) = depolarized_t_reference(2.0, 0.0).unwrap();
        assert!((w - (4.0f64 / 3.0).ln()).abs() < 1e-14);
        let (w, _) = depolarized_t_reference(2.0, 0.1565).unwrap();
        assert!(w.abs() < 1e-3);
    }

    #[test]
    fn half_alpha_identities() {
        let s = depolarized_t(0.13);
        let (d, df) = stabilizer_norms(&s).unwrap();
        assert!((witness_w(&s, 0.5).unwrap() - 2.0 * d.ln()).abs() < 1e-12);
        assert!((filtered_witness(&s, 0.5).unwrap() - 2.0 * df.ln()).abs() < 1e-12);
    }

    #[test]
    fn thresholds() {
        assert_eq!(exponential_noise_threshold(3.0, false).unwrap(), 0.1);
        assert_eq!(exponential_noise_threshold(3.0, true).unwrap(), 0.5);
        assert_eq!(exponential_noise_threshold(0.5, false).unwrap(), 0.5);
        assert_eq!(exponential_noise_threshold(1.0, false).unwrap(), 0.5);
    }

    #[test]
    fn typical_reference_at_full_noise() {
        for n in [2, 5, 8] {
            let m = typical_sre_reference(n, 3.0, 1.0).unwrap();
            let w = m - 2.0 * typical_s2(n, 1.0);
            assert!((w - maximally_mixed_witness(n)).abs() < 1e-10);
        }
        assert!(typical_sre_reference(4, 1.0, 0.1).is_err());
    }
}
