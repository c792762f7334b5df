//! Pauli moments of the reduced state `ρ_ℓ` on sites `0..ℓ`.
//!
//! Two contractions are available. The replica route carries a boundary
//! tensor `B[k₁,b₁,…,k_R,b_R]` over `R = 2α` ket/bra copies and applies
//! `ζ = ½ Σ_σ σ^{⊗R}` one site at a time, so it is exact for integer α and
//! its cost depends only on χ. The Pauli-vector route carries
//! `V[P, k, b] = ⟨ψ|P ⊗ …|ψ⟩` restricted to the bond, which gives the whole
//! spectrum of `ρ_ℓ` and is cheaper while `4^ℓ χ²` stays small.
//!
//! Both close the open bond with `δ(k, b)`, valid because every site right of
//! the cut is right-isometric when the center sits at site 0.

use serde::Serialize;

use super::{MPSState, SiteTensor};
use crate::error::{MagicError, Result};
use crate::pauli::PauliSpectrum;
use crate::witness::{filtered_witness_from_moments, witness_from_moments, witness_report};

/// Cap on the number of `f64` entries in the boundary tensor of a contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContractionBudget {
    pub max_entries: usize,
}

impl Default for ContractionBudget {
    /// Enough for α = 2 at χ = 8.
    fn default() -> Self {
        ContractionBudget { max_entries: 8usize.pow(8) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Replica,
    PauliVector,
}

/// Witness quantities of `ρ_ℓ` for one `(ℓ, α)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsystemReport {
    pub ell: usize,
    pub alpha: u32,
    pub purity: f64,
    pub s2: f64,
    pub a_alpha: f64,
    pub w: f64,
    pub w_filtered: Option<f64>,
    pub method: MomentMethod,
}

/// Per-site operator with `Y` replaced by the real `J = −iY`.
/// Entry `[t][s]` is `⟨t|σ|s⟩`.
const SIGMA: [[[f64; 2]; 2]; 4] = [
    [[1.0, 0.0], [0.0, 1.0]],
    [[0.0, 1.0], [1.0, 0.0]],
    [[1.0, 0.0], [0.0, -1.0]],
    [[0.0, -1.0], [1.0, 0.0]],
];

/// `Aσ[b, s, b'] = Σ_t A[b, t, b'] σ[t][s]`.
fn bra_tensor(t: &SiteTensor, sigma: usize) -> Vec<f64> {
    let (dl, dr) = (t.left(), t.right());
    let op = SIGMA[sigma];
    let mut out = vec![0.0; dl * 2 * dr];
    for b in 0..dl {
        for s in 0..2 {
            for bp in 0..dr {
                out[(b * 2 + s) * dr + bp] = op[0][s] * t.get(b, 0, bp) + op[1][s] * t.get(b, 1, bp);
            }
        }
    }
    out
}

fn center_at_zero(psi: &MPSState) -> MPSState {
    let mut p = psi.clone();
    if p.center() != 0 || p.canonical_error() > 1e-10 {
        p.move_center(0);
    }
    p
}

fn check_ell(psi: &MPSState, ell: usize) -> Result<()> {
    if ell == 0 || ell > psi.num_sites() {
        return Err(MagicError::domain(format!(
            "subsystem length {ell} outside 1..={}",
            psi.num_sites()
        )));
    }
    Ok(())
}

/// Largest bond met while absorbing sites `0..ell`.
fn max_bond_upto(psi: &MPSState, ell: usize) -> usize {
    psi.sites()[..ell].iter().map(|t| t.left().max(t.right())).max().unwrap_or(1)
}

fn replica_entries(psi: &MPSState, ell: usize, copies: usize) -> usize {
    let d = max_bond_upto(psi, ell);
    d.saturating_pow(2 * copies as u32)
}

fn pauli_vector_entries(psi: &MPSState, ell: usize) -> usize {
    let d = max_bond_upto(psi, ell);
    4usize.saturating_pow(ell as u32).saturating_mul(d * d)
}

/// Single-copy transfer `E_σ[(k,b), (k',b')] = Σ_s A[k,s,k'] Aσ[b,s,b']`.
fn pair_transfer(t: &SiteTensor, sigma: usize) -> Vec<f64> {
    let (din, dout) = (t.left(), t.right());
    let a_sigma = bra_tensor(t, sigma);
    let cols = dout * dout;
    let mut e = vec![0.0; din * din * cols];
    for k in 0..din {
        for b in 0..din {
            let row = &mut e[(k * din + b) * cols..][..cols];
            for s in 0..2 {
                for kp in 0..dout {
                    let x = t.get(k, s, kp);
                    if x == 0.0 {
                        continue;
                    }
                    let src = &a_sigma[(b * 2 + s) * dout..][..dout];
                    for (d, y) in row[kp * dout..][..dout].iter_mut().zip(src) {
                        *d += x * y;
                    }
                }
            }
        }
    }
    e
}

/// Contract the leading index of `buf` (size `lead`) with the rows of the
/// `lead × cols` matrix `mat`; the new index is appended last, so repeated
/// calls rotate through the layout.
fn mode_product(buf: &[f64], lead: usize, mat: &[f64], cols: usize) -> Vec<f64> {
    let rest = buf.len() / lead;
    let mut out = vec![0.0; rest * cols];
    // SAFETY: `buf` is `lead × rest` column-major as read here, `mat` is
    // `lead × cols` row-major and `out` is `rest × cols` row-major.
    unsafe {
        matrixmultiply::dgemm(
            rest,
            lead,
            cols,
            1.0,
            buf.as_ptr(),
            1,
            rest as isize,
            mat.as_ptr(),
            cols as isize,
            1,
            0.0,
            out.as_mut_ptr(),
            cols as isize,
            1,
        );
    }
    out
}

/// `Σ_k B[k, k, …, k_R, k_R]` for a boundary with `copies` ket/bra pairs.
fn close_diagonal(buf: &[f64], d: usize, copies: usize) -> f64 {
    let mut total = 0.0;
    let combos = d.pow(copies as u32);
    for c in 0..combos {
        let mut idx = 0usize;
        let mut rem = c;
        let mut digits = vec![0usize; copies];
        for dgt in digits.iter_mut().rev() {
            *dgt = rem % d;
            rem /= d;
        }
        for &k in &digits {
            idx = (idx * d + k) * d + k;
        }
        total += buf[idx];
    }
    total
}

/// Replica contraction with `copies` ket/bra pairs; returns
/// `2^{-ℓ} Σ_P tr(ρ_ℓ P)^{copies}` for `ℓ = 1..=ell_max`.
fn replica_scan(psi: &MPSState, ell_max: usize, copies: usize) -> Vec<f64> {
    let y_sign = if copies % 4 == 0 { 1.0 } else { -1.0 };
    let mut boundary = vec![1.0];
    let mut out = Vec::with_capacity(ell_max);
    for t in &psi.sites()[..ell_max] {
        let (din, dout) = (t.left(), t.right());
        let mut next = vec![0.0; dout.pow(2 * copies as u32)];
        for (sigma, sign) in [(0usize, 1.0), (1, 1.0), (2, 1.0), (3, y_sign)] {
            let e = pair_transfer(t, sigma);
            let mut b = mode_product(&boundary, din * din, &e, dout * dout);
            for _ in 1..copies {
                b = mode_product(&b, din * din, &e, dout * dout);
            }
            for (x, y) in next.iter_mut().zip(&b) {
                *x += 0.5 * sign * y;
            }
        }
        boundary = next;
        out.push(close_diagonal(&boundary, dout, copies));
    }
    out
}

fn check_budget(requested: usize, budget: &ContractionBudget, what: &'static str) -> Result<()> {
    if requested > budget.max_entries {
        return Err(MagicError::Capacity { what, requested, limit: budget.max_entries });
    }
    Ok(())
}

/// `tr ρ_ℓ²` from a two-copy transfer contraction.
pub fn subsystem_purity(psi: &MPSState, ell: usize) -> Result<f64> {
    check_ell(psi, ell)?;
    let psi = center_at_zero(psi);
    check_budget(
        replica_entries(&psi, ell, 2),
        &ContractionBudget { max_entries: 1 << 26 },
        "two-copy purity boundary entries",
    )?;
    Ok(replica_scan(&psi, ell, 2)[ell - 1])
}

/// `A_α(ρ_ℓ)` for integer `α ≥ 2` by the replica contraction.
pub fn replica_moment(psi: &MPSState, ell: usize, alpha: u32) -> Result<f64> {
    Ok(replica_moments(psi, ell, alpha, &ContractionBudget::default())?[ell - 1])
}

/// `A_α(ρ_ℓ)` for every `ℓ = 1..=ell_max` from one replica pass.
pub fn replica_moments(
    psi: &MPSState,
    ell_max: usize,
    alpha: u32,
    budget: &ContractionBudget,
) -> Result<Vec<f64>> {
    check_ell(psi, ell_max)?;
    if alpha < 2 {
        return Err(MagicError::domain(format!("replica index α = {alpha} must be ≥ 2")));
    }
    let psi = center_at_zero(psi);
    check_budget(
        replica_entries(&psi, ell_max, 2 * alpha as usize),
        budget,
        "replica boundary entries (grows as χ^{4α})",
    )?;
    Ok(replica_scan(&psi, ell_max, 2 * alpha as usize))
}

/// Pauli spectra of `ρ_ℓ` for `ℓ = 1..=ell_max`.
pub fn subsystem_pauli_values(
    psi: &MPSState,
    ell_max: usize,
    budget: &ContractionBudget,
) -> Result<Vec<PauliSpectrum>> {
    check_ell(psi, ell_max)?;
    let psi = center_at_zero(psi);
    check_budget(pauli_vector_entries(&psi, ell_max), budget, "Pauli-vector entries (grows as 4^ℓ χ²)")?;
    // v[(k, b), P] going in, w[P, (k', b')] coming out
    let mut v = vec![1.0];
    let mut count = 1usize;
    let mut out = Vec::with_capacity(ell_max);
    for (i, t) in psi.sites()[..ell_max].iter().enumerate() {
        let (din, dout) = (t.left(), t.right());
        let pair = dout * dout;
        let mut w = Vec::with_capacity(4 * count * pair);
        for sigma in 0..4 {
            let e = pair_transfer(t, sigma);
            w.extend(mode_product(&v, din * din, &e, pair));
        }
        count *= 4;
        let ell = i + 1;
        let values: Vec<f64> = (0..count)
            .map(|p| {
                let c: f64 = (0..dout).map(|k| w[p * pair + k * dout + k]).sum();
                let ys = y_count(p, ell);
                // real states have no expectation on odd-Y strings
                if ys % 2 == 1 {
                    0.0
                } else if ys % 4 == 2 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        out.push(PauliSpectrum::from_raw(ell, values));
        if ell < ell_max {
            v = vec![0.0; w.len()];
            for p in 0..count {
                for q in 0..pair {
                    v[q * count + p] = w[p * pair + q];
                }
            }
        }
    }
    Ok(out)
}

fn y_count(index: usize, n: usize) -> u32 {
    (0..n).filter(|q| (index >> (2 * q)) & 3 == 3).count() as u32
}

/// Witness of the left block `0..ℓ`; picks whichever contraction fits the
/// default budget, preferring the cheaper one.
pub fn subsystem_witness(psi: &MPSState, ell: usize, alpha: u32) -> Result<SubsystemReport> {
    subsystem_witness_scan(psi, ell, alpha, &ContractionBudget::default())
        .pop()
        .expect("scan covers ell")
}

/// Reports for every `ℓ = 1..=ell_max`. Points beyond both budgets carry a
/// capacity error instead of aborting the scan.
pub fn subsystem_witness_scan(
    psi: &MPSState,
    ell_max: usize,
    alpha: u32,
    budget: &ContractionBudget,
) -> Vec<Result<SubsystemReport>> {
    if let Err(e) = check_ell(psi, ell_max) {
        return vec![Err(e)];
    }
    if alpha < 2 {
        return vec![Err(MagicError::domain(format!("replica index α = {alpha} must be ≥ 2")))];
    }
    let psi = center_at_zero(psi);
    let copies = 2 * alpha as usize;
    let mut out: Vec<Result<SubsystemReport>> = Vec::with_capacity(ell_max);
    // Pauli-vector route while it is cheaper than the replica route and fits
    let mut pv_max = 0;
    for ell in 1..=ell_max {
        let pv = pauli_vector_entries(&psi, ell);
        if pv <= budget.max_entries && pv <= replica_entries(&psi, ell, copies).max(1 << 16) {
            pv_max = ell;
        } else {
            break;
        }
    }
    if pv_max > 0 {
        match subsystem_pauli_values(&psi, pv_max, budget) {
            Ok(specs) => {
                for (i, spec) in specs.iter().enumerate() {
                    out.push(report_from_spectrum(i + 1, alpha, spec));
                }
            }
            Err(e) => return vec![Err(e)],
        }
    }
    if pv_max == ell_max {
        return out;
    }
    // replica route for the rest, as far as the budget allows
    let mut reach = pv_max;
    while reach < ell_max && replica_entries(&psi, reach + 1, copies) <= budget.max_entries {
        reach += 1;
    }
    if reach > pv_max {
        let moments = replica_scan(&psi, reach, copies);
        let purities = replica_scan(&psi, reach, 2);
        for ell in pv_max + 1..=reach {
            out.push(report_from_moments(ell, alpha, moments[ell - 1], purities[ell - 1]));
        }
    }
    for ell in reach + 1..=ell_max {
        out.push(Err(MagicError::Capacity {
            what: "replica boundary entries (grows as χ^{4α})",
            requested: replica_entries(&psi, ell, copies),
            limit: budget.max_entries,
        }));
    }
    out
}

fn report_from_spectrum(ell: usize, alpha: u32, spec: &PauliSpectrum) -> Result<SubsystemReport> {
    let r = witness_report(spec, alpha as f64)?;
    Ok(SubsystemReport {
        ell,
        alpha,
        purity: spec.purity(),
        s2: r.s2,
        a_alpha: r.a_alpha,
        w: r.w,
        w_filtered: r.w_filtered,
        method: MomentMethod::PauliVector,
    })
}

fn report_from_moments(ell: usize, alpha: u32, a: f64, purity: f64) -> Result<SubsystemReport> {
    let w = witness_from_moments(alpha as f64, a, purity)?;
    let w_filtered = match filtered_witness_from_moments(ell, alpha as f64, a, purity) {
        Ok(v) => Some(v),
        Err(MagicError::FilteredUndefined) => None,
        Err(e) => return Err(e),
    };
    Ok(SubsystemReport {
        ell,
        alpha,
        purity,
        s2: -purity.ln(),
        a_alpha: a,
        w,
        w_filtered,
        method: MomentMethod::Replica,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_pair() -> MPSState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        MPSState::from_dense(&[h, 0.0, 0.0, h], 2).unwrap()
    }

    #[test]
    fn bell_pair_split() {
        let psi = bell_pair();
        assert!((subsystem_purity(&psi, 1).unwrap() - 0.5).abs() < 1e-14);
        assert!((subsystem_purity(&psi, 2).unwrap() - 1.0).abs() < 1e-14);
        // ρ₁ = I/2: A₂ = ½
        assert!((replica_moment(&psi, 1, 2).unwrap() - 0.5).abs() < 1e-14);
        // Bell state is a stabilizer state
        assert!((replica_moment(&psi, 2, 2).unwrap() - 1.0).abs() < 1e-14);
        assert!((replica_moment(&psi, 2, 3).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn routes_agree() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let t = (std::f64::consts::PI / 8.0).cos();
        let psi = MPSState::product(&[[t, (1.0 - t * t).sqrt()], [s, s], [0.6, 0.8]]).unwrap();
        let specs = subsystem_pauli_values(&psi, 3, &ContractionBudget::default()).unwrap();
        let reps = replica_moments(&psi, 3, 2, &ContractionBudget::default()).unwrap();
        for (spec, a) in specs.iter().zip(&reps) {
            assert!((spec.power_sum(2.0) / (1 << spec.num_qubits()) as f64 - a).abs() < 1e-13);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let psi = bell_pair();
        let tiny = ContractionBudget { max_entries: 4 };
        let err = replica_moments(&psi, 1, 2, &tiny).unwrap_err();
        assert!(matches!(err, MagicError::Capacity { .. }));
        assert_eq!(err.exit_code(), 3);
    }
}
