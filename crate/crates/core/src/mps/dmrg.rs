//! Two-site DMRG for the open transverse-field Ising chain
//! `H = −Σ σˣᵢσˣᵢ₊₁ − h Σ σᶻᵢ`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{kept, sorted_svd, MPSState, SiteTensor};
use crate::error::{MagicError, Result};

const PAULI_X: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
const PAULI_Z: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, -1.0]];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmrgConfig {
    pub chi: usize,
    /// Stop once a full sweep changes the energy by less than this.
    pub energy_tol: f64,
    pub min_sweeps: usize,
    pub max_sweeps: usize,
    /// Residual target for the local eigensolver.
    pub lanczos_tol: f64,
}

impl DmrgConfig {
    pub fn new(chi: usize) -> Self {
        DmrgConfig { chi, energy_tol: 1e-10, min_sweeps: 2, max_sweeps: 50, lanczos_tol: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct DmrgResult {
    pub state: MPSState,
    pub energy: f64,
    pub sweeps: usize,
    pub last_delta: f64,
    /// `⟨σˣᵢ⟩` per site; nonzero values signal a symmetry-broken state.
    pub sx: Vec<f64>,
    pub sz: Vec<f64>,
}

/// Sparse MPO entry: `W[from][to] = coeff · op`, op 0 = I, 1 = X, 2 = Z.
#[derive(Clone, Copy)]
struct MpoTerm {
    from: usize,
    to: usize,
    coeff: f64,
    op: u8,
}

const MPO_DIM: usize = 3;

fn tfim_mpo(h: f64) -> [MpoTerm; 5] {
    [
        MpoTerm { from: 0, to: 0, coeff: 1.0, op: 0 },
        MpoTerm { from: 1, to: 0, coeff: 1.0, op: 1 },
        MpoTerm { from: 2, to: 0, coeff: -h, op: 2 },
        MpoTerm { from: 2, to: 1, coeff: -1.0, op: 1 },
        MpoTerm { from: 2, to: 2, coeff: 1.0, op: 0 },
    ]
}

/// `(bra spin, factor)` for the operator acting on ket spin `s`.
#[inline]
fn act(op: u8, s: usize) -> (usize, f64) {
    match op {
        0 => (s, 1.0),
        1 => (1 - s, 1.0),
        _ => (s, if s == 0 { 1.0 } else { -1.0 }),
    }
}

/// Environment `E[w, bra, ket]`.
#[derive(Clone)]
struct Env {
    dim: usize,
    data: Vec<f64>,
}

impl Env {
    fn boundary(w: usize) -> Self {
        let mut data = vec![0.0; MPO_DIM];
        data[w] = 1.0;
        Env { dim: 1, data }
    }

    #[inline]
    fn at(&self, w: usize, a: usize, b: usize) -> f64 {
        self.data[(w * self.dim + a) * self.dim + b]
    }
}

fn grow_left(env: &Env, t: &SiteTensor, mpo: &[MpoTerm]) -> Env {
    let (dl, dr) = (t.left(), t.right());
    // tmp[w, abra, s, bket] = Σ_aket E[w, abra, aket] A[aket, s, bket]
    let mut tmp = vec![0.0; MPO_DIM * dl * 2 * dr];
    for w in 0..MPO_DIM {
        for ab in 0..dl {
            for ak in 0..dl {
                let e = env.at(w, ab, ak);
                if e == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    for bk in 0..dr {
                        tmp[((w * dl + ab) * 2 + s) * dr + bk] += e * t.get(ak, s, bk);
                    }
                }
            }
        }
    }
    let mut out = vec![0.0; MPO_DIM * dr * dr];
    for term in mpo {
        for sk in 0..2 {
            let (sb, f) = act(term.op, sk);
            let f = f * term.coeff;
            for ab in 0..dl {
                for bb in 0..dr {
                    let x = f * t.get(ab, sb, bb);
                    if x == 0.0 {
                        continue;
                    }
                    let src = &tmp[((term.from * dl + ab) * 2 + sk) * dr..][..dr];
                    let dst = &mut out[(term.to * dr + bb) * dr..][..dr];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += x * s;
                    }
                }
            }
        }
    }
    Env { dim: dr, data: out }
}

fn grow_right(env: &Env, t: &SiteTensor, mpo: &[MpoTerm]) -> Env {
    let (dl, dr) = (t.left(), t.right());
    // tmp[w, aket, s, bbra] = Σ_bket A[aket, s, bket] E[w, bbra, bket]
    let mut tmp = vec![0.0; MPO_DIM * dl * 2 * dr];
    for w in 0..MPO_DIM {
        for ak in 0..dl {
            for s in 0..2 {
                for bb in 0..dr {
                    let mut acc = 0.0;
                    for bk in 0..dr {
                        acc += t.get(ak, s, bk) * env.at(w, bb, bk);
                    }
                    tmp[((w * dl + ak) * 2 + s) * dr + bb] = acc;
                }
            }
        }
    }
    let mut out = vec![0.0; MPO_DIM * dl * dl];
    for term in mpo {
        for sk in 0..2 {
            let (sb, f) = act(term.op, sk);
            let f = f * term.coeff;
            for ab in 0..dl {
                for ak in 0..dl {
                    let mut acc = 0.0;
                    for bb in 0..dr {
                        acc += t.get(ab, sb, bb) * tmp[((term.to * dl + ak) * 2 + sk) * dr + bb];
                    }
                    out[(term.from * dl + ab) * dl + ak] += f * acc;
                }
            }
        }
    }
    Env { dim: dl, data: out }
}

/// Effective two-site Hamiltonian acting on `θ[a, s1, s2, b]`.
struct TwoSite<'a> {
    left: &'a Env,
    right: &'a Env,
    mpo: &'a [MpoTerm],
    dl: usize,
    dr: usize,
}

impl TwoSite<'_> {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (dl, dr) = (self.dl, self.dr);
        let blk = 4 * dr;
        // t1[w, abra, s1, s2, bket]
        let mut t1 = vec![0.0; MPO_DIM * dl * blk];
        for w in 0..MPO_DIM {
            for ab in 0..dl {
                let dst = &mut t1[(w * dl + ab) * blk..][..blk];
                for ak in 0..dl {
                    let e = self.left.at(w, ab, ak);
                    if e == 0.0 {
                        continue;
                    }
                    for (d, s) in dst.iter_mut().zip(&x[ak * blk..][..blk]) {
                        *d += e * s;
                    }
                }
            }
        }
        // t2[w1, abra, s1bra, s2, bket]
        let mut t2 = vec![0.0; MPO_DIM * dl * blk];
        let half = 2 * dr;
        for term in self.mpo {
            for s1k in 0..2 {
                let (s1b, f) = act(term.op, s1k);
                let f = f * term.coeff;
                for ab in 0..dl {
                    let src = &t1[(term.from * dl + ab) * blk + s1k * half..][..half];
                    let dst = &mut t2[(term.to * dl + ab) * blk + s1b * half..][..half];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += f * s;
                    }
                }
            }
        }
        // t3[w2, abra, s1bra, s2bra, bket]
        let mut t3 = vec![0.0; MPO_DIM * dl * blk];
        for term in self.mpo {
            for s2k in 0..2 {
                let (s2b, f) = act(term.op, s2k);
                let f = f * term.coeff;
                for ab in 0..dl {
                    for s1 in 0..2 {
                        let src = &t2[(term.from * dl + ab) * blk + s1 * half + s2k * dr..][..dr];
                        let dst = &mut t3[(term.to * dl + ab) * blk + s1 * half + s2b * dr..][..dr];
                        for (d, s) in dst.iter_mut().zip(src) {
                            *d += f * s;
                        }
                    }
                }
            }
        }
        y.fill(0.0);
        for w in 0..MPO_DIM {
            for row in 0..dl * 4 {
                let src = &t3[(w * dl * 4 + row) * dr..][..dr];
                let dst = &mut y[row * dr..][..dr];
                for (bb, d) in dst.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (bk, s) in src.iter().enumerate() {
                        acc += s * self.right.at(w, bb, bk);
                    }
                    *d += acc;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
pub(crate) fn lanczos(
    dim: usize,
    mut matvec: impl FnMut(&[f64], &mut [f64]),
    start: &[f64],
    tol: f64,
) -> (f64, Vec<f64>) {
    let krylov = dim.min(40);
    let mut v0 = start.to_vec();
    if normalize(&mut v0) == 0.0 {
        v0 = vec![1.0 / (dim as f64).sqrt(); dim];
    }
    let mut best = (f64::INFINITY, v0.clone());
    let mut w = vec![0.0; dim];
    for _restart in 0..50 {
        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let k = basis.len() - 1;
            matvec(&basis[k], &mut w);
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    for (x, y) in w.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            let bnorm = dot(&w, &w).sqrt();
            if basis.len() == krylov || bnorm < 1e-14 {
                beta.push(bnorm);
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty Krylov space");
        let y = eig.eigenvectors.column(imin);
        let mut v = vec![0.0; dim];
        for (c, b) in y.iter().zip(&basis) {
            for (x, z) in v.iter_mut().zip(b) {
                *x += c * z;
            }
        }
        normalize(&mut v);
        matvec(&v, &mut w);
        let lam = dot(&v, &w);
        let resid = w.iter().zip(&v).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
        best = (lam, v.clone());
        if resid <= tol * lam.abs().max(1.0) || m < krylov {
            break;
        }
        v0 = v;
    }
    best
}

/// `⟨ψ|H|ψ⟩` via the MPO, for a normalized state.
pub fn tfim_energy(psi: &MPSState, h: f64) -> f64 {
    let mpo = tfim_mpo(h);
    let mut env = Env::boundary(2);
    for t in psi.sites() {
        env = grow_left(&env, t, &mpo);
    }
    env.at(0, 0, 0) / psi.norm_squared()
}

pub fn dmrg_ground_state(n: usize, h: f64, chi: usize) -> Result<MPSState> {
    Ok(dmrg_with(n, h, &DmrgConfig::new(chi))?.state)
}

pub fn dmrg_with(n: usize, h: f64, cfg: &DmrgConfig) -> Result<DmrgResult> {
    if n < 4 {
        return Err(MagicError::domain(format!("DMRG needs n ≥ 4, got {n}")));
    }
    if cfg.chi < 2 {
        return Err(MagicError::domain(format!("bond cap χ = {} must be ≥ 2", cfg.chi)));
    }
    if !(h >= 0.0) || !h.is_finite() {
        return Err(MagicError::domain(format!("field h = {h} must be finite and ≥ 0")));
    }
    let mpo = tfim_mpo(h);
    let mut psi = MPSState::product(&vec![[1.0, 0.0]; n])?;
    let mut lefts: Vec<Env> = vec![Env::boundary(2); n];
    let mut rights: Vec<Env> = vec![Env::boundary(0); n];
    for i in (1..n).rev() {
        rights[i - 1] = grow_right(&rights[i], &psi.sites()[i], &mpo);
    }
    let mut energy = f64::INFINITY;
    let mut last_delta = f64::INFINITY;
    for sweep in 1..=cfg.max_sweeps {
        let mut e = energy;
        for i in 0..n - 1 {
            e = optimize_pair(&mut psi, i, true, &mut lefts, &mut rights, &mpo, cfg);
        }
        for i in (0..n - 1).rev() {
            e = optimize_pair(&mut psi, i, false, &mut lefts, &mut rights, &mpo, cfg);
        }
        last_delta = (energy - e).abs();
        energy = e;
        if sweep >= cfg.min_sweeps && last_delta < cfg.energy_tol {
            psi.set_center(0);
            let sx = (0..n).map(|i| psi.local_expectation(i, PAULI_X)).collect();
            let sz = (0..n).map(|i| psi.local_expectation(i, PAULI_Z)).collect();
            return Ok(DmrgResult { state: psi, energy, sweeps: sweep, last_delta, sx, sz });
        }
    }
    Err(MagicError::NoConvergence { sweeps: cfg.max_sweeps, last_delta })
}

/// Optimize sites `(i, i+1)` and split, moving the center right or left.
fn optimize_pair(
    psi: &mut MPSState,
    i: usize,
    rightward: bool,
    lefts: &mut [Env],
    rights: &mut [Env],
    mpo: &[MpoTerm],
    cfg: &DmrgConfig,
) -> f64 {
    let (a, b) = (&psi.sites()[i], &psi.sites()[i + 1]);
    let (dl, dm, dr) = (a.left(), a.right(), b.right());
    let mut theta = vec![0.0; dl * 4 * dr];
    for l in 0..dl {
        for s1 in 0..2 {
            for m in 0..dm {
                let x = a.get(l, s1, m);
                if x == 0.0 {
                    continue;
                }
                for s2 in 0..2 {
                    for r in 0..dr {
                        theta[((l * 2 + s1) * 2 + s2) * dr + r] += x * b.get(m, s2, r);
                    }
                }
            }
        }
    }
    let op = TwoSite { left: &lefts[i], right: &rights[i + 1], mpo, dl, dr };
    let (energy, v) = lanczos(theta.len(), |x, y| op.apply(x, y), &theta, cfg.lanczos_tol);
    let m = DMatrix::from_row_slice(dl * 2, 2 * dr, &v);
    let (u, s, vt) = sorted_svd(m);
    let k = kept(&s, cfg.chi);
    let norm: f64 = s[..k].iter().map(|x| x * x).sum::<f64>().sqrt();
    let weight = |j: usize| s[j] / norm;
    let (left_data, right_data) = if rightward {
        (
            DMatrix::from_fn(dl * 2, k, |r, c| u[(r, c)]),
            DMatrix::from_fn(k, 2 * dr, |r, c| weight(r) * vt[(r, c)]),
        )
    } else {
        (
            DMatrix::from_fn(dl * 2, k, |r, c| u[(r, c)] * weight(c)),
            DMatrix::from_fn(k, 2 * dr, |r, c| vt[(r, c)]),
        )
    };
    psi.set_site(i, SiteTensor::from_matrix(dl, k, &left_data));
    psi.set_site(i + 1, SiteTensor::from_matrix(k, dr, &right_data));
    if rightward {
        lefts[i + 1] = grow_left(&lefts[i], &psi.sites()[i], mpo);
        psi.set_center(i + 1);
    } else {
        rights[i] = grow_right(&rights[i + 1], &psi.sites()[i + 1], mpo);
        psi.set_center(i);
    }
    energy
}
