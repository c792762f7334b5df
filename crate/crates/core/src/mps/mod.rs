//! Real matrix product states: canonical forms, conversion to and from
//! dense vectors, checkpoint files, DMRG for the transverse-field Ising
//! chain, and subsystem Pauli moments.
//!
//! Site `i` carries qubit `i`, i.e. bit `i` of a computational basis index.

mod dmrg;
mod replica;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{MagicError, Result};

pub use dmrg::{dmrg_ground_state, dmrg_with, tfim_energy, DmrgConfig, DmrgResult};
pub use replica::{
    replica_moment, replica_moments, subsystem_pauli_values, subsystem_purity, subsystem_witness,
    subsystem_witness_scan, ContractionBudget, MomentMethod, SubsystemReport,
};

/// One site tensor `A[a, s, b]` of shape `(left, 2, right)`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    left: usize,
    right: usize,
    data: Vec<f64>,
}

impl SiteTensor {
    pub fn new(left: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != left * 2 * right {
            return Err(MagicError::DimensionMismatch {
                expected: left * 2 * right,
                found: data.len(),
            });
        }
        Ok(SiteTensor { left, right, data })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, a: usize, s: usize, b: usize) -> f64 {
        self.data[(a * 2 + s) * self.right + b]
    }

    /// `(left·2) × right` matrix.
    fn as_left_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left * 2, self.right, &self.data)
    }

    /// `left × (2·right)` matrix.
    fn as_right_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.left, 2 * self.right, &self.data)
    }

    fn from_matrix(left: usize, right: usize, m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(left * 2 * right);
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        SiteTensor { left, right, data }
    }
}

/// Open-boundary MPS with real tensors and a tracked orthogonality center.
#[derive(Clone, Debug, PartialEq)]
pub struct MPSState {
    sites: Vec<SiteTensor>,
    center: usize,
}

/// Singular value decomposition with values in descending order.
pub(crate) fn sorted_svd(m: DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested Vᵀ");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let s: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let vt = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    (u, s, vt)
}

/// Number of singular values kept under a bond cap, dropping numerical zeros.
pub(crate) fn kept(s: &[f64], chi: usize) -> usize {
    let cutoff = s.first().copied().unwrap_or(0.0) * 1e-14;
    s.iter().take(chi).take_while(|&&v| v > cutoff).count().max(1)
}

impl MPSState {
    /// Product state with per-site amplitudes `(⟨0|φᵢ⟩, ⟨1|φᵢ⟩)`.
    pub fn product(amplitudes: &[[f64; 2]]) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(MagicError::domain("MPS needs at least one site"));
        }
        let mut sites = Vec::with_capacity(amplitudes.len());
        for a in amplitudes {
            let norm = (a[0] * a[0] + a[1] * a[1]).sqrt();
            if norm == 0.0 {
                return Err(MagicError::InvalidState("zero site vector".into()));
            }
            sites.push(SiteTensor { left: 1, right: 1, data: vec![a[0] / norm, a[1] / norm] });
        }
        Ok(MPSState { sites, center: 0 })
    }

    /// Build from tensors; the result is brought to right-canonical form and normalized.
    pub fn from_sites(sites: Vec<SiteTensor>) -> Result<Self> {
        if sites.is_empty() {
            return Err(MagicError::domain("MPS needs at least one site"));
        }
        if sites[0].left != 1 || sites[sites.len() - 1].right != 1 {
            return Err(MagicError::InvalidState("boundary bonds must have dimension 1".into()));
        }
        for w in sites.windows(2) {
            if w[0].right != w[1].left {
                return Err(MagicError::DimensionMismatch { expected: w[0].right, found: w[1].left });
            }
        }
        let n = sites.len();
        let mut psi = MPSState { sites, center: n - 1 };
        psi.move_center(0);
        psi.normalize()?;
        Ok(psi)
    }

    /// Exact MPS of a real state vector by successive SVDs, bond cap `chi`.
    pub fn from_dense(psi: &[f64], chi: usize) -> Result<Self> {
        let d = psi.len();
        if !d.is_power_of_two() || d < 2 {
            return Err(MagicError::domain("state length must be a power of two ≥ 2"));
        }
        let n = d.trailing_zeros() as usize;
        let mut sites = Vec::with_capacity(n);
        // rem[(bond, rest)], rest indexes the remaining sites with the next site fastest
        let mut bond = 1usize;
        let mut rem: Vec<f64> = psi.to_vec();
        for i in 0..n - 1 {
            let rest = rem.len() / (bond * 2);
            // rows (bond, s), columns rest'
            let m = DMatrix::from_fn(bond * 2, rest, |r, c| {
                let (b, s) = (r / 2, r % 2);
                rem[b * (2 * rest) + s + 2 * c]
            });
            let (u, s, vt) = sorted_svd(m);
            let k = kept(&s, chi);
            let a = DMatrix::from_fn(bond * 2, k, |r, c| u[(r, c)]);
            sites.push(SiteTensor::from_matrix(bond, k, &a));
            let mut next = vec![0.0; k * rest];
            for r in 0..k {
                for c in 0..rest {
                    next[r * rest + c] = s[r] * vt[(r, c)];
                }
            }
            rem = next;
            bond = k;
            let _ = i;
        }
        sites.push(SiteTensor { left: bond, right: 1, data: rem });
        MPSState::from_sites(sites)
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites.iter().take(self.sites.len() - 1).map(|s| s.right).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.sites.iter().map(|s| s.right.max(s.left)).max().unwrap_or(1)
    }

    pub(crate) fn set_site(&mut self, i: usize, t: SiteTensor) {
        self.sites[i] = t;
    }

    pub(crate) fn set_center(&mut self, c: usize) {
        self.center = c;
    }

    fn left_orthogonalize(&mut self, i: usize) {
        let t = &self.sites[i];
        let (left, right) = (t.left, t.right);
        let qr = t.as_left_matrix().qr();
        let (q, r) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[i] = SiteTensor::from_matrix(left, k, &q);
        let next = &self.sites[i + 1];
        let m = &r * next.as_right_matrix();
        self.sites[i + 1] = SiteTensor::from_matrix(k, next.right, &m);
        debug_assert_eq!(r.ncols(), right);
    }

    fn right_orthogonalize(&mut self, i: usize) {
        let t = &self.sites[i];
        let right = t.right;
        let qr = t.as_right_matrix().transpose().qr();
        let (q, r) = (qr.q(), qr.r());
        let k = q.ncols();
        self.sites[i] = SiteTensor::from_matrix(k, right, &q.transpose());
        let prev = &self.sites[i - 1];
        let m = prev.as_left_matrix() * r.transpose();
        self.sites[i - 1] = SiteTensor::from_matrix(prev.left, k, &m);
    }

    /// Shift the orthogonality center with QR sweeps.
    pub fn move_center(&mut self, target: usize) {
        let target = target.min(self.sites.len() - 1);
        // a full sweep through both ends makes the gauge well defined regardless of history
        for i in (1..self.sites.len()).rev() {
            self.right_orthogonalize(i);
        }
        for i in 0..target {
            self.left_orthogonalize(i);
        }
        self.center = target;
    }

    /// `⟨ψ|ψ⟩` by transfer contraction.
    pub fn norm_squared(&self) -> f64 {
        let mut env = vec![1.0];
        let mut dim = 1;
        for t in &self.sites {
            let mut next = vec![0.0; t.right * t.right];
            for a in 0..dim {
                for a2 in 0..dim {
                    let e = env[a * dim + a2];
                    if e == 0.0 {
                        continue;
                    }
                    for s in 0..2 {
                        for b in 0..t.right {
                            let x = e * t.get(a, s, b);
                            for b2 in 0..t.right {
                                next[b * t.right + b2] += x * t.get(a2, s, b2);
                            }
                        }
                    }
                }
            }
            env = next;
            dim = t.right;
        }
        env[0]
    }

    fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm_squared();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(MagicError::InvalidState("MPS has zero norm".into()));
        }
        let f = 1.0 / nrm.sqrt();
        for v in &mut self.sites[self.center].data {
            *v *= f;
        }
        Ok(())
    }

    /// Dense amplitudes; only sensible for small `n`.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![1.0];
        let mut prefix = 1usize;
        let mut bond = 1usize;
        for t in &self.sites {
            let mut next = vec![0.0; prefix * 2 * t.right];
            for p in 0..prefix {
                for a in 0..bond {
                    let x = v[p * bond + a];
                    if x == 0.0 {
                        continue;
                    }
                    for s in 0..2 {
                        for b in 0..t.right {
                            next[(p + s * prefix) * t.right + b] += x * t.get(a, s, b);
                        }
                    }
                }
            }
            v = next;
            prefix *= 2;
            bond = t.right;
        }
        v
    }

    /// Mirror the chain so that site `i` becomes site `n − 1 − i`.
    pub fn reflect(&self) -> MPSState {
        let sites: Vec<SiteTensor> = self
            .sites
            .iter()
            .rev()
            .map(|t| {
                let mut data = vec![0.0; t.data.len()];
                for a in 0..t.left {
                    for s in 0..2 {
                        for b in 0..t.right {
                            data[(b * 2 + s) * t.left + a] = t.get(a, s, b);
                        }
                    }
                }
                SiteTensor { left: t.right, right: t.left, data }
            })
            .collect();
        let center = self.sites.len() - 1 - self.center;
        MPSState { sites, center }
    }

    /// `⟨ψ|O_i|ψ⟩` for a real 2×2 operator on one site.
    pub fn local_expectation(&self, site: usize, op: [[f64; 2]; 2]) -> f64 {
        let mut psi = self.clone();
        psi.move_center(site);
        let t = &psi.sites[site];
        let mut acc = 0.0;
        for a in 0..t.left {
            for b in 0..t.right {
                for s in 0..2 {
                    for s2 in 0..2 {
                        acc += t.get(a, s, b) * op[s][s2] * t.get(a, s2, b);
                    }
                }
            }
        }
        acc
    }

    /// Largest deviation from the isometry conditions implied by the center.
    pub fn canonical_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, t) in self.sites.iter().enumerate() {
            if i == self.center {
                continue;
            }
            let g = if i < self.center {
                let m = t.as_left_matrix();
                m.transpose() * m
            } else {
                let m = t.as_right_matrix();
                &m * m.transpose()
            };
            for r in 0..g.nrows() {
                for c in 0..g.ncols() {
                    let want = if r == c { 1.0 } else { 0.0 };
                    worst = worst.max((g[(r, c)] - want).abs());
                }
            }
        }
        worst
    }
}

const CHECKPOINT_MAGIC: &[u8; 4] = b"MMPS";
const CHECKPOINT_VERSION: u32 = 1;

/// Binary dump: magic, version, site count, center, then per site
/// `left, right` (u32) and the tensor entries as little-endian f64.
pub fn save_checkpoint(psi: &MPSState, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(psi.sites.len() as u32).to_le_bytes())?;
    w.write_all(&(psi.center as u32).to_le_bytes())?;
    for t in &psi.sites {
        w.write_all(&(t.left as u32).to_le_bytes())?;
        w.write_all(&(t.right as u32).to_le_bytes())?;
        for v in &t.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<MPSState> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(MagicError::InvalidState("not an MPS checkpoint".into()));
    }
    fn read_u32(r: &mut impl Read) -> Result<usize> {
        let mut b = [0u8; 4];
        r.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b) as usize)
    }
    let version = read_u32(&mut r)?;
    if version != CHECKPOINT_VERSION as usize {
        return Err(MagicError::InvalidState(format!("unsupported checkpoint version {version}")));
    }
    let n = read_u32(&mut r)?;
    let center = read_u32(&mut r)?;
    let mut sites = Vec::with_capacity(n);
    for _ in 0..n {
        let left = read_u32(&mut r)?;
        let right = read_u32(&mut r)?;
        let mut data = vec![0.0; left * 2 * right];
        let mut b = [0u8; 8];
        for v in &mut data {
            r.read_exact(&mut b)?;
            *v = f64::from_le_bytes(b);
        }
        sites.push(SiteTensor::new(left, right, data)?);
    }
    if center >= n.max(1) {
        return Err(MagicError::InvalidState("center out of range".into()));
    }
    Ok(MPSState { sites, center })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_vector(n: usize, seed: u64) -> Vec<f64> {
        use rand::Rng;
        let mut rng = crate::rng::rng_from_seed(seed);
        let v: Vec<f64> = (0..1 << n).map(|_| rng.random::<f64>() - 0.5).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / nrm).collect()
    }

    #[test]
    fn dense_round_trip() {
        let v = random_vector(6, 1);
        let psi = MPSState::from_dense(&v, 64).unwrap();
        assert_eq!(psi.bond_dims(), vec![2, 4, 8, 4, 2]);
        let back = psi.to_dense();
        let overlap: f64 = v.iter().zip(&back).map(|(a, b)| a * b).sum();
        assert!((overlap.abs() - 1.0).abs() < 1e-12);
        assert!(psi.canonical_error() < 1e-12);
        assert!((psi.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn center_moves_keep_state() {
        let v = random_vector(5, 2);
        let mut psi = MPSState::from_dense(&v, 64).unwrap();
        let a = psi.to_dense();
        psi.move_center(3);
        assert!(psi.canonical_error() < 1e-12);
        let b = psi.to_dense();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn reflection() {
        let v = random_vector(4, 3);
        let psi = MPSState::from_dense(&v, 16).unwrap();
        let r = psi.reflect().to_dense();
        for (i, x) in v.iter().enumerate() {
            let j = (0..4).fold(0, |acc, q| acc | (((i >> q) & 1) << (3 - q)));
            assert!((r[j] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let psi = MPSState::from_dense(&random_vector(5, 4), 3).unwrap();
        let dir = std::env::temp_dir().join(format!("mmps-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("psi.bin");
        save_checkpoint(&psi, &path).unwrap();
        assert_eq!(load_checkpoint(&path).unwrap(), psi);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
