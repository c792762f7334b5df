//! Revised two-phase simplex for `min cᵀx  s.t.  Ax = b, x ≥ 0`.
//!
//! The basis is refactorized from the original columns at every pivot, so
//! round-off does not accumulate across iterations.

use nalgebra::{DMatrix, DVector};

use crate::error::{MagicError, Result};

/// Reduced-cost and pivot-entry tolerance.
const EPS: f64 = 1e-9;

pub(crate) struct Solution {
    pub x: Vec<f64>,
}

struct Program {
    /// `[A | I]` with rows sign-flipped so that `b ≥ 0`.
    m: DMatrix<f64>,
    b: DVector<f64>,
    /// Structural column count; columns at or above it are artificial.
    n: usize,
    basis: Vec<usize>,
}

enum Step {
    Optimal,
    Pivot { degenerate: bool },
}

impl Program {
    fn factor(&self) -> Result<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> {
        let cols: Vec<_> = self.basis.iter().map(|&j| self.m.column(j)).collect();
        let lu = DMatrix::from_columns(&cols).lu();
        if !lu.is_invertible() {
            return Err(MagicError::LinearProgram("singular basis".into()));
        }
        Ok(lu)
    }

    fn values(&self) -> Result<DVector<f64>> {
        self.factor()?
            .solve(&self.b)
            .ok_or_else(|| MagicError::LinearProgram("singular basis".into()))
    }

    /// One pricing and ratio step; columns `0..enterable` may enter.
    fn step(&mut self, cost: &[f64], enterable: usize, bland: bool) -> Result<Step> {
        let lu = self.factor()?;
        let xb = lu.solve(&self.b).ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;
        let cb = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&j| cost[j]));
        // Bᵀy = c_B through the transposed factors
        let bt = DMatrix::from_columns(&self.basis.iter().map(|&j| self.m.column(j)).collect::<Vec<_>>()).transpose();
        let y = bt.lu().solve(&cb).ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;
        let priced = self.m.columns(0, enterable).tr_mul(&y);

        let mut enter = None;
        let mut best = -EPS;
        for j in 0..enterable {
            let rc = cost[j] - priced[j];
            if rc < best && !self.basis.contains(&j) {
                enter = Some(j);
                if bland {
                    break;
                }
                best = rc;
            }
        }
        let Some(pc) = enter else {
            return Ok(Step::Optimal);
        };
        let dir = lu
            .solve(&self.m.column(pc).into_owned())
            .ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;

        let mut leave: Option<(usize, f64)> = None;
        for r in 0..self.basis.len() {
            let a = dir[r];
            // a zero-level artificial leaves on any nonzero entry
            let ratio = if self.basis[r] >= self.n && xb[r].abs() < EPS && a.abs() > EPS {
                0.0
            } else if a > EPS {
                xb[r].max(0.0) / a
            } else {
                continue;
            };
            let better = match leave {
                None => true,
                Some((lr, lratio)) => {
                    ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                }
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((pr, ratio)) = leave else {
            return Err(MagicError::LinearProgram("objective unbounded below".into()));
        };
        self.basis[pr] = pc;
        Ok(Step::Pivot { degenerate: ratio < 1e-14 })
    }

    /// Dantzig pricing, switching to Bland's rule for good after a stretch of
    /// degenerate pivots.
    fn optimize(&mut self, cost: &[f64], enterable: usize, max_iter: usize) -> Result<()> {
        let mut degenerate = 0usize;
        let mut bland = false;
        for _ in 0..max_iter {
            match self.step(cost, enterable, bland)? {
                Step::Optimal => return Ok(()),
                Step::Pivot { degenerate: true } => {
                    degenerate += 1;
                    bland |= degenerate > 50;
                }
                Step::Pivot { degenerate: false } => degenerate = 0,
            }
        }
        Err(MagicError::LinearProgram(format!("no optimum after {max_iter} pivots")))
    }
    /// Dual simplex pivots from a dual-feasible basis until `x_B ≥ 0`.
    fn restore_primal(&mut self, cost: &[f64], max_iter: usize) -> Result<()> {
        for _ in 0..max_iter {
            let lu = self.factor()?;
            let xb = lu.solve(&self.b).ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;
            let Some((pr, _)) = xb
                .iter()
                .enumerate()
                .filter(|(_, &v)| v < -1e-10)
                .min_by(|a, b| a.1.total_cmp(b.1))
            else {
                return Ok(());
            };
            let bt = DMatrix::from_columns(&self.basis.iter().map(|&j| self.m.column(j)).collect::<Vec<_>>())
                .transpose()
                .lu();
            let cb = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|&j| cost[j]));
            let y = bt.solve(&cb).ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;
            let mut unit = DVector::zeros(self.basis.len());
            unit[pr] = 1.0;
            let row = bt.solve(&unit).ok_or_else(|| MagicError::LinearProgram("singular basis".into()))?;
            let structural = self.m.columns(0, self.n);
            let priced = structural.tr_mul(&y);
            let alpha = structural.tr_mul(&row);
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if alpha[j] < -EPS && !self.basis.contains(&j) {
                    let ratio = (cost[j] - priced[j]).max(0.0) / -alpha[j];
                    if enter.is_none_or(|(_, best)| ratio < best) {
                        enter = Some((j, ratio));
                    }
                }
            }
            let Some((pc, _)) = enter else {
                return Err(MagicError::LinearProgram("infeasible".into()));
            };
            self.basis[pr] = pc;
        }
        Err(MagicError::LinearProgram(format!("no feasible basis after {max_iter} dual pivots")))
    }
}

/// Solve the standard-form program; `a` is row-major `m × n`.
///
/// Both phases run on a slightly perturbed `b`, which keeps pivots
/// nondegenerate; dual pivots then restore feasibility for the exact `b`.
pub(crate) fn minimize(c: &[f64], a: &[f64], b: &[f64]) -> Result<Solution> {
    let rows = b.len();
    let n = c.len();
    assert_eq!(a.len(), rows * n);
    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let m = DMatrix::from_fn(rows, n + rows, |r, j| {
        if j < n {
            sign[r] * a[r * n + j]
        } else if j - n == r {
            1.0
        } else {
            0.0
        }
    });
    let exact = DVector::from_iterator(rows, b.iter().zip(&sign).map(|(v, s)| v * s));
    let scale = exact.amax().max(1.0);
    let perturbed = DVector::from_fn(rows, |r, _| exact[r] + scale * 1e-7 * (1.0 + ((r * 7919) % 101) as f64 / 101.0));
    let mut prog = Program { m, b: perturbed, n, basis: (n..n + rows).collect() };
    let max_iter = 20 * (rows + n) + 1000;

    let phase1: Vec<f64> = (0..n + rows).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    prog.optimize(&phase1, n + rows, max_iter)?;
    let xb = prog.values()?;
    let infeasibility: f64 =
        prog.basis.iter().zip(xb.iter()).filter(|(&j, _)| j >= n).map(|(_, v)| v.abs()).sum();
    if infeasibility > 1e-4 * scale {
        return Err(MagicError::LinearProgram(format!(
            "infeasible (phase-1 residual {infeasibility:e})"
        )));
    }

    let mut phase2 = c.to_vec();
    phase2.resize(n + rows, 0.0);
    prog.optimize(&phase2, n, max_iter)?;
    prog.b = exact;
    prog.restore_primal(&phase2, max_iter)?;
    let xb = prog.values()?;
    let mut x = vec![0.0; n];
    for (&j, &v) in prog.basis.iter().zip(xb.iter()) {
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    Ok(Solution { x })
}
