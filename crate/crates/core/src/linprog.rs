//! Dense two-phase simplex for small feasibility and max-margin problems.
//!
//! Solves `min c'x  s.t.  A x = b, x >= 0` on problems with tens of rows and
//! columns. Bland's rule keeps it cycle-free; tolerances suit the scale of
//! wrench matrices (entries O(1)).

use nalgebra::{DMatrix, DVector};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: DVector<f64>,
    pub objective: f64,
}

/// Runs the simplex method on the tableau rows `basis[i]` currently solved
/// for. `costs` has one entry per column plus the objective cell at the end.
fn pivot_loop(tableau: &mut DMatrix<f64>, basis: &mut [usize], n_cols: usize) -> LpStatus {
    let m = tableau.nrows();
    let rhs_col = n_cols;
    let obj_row = m - 1;
    loop {
        // entering column: first with negative reduced cost (Bland)
        let mut enter = None;
        for j in 0..n_cols {
            if tableau[(obj_row, j)] < -EPS {
                enter = Some(j);
                break;
            }
        }
        let Some(enter) = enter else {
            return LpStatus::Optimal;
        };
        // leaving row: min ratio, ties to the smallest basis index (Bland)
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..obj_row {
            let a = tableau[(i, enter)];
            if a > EPS {
                let ratio = tableau[(i, rhs_col)] / a;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - EPS
                            || (ratio < best_ratio + EPS && basis[i] < basis[l])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(leave) = leave else {
            return LpStatus::Unbounded;
        };
        // pivot
        let piv = tableau[(leave, enter)];
        for j in 0..=rhs_col {
            tableau[(leave, j)] /= piv;
        }
        for i in 0..m {
            if i != leave {
                let f = tableau[(i, enter)];
                if f != 0.0 {
                    for j in 0..=rhs_col {
                        tableau[(i, j)] -= f * tableau[(leave, j)];
                    }
                }
            }
        }
        basis[leave] = enter;
    }
}

/// Two-phase simplex for `min c'x  s.t.  A x = b, x >= 0`.
pub fn solve_lp(a: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> LpSolution {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m, "rhs length mismatch");
    assert_eq!(c.len(), n, "cost length mismatch");

    // phase 1: artificials with +1 coefficient after sign-normalizing rows
    let total = n + m;
    let mut tableau = DMatrix::zeros(m + 1, total + 1);
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tableau[(i, j)] = s * a[(i, j)];
        }
        tableau[(i, n + i)] = 1.0;
        tableau[(i, total)] = s * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    // phase-1 objective: sum of artificials, expressed over the basis
    for j in 0..=total {
        let mut v = 0.0;
        for i in 0..m {
            v -= tableau[(i, j)];
        }
        tableau[(m, j)] = v;
    }
    for i in n..n + m {
        tableau[(m, i)] = 0.0;
    }
    if pivot_loop(&mut tableau, &mut basis, total) == LpStatus::Unbounded {
        // phase-1 objective is bounded below by construction
        unreachable!("phase 1 cannot be unbounded");
    }
    let phase1 = -tableau[(m, total)];
    if phase1 > 1e-7 {
        return LpSolution {
            status: LpStatus::Infeasible,
            x: DVector::zeros(n),
            objective: f64::NAN,
        };
    }
    // drive leftover artificials out of the basis where possible
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tableau[(i, j)].abs() > EPS) {
                let piv = tableau[(i, j)];
                for k in 0..=total {
                    tableau[(i, k)] /= piv;
                }
                for r in 0..=m {
                    if r != i {
                        let f = tableau[(r, j)];
                        if f != 0.0 {
                            for k in 0..=total {
                                tableau[(r, k)] -= f * tableau[(i, k)];
                            }
                        }
                    }
                }
                basis[i] = j;
            }
        }
    }

    // phase 2: original costs; artificial columns are frozen at zero
    let mut phase2 = DMatrix::zeros(m + 1, n + 1);
    for i in 0..m {
        for j in 0..n {
            phase2[(i, j)] = tableau[(i, j)];
        }
        phase2[(i, n)] = tableau[(i, total)];
    }
    for j in 0..n {
        phase2[(m, j)] = c[j];
    }
    // reduce costs over the current basis
    for i in 0..m {
        if basis[i] < n {
            let f = phase2[(m, basis[i])];
            if f != 0.0 {
                for j in 0..=n {
                    phase2[(m, j)] -= f * phase2[(i, j)];
                }
            }
        }
    }
    let status = pivot_loop(&mut phase2, &mut basis, n);
    let mut x = DVector::zeros(n);
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = phase2[(i, n)];
        }
    }
    let objective = c.dot(&x);
    LpSolution {
        status: if status == LpStatus::Unbounded {
            LpStatus::Unbounded
        } else {
            LpStatus::Optimal
        },
        x,
        objective,
    }
}

/// Feasibility of `A x = b, 0 <= x <= upper` via slack augmentation.
pub fn box_feasible(a: &DMatrix<f64>, b: &DVector<f64>, upper: f64) -> bool {
    let m = a.nrows();
    let n = a.ncols();
    // [A 0; I I] [x; s] = [b; upper]
    let mut aug = DMatrix::zeros(m + n, 2 * n);
    let mut rhs = DVector::zeros(m + n);
    for i in 0..m {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)];
        }
        rhs[i] = b[i];
    }
    for j in 0..n {
        aug[(m + j, j)] = 1.0;
        aug[(m + j, n + j)] = 1.0;
        rhs[m + j] = upper;
    }
    let c = DVector::zeros(2 * n);
    solve_lp(&aug, &rhs, &c).status == LpStatus::Optimal
}
