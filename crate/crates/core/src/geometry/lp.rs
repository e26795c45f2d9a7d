//! Small dense two-phase simplex solver.
//!
//! Solves `maximize c.x` subject to `A x <= b`, `E x = f` with free variables.
//! Problem sizes in this crate are tiny (a handful of variables and at most a
//! few dozen rows), so the tableau is kept dense and Bland's rule is used
//! throughout to rule out cycling.

const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub le_rows: Vec<(Vec<f64>, f64)>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, ..Default::default() }
    }

    pub fn le(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.objective.len());
        self.le_rows.push((row, rhs));
        self
    }

    pub fn eq(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        debug_assert_eq!(row.len(), self.objective.len());
        self.eq_rows.push((row, rhs));
        self
    }

    pub fn solve(&self) -> LpOutcome {
        solve(self)
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.rhs[i] -= f * prhs;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` restricted to columns where `allowed` is true.
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> bool {
        let max_iter = 50 * (self.ncols + self.rows.len() + 10);
        for _ in 0..max_iter {
            // reduced costs: c_j - c_B B^-1 A_j
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    rc -= cost[b] * self.rows[i][j];
                }
                if rc > PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        true
    }
}

fn solve(lp: &LinearProgram) -> LpOutcome {
    let n = lp.objective.len();
    let m_le = lp.le_rows.len();
    let m = m_le + lp.eq_rows.len();
    // columns: x+ (n), x- (n), slacks (m_le), artificials (m)
    let n_struct = 2 * n + m_le;
    let ncols = n_struct + m;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (a, b)) in lp.le_rows.iter().chain(lp.eq_rows.iter()).enumerate() {
        let mut row = vec![0.0; ncols];
        for j in 0..n {
            row[j] = a[j];
            row[n + j] = -a[j];
        }
        if i < m_le {
            row[2 * n + i] = 1.0;
        }
        let mut b = *b;
        if b < 0.0 {
            for v in row.iter_mut() {
                *v = -*v;
            }
            b = -b;
        }
        row[n_struct + i] = 1.0;
        rows.push(row);
        rhs.push(b);
        basis.push(n_struct + i);
    }
    let mut t = Tableau { rows, rhs, basis, ncols };
    // Slack columns can replace artificials directly when their sign allows.
    for i in 0..m_le {
        if t.rows[i][2 * n + i] > 0.0 {
            t.pivot(i, 2 * n + i);
        }
    }
    let mut phase1 = vec![0.0; ncols];
    for c in phase1.iter_mut().skip(n_struct) {
        *c = -1.0;
    }
    let all = vec![true; ncols];
    t.optimize(&phase1, &all);
    let infeas: f64 = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(b, _)| **b >= n_struct)
        .map(|(_, r)| *r)
        .sum();
    if infeas > FEAS_EPS * (1.0 + m as f64) {
        return LpOutcome::Infeasible;
    }
    // drive remaining artificials out of the basis
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n_struct {
            let col = (0..n_struct).find(|&j| t.rows[i][j].abs() > 1e-9);
            match col {
                Some(c) => {
                    t.pivot(i, c);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }
    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        cost[j] = lp.objective[j];
        cost[n + j] = -lp.objective[j];
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n_struct).collect();
    if !t.optimize(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] += t.rhs[i];
        } else if b < 2 * n {
            x[b - n] -= t.rhs[i];
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_corner() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.le(vec![1.0, 0.0], 1.0)
            .le(vec![-1.0, 0.0], 0.0)
            .le(vec![0.0, 1.0], 1.0)
            .le(vec![0.0, -1.0], 0.0);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 3.0).abs() < 1e-12);
                assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_region_and_free_variables() {
        // minimize x + y over x >= -3, y >= -2
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.le(vec![-1.0, 0.0], 3.0).le(vec![0.0, -1.0], 2.0);
        assert_eq!(lp.solve().value().map(|v| (v * 1e9).round() / 1e9), Some(5.0));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.le(vec![1.0], 0.0).le(vec![-1.0], -1.0);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.le(vec![-1.0], 0.0);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_rows() {
        // maximize x subject to x + y = 1, y >= 0.25
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.eq(vec![1.0, 1.0], 1.0).le(vec![0.0, -1.0], -0.25);
        let v = lp.solve().value().unwrap();
        assert!((v - 0.75).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_center_of_triangle() {
        // x >= 0, y >= 0, x + y <= 1 ; maximize t
        let s = 2f64.sqrt();
        let mut lp = LinearProgram::new(vec![0.0, 0.0, 1.0]);
        lp.le(vec![-1.0, 0.0, 1.0], 0.0)
            .le(vec![0.0, -1.0, 1.0], 0.0)
            .le(vec![1.0 / s, 1.0 / s, 1.0], 1.0 / s);
        let v = lp.solve().value().unwrap();
        // inradius of the unit right triangle
        assert!((v - (1.0 - 1.0 / s)).abs() < 1e-9);
    }
}
