use num_traits::{One, Signed, Zero};

use super::{Cmp, LinearProgram, LpOutcome, Sense};
use crate::error::Result;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Positive(usize),
    Negative(usize),
    Slack,
    Artificial,
}

/// Dense tableau over the standard form `A y = b, y >= 0`. Each free
/// variable `x_j` is split into `y_{2j} - y_{2j+1}`.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    /// Reduced costs of the current phase objective (minimization).
    reduced: Vec<Rational>,
}

enum Step {
    Optimal,
    Unbounded(usize),
    Pivoted { degenerate: bool },
}

const DEGENERATE_LIMIT: usize = 32;

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        if !p.is_one() {
            for v in self.rows[row].iter_mut().filter(|v| !v.is_zero()) {
                *v /= &p;
            }
            self.rhs[row] /= &p;
        }
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
        }
        self.basis[row] = col;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut reduced = costs.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, r) in reduced.iter_mut().enumerate() {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    *r -= cb * a;
                }
            }
        }
        self.reduced = reduced;
    }

    /// One pivot. Entering column: most negative reduced cost (smallest
    /// index on ties), or the smallest negative index under Bland's rule.
    /// Leaving row: minimum ratio, ties broken by smallest basic index.
    fn step(&mut self, allowed: impl Fn(usize) -> bool, bland: bool) -> Step {
        let candidates =
            (0..self.reduced.len()).filter(|&j| allowed(j) && self.reduced[j].is_negative());
        let entering = if bland {
            candidates.min()
        } else {
            candidates.min_by(|&a, &b| self.reduced[a].cmp(&self.reduced[b]).then(a.cmp(&b)))
        };
        let Some(col) = entering else {
            return Step::Optimal;
        };
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            let better = match &best {
                None => true,
                Some((k, r)) => ratio < *r || (ratio == *r && self.basis[i] < self.basis[*k]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        match best {
            None => Step::Unbounded(col),
            Some((row, ratio)) => {
                self.pivot(row, col);
                Step::Pivoted {
                    degenerate: ratio.is_zero(),
                }
            }
        }
    }

    /// Pivots to optimality. Largest-coefficient pricing is fast but can
    /// cycle on degenerate vertices, so after a run of degenerate pivots
    /// the phase finishes under Bland's rule, which cannot.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Step {
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            match self.step(&allowed, bland) {
                Step::Pivoted { degenerate } => {
                    degenerate_run = if degenerate { degenerate_run + 1 } else { 0 };
                    bland |= degenerate_run > DEGENERATE_LIMIT;
                }
                done => return done,
            }
        }
    }

    fn standard_point(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.columns.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            y[b] = self.rhs[i].clone();
        }
        y
    }

    fn to_original(&self, y: &[Rational], n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (j, col) in self.columns.iter().enumerate() {
            match col {
                Column::Positive(k) => x[*k] += &y[j],
                Column::Negative(k) => x[*k] -= &y[j],
                _ => {}
            }
        }
        x
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.variable_count;
    let m = lp.constraints.len();

    let mut columns: Vec<Column> = (0..n)
        .flat_map(|j| [Column::Positive(j), Column::Negative(j)])
        .collect();
    // Row orientation: +1 when kept, -1 when negated to make the rhs >= 0.
    let mut sign = Vec::with_capacity(m);
    let mut std_rel = Vec::with_capacity(m);
    for c in &lp.constraints {
        // Negate rows with negative rhs, and `>= 0` rows so they start
        // with a basic slack instead of an artificial.
        let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.rel == Cmp::Ge);
        sign.push(if flip { -1i8 } else { 1 });
        std_rel.push(match (c.rel, flip) {
            (Cmp::Eq, _) => Cmp::Eq,
            (Cmp::Le, false) | (Cmp::Ge, true) => Cmp::Le,
            (Cmp::Ge, false) | (Cmp::Le, true) => Cmp::Ge,
        });
    }
    let slack_of: Vec<Option<usize>> = std_rel
        .iter()
        .map(|rel| {
            (*rel != Cmp::Eq).then(|| {
                columns.push(Column::Slack);
                columns.len() - 1
            })
        })
        .collect();
    let artificial_of: Vec<Option<usize>> = std_rel
        .iter()
        .map(|rel| {
            (*rel != Cmp::Le).then(|| {
                columns.push(Column::Artificial);
                columns.len() - 1
            })
        })
        .collect();
    let width = columns.len();

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut initial = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); width];
        for (j, a) in c.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a = if sign[i] < 0 { -a } else { a.clone() };
            row[2 * j + 1] = -&a;
            row[2 * j] = a;
        }
        if let Some(s) = slack_of[i] {
            row[s] = if std_rel[i] == Cmp::Le {
                Rational::one()
            } else {
                -Rational::one()
            };
        }
        let start = match artificial_of[i] {
            Some(a) => {
                row[a] = Rational::one();
                a
            }
            None => slack_of[i].expect("<= rows carry a slack"),
        };
        rows.push(row);
        rhs.push(if sign[i] < 0 { -&c.rhs } else { c.rhs.clone() });
        basis.push(start);
        initial.push(start);
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        columns,
        reduced: Vec::new(),
    };

    // Phase 1: minimize the sum of artificials.
    let phase1: Vec<Rational> = t
        .columns
        .iter()
        .map(|c| {
            if *c == Column::Artificial {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    t.set_costs(&phase1);
    if let Step::Unbounded(_) = t.run(|_| true) {
        unreachable!("phase one objective is bounded below by zero");
    }
    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(b, _)| t.columns[**b] == Column::Artificial)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        // Duals y_i = c_k - d_k on each row's initial identity column; they
        // annihilate every variable column and give y·b > 0.
        let certificate = (0..m)
            .map(|i| {
                let k = initial[i];
                let y = &phase1[k] - &t.reduced[k];
                let y = if sign[i] < 0 { -y } else { y };
                match lp.constraints[i].rel {
                    Cmp::Le => -y,
                    Cmp::Ge | Cmp::Eq => y,
                }
            })
            .collect();
        return Ok(LpOutcome::Infeasible { certificate });
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if t.columns[t.basis[i]] == Column::Artificial {
            let replacement =
                (0..width).find(|&j| t.columns[j] != Column::Artificial && !t.rows[i][j].is_zero());
            match replacement {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Artificials are nonbasic now and may not re-enter; drop their
    // columns, which all follow the structural and slack columns.
    let keep = t
        .columns
        .iter()
        .position(|c| *c == Column::Artificial)
        .unwrap_or(width);
    for row in &mut t.rows {
        row.truncate(keep);
    }
    t.columns.truncate(keep);
    let width = keep;

    // Phase 2 minimizes; a maximization objective is negated.
    let phase2: Vec<Rational> = t
        .columns
        .iter()
        .map(|c| {
            let coef = match c {
                Column::Positive(k) => lp.objective[*k].clone(),
                Column::Negative(k) => -&lp.objective[*k],
                _ => Rational::zero(),
            };
            match lp.sense {
                Sense::Minimize => coef,
                Sense::Maximize => -coef,
            }
        })
        .collect();
    t.set_costs(&phase2);
    let columns = t.columns.clone();
    let allowed = |j: usize| columns[j] != Column::Artificial;
    match t.run(allowed) {
        Step::Pivoted { .. } => unreachable!("run stops only at optimality or unboundedness"),
        Step::Optimal => {
            let point = t.to_original(&t.standard_point(), n);
            let value = lp.objective_at(&point);
            Ok(LpOutcome::Optimal { value, point })
        }
        Step::Unbounded(col) => {
            let y = t.standard_point();
            let point = t.to_original(&y, n);
            let mut direction = vec![Rational::zero(); width];
            direction[col] = Rational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                direction[b] = -&t.rows[i][col];
            }
            let ray = t.to_original(&direction, n);
            Ok(LpOutcome::Unbounded { point, ray })
        }
    }
}
