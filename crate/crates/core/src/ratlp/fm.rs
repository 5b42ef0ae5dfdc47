use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{Cmp, LinearProgram};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const FM_MAX_VARIABLES: usize = 8;
pub const FM_MAX_CONSTRAINTS: usize = 16;

/// `coefficients · x <= bound`, scaled so the first nonzero coefficient has
/// magnitude one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coefficients: Vec<Rational>,
    bound: Rational,
}

impl Row {
    fn normalized(coefficients: Vec<Rational>, bound: Rational) -> Row {
        match coefficients.iter().find(|c| !c.is_zero()) {
            Some(lead) => {
                let scale = lead.abs();
                Row {
                    coefficients: coefficients.iter().map(|c| c / &scale).collect(),
                    bound: bound / scale,
                }
            }
            None => Row {
                coefficients,
                bound,
            },
        }
    }

    fn is_ground(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }
}

/// Rows keyed by normalized coefficients, keeping only the tightest bound.
#[derive(Default)]
struct RowSet(BTreeMap<Vec<Rational>, Rational>);

impl RowSet {
    fn insert(&mut self, row: Row) {
        self.0
            .entry(row.coefficients)
            .and_modify(|b| {
                if row.bound < *b {
                    *b = row.bound.clone();
                }
            })
            .or_insert(row.bound);
    }

    fn iter(&self) -> impl Iterator<Item = Row> + '_ {
        self.0.iter().map(|(c, b)| Row {
            coefficients: c.clone(),
            bound: b.clone(),
        })
    }

    fn drain(&mut self) -> Vec<Row> {
        std::mem::take(&mut self.0)
            .into_iter()
            .map(|(coefficients, bound)| Row {
                coefficients,
                bound,
            })
            .collect()
    }
}

/// Decides feasibility of the constraint system of `lp` (the objective is
/// ignored) by Fourier–Motzkin elimination.
pub fn fourier_motzkin_feasible(lp: &LinearProgram) -> Result<bool> {
    lp.validate()?;
    if lp.variable_count > FM_MAX_VARIABLES {
        return Err(Error::CapExceeded {
            what: "Fourier-Motzkin variables",
            size: lp.variable_count,
            cap: FM_MAX_VARIABLES,
        });
    }
    if lp.constraints.len() > FM_MAX_CONSTRAINTS {
        return Err(Error::CapExceeded {
            what: "Fourier-Motzkin constraints",
            size: lp.constraints.len(),
            cap: FM_MAX_CONSTRAINTS,
        });
    }

    let mut rows = RowSet::default();
    for c in &lp.constraints {
        let negated = || c.coefficients.iter().map(|a| -a).collect::<Vec<_>>();
        if matches!(c.rel, Cmp::Le | Cmp::Eq) {
            rows.insert(Row::normalized(c.coefficients.clone(), c.rhs.clone()));
        }
        if matches!(c.rel, Cmp::Ge | Cmp::Eq) {
            rows.insert(Row::normalized(negated(), -&c.rhs));
        }
    }

    let mut remaining: Vec<usize> = (0..lp.variable_count).collect();
    while !remaining.is_empty() {
        if rows.iter().any(|r| r.is_ground() && r.bound.is_negative()) {
            return Ok(false);
        }
        rows.0
            .retain(|coefficients, _| !coefficients.iter().all(Zero::is_zero));
        let rows_now: Vec<Row> = rows.drain();

        // Eliminate the variable producing the fewest combinations.
        let (pick, var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let pos = rows_now
                    .iter()
                    .filter(|r| r.coefficients[v].is_positive())
                    .count();
                let neg = rows_now
                    .iter()
                    .filter(|r| r.coefficients[v].is_negative())
                    .count();
                pos * neg
            })
            .map(|(i, &v)| (i, v))
            .expect("non-empty");
        remaining.remove(pick);

        let (upper, rest): (Vec<Row>, Vec<Row>) = rows_now
            .into_iter()
            .partition(|r| r.coefficients[var].is_positive());
        let (lower, zero): (Vec<Row>, Vec<Row>) = rest
            .into_iter()
            .partition(|r| r.coefficients[var].is_negative());

        let mut next = RowSet::default();
        for r in zero {
            next.insert(r);
        }
        for u in &upper {
            let cu = &u.coefficients[var];
            for l in &lower {
                let cl = -&l.coefficients[var];
                // cl·u + cu·l cancels the variable.
                let coefficients: Vec<Rational> = u
                    .coefficients
                    .iter()
                    .zip(&l.coefficients)
                    .enumerate()
                    .map(|(j, (a, b))| {
                        if j == var {
                            Rational::zero()
                        } else {
                            &cl * a + cu * b
                        }
                    })
                    .collect();
                let bound = &cl * &u.bound + cu * &l.bound;
                next.insert(Row::normalized(coefficients, bound));
            }
        }
        rows = next;
    }
    Ok(rows.0.values().all(|b| !b.is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::ratlp::Sense;

    fn row(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| int(v)).collect()
    }

    #[test]
    fn empty_system_is_feasible() {
        assert!(fourier_motzkin_feasible(&LinearProgram::new(3, Sense::Maximize)).unwrap());
        assert!(fourier_motzkin_feasible(&LinearProgram::new(0, Sense::Maximize)).unwrap());
    }

    #[test]
    fn contradiction() {
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        lp.add(row(&[1]), Cmp::Ge, int(1));
        lp.add(row(&[1]), Cmp::Le, int(0));
        assert!(!fourier_motzkin_feasible(&lp).unwrap());
    }

    #[test]
    fn additivity_violation_with_margin() {
        // Variables p1 p2 p3 eps: p1 - p2 >= eps, (p2 + p3) - (p1 + p3) >= eps, eps >= 1.
        let mut lp = LinearProgram::new(4, Sense::Maximize);
        lp.add(row(&[1, -1, 0, -1]), Cmp::Ge, int(0));
        lp.add(row(&[-1, 1, 0, -1]), Cmp::Ge, int(0));
        lp.add(row(&[0, 0, 0, 1]), Cmp::Ge, int(1));
        assert!(!fourier_motzkin_feasible(&lp).unwrap());
    }

    #[test]
    fn caps() {
        let lp = LinearProgram::new(9, Sense::Maximize);
        assert!(matches!(
            fourier_motzkin_feasible(&lp),
            Err(Error::CapExceeded { .. })
        ));
        let mut lp = LinearProgram::new(1, Sense::Maximize);
        for _ in 0..17 {
            lp.add(row(&[1]), Cmp::Le, int(1));
        }
        assert!(matches!(
            fourier_motzkin_feasible(&lp),
            Err(Error::CapExceeded { .. })
        ));
    }
}
