//! Exact rational linear programming.
//!
//! Variables are unrestricted in sign; bounds such as `x >= 0` are ordinary
//! constraints. [`solve`] runs a two-phase simplex with Bland's
//! smallest-index rule and returns outcomes whose certificates can be
//! checked by substitution. [`fourier_motzkin_feasible`] decides
//! feasibility by variable elimination and serves as an independent oracle
//! on small systems.

mod fm;
mod simplex;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use fm::{fourier_motzkin_feasible, FM_MAX_CONSTRAINTS, FM_MAX_VARIABLES};
pub use simplex::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub rel: Cmp,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vec<Rational>, rel: Cmp, rhs: Rational) -> Self {
        Constraint {
            coefficients,
            rel,
            rhs,
        }
    }

    pub fn lhs_at(&self, point: &[Rational]) -> Rational {
        dot(&self.coefficients, point)
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs_at(point);
        match self.rel {
            Cmp::Le => lhs <= self.rhs,
            Cmp::Ge => lhs >= self.rhs,
            Cmp::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub variable_count: usize,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
    pub sense: Sense,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    /// One multiplier per constraint. Applied to each constraint written as
    /// `a·x >= b` (`<=` rows negated), inequality multipliers are
    /// nonnegative and the combination reads `0 >= positive`.
    Infeasible { certificate: Vec<Rational> },
    /// A feasible point and a direction that stays feasible while strictly
    /// improving the objective.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

impl LinearProgram {
    /// An empty program over `variable_count` variables with a zero
    /// objective.
    pub fn new(variable_count: usize, sense: Sense) -> Self {
        LinearProgram {
            variable_count,
            constraints: Vec::new(),
            objective: vec![Rational::zero(); variable_count],
            sense,
        }
    }

    pub fn add(&mut self, coefficients: Vec<Rational>, rel: Cmp, rhs: Rational) -> usize {
        self.constraints
            .push(Constraint::new(coefficients, rel, rhs));
        self.constraints.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.variable_count;
        for row in self
            .constraints
            .iter()
            .map(|c| &c.coefficients)
            .chain([&self.objective])
        {
            if row.len() != expected {
                return Err(Error::DimensionMismatch {
                    expected,
                    got: row.len(),
                });
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        dot(&self.objective, point)
    }

    pub fn is_feasible_point(&self, point: &[Rational]) -> bool {
        point.len() == self.variable_count && self.constraints.iter().all(|c| c.holds_at(point))
    }

    /// Checks a Farkas certificate: nonnegative multipliers on inequality
    /// rows (in `>=` orientation) whose combination has zero coefficients
    /// and a positive right-hand side.
    pub fn verify_infeasibility(&self, certificate: &[Rational]) -> bool {
        if certificate.len() != self.constraints.len() {
            return false;
        }
        let mut combined = vec![Rational::zero(); self.variable_count];
        let mut rhs = Rational::zero();
        for (row, lambda) in self.constraints.iter().zip(certificate) {
            let signed = match row.rel {
                Cmp::Ge | Cmp::Eq => lambda.clone(),
                Cmp::Le => -lambda,
            };
            if row.rel != Cmp::Eq && lambda.is_negative() {
                return false;
            }
            for (acc, a) in combined.iter_mut().zip(&row.coefficients) {
                *acc += &signed * a;
            }
            rhs += &signed * &row.rhs;
        }
        combined.iter().all(Zero::is_zero) && rhs.is_positive()
    }

    /// Checks an unboundedness witness.
    pub fn verify_ray(&self, point: &[Rational], ray: &[Rational]) -> bool {
        if !self.is_feasible_point(point) || ray.len() != self.variable_count {
            return false;
        }
        let rows_ok = self.constraints.iter().all(|c| {
            let d = dot(&c.coefficients, ray);
            match c.rel {
                Cmp::Le => !d.is_positive(),
                Cmp::Ge => !d.is_negative(),
                Cmp::Eq => d.is_zero(),
            }
        });
        let gain = dot(&self.objective, ray);
        rows_ok
            && match self.sense {
                Sense::Maximize => gain.is_positive(),
                Sense::Minimize => gain.is_negative(),
            }
    }

    /// Substitution check of any outcome against this program.
    pub fn verify(&self, outcome: &LpOutcome) -> bool {
        match outcome {
            LpOutcome::Optimal { value, point } => {
                self.is_feasible_point(point) && &self.objective_at(point) == value
            }
            LpOutcome::Infeasible { certificate } => self.verify_infeasibility(certificate),
            LpOutcome::Unbounded { point, ray } => self.verify_ray(point, ray),
        }
    }
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }
}
