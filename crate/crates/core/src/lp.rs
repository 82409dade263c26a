//! Exact rational linear programming.
//!
//! A dense two-phase simplex over [`BigRational`] with Bland's pivoting rule,
//! so every run is deterministic and terminates. Problems are stated as
//!
//! ```text
//! minimize  c . x   subject to   a_i . x  (<=|>=|=)  b_i,   x >= 0
//! ```
//!
//! Infeasible problems come back with a Farkas certificate that can be checked
//! independently of the solver with [`FarkasCertificate::verify`].

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
}

/// A linear program in nonnegative variables.
#[derive(Debug, Clone)]
pub struct RationalLp {
    num_vars: usize,
    objective: Vec<BigRational>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

/// Multipliers `y` (one per constraint, in input order) proving infeasibility:
/// `sum_i y_i a_i <= 0` componentwise, `y_i <= 0` on `<=` rows, `y_i >= 0` on
/// `>=` rows and `sum_i y_i b_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible(FarkasCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

impl RationalLp {
    /// A feasibility problem (zero objective) in `num_vars` nonnegative variables.
    pub fn new(num_vars: usize) -> Self {
        RationalLp {
            num_vars,
            objective: vec![BigRational::zero(); num_vars],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn minimize(mut self, objective: Vec<BigRational>) -> Self {
        assert_eq!(objective.len(), self.num_vars, "objective length");
        self.objective = objective;
        self
    }

    pub fn minimize_int(self, objective: &[i64]) -> Self {
        self.minimize(objective.iter().map(|&v| rat(v)).collect())
    }

    pub fn constrain(&mut self, coeffs: Vec<BigRational>, relation: Relation, rhs: BigRational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint length");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn constrain_int(&mut self, coeffs: &[i64], relation: Relation, rhs: i64) {
        self.constrain(coeffs.iter().map(|&v| rat(v)).collect(), relation, rat(rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }

    /// Whether `x` satisfies every constraint and the sign restrictions.
    pub fn is_feasible_point(&self, x: &[BigRational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: BigRational = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &RationalLp) -> bool {
        if self.multipliers.len() != lp.constraints.len() {
            return false;
        }
        let signs_ok = lp.constraints.iter().zip(&self.multipliers).all(|(c, y)| match c.relation {
            Relation::Le => !y.is_positive(),
            Relation::Ge => !y.is_negative(),
            Relation::Eq => true,
        });
        let columns_ok = (0..lp.num_vars).all(|j| {
            let s: BigRational =
                lp.constraints.iter().zip(&self.multipliers).map(|(c, y)| &c.coeffs[j] * y).sum();
            !s.is_positive()
        });
        let rhs: BigRational = lp.constraints.iter().zip(&self.multipliers).map(|(c, y)| &c.rhs * y).sum();
        signs_ok && columns_ok && rhs.is_positive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    /// rows x (cols + 1); the last entry of each row is the right-hand side
    rows: Vec<Vec<BigRational>>,
    kinds: Vec<Column>,
    basis: Vec<usize>,
    /// sign applied to each input row so that its rhs is nonnegative
    row_sign: Vec<BigRational>,
    /// column that started in the basis for each input row (slack or artificial)
    initial_col: Vec<usize>,
    /// which input row each tableau row came from
    origin: Vec<usize>,
}

impl Tableau {
    fn build(lp: &RationalLp) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let mut kinds = vec![Column::Original; n];
        let mut norm: Vec<(Vec<BigRational>, Relation, BigRational, BigRational)> = Vec::with_capacity(m);
        for c in &lp.constraints {
            if c.rhs.is_negative() {
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                norm.push((c.coeffs.iter().map(|v| -v).collect(), rel, -&c.rhs, rat(-1)));
            } else {
                norm.push((c.coeffs.clone(), c.relation, c.rhs.clone(), rat(1)));
            }
        }
        let mut slack_of = vec![None; m];
        for (i, row) in norm.iter().enumerate() {
            if row.1 != Relation::Eq {
                slack_of[i] = Some(kinds.len());
                kinds.push(Column::Slack);
            }
        }
        let mut art_of = vec![None; m];
        for (i, row) in norm.iter().enumerate() {
            if row.1 != Relation::Le {
                art_of[i] = Some(kinds.len());
                kinds.push(Column::Artificial);
            }
        }
        let cols = kinds.len();
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut initial_col = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for (i, (coeffs, rel, rhs, sign)) in norm.into_iter().enumerate() {
            let mut row = vec![BigRational::zero(); cols + 1];
            row[..n].clone_from_slice(&coeffs);
            if let Some(s) = slack_of[i] {
                row[s] = if rel == Relation::Le { rat(1) } else { rat(-1) };
            }
            let b = match art_of[i] {
                Some(a) => {
                    row[a] = rat(1);
                    a
                }
                None => slack_of[i].expect("<= rows carry a slack"),
            };
            row[cols] = rhs;
            rows.push(row);
            basis.push(b);
            initial_col.push(b);
            row_sign.push(sign);
        }
        Tableau { rows, kinds, basis, row_sign, initial_col, origin: (0..m).collect() }
    }

    fn cols(&self) -> usize {
        self.kinds.len()
    }

    /// Reduced costs `c_j - c_B B^-1 A_j` and the current objective value.
    fn reduced_costs(&self, cost: &[BigRational]) -> (Vec<BigRational>, BigRational) {
        let cols = self.cols();
        let mut rc = cost.to_vec();
        let mut value = BigRational::zero();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..cols {
                if !row[j].is_zero() {
                    rc[j] -= cb * &row[j];
                }
            }
            value += cb * &row[cols];
        }
        (rc, value)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols();
        let inv = BigRational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for j in 0..=cols {
                if !pivot_row[j].is_zero() {
                    row[j] -= &factor * &pivot_row[j];
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule simplex on `cost`; columns with `allowed[j] == false` never enter.
    /// Returns false on unboundedness.
    fn optimize(&mut self, cost: &[BigRational], allowed: &[bool]) -> bool {
        let cols = self.cols();
        loop {
            let (rc, _) = self.reduced_costs(cost);
            let Some(enter) = (0..cols).find(|&j| allowed[j] && rc[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[enter].is_positive() {
                    continue;
                }
                let ratio = &row[cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }

    fn run(mut self, lp: &RationalLp) -> LpOutcome {
        let cols = self.cols();
        let m_input = lp.constraints.len();
        let phase1: Vec<BigRational> = self
            .kinds
            .iter()
            .map(|k| if *k == Column::Artificial { rat(1) } else { BigRational::zero() })
            .collect();
        let all = vec![true; cols];
        self.optimize(&phase1, &all);
        let (rc, value) = self.reduced_costs(&phase1);
        if value.is_positive() {
            // y_i = c_{init_i} - rc_{init_i} since the starting column of row i is e_i.
            let multipliers = (0..m_input)
                .map(|i| {
                    let j = self.initial_col[i];
                    let y = &phase1[j] - &rc[j];
                    y * &self.row_sign[i]
                })
                .collect();
            return LpOutcome::Infeasible(FarkasCertificate { multipliers });
        }

        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < self.rows.len() {
            if self.kinds[self.basis[r]] == Column::Artificial {
                let col = (0..cols).find(|&j| self.kinds[j] != Column::Artificial && !self.rows[r][j].is_zero());
                match col {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.basis.remove(r);
                        self.origin.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }

        let mut cost = vec![BigRational::zero(); cols];
        cost[..lp.num_vars].clone_from_slice(&lp.objective);
        let allowed: Vec<bool> = self.kinds.iter().map(|k| *k != Column::Artificial).collect();
        if !self.optimize(&cost, &allowed) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![BigRational::zero(); lp.num_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < lp.num_vars {
                x[b] = row[cols].clone();
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal(LpSolution { x, value })
    }
}
