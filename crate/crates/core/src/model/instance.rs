use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row<S> {
    pub name: String,
    pub coeffs: Vec<(usize, S)>,
    pub sense: Sense,
    pub rhs: S,
}

impl<S: Scalar> Row<S> {
    pub fn activity(&self, x: &[S]) -> S {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[S]) -> S {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => (act - self.rhs).max(S::zero()),
            Sense::Ge => (self.rhs - act).max(S::zero()),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

/// A minimisation MILP: bounded columns, sparse rows, linear objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilpInstance<S> {
    pub name: String,
    pub col_names: Vec<String>,
    pub lower: Vec<S>,
    pub upper: Vec<S>,
    pub integer: Vec<bool>,
    pub objective: Vec<S>,
    pub rows: Vec<Row<S>>,
}

impl<S: Scalar> MilpInstance<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            col_names: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            integer: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn add_col(&mut self, name: impl Into<String>, lower: S, upper: S, obj: S, integer: bool) -> usize {
        self.col_names.push(name.into());
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.push(obj);
        self.integer.push(integer);
        self.col_names.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, coeffs: Vec<(usize, S)>, sense: Sense, rhs: S) -> usize {
        self.rows.push(Row { name: name.into(), coeffs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn num_cols(&self) -> usize {
        self.col_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs.len()).sum()
    }

    pub fn objective_value(&self, x: &[S]) -> S {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Integer columns whose bounds leave more than one value open.
    pub fn free_integer_cols(&self) -> Vec<usize> {
        (0..self.num_cols())
            .filter(|&j| self.integer[j] && self.upper[j] - self.lower[j] > S::int_tol())
            .collect()
    }

    /// Copy with every integrality flag cleared.
    pub fn relaxed(&self) -> Self {
        let mut r = self.clone();
        r.integer.iter_mut().for_each(|f| *f = false);
        r
    }

    pub fn fix(&mut self, col: usize, value: S) {
        self.lower[col] = value;
        self.upper[col] = value;
    }

    pub fn col_index(&self, name: &str) -> Option<usize> {
        self.col_names.iter().position(|n| n == name)
    }

    pub fn row_index(&self, name: &str) -> Option<usize> {
        self.rows.iter().position(|r| r.name == name)
    }

    /// Convert every coefficient to another scalar type.
    pub fn cast<T: Scalar>(&self) -> MilpInstance<T> {
        let c = |v: S| T::of(v.as_f64());
        MilpInstance {
            name: self.name.clone(),
            col_names: self.col_names.clone(),
            lower: self.lower.iter().map(|&v| c(v)).collect(),
            upper: self.upper.iter().map(|&v| c(v)).collect(),
            integer: self.integer.clone(),
            objective: self.objective.iter().map(|&v| c(v)).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| Row {
                    name: r.name.clone(),
                    coeffs: r.coeffs.iter().map(|&(j, a)| (j, c(a))).collect(),
                    sense: r.sense,
                    rhs: c(r.rhs),
                })
                .collect(),
        }
    }

    /// Structural checks: column references, bound order, name table sizes.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.num_cols();
        if [self.lower.len(), self.upper.len(), self.integer.len(), self.objective.len()]
            .iter()
            .any(|&len| len != n)
        {
            return Err("column tables differ in length".into());
        }
        for j in 0..n {
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return Err(format!("column {} has lower > upper", self.col_names[j]));
            }
            if !self.objective[j].is_finite() {
                return Err(format!("column {} has a non-finite cost", self.col_names[j]));
            }
        }
        for r in &self.rows {
            if let Some(&(j, _)) = r.coeffs.iter().find(|&&(j, a)| j >= n || !a.is_finite()) {
                return Err(format!("row {} references invalid column {j}", r.name));
            }
            if !r.rhs.is_finite() {
                return Err(format!("row {} has a non-finite right-hand side", r.name));
            }
        }
        Ok(())
    }

    /// Largest bound, row or integrality violation of `x`, with a label.
    pub fn max_violation(&self, x: &[S]) -> (S, Option<String>) {
        let mut worst = S::zero();
        let mut label = None;
        let mut note = |v: S, what: &dyn Fn() -> String| {
            if v > worst {
                worst = v;
                label = Some(what());
            }
        };
        for j in 0..self.num_cols() {
            let v = (self.lower[j] - x[j]).max(x[j] - self.upper[j]).max(S::zero());
            note(v, &|| format!("bound {}", self.col_names[j]));
            if self.integer[j] {
                note((x[j] - x[j].round()).abs(), &|| format!("integrality {}", self.col_names[j]));
            }
        }
        for r in &self.rows {
            note(r.violation(x), &|| format!("row {}", r.name));
        }
        (worst, label)
    }

    pub fn to_json(&self) -> String
    where
        S: Serialize,
    {
        serde_json::to_string(self).expect("instance serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn violation_by_sense() {
        let mut m = MilpInstance::<f64>::new("t");
        let x = m.add_col("x", 0.0, 10.0, 1.0, false);
        let y = m.add_col("y", 0.0, 1.0, 0.0, true);
        m.add_row("le", vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        m.add_row("eq", vec![(x, 1.0)], Sense::Eq, 3.0);
        let (v, what) = m.max_violation(&[3.0, 1.0]);
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(what.as_deref(), Some("row le"));
        assert_eq!(m.max_violation(&[3.0, 0.0]).0, 0.0);
        assert_eq!(m.free_integer_cols(), vec![y]);
        m.fix(y, 1.0);
        assert!(m.free_integer_cols().is_empty());
        assert!(m.validate().is_ok());
    }
}
