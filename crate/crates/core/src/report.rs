//! Pass/fail reports shared by the checking modules.

use serde::Serialize;
use serde_json::Value;

use crate::linalg::Matrix;
use crate::scalars::Field;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub relation: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// On failure, the offending difference (or the value that failed).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn flag(&mut self, relation: impl Into<String>, pass: bool) {
        self.checks.push(Check { relation: relation.into(), pass, detail: None, witness: None });
    }

    pub fn flag_with(&mut self, relation: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { relation: relation.into(), pass, detail: Some(detail.into()), witness: None });
    }

    /// Records `lhs == rhs` (exactly, or within `tol` in approximate mode).
    pub fn matrices_equal<F: Field>(&mut self, relation: impl Into<String>, lhs: &Matrix<F>, rhs: &Matrix<F>, tol: f64) {
        let pass = lhs.close(rhs, tol);
        let witness = (!pass).then(|| match lhs.try_sub(rhs) {
            Ok(diff) => serde_json::to_value(&diff).unwrap_or(Value::Null),
            Err(e) => Value::String(e.to_string()),
        });
        self.checks.push(Check { relation: relation.into(), pass, detail: None, witness });
    }

    pub fn is_zero<F: Field>(&mut self, relation: impl Into<String>, m: &Matrix<F>, tol: f64) {
        let pass = m.is_zero_within(tol);
        let witness = (!pass).then(|| serde_json::to_value(m).unwrap_or(Value::Null));
        self.checks.push(Check { relation: relation.into(), pass, detail: None, witness });
    }

    pub fn scalars_equal<F: Field>(&mut self, relation: impl Into<String>, lhs: &F, rhs: &F, tol: f64) {
        let pass = lhs.close(rhs, tol);
        let detail = (!pass).then(|| format!("{} != {}", lhs.to_scalar(), rhs.to_scalar()));
        self.checks.push(Check { relation: relation.into(), pass, detail, witness: None });
    }

    pub fn vectors_equal<F: Field>(&mut self, relation: impl Into<String>, lhs: &[F], rhs: &[F], tol: f64) {
        let pass = lhs.len() == rhs.len() && lhs.iter().zip(rhs).all(|(a, b)| a.close(b, tol));
        let witness = (!pass).then(|| {
            let show = |v: &[F]| v.iter().map(|x| x.to_scalar().to_string()).collect::<Vec<_>>();
            serde_json::json!({ "lhs": show(lhs), "rhs": show(rhs) })
        });
        self.checks.push(Check { relation: relation.into(), pass, detail: None, witness });
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}
