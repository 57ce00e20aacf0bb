//! Binary linear models with named variables and lazy constraints.

use std::collections::HashMap;
use std::fmt;

pub type VarId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        })
    }
}

/// `sum(coef * x) cmp rhs`. Terms are kept sorted by variable with no
/// duplicates and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, VarId)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(terms: impl IntoIterator<Item = (i64, VarId)>, cmp: Cmp, rhs: i64) -> Self {
        let mut terms: Vec<(i64, VarId)> = terms.into_iter().collect();
        terms.sort_by_key(|&(_, v)| v);
        let mut merged: Vec<(i64, VarId)> = Vec::with_capacity(terms.len());
        for (c, v) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == v => last.0 += c,
                _ => merged.push((c, v)),
            }
        }
        merged.retain(|&(c, _)| c != 0);
        LinearConstraint { terms: merged, cmp, rhs }
    }

    pub fn le(terms: impl IntoIterator<Item = (i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Cmp::Le, rhs)
    }

    pub fn ge(terms: impl IntoIterator<Item = (i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Cmp::Ge, rhs)
    }

    pub fn eq(terms: impl IntoIterator<Item = (i64, VarId)>, rhs: i64) -> Self {
        Self::new(terms, Cmp::Eq, rhs)
    }

    pub fn lhs(&self, assignment: &[bool]) -> i64 {
        self.terms.iter().filter(|&&(_, v)| assignment[v]).map(|&(c, _)| c).sum()
    }

    pub fn is_satisfied(&self, assignment: &[bool]) -> bool {
        let lhs = self.lhs(assignment);
        match self.cmp {
            Cmp::Le => lhs <= self.rhs,
            Cmp::Ge => lhs >= self.rhs,
            Cmp::Eq => lhs == self.rhs,
        }
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.terms.last().map(|&(_, v)| v)
    }
}

/// Called on complete assignments that satisfy every known constraint.
/// Must return only constraints the assignment violates; an empty list
/// accepts the assignment.
pub trait LazySeparator {
    fn separate(&mut self, assignment: &[bool]) -> Vec<LinearConstraint>;
}

impl<F: FnMut(&[bool]) -> Vec<LinearConstraint>> LazySeparator for F {
    fn separate(&mut self, assignment: &[bool]) -> Vec<LinearConstraint> {
        self(assignment)
    }
}

/// A maximization model over binary variables.
#[derive(Default)]
pub struct PbModel {
    names: Vec<String>,
    index: HashMap<String, VarId>,
    objective: Vec<i64>,
    constraints: Vec<LinearConstraint>,
    lazy: Vec<LinearConstraint>,
    separator: Option<Box<dyn LazySeparator>>,
    warm_start: Option<Vec<bool>>,
}

impl fmt::Debug for PbModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PbModel")
            .field("vars", &self.names.len())
            .field("constraints", &self.constraints.len())
            .field("lazy", &self.lazy.len())
            .field("separator", &self.separator.is_some())
            .finish()
    }
}

impl PbModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable. Panics on a duplicate name, which is a modelling bug.
    pub fn add_var(&mut self, name: impl Into<String>, objective: i64) -> VarId {
        let name = name.into();
        let id = self.names.len();
        let previous = self.index.insert(name.clone(), id);
        assert!(previous.is_none(), "duplicate variable name {name}");
        self.names.push(name);
        self.objective.push(objective);
        id
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn objective(&self) -> &[i64] {
        &self.objective
    }

    pub fn set_objective(&mut self, v: VarId, coef: i64) {
        self.objective[v] = coef;
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) {
        debug_assert!(c.max_var().is_none_or(|v| v < self.num_vars()));
        self.constraints.push(c);
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    /// Constraints discovered by the separator in earlier solves.
    pub fn lazy_constraints(&self) -> &[LinearConstraint] {
        &self.lazy
    }

    pub(crate) fn push_lazy(&mut self, c: LinearConstraint) {
        self.lazy.push(c);
    }

    /// Explicit constraints followed by lazily discovered ones.
    pub fn all_constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.constraints.iter().chain(self.lazy.iter())
    }

    pub fn set_separator(&mut self, sep: Box<dyn LazySeparator>) {
        self.separator = Some(sep);
    }

    pub fn has_separator(&self) -> bool {
        self.separator.is_some()
    }

    pub fn take_separator(&mut self) -> Option<Box<dyn LazySeparator>> {
        self.separator.take()
    }

    pub(crate) fn restore_separator(&mut self, sep: Option<Box<dyn LazySeparator>>) {
        self.separator = sep;
    }

    pub fn set_warm_start(&mut self, assignment: Vec<bool>) {
        assert_eq!(assignment.len(), self.num_vars());
        self.warm_start = Some(assignment);
    }

    pub fn warm_start(&self) -> Option<&[bool]> {
        self.warm_start.as_deref()
    }

    pub fn objective_value(&self, assignment: &[bool]) -> i64 {
        self.objective.iter().zip(assignment).filter(|(_, &x)| x).map(|(&c, _)| c).sum()
    }

    /// Index of the first known constraint the assignment violates.
    pub fn first_violated(&self, assignment: &[bool]) -> Option<usize> {
        self.all_constraints().position(|c| !c.is_satisfied(assignment))
    }

    /// Names, objective and constraints (explicit then lazy): the data an
    /// exported file carries.
    pub fn structure(&self) -> ModelStructure {
        ModelStructure {
            names: self.names.clone(),
            objective: self.objective.clone(),
            constraints: self.all_constraints().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelStructure {
    pub names: Vec<String>,
    pub objective: Vec<i64>,
    pub constraints: Vec<LinearConstraint>,
}
