//! Conflict-driven search for 0-1 linear maximization with lazy constraints.
//!
//! Constraints are normalized to `sum(a * lit) >= d` with positive `a`.
//! Those with all coefficients at least `d` become clauses with two watched
//! literals; the rest keep an exact slack counter that is updated as
//! literals are assigned and restored on backtracking. Propagations from
//! counter constraints are explained on demand by a small set of false
//! literals, so conflict analysis works on clauses only (first UIP).
//!
//! Optimization is linear search: every new incumbent tightens an
//! objective constraint `sum(w * x) >= best + 1` at the root, and the first
//! refutation proves the incumbent optimal. The separator is called on
//! every complete assignment; its constraints are added and the search
//! backjumps to the deepest level where all of them hold.

use std::time::{Duration, Instant};

use thiserror::Error;

use super::model::{Cmp, LinearConstraint, PbModel, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    TimeLimit,
    NodeLimit,
    MemoryLimit,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::MemoryLimit => "memory_limit",
            SolveStatus::Infeasible => "infeasible",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Decisions taken, i.e. branch nodes opened.
    pub bnb_nodes: u64,
    pub conflicts: u64,
    pub lazy_constraints_added: u64,
    pub separator_calls: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub incumbent: Option<Vec<bool>>,
    pub objective: Option<i64>,
    pub dual_bound: i64,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("separator returned a constraint the assignment satisfies: {0:?}")]
    SeparatorContractViolation(LinearConstraint),
    #[error("branch callback chose variable {0}, which is not free")]
    BranchContractViolation(VarId),
    #[error("internal check failed: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct Limits {
    pub time: Option<Duration>,
    pub memory_bytes: Option<usize>,
    pub nodes: Option<u64>,
}


impl Limits {
    pub fn time(secs: f64) -> Self {
        Limits { time: Some(Duration::from_secs_f64(secs)), ..Default::default() }
    }
}

/// Read access to the current partial assignment for branch callbacks.
pub struct SearchView<'a> {
    values: &'a [i8],
}

impl<'a> SearchView<'a> {
    /// A view of raw values: -1 free, 0 false, 1 true.
    #[cfg(test)]
    pub(crate) fn new(values: &'a [i8]) -> Self {
        SearchView { values }
    }

    pub fn value(&self, v: VarId) -> Option<bool> {
        match self.values[v] {
            -1 => None,
            x => Some(x == 1),
        }
    }

    pub fn is_free(&self, v: VarId) -> bool {
        self.values[v] == -1
    }
}

pub trait BranchCallback {
    /// A free variable and the value to try first, or `None` to defer to
    /// the default rule.
    fn choose(&mut self, view: &SearchView) -> Option<(VarId, bool)>;
}

pub enum BranchRule {
    /// Activity-based choice; initial order by objective coefficient
    /// descending, then id.
    Default,
    Custom(Box<dyn BranchCallback>),
}

type Lit = u32;

fn mk_lit(v: VarId, value: bool) -> Lit {
    (2 * v + usize::from(!value)) as Lit
}

fn lit_var(l: Lit) -> usize {
    (l >> 1) as usize
}

fn neg(l: Lit) -> Lit {
    l ^ 1
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Reason {
    Decision,
    Clause(u32),
    Pb(u32),
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
}

struct PbCons {
    /// Sorted by coefficient, largest first.
    lits: Vec<Lit>,
    coefs: Vec<i64>,
    degree: i64,
    sum: i64,
    slack: i64,
}

enum Normalized {
    Trivial,
    Infeasible,
    Clause(Vec<Lit>),
    Pb(Vec<(i64, Lit)>, i64),
}

/// Rewrites `terms >= rhs` over literals with positive coefficients.
fn normalize_ge(terms: &[(i64, VarId)], rhs: i64, saturate: bool) -> Normalized {
    let mut degree = rhs;
    let mut out: Vec<(i64, Lit)> = Vec::with_capacity(terms.len());
    for &(c, v) in terms {
        if c > 0 {
            out.push((c, mk_lit(v, true)));
        } else if c < 0 {
            out.push((-c, mk_lit(v, false)));
            degree -= c;
        }
    }
    if degree <= 0 {
        return Normalized::Trivial;
    }
    if saturate {
        for t in &mut out {
            t.0 = t.0.min(degree);
        }
    }
    let sum: i64 = out.iter().map(|t| t.0).sum();
    if sum < degree {
        return Normalized::Infeasible;
    }
    if out.iter().all(|t| t.0 >= degree) {
        return Normalized::Clause(out.into_iter().map(|t| t.1).collect());
    }
    out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    Normalized::Pb(out, degree)
}

fn normalize(c: &LinearConstraint) -> Vec<Normalized> {
    let negated: Vec<(i64, VarId)> = c.terms.iter().map(|&(a, v)| (-a, v)).collect();
    match c.cmp {
        Cmp::Ge => vec![normalize_ge(&c.terms, c.rhs, true)],
        Cmp::Le => vec![normalize_ge(&negated, -c.rhs, true)],
        Cmp::Eq => vec![normalize_ge(&c.terms, c.rhs, true), normalize_ge(&negated, -c.rhs, true)],
    }
}

/// Max-heap of variables keyed by activity.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: Vec::with_capacity(n), pos: vec![NOT_IN_HEAP; n] }
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if !Self::better(act, v, self.heap[p]) {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i]] = i;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && Self::better(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::better(act, self.heap[c], v) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i]] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = i;
        self.up(i, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v], act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(mut i: u64) -> u64 {
    // Finite subsequences of the Luby sequence: 1 1 2 1 1 2 4 ...
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}

enum SearchOutcome {
    Solution,
    Unsat,
    Limit(SolveStatus),
}

struct Engine {
    n: usize,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<u32>>,
    pbs: Vec<PbCons>,
    occ: Vec<Vec<(u32, i64)>>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    objective_pb: Option<u32>,
    num_learnts: usize,
    max_learnts: usize,
    memory: usize,
}

impl Engine {
    fn new(n: usize, objective: &[i64]) -> Self {
        // Initial activities encode the order "objective descending, then id".
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (-objective[v], v));
        let mut activity = vec![0.0; n];
        for (rank, &v) in order.iter().enumerate() {
            activity[v] = (n - rank) as f64 * 1e-6;
        }
        let mut heap = VarHeap::new(n);
        for v in 0..n {
            heap.insert(v, &activity);
        }
        Engine {
            n,
            values: vec![-1; n],
            level: vec![0; n],
            reason: vec![Reason::Decision; n],
            trail_pos: vec![0; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            pbs: Vec::new(),
            occ: vec![Vec::new(); 2 * n],
            activity,
            var_inc: 1.0,
            cla_inc: 1.0,
            heap,
            phase: objective.iter().map(|&c| c > 0).collect(),
            seen: vec![false; n],
            unsat: false,
            objective_pb: None,
            num_learnts: 0,
            max_learnts: 4000,
            memory: n * 64,
        }
    }

    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.values[lit_var(l)];
        if v < 0 {
            -1
        } else {
            (v as u32 ^ (l & 1)) as i8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn assign(&mut self, l: Lit, reason: Reason) {
        let v = lit_var(l);
        debug_assert_eq!(self.values[v], -1);
        self.values[v] = (1 - (l & 1)) as i8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.trail.push(l);
        for &(c, a) in &self.occ[neg(l) as usize] {
            self.pbs[c as usize].slack -= a;
        }
    }

    fn backtrack(&mut self, target: u32) {
        if self.decision_level() <= target {
            return;
        }
        let lim = self.trail_lim[target as usize];
        while self.trail.len() > lim {
            let l = self.trail.pop().unwrap();
            let v = lit_var(l);
            for &(c, a) in &self.occ[neg(l) as usize] {
                self.pbs[c as usize].slack += a;
            }
            self.phase[v] = l & 1 == 0;
            self.values[v] = -1;
            self.heap.insert(v, &self.activity);
        }
        self.trail_lim.truncate(target as usize);
        self.qhead = self.trail.len();
    }

    fn new_decision(&mut self, l: Lit) {
        self.trail_lim.push(self.trail.len());
        self.assign(l, Reason::Decision);
    }

    /// Returns a conflict as a list of false literals.
    fn propagate(&mut self) -> Option<Vec<Lit>> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            if let Some(conflict) = self.propagate_clauses(false_lit) {
                self.qhead = self.trail.len();
                return Some(conflict);
            }
            let n_occ = self.occ[false_lit as usize].len();
            for i in 0..n_occ {
                let c = self.occ[false_lit as usize][i].0;
                if let Some(conflict) = self.check_pb(c) {
                    self.qhead = self.trail.len();
                    return Some(conflict);
                }
            }
        }
        None
    }

    fn propagate_clauses(&mut self, false_lit: Lit) -> Option<Vec<Lit>> {
        let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
        let mut i = 0;
        let mut j = 0;
        let mut conflict = None;
        while i < ws.len() {
            let cref = ws[i];
            i += 1;
            let c = &mut self.clauses[cref as usize];
            if c.deleted {
                continue;
            }
            if c.lits[0] == false_lit {
                c.lits.swap(0, 1);
            }
            let first = c.lits[0];
            let first_val = {
                let v = self.values[lit_var(first)];
                if v < 0 {
                    -1
                } else {
                    (v as u32 ^ (first & 1)) as i8
                }
            };
            if first_val == 1 {
                ws[j] = cref;
                j += 1;
                continue;
            }
            let mut found = None;
            for k in 2..c.lits.len() {
                let l = c.lits[k];
                let v = self.values[lit_var(l)];
                if v < 0 || (v as u32 ^ (l & 1)) == 1 {
                    found = Some(k);
                    break;
                }
            }
            if let Some(k) = found {
                c.lits.swap(1, k);
                let w = c.lits[1];
                self.watches[w as usize].push(cref);
                continue;
            }
            ws[j] = cref;
            j += 1;
            if first_val == 0 {
                conflict = Some(c.lits.clone());
                while i < ws.len() {
                    ws[j] = ws[i];
                    i += 1;
                    j += 1;
                }
                break;
            }
            self.assign(first, Reason::Clause(cref));
        }
        ws.truncate(j);
        let moved = std::mem::replace(&mut self.watches[false_lit as usize], ws);
        self.watches[false_lit as usize].extend(moved);
        conflict
    }

    fn check_pb(&mut self, c: u32) -> Option<Vec<Lit>> {
        let pb = &self.pbs[c as usize];
        if pb.slack < 0 {
            return Some(self.pb_conflict_lits(c));
        }
        if pb.coefs[0] <= pb.slack {
            return None;
        }
        let mut props = Vec::new();
        for (k, &a) in pb.coefs.iter().enumerate() {
            if a <= pb.slack {
                break;
            }
            let l = pb.lits[k];
            if self.lit_value(l) == -1 {
                props.push(l);
            }
        }
        for l in props {
            self.assign(l, Reason::Pb(c));
        }
        None
    }

    /// False literals of a counter constraint whose total exceeds what the
    /// constraint can afford; `before` limits them to earlier trail entries.
    fn pb_explanation(&self, c: u32, need: i64, before: usize) -> Vec<Lit> {
        let pb = &self.pbs[c as usize];
        let mut out = Vec::new();
        let mut got = 0;
        for (k, &l) in pb.lits.iter().enumerate() {
            if got >= need {
                break;
            }
            let v = lit_var(l);
            if self.lit_value(l) == 0 && self.trail_pos[v] < before {
                out.push(l);
                got += pb.coefs[k];
            }
        }
        debug_assert!(got >= need, "explanation too weak");
        out
    }

    fn pb_conflict_lits(&self, c: u32) -> Vec<Lit> {
        let pb = &self.pbs[c as usize];
        self.pb_explanation(c, pb.sum - pb.degree + 1, usize::MAX)
    }

    /// Reason of an implied literal as the false literals that forced it.
    fn reason_lits(&self, p: Lit) -> Vec<Lit> {
        let v = lit_var(p);
        match self.reason[v] {
            Reason::Decision => Vec::new(),
            Reason::Clause(c) => self.clauses[c as usize].lits.iter().copied().filter(|&l| l != p).collect(),
            Reason::Pb(c) => {
                let pb = &self.pbs[c as usize];
                let k = pb.lits.iter().position(|&l| l == p).expect("propagated literal in constraint");
                self.pb_explanation(c, pb.sum - pb.coefs[k] - pb.degree + 1, self.trail_pos[v])
            }
        }
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    /// First-UIP analysis. Returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, conflict: Vec<Lit>) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut learnt: Vec<Lit> = vec![0];
        let mut counter = 0;
        let mut lits = conflict;
        let mut idx = self.trail.len();
        let p;
        loop {
            for &q in &lits {
                let v = lit_var(q);
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[lit_var(self.trail[idx])] {
                    break;
                }
            }
            let q = self.trail[idx];
            self.seen[lit_var(q)] = false;
            counter -= 1;
            if counter == 0 {
                p = q;
                break;
            }
            lits = self.reason_lits(q);
        }
        learnt[0] = neg(p);
        // Drop literals implied by the rest of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                if i == 0 {
                    return true;
                }
                let v = lit_var(q);
                match self.reason[v] {
                    Reason::Decision => true,
                    _ => self
                        .reason_lits(neg(q))
                        .iter()
                        .any(|&r| !self.seen[lit_var(r)] && self.level[lit_var(r)] > 0),
                }
            })
            .collect();
        for &q in &learnt[1..] {
            self.seen[lit_var(q)] = false;
        }
        let mut learnt: Vec<Lit> = learnt.into_iter().zip(keep).filter(|(_, k)| *k).map(|(q, _)| q).collect();
        let mut back = 0;
        if learnt.len() > 1 {
            let mut best = 1;
            for i in 2..learnt.len() {
                if self.level[lit_var(learnt[i])] > self.level[lit_var(learnt[best])] {
                    best = i;
                }
            }
            learnt.swap(1, best);
            back = self.level[lit_var(learnt[1])];
        }
        (learnt, back)
    }

    fn lbd(&self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|&l| self.level[lit_var(l)]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn add_clause_ref(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0] as usize].push(cref);
        self.watches[lits[1] as usize].push(cref);
        self.memory += 32 + 4 * lits.len();
        let lbd = if learnt { self.lbd(&lits) } else { 0 };
        self.clauses.push(Clause { lits, learnt, lbd, activity: 0.0, deleted: false });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    /// Level to backjump to before attaching a new clause so that it is not
    /// violated and any unit propagation happens at the level where the
    /// clause became unit. `None` if it is violated at the root.
    fn target_clause(&self, lits: &[Lit]) -> Option<u32> {
        let cur = self.decision_level();
        let mut falses: Vec<u32> = Vec::with_capacity(lits.len());
        let mut nonfalse: Vec<Lit> = Vec::new();
        for &l in lits {
            if self.lit_value(l) == 0 {
                falses.push(self.level[lit_var(l)]);
            } else {
                nonfalse.push(l);
            }
        }
        falses.sort_unstable();
        match nonfalse.len() {
            0 => {
                let k = falses.len();
                let fk = falses[k - 1];
                if fk == 0 {
                    return None;
                }
                let fk1 = if k >= 2 { falses[k - 2] } else { 0 };
                Some(if fk1 < fk { fk1 } else { fk - 1 })
            }
            1 => {
                let x = nonfalse[0];
                let fk1 = falses.last().copied().unwrap_or(0);
                if self.lit_value(x) == 1 && self.level[lit_var(x)] <= fk1 {
                    Some(cur)
                } else {
                    Some(fk1.min(cur))
                }
            }
            _ => Some(cur),
        }
    }

    /// Like `target_clause` for counter constraints, conservatively: jumps
    /// below the first level where the constraint could propagate.
    fn target_pb(&self, terms: &[(i64, Lit)], degree: i64) -> Option<u32> {
        let sum: i64 = terms.iter().map(|t| t.0).sum();
        let max_coef = terms[0].0;
        let mut falses: Vec<(u32, i64)> = terms
            .iter()
            .filter(|t| self.lit_value(t.1) == 0)
            .map(|t| (self.level[lit_var(t.1)], t.0))
            .collect();
        falses.sort_unstable();
        let mut slack = sum - degree;
        let root: i64 = falses.iter().filter(|f| f.0 == 0).map(|f| f.1).sum();
        slack -= root;
        if slack < 0 {
            return None;
        }
        if slack < max_coef {
            return Some(0);
        }
        for &(lv, a) in falses.iter().filter(|f| f.0 > 0) {
            slack -= a;
            if slack < max_coef {
                return Some(lv - 1);
            }
        }
        Some(self.decision_level())
    }

    /// Attaches a clause to the current state, propagating it if unit.
    /// The caller has backjumped to the level given by `target_clause`.
    fn attach_clause(&mut self, mut lits: Vec<Lit>, learnt: bool) {
        if lits.len() == 1 {
            if self.lit_value(lits[0]) == -1 {
                self.assign(lits[0], Reason::Decision);
            }
            return;
        }
        // True literals by level, then unassigned, then false by level descending.
        let key = |e: &Engine, l: Lit| match e.lit_value(l) {
            1 => (0, e.level[lit_var(l)]),
            -1 => (1, 0),
            _ => (2, u32::MAX - e.level[lit_var(l)]),
        };
        lits.sort_by_key(|&l| key(self, l));
        let first_val = self.lit_value(lits[0]);
        let second_val = self.lit_value(lits[1]);
        let cref = self.add_clause_ref(lits, learnt);
        if first_val == -1 && second_val == 0 {
            let l = self.clauses[cref as usize].lits[0];
            self.assign(l, Reason::Clause(cref));
        }
    }

    fn attach_pb(&mut self, terms: Vec<(i64, Lit)>, degree: i64) -> u32 {
        let c = self.pbs.len() as u32;
        let sum: i64 = terms.iter().map(|t| t.0).sum();
        let mut slack = sum - degree;
        for &(a, l) in &terms {
            self.occ[l as usize].push((c, a));
            if self.lit_value(l) == 0 {
                slack -= a;
            }
        }
        self.memory += 48 + 16 * terms.len();
        self.pbs.push(PbCons {
            lits: terms.iter().map(|t| t.1).collect(),
            coefs: terms.iter().map(|t| t.0).collect(),
            degree,
            sum,
            slack,
        });
        c
    }

    /// Adds constraints that hold globally, backjumping as needed. Pieces
    /// are attached one at a time so each sees the propagations of the
    /// previous ones.
    fn add_constraints(&mut self, cons: &[LinearConstraint]) {
        for c in cons {
            for piece in normalize(c) {
                if self.unsat {
                    return;
                }
                match piece {
                    Normalized::Trivial => {}
                    Normalized::Infeasible => self.unsat = true,
                    Normalized::Clause(lits) => match self.target_clause(&lits) {
                        None => self.unsat = true,
                        Some(t) => {
                            self.backtrack(t);
                            self.attach_clause(lits, false);
                        }
                    },
                    Normalized::Pb(terms, d) => match self.target_pb(&terms, d) {
                        None => self.unsat = true,
                        Some(t) => {
                            self.backtrack(t);
                            let c = self.attach_pb(terms, d);
                            if self.check_pb(c).is_some() {
                                self.unsat = true;
                            }
                        }
                    },
                }
            }
        }
    }

    /// Sets `sum(w * x) >= bound` at the root.
    fn tighten_objective(&mut self, objective: &[i64], bound: i64) {
        debug_assert_eq!(self.decision_level(), 0);
        let terms: Vec<(i64, VarId)> = objective.iter().enumerate().filter(|(_, &w)| w != 0).map(|(v, &w)| (w, v)).collect();
        match self.objective_pb {
            None => match normalize_ge(&terms, bound, false) {
                Normalized::Trivial => {}
                Normalized::Infeasible => self.unsat = true,
                Normalized::Clause(lits) => {
                    if lits.iter().all(|&l| self.lit_value(l) == 0) {
                        self.unsat = true;
                    } else {
                        self.attach_clause(lits, false);
                    }
                }
                Normalized::Pb(t, d) => {
                    let c = self.attach_pb(t, d);
                    self.objective_pb = Some(c);
                    if self.check_pb(c).is_some() {
                        self.unsat = true;
                    }
                }
            },
            Some(c) => {
                let pb = &mut self.pbs[c as usize];
                let neg_sum: i64 = terms.iter().filter(|t| t.0 < 0).map(|t| -t.0).sum();
                let new_degree = bound + neg_sum;
                pb.slack -= new_degree - pb.degree;
                pb.degree = new_degree;
                if self.check_pb(c).is_some() {
                    self.unsat = true;
                }
            }
        }
    }

    fn reduce_learnts(&mut self) {
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&c| {
                let cl = &self.clauses[c as usize];
                cl.learnt && !cl.deleted && cl.lbd > 2
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (x, y) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            y.lbd.cmp(&x.lbd).then(x.activity.partial_cmp(&y.activity).unwrap())
        });
        let remove = cands.len() / 2;
        for &c in &cands[..remove] {
            let first = self.clauses[c as usize].lits[0];
            let v = lit_var(first);
            let locked = self.lit_value(first) == 1 && self.reason[v] == Reason::Clause(c);
            if !locked {
                let cl = &mut self.clauses[c as usize];
                cl.deleted = true;
                self.memory = self.memory.saturating_sub(32 + 4 * cl.lits.len());
                cl.lits = vec![cl.lits[0], cl.lits[1]];
                self.num_learnts -= 1;
            }
        }
    }

    fn values_vec(&self) -> Vec<bool> {
        self.values.iter().map(|&v| v == 1).collect()
    }
}

struct Run<'a> {
    engine: Engine,
    model: &'a mut PbModel,
    rule: &'a mut BranchRule,
    limits: &'a Limits,
    start: Instant,
    stats: SolveStats,
    separator: Option<Box<dyn super::model::LazySeparator>>,
    restart_count: u64,
    conflicts_since_restart: u64,
}

impl Run<'_> {
    fn limit_hit(&self) -> Option<SolveStatus> {
        if let Some(t) = self.limits.time {
            if self.start.elapsed() >= t {
                return Some(SolveStatus::TimeLimit);
            }
        }
        if let Some(nl) = self.limits.nodes {
            if self.stats.bnb_nodes >= nl {
                return Some(SolveStatus::NodeLimit);
            }
        }
        if let Some(mb) = self.limits.memory_bytes {
            if self.engine.memory >= mb {
                return Some(SolveStatus::MemoryLimit);
            }
        }
        None
    }

    /// Runs the separator on a complete assignment. Returns the violated
    /// constraints it produced, after checking the contract.
    fn separate(&mut self, assignment: &[bool]) -> Result<Vec<LinearConstraint>, SolveError> {
        let Some(sep) = self.separator.as_mut() else { return Ok(Vec::new()) };
        self.stats.separator_calls += 1;
        let cons = sep.separate(assignment);
        for c in &cons {
            if c.is_satisfied(assignment) {
                return Err(SolveError::SeparatorContractViolation(c.clone()));
            }
        }
        self.stats.lazy_constraints_added += cons.len() as u64;
        for c in &cons {
            self.model.push_lazy(c.clone());
        }
        Ok(cons)
    }

    fn pick_branch(&mut self) -> Result<Option<Lit>, SolveError> {
        if let BranchRule::Custom(cb) = self.rule {
            let view = SearchView { values: &self.engine.values };
            if let Some((v, value)) = cb.choose(&view) {
                if v >= self.engine.n || self.engine.values[v] != -1 {
                    return Err(SolveError::BranchContractViolation(v));
                }
                return Ok(Some(mk_lit(v, value)));
            }
        }
        while let Some(v) = self.engine.heap.pop(&self.engine.activity) {
            if self.engine.values[v] == -1 {
                return Ok(Some(mk_lit(v, self.engine.phase[v])));
            }
        }
        Ok(None)
    }

    fn search(&mut self) -> Result<SearchOutcome, SolveError> {
        let mut steps = 0u64;
        loop {
            if self.engine.unsat {
                return Ok(SearchOutcome::Unsat);
            }
            if let Some(conflict) = self.engine.propagate() {
                self.stats.conflicts += 1;
                let top = conflict.iter().map(|&l| self.engine.level[lit_var(l)]).max().unwrap_or(0);
                if top == 0 {
                    self.engine.unsat = true;
                    return Ok(SearchOutcome::Unsat);
                }
                self.engine.backtrack(top);
                let (learnt, back) = self.engine.analyze(conflict);
                self.engine.backtrack(back);
                if learnt.len() == 1 {
                    self.engine.assign(learnt[0], Reason::Decision);
                } else {
                    let first = learnt[0];
                    let cref = self.engine.add_clause_ref(learnt, true);
                    self.engine.clauses[cref as usize].activity = self.engine.cla_inc;
                    self.engine.assign(first, Reason::Clause(cref));
                }
                self.engine.var_inc /= 0.95;
                self.engine.cla_inc /= 0.999;
                self.conflicts_since_restart += 1;
                if self.conflicts_since_restart >= 100 * luby(self.restart_count) {
                    self.restart_count += 1;
                    self.conflicts_since_restart = 0;
                    self.engine.backtrack(0);
                }
                if self.engine.num_learnts >= self.engine.max_learnts {
                    self.engine.reduce_learnts();
                    self.engine.max_learnts = self.engine.max_learnts * 11 / 10;
                }
                continue;
            }
            steps += 1;
            let node_cap = self.limits.nodes.is_some_and(|nl| self.stats.bnb_nodes >= nl);
            if node_cap || steps.is_multiple_of(32) {
                if let Some(status) = self.limit_hit() {
                    return Ok(SearchOutcome::Limit(status));
                }
            }
            match self.pick_branch()? {
                Some(l) => {
                    self.stats.bnb_nodes += 1;
                    self.engine.new_decision(l);
                }
                None => {
                    let assignment = self.engine.values_vec();
                    let cons = self.separate(&assignment)?;
                    if cons.is_empty() {
                        return Ok(SearchOutcome::Solution);
                    }
                    self.engine.add_constraints(&cons);
                    if let Some(status) = self.limit_hit() {
                        return Ok(SearchOutcome::Limit(status));
                    }
                }
            }
        }
    }

    /// Upper bound from root-level fixings and the objective constraint.
    fn trivial_bound(&self) -> i64 {
        self.model
            .objective()
            .iter()
            .enumerate()
            .map(|(v, &w)| match self.engine.values[v] {
                -1 => w.max(0),
                x if self.engine.level[v] == 0 => {
                    if x == 1 {
                        w
                    } else {
                        0
                    }
                }
                _ => w.max(0),
            })
            .sum()
    }
}

/// Solves the model to optimality or until a limit is hit. Constraints
/// found by the separator are appended to the model's lazy constraints.
pub fn solve(model: &mut PbModel, rule: &mut BranchRule, limits: &Limits) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let n = model.num_vars();
    let engine = Engine::new(n, model.objective());
    let separator = model.take_separator();
    let mut run = Run {
        engine,
        model,
        rule,
        limits,
        start,
        stats: SolveStats::default(),
        separator,
        restart_count: 0,
        conflicts_since_restart: 0,
    };
    let result = solve_inner(&mut run);
    let sep = run.separator.take();
    run.model.restore_separator(sep);
    result
}

fn solve_inner(run: &mut Run) -> Result<SolveResult, SolveError> {
    let known: Vec<LinearConstraint> = run.model.all_constraints().cloned().collect();
    run.engine.add_constraints(&known);

    let mut best: Option<(Vec<bool>, i64)> = None;
    if let Some(ws) = run.model.warm_start().map(|w| w.to_vec()) {
        if run.model.first_violated(&ws).is_none() {
            let cons = run.separate(&ws)?;
            if cons.is_empty() {
                let obj = run.model.objective_value(&ws);
                best = Some((ws.clone(), obj));
            } else {
                run.engine.add_constraints(&cons);
            }
            run.engine.phase = ws;
        } else {
            log::info!("warm start violates a model constraint, ignored");
        }
    }
    let objective: Vec<i64> = run.model.objective().to_vec();
    let mut dual = run.trivial_bound();
    let status = loop {
        if let Some((_, obj)) = &best {
            run.engine.backtrack(0);
            run.engine.tighten_objective(&objective, obj + 1);
        }
        if !run.engine.unsat {
            dual = dual.min(run.trivial_bound());
        }
        match run.search()? {
            SearchOutcome::Solution => {
                let a = run.engine.values_vec();
                let obj = run.model.objective_value(&a);
                if let Some(i) = run.model.first_violated(&a) {
                    return Err(SolveError::Internal(format!("solution violates constraint {i}")));
                }
                if let Some((_, b)) = &best {
                    if obj <= *b {
                        return Err(SolveError::Internal(format!("solution {obj} does not improve {b}")));
                    }
                }
                log::debug!("incumbent {obj} after {} conflicts", run.stats.conflicts);
                run.engine.phase = a.clone();
                best = Some((a, obj));
            }
            SearchOutcome::Unsat => break if best.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible },
            SearchOutcome::Limit(s) => break s,
        }
    };
    let objective_value = best.as_ref().map(|b| b.1);
    let dual_bound = match (status, objective_value) {
        (SolveStatus::Optimal, Some(o)) => o,
        (SolveStatus::Infeasible, _) => i64::MIN,
        (_, Some(o)) => dual.max(o),
        (_, None) => dual,
    };
    if let Some((a, _)) = &best {
        if let Some(i) = run.model.first_violated(a) {
            return Err(SolveError::Internal(format!("incumbent violates constraint {i}")));
        }
    }
    run.stats.wall_time = run.start.elapsed();
    Ok(SolveResult {
        status,
        incumbent: best.map(|b| b.0),
        objective: objective_value,
        dual_bound,
        stats: run.stats.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_default(m: &mut PbModel) -> SolveResult {
        solve(m, &mut BranchRule::Default, &Limits::default()).unwrap()
    }

    #[test]
    fn packing() {
        let mut m = PbModel::new();
        let x = m.add_var("x0", 1);
        let y = m.add_var("x1", 1);
        m.add_constraint(LinearConstraint::le([(1, x), (1, y)], 1));
        let r = solve_default(&mut m);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(1));
        assert_eq!(r.dual_bound, 1);
    }

    #[test]
    fn unconstrained() {
        let mut m = PbModel::new();
        for i in 0..3 {
            m.add_var(format!("x{i}"), 1);
        }
        let r = solve_default(&mut m);
        assert_eq!(r.objective, Some(3));
        assert_eq!(r.incumbent, Some(vec![true; 3]));
    }

    #[test]
    fn infeasible() {
        let mut m = PbModel::new();
        let x = m.add_var("x", 1);
        m.add_constraint(LinearConstraint::ge([(1, x)], 2));
        assert_eq!(solve_default(&mut m).status, SolveStatus::Infeasible);
    }

    #[test]
    fn lazy_constraints_are_enforced() {
        let mut m = PbModel::new();
        let v: Vec<_> = (0..4).map(|i| m.add_var(format!("x{i}"), 1)).collect();
        // Forbid any two adjacent ones in a 4-cycle, lazily.
        let vs = v.clone();
        m.set_separator(Box::new(move |a: &[bool]| {
            (0..4)
                .filter(|&i| a[vs[i]] && a[vs[(i + 1) % 4]])
                .map(|i| LinearConstraint::le([(1, vs[i]), (1, vs[(i + 1) % 4])], 1))
                .collect()
        }));
        let r = solve_default(&mut m);
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, Some(2));
        assert!(r.stats.lazy_constraints_added > 0);
        assert!(!m.lazy_constraints().is_empty());
        assert!(m.has_separator());
    }

    #[test]
    fn bad_separator_is_reported() {
        let mut m = PbModel::new();
        let x = m.add_var("x", 1);
        m.set_separator(Box::new(move |_: &[bool]| vec![LinearConstraint::le([(1, x)], 1)]));
        assert!(matches!(
            solve(&mut m, &mut BranchRule::Default, &Limits::default()),
            Err(SolveError::SeparatorContractViolation(_))
        ));
    }

    #[test]
    fn node_limit_keeps_incumbent() {
        let mut m = PbModel::new();
        let v: Vec<_> = (0..30).map(|i| m.add_var(format!("x{i}"), 1 + i as i64 % 7)).collect();
        for i in 0..29 {
            m.add_constraint(LinearConstraint::le([(1, v[i]), (1, v[i + 1])], 1));
        }
        let mut ws = vec![false; 30];
        ws[0] = true;
        m.set_warm_start(ws);
        let r = solve(&mut m, &mut BranchRule::Default, &Limits { nodes: Some(1), ..Default::default() }).unwrap();
        assert_eq!(r.status, SolveStatus::NodeLimit);
        assert!(r.objective.unwrap() >= 1);
        assert!(r.dual_bound >= r.objective.unwrap());
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }
}
