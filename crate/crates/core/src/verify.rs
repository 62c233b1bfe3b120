//! Executable checks of the preservation claims, reported as pass/fail
//! records with reproducible witnesses.
//!
//! Every check draws its random inputs from its own ChaCha stream derived from
//! the suite seed, so reports are byte-for-byte reproducible and independent of
//! which other checks run.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{average_a, average_on_subset, GroupAction};
use crate::hm::Label;
use crate::operators::{DiagVariant, Extender, OperatorKind};
use crate::pair::{Domain, PairFunction};
use crate::random;
use crate::space::Instance;
use crate::Scalar;

/// Tolerance for identities that hold by identical arithmetic.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Tolerance for claims that compare differently ordered sums.
pub const ACCUMULATED_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A failure of a claim the operator is known not to satisfy.
    ExpectedFail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<usize>,
    pub values: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub notes: String,
}

impl CheckReport {
    fn pass(name: &str, tolerance: f64, notes: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Pass,
            witness: None,
            tolerance,
            notes: notes.into(),
        }
    }

    fn fail(name: &str, tolerance: f64, witness: Witness, notes: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::Fail,
            witness: Some(witness),
            tolerance,
            notes: notes.into(),
        }
    }

    fn not_applicable(name: &str, notes: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: CheckStatus::NotApplicable,
            witness: None,
            tolerance: 0.0,
            notes: notes.into(),
        }
    }

    fn from_outcome(name: &str, tolerance: f64, outcome: Option<Witness>, notes: impl Into<String>) -> Self {
        match outcome {
            None => Self::pass(name, tolerance, notes),
            Some(w) => Self::fail(name, tolerance, w, notes),
        }
    }

    /// Marks a failure as anticipated, with the reason.
    fn expecting_failure(mut self, reason: &str) -> Self {
        if self.status == CheckStatus::Fail {
            self.status = CheckStatus::ExpectedFail;
        }
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str("failure expected: ");
        self.notes.push_str(reason);
        self
    }

    pub fn is_failure(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

fn witness(points: Vec<usize>, values: Vec<f64>, detail: impl Into<String>) -> Witness {
    Witness {
        points,
        values,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricMode {
    Pseudometric,
    Metric,
}

/// First axiom violation of `m`, checked in the order symmetry, zero
/// diagonal, nonnegativity, triangle inequality, and (metric mode) strict
/// positivity off the diagonal. Slack is `tol·max(1, max|m|)`.
pub fn metric_axiom_violation<S: Scalar>(m: &PairFunction<S>, mode: MetricMode, tol: f64) -> Option<Witness> {
    let n = m.size();
    let slack = tol * m.max_abs().as_f64().max(1.0);
    let v = |i: usize, j: usize| m.get(i, j).as_f64();
    for i in 0..n {
        for j in (i + 1)..n {
            if (v(i, j) - v(j, i)).abs() > slack || v(i, j).is_nan() {
                return Some(witness(vec![i, j], vec![v(i, j), v(j, i)], "symmetry"));
            }
        }
    }
    for i in 0..n {
        if v(i, i).abs() > slack {
            return Some(witness(vec![i, i], vec![v(i, i)], "zero diagonal"));
        }
    }
    for i in 0..n {
        for j in 0..n {
            if v(i, j) < -slack {
                return Some(witness(vec![i, j], vec![v(i, j)], "nonnegativity"));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if v(i, k) > v(i, j) + v(j, k) + slack {
                    return Some(witness(
                        vec![i, j, k],
                        vec![v(i, k), v(i, j), v(j, k)],
                        "triangle inequality",
                    ));
                }
            }
        }
    }
    if mode == MetricMode::Metric {
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j) <= S::zero() {
                    return Some(witness(vec![i, j], vec![v(i, j)], "positivity"));
                }
            }
        }
    }
    None
}

pub fn check_metric_axioms<S: Scalar>(m: &PairFunction<S>, mode: MetricMode, tol: f64) -> CheckReport {
    let name = match mode {
        MetricMode::Pseudometric => "pseudometric_axioms",
        MetricMode::Metric => "metric_axioms",
    };
    CheckReport::from_outcome(name, tol, metric_axiom_violation(m, mode, tol), "")
}

/// Parameters of [`run_invariant_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub operator: OperatorKind,
    pub variant: DiagVariant,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            operator: OperatorKind::T,
            variant: DiagVariant::BaseDiagonal,
            seed: 0,
            trials: 10,
        }
    }
}

/// Distinct pairs above the diagonal, then below it, then the diagonal.
fn pair_order(n: usize) -> impl Iterator<Item = (usize, usize)> {
    let upper = (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)));
    let lower = (0..n).flat_map(move |i| (0..i).map(move |j| (i, j)));
    upper.chain(lower).chain((0..n).map(|i| (i, i)))
}

enum InputKind {
    Arbitrary,
    NonNegative,
    Pseudometric,
    Metric,
}

struct Suite<'e, 'a, S> {
    ext: &'e Extender<'a, S>,
    inst: &'a Instance<S>,
    group: Option<&'e GroupAction>,
    cfg: SuiteConfig,
}

impl<'e, 'a, S: Scalar> Suite<'e, 'a, S> {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream);
        rng
    }

    fn op(&self) -> OperatorKind {
        self.cfg.operator
    }

    fn m(&self) -> usize {
        self.inst.subset().len()
    }

    fn n(&self) -> usize {
        self.inst.len()
    }

    fn apply(&self, p: &PairFunction<S>) -> Result<PairFunction<S>> {
        Ok(self.ext.extend(self.op(), p, self.cfg.variant, self.group)?.output)
    }

    /// Random input over `X`, projected onto invariant functions for `I`.
    fn input(&self, rng: &mut ChaCha8Rng, kind: InputKind) -> PairFunction<S> {
        let m = self.m();
        let p = match kind {
            InputKind::Arbitrary => random::random_pair_function(rng, Domain::OverX, m, -1.0, 1.0),
            InputKind::NonNegative => random::random_pair_function(rng, Domain::OverX, m, 0.0, 1.0),
            InputKind::Pseudometric => random::random_pseudometric(rng, Domain::OverX, m),
            InputKind::Metric => random::random_metric(rng, Domain::OverX, m),
        };
        self.invariant(p)
    }

    fn invariant(&self, p: PairFunction<S>) -> PairFunction<S> {
        match (self.op(), self.group) {
            (OperatorKind::I, Some(g)) => average_on_subset(&p, self.inst, g),
            _ => p,
        }
    }

    fn scaled(&self, p: &PairFunction<S>, tol: f64) -> f64 {
        tol * (1.0 + p.max_abs().as_f64())
    }

    fn extension(&self) -> Result<CheckReport> {
        let name = "extension";
        let mut rng = self.rng(1);
        let members = self.inst.subset().members();
        for _ in 0..self.cfg.trials {
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let out = self.apply(&p)?;
            let tol = self.scaled(&p, EXACT_TOLERANCE);
            for (i, j) in pair_order(self.m()) {
                let (x, x2) = (members[i], members[j]);
                let (got, want) = (out.get(x, x2).as_f64(), p.get(i, j).as_f64());
                if (got - want).abs() > tol {
                    let w = witness(vec![x, x2], vec![got, want], "output differs from input on X×X");
                    return Ok(CheckReport::fail(name, EXACT_TOLERANCE, w, "relative to 1+max|p|"));
                }
            }
        }
        Ok(CheckReport::pass(name, EXACT_TOLERANCE, "relative to 1+max|p|"))
    }

    fn linearity(&self) -> Result<CheckReport> {
        let name = "linearity";
        let notes = "entrywise, relative to max(1, |α·Op(p)| + |β·Op(q)|)";
        let mut rng = self.rng(2);
        for _ in 0..self.cfg.trials {
            let alpha: f64 = rng.gen_range(-5.0..5.0);
            let beta: f64 = rng.gen_range(-5.0..5.0);
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let q = self.input(&mut rng, InputKind::Arbitrary);
            let combo = p.combine(S::lit(alpha), &q, S::lit(beta))?;
            let lhs = self.apply(&combo)?;
            let (tp, tq) = (self.apply(&p)?, self.apply(&q)?);
            for (y, y2) in pair_order(self.n()) {
                let a = alpha * tp.get(y, y2).as_f64();
                let b = beta * tq.get(y, y2).as_f64();
                let l = lhs.get(y, y2).as_f64();
                let bound = ACCUMULATED_TOLERANCE * (a.abs() + b.abs()).max(1.0);
                if (l - (a + b)).abs() > bound {
                    let w = witness(vec![y, y2], vec![l, a + b, alpha, beta], "Op(αp+βq) ≠ αOp(p)+βOp(q)");
                    return Ok(CheckReport::fail(name, ACCUMULATED_TOLERANCE, w, notes));
                }
            }
        }
        Ok(CheckReport::pass(name, ACCUMULATED_TOLERANCE, notes))
    }

    fn positivity(&self) -> Result<CheckReport> {
        let name = "positivity";
        let mut rng = self.rng(3);
        let a = self.inst.position(self.inst.base_a()).expect("a in X");
        let b = self.inst.position(self.inst.base_b()).expect("b in X");
        let mut candidates = Vec::new();
        for k in 0..self.cfg.trials {
            candidates.push(self.input(&mut rng, InputKind::NonNegative));
            // p(a,a) = 1, p(a,b) = 0: pushes S₂ = S + (p(a,b) − p(a,a))·d* below zero
            let scale = 0.5f64.powi(k as i32);
            let mut special: PairFunction<S> =
                random::random_pair_function(&mut rng, Domain::OverX, self.m(), 0.0, 1.0).map(|v| v * S::lit(scale));
            special.set(a, a, S::one());
            special.set(a, b, S::zero());
            special.set(b, a, S::zero());
            candidates.push(self.invariant(special));
        }
        let mut special = PairFunction::constant(Domain::OverX, self.m(), S::zero());
        special.set(a, a, S::one());
        candidates.push(self.invariant(special));

        let mut outcome = None;
        for p in &candidates {
            let out = self.apply(p)?;
            if let Some((y, y2)) = pair_order(self.n()).find(|&(y, y2)| out.get(y, y2).as_f64() < -EXACT_TOLERANCE) {
                let w = witness(
                    vec![y, y2],
                    vec![out.get(y, y2).as_f64(), p.get(a, a).as_f64(), p.get(a, b).as_f64()],
                    "negative output for nonnegative input; values: output, p(a,a), p(a,b)",
                );
                outcome = Some(w);
                break;
            }
        }
        let report = CheckReport::from_outcome(name, EXACT_TOLERANCE, outcome, "absolute floor -tol");
        Ok(if self.op() == OperatorKind::S2 {
            report.expecting_failure("S2 is not positive")
        } else {
            report
        })
    }

    fn constants(&self) -> Result<CheckReport> {
        let name = "constants";
        let mut rng = self.rng(4);
        let mut values = vec![1.0];
        values.extend((1..self.cfg.trials.max(1)).map(|_| rng.gen_range(-3.0..3.0)));
        let mut outcome = None;
        for c in values {
            let p = PairFunction::constant(Domain::OverX, self.m(), S::lit(c));
            let out = self.apply(&p)?;
            let tol = EXACT_TOLERANCE * (1.0 + c.abs());
            if let Some((y, y2)) = pair_order(self.n()).find(|&(y, y2)| (out.get(y, y2).as_f64() - c).abs() > tol) {
                outcome = Some(witness(vec![y, y2], vec![out.get(y, y2).as_f64(), c], "Op(c) ≠ c"));
                break;
            }
        }
        let report = CheckReport::from_outcome(name, EXACT_TOLERANCE, outcome, "relative to 1+|c|");
        Ok(match (self.op(), self.cfg.variant) {
            (OperatorKind::S1, _) => report.expecting_failure("S1 does not preserve constants"),
            (OperatorKind::T | OperatorKind::I, DiagVariant::PaperZero) => report.expecting_failure(
                "equal cover elements evaluate to 0 under paper-zero, breaking constants off X",
            ),
            _ => report,
        })
    }

    fn locality_sets(&self) -> BTreeMap<(usize, usize), BTreeSet<usize>> {
        pair_order(self.n())
            .map(|(y, y2)| ((y, y2), self.ext.locality_set(y, y2)))
            .collect()
    }

    fn restricted_range(&self, p: &PairFunction<S>, set: &BTreeSet<usize>) -> (f64, f64) {
        let pos: Vec<usize> = set.iter().map(|&x| self.inst.position(x).expect("set in X")).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in &pos {
            for &j in &pos {
                let v = p.get(i, j).as_f64();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    fn sandwich(&self) -> Result<CheckReport> {
        let name = "sandwich";
        if self.op() != OperatorKind::T {
            return Ok(CheckReport::not_applicable(name, "stated for T only"));
        }
        let sets = self.locality_sets();
        let mut rng = self.rng(5);
        let mut outcome = None;
        'trials: for _ in 0..self.cfg.trials {
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let out = self.apply(&p)?;
            let tol = self.scaled(&p, EXACT_TOLERANCE);
            for (&(y, y2), set) in &sets {
                let (lo, hi) = self.restricted_range(&p, set);
                let v = out.get(y, y2).as_f64();
                if v < lo - tol || v > hi + tol {
                    outcome = Some(witness(vec![y, y2], vec![v, lo, hi], "outside [min, max] of p on A×A"));
                    break 'trials;
                }
            }
        }
        let report = CheckReport::from_outcome(name, EXACT_TOLERANCE, outcome, "A = {a,b} ∪ supp h(y) ∪ supp h(y')");
        Ok(if self.cfg.variant == DiagVariant::PaperZero {
            report.expecting_failure("paper-zero replaces p(a,a) by 0 on equal cover elements")
        } else {
            report
        })
    }

    fn random_pair(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        (rng.gen_range(0..self.n()), rng.gen_range(0..self.n()))
    }

    fn monotonicity(&self) -> Result<CheckReport> {
        let name = "monotonicity";
        if self.op() != OperatorKind::T {
            return Ok(CheckReport::not_applicable(name, "stated for T only"));
        }
        let mut rng = self.rng(6);
        for _ in 0..self.cfg.trials {
            let (y, y2) = self.random_pair(&mut rng);
            let set = self.ext.locality_set(y, y2);
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let members = self.inst.subset().members();
            let bumped = PairFunction::from_fn(Domain::OverX, self.m(), |i, j| {
                if set.contains(&members[i]) && set.contains(&members[j]) {
                    p.get(i, j) + S::lit(rng.gen_range(0.0..1.0))
                } else {
                    S::lit(rng.gen_range(-1.0..1.0))
                }
            });
            let lo = self.ext.t_entry(&p, y, y2, self.cfg.variant);
            let hi = self.ext.t_entry(&bumped, y, y2, self.cfg.variant);
            if lo.as_f64() > hi.as_f64() + EXACT_TOLERANCE {
                let w = witness(vec![y, y2], vec![lo.as_f64(), hi.as_f64()], "p ≤ p' on A×A but T(p) > T(p')");
                return Ok(CheckReport::fail(name, EXACT_TOLERANCE, w, "absolute"));
            }
        }
        Ok(CheckReport::pass(name, EXACT_TOLERANCE, "absolute"))
    }

    fn entry(&self, p: &PairFunction<S>, y: usize, y2: usize) -> Result<S> {
        Ok(match self.op() {
            OperatorKind::T => self.ext.t_entry(p, y, y2, self.cfg.variant),
            other => self
                .ext
                .extend_s_family(p, other.s_family().expect("S-family operator"))?
                .output
                .get(y, y2),
        })
    }

    fn locality(&self) -> Result<CheckReport> {
        let name = "locality";
        if self.op() == OperatorKind::I {
            return Ok(CheckReport::not_applicable(name, "I averages over orbits; locality is stated for T and S"));
        }
        let mut rng = self.rng(7);
        let members = self.inst.subset().members();
        for _ in 0..self.cfg.trials {
            let (y, y2) = self.random_pair(&mut rng);
            let set = self.ext.locality_set(y, y2);
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let perturbed = PairFunction::from_fn(Domain::OverX, self.m(), |i, j| {
                if set.contains(&members[i]) && set.contains(&members[j]) {
                    p.get(i, j)
                } else {
                    S::lit(rng.gen_range(-100.0..100.0))
                }
            });
            let before = self.entry(&p, y, y2)?;
            let after = self.entry(&perturbed, y, y2)?;
            if before.as_f64().to_bits() != after.as_f64().to_bits() {
                let w = witness(vec![y, y2], vec![before.as_f64(), after.as_f64()], "value changed");
                return Ok(CheckReport::fail(name, 0.0, w, "bit-identical comparison"));
            }
        }
        Ok(CheckReport::pass(name, 0.0, "bit-identical comparison"))
    }

    fn preservation(&self, mode: MetricMode) -> Result<CheckReport> {
        let (name, kind, stream) = match mode {
            MetricMode::Pseudometric => ("pseudometric_preservation", InputKind::Pseudometric as u8, 8),
            MetricMode::Metric => ("metric_preservation", InputKind::Metric as u8, 9),
        };
        let mut rng = self.rng(stream);
        let mut outcome = None;
        for _ in 0..self.cfg.trials {
            let p = self.input(
                &mut rng,
                if kind == InputKind::Pseudometric as u8 {
                    InputKind::Pseudometric
                } else {
                    InputKind::Metric
                },
            );
            let out = self.apply(&p)?;
            if let Some(w) = metric_axiom_violation(&out, mode, ACCUMULATED_TOLERANCE) {
                outcome = Some(w);
                break;
            }
        }
        let report = CheckReport::from_outcome(name, ACCUMULATED_TOLERANCE, outcome, "");
        Ok(if mode == MetricMode::Metric && self.op() == OperatorKind::S {
            report.expecting_failure("S does not preserve metrics")
        } else {
            report
        })
    }

    fn metric_floor(&self) -> Result<CheckReport> {
        let name = "metric_floor";
        if self.op() != OperatorKind::T {
            return Ok(CheckReport::not_applicable(name, "stated for T only"));
        }
        let mut rng = self.rng(10);
        for _ in 0..self.cfg.trials {
            let p = self.input(&mut rng, InputKind::Metric);
            let out = self.apply(&p)?;
            if let Some(w) = metric_floor_violation(self.inst, &p, &out) {
                return Ok(CheckReport::fail(name, ACCUMULATED_TOLERANCE, w, "relative"));
            }
        }
        Ok(CheckReport::pass(name, ACCUMULATED_TOLERANCE, "relative"))
    }

    fn tail_exactness(&self) -> Result<CheckReport> {
        let name = "tail_exactness";
        if self.op() != OperatorKind::T {
            return Ok(CheckReport::not_applicable(name, "series operators only"));
        }
        let mut rng = self.rng(11);
        for _ in 0..self.cfg.trials.clamp(1, 2) {
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let out = self.apply(&p)?;
            if let Some(w) = tail_violation(self.ext, &p, &out, self.cfg.variant, 10)? {
                return Ok(CheckReport::fail(name, EXACT_TOLERANCE, w, "levels N..N+10"));
            }
        }
        Ok(CheckReport::pass(name, EXACT_TOLERANCE, "levels N..N+10"))
    }

    fn geometry(&self) -> CheckReport {
        CheckReport::from_outcome("dugundji_geometry", 0.0, geometry_violation(self.ext), "supp h(y) ⊆ u(y) ⊆ O(y, 2d(y,X))")
    }

    fn group_averaging(&self) -> Result<CheckReport> {
        let name = "group_averaging";
        let Some(g) = self.group else {
            return Ok(CheckReport::not_applicable(name, "instance has no group"));
        };
        let mut rng = self.rng(12);
        let n = self.n();
        for _ in 0..self.cfg.trials {
            let f: PairFunction<S> = random::random_pair_function(&mut rng, Domain::OverY, n, -1.0, 1.0);
            let af = average_a(&f, g);
            let aaf = average_a(&af, g);
            let diff = aaf.max_abs_diff(&af)?.as_f64();
            if diff > EXACT_TOLERANCE {
                return Ok(CheckReport::fail(name, EXACT_TOLERANCE, witness(vec![], vec![diff], "A(Af) ≠ Af"), ""));
            }
            if let Some((e, y, y2)) = g.invariance_violation(&af, S::lit(EXACT_TOLERANCE)) {
                let w = witness(vec![e, y, y2], vec![af.get(y, y2).as_f64()], "Af not invariant (element, y, y')");
                return Ok(CheckReport::fail(name, EXACT_TOLERANCE, w, ""));
            }
            let metric: PairFunction<S> = random::random_metric(&mut rng, Domain::OverY, n);
            if let Some(w) = metric_axiom_violation(&average_a(&metric, g), MetricMode::Metric, ACCUMULATED_TOLERANCE) {
                return Ok(CheckReport::fail(name, ACCUMULATED_TOLERANCE, w, "A of a metric"));
            }
        }
        Ok(CheckReport::pass(name, EXACT_TOLERANCE, "retraction, invariance and metric preservation of A"))
    }

    fn group_invariance(&self) -> Result<CheckReport> {
        let name = "group_invariance";
        let (OperatorKind::I, Some(g)) = (self.op(), self.group) else {
            return Ok(CheckReport::not_applicable(name, "requires operator I and a group"));
        };
        let mut rng = self.rng(13);
        for _ in 0..self.cfg.trials {
            let p = self.input(&mut rng, InputKind::Arbitrary);
            let out = self.apply(&p)?;
            if let Some((e, y, y2)) = g.invariance_violation(&out, S::lit(EXACT_TOLERANCE)) {
                let w = witness(vec![e, y, y2], vec![out.get(y, y2).as_f64()], "I(p) not invariant (element, y, y')");
                return Ok(CheckReport::fail(name, EXACT_TOLERANCE, w, ""));
            }
        }
        Ok(CheckReport::pass(name, EXACT_TOLERANCE, ""))
    }
}

/// Lower bounds on `T(p)` for a metric `p` (see [`metric_floor`]); returns the
/// first pair below its floor.
pub fn metric_floor_violation<S: Scalar>(
    inst: &Instance<S>,
    p: &PairFunction<S>,
    t: &PairFunction<S>,
) -> Option<Witness> {
    for (y, y2) in pair_order(inst.len()) {
        if y == y2 {
            continue;
        }
        let floor = metric_floor(inst, p, y, y2);
        let v = t.get(y, y2).as_f64();
        if !(v > 0.0 && v >= floor * (1.0 - ACCUMULATED_TOLERANCE)) {
            return Some(witness(vec![y, y2], vec![v, floor], "T(p) below its separation floor"));
        }
    }
    None
}

/// Separation floor for `T(p)(y,y')`, `y ≠ y'`, with `p` a metric:
/// `p(y,y')` on `X`; `2^{-n*-1}·p(a,b)` between `X` and `Y∖X` with
/// `n* = min{n : n·d(y',X) ≥ 1}`; `2^{-n*}·p(a,b)` outside `X` with
/// `n* = min{n : n·min(d(y,X), d(y',X)) ≥ 1 and 2^{-n+1} < d(y,y')}`.
pub fn metric_floor<S: Scalar>(inst: &Instance<S>, p: &PairFunction<S>, y: usize, y2: usize) -> f64 {
    let pos = |x: usize| inst.position(x).expect("subset point");
    let pab = p.get(pos(inst.base_a()), pos(inst.base_b())).as_f64();
    let reaches = |n: u32, d: S| S::from_u32(n).expect("level") * d >= S::one();
    match (inst.in_subset(y), inst.in_subset(y2)) {
        (true, true) => p.get(pos(y), pos(y2)).as_f64(),
        (true, false) | (false, true) => {
            let out = if inst.in_subset(y) { y2 } else { y };
            let d = inst.dist_to_subset(out);
            let n = (1u32..).find(|&n| reaches(n, d)).expect("d(y,X) > 0");
            f64::pow2_neg(n + 1) * pab
        }
        (false, false) => {
            let d = inst.dist_to_subset(y).min(inst.dist_to_subset(y2));
            let dyy = inst.d(y, y2);
            let n = (1u32..)
                .find(|&n| reaches(n, d) && S::pow2_neg(n - 1) < dyy)
                .expect("distinct points");
            f64::pow2_neg(n) * pab
        }
    }
}

/// Compares `Σ_{n≤M} 2⁻ⁿTₙ + 2⁻ᴹ·tail` against `t` for `M = N..=N+extra`.
pub fn tail_violation<S: Scalar>(
    ext: &Extender<'_, S>,
    p: &PairFunction<S>,
    t: &PairFunction<S>,
    variant: DiagVariant,
    extra: u32,
) -> Result<Option<Witness>> {
    let big_n = ext.stabilization_level();
    let tol = EXACT_TOLERANCE * (1.0 + p.max_abs().as_f64());
    let sums = ext.partial_sum_range(p, big_n, big_n + extra, variant)?;
    for (m, sum) in (big_n..).zip(&sums) {
        for (y, y2) in pair_order(ext.instance().len()) {
            let (s, v) = (sum.get(y, y2).as_f64(), t.get(y, y2).as_f64());
            if (s - v).abs() > tol {
                return Ok(Some(witness(vec![y, y2, m as usize], vec![s, v], "partial sum plus tail (y, y', M)")));
            }
        }
    }
    Ok(None)
}

/// First violation of: `h` is the identity on `X`, `u(x) = {x}`,
/// `supp h(y) ⊆ u(y)`, and `d(y,x) < 2·d(y,X)` for `x ∈ u(y)`, `y ∉ X`.
pub fn geometry_violation<S: Scalar>(ext: &Extender<'_, S>) -> Option<Witness> {
    let inst = ext.instance();
    for y in 0..inst.len() {
        let u = ext.map_u(y);
        let h = ext.map_h(y);
        if inst.in_subset(y) {
            if u != BTreeSet::from([y]) || h.values() != [Label::XPoint(y)] {
                return Some(witness(vec![y], vec![], "h or u is not the identity on X"));
            }
            continue;
        }
        for label in h.support() {
            match label {
                Label::XPoint(x) if u.contains(&x) => {}
                other => {
                    let x = match other {
                        Label::XPoint(x) => x,
                        Label::CoverElement { index, .. } => index,
                    };
                    return Some(witness(vec![y, x], vec![], "supp h(y) not contained in u(y)"));
                }
            }
        }
        let limit = inst.dist_to_subset(y) + inst.dist_to_subset(y);
        for &x in &u {
            if inst.d(y, x) >= limit || inst.d(y, x).is_nan() {
                return Some(witness(
                    vec![y, x],
                    vec![inst.d(y, x).as_f64(), limit.as_f64()],
                    "d(y,x) ≥ 2·d(y,X) for x ∈ u(y)",
                ));
            }
        }
    }
    None
}

/// Runs every check for the configured operator. Reports are sorted by name.
pub fn run_invariant_suite<S: Scalar>(
    inst: &Instance<S>,
    group: Option<&GroupAction>,
    cfg: &SuiteConfig,
) -> Result<Vec<CheckReport>> {
    if cfg.operator == OperatorKind::I && group.is_none() {
        return Err(Error::GroupRequired);
    }
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let ext = Extender::new(inst);
    let suite = Suite {
        ext: &ext,
        inst,
        group,
        cfg: *cfg,
    };
    let mut reports = vec![
        suite.extension()?,
        suite.linearity()?,
        suite.positivity()?,
        suite.constants()?,
        suite.sandwich()?,
        suite.monotonicity()?,
        suite.locality()?,
        suite.preservation(MetricMode::Pseudometric)?,
        suite.preservation(MetricMode::Metric)?,
        suite.metric_floor()?,
        suite.tail_exactness()?,
        suite.geometry(),
        suite.group_averaging()?,
        suite.group_invariance()?,
    ];
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}

/// Norms of the difference between two operator outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDifference {
    pub left: OperatorKind,
    pub right: OperatorKind,
    pub max_abs: f64,
    pub frobenius: f64,
}

/// Per-claim status of each operator plus pairwise output differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub claims: BTreeMap<String, BTreeMap<OperatorKind, CheckStatus>>,
    pub differences: Vec<OutputDifference>,
}

pub const COMPARED_OPERATORS: [OperatorKind; 4] = [OperatorKind::T, OperatorKind::S, OperatorKind::S1, OperatorKind::S2];

/// Runs the suite for `T`, `S`, `S₁`, `S₂` and compares their outputs on `p`.
pub fn compare_operators<S: Scalar>(
    inst: &Instance<S>,
    p: &PairFunction<S>,
    variant: DiagVariant,
    seed: u64,
    trials: usize,
) -> Result<Comparison> {
    let mut claims: BTreeMap<String, BTreeMap<OperatorKind, CheckStatus>> = BTreeMap::new();
    for op in COMPARED_OPERATORS {
        let cfg = SuiteConfig {
            operator: op,
            variant,
            seed,
            trials,
        };
        for report in run_invariant_suite(inst, None, &cfg)? {
            claims.entry(report.name).or_default().insert(op, report.status);
        }
    }
    let ext = Extender::new(inst);
    let outputs: Vec<(OperatorKind, PairFunction<S>)> = COMPARED_OPERATORS
        .iter()
        .map(|&op| Ok((op, ext.extend(op, p, variant, None)?.output)))
        .collect::<Result<_>>()?;
    let mut differences = Vec::new();
    for (i, (left, a)) in outputs.iter().enumerate() {
        for (right, b) in &outputs[i + 1..] {
            differences.push(OutputDifference {
                left: *left,
                right: *right,
                max_abs: a.max_abs_diff(b)?.as_f64(),
                frobenius: a.frobenius_diff(b)?.as_f64(),
            });
        }
    }
    Ok(Comparison { claims, differences })
}

/// Fixed-width text table of reports.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut out = format!("{:<26} {:<15} {:<9} {}\n", "check", "status", "tol", "witness / notes");
    for r in reports {
        let status = serde_json::to_value(r.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let detail = match &r.witness {
            Some(w) => format!("{} at {:?} values {:?}", w.detail, w.points, w.values),
            None => r.notes.clone(),
        };
        let tol = match (r.status, r.tolerance) {
            (CheckStatus::NotApplicable, _) => "-".to_string(),
            (_, 0.0) => "exact".to_string(),
            (_, t) => format!("{t:.0e}"),
        };
        out.push_str(&format!("{:<26} {:<15} {:<9} {}\n", r.name, status, tol, detail));
    }
    out
}
