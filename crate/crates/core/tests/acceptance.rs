//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use hmext::group::{average_a, average_on_subset, validate_group};
use hmext::hm::{integrate_pair, StepFunction};
use hmext::random::{random_group_instance, random_instance, random_metric, random_pair_function, GenMode};
use hmext::space::{load_space, SpaceSource};
use hmext::verify::{
    geometry_violation, metric_axiom_violation, metric_floor_violation, run_invariant_suite, tail_violation,
};
use hmext::{
    CheckStatus, DiagVariant, Domain, Extender, GroupAction, Instance, MetricMode, OperatorKind, PairFunction,
    SuiteConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const BASE: DiagVariant = DiagVariant::BaseDiagonal;

struct Case {
    name: String,
    inst: Instance<f64>,
    group: Option<GroupAction>,
}

impl Case {
    fn ext(&self) -> Extender<'_, f64> {
        Extender::new(&self.inst)
    }

    /// Random input over X, invariant when the case has a group.
    fn input(&self, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> PairFunction<f64> {
        let m = self.inst.subset().len();
        let p = random_pair_function(rng, Domain::OverX, m, lo, hi);
        self.project(p)
    }

    fn metric(&self, rng: &mut ChaCha8Rng) -> PairFunction<f64> {
        let m = self.inst.subset().len();
        self.project(random_metric(rng, Domain::OverX, m))
    }

    fn project(&self, p: PairFunction<f64>) -> PairFunction<f64> {
        match &self.group {
            Some(g) => average_on_subset(&p, &self.inst, g),
            None => p,
        }
    }
}

fn i1() -> Case {
    let pts = vec![vec![0.0], vec![1.0], vec![0.4], vec![0.6]];
    Case {
        name: "I1".into(),
        inst: load_space(&SpaceSource::Points(pts), vec![0, 1], 0, 1).unwrap(),
        group: None,
    }
}

fn g1() -> Case {
    let pts = vec![
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![-1.0, 0.0],
        vec![0.0, -1.0],
        vec![0.0, 0.0],
    ];
    let inst = load_space(&SpaceSource::Points(pts), vec![0, 1, 2, 3], 0, 1).unwrap();
    let rotations = (0..4)
        .map(|k| {
            let mut g: Vec<usize> = (0..4).map(|i| (i + k) % 4).collect();
            g.push(4);
            g
        })
        .collect();
    let (group, _) = validate_group(rotations, &inst).unwrap();
    Case {
        name: "G1".into(),
        inst,
        group: Some(group),
    }
}

fn random_cases() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    (0..200)
        .map(|k| {
            let n = rng.gen_range(2..=30);
            let x = rng.gen_range(2..=n);
            let mode = if k % 2 == 0 {
                GenMode::Points { dim: rng.gen_range(1..=3) }
            } else {
                GenMode::Matrix
            };
            let file = random_instance(&mut rng, n, x, mode).unwrap();
            Case {
                name: format!("random #{k} (n={n}, |X|={x})"),
                inst: file.load().unwrap().instance,
                group: None,
            }
        })
        .collect()
}

fn group_cases() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut cases = vec![g1()];
    for k in 0..50 {
        let loaded = random_group_instance(&mut rng).load().unwrap();
        cases.push(Case {
            name: format!("group #{k} (n={})", loaded.instance.len()),
            inst: loaded.instance,
            group: loaded.group,
        });
    }
    cases
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))
}

fn extension_identity(random: &[Case], groups: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    let ops = [OperatorKind::T, OperatorKind::S, OperatorKind::S1, OperatorKind::S2];
    let runs = random
        .iter()
        .flat_map(|c| ops.iter().map(move |&op| (c, op)))
        .chain(groups.iter().map(|c| (c, OperatorKind::I)));
    for (case, op) in runs {
        let scale = 10f64.powi(rng.gen_range(-2..=2));
        let p = case.input(&mut rng, -scale, scale);
        let out = case.ext().extend(op, &p, BASE, case.group.as_ref()).map_err(|e| e.to_string())?.output;
        let members = case.inst.subset().members();
        let tol = 1e-12 * (1.0 + p.max_abs());
        for (i, j) in pairs(members.len()) {
            let err = (out.get(members[i], members[j]) - p.get(i, j)).abs();
            if err > tol {
                return Err(format!("{op} on {}: error {err:e} at ({i},{j})", case.name));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} operator runs, T/S/S1/S2 on 200 instances and I on 51 group instances"))
}

fn metric_preservation(random: &[Case], groups: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in &random[..100] {
        let ext = case.ext();
        let p = case.metric(&mut rng);
        for op in [OperatorKind::T, OperatorKind::S1] {
            let out = ext.extend(op, &p, BASE, None).map_err(|e| e.to_string())?.output;
            if let Some(w) = metric_axiom_violation(&out, MetricMode::Metric, 1e-9) {
                return Err(format!("{op} on {}: {} at {:?}", case.name, w.detail, w.points));
            }
            if op == OperatorKind::T {
                if let Some(w) = metric_floor_violation(&case.inst, &p, &out) {
                    return Err(format!("floor on {}: {:?} values {:?}", case.name, w.points, w.values));
                }
            }
        }
    }
    for case in groups {
        let p = case.metric(&mut rng);
        let out = case
            .ext()
            .extend(OperatorKind::I, &p, BASE, case.group.as_ref())
            .map_err(|e| e.to_string())?
            .output;
        if let Some(w) = metric_axiom_violation(&out, MetricMode::Metric, 1e-9) {
            return Err(format!("I on {}: {} at {:?}", case.name, w.detail, w.points));
        }
    }
    Ok("T and S1 on 100 random metrics with separation floors; I on 51 invariant metrics".into())
}

fn constants(all: &[&Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in all {
        let ext = case.ext();
        let m = case.inst.subset().len();
        for c in [1.0, rng.gen_range(-3.0..3.0)] {
            let p = PairFunction::constant(Domain::OverX, m, c);
            let out = ext.extend_t(&p, BASE).map_err(|e| e.to_string())?.output;
            if let Some((y, y2)) = pairs(case.inst.len()).find(|&(y, y2)| (out.get(y, y2) - c).abs() > 1e-12) {
                return Err(format!("T({c}) on {} at ({y},{y2}): {}", case.name, out.get(y, y2)));
            }
        }
    }
    let case = i1();
    let ones = PairFunction::constant(Domain::OverX, 2, 1.0);
    let deviation = case.ext().extend_t(&ones, DiagVariant::PaperZero).map_err(|e| e.to_string())?.output.get(2, 3);
    if deviation >= 1.0 {
        return Err(format!("paper-zero T(1)(2,3) = {deviation}, expected < 1"));
    }
    let cfg = SuiteConfig {
        operator: OperatorKind::T,
        variant: DiagVariant::PaperZero,
        seed: 3,
        trials: 3,
    };
    let reports = run_invariant_suite(&case.inst, None, &cfg).map_err(|e| e.to_string())?;
    let report = reports.iter().find(|r| r.name == "constants").unwrap();
    if report.status != CheckStatus::ExpectedFail {
        return Err(format!("paper-zero constants reported as {:?}", report.status));
    }
    Ok(format!(
        "base-diagonal exact on {} instances; paper-zero T(1)(2,3) = {deviation:.6} on I1 (expected-fail)",
        all.len()
    ))
}

fn linearity_positivity(random: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for case in random {
        let ext = case.ext();
        let (alpha, beta) = (rng.gen_range(-5.0..=5.0), rng.gen_range(-5.0..=5.0));
        let p = case.input(&mut rng, -1.0, 1.0);
        let q = case.input(&mut rng, -1.0, 1.0);
        let t = |f: &PairFunction<f64>| ext.extend_t(f, BASE).map(|r| r.output).map_err(|e| e.to_string());
        let lhs = t(&p.combine(alpha, &q, beta).unwrap())?;
        let (tp, tq) = (t(&p)?, t(&q)?);
        for (y, y2) in pairs(case.inst.len()) {
            let (a, b) = (alpha * tp.get(y, y2), beta * tq.get(y, y2));
            let rel = (lhs.get(y, y2) - (a + b)).abs() / (a.abs() + b.abs()).max(1.0);
            worst = worst.max(rel);
            if rel > 1e-9 {
                return Err(format!("linearity on {} at ({y},{y2}): {rel:e}", case.name));
            }
        }
        let nonneg = case.input(&mut rng, 0.0, 1.0);
        for op in [OperatorKind::T, OperatorKind::S, OperatorKind::S1] {
            let out = ext.extend(op, &nonneg, BASE, None).map_err(|e| e.to_string())?.output;
            let min = out.min_value().unwrap();
            if min < -1e-12 {
                return Err(format!("positivity of {op} on {}: min {min:e}", case.name));
            }
        }
    }
    Ok(format!("200 instances, worst relative linearity error {worst:.2e}"))
}

fn locality_monotonicity(random: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..1000 {
        let case = &random[rng.gen_range(0..random.len())];
        let ext = case.ext();
        let n = case.inst.len();
        let (y, y2) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let set = ext.locality_set(y, y2);
        let members = case.inst.subset().members();
        let inside = |i: usize, j: usize| set.contains(&members[i]) && set.contains(&members[j]);
        let m = members.len();
        let p = case.input(&mut rng, -1.0, 1.0);
        let perturbed =
            PairFunction::from_fn(Domain::OverX, m, |i, j| if inside(i, j) { p.get(i, j) } else { rng.gen_range(-50.0..50.0) });
        let before = ext.t_entry(&p, y, y2, BASE);
        let after = ext.t_entry(&perturbed, y, y2, BASE);
        if before.to_bits() != after.to_bits() {
            return Err(format!("locality trial {trial} on {} at ({y},{y2}): {before} vs {after}", case.name));
        }
        let bumped = PairFunction::from_fn(Domain::OverX, m, |i, j| {
            if inside(i, j) {
                p.get(i, j) + rng.gen_range(0.0..1.0)
            } else {
                rng.gen_range(-50.0..50.0)
            }
        });
        let raised = ext.t_entry(&bumped, y, y2, BASE);
        if before > raised + 1e-12 {
            return Err(format!("monotonicity trial {trial} on {} at ({y},{y2}): {before} > {raised}", case.name));
        }
    }
    Ok("1000 trials, bit-identical locality and monotone entries".into())
}

fn tail_exactness(all: &[&Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in all {
        let ext = case.ext();
        let p = case.input(&mut rng, -1.0, 1.0);
        let t = ext.extend_t(&p, BASE).map_err(|e| e.to_string())?.output;
        if let Some(w) = tail_violation(&ext, &p, &t, BASE, 10).map_err(|e| e.to_string())? {
            return Err(format!("{}: {:?} values {:?}", case.name, w.points, w.values));
        }
    }
    Ok(format!("M = N..N+10 on {} instances", all.len()))
}

fn s_family(random: &[Case]) -> Outcome {
    let case = i1();
    let ext = case.ext();
    let p = PairFunction::from_rows(Domain::OverX, &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let s = ext.extend(OperatorKind::S, &p, BASE, None).map_err(|e| e.to_string())?.output;
    if s.get(2, 0) != 0.0 {
        return Err(format!("S(p)(2,0) = {}, expected 0", s.get(2, 0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for c in &random[100..] {
        let q = c.metric(&mut rng);
        let out = c.ext().extend(OperatorKind::S1, &q, BASE, None).map_err(|e| e.to_string())?.output;
        if let Some(w) = metric_axiom_violation(&out, MetricMode::Metric, 1e-9) {
            return Err(format!("S1 on {}: {} at {:?}", c.name, w.detail, w.points));
        }
    }
    let ones = PairFunction::constant(Domain::OverX, 2, 1.0);
    let s1 = ext.extend(OperatorKind::S1, &ones, BASE, None).map_err(|e| e.to_string())?.output;
    if s1.get(2, 0) == 1.0 {
        return Err("S1(1) equals 1 at (2,0)".into());
    }
    let cfg = SuiteConfig {
        operator: OperatorKind::S2,
        variant: BASE,
        seed: 7,
        trials: 5,
    };
    let reports = run_invariant_suite(&case.inst, None, &cfg).map_err(|e| e.to_string())?;
    let pos = reports.iter().find(|r| r.name == "positivity").unwrap();
    let negative = pos.witness.as_ref().map(|w| w.values[0]).filter(|&v| v < 0.0);
    let Some(v) = negative else {
        return Err(format!("S2 positivity not violated: {pos:?}"));
    };
    Ok(format!(
        "S(p)(2,0) = 0; S1 metric on 100 inputs; S1(1)(2,0) = {}; S2 negative entry {v:.4}",
        s1.get(2, 0)
    ))
}

fn group_invariance(groups: &[Case]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in groups {
        let g = case.group.as_ref().unwrap();
        let n = case.inst.len();
        let f: PairFunction<f64> = random_pair_function(&mut rng, Domain::OverY, n, -1.0, 1.0);
        let af = average_a(&f, g);
        let diff = average_a(&af, g).max_abs_diff(&af).unwrap();
        if diff > 1e-12 {
            return Err(format!("A∘A ≠ A on {}: {diff:e}", case.name));
        }
        let ext = case.ext();
        for p in [case.input(&mut rng, -1.0, 1.0), case.metric(&mut rng)] {
            let out = ext.extend(OperatorKind::I, &p, BASE, Some(g)).map_err(|e| e.to_string())?.output;
            if let Some(w) = g.invariance_violation(&out, 1e-12) {
                return Err(format!("I(p) not invariant on {}: {w:?}", case.name));
            }
        }
        let metric = case.metric(&mut rng);
        let out = ext.extend(OperatorKind::I, &metric, BASE, Some(g)).map_err(|e| e.to_string())?.output;
        if let Some(w) = metric_axiom_violation(&out, MetricMode::Metric, 1e-9) {
            return Err(format!("I(p) not a metric on {}: {} at {:?}", case.name, w.detail, w.points));
        }
    }
    Ok(format!("{} group instances including G1", groups.len()))
}

fn random_step(rng: &mut ChaCha8Rng) -> StepFunction<f64, u8> {
    let pieces = rng.gen_range(1..=5);
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.gen_range(0.0..1.0)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bps = vec![0.0];
    bps.extend(cuts);
    bps.push(1.0);
    let values = (0..pieces).map(|_| rng.gen_range(0..4u8)).collect();
    StepFunction::new(bps, values).unwrap()
}

fn hm_oracle() -> Outcome {
    const CELLS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let (f, g) = (random_step(&mut rng), random_step(&mut rng));
        let q: Vec<Vec<f64>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let exact = integrate_pair(|a: &u8, b: &u8| Some(q[*a as usize][*b as usize]), &f, &g).unwrap();
        let grid: f64 = (0..CELLS)
            .map(|i| {
                let t = (i as f64 + 0.5) / CELLS as f64;
                q[*f.eval(t) as usize][*g.eval(t) as usize]
            })
            .sum::<f64>()
            / CELLS as f64;
        worst = worst.max((exact - grid).abs());
        if (exact - grid).abs() > 1e-3 {
            return Err(format!("pair {k}: exact {exact} vs grid {grid}"));
        }
    }
    Ok(format!("500 pairs, worst deviation {worst:.2e}"))
}

fn geometry(all: &[&Case]) -> Outcome {
    for case in all {
        if let Some(w) = geometry_violation(&case.ext()) {
            return Err(format!("{}: {} at {:?}", case.name, w.detail, w.points));
        }
    }
    Ok(format!("zero violations on {} instances", all.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let random = random_cases();
    let groups = group_cases();
    let extra = i1();
    let all: Vec<&Case> = random.iter().chain(groups.iter()).chain(std::iter::once(&extra)).collect();

    let criteria: Vec<Criterion> = vec![
        ("extension identity", Box::new(|| extension_identity(&random, &groups))),
        ("pseudometric/metric preservation", Box::new(|| metric_preservation(&random, &groups))),
        ("constants", Box::new(|| constants(&all))),
        ("linearity and positivity", Box::new(|| linearity_positivity(&random))),
        ("locality and monotonicity", Box::new(|| locality_monotonicity(&random))),
        ("exact tail", Box::new(|| tail_exactness(&all))),
        ("S-family contrasts", Box::new(|| s_family(&random))),
        ("group invariance", Box::new(|| group_invariance(&groups))),
        ("hm grid oracle", Box::new(hm_oracle)),
        ("dugundji geometry", Box::new(|| geometry(&all))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1?}]", k + 1, t.elapsed());
    }
    println!("acceptance: {}/10 passed in {:.1?}", 10 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
