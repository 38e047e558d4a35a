//! Acceptance sweep: one test per numbered criterion, each printing a
//! single "criterion N: PASS|FAIL" line and writing its canonical result
//! file under the target tmp dir. The final criterion reruns the other
//! nine at thread counts 1 and 8 and demands byte-identical files.
//!
//! Tolerances live here, in code: the cross-check caps, the sandwich and
//! symmetry eps of 1/4, the profile trend eps of 1/10. Everything else is
//! exact rational equality.

use std::fs;
use std::path::PathBuf;

use normset::engine::oracle::{Oracle, OracleOpts};
use normset::engine::{self, EngineOpts};
use normset::index_lab::{
    average_bound_check, default_grid, empirical_alpha_tilde, AvgBoundOpts,
};
use normset::report::{Format, Report};
use normset::seq_lab::{
    basis_seq, flat_blocks, mix_seq, sandwich_check, symmetry_check, BlockSeq, IndexFamily,
    SelectOpts, SeqArray,
};
use normset::tree::FunctionalTree;
use normset::{validate, FinVec, NodeClass, Rat, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Caps shared by the engine and the brute-force family in the equivalence
/// sweep.
const CROSSCHECK_DEPTH: u32 = 6;
const CROSSCHECK_SIZE: u32 = 8;
const RANDOM_ON_SEVEN: usize = 200;
const INVARIANCE_INSTANCES: usize = 500;
const SEED_CROSSCHECK: u64 = 0x0c0ffee1;
const SEED_INVARIANCE: u64 = 0x0c0ffee3;

fn crosscheck_caps() -> EngineOpts {
    EngineOpts {
        size_cap: Some(CROSSCHECK_SIZE),
        depth_cap: Some(CROSSCHECK_DEPTH),
        node_budget: None,
    }
}

fn uncapped() -> EngineOpts {
    EngineOpts::default()
}

/// Sandwich and symmetry slack.
fn quarter() -> Rat {
    Rat::new(1, 4)
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

struct CritOut {
    pass: bool,
    detail: String,
    files: Vec<(String, Report)>,
}

impl CritOut {
    fn rendered(&self) -> Vec<(String, String)> {
        self.files.iter().map(|(n, r)| (n.clone(), r.render(Format::Csv))).collect()
    }

    /// Writes the canonical files and prints the pass/fail line; panics on
    /// failure so the test harness reports it.
    fn finish(self, n: u32) {
        let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
        fs::create_dir_all(&dir).unwrap();
        for (name, report) in &self.files {
            report.write_atomic(&dir.join(name), Format::Csv).unwrap();
        }
        println!("criterion {n}: {}", if self.pass { "PASS" } else { "FAIL" });
        assert!(self.pass, "criterion {n}: {}", self.detail);
    }
}

/// Norm call whose witness is certified on the spot: it must validate and
/// must reproduce the value exactly.
fn audited_norm(x: &FinVec, space: &SpaceSpec, opts: &EngineOpts) -> (Rat, bool) {
    let res = engine::norm(x, space, opts).unwrap();
    let ok = validate(&res.witness, space).is_pass()
        && res.witness.evaluate(x, space).unwrap() == res.value;
    (res.value, ok)
}

fn audited_best(x: &FinVec, space: &SpaceSpec, class: NodeClass, opts: &EngineOpts) -> (Rat, bool) {
    let res = engine::best_value(x, space, class, opts).unwrap();
    let ok = validate(&res.witness, space).is_pass()
        && res.witness.evaluate(x, space).unwrap() == res.value;
    (res.value, ok)
}

/// {0, 1, 1/2}^6 in odometer order. One representative per sign orbit;
/// the sign orbits themselves are the invariance criterion's business.
fn exhaustive_nonneg_on_six() -> Vec<FinVec> {
    let mut out = Vec::with_capacity(729);
    for code in 0..729u32 {
        let mut c = code;
        let mut pairs = Vec::new();
        for i in 1..=6u32 {
            match c % 3 {
                1 => pairs.push((i, Rat::one())),
                2 => pairs.push((i, Rat::new(1, 2))),
                _ => {}
            }
            c /= 3;
        }
        out.push(FinVec::from_pairs(pairs));
    }
    out
}

/// Random signed vectors on {1..=max_pt} with coefficients in {0, ±1, ±1/2}.
fn random_signed(seed: u64, count: usize, max_pt: u32) -> Vec<FinVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut pairs = Vec::new();
        for i in 1..=max_pt {
            match rng.gen_range(0u8..5) {
                0 => {}
                1 => pairs.push((i, Rat::one())),
                2 => pairs.push((i, Rat::int(-1))),
                3 => pairs.push((i, Rat::new(1, 2))),
                _ => pairs.push((i, Rat::new(-1, 2))),
            }
        }
        out.push(FinVec::from_pairs(pairs));
    }
    out
}

/// Instances for the invariance sweep: vector, sign-flip mask, scale factor.
fn invariance_instances() -> Vec<(FinVec, u32, Rat)> {
    let levels = [
        Rat::one(),
        Rat::int(-1),
        Rat::new(1, 2),
        Rat::new(-1, 2),
        Rat::int(2),
        Rat::int(-2),
        Rat::new(1, 3),
        Rat::new(-1, 3),
    ];
    let scales = [
        Rat::zero(),
        Rat::int(2),
        Rat::int(-2),
        Rat::new(1, 2),
        Rat::new(-3, 2),
        Rat::int(3),
        Rat::new(-1, 3),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_INVARIANCE);
    let mut out = Vec::with_capacity(INVARIANCE_INSTANCES);
    for _ in 0..INVARIANCE_INSTANCES {
        let mut pairs = Vec::new();
        for i in 1..=12u32 {
            if rng.gen_range(0u8..10) < 6 {
                continue;
            }
            pairs.push((i, levels[rng.gen_range(0..levels.len())].clone()));
        }
        let mask: u32 = rng.gen();
        let c = scales[rng.gen_range(0..scales.len())].clone();
        out.push((FinVec::from_pairs(pairs), mask, c));
    }
    out
}

fn flip_by_mask(x: &FinVec, mask: u32) -> FinVec {
    FinVec::from_pairs(x.entries().iter().enumerate().map(|(k, (i, c))| {
        (*i, if mask >> (k % 32) & 1 == 1 { -c.clone() } else { c.clone() })
    }))
}

// ---------------------------------------------------------------- criteria

/// Engine vs brute-force family on every vector with support in {1..6} and
/// coefficients in {0, ±1, ±1/2} (one representative per sign orbit), plus
/// random signed vectors on {1..7}; exact equality at shared caps.
fn criterion_1(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let caps = crosscheck_caps();
    let mut cases = exhaustive_nonneg_on_six();
    let split = cases.len();
    cases.extend(random_signed(SEED_CROSSCHECK, RANDOM_ON_SEVEN, 7));

    let engine_side: Vec<(Rat, bool)> =
        pool.install(|| cases.par_iter().map(|x| audited_norm(x, &space, &caps)).collect());

    let mut oracle =
        Oracle::new(space.clone(), OracleOpts::new(CROSSCHECK_DEPTH, CROSSCHECK_SIZE));

    let mut report = Report::new(["case", "kind", "vector", "engine", "family", "equal", "witness_ok"]);
    report
        .meta("depth_cap", CROSSCHECK_DEPTH)
        .meta("size_cap", CROSSCHECK_SIZE)
        .meta("exhaustive", split)
        .meta("random", RANDOM_ON_SEVEN)
        .meta("seed", SEED_CROSSCHECK);
    let mut pass = true;
    let mut detail = String::new();
    for (k, x) in cases.iter().enumerate() {
        let (ev, wok) = engine_side[k].clone();
        let ov = oracle.norm(x).unwrap();
        let equal = ev == ov;
        if !(equal && wok) && detail.is_empty() {
            detail = format!("case {k} `{}`: engine {ev}, family {ov}, witness_ok {wok}", x.to_line());
        }
        pass &= equal && wok;
        report.row([
            k.to_string(),
            if k < split { "exhaustive".into() } else { "random".into() },
            x.to_line(),
            ev.to_string(),
            ov.to_string(),
            equal.to_string(),
            wok.to_string(),
        ]);
    }
    report.footer(format!("all_equal = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-01.csv".into(), report)] }
}

/// Every witness-bearing call the suite makes, audited: validate must pass
/// and the witness must evaluate back to the reported value.
fn criterion_2(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let caps = crosscheck_caps();

    let mut streams: Vec<(&str, Vec<(Rat, bool)>)> = Vec::new();

    let mut cross = exhaustive_nonneg_on_six();
    cross.extend(random_signed(SEED_CROSSCHECK, RANDOM_ON_SEVEN, 7));
    streams.push((
        "crosscheck",
        pool.install(|| cross.par_iter().map(|x| audited_norm(x, &space, &caps)).collect()),
    ));

    let inv = invariance_instances();
    streams.push((
        "invariance",
        pool.install(|| {
            inv.par_iter().map(|(x, _, _)| audited_norm(x, &space, &uncapped())).collect()
        }),
    ));

    let mut unit_grid = Vec::new();
    for s in [2u32, 4, 8, 16] {
        for n in 1u32..=3 {
            for j in 1u32..=40 {
                unit_grid.push((s, n, j));
            }
        }
    }
    streams.push((
        "unit-sch",
        pool.install(|| {
            unit_grid
                .par_iter()
                .map(|&(s, n, j)| {
                    audited_best(&FinVec::unit(j), &space, NodeClass::sch(s, n), &uncapped())
                })
                .collect()
        }),
    ));

    let flat = flat_blocks(&IndexFamily::dyadic(6)).unwrap();
    let mut specials = vec![
        flat.member(3).add(flat.member(4)).add(flat.member(5)),
        FinVec::unit(2).add(&FinVec::unit(4)).add(&FinVec::unit(8)).add(&FinVec::unit(16)),
    ];
    specials.extend(flat.members().iter().cloned());
    streams.push((
        "blocks",
        specials.iter().map(|x| audited_norm(x, &space, &uncapped())).collect(),
    ));

    let mut report = Report::new(["stream", "calls", "witness_ok"]);
    let mut pass = true;
    let mut detail = String::new();
    for (name, results) in &streams {
        let ok = results.iter().filter(|(_, w)| *w).count();
        if ok != results.len() && detail.is_empty() {
            detail = format!("stream {name}: {ok}/{} witnesses valid", results.len());
        }
        pass &= ok == results.len();
        report.row([name.to_string(), results.len().to_string(), ok.to_string()]);
    }
    report.footer(format!("all_witnesses_valid = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-02.csv".into(), report)] }
}

/// Exact sign-flip invariance and exact homogeneity on random instances.
fn criterion_3(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let instances = invariance_instances();

    let results: Vec<(Rat, bool, bool, bool)> = pool.install(|| {
        instances
            .par_iter()
            .map(|(x, mask, c)| {
                let (base, wok) = audited_norm(x, &space, &uncapped());
                let flip_ok =
                    engine::norm(&flip_by_mask(x, *mask), &space, &uncapped()).unwrap().value
                        == base;
                let scale_ok =
                    engine::norm(&x.scale(c), &space, &uncapped()).unwrap().value
                        == &c.abs() * &base;
                (base, flip_ok, scale_ok, wok)
            })
            .collect()
    });

    let mut report =
        Report::new(["case", "vector", "norm", "scale", "flip_equal", "scale_equal", "witness_ok"]);
    report.meta("instances", INVARIANCE_INSTANCES).meta("seed", SEED_INVARIANCE);
    let mut pass = true;
    let mut detail = String::new();
    for (k, ((x, _, c), (base, fok, sok, wok))) in instances.iter().zip(&results).enumerate() {
        if !(fok & sok & wok) && detail.is_empty() {
            detail = format!("case {k} `{}`: flip {fok}, scale {sok}, witness {wok}", x.to_line());
        }
        pass &= fok & sok & wok;
        report.row([
            k.to_string(),
            x.to_line(),
            base.to_string(),
            c.to_string(),
            fok.to_string(),
            sok.to_string(),
            wok.to_string(),
        ]);
    }
    report.footer(format!("all_invariant = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-03.csv".into(), report)] }
}

/// The blocking bound: the flat triple y3+y4+y5 has norm >= 3/2, and the
/// explicit three-average Schreier functional certifies that bound.
fn criterion_4(_pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let flat = flat_blocks(&IndexFamily::dyadic(5)).unwrap();
    let x = flat.member(3).add(flat.member(4)).add(flat.member(5));
    let (value, wok) = audited_norm(&x, &space, &uncapped());

    let leaves = |lo: u32, hi: u32| -> String {
        (lo..=hi).map(|i| format!("L({i},+)")).collect::<Vec<_>>().join(" ")
    };
    let text = format!(
        "S(A(4; {}) A(8; {}) A(16; {}))",
        leaves(4, 7),
        leaves(8, 15),
        leaves(16, 31)
    );
    let witness = FunctionalTree::parse(&text).unwrap();
    let wvalid = validate(&witness, &space).is_pass();
    let wvalue = witness.evaluate(&x, &space).unwrap();

    let bound = Rat::new(3, 2);
    let pass = value >= bound && wvalid && wvalue == bound && wok;
    let detail = format!(
        "norm {value} (need >= {bound}), explicit witness valid {wvalid} value {wvalue}, engine witness ok {wok}"
    );

    let mut report = Report::new(["quantity", "value"]);
    report.meta("support", "4..31").meta("bound", &bound);
    report.row(["norm".to_string(), value.to_string()]);
    report.row(["explicit_witness".to_string(), text]);
    report.row(["explicit_witness_valid".to_string(), wvalid.to_string()]);
    report.row(["explicit_witness_value".to_string(), wvalue.to_string()]);
    report.footer(format!("bound_attained = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-04.csv".into(), report)] }
}

/// The spread-out unit sum e2+e4+e8+e16 stays trapped in [1, 2].
fn criterion_5(_pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let x = FinVec::unit(2).add(&FinVec::unit(4)).add(&FinVec::unit(8)).add(&FinVec::unit(16));
    let (value, wok) = audited_norm(&x, &space, &uncapped());
    let pass = Rat::one() <= value && value <= Rat::int(2) && wok;
    let detail = format!("norm {value} outside [1, 2] or witness invalid ({wok})");

    let mut report = Report::new(["quantity", "value"]);
    report.row(["norm".to_string(), value.to_string()]);
    report.row(["lower".to_string(), "1".to_string()]);
    report.row(["upper".to_string(), "2".to_string()]);
    report.footer(format!("inside = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-05.csv".into(), report)] }
}

/// The two faces of the index at finite scale: single units act below
/// 1/(2s) under every constrained Schreier class, while flat blocks hold
/// the profile at 1/2 or above across the whole applicable grid.
fn criterion_6(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();

    let mut grid = Vec::new();
    for s in [2u32, 4, 8, 16] {
        for n in 1u32..=3 {
            for j in 1u32..=40 {
                grid.push((s, n, j));
            }
        }
    }
    let unit_side: Vec<(Rat, bool)> = pool.install(|| {
        grid.par_iter()
            .map(|&(s, n, j)| {
                audited_best(&FinVec::unit(j), &space, NodeClass::sch(s, n), &uncapped())
            })
            .collect()
    });

    let mut report_a = Report::new(["s", "max_len", "j", "value", "bound", "le", "witness_ok"]);
    let mut pass = true;
    let mut detail = String::new();
    for (&(s, n, j), (v, wok)) in grid.iter().zip(&unit_side) {
        let bound = Rat::new(1, 2 * s as i64);
        let le = *v <= bound;
        if !(le && *wok) && detail.is_empty() {
            detail = format!("unit e_{j} at sch({s},{n}): value {v} vs bound {bound}");
        }
        pass &= le && *wok;
        report_a.row([
            s.to_string(),
            n.to_string(),
            j.to_string(),
            v.to_string(),
            bound.to_string(),
            le.to_string(),
            wok.to_string(),
        ]);
    }
    report_a.footer(format!("all_below = {pass}"));

    let family = IndexFamily::dyadic(6);
    let flat = flat_blocks(&family).unwrap();
    let grid_b = default_grid(flat.len());
    let profile =
        empirical_alpha_tilde(&flat, &space, &grid_b, &Rat::new(1, 10), &uncapped()).unwrap();
    let half = Rat::new(1, 2);
    let mut report_b = profile.report();
    let mut flat_pass = true;
    for (g, v) in &profile.entries {
        // applicability: some tail member's block is at least s_min wide
        let widest =
            (g.tail_start..=flat.len()).map(|m| flat.member(m).support_len() as u32).max().unwrap();
        let applicable = g.s_min <= widest;
        if !applicable || *v < half {
            flat_pass = false;
            if detail.is_empty() {
                detail = format!(
                    "flat profile at (s_min {}, len {}, tail {}): value {v}, applicable {applicable}",
                    g.s_min, g.max_len, g.tail_start
                );
            }
        }
    }
    pass &= flat_pass;
    report_b.footer(format!("all_at_least_half = {flat_pass}"));

    CritOut {
        pass,
        detail,
        files: vec![
            ("criterion-06a.csv".into(), report_a),
            ("criterion-06b.csv".into(), report_b),
        ],
    }
}

/// Exhaustive averaging bound on the first eight units: no enumerated
/// average may exceed 1/size + 2/n on their mean.
fn criterion_7(_pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let xs = basis_seq(8).unwrap();
    let rep = average_bound_check(&xs, &space, &AvgBoundOpts::default()).unwrap();

    let mut report = Report::new(["quantity", "value"]);
    report.meta("members", rep.members).meta("max_size", 8).meta("max_depth", 3);
    report.row(["checked".to_string(), rep.checked.to_string()]);
    report.row(["violations".to_string(), rep.violations.len().to_string()]);
    if let Some(t) = &rep.tightest {
        report.row(["tightest_size".to_string(), t.size.to_string()]);
        report.row(["tightest_value".to_string(), t.value.to_string()]);
        report.row(["tightest_bound".to_string(), t.bound.to_string()]);
    }
    report.footer(format!("zero_violations = {}", rep.pass));
    let detail = format!("{} violations in {} checked", rep.violations.len(), rep.checked);
    CritOut { pass: rep.pass, detail, files: vec![("criterion-07.csv".into(), report)] }
}

/// Row catalog for the array experiments.
fn rows_catalog(space: &SpaceSpec) -> Vec<(String, BlockSeq)> {
    let units = |from: u32, count: u32, step: u32| -> Vec<FinVec> {
        (0..count).map(|k| FinVec::unit(from + step * k)).collect()
    };
    let xs = BlockSeq::new(units(1, 24, 2), "odd-units", true).unwrap();
    let ys = BlockSeq::new(units(2, 24, 2), "even-units", true).unwrap();
    let mix = |w: Rat| mix_seq(&xs, &ys, &w, space, &uncapped()).unwrap();
    vec![
        ("basis".into(), basis_seq(40).unwrap()),
        (
            "basis-tail-9".into(),
            BlockSeq::new((9..49).map(FinVec::unit).collect(), "basis-tail-9", true).unwrap(),
        ),
        ("flat".into(), flat_blocks(&IndexFamily::dyadic(6)).unwrap()),
        ("mix-0".into(), mix(Rat::zero())),
        ("mix-1/2".into(), mix(Rat::new(1, 2))),
        ("mix-1".into(), mix(Rat::one())),
    ]
}

/// The sandwich suite's array configurations (by catalog name).
const CONFIGS: &[&[&str]] = &[
    &["basis"],
    &["flat"],
    &["mix-0"],
    &["mix-1/2"],
    &["mix-1"],
    &["basis", "flat"],
    &["flat", "basis"],
    &["basis", "mix-1/2"],
    &["flat", "mix-0"],
    &["mix-1", "flat"],
    &["mix-1/2", "mix-1"],
    &["flat", "flat"],
    &["basis", "flat", "mix-1/2"],
    &["flat", "flat", "flat"],
    &["mix-0", "mix-1/2", "mix-1"],
    &["basis", "basis", "basis"],
    &["basis-tail-9", "flat", "mix-1"],
];

fn array_for(config: &[&str], catalog: &[(String, BlockSeq)]) -> SeqArray {
    let rows = config
        .iter()
        .map(|name| {
            catalog
                .iter()
                .find(|(n, _)| n == name)
                .unwrap_or_else(|| panic!("unknown row {name}"))
                .1
                .clone()
        })
        .collect();
    SeqArray::new(None, rows).unwrap()
}

fn config_name(config: &[&str]) -> String {
    config.join("+")
}

/// Sandwich estimate on every configured array: the exact norm of the
/// selected combination sits between the certified lower bound and twice
/// the (max + sum) upper bound, within 1/4.
fn criterion_8(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let catalog = rows_catalog(&space);
    let eps = quarter();
    let opts = SelectOpts::default();

    let results: Vec<_> = pool.install(|| {
        CONFIGS
            .par_iter()
            .map(|config| {
                let array = array_for(config, &catalog);
                let rep = sandwich_check(&array, &space, &eps, &opts).unwrap();
                // re-run the combined norm with the witness audited
                let mut combined = FinVec::empty();
                for (row, &j) in array.rows.iter().zip(&rep.selection.indices) {
                    combined = combined.add(row.member(j));
                }
                let (_, wok) = audited_norm(&combined, &space, &opts.engine);
                (rep, wok)
            })
            .collect()
    });

    let mut report = Report::new([
        "config", "rows", "indices", "floors", "surrogates", "norm", "lower", "upper", "pass",
        "witness_ok",
    ]);
    report.meta("eps", &eps).meta("configurations", CONFIGS.len());
    let mut pass = true;
    let mut detail = String::new();
    let join_us =
        |xs: &[usize]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
    let join_u32 =
        |xs: &[u32]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
    let join_rat =
        |xs: &[Rat]| xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";");
    for (config, (rep, wok)) in CONFIGS.iter().zip(&results) {
        if !(rep.pass && *wok) && detail.is_empty() {
            detail = format!(
                "config {}: norm {} outside [{} - eps, {} + eps] or witness invalid ({wok})",
                config_name(config),
                rep.a,
                rep.lower,
                rep.upper
            );
        }
        pass &= rep.pass && *wok;
        report.row([
            config_name(config),
            config.len().to_string(),
            join_us(&rep.selection.indices),
            join_u32(&rep.selection.size_floors),
            join_rat(&rep.selection.surrogates),
            rep.a.to_string(),
            rep.lower.to_string(),
            rep.upper.to_string(),
            rep.pass.to_string(),
            wok.to_string(),
        ]);
    }
    report.footer(format!("all_sandwiched = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-08.csv".into(), report)] }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        2 => vec![vec![0, 1], vec![1, 0]],
        3 => vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ],
        _ => vec![(0..n).collect()],
    }
}

/// Row permutations move the sandwich norm by at most a factor of 4.
fn criterion_9(pool: &rayon::ThreadPool) -> CritOut {
    let space = SpaceSpec::standard();
    let catalog = rows_catalog(&space);
    let eps = quarter();
    let opts = SelectOpts::default();

    let mut jobs: Vec<(&[&str], Vec<usize>)> = Vec::new();
    for config in CONFIGS {
        if config.len() >= 2 {
            for perm in permutations(config.len()) {
                jobs.push((config, perm));
            }
        }
    }

    let results: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|(config, perm)| {
                let array = array_for(config, &catalog);
                symmetry_check(&array, perm, &space, &eps, &opts).unwrap()
            })
            .collect()
    });

    let mut report = Report::new(["config", "perm", "a", "b", "constant", "pass"]);
    report.meta("eps", &eps).meta("checks", jobs.len());
    let mut pass = true;
    let mut detail = String::new();
    for ((config, perm), rep) in jobs.iter().zip(&results) {
        if !rep.pass && detail.is_empty() {
            detail = format!(
                "config {} perm {:?}: a {} vs b {} breaks the factor-4 bracket",
                config_name(config),
                perm,
                rep.a,
                rep.b
            );
        }
        pass &= rep.pass;
        report.row([
            config_name(config),
            perm.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";"),
            rep.a.to_string(),
            rep.b.to_string(),
            rep.constant.to_string(),
            rep.pass.to_string(),
        ]);
    }
    report.footer(format!("all_within_factor_4 = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-09.csv".into(), report)] }
}

// ------------------------------------------------------------------ tests

#[test]
fn criterion_01_oracle_equivalence() {
    criterion_1(&pool(0)).finish(1);
}

#[test]
fn criterion_02_witness_certification() {
    criterion_2(&pool(0)).finish(2);
}

#[test]
fn criterion_03_unconditionality_homogeneity() {
    criterion_3(&pool(0)).finish(3);
}

#[test]
fn criterion_04_blocking_bound() {
    criterion_4(&pool(0)).finish(4);
}

#[test]
fn criterion_05_spread_units_bounded() {
    criterion_5(&pool(0)).finish(5);
}

#[test]
fn criterion_06_index_dichotomy() {
    criterion_6(&pool(0)).finish(6);
}

#[test]
fn criterion_07_averaging_bound() {
    criterion_7(&pool(0)).finish(7);
}

#[test]
fn criterion_08_sandwich_suite() {
    criterion_8(&pool(0)).finish(8);
}

#[test]
fn criterion_09_symmetry_suite() {
    criterion_9(&pool(0)).finish(9);
}

/// Reruns criteria 1-9 twice at one thread and once at eight and compares
/// every produced file byte for byte.
#[test]
fn criterion_10_reproducibility() {
    let runners: &[fn(&rayon::ThreadPool) -> CritOut] = &[
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let single = pool(1);
    let wide = pool(8);
    let mut pass = true;
    let mut detail = String::new();
    let mut report = Report::new(["criterion", "file", "bytes", "rerun_identical", "threads8_identical"]);
    for (k, run) in runners.iter().enumerate() {
        let first = run(&single).rendered();
        let second = run(&single).rendered();
        let eighth = run(&wide).rendered();
        for ((name, a), ((_, b), (_, c))) in
            first.iter().zip(second.iter().zip(eighth.iter()))
        {
            let rerun = a == b;
            let threads = a == c;
            if !(rerun && threads) && detail.is_empty() {
                detail = format!("criterion {} file {name}: rerun {rerun}, threads8 {threads}", k + 1);
            }
            pass &= rerun && threads;
            report.row([
                (k + 1).to_string(),
                name.clone(),
                a.len().to_string(),
                rerun.to_string(),
                threads.to_string(),
            ]);
        }
    }
    report.footer(format!("all_identical = {pass}"));
    CritOut { pass, detail, files: vec![("criterion-10.csv".into(), report)] }.finish(10);
}
