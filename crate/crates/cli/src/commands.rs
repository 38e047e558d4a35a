//! Command implementations. Each builds one Report, stamps the resolved
//! configuration into its header, and reports whether its checks passed;
//! main turns that into output and an exit code.

use std::fs;

use normset::engine::oracle::{Oracle, OracleOpts};
use normset::engine::{self, EngineOpts};
use normset::index_lab::{average_bound_check, default_grid, empirical_alpha_tilde, AvgBoundOpts};
use normset::report::Report;
use normset::seq_lab::{
    asymptotic_model_weights, block_seq, sandwich_check, spreading_surrogate, symmetry_check,
    BlockMode, SelectOpts, SeqArray,
};
use normset::tree::FunctionalTree;
use normset::{validate, Error, FinVec, Rat, Result, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{
    input, AlphaArgs, AsmodelArgs, BlockArgs, Cli, Cmd, LemmaArgs, NormArgs, OracleArgs,
    SandwichArgs, SelectionFlags, SpreadingArgs, SymmetryArgs,
};

pub struct RunOutcome {
    pub report: Report,
    pub pass: bool,
    pub label: &'static str,
}

pub fn run(cli: &Cli) -> Result<RunOutcome> {
    let space = input::load_space(cli.space.as_deref())?;
    match &cli.cmd {
        Cmd::Norm(a) => norm_cmd(cli, &space, a, false),
        Cmd::Witness(a) => norm_cmd(cli, &space, a, true),
        Cmd::OracleCheck(a) => oracle_cmd(cli, &space, a),
        Cmd::Alpha(a) => alpha_cmd(cli, &space, a),
        Cmd::Lemma(a) => lemma_cmd(cli, &space, a),
        Cmd::Block(a) => block_cmd(cli, &space, a),
        Cmd::Spreading(a) => spreading_cmd(cli, &space, a),
        Cmd::Sandwich(a) => sandwich_cmd(cli, &space, a),
        Cmd::Symmetry(a) => symmetry_cmd(cli, &space, a),
        Cmd::Asmodel(a) => asmodel_cmd(cli, &space, a),
    }
}

fn stamp(report: &mut Report, cli: &Cli, space: &SpaceSpec, command: &str) {
    report
        .meta("command", command)
        .meta("space.theta", &space.theta)
        .meta("space.enforce_admissible", space.enforce_admissible)
        .meta("space.enforce_vfg", space.enforce_vfg)
        .meta("threads", cli.threads)
        .meta("node_budget", cli.node_budget.map_or("none".into(), |b: u64| b.to_string()));
}

fn stamp_caps(report: &mut Report, opts: &EngineOpts) {
    let show = |c: Option<u32>| c.map_or("none".into(), |v: u32| v.to_string());
    report.meta("size_cap", show(opts.size_cap)).meta("depth_cap", show(opts.depth_cap));
}

fn stamp_selection(report: &mut Report, f: &SelectionFlags) {
    report
        .meta("eps", &f.eps)
        .meta("streak", f.streak)
        .meta("scan_cap", f.scan_cap)
        .meta("schedule", &f.schedule)
        .meta("surrogate_s", f.surrogate_s)
        .meta("surrogate_len", f.surrogate_len);
}

fn engine_opts(cli: &Cli, size_cap: Option<u32>, depth_cap: Option<u32>) -> EngineOpts {
    EngineOpts { size_cap, depth_cap, node_budget: cli.node_budget }
}

fn select_opts(cli: &Cli, f: &SelectionFlags) -> Result<SelectOpts> {
    Ok(SelectOpts {
        streak: f.streak,
        scan_cap: f.scan_cap,
        s_schedule: input::parse_u32_list(&f.schedule)?,
        surrogate_s: f.surrogate_s,
        surrogate_len: f.surrogate_len,
        engine: engine_opts(cli, f.size_cap, f.depth_cap),
    })
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

/// Round-trip audit: the serialized witness must reparse, validate, and
/// re-evaluate to the reported value.
fn audit(witness: &FunctionalTree, x: &FinVec, value: &Rat, space: &SpaceSpec) -> Result<bool> {
    let reparsed = FunctionalTree::parse(&witness.to_string())?;
    Ok(validate(&reparsed, space).is_pass() && reparsed.evaluate(x, space)? == *value)
}

fn norm_cmd(cli: &Cli, space: &SpaceSpec, args: &NormArgs, detailed: bool) -> Result<RunOutcome> {
    let text = fs::read_to_string(&args.input)?;
    let vecs = FinVec::parse_lines(&text)?;
    if vecs.is_empty() {
        return Err(Error::Precondition("the input holds no vectors".into()));
    }
    let opts = engine_opts(cli, args.size_cap, args.depth_cap);
    let results = vecs
        .par_iter()
        .map(|x| engine::norm(x, space, &opts))
        .collect::<Result<Vec<_>>>()?;

    let label = if detailed { "witness" } else { "norm" };
    let mut report = if detailed {
        Report::new(["line", "vector", "value", "witness", "validation", "witness_value", "nodes", "depth"])
    } else if args.approx {
        Report::new(["line", "vector", "value", "witness", "approx"])
    } else {
        Report::new(["line", "vector", "value", "witness"])
    };
    stamp(&mut report, cli, space, label);
    stamp_caps(&mut report, &opts);
    report.meta("input", args.input.display());

    let mut pass = true;
    for (k, (x, res)) in vecs.iter().zip(&results).enumerate() {
        let certified = audit(&res.witness, x, &res.value, space)?;
        pass &= certified;
        let witness = res.witness.to_string();
        if detailed {
            report.row([
                (k + 1).to_string(),
                x.to_line(),
                res.value.to_string(),
                witness,
                if certified { "PASS".into() } else { "FAIL".into() },
                res.witness.evaluate(x, space)?.to_string(),
                res.witness.node_count().to_string(),
                res.witness.depth().to_string(),
            ]);
        } else if args.approx {
            report.row([
                (k + 1).to_string(),
                x.to_line(),
                res.value.to_string(),
                witness,
                format!("{:.6}", res.value.to_f64()),
            ]);
        } else {
            report.row([(k + 1).to_string(), x.to_line(), res.value.to_string(), witness]);
        }
    }
    report.footer(format!("witnesses_certified = {pass}"));
    Ok(RunOutcome { report, pass, label })
}

fn oracle_cmd(cli: &Cli, space: &SpaceSpec, args: &OracleArgs) -> Result<RunOutcome> {
    let k = args.max_support;
    if !(1..=7).contains(&k) {
        return Err(Error::Precondition(format!(
            "--max-support {k} is outside 1..=7; the box holds 5^K cases"
        )));
    }
    let levels =
        [Rat::zero(), Rat::one(), Rat::int(-1), Rat::new(1, 2), Rat::new(-1, 2)];
    let mut cases = Vec::with_capacity(5usize.pow(k));
    for code in 0..5usize.pow(k) {
        let mut c = code;
        let mut pairs = Vec::new();
        for i in 1..=k {
            let l = c % 5;
            c /= 5;
            if l > 0 {
                pairs.push((i, levels[l].clone()));
            }
        }
        cases.push(FinVec::from_pairs(pairs));
    }
    let split = cases.len();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for _ in 0..args.random {
        let mut pairs = Vec::new();
        for i in 1..=k {
            let l = rng.gen_range(0..5);
            if l > 0 {
                pairs.push((i, levels[l].clone()));
            }
        }
        cases.push(FinVec::from_pairs(pairs));
    }

    let opts = engine_opts(cli, Some(args.size_cap), Some(args.depth_cap));
    let engine_side = cases
        .par_iter()
        .map(|x| engine::norm(x, space, &opts).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let mut oracle = Oracle::new(
        space.clone(),
        OracleOpts {
            depth_cap: args.depth_cap,
            size_cap: args.size_cap,
            node_budget: cli.node_budget,
        },
    );

    let mut report = Report::new(["case", "kind", "vector", "engine", "family", "equal"]);
    stamp(&mut report, cli, space, "oracle-check");
    report
        .meta("max_support", k)
        .meta("size_cap", args.size_cap)
        .meta("depth_cap", args.depth_cap)
        .meta("box_cases", split)
        .meta("random", args.random)
        .meta("seed", args.seed);
    let mut pass = true;
    for (i, x) in cases.iter().enumerate() {
        let family = oracle.norm(x)?;
        let equal = engine_side[i] == family;
        pass &= equal;
        report.row([
            i.to_string(),
            if i < split { "box".into() } else { "random".into() },
            x.to_line(),
            engine_side[i].to_string(),
            family.to_string(),
            equal.to_string(),
        ]);
    }
    report.footer(format!("all_equal = {pass}"));
    Ok(RunOutcome { report, pass, label: "oracle-check" })
}

fn alpha_cmd(cli: &Cli, space: &SpaceSpec, args: &AlphaArgs) -> Result<RunOutcome> {
    let opts = engine_opts(cli, args.size_cap, args.depth_cap);
    let seq = input::parse_row(&args.rows, space, &opts)?;
    let grid = default_grid(seq.len());
    let profile = empirical_alpha_tilde(&seq, space, &grid, &args.eps, &opts)?;
    let mut report = profile.report();
    stamp(&mut report, cli, space, "alpha");
    stamp_caps(&mut report, &opts);
    report.meta("rows", &args.rows).meta("members", seq.len());
    let (g, v) = profile.judgment();
    report.footer(format!(
        "judgment = (s_min {}, len {}, tail {}) -> {v}",
        g.s_min, g.max_len, g.tail_start
    ));
    Ok(RunOutcome { report, pass: true, label: "alpha" })
}

fn lemma_cmd(cli: &Cli, space: &SpaceSpec, args: &LemmaArgs) -> Result<RunOutcome> {
    let engine = engine_opts(cli, None, None);
    let seq = input::parse_row(&args.rows, space, &engine)?;
    let opts = AvgBoundOpts {
        max_size: args.max_size,
        max_depth: args.max_depth,
        unnormalized: args.unnormalized,
        node_budget: cli.node_budget,
        engine,
    };
    let rep = average_bound_check(&seq, space, &opts)?;

    let mut report = Report::new(["case", "size", "value", "bound"]);
    stamp(&mut report, cli, space, "lemma");
    report
        .meta("rows", &args.rows)
        .meta("members", rep.members)
        .meta("scale", &rep.scale)
        .meta("max_size", args.max_size)
        .meta("max_depth", args.max_depth)
        .meta("checked", rep.checked);
    if let Some(t) = &rep.tightest {
        report.row([
            "tightest".to_string(),
            t.size.to_string(),
            t.value.to_string(),
            t.bound.to_string(),
        ]);
    }
    for v in &rep.violations {
        report.row([
            "violation".to_string(),
            v.size.to_string(),
            v.value.to_string(),
            v.bound.to_string(),
        ]);
    }
    report.footer(format!("zero_violations = {}", rep.pass));
    Ok(RunOutcome { report, pass: rep.pass, label: "lemma" })
}

fn block_cmd(cli: &Cli, space: &SpaceSpec, args: &BlockArgs) -> Result<RunOutcome> {
    let opts = engine_opts(cli, None, None);
    let seq = input::parse_row(&args.rows, space, &opts)?;
    let family = input::parse_family(&args.family)?;
    let mode = match args.mode.as_str() {
        "sum" => BlockMode::Sum,
        "average" => BlockMode::Average,
        other => {
            return Err(Error::Precondition(format!(
                "--mode `{other}` is neither sum nor average"
            )))
        }
    };
    let blocked = block_seq(&seq, &family, mode)?;
    let norms = blocked
        .members()
        .par_iter()
        .map(|m| engine::norm(m, space, &opts).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new(["member", "support", "vector", "norm"]);
    stamp(&mut report, cli, space, "block");
    report
        .meta("rows", &args.rows)
        .meta("family", &args.family)
        .meta("mode", &args.mode)
        .meta("kind", blocked.kind());
    for (j, (m, norm)) in blocked.members().iter().zip(&norms).enumerate() {
        report.row([
            (j + 1).to_string(),
            format!("{}..{}", m.min_supp().unwrap(), m.max_supp().unwrap()),
            m.to_line(),
            norm.to_string(),
        ]);
    }
    report.footer(format!("members = {}", blocked.len()));
    Ok(RunOutcome { report, pass: true, label: "block" })
}

fn spreading_cmd(cli: &Cli, space: &SpaceSpec, args: &SpreadingArgs) -> Result<RunOutcome> {
    let sel = select_opts(cli, &args.sel)?;
    let seq = input::parse_row(&args.rows, space, &sel.engine)?;
    let coeffs = input::parse_rat_list(&args.coeffs)?;
    let rep =
        spreading_surrogate(&seq, &coeffs, args.start, args.spacing, space, &args.trend_eps, &sel)?;

    let mut report = Report::new(["field", "value"]);
    stamp(&mut report, cli, space, "spreading");
    stamp_caps(&mut report, &sel.engine);
    report
        .meta("rows", &args.rows)
        .meta("coeffs", &args.coeffs)
        .meta("start", args.start)
        .meta("spacing", args.spacing)
        .meta("trend_eps", &args.trend_eps);
    report.row(["indices".to_string(), join(&rep.indices)]);
    report.row(["value".to_string(), rep.value.to_string()]);
    report.row(["lower".to_string(), rep.lower.to_string()]);
    report.row(["upper".to_string(), rep.upper.to_string()]);
    report.row(["surrogate".to_string(), rep.surrogate.to_string()]);
    report.row(["ones_value".to_string(), rep.ones_value.to_string()]);
    report.row(["fitted_c".to_string(), rep.fitted_c.to_string()]);
    report.row(["class".to_string(), rep.class.to_string()]);
    report.footer(format!("two_sided = {}", rep.pass));
    Ok(RunOutcome { report, pass: rep.pass, label: "spreading" })
}

fn build_array(
    rows: &str,
    anchor: &Option<String>,
    space: &SpaceSpec,
    engine: &EngineOpts,
) -> Result<SeqArray> {
    let rows = input::parse_rows(rows, space, engine)?;
    let anchor = anchor.as_deref().map(input::parse_anchor).transpose()?;
    SeqArray::new(anchor, rows)
}

fn sandwich_cmd(cli: &Cli, space: &SpaceSpec, args: &SandwichArgs) -> Result<RunOutcome> {
    let sel = select_opts(cli, &args.sel)?;
    let array = build_array(&args.rows, &args.anchor, space, &sel.engine)?;
    let rep = sandwich_check(&array, space, &args.sel.eps, &sel)?;

    let mut report = Report::new([
        "indices",
        "size_floors",
        "surrogates",
        "member_norms",
        "norm",
        "lower",
        "upper",
        "pass",
    ]);
    stamp(&mut report, cli, space, "sandwich");
    stamp_caps(&mut report, &sel.engine);
    stamp_selection(&mut report, &args.sel);
    report.meta("rows", &args.rows).meta("anchor", args.anchor.as_deref().unwrap_or("none"));
    report.row([
        join(&rep.selection.indices),
        join(&rep.selection.size_floors),
        join(&rep.selection.surrogates),
        join(&rep.member_norms),
        rep.a.to_string(),
        rep.lower.to_string(),
        rep.upper.to_string(),
        rep.pass.to_string(),
    ]);
    report.footer(format!("sandwiched = {}", rep.pass));
    Ok(RunOutcome { report, pass: rep.pass, label: "sandwich" })
}

fn symmetry_cmd(cli: &Cli, space: &SpaceSpec, args: &SymmetryArgs) -> Result<RunOutcome> {
    let sel = select_opts(cli, &args.sel)?;
    let array = build_array(&args.rows, &args.anchor, space, &sel.engine)?;
    let perm = input::parse_perm(&args.perm)?;
    let rep = symmetry_check(&array, &perm, space, &args.sel.eps, &sel)?;

    let mut report = Report::new(["field", "value"]);
    stamp(&mut report, cli, space, "symmetry");
    stamp_caps(&mut report, &sel.engine);
    stamp_selection(&mut report, &args.sel);
    report.meta("rows", &args.rows).meta("perm", &args.perm);
    report.row(["a".to_string(), rep.a.to_string()]);
    report.row(["b".to_string(), rep.b.to_string()]);
    report.row(["ratio".to_string(), rep.ratio.to_string()]);
    report.row(["constant".to_string(), rep.constant.to_string()]);
    report.row(["base_indices".to_string(), join(&rep.base.selection.indices)]);
    report.row(["permuted_indices".to_string(), join(&rep.permuted.selection.indices)]);
    report.footer(format!("within_factor = {}", rep.pass));
    Ok(RunOutcome { report, pass: rep.pass, label: "symmetry" })
}

fn default_lambdas(n: usize) -> Vec<Vec<Rat>> {
    let mut sets = vec![vec![Rat::one(); n]];
    for i in 0..n {
        let mut one_hot = vec![Rat::zero(); n];
        one_hot[i] = Rat::one();
        sets.push(one_hot);
    }
    if n >= 2 {
        sets.push((0..n).map(|i| if i % 2 == 0 { Rat::one() } else { Rat::int(-1) }).collect());
    }
    sets.push(vec![Rat::new(1, 2); n]);
    sets
}

fn asmodel_cmd(cli: &Cli, space: &SpaceSpec, args: &AsmodelArgs) -> Result<RunOutcome> {
    let sel = select_opts(cli, &args.sel)?;
    let array = build_array(&args.rows, &args.anchor, space, &sel.engine)?;
    let lambdas = match &args.lambdas {
        Some(text) => input::parse_lambda_sets(text)?,
        None => default_lambdas(array.rows.len()),
    };
    let rep = asymptotic_model_weights(&array, &lambdas, space, &args.sel.eps, &sel)?;

    let mut report = Report::new(["coeffs", "value", "lower", "upper", "pass"]);
    stamp(&mut report, cli, space, "asmodel");
    stamp_caps(&mut report, &sel.engine);
    stamp_selection(&mut report, &args.sel);
    report
        .meta("rows", &args.rows)
        .meta("indices", join(&rep.selection.indices))
        .meta("weights", join(&rep.weights));
    for check in &rep.checks {
        report.row([
            join(&check.coeffs),
            check.value.to_string(),
            check.lower.to_string(),
            check.upper.to_string(),
            check.pass.to_string(),
        ]);
    }
    report.footer(format!("all_bracketed = {}", rep.pass));
    Ok(RunOutcome { report, pass: rep.pass, label: "asmodel" })
}
