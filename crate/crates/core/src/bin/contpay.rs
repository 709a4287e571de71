//! Command-line front end: solve games, evaluate payoffs, run property
//! checks, compare solvers, and replay the counterexample constructions.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or input error,
//! 3 verification gap or solver disagreement, 4 demo mismatch,
//! 5 check result differs from `--expect`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use contpay::analysis::{
    self, check_fairly_mixing, check_fairly_mixing_schedule, check_prefix_monotone, check_shift_deterministic,
    detect_multi_discounted, fig1_counterexample, find_mdp_violation, mdp_report, word_pairs, word_triples, Verdict,
};
use contpay::graph::{not_multi_arena, GameGraph, Owner};
use contpay::io::{self, CheckReport, LoadedPayoff, SolveReport, WitnessReport};
use contpay::payoff::{fixtures, ContractingBase, Payoff, DEFAULT_EPS, DEFAULT_EPS_CMP};
use contpay::solver::{
    brute_force_solve, improve, random_switch_solve, solve_value_iteration, verify_equilibrium, Equilibrium,
    SolverError, SwitchRule, Tolerances,
};
use contpay::words::{up_words_up_to, words_up_to, FiniteWord, Letter, UpWord};

#[derive(Parser)]
#[command(name = "contpay", version, about = "Games with continuous positionally determined payoffs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Convergence tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_EPS)]
    eps: f64,
    /// Comparison tolerance for tightness, violation and checker gaps.
    #[arg(long = "eps-cmp", global = true, default_value_t = DEFAULT_EPS_CMP)]
    eps_cmp: f64,
    /// Seed for randomized methods.
    #[arg(long, global = true, env = "CONTPAY_SEED", default_value_t = 0)]
    seed: u64,
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a game and verify the resulting equilibrium.
    Solve {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        payoff: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Vi)]
        method: Method,
    },
    /// Evaluate a payoff on a lasso word such as `22(3)`.
    Eval {
        #[arg(long)]
        payoff: PathBuf,
        word: String,
    },
    /// Run a sampling-based property check on a payoff.
    Check {
        #[arg(long)]
        payoff: PathBuf,
        #[arg(value_enum)]
        which: Check,
        /// Longest prefix in the word samples.
        #[arg(long = "max-prefix-len", default_value_t = 2)]
        max_prefix_len: usize,
        /// Longest cycle in the word samples.
        #[arg(long = "max-cycle-len", default_value_t = 2)]
        max_cycle_len: usize,
        /// Expected result; a different result exits with 5.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Run every solver on a game and report the largest value disagreement.
    Compare {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        payoff: PathBuf,
    },
    /// Rebuild one of the counterexample constructions and check its numbers.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Vi,
    Si,
    Rand,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    PrefixMonotone,
    ShiftDet,
    FairlyMixing,
    MultiDiscounted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    NotMulti,
    Fig1,
    Mdp,
}

/// An error attributable to the caller's input.
#[derive(Debug, thiserror::Error)]
#[error("{0:#}")]
struct UsageError(anyhow::Error);

fn usage<E: Into<anyhow::Error>>(e: E) -> anyhow::Error {
    UsageError(e.into()).into()
}

/// A run that completed but whose outcome maps to a non-zero exit code.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances> {
    if !(cli.eps > 0.0) || !(cli.eps_cmp >= cli.eps) {
        return Err(usage(anyhow!("need eps > 0 and eps-cmp >= eps, got {} and {}", cli.eps, cli.eps_cmp)));
    }
    Ok(Tolerances { eps: cli.eps, eps_cmp: cli.eps_cmp })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)
}

fn load_game(path: &Path) -> Result<GameGraph> {
    io::parse_game(&read(path)?).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

fn load_payoff(path: &Path) -> Result<LoadedPayoff> {
    io::parse_payoff(&read(path)?).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

/// The payoff's base with letters ordered like the game's labels.
fn base_for(game: &GameGraph, payoff: &LoadedPayoff) -> Result<ContractingBase> {
    payoff.to_base().reindexed(game.alphabet()).context("game and payoff labels differ").map_err(usage)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let tol = tolerances(cli)?;
    match &cli.command {
        Command::Solve { game, payoff, method } => cmd_solve(cli, game, payoff, *method, tol),
        Command::Eval { payoff, word } => cmd_eval(payoff, word),
        Command::Check { payoff, which, max_prefix_len, max_cycle_len, expect } => {
            cmd_check(cli, payoff, *which, *max_prefix_len, *max_cycle_len, expect.as_deref(), tol)
        }
        Command::Compare { game, payoff } => cmd_compare(cli, game, payoff, tol),
        Command::Demo { which } => cmd_demo(cli, *which, tol),
    }
}

fn solve_with(g: &GameGraph, base: &ContractingBase, method: Method, seed: u64, tol: Tolerances) -> Result<Equilibrium, SolverError> {
    match method {
        Method::Vi => solve_value_iteration(g, base, tol),
        Method::Si => {
            let start = contpay::graph::PositionalStrategy::first_edges(g, Owner::Max);
            Ok(improve(g, base, start, SwitchRule::Greedy, tol)?.equilibrium)
        }
        Method::Rand => Ok(random_switch_solve(g, base, seed, tol)?.equilibrium),
        Method::Brute => Ok(brute_force_solve(g, base)?.0),
    }
}

fn cmd_solve(cli: &Cli, game: &Path, payoff: &Path, method: Method, tol: Tolerances) -> Result<Outcome> {
    let g = load_game(game)?;
    let base = base_for(&g, &load_payoff(payoff)?)?;
    let eq = solve_with(&g, &base, method, cli.seed, tol).map_err(|e| match e {
        SolverError::TooLarge { .. } => usage(e),
        e => e.into(),
    })?;
    let report = SolveReport::new(&eq, &base);
    let check = verify_equilibrium(&g, &base, &eq.sigma, &eq.tau, 10.0 * tol.eps)?;
    let text = if cli.pretty { solve_table(&g, &report) } else { io::to_json(&report, false) };
    if !check.pass {
        eprintln!(
            "verification failed: gap {:e} at node {} exceeds {:e}",
            check.gap, check.worst_node, check.tol
        );
        return Ok(Outcome { text, code: 3 });
    }
    Ok(Outcome::ok(text))
}

fn solve_table(g: &GameGraph, r: &SolveReport) -> String {
    let mut s = format!("method {}  iterations {}  residual {:e}\n", r.method, r.iterations, r.residual);
    let _ = writeln!(s, "{:>5}  {:>5}  {:>18}  {:>6}", "node", "owner", "value", "edge");
    for u in 0..g.node_count() {
        let key = u.to_string();
        let (owner, edge) = match g.owner(u) {
            Owner::Max => ("max", r.sigma.get(&key)),
            Owner::Min => ("min", r.tau.get(&key)),
        };
        let edge = edge.map_or("-".to_string(), |e| e.to_string());
        let _ = writeln!(s, "{u:>5}  {owner:>5}  {:>18.15}  {edge:>6}", r.values[&key]);
    }
    s.trim_end().to_string()
}

/// `x` rounded to 15 significant digits, printed in shortest form.
fn sig15(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    format!("{rounded:?}")
}

fn cmd_eval(payoff: &Path, word: &str) -> Result<Outcome> {
    let p = load_payoff(payoff)?;
    let w = p.alphabet().parse_up(word).with_context(|| format!("parsing word `{word}`")).map_err(usage)?;
    let v = p.as_payoff().eval(&w)?;
    Ok(Outcome::ok(sig15(v)))
}

fn expect_outcome(report: &CheckReport, expect: Option<&str>, pretty: bool, human: String) -> Outcome {
    let text = if pretty { human } else { io::to_json(report, false) };
    match expect {
        Some(e) if e != report.result => {
            eprintln!("expected `{e}`, got `{}`", report.result);
            Outcome { text, code: 5 }
        }
        _ => Outcome::ok(text),
    }
}

fn cmd_check(
    cli: &Cli,
    payoff: &Path,
    which: Check,
    max_prefix: usize,
    max_cycle: usize,
    expect: Option<&str>,
    tol: Tolerances,
) -> Result<Outcome> {
    let loaded = load_payoff(payoff)?;
    let p = loaded.as_payoff();
    let a = p.alphabet().clone();
    let samples = up_words_up_to(&a, max_prefix, max_cycle.max(1));
    let prefixes = words_up_to(&a, max_prefix);
    let sample = json!({
        "max_prefix_len": max_prefix,
        "max_cycle_len": max_cycle.max(1),
        "lassos": samples.len(),
        "prefixes": prefixes.len(),
    });
    let tolerances = json!({"eps": tol.eps, "eps_cmp": tol.eps_cmp});
    let (report, human) = match which {
        Check::PrefixMonotone => {
            let w = check_prefix_monotone(p, &prefixes, &word_pairs(&samples), tol.eps_cmp)?;
            witness_report("prefix_monotone", w, &a, sample, tolerances)
        }
        Check::ShiftDet => {
            let letters: Vec<Letter> = a.letters().collect();
            let w = check_shift_deterministic(p, &samples, &letters, tol.eps, tol.eps_cmp).map_err(usage)?;
            witness_report("shift_deterministic", w, &a, sample, tolerances)
        }
        Check::FairlyMixing => fairly_mixing_report(p, &prefixes, &samples, tol, sample, tolerances)?,
        Check::MultiDiscounted => {
            let verdict = detect_multi_discounted(p, &samples, &samples, tol.eps_cmp)?;
            let (witness, details) = match &verdict {
                Verdict::NotMultiDiscounted(w) => (Some(WitnessReport::new(w, &a)), None),
                Verdict::MultiDiscounted { lambda, w } | Verdict::Inconclusive { lambda, w, .. } => {
                    let names = a.names();
                    let lam: serde_json::Map<_, _> = names.iter().cloned().zip(lambda.iter().map(|&x| json!(x))).collect();
                    let rew: serde_json::Map<_, _> = names.iter().cloned().zip(w.iter().map(|&x| json!(x))).collect();
                    (None, Some(json!({"lambda": lam, "w": rew})))
                }
            };
            let human = match &witness {
                Some(w) => format!("multi_discounted: {}\n  {}", verdict.as_str(), witness_line(w)),
                None => format!("multi_discounted: {}\n  fit {}", verdict.as_str(), details.as_ref().unwrap()),
            };
            let report = CheckReport {
                check: "multi_discounted".into(),
                result: verdict.as_str().into(),
                witness,
                sample,
                tolerances,
                details,
            };
            (report, human)
        }
    };
    Ok(expect_outcome(&report, expect, cli.pretty, human))
}

fn witness_line(w: &WitnessReport) -> String {
    format!("{} words [{}] values {:?} margin {:e}", w.kind, w.words.join(", "), w.values, w.margin)
}

fn witness_report(
    check: &str,
    w: Option<analysis::Witness>,
    a: &contpay::words::Alphabet,
    sample: serde_json::Value,
    tolerances: serde_json::Value,
) -> (CheckReport, String) {
    let witness = w.as_ref().map(|w| WitnessReport::new(w, a));
    let result = if witness.is_some() { "witness" } else { "none" };
    let human = match &witness {
        Some(w) => format!("{check}: witness\n  {}", witness_line(w)),
        None => format!("{check}: no violation in sample {sample}"),
    };
    let report = CheckReport { check: check.into(), result: result.into(), witness, sample, tolerances, details: None };
    (report, human)
}

fn fairly_mixing_report(
    p: &dyn Payoff,
    prefixes: &[FiniteWord],
    samples: &[UpWord],
    tol: Tolerances,
    sample: serde_json::Value,
    tolerances: serde_json::Value,
) -> Result<(CheckReport, String)> {
    let a = p.alphabet();
    let blocks: Vec<&FiniteWord> = prefixes.iter().filter(|u| !u.is_empty()).collect();
    let mut failure = None;
    'sandwich: for u in &blocks {
        for alpha in samples {
            let r = check_fairly_mixing(p, u, alpha, tol.eps_cmp)?;
            if !r.pass {
                failure = Some(json!({
                    "condition": "sandwich",
                    "u": a.format_finite(u),
                    "alpha": a.format_up(alpha),
                    "values": [r.u_omega, r.alpha, r.u_alpha],
                }));
                break 'sandwich;
            }
        }
    }
    if failure.is_none() {
        'schedule: for x in &blocks {
            for y in &blocks {
                for z in &blocks {
                    let sched = [(*x).clone(), (*y).clone(), (*z).clone()];
                    let r = check_fairly_mixing_schedule(p, &sched, tol.eps_cmp)?;
                    if !r.pass {
                        let names: Vec<String> = sched.iter().map(|b| a.format_finite(b)).collect();
                        failure = Some(json!({
                            "condition": "schedule",
                            "blocks": names,
                            "values": [r.whole, r.even, r.odd, r.inf_periodic, r.sup_periodic],
                        }));
                        break 'schedule;
                    }
                }
            }
        }
    }
    let result = if failure.is_some() { "fail" } else { "pass" };
    let human = match &failure {
        Some(f) => format!("fairly_mixing: fail\n  {f}"),
        None => format!("fairly_mixing: pass on sample {sample}"),
    };
    let report =
        CheckReport { check: "fairly_mixing".into(), result: result.into(), witness: None, sample, tolerances, details: failure };
    Ok((report, human))
}

/// Largest disagreement tolerated by `compare`.
const COMPARE_TOL: f64 = 1e-6;

fn cmd_compare(cli: &Cli, game: &Path, payoff: &Path, tol: Tolerances) -> Result<Outcome> {
    let g = load_game(game)?;
    let base = base_for(&g, &load_payoff(payoff)?)?;
    let mut results: Vec<(&str, Vec<f64>)> = Vec::new();
    for (name, method) in [("vi", Method::Vi), ("si", Method::Si), ("rand", Method::Rand), ("brute", Method::Brute)] {
        match solve_with(&g, &base, method, cli.seed, tol) {
            Ok(eq) => results.push((name, eq.values.reported(&base))),
            Err(SolverError::TooLarge { .. }) if name == "brute" => {}
            Err(e) => return Err(e.into()),
        }
    }
    let mut gap: f64 = 0.0;
    for (i, (_, a)) in results.iter().enumerate() {
        for (_, b) in &results[i + 1..] {
            gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(gap, f64::max);
        }
    }
    let agree = gap <= COMPARE_TOL;
    let text = if cli.pretty {
        let mut s = String::new();
        for (name, v) in &results {
            let vals: Vec<String> = v.iter().map(|x| format!("{x:.12}")).collect();
            let _ = writeln!(s, "{name:>6}  {}", vals.join("  "));
        }
        let _ = write!(s, "max gap {gap:e} ({})", if agree { "agree" } else { "DISAGREE" });
        s
    } else {
        let methods: serde_json::Map<_, _> = results.iter().map(|(n, v)| (n.to_string(), json!(v))).collect();
        io::to_json(&json!({"methods": methods, "max_gap": gap, "agree": agree}), false)
    };
    Ok(Outcome { text, code: if agree { 0 } else { 3 } })
}

/// Tolerance for reproducing published numbers.
const DEMO_TOL: f64 = 1e-9;

struct DemoRow {
    label: String,
    expected: f64,
    computed: f64,
}

impl DemoRow {
    fn ok(&self) -> bool {
        (self.expected - self.computed).abs() <= DEMO_TOL
    }
}

fn demo_output(cli: &Cli, title: &str, rows: &[DemoRow], notes: Vec<String>, extra: serde_json::Value) -> Outcome {
    let pass = rows.iter().all(DemoRow::ok);
    let text = if cli.pretty {
        let mut s = format!("{title}\n{:<36} {:>18} {:>18}  ok\n", "quantity", "expected", "computed");
        for r in rows {
            let _ = writeln!(s, "{:<36} {:>18.12} {:>18.12}  {}", r.label, r.expected, r.computed, if r.ok() { "yes" } else { "NO" });
        }
        for n in &notes {
            let _ = writeln!(s, "{n}");
        }
        let _ = write!(s, "{}", if pass { "all numbers reproduced" } else { "MISMATCH" });
        s
    } else {
        let rows: Vec<_> = rows
            .iter()
            .map(|r| json!({"quantity": r.label, "expected": r.expected, "computed": r.computed, "ok": r.ok()}))
            .collect();
        io::to_json(&json!({"demo": title, "rows": rows, "notes": notes, "details": extra, "pass": pass}), false)
    };
    Outcome { text, code: if pass { 0 } else { 4 } }
}

fn cmd_demo(cli: &Cli, which: Demo, tol: Tolerances) -> Result<Outcome> {
    match which {
        Demo::NotMulti => demo_not_multi(cli, tol),
        Demo::Fig1 => demo_fig1(cli, tol),
        Demo::Mdp => demo_mdp(cli),
    }
}

fn demo_not_multi(cli: &Cli, tol: Tolerances) -> Result<Outcome> {
    let base = fixtures::not_multi_base();
    let a = base.alphabet().clone();
    let mut rows = Vec::new();
    for (w, v) in fixtures::NOT_MULTI_VALUES {
        rows.push(DemoRow { label: format!("phi({w})"), expected: v, computed: base.eval(&a.parse_up(w)?)? });
    }
    let fig = not_multi_arena();
    let mut notes = Vec::new();
    for (name, method) in [("vi", Method::Vi), ("si", Method::Si), ("rand", Method::Rand)] {
        let eq = solve_with(&fig.graph, &base, method, cli.seed, tol)?;
        for (i, v) in [0.5, 0.26, 0.125].into_iter().enumerate() {
            rows.push(DemoRow { label: format!("{name}: value at v{}", i + 1), expected: v, computed: eq.values[fig.v[i]] });
        }
        let left = eq.sigma == fig.go_left();
        rows.push(DemoRow {
            label: format!("{name}: goes left at v1, v2, v3"),
            expected: 1.0,
            computed: if left { 1.0 } else { 0.0 },
        });
    }
    let samples = up_words_up_to(&a, 2, 1);
    let verdict = detect_multi_discounted(&base, &samples, &samples, tol.eps_cmp)?;
    notes.push(format!("multi-discounted detector: {}", verdict.as_str()));
    rows.push(DemoRow {
        label: "detector says not multi-discounted".into(),
        expected: 1.0,
        computed: if matches!(verdict, Verdict::NotMultiDiscounted(_)) { 1.0 } else { 0.0 },
    });
    Ok(demo_output(cli, "not-multi", &rows, notes, json!(null)))
}

fn demo_fig1(cli: &Cli, tol: Tolerances) -> Result<Outcome> {
    let broken = fixtures::flip_after(fixtures::halving_base(), Letter(0));
    let a = broken.alphabet().clone();
    let prefixes = words_up_to(&a, 2);
    let pairs = word_pairs(&up_words_up_to(&a, 1, 1));
    let w = check_prefix_monotone(&broken, &prefixes, &pairs, tol.eps_cmp)?
        .ok_or_else(|| anyhow!("no prefix-monotonicity witness in the sample"))?;
    let r = fig1_counterexample(&broken, &w, tol.eps_cmp)?;
    let wr = WitnessReport::new(&w, &a);
    let notes = vec![
        format!("witness u, v, beta, gamma = {}", wr.words.join(", ")),
        format!("beta lasso:  Val from a = {:.6}, from b = {:.6}", r.beta_values.0, r.beta_values.1),
        format!("gamma lasso: Val from a = {:.6}, from b = {:.6}", r.gamma_values.0, r.gamma_values.1),
        if r.uniform_optimum {
            "a single positional strategy is optimal from both entries".into()
        } else {
            "no uniform positional optimum".into()
        },
    ];
    let rows = vec![
        DemoRow { label: "witness revalidates".into(), expected: 1.0, computed: f64::from(u8::from(w.revalidate(&broken, 1e-12)?)) },
        DemoRow { label: "no uniform positional optimum".into(), expected: 1.0, computed: f64::from(u8::from(!r.uniform_optimum)) },
    ];
    let extra = json!({"witness": wr, "beta_values": [r.beta_values.0, r.beta_values.1], "gamma_values": [r.gamma_values.0, r.gamma_values.1]});
    Ok(demo_output(cli, "fig1", &rows, notes, extra))
}

fn demo_mdp(cli: &Cli) -> Result<Outcome> {
    let base = fixtures::not_multi_base();
    let a = base.alphabet().clone();
    let letter = a.letter("2").expect("label 2");
    let mut candidates = vec![(a.parse_up("(3)")?, a.parse_up("1(3)")?, a.parse_up("11(3)")?)];
    candidates.extend(word_triples(&up_words_up_to(&a, 2, 1)));
    let found = find_mdp_violation(&base, letter, &candidates, 1e-4)?
        .ok_or_else(|| anyhow!("no violating three-lasso instance on the grid"))?;
    let m = &found.mdp;
    let rep = mdp_report(&base, m)?;
    let (loss_p, loss_q) = rep.losses();
    let notes = vec![
        format!(
            "a = {}, beta = {}, gamma = {}, delta = {}",
            a.name(m.letter),
            a.format_up(&m.beta),
            a.format_up(&m.gamma),
            a.format_up(&m.delta)
        ),
        format!("p = {:?}, q = {:?}, grid margin {:.6}", m.p, m.q, found.margin),
        format!("from u: E[p] = {:.6} < E[q] = {:.6}", rep.u_p, rep.u_q),
        format!("from v: E[p] = {:.6} > E[q] = {:.6}", rep.v_p, rep.v_q),
    ];
    let rows = vec![
        DemoRow { label: "action p loses at u by > 1e-4".into(), expected: 1.0, computed: f64::from(u8::from(loss_p > 1e-4)) },
        DemoRow { label: "action q loses at v by > 1e-4".into(), expected: 1.0, computed: f64::from(u8::from(loss_q > 1e-4)) },
    ];
    let extra = json!({"p": m.p, "q": m.q, "margin": found.margin, "expectations": {"u_p": rep.u_p, "u_q": rep.u_q, "v_p": rep.v_p, "v_q": rep.v_q}});
    Ok(demo_output(cli, "mdp", &rows, notes, extra))
}
