//! Batch front-end for the screening solver: validate instances, solve
//! them, cross-check against the brute-force oracle, sweep belief grids,
//! and test menus for rationalizability. Output is CSV or JSON, always
//! deterministic.
//!
//! Exit codes: 0 success, 2 validation failure, 3 capacity or cap
//! refusal, 4 inconclusive rationalizability verdict.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use screening::beliefs::{log_concave_grid, Belief};
use screening::discrete_calc::TabulatedFn;
use screening::model::{Contract, Menu, TypeSpace, ValueFunction};
use screening::oracle::{brute_force_optimal, OracleCaps};
use screening::rationalizability::{
    fixed_point_check, is_delta_o_rationalizable, BeliefGrid, FixedPointCaps, SearchConfig,
    Verdict,
};
use screening::{format_rat, parse_rat, solver, Error, Rat};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "screening", about = "Exact discrete screening toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance: value-function shape, type grid, belief.
    Check {
        config: PathBuf,
    },
    /// Solve an instance and emit the per-type CSV plus a summary.
    Solve {
        config: PathBuf,
        /// Treat shape warnings and capacity overflows as errors.
        #[arg(long)]
        strict: bool,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and compare against brute-force menu enumeration.
    OracleVerify {
        config: PathBuf,
    },
    /// Solve at every log-concave belief on a simplex grid.
    Sweep {
        config: PathBuf,
        /// Grid denominator: coordinates are multiples of 1/d.
        #[arg(long, default_value_t = 4)]
        grid_denominator: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a menu is rationalizable; emit a JSON verdict.
    Rationalize {
        config: PathBuf,
        /// JSON menu file: an array of [q, t] pairs.
        #[arg(long)]
        menu: PathBuf,
        /// Also run the literal level-by-level reduction on a full grid.
        #[arg(long)]
        fixed_point: bool,
        /// Grid denominator for --fixed-point.
        #[arg(long, default_value_t = 4)]
        grid_denominator: u64,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Config {
    b: u64,
    m: u64,
    gamma: u64,
    value_fn: ValueFnConfig,
    #[serde(default)]
    belief: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ValueFnConfig {
    Quadratic { linear: String, quad: String },
    Table { values: Vec<String> },
}

/// A failure with the exit code it should map to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn validation(message: impl Into<String>) -> Failure {
    Failure::new(2, message)
}

fn refusal(message: impl Into<String>) -> Failure {
    Failure::new(3, message)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { config } => cmd_check(&config),
        Command::Solve {
            config,
            strict,
            out,
        } => cmd_solve(&config, strict, out.as_deref()),
        Command::OracleVerify { config } => cmd_oracle_verify(&config),
        Command::Sweep {
            config,
            grid_denominator,
            out,
        } => cmd_sweep(&config, grid_denominator, out.as_deref()),
        Command::Rationalize {
            config,
            menu,
            fixed_point,
            grid_denominator,
            out,
        } => cmd_rationalize(&config, &menu, fixed_point, grid_denominator, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_config(path: &std::path::Path) -> Result<Config, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        validation(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn build_table(cfg: &Config) -> Result<TabulatedFn, Failure> {
    let table = match &cfg.value_fn {
        ValueFnConfig::Quadratic { linear, quad } => {
            let a = parse_rat(linear).map_err(|e| validation(e.to_string()))?;
            let c = parse_rat(quad).map_err(|e| validation(e.to_string()))?;
            TabulatedFn::from_quadratic(&a, &c, cfg.b)
        }
        ValueFnConfig::Table { values } => {
            let parsed: Result<Vec<Rat>, _> = values.iter().map(|s| parse_rat(s)).collect();
            let parsed = parsed.map_err(|e| validation(e.to_string()))?;
            if parsed.len() != cfg.b as usize + 1 {
                return Err(validation(format!(
                    "table has {} values but the grid 0..={} needs {}",
                    parsed.len(),
                    cfg.b,
                    cfg.b + 1
                )));
            }
            TabulatedFn::new(parsed)
        }
    };
    table.map_err(|e| validation(e.to_string()))
}

fn build_instance(cfg: &Config) -> Result<(ValueFunction, TypeSpace), Failure> {
    let table = build_table(cfg)?;
    let v = ValueFunction::new(table).map_err(|e| validation(e.to_string()))?;
    let ts =
        TypeSpace::new(cfg.m, cfg.gamma, cfg.b).map_err(|e| validation(e.to_string()))?;
    Ok((v, ts))
}

fn require_belief(cfg: &Config, ts: &TypeSpace) -> Result<Belief, Failure> {
    let strings = cfg
        .belief
        .as_ref()
        .ok_or_else(|| validation("config is missing the \"belief\" field"))?;
    let p = Belief::from_strings(strings).map_err(|e| validation(e.to_string()))?;
    if p.type_count() as u64 != ts.type_count() {
        return Err(validation(format!(
            "belief has {} entries but m = {}",
            p.type_count(),
            ts.type_count()
        )));
    }
    Ok(p)
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn cmd_check(path: &std::path::Path) -> CmdResult {
    let cfg = load_config(path)?;
    let table = build_table(&cfg)?;
    let report = table.check_concavity();
    println!("value function on 0..={}:", cfg.b);
    println!("  v(0) = 0:                    {}", flag(report.zero_at_origin));
    println!("  strictly increasing:         {}", flag(report.increasing));
    println!("  strictly concave:            {}", flag(report.strictly_concave));
    println!(
        "  bounded concavity (>= -1):   {}",
        flag(report.bounded_concavity)
    );
    println!(
        "  no integer forward diff:     {}",
        flag(report.no_integer_forward_diff)
    );

    let grid_ok = cfg.m >= 1 && cfg.b > cfg.m && cfg.gamma >= cfg.b;
    println!("type grid m = {}, gamma = {}, b = {}:", cfg.m, cfg.gamma, cfg.b);
    println!("  gamma >= b > m >= 1:         {}", flag(grid_ok));
    let mut warnings = Vec::new();
    if grid_ok && cfg.gamma == cfg.b {
        warnings.push(
            "gamma = b: the top type's cost touches the capacity bound; \
             ties with the outside option are detected at solve time"
                .to_string(),
        );
    }
    if !report.increasing {
        warnings.push("value function is not strictly increasing on the full grid".into());
    }
    if !report.bounded_concavity {
        warnings.push(
            "second difference drops below -1; solutions may bunch and \
             monotonicity can be weak only"
                .into(),
        );
    }
    if !report.no_integer_forward_diff {
        warnings.push("an integer forward difference can produce ties and non-unique optima".into());
    }

    let mut belief_ok = true;
    if let Some(strings) = &cfg.belief {
        match Belief::from_strings(strings) {
            Ok(p) => {
                let lc = p.is_log_concave();
                println!("belief ({} entries):", p.type_count());
                println!("  full support, sums to 1:     ok");
                println!("  log-concave:                 {}", flag(lc));
                if p.type_count() as u64 != cfg.m {
                    belief_ok = false;
                    println!("  matches m = {}:              FAIL", cfg.m);
                }
                if !lc {
                    belief_ok = false;
                }
            }
            Err(e) => {
                belief_ok = false;
                println!("belief: FAIL ({e})");
            }
        }
    }
    for w in &warnings {
        println!("warning: {w}");
    }

    let hard_ok =
        report.zero_at_origin && report.strictly_concave && grid_ok && belief_ok;
    if hard_ok {
        Ok(())
    } else {
        Err(validation("instance failed validation; see report above"))
    }
}

/// Shared solve plumbing: instance, belief, shape warnings, solution.
fn solve_instance(
    cfg: &Config,
    strict: bool,
) -> Result<(ValueFunction, TypeSpace, Belief, solver::Solution, Vec<String>), Failure> {
    let (v, ts) = build_instance(cfg)?;
    let p = require_belief(cfg, &ts)?;
    let report = v.table().check_concavity();
    let mut warnings = Vec::new();
    if !report.increasing {
        warnings.push("value function is not strictly increasing".to_string());
    }
    if !report.bounded_concavity {
        warnings.push("second difference drops below -1".to_string());
    }
    if !report.no_integer_forward_diff {
        warnings.push("integer forward difference present".to_string());
    }
    if strict && !warnings.is_empty() {
        return Err(validation(format!(
            "--strict: {}",
            warnings.join("; ")
        )));
    }
    let s = solver::solve(&v, &ts, &p).map_err(|e| validation(e.to_string()))?;
    Ok((v, ts, p, s, warnings))
}

fn capacity_failure(transfers: &[u64], b: u64) -> Option<u64> {
    transfers.iter().copied().max().filter(|&t| t > b)
}

fn emit(out: Option<&std::path::Path>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_solve(path: &std::path::Path, strict: bool, out: Option<&std::path::Path>) -> CmdResult {
    let cfg = load_config(path)?;
    let (v, ts, p, s, warnings) = solve_instance(&cfg, strict)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }

    let mut over_capacity = None;
    for a in &s.assignments {
        if let Some(t) = capacity_failure(&a.transfers(), cfg.b) {
            over_capacity = Some(t);
        }
    }
    if let Some(t) = over_capacity {
        let msg = format!(
            "a formula transfer ({t}) exceeds the grid bound b = {}; rerun with b >= {t}",
            cfg.b
        );
        if strict {
            return Err(refusal(msg));
        }
        eprintln!("warning: {msg}");
    }

    let csv = solver::solution_csv(&v, &ts, &p, &s).map_err(|e| validation(e.to_string()))?;
    emit(out, &csv)?;

    let mut summary = String::new();
    summary.push_str(&format!(
        "unique: {}{}\n",
        s.unique,
        if s.unique {
            String::new()
        } else {
            format!(
                " (ties at type index {})",
                s.nonunique_types
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            )
        }
    ));
    if s.assignments.len() > 1 {
        summary.push_str(&format!(
            "note: {} optimal assignments; tied quantity sets are adjacent integers\n",
            s.assignments.len()
        ));
    }
    summary.push_str(&format!(
        "monotonicity: weak = {}, strict = {}\n",
        s.monotonicity.weak, s.monotonicity.strict
    ));
    if s.collapsed.iter().any(|&c| c) {
        summary.push_str("bunching: adjacent types share a contract\n");
    }
    summary.push_str(&format!(
        "expected principal payoff: {}\n",
        format_rat(&s.expected_payoffs[0])
    ));
    eprint!("{summary}");
    Ok(())
}

fn cmd_oracle_verify(path: &std::path::Path) -> CmdResult {
    let cfg = load_config(path)?;
    let (v, ts, p, s, _) = solve_instance(&cfg, false)?;
    for a in &s.assignments {
        if let Some(t) = capacity_failure(&a.transfers(), cfg.b) {
            return Err(refusal(format!(
                "formula transfer {t} exceeds b = {}; the menu cannot live on \
                 the grid, so oracle comparison is not meaningful; rerun with b >= {t}",
                cfg.b
            )));
        }
    }
    let (oracle_payoff, oracle_args) = brute_force_optimal(&v, &ts, &p, OracleCaps::default())
        .map_err(|e| match e {
            Error::CapExceeded(msg) => refusal(msg),
            other => validation(other.to_string()),
        })?;
    let payoff_agree = oracle_payoff == s.expected_payoffs[0];
    let mut line = format!(
        "payoff: solver = {}, oracle = {} -> {}\n",
        format_rat(&s.expected_payoffs[0]),
        format_rat(&oracle_payoff),
        if payoff_agree { "AGREE" } else { "DISAGREE" }
    );
    let solver_set: BTreeSet<_> = s.assignments.iter().cloned().collect();
    let oracle_set: BTreeSet<_> = oracle_args.into_iter().collect();
    let set_agree = if s.unique {
        solver_set == oracle_set
    } else {
        // With ties the oracle may list more payoff-equal menus than the
        // formula family; containment is the meaningful check.
        solver_set.is_subset(&oracle_set)
    };
    line.push_str(&format!(
        "assignments: solver found {}, oracle found {} -> {}\n",
        solver_set.len(),
        oracle_set.len(),
        if set_agree { "AGREE" } else { "DISAGREE" }
    ));
    if ts.type_count() == 1 {
        let c = s.assignments[0].contract(1);
        line.push_str(&format!(
            "single type: q = {} maximizes v(q) - {}q, t = {}\n",
            c.q,
            ts.ceil_kappa(1),
            c.t
        ));
    }
    print!("{line}");
    if payoff_agree && set_agree {
        Ok(())
    } else {
        Err(validation("solver and oracle disagree"))
    }
}

const SWEEP_BUDGET: usize = 100_000;

fn cmd_sweep(
    path: &std::path::Path,
    d: u64,
    out: Option<&std::path::Path>,
) -> CmdResult {
    let cfg = load_config(path)?;
    let (v, ts) = build_instance(&cfg)?;
    if d == 0 {
        return Err(validation("grid denominator must be positive"));
    }
    let grid = log_concave_grid(cfg.m as usize, d);
    if grid.is_empty() {
        return Err(validation(format!(
            "no full-support log-concave beliefs with denominator {d} for m = {}",
            cfg.m
        )));
    }
    if grid.len() > SWEEP_BUDGET {
        return Err(refusal(format!(
            "grid has {} beliefs, over the sweep budget of {SWEEP_BUDGET}",
            grid.len()
        )));
    }

    let solve_one = |p: &Belief| -> Result<(String, Vec<Vec<Contract>>), Error> {
        let s = solver::solve(&v, &ts, p)?;
        let belief = p
            .probs()
            .iter()
            .map(format_rat)
            .collect::<Vec<_>>()
            .join(";");
        let qs = s.quantity_sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|q| q.to_string())
                    .collect::<Vec<_>>()
                    .join(";")
            })
            .collect::<Vec<_>>()
            .join("|");
        let row = format!(
            "{belief},{qs},{},{}\n",
            s.unique,
            format_rat(&s.expected_payoffs[0])
        );
        let args = s
            .assignments
            .iter()
            .map(|a| a.contracts().to_vec())
            .collect();
        Ok((row, args))
    };
    type SweepRow = Result<(String, Vec<Vec<Contract>>), Error>;
    #[cfg(feature = "parallel")]
    let rows: Vec<SweepRow> = {
        use rayon::prelude::*;
        grid.par_iter().map(solve_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<SweepRow> = grid.iter().map(solve_one).collect();

    let mut csv = String::from("belief,quantity_sets,unique,expected_payoff\n");
    let mut union: BTreeSet<Vec<Contract>> = BTreeSet::new();
    for (p, row) in grid.iter().zip(rows) {
        let (row, args) =
            row.map_err(|e| validation(format!("at belief {:?}: {e}", p.to_strings())))?;
        csv.push_str(&row);
        union.extend(args);
    }
    emit(out, &csv)?;
    eprintln!(
        "swept {} log-concave beliefs (denominator {d}); {} distinct optimal assignments",
        grid.len(),
        union.len()
    );
    for a in &union {
        let cells = a
            .iter()
            .map(|c| format!("({},{})", c.q, c.t))
            .collect::<Vec<_>>()
            .join(" ");
        eprintln!("  {cells}");
    }
    Ok(())
}

fn load_menu(path: &std::path::Path) -> Result<Menu, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| validation(format!("cannot read {}: {e}", path.display())))?;
    let pairs: Vec<(u64, u64)> = serde_json::from_str(&text).map_err(|e| {
        validation(format!(
            "{}: expected a JSON array of [q, t] pairs: {e}",
            path.display()
        ))
    })?;
    Menu::new(pairs.into_iter().map(|(q, t)| Contract::new(q, t)))
        .map_err(|e| validation(e.to_string()))
}

fn cmd_rationalize(
    path: &std::path::Path,
    menu_path: &std::path::Path,
    fixed_point: bool,
    d: u64,
    out: Option<&std::path::Path>,
) -> CmdResult {
    let cfg = load_config(path)?;
    let (v, ts) = build_instance(&cfg)?;
    let menu = load_menu(menu_path)?;
    let verdict = is_delta_o_rationalizable(&menu, &v, &ts, &SearchConfig::default())
        .map_err(|e| validation(e.to_string()))?;

    let menu_json: Vec<[u64; 2]> = menu.contracts().map(|c| [c.q, c.t]).collect();
    let mut doc = serde_json::Map::new();
    doc.insert("menu".into(), serde_json::json!(menu_json));
    match &verdict {
        Verdict::Rationalizable { witness } => {
            doc.insert("verdict".into(), "rationalizable".into());
            doc.insert(
                "witness_belief".into(),
                serde_json::json!(witness.to_strings()),
            );
        }
        Verdict::NotRationalizable { failing_step } => {
            doc.insert("verdict".into(), "not_rationalizable".into());
            doc.insert("failing_step".into(), failing_step.clone().into());
        }
        Verdict::Inconclusive { reason } => {
            doc.insert("verdict".into(), "inconclusive".into());
            doc.insert("failing_step".into(), reason.clone().into());
        }
    }
    let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc))
        .expect("verdict serializes");
    text.push('\n');
    emit(out, &text)?;

    if fixed_point {
        let grid = BeliefGrid::full(ts.type_count() as usize, d)
            .map_err(|e| validation(e.to_string()))?;
        let report = fixed_point_check(&v, &ts, &grid, &FixedPointCaps::default()).map_err(
            |e| match e {
                Error::CapExceeded(msg) => refusal(msg),
                other => validation(other.to_string()),
            },
        )?;
        eprintln!(
            "fixed point: universe {}, level 1 kept {}, level 2 kept {}, \
             stabilized at level {}, agent stable {}",
            report.universe_size,
            report.level1_count,
            report.level2.len(),
            report.stabilized_at,
            report.agent_stable
        );
        if !report.disagreements.is_empty() {
            eprintln!(
                "fixed point: {} grid menus disagree with the exact test \
                 (boundary-belief artifacts at this resolution)",
                report.disagreements.len()
            );
        }
        if !report.inconclusive.is_empty() {
            eprintln!(
                "fixed point: {} menus inconclusive",
                report.inconclusive.len()
            );
        }
    }

    if matches!(verdict, Verdict::Inconclusive { .. }) {
        return Err(Failure::new(4, "rationalizability search was inconclusive"));
    }
    Ok(())
}
