//! Command dispatch. Every command validates its inputs, runs the mapped
//! library operation, prints a one-line summary to standard error and a JSON
//! report to standard output (or the `-o` file), and exits 0 when the check
//! holds or the run finishes, 1 on a semantic failure, 2 on a usage error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use core_syntax::{ImpExpr, Term, VarStore};
use imp::{
    check_resumption_bisim, cost_of_trace, imp_trace, ter_of_trace, to_source, view, BisimClause,
    BisimVerdict, ImpError, ImpView, TraceResult,
};
use imp2::{imp2_trace, RWTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ref2::{
    ctx_refute, first_order_stores, ref_run, CtxOutcome, Loc, RefOutcome, RefRelation, RefStore,
    RefVerdict, TermStatus,
};
use serde::Deserialize;
use serde_json::{json, Value};
use stateful_sos::{
    check_cool, derive_rw, l_trace, load_spec, random_closed_term, verify_preservation,
    CoolReport, TraceOutcome,
};

use crate::imp_text::{parse_imp_program, parse_rwterm};
use crate::ref_text::{parse_ref_reader, parse_ref_store, parse_ref_value, parse_ref_writer};
use crate::report::{document, emit, store_json, stores_json, summary};

#[derive(Parser)]
#[command(name = "rwsos", version, about = "A workbench for stateful operational semantics")]
struct Cli {
    /// Write the JSON report to this file instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program on a store and report its trace.
    Run(RunArgs),
    /// Compare two programs on sampled stores.
    Equiv(EquivArgs),
    /// Work with rule tables (stateful SOS specifications).
    #[command(subcommand)]
    Sos(SosCmd),
    /// Check simulations on explicit finite systems.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Work with higher-order store programs.
    #[command(subcommand)]
    Ref2(Ref2Cmd),
}

#[derive(Args)]
struct RunArgs {
    /// Source language: `imp` or `imp2`.
    language: String,
    /// Program text (`imp`), or a reader/writer configuration (`imp2`).
    program: String,
    /// Initial store entry `x=v`; repeat for several variables.
    #[arg(long = "store", value_name = "VAR=VAL")]
    store: Vec<String>,
    /// Step budget.
    #[arg(long, default_value_t = 1000)]
    fuel: usize,
}

#[derive(Args)]
struct EquivArgs {
    /// Source language; only `imp` programs can be compared.
    language: String,
    left: String,
    right: String,
    /// Observation to compare: trace, cost, ter, or bisim.
    #[arg(long, default_value = "trace")]
    semantics: String,
    /// Number of seeded random stores to sample.
    #[arg(long, default_value_t = 20)]
    stores: usize,
    /// Explicit store entry `x=v`; the entries form one extra store.
    #[arg(long = "store", value_name = "VAR=VAL")]
    store: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    fuel: usize,
    /// Seed for the store sample.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probe depth for `--semantics bisim`.
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

#[derive(Subcommand)]
enum SosCmd {
    /// Check the cool discipline and report each operator's class.
    CheckCool {
        /// Rule table (JSON).
        spec: PathBuf,
    },
    /// Derive the reader-writer extension of a cool rule table.
    DeriveRw { spec: PathBuf },
    /// Run a closed term from a starting state.
    Run {
        spec: PathBuf,
        /// Term in prefix notation, e.g. `seq(skip, while_x(asg0))`.
        term: String,
        /// Starting state name.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Compare base runs against derived reader-writer runs on random terms.
    VerifyPreservation {
        spec: PathBuf,
        /// Number of random closed terms to sample.
        #[arg(long, default_value_t = 50)]
        terms: usize,
        /// Maximum depth of sampled terms.
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 500)]
        fuel: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Check that a relation is a simulation of the given flavour.
    Check {
        /// System description (JSON).
        system: PathBuf,
        /// Candidate relation (JSON).
        relation: PathBuf,
        /// trace, cost, or ter.
        #[arg(long, default_value = "trace")]
        flavor: String,
    },
    /// Compute the greatest simulation of the given flavour.
    Greatest {
        system: PathBuf,
        #[arg(long, default_value = "trace")]
        flavor: String,
    },
}

#[derive(Subcommand)]
enum Ref2Cmd {
    /// Run a program on a store.
    Run {
        /// Program text, or a path to a file containing it.
        program: String,
        /// Store cell `l=v`, e.g. `0=5` or `1=proc { skip }`; repeatable.
        #[arg(long = "loc", value_name = "LOC=VAL")]
        loc: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Check that a relation is a termination simulation.
    SimCheck {
        /// Relation (JSON): reader pairs, writer pairs, store sample.
        relation: PathBuf,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Search for a context distinguishing two programs by termination.
    CtxRefute {
        /// Left program text or file path.
        left: String,
        /// Right program text or file path.
        right: String,
        /// Largest context size to try.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Store cell `l=v` for a custom store sample; repeatable.
        #[arg(long = "loc", value_name = "LOC=VAL")]
        loc: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let out = cli.output.clone();
    match dispatch(cli.cmd, out.as_deref()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn dispatch(cmd: Cmd, out: Option<&Path>) -> Result<i32> {
    match cmd {
        Cmd::Run(args) => cmd_run(args, out),
        Cmd::Equiv(args) => cmd_equiv(args, out),
        Cmd::Sos(SosCmd::CheckCool { spec }) => cmd_check_cool(&spec, out),
        Cmd::Sos(SosCmd::DeriveRw { spec }) => cmd_derive_rw(&spec, out),
        Cmd::Sos(SosCmd::Run { spec, term, state, fuel }) => cmd_sos_run(&spec, &term, &state, fuel, out),
        Cmd::Sos(SosCmd::VerifyPreservation { spec, terms, depth, fuel, seed }) => {
            cmd_verify_preservation(&spec, terms, depth, fuel, seed, out)
        }
        Cmd::Sim(SimCmd::Check { system, relation, flavor }) => {
            cmd_sim_check(&system, &relation, &flavor, out)
        }
        Cmd::Sim(SimCmd::Greatest { system, flavor }) => cmd_sim_greatest(&system, &flavor, out),
        Cmd::Ref2(Ref2Cmd::Run { program, loc, fuel }) => cmd_ref2_run(&program, &loc, fuel, out),
        Cmd::Ref2(Ref2Cmd::SimCheck { relation, fuel }) => cmd_ref2_sim_check(&relation, fuel, out),
        Cmd::Ref2(Ref2Cmd::CtxRefute { left, right, max_size, loc, fuel }) => {
            cmd_ref2_ctx_refute(&left, &right, max_size, &loc, fuel, out)
        }
    }
}

// ---------------------------------------------------------------- helpers

fn parse_store_flags(flags: &[String]) -> Result<VarStore> {
    let mut s = VarStore::new();
    for flag in flags {
        let (var, val) = flag
            .split_once('=')
            .ok_or_else(|| anyhow!("store entry `{flag}` is not of the form VAR=VAL"))?;
        let val: i64 = val.trim().parse().with_context(|| format!("store entry `{flag}`"))?;
        s.set(var.trim(), val);
    }
    Ok(s)
}

fn parse_loc_flags(flags: &[String]) -> Result<RefStore> {
    let mut s = RefStore::empty();
    for flag in flags {
        let (l, val) = flag
            .split_once('=')
            .ok_or_else(|| anyhow!("store cell `{flag}` is not of the form LOC=VAL"))?;
        let l = l.trim().trim_start_matches('#');
        let l: u64 = l.parse().with_context(|| format!("store cell `{flag}`"))?;
        let v = parse_ref_value(val).with_context(|| format!("store cell `{flag}`"))?;
        s = s.update(Loc(l), v);
    }
    Ok(s)
}

/// Program arguments may be inline text or a path to a file holding it.
fn text_or_file(arg: &str) -> Result<String> {
    let p = Path::new(arg);
    if p.is_file() {
        Ok(std::fs::read_to_string(p).with_context(|| format!("reading {arg}"))?)
    } else {
        Ok(arg.to_string())
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn imp_expr_vars(e: &ImpExpr, out: &mut BTreeSet<String>) {
    match e {
        ImpExpr::Const(_) => {}
        ImpExpr::Var(x) => {
            out.insert(x.clone());
        }
        ImpExpr::Add(a, b) | ImpExpr::Sub(a, b) | ImpExpr::Mul(a, b) => {
            imp_expr_vars(a, out);
            imp_expr_vars(b, out);
        }
    }
}

fn imp_term_vars(t: &Term, out: &mut BTreeSet<String>) -> Result<()> {
    match view(t).map_err(|e| anyhow!("{e}"))? {
        ImpView::Skip => {}
        ImpView::Assign { var, expr } => {
            out.insert(var.to_string());
            imp_expr_vars(expr, out);
        }
        ImpView::While { guard, body } => {
            imp_expr_vars(guard, out);
            imp_term_vars(body, out)?;
        }
        ImpView::Seq(p, q) => {
            imp_term_vars(p, out)?;
            imp_term_vars(q, out)?;
        }
    }
    Ok(())
}

fn trace_json(r: &Result<TraceResult, ImpError>) -> Value {
    match r {
        Ok(TraceResult::Finished { emitted, final_store }) => json!({
            "kind": "finished",
            "steps": emitted.len(),
            "emitted": stores_json(emitted),
            "finalStore": store_json(final_store),
        }),
        Ok(TraceResult::Cut { emitted }) => json!({
            "kind": "cut",
            "emitted": stores_json(emitted),
        }),
        Err(e) => json!({ "kind": "error", "message": e.to_string() }),
    }
}

fn term_status_json(t: &TermStatus) -> Value {
    match t {
        TermStatus::Terminates(k) => json!({ "kind": "terminates", "steps": k }),
        TermStatus::Diverges(k) => json!({ "kind": "diverges", "loopAt": k }),
        TermStatus::Stuck(detail) => json!({ "kind": "stuck", "detail": detail }),
        TermStatus::Unknown => json!({ "kind": "unknown" }),
    }
}

// ---------------------------------------------------------------- run

fn cmd_run(args: RunArgs, out: Option<&Path>) -> Result<i32> {
    match args.language.as_str() {
        "imp" => {
            let p = parse_imp_program(&args.program)?;
            let s = parse_store_flags(&args.store)?;
            let result = imp_trace(&p, &s, args.fuel);
            let inputs = json!({
                "language": "imp",
                "program": args.program,
                "store": store_json(&s),
                "fuel": args.fuel,
            });
            let outcome = trace_json(&result);
            let code = match &result {
                Ok(TraceResult::Finished { emitted, .. }) => {
                    summary(&format!("finished in {} steps", emitted.len()));
                    0
                }
                Ok(TraceResult::Cut { .. }) => {
                    summary("fuel exhausted before termination");
                    1
                }
                Err(e) => {
                    summary(&format!("run failed: {e}"));
                    1
                }
            };
            emit(&document("run", inputs, outcome), out)?;
            Ok(code)
        }
        "imp2" => {
            let t = parse_rwterm(&args.program)?;
            let (store, sort) = match &t {
                RWTerm::Reader(_) => (Some(parse_store_flags(&args.store)?), "reader"),
                RWTerm::Writer(_) => {
                    if !args.store.is_empty() {
                        bail!("a writer configuration carries its own store; drop --store");
                    }
                    (None, "writer")
                }
            };
            let result =
                imp2_trace(&t, store.as_ref(), args.fuel).map_err(|e| anyhow!("{e}"))?;
            let mut inputs = json!({
                "language": "imp2",
                "program": args.program,
                "sort": sort,
                "fuel": args.fuel,
            });
            if let Some(s) = &store {
                inputs["store"] = store_json(s);
            }
            let outcome = trace_json(&Ok(result.clone()));
            let code = match &result {
                TraceResult::Finished { emitted, .. } => {
                    summary(&format!("finished in {} steps", emitted.len()));
                    0
                }
                TraceResult::Cut { .. } => {
                    summary("fuel exhausted before termination");
                    1
                }
            };
            emit(&document("run", inputs, outcome), out)?;
            Ok(code)
        }
        other => bail!("unknown language `{other}`; expected `imp` or `imp2`"),
    }
}

// ---------------------------------------------------------------- equiv

fn equiv_stores(
    vars: &BTreeSet<String>,
    explicit: &[String],
    n: usize,
    seed: u64,
) -> Result<Vec<VarStore>> {
    let mut stores = Vec::new();
    if !explicit.is_empty() {
        stores.push(parse_store_flags(explicit)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let mut s = VarStore::new();
        for v in vars {
            s.set(v.clone(), rng.gen_range(-8..=8));
        }
        stores.push(s);
    }
    Ok(stores)
}

/// A store echoed as a counterexample lists every variable of the compared
/// programs, so re-feeding it reproduces the exact probe even for variables
/// held at zero (which the canonical display erases).
fn store_json_over(vars: &BTreeSet<String>, s: &VarStore) -> Value {
    let mut m = serde_json::Map::new();
    for var in vars {
        m.insert(var.clone(), json!(s.get(var)));
    }
    Value::Object(m)
}

fn cmd_equiv(args: EquivArgs, out: Option<&Path>) -> Result<i32> {
    if args.language != "imp" {
        bail!("unknown language `{}`; only `imp` programs can be compared", args.language);
    }
    let left = parse_imp_program(&args.left).context("left program")?;
    let right = parse_imp_program(&args.right).context("right program")?;
    let mut vars = BTreeSet::new();
    imp_term_vars(&left, &mut vars)?;
    imp_term_vars(&right, &mut vars)?;
    let stores = equiv_stores(&vars, &args.store, args.stores, args.seed)?;
    if stores.is_empty() {
        bail!("no stores to sample; raise --stores or pass --store entries");
    }
    let inputs = json!({
        "language": "imp",
        "left": args.left,
        "right": args.right,
        "semantics": args.semantics,
        "stores": stores.len(),
        "fuel": args.fuel,
        "seed": args.seed,
        "depth": args.depth,
    });

    if args.semantics == "bisim" {
        let pairs = [(left.clone(), right.clone())];
        let verdict = check_resumption_bisim(&pairs, &stores, args.depth)
            .map_err(|e| anyhow!("probing failed: {e}"))?;
        return match verdict {
            BisimVerdict::HoldsUpToSample => {
                summary(&format!("equivalent on sample ({} stores, depth {})", stores.len(), args.depth));
                let outcome = json!({ "status": "equivalent on sample", "storesChecked": stores.len() });
                emit(&document("equiv", inputs, outcome), out)?;
                Ok(0)
            }
            BisimVerdict::Fails(cx) => {
                summary(&format!("counterexample at depth {}", cx.depth));
                let clause = match &cx.clause {
                    BisimClause::StepStoreMismatch { left, right } => json!({
                        "kind": "stepStoreMismatch",
                        "left": store_json(left),
                        "right": store_json(right),
                    }),
                    BisimClause::FinalStoreMismatch { left, right } => json!({
                        "kind": "finalStoreMismatch",
                        "left": store_json(left),
                        "right": store_json(right),
                    }),
                    BisimClause::StepVsStop => json!({ "kind": "stepVsStop" }),
                    BisimClause::StopVsStep => json!({ "kind": "stopVsStep" }),
                };
                let outcome = json!({
                    "status": "counterexample",
                    "counterexample": {
                        "left": to_source(&cx.left),
                        "right": to_source(&cx.right),
                        "store": store_json_over(&vars, &cx.store),
                        "depth": cx.depth,
                        "clause": clause,
                    },
                });
                emit(&document("equiv", inputs, outcome), out)?;
                Ok(1)
            }
        };
    }

    enum Project {
        Trace,
        Cost,
        Ter,
    }
    let project = match args.semantics.as_str() {
        "trace" | "trc" => Project::Trace,
        "cost" | "cst" => Project::Cost,
        "ter" | "termination" => Project::Ter,
        other => bail!("unknown semantics `{other}`; expected trace, cost, ter, or bisim"),
    };

    for s in &stores {
        let lo = imp_trace(&left, s, args.fuel);
        let ro = imp_trace(&right, s, args.fuel);
        let (equal, lj, rj) = match project {
            Project::Trace => (lo == ro, trace_json(&lo), trace_json(&ro)),
            Project::Cost => {
                let lc = lo.as_ref().map(cost_of_trace);
                let rc = ro.as_ref().map(cost_of_trace);
                (lc == rc, cost_json(&lo), cost_json(&ro))
            }
            Project::Ter => {
                let lt = lo.as_ref().map(ter_of_trace);
                let rt = ro.as_ref().map(ter_of_trace);
                (lt == rt, ter_json(&lo), ter_json(&ro))
            }
        };
        if !equal {
            summary("counterexample store found");
            let outcome = json!({
                "status": "counterexample",
                "counterexample": { "store": store_json_over(&vars, s), "left": lj, "right": rj },
            });
            emit(&document("equiv", inputs, outcome), out)?;
            return Ok(1);
        }
    }
    summary(&format!("equivalent on sample ({} stores)", stores.len()));
    let outcome = json!({ "status": "equivalent on sample", "storesChecked": stores.len() });
    emit(&document("equiv", inputs, outcome), out)?;
    Ok(0)
}

fn cost_json(r: &Result<TraceResult, ImpError>) -> Value {
    match r {
        Ok(t) => match cost_of_trace(t) {
            imp::CostResult::Finished { steps, final_store } => json!({
                "kind": "finished", "steps": steps, "finalStore": store_json(&final_store),
            }),
            imp::CostResult::Cut => json!({ "kind": "cut" }),
        },
        Err(e) => json!({ "kind": "error", "message": e.to_string() }),
    }
}

fn ter_json(r: &Result<TraceResult, ImpError>) -> Value {
    match r {
        Ok(t) => match ter_of_trace(t) {
            imp::TerResult::Finished(final_store) => json!({
                "kind": "finished", "finalStore": store_json(&final_store),
            }),
            imp::TerResult::Cut => json!({ "kind": "cut" }),
        },
        Err(e) => json!({ "kind": "error", "message": e.to_string() }),
    }
}

// ---------------------------------------------------------------- sos

fn cool_report_json(report: &CoolReport) -> Value {
    json!({
        "cool": report.cool,
        "passive": report.passive,
        "active": report.active.iter()
            .map(|(op, j)| json!({ "op": op, "j": j }))
            .collect::<Vec<_>>(),
        "violations": report.violations.iter().map(|v| json!({
            "op": v.op,
            "candidate": v.candidate,
            "trigger": v.trigger,
            "reason": v.reason.to_string(),
            "detail": v.detail,
        })).collect::<Vec<_>>(),
    })
}

fn cmd_check_cool(spec_path: &Path, out: Option<&Path>) -> Result<i32> {
    let spec = load_spec(&read_file(spec_path)?).map_err(|e| anyhow!("{e}"))?;
    let report = check_cool(&spec);
    let inputs = json!({ "spec": spec_path.display().to_string() });
    let outcome = cool_report_json(&report);
    if report.cool {
        let active: Vec<String> =
            report.active.iter().map(|(op, j)| format!("{op}: j={j}")).collect();
        summary(&format!("cool; active = {{{}}}", active.join(", ")));
    } else {
        summary(&format!("not cool; {} violation(s)", report.violations.len()));
    }
    emit(&document("sos check-cool", inputs, outcome), out)?;
    Ok(if report.cool { 0 } else { 1 })
}

fn cmd_derive_rw(spec_path: &Path, out: Option<&Path>) -> Result<i32> {
    let spec = load_spec(&read_file(spec_path)?).map_err(|e| anyhow!("{e}"))?;
    let inputs = json!({ "spec": spec_path.display().to_string() });
    match derive_rw(&spec) {
        Ok(rw) => {
            let entry = |((op, state), c): ((usize, usize), &_)| {
                json!({
                    "op": spec.ops()[op].name,
                    "state": spec.states()[state],
                    "conclusion": rw.base.display_conclusion(c),
                })
            };
            let passive: Vec<Value> =
                rw.passive_entries().map(|(&k, c)| entry((k, c))).collect();
            let active: Vec<Value> = rw.active_entries().map(|(&k, c)| entry((k, c))).collect();
            let report = check_cool(&spec);
            let outcome = json!({
                "cool": true,
                "classes": cool_report_json(&report),
                "passiveRules": passive,
                "activeRules": active,
            });
            summary(&format!(
                "derived {} passive and {} active rule entries",
                passive.len(),
                active.len()
            ));
            emit(&document("sos derive-rw", inputs, outcome), out)?;
            Ok(0)
        }
        Err(report) => {
            summary(&format!("not cool; {} violation(s)", report.violations.len()));
            emit(&document("sos derive-rw", inputs, cool_report_json(&report)), out)?;
            Ok(1)
        }
    }
}

fn cmd_sos_run(
    spec_path: &Path,
    term: &str,
    state: &str,
    fuel: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let spec = load_spec(&read_file(spec_path)?).map_err(|e| anyhow!("{e}"))?;
    let t = spec.parse_term(term).map_err(|e| anyhow!("{e}"))?;
    let s0 = spec.state_id(state).map_err(|e| anyhow!("{e}"))?;
    let outcome = l_trace(&spec, &t, s0, fuel).map_err(|e| anyhow!("{e}"))?;
    let inputs = json!({
        "spec": spec_path.display().to_string(),
        "term": term,
        "state": state,
        "fuel": fuel,
    });
    let names = |ids: &[usize]| -> Vec<String> {
        ids.iter().map(|&i| spec.states()[i].clone()).collect()
    };
    let (doc, code) = match &outcome {
        TraceOutcome::Finished { emitted, final_state } => {
            summary(&format!("finished in {} steps", emitted.len()));
            (
                json!({
                    "status": "finished",
                    "steps": emitted.len(),
                    "emitted": names(emitted),
                    "finalState": spec.states()[*final_state],
                }),
                0,
            )
        }
        TraceOutcome::Cut { emitted } => {
            summary("fuel exhausted before termination");
            (json!({ "status": "cut", "emitted": names(emitted) }), 1)
        }
    };
    emit(&document("sos run", inputs, doc), out)?;
    Ok(code)
}

fn cmd_verify_preservation(
    spec_path: &Path,
    terms: usize,
    depth: usize,
    fuel: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<i32> {
    let spec = load_spec(&read_file(spec_path)?).map_err(|e| anyhow!("{e}"))?;
    let inputs = json!({
        "spec": spec_path.display().to_string(),
        "terms": terms,
        "depth": depth,
        "fuel": fuel,
        "seed": seed,
    });
    let rw = match derive_rw(&spec) {
        Ok(rw) => rw,
        Err(report) => {
            summary("the rule table is not cool, so no extension exists to compare");
            emit(&document("sos verify-preservation", inputs, cool_report_json(&report)), out)?;
            return Ok(1);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for _ in 0..terms {
        let t = random_closed_term(&mut rng, &spec, depth);
        for s in 0..spec.states().len() {
            cases.push((t.clone(), s));
        }
    }
    let report = verify_preservation(&rw, cases, fuel).map_err(|e| anyhow!("{e}"))?;
    let trace_outcome_json = |o: &TraceOutcome| match o {
        TraceOutcome::Finished { emitted, final_state } => json!({
            "kind": "finished",
            "emitted": emitted.iter().map(|&i| spec.states()[i].clone()).collect::<Vec<_>>(),
            "finalState": spec.states()[*final_state],
        }),
        TraceOutcome::Cut { emitted } => json!({
            "kind": "cut",
            "emitted": emitted.iter().map(|&i| spec.states()[i].clone()).collect::<Vec<_>>(),
        }),
    };
    let ok = report.ok();
    let outcome = json!({
        "status": if ok { "ok" } else { "mismatch" },
        "matches": report.matches,
        "cutAgreements": report.cut_agreements,
        "mismatches": report.mismatches.iter().map(|m| json!({
            "term": m.term.to_string(),
            "state": spec.states()[m.state],
            "base": trace_outcome_json(&m.base),
            "derived": trace_outcome_json(&m.derived),
        })).collect::<Vec<_>>(),
    });
    summary(&format!(
        "{} exact matches, {} cut agreements, {} mismatches",
        report.matches,
        report.cut_agreements,
        report.mismatches.len()
    ));
    emit(&document("sos verify-preservation", inputs, outcome), out)?;
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------- sim

fn parse_flavor(s: &str) -> Result<equivalence::Flavor> {
    equivalence::Flavor::parse(s)
        .ok_or_else(|| anyhow!("unknown flavor `{s}`; expected trace, cost, or ter"))
}

fn cmd_sim_check(
    system_path: &Path,
    relation_path: &Path,
    flavor: &str,
    out: Option<&Path>,
) -> Result<i32> {
    let flavor = parse_flavor(flavor)?;
    let sys = equivalence::load_system(&read_file(system_path)?).map_err(|e| anyhow!("{e}"))?;
    let rel =
        equivalence::load_relation(&read_file(relation_path)?, &sys).map_err(|e| anyhow!("{e}"))?;
    let inputs = json!({
        "system": system_path.display().to_string(),
        "relation": relation_path.display().to_string(),
        "flavor": flavor.to_string(),
    });
    match equivalence::check_simulation(&sys, &rel, flavor) {
        equivalence::Verdict::Holds => {
            summary("the relation is a simulation");
            emit(&document("sim check", inputs, json!({ "status": "holds" })), out)?;
            Ok(0)
        }
        equivalence::Verdict::Fails(f) => {
            let (sort, names): (&str, (&str, &str)) = match f.sort {
                equivalence::Sort2::Reader => {
                    ("reader", (&sys.readers[f.pair.0], &sys.readers[f.pair.1]))
                }
                equivalence::Sort2::Writer => {
                    ("writer", (&sys.writers[f.pair.0], &sys.writers[f.pair.1]))
                }
            };
            summary(&format!(
                "not a simulation: {sort} pair ({}, {}) fails clause {}",
                names.0, names.1, f.clause
            ));
            let outcome = json!({
                "status": "fails",
                "failure": {
                    "sort": sort,
                    "pair": [names.0, names.1],
                    "clause": f.clause,
                    "witness": f.witness,
                },
            });
            emit(&document("sim check", inputs, outcome), out)?;
            Ok(1)
        }
    }
}

fn cmd_sim_greatest(system_path: &Path, flavor: &str, out: Option<&Path>) -> Result<i32> {
    let flavor = parse_flavor(flavor)?;
    let sys = equivalence::load_system(&read_file(system_path)?).map_err(|e| anyhow!("{e}"))?;
    let rel = equivalence::greatest_simulation(&sys, flavor);
    let inputs = json!({
        "system": system_path.display().to_string(),
        "flavor": flavor.to_string(),
    });
    let readers: Vec<Value> = rel
        .readers
        .iter()
        .map(|&(a, b)| json!([sys.readers[a], sys.readers[b]]))
        .collect();
    let writers: Vec<Value> = rel
        .writers
        .iter()
        .map(|&(a, b)| json!([sys.writers[a], sys.writers[b]]))
        .collect();
    summary(&format!(
        "greatest {flavor} simulation: {} reader and {} writer pairs",
        readers.len(),
        writers.len()
    ));
    let outcome = json!({ "readers": readers, "writers": writers });
    emit(&document("sim greatest", inputs, outcome), out)?;
    Ok(0)
}

// ---------------------------------------------------------------- ref2

fn cmd_ref2_run(program: &str, loc: &[String], fuel: usize, out: Option<&Path>) -> Result<i32> {
    let text = text_or_file(program)?;
    let p = parse_ref_reader(&text)?;
    let s = parse_loc_flags(loc)?;
    let inputs = json!({
        "program": text.trim(),
        "store": s.to_string(),
        "fuel": fuel,
    });
    let (outcome, code) = match ref_run(&p, &s, fuel) {
        RefOutcome::Value(v, s) => {
            summary(&format!("finished with value {v}"));
            (json!({ "status": "value", "value": v.to_string(), "store": s.to_string() }), 0)
        }
        RefOutcome::Store(s) => {
            summary("finished");
            (json!({ "status": "store", "store": s.to_string() }), 0)
        }
        RefOutcome::Stuck(detail) => {
            summary(&format!("stuck: {detail}"));
            (json!({ "status": "stuck", "detail": detail }), 1)
        }
        RefOutcome::Cut => {
            summary("fuel exhausted before termination");
            (json!({ "status": "cut" }), 1)
        }
    };
    emit(&document("ref2 run", inputs, outcome), out)?;
    Ok(code)
}

/// On-disk relation format: program pairs in concrete syntax, plus an
/// optional store sample (store literals) and an `identity` switch.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRefRelation {
    #[serde(default)]
    readers: Vec<(String, String)>,
    #[serde(default)]
    writers: Vec<(String, String)>,
    #[serde(default = "default_true")]
    identity: bool,
    #[serde(default)]
    stores: Option<Vec<String>>,
}

fn default_true() -> bool {
    true
}

fn load_ref_relation(json: &str) -> Result<(RefRelation, Vec<RefStore>)> {
    let raw: RawRefRelation = serde_json::from_str(json).context("parsing the relation")?;
    let mut rel = RefRelation { identity: raw.identity, ..RefRelation::default() };
    for (a, b) in &raw.readers {
        rel.readers.insert((
            parse_ref_reader(a).with_context(|| format!("reader `{a}`"))?,
            parse_ref_reader(b).with_context(|| format!("reader `{b}`"))?,
        ));
    }
    for (a, b) in &raw.writers {
        rel.writers.insert((
            parse_ref_writer(a).with_context(|| format!("writer `{a}`"))?,
            parse_ref_writer(b).with_context(|| format!("writer `{b}`"))?,
        ));
    }
    let stores = match raw.stores {
        None => first_order_stores(),
        Some(texts) => texts
            .iter()
            .map(|t| parse_ref_store(t).map_err(|e| anyhow!("store `{t}`: {e}")))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok((rel, stores))
}

fn cmd_ref2_sim_check(relation_path: &Path, fuel: usize, out: Option<&Path>) -> Result<i32> {
    let (rel, stores) = load_ref_relation(&read_file(relation_path)?)?;
    let inputs = json!({
        "relation": relation_path.display().to_string(),
        "readerPairs": rel.readers.len(),
        "writerPairs": rel.writers.len(),
        "stores": stores.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "fuel": fuel,
    });
    match ref2::check_ho_termination_sim(&rel, &stores, fuel) {
        RefVerdict::Holds => {
            summary("the relation is a termination simulation");
            emit(&document("ref2 sim-check", inputs, json!({ "status": "holds" })), out)?;
            Ok(0)
        }
        RefVerdict::Fails { sort, lhs, rhs, clause, witness } => {
            summary(&format!("not a simulation: {sort} pair fails clause {clause}"));
            let outcome = json!({
                "status": "fails",
                "failure": {
                    "sort": sort.to_string(),
                    "left": lhs,
                    "right": rhs,
                    "clause": clause,
                    "witness": witness,
                },
            });
            emit(&document("ref2 sim-check", inputs, outcome), out)?;
            Ok(1)
        }
    }
}

fn cmd_ref2_ctx_refute(
    left: &str,
    right: &str,
    max_size: usize,
    loc: &[String],
    fuel: usize,
    out: Option<&Path>,
) -> Result<i32> {
    let left_text = text_or_file(left)?;
    let right_text = text_or_file(right)?;
    let p = parse_ref_reader(&left_text).context("left program")?;
    let q = parse_ref_reader(&right_text).context("right program")?;
    let stores = if loc.is_empty() { first_order_stores() } else { vec![parse_loc_flags(loc)?] };
    let inputs = json!({
        "left": left_text.trim(),
        "right": right_text.trim(),
        "maxSize": max_size,
        "stores": stores.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "fuel": fuel,
    });
    match ctx_refute(&p, &q, max_size, &stores, fuel) {
        CtxOutcome::Counterexample { context, store, left, right } => {
            summary(&format!("distinguishing context found: {context}"));
            let outcome = json!({
                "status": "counterexample",
                "context": context,
                "store": store.map(|s| s.to_string()),
                "left": term_status_json(&left),
                "right": term_status_json(&right),
            });
            emit(&document("ref2 ctx-refute", inputs, outcome), out)?;
            Ok(1)
        }
        CtxOutcome::NotFound { contexts_tried } => {
            summary(&format!("no distinguishing context among {contexts_tried} tried"));
            let outcome = json!({ "status": "not-found", "contextsTried": contexts_tried });
            emit(&document("ref2 ctx-refute", inputs, outcome), out)?;
            Ok(0)
        }
    }
}
