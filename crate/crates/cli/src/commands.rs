use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};
use spsched::alpha::{alpha_of, solve_alpha, AlphaBackend, SourceCapacity};
use spsched::error::Error;
use spsched::fuzz::{random_feasible_schedule, random_instance, rng};
use spsched::io::{parse_instance, parse_schedule, schedule_to_json};
use spsched::lp::{solve_antithetical, solve_exact};
use spsched::model::{total_weighted_overlap, validate as check_schedule, Instance, Schedule};
use spsched::num::{display, to_json_value, Rational, Scalar};
use spsched::oracle::{oracle_optimum, EnumerationBudget};
use spsched::structure::{canonicalize, is_processor_descending, is_sequential, make_sequential};

use crate::render::{render_svg, render_text};
use crate::{Arith, Format, Op, Solver};

/// A cross-check that failed during a fuzz run.
#[derive(Debug)]
pub struct Breach(pub String);

impl fmt::Display for Breach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for Breach {}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn load_instance<T: Scalar>(path: &Path) -> anyhow::Result<Instance<T>> {
    let parsed = parse_instance::<T>(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if parsed.costs_resorted {
        eprintln!("warning: machine costs in {} were re-sorted ascending", path.display());
    }
    Ok(parsed.instance)
}

fn load<T: Scalar>(instance: &Path, schedule: &Path) -> anyhow::Result<(Instance<T>, Schedule<T>)> {
    let inst = load_instance::<T>(instance)?;
    let s = parse_schedule(&read(schedule)?, &inst).with_context(|| format!("in {}", schedule.display()))?;
    Ok((inst, s))
}

macro_rules! with_arith {
    ($arith:expr, $f:ident($($arg:expr),*)) => {
        match $arith {
            Arith::Exact => $f::<Rational>($($arg),*),
            Arith::Float => $f::<f64>($($arg),*),
        }
    };
}

fn arith_name(arith: Arith) -> &'static str {
    match arith {
        Arith::Exact => "exact",
        Arith::Float => "float",
    }
}

pub fn validate(instance: &Path, schedule: &Path, arith: Arith) -> anyhow::Result<()> {
    with_arith!(arith, validate_with(instance, schedule))
}

fn validate_with<T: Scalar>(instance: &Path, schedule: &Path) -> anyhow::Result<()> {
    let (inst, s) = load::<T>(instance, schedule)?;
    let violations = check_schedule(&s, &inst)?;
    let report = json!({
        "feasible": violations.is_empty(),
        "violations": violations
            .iter()
            .map(|v| json!({ "condition": v.condition(), "message": v.to_string() }))
            .collect::<Vec<_>>(),
    });
    print!("{}", pretty(&report));
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Infeasible(violations).into())
    }
}

pub fn evaluate(instance: &Path, schedule: &Path, arith: Arith) -> anyhow::Result<()> {
    with_arith!(arith, evaluate_with(instance, schedule))
}

fn evaluate_with<T: Scalar>(instance: &Path, schedule: &Path) -> anyhow::Result<()> {
    let (inst, s) = load::<T>(instance, schedule)?;
    let report = total_weighted_overlap(&s, &inst)?;
    let jobs: Vec<Value> = (0..inst.n())
        .map(|j| {
            let overlap: T = report.per_job_machine[j].iter().cloned().sum();
            json!({
                "job": inst.job(j).id,
                "overlap": to_json_value(&overlap),
                "payoff": to_json_value(&report.job_payoff(&inst, j)),
            })
        })
        .collect();
    let out = json!({
        "objective": to_json_value(&report.total_weighted),
        "total_overlap": to_json_value(&report.total_overlap()),
        "makespan": to_json_value(&s.makespan()),
        "jobs": jobs,
    });
    print!("{}", pretty(&out));
    Ok(())
}

pub fn solve(
    instance: &Path,
    solver: Solver,
    arith: Arith,
    narrow_capacity: bool,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    if narrow_capacity && solver != Solver::AlphaFlow {
        return Err(Error::Input("--paper-flow-capacity only applies to --solver alpha-flow".into()).into());
    }
    with_arith!(arith, solve_with(instance, solver, arith, narrow_capacity, output))
}

fn job_ids<T: Scalar>(inst: &Instance<T>, order: &[usize]) -> Value {
    json!(order.iter().map(|&j| inst.job(j).id.clone()).collect::<Vec<_>>())
}

fn solve_with<T: Scalar>(
    instance: &Path,
    solver: Solver,
    arith: Arith,
    narrow_capacity: bool,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let inst = load_instance::<T>(instance)?;
    let mut summary = json!({ "arithmetic": arith_name(arith), "capacity": Value::Null });
    let (name, schedule, objective, alpha): (&str, Schedule<T>, T, T) = match solver {
        Solver::Exact => {
            let sol = solve_exact(&inst)?;
            summary["permutation"] = job_ids(&inst, &sol.permutation);
            ("exact", sol.schedule, sol.objective, T::one())
        }
        Solver::Antithetical => {
            let sol = solve_antithetical(&inst)?;
            summary["permutation"] = job_ids(&inst, &sol.permutation);
            ("antithetical", sol.schedule, sol.objective, T::one())
        }
        Solver::Oracle => {
            let opt = oracle_optimum(&inst, &EnumerationBudget::default())?;
            let seq: Vec<Value> = opt
                .schedule
                .sequence()
                .iter()
                .zip(opt.schedule.boundaries())
                .map(|(e, t)| json!({ "job": inst.job(e.job).id, "width": e.width, "end": to_json_value(t) }))
                .collect();
            summary["synchronized"] = json!(seq);
            summary["candidates"] = json!({
                "feasible": opt.stats.feasible.to_string(),
                "skipped": opt.stats.skipped.to_string(),
            });
            ("oracle", opt.schedule.expand(&inst), opt.objective, T::one())
        }
        Solver::AlphaLp | Solver::AlphaFlow => {
            let backend = match solver {
                Solver::AlphaLp => AlphaBackend::Lp,
                _ if narrow_capacity => AlphaBackend::Flow(SourceCapacity::Narrow),
                _ => AlphaBackend::Flow(SourceCapacity::Corrected),
            };
            let sol = solve_alpha(&inst, backend)?;
            if let AlphaBackend::Flow(cap) = backend {
                summary["capacity"] = json!({ "variant": cap, "formula": cap.describe() });
            }
            let name = if solver == Solver::AlphaLp { "alpha-lp" } else { "alpha-flow" };
            (name, sol.schedule, sol.objective, sol.alpha)
        }
    };
    let measured = total_weighted_overlap(&schedule, &inst)?.total_weighted;
    if !measured.near(&objective) {
        return Err(Error::Invariant(format!(
            "solver reported Ω = {} but its schedule measures {}",
            display(&objective),
            display(&measured)
        ))
        .into());
    }
    summary["solver"] = json!(name);
    summary["objective"] = to_json_value(&objective);
    summary["alpha"] = to_json_value(&alpha);
    let schedule_json = schedule_to_json(&schedule, &inst);
    match output {
        Some(path) => {
            write_or_print(Some(path), &pretty(&schedule_json))?;
            summary["schedule_file"] = json!(path.display().to_string());
        }
        None => summary["schedule"] = schedule_json,
    }
    print!("{}", pretty(&summary));
    Ok(())
}

pub fn transform(
    instance: &Path,
    schedule: &Path,
    op: Op,
    arith: Arith,
    max_iterations: usize,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    with_arith!(arith, transform_with(instance, schedule, op, max_iterations, output))
}

fn transform_with<T: Scalar>(
    instance: &Path,
    schedule: &Path,
    op: Op,
    max_iterations: usize,
    output: Option<&Path>,
) -> anyhow::Result<()> {
    let (inst, s) = load::<T>(instance, schedule)?;
    let (mut summary, out) = match op {
        Op::MakeSequential => {
            let before = total_weighted_overlap(&s, &inst)?.total_weighted;
            let res = make_sequential(&s, &inst)?;
            let after = res.schedule.objective(&inst)?;
            let summary = json!({
                "op": "make-sequential",
                "objective_before": to_json_value(&before),
                "objective_after": to_json_value(&after),
                "relabel_gain": to_json_value(&res.relabel_gain),
                "machine_order": res.machine_order.iter().map(|i| i + 1).collect::<Vec<_>>(),
            });
            (summary, res.schedule.to_schedule())
        }
        Op::Canonicalize => {
            let res = canonicalize(&s, &inst, max_iterations)?;
            let summary = json!({
                "op": "canonicalize",
                "objective_before": to_json_value(&res.objective_before),
                "objective_after": to_json_value(&res.objective_after),
                "relabel_gain": to_json_value(&res.relabel_gain),
                "iterations": res.iterations,
                "transfers": res.transfers,
                "synchronizations": res.synchronizations,
                "converged": res.converged,
            });
            (summary, res.schedule.to_schedule())
        }
    };
    summary["sequential"] = json!(is_sequential(&out));
    summary["processor_descending"] = json!(is_processor_descending(&out, inst.m()));
    let schedule_json = schedule_to_json(&out, &inst);
    match output {
        Some(path) => {
            write_or_print(Some(path), &pretty(&schedule_json))?;
            summary["schedule_file"] = json!(path.display().to_string());
        }
        None => summary["schedule"] = schedule_json,
    }
    print!("{}", pretty(&summary));
    Ok(())
}

pub fn render(instance: &Path, schedule: &Path, format: Format, output: Option<&Path>) -> anyhow::Result<()> {
    let (inst, s) = load::<Rational>(instance, schedule)?;
    let text = match format {
        Format::Text => render_text(&s, &inst),
        Format::Svg => render_svg(&s, &inst),
    };
    write_or_print(output, &text)
}

/// Canonicalization rarely terminates; a short run still exercises every step.
const FUZZ_CANONICALIZE_ITERATIONS: usize = 40;

fn breach(failures: &mut Vec<String>, case: usize, ok: bool, what: &str) -> bool {
    if !ok {
        failures.push(format!("case {case}: {what}"));
    }
    ok
}

pub fn fuzz(seed: u64, jobs: usize, machines: usize, cases: usize) -> anyhow::Result<()> {
    if jobs == 0 || machines == 0 {
        return Err(Error::Input("--jobs and --machines must be positive".into()).into());
    }
    let alpha: Rational = alpha_of(machines)?;
    let mut r = rng(seed);
    let mut failures = Vec::new();
    for case in 0..cases {
        let inst = random_instance(&mut r, jobs, machines);
        let optimum = oracle_optimum(&inst, &EnumerationBudget::default())?.objective;
        let exact = solve_exact(&inst)?.objective;
        let via_lp = solve_alpha(&inst, AlphaBackend::Lp)?.objective;
        let via_flow = solve_alpha(&inst, AlphaBackend::Flow(SourceCapacity::Corrected))?.objective;
        let start = random_feasible_schedule(&mut r, &inst);
        let before = total_weighted_overlap(&start, &inst)?.total_weighted;
        let seqd = make_sequential(&start, &inst)?;
        let seq_schedule = seqd.schedule.to_schedule();
        let canon = canonicalize(&start, &inst, FUZZ_CANONICALIZE_ITERATIONS)?;

        let mut ok = true;
        ok &= breach(&mut failures, case, exact == optimum, "LP search differs from the oracle");
        ok &= breach(&mut failures, case, via_lp == via_flow, "α-private LP and flow differ");
        ok &= breach(&mut failures, case, via_flow >= alpha.clone() * optimum.clone(), "α guarantee missed");
        ok &= breach(
            &mut failures,
            case,
            is_sequential(&seq_schedule) && is_processor_descending(&seq_schedule, machines),
            "make_sequential output is not sequential and processor-descending",
        );
        ok &= breach(
            &mut failures,
            case,
            before <= canon.objective_after && canon.objective_after <= optimum,
            "canonicalize left the range [Ω(input), optimum]",
        );
        let line = json!({
            "case": case,
            "optimum": to_json_value(&optimum),
            "alpha_flow": to_json_value(&via_flow),
            "schedule_objective": to_json_value(&before),
            "relabel_gain": to_json_value(&seqd.relabel_gain),
            "canonical_objective": to_json_value(&canon.objective_after),
            "converged": canon.converged,
            "ok": ok,
        });
        println!("{line}");
    }
    println!("{}", json!({ "seed": seed, "cases": cases, "failures": failures.len() }));
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Breach(failures.join("; ")).into())
    }
}
