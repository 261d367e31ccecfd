//! JSON file formats for instances and schedules.
//!
//! Instance: `{"machines":[{"cost":4},{"cost":5}],"jobs":[{"id":"j1","p":9,"w":9}]}`.
//! Schedule: `{"private_completion":{"j1":6},"pieces":[{"job":"j1","machine":1,"start":0,"end":6}]}`.
//! Numbers may be JSON numbers or strings holding decimals or `"a/b"`.
//! Machines are numbered from 1 in files.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{Instance, Job, Piece, Schedule};
use crate::num::{from_json_value, to_json_value, Scalar};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    machines: Vec<MachineEntry>,
    jobs: Vec<JobEntry>,
}

#[derive(Deserialize)]
struct MachineEntry {
    cost: Value,
}

#[derive(Deserialize)]
struct JobEntry {
    #[serde(default)]
    id: Option<String>,
    p: Value,
    w: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    private_completion: Map<String, Value>,
    #[serde(default)]
    pieces: Vec<PieceEntry>,
}

#[derive(Deserialize)]
struct PieceEntry {
    job: String,
    machine: usize,
    start: Value,
    end: Value,
}

/// A parsed instance plus whether the machine costs had to be re-sorted.
#[derive(Debug, Clone)]
pub struct ParsedInstance<T: Scalar> {
    pub instance: Instance<T>,
    pub costs_resorted: bool,
}

fn field<T: Scalar>(v: &Value, path: &str) -> Result<T> {
    from_json_value(v).map_err(|e| Error::Input(format!("{path}: {e}")))
}

pub fn parse_instance<T: Scalar>(text: &str) -> Result<ParsedInstance<T>> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    if file.jobs.is_empty() {
        return Err(Error::Input("jobs: at least one job is required".into()));
    }
    if file.machines.is_empty() {
        return Err(Error::Input("machines: at least one machine is required".into()));
    }
    let costs = file
        .machines
        .iter()
        .enumerate()
        .map(|(i, m)| field(&m.cost, &format!("machines[{i}].cost")))
        .collect::<Result<Vec<T>>>()?;
    let mut jobs = Vec::with_capacity(file.jobs.len());
    for (i, j) in file.jobs.iter().enumerate() {
        let p: T = field(&j.p, &format!("jobs[{i}].p"))?;
        let w: T = field(&j.w, &format!("jobs[{i}].w"))?;
        if !p.is_pos() {
            return Err(Error::Input(format!("jobs[{i}].p: processing time must be positive")));
        }
        if w.is_neg() {
            return Err(Error::Input(format!("jobs[{i}].w: weight must be non-negative")));
        }
        let id = j.id.clone().unwrap_or_else(|| format!("j{}", i + 1));
        jobs.push(Job::new(id, p, w));
    }
    let (instance, costs_resorted) =
        Instance::with_sorted_costs(jobs, costs).map_err(|e| Error::Input(e.to_string()))?;
    Ok(ParsedInstance { instance, costs_resorted })
}

pub fn instance_to_json<T: Scalar>(instance: &Instance<T>) -> Value {
    json!({
        "machines": instance.costs().iter().map(|c| json!({ "cost": to_json_value(c) })).collect::<Vec<_>>(),
        "jobs": instance
            .jobs()
            .iter()
            .map(|j| json!({ "id": j.id, "p": to_json_value(&j.p), "w": to_json_value(&j.w) }))
            .collect::<Vec<_>>(),
    })
}

/// Parses a schedule file against an instance. Unknown job ids or machine
/// numbers are structural errors.
pub fn parse_schedule<T: Scalar>(text: &str, instance: &Instance<T>) -> Result<Schedule<T>> {
    let file: ScheduleFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    let mut completion: Vec<Option<T>> = vec![None; instance.n()];
    for (id, v) in &file.private_completion {
        let j = instance
            .job_index(id)
            .ok_or_else(|| Error::Structural(format!("private_completion: unknown job `{id}`")))?;
        completion[j] = Some(field(v, &format!("private_completion.{id}"))?);
    }
    let completion = completion
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            c.ok_or_else(|| {
                Error::Structural(format!("private_completion: missing job `{}`", instance.job(j).id))
            })
        })
        .collect::<Result<Vec<T>>>()?;
    let mut pieces = Vec::with_capacity(file.pieces.len());
    for (k, p) in file.pieces.iter().enumerate() {
        let job = instance
            .job_index(&p.job)
            .ok_or_else(|| Error::Structural(format!("pieces[{k}].job: unknown job `{}`", p.job)))?;
        if p.machine == 0 || p.machine > instance.m() {
            return Err(Error::Structural(format!(
                "pieces[{k}].machine: {} is outside 1..={}",
                p.machine,
                instance.m()
            )));
        }
        let start = field(&p.start, &format!("pieces[{k}].start"))?;
        let end = field(&p.end, &format!("pieces[{k}].end"))?;
        pieces.push(Piece::new(job, p.machine - 1, start, end));
    }
    Schedule::new(completion, pieces)
}

pub fn schedule_to_json<T: Scalar>(schedule: &Schedule<T>, instance: &Instance<T>) -> Value {
    let mut completion = Map::new();
    for (j, c) in schedule.private_completion().iter().enumerate() {
        completion.insert(instance.job(j).id.clone(), to_json_value(c));
    }
    json!({
        "private_completion": completion,
        "pieces": schedule
            .pieces()
            .iter()
            .map(|p| json!({
                "job": instance.job(p.job).id,
                "machine": p.machine + 1,
                "start": to_json_value(&p.start),
                "end": to_json_value(&p.end),
            }))
            .collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{two_machine_trio, q, qr};
    use crate::model::total_weighted_overlap;
    use crate::num::Rational;

    #[test]
    fn two_machine_trio_file_parses() {
        let text = r#"{"machines":[{"cost":4},{"cost":5}],
            "jobs":[{"id":"j1","p":9,"w":9},{"id":"j2","p":9,"w":7},{"id":"j3","p":5,"w":5}]}"#;
        let parsed = parse_instance::<Rational>(text).unwrap();
        assert!(!parsed.costs_resorted);
        assert_eq!(parsed.instance, two_machine_trio());
    }

    #[test]
    fn rational_strings_and_resorting() {
        let text = r#"{"machines":[{"cost":"5/8"},{"cost":0.25}],"jobs":[{"id":"a","p":"5/8","w":"1.5"}]}"#;
        let parsed = parse_instance::<Rational>(text).unwrap();
        assert!(parsed.costs_resorted);
        assert_eq!(parsed.instance.costs(), &[qr(1, 4), qr(5, 8)]);
        assert_eq!(parsed.instance.job(0).p, qr(5, 8));
        assert_eq!(parsed.instance.job(0).w, qr(3, 2));
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(parse_instance::<Rational>(r#"{"machines":[{"cost":1}],"jobs":[]}"#).is_err());
        assert!(parse_instance::<Rational>(r#"{"machines":[{"cost":1}],"jobs":[{"p":-1,"w":1}]}"#).is_err());
        assert!(parse_instance::<Rational>(r#"{"machines":[{"cost":1}],"jobs":[{"p":1}]}"#).is_err());
        assert!(parse_instance::<Rational>("{not json").is_err());
    }

    #[test]
    fn schedule_round_trip_preserves_payoff() {
        let inst = two_machine_trio();
        let s = Schedule::new(
            vec![q(3), q(5), q(5)],
            vec![
                Piece::new(0, 0, q(0), q(3)),
                Piece::new(0, 1, q(0), q(3)),
                Piece::new(1, 0, q(3), q(5)),
                Piece::new(1, 1, q(3), q(5)),
            ],
        )
        .unwrap();
        let text = schedule_to_json(&s, &inst).to_string();
        let back = parse_schedule::<Rational>(&text, &inst).unwrap();
        assert_eq!(back, s);
        assert_eq!(
            total_weighted_overlap(&back, &inst).unwrap().total_weighted,
            total_weighted_overlap(&s, &inst).unwrap().total_weighted
        );
    }

    #[test]
    fn unknown_ids_and_machines_are_structural() {
        let inst = two_machine_trio();
        let bad_job = r#"{"private_completion":{"j1":9,"j2":9,"j3":5,"zz":1},"pieces":[]}"#;
        assert!(matches!(parse_schedule::<Rational>(bad_job, &inst), Err(Error::Structural(_))));
        let bad_machine = r#"{"private_completion":{"j1":9,"j2":9,"j3":5},
            "pieces":[{"job":"j1","machine":3,"start":0,"end":1}]}"#;
        assert!(matches!(parse_schedule::<Rational>(bad_machine, &inst), Err(Error::Structural(_))));
    }
}
