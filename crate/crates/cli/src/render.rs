//! Static Gantt charts: one row per shared machine, then one per private processor.

use std::fmt::Write as _;

use spsched::model::{Instance, Schedule};
use spsched::num::{display, Rational, Scalar};

const TEXT_COLUMNS: usize = 64;
const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7"];

struct Bar {
    row: usize,
    job: usize,
    start: Rational,
    end: Rational,
}

struct Chart {
    rows: Vec<String>,
    bars: Vec<Bar>,
    horizon: Rational,
    /// Distinct ends of all bars, ascending.
    breakpoints: Vec<Rational>,
}

fn chart(schedule: &Schedule<Rational>, instance: &Instance<Rational>) -> Chart {
    let m = instance.m();
    let mut rows: Vec<String> = (0..m).map(|i| format!("M{} c={}", i + 1, display(instance.cost(i)))).collect();
    rows.extend(instance.jobs().iter().map(|j| format!("P {}", j.id)));
    let mut bars: Vec<Bar> = schedule
        .pieces()
        .iter()
        .map(|p| Bar { row: p.machine, job: p.job, start: p.start.clone(), end: p.end.clone() })
        .collect();
    bars.sort_by(|a, b| (a.row, &a.start, a.job).cmp(&(b.row, &b.start, b.job)));
    for (j, c) in schedule.private_completion().iter().enumerate() {
        if c.is_pos() {
            bars.push(Bar { row: m + j, job: j, start: Rational::from_int(0), end: c.clone() });
        }
    }
    let mut breakpoints: Vec<Rational> = bars.iter().map(|b| b.end.clone()).collect();
    breakpoints.sort();
    breakpoints.dedup();
    let horizon = breakpoints.last().cloned().unwrap_or_else(|| Rational::from_int(1));
    Chart { rows, bars, horizon, breakpoints }
}

fn job_char(job: usize) -> char {
    const SYMBOLS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    SYMBOLS.get(job).map_or('#', |&b| b as char)
}

pub fn render_text(schedule: &Schedule<Rational>, instance: &Instance<Rational>) -> String {
    let c = chart(schedule, instance);
    let label_width = c.rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let cols = Rational::from_int(TEXT_COLUMNS as i64);
    let mut grid = vec![vec!['.'; TEXT_COLUMNS]; c.rows.len()];
    for bar in &c.bars {
        for (k, cell) in grid[bar.row].iter_mut().enumerate() {
            // a column shows the job running at its midpoint
            let mid = c.horizon.clone() * Rational::from_ratio(2 * k as i64 + 1, 2) / cols.clone();
            if bar.start < mid && mid < bar.end {
                *cell = job_char(bar.job);
            }
        }
    }
    let mut out = String::new();
    for (label, line) in c.rows.iter().zip(&grid) {
        let _ = writeln!(out, "{label:<label_width$} |{}|", line.iter().collect::<String>());
    }
    let _ = writeln!(out, "{:<label_width$} 0{:>width$}", "", display(&c.horizon), width = TEXT_COLUMNS + 1);
    let points: Vec<String> = c.breakpoints.iter().map(display).collect();
    let _ = writeln!(out, "breakpoints: {}", points.join(" "));
    let legend: Vec<String> =
        instance.jobs().iter().enumerate().map(|(j, job)| format!("{}={}", job_char(j), job.id)).collect();
    let _ = writeln!(out, "jobs: {}", legend.join(" "));
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(schedule: &Schedule<Rational>, instance: &Instance<Rational>) -> String {
    const LEFT: f64 = 110.0;
    const PLOT: f64 = 640.0;
    const ROW: f64 = 28.0;
    const TOP: f64 = 20.0;
    let c = chart(schedule, instance);
    let horizon = c.horizon.to_f64();
    let x = |t: &Rational| LEFT + PLOT * t.to_f64() / horizon;
    let axis_y = TOP + ROW * c.rows.len() as f64 + 6.0;
    let height = axis_y + 40.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{height:.0}" font-family="monospace" font-size="11">"#,
        LEFT + PLOT + 30.0
    );
    for (r, label) in c.rows.iter().enumerate() {
        let y = TOP + ROW * r as f64;
        let _ = writeln!(out, r#"  <text class="row" x="4" y="{:.1}">{}</text>"#, y + ROW / 2.0 + 4.0, escape(label));
        let _ = writeln!(
            out,
            r##"  <line x1="{LEFT:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#ccc"/>"##,
            y + ROW,
            LEFT + PLOT,
            y + ROW
        );
    }
    for bar in &c.bars {
        let y = TOP + ROW * bar.row as f64 + 3.0;
        let (x0, x1) = (x(&bar.start), x(&bar.end));
        let id = escape(&instance.job(bar.job).id);
        let _ = writeln!(
            out,
            r#"  <rect class="piece" x="{x0:.3}" y="{y:.1}" width="{:.3}" height="{:.1}" fill="{}"><title>{id} ({}, {})</title></rect>"#,
            x1 - x0,
            ROW - 6.0,
            PALETTE[bar.job % PALETTE.len()],
            display(&bar.start),
            display(&bar.end)
        );
        let _ = writeln!(
            out,
            r#"  <text class="job" x="{:.3}" y="{:.1}" text-anchor="middle">{id}</text>"#,
            (x0 + x1) / 2.0,
            y + ROW / 2.0 + 1.0
        );
    }
    let _ = writeln!(
        out,
        r##"  <line class="axis" x1="{LEFT:.1}" y1="{axis_y:.1}" x2="{:.1}" y2="{axis_y:.1}" stroke="#000"/>"##,
        LEFT + PLOT
    );
    let _ = writeln!(out, r#"  <text class="origin" x="{LEFT:.1}" y="{:.1}" text-anchor="middle">0</text>"#, axis_y + 16.0);
    for (k, t) in c.breakpoints.iter().enumerate() {
        let xt = x(t);
        // alternate label heights so close breakpoints stay readable
        let ty = axis_y + if k % 2 == 0 { 16.0 } else { 30.0 };
        let _ = writeln!(
            out,
            r##"  <line x1="{xt:.3}" y1="{TOP:.1}" x2="{xt:.3}" y2="{:.1}" stroke="#888" stroke-dasharray="2,2"/>"##,
            axis_y + 4.0
        );
        let _ = writeln!(
            out,
            r#"  <text class="breakpoint" x="{xt:.3}" y="{ty:.1}" text-anchor="middle">{}</text>"#,
            display(t)
        );
    }
    out.push_str("</svg>\n");
    out
}
