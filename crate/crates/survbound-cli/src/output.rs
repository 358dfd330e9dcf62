//! Deterministic renderers. Floats go through shortest-round-trip
//! formatting on both the CSV and JSON paths, so identical inputs produce
//! byte-identical files and the two formats carry the same numbers.

use std::fmt::Write as _;
use std::path::Path;

use survbound::envelope::{CompositeBound, EnvelopeResult};
use survbound::oracle::SurvivalSample;
use survbound::series_bounds::CutoffMode;
use survbound::BoundCurve;

use crate::MomentsTable;

pub fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, text)
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn push_opt(line: &mut String, v: Option<f64>) {
    if let Some(x) = v {
        let _ = write!(line, "{x}");
    }
}

pub fn moments_csv(table: &MomentsTable) -> String {
    let mut out = String::from("k,h,e,b\n");
    for row in &table.rows {
        let mut line = format!("{},", row.k);
        push_opt(&mut line, row.h);
        line.push(',');
        push_opt(&mut line, row.e);
        line.push(',');
        push_opt(&mut line, row.b);
        line.push('\n');
        out.push_str(&line);
    }
    out
}

pub fn exact_csv(samples: &[SurvivalSample]) -> String {
    let mut out = String::from("t,re,im,abs,p\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{},{}", s.t, s.re, s.im, s.abs, s.p);
    }
    out
}

#[derive(serde::Serialize)]
struct ExactRow {
    t: f64,
    re: f64,
    im: f64,
    abs: f64,
    p: f64,
}

pub fn exact_json(samples: &[SurvivalSample]) -> String {
    let rows: Vec<ExactRow> = samples
        .iter()
        .map(|s| ExactRow {
            t: s.t,
            re: s.re,
            im: s.im,
            abs: s.abs,
            p: s.p,
        })
        .collect();
    to_json(&serde_json::json!({ "samples": rows }))
}

fn cutoff_of(curve: &BoundCurve) -> Option<f64> {
    match curve.cutoff_mode {
        CutoffMode::Fixed(c) => Some(c),
        _ => None,
    }
}

pub fn bound_curves_csv(curves: &[BoundCurve]) -> String {
    let any_cutoff = curves.iter().any(|c| cutoff_of(c).is_some());
    let mut out = String::from(if any_cutoff {
        "t,value,raw_value,valid,order,direction,target,cutoff\n"
    } else {
        "t,value,raw_value,valid,order,direction,target\n"
    });
    for curve in curves {
        for s in &curve.samples {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                s.t,
                s.value,
                s.raw_value,
                s.valid,
                curve.order,
                curve.direction.as_str(),
                curve.target.as_str()
            );
            if any_cutoff {
                out.push(',');
                push_opt(&mut out, cutoff_of(curve));
            }
            out.push('\n');
        }
    }
    out
}

#[derive(serde::Serialize)]
struct BoundSampleRow {
    t: f64,
    value: f64,
    raw_value: f64,
    valid: bool,
}

#[derive(serde::Serialize)]
struct BoundCurveRow {
    order: usize,
    direction: &'static str,
    target: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<f64>,
    samples: Vec<BoundSampleRow>,
}

pub fn bound_curves_json(curves: &[BoundCurve]) -> String {
    let rows: Vec<BoundCurveRow> = curves
        .iter()
        .map(|c| BoundCurveRow {
            order: c.order,
            direction: c.direction.as_str(),
            target: c.target.as_str(),
            cutoff: cutoff_of(c),
            samples: c
                .samples
                .iter()
                .map(|s| BoundSampleRow {
                    t: s.t,
                    value: s.value,
                    raw_value: s.raw_value,
                    valid: s.valid,
                })
                .collect(),
        })
        .collect();
    to_json(&serde_json::json!({ "curves": rows }))
}

pub fn envelopes_csv(envs: &[EnvelopeResult]) -> String {
    let mut out = String::from("c,t,value,order,direction,n_roots\n");
    for env in envs {
        for p in &env.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.cutoff,
                p.t,
                p.value,
                env.order,
                env.direction.as_str(),
                p.n_roots
            );
        }
    }
    out
}

#[derive(serde::Serialize)]
struct EnvelopePointRow {
    c: f64,
    t: f64,
    value: f64,
    n_roots: usize,
}

#[derive(serde::Serialize)]
struct EnvelopeRow {
    order: usize,
    direction: &'static str,
    multi_root_cutoffs: Vec<f64>,
    points: Vec<EnvelopePointRow>,
}

pub fn envelopes_json(envs: &[EnvelopeResult]) -> String {
    let rows: Vec<EnvelopeRow> = envs
        .iter()
        .map(|e| EnvelopeRow {
            order: e.order,
            direction: e.direction.as_str(),
            multi_root_cutoffs: e.multi_root_cutoffs.clone(),
            points: e
                .points
                .iter()
                .map(|p| EnvelopePointRow {
                    c: p.cutoff,
                    t: p.t,
                    value: p.value,
                    n_roots: p.n_roots,
                })
                .collect(),
        })
        .collect();
    to_json(&serde_json::json!({ "envelopes": rows }))
}

pub fn composite_csv(comp: &CompositeBound) -> String {
    let mut out = String::from("t,lower,upper,lower_source,upper_source\n");
    for p in &comp.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.t, p.lower, p.upper, p.lower_source, p.upper_source
        );
    }
    out
}

pub fn composite_json(comp: &CompositeBound) -> String {
    let rows: Vec<serde_json::Value> = comp
        .points
        .iter()
        .map(|p| {
            serde_json::json!({
                "t": p.t,
                "lower": p.lower,
                "upper": p.upper,
                "lower_source": p.lower_source,
                "upper_source": p.upper_source,
            })
        })
        .collect();
    to_json(&serde_json::json!({ "points": rows }))
}
