//! Report rows, grouping, and CSV/JSON/table emission.

use std::io::Write;

use fon_core::estimates::EstimateReport;
use fon_core::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub m: Option<i64>,
    pub r: Option<i64>,
    pub value: f64,
    pub bound: f64,
    pub fitted: Option<f64>,
    pub verdict: &'static str,
    pub seed: Option<u64>,
    pub anchor: String,
    pub tol: f64,
}

/// All rows of one `(family, params)` evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct Group {
    pub family: String,
    pub anchor: String,
    pub params: Vec<(String, i64)>,
    pub fitted: Vec<(String, f64)>,
    pub pass: bool,
    pub seed: Option<u64>,
    pub rows: Vec<Row>,
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Default, Clone, Copy)]
pub struct Index {
    pub k: Option<i64>,
    pub l: Option<i64>,
    pub m: Option<i64>,
    pub r: Option<i64>,
}

impl Group {
    pub fn new(family: &str, anchor: &str, params: Vec<(String, i64)>, seed: Option<u64>) -> Self {
        Group { family: family.into(), anchor: anchor.into(), params, fitted: Vec::new(), pass: true, seed, rows: Vec::new() }
    }

    /// Adds a row whose verdict is `pass`; the group fails with any failing row.
    pub fn push(&mut self, n: usize, at: Index, value: f64, bound: f64, pass: bool, tol: f64) {
        self.pass &= pass;
        self.rows.push(Row {
            family: self.family.clone(),
            n,
            k: at.k,
            l: at.l,
            m: at.m,
            r: at.r,
            value,
            bound,
            fitted: None,
            verdict: verdict(pass),
            seed: self.seed,
            anchor: self.anchor.clone(),
            tol,
        });
    }

    pub fn from_estimate(rep: &EstimateReport, n: usize, tol: f64) -> Self {
        let param = |name: &str| rep.param(name);
        let main_fit = rep.fitted.first().map(|(_, v)| *v);
        let mut g = Group {
            family: rep.family.name().into(),
            anchor: rep.anchor.clone(),
            params: rep.params.clone(),
            fitted: rep.fitted.clone(),
            pass: rep.pass,
            seed: Some(rep.seed),
            rows: Vec::new(),
        };
        for p in &rep.values {
            let (l, m) = match rep.family.name() {
                "far-apart" => (param("a"), param("c")),
                "adjoint-state-norm" => (param("m"), param("m")),
                _ => (param("l").or(param("mbar")), param("m")),
            };
            let r = match rep.family.name() {
                "far-apart" => Some(p.k as i64),
                _ => None,
            };
            g.rows.push(Row {
                family: g.family.clone(),
                n,
                k: Some(p.k as i64),
                l,
                m,
                r,
                value: p.computed,
                bound: p.bound_shape,
                fitted: main_fit,
                verdict: verdict(rep.pass),
                seed: Some(rep.seed),
                anchor: rep.anchor.clone(),
                tol,
            });
        }
        g
    }

    fn label(&self) -> String {
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut s = ps.join(" ");
        if let Some(seed) = self.seed {
            s.push_str(&format!(" seed={seed}"));
        }
        s
    }
}

#[derive(Serialize)]
pub struct JsonReport<'a> {
    pub version: &'static str,
    pub command: &'a str,
    pub n: usize,
    pub kmax: usize,
    pub tol: f64,
    pub seed: u64,
    pub cache_hash: Option<String>,
    pub timestamp: u64,
    pub pass: bool,
    pub groups: &'a [Group],
}

pub fn write_csv<W: Write>(groups: &[Group], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for g in groups {
        for row in &g.rows {
            w.serialize(row).map_err(|e| Error::Io(e.into()))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(report: &JsonReport<'_>, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// One line per group: family, parameters, last value, its bound, the main
/// fitted constant and the verdict.
pub fn print_table<W: Write>(groups: &[Group], mut out: W) -> Result<()> {
    writeln!(out, "{:<20} {:<34} {:>14} {:>14} {:>12} verdict", "family", "params", "value", "bound", "fitted")?;
    for g in groups {
        let last = g.rows.last();
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6e}"));
        writeln!(
            out,
            "{:<20} {:<34} {:>14} {:>14} {:>12} {}",
            g.family,
            g.label(),
            fmt(last.map(|r| r.value)),
            fmt(last.map(|r| r.bound)),
            g.fitted.first().map_or("-".to_string(), |(_, v)| format!("{v:.4}")),
            verdict(g.pass)
        )?;
    }
    Ok(())
}
