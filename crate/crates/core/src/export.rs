//! Delimited-text export of analysis products. Every table starts with a
//! comment header carrying the tool version plus caller-provided provenance
//! (input digests, parameters), then a column list, then whitespace-separated
//! rows. Floats print in shortest round-trip form so re-parsing a table
//! reproduces the values bit for bit. States appear under their external
//! catalog ids.

use std::fmt::Write as _;
use std::path::Path;

use crate::asymptotics::AsymptoticSpectrum;
use crate::committor::CommittorField;
use crate::continuation::EigenpairCurve;
use crate::eigencurrent::{CutDistribution, EdgeCurrentField, EmissionReport};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::VERSION;

/// Ordered provenance pairs stamped into every export header.
#[derive(Debug, Clone, Default)]
pub struct TableMeta {
    pairs: Vec<(String, String)>,
}

impl TableMeta {
    pub fn new() -> Self {
        TableMeta::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.pairs.push((key.into(), value.into()));
        self
    }
}

fn header(kind: &str, meta: &TableMeta, columns: &str) -> String {
    let mut out = String::new();
    writeln!(out, "# ktn {VERSION} {kind}").unwrap();
    for (k, v) in &meta.pairs {
        writeln!(out, "# {k} {v}").unwrap();
    }
    writeln!(out, "# columns: {columns}").unwrap();
    out
}

/// Data lines of a table with their 1-based physical line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(ix, l)| (ix + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// One exported eigenvalue-curve row.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub fn eigenpair_curve_table(curve: &EigenpairCurve, meta: &TableMeta) -> String {
    let mut out = header("eigenpair-curve", meta, "T lambda residual iterations");
    for r in &curve.records {
        writeln!(out, "{:?} {:?} {:?} {}", r.t, r.lambda, r.residual, r.iterations).unwrap();
    }
    out
}

pub fn parse_eigenpair_curve_table(text: &str) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                line,
                format!("curve row needs 4 fields, got {}", fields.len()),
            ));
        }
        let num = |f: &str, what: &str| -> Result<f64> {
            f.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("{what} is not a number: {f:?}")))
        };
        rows.push(CurveRow {
            t: num(fields[0], "temperature")?,
            lambda: num(fields[1], "eigenvalue")?,
            residual: num(fields[2], "residual")?,
            iterations: fields[3]
                .parse()
                .map_err(|_| Error::parse(line, "iteration count is not an integer"))?,
        });
    }
    Ok(rows)
}

pub fn asymptotic_spectrum_table(
    net: &Network,
    spectrum: &AsymptoticSpectrum,
    meta: &TableMeta,
) -> String {
    let mut out = header(
        "asymptotic-spectrum",
        meta,
        "k sink edge_a edge_b delta set_size cycle_size",
    );
    for p in spectrum.pairs() {
        let s = net.edge(p.cutting_edge);
        writeln!(
            out,
            "{} {} {} {} {:?} {} {}",
            p.rank,
            net.external_id(p.sink),
            net.external_id(s.a),
            net.external_id(s.b),
            p.delta,
            p.members.len(),
            p.changed.len()
        )
        .unwrap();
    }
    out
}

pub fn current_field_table(net: &Network, field: &EdgeCurrentField, meta: &TableMeta) -> String {
    let total: f64 = field.currents().iter().map(|c| c.abs()).sum();
    let mut out = header("current-field", meta, "edge_a edge_b current share");
    for (e, &f) in field.currents().iter().enumerate() {
        let s = net.edge(e);
        let share = if total > 0.0 { f.abs() / total } else { 0.0 };
        writeln!(
            out,
            "{} {} {:?} {:?}",
            net.external_id(s.a),
            net.external_id(s.b),
            f,
            share
        )
        .unwrap();
    }
    out
}

/// Cut edges in descending current order with shares and running CDF.
pub fn cut_table(net: &Network, dist: &CutDistribution, meta: &TableMeta) -> String {
    let mut out = header("cut-distribution", meta, "edge_a edge_b current share cdf");
    for (pos, &e) in dist.edges.iter().enumerate() {
        let s = net.edge(e);
        writeln!(
            out,
            "{} {} {:?} {:?} {:?}",
            net.external_id(s.a),
            net.external_id(s.b),
            dist.currents[pos],
            dist.shares[pos],
            dist.cdf[pos]
        )
        .unwrap();
    }
    out
}

pub fn committor_table(net: &Network, field: &CommittorField, meta: &TableMeta) -> String {
    let mut out = header("committor", meta, "state q flagged");
    for (i, &q) in field.q.iter().enumerate() {
        let flagged = field.flagged.binary_search(&i).is_ok();
        writeln!(out, "{} {:?} {}", net.external_id(i), q, flagged as u8).unwrap();
    }
    out
}

pub fn emission_table(net: &Network, report: &EmissionReport, meta: &TableMeta) -> String {
    let mut out = header("emission-absorption", meta, "state rate side");
    for (i, &r) in report.rates.iter().enumerate() {
        let side = if report.s_plus.contains(&i) { 1 } else { -1 };
        writeln!(out, "{} {:?} {}", net.external_id(i), r, side).unwrap();
    }
    out
}

/// Writes a rendered table; the parent directory must exist.
pub fn save(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}
