//! CSV tables. One header row, fixed column order, numbers with 12
//! significant digits.

use std::io::Write;
use std::path::Path;

use clusterlife_core::geometry::{CrossingReport, EnergyPoint};
use clusterlife_core::sim::SimTrace;
use clusterlife_core::{ClusterSpec, DynamicPlan, EnergyMode, StaticResult};

use crate::error::{AppError, Result};

pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn order_field(order: &[usize]) -> String {
    order
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join("-")
}

/// An in-memory table.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| AppError::Write {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn render(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |k| format!("{prefix}{k}"))
}

/// Per-position breakdown of one static schedule.
pub fn allocation_table(result: &StaticResult, cluster: &ClusterSpec, mode: EnergyMode) -> Table {
    let mut t = Table::new([
        "position",
        "node",
        "load_bits",
        "time",
        "energy",
        "lifetime",
    ]);
    let energy = result.energy_by_node(cluster, mode);
    let lifetimes = result.node_lifetimes(cluster, mode);
    for (k, (&node, &h)) in result
        .schedule
        .order
        .iter()
        .zip(&result.schedule.loads)
        .enumerate()
    {
        let time = result.allocation.as_ref().map_or(f64::NAN, |a| a.times[k]);
        t.push(vec![
            k.to_string(),
            node.to_string(),
            num(h),
            num(time),
            num(energy[node]),
            num(lifetimes[node]),
        ]);
    }
    t
}

pub fn static_summary(results: &[(&str, &StaticResult)]) -> Table {
    let mut t = Table::new(["method", "order", "lifetime"]);
    for (name, r) in results {
        t.push(vec![
            name.to_string(),
            order_field(&r.schedule.order),
            num(r.lifetime),
        ]);
    }
    t
}

/// Columns with positive slot count.
pub fn plan_table(plan: &DynamicPlan, n: usize) -> Table {
    let header = ["column", "order", "slots"]
        .into_iter()
        .map(String::from)
        .chain(indexed("t", n))
        .chain(indexed("e", n));
    let mut t = Table::new(header);
    for e in &plan.entries {
        let mut row = vec![
            e.index.to_string(),
            order_field(&e.column.order),
            num(e.slots),
        ];
        match &e.column.times {
            Some(times) => row.extend(times.iter().map(|&v| num(v))),
            None => row.extend((0..n).map(|_| num(f64::NAN))),
        }
        row.extend(e.column.energy.iter().map(|&v| num(v)));
        t.push(row);
    }
    t
}

/// Energy points (one row each), with time coordinates when present.
pub fn points_table(points: &[EnergyPoint], n: usize, extra: Option<(&str, &[f64])>) -> Table {
    let header = ["order"]
        .into_iter()
        .map(String::from)
        .chain(indexed("t", n))
        .chain(indexed("e", n))
        .chain(extra.map(|(name, _)| name.to_string()));
    let mut t = Table::new(header);
    for (i, p) in points.iter().enumerate() {
        let mut row = vec![order_field(&p.order)];
        match &p.times {
            Some(times) => row.extend(times.iter().map(|&v| num(v))),
            None => row.extend((0..n).map(|_| num(f64::NAN))),
        }
        row.extend(p.energy.iter().map(|&v| num(v)));
        if let Some((_, values)) = extra {
            row.push(num(values[i]));
        }
        t.push(row);
    }
    t
}

pub fn hull_table(hull: &[[f64; 2]]) -> Table {
    let mut t = Table::new(["e0", "e1"]);
    for p in hull {
        t.push(vec![num(p[0]), num(p[1])]);
    }
    t
}

pub fn crossings_table(report: &CrossingReport) -> Table {
    let mut t = Table::new(["order", "t_first", "e0", "e1", "lifetime", "norm", "winner"]);
    for (i, c) in report.crossings.iter().enumerate() {
        t.push(vec![
            order_field(&c.order),
            num(c.t),
            num(c.point[0]),
            num(c.point[1]),
            num(c.lifetime),
            num(c.norm),
            u8::from(i == report.winner).to_string(),
        ]);
    }
    t
}

pub fn curve_table(values: &[f64], name: &str) -> Table {
    let mut t = Table::new(["m", name]);
    for (m, &v) in values.iter().enumerate() {
        t.push(vec![(m + 1).to_string(), num(v)]);
    }
    t
}

pub fn trace_table(trace: &SimTrace, n: usize) -> Table {
    let header = ["slot", "column"]
        .into_iter()
        .map(String::from)
        .chain(indexed("spent", n))
        .chain(indexed("remaining", n));
    let mut t = Table::new(header);
    for s in &trace.slots {
        let mut row = vec![s.slot.to_string(), s.column.to_string()];
        row.extend(s.spent.iter().map(|&v| num(v)));
        row.extend(s.remaining.iter().map(|&v| num(v)));
        t.push(row);
    }
    t
}
