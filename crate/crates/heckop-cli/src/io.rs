//! CSV tables and JSON sidecars.

use std::error::Error;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use heckop::quadrature::{Rule, TorusGrid};
use heckop::rootdata::RootDatum;
use heckop::transform::{CoefficientVector, SampledSection};
use heckop::weights::DominantWeight;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CliResult<T> = Result<T, Box<dyn Error>>;

pub fn writer(path: Option<&Path>) -> CliResult<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

pub fn parse_floats(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| Ok(t.trim().parse::<f64>()?)).collect()
}

pub fn parse_ints(s: &str) -> CliResult<Vec<i64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| Ok(t.trim().parse::<i64>()?)).collect()
}

/// Metadata written next to a section CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub rank: usize,
    pub l: i64,
    pub r: Option<f64>,
    #[serde(rename = "N")]
    pub n: usize,
    pub rule: Rule,
    pub norm: String,
    pub value: String,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Nodes per torus axis; grids are tensor products.
pub fn points_per_axis(grid: &TorusGrid) -> usize {
    (grid.len() as f64).powf(1.0 / grid.rank as f64).round() as usize
}

pub fn write_section(path: &Path, f: &SampledSection) -> CliResult<()> {
    let rank = f.grid.rank;
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (1..=rank).map(|j| format!("y{j}")).collect();
    header.extend(["re".into(), "im".into()]);
    w.write_record(&header)?;
    for (p, v) in f.grid.points.iter().zip(&f.values) {
        let mut row: Vec<String> = p.iter().map(|x| format!("{x:.17e}")).collect();
        row.push(format!("{:.17e}", v.re));
        row.push(format!("{:.17e}", v.im));
        w.write_record(&row)?;
    }
    w.flush()?;
    let side = Sidecar {
        rank,
        l: f.l,
        r: f.support_radius,
        n: points_per_axis(&f.grid),
        rule: f.grid.rule.clone(),
        norm: "euclidean in Y coordinates".into(),
        value: "scalar part g, section f = eta_l g".into(),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&side)?)?;
    Ok(())
}

pub fn read_section(path: &Path) -> CliResult<SampledSection> {
    let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let grid = Arc::new(TorusGrid::from_rule(side.rank, &side.rule)?);
    let mut r = csv::Reader::from_path(path)?;
    let mut values = Vec::with_capacity(grid.len());
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != side.rank + 2 {
            return Err(format!("row {k}: expected {} columns", side.rank + 2).into());
        }
        let p = grid.points.get(k).ok_or("more rows than grid points")?;
        for (j, x) in p.iter().enumerate() {
            let y: f64 = rec[j].parse()?;
            if (y - x).abs() > 1e-12 {
                return Err(format!("row {k}: point does not match the grid in the sidecar").into());
            }
        }
        values.push(Complex64::new(rec[side.rank].parse()?, rec[side.rank + 1].parse()?));
    }
    if values.len() != grid.len() {
        return Err(format!("{} rows for a grid of {} points", values.len(), grid.len()).into());
    }
    Ok(SampledSection { grid, values, l: side.l, support_radius: side.r })
}

pub fn write_coefficients(path: Option<&Path>, c: &CoefficientVector, dims: &[f64]) -> CliResult<()> {
    let rank = c.entries.first().map(|(w, _)| w.mu.len()).unwrap_or(0);
    let mut w = writer(path)?;
    let mut header: Vec<String> = (1..=rank).map(|j| format!("mu{j}")).collect();
    header.extend(["l", "re", "im", "d"].map(String::from));
    w.write_record(&header)?;
    for ((mu, v), d) in c.entries.iter().zip(dims) {
        let mut row: Vec<String> = mu.mu.iter().map(|x| x.to_string()).collect();
        row.extend([c.l.to_string(), format!("{:.17e}", v.re), format!("{:.17e}", v.im), format!("{d:.12}")]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients(path: &Path, rd: &RootDatum) -> CliResult<CoefficientVector> {
    let mut r = csv::Reader::from_path(path)?;
    let n = rd.rank;
    let mut entries = Vec::new();
    let mut l_seen = None;
    for rec in r.records() {
        let rec = rec?;
        if rec.len() < n + 3 {
            return Err(format!("coefficient rows need {} columns", n + 3).into());
        }
        let mu: Vec<i64> = (0..n).map(|j| rec[j].parse()).collect::<Result<_, _>>()?;
        let l: i64 = rec[n].parse()?;
        if *l_seen.get_or_insert(l) != l {
            return Err("coefficient file mixes several l".into());
        }
        let v = Complex64::new(rec[n + 1].parse()?, rec[n + 2].parse()?);
        if !heckop::weights::is_in_lambda_l(rd, &mu, l) {
            return Err(heckop::Error::NotInLattice { mu, l }.into());
        }
        entries.push((DominantWeight::new(rd, mu, l), v));
    }
    Ok(CoefficientVector { l: l_seen.ok_or("empty coefficient file")?, entries })
}
