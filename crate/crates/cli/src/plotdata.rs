//! CSV tables for external plotting.

use std::path::{Path, PathBuf};

use log::info;
use plapmix_core::Grid;

use crate::run::RunOutput;

#[derive(Debug, thiserror::Error)]
#[error("{}: {source}", path.display())]
pub struct PlotError {
    pub path: PathBuf,
    #[source]
    pub source: csv::Error,
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<std::fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, PlotError> {
        let path = dir.join(name);
        let writer = csv::Writer::from_path(&path).map_err(|source| PlotError { path: path.clone(), source })?;
        let mut t = Table { path, writer };
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, cells: impl IntoIterator<Item = String>) -> Result<(), PlotError> {
        let cells: Vec<String> = cells.into_iter().collect();
        self.writer.write_record(&cells).map_err(|source| PlotError { path: self.path.clone(), source })
    }

    fn finish(mut self) -> Result<PathBuf, PlotError> {
        self.writer.flush().map_err(|e| PlotError { path: self.path.clone(), source: e.into() })?;
        Ok(self.path)
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn coords(grid: &Grid, idx: usize) -> Vec<String> {
    let p = grid.point(idx);
    if grid.dim() == 1 {
        vec![num(p[0])]
    } else {
        vec![num(p[0]), num(p[1])]
    }
}

fn coord_header(grid: &Grid) -> Vec<&'static str> {
    if grid.dim() == 1 {
        vec!["x"]
    } else {
        vec!["x", "y"]
    }
}

/// Writes `sweep.csv`, `eigenfield.csv` (plus `eigenfield_line.csv` in
/// 2D), `residual.csv` and, when `verbose`, one `trace_*.csv` per solve.
/// Sections absent from the run produce no file.
pub fn emit_plotdata(out: &RunOutput, dir: &Path, verbose: bool) -> Result<Vec<PathBuf>, PlotError> {
    let grid = &out.setup.grid;
    let mut written = Vec::new();

    match &out.report.sweep {
        Some(sweep) => {
            let mut t = Table::create(dir, "sweep.csv", &["p", "lambda_root", "Lambda"])?;
            for e in &sweep.entries {
                t.row([num(e.p), e.lambda_root.map(num).unwrap_or_default(), num(e.lambda)])?;
            }
            written.push(t.finish()?);
        }
        None => info!("no sweep in this run; sweep.csv not written"),
    }

    match out.top_eigenpair() {
        Some(pair) => {
            let mut header = coord_header(grid);
            header.push("u");
            let mut t = Table::create(dir, "eigenfield.csv", &header)?;
            for &i in grid.interior() {
                t.row(coords(grid, i).into_iter().chain([num(pair.field.get(i))]))?;
            }
            written.push(t.finish()?);
            if grid.dim() == 2 {
                let x0 = grid.inradius().1;
                let row = grid.coords(grid.nearest_node(x0)).1;
                let mut t = Table::create(dir, "eigenfield_line.csv", &["x", "u"])?;
                for &i in grid.interior().iter().filter(|&&i| grid.coords(i).1 == row) {
                    t.row([num(grid.point(i)[0]), num(pair.field.get(i))])?;
                }
                written.push(t.finish()?);
            }
            info!("eigenfield tables use p = {}", pair.p);
        }
        None => info!("no eigenfield in this run; eigenfield.csv not written"),
    }

    match &out.residual {
        Some(res) => {
            let mut header = coord_header(grid);
            header.extend([
                "u",
                "sup_disp",
                "inf_disp",
                "grad_mag",
                "inf_lap",
                "m1",
                "m2",
                "residual",
                "robust",
                "degenerate",
            ]);
            let mut t = Table::create(dir, "residual.csv", &header)?;
            for n in &res.nodes {
                let vals = [n.value, n.sup_disp, n.inf_disp, n.grad_mag, n.inf_lap, n.m1, n.m2, n.residual];
                t.row(
                    coords(grid, n.index)
                        .into_iter()
                        .chain(vals.map(num))
                        .chain([n.robust.to_string(), n.degenerate.to_string()]),
                )?;
            }
            written.push(t.finish()?);
        }
        None => info!("no viscosity check in this run; residual.csv not written"),
    }

    if verbose {
        for (source, p, trace) in out.traces() {
            let mut t =
                Table::create(dir, &format!("trace_{}_p{p}.csv", source.name()), &["iter", "lambda", "grad_norm"])?;
            for e in trace {
                t.row([e.iter.to_string(), num(e.lambda()), num(e.grad_norm)])?;
            }
            written.push(t.finish()?);
        }
    }
    Ok(written)
}
