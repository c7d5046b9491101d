//! CSV and JSON artifacts. Numbers are written with 15 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::ExperimentReport;
use crate::regularization::FilterSpec;
use crate::slepian::SlepianSystem;

/// 15 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn write_spectrum<W: Write>(mut w: W, rhos: &[f64], taus: &[f64]) -> io::Result<()> {
    writeln!(w, "k,rho,tau")?;
    for (k, (r, t)) in rhos.iter().zip(taus).enumerate() {
        writeln!(w, "{},{},{}", k + 1, num(*r), num(*t))?;
    }
    Ok(())
}

/// Row `n` holds the `n`-th `u`-coefficient of every eigenvector.
pub fn write_eigenvectors<W: Write>(mut w: W, sys: &SlepianSystem) -> io::Result<()> {
    let f = sys.coefficients();
    let header: Vec<String> = (1..=f.ncols()).map(|k| format!("f{k}")).collect();
    writeln!(w, "n,{}", header.join(","))?;
    for (n, row) in f.row_iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| num(*v)).collect();
        writeln!(w, "{},{}", n + 1, cells.join(","))?;
    }
    Ok(())
}

pub fn write_filter<W: Write>(mut w: W, filter: &FilterSpec, scale: u32, count: usize) -> io::Result<()> {
    writeln!(w, "k,phi")?;
    for (k, v) in filter.values(scale, count).iter().enumerate() {
        writeln!(w, "{},{}", k + 1, num(*v))?;
    }
    Ok(())
}

/// Columns `x` and then one column per named series.
pub fn write_columns<W: Write>(mut w: W, x: &[f64], columns: &[(&str, &[f64])]) -> io::Result<()> {
    let names: Vec<&str> = columns.iter().map(|c| c.0).collect();
    writeln!(w, "x,{}", names.join(","))?;
    for (i, xi) in x.iter().enumerate() {
        let cells: Vec<String> = columns.iter().map(|c| num(c.1[i])).collect();
        writeln!(w, "{},{}", num(*xi), cells.join(","))?;
    }
    Ok(())
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_owned(), source }
}

fn write_file(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<PathBuf> {
    let mut buf = Vec::new();
    body(&mut buf).map_err(io_err(path))?;
    fs::write(path, buf).map_err(io_err(path))?;
    Ok(path.to_owned())
}

/// Write `spectrum.csv`, `solution_<J>.csv`, `errors.csv` and `config.json`.
pub fn emit_reports(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = vec![write_file(&out_dir.join("spectrum.csv"), |w| {
        write_spectrum(w, &report.rhos, &report.taus)
    })?];
    for s in &report.scales {
        let path = out_dir.join(format!("solution_{}.csv", s.scale));
        written.push(write_file(&path, |w| {
            write_columns(w, &report.grid, &[("truth", &report.truth), ("approx", &s.values)])
        })?);
    }
    written.push(write_file(&out_dir.join("errors.csv"), |w| {
        writeln!(w, "J,rms")?;
        for s in &report.scales {
            writeln!(w, "{},{}", s.scale, num(s.rms))?;
        }
        Ok(())
    })?);
    written.push(write_file(&out_dir.join("config.json"), |w| {
        let echo = serde_json::json!({
            "config": report.config,
            "config_hash": report.config_hash,
            "kept": report.kept,
            "condition_number": report.condition_number,
        });
        serde_json::to_writer_pretty(&mut *w, &echo).map_err(io::Error::other)?;
        writeln!(w)
    })?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProblemConfig;
    use crate::experiment::{run_experiment, ExperimentConfig};

    #[test]
    fn number_format_has_fifteen_digits() {
        assert_eq!(num(0.799061458634963), "7.99061458634963e-1");
        assert_eq!(num(-2.5), "-2.50000000000000e0");
        assert_eq!(num(0.799061458634963).parse::<f64>().unwrap(), 0.799061458634963);
    }

    #[test]
    fn emitted_files_are_deterministic() {
        let cfg = ExperimentConfig {
            problem: ProblemConfig { bandlimit: 6, region_nodes: 201, ..Default::default() },
            rhs_nodes: 201,
            eval_nodes: 41,
            scales: vec![1, 2, 3],
            ..Default::default()
        };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let files = emit_reports(&run_experiment(&cfg).unwrap(), a.path()).unwrap();
        emit_reports(&run_experiment(&cfg).unwrap(), b.path()).unwrap();
        assert_eq!(files.len(), 6);
        for f in &files {
            let name = f.file_name().unwrap();
            assert_eq!(fs::read(f).unwrap(), fs::read(b.path().join(name)).unwrap());
        }
        let errors = fs::read_to_string(a.path().join("errors.csv")).unwrap();
        assert_eq!(errors.lines().count(), 1 + cfg.scales.len());
        let sol = fs::read_to_string(a.path().join("solution_2.csv")).unwrap();
        assert_eq!(sol.lines().next().unwrap(), "x,truth,approx");
        assert_eq!(sol.lines().count(), 42);
    }

    #[test]
    fn unwritable_directory_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = ExperimentConfig {
            problem: ProblemConfig { bandlimit: 3, region_nodes: 51, ..Default::default() },
            rhs_nodes: 51,
            eval_nodes: 11,
            scales: vec![1],
            ..Default::default()
        };
        let err = emit_reports(&run_experiment(&cfg).unwrap(), &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}
