//! Deterministic file writers: CSV tables, JSON summaries, text matrices.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use edtherm_core::hamiltonian::SparseOperator;
use edtherm_core::{Complex64, MatRef};
use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{AppError, AppResult};

/// Version of every file layout written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Output directory of one run.
#[derive(Clone, Debug)]
pub struct OutputDir {
    root: PathBuf,
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> AppError + '_ {
    move |source| AppError::Write {
        path: path.to_path_buf(),
        source,
    }
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> AppResult<Self> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(write_err(&root))?;
        Ok(OutputDir { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn join(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn subdir(&self, name: &str) -> AppResult<OutputDir> {
        OutputDir::create(self.root.join(name))
    }

    /// One CSV row per element of `rows`, headers taken from field names.
    pub fn csv<T: Serialize>(&self, name: &str, rows: impl IntoIterator<Item = T>) -> AppResult<()> {
        let path = self.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        for row in rows {
            writer.serialize(row)?;
        }
        writer.flush().map_err(write_err(&path))?;
        Ok(())
    }

    /// CSV with explicit headers and numeric rows; for tables whose columns
    /// depend on the run (e.g. one column per site pair).
    pub fn csv_columns(&self, name: &str, headers: &[String], rows: &[Vec<f64>]) -> AppResult<()> {
        let path = self.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(headers)?;
        for row in rows {
            writer.write_record(row.iter().map(|x| x.to_string()))?;
        }
        writer.flush().map_err(write_err(&path))?;
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> AppResult<()> {
        let path = self.join(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").map_err(write_err(&path))
    }

    /// Writes the real part as a whitespace-separated grid, plus a second
    /// grid `<stem>.imag.txt` when any imaginary part is non-zero.
    pub fn matrix(&self, stem: &str, m: MatRef<'_, Complex64>) -> AppResult<()> {
        let grid = |part: fn(&Complex64) -> f64| -> String {
            let mut text = String::new();
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:e}", part(&m[(i, j)]))).collect();
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            text
        };
        let real_path = self.join(&format!("{stem}.real.txt"));
        fs::write(&real_path, grid(|z| z.re)).map_err(write_err(&real_path))?;
        let has_imag = (0..m.ncols()).any(|j| (0..m.nrows()).any(|i| m[(i, j)].im != 0.0));
        if has_imag {
            let imag_path = self.join(&format!("{stem}.imag.txt"));
            fs::write(&imag_path, grid(|z| z.im)).map_err(write_err(&imag_path))?;
        }
        Ok(())
    }

    /// Header-prefixed `(row, col, value)` triplets of the stored upper
    /// triangle, one per line.
    pub fn operator(&self, name: &str, op: &SparseOperator) -> AppResult<()> {
        let path = self.join(name);
        let file = fs::File::create(&path).map_err(write_err(&path))?;
        let mut out = std::io::BufWriter::new(file);
        let io = |e| AppError::Write {
            path: path.clone(),
            source: e,
        };
        writeln!(out, "# dim {} basis {:?} upper-triangle triplets: row col value", op.dim(), op.basis()).map_err(io)?;
        for &(r, c, v) in op.entries() {
            writeln!(out, "{r} {c} {v:e}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Top-level `summary.json` layout shared by every scenario.
#[derive(Serialize)]
pub struct RunSummary<'a, T: Serialize> {
    pub schema_version: u32,
    pub scenario: &'static str,
    pub config: &'a ScenarioConfig,
    pub results: &'a T,
}

/// Wall-clock information, kept out of `summary.json` so that the summary
/// is reproducible bit for bit.
#[derive(Serialize)]
pub struct Timing {
    pub schema_version: u32,
    pub wall_clock_seconds: f64,
}
