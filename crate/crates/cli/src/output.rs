//! CSV tables and the run log.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub const HEADER: &str = "N,runtime_s,nnz,s_r,s_c,cond_ratio,alpha_A,solve_residual,success_prob";

/// One result row. Columns that do not apply to an experiment stay 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub n: usize,
    pub runtime_s: f64,
    pub nnz: usize,
    pub s_r: usize,
    pub s_c: usize,
    pub cond_ratio: f64,
    pub alpha_a: f64,
    pub solve_residual: f64,
    pub success_prob: f64,
}

impl Row {
    pub fn is_finite(&self) -> bool {
        [self.runtime_s, self.cond_ratio, self.alpha_a, self.solve_residual, self.success_prob]
            .iter()
            .all(|v| v.is_finite())
    }
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        writeln!(
            s,
            "{},{:.16e},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.n, r.runtime_s, r.nnz, r.s_r, r.s_c, r.cond_ratio, r.alpha_a, r.solve_residual, r.success_prob
        )
        .unwrap();
    }
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

pub fn parse_csv(text: &str) -> Option<Vec<Row>> {
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 9 {
                return None;
            }
            Some(Row {
                n: f[0].parse().ok()?,
                runtime_s: f[1].parse().ok()?,
                nnz: f[2].parse().ok()?,
                s_r: f[3].parse().ok()?,
                s_c: f[4].parse().ok()?,
                cond_ratio: f[5].parse().ok()?,
                alpha_a: f[6].parse().ok()?,
                solve_residual: f[7].parse().ok()?,
                success_prob: f[8].parse().ok()?,
            })
        })
        .collect()
}

/// Timestamped diagnostics, kept out of the CSV so tables stay comparable.
#[derive(Default)]
pub struct RunLog {
    text: String,
}

impl RunLog {
    pub fn note(&mut self, msg: impl AsRef<str>) {
        let t = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        writeln!(self.text, "[{t:.3}] {}", msg.as_ref()).unwrap();
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            Row { n: 256, runtime_s: 0.0, nnz: 1234, s_r: 7, s_c: 9, cond_ratio: 1.5, alpha_a: 3.0, ..Default::default() },
            Row { n: 512, solve_residual: 1e-12, success_prob: 0.25, ..Default::default() },
        ];
        let text = render_csv(&rows);
        assert!(text.starts_with(HEADER));
        assert_eq!(parse_csv(&text).unwrap(), rows);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("hbs-out-{}", std::process::id()));
        let p = dir.join("a.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }
}
