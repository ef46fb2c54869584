//! Result writers: the per-box table, the p-box curve samples, and the
//! exceedance summary. All numbers are rounded to 6 significant digits and
//! rows follow a fixed order, so re-runs reproduce the files byte for byte.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

use evidprop::propagate::PropagationResult;

use crate::config::{CurveRequest, Problem};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Rounds to 6 significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exponent = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(5 - exponent);
    (x * scale).round() / scale
}

fn fmt(x: f64) -> String {
    format!("{}", sig6(x))
}

pub struct Writer<'a> {
    pub out_dir: &'a Path,
    pub problem: &'a Problem,
}

impl Writer<'_> {
    pub fn ds_table(&self, results: &[PropagationResult]) -> Result<PathBuf, OutputError> {
        let path = self.out_dir.join("ds_table.csv");
        let mut text = String::from("method,box_id");
        for name in &self.problem.variable_names {
            text.push_str(&format!(",{name}_lo,{name}_hi"));
        }
        text.push_str(",y_lo,y_hi,mass\n");
        for result in results {
            for record in &result.boxes {
                text.push_str(&format!("{},{}", result.method, record.box_id));
                for interval in &record.inputs {
                    text.push_str(&format!(",{},{}", fmt(interval.lo()), fmt(interval.hi())));
                }
                text.push_str(&format!(
                    ",{},{},{}\n",
                    fmt(record.output.lo()),
                    fmt(record.output.hi()),
                    fmt(record.mass)
                ));
            }
        }
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn curves(&self, results: &[PropagationResult]) -> Result<PathBuf, OutputError> {
        let path = self.out_dir.join("curves.csv");
        let mut text = String::from("method,x,cbf,cpf,ccbf,ccpf\n");
        for result in results {
            let xs = curve_samples(&self.problem.curves, result);
            for x in xs {
                let (cbf, cpf) = result.output.cumulative(x);
                let (ccbf, ccpf) = result.output.complementary_cumulative(x);
                text.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    result.method,
                    fmt(x),
                    fmt(cbf),
                    fmt(cpf),
                    fmt(ccbf),
                    fmt(ccpf)
                ));
            }
        }
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    pub fn summary(&self, results: &[PropagationResult]) -> Result<PathBuf, OutputError> {
        let path = self.out_dir.join("summary.json");
        let mut rows = Vec::new();
        for result in results {
            for &threshold in &self.problem.thresholds {
                let (lower, upper) = result.output.exceedance_bounds(threshold);
                rows.push(json!({
                    "method": result.method.name(),
                    "threshold": sig6(threshold),
                    "lower": sig6(lower),
                    "upper": sig6(upper),
                }));
            }
        }
        let doc = json!({ "exceedance": rows });
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// Sample abscissae: the closed grid of every curve request plus every
/// focal endpoint inside the requested ranges, deduplicated and sorted.
fn curve_samples(curves: &[CurveRequest], result: &PropagationResult) -> Vec<f64> {
    let mut xs = Vec::new();
    for request in curves {
        let span = request.to - request.from;
        let count = (span / request.step + 1e-9).floor() as usize;
        for i in 0..=count {
            xs.push(request.from + request.step * i as f64);
        }
        // closed on both ends
        if span > 0.0 && (xs.last().copied().unwrap_or(request.from) - request.to).abs() > 0.0 {
            xs.push(request.to);
        }
        for fe in result.output.focal_elements() {
            for endpoint in [fe.interval.lo(), fe.interval.hi()] {
                if endpoint >= request.from && endpoint <= request.to {
                    xs.push(endpoint);
                }
            }
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    xs.dedup();
    xs
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let mut file = std::fs::File::create(path).map_err(io_err(path))?;
    file.write_all(bytes).map_err(io_err(path))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), 0.0);
        assert_eq!(sig6(0.18), 0.18);
        assert_eq!(sig6(1.048803694636), 1.0488);
        assert_eq!(sig6(-1.048853694636), -1.04885);
        assert_eq!(sig6(123456789.0), 123457000.0);
        assert_eq!(sig6(0.0111111111111), 0.0111111);
        assert_eq!(sig6(0.9999999), 1.0);
    }

    #[test]
    fn formatting_is_plain_decimal() {
        assert_eq!(fmt(0.18), "0.18");
        assert_eq!(fmt(1.048803694636), "1.0488");
        assert_eq!(fmt(2.0), "2");
    }
}
