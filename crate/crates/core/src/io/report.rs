//! Run reports (JSON, reals printed with six decimals) and selection traces.

use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::select::SelectionTrace;

/// `{:.6}` formatting without a sign on values that round to zero.
pub fn format_fixed6(v: f64) -> String {
    let text = format!("{v:.6}");
    if text.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        text.trim_start_matches('-').to_string()
    } else {
        text
    }
}

/// A real serialized with exactly six decimal places.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Fixed6(pub f64);

impl Serialize for Fixed6 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("cannot write non-finite value {}", self.0)));
        }
        let raw = serde_json::value::RawValue::from_string(format_fixed6(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Fixed6 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Fixed6)
    }
}

impl From<f64> for Fixed6 {
    fn from(v: f64) -> Self {
        Fixed6(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub fraction: Fixed6,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmInfo {
    pub c: Fixed6,
    pub gamma: Fixed6,
    pub grid_search: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub levels: usize,
    pub beta: Fixed6,
    pub threshold: Fixed6,
    /// Bands in the cube the run was made on.
    pub band_count: usize,
    pub svm: SvmInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub class: u16,
    /// `null` for a class with no test pixels.
    pub accuracy: Option<Fixed6>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetrics {
    pub oa: Fixed6,
    pub aa: Fixed6,
    pub kappa: Fixed6,
    pub specificity: Fixed6,
    pub ica: Vec<ClassAccuracy>,
}

impl From<&crate::eval::Metrics> for ReportMetrics {
    fn from(m: &crate::eval::Metrics) -> Self {
        Self {
            oa: m.oa.into(),
            aa: m.aa.into(),
            kappa: m.kappa.into(),
            specificity: m.specificity.into(),
            ica: m
                .ica
                .iter()
                .map(|&(class, acc)| ClassAccuracy {
                    class,
                    accuracy: acc.map(Fixed6),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub selection: Fixed6,
    pub training: Fixed6,
    pub prediction: Fixed6,
    pub total: Fixed6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub dataset: String,
    /// Selection method name, or `all` when every band was used.
    pub method: String,
    pub k: usize,
    pub split: SplitInfo,
    pub params: ReportParams,
    pub selected_bands: Vec<usize>,
    pub metrics: ReportMetrics,
    pub timing_ms: Timing,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        super::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

/// One selected band index per line, in selection order.
pub fn trace_to_text(trace: &SelectionTrace) -> String {
    trace.steps.iter().map(|s| format!("{}\n", s.band)).collect()
}

pub fn parse_trace_text(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, l)| {
            l.parse()
                .map_err(|_| Error::InvalidParameter(format!("trace line {}: {l:?} is not a band index", i + 1)))
        })
        .collect()
}

pub fn trace_to_json(trace: &SelectionTrace) -> Result<String> {
    let mut text = serde_json::to_string_pretty(trace)?;
    text.push('\n');
    Ok(text)
}

pub fn parse_trace_json(text: &str) -> Result<SelectionTrace> {
    Ok(serde_json::from_str(text)?)
}

/// Writes `<stem>.txt` and `<stem>.json` into `dir`.
pub fn write_trace(dir: &Path, stem: &str, trace: &SelectionTrace) -> Result<()> {
    super::write_atomic(&dir.join(format!("{stem}.txt")), trace_to_text(trace).as_bytes())?;
    super::write_atomic(&dir.join(format!("{stem}.json")), trace_to_json(trace)?.as_bytes())
}

/// Reads a trace from a `.json` file or a plain band list.
pub fn load_trace_bands(path: &Path) -> Result<Vec<usize>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        Ok(parse_trace_json(&text)?.bands())
    } else {
        parse_trace_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::{Method, StepRecord};

    fn report() -> Report {
        Report {
            dataset: "demo".into(),
            method: "mrms".into(),
            k: 2,
            split: SplitInfo {
                fraction: Fixed6(0.5),
                seed: 7,
            },
            params: ReportParams {
                levels: 256,
                beta: Fixed6(0.5),
                threshold: Fixed6(-0.02),
                band_count: 20,
                svm: SvmInfo {
                    c: Fixed6(100.0),
                    gamma: Fixed6(1.0 / 3.0),
                    grid_search: false,
                },
            },
            selected_bands: vec![3, 4],
            metrics: ReportMetrics {
                oa: Fixed6(0.8),
                aa: Fixed6(0.791666666),
                kappa: Fixed6(-1e-9),
                specificity: Fixed6(0.7916666),
                ica: vec![
                    ClassAccuracy {
                        class: 1,
                        accuracy: Some(Fixed6(0.75)),
                    },
                    ClassAccuracy {
                        class: 2,
                        accuracy: None,
                    },
                ],
            },
            timing_ms: Timing::default(),
        }
    }

    #[test]
    fn reals_have_six_decimals() {
        let text = report().to_json().unwrap();
        assert!(text.contains("\"gamma\": 0.333333"));
        assert!(text.contains("\"aa\": 0.791667"));
        assert!(text.contains("\"kappa\": 0.000000"));
        assert!(text.contains("\"c\": 100.000000"));
        assert!(text.contains("\"accuracy\": null"));
        let keys: Vec<&str> = ["dataset", "method", "k", "split", "params", "selected_bands", "metrics", "timing_ms"].to_vec();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let found: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(found, sorted);
    }

    #[test]
    fn report_round_trip() {
        let r = report();
        let back = Report::parse(&r.to_json().unwrap()).unwrap();
        assert_eq!(back.metrics.oa, Fixed6(0.8));
        assert_eq!(back.metrics.aa, Fixed6(0.791667));
        assert_eq!(back.selected_bands, r.selected_bands);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut r = report();
        r.metrics.oa = Fixed6(f64::NAN);
        assert!(r.to_json().is_err());
    }

    #[test]
    fn traces_round_trip() {
        let trace = SelectionTrace {
            method: Method::Mrms,
            levels: 256,
            steps: vec![
                StepRecord {
                    band: 3,
                    score: 0.2,
                    relevance: 0.2,
                    interaction: None,
                },
                StepRecord {
                    band: 4,
                    score: 0.8,
                    relevance: 0.0,
                    interaction: Some(0.8),
                },
            ],
        };
        assert_eq!(trace_to_text(&trace), "3\n4\n");
        assert_eq!(parse_trace_text("3\n4\n\n").unwrap(), vec![3, 4]);
        assert!(parse_trace_text("3\nx\n").is_err());
        assert_eq!(parse_trace_json(&trace_to_json(&trace).unwrap()).unwrap(), trace);
        let dir = tempfile::tempdir().unwrap();
        write_trace(dir.path(), "trace", &trace).unwrap();
        assert_eq!(load_trace_bands(&dir.path().join("trace.txt")).unwrap(), vec![3, 4]);
        assert_eq!(load_trace_bands(&dir.path().join("trace.json")).unwrap(), vec![3, 4]);
    }
}
