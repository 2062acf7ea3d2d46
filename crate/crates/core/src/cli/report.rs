use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::Result;

pub const CSV_HEADER: &str = "scenario,check,anchor,residual,tolerance,pass,runtime_ms";

/// Outcome of one check. `pass` is `residual <= tolerance`; a NaN residual fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub scenario: String,
    pub check: String,
    pub anchor: String,
    #[serde(with = "nan_as_null")]
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl ReportRecord {
    pub fn new(scenario: &str, check: &str, anchor: &str, residual: f64, tolerance: f64, runtime_ms: f64) -> Self {
        ReportRecord {
            scenario: scenario.to_string(),
            check: check.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            runtime_ms,
        }
    }
}

/// JSON has no NaN; a failed evaluation is written as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Serialized form of a report: records in execution order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<ReportRecord>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn without_timing(mut self) -> Self {
        for r in &mut self.records {
            r.runtime_ms = 0.0;
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| crate::Error::Config(format!("report: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.scenario.as_str(),
                r.check.as_str(),
                r.anchor.as_str(),
                &fmt_f64(r.residual),
                &fmt_f64(r.tolerance),
                if r.pass { "true" } else { "false" },
                &fmt_f64(r.runtime_ms),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn write_to(&self, out: &mut dyn Write, format: super::Format) -> Result<()> {
        let text = match format {
            super::Format::Json => self.to_json(),
            super::Format::Csv => self.to_csv(),
        };
        out.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Shortest round-trip representation; `NaN` and `inf` spelled out.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:e}")
    }
}

/// Rows of `(t, value)` samples, one row per grid node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub path: usize,
    pub series: String,
    pub t: Vec<f64>,
    pub value: Vec<f64>,
}

pub fn plot_csv(series: &[PlotSeries]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "series", "t", "value"]).expect("in-memory write");
    for s in series {
        for (t, v) in s.t.iter().zip(&s.value) {
            w.write_record([s.path.to_string(), s.series.clone(), fmt_f64(*t), fmt_f64(*v)]).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}
