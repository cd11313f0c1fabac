use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{Classification, FireRecord, HaltReason, MaximaRecord, RunSummary};
use crate::experiments::StatResult;
use crate::io::IoError;

/// Round to 12 significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_opt(x: Option<f64>) -> Option<f64> {
    x.map(round_sig)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireSummary {
    pub k: u64,
    pub start: f64,
    /// `None` for a fire classified infinite.
    pub rightmost: Option<u64>,
    pub end: Option<f64>,
    pub duration: Option<f64>,
    pub classification: Classification,
    pub jumps: u64,
}

impl From<&FireRecord> for FireSummary {
    fn from(f: &FireRecord) -> Self {
        FireSummary {
            k: f.k,
            start: round_sig(f.start_time),
            rightmost: f.extent(),
            end: round_opt(f.end_time),
            duration: round_opt(f.duration()),
            classification: f.classification,
            jumps: f.jump_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximumSummary {
    pub i: u64,
    pub site: u64,
    pub fire: u64,
    pub f_first: f64,
    pub f_second: Option<f64>,
    pub jumps: u64,
    pub stretches: Vec<u64>,
}

impl From<&MaximaRecord> for MaximumSummary {
    fn from(m: &MaximaRecord) -> Self {
        MaximumSummary {
            i: m.i,
            site: m.site,
            fire: m.fire_index,
            f_first: round_sig(m.f_first),
            f_second: round_opt(m.f_second),
            jumps: m.jumps,
            stretches: m.stretch_lengths.clone(),
        }
    }
}

/// One line of the per-replication results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub replication: u64,
    pub seed: u64,
    pub kappa: Option<u64>,
    #[serde(rename = "T")]
    pub infinite_start: Option<f64>,
    pub end_time: f64,
    pub halt: HaltReason,
    pub sites: u64,
    pub fires: Vec<FireSummary>,
    pub maxima: Vec<MaximumSummary>,
}

impl ResultRecord {
    pub fn new(replication: u64, run: &RunSummary) -> Self {
        ResultRecord {
            replication,
            seed: run.seed,
            kappa: run.kappa,
            infinite_start: round_opt(run.infinite_start),
            end_time: round_sig(run.end_time),
            halt: run.halt,
            sites: run.sites_materialized,
            fires: run.fires.iter().map(FireSummary::from).collect(),
            maxima: run.maxima.iter().map(MaximumSummary::from).collect(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialise")
    }
}

/// Append one JSON object per record, each on its own line.
pub fn write_jsonl<W: Write>(mut out: W, records: &[ResultRecord]) -> Result<(), IoError> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CsvRow {
    replication: u64,
    seed: u64,
    kappa: Option<u64>,
    #[serde(rename = "T")]
    infinite_start: Option<f64>,
    end_time: f64,
    halt: HaltReason,
    sites: u64,
    fires: usize,
    maxima: usize,
    largest_finite: Option<u64>,
}

/// Flat per-replication table: one row per record.
pub fn write_csv_records<W: Write>(out: W, records: &[ResultRecord]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            replication: r.replication,
            seed: r.seed,
            kappa: r.kappa,
            infinite_start: r.infinite_start,
            end_time: r.end_time,
            halt: r.halt,
            sites: r.sites,
            fires: r.fires.len(),
            maxima: r.maxima.len(),
            largest_finite: r.fires.iter().filter_map(|f| f.rightmost).max(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `quantity,value` table of an ensemble statistic.
pub fn summary_csv(result: &StatResult) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"])?;
    let mut row = |k: &str, v: Option<f64>| w.write_record([k.to_string(), v.map(|v| round_sig(v).to_string()).unwrap_or_default()]);
    row("estimate", result.estimate)?;
    row("interval_lo", result.interval.map(|i| i.0))?;
    row("interval_hi", result.interval.map(|i| i.1))?;
    row("statistic", result.statistic)?;
    row("p_value", result.p_value)?;
    row("replications", Some(result.replications as f64))?;
    for (k, v) in &result.extra {
        row(k, Some(*v))?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DeltaSpec, DistSpec};
    use crate::engine::{simulate, ModelConfig};
    use crate::experiments::Provenance;

    fn run(seed: u64) -> RunSummary {
        let cfg = ModelConfig::new(DistSpec::Constant { value: 0.5 }, DeltaSpec::constant(0.2), 8.0, seed);
        simulate(&cfg).unwrap()
    }

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.14159265359);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(123456789.123456789), 123456789.123);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(2.5e-300), 2.5e-300);
    }

    #[test]
    fn lines_parse_independently() {
        let records: Vec<_> = (0..5).map(|i| ResultRecord::new(i, &run(i + 10))).collect();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        for (line, rec) in lines.iter().zip(&records) {
            let back: ResultRecord = serde_json::from_str(line).unwrap();
            assert_eq!(&back, rec);
        }
    }

    #[test]
    fn times_carry_at_most_twelve_digits() {
        let rec = ResultRecord::new(0, &run(3));
        for f in &rec.fires {
            let digits: String = format!("{:e}", f.start).split('e').next().unwrap().replace(['.', '-'], "");
            assert!(digits.len() <= 12, "{}", f.start);
        }
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let records: Vec<_> = (0..3).map(|i| ResultRecord::new(i, &run(i))).collect();
        let mut buf = Vec::new();
        write_csv_records(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("replication,seed,kappa,T,"));
    }

    #[test]
    fn summary_table_lists_extras() {
        let mut r = StatResult::new("x", 7, Provenance::new(&1u8, 0));
        r.estimate = Some(0.25);
        r.extra.insert("failures".into(), 0.0);
        let text = summary_csv(&r).unwrap();
        assert!(text.contains("estimate,0.25\n"));
        assert!(text.contains("interval_lo,\n"));
        assert!(text.ends_with("failures,0\n"));
    }
}
