//! Serialized forms of [`AggregateStats`].

use std::str::FromStr;

use privlabel_core::stats::AggregateStats;
use privlabel_core::taxonomy::{CommonDatatype, CommonPurpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("unsupported report format `{0}` (expected json or csv)")]
    UnsupportedFormat(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl FromStr for Format {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(ReportError::UnsupportedFormat(other.into())),
        }
    }
}

/// JSON gives the whole report; CSV gives the heatmap, one row per common
/// datatype and one column per common purpose. Empty cells have no data.
pub fn emit_report(stats: &AggregateStats, format: &str) -> Result<Vec<u8>, ReportError> {
    match format.parse()? {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(stats).expect("stats serialize");
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => heatmap_csv(stats),
    }
}

fn csv_err(e: impl std::fmt::Display) -> ReportError {
    ReportError::Csv(e.to_string())
}

pub fn heatmap_csv(stats: &AggregateStats) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["datatype"];
    header.extend(CommonPurpose::ALL.iter().map(|p| p.as_str()));
    w.write_record(&header).map_err(csv_err)?;
    for dt in CommonDatatype::all() {
        let mut row = vec![dt.to_string()];
        for &p in CommonPurpose::ALL {
            let rate = stats.cell(dt, p).and_then(|c| c.rate);
            row.push(rate.map(|r| r.to_string()).unwrap_or_default());
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(csv_err)
}

/// Long form: one row per stratum and metric.
pub fn strata_csv(stats: &AggregateStats) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["dimension", "value", "apps", "labeled", "metric", "numerator", "denominator", "fraction"])
        .map_err(csv_err)?;
    for s in &stats.strata {
        for (name, f) in &s.metrics {
            w.write_record([
                s.dimension.clone(),
                s.value.clone(),
                s.apps.to_string(),
                s.labeled.to_string(),
                name.clone(),
                f.numerator.to_string(),
                f.denominator.to_string(),
                f.value.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(csv_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use privlabel_core::stats::aggregate;

    #[test]
    fn heatmap_shape() {
        let out = emit_report(&aggregate(&[], &[], &[]), "csv").unwrap();
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(out.as_slice());
        let rows: Vec<_> = r.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 27);
        assert!(rows.iter().all(|r| r.len() == 5));
    }

    #[test]
    fn json_round_trip_and_stable() {
        let s = aggregate(&[], &[], &[]);
        let a = emit_report(&s, "json").unwrap();
        assert_eq!(a, emit_report(&s, "json").unwrap());
        let back: AggregateStats = serde_json::from_slice(&a).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn unknown_format() {
        let s = aggregate(&[], &[], &[]);
        assert_eq!(emit_report(&s, "xml"), Err(ReportError::UnsupportedFormat("xml".into())));
    }
}
