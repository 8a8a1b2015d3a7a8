use std::io::Write;

use serde::Serialize;

use crate::error::CliError;

/// One output row: `(metric, ℓ, value, witness)`. A missing value means the
/// quantity does not exist (e.g. no ℓ-supporting group).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureRow {
    pub metric: String,
    pub l: Option<usize>,
    pub value: Option<f64>,
    pub witness: String,
}

impl MeasureRow {
    pub fn new(
        metric: &str,
        l: Option<usize>,
        value: Option<f64>,
        witness: impl Into<String>,
    ) -> Self {
        Self {
            metric: metric.to_string(),
            l,
            value,
            witness: witness.into(),
        }
    }

    pub fn scalar(metric: &str, value: f64) -> Self {
        Self::new(metric, None, Some(value), "")
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[MeasureRow]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["metric", "l", "value", "witness"])?;
    for row in rows {
        let l = row.l.map(|l| l.to_string()).unwrap_or_default();
        let value = row
            .value
            .map_or_else(|| "none".to_string(), |v| v.to_string());
        writer.write_record([row.metric.as_str(), &l, &value, &row.witness])?;
    }
    writer
        .flush()
        .map_err(|e| CliError::semantic(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn to_csv_string(rows: &[MeasureRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}
