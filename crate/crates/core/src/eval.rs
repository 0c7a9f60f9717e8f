//! Confusion matrices and accuracy summaries.
//!
//! Rows are the ground-truth classes, columns the assigned classes; entry
//! (I, J) of the percentage view is the share of class-I pixels assigned to
//! class J. Pixels with truth label 0 are excluded.

use crate::error::{Error, Result};
use crate::wishart::{ClassMap, LabelMask};

/// K x K pixel counts with class names for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    names: Vec<String>,
    counts: Vec<Vec<u64>>,
}

/// Tabulate truth vs prediction over labeled pixels.
pub fn confusion(truth: &LabelMask, predicted: &ClassMap) -> Result<ConfusionMatrix> {
    if truth.width() != predicted.width() || truth.height() != predicted.height() {
        return Err(Error::config("truth and prediction dimensions differ"));
    }
    let k = truth
        .num_classes()
        .max(predicted.classes().iter().copied().max().unwrap_or(0)) as usize;
    if k == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let mut counts = vec![vec![0u64; k]; k];
    let mut labeled = 0u64;
    for (&t, &p) in truth.labels().iter().zip(predicted.classes()) {
        if t == 0 {
            continue;
        }
        counts[(t - 1) as usize][(p - 1) as usize] += 1;
        labeled += 1;
    }
    if labeled == 0 {
        return Err(Error::EmptyEvaluation);
    }
    let names = (1..=k).map(|i| format!("class_{i}")).collect();
    Ok(ConfusionMatrix { names, counts })
}

impl ConfusionMatrix {
    /// Build directly from counts (names must match the matrix dimension).
    pub fn from_counts(names: Vec<String>, counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = names.len();
        if k == 0 || counts.len() != k || counts.iter().any(|r| r.len() != k) {
            return Err(Error::config("confusion matrix must be square and non-empty"));
        }
        Ok(Self { names, counts })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set_names(&mut self, names: Vec<String>) -> Result<()> {
        if names.len() != self.names.len() {
            return Err(Error::config(format!(
                "expected {} class names, got {}",
                self.names.len(),
                names.len()
            )));
        }
        self.names = names;
        Ok(())
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row-normalized percentages; rows without pixels are all zero.
    pub fn row_percentages(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let total: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| {
                        if total == 0 {
                            0.0
                        } else {
                            100.0 * c as f64 / total as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Pixel-weighted overall accuracy in percent: `100 * trace / total`.
    pub fn overall_accuracy(&self) -> f64 {
        let correct: u64 = (0..self.counts.len()).map(|i| self.counts[i][i]).sum();
        100.0 * correct as f64 / self.total() as f64
    }

    /// Unweighted mean of the per-class recall percentages (rows with pixels).
    pub fn mean_recall(&self) -> f64 {
        let pct = self.row_percentages();
        let mut sum = 0.0;
        let mut rows = 0usize;
        for (i, row) in self.counts.iter().enumerate() {
            if row.iter().sum::<u64>() > 0 {
                sum += pct[i][i];
                rows += 1;
            }
        }
        if rows == 0 {
            0.0
        } else {
            sum / rows as f64
        }
    }

    /// CSV report: header of class names, one percentage row per true class
    /// (2 decimal places), final line `overall,<value>`.
    pub fn to_csv(&self) -> String {
        format_percentage_csv(&self.names, &self.row_percentages(), self.overall_accuracy())
    }
}

/// Render a percentage table in the normative CSV shape.
pub fn format_percentage_csv(names: &[String], rows: &[Vec<f64>], overall: f64) -> String {
    let mut out = String::new();
    out.push_str("class");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (name, row) in names.iter().zip(rows) {
        out.push_str(name);
        for v in row {
            out.push(',');
            out.push_str(&format!("{v:.2}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("overall,{overall:.2}\n"));
    out
}

/// Parse a report produced by [`format_percentage_csv`] back into
/// `(names, rows, overall)`.
pub fn parse_percentage_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>, f64)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::config("empty CSV report"))?;
    let mut cols = header.split(',');
    if cols.next() != Some("class") {
        return Err(Error::config("CSV header must start with 'class'"));
    }
    let names: Vec<String> = cols.map(str::to_string).collect();
    if names.is_empty() {
        return Err(Error::config("CSV header has no class names"));
    }
    let mut rows = Vec::new();
    let mut overall = None;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields.next().unwrap_or_default();
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::config(format!("bad CSV number: {f}")))
            })
            .collect::<Result<_>>()?;
        if label == "overall" {
            if values.len() != 1 {
                return Err(Error::config("overall line must carry one value"));
            }
            overall = Some(values[0]);
        } else {
            if values.len() != names.len() {
                return Err(Error::config(format!(
                    "row '{label}' has {} values, expected {}",
                    values.len(),
                    names.len()
                )));
            }
            rows.push(values);
        }
    }
    let overall = overall.ok_or_else(|| Error::config("missing overall line"))?;
    if rows.len() != names.len() {
        return Err(Error::config(format!(
            "expected {} rows, found {}",
            names.len(),
            rows.len()
        )));
    }
    Ok((names, rows, overall))
}
