//! CSV and JSON renderings. Floats are written in shortest round-trip form.

use clap::ValueEnum;
use hillband::spectrum::{ConvergenceStudy, DiscriminantSample, ValidationReport};
use hillband::{BandStructure, Parity};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn csv_table<R>(header: &[&str], rows: R) -> Result<String, CliError>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    let to_io = |e: csv::Error| CliError::Output(e.into());
    writer.write_record(header).map_err(to_io)?;
    for row in rows {
        writer.write_record(&row).map_err(to_io)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Output(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json<S: serde::Serialize + ?Sized>(value: &S) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.into()))?;
    text.push('\n');
    Ok(text)
}

pub fn bands(bs: &BandStructure<f64>, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(bs),
        Format::Csv => csv_table(
            &["k", "side", "lambda", "parity", "collapsed"],
            bs.endpoints.iter().map(|e| {
                vec![
                    e.k.to_string(),
                    e.side.as_str().to_string(),
                    float(e.lambda),
                    e.parity.as_str().to_string(),
                    e.collapsed.to_string(),
                ]
            }),
        ),
    }
}

pub fn discriminant(samples: &[DiscriminantSample<f64>], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(samples),
        Format::Csv => csv_table(
            &["lambda", "delta"],
            samples.iter().map(|s| vec![float(s.lambda), s.delta.map(float).unwrap_or_default()]),
        ),
    }
}

pub fn eigenvalues(parity: Parity, values: &[f64], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(&serde_json::json!({ "parity": parity.as_str(), "eigenvalues": values })),
        Format::Csv => csv_table(
            &["index", "parity", "lambda"],
            values.iter().enumerate().map(|(i, &l)| vec![i.to_string(), parity.as_str().to_string(), float(l)]),
        ),
    }
}

pub fn convergence(study: &ConvergenceStudy<f64>, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(study),
        Format::Csv => csv_table(
            &["n", "k", "side", "lambda"],
            study.rows.iter().flat_map(|row| {
                row.structure.endpoints.iter().map(move |e| {
                    vec![row.n.to_string(), e.k.to_string(), e.side.as_str().to_string(), float(e.lambda)]
                })
            }),
        ),
    }
}

pub fn verification(report: &ValidationReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => Ok(report
            .checks
            .iter()
            .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
            .collect()),
    }
}
