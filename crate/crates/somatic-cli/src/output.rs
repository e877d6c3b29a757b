//! Record serialization (CSV and JSON) and stdout summary tables.
//!
//! CSV files carry one header line naming every column, one record per line,
//! `.` decimal separators and shortest round-trip float formatting, so
//! identical runs produce byte-identical files. In CSV mode each record's
//! density grid goes to its own `<stem>_gridNN.csv` file; in JSON mode grids
//! nest inside the record objects as `[y, density]` pairs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Number, Value as Json};
use somatic::experiments::{ExperimentRecord, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

fn column_names(record: &ExperimentRecord) -> Vec<&str> {
    let mut names = vec!["experiment"];
    names.extend(record.params().iter().map(|(n, _)| n.as_str()));
    names.extend(record.outputs().iter().map(|(n, _)| n.as_str()));
    names
}

fn check_uniform_schema(records: &[ExperimentRecord]) -> Result<(), CliError> {
    let first = column_names(&records[0]);
    for record in &records[1..] {
        if column_names(record) != first {
            return Err(CliError::numerical(
                "internal: experiment records disagree on their column schema",
            ));
        }
    }
    Ok(())
}

pub fn write_records_csv(records: &[ExperimentRecord], writer: impl Write) -> Result<(), CliError> {
    check_uniform_schema(records)?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(column_names(&records[0]))
        .and_then(|()| {
            for record in records {
                let mut row = vec![record.experiment().to_owned()];
                row.extend(record.params().iter().map(|(_, v)| v.to_string()));
                row.extend(record.outputs().iter().map(|(_, v)| format!("{v}")));
                w.write_record(&row)?;
            }
            w.flush().map_err(csv::Error::from)
        })
        .map_err(|e| CliError::data(format!("writing records: {e}")))
}

pub fn write_grid_csv(grid: &[(f64, f64)], writer: impl Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["y", "density"])
        .and_then(|()| {
            for (y, density) in grid {
                w.write_record([format!("{y}"), format!("{density}")])?;
            }
            w.flush().map_err(csv::Error::from)
        })
        .map_err(|e| CliError::data(format!("writing grid: {e}")))
}

fn json_number(x: f64) -> Json {
    Number::from_f64(x).map(Json::Number).expect("record values are finite")
}

fn record_to_json(record: &ExperimentRecord) -> Json {
    let mut obj = Map::new();
    obj.insert("experiment".to_owned(), json!(record.experiment()));
    for (name, value) in record.params() {
        let v = match value {
            Value::Real(x) => json_number(*x),
            Value::Int(i) => json!(i),
            Value::Text(s) => json!(s),
        };
        obj.insert(name.clone(), v);
    }
    for (name, value) in record.outputs() {
        obj.insert(name.clone(), json_number(*value));
    }
    if let Some(grid) = record.grid() {
        let pairs: Vec<Json> = grid
            .iter()
            .map(|&(y, d)| Json::Array(vec![json_number(y), json_number(d)]))
            .collect();
        obj.insert("grid".to_owned(), Json::Array(pairs));
    }
    Json::Object(obj)
}

pub fn write_records_json(
    records: &[ExperimentRecord],
    mut writer: impl Write,
) -> Result<(), CliError> {
    check_uniform_schema(records)?;
    let array = Json::Array(records.iter().map(record_to_json).collect());
    serde_json::to_writer_pretty(&mut writer, &array)
        .map_err(|e| CliError::data(format!("writing records: {e}")))?;
    writer.write_all(b"\n").map_err(|e| CliError::data(format!("writing records: {e}")))
}

/// Writes the records file and, for CSV output, one grid file per record
/// that carries a grid. Returns every path written.
pub fn write_experiment_files(
    records: &[ExperimentRecord],
    out: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>, CliError> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::data(format!("creating {}: {e}", parent.display())))?;
    }
    let open = |path: &Path| -> Result<BufWriter<File>, CliError> {
        File::create(path)
            .map(BufWriter::new)
            .map_err(|e| CliError::data(format!("creating {}: {e}", path.display())))
    };
    let mut written = vec![out.to_path_buf()];
    match format {
        OutputFormat::Json => write_records_json(records, open(out)?)?,
        OutputFormat::Csv => {
            write_records_csv(records, open(out)?)?;
            let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("records");
            for (index, record) in records.iter().enumerate() {
                if let Some(grid) = record.grid() {
                    let name = format!("{stem}_grid{index:02}.csv");
                    let path = out.with_file_name(name);
                    write_grid_csv(grid, open(&path)?)?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// Prints an aligned table of the varying parameters and all outputs.
pub fn print_summary(records: &[ExperimentRecord], mut writer: impl Write) -> std::io::Result<()> {
    if records.is_empty() {
        return writeln!(writer, "(no records)");
    }
    // columns: parameters that vary across records, then every output
    let varying: Vec<usize> = (0..records[0].params().len())
        .filter(|&i| {
            records
                .iter()
                .any(|r| r.params()[i].1.to_string() != records[0].params()[i].1.to_string())
        })
        .collect();
    let mut header: Vec<String> = varying
        .iter()
        .map(|&i| records[0].params()[i].0.clone())
        .collect();
    header.extend(records[0].outputs().iter().map(|(n, _)| n.clone()));

    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row: Vec<String> =
                varying.iter().map(|&i| r.params()[i].1.to_string()).collect();
            row.extend(r.outputs().iter().map(|(_, v)| format!("{v:.6}")));
            row
        })
        .collect();

    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(c, h)| rows.iter().map(|r| r[c].len()).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let print_row = |w: &mut dyn Write, cells: &[String]| -> std::io::Result<()> {
        let line = cells
            .iter()
            .zip(&widths)
            .map(|(cell, width)| format!("{cell:>width$}"))
            .collect::<Vec<_>>()
            .join("  ");
        writeln!(w, "{line}")
    };
    writeln!(writer, "experiment: {}", records[0].experiment())?;
    print_row(&mut writer, &header)?;
    for row in &rows {
        print_row(&mut writer, row)?;
    }
    Ok(())
}
