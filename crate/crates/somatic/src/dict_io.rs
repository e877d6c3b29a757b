//! Delimited-text ingestion and emission of EPA sentiment lexicons.
//!
//! Format: UTF-8, comma-delimited, `.` decimal separator, standard quoting.
//! The header is `label,e,p,a,sd_e,sd_p,sd_a`; the three sd columns may be
//! omitted (sds then default to 0). Columns beyond the known set are
//! ignored, as real survey exports carry demographic splits and counts.
//! Malformed data lines are collected in a report instead of aborting the
//! load; only a missing or garbled header is fatal.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::epa::{EpaVector, Lexicon, LexiconEntry};
use crate::error::{Error, Result};

const BASE_COLUMNS: [&str; 4] = ["label", "e", "p", "a"];
const SD_COLUMNS: [&str; 3] = ["sd_e", "sd_p", "sd_a"];

/// What happened to each data line of a lexicon file: every line is counted
/// exactly once, as accepted or as a reject with its line number and reason.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LexiconFileReport {
    pub accepted: usize,
    pub rejects: Vec<(u64, String)>,
    /// Non-fatal observations about the file as a whole.
    pub notes: Vec<String>,
}

impl LexiconFileReport {
    pub fn data_lines(&self) -> usize {
        self.accepted + self.rejects.len()
    }
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str) -> std::result::Result<f64, String> {
    let raw = record.get(idx).unwrap_or("").trim();
    raw.parse::<f64>().map_err(|_| format!("column '{name}': {raw:?} is not a number"))
}

/// Loads a lexicon, collecting per-line problems into the report.
pub fn load_lexicon(reader: impl Read) -> Result<(Lexicon, LexiconFileReport)> {
    let mut csv_reader = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = csv_reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers.get(0).unwrap_or("").trim().is_empty())
    {
        return Err(Error::MissingHeader);
    }
    let names: Vec<String> =
        headers.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    let bad_header = || Error::BadHeader {
        expected: format!("{},{}", BASE_COLUMNS.join(","), SD_COLUMNS.join(",")),
        found: names.join(","),
    };
    if names.len() < BASE_COLUMNS.len()
        || names[..BASE_COLUMNS.len()] != BASE_COLUMNS.map(str::to_owned)
    {
        return Err(bad_header());
    }
    let has_sd = names.len() >= 7 && names[4..7] == SD_COLUMNS.map(str::to_owned);
    if !has_sd && names.len() > 4 && names[4..].iter().any(|n| SD_COLUMNS.contains(&n.as_str())) {
        // a partial or misplaced sd block is garbled, not "extra columns"
        return Err(bad_header());
    }

    let mut report = LexiconFileReport::default();
    if !has_sd {
        report.notes.push("sd columns absent; standard deviations default to 0".to_owned());
    }
    let known = if has_sd { 7 } else { 4 };
    if names.len() > known {
        report.notes.push(format!(
            "ignoring {} extra column(s): {}",
            names.len() - known,
            names[known..].join(", ")
        ));
    }

    let mut lexicon = Lexicon::new();
    for (index, row) in csv_reader.records().enumerate() {
        let record = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(index as u64 + 2, |p| p.line());
                report.rejects.push((line, format!("unparseable line: {e}")));
                continue;
            }
        };
        let line = record.position().map_or(index as u64 + 2, |p| p.line());
        match parse_entry(&record, names.len(), has_sd) {
            Ok(entry) => match lexicon.insert(entry) {
                Ok(()) => report.accepted += 1,
                Err(e) => report.rejects.push((line, e.to_string())),
            },
            Err(reason) => report.rejects.push((line, reason)),
        }
    }
    Ok((lexicon, report))
}

fn parse_entry(
    record: &csv::StringRecord,
    expected_fields: usize,
    has_sd: bool,
) -> std::result::Result<LexiconEntry, String> {
    if record.len() != expected_fields {
        return Err(format!("expected {expected_fields} fields, found {}", record.len()));
    }
    // labels are taken verbatim (quoting already handled), so save/load is identity
    let label = record.get(0).unwrap_or("").to_owned();
    let e = parse_field(record, 1, "e")?;
    let p = parse_field(record, 2, "p")?;
    let a = parse_field(record, 3, "a")?;
    let mean = EpaVector::new(e, p, a).map_err(|err| err.to_string())?;
    let sd = if has_sd {
        [
            parse_field(record, 4, "sd_e")?,
            parse_field(record, 5, "sd_p")?,
            parse_field(record, 6, "sd_a")?,
        ]
    } else {
        [0.0; 3]
    };
    LexiconEntry::new(label, mean, sd).map_err(|err| err.to_string())
}

/// Writes the lexicon in the same format, entries in label order, values at
/// full round-trip precision. `load(save(lex))` reproduces `lex` exactly.
pub fn save_lexicon(lex: &Lexicon, writer: impl Write) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(BASE_COLUMNS.iter().chain(SD_COLUMNS.iter()))?;
    for entry in lex.entries() {
        let [e, p, a] = entry.mean().components();
        let [sd_e, sd_p, sd_a] = entry.sd();
        csv_writer.write_record([
            entry.label().to_owned(),
            format!("{e}"),
            format!("{p}"),
            format!("{a}"),
            format!("{sd_e}"),
            format!("{sd_p}"),
            format!("{sd_a}"),
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn load_lexicon_path(path: impl AsRef<Path>) -> Result<(Lexicon, LexiconFileReport)> {
    load_lexicon(File::open(path)?)
}

pub fn save_lexicon_path(lex: &Lexicon, path: impl AsRef<Path>) -> Result<()> {
    save_lexicon(lex, File::create(path)?)
}
