use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Format, RecordsError};
use crate::experiments::{Algorithm, ExperimentRecord};

pub const CSV_HEADER: [&str; 10] = [
    "algorithm",
    "N",
    "beta",
    "replicate",
    "seed",
    "true_reward",
    "modeled_reward",
    "regret",
    "queries_used",
    "fallback_rate",
];

/// Plain decimal with 17 significant digits; parses back to the same value.
pub fn fmt_sig17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent present") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (16 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Canonical order: algorithm tag, N, beta (absent first), replicate.
pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by(|a, b| {
        a.algorithm
            .tag()
            .cmp(b.algorithm.tag())
            .then(a.n.cmp(&b.n))
            .then(match (a.beta, b.beta) {
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (Some(_), None) => std::cmp::Ordering::Greater,
                (Some(x), Some(y)) => x.total_cmp(&y),
            })
            .then(a.replicate.cmp(&b.replicate))
    });
}

fn render_csv(records: &[ExperimentRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in records {
        w.write_record([
            r.algorithm.tag().to_string(),
            r.n.to_string(),
            r.beta.map(fmt_sig17).unwrap_or_default(),
            r.replicate.to_string(),
            r.seed.to_string(),
            fmt_sig17(r.true_reward),
            fmt_sig17(r.modeled_reward),
            fmt_sig17(r.regret),
            r.queries_used.to_string(),
            fmt_sig17(r.fallback_rate),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Sorted rendering of the records in the requested format.
pub fn render_records(records: &[ExperimentRecord], format: Format) -> Result<Vec<u8>, RecordsError> {
    if records.is_empty() {
        return Err(RecordsError::Empty);
    }
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    Ok(match format {
        Format::Csv => render_csv(&sorted),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&sorted).expect("records serialize");
            v.push(b'\n');
            v
        }
    })
}

/// Hex SHA-256 of the bytes.
pub fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes the sorted records and returns the checksum of the bytes written.
pub fn write_records(
    records: &[ExperimentRecord],
    format: Format,
    path: &Path,
) -> Result<String, RecordsError> {
    let bytes = render_records(records, format)?;
    std::fs::write(path, &bytes).map_err(|e| RecordsError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(checksum(&bytes))
}

pub fn read_records_csv(text: &str) -> Result<Vec<ExperimentRecord>, RecordsError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| RecordsError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(RecordsError::Parse {
            line: 1,
            message: format!("expected header {}", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| RecordsError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let fail = |field: &str, m: String| RecordsError::Parse {
            line,
            message: format!("{field}: {m}"),
        };
        let f64_at = |i: usize| -> Result<f64, RecordsError> {
            row[i].parse().map_err(|e: std::num::ParseFloatError| fail(CSV_HEADER[i], e.to_string()))
        };
        let u64_at = |i: usize| -> Result<u64, RecordsError> {
            row[i].parse().map_err(|e: std::num::ParseIntError| fail(CSV_HEADER[i], e.to_string()))
        };
        let algorithm: Algorithm = row[0].parse().map_err(|e: crate::Error| fail("algorithm", e.to_string()))?;
        out.push(ExperimentRecord {
            algorithm,
            n: u64_at(1)?,
            beta: if row[2].is_empty() { None } else { Some(f64_at(2)?) },
            replicate: u64_at(3)?,
            seed: u64_at(4)?,
            true_reward: f64_at(5)?,
            modeled_reward: f64_at(6)?,
            regret: f64_at(7)?,
            queries_used: u64_at(8)?,
            fallback_rate: f64_at(9)?,
            acceptance_step: None,
        });
    }
    Ok(out)
}

pub fn read_records_json(text: &str) -> Result<Vec<ExperimentRecord>, RecordsError> {
    super::from_json(text).map_err(|(at, message)| RecordsError::Json { at, message })
}
