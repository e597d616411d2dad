//! Measured PER tables keyed by SNR and scheme.
//!
//! Format: comma-separated text with header `snr_db,scheme,device_id,per`.
//! Scheme tokens are `tdma-nr`, `tdma-r`, `fdma`, or `tdma` for a row that
//! applies to both TDMA schemes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::domain::{PerVector, SchemeKind};
use crate::error::{AocError, Result};

pub const PER_TABLE_HEADER: [&str; 4] = ["snr_db", "scheme", "device_id", "per"];

/// SNR row key in dB, totally ordered.
#[derive(Debug, Clone, Copy)]
pub struct SnrDb(pub f64);

impl PartialEq for SnrDb {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SnrDb {}

impl PartialOrd for SnrDb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SnrDb {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerTable {
    entries: BTreeMap<(SnrDb, SchemeKind), PerVector>,
}

impl PerTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// One SNR point carrying the same PER vector for each listed scheme.
    pub fn single(snr_db: f64, p: &PerVector, schemes: &[SchemeKind]) -> Self {
        let mut table = Self::new();
        for &s in schemes {
            table.insert(snr_db, s, p.clone());
        }
        table
    }

    pub fn insert(&mut self, snr_db: f64, scheme: SchemeKind, p: PerVector) {
        self.entries.insert((SnrDb(snr_db), scheme), p);
    }

    pub fn get(&self, snr_db: f64, scheme: SchemeKind) -> Option<&PerVector> {
        self.entries.get(&(SnrDb(snr_db), scheme))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries ordered by SNR, then scheme.
    pub fn iter(&self) -> impl Iterator<Item = (f64, SchemeKind, &PerVector)> {
        self.entries.iter().map(|((snr, s), p)| (snr.0, *s, p))
    }
}

pub fn load_per_table(path: impl AsRef<Path>) -> Result<PerTable> {
    let path = path.as_ref();
    let file = File::open(path)
        .map_err(|e| AocError::Io(format!("{}: {e}", path.display())))?;
    parse_per_table(file)
}

pub fn parse_per_table<R: Read>(reader: R) -> Result<PerTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);

    let header = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
    if header.iter().collect::<Vec<_>>() != PER_TABLE_HEADER {
        return Err(AocError::Parse {
            line: 1,
            message: format!("expected header '{}'", PER_TABLE_HEADER.join(",")),
        });
    }

    type DeviceRows = BTreeMap<usize, f64>;
    let mut grouped: BTreeMap<(SnrDb, SchemeKind), DeviceRows> = BTreeMap::new();

    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_err = |message: String| AocError::Parse { line, message };

        let snr_db: f64 = field(0)
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| parse_err(format!("invalid snr_db '{}'", field(0))))?;
        let schemes: &[SchemeKind] = match field(1).to_ascii_lowercase().as_str() {
            "tdma" => &[SchemeKind::TdmaNr, SchemeKind::TdmaR],
            "tdma-nr" => &[SchemeKind::TdmaNr],
            "tdma-r" => &[SchemeKind::TdmaR],
            "fdma" => &[SchemeKind::Fdma],
            _ => {
                return Err(AocError::UnknownScheme {
                    line,
                    token: field(1).to_string(),
                })
            }
        };
        let device: usize = field(2)
            .parse()
            .ok()
            .filter(|&d| d >= 1)
            .ok_or_else(|| parse_err(format!("invalid device_id '{}'", field(2))))?;
        let per: f64 = field(3)
            .parse()
            .map_err(|_| parse_err(format!("invalid per '{}'", field(3))))?;
        if !(0.0..1.0).contains(&per) {
            return Err(AocError::PerOutOfRange { line });
        }

        for &scheme in schemes {
            let rows = grouped.entry((SnrDb(snr_db), scheme)).or_default();
            if rows.insert(device, per).is_some() {
                return Err(AocError::DuplicateDevice {
                    line,
                    snr_db,
                    scheme,
                    device,
                });
            }
        }
    }

    let mut table = PerTable::new();
    for ((snr, scheme), rows) in grouped {
        let n = rows.keys().next_back().copied().unwrap_or(0);
        if let Some(missing) = (1..=n).find(|d| !rows.contains_key(d)) {
            return Err(AocError::IncompleteDeviceSet {
                snr_db: snr.0,
                scheme,
                missing,
            });
        }
        table.insert(snr.0, scheme, PerVector::new(rows.into_values().collect())?);
    }
    Ok(table)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> AocError {
    let line = err.position().map_or(fallback_line, |p| p.line());
    AocError::Parse {
        line,
        message: err.to_string(),
    }
}
