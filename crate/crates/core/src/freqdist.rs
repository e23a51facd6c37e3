//! Name-length frequency distributions.
//!
//! A [`FrequencyTable`] maps an identifier length in octets to the number of
//! persons whose identifier has that length. Tables are ingested from CSV
//! frequency files or built from raw name lists, and summarized with Shannon
//! entropy and the minimum class count (the unpadded k-anonymity).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

/// Errors from table ingestion and summarization.
#[derive(Debug, Error)]
pub enum FreqError {
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("first CSV column must be `Length`, found `{found}`")]
    MissingLengthHeader { found: String },
    #[error("unknown column `{column}` (available: {available})")]
    UnknownColumn { column: String, available: String },
    #[error("row {row}: `{value}` in column `{column}` is not a non-negative integer")]
    NonIntegerCell {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}: length must be >= 1")]
    ZeroLength { row: u64 },
    #[error("duplicate length row for length {length}")]
    DuplicateLength { length: u32 },
    #[error("empty name sequence")]
    EmptyNameList,
    #[error("name at index {index} is empty after space removal")]
    BlankName { index: usize },
    #[error("empty frequency table")]
    EmptyTable,
}

/// Distribution of identifier lengths: length in octets -> person count.
///
/// Lengths are octet counts of the space-stripped, ASCII-transliterated
/// identifier. Counts are exact integers; zero-count lengths are never
/// stored. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    entries: BTreeMap<u32, u64>,
    label: String,
}

impl FrequencyTable {
    /// Builds a table from explicit (length, count) pairs, dropping zero
    /// counts. Lengths must be >= 1.
    pub fn from_counts<I>(label: impl Into<String>, counts: I) -> Result<Self, FreqError>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        let mut entries = BTreeMap::new();
        for (length, count) in counts {
            if length == 0 {
                return Err(FreqError::ZeroLength { row: 0 });
            }
            if count == 0 {
                continue;
            }
            if entries.insert(length, count).is_some() {
                return Err(FreqError::DuplicateLength { length });
            }
        }
        Ok(Self {
            entries,
            label: label.into(),
        })
    }

    /// Reads one count series from a CSV frequency file.
    ///
    /// The file must have a header row starting with `Length`; the remaining
    /// headers name the count series. Rows where the selected series has a
    /// zero count are skipped. Cells and headers may be quoted.
    pub fn from_csv<R: Read>(source: R, column: &str) -> Result<Self, FreqError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(source);

        let headers = reader.headers()?.clone();
        let first = headers.get(0).unwrap_or("").to_string();
        if first != "Length" {
            return Err(FreqError::MissingLengthHeader { found: first });
        }
        let col_idx = headers
            .iter()
            .skip(1)
            .position(|h| h == column)
            .map(|i| i + 1)
            .ok_or_else(|| FreqError::UnknownColumn {
                column: column.to_string(),
                available: headers.iter().skip(1).collect::<Vec<_>>().join(", "),
            })?;

        let mut entries = BTreeMap::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i as u64 + 2; // 1-based, after the header
            let length: u32 = parse_cell(record.get(0).unwrap_or(""), row, "Length")?;
            if length == 0 {
                return Err(FreqError::ZeroLength { row });
            }
            let count: u64 = parse_cell(record.get(col_idx).unwrap_or(""), row, column)?;
            if entries.contains_key(&length) {
                return Err(FreqError::DuplicateLength { length });
            }
            if count > 0 {
                entries.insert(length, count);
            } else {
                // remember the length so a later duplicate row still errors
                entries.insert(length, 0);
            }
        }
        entries.retain(|_, c| *c > 0);
        Ok(Self {
            entries,
            label: column.to_string(),
        })
    }

    /// Convenience wrapper over [`FrequencyTable::from_csv`] for a file path.
    pub fn from_csv_path(path: impl AsRef<Path>, column: &str) -> Result<Self, FreqError> {
        let file =
            std::fs::File::open(path.as_ref()).map_err(|e| FreqError::Csv(csv::Error::from(e)))?;
        Self::from_csv(file, column)
    }

    /// Counts name lengths directly. The length of a name is the octet count
    /// with ASCII spaces removed; callers transliterate non-ASCII letters to
    /// one-octet ASCII beforehand.
    pub fn from_names<I, S>(names: I) -> Result<Self, FreqError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries: BTreeMap<u32, u64> = BTreeMap::new();
        let mut seen = 0usize;
        for (index, name) in names.into_iter().enumerate() {
            let octets = name.as_ref().bytes().filter(|b| *b != b' ').count();
            if octets == 0 {
                return Err(FreqError::BlankName { index });
            }
            *entries.entry(octets as u32).or_insert(0) += 1;
            seen += 1;
        }
        if seen == 0 {
            return Err(FreqError::EmptyNameList);
        }
        Ok(Self {
            entries,
            label: "names".to_string(),
        })
    }

    /// Replaces the dataset label.
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Total number of persons in the table.
    pub fn population(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct lengths.
    pub fn distinct_lengths(&self) -> usize {
        self.entries.len()
    }

    pub fn count(&self, length: u32) -> u64 {
        self.entries.get(&length).copied().unwrap_or(0)
    }

    pub fn min_length(&self) -> Option<u32> {
        self.entries.keys().next().copied()
    }

    pub fn max_length(&self) -> Option<u32> {
        self.entries.keys().next_back().copied()
    }

    /// Iterates (length, count) pairs in strictly increasing length order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.entries.iter().map(|(&l, &c)| (l, c))
    }

    /// Shannon entropy of the length distribution in bits:
    /// H(U) = -sum p_i log2 p_i with p_i = count_i / population.
    ///
    /// A single-length table has entropy 0; so does an empty one.
    pub fn entropy(&self) -> f64 {
        let population = self.population();
        if population == 0 {
            return 0.0;
        }
        let population = population as f64;
        -self
            .entries
            .values()
            .map(|&c| {
                let p = c as f64 / population;
                p * p.log2()
            })
            .sum::<f64>()
    }

    /// The smallest class: (length, count) with the minimum count, ties
    /// broken toward the smaller length. This count is the k-anonymity of
    /// the unpadded identifier.
    pub fn min_class(&self) -> Result<(u32, u64), FreqError> {
        self.iter()
            .min_by_key(|&(length, count)| (count, length))
            .ok_or(FreqError::EmptyTable)
    }
}

fn parse_cell<T: std::str::FromStr>(raw: &str, row: u64, column: &str) -> Result<T, FreqError> {
    raw.parse().map_err(|_| FreqError::NonIntegerCell {
        row,
        column: column.to_string(),
        value: raw.to_string(),
    })
}
