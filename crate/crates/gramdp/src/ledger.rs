//! Append-only budget ledger file.
//!
//! The first line records the total budget; every further line is one charge:
//!
//! ```text
//! {"total_epsilon":1.0,"ts":"2026-10-19T12:00:00Z"}
//! {"label":"run mean age","epsilon":0.3,"ts":"2026-10-19T12:01:07Z"}
//! ```
//!
//! The file is exclusively locked while a charge is checked and appended, so
//! concurrent processes cannot overspend the budget.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use gramdp_core::BudgetLedger;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord {
    total_epsilon: f64,
    ts: String,
}

/// One charge line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargeRecord {
    pub label: String,
    pub epsilon: f64,
    pub ts: String,
}

/// Snapshot of a ledger file.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerState {
    pub ledger: BudgetLedger,
    pub records: Vec<ChargeRecord>,
}

#[derive(Debug, Serialize)]
pub struct LedgerStatus {
    pub total_epsilon: f64,
    pub spent: f64,
    pub remaining: f64,
    pub charges: usize,
}

impl LedgerState {
    pub fn status(&self) -> LedgerStatus {
        LedgerStatus {
            total_epsilon: self.ledger.total(),
            spent: self.ledger.spent(),
            remaining: self.ledger.remaining(),
            charges: self.records.len(),
        }
    }
}

pub fn now_iso8601() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub struct LedgerFile {
    path: PathBuf,
}

impl LedgerFile {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn corrupt(&self, message: impl Into<String>) -> AppError {
        AppError::CorruptLedger {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    /// Creates a new ledger file; fails if one already exists.
    pub fn init(&self, total_epsilon: f64) -> Result<LedgerState> {
        let ledger = BudgetLedger::new(total_epsilon)?;
        let mut file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&self.path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => AppError::LedgerExists(self.path.clone()),
                _ => AppError::Io(e),
            })?;
        let header = HeaderRecord {
            total_epsilon,
            ts: now_iso8601(),
        };
        writeln!(file, "{}", serde_json::to_string(&header)?)?;
        file.sync_all()?;
        Ok(LedgerState {
            ledger,
            records: Vec::new(),
        })
    }

    fn open(&self) -> Result<File> {
        OpenOptions::new()
            .read(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => self.corrupt("ledger file does not exist"),
                _ => AppError::Io(e),
            })
    }

    pub fn load(&self) -> Result<LedgerState> {
        let file = self.open()?;
        file.lock_shared()?;
        let state = self.parse(&file);
        file.unlock()?;
        state
    }

    fn parse(&self, file: &File) -> Result<LedgerState> {
        let mut lines = BufReader::new(file).lines().enumerate();
        let header: HeaderRecord = match lines.next() {
            Some((_, line)) => {
                serde_json::from_str(&line?).map_err(|e| self.corrupt(format!("line 1: {e}")))?
            }
            None => return Err(self.corrupt("empty ledger file")),
        };
        let mut ledger = BudgetLedger::new(header.total_epsilon)
            .map_err(|e| self.corrupt(format!("line 1: {e}")))?;
        let mut records = Vec::new();
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: ChargeRecord = serde_json::from_str(&line)
                .map_err(|e| self.corrupt(format!("line {}: {e}", i + 1)))?;
            ledger
                .charge(rec.label.clone(), rec.epsilon)
                .map_err(|e| self.corrupt(format!("line {}: {e}", i + 1)))?;
            records.push(rec);
        }
        Ok(LedgerState { ledger, records })
    }

    /// Appends a charge if it fits; on any error the file is left untouched.
    pub fn charge(&self, label: &str, epsilon: f64) -> Result<LedgerState> {
        let mut file = self.open()?;
        file.lock()?;
        let result = self.charge_locked(&mut file, label, epsilon);
        file.unlock()?;
        result
    }

    fn charge_locked(&self, file: &mut File, label: &str, epsilon: f64) -> Result<LedgerState> {
        file.seek(SeekFrom::Start(0))?;
        let mut state = self.parse(file)?;
        state.ledger.charge(label, epsilon)?;
        let rec = ChargeRecord {
            label: label.to_owned(),
            epsilon,
            ts: now_iso8601(),
        };
        let mut line = serde_json::to_string(&rec)?;
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.sync_all()?;
        state.records.push(rec);
        Ok(state)
    }
}
