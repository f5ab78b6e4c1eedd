use std::fs::{self, File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::evaluation::{format_record_fields, parse_record_fields, EvaluationRecord, RECORD_COLUMNS};
use crate::scalar::Scalar;

const RUN_FIELDS: [&str; 3] = ["run_id", "window_start", "window_end"];

pub fn store_header() -> String {
    let mut cols: Vec<&str> = RUN_FIELDS.to_vec();
    cols.extend(RECORD_COLUMNS);
    cols.join(",")
}

/// Append-only file of evaluation records, one per line.
///
/// Appends are written with a single `write_all` and synced. A final line
/// without its newline is a torn write: loads skip it with a warning and the
/// next append cuts it off first.
#[derive(Clone, Debug)]
pub struct RecordStore {
    path: PathBuf,
}

struct Snapshot<T> {
    records: Vec<EvaluationRecord<T>>,
    /// Byte length of the intact prefix (header plus complete lines).
    valid_len: u64,
    file_len: u64,
}

impl RecordStore {
    pub fn open(path: impl Into<PathBuf>) -> Self {
        RecordStore { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load<T: Scalar>(&self) -> Result<Vec<EvaluationRecord<T>>> {
        Ok(self.snapshot()?.records)
    }

    pub fn len(&self) -> Result<usize> {
        Ok(self.load::<f64>()?.len())
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.len()? == 0)
    }

    fn store_err(&self, message: impl Into<String>) -> Error {
        Error::Store {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    fn snapshot<T: Scalar>(&self) -> Result<Snapshot<T>> {
        let mut text = String::new();
        match File::open(&self.path) {
            Ok(mut f) => {
                f.read_to_string(&mut text).map_err(|e| Error::io(&self.path, e))?;
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Ok(Snapshot {
                    records: Vec::new(),
                    valid_len: 0,
                    file_len: 0,
                })
            }
            Err(e) => return Err(Error::io(&self.path, e)),
        }
        let file_len = text.len() as u64;
        let mut records = Vec::new();
        let mut offset = 0usize;
        let mut valid_len = 0u64;
        let header = store_header();
        for (idx, raw) in text.split_inclusive('\n').enumerate() {
            let complete = raw.ends_with('\n');
            let line = raw.trim_end_matches(['\n', '\r']);
            offset += raw.len();
            if !complete {
                log::warn!(
                    "{}: ignoring incomplete trailing line {} ({} bytes)",
                    self.path.display(),
                    idx + 1,
                    raw.len()
                );
                break;
            }
            if idx == 0 {
                if line != header {
                    return Err(self.store_err("missing or unexpected header line"));
                }
            } else {
                let record = parse_line(line).map_err(|e| self.store_err(format!("line {}: {e}", idx + 1)))?;
                records.push(record);
            }
            valid_len = offset as u64;
        }
        Ok(Snapshot {
            records,
            valid_len,
            file_len,
        })
    }

    /// Durably appends `records`. Earlier lines are never rewritten.
    pub fn append<T: Scalar>(&self, records: &[EvaluationRecord<T>]) -> Result<()> {
        for r in records {
            for (name, v) in [("run_id", &r.run_id), ("model", &r.model)] {
                if v.is_empty() || v.contains([',', '\n', '\r']) {
                    return Err(self.store_err(format!("{name} {v:?} cannot be stored")));
                }
            }
        }
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let snap = self.snapshot::<T>()?;
        let mut buf = String::new();
        if snap.valid_len == 0 {
            buf.push_str(&store_header());
            buf.push('\n');
        }
        for r in records {
            buf.push_str(&format!("{},{},{},", r.run_id, r.window_start, r.window_end));
            buf.push_str(&format_record_fields(r));
            buf.push('\n');
        }
        let mut file = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        if snap.file_len != snap.valid_len {
            file.set_len(snap.valid_len).map_err(|e| Error::io(&self.path, e))?;
        }
        file.seek(SeekFrom::Start(snap.valid_len))
            .map_err(|e| Error::io(&self.path, e))?;
        if let Err(e) = file.write_all(buf.as_bytes()).and_then(|_| file.sync_all()) {
            // roll back so no partial batch stays visible
            let _ = file.set_len(snap.valid_len);
            return Err(Error::io(&self.path, e));
        }
        Ok(())
    }
}

fn parse_line<T: Scalar>(line: &str) -> Result<EvaluationRecord<T>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != RUN_FIELDS.len() + RECORD_COLUMNS.len() {
        return Err(Error::Persistence(format!("expected {} fields, found {}", 15, fields.len())));
    }
    let date = |s: &str| {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::Persistence(format!("bad date {s:?}")))
    };
    parse_record_fields(fields[0], (date(fields[1])?, date(fields[2])?), &fields[3..])
}
