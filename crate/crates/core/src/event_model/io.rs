//! File formats.
//!
//! Event files are little-endian binary:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NTEV"
//! 4       2     version (u16, = 1)
//! 6       2     reserved (u16, = 0)
//! 8       8     record count (u64)
//! 16      10*n  records: t u32 (us), x u16, y u16, polarity u8 (1 = on), reserved u8
//! ```
//!
//! Samples and datasets are JSON.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{first_unsorted, Dataset, Micros, PixelEvent, Polarity, Sample, SpikeTrain};
use crate::error::{Error, Result};

pub const EVENT_MAGIC: &[u8; 4] = b"NTEV";
pub const EVENT_VERSION: u16 = 1;
pub const EVENT_HEADER_LEN: usize = 16;
pub const EVENT_RECORD_LEN: usize = 10;

pub fn encode_events(events: &[PixelEvent]) -> Result<Vec<u8>> {
    if let Some(i) = first_unsorted(events) {
        return Err(Error::Precondition(format!(
            "events not sorted by timestamp (record {i})"
        )));
    }
    let mut buf = Vec::with_capacity(EVENT_HEADER_LEN + EVENT_RECORD_LEN * events.len());
    buf.extend_from_slice(EVENT_MAGIC);
    buf.extend_from_slice(&EVENT_VERSION.to_le_bytes());
    buf.extend_from_slice(&0u16.to_le_bytes());
    buf.extend_from_slice(&(events.len() as u64).to_le_bytes());
    for (i, ev) in events.iter().enumerate() {
        let t = u32::try_from(ev.t).map_err(|_| Error::Record {
            index: i,
            message: format!("timestamp {} us does not fit in u32", ev.t),
        })?;
        buf.extend_from_slice(&t.to_le_bytes());
        buf.extend_from_slice(&ev.x.to_le_bytes());
        buf.extend_from_slice(&ev.y.to_le_bytes());
        buf.push(match ev.polarity {
            Polarity::On => 1,
            Polarity::Off => 0,
        });
        buf.push(0);
    }
    Ok(buf)
}

pub fn decode_events(bytes: &[u8]) -> Result<Vec<PixelEvent>> {
    if bytes.len() < EVENT_HEADER_LEN {
        return Err(Error::Format(format!(
            "event file is {} bytes, shorter than the {EVENT_HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != EVENT_MAGIC {
        return Err(Error::Format("bad magic, expected \"NTEV\"".into()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != EVENT_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let body = &bytes[EVENT_HEADER_LEN..];
    let expected = (count as u128) * EVENT_RECORD_LEN as u128;
    if body.len() as u128 != expected {
        return Err(Error::Format(format!(
            "header declares {count} records but body holds {} bytes",
            body.len()
        )));
    }

    let mut events = Vec::with_capacity(count as usize);
    for (index, rec) in body.chunks_exact(EVENT_RECORD_LEN).enumerate() {
        let t = u32::from_le_bytes(rec[0..4].try_into().unwrap()) as Micros;
        let x = u16::from_le_bytes([rec[4], rec[5]]);
        let y = u16::from_le_bytes([rec[6], rec[7]]);
        let polarity = match rec[8] {
            0 => Polarity::Off,
            1 => Polarity::On,
            p => {
                return Err(Error::Record {
                    index,
                    message: format!("polarity byte {p}"),
                })
            }
        };
        let ev = PixelEvent { t, x, y, polarity };
        if !ev.in_bounds() {
            return Err(Error::Record {
                index,
                message: format!("pixel ({x}, {y}) out of range"),
            });
        }
        if let Some(prev) = events.last() {
            let prev: &PixelEvent = prev;
            if t < prev.t {
                return Err(Error::Record {
                    index,
                    message: format!("timestamp {t} us precedes {} us", prev.t),
                });
            }
        }
        events.push(ev);
    }
    Ok(events)
}

pub fn read_events(path: impl AsRef<Path>) -> Result<Vec<PixelEvent>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_events(&bytes)
}

pub fn write_events(events: &[PixelEvent], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_events(events)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[derive(Serialize, Deserialize)]
struct CsvEvent {
    t_us: Micros,
    x: u16,
    y: u16,
    polarity: Polarity,
}

pub fn write_events_csv(events: &[PixelEvent], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(i) = first_unsorted(events) {
        return Err(Error::Precondition(format!(
            "events not sorted by timestamp (record {i})"
        )));
    }
    let csv_err = |e: csv::Error| Error::Format(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for ev in events {
        w.serialize(CsvEvent {
            t_us: ev.t,
            x: ev.x,
            y: ev.y,
            polarity: ev.polarity,
        })
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_events_csv(path: impl AsRef<Path>) -> Result<Vec<PixelEvent>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Format(e.to_string()))?;
    let mut events: Vec<PixelEvent> = Vec::new();
    for (index, row) in r.deserialize::<CsvEvent>().enumerate() {
        let row = row.map_err(|e| Error::Record {
            index,
            message: e.to_string(),
        })?;
        let ev = PixelEvent {
            t: row.t_us,
            x: row.x,
            y: row.y,
            polarity: row.polarity,
        };
        if !ev.in_bounds() {
            return Err(Error::Record {
                index,
                message: format!("pixel ({}, {}) out of range", ev.x, ev.y),
            });
        }
        if events.last().is_some_and(|p| ev.t < p.t) {
            return Err(Error::Record {
                index,
                message: "timestamps not monotonic".into(),
            });
        }
        events.push(ev);
    }
    Ok(events)
}

/// On-disk shape of a [`Sample`].
#[derive(Serialize, Deserialize)]
pub(super) struct SampleRecord {
    label: String,
    duration_us: Micros,
    trains: Vec<Vec<Micros>>,
}

impl TryFrom<SampleRecord> for Sample {
    type Error = Error;

    fn try_from(r: SampleRecord) -> Result<Self> {
        Sample::from_spike_lists(r.trains, r.duration_us, r.label)
    }
}

impl From<Sample> for SampleRecord {
    fn from(s: Sample) -> Self {
        SampleRecord {
            label: s.label,
            duration_us: s.duration,
            trains: s.trains.into_iter().map(|t: SpikeTrain| t.spikes).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(super) struct DatasetRecord {
    classes: Vec<String>,
    samples: Vec<Sample>,
}

impl TryFrom<DatasetRecord> for Dataset {
    type Error = Error;

    fn try_from(r: DatasetRecord) -> Result<Self> {
        Dataset::new(r.samples, r.classes)
    }
}

impl From<Dataset> for DatasetRecord {
    fn from(d: Dataset) -> Self {
        DatasetRecord {
            classes: d.classes,
            samples: d.samples,
        }
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        // Validation failures surface through serde as custom errors.
        if e.is_data() {
            Error::Validation(e.to_string())
        } else {
            Error::Format(e.to_string())
        }
    })
}

pub fn write_sample(sample: &Sample, path: impl AsRef<Path>) -> Result<()> {
    write_json(sample, path.as_ref())
}

pub fn read_sample(path: impl AsRef<Path>) -> Result<Sample> {
    read_json(path.as_ref())
}

pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_json(dataset, path.as_ref())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_json(path.as_ref())
}
