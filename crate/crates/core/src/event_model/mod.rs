//! Core data types, from raw pixel events up to labelled datasets.
//!
//! All times are integer microseconds. Millisecond quantities from
//! configuration are converted at the boundary via [`ms_to_us`].

mod io;

pub use io::{
    decode_events, encode_events, read_dataset, read_events, read_events_csv, read_sample,
    write_dataset, write_events, write_events_csv, write_sample, EVENT_HEADER_LEN, EVENT_MAGIC,
    EVENT_RECORD_LEN, EVENT_VERSION,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Timestamp or duration in microseconds.
pub type Micros = u64;

/// Camera resolution (columns).
pub const SENSOR_WIDTH: u16 = 240;
/// Camera resolution (rows).
pub const SENSOR_HEIGHT: u16 = 180;
/// Number of taxels (internal pins) on the tip.
pub const TAXEL_COUNT: usize = 49;

pub const DEFAULT_POOLING_WINDOW_US: Micros = 20_000;

pub fn ms_to_us(ms: f64) -> Micros {
    (ms * 1000.0).round() as Micros
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Off,
    On,
}

/// One address-event from the camera.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelEvent {
    pub t: Micros,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl PixelEvent {
    pub fn new(t: Micros, x: u16, y: u16, polarity: Polarity) -> Result<Self> {
        let ev = PixelEvent { t, x, y, polarity };
        if !ev.in_bounds() {
            return Err(Error::Validation(format!(
                "pixel ({x}, {y}) outside {SENSOR_WIDTH}x{SENSOR_HEIGHT} sensor"
            )));
        }
        Ok(ev)
    }

    pub fn in_bounds(&self) -> bool {
        self.x < SENSOR_WIDTH && self.y < SENSOR_HEIGHT
    }
}

/// Checks the sort order of an event stream, returning the index of the
/// first out-of-order event.
pub fn first_unsorted(events: &[PixelEvent]) -> Option<usize> {
    events
        .windows(2)
        .position(|w| w[1].t < w[0].t)
        .map(|i| i + 1)
}

/// Pooled group of pixel events attributed to one taxel within one window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaxelEvent {
    pub taxel_id: usize,
    pub count: usize,
    pub centroid: (f64, f64),
    pub t: Micros,
}

/// Strictly increasing spike times of one taxel.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpikeTrain {
    taxel_id: usize,
    spikes: Vec<Micros>,
}

impl SpikeTrain {
    pub fn new(taxel_id: usize, spikes: Vec<Micros>) -> Result<Self> {
        if let Some(i) = spikes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Validation(format!(
                "taxel {taxel_id}: spike {} ({} us) does not follow {} us",
                i + 1,
                spikes[i + 1],
                spikes[i]
            )));
        }
        Ok(SpikeTrain { taxel_id, spikes })
    }

    pub fn empty(taxel_id: usize) -> Self {
        SpikeTrain {
            taxel_id,
            spikes: Vec::new(),
        }
    }

    pub fn taxel_id(&self) -> usize {
        self.taxel_id
    }

    pub fn spikes(&self) -> &[Micros] {
        &self.spikes
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }
}

/// A labelled multi-taxel spike train from one slide across a texture.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "io::SampleRecord", into = "io::SampleRecord")]
pub struct Sample {
    trains: Vec<SpikeTrain>,
    duration: Micros,
    label: String,
}

impl Sample {
    pub fn new(trains: Vec<SpikeTrain>, duration: Micros, label: impl Into<String>) -> Result<Self> {
        if trains.len() != TAXEL_COUNT {
            return Err(Error::Validation(format!(
                "sample has {} trains, expected {TAXEL_COUNT}",
                trains.len()
            )));
        }
        for (n, train) in trains.iter().enumerate() {
            if train.taxel_id != n {
                return Err(Error::Validation(format!(
                    "train {n} carries taxel id {}",
                    train.taxel_id
                )));
            }
            if let Some(&last) = train.spikes.last() {
                if last >= duration {
                    return Err(Error::Validation(format!(
                        "taxel {n}: spike at {last} us not before duration {duration} us"
                    )));
                }
            }
        }
        Ok(Sample {
            trains,
            duration,
            label: label.into(),
        })
    }

    /// Builds a sample from raw per-taxel spike lists (index = taxel id).
    pub fn from_spike_lists(
        lists: Vec<Vec<Micros>>,
        duration: Micros,
        label: impl Into<String>,
    ) -> Result<Self> {
        let trains = lists
            .into_iter()
            .enumerate()
            .map(|(n, spikes)| SpikeTrain::new(n, spikes))
            .collect::<Result<Vec<_>>>()?;
        Sample::new(trains, duration, label)
    }

    pub fn empty(duration: Micros, label: impl Into<String>) -> Self {
        Sample {
            trains: (0..TAXEL_COUNT).map(SpikeTrain::empty).collect(),
            duration,
            label: label.into(),
        }
    }

    pub fn trains(&self) -> &[SpikeTrain] {
        &self.trains
    }

    pub fn train(&self, taxel: usize) -> &SpikeTrain {
        &self.trains[taxel]
    }

    pub fn duration(&self) -> Micros {
        self.duration
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn spike_counts(&self) -> Vec<usize> {
        self.trains.iter().map(SpikeTrain::len).collect()
    }

    pub fn total_spikes(&self) -> usize {
        self.trains.iter().map(SpikeTrain::len).sum()
    }
}

/// Labelled samples plus the ordered class list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "io::DatasetRecord", into = "io::DatasetRecord")]
pub struct Dataset {
    samples: Vec<Sample>,
    classes: Vec<String>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, classes: Vec<String>) -> Result<Self> {
        Self::with_duration_tolerance(samples, classes, DEFAULT_POOLING_WINDOW_US)
    }

    pub fn with_duration_tolerance(
        samples: Vec<Sample>,
        classes: Vec<String>,
        tolerance: Micros,
    ) -> Result<Self> {
        for (i, c) in classes.iter().enumerate() {
            if classes[..i].contains(c) {
                return Err(Error::Validation(format!("duplicate class {c:?}")));
            }
        }
        let labels = samples
            .iter()
            .enumerate()
            .map(|(i, s)| {
                classes.iter().position(|c| c == s.label()).ok_or_else(|| Error::Record {
                    index: i,
                    message: format!("label {:?} is not a declared class", s.label()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = samples.first() {
            let nominal = first.duration;
            if let Some(i) = samples
                .iter()
                .position(|s| s.duration.abs_diff(nominal) > tolerance)
            {
                return Err(Error::Record {
                    index: i,
                    message: format!(
                        "duration {} us differs from nominal {nominal} us",
                        samples[i].duration
                    ),
                });
            }
        }
        Ok(Dataset {
            samples,
            classes,
            labels,
        })
    }

    /// Builds a dataset whose class list is the labels in first-seen order.
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        let mut classes: Vec<String> = Vec::new();
        for s in &samples {
            if !classes.iter().any(|c| c == s.label()) {
                classes.push(s.label().to_string());
            }
        }
        Dataset::new(samples, classes)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Class index of every sample, parallel to [`Dataset::samples`].
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples at `indices`, keeping the full class list.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: indices.iter().map(|&i| self.samples[i].clone()).collect(),
            classes: self.classes.clone(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_train_rejects_repeats() {
        assert!(SpikeTrain::new(0, vec![1, 2, 3]).is_ok());
        assert!(SpikeTrain::new(0, vec![1, 1]).is_err());
        assert!(SpikeTrain::new(0, vec![5, 2]).is_err());
        assert!(SpikeTrain::new(0, vec![]).is_ok());
    }

    #[test]
    fn sample_requires_49_trains() {
        let err = Sample::from_spike_lists(vec![vec![]; 48], 1000, "a").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(Sample::from_spike_lists(vec![vec![]; 49], 1000, "a").is_ok());
    }

    #[test]
    fn sample_spikes_before_duration() {
        let mut lists = vec![vec![]; 49];
        lists[3] = vec![999];
        assert!(Sample::from_spike_lists(lists.clone(), 1000, "a").is_ok());
        lists[3] = vec![1000];
        assert!(Sample::from_spike_lists(lists, 1000, "a").is_err());
    }

    #[test]
    fn pixel_event_bounds() {
        assert!(PixelEvent::new(0, 239, 179, Polarity::On).is_ok());
        assert!(PixelEvent::new(0, 240, 0, Polarity::On).is_err());
        assert!(PixelEvent::new(0, 0, 180, Polarity::Off).is_err());
    }

    #[test]
    fn dataset_rejects_unknown_label() {
        let s = Sample::empty(1000, "b");
        let err = Dataset::new(vec![s], vec!["a".into()]).unwrap_err();
        assert!(matches!(err, Error::Record { index: 0, .. }));
    }

    #[test]
    fn dataset_duration_tolerance() {
        let a = Sample::empty(4_000_000, "a");
        let b = Sample::empty(4_000_000 + DEFAULT_POOLING_WINDOW_US, "a");
        let c = Sample::empty(4_000_000 + DEFAULT_POOLING_WINDOW_US + 1, "a");
        assert!(Dataset::from_samples(vec![a.clone(), b]).is_ok());
        assert!(Dataset::from_samples(vec![a, c]).is_err());
    }

    #[test]
    fn first_unsorted_index() {
        let e = |t| PixelEvent::new(t, 0, 0, Polarity::On).unwrap();
        assert_eq!(first_unsorted(&[e(1), e(1), e(2)]), None);
        assert_eq!(first_unsorted(&[e(1), e(3), e(2)]), Some(2));
    }
}
