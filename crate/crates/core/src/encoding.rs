//! The four spike codings: intensive, spatial, temporal and spatiotemporal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_model::{Micros, Sample, TAXEL_COUNT};

/// Step of the temporal rolling window.
pub const TEMPORAL_STEP_MS: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EncodedSample {
    /// Average spike count per taxel.
    Intensive { value: f64 },
    /// Spike count of every taxel.
    Spatial { counts: Vec<f64> },
    /// Spikes per taxel in a window of `delta_t_ms`, rolled in 1 ms steps.
    Temporal { delta_t_ms: u32, series: Vec<f64> },
    /// Spike trains tagged with the exponential kernel constant. The
    /// convolution is evaluated analytically by the metrics.
    Spatiotemporal { tau_s: f64, sample: Sample },
}

impl EncodedSample {
    pub fn kind(&self) -> &'static str {
        match self {
            EncodedSample::Intensive { .. } => "intensive",
            EncodedSample::Spatial { .. } => "spatial",
            EncodedSample::Temporal { .. } => "temporal",
            EncodedSample::Spatiotemporal { .. } => "spatiotemporal",
        }
    }
}

/// Which coding to apply, with its parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EncoderSpec {
    Intensive,
    Spatial,
    Temporal { delta_t_ms: u32 },
    Spatiotemporal { tau_ms: f64 },
}

impl EncoderSpec {
    pub fn encode(&self, sample: &Sample) -> Result<EncodedSample> {
        match *self {
            EncoderSpec::Intensive => Ok(encode_intensive(sample)),
            EncoderSpec::Spatial => Ok(encode_spatial(sample)),
            EncoderSpec::Temporal { delta_t_ms } => encode_temporal(sample, delta_t_ms),
            EncoderSpec::Spatiotemporal { tau_ms } => encode_spatiotemporal(sample, tau_ms / 1e3),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EncoderSpec::Intensive => "intensive",
            EncoderSpec::Spatial => "spatial",
            EncoderSpec::Temporal { .. } => "temporal",
            EncoderSpec::Spatiotemporal { .. } => "spatiotemporal",
        }
    }
}

pub fn encode_intensive(sample: &Sample) -> EncodedSample {
    EncodedSample::Intensive {
        value: sample.total_spikes() as f64 / TAXEL_COUNT as f64,
    }
}

pub fn encode_spatial(sample: &Sample) -> EncodedSample {
    EncodedSample::Spatial {
        counts: sample.spike_counts().into_iter().map(|c| c as f64).collect(),
    }
}

/// Sample duration in whole milliseconds, rounded up.
pub fn duration_ms(sample: &Sample) -> u32 {
    sample.duration().div_ceil(1000) as u32
}

/// `series[k]` is the number of spikes (all taxels) in `[k, k + delta_t)` ms,
/// divided by the taxel count, for `k = 0 ..= duration - delta_t`.
pub fn encode_temporal(sample: &Sample, delta_t_ms: u32) -> Result<EncodedSample> {
    let total_ms = duration_ms(sample);
    if delta_t_ms < 1 || delta_t_ms > total_ms.max(1) {
        return Err(Error::Parameter(format!(
            "delta_t {delta_t_ms} ms outside [1, {total_ms}] ms"
        )));
    }
    let bins = total_ms.max(1) as usize;
    let mut hist = vec![0u32; bins];
    for train in sample.trains() {
        for &t in train.spikes() {
            hist[(t / 1000) as usize] += 1;
        }
    }
    let width = delta_t_ms as usize;
    let len = bins - width + 1;
    let mut series = Vec::with_capacity(len);
    let mut running: u32 = hist[..width].iter().sum();
    series.push(running as f64 / TAXEL_COUNT as f64);
    for k in 1..len {
        running = running + hist[k + width - 1] - hist[k - 1];
        series.push(running as f64 / TAXEL_COUNT as f64);
    }
    Ok(EncodedSample::Temporal { delta_t_ms, series })
}

pub fn encode_spatiotemporal(sample: &Sample, tau_s: f64) -> Result<EncodedSample> {
    if !(tau_s.is_finite() && tau_s > 0.0) {
        return Err(Error::Parameter(format!("tau must be positive, got {tau_s} s")));
    }
    Ok(EncodedSample::Spatiotemporal {
        tau_s,
        sample: sample.clone(),
    })
}

/// Causal exponential kernel `(1/tau) exp(-t/tau)` for `t >= 0`, in 1/s.
pub fn kernel(t_s: f64, tau_s: f64) -> f64 {
    if t_s < 0.0 {
        0.0
    } else {
        (-t_s / tau_s).exp() / tau_s
    }
}

/// Kernel-convolved train evaluated at `t_us`.
pub fn convolved(spikes: &[Micros], tau_s: f64, t_us: Micros) -> f64 {
    spikes
        .iter()
        .take_while(|&&s| s <= t_us)
        .map(|&s| kernel((t_us - s) as f64 * 1e-6, tau_s))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_with(taxel: usize, spikes: Vec<Micros>, duration: Micros) -> Sample {
        let mut lists = vec![vec![]; TAXEL_COUNT];
        lists[taxel] = spikes;
        Sample::from_spike_lists(lists, duration, "t").unwrap()
    }

    #[test]
    fn intensive_cases() {
        let empty = Sample::empty(1_000_000, "a");
        assert_eq!(encode_intensive(&empty), EncodedSample::Intensive { value: 0.0 });
        let one_each = Sample::from_spike_lists(vec![vec![10]; 49], 1_000, "a").unwrap();
        assert_eq!(encode_intensive(&one_each), EncodedSample::Intensive { value: 1.0 });
    }

    #[test]
    fn spatial_cases() {
        let empty = Sample::empty(1_000_000, "a");
        assert_eq!(
            encode_spatial(&empty),
            EncodedSample::Spatial {
                counts: vec![0.0; 49]
            }
        );
        let s = sample_with(10, vec![1, 2, 3], 1000);
        let EncodedSample::Spatial { counts } = encode_spatial(&s) else { panic!() };
        assert_eq!(counts.len(), 49);
        assert_eq!(counts[10], 3.0);
        assert_eq!(counts.iter().sum::<f64>(), 3.0);
    }

    #[test]
    fn temporal_single_spike_window() {
        let s = sample_with(0, vec![50_000], 100_000);
        let EncodedSample::Temporal { series, .. } = encode_temporal(&s, 10).unwrap() else {
            panic!()
        };
        assert_eq!(series.len(), 100 - 10 + 1);
        for (k, v) in series.iter().enumerate() {
            let expected = if (41..=50).contains(&k) { 1.0 / 49.0 } else { 0.0 };
            assert_eq!(*v, expected, "k = {k}");
        }
    }

    #[test]
    fn temporal_full_window_is_intensive() {
        let s = sample_with(3, vec![0, 999_999, 1_500_000], 2_000_000);
        let EncodedSample::Temporal { series, .. } = encode_temporal(&s, 2000).unwrap() else {
            panic!()
        };
        assert_eq!(series, vec![3.0 / 49.0]);
    }

    #[test]
    fn temporal_empty_and_range() {
        let s = Sample::empty(500_000, "a");
        let EncodedSample::Temporal { series, .. } = encode_temporal(&s, 100).unwrap() else {
            panic!()
        };
        assert!(series.iter().all(|&v| v == 0.0));
        assert!(encode_temporal(&s, 0).is_err());
        assert!(encode_temporal(&s, 501).is_err());
        assert!(encode_temporal(&s, 500).is_ok());
    }

    #[test]
    fn kernel_values() {
        let tau = 0.01;
        assert!((convolved(&[0], tau, 10_000) - (-1f64).exp() / tau).abs() < 1e-9);
        assert!((convolved(&[0], tau, 10_000) - 36.787_944_117_144_23).abs() < 1e-9);
        assert_eq!(convolved(&[5_000], tau, 4_999), 0.0);
        assert_eq!(kernel(-1e-9, tau), 0.0);
    }

    #[test]
    fn spatiotemporal_rejects_bad_tau() {
        let s = Sample::empty(10, "a");
        assert!(encode_spatiotemporal(&s, 0.0).is_err());
        assert!(encode_spatiotemporal(&s, -1.0).is_err());
        assert!(encode_spatiotemporal(&s, 0.076).is_ok());
    }

    #[test]
    fn encoded_json_is_tagged() {
        let json = serde_json::to_string(&EncodedSample::Intensive { value: 2.5 }).unwrap();
        assert_eq!(json, r#"{"kind":"intensive","value":2.5}"#);
    }

    fn arb_sample(max_ms: u64) -> impl Strategy<Value = Sample> {
        proptest::collection::vec(
            proptest::collection::btree_set(0..max_ms * 1000, 0..8),
            TAXEL_COUNT,
        )
        .prop_map(move |sets| {
            Sample::from_spike_lists(
                sets.into_iter().map(|s| s.into_iter().collect()).collect(),
                max_ms * 1000,
                "p",
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn intensive_is_mean_of_spatial(s in arb_sample(300)) {
            let EncodedSample::Intensive { value } = encode_intensive(&s) else { unreachable!() };
            let EncodedSample::Spatial { counts } = encode_spatial(&s) else { unreachable!() };
            prop_assert_eq!(value, counts.iter().sum::<f64>() / 49.0);
        }

        #[test]
        fn unit_window_sums_to_total(s in arb_sample(300)) {
            let EncodedSample::Temporal { series, .. } = encode_temporal(&s, 1).unwrap() else { unreachable!() };
            let sum: f64 = series.iter().sum();
            prop_assert!((sum - s.total_spikes() as f64 / 49.0).abs() < 1e-9);
        }

        #[test]
        fn temporal_translation_covariant(s in arb_sample(200), shift in 0u64..100) {
            let padded = 400u64;
            let lists: Vec<Vec<Micros>> = s.trains().iter().map(|t| t.spikes().to_vec()).collect();
            let base = Sample::from_spike_lists(lists.clone(), padded * 1000, "p").unwrap();
            let moved = Sample::from_spike_lists(
                lists.iter().map(|l| l.iter().map(|t| t + shift * 1000).collect()).collect(),
                padded * 1000,
                "p",
            ).unwrap();
            let dt = 20;
            let EncodedSample::Temporal { series: a, .. } = encode_temporal(&base, dt).unwrap() else { unreachable!() };
            let EncodedSample::Temporal { series: b, .. } = encode_temporal(&moved, dt).unwrap() else { unreachable!() };
            let shift = shift as usize;
            for k in 0..a.len() - shift {
                prop_assert_eq!(a[k], b[k + shift]);
            }
        }
    }
}
