//! Pixel events to taxel spike trains.
//!
//! Each 20 ms window is denoised, pooled per receptive field into taxel
//! events, and then the fields drift toward what they saw.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_model::{
    first_unsorted, Micros, PixelEvent, Sample, SpikeTrain, TaxelEvent, SENSOR_HEIGHT,
    SENSOR_WIDTH, TAXEL_COUNT,
};

/// Circular image region attributed to one taxel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReceptiveField {
    pub taxel_id: usize,
    pub center: (f64, f64),
    pub diameter: f64,
}

impl ReceptiveField {
    pub fn new(taxel_id: usize, center: (f64, f64), diameter: f64) -> Result<Self> {
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::Parameter(format!(
                "receptive field diameter must be positive, got {diameter}"
            )));
        }
        let (x, y) = center;
        if !(0.0..SENSOR_WIDTH as f64).contains(&x) || !(0.0..SENSOR_HEIGHT as f64).contains(&y) {
            return Err(Error::Validation(format!(
                "receptive field {taxel_id} centre ({x}, {y}) outside the image"
            )));
        }
        Ok(ReceptiveField {
            taxel_id,
            center,
            diameter,
        })
    }

    fn distance_sq(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center.0;
        let dy = y - self.center.1;
        dx * dx + dy * dy
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let r = self.diameter / 2.0;
        self.distance_sq(x, y) <= r * r
    }
}

/// One field per position, taxel ids assigned in order.
pub fn fields_from_positions(positions: &[(f64, f64)], diameter: f64) -> Result<Vec<ReceptiveField>> {
    positions
        .iter()
        .enumerate()
        .map(|(id, &c)| ReceptiveField::new(id, c, diameter))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransducerConfig {
    pub noise_window_us: Micros,
    /// Chebyshev radius in pixels.
    pub neighborhood_radius: u16,
    pub pooling_window_us: Micros,
    pub rf_diameter: f64,
    pub rf_update_gain: f64,
}

impl Default for TransducerConfig {
    fn default() -> Self {
        TransducerConfig {
            noise_window_us: 5_000,
            neighborhood_radius: 1,
            pooling_window_us: 20_000,
            rf_diameter: 6.0,
            rf_update_gain: 0.5,
        }
    }
}

impl TransducerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.noise_window_us == 0 || self.pooling_window_us == 0 {
            return Err(Error::Parameter("transducer windows must be positive".into()));
        }
        if !(self.rf_diameter.is_finite() && self.rf_diameter > 0.0) {
            return Err(Error::Parameter("rf_diameter must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.rf_update_gain) {
            return Err(Error::Parameter(format!(
                "rf_update_gain {} outside [0, 1]",
                self.rf_update_gain
            )));
        }
        Ok(())
    }
}

/// Field owning pixel (x, y): nearest centre among the fields containing
/// it, lowest taxel id on equal distance.
pub fn assign_field(fields: &[ReceptiveField], x: u16, y: u16) -> Option<usize> {
    let (x, y) = (x as f64, y as f64);
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, f) in fields.iter().enumerate() {
        if !f.contains(x, y) {
            continue;
        }
        let d = f.distance_sq(x, y);
        let better = match best {
            None => true,
            Some((bd, bid, _)) => d < bd || (d == bd && f.taxel_id < bid),
        };
        if better {
            best = Some((d, f.taxel_id, i));
        }
    }
    best.map(|(_, _, i)| i)
}

/// Keeps events that fall inside some receptive field and have at least one
/// other in-field event within the spatiotemporal neighbourhood.
///
/// Neighbours are drawn from in-field events only, which makes the filter
/// idempotent.
pub fn filter_noise(
    events: &[PixelEvent],
    fields: &[ReceptiveField],
    config: &TransducerConfig,
) -> Vec<PixelEvent> {
    let candidates: Vec<&PixelEvent> = events
        .iter()
        .filter(|e| assign_field(fields, e.x, e.y).is_some())
        .collect();
    let window = config.noise_window_us;
    let radius = config.neighborhood_radius;
    let is_neighbour = |a: &PixelEvent, b: &PixelEvent| {
        a.x.abs_diff(b.x) <= radius && a.y.abs_diff(b.y) <= radius
    };

    let mut kept = Vec::with_capacity(candidates.len());
    for (i, ev) in candidates.iter().enumerate() {
        let before = candidates[..i]
            .iter()
            .rev()
            .take_while(|o| ev.t.abs_diff(o.t) <= window)
            .any(|o| is_neighbour(ev, o));
        let found = before
            || candidates[i + 1..]
                .iter()
                .take_while(|o| o.t.abs_diff(ev.t) <= window)
                .any(|o| is_neighbour(ev, o));
        if found {
            kept.push(**ev);
        }
    }
    kept
}

/// Groups events of one pooling window by receptive field. Output is ordered
/// by taxel id.
fn pool_window(events: &[PixelEvent], fields: &[ReceptiveField]) -> Result<Vec<TaxelEvent>> {
    struct Acc {
        count: usize,
        sx: f64,
        sy: f64,
        st: u128,
    }
    let mut groups: Vec<Option<Acc>> = (0..fields.len()).map(|_| None).collect();
    for ev in events {
        let i = assign_field(fields, ev.x, ev.y).ok_or_else(|| {
            Error::Internal(format!(
                "event at ({}, {}) t={} lies in no receptive field",
                ev.x, ev.y, ev.t
            ))
        })?;
        let acc = groups[i].get_or_insert(Acc {
            count: 0,
            sx: 0.0,
            sy: 0.0,
            st: 0,
        });
        acc.count += 1;
        acc.sx += ev.x as f64;
        acc.sy += ev.y as f64;
        acc.st += ev.t as u128;
    }
    let mut out: Vec<TaxelEvent> = groups
        .into_iter()
        .enumerate()
        .filter_map(|(i, g)| {
            g.map(|a| {
                let n = a.count as u128;
                TaxelEvent {
                    taxel_id: fields[i].taxel_id,
                    count: a.count,
                    centroid: (a.sx / a.count as f64, a.sy / a.count as f64),
                    t: ((a.st + n / 2) / n) as Micros,
                }
            })
        })
        .collect();
    out.sort_by_key(|e| e.taxel_id);
    Ok(out)
}

/// Pools filtered events over tumbling windows aligned to t = 0.
pub fn pool_events(
    events: &[PixelEvent],
    fields: &[ReceptiveField],
    config: &TransducerConfig,
) -> Result<Vec<TaxelEvent>> {
    if let Some(i) = first_unsorted(events) {
        return Err(Error::Precondition(format!("events unsorted at {i}")));
    }
    let mut out = Vec::new();
    for (_, range) in windows(events, config.pooling_window_us) {
        out.extend(pool_window(&events[range], fields)?);
    }
    Ok(out)
}

/// Non-empty pooling windows as (window index, event index range).
fn windows(
    events: &[PixelEvent],
    width: Micros,
) -> impl Iterator<Item = (Micros, std::ops::Range<usize>)> + '_ {
    let mut start = 0;
    std::iter::from_fn(move || {
        if start >= events.len() {
            return None;
        }
        let w = events[start].t / width;
        let len = events[start..]
            .iter()
            .take_while(|e| e.t / width == w)
            .count();
        let range = start..start + len;
        start += len;
        Some((w, range))
    })
}

/// Shifts each field with an event towards that event's centroid.
pub fn update_positions(
    fields: &[ReceptiveField],
    taxel_events: &[TaxelEvent],
    config: &TransducerConfig,
) -> Vec<ReceptiveField> {
    let gain = config.rf_update_gain;
    let mut out = fields.to_vec();
    for te in taxel_events {
        if let Some(f) = out.iter_mut().find(|f| f.taxel_id == te.taxel_id) {
            f.center.0 += gain * (te.centroid.0 - f.center.0);
            f.center.1 += gain * (te.centroid.1 - f.center.1);
        }
    }
    out
}

/// Full pipeline: per pooling window, filter with the current fields, pool,
/// emit one spike per taxel event, then re-centre the fields.
pub fn transduce(
    events: &[PixelEvent],
    initial_fields: &[ReceptiveField],
    config: &TransducerConfig,
    duration: Micros,
) -> Result<Sample> {
    config.validate()?;
    if initial_fields.len() != TAXEL_COUNT {
        return Err(Error::Validation(format!(
            "expected {TAXEL_COUNT} receptive fields, got {}",
            initial_fields.len()
        )));
    }
    if let Some(i) = first_unsorted(events) {
        return Err(Error::Precondition(format!("events unsorted at {i}")));
    }

    let width = config.pooling_window_us;
    let margin = config.noise_window_us;
    let mut fields = initial_fields.to_vec();
    let mut spikes: Vec<Vec<Micros>> = vec![Vec::new(); TAXEL_COUNT];

    for (w, range) in windows(events, width) {
        let lo_t = (w * width).saturating_sub(margin);
        let hi_t = (w + 1) * width + margin;
        let lo = events.partition_point(|e| e.t < lo_t);
        let hi = events.partition_point(|e| e.t < hi_t);
        let filtered: Vec<PixelEvent> = filter_noise(&events[lo..hi], &fields, config)
            .into_iter()
            .filter(|e| e.t / width == w)
            .collect();
        debug_assert!(range.start >= lo && range.end <= hi);

        let pooled = pool_window(&filtered, &fields)?;
        for te in &pooled {
            let train = &mut spikes[te.taxel_id];
            let t = match train.last() {
                Some(&last) if te.t <= last => last + 1,
                _ => te.t,
            };
            train.push(t);
        }
        fields = update_positions(&fields, &pooled, config);
    }

    let trains = spikes
        .into_iter()
        .enumerate()
        .map(|(n, s)| SpikeTrain::new(n, s))
        .collect::<Result<Vec<_>>>()?;
    Sample::new(trains, duration, "")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::Polarity;

    fn ev(t: Micros, x: u16, y: u16) -> PixelEvent {
        PixelEvent {
            t,
            x,
            y,
            polarity: Polarity::On,
        }
    }

    fn field(id: usize, x: f64, y: f64) -> ReceptiveField {
        ReceptiveField::new(id, (x, y), 6.0).unwrap()
    }

    fn grid_fields() -> Vec<ReceptiveField> {
        (0..TAXEL_COUNT)
            .map(|i| field(i, 20.0 + 25.0 * (i % 7) as f64, 20.0 + 20.0 * (i / 7) as f64))
            .collect()
    }

    #[test]
    fn isolated_event_removed() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        assert!(filter_noise(&[ev(0, 10, 10)], &fields, &cfg).is_empty());
    }

    #[test]
    fn adjacent_pair_kept() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        let events = [ev(0, 10, 10), ev(1_000, 11, 10)];
        assert_eq!(filter_noise(&events, &fields, &cfg), events.to_vec());
    }

    #[test]
    fn distant_pair_removed() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0), field(1, 30.0, 10.0)];
        let events = [ev(0, 10, 10), ev(1_000, 30, 10)];
        assert!(filter_noise(&events, &fields, &cfg).is_empty());
    }

    #[test]
    fn temporal_window_is_inclusive() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        let events = [ev(0, 10, 10), ev(5_000, 10, 10)];
        assert_eq!(filter_noise(&events, &fields, &cfg).len(), 2);
        let events = [ev(0, 10, 10), ev(5_001, 10, 10)];
        assert!(filter_noise(&events, &fields, &cfg).is_empty());
    }

    #[test]
    fn out_of_field_neighbour_does_not_count() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        // (13, 10) is on the rim, (14, 10) just outside
        let events = [ev(0, 13, 10), ev(100, 14, 10)];
        assert!(filter_noise(&events, &fields, &cfg).is_empty());
    }

    #[test]
    fn pool_mean_timing() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        let events = [ev(2_000, 9, 10), ev(4_000, 10, 11), ev(6_000, 11, 12)];
        let pooled = pool_events(&events, &fields, &cfg).unwrap();
        assert_eq!(pooled.len(), 1);
        assert_eq!(pooled[0].count, 3);
        assert_eq!(pooled[0].t, 4_000);
        assert!((pooled[0].centroid.0 - 10.0).abs() < 1e-12);
        assert!((pooled[0].centroid.1 - 11.0).abs() < 1e-12);
    }

    #[test]
    fn pool_groups_by_field() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0), field(1, 30.0, 10.0)];
        let events = [ev(1_000, 10, 10), ev(2_000, 30, 10), ev(3_000, 11, 10)];
        let pooled = pool_events(&events, &fields, &cfg).unwrap();
        assert_eq!(pooled.len(), 2);
        assert_eq!((pooled[0].taxel_id, pooled[0].count), (0, 2));
        assert_eq!((pooled[1].taxel_id, pooled[1].count), (1, 1));
    }

    #[test]
    fn pool_separate_windows() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        let events = [ev(19_999, 10, 10), ev(20_000, 10, 10)];
        let pooled = pool_events(&events, &fields, &cfg).unwrap();
        assert_eq!(pooled.len(), 2);
    }

    #[test]
    fn pool_empty_and_outside() {
        let cfg = TransducerConfig::default();
        let fields = vec![field(0, 10.0, 10.0)];
        assert!(pool_events(&[], &fields, &cfg).unwrap().is_empty());
        assert!(matches!(
            pool_events(&[ev(0, 50, 50)], &fields, &cfg),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn overlapping_fields_go_to_nearest_then_lowest_id() {
        let fields = vec![field(0, 10.0, 10.0), field(1, 12.0, 10.0)];
        assert_eq!(assign_field(&fields, 12, 10), Some(1));
        assert_eq!(assign_field(&fields, 11, 10), Some(0));
        assert_eq!(assign_field(&fields, 9, 10), Some(0));
    }

    fn update_with_gain(gain: f64) -> (f64, f64) {
        let cfg = TransducerConfig {
            rf_update_gain: gain,
            ..Default::default()
        };
        let fields = vec![field(0, 8.0, 10.0)];
        let te = TaxelEvent {
            taxel_id: 0,
            count: 1,
            centroid: (10.0, 10.0),
            t: 0,
        };
        let out = update_positions(&fields, &[te], &cfg);
        assert_eq!(out[0].diameter, 6.0);
        out[0].center
    }

    #[test]
    fn position_update_gain() {
        assert_eq!(update_with_gain(0.0), (8.0, 10.0));
        assert_eq!(update_with_gain(1.0), (10.0, 10.0));
        assert_eq!(update_with_gain(0.5), (9.0, 10.0));
    }

    #[test]
    fn transduce_empty_stream() {
        let s = transduce(&[], &grid_fields(), &TransducerConfig::default(), 1_000_000).unwrap();
        assert_eq!(s.trains().len(), TAXEL_COUNT);
        assert_eq!(s.total_spikes(), 0);
        assert_eq!(s.duration(), 1_000_000);
    }

    #[test]
    fn transduce_single_group() {
        let fields = grid_fields();
        let (cx, cy) = fields[7].center;
        let (cx, cy) = (cx as u16, cy as u16);
        let events = [ev(2_000, cx, cy), ev(4_000, cx + 1, cy), ev(6_000, cx, cy + 1)];
        let s = transduce(&events, &fields, &TransducerConfig::default(), 100_000).unwrap();
        assert_eq!(s.train(7).spikes(), &[4_000]);
        assert_eq!(s.total_spikes(), 1);
    }

    #[test]
    fn transduce_rejects_wrong_field_count() {
        let fields = grid_fields();
        assert!(transduce(&[], &fields[..10], &TransducerConfig::default(), 10).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = TransducerConfig {
            rf_update_gain: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TransducerConfig {
            pooling_window_us: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(ReceptiveField::new(0, (1.0, 1.0), 0.0).is_err());
        assert!(ReceptiveField::new(0, (240.0, 1.0), 6.0).is_err());
    }
}
