//! Deterministic stand-in for the robot and sensor rig.
//!
//! Each of the 49 pins traces a horizontal line across a texture height
//! field while the tip slides at constant speed. The pin's displacement
//! follows the height field through a first-order membrane lag; every time
//! the accumulated displacement since the last burst reaches the deflection
//! threshold, the camera sees a burst of pixel events around the pin marker.
//! Narrow gaps between bumps are only partly penetrated by the membrane, so
//! coarser grids deflect the pins further and produce more activity.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event_model::{
    Dataset, Micros, PixelEvent, Polarity, Sample, SENSOR_HEIGHT, SENSOR_WIDTH, TAXEL_COUNT,
};
use crate::transduction::{fields_from_positions, transduce, TransducerConfig};

/// Simulation step.
pub const STEP_US: Micros = 1_000;
/// Lattice spacing of the pin layout in pixels.
pub const TAXEL_SPACING_PX: f64 = 12.5;
pub const IMAGE_CENTER: (f64, f64) = (120.0, 90.0);
/// Pixel jitter of burst events around the pin marker.
const BURST_JITTER_PX: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextureKind {
    Grid,
    Stochastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Roughness {
    pub amplitude_mm: f64,
    pub correlation_mm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextureSpec {
    pub name: String,
    pub kind: TextureKind,
    /// Bump diameter and gap for grids; 0 is a smooth surface.
    #[serde(default)]
    pub pitch_mm: f64,
    #[serde(default = "default_bump_height")]
    pub bump_height_mm: f64,
    #[serde(default)]
    pub roughness: Option<Roughness>,
}

fn default_bump_height() -> f64 {
    1.0
}

impl TextureSpec {
    pub fn grid(pitch_mm: f64) -> Self {
        TextureSpec {
            name: format!("grid_{pitch_mm:.1}mm"),
            kind: TextureKind::Grid,
            pitch_mm,
            bump_height_mm: 1.0,
            roughness: None,
        }
    }

    pub fn stochastic(name: impl Into<String>, amplitude_mm: f64, correlation_mm: f64) -> Self {
        TextureSpec {
            name: name.into(),
            kind: TextureKind::Stochastic,
            pitch_mm: 0.0,
            bump_height_mm: 1.0,
            roughness: Some(Roughness {
                amplitude_mm,
                correlation_mm,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pitch_mm.is_finite() && self.pitch_mm >= 0.0) {
            return Err(Error::Parameter(format!(
                "texture {:?}: pitch must be >= 0",
                self.name
            )));
        }
        if !(self.bump_height_mm.is_finite() && self.bump_height_mm >= 0.0) {
            return Err(Error::Parameter(format!(
                "texture {:?}: bump height must be >= 0",
                self.name
            )));
        }
        if self.kind == TextureKind::Stochastic {
            match self.roughness {
                Some(r) if r.amplitude_mm >= 0.0 && r.correlation_mm > 0.0 => {}
                _ => {
                    return Err(Error::Parameter(format!(
                        "texture {:?}: stochastic kind needs amplitude >= 0 and correlation > 0",
                        self.name
                    )))
                }
            }
        }
        Ok(())
    }
}

/// The eleven grids from smooth to 5 mm in 0.5 mm steps.
pub fn artificial_grid_set() -> Vec<TextureSpec> {
    (0..=10).map(|i| TextureSpec::grid(i as f64 * 0.5)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlideKinematics {
    pub speed_mm_s: f64,
    pub distance_mm: f64,
}

impl Default for SlideKinematics {
    fn default() -> Self {
        SlideKinematics {
            speed_mm_s: 15.0,
            distance_mm: 60.0,
        }
    }
}

impl SlideKinematics {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.speed_mm_s) && positive(self.distance_mm)) {
            return Err(Error::Parameter("speed and distance must be positive".into()));
        }
        Ok(())
    }

    pub fn duration_us(&self) -> Micros {
        (self.distance_mm / self.speed_mm_s * 1e6).round() as Micros
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorModel {
    /// Pin marker positions in the image, one per taxel.
    pub taxel_layout: Vec<(f64, f64)>,
    pub pixels_per_mm: f64,
    pub deflection_threshold_mm: f64,
    pub events_per_crossing: f64,
    /// Spurious events per second over the whole image.
    pub noise_rate_hz: f64,
    /// Seeds the fixed per-pin sensitivities of this sensor.
    pub rng_seed: u64,
    /// Curvature radius limiting how deep the membrane sinks into gaps.
    pub membrane_radius_mm: f64,
    /// Lateral reach of a bump: pins beside it deflect with a Gaussian
    /// falloff of this width.
    pub membrane_spread_mm: f64,
    /// Spatial lag of the membrane; the pin follows the surface with time
    /// constant `membrane_lag_mm / speed`.
    pub membrane_lag_mm: f64,
    /// Shear deflection at contact start.
    pub onset_deflection_mm: f64,
    /// Marker drift in the image per mm of pin deflection.
    pub marker_shift_px_per_mm: f64,
    /// Std. dev. of the run-to-run placement error of the texture.
    pub placement_jitter_mm: f64,
    /// Relative std. dev. of the run-to-run contact depth.
    pub pressure_jitter: f64,
    /// Half-width of the uniform per-pin sensitivity spread.
    pub pin_gain_spread: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            taxel_layout: layout_taxels(),
            pixels_per_mm: 4.0,
            deflection_threshold_mm: 0.2,
            events_per_crossing: 6.0,
            noise_rate_hz: 100.0,
            rng_seed: 0x5EED,
            membrane_radius_mm: 3.0,
            membrane_spread_mm: 1.0,
            membrane_lag_mm: 0.5,
            onset_deflection_mm: 0.5,
            marker_shift_px_per_mm: 1.0,
            placement_jitter_mm: 0.05,
            pressure_jitter: 0.15,
            pin_gain_spread: 0.2,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if self.taxel_layout.len() != TAXEL_COUNT {
            return Err(Error::Validation(format!(
                "sensor layout has {} pins, expected {TAXEL_COUNT}",
                self.taxel_layout.len()
            )));
        }
        let margin = 6.0;
        for (i, &(x, y)) in self.taxel_layout.iter().enumerate() {
            if x < margin
                || y < margin
                || x > SENSOR_WIDTH as f64 - 1.0 - margin
                || y > SENSOR_HEIGHT as f64 - 1.0 - margin
            {
                return Err(Error::Record {
                    index: i,
                    message: format!("pin ({x}, {y}) closer than {margin} px to the image edge"),
                });
            }
        }
        let positive = [
            ("pixels_per_mm", self.pixels_per_mm),
            ("deflection_threshold_mm", self.deflection_threshold_mm),
            ("membrane_radius_mm", self.membrane_radius_mm),
            ("membrane_lag_mm", self.membrane_lag_mm),
            ("membrane_spread_mm", self.membrane_spread_mm),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("events_per_crossing", self.events_per_crossing),
            ("noise_rate_hz", self.noise_rate_hz),
            ("onset_deflection_mm", self.onset_deflection_mm),
            ("placement_jitter_mm", self.placement_jitter_mm),
            ("pressure_jitter", self.pressure_jitter),
        ];
        for (name, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.pin_gain_spread) {
            return Err(Error::Parameter("pin_gain_spread must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Hexagonal pin layout: centre, rings 1 to 3 complete, and the twelve
/// non-corner, off-centre points of ring 4. Ordered by ring, then angle.
pub fn layout_taxels() -> Vec<(f64, f64)> {
    let s = TAXEL_SPACING_PX;
    let mut pts: Vec<(i32, f64, f64, f64)> = Vec::new();
    for q in -4i32..=4 {
        for r in -4i32..=4 {
            let ring = (q.abs() + r.abs() + (q + r).abs()) / 2;
            if ring > 4 {
                continue;
            }
            let x = s * (q as f64 + r as f64 / 2.0);
            let y = s * (3f64.sqrt() / 2.0) * r as f64;
            if ring == 4 {
                // |v|^2 / s^2 is 16 at corners, 12 mid-edge, 13 elsewhere
                let d2 = (x * x + y * y) / (s * s);
                if (d2 - 13.0).abs() > 1e-6 {
                    continue;
                }
            }
            let angle = y.atan2(x).rem_euclid(2.0 * PI);
            pts.push((ring, angle, x, y));
        }
    }
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.into_iter()
        .map(|(_, _, x, y)| (IMAGE_CENTER.0 + x, IMAGE_CENTER.1 + y))
        .collect()
}

/// Mixes a master seed with indices into an independent child seed.
pub fn child_seed(master: u64, texture_index: u64, run_index: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(splitmix(master) ^ texture_index) ^ run_index.rotate_left(32))
}

fn name_seed(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Height field as seen by the membrane, in mm, at texture coordinates (u, v).
enum Surface {
    Flat,
    Grid { pitch: f64, depth: f64, spread: f64 },
    Profile { origin: f64, step: f64, heights: Vec<f64> },
}

impl Surface {
    fn new(texture: &TextureSpec, sensor: &SensorModel, u_range: (f64, f64)) -> Surface {
        match texture.kind {
            TextureKind::Grid if texture.pitch_mm == 0.0 || texture.bump_height_mm == 0.0 => {
                Surface::Flat
            }
            TextureKind::Grid => {
                let p = texture.pitch_mm;
                // sag of a membrane of radius R spanning a gap of width p
                let sag = p * p / (8.0 * sensor.membrane_radius_mm);
                Surface::Grid {
                    pitch: p,
                    depth: sag.min(texture.bump_height_mm),
                    spread: sensor.membrane_spread_mm,
                }
            }
            TextureKind::Stochastic => {
                let r = texture.roughness.expect("validated");
                let step = 0.05;
                let sigma = r.correlation_mm / step;
                let half = (4.0 * sigma).ceil() as usize;
                let n = ((u_range.1 - u_range.0) / step).ceil() as usize + 1;
                let mut rng = ChaCha8Rng::seed_from_u64(name_seed(&texture.name));
                let normal = Normal::new(0.0, 1.0).unwrap();
                let white: Vec<f64> = (0..n + 2 * half).map(|_| normal.sample(&mut rng)).collect();
                let kernel: Vec<f64> = (0..=2 * half)
                    .map(|i| {
                        let d = i as f64 - half as f64;
                        (-0.5 * d * d / (sigma * sigma)).exp()
                    })
                    .collect();
                let mut heights: Vec<f64> = (0..n)
                    .map(|i| {
                        kernel
                            .iter()
                            .zip(&white[i..])
                            .map(|(k, w)| k * w)
                            .sum::<f64>()
                    })
                    .collect();
                let mean = heights.iter().sum::<f64>() / n as f64;
                let var = heights.iter().map(|h| (h - mean).powi(2)).sum::<f64>() / n as f64;
                let scale = if var > 0.0 { r.amplitude_mm / var.sqrt() } else { 0.0 };
                heights.iter_mut().for_each(|h| *h = (*h - mean) * scale);
                Surface::Profile {
                    origin: u_range.0,
                    step,
                    heights,
                }
            }
        }
    }

    fn height(&self, u: f64, v: f64) -> f64 {
        match self {
            Surface::Flat => 0.0,
            Surface::Grid {
                pitch,
                depth,
                spread,
            } => {
                // distance to the rim of the bump in this cell
                let cell = 2.0 * pitch;
                let du = u.rem_euclid(cell) - pitch;
                let dv = v.rem_euclid(cell) - pitch;
                let outside = (du * du + dv * dv).sqrt() - pitch / 2.0;
                if outside <= 0.0 {
                    *depth
                } else {
                    depth * (-0.5 * (outside / spread).powi(2)).exp()
                }
            }
            Surface::Profile {
                origin,
                step,
                heights,
            } => {
                let pos = ((u - origin) / step).clamp(0.0, (heights.len() - 1) as f64);
                let i = (pos.floor() as usize).min(heights.len() - 2);
                let f = pos - i as f64;
                heights[i] * (1.0 - f) + heights[i + 1] * f
            }
        }
    }
}

/// Renders one slide into a sorted pixel-event stream.
pub fn simulate_slide(
    texture: &TextureSpec,
    kinematics: &SlideKinematics,
    sensor: &SensorModel,
    seed: u64,
) -> Result<Vec<PixelEvent>> {
    texture.validate()?;
    kinematics.validate()?;
    sensor.validate()?;

    let duration = kinematics.duration_us();
    let steps = duration / STEP_US;
    let dt_s = STEP_US as f64 * 1e-6;
    let ppm = sensor.pixels_per_mm;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset_u = sensor.placement_jitter_mm * gaussian(&mut rng);
    let offset_v = sensor.placement_jitter_mm * gaussian(&mut rng);
    let pressure = (1.0 + sensor.pressure_jitter * gaussian(&mut rng)).max(0.0);

    let mut pin_rng = ChaCha8Rng::seed_from_u64(sensor.rng_seed);
    let spread = sensor.pin_gain_spread;
    let pin_gain: Vec<f64> = (0..TAXEL_COUNT)
        .map(|_| 1.0 + pin_rng.random_range(-1.0..=1.0) * spread)
        .collect();

    let span = (
        -(SENSOR_WIDTH as f64) / ppm - 1.0,
        kinematics.distance_mm + SENSOR_WIDTH as f64 / ppm + 1.0,
    );
    let surface = Surface::new(texture, sensor, span);
    let alpha = 1.0 - (-dt_s * kinematics.speed_mm_s / sensor.membrane_lag_mm).exp();
    let burst = (sensor.events_per_crossing > 0.0)
        .then(|| Poisson::new(sensor.events_per_crossing).expect("positive mean"));

    let mut events = Vec::new();
    for (pin, &(px, py)) in sensor.taxel_layout.iter().enumerate() {
        let u0 = (px - IMAGE_CENTER.0) / ppm + offset_u;
        let v = (py - IMAGE_CENTER.1) / ppm + offset_v;
        let gain = pin_gain[pin] * pressure;
        let mut z = 0.0;
        let mut accumulated = 0.0;
        for k in 0..steps {
            let travelled = kinematics.speed_mm_s * (k + 1) as f64 * dt_s;
            let target = sensor.onset_deflection_mm + gain * surface.height(u0 + travelled, v);
            let dz = alpha * (target - z);
            z += dz;
            accumulated += dz.abs();
            let polarity = if dz >= 0.0 { Polarity::On } else { Polarity::Off };
            while accumulated >= sensor.deflection_threshold_mm {
                accumulated -= sensor.deflection_threshold_mm;
                let Some(burst) = &burst else { continue };
                let n = burst.sample(&mut rng) as u64;
                let mx = px + sensor.marker_shift_px_per_mm * z;
                for _ in 0..n {
                    let x = mx.round() as i32 + rng.random_range(-BURST_JITTER_PX..=BURST_JITTER_PX);
                    let y = py.round() as i32 + rng.random_range(-BURST_JITTER_PX..=BURST_JITTER_PX);
                    let t = k * STEP_US + rng.random_range(0..STEP_US);
                    if (0..SENSOR_WIDTH as i32).contains(&x) && (0..SENSOR_HEIGHT as i32).contains(&y) {
                        events.push(PixelEvent {
                            t,
                            x: x as u16,
                            y: y as u16,
                            polarity,
                        });
                    }
                }
            }
        }
    }

    if sensor.noise_rate_hz > 0.0 {
        let mean = sensor.noise_rate_hz * duration as f64 * 1e-6;
        let n = Poisson::new(mean).expect("positive mean").sample(&mut rng) as u64;
        for _ in 0..n {
            events.push(PixelEvent {
                t: rng.random_range(0..duration),
                x: rng.random_range(0..SENSOR_WIDTH),
                y: rng.random_range(0..SENSOR_HEIGHT),
                polarity: if rng.random_bool(0.5) { Polarity::On } else { Polarity::Off },
            });
        }
    }

    events.sort_unstable();
    Ok(events)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    Normal::new(0.0, 1.0).unwrap().sample(rng)
}

/// Simulates and transduces every (texture, run) pair into a labelled dataset.
pub fn generate_dataset(
    textures: &[TextureSpec],
    runs_per_texture: usize,
    kinematics: &SlideKinematics,
    sensor: &SensorModel,
    transducer: &TransducerConfig,
    master_seed: u64,
) -> Result<Dataset> {
    if textures.is_empty() {
        return Err(Error::Parameter("texture list is empty".into()));
    }
    let fields = fields_from_positions(&sensor.taxel_layout, transducer.rf_diameter)?;
    let duration = kinematics.duration_us();
    let jobs: Vec<(usize, usize)> = (0..textures.len())
        .flat_map(|ti| (0..runs_per_texture).map(move |run| (ti, run)))
        .collect();
    let samples = jobs
        .par_iter()
        .map(|&(ti, run)| {
            let seed = child_seed(master_seed, ti as u64, run as u64);
            let events = simulate_slide(&textures[ti], kinematics, sensor, seed)?;
            Ok(transduce(&events, &fields, transducer, duration)?.with_label(&textures[ti].name))
        })
        .collect::<Result<Vec<Sample>>>()?;
    Dataset::new(samples, textures.iter().map(|t| t.name.clone()).collect())
}

/// One recorded slide: the raw stream and its transduced sample.
#[derive(Clone, Debug)]
pub struct Recording {
    pub texture_index: usize,
    pub run: usize,
    pub seed: u64,
    pub events: Vec<PixelEvent>,
    pub sample: Sample,
}

/// Like [`generate_dataset`] but keeps the pixel-event streams. Recordings
/// come back texture-major, run-minor.
pub fn record_dataset(
    textures: &[TextureSpec],
    runs_per_texture: usize,
    kinematics: &SlideKinematics,
    sensor: &SensorModel,
    transducer: &TransducerConfig,
    master_seed: u64,
) -> Result<(Vec<Recording>, Dataset)> {
    if textures.is_empty() {
        return Err(Error::Parameter("texture list is empty".into()));
    }
    let fields = fields_from_positions(&sensor.taxel_layout, transducer.rf_diameter)?;
    let duration = kinematics.duration_us();
    let jobs: Vec<(usize, usize)> = (0..textures.len())
        .flat_map(|ti| (0..runs_per_texture).map(move |run| (ti, run)))
        .collect();
    let recordings = jobs
        .par_iter()
        .map(|&(ti, run)| {
            let seed = child_seed(master_seed, ti as u64, run as u64);
            let events = simulate_slide(&textures[ti], kinematics, sensor, seed)?;
            let sample =
                transduce(&events, &fields, transducer, duration)?.with_label(&textures[ti].name);
            Ok(Recording {
                texture_index: ti,
                run,
                seed,
                events,
                sample,
            })
        })
        .collect::<Result<Vec<Recording>>>()?;
    let dataset = Dataset::new(
        recordings.iter().map(|r| r.sample.clone()).collect(),
        textures.iter().map(|t| t.name.clone()).collect(),
    )?;
    Ok((recordings, dataset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet_sensor() -> SensorModel {
        SensorModel {
            noise_rate_hz: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn layout_has_49_points_centered() {
        let pts = layout_taxels();
        assert_eq!(pts.len(), 49);
        assert_eq!(pts[0], (120.0, 90.0));
    }

    #[test]
    fn layout_min_separation() {
        let pts = layout_taxels();
        let mut min = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt();
                min = min.min(d);
            }
        }
        assert!(min >= 12.0, "min separation {min}");
        assert!(SensorModel::default().validate().is_ok());
    }

    #[test]
    fn smooth_texture_only_onset() {
        let ev = simulate_slide(
            &TextureSpec::grid(0.0),
            &SlideKinematics::default(),
            &quiet_sensor(),
            1,
        )
        .unwrap();
        assert!(!ev.is_empty());
        let last = ev.last().unwrap().t;
        assert!(last < 200_000, "smooth texture kept firing until {last} us");
    }

    #[test]
    fn deterministic_per_seed() {
        let tex = TextureSpec::grid(2.5);
        let k = SlideKinematics::default();
        let s = SensorModel::default();
        let a = simulate_slide(&tex, &k, &s, 9).unwrap();
        let b = simulate_slide(&tex, &k, &s, 9).unwrap();
        let c = simulate_slide(&tex, &k, &s, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn events_within_duration_and_sorted() {
        let k = SlideKinematics::default();
        let ev = simulate_slide(&TextureSpec::grid(5.0), &k, &SensorModel::default(), 3).unwrap();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        assert!(ev.iter().all(|e| e.t < k.duration_us() && e.in_bounds()));
    }

    #[test]
    fn stochastic_profile_is_named_and_stable() {
        let tex = TextureSpec::stochastic("tweed", 0.4, 0.8);
        let k = SlideKinematics::default();
        let a = simulate_slide(&tex, &k, &quiet_sensor(), 4).unwrap();
        let b = simulate_slide(&tex, &k, &quiet_sensor(), 4).unwrap();
        assert_eq!(a, b);
        assert!(a.len() > 100);
    }

    #[test]
    fn invalid_specs_rejected() {
        let k = SlideKinematics::default();
        let s = SensorModel::default();
        assert!(simulate_slide(&TextureSpec::grid(-1.0), &k, &s, 0).is_err());
        let bad = SlideKinematics {
            speed_mm_s: 0.0,
            ..k
        };
        assert!(simulate_slide(&TextureSpec::grid(1.0), &bad, &s, 0).is_err());
        let mut bad = s.clone();
        bad.taxel_layout.pop();
        assert!(simulate_slide(&TextureSpec::grid(1.0), &k, &bad, 0).is_err());
        let mut bad = s;
        bad.taxel_layout[3] = (2.0, 2.0);
        assert!(simulate_slide(&TextureSpec::grid(1.0), &k, &bad, 0).is_err());
        let mut tex = TextureSpec::stochastic("x", 0.1, 1.0);
        tex.roughness = None;
        assert!(tex.validate().is_err());
    }

    #[test]
    fn dataset_cardinality_and_determinism() {
        let textures = vec![TextureSpec::grid(0.0), TextureSpec::grid(5.0)];
        let k = SlideKinematics::default();
        let s = SensorModel::default();
        let t = TransducerConfig::default();
        let a = generate_dataset(&textures, 3, &k, &s, &t, 42).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a.classes(), &["grid_0.0mm", "grid_5.0mm"]);
        assert_eq!(a.labels(), &[0, 0, 0, 1, 1, 1]);
        let b = generate_dataset(&textures, 3, &k, &s, &t, 42).unwrap();
        assert_eq!(a, b);
        assert!(generate_dataset(&[], 3, &k, &s, &t, 42).is_err());
    }

    #[test]
    fn child_seeds_distinct() {
        let mut seeds: Vec<u64> = (0..11)
            .flat_map(|t| (0..20).map(move |r| child_seed(7, t, r)))
            .collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 220);
    }
}
