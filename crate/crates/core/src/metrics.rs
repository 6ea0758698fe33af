//! Distances between encoded samples.
//!
//! Van Rossum distances are computed in closed form. For the causal kernel
//! `h(t) = exp(-t/tau)/tau` the overlap of two kernels placed at `a` and `b`
//! integrates to `exp(-|a - b|/tau) / (2 tau)`, so every squared distance is
//! a finite sum of exponentials and no time grid is involved.

use serde::{Deserialize, Serialize};

use crate::encoding::EncodedSample;
use crate::error::{Error, Result};
use crate::event_model::{Micros, Sample};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricSpec {
    Euclidean,
    /// Multi-neuron Van Rossum; `cos_theta` 0 is the labelled-line code,
    /// 1 the summed-population code.
    VanRossum { tau_s: f64, cos_theta: f64 },
}

impl MetricSpec {
    pub fn validate(&self) -> Result<()> {
        if let MetricSpec::VanRossum { tau_s, cos_theta } = *self {
            check_tau(tau_s)?;
            check_cos_theta(cos_theta)?;
        }
        Ok(())
    }
}

fn check_tau(tau_s: f64) -> Result<()> {
    if !(tau_s.is_finite() && tau_s > 0.0) {
        return Err(Error::Parameter(format!("tau must be positive, got {tau_s} s")));
    }
    Ok(())
}

fn check_cos_theta(c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Parameter(format!("cos_theta {c} outside [0, 1]")));
    }
    Ok(())
}

/// l2 distance between two intensive, spatial or temporal codes. Temporal
/// series of different lengths are zero-padded.
pub fn euclidean(a: &EncodedSample, b: &EncodedSample) -> Result<f64> {
    use EncodedSample::*;
    let (x, y): (&[f64], &[f64]) = match (a, b) {
        (Intensive { value: x }, Intensive { value: y }) => {
            return Ok((x - y).abs());
        }
        (Spatial { counts: x }, Spatial { counts: y }) => (x, y),
        (Temporal { series: x, .. }, Temporal { series: y, .. }) => (x, y),
        _ => {
            return Err(Error::Type(format!(
                "euclidean distance between {} and {} codes",
                a.kind(),
                b.kind()
            )))
        }
    };
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    let sq: f64 = long
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let d = l - short.get(i).copied().unwrap_or(0.0);
            d * d
        })
        .sum();
    Ok(sq.sqrt())
}

/// `<u, v> = (1 / 2tau) * sum_ij exp(-|u_i - v_j| / tau)`, the L2 inner
/// product of the two kernel-smoothed trains. Direct double sum.
pub fn kernel_inner_product(u: &[Micros], v: &[Micros], tau_s: f64) -> f64 {
    let tau_us = tau_s * 1e6;
    let sum: f64 = u
        .iter()
        .map(|&a| {
            v.iter()
                .map(|&b| (-(a.abs_diff(b) as f64) / tau_us).exp())
                .sum::<f64>()
        })
        .sum();
    sum / (2.0 * tau_s)
}

/// Single-neuron Van Rossum distance, in sqrt(1/s).
pub fn van_rossum_single(u: &[Micros], v: &[Micros], tau_s: f64) -> Result<f64> {
    check_tau(tau_s)?;
    let sq = kernel_inner_product(u, u, tau_s) + kernel_inner_product(v, v, tau_s)
        - 2.0 * kernel_inner_product(u, v, tau_s);
    Ok(sq.max(0.0).sqrt())
}

/// Squared norm of the smoothed difference `f_a - f_b` for two sorted
/// trains, in one linear pass. Walking the merged times in order, the
/// running sum `s_j = sum_{i<j} w_i exp(-(t_j - t_i)/tau)` decays by the gap
/// between consecutive spikes.
fn difference_norm_sq(a: &[Micros], b: &[Micros], tau_s: f64) -> f64 {
    let tau_us = tau_s * 1e6;
    let (mut i, mut j) = (0, 0);
    let mut running = 0.0;
    let mut last: Option<Micros> = None;
    let mut total = 0.0;
    while i < a.len() || j < b.len() {
        let (t, w) = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            (a[i - 1], 1.0)
        } else {
            j += 1;
            (b[j - 1], -1.0)
        };
        if let Some(prev) = last {
            running *= (-((t - prev) as f64) / tau_us).exp();
        }
        total += w * w + 2.0 * w * running;
        running += w;
        last = Some(t);
    }
    total / (2.0 * tau_s)
}

/// A sample with its superimposed (all-taxel) train precomputed.
#[derive(Clone, Debug)]
pub struct PopulationTrains<'a> {
    sample: &'a Sample,
    merged: Vec<Micros>,
}

impl<'a> PopulationTrains<'a> {
    pub fn new(sample: &'a Sample) -> Self {
        let mut merged: Vec<Micros> = sample
            .trains()
            .iter()
            .flat_map(|t| t.spikes().iter().copied())
            .collect();
        merged.sort_unstable();
        PopulationTrains { sample, merged }
    }

    pub fn merged(&self) -> &[Micros] {
        &self.merged
    }
}

/// Multi-neuron Van Rossum distance with a uniform inter-neuron angle.
///
/// `d^2 = sum_n g_nn + cos_theta * sum_{n != m} g_nm`, where `g_nm` is the
/// kernel inner product of the difference trains `A_n - B_n` and `A_m - B_m`.
/// Since `sum_{n,m} g_nm` is the squared norm of the superimposed difference,
/// `d^2 = (1 - c) * labelled + c * population`.
pub fn van_rossum_multi(a: &Sample, b: &Sample, tau_s: f64, cos_theta: f64) -> Result<f64> {
    van_rossum_multi_prepared(
        &PopulationTrains::new(a),
        &PopulationTrains::new(b),
        tau_s,
        cos_theta,
    )
}

pub fn van_rossum_multi_prepared(
    a: &PopulationTrains<'_>,
    b: &PopulationTrains<'_>,
    tau_s: f64,
    cos_theta: f64,
) -> Result<f64> {
    check_tau(tau_s)?;
    check_cos_theta(cos_theta)?;
    let (ta, tb) = (a.sample.trains(), b.sample.trains());
    if ta.len() != tb.len() {
        return Err(Error::Type(format!(
            "samples have {} and {} taxels",
            ta.len(),
            tb.len()
        )));
    }
    let labelled: f64 = if cos_theta < 1.0 {
        ta.iter()
            .zip(tb)
            .map(|(x, y)| difference_norm_sq(x.spikes(), y.spikes(), tau_s))
            .sum()
    } else {
        0.0
    };
    let population = if cos_theta > 0.0 {
        difference_norm_sq(&a.merged, &b.merged, tau_s)
    } else {
        0.0
    };
    let sq = (1.0 - cos_theta) * labelled + cos_theta * population;
    Ok(sq.max(0.0).sqrt())
}

/// Distance between two encoded samples under `metric`.
pub fn distance(a: &EncodedSample, b: &EncodedSample, metric: &MetricSpec) -> Result<f64> {
    match metric {
        MetricSpec::Euclidean => euclidean(a, b),
        MetricSpec::VanRossum { tau_s, cos_theta } => match (a, b) {
            (
                EncodedSample::Spatiotemporal { tau_s: ta, sample: sa },
                EncodedSample::Spatiotemporal { tau_s: tb, sample: sb },
            ) => {
                if (ta - tau_s).abs() > 1e-12 || (tb - tau_s).abs() > 1e-12 {
                    return Err(Error::Type(format!(
                        "codes built with tau {ta} s / {tb} s, metric uses {tau_s} s"
                    )));
                }
                van_rossum_multi(sa, sb, *tau_s, *cos_theta)
            }
            _ => Err(Error::Type(format!(
                "van Rossum distance needs spatiotemporal codes, got {} and {}",
                a.kind(),
                b.kind()
            ))),
        },
    }
}
