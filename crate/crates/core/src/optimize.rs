//! Parameter selection: exhaustive sweep of the temporal window and
//! surrogate-model search over (cos_theta, tau).
//!
//! The surrogate loop is a plain Gaussian-process / expected-improvement
//! scheme with fixed hyperparameters:
//!
//! * inputs normalised to the unit square, outputs standardised;
//! * squared-exponential kernel, length scale 0.2, noise variance 1e-3;
//! * initial design of `max(4, epochs / 10)` shifted Halton points;
//! * each later epoch evaluates the expected-improvement maximiser over a
//!   64 x 64 grid spanning the bounds (first maximiser in scan order).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::classify::leave_one_out;
use crate::encoding::{duration_ms, EncoderSpec};
use crate::error::{Error, Result};
use crate::event_model::Dataset;
use crate::metrics::MetricSpec;

pub const GP_LENGTH_SCALE: f64 = 0.2;
pub const GP_NOISE: f64 = 1e-3;
pub const EI_GRID: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// `(delta_t_ms, accuracy)` in sweep order.
    pub evaluated: Vec<(u32, f64)>,
    pub best: (u32, f64),
}

/// Evaluates `objective` at every value and keeps the best; ties go to the
/// smallest value.
pub fn sweep(values: &[u32], mut objective: impl FnMut(u32) -> Result<f64>) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::Parameter("sweep range is empty".into()));
    }
    let evaluated = values
        .iter()
        .map(|&v| Ok((v, objective(v)?)))
        .collect::<Result<Vec<_>>>()?;
    let best = evaluated
        .iter()
        .copied()
        .reduce(|best, cur| {
            if cur.1 > best.1 || (cur.1 == best.1 && cur.0 < best.0) {
                cur
            } else {
                best
            }
        })
        .expect("non-empty");
    Ok(SweepResult { evaluated, best })
}

/// Leave-one-out accuracy of the temporal code for every window in
/// `[lo, hi]` ms at `stride`.
pub fn sweep_delta_t(
    dataset: &Dataset,
    range: (u32, u32),
    stride: u32,
    k: usize,
) -> Result<SweepResult> {
    let (lo, hi) = range;
    if stride == 0 {
        return Err(Error::Parameter("stride must be at least 1 ms".into()));
    }
    if lo < 1 || lo > hi {
        return Err(Error::Parameter(format!("empty delta_t range [{lo}, {hi}]")));
    }
    if let Some(shortest) = dataset.samples().iter().map(duration_ms).min() {
        if hi > shortest {
            return Err(Error::Parameter(format!(
                "delta_t {hi} ms exceeds sample duration {shortest} ms"
            )));
        }
    }
    let values: Vec<u32> = (lo..=hi).step_by(stride as usize).collect();
    sweep(&values, |dt| {
        Ok(leave_one_out(
            dataset,
            &EncoderSpec::Temporal { delta_t_ms: dt },
            &MetricSpec::Euclidean,
            k,
        )?
        .accuracy)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub cos_theta: (f64, f64),
    pub tau_ms: (f64, f64),
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            cos_theta: (0.0, 1.0),
            tau_ms: (10.0, 100.0),
        }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        let (c0, c1) = self.cos_theta;
        let (t0, t1) = self.tau_ms;
        if !(0.0 <= c0 && c0 < c1 && c1 <= 1.0) {
            return Err(Error::Parameter(format!(
                "cos_theta bounds ({c0}, {c1}) must satisfy 0 <= lo < hi <= 1"
            )));
        }
        if !(0.0 < t0 && t0 < t1 && t1.is_finite()) {
            return Err(Error::Parameter(format!(
                "tau bounds ({t0}, {t1}) ms must satisfy 0 < lo < hi"
            )));
        }
        Ok(())
    }

    fn to_point(self, unit: [f64; 2]) -> (f64, f64) {
        (
            self.cos_theta.0 + unit[0] * (self.cos_theta.1 - self.cos_theta.0),
            self.tau_ms.0 + unit[1] * (self.tau_ms.1 - self.tau_ms.0),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub epoch: usize,
    pub cos_theta: f64,
    pub tau_ms: f64,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrogateResult {
    pub trials: Vec<Trial>,
    pub best: Trial,
    pub epochs: usize,
}

impl SurrogateResult {
    /// Best accuracy seen after each epoch.
    pub fn running_best(&self) -> Vec<f64> {
        self.trials
            .iter()
            .scan(f64::NEG_INFINITY, |b, t| {
                *b = b.max(t.accuracy);
                Some(*b)
            })
            .collect()
    }
}

/// Radical inverse of `i` in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

/// Halton points (bases 2 and 3) under a random toroidal shift.
fn initial_design(n: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let shift = [rng.random::<f64>(), rng.random::<f64>()];
    (1..=n as u64)
        .map(|i| {
            [
                (radical_inverse(i, 2) + shift[0]).fract(),
                (radical_inverse(i, 3) + shift[1]).fract(),
            ]
        })
        .collect()
}

/// Gaussian-process regression on the unit square.
pub struct GaussianProcess {
    inputs: Vec<[f64; 2]>,
    lower: DMatrix<f64>,
    alpha: DVector<f64>,
    y_mean: f64,
    y_scale: f64,
    length: f64,
}

impl GaussianProcess {
    pub fn fit(inputs: &[[f64; 2]], outputs: &[f64], length: f64, noise: f64) -> Result<Self> {
        let n = inputs.len();
        if n == 0 || n != outputs.len() {
            return Err(Error::Parameter("GP needs matching, non-empty data".into()));
        }
        let y_mean = outputs.iter().sum::<f64>() / n as f64;
        let var = outputs.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
        let y_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let k = DMatrix::from_fn(n, n, |i, j| {
            se_kernel(&inputs[i], &inputs[j], length) + if i == j { noise } else { 0.0 }
        });
        let chol = k
            .cholesky()
            .ok_or_else(|| Error::Internal("GP covariance not positive definite".into()))?;
        let y = DVector::from_iterator(n, outputs.iter().map(|v| (v - y_mean) / y_scale));
        let alpha = chol.solve(&y);
        Ok(GaussianProcess {
            inputs: inputs.to_vec(),
            lower: chol.l(),
            alpha,
            y_mean,
            y_scale,
            length,
        })
    }

    /// Posterior mean and standard deviation in standardised units.
    fn predict_standardised(&self, x: &[f64; 2]) -> (f64, f64) {
        let ks = DVector::from_iterator(
            self.inputs.len(),
            self.inputs.iter().map(|p| se_kernel(p, x, self.length)),
        );
        let mean = ks.dot(&self.alpha);
        let v = self.lower.solve_lower_triangular(&ks).expect("non-singular");
        let var = (1.0 - v.dot(&v)).max(1e-12);
        (mean, var.sqrt())
    }

    /// Posterior mean and standard deviation in output units.
    pub fn predict(&self, x: &[f64; 2]) -> (f64, f64) {
        let (m, s) = self.predict_standardised(x);
        (self.y_mean + m * self.y_scale, s * self.y_scale)
    }

    fn standardise(&self, y: f64) -> f64 {
        (y - self.y_mean) / self.y_scale
    }
}

fn se_kernel(a: &[f64; 2], b: &[f64; 2], length: f64) -> f64 {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    (-0.5 * d2 / (length * length)).exp()
}

pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    let n = Normal::standard();
    let z = (mean - best) / sd;
    (mean - best) * n.cdf(z) + sd * n.pdf(z)
}

/// Maximises `objective(cos_theta, tau_ms)` over `bounds` in `epochs`
/// evaluations.
pub fn maximize_surrogate(
    bounds: &Bounds,
    epochs: usize,
    seed: u64,
    mut objective: impl FnMut(f64, f64) -> Result<f64>,
) -> Result<SurrogateResult> {
    bounds.validate()?;
    if epochs < 4 {
        return Err(Error::Parameter(format!("need at least 4 epochs, got {epochs}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_init = (epochs / 10).max(4).min(epochs);
    let grid: Vec<[f64; 2]> = (0..EI_GRID)
        .flat_map(|i| {
            (0..EI_GRID).map(move |j| {
                let step = (EI_GRID - 1) as f64;
                [i as f64 / step, j as f64 / step]
            })
        })
        .collect();

    let mut unit: Vec<[f64; 2]> = Vec::with_capacity(epochs);
    let mut values: Vec<f64> = Vec::with_capacity(epochs);
    let mut trials = Vec::with_capacity(epochs);
    let mut evaluate = |x: [f64; 2], unit: &mut Vec<[f64; 2]>, values: &mut Vec<f64>| {
        let (c, tau) = bounds.to_point(x);
        let acc = objective(c, tau)?;
        trials.push(Trial {
            epoch: trials.len() + 1,
            cos_theta: c,
            tau_ms: tau,
            accuracy: acc,
        });
        unit.push(x);
        values.push(acc);
        Ok::<(), Error>(())
    };

    for x in initial_design(n_init, &mut rng) {
        evaluate(x, &mut unit, &mut values)?;
    }
    while values.len() < epochs {
        let gp = GaussianProcess::fit(&unit, &values, GP_LENGTH_SCALE, GP_NOISE)?;
        let best = gp.standardise(values.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let scores: Vec<f64> = grid
            .par_iter()
            .map(|g| {
                let (m, s) = gp.predict_standardised(g);
                expected_improvement(m, s, best)
            })
            .collect();
        let mut next = 0;
        for (i, &ei) in scores.iter().enumerate() {
            if ei > scores[next] {
                next = i;
            }
        }
        evaluate(grid[next], &mut unit, &mut values)?;
    }

    let best = trials
        .iter()
        .copied()
        .reduce(|b, t| if t.accuracy > b.accuracy { t } else { b })
        .expect("epochs >= 4");
    Ok(SurrogateResult {
        trials,
        best,
        epochs,
    })
}

/// Surrogate search for the spatiotemporal code's (cos_theta, tau), scored
/// by leave-one-out accuracy on `dataset`.
pub fn optimize_spatiotemporal(
    dataset: &Dataset,
    bounds: &Bounds,
    epochs: usize,
    seed: u64,
    k: usize,
) -> Result<SurrogateResult> {
    maximize_surrogate(bounds, epochs, seed, |cos_theta, tau_ms| {
        let encoder = EncoderSpec::Spatiotemporal { tau_ms };
        let metric = MetricSpec::VanRossum {
            tau_s: tau_ms / 1e3,
            cos_theta,
        };
        Ok(leave_one_out(dataset, &encoder, &metric, k)?.accuracy)
    })
}

/// `epoch,cos_theta,tau_ms,accuracy` rows.
pub fn trials_csv(result: &SurrogateResult) -> String {
    let mut out = String::from("epoch,cos_theta,tau_ms,accuracy\n");
    for t in &result.trials {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6}\n",
            t.epoch, t.cos_theta, t.tau_ms, t.accuracy
        ));
    }
    out
}

/// `delta_t_ms,accuracy` rows.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("delta_t_ms,accuracy\n");
    for (dt, acc) in &result.evaluated {
        out.push_str(&format!("{dt},{acc:.6}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted(c: f64, tau: f64) -> f64 {
        (-20.0 * (c - 0.4).powi(2) - 0.002 * (tau - 76.0).powi(2)).exp()
    }

    #[test]
    fn single_point_sweep() {
        let r = sweep(&[10], |v| Ok(v as f64 / 100.0)).unwrap();
        assert_eq!(r.evaluated, vec![(10, 0.1)]);
        assert_eq!(r.best, (10, 0.1));
        assert!(sweep(&[], |_| Ok(0.0)).is_err());
    }

    #[test]
    fn sweep_ties_go_to_smallest() {
        let r = sweep(&[5, 3, 9, 4], |v| Ok(if v == 9 || v == 4 { 1.0 } else { 0.5 })).unwrap();
        assert_eq!(r.best, (4, 1.0));
    }

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(2, 3) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn four_epochs_is_initial_design_only() {
        let mut calls = 0;
        let r = maximize_surrogate(&Bounds::default(), 4, 1, |c, t| {
            calls += 1;
            Ok(planted(c, t))
        })
        .unwrap();
        assert_eq!(calls, 4);
        assert_eq!(r.trials.len(), 4);
        let max = r.trials.iter().map(|t| t.accuracy).fold(f64::MIN, f64::max);
        assert_eq!(r.best.accuracy, max);
    }

    #[test]
    fn deterministic_and_in_bounds() {
        let b = Bounds::default();
        let a = maximize_surrogate(&b, 20, 5, |c, t| Ok(planted(c, t))).unwrap();
        let again = maximize_surrogate(&b, 20, 5, |c, t| Ok(planted(c, t))).unwrap();
        assert_eq!(a, again);
        for t in &a.trials {
            assert!((0.0..=1.0).contains(&t.cos_theta));
            assert!((10.0..=100.0).contains(&t.tau_ms));
        }
        let rb = a.running_best();
        assert!(rb.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(*rb.last().unwrap(), a.best.accuracy);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(maximize_surrogate(&Bounds::default(), 3, 0, |_, _| Ok(0.0)).is_err());
        let bad = Bounds {
            cos_theta: (0.5, 0.2),
            ..Default::default()
        };
        assert!(maximize_surrogate(&bad, 10, 0, |_, _| Ok(0.0)).is_err());
        let bad = Bounds {
            tau_ms: (0.0, 10.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn gp_interpolates_training_points() {
        let x = [[0.1, 0.2], [0.5, 0.5], [0.9, 0.7]];
        let y = [1.0, 3.0, 2.0];
        let gp = GaussianProcess::fit(&x, &y, 0.2, 1e-6).unwrap();
        for (xi, yi) in x.iter().zip(y) {
            let (m, s) = gp.predict(xi);
            assert!((m - yi).abs() < 1e-3, "{m} vs {yi}");
            assert!(s < 0.01);
        }
        let (_, far) = gp.predict(&[0.1, 0.95]);
        assert!(far > 0.5);
    }

    #[test]
    fn ei_properties() {
        assert!(expected_improvement(1.0, 1e-9, 0.0) > 0.99);
        assert!(expected_improvement(-5.0, 1e-9, 0.0) < 1e-12);
        assert!(expected_improvement(0.0, 1.0, 0.0) > expected_improvement(0.0, 0.5, 0.0));
    }

    #[test]
    fn trial_log_rows_match_budget() {
        let r = maximize_surrogate(&Bounds::default(), 12, 2, |c, t| Ok(planted(c, t))).unwrap();
        let csv = trials_csv(&r);
        assert_eq!(csv.lines().count(), 13);
        assert!(csv.starts_with("epoch,cos_theta,tau_ms,accuracy\n1,"));
    }
}
