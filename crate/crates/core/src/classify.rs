//! k-nearest-neighbour voting and the evaluation protocols built on it.

use std::fmt::Write as _;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encoding::{EncodedSample, EncoderSpec};
use crate::error::{Error, Result};
use crate::event_model::Dataset;
use crate::metrics::{distance, van_rossum_multi_prepared, MetricSpec, PopulationTrains};
use crate::stats;

/// Default neighbour count.
pub const DEFAULT_K: usize = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub classes: Vec<String>,
    /// Rows are true classes, columns predictions.
    pub confusion: Vec<Vec<usize>>,
    /// Fraction correct.
    pub accuracy: f64,
    pub per_sample_correct: Vec<u8>,
    /// Population std. dev. of the per-sample 0/100 scores.
    pub dispersion: f64,
}

impl ClassificationReport {
    pub fn from_predictions(pairs: &[(usize, usize)], classes: &[String]) -> Result<Self> {
        let confusion = confusion_matrix(pairs, classes.len())?;
        let per_sample_correct: Vec<u8> = pairs.iter().map(|&(t, p)| u8::from(t == p)).collect();
        let scores: Vec<f64> = per_sample_correct.iter().map(|&c| c as f64 * 100.0).collect();
        let accuracy = if pairs.is_empty() {
            0.0
        } else {
            per_sample_correct.iter().map(|&c| c as f64).sum::<f64>() / pairs.len() as f64
        };
        Ok(ClassificationReport {
            classes: classes.to_vec(),
            confusion,
            accuracy,
            per_sample_correct,
            dispersion: stats::std_dev(&scores),
        })
    }

    pub fn accuracy_percent(&self) -> f64 {
        self.accuracy * 100.0
    }

    pub fn total(&self) -> usize {
        self.per_sample_correct.len()
    }

    /// Confusion matrix as CSV with class names on both axes.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for c in &self.classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            out.push_str(c);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// `accuracy,stddev` header and one line, both in percent.
    pub fn summary_csv(&self) -> String {
        format!(
            "accuracy,stddev\n{:.4},{:.4}\n",
            self.accuracy_percent(),
            self.dispersion
        )
    }
}

/// `counts[i][j]` = number of pairs with true class `i` predicted as `j`.
pub fn confusion_matrix(pairs: &[(usize, usize)], class_count: usize) -> Result<Vec<Vec<usize>>> {
    let mut m = vec![vec![0usize; class_count]; class_count];
    for (index, &(t, p)) in pairs.iter().enumerate() {
        if t >= class_count || p >= class_count {
            return Err(Error::Record {
                index,
                message: format!("label index ({t}, {p}) outside {class_count} classes"),
            });
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Confusion matrix over label names.
pub fn confusion_matrix_named(
    pairs: &[(&str, &str)],
    classes: &[String],
) -> Result<Vec<Vec<usize>>> {
    let index = |l: &str, i: usize| {
        classes.iter().position(|c| c == l).ok_or_else(|| Error::Record {
            index: i,
            message: format!("unknown label {l:?}"),
        })
    };
    let idx = pairs
        .iter()
        .enumerate()
        .map(|(i, &(t, p))| Ok((index(t, i)?, index(p, i)?)))
        .collect::<Result<Vec<_>>>()?;
    confusion_matrix(&idx, classes.len())
}

/// Majority vote over the `k` nearest of `neighbours`, given as
/// `(distance, label)` in training-set order.
///
/// Ties on the k-th distance keep the earlier training item. Vote ties go to
/// the smaller summed distance, then to the label seen first in training
/// order.
pub fn knn_vote(neighbours: &[(f64, usize)], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if neighbours.is_empty() {
        return Err(Error::Parameter("training set is empty".into()));
    }
    let k = if k > neighbours.len() {
        warn!("k = {k} exceeds the {} training samples; clamping", neighbours.len());
        neighbours.len()
    } else {
        k
    };
    let mut order: Vec<usize> = (0..neighbours.len()).collect();
    order.sort_by(|&a, &b| neighbours[a].0.total_cmp(&neighbours[b].0).then(a.cmp(&b)));

    // (label, votes, summed distance, first training position)
    let mut tally: Vec<(usize, usize, f64, usize)> = Vec::new();
    for &i in &order[..k] {
        let (d, label) = neighbours[i];
        match tally.iter_mut().find(|e| e.0 == label) {
            Some(e) => {
                e.1 += 1;
                e.2 += d;
                e.3 = e.3.min(i);
            }
            None => tally.push((label, 1, d, i)),
        }
    }
    let best = tally
        .into_iter()
        .min_by(|a, b| {
            b.1.cmp(&a.1)
                .then(a.2.total_cmp(&b.2))
                .then(a.3.cmp(&b.3))
        })
        .expect("k >= 1");
    Ok(best.0)
}

/// Classifies `query` against labelled training items.
pub fn knn_classify<T, L: Clone + PartialEq>(
    train: &[(T, L)],
    query: &T,
    k: usize,
    mut metric: impl FnMut(&T, &T) -> Result<f64>,
) -> Result<L> {
    let mut labels: Vec<L> = Vec::new();
    let neighbours = train
        .iter()
        .map(|(item, label)| {
            let id = match labels.iter().position(|l| l == label) {
                Some(i) => i,
                None => {
                    labels.push(label.clone());
                    labels.len() - 1
                }
            };
            Ok((metric(query, item)?, id))
        })
        .collect::<Result<Vec<_>>>()?;
    let winner = knn_vote(&neighbours, k)?;
    Ok(labels[winner].clone())
}

/// [`knn_classify`] over encoded samples with a [`MetricSpec`].
pub fn knn_classify_encoded<L: Clone + PartialEq>(
    train: &[(EncodedSample, L)],
    query: &EncodedSample,
    k: usize,
    metric: &MetricSpec,
) -> Result<L> {
    metric.validate()?;
    knn_classify(train, query, k, |a, b| distance(a, b, metric))
}

/// Metric matching an encoder: Euclidean for the rate codes, Van Rossum with
/// the encoder's tau for the spatiotemporal code.
pub fn default_metric(encoder: &EncoderSpec, cos_theta: f64) -> MetricSpec {
    match *encoder {
        EncoderSpec::Spatiotemporal { tau_ms } => MetricSpec::VanRossum {
            tau_s: tau_ms / 1e3,
            cos_theta,
        },
        _ => MetricSpec::Euclidean,
    }
}

/// Stratified split: each class is shuffled and the first
/// `round(ratio * n)` (at least 1, at most n - 1) samples go to training.
/// Both parts keep dataset order.
pub fn train_test_split(dataset: &Dataset, ratio: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::Parameter(format!("split ratio {ratio} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, name) in dataset.classes().iter().enumerate() {
        let mut members: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.labels()[i] == c)
            .collect();
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::Validation(format!(
                "class {name:?} has {} sample(s); at least 2 are needed to split",
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        let n = members.len();
        let n_train = ((ratio * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&members[..n_train]);
        test.extend_from_slice(&members[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.subset(&train), dataset.subset(&test)))
}

/// Keeps at most `per_class` samples of every class, chosen by `seed`.
pub fn stratified_subsample(dataset: &Dataset, per_class: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for c in 0..dataset.classes().len() {
        let mut members: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.labels()[i] == c)
            .collect();
        members.shuffle(&mut rng);
        members.truncate(per_class);
        keep.extend(members);
    }
    keep.sort_unstable();
    dataset.subset(&keep)
}

/// Distances from every query to every reference, `out[q][r]`.
fn cross_distances(
    queries: &Dataset,
    references: &Dataset,
    encoder: &EncoderSpec,
    metric: &MetricSpec,
) -> Result<Vec<Vec<f64>>> {
    metric.validate()?;
    match (encoder, metric) {
        (EncoderSpec::Spatiotemporal { tau_ms }, MetricSpec::VanRossum { tau_s, cos_theta }) => {
            if (tau_ms / 1e3 - tau_s).abs() > 1e-12 {
                return Err(Error::Type(format!(
                    "encoder tau {tau_ms} ms does not match metric tau {tau_s} s"
                )));
            }
            let q: Vec<PopulationTrains> = queries.samples().iter().map(PopulationTrains::new).collect();
            let r: Vec<PopulationTrains> =
                references.samples().iter().map(PopulationTrains::new).collect();
            q.par_iter()
                .map(|a| {
                    r.iter()
                        .map(|b| van_rossum_multi_prepared(a, b, *tau_s, *cos_theta))
                        .collect()
                })
                .collect()
        }
        (EncoderSpec::Spatiotemporal { .. }, MetricSpec::Euclidean)
        | (_, MetricSpec::VanRossum { .. }) => Err(Error::Type(format!(
            "metric {metric:?} is not defined on {} codes",
            encoder.name()
        ))),
        _ => {
            let encode = |d: &Dataset| {
                d.samples()
                    .iter()
                    .map(|s| encoder.encode(s))
                    .collect::<Result<Vec<_>>>()
            };
            let q = encode(queries)?;
            let r = encode(references)?;
            q.par_iter()
                .map(|a| r.iter().map(|b| distance(a, b, metric)).collect())
                .collect()
        }
    }
}

/// Classifies every sample against all others.
pub fn leave_one_out(
    dataset: &Dataset,
    encoder: &EncoderSpec,
    metric: &MetricSpec,
    k: usize,
) -> Result<ClassificationReport> {
    if dataset.len() < 2 {
        return Err(Error::Validation(
            "leave-one-out needs at least 2 samples".into(),
        ));
    }
    let dist = cross_distances(dataset, dataset, encoder, metric)?;
    let labels = dataset.labels();
    let pairs = (0..dataset.len())
        .map(|i| {
            let neighbours: Vec<(f64, usize)> = (0..dataset.len())
                .filter(|&j| j != i)
                .map(|j| (dist[i][j], labels[j]))
                .collect();
            Ok((labels[i], knn_vote(&neighbours, k)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ClassificationReport::from_predictions(&pairs, dataset.classes())
}

/// Classifies `test` against `train`.
pub fn evaluate_split(
    train: &Dataset,
    test: &Dataset,
    encoder: &EncoderSpec,
    metric: &MetricSpec,
    k: usize,
) -> Result<ClassificationReport> {
    if train.classes() != test.classes() {
        return Err(Error::Validation("train and test class lists differ".into()));
    }
    let dist = cross_distances(test, train, encoder, metric)?;
    let pairs = (0..test.len())
        .map(|i| {
            let neighbours: Vec<(f64, usize)> = dist[i]
                .iter()
                .zip(train.labels())
                .map(|(&d, &l)| (d, l))
                .collect();
            Ok((test.labels()[i], knn_vote(&neighbours, k)?))
        })
        .collect::<Result<Vec<_>>>()?;
    ClassificationReport::from_predictions(&pairs, test.classes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event_model::{Micros, Sample, TAXEL_COUNT};
    use proptest::prelude::*;

    fn sample(label: &str, taxel: usize, spikes: Vec<Micros>) -> Sample {
        let mut lists = vec![vec![]; TAXEL_COUNT];
        lists[taxel] = spikes;
        Sample::from_spike_lists(lists, 1_000_000, label).unwrap()
    }

    #[test]
    fn k1_exact_match() {
        let train = vec![(1.0, "a"), (5.0, "b"), (9.0, "c")];
        let got = knn_classify(&train, &5.0, 1, |x: &f64, y: &f64| Ok((x - y).abs())).unwrap();
        assert_eq!(got, "b");
    }

    #[test]
    fn vote_tie_goes_to_smaller_summed_distance() {
        // A at 0.4 and 0.6 (sum 1.0), B at 0.5 and 1.5 (sum 2.0)
        let n = [(0.5, 1), (0.4, 0), (1.5, 1), (0.6, 0), (9.0, 2)];
        assert_eq!(knn_vote(&n, 4).unwrap(), 0);
    }

    #[test]
    fn vote_tie_on_equal_sums_goes_to_training_order() {
        let n = [(1.0, 1), (1.0, 0)];
        assert_eq!(knn_vote(&n, 2).unwrap(), 1);
    }

    #[test]
    fn kth_distance_tie_keeps_earlier_item() {
        let n = [(1.0, 0), (0.5, 2), (1.0, 1)];
        // nearest two: index 1 (0.5) and index 0 (1.0, earlier than index 2)
        // vote tie 1-1: label 2 has smaller summed distance
        assert_eq!(knn_vote(&n, 2).unwrap(), 2);
        assert_eq!(knn_vote(&n, 1).unwrap(), 2);
    }

    #[test]
    fn k_clamped_to_training_size() {
        let n = [(1.0, 0), (2.0, 1), (3.0, 1)];
        assert_eq!(knn_vote(&n, 4).unwrap(), 1);
        assert!(knn_vote(&n, 0).is_err());
        assert!(knn_vote(&[], 1).is_err());
    }

    #[test]
    fn confusion_cases() {
        let m = confusion_matrix(&[(0, 0), (1, 1), (2, 2)], 3).unwrap();
        assert_eq!(m, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let classes = vec!["A".to_string(), "B".to_string()];
        let m = confusion_matrix_named(&[("A", "B")], &classes).unwrap();
        assert_eq!(m, vec![vec![0, 1], vec![0, 0]]);
        assert!(confusion_matrix_named(&[("A", "C")], &classes).is_err());
    }

    fn toy(per_class: usize) -> Dataset {
        let mut samples = Vec::new();
        for (c, label) in ["a", "b", "c"].iter().enumerate() {
            for r in 0..per_class {
                samples.push(sample(label, c, vec![1_000 * (r as u64 + 1)]));
            }
        }
        Dataset::from_samples(samples).unwrap()
    }

    #[test]
    fn split_exact_division_and_determinism() {
        let d = toy(10);
        let (train, test) = train_test_split(&d, 0.8, 3).unwrap();
        assert_eq!(train.len(), 24);
        assert_eq!(test.len(), 6);
        for c in 0..3 {
            assert_eq!(train.labels().iter().filter(|&&l| l == c).count(), 8);
            assert_eq!(test.labels().iter().filter(|&&l| l == c).count(), 2);
        }
        let again = train_test_split(&d, 0.8, 3).unwrap();
        assert_eq!(again.0, train);
        assert_eq!(again.1, test);
        assert!(train_test_split(&d, 1.0, 3).is_err());
        assert!(train_test_split(&toy(1), 0.5, 3).is_err());
    }

    #[test]
    fn eleven_classes_of_one_hundred() {
        let mut samples = Vec::new();
        for c in 0..11 {
            for _ in 0..100 {
                samples.push(Sample::empty(10, format!("c{c}")));
            }
        }
        let d = Dataset::from_samples(samples).unwrap();
        let (train, test) = train_test_split(&d, 0.8, 0).unwrap();
        assert_eq!((train.len(), test.len()), (880, 220));
    }

    #[test]
    fn loocv_duplicates_are_perfect() {
        let mut samples = Vec::new();
        for (c, label) in ["x", "y", "z"].iter().enumerate() {
            for _ in 0..2 {
                samples.push(sample(label, c, vec![5_000, 9_000 + c as u64 * 1000]));
            }
        }
        let d = Dataset::from_samples(samples).unwrap();
        for (enc, metric) in [
            (EncoderSpec::Spatial, MetricSpec::Euclidean),
            (EncoderSpec::Temporal { delta_t_ms: 20 }, MetricSpec::Euclidean),
            (
                EncoderSpec::Spatiotemporal { tau_ms: 10.0 },
                MetricSpec::VanRossum {
                    tau_s: 0.01,
                    cos_theta: 0.0,
                },
            ),
        ] {
            let r = leave_one_out(&d, &enc, &metric, 1).unwrap();
            assert_eq!(r.accuracy, 1.0, "{enc:?}");
            assert_eq!(r.dispersion, 0.0);
            assert_eq!(r.confusion, vec![vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]);
        }
    }

    #[test]
    fn loocv_incompatible_metric() {
        let d = toy(2);
        let vr = MetricSpec::VanRossum {
            tau_s: 0.01,
            cos_theta: 0.0,
        };
        assert!(matches!(
            leave_one_out(&d, &EncoderSpec::Spatial, &vr, 1),
            Err(Error::Type(_))
        ));
        assert!(matches!(
            leave_one_out(
                &d,
                &EncoderSpec::Spatiotemporal { tau_ms: 10.0 },
                &MetricSpec::Euclidean,
                1
            ),
            Err(Error::Type(_))
        ));
    }

    #[test]
    fn report_csv_shapes() {
        let classes = vec!["a".to_string(), "b".to_string()];
        let r = ClassificationReport::from_predictions(&[(0, 0), (1, 0), (1, 1), (0, 0)], &classes)
            .unwrap();
        assert_eq!(r.confusion_csv(), "true\\predicted,a,b\na,2,0\nb,1,1\n");
        assert_eq!(r.summary_csv(), "accuracy,stddev\n75.0000,43.3013\n");
    }

    proptest! {
        #[test]
        fn confusion_row_sums(pairs in proptest::collection::vec((0usize..5, 0usize..5), 0..60)) {
            let m = confusion_matrix(&pairs, 5).unwrap();
            for (c, row) in m.iter().enumerate() {
                let expected = pairs.iter().filter(|p| p.0 == c).count();
                prop_assert_eq!(row.iter().sum::<usize>(), expected);
            }
            let r = ClassificationReport::from_predictions(
                &pairs,
                &(0..5).map(|i| i.to_string()).collect::<Vec<_>>(),
            ).unwrap();
            if !pairs.is_empty() {
                let trace: usize = (0..5).map(|i| m[i][i]).sum();
                prop_assert_eq!(r.accuracy, trace as f64 / pairs.len() as f64);
                let mean = r.per_sample_correct.iter().map(|&c| c as f64).sum::<f64>() / pairs.len() as f64;
                prop_assert_eq!(r.accuracy, mean);
            }
        }

        #[test]
        fn knn_invariant_under_scaling(
            pts in proptest::collection::vec((0.0f64..10.0, 0usize..3), 1..30),
            scale in 0.1f64..50.0,
            k in 1usize..8,
        ) {
            let scaled: Vec<(f64, usize)> = pts.iter().map(|&(d, l)| (d * scale, l)).collect();
            prop_assert_eq!(knn_vote(&pts, k).unwrap(), knn_vote(&scaled, k).unwrap());
        }

        #[test]
        fn split_preserves_proportions(sizes in proptest::collection::vec(2usize..30, 1..6), seed in any::<u64>()) {
            let mut samples = Vec::new();
            for (c, &n) in sizes.iter().enumerate() {
                for _ in 0..n {
                    samples.push(Sample::empty(10, format!("c{c}")));
                }
            }
            let d = Dataset::from_samples(samples).unwrap();
            let (train, test) = train_test_split(&d, 0.8, seed).unwrap();
            prop_assert_eq!(train.len() + test.len(), d.len());
            for (c, &n) in sizes.iter().enumerate() {
                let got = train.labels().iter().filter(|&&l| l == c).count() as f64;
                prop_assert!((got - 0.8 * n as f64).abs() <= 1.0);
            }
        }
    }
}
