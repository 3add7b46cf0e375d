//! Ground-truth scoring and the benchmark protocol: repeated trials, best
//! of a fixed number of runs per trial, median and interquartile range.

use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmeans::{fit_kmeans, KMeansConfig};
use crate::merge::merge_clusters;
use crate::model::{Dataset, OUTLIER_LABEL};
use crate::tiling::tiled_pipeline;

/// Which pipeline an experiment drives.
#[derive(Debug, Clone)]
pub enum PipelineSpec {
    /// Plain k-means, no merge step.
    Kmeans { k: usize },
    /// k-means followed by radius-based merging.
    Merged { k: usize, filter_outliers: bool },
    /// Tiled local clustering with a global merge.
    Tiled { splits: Vec<usize>, pct: f64 },
}

impl PipelineSpec {
    pub fn describe(&self) -> String {
        match self {
            PipelineSpec::Kmeans { k } => format!("kmeans k={}", k),
            PipelineSpec::Merged { k, filter_outliers } => {
                if *filter_outliers {
                    format!("merge k={} filtered", k)
                } else {
                    format!("merge k={}", k)
                }
            }
            PipelineSpec::Tiled { splits, pct } => {
                let s: Vec<String> = splits.iter().map(|x| x.to_string()).collect();
                format!("tiled {} pct={}", s.join("x"), pct)
            }
        }
    }

    /// One deterministic pipeline run; returns final per-point labels.
    pub fn run(&self, dataset: &Dataset, seed: u64) -> Result<Vec<usize>> {
        match self {
            PipelineSpec::Kmeans { k } => {
                let model = fit_kmeans(dataset, &KMeansConfig::new(*k, seed))?;
                Ok(model.labels)
            }
            PipelineSpec::Merged { k, filter_outliers } => {
                let model = fit_kmeans(dataset, &KMeansConfig::new(*k, seed))?;
                Ok(merge_clusters(&model, *filter_outliers).final_labels)
            }
            PipelineSpec::Tiled { splits, pct } => {
                let base = KMeansConfig::new(1, seed);
                Ok(tiled_pipeline(dataset, splits, *pct, &base)?.final_labels)
            }
        }
    }
}

/// Outcome of one benchmark cell.
#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub dataset: String,
    pub spec: String,
    pub trial_scores: Vec<f64>,
    pub median: f64,
    pub iqr: f64,
    pub trials: usize,
    pub runs_per_trial: usize,
    pub seed_base: u64,
}

/// Clustering success: best one-to-one matching between predicted and true
/// label ids (optimal assignment on the confusion matrix), as a fraction of
/// points. Predicted outliers never match and count as errors.
pub fn success_score(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::contract(format!(
            "label vectors differ in length: {} vs {}",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::contract("label vectors must be non-empty"));
    }
    let (pred_ids, a) = dense_remap(predicted);
    let (truth_ids, b) = dense_remap(truth);
    let mut confusion = vec![vec![0i64; b.max(1)]; a.max(1)];
    for (&p, &t) in pred_ids.iter().zip(&truth_ids) {
        if p == OUTLIER_LABEL || t == OUTLIER_LABEL {
            continue;
        }
        confusion[p][t] += 1;
    }
    let matched = max_assignment(&confusion);
    Ok(matched as f64 / predicted.len() as f64)
}

/// Densely renumbers label ids in order of first appearance, passing
/// [`OUTLIER_LABEL`] through unchanged.
fn dense_remap(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = std::collections::HashMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        if l == OUTLIER_LABEL {
            out.push(OUTLIER_LABEL);
            continue;
        }
        let next = map.len();
        out.push(*map.entry(l).or_insert(next));
    }
    (out, map.len())
}

/// Maximum-weight one-to-one assignment on a (possibly rectangular)
/// confusion matrix, padding the smaller side with zeros.
fn max_assignment(confusion: &[Vec<i64>]) -> i64 {
    let rows = confusion.len();
    let cols = confusion[0].len();
    let size = rows.max(cols);
    let weights = Matrix::from_fn(size, size, |(r, c)| {
        if r < rows && c < cols {
            confusion[r][c]
        } else {
            0
        }
    });
    let (total, _) = kuhn_munkres(&weights);
    total
}

/// Sample median and interquartile range. Quartiles interpolate linearly
/// between order statistics (position p * (n - 1)).
pub fn median_iqr(scores: &[f64]) -> Result<(f64, f64)> {
    if scores.is_empty() {
        return Err(Error::invalid("median_iqr requires a non-empty list"));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let pos = p * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        sorted[lo] * (1.0 - frac) + sorted[hi] * frac
    };
    Ok((q(0.5), q(0.75) - q(0.25)))
}

/// Experiment protocol: `trials` independent trials, each keeping the best
/// success score of `runs_per_trial` seeded runs. Seeds derive from
/// `seed_base + trial * runs_per_trial + run`, so results are independent
/// of execution order.
pub fn run_experiment(
    dataset: &Dataset,
    truth: &[usize],
    spec: &PipelineSpec,
    name: &str,
    trials: usize,
    runs_per_trial: usize,
    seed_base: u64,
) -> Result<ExperimentReport> {
    if trials == 0 || runs_per_trial == 0 {
        return Err(Error::invalid("trials and runs_per_trial must be positive"));
    }
    if truth.len() != dataset.n() {
        return Err(Error::contract("truth labels do not match dataset size"));
    }
    let trial_scores: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut best = 0.0f64;
            for r in 0..runs_per_trial {
                let seed = seed_base.wrapping_add((t * runs_per_trial + r) as u64);
                let labels = spec.run(dataset, seed)?;
                let score = success_score(&labels, truth)?;
                if score > best {
                    best = score;
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (median, iqr) = median_iqr(&trial_scores)?;
    Ok(ExperimentReport {
        dataset: name.to_string(),
        spec: spec.describe(),
        trial_scores,
        median,
        iqr,
        trials,
        runs_per_trial,
        seed_base,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Dataset;

    #[test]
    fn identical_labels_score_one() {
        let v = vec![0, 1, 2, 1, 0];
        assert_eq!(success_score(&v, &v).unwrap(), 1.0);
    }

    #[test]
    fn relabeling_scores_one() {
        let truth = vec![0, 0, 1, 1, 2];
        let pred = vec![7, 7, 3, 3, 9];
        assert_eq!(success_score(&pred, &truth).unwrap(), 1.0);
    }

    #[test]
    fn three_of_four_scores_three_quarters() {
        // Brute force over both matchings of 2 predicted x 2 true labels
        // confirms the best is 3 matched points.
        let truth = vec![0, 0, 1, 1];
        let pred = vec![0, 1, 1, 1];
        assert_eq!(success_score(&pred, &truth).unwrap(), 0.75);
    }

    #[test]
    fn length_mismatch_is_contract_error() {
        assert!(success_score(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn outliers_count_as_errors() {
        let truth = vec![0, 0, 1, 1];
        let pred = vec![0, 0, 1, OUTLIER_LABEL];
        assert_eq!(success_score(&pred, &truth).unwrap(), 0.75);
    }

    #[test]
    fn rectangular_confusion_matrices_work_both_ways() {
        // More predicted labels than true and vice versa.
        assert_eq!(success_score(&[0, 1, 2], &[0, 0, 0]).unwrap(), 1.0 / 3.0);
        assert_eq!(success_score(&[0, 0, 0], &[0, 1, 2]).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn median_iqr_singleton() {
        assert_eq!(median_iqr(&[0.5]).unwrap(), (0.5, 0.0));
    }

    #[test]
    fn median_even_count() {
        let (m, _) = median_iqr(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m, 0.5);
    }

    #[test]
    fn median_iqr_matches_sort_based_reference() {
        // Independent order-statistics oracle on a fixed shuffled list.
        let scores: Vec<f64> = (0..100).map(|i| ((i * 37) % 100) as f64 / 100.0).collect();
        let (median, iqr) = median_iqr(&scores).unwrap();
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        let interp = |p: f64| {
            let pos = p * 99.0;
            let lo = pos.floor() as usize;
            sorted[lo] + (pos - lo as f64) * (sorted[lo + 1.min(99 - lo)] - sorted[lo])
        };
        assert!((median - interp(0.5)).abs() < 1e-12);
        assert!((iqr - (interp(0.75) - interp(0.25))).abs() < 1e-12);
    }

    #[test]
    fn median_iqr_rejects_empty() {
        assert!(median_iqr(&[]).is_err());
    }

    #[test]
    fn degenerate_protocol_is_deterministic() {
        let ds = Dataset::from_rows(vec![
            vec![0.0, 0.0],
            vec![0.1, 0.0],
            vec![9.0, 9.0],
            vec![9.1, 9.0],
        ])
        .unwrap();
        let truth = vec![0, 0, 1, 1];
        let spec = PipelineSpec::Kmeans { k: 2 };
        let a = run_experiment(&ds, &truth, &spec, "toy", 1, 1, 7).unwrap();
        let b = run_experiment(&ds, &truth, &spec, "toy", 1, 1, 7).unwrap();
        assert_eq!(a.trial_scores, b.trial_scores);
        assert_eq!(a.median, 1.0);
    }

    #[test]
    fn best_of_five_dominates_single_run() {
        let ds = Dataset::from_rows(
            (0..20)
                .map(|i| vec![(i % 5) as f64, (i / 5) as f64 * 8.0])
                .collect(),
        )
        .unwrap();
        let truth: Vec<usize> = (0..20).map(|i| i / 5).collect();
        let spec = PipelineSpec::Kmeans { k: 4 };
        let five = run_experiment(&ds, &truth, &spec, "g", 6, 5, 123).unwrap();
        for (t, &s5) in five.trial_scores.iter().enumerate() {
            // Single-run trial t uses seed_base + t*5, i.e. the first run of
            // the five-run trial.
            let labels = spec.run(&ds, 123 + (t * 5) as u64).unwrap();
            let s1 = success_score(&labels, &truth).unwrap();
            assert!(s5 >= s1);
        }
    }
}
