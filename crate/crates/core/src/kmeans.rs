//! Lloyd's algorithm with k-means++ seeding.
//!
//! The fit intentionally tolerates empty clusters by dropping their centers,
//! so the effective k may shrink below the requested one. Randomness comes
//! from a ChaCha8 stream seeded by `KMeansConfig::seed`, which keeps runs
//! reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::merge::compute_radii;
use crate::model::{assign_points, compute_inertia, dist, sq_dist, ClusterModel, Dataset};

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iters: usize,
    /// Convergence threshold on the summed L2 movement of surviving centers.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            max_iters: 300,
            tol: 1e-4,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        KMeansConfig { seed, ..self.clone() }
    }

    pub fn with_k(&self, k: usize) -> Self {
        KMeansConfig { k, ..self.clone() }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 || self.k > n {
            return Err(Error::invalid(format!(
                "k = {} must satisfy 1 <= k <= n = {}",
                self.k, n
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be positive"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol must be non-negative"));
        }
        Ok(())
    }
}

/// k-means++ seeding: first center uniform, each further center drawn with
/// probability proportional to squared distance to the nearest chosen one.
/// Returns k distinct dataset points.
pub fn kmeanspp_init(dataset: &Dataset, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let n = dataset.n();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "k-means++ requires 1 <= k <= n, got k = {}, n = {}",
            k, n
        )));
    }
    let mut chosen_ids = Vec::with_capacity(k);
    let mut chosen = vec![false; n];
    let first = rng.gen_range(0..n);
    chosen_ids.push(first);
    chosen[first] = true;

    // Squared distance from each point to its nearest chosen center.
    let mut weight: Vec<f64> = dataset
        .iter_points()
        .map(|p| sq_dist(p, dataset.point(first)))
        .collect();

    while chosen_ids.len() < k {
        let total: f64 = weight.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &w) in weight.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                target -= w;
                if target <= 0.0 {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding may leave target marginally positive; fall back to the
            // last positive-weight point.
            pick.unwrap_or_else(|| {
                weight
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("total > 0 implies a positive weight")
            })
        } else {
            // All remaining points coincide with chosen centers; pick any
            // index not yet used so the k returned indices stay distinct.
            let remaining: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            remaining[rng.gen_range(0..remaining.len())]
        };
        chosen_ids.push(next);
        chosen[next] = true;
        for (i, w) in weight.iter_mut().enumerate() {
            let d = sq_dist(dataset.point(i), dataset.point(next));
            if d < *w {
                *w = d;
            }
        }
    }
    Ok(chosen_ids
        .into_iter()
        .map(|i| dataset.point(i).to_vec())
        .collect())
}

/// One Lloyd iteration: assign points to the given centers, replace each
/// center by the mean of its members, and drop centers that received no
/// points. Returns (new centers, labels under the input centers, summed L2
/// movement of surviving centers).
pub fn lloyd_step(dataset: &Dataset, centers: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Vec<usize>, f64)> {
    let labels = assign_points(centers, dataset)?;
    let d = dataset.dim();
    let mut sums = vec![vec![0.0; d]; centers.len()];
    let mut counts = vec![0usize; centers.len()];
    for (p, &l) in dataset.iter_points().zip(&labels) {
        counts[l] += 1;
        for a in 0..d {
            sums[l][a] += p[a];
        }
    }
    let mut new_centers = Vec::with_capacity(centers.len());
    let mut movement = 0.0;
    for (i, (sum, &count)) in sums.iter().zip(&counts).enumerate() {
        if count == 0 {
            continue;
        }
        let mean: Vec<f64> = sum.iter().map(|s| s / count as f64).collect();
        movement += dist(&mean, &centers[i]);
        new_centers.push(mean);
    }
    Ok((new_centers, labels, movement))
}

/// Full k-means fit: k-means++ seeding, Lloyd iterations until the summed
/// center movement drops to `tol` (or `max_iters`), then a final assignment
/// with radii and inertia attached.
pub fn fit_kmeans(dataset: &Dataset, config: &KMeansConfig) -> Result<ClusterModel> {
    config.validate(dataset.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut centers = kmeanspp_init(dataset, config.k, &mut rng)?;
    for _ in 0..config.max_iters {
        let (new_centers, _, movement) = lloyd_step(dataset, &centers)?;
        centers = new_centers;
        if movement <= config.tol {
            break;
        }
    }
    // Final assignment against the converged centers. A center can still end
    // up empty here (tie shifts); drop and reassign until every cluster has
    // members.
    let mut labels;
    loop {
        labels = assign_points(&centers, dataset)?;
        let mut counts = vec![0usize; centers.len()];
        for &l in &labels {
            counts[l] += 1;
        }
        if counts.iter().all(|&c| c > 0) {
            break;
        }
        centers = centers
            .into_iter()
            .zip(&counts)
            .filter(|(_, &c)| c > 0)
            .map(|(c, _)| c)
            .collect();
    }
    let mut sizes = vec![0usize; centers.len()];
    for &l in &labels {
        sizes[l] += 1;
    }
    let radii = compute_radii(dataset, &centers, &labels)?;
    let inertia = compute_inertia(dataset, &centers, &labels)?;
    Ok(ClusterModel {
        centers,
        labels,
        radii,
        sizes,
        inertia,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(rows: &[&[f64]]) -> Dataset {
        Dataset::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn init_k_equals_n_is_a_permutation() {
        let ds = dataset(&[&[0.0], &[1.0], &[5.0], &[9.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut centers: Vec<f64> = kmeanspp_init(&ds, 4, &mut rng)
            .unwrap()
            .into_iter()
            .map(|c| c[0])
            .collect();
        centers.sort_by(f64::total_cmp);
        assert_eq!(centers, vec![0.0, 1.0, 5.0, 9.0]);
    }

    #[test]
    fn init_k1_returns_a_dataset_point() {
        let ds = dataset(&[&[0.0], &[1.0], &[2.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let centers = kmeanspp_init(&ds, 1, &mut rng).unwrap();
        assert!(ds.iter_points().any(|p| p == centers[0].as_slice()));
    }

    #[test]
    fn init_deterministic_for_fixed_seed() {
        let ds = dataset(&[&[0.0, 1.0], &[2.0, 3.0], &[9.0, 9.0], &[4.0, -1.0]]);
        let a = kmeanspp_init(&ds, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = kmeanspp_init(&ds, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_rejects_k_above_n() {
        let ds = dataset(&[&[0.0]]);
        assert!(kmeanspp_init(&ds, 2, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn init_handles_duplicate_points() {
        let ds = dataset(&[&[1.0], &[1.0], &[1.0]]);
        let centers = kmeanspp_init(&ds, 3, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(centers.len(), 3);
    }

    #[test]
    fn lloyd_fixed_point_has_zero_movement() {
        let ds = dataset(&[&[0.0, 0.0], &[2.0, 0.0], &[10.0, 0.0], &[12.0, 0.0]]);
        let centers = vec![vec![1.0, 0.0], vec![11.0, 0.0]];
        let (new_centers, _, movement) = lloyd_step(&ds, &centers).unwrap();
        assert_eq!(new_centers, centers);
        assert_eq!(movement, 0.0);
    }

    #[test]
    fn lloyd_single_center_moves_to_mean() {
        let ds = dataset(&[&[0.0, 0.0], &[2.0, 0.0]]);
        let (new_centers, labels, _) = lloyd_step(&ds, &[vec![5.0, 5.0]]).unwrap();
        assert_eq!(new_centers, vec![vec![1.0, 0.0]]);
        assert_eq!(labels, vec![0, 0]);
    }

    #[test]
    fn lloyd_converges_to_optimal_two_split() {
        // {0,1,9,10} with centers {0.4, 9.4}: exhaustive check over the three
        // contiguous 2-partitions gives {0,1}|{9,10} as optimal with means
        // 0.5 and 9.5.
        let ds = dataset(&[&[0.0], &[1.0], &[9.0], &[10.0]]);
        let mut centers = vec![vec![0.4], vec![9.4]];
        loop {
            let (next, _, movement) = lloyd_step(&ds, &centers).unwrap();
            centers = next;
            if movement == 0.0 {
                break;
            }
        }
        assert_eq!(centers, vec![vec![0.5], vec![9.5]]);
    }

    #[test]
    fn lloyd_drops_empty_clusters() {
        let ds = dataset(&[&[0.0], &[1.0]]);
        // Third center is nearest to nothing.
        let centers = vec![vec![0.0], vec![1.0], vec![100.0]];
        let (new_centers, _, _) = lloyd_step(&ds, &centers).unwrap();
        assert_eq!(new_centers.len(), 2);
    }

    #[test]
    fn fit_k1_center_is_dataset_mean() {
        let ds = dataset(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, 3.0]]);
        let model = fit_kmeans(&ds, &KMeansConfig::new(1, 42)).unwrap();
        assert_eq!(model.k(), 1);
        let c = &model.centers[0];
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12);
        let expected = compute_inertia(&ds, &model.centers, &model.labels).unwrap();
        assert!((model.inertia - expected).abs() < 1e-12);
    }

    #[test]
    fn fit_separates_two_blobs() {
        // Brute force over all 2-partitions of these 4 points confirms the
        // within-blob split {0,1}|{2,3} is optimal (inertia 0.02 + 0.02).
        let ds = dataset(&[&[0.0, 0.0], &[0.2, 0.0], &[10.0, 0.0], &[10.2, 0.0]]);
        let model = fit_kmeans(&ds, &KMeansConfig::new(2, 1)).unwrap();
        assert_eq!(model.labels[0], model.labels[1]);
        assert_eq!(model.labels[2], model.labels[3]);
        assert_ne!(model.labels[0], model.labels[2]);
        assert!((model.inertia - 0.04).abs() < 1e-12);
    }

    #[test]
    fn fit_deterministic_for_fixed_seed() {
        let ds = dataset(&[&[0.0, 1.0], &[1.0, 0.0], &[5.0, 5.0], &[6.0, 4.0], &[-3.0, 2.0]]);
        let cfg = KMeansConfig::new(3, 99);
        let a = fit_kmeans(&ds, &cfg).unwrap();
        let b = fit_kmeans(&ds, &cfg).unwrap();
        assert_eq!(a.centers, b.centers);
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn fit_model_satisfies_invariants() {
        let ds = dataset(&[&[0.0, 0.0], &[1.0, 1.0], &[8.0, 8.0], &[9.0, 9.0], &[4.0, 5.0]]);
        let model = fit_kmeans(&ds, &KMeansConfig::new(2, 5)).unwrap();
        assert_eq!(model.sizes.iter().sum::<usize>(), ds.n());
        for (i, p) in ds.iter_points().enumerate() {
            let l = model.labels[i];
            let d = dist(p, &model.centers[l]);
            assert!(d <= model.radii[l] + 1e-12);
        }
    }

    #[test]
    fn fit_rejects_invalid_config() {
        let ds = dataset(&[&[0.0]]);
        assert!(fit_kmeans(&ds, &KMeansConfig::new(0, 0)).is_err());
        assert!(fit_kmeans(&ds, &KMeansConfig::new(2, 0)).is_err());
    }
}
