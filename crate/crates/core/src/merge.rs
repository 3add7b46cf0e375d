//! Radius-guided cluster merging.
//!
//! Every cluster gets a radius (distance from its center to its farthest
//! member). Two clusters whose center distance is at most the sum of their
//! radii are adjacent; connected components of that adjacency graph become
//! the final clusters. The merge is a single pass: component centers and
//! radii are never recomputed, so components are exactly the transitive
//! closure of the pairwise rule.

use crate::error::{Error, Result};
use crate::eval::success_score;
use crate::kmeans::{fit_kmeans, KMeansConfig};
use crate::model::{dist, ClusterModel, Dataset, OUTLIER_LABEL};

/// Adjacency graph over cluster ids.
#[derive(Debug, Clone)]
pub struct MergeGraph {
    pub node_count: usize,
    /// Unordered pairs stored as (i, j) with i < j.
    pub edges: Vec<(usize, usize)>,
}

/// A cluster's footprint: center, radius, member count.
#[derive(Debug, Clone)]
pub struct Circle {
    pub center: Vec<f64>,
    pub radius: f64,
    pub size: usize,
}

/// Result of merging a [`ClusterModel`]'s clusters.
#[derive(Debug, Clone)]
pub struct MergedPartition {
    /// Original cluster id -> merged component id (dense, 0-based).
    pub component_of: Vec<usize>,
    /// Per-point component ids; [`OUTLIER_LABEL`] for filtered points.
    pub final_labels: Vec<usize>,
    pub component_count: usize,
    /// The original (center, radius) circles absorbed by each component.
    pub member_circles: Vec<Vec<Circle>>,
    /// Point ids excluded by the zero-radius filter.
    pub outliers: Vec<usize>,
}

/// Per-cluster radius: max distance from the center to an assigned point.
/// Every cluster id must have at least one member.
pub fn compute_radii(dataset: &Dataset, centers: &[Vec<f64>], labels: &[usize]) -> Result<Vec<f64>> {
    if labels.len() != dataset.n() {
        return Err(Error::contract("labels length does not match dataset"));
    }
    let mut radii = vec![f64::NEG_INFINITY; centers.len()];
    for (p, &l) in dataset.iter_points().zip(labels) {
        if l >= centers.len() {
            return Err(Error::contract(format!("label {} out of range", l)));
        }
        let d = dist(p, &centers[l]);
        if d > radii[l] {
            radii[l] = d;
        }
    }
    if let Some(i) = radii.iter().position(|r| *r < 0.0) {
        return Err(Error::contract(format!("cluster {} has no members", i)));
    }
    Ok(radii)
}

/// Non-strict overlap test: true iff the center distance is at most the sum
/// of the radii, so tangent circles merge.
pub fn overlap(center_a: &[f64], radius_a: f64, center_b: &[f64], radius_b: f64) -> bool {
    dist(center_a, center_b) <= radius_a + radius_b
}

/// Pairwise adjacency over all clusters; O(k^2), k is small relative to n.
pub fn build_adjacency(centers: &[Vec<f64>], radii: &[f64]) -> MergeGraph {
    debug_assert_eq!(centers.len(), radii.len());
    let k = centers.len();
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if overlap(&centers[i], radii[i], &centers[j], radii[j]) {
                edges.push((i, j));
            }
        }
    }
    MergeGraph { node_count: k, edges }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Smaller root wins, which keeps renumbering by smallest member
            // id a no-op walk later.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Connected components of the merge graph. Component ids are dense and
/// ordered by each component's smallest original member id.
pub fn connected_components(graph: &MergeGraph) -> (Vec<usize>, usize) {
    let mut uf = UnionFind::new(graph.node_count);
    for &(i, j) in &graph.edges {
        uf.union(i, j);
    }
    let mut component_of = vec![usize::MAX; graph.node_count];
    let mut count = 0;
    for i in 0..graph.node_count {
        let root = uf.find(i);
        if component_of[root] == usize::MAX {
            component_of[root] = count;
            count += 1;
        }
        component_of[i] = component_of[root];
    }
    (component_of, count)
}

/// Removes clusters that are exactly one point with radius zero, reporting
/// those points as outliers. Stacked duplicate points keep their cluster
/// (size > 1 even when the radius is zero).
pub fn filter_zero_radius(model: &ClusterModel) -> (ClusterModel, Vec<usize>) {
    let keep: Vec<bool> = model
        .radii
        .iter()
        .zip(&model.sizes)
        .map(|(&r, &s)| !(r == 0.0 && s == 1))
        .collect();
    if keep.iter().all(|&k| k) {
        return (model.clone(), Vec::new());
    }
    let mut remap = vec![usize::MAX; model.k()];
    let mut next = 0;
    for (i, &k) in keep.iter().enumerate() {
        if k {
            remap[i] = next;
            next += 1;
        }
    }
    let mut outliers = Vec::new();
    let labels: Vec<usize> = model
        .labels
        .iter()
        .enumerate()
        .map(|(p, &l)| {
            if keep[l] {
                remap[l]
            } else {
                outliers.push(p);
                OUTLIER_LABEL
            }
        })
        .collect();
    let pick = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(x, _)| *x)
            .collect()
    };
    let filtered = ClusterModel {
        centers: model
            .centers
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(c, _)| c.clone())
            .collect(),
        labels,
        radii: pick(&model.radii),
        sizes: model
            .sizes
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(s, _)| *s)
            .collect(),
        inertia: model.inertia,
    };
    (filtered, outliers)
}

/// Single-pass merge: optional zero-radius filter, adjacency, connected
/// components, relabel.
pub fn merge_clusters(model: &ClusterModel, filter_outliers: bool) -> MergedPartition {
    let (work, outliers) = if filter_outliers {
        filter_zero_radius(model)
    } else {
        (model.clone(), Vec::new())
    };
    let graph = build_adjacency(&work.centers, &work.radii);
    let (component_of, component_count) = connected_components(&graph);
    let final_labels: Vec<usize> = work
        .labels
        .iter()
        .map(|&l| {
            if l == OUTLIER_LABEL {
                OUTLIER_LABEL
            } else {
                component_of[l]
            }
        })
        .collect();
    let mut member_circles = vec![Vec::new(); component_count];
    for (i, &comp) in component_of.iter().enumerate() {
        member_circles[comp].push(Circle {
            center: work.centers[i].clone(),
            radius: work.radii[i],
            size: work.sizes[i],
        });
    }
    MergedPartition {
        component_of,
        final_labels,
        component_count,
        member_circles,
        outliers,
    }
}

/// One k's worth of sweep results.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub k: usize,
    /// Final component count of each run.
    pub component_counts: Vec<usize>,
    /// Most frequent component count (smallest wins ties).
    pub modal_components: usize,
    /// Mean pairwise label agreement across runs (1.0 for a single run).
    pub mean_agreement: f64,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Half-open index range into `entries` of the longest contiguous run
    /// sharing one modal component count (the "stable phase").
    pub stable_phase: (usize, usize),
}

impl SweepReport {
    pub fn stable_ks(&self) -> &[SweepEntry] {
        &self.entries[self.stable_phase.0..self.stable_phase.1]
    }
}

/// Runs the fit+merge pipeline `runs_per_k` times for each k and reports the
/// distribution of final component counts plus cross-run label agreement.
pub fn k_sweep(
    dataset: &Dataset,
    k_values: &[usize],
    runs_per_k: usize,
    base: &KMeansConfig,
) -> Result<SweepReport> {
    if k_values.is_empty() {
        return Err(Error::invalid("k_sweep requires at least one k value"));
    }
    if runs_per_k == 0 {
        return Err(Error::invalid("runs_per_k must be positive"));
    }
    for &k in k_values {
        if k == 0 || k > dataset.n() {
            return Err(Error::invalid(format!("k = {} out of range for n = {}", k, dataset.n())));
        }
    }
    let mut entries = Vec::with_capacity(k_values.len());
    for (ki, &k) in k_values.iter().enumerate() {
        let mut counts = Vec::with_capacity(runs_per_k);
        let mut label_sets = Vec::with_capacity(runs_per_k);
        for r in 0..runs_per_k {
            let seed = base.seed.wrapping_add((ki * runs_per_k + r) as u64);
            let cfg = base.with_k(k).with_seed(seed);
            let model = fit_kmeans(dataset, &cfg)?;
            let merged = merge_clusters(&model, false);
            counts.push(merged.component_count);
            label_sets.push(merged.final_labels);
        }
        let modal = modal_count(&counts);
        let mut agreement_sum = 0.0;
        let mut pairs = 0usize;
        for a in 0..label_sets.len() {
            for b in a + 1..label_sets.len() {
                agreement_sum += success_score(&label_sets[a], &label_sets[b])?;
                pairs += 1;
            }
        }
        let mean_agreement = if pairs == 0 { 1.0 } else { agreement_sum / pairs as f64 };
        entries.push(SweepEntry {
            k,
            component_counts: counts,
            modal_components: modal,
            mean_agreement,
        });
    }
    let stable_phase = longest_constant_run(&entries);
    Ok(SweepReport { entries, stable_phase })
}

fn modal_count(counts: &[usize]) -> usize {
    let mut best = counts[0];
    let mut best_freq = 0;
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if j - i > best_freq {
            best_freq = j - i;
            best = sorted[i];
        }
        i = j;
    }
    best
}

fn longest_constant_run(entries: &[SweepEntry]) -> (usize, usize) {
    let mut best = (0, 1);
    let mut start = 0;
    for i in 1..=entries.len() {
        if i == entries.len() || entries[i].modal_components != entries[start].modal_components {
            if i - start > best.1 - best.0 {
                best = (start, i);
            }
            start = i;
        }
    }
    best
}
