//! Tiled clustering: grid the feature space, cluster each tile on its own
//! with a point-count-proportional k, then merge across tiles.
//!
//! Only circles whose radius ball pokes out of their tile can participate in
//! cross-tile merges; a ball fully inside a box cannot intersect anything
//! outside it, so restricting the global pass to boundary crossers loses
//! nothing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kmeans::{fit_kmeans, KMeansConfig};
use crate::merge::{merge_clusters, overlap, Circle, MergedPartition};
use crate::model::{Dataset, OUTLIER_LABEL};

/// Regular axis-aligned grid over a dataset's bounding box.
#[derive(Debug, Clone)]
pub struct TileGrid {
    /// Number of equal-width splits along each axis.
    pub splits: Vec<usize>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl TileGrid {
    pub fn tile_count(&self) -> usize {
        self.splits.iter().product()
    }

    /// Tile index for a point. Intervals are half-open; the maximal edge
    /// along each axis belongs to the last tile.
    pub fn tile_of(&self, p: &[f64]) -> usize {
        let mut id = 0;
        for a in 0..self.splits.len() {
            let s = self.splits[a];
            let idx = if s == 1 {
                0
            } else {
                let width = (self.hi[a] - self.lo[a]) / s as f64;
                (((p[a] - self.lo[a]) / width) as usize).min(s - 1)
            };
            id = id * s + idx;
        }
        id
    }

    /// Lower and upper corners of a tile's box.
    pub fn tile_bounds(&self, tile: usize) -> (Vec<f64>, Vec<f64>) {
        let d = self.splits.len();
        let mut idx = vec![0usize; d];
        let mut rest = tile;
        for a in (0..d).rev() {
            idx[a] = rest % self.splits[a];
            rest /= self.splits[a];
        }
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for a in 0..d {
            let width = (self.hi[a] - self.lo[a]) / self.splits[a] as f64;
            lo.push(self.lo[a] + width * idx[a] as f64);
            hi.push(if idx[a] + 1 == self.splits[a] {
                self.hi[a]
            } else {
                self.lo[a] + width * (idx[a] + 1) as f64
            });
        }
        (lo, hi)
    }
}

/// Builds an equal-width grid spanning the dataset's bounding box. Axes not
/// listed in `splits_per_axis` default to a single split.
pub fn build_grid(dataset: &Dataset, splits_per_axis: &[usize]) -> Result<TileGrid> {
    let d = dataset.dim();
    if splits_per_axis.len() > d {
        return Err(Error::invalid(format!(
            "{} split counts given for a {}-dimensional dataset",
            splits_per_axis.len(),
            d
        )));
    }
    let mut splits = splits_per_axis.to_vec();
    splits.resize(d, 1);
    if splits.iter().any(|&s| s == 0) {
        return Err(Error::invalid("every split count must be at least 1"));
    }
    let (lo, hi) = dataset.bounding_box();
    for a in 0..d {
        if splits[a] > 1 && hi[a] == lo[a] {
            return Err(Error::invalid(format!(
                "axis {} has zero extent but {} splits",
                a, splits[a]
            )));
        }
    }
    Ok(TileGrid { splits, lo, hi })
}

/// Local k for a tile: `pct` percent of the tile's point count, rounded up,
/// clamped to [1, point count].
pub fn local_k(tile_point_count: usize, pct: f64) -> usize {
    let raw = (pct / 100.0 * tile_point_count as f64).ceil() as usize;
    raw.clamp(1, tile_point_count.max(1))
}

/// A local merged component's circle, tagged with whether its radius ball
/// leaves the tile box.
#[derive(Debug, Clone)]
pub struct TileCircle {
    pub circle: Circle,
    /// Local component this circle belongs to.
    pub component: usize,
    pub crosses_boundary: bool,
}

/// Outcome of clustering one tile.
#[derive(Debug, Clone)]
pub struct TileResult {
    pub tile_id: usize,
    /// Dataset-global ids of the tile's points, in tile-local order.
    pub point_ids: Vec<usize>,
    pub partition: MergedPartition,
    pub circles: Vec<TileCircle>,
}

/// True iff the L2 ball (center, radius) is NOT contained in the box.
fn crosses_box(center: &[f64], radius: f64, lo: &[f64], hi: &[f64]) -> bool {
    center
        .iter()
        .zip(lo.iter().zip(hi))
        .any(|(&c, (&l, &h))| c - radius < l || c + radius > h)
}

/// Clusters one tile: k-means on the tile's points, local radius merge, and
/// boundary-crossing detection against the tile box.
pub fn cluster_tile(
    dataset: &Dataset,
    point_ids: Vec<usize>,
    tile_id: usize,
    bounds: (&[f64], &[f64]),
    k: usize,
    config: &KMeansConfig,
) -> Result<TileResult> {
    if point_ids.is_empty() {
        return Err(Error::contract("cluster_tile requires a non-empty tile"));
    }
    let local = dataset.subset(&point_ids)?;
    let model = fit_kmeans(&local, &config.with_k(k))?;
    let partition = merge_clusters(&model, false);
    let mut circles = Vec::new();
    for (comp, members) in partition.member_circles.iter().enumerate() {
        for c in members {
            circles.push(TileCircle {
                crosses_boundary: crosses_box(&c.center, c.radius, bounds.0, bounds.1),
                circle: c.clone(),
                component: comp,
            });
        }
    }
    Ok(TileResult {
        tile_id,
        point_ids,
        partition,
        circles,
    })
}

/// Merges local components across tiles. Two components of different tiles
/// join when some circle pair overlaps and at least one of the two circles
/// is a boundary crosser. `use_prefilter` skips pairs whose radius-inflated
/// bounding boxes are disjoint; it never changes the result.
pub fn global_merge(
    n_points: usize,
    results: &[TileResult],
    use_prefilter: bool,
) -> Result<MergedPartition> {
    let mut seen_tiles = std::collections::HashSet::new();
    for r in results {
        if !seen_tiles.insert(r.tile_id) {
            return Err(Error::contract(format!("duplicate tile id {}", r.tile_id)));
        }
    }

    // One global node per (tile, local component).
    let mut node_of = Vec::new(); // (result index, component) per node
    let mut node_base = Vec::with_capacity(results.len());
    for (ri, r) in results.iter().enumerate() {
        node_base.push(node_of.len());
        for c in 0..r.partition.component_count {
            node_of.push((ri, c));
        }
    }
    let node_count = node_of.len();

    // Group each node's circles and precompute a radius-inflated bounding
    // box per node for the spatial prefilter.
    let mut node_circles: Vec<Vec<&TileCircle>> = vec![Vec::new(); node_count];
    for (ri, r) in results.iter().enumerate() {
        for tc in &r.circles {
            node_circles[node_base[ri] + tc.component].push(tc);
        }
    }
    let boxes: Vec<(Vec<f64>, Vec<f64>)> = node_circles
        .iter()
        .map(|circles| inflated_bbox(circles))
        .collect();

    let mut edges = Vec::new();
    for u in 0..node_count {
        for v in u + 1..node_count {
            if node_of[u].0 == node_of[v].0 {
                continue; // within-tile structure is already final
            }
            if use_prefilter && boxes_disjoint(&boxes[u], &boxes[v]) {
                continue;
            }
            if components_touch(&node_circles[u], &node_circles[v]) {
                edges.push((u, v));
            }
        }
    }
    let graph = crate::merge::MergeGraph { node_count, edges };
    let (component_of_node, component_count) = crate::merge::connected_components(&graph);

    let mut final_labels = vec![OUTLIER_LABEL; n_points];
    let mut covered = vec![false; n_points];
    let mut outliers = Vec::new();
    for (ri, r) in results.iter().enumerate() {
        for (local_idx, &pid) in r.point_ids.iter().enumerate() {
            if pid >= n_points || covered[pid] {
                return Err(Error::contract(format!(
                    "point {} covered more than once or out of range",
                    pid
                )));
            }
            covered[pid] = true;
            let local_label = r.partition.final_labels[local_idx];
            if local_label == OUTLIER_LABEL {
                outliers.push(pid);
            } else {
                final_labels[pid] = component_of_node[node_base[ri] + local_label];
            }
        }
    }
    if let Some(missing) = covered.iter().position(|&c| !c) {
        return Err(Error::contract(format!(
            "point {} not covered by any tile",
            missing
        )));
    }
    outliers.sort_unstable();

    let mut member_circles = vec![Vec::new(); component_count];
    for (node, circles) in node_circles.iter().enumerate() {
        let comp = component_of_node[node];
        for tc in circles {
            member_circles[comp].push(tc.circle.clone());
        }
    }
    Ok(MergedPartition {
        component_of: component_of_node,
        final_labels,
        component_count,
        member_circles,
        outliers,
    })
}

fn inflated_bbox(circles: &[&TileCircle]) -> (Vec<f64>, Vec<f64>) {
    let d = circles[0].circle.center.len();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for tc in circles {
        for a in 0..d {
            lo[a] = lo[a].min(tc.circle.center[a] - tc.circle.radius);
            hi[a] = hi[a].max(tc.circle.center[a] + tc.circle.radius);
        }
    }
    (lo, hi)
}

fn boxes_disjoint(a: &(Vec<f64>, Vec<f64>), b: &(Vec<f64>, Vec<f64>)) -> bool {
    a.0.iter()
        .zip(&a.1)
        .zip(b.0.iter().zip(&b.1))
        .any(|((&alo, &ahi), (&blo, &bhi))| ahi < blo || bhi < alo)
}

fn components_touch(a: &[&TileCircle], b: &[&TileCircle]) -> bool {
    for ca in a {
        for cb in b {
            if !(ca.crosses_boundary || cb.crosses_boundary) {
                continue;
            }
            if overlap(&ca.circle.center, ca.circle.radius, &cb.circle.center, cb.circle.radius) {
                return true;
            }
        }
    }
    false
}

/// Full tiled pipeline: build the grid, cluster every non-empty tile (tiles
/// run in parallel; tile t uses seed `config.seed + t`), then merge across
/// tiles. `config.k` is ignored; each tile's k comes from [`local_k`].
pub fn tiled_pipeline(
    dataset: &Dataset,
    splits_per_axis: &[usize],
    pct: f64,
    config: &KMeansConfig,
) -> Result<MergedPartition> {
    if !(pct > 0.0 && pct <= 100.0) {
        return Err(Error::invalid(format!("pct = {} must be in (0, 100]", pct)));
    }
    let grid = build_grid(dataset, splits_per_axis)?;
    let mut tile_points: Vec<Vec<usize>> = vec![Vec::new(); grid.tile_count()];
    for (i, p) in dataset.iter_points().enumerate() {
        tile_points[grid.tile_of(p)].push(i);
    }
    let jobs: Vec<(usize, Vec<usize>)> = tile_points
        .into_iter()
        .enumerate()
        .filter(|(_, pts)| !pts.is_empty())
        .collect();
    let results: Vec<TileResult> = jobs
        .into_par_iter()
        .map(|(tile_id, pts)| {
            let (lo, hi) = grid.tile_bounds(tile_id);
            let k = local_k(pts.len(), pct);
            let cfg = config.with_seed(config.seed.wrapping_add(tile_id as u64));
            cluster_tile(dataset, pts, tile_id, (&lo, &hi), k, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    global_merge(dataset.n(), &results, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merge::merge_clusters;

    fn dataset(rows: Vec<Vec<f64>>) -> Dataset {
        Dataset::from_rows(rows).unwrap()
    }

    #[test]
    fn single_split_grid_is_bounding_box() {
        let ds = dataset(vec![vec![0.0, -1.0], vec![4.0, 3.0]]);
        let grid = build_grid(&ds, &[1, 1]).unwrap();
        assert_eq!(grid.tile_count(), 1);
        let (lo, hi) = grid.tile_bounds(0);
        assert_eq!(lo, vec![0.0, -1.0]);
        assert_eq!(hi, vec![4.0, 3.0]);
    }

    #[test]
    fn two_by_two_grid_has_four_quadrants() {
        let ds = dataset(vec![vec![0.0, 0.0], vec![4.0, 4.0]]);
        let grid = build_grid(&ds, &[2, 2]).unwrap();
        assert_eq!(grid.tile_count(), 4);
        assert_eq!(grid.tile_of(&[1.0, 1.0]), 0);
        assert_eq!(grid.tile_of(&[1.0, 3.0]), 1);
        assert_eq!(grid.tile_of(&[3.0, 1.0]), 2);
        assert_eq!(grid.tile_of(&[3.0, 3.0]), 3);
    }

    #[test]
    fn interior_boundary_point_belongs_to_one_tile() {
        let ds = dataset(vec![vec![0.0], vec![4.0]]);
        let grid = build_grid(&ds, &[2]).unwrap();
        // Half-open rule: the midpoint goes to the upper tile.
        assert_eq!(grid.tile_of(&[2.0]), 1);
        // Maximal edge belongs to the last tile.
        assert_eq!(grid.tile_of(&[4.0]), 1);
    }

    #[test]
    fn degenerate_axis_with_splits_is_rejected() {
        let ds = dataset(vec![vec![1.0, 0.0], vec![1.0, 5.0]]);
        assert!(build_grid(&ds, &[2, 1]).is_err());
        assert!(build_grid(&ds, &[1, 2]).is_ok());
    }

    #[test]
    fn local_k_arithmetic_and_clamps() {
        assert_eq!(local_k(200, 5.0), 10);
        assert_eq!(local_k(3, 5.0), 1);
        assert_eq!(local_k(10, 100.0), 10);
    }

    #[test]
    fn contained_blob_has_no_crossers() {
        let mut rows = Vec::new();
        for i in 0..10 {
            rows.push(vec![5.0 + (i % 3) as f64 * 0.1, 5.0 + (i / 3) as f64 * 0.1]);
        }
        // Corner points keep the bounding box big so the blob sits far from
        // every wall.
        rows.push(vec![0.0, 0.0]);
        rows.push(vec![10.0, 10.0]);
        let ds = dataset(rows);
        let grid = build_grid(&ds, &[1, 1]).unwrap();
        let (lo, hi) = grid.tile_bounds(0);
        let ids: Vec<usize> = (0..10).collect();
        let result = cluster_tile(&ds, ids, 0, (&lo, &hi), 2, &KMeansConfig::new(2, 1)).unwrap();
        // Blob circles stay inside; only circles touching the box corners
        // (none here, the corner points are excluded) would cross.
        assert!(result.circles.iter().all(|c| !c.crosses_boundary));
    }

    #[test]
    fn straddling_blob_crosses_in_both_tiles() {
        // Blob centered on the x = 2 wall of a 2-split grid over [0, 4],
        // with enough y-spread that each half's radius ball pokes past the
        // wall (the isotropic radius exceeds the center-to-wall distance).
        let mut rows = vec![vec![0.0, 0.0], vec![4.0, 4.0]];
        for i in 0..10 {
            rows.push(vec![1.7 + (i as f64) * 0.066, 1.0 + (i % 2) as f64 * 2.0]);
        }
        let ds = dataset(rows);
        let grid = build_grid(&ds, &[2, 1]).unwrap();
        let mut per_tile: Vec<Vec<usize>> = vec![Vec::new(); 2];
        for (i, p) in ds.iter_points().enumerate() {
            per_tile[grid.tile_of(p)].push(i);
        }
        for tile in 0..2 {
            let (lo, hi) = grid.tile_bounds(tile);
            let blob_ids: Vec<usize> = per_tile[tile].iter().copied().filter(|&i| i >= 2).collect();
            let result = cluster_tile(&ds, blob_ids, tile, (&lo, &hi), 1, &KMeansConfig::new(1, 3)).unwrap();
            assert!(
                result.circles.iter().any(|c| c.crosses_boundary),
                "tile {} fragment should cross the shared wall",
                tile
            );
        }
    }

    #[test]
    fn single_tile_matches_flat_pipeline() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 8) as f64, (i / 8) as f64 + if i % 2 == 0 { 20.0 } else { 0.0 }])
            .collect();
        let ds = dataset(rows);
        let pct = 10.0;
        let cfg = KMeansConfig::new(1, 77);
        let tiled = tiled_pipeline(&ds, &[1, 1], pct, &cfg).unwrap();
        let flat_model = fit_kmeans(&ds, &cfg.with_k(local_k(ds.n(), pct))).unwrap();
        let flat = merge_clusters(&flat_model, false);
        assert_eq!(tiled.final_labels, flat.final_labels);
    }

    #[test]
    fn straddling_blob_reconnects_globally() {
        // Two tight half-blobs on either side of the tile wall at x = 5.
        let mut rows = vec![vec![0.0, 0.0], vec![10.0, 1.0]];
        for i in 0..8 {
            rows.push(vec![4.4 + (i as f64) * 0.05, 0.5]);
            rows.push(vec![5.2 + (i as f64) * 0.05, 0.5]);
        }
        let ds = dataset(rows);
        let merged = tiled_pipeline(&ds, &[2, 1], 10.0, &KMeansConfig::new(1, 5)).unwrap();
        let left_label = merged.final_labels[2];
        let right_label = merged.final_labels[3];
        assert_eq!(left_label, right_label, "fragments should merge across the wall");
        // Every point labeled exactly once.
        assert!(merged.final_labels.iter().all(|&l| l != OUTLIER_LABEL));
    }

    #[test]
    fn global_merge_rejects_duplicate_coverage() {
        let ds = dataset(vec![vec![0.0], vec![1.0]]);
        let grid = build_grid(&ds, &[1]).unwrap();
        let (lo, hi) = grid.tile_bounds(0);
        let r0 = cluster_tile(&ds, vec![0, 1], 0, (&lo, &hi), 1, &KMeansConfig::new(1, 0)).unwrap();
        let mut r1 = r0.clone();
        r1.tile_id = 1;
        assert!(global_merge(2, &[r0.clone(), r1], true).is_err());
        assert!(global_merge(2, std::slice::from_ref(&r0), true).is_ok());
    }

    #[test]
    fn prefilter_does_not_change_results() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let g = (i % 3) as f64;
                vec![g * 3.0 + (i as f64 * 0.37).sin(), (i as f64 * 0.71).cos() + g]
            })
            .collect();
        let ds = dataset(rows);
        let grid = build_grid(&ds, &[2, 2]).unwrap();
        let mut per_tile: Vec<Vec<usize>> = vec![Vec::new(); 4];
        for (i, p) in ds.iter_points().enumerate() {
            per_tile[grid.tile_of(p)].push(i);
        }
        let results: Vec<TileResult> = per_tile
            .into_iter()
            .enumerate()
            .filter(|(_, pts)| !pts.is_empty())
            .map(|(t, pts)| {
                let (lo, hi) = grid.tile_bounds(t);
                let k = local_k(pts.len(), 15.0);
                cluster_tile(&ds, pts, t, (&lo, &hi), k, &KMeansConfig::new(1, t as u64)).unwrap()
            })
            .collect();
        let with = global_merge(ds.n(), &results, true).unwrap();
        let without = global_merge(ds.n(), &results, false).unwrap();
        assert_eq!(with.final_labels, without.final_labels);
    }
}
