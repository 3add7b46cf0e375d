//! Core geometric primitives and the data types the rest of the crate
//! operates on.
//!
//! A [`Dataset`] is an immutable n x d matrix of finite coordinates.
//! Labels are plain `Vec<usize>` cluster ids; [`ClusterModel`] bundles the
//! output of a k-means fit (centers, labels, per-cluster radii, sizes,
//! inertia). All operations here are pure functions, safe to share across
//! threads.

use crate::error::{Error, Result};

/// Label value for points excluded as outliers by the zero-radius filter.
pub const OUTLIER_LABEL: usize = usize::MAX;

/// Immutable matrix of `n` points with `d` real-valued features each.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from row vectors. All rows must share one dimension
    /// and every coordinate must be finite.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset must contain at least one point"));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::invalid("points must have at least one dimension"));
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::invalid(format!(
                    "point {} has dimension {}, expected {}",
                    i,
                    row.len(),
                    d
                )));
            }
            for &x in row {
                if !x.is_finite() {
                    return Err(Error::invalid(format!(
                        "point {} contains a non-finite coordinate",
                        i
                    )));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Dataset {
            data,
            n: rows.len(),
            d,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.d)
    }

    /// Axis-aligned bounding box as (lower corner, upper corner).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.point(0).to_vec();
        let mut hi = lo.clone();
        for p in self.iter_points() {
            for a in 0..self.d {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    /// New dataset holding the given points (by index, in order).
    pub fn subset(&self, ids: &[usize]) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::invalid("subset must contain at least one point"));
        }
        let mut data = Vec::with_capacity(ids.len() * self.d);
        for &i in ids {
            data.extend_from_slice(self.point(i));
        }
        Ok(Dataset {
            data,
            n: ids.len(),
            d: self.d,
        })
    }
}

/// Output of a k-means fit with radii attached.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    /// Cluster centers, one vector of dimension d per cluster.
    pub centers: Vec<Vec<f64>>,
    /// Per-point cluster ids, indices into `centers`.
    pub labels: Vec<usize>,
    /// Distance from each center to its farthest assigned point.
    pub radii: Vec<f64>,
    /// Member count per cluster.
    pub sizes: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centers.len()
    }
}

/// L2 distance between two points of equal dimension.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::contract(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dist(a, b))
}

/// Unchecked L2 distance; callers guarantee equal dimensions.
#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    sq_dist(a, b).sqrt()
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum()
}

/// Labels each point with the index of its nearest center. Ties break to
/// the lowest center index.
pub fn assign_points(centers: &[Vec<f64>], dataset: &Dataset) -> Result<Vec<usize>> {
    if centers.is_empty() {
        return Err(Error::contract("assign_points requires at least one center"));
    }
    for c in centers {
        if c.len() != dataset.dim() {
            return Err(Error::contract(format!(
                "center dimension {} does not match dataset dimension {}",
                c.len(),
                dataset.dim()
            )));
        }
    }
    Ok(dataset
        .iter_points()
        .map(|p| nearest_center(centers, p))
        .collect())
}

#[inline]
pub(crate) fn nearest_center(centers: &[Vec<f64>], p: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = sq_dist(&centers[0], p);
    for (i, c) in centers.iter().enumerate().skip(1) {
        let d = sq_dist(c, p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Within-cluster sum of squared distances for a given assignment.
pub fn compute_inertia(dataset: &Dataset, centers: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if labels.len() != dataset.n() {
        return Err(Error::contract(format!(
            "label vector length {} does not match dataset size {}",
            labels.len(),
            dataset.n()
        )));
    }
    let mut total = 0.0;
    for (p, &l) in dataset.iter_points().zip(labels) {
        let c = centers
            .get(l)
            .ok_or_else(|| Error::contract(format!("label {} out of range", l)))?;
        total += sq_dist(c, p);
    }
    Ok(total)
}
