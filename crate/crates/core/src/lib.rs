//! Radius-guided k-means: standard k-means plus a geometric post-processing
//! pass that assigns every cluster a radius (distance from its center to its
//! farthest member) and merges clusters whose radius circles overlap, via
//! connected components of the overlap graph. A tiled pipeline clusters
//! axis-aligned regions independently and merges across tile boundaries,
//! and a benchmark harness scores pipelines against ground truth.

pub mod error;
pub mod eval;
pub mod io;
pub mod kmeans;
pub mod merge;
pub mod model;
pub mod svg;
pub mod synth;
pub mod tiling;

pub use error::{Error, Result};
pub use eval::{median_iqr, run_experiment, success_score, ExperimentReport, PipelineSpec};
pub use kmeans::{fit_kmeans, kmeanspp_init, lloyd_step, KMeansConfig};
pub use merge::{
    build_adjacency, compute_radii, connected_components, filter_zero_radius, k_sweep,
    merge_clusters, overlap, Circle, MergeGraph, MergedPartition, SweepReport,
};
pub use model::{
    assign_points, compute_inertia, euclidean_distance, ClusterModel, Dataset, OUTLIER_LABEL,
};
pub use tiling::{build_grid, cluster_tile, global_merge, local_k, tiled_pipeline, TileGrid, TileResult};
