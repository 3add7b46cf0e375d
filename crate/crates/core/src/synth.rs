//! Synthetic dataset generators.
//!
//! `two_circles` and `two_moons` back the walkthrough demos. The remaining
//! generators produce offline stand-ins for the FCPS benchmark shapes
//! (Atom, Chainlink, Hepta, Lsun, Target, Tetra, TwoDiamonds, Wingnut) with
//! the published sizes, dimensions and class structure. All generators are
//! pure functions of their parameters and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::LabeledDataset;
use crate::model::Dataset;

fn finish(name: &str, rows: Vec<Vec<f64>>, truth: Vec<usize>) -> LabeledDataset {
    LabeledDataset {
        dataset: Dataset::from_rows(rows).expect("generator produced a valid dataset"),
        truth: Some(truth),
        name: name.to_string(),
    }
}

fn normal(rng: &mut ChaCha8Rng, std: f64) -> f64 {
    if std == 0.0 {
        0.0
    } else {
        Normal::new(0.0, std).expect("finite std").sample(rng)
    }
}

/// Uniform point in a d-dimensional ball of the given radius (rejection
/// sampling from the enclosing cube).
fn ball_point(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let d = center.len();
    loop {
        let offset: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if offset.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return center
                .iter()
                .zip(&offset)
                .map(|(c, o)| c + o * radius)
                .collect();
        }
    }
}

/// Two concentric rings with radial Gaussian jitter; class = ring index
/// (0 = inner).
pub fn two_circles(
    n_per_ring: usize,
    inner_radius: f64,
    outer_radius: f64,
    jitter: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if !(0.0 < inner_radius && inner_radius < outer_radius) {
        return Err(Error::invalid("radii must satisfy 0 < inner < outer"));
    }
    if !(jitter >= 0.0) {
        return Err(Error::invalid("jitter must be non-negative"));
    }
    if n_per_ring == 0 {
        return Err(Error::invalid("n_per_ring must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * n_per_ring);
    let mut truth = Vec::with_capacity(2 * n_per_ring);
    // Evenly spaced angles with a little jitter keep the rings free of the
    // large sampling gaps that purely random angles would leave.
    for (class, base) in [(0usize, inner_radius), (1, outer_radius)] {
        for i in 0..n_per_ring {
            let angle = std::f64::consts::TAU * (i as f64 + rng.gen_range(-0.2..0.2))
                / n_per_ring as f64;
            let r = base + normal(&mut rng, jitter);
            rows.push(vec![r * angle.cos(), r * angle.sin()]);
            truth.push(class);
        }
    }
    Ok(finish("two-circles", rows, truth))
}

/// Two interleaved half-circles with isotropic Gaussian noise; class = moon
/// index.
pub fn two_moons(n_per_moon: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if !(noise >= 0.0) {
        return Err(Error::invalid("noise must be non-negative"));
    }
    if n_per_moon == 0 {
        return Err(Error::invalid("n_per_moon must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * n_per_moon);
    let mut truth = Vec::with_capacity(2 * n_per_moon);
    for _ in 0..n_per_moon {
        let t = rng.gen_range(0.0..std::f64::consts::PI);
        rows.push(vec![t.cos() + normal(&mut rng, noise), t.sin() + normal(&mut rng, noise)]);
        truth.push(0);
    }
    for _ in 0..n_per_moon {
        let t = rng.gen_range(0.0..std::f64::consts::PI);
        rows.push(vec![
            1.0 - t.cos() + normal(&mut rng, noise),
            0.5 - t.sin() + normal(&mut rng, noise),
        ]);
        truth.push(1);
    }
    Ok(finish("two-moons", rows, truth))
}

/// Atom: a dense core inside a hollow spherical shell (3-d, 800 points,
/// 2 classes).
pub fn atom(seed: u64) -> LabeledDataset {
    const SHELL_RADIUS: f64 = 50.0;
    const SHELL_JITTER: f64 = 1.0;
    const CORE_RADIUS: f64 = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(800);
    let mut truth = Vec::with_capacity(800);
    for _ in 0..400 {
        rows.push(ball_point(&mut rng, &[0.0, 0.0, 0.0], CORE_RADIUS));
        truth.push(0);
    }
    for _ in 0..400 {
        let dir = sphere_direction(&mut rng);
        let r = SHELL_RADIUS + normal(&mut rng, SHELL_JITTER);
        rows.push(dir.iter().map(|x| x * r).collect());
        truth.push(1);
    }
    finish("atom", rows, truth)
}

fn sphere_direction(rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-6 && norm2 <= 1.0 {
            let norm = norm2.sqrt();
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Chainlink: two interlocked rings in perpendicular planes (3-d, 1000
/// points, 2 classes).
pub fn chainlink(seed: u64) -> LabeledDataset {
    const RING_RADIUS: f64 = 1.0;
    const TUBE_STD: f64 = 0.005;
    const PER_RING: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(2 * PER_RING);
    let mut truth = Vec::with_capacity(2 * PER_RING);
    // Evenly spaced angles with a little jitter: the rings are thin,
    // smooth curves rather than noisy tubes.
    let angle = |rng: &mut ChaCha8Rng, i: usize| {
        std::f64::consts::TAU * (i as f64 + rng.gen_range(-0.2..0.2)) / PER_RING as f64
    };
    for i in 0..PER_RING {
        let t = angle(&mut rng, i);
        rows.push(vec![
            RING_RADIUS * t.cos() + normal(&mut rng, TUBE_STD),
            RING_RADIUS * t.sin() + normal(&mut rng, TUBE_STD),
            normal(&mut rng, TUBE_STD),
        ]);
        truth.push(0);
    }
    for i in 0..PER_RING {
        let t = angle(&mut rng, i);
        rows.push(vec![
            RING_RADIUS + RING_RADIUS * t.cos() + normal(&mut rng, TUBE_STD),
            normal(&mut rng, TUBE_STD),
            RING_RADIUS * t.sin() + normal(&mut rng, TUBE_STD),
        ]);
        truth.push(1);
    }
    // Tilt the whole figure so neither ring plane is axis-aligned.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for row in &mut rows {
        let (y, z) = (row[1], row[2]);
        row[1] = s * (y - z);
        row[2] = s * (y + z);
    }
    finish("chainlink", rows, truth)
}

/// Hepta: seven well-separated blobs, one central and six on the axes
/// (3-d, 212 points, 7 classes).
pub fn hepta(seed: u64) -> LabeledDataset {
    const OFFSET: f64 = 3.0;
    const BLOB_RADIUS: f64 = 0.45;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![vec![0.0, 0.0, 0.0]];
    for a in 0..3 {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0, 0.0, 0.0];
            c[a] = sign * OFFSET;
            centers.push(c);
        }
    }
    let mut rows = Vec::with_capacity(212);
    let mut truth = Vec::with_capacity(212);
    for (class, center) in centers.iter().enumerate() {
        let count = if class == 0 { 32 } else { 30 };
        for _ in 0..count {
            rows.push(ball_point(&mut rng, center, BLOB_RADIUS));
            truth.push(class);
        }
    }
    finish("hepta", rows, truth)
}

/// Lsun: an L-shaped class (two touching perpendicular bars) plus two round
/// clusters sitting in its notch (2-d, 400 points, 3 classes). The concave
/// L is what defeats plain k-means here.
pub fn lsun(seed: u64) -> LabeledDataset {
    const BALL_RADIUS: f64 = 0.5;
    const BALL_1: [f64; 2] = [2.2, 3.6];
    const BALL_2: [f64; 2] = [3.8, 2.2];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(400);
    let mut truth = Vec::with_capacity(400);
    // The L: vertical bar plus horizontal bar, one class.
    for _ in 0..100 {
        rows.push(vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..4.0)]);
        truth.push(0);
    }
    for _ in 0..100 {
        rows.push(vec![rng.gen_range(1.0..4.0), rng.gen_range(0.0..1.0)]);
        truth.push(0);
    }
    for _ in 0..100 {
        rows.push(ball_point(&mut rng, &BALL_1, BALL_RADIUS));
        truth.push(1);
    }
    for _ in 0..100 {
        rows.push(ball_point(&mut rng, &BALL_2, BALL_RADIUS));
        truth.push(2);
    }
    finish("lsun", rows, truth)
}

/// Target: a disk inside a ring, with four tiny far-out corner clusters
/// (2-d, 770 points, 6 classes).
pub fn target(seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(770);
    let mut truth = Vec::with_capacity(770);
    for _ in 0..370 {
        rows.push(ball_point(&mut rng, &[0.0, 0.0], 1.0));
        truth.push(0);
    }
    for _ in 0..388 {
        let angle = rng.gen_range(0.0..std::f64::consts::TAU);
        let r = rng.gen_range(2.5..3.5);
        rows.push(vec![r * angle.cos(), r * angle.sin()]);
        truth.push(1);
    }
    for (class, corner) in [[8.0, 8.0], [-8.0, 8.0], [-8.0, -8.0], [8.0, -8.0]]
        .iter()
        .enumerate()
    {
        for _ in 0..3 {
            rows.push(vec![
                corner[0] + rng.gen_range(-0.1..0.1),
                corner[1] + rng.gen_range(-0.1..0.1),
            ]);
            truth.push(2 + class);
        }
    }
    finish("target", rows, truth)
}

/// Tetra: four nearly touching spherical blobs at tetrahedron vertices
/// (3-d, 400 points, 4 classes).
pub fn tetra(seed: u64) -> LabeledDataset {
    const BLOB_RADIUS: f64 = 1.0;
    const EDGE: f64 = 2.15;
    let scale = EDGE / (2.0 * 2.0f64.sqrt());
    let vertices = [
        [scale, scale, scale],
        [scale, -scale, -scale],
        [-scale, scale, -scale],
        [-scale, -scale, scale],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(400);
    let mut truth = Vec::with_capacity(400);
    for (class, v) in vertices.iter().enumerate() {
        for _ in 0..100 {
            rows.push(ball_point(&mut rng, v, BLOB_RADIUS));
            truth.push(class);
        }
    }
    finish("tetra", rows, truth)
}

/// TwoDiamonds: two axis-aligned diamonds nearly touching at their tips
/// (2-d, 800 points, 2 classes).
pub fn two_diamonds(seed: u64) -> LabeledDataset {
    const HALF_GAP: f64 = 1.2; // diamond centers at +-HALF_GAP, unit tips
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(800);
    let mut truth = Vec::with_capacity(800);
    for (class, cx) in [(0usize, -HALF_GAP), (1, HALF_GAP)] {
        for _ in 0..400 {
            // Uniform in |x| + |y| <= 1 via a rotated unit square.
            let u = rng.gen_range(-0.5..0.5);
            let v = rng.gen_range(-0.5..0.5);
            rows.push(vec![cx + u + v, u - v]);
            truth.push(class);
        }
    }
    finish("two-diamonds", rows, truth)
}

/// Wingnut: two rectangles with opposing linear density gradients,
/// separated by a narrow gap (2-d, 1016 points, 2 classes).
pub fn wingnut(seed: u64) -> LabeledDataset {
    const SIDE: f64 = 3.0;
    const GAP: f64 = 0.3;
    const GRADIENT: f64 = 3.0; // density ratio between the two rect corners
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Linear density along one axis via rejection: accept u in [0, 1] with
    // probability (1 + GRADIENT * u) / (1 + GRADIENT).
    let graded = |rng: &mut ChaCha8Rng| -> f64 {
        loop {
            let u: f64 = rng.gen_range(0.0..1.0);
            if rng.gen_range(0.0..1.0) <= (1.0 + GRADIENT * u) / (1.0 + GRADIENT) {
                return u;
            }
        }
    };
    let mut rows = Vec::with_capacity(1016);
    let mut truth = Vec::with_capacity(1016);
    for _ in 0..508 {
        // Dense corner toward (SIDE, SIDE).
        let x = graded(&mut rng) * SIDE;
        let y = graded(&mut rng) * SIDE;
        rows.push(vec![x, y]);
        truth.push(0);
    }
    for _ in 0..508 {
        // Mirrored: dense corner toward (SIDE + GAP, 0).
        let x = SIDE + GAP + (1.0 - graded(&mut rng)) * SIDE;
        let y = (1.0 - graded(&mut rng)) * SIDE;
        rows.push(vec![x, y]);
        truth.push(1);
    }
    finish("wingnut", rows, truth)
}

/// Looks up a generator by CLI name. Demo generators use their default
/// parameters.
pub fn by_name(name: &str, seed: u64) -> Result<LabeledDataset> {
    match name {
        "atom" => Ok(atom(seed)),
        "chainlink" => Ok(chainlink(seed)),
        "hepta" => Ok(hepta(seed)),
        "lsun" => Ok(lsun(seed)),
        "target" => Ok(target(seed)),
        "tetra" => Ok(tetra(seed)),
        "two-diamonds" => Ok(two_diamonds(seed)),
        "wingnut" => Ok(wingnut(seed)),
        "two-circles" => two_circles(2000, 1.0, 2.2, 0.01, seed),
        "two-moons" => two_moons(250, 0.04, seed),
        other => Err(Error::invalid(format!(
            "unknown generator '{}'; known: atom, chainlink, hepta, lsun, target, tetra, two-diamonds, wingnut, two-circles, two-moons",
            other
        ))),
    }
}

/// Names of the benchmark generators, in report order.
pub const BENCHMARK_NAMES: [&str; 8] = [
    "atom",
    "chainlink",
    "hepta",
    "lsun",
    "target",
    "tetra",
    "two-diamonds",
    "wingnut",
];
