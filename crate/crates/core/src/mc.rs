//! Monte Carlo estimation of the configuration-space weight integrals of
//! small graphs.
//!
//! The weight of a graph with `k` aerial and `m >= 2` ground vertices is the
//! integral of the product of `(1/2pi) d arg((z_s - z_t)/(conj(z_s) - z_t))`
//! over aerial positions in the upper half plane, edges taken in edge order.
//! The conformal freedom is spent pinning the first two ground vertices at 0
//! and 1; further ground positions are integrated along the line. The form
//! degree must match the domain dimension `2k + m - 2`, otherwise the weight
//! is exactly zero and is reported as such rather than estimated.
//!
//! Sampling is importance sampling with an explicit mixture proposal per
//! aerial vertex: a broad Cauchy component plus log-annulus components
//! centered at every ground point and every previously placed vertex, which
//! keeps the estimator variance finite near the propagator singularities.
//! The stream is ChaCha-seeded and split into fixed blocks (one stream per
//! block), merged in block order: estimates are bit-identical for a given
//! `(graph, samples, seed)` regardless of thread count.

use crate::graph::{Graph, Species};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("weight integrals need a directed graph species, got {0:?}")]
    WrongSpecies(Species),
    #[error("graphs with more than {0} aerial vertices are out of desk range")]
    TooManyAerial(usize),
    #[error("the gauge fixing needs at least two ground vertices, got {0}")]
    TooFewGround(usize),
    #[error("coincident points in the propagator angle")]
    CoincidentPoints,
    #[error("the source point must lie in the open upper half plane")]
    NotUpperHalfPlane,
}

/// A seeded, reproducible weight estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl WeightEstimate {
    /// An exactly known zero (reported for degree mismatches).
    pub fn exact_zero(seed: u64) -> WeightEstimate {
        WeightEstimate {
            mean: 0.0,
            stderr: 0.0,
            samples: 0,
            seed,
        }
    }
}

/// The hyperbolic angle `arg((z - w)/(conj(z) - w))`, normalized to
/// `[0, 2 pi)`. `z` must lie in the open upper half plane.
pub fn propagator_angle(z: Complex64, w: Complex64) -> Result<f64, McError> {
    if z.im <= 0.0 {
        return Err(McError::NotUpperHalfPlane);
    }
    if z == w {
        return Err(McError::CoincidentPoints);
    }
    let ratio = (z - w) / (z.conj() - w);
    let mut angle = ratio.arg();
    if angle < 0.0 {
        angle += 2.0 * std::f64::consts::PI;
    }
    Ok(angle)
}

const MAX_AERIAL: usize = 3;
const BLOCK: u64 = 4096;

/// Monte Carlo estimate of the weight integral. Deterministic per
/// `(graph, samples, seed)`.
pub fn estimate_weight(g: &Graph, samples: u64, seed: u64) -> Result<WeightEstimate, McError> {
    if !g.species.directed() {
        return Err(McError::WrongSpecies(g.species));
    }
    if g.aerial > MAX_AERIAL {
        return Err(McError::TooManyAerial(MAX_AERIAL));
    }
    if g.ground < 2 {
        return Err(McError::TooFewGround(g.ground));
    }
    let dim = 2 * g.aerial + g.ground - 2;
    if g.edge_count() != dim {
        // Form degree mismatch: the integral vanishes identically.
        return Ok(WeightEstimate::exact_zero(seed));
    }

    let blocks = samples.div_ceil(BLOCK);
    let mut partials: Vec<(f64, f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let count = BLOCK.min(samples - b * BLOCK);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..count {
                let v = sample_value(g, &mut rng);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq, count)
        })
        .collect();
    // Deterministic merge in block order (collect preserves order, the fold
    // below fixes the summation sequence).
    let (sum, sumsq, n) = partials
        .drain(..)
        .fold((0.0, 0.0, 0u64), |(s, q, c), (bs, bq, bc)| {
            (s + bs, q + bq, c + bc)
        });
    let n_f = n as f64;
    let mean = sum / n_f;
    let variance = (sumsq / n_f - mean * mean).max(0.0);
    let stderr = (variance / n_f).sqrt();
    Ok(WeightEstimate {
        mean,
        stderr,
        samples: n,
        seed,
    })
}

/// One importance-sampled value of `integrand / proposal density`.
fn sample_value(g: &Graph, rng: &mut ChaCha8Rng) -> f64 {
    let k = g.aerial;
    let m = g.ground;

    // Ground positions: 0, 1 pinned, the rest by positive heavy-tailed
    // increments.
    let mut grounds: Vec<f64> = Vec::with_capacity(m);
    grounds.push(0.0);
    grounds.push(1.0);
    let mut density = 1.0f64;
    for _ in 2..m {
        let u: f64 = rng.gen_range(0.0..1.0);
        let step = (std::f64::consts::FRAC_PI_2 * u).tan();
        let prev = *grounds.last().unwrap();
        grounds.push(prev + step);
        // Half-Cauchy increment density.
        density *= 2.0 / (std::f64::consts::PI * (1.0 + step * step));
    }

    // Aerial positions, sequentially, each from a mixture of a broad
    // component and log-annuli at the anchors.
    let mut points: Vec<Complex64> = Vec::with_capacity(k);
    for _ in 0..k {
        let (z, q) = sample_point(rng, &grounds, &points);
        if z.im <= 0.0 {
            return 0.0;
        }
        points.push(z);
        density *= q;
    }

    // Positions of every vertex in the plane.
    let position = |v: usize| -> Complex64 {
        if v < k {
            points[v]
        } else {
            Complex64::new(grounds[v - k], 0.0)
        }
    };

    // The pulled-back form: rows are edges, columns the real coordinates
    // (x_i, y_i per aerial vertex, then the free ground positions).
    let e = g.edge_count();
    let mut jac = vec![0.0f64; e * e];
    for (row, &(s, t)) in g.edges.iter().enumerate() {
        let zs = position(s);
        let zt = position(t);
        // phi = Im log(zs - zt) - Im log(conj(zs) - zt).
        let a = zs - zt; // d phi = Im(d a / a) - Im(d b / b)
        let b = zs.conj() - zt;
        if a.norm_sqr() < 1e-300 || b.norm_sqr() < 1e-300 {
            return 0.0;
        }
        let inv_a = a.inv();
        let inv_b = b.inv();
        // Derivatives w.r.t. source coordinates (source is always aerial).
        {
            let col = 2 * s;
            // d/dx: da = 1, db = 1.
            jac[row * e + col] += (inv_a - inv_b).im;
            // d/dy: da = i, db = -i.
            jac[row * e + col + 1] += (Complex64::i() * inv_a + Complex64::i() * inv_b).im;
        }
        // Derivatives w.r.t. target coordinates.
        if t < k {
            let col = 2 * t;
            jac[row * e + col] += (-inv_a + inv_b).im;
            jac[row * e + col + 1] += (-Complex64::i() * inv_a + Complex64::i() * inv_b).im;
        } else if t >= k + 2 {
            // Free ground position: single real coordinate.
            let col = 2 * k + (t - k - 2);
            jac[row * e + col] += (-inv_a + inv_b).im;
        }
    }
    let det = determinant(&mut jac, e);
    let norm = (2.0 * std::f64::consts::PI).powi(e as i32);
    det / norm / density
}

/// Samples one aerial point from the mixture proposal and returns it with
/// its exact density.
fn sample_point(
    rng: &mut ChaCha8Rng,
    grounds: &[f64],
    prev: &[Complex64],
) -> (Complex64, f64) {
    let spread = grounds.last().unwrap().max(1.0) * 2.0;
    let anchors: Vec<Complex64> = grounds
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .chain(prev.iter().copied())
        .collect();
    let n_comp = 1 + anchors.len();
    let pick = rng.gen_range(0..n_comp);
    let z = if pick == 0 {
        broad_sample(rng, spread)
    } else {
        annulus_sample(rng, anchors[pick - 1])
    };
    // Full mixture density (each component weighted equally).
    let mut q = broad_density(z, spread);
    for &a in &anchors {
        q += annulus_density(z, a);
    }
    (z, q / n_comp as f64)
}

const R_MIN: f64 = 1e-9;
const R_MAX: f64 = 64.0;

fn broad_sample(rng: &mut ChaCha8Rng, spread: f64) -> Complex64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    let x = spread * (std::f64::consts::PI * (u - 0.5)).tan() + 0.5;
    let y = spread * (std::f64::consts::PI * (v - 0.5)).tan();
    Complex64::new(x, y)
}

fn broad_density(z: Complex64, spread: f64) -> f64 {
    let cauchy = |t: f64| spread / (std::f64::consts::PI * (spread * spread + t * t));
    cauchy(z.re - 0.5) * cauchy(z.im)
}

fn annulus_sample(rng: &mut ChaCha8Rng, center: Complex64) -> Complex64 {
    let u: f64 = rng.gen_range(0.0..1.0);
    let r = R_MIN * (R_MAX / R_MIN).powf(u);
    let theta: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    center + Complex64::from_polar(r, theta)
}

fn annulus_density(z: Complex64, center: Complex64) -> f64 {
    let r = (z - center).norm();
    if r < R_MIN || r > R_MAX {
        return 0.0;
    }
    // Log-uniform radius, uniform angle: density 1/(2 pi r^2 ln(R/r_min)).
    1.0 / (2.0 * std::f64::consts::PI * r * r * (R_MAX / R_MIN).ln())
}

/// In-place LU determinant with partial pivoting.
fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0f64;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
        }
    }
    det
}

/// Reverses the linear order of the ground vertices (the reflection of the
/// underlying geometry); the weight changes by `(-1)^{#edges}`.
pub fn ground_reflection(g: &Graph) -> Graph {
    let k = g.aerial;
    let m = g.ground;
    let map = |v: usize| if v < k { v } else { k + (m - 1) - (v - k) };
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|&(s, t)| (map(s), map(t))).collect();
    Graph::new(g.species, k, m, g.distinguished.map(map), edges)
        .expect("reflection preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formality::multi_wedge_graph;
    use crate::graph::{canonicalize, wedge_graph};

    #[test]
    fn propagator_angle_values() {
        let i = Complex64::i();
        let angle = propagator_angle(i, Complex64::new(0.0, 0.0)).unwrap();
        assert!((angle - std::f64::consts::PI).abs() < 1e-15);
        let angle2 = propagator_angle(2.0 * i, i).unwrap();
        assert!((angle2 - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(
            propagator_angle(Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.0)),
            Err(McError::NotUpperHalfPlane)
        );
        assert_eq!(propagator_angle(i, i), Err(McError::CoincidentPoints));
    }

    #[test]
    fn determinism() {
        let g = wedge_graph();
        let a = estimate_weight(&g, 20_000, 42).unwrap();
        let b = estimate_weight(&g, 20_000, 42).unwrap();
        assert_eq!(a, b);
        let c = estimate_weight(&g, 20_000, 43).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn wedge_weight_is_one_half() {
        let g = wedge_graph();
        let est = estimate_weight(&g, 400_000, 7).unwrap();
        assert!(est.stderr < 0.01, "stderr too large: {}", est.stderr);
        assert!(
            (est.mean - 0.5).abs() < 3.0 * est.stderr,
            "wedge estimate {} +- {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn double_wedge_weight_is_one_quarter() {
        let g = multi_wedge_graph(2);
        let est = estimate_weight(&g, 400_000, 11).unwrap();
        assert!(est.stderr < 0.01);
        assert!(
            (est.mean - 0.25).abs() < 3.0 * est.stderr,
            "double wedge estimate {} +- {}",
            est.mean,
            est.stderr
        );
    }

    #[test]
    fn degree_mismatch_is_exact_zero() {
        // One aerial vertex, one edge, two grounds: 1 != 2k + m - 2 = 2.
        let g = Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 1)]).unwrap();
        let est = estimate_weight(&g, 1000, 5).unwrap();
        assert_eq!(est, WeightEstimate::exact_zero(5));
    }

    #[test]
    fn edge_reordering_flips_the_estimate_sign() {
        let g = wedge_graph();
        let swapped =
            Graph::new(Species::Kontsevich, 1, 2, None, vec![(0, 2), (0, 1)]).unwrap();
        assert_eq!(canonicalize(&swapped).sign, -canonicalize(&g).sign);
        let a = estimate_weight(&g, 100_000, 3).unwrap();
        let b = estimate_weight(&swapped, 100_000, 3).unwrap();
        // Same points, negated rows: exactly opposite estimates.
        assert_eq!(a.mean, -b.mean);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn mirror_symmetry() {
        // The two-ground reflection of the second Duflo wheel at j = 2:
        // 4 edges, so the reflected weight equals the original.
        let g = crate::graph::wheel_family(crate::graph::WheelKind::DufloII, 2).unwrap();
        let r = ground_reflection(&g);
        let a = estimate_weight(&g, 300_000, 17).unwrap();
        let b = estimate_weight(&r, 300_000, 17).unwrap();
        let tol = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!(
            (a.mean - b.mean).abs() < tol,
            "mirror estimates {} vs {} (tol {tol})",
            a.mean,
            b.mean
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        let gc2 = crate::graph::wheel_family(crate::graph::WheelKind::Tetrahedron, 0).unwrap();
        assert_eq!(
            estimate_weight(&gc2, 10, 0).unwrap_err(),
            McError::WrongSpecies(Species::Gc2)
        );
        let one_ground = crate::graph::wheel_family(crate::graph::WheelKind::HomotopyBase, 2)
            .unwrap();
        assert_eq!(
            estimate_weight(&one_ground, 10, 0).unwrap_err(),
            McError::TooFewGround(1)
        );
        let big = multi_wedge_graph(4);
        assert_eq!(
            estimate_weight(&big, 10, 0).unwrap_err(),
            McError::TooManyAerial(3)
        );
    }
}
