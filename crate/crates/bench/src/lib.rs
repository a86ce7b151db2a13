//! Fixtures shared by the benchmarks.

use asymnet::generators::{minimal_from_polylines, perturb_polylines, planar_polylines, sphere_from_quadric};
use asymnet::AsymptoticNet;

/// An `n x n` net sampled from the interpolating quadric with parameter `a`.
pub fn sphere_net(a: f64, n: usize) -> AsymptoticNet {
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    sphere_from_quadric(a, &grid, &grid).expect("sphere fixture")
}

/// The first unfolded affine minimal net of size `m x n` from perturbed
/// planar polylines, starting the seed search at `seed`.
pub fn minimal_net(m: usize, n: usize, magnitude: f64, seed: u64) -> AsymptoticNet {
    let (alpha, beta) = planar_polylines(m, n);
    (seed..seed + 1000)
        .find_map(|s| {
            let (a, b) = perturb_polylines(&alpha, &beta, magnitude, s);
            minimal_from_polylines(&a, &b, Default::default()).ok()
        })
        .map(|(net, _)| net)
        .expect("no unfolded minimal net in 1000 seeds")
}
