//! Self-refinement of the stochastic convolution along a fixed Brownian path.

use volterra_core::analytic::Resolvent;
use volterra_core::stochastic::sample_increments_for;
use volterra_core::{stochastic_convolution, Grid1D, NoiseModel, SpatialMode, TimePartition};

/// Pairwise sums: the same path observed on a partition half as fine.
fn coarsen(increments: &[Vec<f64>]) -> Vec<Vec<f64>> {
    increments
        .chunks(2)
        .map(|pair| pair[0].iter().zip(&pair[1]).map(|(a, b)| a + b).collect())
        .collect()
}

fn sup_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Mean over 20 paths of the sup gaps between I = 25 and 50 steps and
/// between I = 100 and 200 steps, as a ratio.
fn refinement_ratio(model: &NoiseModel) -> f64 {
    let grid = Grid1D::symmetric(10.0, 101).unwrap();
    let fine_partition = TimePartition::new(1.0, 200).unwrap();
    let (mut coarse_gap, mut fine_gap) = (0.0, 0.0);
    for path in 0..20 {
        let i200 = sample_increments_for(model, &grid, &fine_partition, path);
        let i100 = coarsen(&i200);
        let i50 = coarsen(&i100);
        let i25 = coarsen(&i50);
        let conv = |inc: &Vec<Vec<f64>>| {
            let p = TimePartition::new(1.0, inc.len()).unwrap();
            stochastic_convolution(Resolvent::Heat, &p, inc, &grid).unwrap()
        };
        coarse_gap += sup_gap(&conv(&i25), &conv(&i50));
        fine_gap += sup_gap(&conv(&i100), &conv(&i200));
    }
    fine_gap / coarse_gap
}

#[test]
fn smooth_noise_converges_like_sqrt_tau() {
    // tau shrinks by 4, so an O(sqrt(tau)) gap shrinks by about 2
    let model = NoiseModel::new(1.0, SpatialMode::Smooth { length: 1.0 }, 5).unwrap();
    let ratio = refinement_ratio(&model);
    assert!(ratio < 0.65, "ratio {ratio}");
}

#[test]
fn per_node_noise_still_converges() {
    // white-in-space noise is rougher; only the slower tau^(1/4) rate is expected
    let ratio = refinement_ratio(&NoiseModel::per_node(1.0, 5).unwrap());
    assert!(ratio < 0.95, "ratio {ratio}");
}

#[test]
fn members_are_order_independent() {
    let grid = Grid1D::symmetric(5.0, 21).unwrap();
    let model = NoiseModel::per_node(0.3, 77).unwrap();
    let p = TimePartition::new(1.0, 8).unwrap();
    let forward: Vec<_> = (0..4).map(|k| sample_increments_for(&model, &grid, &p, k)).collect();
    let backward: Vec<_> = (0..4).rev().map(|k| sample_increments_for(&model, &grid, &p, k)).collect();
    for k in 0..4 {
        assert_eq!(forward[k], backward[3 - k]);
    }
}
