mod common;

use emdof::channel::*;
use emdof::kernels::KernelSpec;
use emdof::quadrature::{uniform_box_grid, DomainTag, Grid, DEFAULT_NODE_CAP};
use emdof::spectrum::symmetric_eigen;
use nalgebra::DMatrix;
use rand::Rng;

fn random_channel(seed: u64, n_tx: usize, n_rx: usize) -> ChannelOperator {
    let mut r = common::rng(seed);
    let mut grid = |n: usize| {
        let nodes: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let weights: Vec<f64> = (0..n).map(|_| r.random_range(0.1..2.0)).collect();
        Grid::from_parts(1, nodes, weights, DomainTag::Interval).unwrap()
    };
    let tx = grid(n_tx);
    let rx = grid(n_rx);
    let samples = (0..n_tx * n_rx)
        .map(|_| r.random_range(-1.0..1.0))
        .collect();
    ChannelOperator::new(tx, rx, samples).unwrap()
}

#[test]
fn hs_norm_equals_singular_value_energy() {
    let p = random_channel(1, 17, 11);
    let sv = singular_values(&p);
    let energy: f64 = sv.iter().map(|s| s * s).sum();
    let hs = hs_norm(&p);
    assert!((hs * hs - energy).abs() <= 1e-10 * energy);
    assert!(sv.windows(2).all(|w| w[0] >= w[1]) && sv.iter().all(|&s| s >= 0.0));
}

#[test]
fn apply_is_linear_and_bounded() {
    let p = random_channel(2, 13, 9);
    let mut r = common::rng(3);
    let hs = hs_norm(&p);
    for _ in 0..1000 {
        let g: Vec<f64> = (0..13).map(|_| r.random_range(-1.0..1.0)).collect();
        let out = apply(&p, &g).unwrap();
        assert!(field_norm(p.rx_grid(), &out) <= hs * field_norm(p.tx_grid(), &g) * (1.0 + 1e-12));
    }
    let g1: Vec<f64> = (0..13).map(|_| r.random_range(-1.0..1.0)).collect();
    let g2: Vec<f64> = (0..13).map(|_| r.random_range(-1.0..1.0)).collect();
    let alpha = -1.7;
    let mix: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| alpha * a + b).collect();
    let lhs = apply(&p, &mix).unwrap();
    let (a1, a2) = (apply(&p, &g1).unwrap(), apply(&p, &g2).unwrap());
    for ((l, x), y) in lhs.iter().zip(&a1).zip(&a2) {
        assert!((l - (alpha * x + y)).abs() <= 1e-12);
    }
    assert!(apply(&p, &[0.0; 13]).unwrap().iter().all(|&v| v == 0.0));
}

/// The operator norm of `M - M_n` for the rank-`n` SVD truncation, computed
/// independently as the square root of the top eigenvalue of `R^T R`.
fn truncation_residual_norm(m: &DMatrix<f64>, n: usize) -> f64 {
    let svd = m.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut approx = DMatrix::zeros(m.nrows(), m.ncols());
    for &i in order.iter().take(n) {
        approx += svd.singular_values[i] * u.column(i) * vt.row(i);
    }
    let r = m - approx;
    let rtr = r.transpose() * &r;
    let k = rtr.nrows();
    let data: Vec<f64> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| rtr[(i, j)])
        .collect();
    symmetric_eigen(data, k, false).unwrap().values[0]
        .max(0.0)
        .sqrt()
}

#[test]
fn truncation_error_is_next_singular_value() {
    for seed in 0..5 {
        let p = random_channel(10 + seed, 8, 12);
        let m = p.weighted_matrix();
        let sv = singular_values(&p);
        for n in 0..=5 {
            let got = truncation_residual_norm(&m, n);
            assert!(
                (got - truncation_error(&sv, n)).abs() <= 1e-10,
                "seed {seed} n={n}"
            );
        }
    }
}

#[test]
fn cdof_monotone_and_bounded() {
    let p = random_channel(4, 10, 10);
    let sv = singular_values(&p);
    let mut last = usize::MAX;
    for k in 1..50 {
        let delta = sv[0] * k as f64 / 40.0;
        let c = cdof(&p, delta).unwrap();
        assert!(c <= last);
        last = c;
    }
    assert_eq!(cdof(&p, sv[0] * 1.01).unwrap(), 0);
    assert!(cdof(&p, 0.0).is_err());
}

#[test]
fn ball_channel_is_reproducible() {
    let cfg = HarnessConfig {
        count_range: [2, 5],
        norm_fields: 50,
        ..HarnessConfig::default()
    };
    let a = run_rank_bound_trials(&cfg, &[(0.1, 0.1), (0.3, 0.1)], 4, 99).unwrap();
    let b = run_rank_bound_trials(&cfg, &[(0.1, 0.1), (0.3, 0.1)], 4, 99).unwrap();
    assert_eq!(a, b);
    let c = run_rank_bound_trials(&cfg, &[(0.1, 0.1)], 4, 100).unwrap();
    assert_ne!(a[0].geometry, c[0].geometry);
    for t in &a {
        assert!(t.norm_bound.holds);
        for r in &t.reports {
            assert!(r.rank_bound.holds, "trial {}: {:?}", t.trial, r.rank_bound);
        }
    }
}

#[test]
fn zero_channel_needs_no_modes() {
    let tx = uniform_box_grid(&[[0.0, 0.2]; 3], &[3, 3, 3], DEFAULT_NODE_CAP).unwrap();
    let rx = uniform_box_grid(&[[1.0, 1.2]; 3], &[2, 2, 2], DEFAULT_NODE_CAP).unwrap();
    let p = ChannelOperator::new(tx, rx, vec![0.0; 27 * 8]).unwrap();
    assert_eq!(cdof(&p, 1e-9).unwrap(), 0);
    let sv = singular_values(&p);
    assert_eq!(truncation_error(&sv, 0), 0.0);
}

#[test]
fn kernel_channel_matches_direct_samples() {
    let tx = uniform_box_grid(&[[0.0, 0.2]; 3], &[2, 2, 2], DEFAULT_NODE_CAP).unwrap();
    let rx = uniform_box_grid(&[[0.5, 0.6]; 3], &[2, 1, 1], DEFAULT_NODE_CAP).unwrap();
    let spec = KernelSpec::Ball3d { k0: 20.0 };
    let p = ChannelOperator::from_kernel(&spec, tx.clone(), rx.clone()).unwrap();
    assert_eq!(p.samples()[8 + 3], spec.eval(rx.node(1), tx.node(3)));
}
