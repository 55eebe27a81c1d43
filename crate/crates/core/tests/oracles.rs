mod common;

use common::{brute_force_clique, j1_integral, simplex_max, uniform_graph};
use udcolor::fourier::{self, bessel_j1, first_bessel_zero, ColumnGrid, FourierConfig, Profile};
use udcolor::lpbounds::{delta_grid, solve_f4, solve_f5, LpInstance, LpVariant};

#[test]
fn lens_clique_matches_brute_force() {
    for seed in 0..60 {
        let n = 5 + (seed as usize * 7) % 36;
        let side = 1.0 + (seed % 4) as f64;
        let g = uniform_graph(n, side, seed);
        assert_eq!(g.clique_number(), brute_force_clique(&g), "seed {seed}");
    }
}

#[test]
fn brute_force_oracle_sanity() {
    assert_eq!(brute_force_clique(&common::t3()), 3);
    let g = uniform_graph(1, 1.0, 0);
    assert_eq!(brute_force_clique(&g), 1);
}

#[test]
fn enumeration_agrees_with_simplex() {
    for d in delta_grid() {
        for v in [LpVariant::F5, LpVariant::F4] {
            let lp = LpInstance { delta: d, variant: v }.lp();
            let ours = lp.maximize().unwrap().value;
            let theirs = simplex_max(&lp.c, &lp.a, &lp.b);
            assert!((ours - theirs).abs() < 1e-6, "{v:?} at {d}: {ours} vs {theirs}");
        }
    }
}

#[test]
fn f5_half_matches_simplex() {
    let lp = LpInstance::new(0.5, LpVariant::F5).unwrap().lp();
    let v = solve_f5(0.5).unwrap();
    assert!((v - simplex_max(&lp.c, &lp.a, &lp.b)).abs() < 1e-6);
    // frozen from an independent solver run
    assert!((v - 5.7245).abs() < 1e-4, "{v}");
}

#[test]
fn lp_grid_invariants() {
    let mut prev: Option<f64> = None;
    for d in delta_grid() {
        let (f5, f4) = (solve_f5(d).unwrap(), solve_f4(d).unwrap());
        assert!(f5 <= 6.0 + 1e-9 && f4 <= 6.0 + 1e-9);
        assert!(f5 > 0.0 && f4 > 0.0);
        if let Some(p) = prev {
            assert!((f5 - p).abs() < 0.05, "jump at {d}");
        }
        prev = Some(f5);
    }
    // values frozen from the independent solver
    for (d, f5, f4) in [(0.75, 5.6726, 5.6009), (0.9, 5.6672, 5.6248)] {
        assert!((solve_f5(d).unwrap() - f5).abs() < 1e-4);
        assert!((solve_f4(d).unwrap() - f4).abs() < 1e-4);
    }
}

#[test]
fn j1_matches_integral_representation() {
    for i in 0..=200 {
        let x = i as f64 * 0.1;
        let a = bessel_j1(x).unwrap();
        let b = j1_integral(x);
        assert!((a - b).abs() < 1e-12, "x={x}: {a} vs {b}");
    }
}

#[test]
fn bessel_zero_brackets_sign_change() {
    let b = first_bessel_zero();
    assert!(j1_integral(b).abs() < 1e-10);
    assert!(bessel_j1(b - 1e-6).unwrap() > 0.0);
    assert!(bessel_j1(b + 1e-6).unwrap() < 0.0);
}

fn small_cfg(profile: Profile) -> FourierConfig {
    FourierConfig {
        k_periods: 4,
        grid: 36,
        weight_scale: 3.0,
        profile,
    }
}

#[test]
fn column_grid_matches_generic_routines() {
    for profile in [Profile::Sinusoidal, Profile::Uniform] {
        let cfg = small_cfg(profile);
        let grid = ColumnGrid::new(&cfg).unwrap();
        let ps = grid.to_point_set();
        assert_eq!(ps.total_weight(), grid.total_weight());
        assert_eq!(grid.disk_clique_number(), ps.disk_clique_number(), "{profile:?}");
        // interior average degree against the expanded-degree routine
        let degs = ps.weighted_degrees();
        let (lo, hi) = (1.0 - 1e-9, grid.side - 1.0 + 1e-9);
        let inside = |x: f64| x >= lo && x <= hi;
        let (mut num, mut den) = (0f64, 0f64);
        for (s, d) in ps.sites().iter().zip(&degs) {
            if inside(s.position.x) && inside(s.position.y) {
                num += s.multiplicity as f64 * *d as f64;
                den += s.multiplicity as f64;
            }
        }
        let avg = grid.interior_average_degree().unwrap();
        assert!((avg - num / den).abs() < 1e-9, "{avg} vs {}", num / den);
    }
}

#[test]
fn full_enumeration_fallback_agrees() {
    // grid % k != 0: no period window, every candidate is enumerated
    let cfg = FourierConfig {
        k_periods: 3,
        grid: 25,
        weight_scale: 2.0,
        profile: Profile::Sinusoidal,
    };
    let grid = ColumnGrid::new(&cfg).unwrap();
    assert_eq!(grid.period, None);
    assert_eq!(grid.disk_clique_number(), grid.to_point_set().disk_clique_number());
}

#[test]
fn total_weight_direct_sum() {
    let cfg = FourierConfig {
        k_periods: 4,
        grid: 256,
        weight_scale: 10.0,
        profile: Profile::Sinusoidal,
    };
    let b = first_bessel_zero();
    let step = cfg.side(b) / 256.0;
    let mut direct = 0u64;
    for i in 0..=256 {
        let v = 10.0 * (1.0 + (2.0 * b * i as f64 * step).sin());
        let m = if (v - v.round()).abs() < 1e-9 { v.round() } else { v.ceil() };
        direct += 257 * m as u64;
    }
    let built = fourier::build_construction(&cfg).unwrap();
    assert_eq!(built.total_weight(), direct);
    let nominal = 10.0 * 257.0 * 257.0;
    // ceil adds about half a point per grid point on top of w * mean(g)
    assert!((direct as f64 / nominal - 1.0).abs() < 0.06);
}

#[test]
fn constant_profile_convolution_is_disk_area() {
    let v = fourier::sup_convolution_half(&FourierConfig::default().uniform()).unwrap();
    assert!((v / (std::f64::consts::PI / 4.0) - 1.0).abs() < 0.02, "{v}");
}

#[test]
fn uniform_disk_clique_is_density_times_area() {
    let cfg = FourierConfig::default().uniform();
    let grid = ColumnGrid::new(&cfg).unwrap();
    let expect = cfg.weight_scale * std::f64::consts::PI / 4.0 / (grid.step * grid.step);
    let got = grid.disk_clique_number() as f64;
    assert!((got / expect - 1.0).abs() < 0.03, "{got} vs {expect}");
}

#[test]
fn default_total_weight_near_nominal() {
    let cfg = FourierConfig::default();
    let grid = ColumnGrid::new(&cfg).unwrap();
    let rows = grid.rows as f64;
    let nominal = cfg.weight_scale * rows * rows;
    assert!((grid.total_weight() as f64 / nominal - 1.0).abs() < 0.02);
}
