//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use udcolor::geometry::Point;
use udcolor::instances;
use udcolor::udg::{build_graph, UnitDiskGraph};

/// Bron–Kerbosch with pivoting on a dense adjacency matrix.
pub fn brute_force_clique(g: &UnitDiskGraph) -> usize {
    let n = g.n();
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| u != v && g.are_adjacent(u, v)).collect())
        .collect();
    fn bk(adj: &[Vec<bool>], r: usize, p: Vec<usize>, x: Vec<usize>, best: &mut usize) {
        if p.is_empty() && x.is_empty() {
            *best = (*best).max(r);
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let pivot = *p
            .iter()
            .chain(&x)
            .max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count())
            .unwrap();
        let mut p = p;
        let mut x = x;
        let cands: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
        for v in cands {
            let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
            let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
            bk(adj, r + 1, np, nx, best);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    bk(&adj, 0, (0..n).collect(), Vec::new(), &mut best);
    best
}

/// Dense tableau simplex with Bland's rule for `max c.x, A x <= b, x >= 0`
/// with `b >= 0` (the origin is feasible).
pub fn simplex_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    let m = a.len();
    let n = c.len();
    // columns: n originals, m slacks, rhs
    let mut t = vec![vec![0.0; n + m + 1]; m + 1];
    for i in 0..m {
        t[i][..n].copy_from_slice(&a[i]);
        t[i][n + i] = 1.0;
        t[i][n + m] = b[i];
    }
    for j in 0..n {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    loop {
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -1e-12) else {
            break;
        };
        let mut row = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > 1e-12 {
                let ratio = t[i][n + m] / t[i][col];
                let better = ratio < best - 1e-15
                    || (ratio <= best + 1e-15 && row.is_some_and(|r: usize| basis[i] < basis[r]));
                if better {
                    best = ratio;
                    row = Some(i);
                }
            }
        }
        let r = row.expect("bounded program");
        let piv = t[r][col];
        for v in t[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..=m {
            if i != r && t[i][col] != 0.0 {
                let f = t[i][col];
                for j in 0..=n + m {
                    t[i][j] -= f * t[r][j];
                }
            }
        }
        basis[r] = col;
    }
    t[m][n + m]
}

/// `J1(x) = (1/pi) int_0^pi cos(tau - x sin tau) d tau`, trapezoid rule.
/// The integrand is smooth and periodic, so the rule converges spectrally.
pub fn j1_integral(x: f64) -> f64 {
    let steps = 2000;
    let h = std::f64::consts::PI / steps as f64;
    let f = |tau: f64| (tau - x * tau.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for k in 1..steps {
        s += f(k as f64 * h);
    }
    s * h / std::f64::consts::PI
}

pub fn uniform_graph(n: usize, side: f64, seed: u64) -> UnitDiskGraph {
    build_graph(&instances::uniform_box(n, side, side, seed).unwrap())
}

pub fn strip_graph(n: usize, length: f64, seed: u64) -> UnitDiskGraph {
    build_graph(&instances::strip(n, length, seed).unwrap())
}

pub fn t3() -> UnitDiskGraph {
    UnitDiskGraph::from_points([
        Point::new(0.0, 0.0),
        Point::new(0.5, 0.1),
        Point::new(1.0, 0.0),
    ])
    .unwrap()
}

/// A varied corpus: uniform boxes at several densities, strips, grids and
/// boxes with stacked multiplicities.
pub fn corpus(count: u64) -> Vec<(String, UnitDiskGraph)> {
    let mut out = Vec::new();
    for s in 0..count {
        let g = match s % 5 {
            0 => uniform_graph(60 + 40 * (s as usize % 7), 6.0, s),
            1 => uniform_graph(150, 3.0 + (s % 4) as f64, s),
            2 => strip_graph(120, 12.0, s),
            3 => build_graph(&instances::clustered_box(60, 4.0, 4.0, 4, s).unwrap()),
            _ => build_graph(&instances::grid(0.3 + 0.05 * (s % 5) as f64, 3.0, 2.0).unwrap()),
        };
        out.push((format!("instance {s}"), g));
    }
    out
}
