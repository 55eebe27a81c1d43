//! Bessel numerics and the sinusoidal point-set construction whose average
//! degree approaches `4.0905` times its disk clique number.
//!
//! The construction places `ceil(w * g(x))` points at every grid point of
//! `[0, N]^2`, with `g(x, y) = 1 + sin(2 B x)` and `B` the first positive
//! zero of `J1`. Multiplicities depend on the column only, which the
//! measurements exploit: interior degrees and disk counts are sums over
//! columns instead of over points.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::Point;
use crate::udg::{half_disk_centers, WeightedPoint, WeightedPointSet};

/// Largest argument accepted by [`bessel_j1`].
pub const J1_DOMAIN_MAX: f64 = 20.0;
/// Limit of the average-degree to disk-clique ratio.
pub const RATIO_TARGET: f64 = 4.0905;
/// Largest total multiplicity a configuration may describe.
pub const WEIGHT_BUDGET: f64 = 1e9;
/// Same slack on radius-1/2 disk membership as the generic routine.
const DISK_EPS: f64 = 1e-9;
/// Multiplicities within this distance of an integer are taken as exact.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FourierError {
    #[error("J1 argument {0} outside [0, 20]")]
    Domain(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("total weight {0:.3e} exceeds the budget")]
    Budget(f64),
}

// double-double arithmetic, enough to keep the alternating series accurate

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        quick_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let p = q * d;
        let e = q.mul_add(d, -p);
        let r = ((self.hi - p) - e + self.lo) / d;
        quick_two_sum(q, r)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `J1(x) = sum_k (-1)^k / (k! (k+1)!) (x/2)^(2k+1)` on `[0, 20]`.
///
/// Terms reach about `1e7` near `x = 20` before cancelling, so both the
/// terms and the sum are carried in double-double.
pub fn bessel_j1(x: f64) -> Result<f64, FourierError> {
    if !(0.0..=J1_DOMAIN_MAX).contains(&x) {
        return Err(FourierError::Domain(x));
    }
    let h = x / 2.0;
    let z = Dd::from(h).mul(Dd::from(h)).neg();
    let mut term = Dd::from(h);
    let mut sum = Dd::from(0.0);
    let mut k = 0.0;
    loop {
        sum = sum.add(term);
        term = term.mul(z).div_f64((k + 1.0) * (k + 2.0));
        k += 1.0;
        if term.hi.abs() < 1e-15 {
            break;
        }
    }
    Ok(sum.hi + sum.lo)
}

/// First positive zero of `J1`, by bisection on `[3, 4]`.
pub fn first_bessel_zero() -> f64 {
    let j1 = |x: f64| bessel_j1(x).expect("bracket inside the domain");
    let (mut lo, mut hi) = (3.0, 4.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if j1(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `1 + sin(2 B x)`.
    Sinusoidal,
    /// Constant 1: the control square.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierConfig {
    pub k_periods: usize,
    /// Grid intervals per side; the step is `N / grid`.
    pub grid: usize,
    pub weight_scale: f64,
    pub profile: Profile,
}

impl Default for FourierConfig {
    fn default() -> Self {
        FourierConfig {
            k_periods: 16,
            grid: 512,
            weight_scale: 50.0,
            profile: Profile::Sinusoidal,
        }
    }
}

fn snap_ceil(v: f64) -> u32 {
    let r = v.round();
    if (v - r).abs() < SNAP_TOL {
        r.max(0.0) as u32
    } else {
        v.ceil().max(0.0) as u32
    }
}

impl FourierConfig {
    pub fn uniform(self) -> Self {
        FourierConfig {
            profile: Profile::Uniform,
            ..self
        }
    }

    /// Side length `N = k pi / B`.
    pub fn side(&self, b: f64) -> f64 {
        self.k_periods as f64 * PI / b
    }

    pub fn step(&self, b: f64) -> f64 {
        self.side(b) / self.grid as f64
    }

    pub fn g(&self, b: f64, x: f64) -> f64 {
        match self.profile {
            Profile::Sinusoidal => 1.0 + (2.0 * b * x).sin(),
            Profile::Uniform => 1.0,
        }
    }

    pub fn validate(&self, b: f64) -> Result<(), FourierError> {
        let bad = |s: String| Err(FourierError::InvalidConfig(s));
        if self.k_periods < 2 {
            return bad(format!("k_periods {} < 2", self.k_periods));
        }
        if self.grid == 0 {
            return bad("grid must be positive".into());
        }
        if !(self.weight_scale > 0.0 && self.weight_scale.is_finite()) {
            return bad(format!("weight_scale {}", self.weight_scale));
        }
        let step = self.step(b);
        if step > 0.1 {
            return bad(format!("grid step {step:.4} above 0.1"));
        }
        let rows = (self.grid + 1) as f64;
        let estimate = 2.0 * self.weight_scale.ceil().max(1.0) * rows * rows;
        if estimate > WEIGHT_BUDGET {
            return Err(FourierError::Budget(estimate));
        }
        Ok(())
    }
}

/// The construction as a grid whose multiplicity depends on the column.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnGrid {
    pub b: f64,
    pub side: f64,
    pub step: f64,
    /// `mult[i]`: multiplicity of every point in column `i`.
    pub mult: Vec<u32>,
    /// `g` at each column, before rounding.
    pub g: Vec<f64>,
    pub rows: usize,
    /// Columns per period of `g`, when the period is a whole number of them.
    pub period: Option<usize>,
}

impl ColumnGrid {
    pub fn new(cfg: &FourierConfig) -> Result<Self, FourierError> {
        let b = first_bessel_zero();
        cfg.validate(b)?;
        let step = cfg.step(b);
        let g: Vec<f64> = (0..=cfg.grid).map(|i| cfg.g(b, i as f64 * step)).collect();
        let mult = g.iter().map(|&v| snap_ceil(cfg.weight_scale * v)).collect();
        let period = match cfg.profile {
            Profile::Uniform => Some(1),
            Profile::Sinusoidal => (cfg.grid % cfg.k_periods == 0).then(|| cfg.grid / cfg.k_periods),
        };
        Ok(ColumnGrid {
            b,
            side: cfg.side(b),
            step,
            mult,
            g,
            rows: cfg.grid + 1,
            period,
        })
    }

    pub fn columns(&self) -> usize {
        self.mult.len()
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn total_weight(&self) -> u64 {
        self.rows as u64 * self.mult.iter().map(|&m| m as u64).sum::<u64>()
    }

    /// Columns whose points are at least 1 from the left and right edges.
    pub fn interior_columns(&self) -> std::ops::RangeInclusive<usize> {
        let lo = (1.0 / self.step - 1e-9).ceil() as usize;
        let hi = ((self.side - 1.0) / self.step + 1e-9).floor() as usize;
        lo..=hi
    }

    /// `half_counts[d]`: lattice offsets `(d, e)` with `(d^2 + e^2) step^2 <= r^2`.
    fn offset_counts(&self, r: f64) -> Vec<u64> {
        let reach = (r / self.step).floor() as i64 + 1;
        (0..=reach)
            .map(|d| {
                let inside = |e: i64| ((d * d + e * e) as f64) * self.step * self.step <= r * r;
                let mut t = ((r / self.step).powi(2) - (d * d) as f64).max(0.0).sqrt() as i64;
                while inside(t + 1) {
                    t += 1;
                }
                while t >= 0 && !inside(t) {
                    t -= 1;
                }
                if t < 0 { 0 } else { 2 * t as u64 + 1 }
            })
            .collect()
    }

    /// Multiplicity-weighted average degree over interior points.
    pub fn interior_average_degree(&self) -> Result<f64, FourierError> {
        let counts = self.offset_counts(1.0);
        let reach = counts.len() as i64 - 1;
        let cols = self.interior_columns();
        let (mut num, mut den) = (0f64, 0f64);
        for i in cols {
            let m = self.mult[i] as f64;
            if m == 0.0 {
                continue;
            }
            let mut around = 0u64;
            for d in -reach..=reach {
                let c = i as i64 + d;
                if c >= 0 && (c as usize) < self.columns() {
                    around += self.mult[c as usize] as u64 * counts[d.unsigned_abs() as usize];
                }
            }
            num += m * (around as f64 - 1.0);
            den += m;
        }
        if den == 0.0 {
            return Err(FourierError::InvalidConfig("no weighted interior points".into()));
        }
        Ok(num / den)
    }

    /// Sup over interior sample points of `step^2` times the sum of `g` over
    /// grid points within 1/2.
    pub fn sup_convolution_half(&self) -> f64 {
        let counts = self.offset_counts(0.5);
        let reach = counts.len() as i64 - 1;
        self.interior_columns()
            .map(|i| {
                let s: f64 = (-reach..=reach)
                    .filter_map(|d| {
                        let c = i as i64 + d;
                        (c >= 0 && (c as usize) < self.columns())
                            .then(|| self.g[c as usize] * counts[d.unsigned_abs() as usize] as f64)
                    })
                    .sum();
                s * self.step * self.step
            })
            .fold(0.0, f64::max)
    }

    /// Total multiplicity inside the closed radius-1/2 disk around `c`.
    pub fn disk_weight(&self, c: Point) -> u64 {
        let limit = 0.25 + DISK_EPS;
        let last = self.rows as i64 - 1;
        let lo_col = (((c.x - 0.5) / self.step).floor() as i64 - 1).max(0);
        let hi_col = (((c.x + 0.5) / self.step).ceil() as i64 + 1).min(self.columns() as i64 - 1);
        let mut total = 0u64;
        for i in lo_col..=hi_col {
            let m = self.mult[i as usize];
            if m == 0 {
                continue;
            }
            let x = i as f64 * self.step;
            let inside = |j: i64| Point::new(x, j as f64 * self.step).dist_sq(&c) <= limit;
            let dx2 = (x - c.x) * (x - c.x);
            if dx2 > limit + 1e-6 {
                continue;
            }
            let s = (limit - dx2).max(0.0).sqrt();
            let mut lo = ((c.y - s) / self.step).ceil() as i64;
            let mut hi = ((c.y + s) / self.step).floor() as i64;
            // settle the interval ends with the exact predicate
            while inside(lo - 1) {
                lo -= 1;
            }
            while lo <= hi && !inside(lo) {
                lo += 1;
            }
            while inside(hi + 1) {
                hi += 1;
            }
            while hi >= lo && !inside(hi) {
                hi -= 1;
            }
            let (lo, hi) = (lo.max(0), hi.min(last));
            if hi >= lo {
                total += m as u64 * (hi - lo + 1) as u64;
            }
        }
        total
    }

    /// Exact disk clique number over the candidate centers: every grid
    /// point and the radius-1/2 circles through pairs within distance 1.
    ///
    /// Rows are translation invariant and columns periodic, so candidates
    /// from one row and one period of columns far from the edges dominate
    /// all others; without that room every candidate is enumerated.
    pub fn disk_clique_number(&self) -> u64 {
        let margin = (1.0 / self.step).ceil() as usize + 2;
        let reduced = self.period.filter(|&p| {
            self.rows / 2 >= margin && self.rows / 2 + margin < self.rows && margin + p + margin < self.columns()
        });
        let (rows, cols): (Vec<usize>, Vec<usize>) = match reduced {
            Some(p) => (vec![self.rows / 2], (margin..margin + p).collect()),
            None => ((0..self.rows).collect(), (0..self.columns()).collect()),
        };
        let reach = (1.0 / self.step).floor() as i64 + 1;
        let anchors: Vec<(usize, usize)> = cols
            .iter()
            .flat_map(|&i| rows.iter().map(move |&j| (i, j)))
            .filter(|&(i, _)| self.mult[i] > 0)
            .collect();
        anchors
            .par_iter()
            .map(|&(i, j)| {
                let p = Point::new(self.coord(i), j as f64 * self.step);
                let mut best = self.disk_weight(p);
                for di in -reach..=reach {
                    let ci = i as i64 + di;
                    if ci < 0 || ci as usize >= self.columns() || self.mult[ci as usize] == 0 {
                        continue;
                    }
                    for dj in -reach..=reach {
                        let cj = j as i64 + dj;
                        if cj < 0 || cj as usize >= self.rows || (di, dj) == (0, 0) {
                            continue;
                        }
                        // full enumeration sees every pair from both ends
                        if reduced.is_none() && (di, dj) < (0, 0) {
                            continue;
                        }
                        let q = Point::new(self.coord(ci as usize), cj as f64 * self.step);
                        if let Some(centers) = half_disk_centers(p, q) {
                            for c in centers {
                                best = best.max(self.disk_weight(c));
                            }
                        }
                    }
                }
                best
            })
            .max()
            .unwrap_or(0)
    }

    /// Expanded point set, zero-multiplicity grid points omitted.
    pub fn to_point_set(&self) -> WeightedPointSet {
        let mut sites = Vec::new();
        for (i, &m) in self.mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            for j in 0..self.rows {
                sites.push(WeightedPoint {
                    position: Point::new(self.coord(i), j as f64 * self.step),
                    multiplicity: m,
                });
            }
        }
        WeightedPointSet::new(sites).expect("positive multiplicities and finite coordinates")
    }
}

pub fn build_construction(cfg: &FourierConfig) -> Result<WeightedPointSet, FourierError> {
    Ok(ColumnGrid::new(cfg)?.to_point_set())
}

pub fn sup_convolution_half(cfg: &FourierConfig) -> Result<f64, FourierError> {
    Ok(ColumnGrid::new(cfg)?.sup_convolution_half())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierReport {
    pub b: f64,
    pub side: f64,
    pub step: f64,
    pub total_weight: u64,
    pub sup_conv_half: f64,
    pub avg_degree: f64,
    pub omega_d: u64,
    pub ratio: f64,
}

impl fmt::Display for FourierReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "B {:.10}", self.b)?;
        writeln!(f, "side {:.6}", self.side)?;
        writeln!(f, "step {:.6}", self.step)?;
        writeln!(f, "total_weight {}", self.total_weight)?;
        writeln!(f, "sup_conv_half {:.6}", self.sup_conv_half)?;
        writeln!(f, "avg_degree {:.4}", self.avg_degree)?;
        writeln!(f, "omega_D {}", self.omega_d)?;
        write!(f, "ratio {:.6}", self.ratio)
    }
}

pub fn measure_ratio(cfg: &FourierConfig) -> Result<FourierReport, FourierError> {
    let grid = ColumnGrid::new(cfg)?;
    let avg_degree = grid.interior_average_degree()?;
    let omega_d = grid.disk_clique_number();
    Ok(FourierReport {
        b: grid.b,
        side: grid.side,
        step: grid.step,
        total_weight: grid.total_weight(),
        sup_conv_half: grid.sup_convolution_half(),
        avg_degree,
        omega_d,
        ratio: avg_degree / omega_d.max(1) as f64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub level: usize,
    pub config: FourierConfig,
    pub report: FourierReport,
}

/// Level `l` doubles `grid` `l` times, halving the step each time. Scaling
/// `k_periods` along with `grid` would keep the step, and with it the
/// ratio, unchanged: the interior measurements do not see the side length.
pub fn refinement_sweep(base: &FourierConfig, levels: usize) -> Result<Vec<SweepRow>, FourierError> {
    (0..levels)
        .map(|level| {
            let config = FourierConfig {
                grid: base.grid << level,
                ..*base
            };
            Ok(SweepRow {
                level,
                config,
                report: measure_ratio(&config)?,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("level,k_periods,grid,weight_scale,step,avg_degree,omega_d,ratio\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{:.6},{:.4},{},{:.6}\n",
            r.level,
            r.config.k_periods,
            r.config.grid,
            r.config.weight_scale,
            r.report.step,
            r.report.avg_degree,
            r.report.omega_d,
            r.report.ratio
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j1_small_values() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        assert!((bessel_j1(1.0).unwrap() - 0.4400505857).abs() < 1e-9);
        assert!((bessel_j1(1e-6).unwrap() / 1e-6 - 0.5).abs() < 1e-6);
        assert!(bessel_j1(-0.1).is_err());
        assert!(bessel_j1(20.5).is_err());
    }

    #[test]
    fn zero_and_companion_constant() {
        let b = first_bessel_zero();
        assert!((b - 3.8317).abs() < 1e-4);
        assert!((b - 3.8317059702).abs() < 1e-9);
        assert!(bessel_j1(b).unwrap().abs() < 1e-10);
        assert!(bessel_j1(b - 0.1).unwrap() > 0.0);
        assert!(bessel_j1(b + 0.1).unwrap() < 0.0);
        let r = bessel_j1(2.0 * b).unwrap() / (2.0 * b);
        assert!((r - 0.0226343).abs() < 1e-6, "{r}");
        assert!((4.0 * (1.0 + r) - RATIO_TARGET).abs() < 1e-4);
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_ceil(0.0), 0);
        assert_eq!(snap_ceil(-1e-16), 0);
        assert_eq!(snap_ceil(100.0 + 1e-12), 100);
        assert_eq!(snap_ceil(99.2), 100);
    }

    #[test]
    fn config_validation() {
        let b = first_bessel_zero();
        assert!(FourierConfig::default().validate(b).is_ok());
        let coarse = FourierConfig {
            grid: 16,
            ..FourierConfig::default()
        };
        assert!(coarse.validate(b).is_err());
        let huge = FourierConfig {
            k_periods: 64,
            grid: 8192,
            weight_scale: 50.0,
            profile: Profile::Sinusoidal,
        };
        assert!(matches!(huge.validate(b), Err(FourierError::Budget(_))));
        let one = FourierConfig {
            k_periods: 1,
            ..FourierConfig::default()
        };
        assert!(one.validate(b).is_err());
    }

    #[test]
    fn multiplicity_extremes() {
        let cfg = FourierConfig {
            k_periods: 4,
            grid: 256,
            weight_scale: 10.0,
            profile: Profile::Sinusoidal,
        };
        let grid = ColumnGrid::new(&cfg).unwrap();
        // 2 B x = pi/2 at x = N/(4k) = column M/(4k)
        assert_eq!(grid.mult[16], 20);
        // sin = -1 at column 3M/(4k)
        assert_eq!(grid.mult[48], 0);
        assert_eq!(grid.period, Some(64));
    }

    #[test]
    fn offset_counts_match_direct_enumeration() {
        let cfg = FourierConfig {
            k_periods: 4,
            grid: 64,
            weight_scale: 1.0,
            profile: Profile::Uniform,
        };
        let grid = ColumnGrid::new(&cfg).unwrap();
        for r in [0.5, 1.0] {
            let counts = grid.offset_counts(r);
            let reach = counts.len() as i64 - 1;
            for d in 0..=reach {
                let direct = (-reach - 2..=reach + 2)
                    .filter(|&e| ((d * d + e * e) as f64) * grid.step * grid.step <= r * r)
                    .count() as u64;
                assert_eq!(counts[d as usize], direct);
            }
        }
    }
}
