//! The two small linear programs bounding `(d(u) + d(v)) / 2` for an edge
//! of length `delta` in `[1/2, 1]`, normalized to `omega = 1`.
//!
//! Both programs are tiny (at most 4 variables and 7 hyperplanes), so they
//! are solved exactly by enumerating basic solutions.

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Feasibility tolerance for basic solutions.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum LpError {
    #[error("delta {0} outside [1/2, 1]")]
    DeltaOutOfRange(f64),
    #[error("linear program has no feasible basic solution")]
    Infeasible,
}

/// `max c.x  s.t.  A x <= b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

/// Solves the square system in place; `None` when (numerically) singular.
fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for k in col..n {
                        m[row][k] -= f * m[col][k];
                    }
                    rhs[row] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl DenseLp {
    pub fn vars(&self) -> usize {
        self.c.len()
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v >= -FEAS_TOL)
            && self.a.iter().zip(&self.b).all(|(row, &b)| {
                row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() <= b + FEAS_TOL
            })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// Best vertex among all intersections of `n` tight hyperplanes.
    pub fn maximize(&self) -> Result<LpSolution, LpError> {
        let n = self.vars();
        let m = self.a.len();
        // hyperplane k < m is row k; k >= m is x_{k-m} = 0
        let plane = |k: usize| -> (Vec<f64>, f64) {
            if k < m {
                (self.a[k].clone(), self.b[k])
            } else {
                let mut e = vec![0.0; n];
                e[k - m] = 1.0;
                (e, 0.0)
            }
        };
        let mut best: Option<LpSolution> = None;
        for_each_subset(m + n, n, |subset| {
            let (rows, rhs): (Vec<_>, Vec<_>) = subset.iter().map(|&k| plane(k)).unzip();
            let Some(x) = solve_square(rows, rhs) else {
                return;
            };
            if !self.is_feasible(&x) {
                return;
            }
            let value = self.objective(&x);
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(LpSolution { value, x });
            }
        });
        best.ok_or(LpError::Infeasible)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpVariant {
    F5,
    F4,
}

impl LpVariant {
    pub fn name(&self) -> &'static str {
        match self {
            LpVariant::F5 => "f5",
            LpVariant::F4 => "f4",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpInstance {
    pub delta: f64,
    pub variant: LpVariant,
}

impl LpInstance {
    pub fn new(delta: f64, variant: LpVariant) -> Result<Self, LpError> {
        if !(0.5..=1.0).contains(&delta) {
            return Err(LpError::DeltaOutOfRange(delta));
        }
        Ok(LpInstance { delta, variant })
    }

    pub fn lp(&self) -> DenseLp {
        let d = self.delta;
        match self.variant {
            LpVariant::F5 => {
                let a = 2.0 - (d * d / 4.0 + (1.0 - (1.0 - d * d / 4.0).sqrt()).powi(2)).sqrt();
                let c = 3.0 - (1.0 + d * d - d * 3f64.sqrt()).sqrt();
                DenseLp {
                    c: vec![1.0, 1.0, 2.0],
                    a: vec![vec![0.0, 1.0, 1.0], vec![a, 1.0, c]],
                    b: vec![5.0, 6.0],
                }
            }
            LpVariant::F4 => {
                let h = 3f64.sqrt() / 2.0;
                let a = 2.0
                    - (d * d / 4.0 + (h - (1.0 - (1.0 + d).powi(2) / 4.0).sqrt()).powi(2)).sqrt();
                let c = 3.0 - (1.0 + d * d - d).sqrt();
                let e = 3.0 - (1.0 - d).sqrt();
                DenseLp {
                    c: vec![1.0, 1.0, 2.0, 2.0],
                    a: vec![
                        vec![0.0, 1.0, 1.0, 1.0],
                        vec![1.0, 0.0, 2.0, 0.0],
                        vec![a, 1.0, c, e],
                    ],
                    b: vec![4.0, 2.0, 6.0],
                }
            }
        }
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.lp().maximize()
    }
}

pub fn solve_f5(delta: f64) -> Result<f64, LpError> {
    Ok(LpInstance::new(delta, LpVariant::F5)?.solve()?.value)
}

pub fn solve_f4(delta: f64) -> Result<f64, LpError> {
    Ok(LpInstance::new(delta, LpVariant::F4)?.solve()?.value)
}

/// `0.500, 0.505, ..., 1.000` computed without accumulated rounding.
pub fn delta_grid() -> Vec<f64> {
    (0..=100).map(|i| (500 + 5 * i) as f64 / 1000.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpCurve {
    pub variant: LpVariant,
    pub points: Vec<(f64, f64)>,
}

pub fn lp_curve(variant: LpVariant) -> LpCurve {
    let points = delta_grid()
        .into_iter()
        .map(|d| {
            let v = LpInstance { delta: d, variant }
                .solve()
                .expect("grid LPs are feasible");
            (d, v.value)
        })
        .collect();
    LpCurve { variant, points }
}

impl LpCurve {
    /// Header line, then `delta value` rows with 4-decimal values.
    pub fn to_dat(&self) -> String {
        let mut s = format!("delta {}\n", self.variant.name());
        for (d, v) in &self.points {
            s.push_str(&format!("{d:.3} {v:.4}\n"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseBound {
    pub value: f64,
    pub argmax: f64,
}

/// Max over the delta grid of `min(f4, f5)`; ties go to the larger delta.
pub fn pairwise_degree_bound() -> PairwiseBound {
    let f5 = lp_curve(LpVariant::F5);
    let f4 = lp_curve(LpVariant::F4);
    let mut best = PairwiseBound {
        value: f64::NEG_INFINITY,
        argmax: f64::NAN,
    };
    for ((d, a), (_, b)) in f5.points.iter().zip(&f4.points) {
        let v = a.min(*b);
        if v >= best.value {
            best = PairwiseBound {
                value: v,
                argmax: *d,
            };
        }
    }
    best
}

/// Writes `<prefix>lp5.dat` and `<prefix>lp4.dat`; a directory prefix gets
/// the files inside it.
pub fn emit_curves(prefix: &Path) -> io::Result<(PathBuf, PathBuf)> {
    let target = |name: &str| -> PathBuf {
        if prefix.is_dir() || prefix.as_os_str().is_empty() {
            prefix.join(name)
        } else {
            let mut s = prefix.as_os_str().to_owned();
            s.push(name);
            PathBuf::from(s)
        }
    };
    let p5 = target("lp5.dat");
    let p4 = target("lp4.dat");
    for (path, variant) in [(&p5, LpVariant::F5), (&p4, LpVariant::F4)] {
        let mut f = fs::File::create(path)?;
        f.write_all(lp_curve(variant).to_dat().as_bytes())?;
    }
    Ok((p5, p4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerated() {
        let mut n = 0;
        for_each_subset(7, 4, |_| n += 1);
        assert_eq!(n, 35);
        let mut all = Vec::new();
        for_each_subset(4, 2, |s| all.push(s.to_vec()));
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
    }

    #[test]
    fn endpoint_values() {
        assert!((solve_f5(1.0).unwrap() - 5.6746).abs() < 5e-4);
        assert!((solve_f4(0.5).unwrap() - 5.6698).abs() < 5e-4);
        assert!((solve_f4(1.0).unwrap() - 6.0).abs() < 1e-9);
    }

    #[test]
    fn origin_is_feasible_and_worse() {
        for v in [LpVariant::F5, LpVariant::F4] {
            let inst = LpInstance::new(0.75, v).unwrap();
            let lp = inst.lp();
            let zero = vec![0.0; lp.vars()];
            assert!(lp.is_feasible(&zero));
            assert!(inst.solve().unwrap().value > 0.0);
        }
        let lp = LpInstance::new(0.6, LpVariant::F4).unwrap().lp();
        assert!(lp.is_feasible(&[0.0, 4.0, 0.0, 0.0]));
        assert!(solve_f4(0.6).unwrap() >= 4.0);
    }

    #[test]
    fn x1_coefficients_positive() {
        for d in delta_grid() {
            for v in [LpVariant::F5, LpVariant::F4] {
                let lp = LpInstance { delta: d, variant: v }.lp();
                let last = lp.a.last().unwrap();
                assert!(last.iter().all(|c| c.is_finite()));
                assert!(last[0] > 0.0 && last[0] < 2.0, "{d} {v:?}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert_eq!(solve_f5(0.49), Err(LpError::DeltaOutOfRange(0.49)));
        assert!(solve_f4(1.01).is_err());
        assert!(solve_f4(f64::NAN).is_err());
    }

    #[test]
    fn bound_and_argmax() {
        let b = pairwise_degree_bound();
        assert!((b.value - 5.6746).abs() < 5e-4);
        assert_eq!(b.argmax, 1.0);
    }

    #[test]
    fn dat_format() {
        let s = lp_curve(LpVariant::F5).to_dat();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 102);
        assert_eq!(lines[0], "delta f5");
        assert_eq!(*lines.last().unwrap(), "1.000 5.6746");
        let s = lp_curve(LpVariant::F4).to_dat();
        assert_eq!(s.lines().nth(1), Some("0.500 5.6698"));
    }
}
