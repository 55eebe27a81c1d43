//! Coloring algorithms for unit-disk graphs and their validators.
//!
//! Every algorithm takes the clique number `omega` as a parameter; the
//! palette bounds are stated in terms of it. [`exact_omega`] supplies the
//! exact value when the caller does not have one.

mod fractional;
mod listcolor;
mod strip;
mod stripes;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::udg::UnitDiskGraph;

pub use fractional::{
    color_fractional, coverage_lower_bound, FractionalMode, FractionalOutcome, FractionalProgram,
    FractionalResult, RegionSystem,
};
pub use listcolor::{
    a_threshold_exceeded, check_high_degree_set, color_568, color_greedy_baseline,
    list_round_cap, palette_568, BaselineProgram, FiveSixEightProgram, HighDegreeReport,
    ListOutcome,
};
pub use strip::{strip_greedy, strip_greedy_vertices, StripPoint};
pub use stripes::{color_4omega, FourOmegaProgram, PartOutcome, Region, StripeLayout};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColoringError {
    #[error("points span {spread} vertically, more than one strip height")]
    NotInStrip { spread: f64 },
    #[error("round cap {cap} reached with {unfinished} nodes undecided")]
    RoundCapExceeded { cap: usize, unfinished: usize },
    #[error("vertex {vertex}: {reason}")]
    NodeFailed { vertex: usize, reason: String },
    #[error("no vertex is covered by any region system (r={r}, eps={eps})")]
    Infeasible { r: usize, eps: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stripe layout violates separation: {0}")]
    Layout(String),
}

/// Proper coloring; `colors[v]` for vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<u32>,
    pub palette_size: u32,
}

impl Coloring {
    pub fn colors_used(&self) -> usize {
        self.colors.iter().collect::<BTreeSet<_>>().len()
    }
}

/// (p:q)-coloring: every vertex holds a sorted q-subset of `0..p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalColoring {
    pub p: u32,
    pub q: u32,
    pub sets: Vec<Vec<u32>>,
}

impl FractionalColoring {
    pub fn ratio(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    WrongVertexCount { expected: usize, got: usize },
    ColorOutOfPalette { vertex: usize, color: u32 },
    SameColor { u: usize, v: usize, color: u32 },
    WrongSetSize { vertex: usize, size: usize },
    RepeatedColor { vertex: usize, color: u32 },
    SharedColor { u: usize, v: usize, color: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongVertexCount { expected, got } => {
                write!(f, "expected {expected} vertices, coloring has {got}")
            }
            Violation::ColorOutOfPalette { vertex, color } => {
                write!(f, "vertex {vertex} has color {color} outside the palette")
            }
            Violation::SameColor { u, v, color } => {
                write!(f, "edge ({u},{v}) has both ends colored {color}")
            }
            Violation::WrongSetSize { vertex, size } => {
                write!(f, "vertex {vertex} holds {size} colors")
            }
            Violation::RepeatedColor { vertex, color } => {
                write!(f, "vertex {vertex} holds color {color} twice")
            }
            Violation::SharedColor { u, v, color } => {
                write!(f, "edge ({u},{v}) shares color {color}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violation: Option<Violation>,
    pub colors_used: usize,
    pub palette_size: u32,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.violation {
            None => write!(
                f,
                "pass: {} colors used, palette {}",
                self.colors_used, self.palette_size
            ),
            Some(v) => write!(f, "fail: {v}"),
        }
    }
}

/// Checks completeness, palette bounds and properness; reports the first
/// violation in vertex order.
pub fn validate(g: &UnitDiskGraph, c: &Coloring) -> ValidationReport {
    let violation = (|| {
        if c.colors.len() != g.n() {
            return Some(Violation::WrongVertexCount {
                expected: g.n(),
                got: c.colors.len(),
            });
        }
        for (v, &color) in c.colors.iter().enumerate() {
            if color >= c.palette_size {
                return Some(Violation::ColorOutOfPalette { vertex: v, color });
            }
        }
        g.edges()
            .find(|&(u, v, _)| c.colors[u] == c.colors[v])
            .map(|(u, v, _)| Violation::SameColor {
                u,
                v,
                color: c.colors[u],
            })
    })();
    ValidationReport {
        violation,
        colors_used: c.colors_used(),
        palette_size: c.palette_size,
    }
}

pub fn validate_fractional(g: &UnitDiskGraph, c: &FractionalColoring) -> ValidationReport {
    let violation = (|| {
        if c.sets.len() != g.n() {
            return Some(Violation::WrongVertexCount {
                expected: g.n(),
                got: c.sets.len(),
            });
        }
        for (v, set) in c.sets.iter().enumerate() {
            if set.len() != c.q as usize {
                return Some(Violation::WrongSetSize {
                    vertex: v,
                    size: set.len(),
                });
            }
            let mut seen = BTreeSet::new();
            for &color in set {
                if color >= c.p {
                    return Some(Violation::ColorOutOfPalette { vertex: v, color });
                }
                if !seen.insert(color) {
                    return Some(Violation::RepeatedColor { vertex: v, color });
                }
            }
        }
        for (u, v, _) in g.edges() {
            let a: BTreeSet<_> = c.sets[u].iter().collect();
            if let Some(&&color) = c.sets[v].iter().find(|x| a.contains(x)).as_ref() {
                return Some(Violation::SharedColor { u, v, color });
            }
        }
        None
    })();
    let colors_used = c.sets.iter().flatten().collect::<BTreeSet<_>>().len();
    ValidationReport {
        violation,
        colors_used,
        palette_size: c.p,
    }
}

/// Exact clique number, for callers that pass `omega = auto`.
pub fn exact_omega(g: &UnitDiskGraph) -> usize {
    g.clique_number()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn k3() -> UnitDiskGraph {
        UnitDiskGraph::from_points([
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.1),
            Point::new(1.0, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn proper_triangle_passes() {
        let rep = validate(
            &k3(),
            &Coloring {
                colors: vec![0, 1, 2],
                palette_size: 3,
            },
        );
        assert!(rep.passed());
        assert_eq!(rep.colors_used, 3);
    }

    #[test]
    fn conflict_reports_edge() {
        let rep = validate(
            &k3(),
            &Coloring {
                colors: vec![0, 0, 2],
                palette_size: 3,
            },
        );
        assert_eq!(
            rep.violation,
            Some(Violation::SameColor {
                u: 0,
                v: 1,
                color: 0
            })
        );
    }

    #[test]
    fn palette_and_length_checked() {
        let g = k3();
        let rep = validate(
            &g,
            &Coloring {
                colors: vec![0, 1, 3],
                palette_size: 3,
            },
        );
        assert!(matches!(rep.violation, Some(Violation::ColorOutOfPalette { vertex: 2, .. })));
        let rep = validate(
            &g,
            &Coloring {
                colors: vec![0, 1],
                palette_size: 3,
            },
        );
        assert!(matches!(rep.violation, Some(Violation::WrongVertexCount { .. })));
    }

    #[test]
    fn fractional_checks() {
        let g = k3();
        let good = FractionalColoring {
            p: 6,
            q: 2,
            sets: vec![vec![0, 1], vec![2, 3], vec![4, 5]],
        };
        assert!(validate_fractional(&g, &good).passed());
        let shared = FractionalColoring {
            sets: vec![vec![0, 1], vec![1, 3], vec![4, 5]],
            ..good.clone()
        };
        assert_eq!(
            validate_fractional(&g, &shared).violation,
            Some(Violation::SharedColor {
                u: 0,
                v: 1,
                color: 1
            })
        );
        let short = FractionalColoring {
            sets: vec![vec![0], vec![2, 3], vec![4, 5]],
            ..good.clone()
        };
        assert!(matches!(
            validate_fractional(&g, &short).violation,
            Some(Violation::WrongSetSize { vertex: 0, size: 1 })
        ));
        let repeated = FractionalColoring {
            sets: vec![vec![0, 0], vec![2, 3], vec![4, 5]],
            ..good
        };
        assert!(matches!(
            validate_fractional(&g, &repeated).violation,
            Some(Violation::RepeatedColor { .. })
        ));
    }
}
