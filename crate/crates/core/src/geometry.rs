//! Planar primitives: points, closed disks, half-open rectangles and the
//! Reuleaux-triangle coverage probability used by the degree inequalities.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

/// Height of a strip in which every unit-disk graph is perfect.
pub const STRIP_HEIGHT: f64 = 0.866_025_403_784_438_6; // sqrt(3)/2

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("radius {0} outside [0, 1]")]
    RadiusOutOfRange(f64),
    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("rectangle must have positive width and height, got {width} x {height}")]
    DegenerateRect { width: f64, height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Builds a point, rejecting NaN and infinite coordinates.
    pub fn checked(x: f64, y: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(GeometryError::NonFinite(x, y))
        }
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }

    /// Lexicographic (x, then y) comparison used for geometric tie-breaking.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    a.dist(&b)
}

/// Closed-disk membership, decided on squared distances.
pub fn point_in_disk(p: Point, center: Point, radius: f64) -> bool {
    p.dist_sq(&center) <= radius * radius
}

/// Probability that a point at distance `r` from the center of a unit disk is
/// covered by a uniformly rotated Reuleaux triangle with a corner at the center.
pub fn reuleaux_cover_probability(r: f64) -> Result<f64, GeometryError> {
    if !(0.0..=1.0).contains(&r) {
        return Err(GeometryError::RadiusOutOfRange(r));
    }
    Ok((r / 2.0).acos() / PI - 1.0 / 6.0)
}

/// Which pair of opposite sides a [`Rect`] contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `[x0, x0 + w) x [y0, y0 + h)`
    ClosedBottomLeft,
    /// `(x0, x0 + w] x (y0, y0 + h]`
    ClosedTopRight,
}

/// Axis-parallel rectangle with an explicit half-open boundary convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
    pub boundary: Boundary,
}

impl Rect {
    pub fn new(
        x0: f64,
        y0: f64,
        width: f64,
        height: f64,
        boundary: Boundary,
    ) -> Result<Self, GeometryError> {
        if !(width > 0.0 && height > 0.0) {
            return Err(GeometryError::DegenerateRect { width, height });
        }
        Ok(Rect {
            x0,
            y0,
            width,
            height,
            boundary,
        })
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.width
    }

    pub fn y1(&self) -> f64 {
        self.y0 + self.height
    }

    pub fn contains(&self, p: Point) -> bool {
        let (x1, y1) = (self.x1(), self.y1());
        match self.boundary {
            Boundary::ClosedBottomLeft => {
                self.x0 <= p.x && p.x < x1 && self.y0 <= p.y && p.y < y1
            }
            Boundary::ClosedTopRight => self.x0 < p.x && p.x <= x1 && self.y0 < p.y && p.y <= y1,
        }
    }

    /// Euclidean distance between the closures of two rectangles.
    pub fn distance_to(&self, other: &Rect) -> f64 {
        let gap = |a0: f64, a1: f64, b0: f64, b1: f64| (b0 - a1).max(a0 - b1).max(0.0);
        let dx = gap(self.x0, self.x1(), other.x0, other.x1());
        let dy = gap(self.y0, self.y1(), other.y0, other.y1());
        dx.hypot(dy)
    }
}
