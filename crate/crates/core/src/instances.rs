//! Seeded instance generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Point, STRIP_HEIGHT};
use crate::udg::{GraphError, WeightedPointSet};

fn check_dims(w: f64, h: f64) -> Result<(), GraphError> {
    Point::checked(w, h)?;
    if w <= 0.0 || h <= 0.0 {
        return Err(GraphError::Geometry(crate::geometry::GeometryError::DegenerateRect {
            width: w,
            height: h,
        }));
    }
    Ok(())
}

/// `n` independent uniform points in `[0, width) x [0, height)`.
pub fn uniform_box(n: usize, width: f64, height: f64, seed: u64) -> Result<WeightedPointSet, GraphError> {
    check_dims(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightedPointSet::from_points(
        (0..n).map(|_| Point::new(rng.random_range(0.0..width), rng.random_range(0.0..height))),
    )
}

/// Points `(i step, j step)` filling `[0, width] x [0, height]`.
pub fn grid(step: f64, width: f64, height: f64) -> Result<WeightedPointSet, GraphError> {
    check_dims(width, height)?;
    check_dims(step, step)?;
    let nx = (width / step + 1e-9).floor() as usize;
    let ny = (height / step + 1e-9).floor() as usize;
    WeightedPointSet::from_points(
        (0..=nx).flat_map(|i| (0..=ny).map(move |j| Point::new(i as f64 * step, j as f64 * step))),
    )
}

/// `n` uniform points in `[0, length) x [0, sqrt(3)/2)`.
pub fn strip(n: usize, length: f64, seed: u64) -> Result<WeightedPointSet, GraphError> {
    check_dims(length, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightedPointSet::from_points(
        (0..n).map(|_| Point::new(rng.random_range(0.0..length), rng.random_range(0.0..STRIP_HEIGHT))),
    )
}

/// Uniform points where each site also gets a multiplicity in `1..=max_mult`.
pub fn clustered_box(
    n: usize,
    width: f64,
    height: f64,
    max_mult: u32,
    seed: u64,
) -> Result<WeightedPointSet, GraphError> {
    check_dims(width, height)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = (0..n)
        .map(|_| crate::udg::WeightedPoint {
            position: Point::new(rng.random_range(0.0..width), rng.random_range(0.0..height)),
            multiplicity: rng.random_range(1..=max_mult.max(1)),
        })
        .collect();
    WeightedPointSet::new(sites)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_seeded_and_in_range() {
        let a = uniform_box(100, 3.0, 2.0, 7).unwrap();
        let b = uniform_box(100, 3.0, 2.0, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, uniform_box(100, 3.0, 2.0, 8).unwrap());
        assert!(a.sites().iter().all(|s| {
            let p = s.position;
            (0.0..3.0).contains(&p.x) && (0.0..2.0).contains(&p.y)
        }));
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid(0.5, 2.0, 1.0).unwrap().len(), 5 * 3);
        assert_eq!(grid(0.1, 1.0, 1.0).unwrap().len(), 121);
        assert!(grid(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn strip_height_respected() {
        let s = strip(300, 50.0, 3).unwrap();
        assert!(s.sites().iter().all(|w| w.position.y < STRIP_HEIGHT));
    }

    #[test]
    fn bad_dimensions_rejected() {
        assert!(uniform_box(3, -1.0, 1.0, 0).is_err());
        assert!(uniform_box(3, f64::NAN, 1.0, 0).is_err());
    }
}
