use std::cmp::Ordering;

use super::ColoringError;
use crate::geometry::{Point, STRIP_HEIGHT};
use crate::udg::{bipartite_matching, UnitDiskGraph};

/// Slack on the strip-height precondition for coordinates that were
/// classified into a stripe by floating-point division.
const STRIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripPoint {
    /// Tie-breaker for coincident coordinates (a node identifier).
    pub key: u64,
    pub pos: Point,
}

fn order(a: &StripPoint, b: &StripPoint) -> Ordering {
    a.pos.lex_cmp(&b.pos).then(a.key.cmp(&b.key))
}

/// Optimal coloring of points lying in one horizontal strip of height at
/// most `sqrt(3)/2`.
///
/// Plain first-fit in left-to-right order is not enough: the earlier
/// neighbors of a point need not be pairwise adjacent, and first-fit can
/// use `omega + 1` colors. What does hold is that two non-adjacent points
/// in the strip are more than `1/2` apart horizontally, so "non-adjacent
/// and to the left" is a strict partial order. Its chains are independent
/// sets and its antichains are cliques, so a minimum chain partition
/// (a maximum matching, by Dilworth) uses exactly `omega` colors.
///
/// Chains are numbered by their leftmost point. Returns the colors in
/// input order.
pub fn strip_greedy(points: &[StripPoint]) -> Result<Vec<u32>, ColoringError> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        (lo.min(p.pos.y), hi.max(p.pos.y))
    });
    if hi - lo > STRIP_HEIGHT + STRIP_SLACK {
        return Err(ColoringError::NotInStrip { spread: hi - lo });
    }
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| order(&points[a], &points[b]));
    let pos: Vec<Point> = idx.iter().map(|&v| points[v].pos).collect();
    let mut colors = vec![0u32; points.len()];
    // components are colored independently, so a vertex's color depends on
    // its own component only
    for comp in components(&pos) {
        for (k, c) in chain_partition(&comp.iter().map(|&i| pos[i]).collect::<Vec<_>>())
            .into_iter()
            .enumerate()
        {
            colors[idx[comp[k]]] = c;
        }
    }
    Ok(colors)
}

/// Connected components of `pos` (sorted by x), each in ascending order.
fn components(pos: &[Point]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..pos.len()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for j in 0..pos.len() {
        for i in (0..j).rev() {
            if pos[j].x - pos[i].x > 1.0 {
                break;
            }
            if pos[i].dist_sq(&pos[j]) <= 1.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; pos.len()];
    for v in 0..pos.len() {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    groups
}

/// Minimum chain partition of x-sorted strip points; chain index per point.
fn chain_partition(pos: &[Point]) -> Vec<u32> {
    // successors: later points that are not adjacent, nearest first
    let later: Vec<Vec<usize>> = (0..pos.len())
        .map(|i| (i + 1..pos.len()).filter(|&j| pos[i].dist_sq(&pos[j]) > 1.0).collect())
        .collect();
    let pred = bipartite_matching(&later, pos.len());
    let mut next = vec![None; pos.len()];
    for (j, p) in pred.iter().enumerate() {
        if let Some(i) = *p {
            next[i] = Some(j);
        }
    }
    let mut chain = vec![0u32; pos.len()];
    let mut count = 0u32;
    for start in 0..pos.len() {
        if pred[start].is_some() {
            continue;
        }
        let mut cur = Some(start);
        while let Some(k) = cur {
            chain[k] = count;
            cur = next[k];
        }
        count += 1;
    }
    chain
}

/// [`strip_greedy`] on a vertex subset of a graph, keyed by vertex index.
pub fn strip_greedy_vertices(
    g: &UnitDiskGraph,
    vertices: &[usize],
) -> Result<Vec<u32>, ColoringError> {
    let pts: Vec<StripPoint> = vertices
        .iter()
        .map(|&v| StripPoint {
            key: v as u64,
            pos: g.position(v),
        })
        .collect();
    strip_greedy(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(key: u64, x: f64, y: f64) -> StripPoint {
        StripPoint {
            key,
            pos: Point::new(x, y),
        }
    }

    #[test]
    fn triangle_uses_three_colors() {
        let c = strip_greedy(&[sp(0, 0.0, 0.0), sp(1, 0.5, 0.1), sp(2, 1.0, 0.0)]).unwrap();
        let mut sorted = c.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn first_fit_trap_still_uses_omega() {
        // left-to-right first-fit gives the last point a fifth color here
        let pts = [
            sp(0, 2.0985, 0.4383),
            sp(1, 2.3515, 0.0537),
            sp(2, 2.5405, 0.0),
            sp(3, 2.9897, 0.0),
            sp(4, 3.1143, 0.8149),
            sp(5, 3.1589, 0.0),
        ];
        let c = strip_greedy(&pts).unwrap();
        assert_eq!(c.iter().max(), Some(&3));
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pts[i].pos.dist_sq(&pts[j].pos) <= 1.0 {
                    assert_ne!(c[i], c[j], "{i} {j}");
                }
            }
        }
    }

    #[test]
    fn single_point_gets_zero() {
        assert_eq!(strip_greedy(&[sp(9, 3.0, 4.0)]).unwrap(), vec![0]);
        assert!(strip_greedy(&[]).unwrap().is_empty());
    }

    #[test]
    fn rejects_tall_input() {
        let err = strip_greedy(&[sp(0, 0.0, 0.0), sp(1, 0.0, 0.9)]).unwrap_err();
        assert!(matches!(err, ColoringError::NotInStrip { .. }));
    }

    #[test]
    fn coincident_points_break_ties_by_key() {
        let c = strip_greedy(&[sp(5, 0.0, 0.0), sp(2, 0.0, 0.0)]).unwrap();
        assert_eq!(c, vec![1, 0]);
    }

    #[test]
    fn path_alternates() {
        let pts: Vec<_> = (0..6).map(|i| sp(i, 0.9 * i as f64, 0.0)).collect();
        assert_eq!(strip_greedy(&pts).unwrap(), vec![0, 1, 0, 1, 0, 1]);
    }
}
