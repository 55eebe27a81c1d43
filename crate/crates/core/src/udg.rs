//! Unit-disk graphs over weighted planar point sets.
//!
//! A site of multiplicity `m` stands for `m` co-located vertices. The graph
//! keeps both views: the expanded vertex adjacency (what the distributed
//! algorithms run on) and the site adjacency (what the weighted degree and
//! disk-clique computations use, without materializing copies).
//!
//! All adjacency and disk-membership decisions compare squared distances, so
//! boundary cases such as `dist == 1` are exact for inputs whose squared
//! distances are exactly representable.

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{GeometryError, Point};

/// Squared-distance slack for radius-1/2 disks whose centers are computed
/// from pairs of points (those centers are generally irrational).
const DISK_EPS: f64 = 1e-9;

/// Above this many sites the neighbor search switches to a uniform grid.
const BRUTE_FORCE_LIMIT: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("site {0} has multiplicity 0")]
    ZeroMultiplicity(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("vertex {0} does not exist")]
    InvalidVertex(usize),
    #[error("graph has no vertices")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub position: Point,
    pub multiplicity: u32,
}

/// Ordered list of sites; the site id is its index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedPointSet {
    sites: Vec<WeightedPoint>,
}

impl WeightedPointSet {
    pub fn new(sites: Vec<WeightedPoint>) -> Result<Self, GraphError> {
        for (i, s) in sites.iter().enumerate() {
            if s.multiplicity == 0 {
                return Err(GraphError::ZeroMultiplicity(i));
            }
            Point::checked(s.position.x, s.position.y)?;
        }
        Ok(WeightedPointSet { sites })
    }

    /// Sites of multiplicity one.
    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Result<Self, GraphError> {
        Self::new(
            points
                .into_iter()
                .map(|position| WeightedPoint {
                    position,
                    multiplicity: 1,
                })
                .collect(),
        )
    }

    pub fn sites(&self) -> &[WeightedPoint] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Number of vertices after expanding multiplicities.
    pub fn total_weight(&self) -> u64 {
        self.sites.iter().map(|s| s.multiplicity as u64).sum()
    }

    /// For every site, the other sites within closed distance 1 (sorted).
    pub fn site_adjacency(&self) -> Vec<Vec<usize>> {
        let pts: Vec<Point> = self.sites.iter().map(|s| s.position).collect();
        if pts.len() <= BRUTE_FORCE_LIMIT {
            neighbors_brute_force(&pts)
        } else {
            neighbors_grid(&pts)
        }
    }

    /// Degree of one copy of each site: all other vertices within distance 1.
    pub fn weighted_degrees(&self) -> Vec<u64> {
        weighted_degrees_with(&self.sites, &self.site_adjacency())
    }

    /// Multiplicity-weighted average degree of the expanded graph.
    pub fn weighted_average_degree(&self) -> Result<f64, GraphError> {
        let total = self.total_weight();
        if total == 0 {
            return Err(GraphError::Empty);
        }
        let degs = self.weighted_degrees();
        let sum: u64 = self
            .sites
            .iter()
            .zip(&degs)
            .map(|(s, d)| s.multiplicity as u64 * d)
            .sum();
        Ok(sum as f64 / total as f64)
    }

    /// Largest total multiplicity inside a closed disk of radius 1/2.
    pub fn disk_clique_number(&self) -> u64 {
        disk_clique_with(&self.sites, &self.site_adjacency())
    }
}

fn neighbors_brute_force(pts: &[Point]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); pts.len()];
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[i].dist_sq(&pts[j]) <= 1.0 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

fn cell_of(p: &Point) -> (i64, i64) {
    (p.x.floor() as i64, p.y.floor() as i64)
}

/// Unit-cell bucket search; neighbors of a point lie in the 3x3 block of cells.
fn neighbors_grid(pts: &[Point]) -> Vec<Vec<usize>> {
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in pts.iter().enumerate() {
        buckets.entry(cell_of(p)).or_default().push(i);
    }
    pts.iter()
        .enumerate()
        .map(|(i, p)| {
            let (cx, cy) = cell_of(p);
            let mut out = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(bucket) = buckets.get(&(cx + dx, cy + dy)) {
                        out.extend(
                            bucket
                                .iter()
                                .copied()
                                .filter(|&j| j != i && p.dist_sq(&pts[j]) <= 1.0),
                        );
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

fn weighted_degrees_with(sites: &[WeightedPoint], adj: &[Vec<usize>]) -> Vec<u64> {
    sites
        .iter()
        .zip(adj)
        .map(|(s, nbrs)| {
            let around: u64 = nbrs.iter().map(|&t| sites[t].multiplicity as u64).sum();
            around + s.multiplicity as u64 - 1
        })
        .collect()
}

/// Centers of the (at most two) radius-1/2 circles through `a` and `b`.
pub fn half_disk_centers(a: Point, b: Point) -> Option<[Point; 2]> {
    let d2 = a.dist_sq(&b);
    if d2 > 1.0 {
        return None;
    }
    let mid = Point::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    if d2 == 0.0 {
        return Some([mid, mid]);
    }
    let h = ((0.25 - 0.25 * d2).max(0.0) / d2).sqrt();
    let (px, py) = (-(b.y - a.y) * h, (b.x - a.x) * h);
    Some([
        Point::new(mid.x + px, mid.y + py),
        Point::new(mid.x - px, mid.y - py),
    ])
}

fn disk_clique_with(sites: &[WeightedPoint], adj: &[Vec<usize>]) -> u64 {
    let limit = 0.25 + DISK_EPS;
    let count = |center: Point, around: usize| -> u64 {
        let own = &sites[around];
        let mut total = if own.position.dist_sq(&center) <= limit {
            own.multiplicity as u64
        } else {
            0
        };
        for &t in &adj[around] {
            if sites[t].position.dist_sq(&center) <= limit {
                total += sites[t].multiplicity as u64;
            }
        }
        total
    };
    let mut best = 0;
    for (s, site) in sites.iter().enumerate() {
        best = best.max(count(site.position, s));
        for &t in adj[s].iter().filter(|&&t| t > s) {
            if let Some(centers) = half_disk_centers(site.position, sites[t].position) {
                for c in centers {
                    best = best.max(count(c, s));
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub dist: f64,
}

#[derive(Debug, Clone)]
pub struct UnitDiskGraph {
    sites: WeightedPointSet,
    site_adj: Vec<Vec<usize>>,
    site_of: Vec<usize>,
    positions: Vec<Point>,
    adj: Vec<Vec<Neighbor>>,
}

/// Builds the unit-disk graph; multiplicity-`m` sites expand to `m`
/// consecutive vertex ids.
pub fn build_graph(ps: &WeightedPointSet) -> UnitDiskGraph {
    UnitDiskGraph::new(ps.clone())
}

impl UnitDiskGraph {
    pub fn new(sites: WeightedPointSet) -> Self {
        let site_adj = sites.site_adjacency();
        let mut first = Vec::with_capacity(sites.len());
        let mut site_of = Vec::new();
        let mut positions = Vec::new();
        for (s, wp) in sites.sites().iter().enumerate() {
            first.push(site_of.len());
            for _ in 0..wp.multiplicity {
                site_of.push(s);
                positions.push(wp.position);
            }
        }
        let adj = (0..site_of.len())
            .map(|v| {
                let s = site_of[v];
                let here = sites.sites()[s];
                let mut out: Vec<Neighbor> = (first[s]..first[s] + here.multiplicity as usize)
                    .filter(|&u| u != v)
                    .map(|id| Neighbor { id, dist: 0.0 })
                    .collect();
                for &t in &site_adj[s] {
                    let other = sites.sites()[t];
                    let dist = here.position.dist(&other.position);
                    out.extend(
                        (first[t]..first[t] + other.multiplicity as usize)
                            .map(|id| Neighbor { id, dist }),
                    );
                }
                out.sort_unstable_by_key(|n| n.id);
                out
            })
            .collect();
        UnitDiskGraph {
            sites,
            site_adj,
            site_of,
            positions,
            adj,
        }
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Result<Self, GraphError> {
        Ok(Self::new(WeightedPointSet::from_points(points)?))
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn sites(&self) -> &WeightedPointSet {
        &self.sites
    }

    pub fn site_of(&self, v: usize) -> usize {
        self.site_of[v]
    }

    pub fn position(&self, v: usize) -> Point {
        self.positions[v]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn neighbors(&self, v: usize) -> &[Neighbor] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search_by_key(&v, |n| n.id).is_ok()
    }

    /// Iterates every edge once as `(u, v, dist)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nbrs)| {
            nbrs.iter()
                .filter(move |n| n.id > u)
                .map(move |n| (u, n.id, n.dist))
        })
    }

    /// Sum of degrees over vertex count.
    pub fn average_degree(&self) -> Result<f64, GraphError> {
        if self.n() == 0 {
            return Err(GraphError::Empty);
        }
        Ok(self.edge_count() as f64 * 2.0 / self.n() as f64)
    }

    /// Exact clique number by the lens method: for every edge `uv` the
    /// vertices within `|uv|` of both endpoints split by the line `uv` into
    /// two cliques, so the lens maximum clique is `|lens|` minus a maximum
    /// matching of the (bipartite) complement.
    pub fn clique_number(&self) -> usize {
        let n = self.n();
        if n == 0 {
            return 0;
        }
        let mut best = 1;
        let mut above = Vec::new();
        let mut below = Vec::new();
        for u in 0..n {
            let pu = self.positions[u];
            // every lens is a subset of N[u]
            if self.adj[u].len() + 1 <= best {
                continue;
            }
            for nv in self.adj[u].iter().filter(|nv| nv.id > u) {
                let v = nv.id;
                let pv = self.positions[v];
                let d2 = pu.dist_sq(&pv);
                above.clear();
                below.clear();
                above.push(u);
                above.push(v);
                let (ex, ey) = (pv.x - pu.x, pv.y - pu.y);
                for nw in &self.adj[u] {
                    let w = nw.id;
                    if w == v {
                        continue;
                    }
                    let pw = self.positions[w];
                    if pw.dist_sq(&pu) > d2 || pw.dist_sq(&pv) > d2 {
                        continue;
                    }
                    let cross = ex * (pw.y - pu.y) - ey * (pw.x - pu.x);
                    if cross >= 0.0 {
                        above.push(w);
                    } else {
                        below.push(w);
                    }
                }
                let lens = above.len() + below.len();
                if lens <= best {
                    continue;
                }
                let matching = if below.is_empty() {
                    0
                } else {
                    let pos = &self.positions;
                    let conflicts: Vec<Vec<usize>> = above
                        .iter()
                        .map(|&a| {
                            (0..below.len())
                                .filter(|&j| pos[a].dist_sq(&pos[below[j]]) > 1.0)
                                .collect()
                        })
                        .collect();
                    max_bipartite_matching(&conflicts, below.len())
                };
                best = best.max(lens - matching);
            }
        }
        best
    }

    /// Largest number of vertices inside a closed disk of radius 1/2.
    pub fn disk_clique_number(&self) -> u64 {
        disk_clique_with(self.sites.sites(), &self.site_adj)
    }

    /// Weighted-arithmetic degree of a copy of each site.
    pub fn site_degrees(&self) -> Vec<u64> {
        weighted_degrees_with(self.sites.sites(), &self.site_adj)
    }

    pub fn degree_profile(&self, v: usize) -> Result<DegreeProfile, GraphError> {
        let nbrs = self.adj.get(v).ok_or(GraphError::InvalidVertex(v))?;
        let mut dists: Vec<f64> = nbrs.iter().map(|n| n.dist).collect();
        dists.sort_by(f64::total_cmp);
        let mut rings: Vec<(f64, usize)> = Vec::new();
        for d in dists {
            match rings.last_mut() {
                Some((r, c)) if *r == d => *c += 1,
                _ => rings.push((d, 1)),
            }
        }
        Ok(DegreeProfile { vertex: v, rings })
    }

    /// Number of neighbors of `v` within closed distance `r`.
    pub fn degree_within(&self, v: usize, r: f64) -> usize {
        let pv = self.positions[v];
        self.adj[v]
            .iter()
            .filter(|n| self.positions[n.id].dist_sq(&pv) <= r * r)
            .count()
    }
}

/// Kuhn's augmenting-path matching; `left[i]` lists right-side partners.
/// Returns the matched left vertex of every right vertex.
pub(crate) fn bipartite_matching(left: &[Vec<usize>], right_len: usize) -> Vec<Option<usize>> {
    fn augment(
        i: usize,
        left: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &j in &left[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, left, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right_len];
    let mut seen = vec![false; right_len];
    for i in 0..left.len() {
        // cheap pass first: a free partner needs no search
        if let Some(&j) = left[i].iter().find(|&&j| owner[j].is_none()) {
            owner[j] = Some(i);
            continue;
        }
        if left[i].is_empty() {
            continue;
        }
        seen.iter_mut().for_each(|s| *s = false);
        augment(i, left, &mut seen, &mut owner);
    }
    owner
}

fn max_bipartite_matching(left: &[Vec<usize>], right_len: usize) -> usize {
    bipartite_matching(left, right_len).iter().flatten().count()
}

/// Multiset of neighbor distances of one vertex, as `(r, x_r)` rings.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub vertex: usize,
    pub rings: Vec<(f64, usize)>,
}

impl DegreeProfile {
    pub fn degree(&self) -> usize {
        self.rings.iter().map(|&(_, c)| c).sum()
    }

    /// `d_r`: neighbors at distance at most `r`.
    pub fn within(&self, r: f64) -> usize {
        self.rings
            .iter()
            .take_while(|&&(d, _)| d <= r)
            .map(|&(_, c)| c)
            .sum()
    }

    /// `sum_r (2 - r) x_r`
    pub fn reuleaux_sum(&self) -> f64 {
        self.rings.iter().map(|&(r, c)| (2.0 - r) * c as f64).sum()
    }
}

/// Numerical slack for the real-valued inequality checks.
const CHECK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ReuleauxReport {
    pub sums: Vec<f64>,
    pub max_sum: f64,
    pub argmax: Option<usize>,
    pub bound: f64,
    pub violations: Vec<usize>,
}

impl ReuleauxReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-vertex `S(v) = sum over neighbors of (2 - dist)` against `6 * omega`.
pub fn check_reuleaux_inequality(g: &UnitDiskGraph, omega: usize) -> ReuleauxReport {
    let bound = 6.0 * omega as f64;
    let sums: Vec<f64> = (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|n| 2.0 - n.dist).sum())
        .collect();
    let (argmax, max_sum) = sums
        .iter()
        .copied()
        .enumerate()
        .fold((None, 0.0f64), |(a, m), (v, s)| {
            if s > m {
                (Some(v), s)
            } else {
                (a, m)
            }
        });
    let violations = sums
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > bound + CHECK_EPS)
        .map(|(v, _)| v)
        .collect();
    ReuleauxReport {
        sums,
        max_sum,
        argmax,
        bound,
        violations,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusReport {
    pub r: f64,
    /// max over v of `d(v) + (1 - r) d_r(v)`
    pub max_lhs: f64,
    pub bound: f64,
    pub violations: Vec<usize>,
    /// For `r = 1/2`: vertices breaking `d_{1/2}(v) <= 12 omega - 2 d(v)`.
    pub half_violations: Vec<usize>,
}

impl RadiusReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.half_violations.is_empty()
    }
}

pub fn check_cor_radius(g: &UnitDiskGraph, omega: usize, r: f64) -> RadiusReport {
    let bound = 6.0 * omega as f64;
    let mut max_lhs = 0.0f64;
    let mut violations = Vec::new();
    let mut half_violations = Vec::new();
    for v in 0..g.n() {
        let d = g.degree(v);
        let dr = g.degree_within(v, r);
        let lhs = d as f64 + (1.0 - r) * dr as f64;
        max_lhs = max_lhs.max(lhs);
        if lhs > bound + CHECK_EPS {
            violations.push(v);
        }
        if r == 0.5 && dr as i64 > 12 * omega as i64 - 2 * d as i64 {
            half_violations.push(v);
        }
    }
    RadiusReport {
        r,
        max_lhs,
        bound,
        violations,
        half_violations,
    }
}

/// Radii at which the radius corollary is checked by [`check_structure`].
pub const COR_RADII: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// All structural inequalities at once, for a given (exact) clique number.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralReport {
    pub n: usize,
    pub omega: usize,
    pub omega_disk: u64,
    pub max_degree: usize,
    pub average_degree: f64,
    pub reuleaux: ReuleauxReport,
    pub radius: Vec<RadiusReport>,
    /// max over edges with length in [1/2, 1] of (d(u) + d(v)) / 2
    pub max_pair_average: f64,
    pub failures: Vec<String>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl std::fmt::Display for StructuralReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "n {} omega {} omega_D {}", self.n, self.omega, self.omega_disk)?;
        writeln!(f, "max_degree {} (bound {})", self.max_degree, 6 * self.omega as i64 - 6)?;
        writeln!(f, "average_degree {:.4}", self.average_degree)?;
        writeln!(f, "max_reuleaux_sum {:.4} (bound {})", self.reuleaux.max_sum, self.reuleaux.bound)?;
        write!(f, "max_pair_average {:.4}", self.max_pair_average)?;
        for fail in &self.failures {
            write!(f, "\nviolation: {fail}")?;
        }
        Ok(())
    }
}

pub fn check_structure(g: &UnitDiskGraph, omega: usize) -> StructuralReport {
    let mut failures = Vec::new();
    let om = omega as f64;
    let reuleaux = check_reuleaux_inequality(g, omega);
    if !reuleaux.passed() {
        failures.push(format!(
            "reuleaux sum exceeds 6*omega at {} vertices (max {:.6})",
            reuleaux.violations.len(),
            reuleaux.max_sum
        ));
    }
    let radius: Vec<RadiusReport> = COR_RADII
        .iter()
        .map(|&r| check_cor_radius(g, omega, r))
        .collect();
    for rep in radius.iter().filter(|rep| !rep.passed()) {
        failures.push(format!(
            "radius corollary fails at r={} for {} vertices",
            rep.r,
            rep.violations.len() + rep.half_violations.len()
        ));
    }
    let max_degree = g.max_degree();
    if g.n() > 0 && max_degree as i64 > 6 * omega as i64 - 6 {
        failures.push(format!(
            "max degree {max_degree} exceeds 6*omega-6 = {}",
            6 * omega as i64 - 6
        ));
    }
    let average_degree = g.average_degree().unwrap_or(0.0);
    if average_degree > 5.68 * om + CHECK_EPS {
        failures.push(format!(
            "average degree {average_degree:.4} exceeds 5.68*omega"
        ));
    }
    let mut max_pair_average = 0.0f64;
    for (u, v, _) in g.edges() {
        let d2 = g.position(u).dist_sq(&g.position(v));
        if (0.25..=1.0).contains(&d2) {
            let avg = 0.5 * (g.degree(u) + g.degree(v)) as f64;
            max_pair_average = max_pair_average.max(avg);
            if avg > 5.675 * om + CHECK_EPS {
                failures.push(format!(
                    "edge ({u},{v}) has average degree {avg} > 5.675*omega"
                ));
            }
        }
    }
    let omega_disk = g.disk_clique_number();
    if omega_disk > omega as u64 {
        failures.push(format!("omega_D {omega_disk} exceeds omega {omega}"));
    }
    StructuralReport {
        n: g.n(),
        omega,
        omega_disk,
        max_degree,
        average_degree,
        reuleaux,
        radius,
        max_pair_average,
        failures,
    }
}
