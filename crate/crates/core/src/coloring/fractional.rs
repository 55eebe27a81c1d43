//! Fractional coloring from `r` shifted rectangle systems.
//!
//! System `i` tiles the plane with rectangles `(x', x'+1/eps] x (y', y'+h]`
//! on the lattice with periods `1 + 1/eps` and `1 + h`, shifted by `i/r` of
//! a period in both directions. Rectangles of one system are more than 1
//! apart, so each can be colored on its own with `omega` colors; a vertex
//! collects one color per system that covers it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rayon::prelude::*;

use super::strip::{strip_greedy, StripPoint};
use super::{ColoringError, FractionalColoring};
use crate::geometry::{Point, STRIP_HEIGHT};
use crate::localsim::{
    self, assign_ids, ComponentView, IdAssignment, Incoming, MessageSize, Mode, NodeId, NodeInfo,
    NodeProgram, NodeRng, Outbox, SimConfig,
};
use crate::udg::UnitDiskGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSystem {
    pub index: usize,
    pub r: usize,
    pub eps: f64,
}

/// Lattice index of `v` in `(offset + a*period, offset + a*period + len]`
/// terms: returns `(a, covered)`.
fn cell_1d(v: f64, offset: f64, period: f64, len: f64) -> (i64, bool) {
    let t = v - offset;
    let mut a = (t / period).ceil() as i64 - 1;
    // the division can land one cell off near boundaries
    if t <= a as f64 * period {
        a -= 1;
    } else if t > (a + 1) as f64 * period {
        a += 1;
    }
    let s = t - a as f64 * period;
    (a, s > 0.0 && s <= len)
}

impl RegionSystem {
    pub fn period_x(&self) -> f64 {
        1.0 + 1.0 / self.eps
    }

    pub fn period_y(&self) -> f64 {
        1.0 + STRIP_HEIGHT
    }

    pub fn offset(&self) -> (f64, f64) {
        let f = self.index as f64 / self.r as f64;
        (f * self.period_x(), f * self.period_y())
    }

    /// The rectangle of this system containing `p`, if any.
    pub fn cell(&self, p: Point) -> Option<(i64, i64)> {
        let (ox, oy) = self.offset();
        let (a, cx) = cell_1d(p.x, ox, self.period_x(), 1.0 / self.eps);
        let (b, cy) = cell_1d(p.y, oy, self.period_y(), STRIP_HEIGHT);
        (cx && cy).then_some((a, b))
    }
}

/// Every vertex is covered by at least this many of the `r` systems.
pub fn coverage_lower_bound(r: usize, eps: f64) -> usize {
    let gx = (r as f64 / (1.0 + 1.0 / eps)).ceil() as usize;
    let gy = (r as f64 / (1.0 + STRIP_HEIGHT)).ceil() as usize;
    r.saturating_sub(gx + gy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FractionalMode {
    /// Direct computation, systems in parallel.
    Central,
    /// Location-aware distributed run on the simulator.
    Simulate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalResult {
    pub coloring: FractionalColoring,
    /// Guaranteed coverage `r - ceil(r/(1+h)) - ceil(r/(1+1/eps))`.
    pub q_bound: usize,
    pub rounds: Option<usize>,
}

fn check_params(omega: u32, r: usize, eps: f64) -> Result<(), ColoringError> {
    if omega == 0 || r == 0 {
        return Err(ColoringError::InvalidParameter("omega and r must be positive".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(ColoringError::InvalidParameter(format!("eps {eps} not in (0, 1]")));
    }
    Ok(())
}

/// Colors of all vertices in one system, `None` for uncovered vertices.
fn color_system(
    sys: &RegionSystem,
    positions: &[Point],
    keys: &[NodeId],
    omega: u32,
) -> Result<Vec<Option<u32>>, ColoringError> {
    let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (v, &p) in positions.iter().enumerate() {
        if let Some(c) = sys.cell(p) {
            cells.entry(c).or_default().push(v);
        }
    }
    let mut out = vec![None; positions.len()];
    for vs in cells.values() {
        let pts: Vec<StripPoint> = vs
            .iter()
            .map(|&v| StripPoint {
                key: keys[v],
                pos: positions[v],
            })
            .collect();
        let colors = strip_greedy(&pts)?;
        for (&v, &c) in vs.iter().zip(&colors) {
            if c >= omega {
                return Err(ColoringError::NodeFailed {
                    vertex: v,
                    reason: format!("rectangle needs more than {omega} colors"),
                });
            }
            out[v] = Some(sys.index as u32 * omega + c);
        }
    }
    Ok(out)
}

fn central(
    g: &UnitDiskGraph,
    omega: u32,
    r: usize,
    eps: f64,
    seed: u64,
) -> Result<Vec<Vec<u32>>, ColoringError> {
    let keys = assign_ids(g.n(), seed, IdAssignment::default());
    let systems: Vec<RegionSystem> = (0..r).map(|index| RegionSystem { index, r, eps }).collect();
    // coverage first, so only the kept colors are stored
    let cover: Vec<Vec<bool>> = systems
        .par_iter()
        .map(|s| g.positions().iter().map(|&p| s.cell(p).is_some()).collect())
        .collect();
    let q = (0..g.n())
        .map(|v| cover.iter().filter(|c| c[v]).count())
        .min()
        .unwrap_or(0);
    if q == 0 {
        return Err(ColoringError::Infeasible { r, eps });
    }
    // last system each vertex keeps
    let keep_until: Vec<usize> = (0..g.n())
        .map(|v| {
            let mut seen = 0;
            for (i, c) in cover.iter().enumerate() {
                seen += c[v] as usize;
                if seen == q {
                    return i;
                }
            }
            unreachable!("coverage count checked above")
        })
        .collect();
    let last = keep_until.iter().copied().max().unwrap_or(0);
    let per_system: Vec<Vec<Option<u32>>> = systems[..=last]
        .par_iter()
        .map(|s| color_system(s, g.positions(), &keys, omega))
        .collect::<Result<_, _>>()?;
    Ok((0..g.n())
        .map(|v| {
            per_system[..=keep_until[v]]
                .iter()
                .filter_map(|colors| colors[v])
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FractionalOutcome {
    /// One color per covering system, in system order.
    Colors(Vec<u32>),
    TooManyColors { system: usize },
    Incomplete,
    Invalid(String),
}

impl fmt::Display for FractionalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FractionalOutcome::Colors(cs) => {
                let s: Vec<String> = cs.iter().map(u32::to_string).collect();
                write!(f, "{}", s.join(","))
            }
            FractionalOutcome::TooManyColors { system } => write!(f, "too-many-colors:{system}"),
            FractionalOutcome::Incomplete => write!(f, "incomplete"),
            FractionalOutcome::Invalid(s) => write!(f, "invalid:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FractionalMessage {
    Hello { id: NodeId, position: Point },
    View(ComponentView),
}

impl MessageSize for FractionalMessage {
    fn size(&self) -> usize {
        match self {
            FractionalMessage::Hello { .. } => 3,
            FractionalMessage::View(v) => v.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalState {
    id: NodeId,
    position: Option<Point>,
    view: ComponentView,
    outcome: Option<FractionalOutcome>,
}

/// Floods positions until, for every covering rectangle, the part of the
/// node's component inside that rectangle is fully known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalProgram {
    pub omega: u32,
    pub r: usize,
    pub eps: f64,
    pub round_cap: usize,
}

impl FractionalProgram {
    fn systems(&self) -> impl Iterator<Item = RegionSystem> + '_ {
        (0..self.r).map(|index| RegionSystem {
            index,
            r: self.r,
            eps: self.eps,
        })
    }

    /// Ids reachable from `me` inside `cell` of `sys`, or `None` while the
    /// view is still missing part of it.
    fn closed_part(
        view: &ComponentView,
        me: NodeId,
        sys: &RegionSystem,
        cell: (i64, i64),
    ) -> Option<Vec<NodeId>> {
        let mut seen = BTreeSet::from([me]);
        let mut queue = VecDeque::from([me]);
        while let Some(u) = queue.pop_front() {
            let nbrs = view.records.get(&u)?.neighbors.as_ref()?;
            for &w in nbrs {
                let pos = view.records.get(&w)?.position?;
                if sys.cell(pos) == Some(cell) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Some(seen.into_iter().collect())
    }

    fn try_finish(&self, state: &mut FractionalState) -> bool {
        let Some(position) = state.position else {
            return false;
        };
        let mut colors = Vec::new();
        for sys in self.systems() {
            let Some(cell) = sys.cell(position) else {
                continue;
            };
            let Some(part) = Self::closed_part(&state.view, state.id, &sys, cell) else {
                return false;
            };
            let pts: Vec<StripPoint> = part
                .iter()
                .map(|id| StripPoint {
                    key: *id,
                    pos: state.view.records[id].position.unwrap(),
                })
                .collect();
            let cs = match strip_greedy(&pts) {
                Ok(cs) => cs,
                Err(e) => {
                    state.outcome = Some(FractionalOutcome::Invalid(e.to_string()));
                    return true;
                }
            };
            let mine = cs[part.iter().position(|&id| id == state.id).unwrap()];
            if cs.iter().any(|&c| c >= self.omega) {
                state.outcome = Some(FractionalOutcome::TooManyColors { system: sys.index });
                return true;
            }
            colors.push(sys.index as u32 * self.omega + mine);
        }
        state.outcome = Some(FractionalOutcome::Colors(colors));
        true
    }
}

impl NodeProgram for FractionalProgram {
    type State = FractionalState;
    type Message = FractionalMessage;
    type Output = FractionalOutcome;

    fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> FractionalState {
        let mut state = FractionalState {
            id: info.id,
            position: info.position,
            view: ComponentView::default(),
            outcome: None,
        };
        match info.position {
            None => state.outcome = Some(FractionalOutcome::Invalid("needs coordinates".into())),
            Some(p) if info.degree == 0 => {
                state.view = ComponentView::single(info.id, Some(p), BTreeSet::new());
                self.try_finish(&mut state);
            }
            Some(p) => state.view.note(info.id, Some(p)),
        }
        state
    }

    fn send(
        &self,
        state: &mut FractionalState,
        round: usize,
        _rng: &mut NodeRng,
    ) -> Outbox<FractionalMessage> {
        match state.position {
            None => Outbox::Silent,
            Some(position) if round == 1 => Outbox::Broadcast(FractionalMessage::Hello {
                id: state.id,
                position,
            }),
            Some(_) => Outbox::Broadcast(FractionalMessage::View(state.view.clone())),
        }
    }

    fn receive(
        &self,
        state: &mut FractionalState,
        round: usize,
        inbox: Vec<Incoming<FractionalMessage>>,
        _rng: &mut NodeRng,
    ) {
        for m in inbox {
            match m.msg {
                FractionalMessage::Hello { id, position } => {
                    state.view.note(id, Some(position));
                    if let Some(rec) = state.view.records.get_mut(&state.id) {
                        rec.neighbors.get_or_insert_with(BTreeSet::new).insert(id);
                    }
                }
                FractionalMessage::View(v) => {
                    state.view.merge(&v);
                }
            }
        }
        if state.outcome.is_none() && !self.try_finish(state) && round >= self.round_cap {
            state.outcome = Some(FractionalOutcome::Incomplete);
        }
    }

    fn output(&self, state: &FractionalState) -> Option<FractionalOutcome> {
        state.outcome.clone()
    }
}

/// Round budget of the simulated run: a rectangle part has hop diameter
/// below `4/eps` for any `eps <= 1`.
pub fn simulate_round_cap(eps: f64) -> usize {
    (4.0 / eps).ceil() as usize + 4
}

fn simulate(
    g: &UnitDiskGraph,
    omega: u32,
    r: usize,
    eps: f64,
    seed: u64,
) -> Result<(Vec<Vec<u32>>, usize), ColoringError> {
    let cap = simulate_round_cap(eps);
    let program = FractionalProgram {
        omega,
        r,
        eps,
        round_cap: cap,
    };
    let trace = localsim::run(g, program, SimConfig::new(Mode::LocationAware, seed, cap + 1));
    let mut lists = Vec::with_capacity(g.n());
    for (v, out) in trace.outputs.into_iter().enumerate() {
        match out {
            Some(FractionalOutcome::Colors(cs)) => lists.push(cs),
            Some(other) => {
                return Err(ColoringError::NodeFailed {
                    vertex: v,
                    reason: other.to_string(),
                })
            }
            None => {
                return Err(ColoringError::RoundCapExceeded {
                    cap,
                    unfinished: 1,
                })
            }
        }
    }
    // every node reports all its colors; the common q is the minimum
    let q = lists.iter().map(Vec::len).min().unwrap_or(0);
    if q == 0 && g.n() > 0 {
        return Err(ColoringError::Infeasible { r, eps });
    }
    for l in &mut lists {
        l.truncate(q);
    }
    Ok((lists, trace.rounds_executed))
}

/// `(r*omega : q)`-coloring where `q` is the least coverage count.
pub fn color_fractional(
    g: &UnitDiskGraph,
    omega: u32,
    r: usize,
    eps: f64,
    mode: FractionalMode,
    seed: u64,
) -> Result<FractionalResult, ColoringError> {
    check_params(omega, r, eps)?;
    let (mut sets, rounds) = match mode {
        FractionalMode::Central => (central(g, omega, r, eps, seed)?, None),
        FractionalMode::Simulate => {
            let (s, rounds) = simulate(g, omega, r, eps, seed)?;
            (s, Some(rounds))
        }
    };
    let q = sets.first().map_or(0, Vec::len) as u32;
    for s in &mut sets {
        s.sort_unstable();
    }
    Ok(FractionalResult {
        coloring: FractionalColoring {
            p: r as u32 * omega,
            q,
            sets,
        },
        q_bound: coverage_lower_bound(r, eps),
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::validate_fractional;

    #[test]
    fn cell_boundaries_are_half_open() {
        let s = RegionSystem {
            index: 0,
            r: 1,
            eps: 0.5,
        };
        // rectangles (3a, 3a+2] x (b(1+h), b(1+h)+h]
        assert_eq!(s.cell(Point::new(2.0, 0.5)), Some((0, 0)));
        assert_eq!(s.cell(Point::new(0.0, 0.5)), None);
        assert_eq!(s.cell(Point::new(2.5, 0.5)), None);
        assert_eq!(s.cell(Point::new(3.0, 0.5)), None);
        assert_eq!(s.cell(Point::new(3.1, 0.5)), Some((1, 0)));
        assert_eq!(s.cell(Point::new(1.0, STRIP_HEIGHT)), Some((0, 0)));
        assert_eq!(s.cell(Point::new(1.0, 1.0)), None);
        assert_eq!(s.cell(Point::new(-1.0, -1.2)), Some((-1, -1)));
        assert_eq!(s.cell(Point::new(-1.0, -0.5)), None);
    }

    #[test]
    fn bound_values() {
        assert_eq!(coverage_lower_bound(20000, 1e-4), 9280);
        let ratio = 20000.0 / 9280.0;
        assert!(ratio <= 2.1552 && ratio > 2.155);
        assert_eq!(coverage_lower_bound(3, 0.5), 0);
    }

    #[test]
    fn coverage_meets_bound_on_grid() {
        let (r, eps) = (50, 0.25);
        let bound = coverage_lower_bound(r, eps);
        assert!(bound > 0);
        for i in 0..40 {
            for j in 0..40 {
                let p = Point::new(i as f64 * 0.137, j as f64 * 0.091);
                let count = (0..r)
                    .filter(|&index| RegionSystem { index, r, eps }.cell(p).is_some())
                    .count();
                assert!(count >= bound, "{p}: {count} < {bound}");
            }
        }
    }

    #[test]
    fn triangle_central_and_simulated_agree() {
        let g = UnitDiskGraph::from_points([
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.1),
            Point::new(1.0, 0.0),
        ])
        .unwrap();
        let a = color_fractional(&g, 3, 12, 0.5, FractionalMode::Central, 4).unwrap();
        let b = color_fractional(&g, 3, 12, 0.5, FractionalMode::Simulate, 4).unwrap();
        assert!(validate_fractional(&g, &a.coloring).passed());
        assert_eq!(a.coloring, b.coloring);
        assert!(a.coloring.q as usize >= a.q_bound);
    }

    #[test]
    fn infeasible_when_nothing_covers() {
        let g = UnitDiskGraph::from_points([Point::new(0.0, 0.5)]).unwrap();
        let err = color_fractional(&g, 1, 1, 0.5, FractionalMode::Central, 0).unwrap_err();
        assert!(matches!(err, ColoringError::Infeasible { .. }));
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = UnitDiskGraph::from_points([Point::new(0.0, 0.5)]).unwrap();
        for (o, r, e) in [(0, 5, 0.5), (1, 0, 0.5), (1, 5, 0.0), (1, 5, 2.0)] {
            assert!(color_fractional(&g, o, r, e, FractionalMode::Central, 0).is_err());
        }
    }
}
