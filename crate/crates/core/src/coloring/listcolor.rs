//! Randomized list coloring without coordinates: the 5.68ω algorithm and
//! a Δ+1 baseline built on the same proposal loop.
//!
//! Every uncolored node proposes a uniform color from its list and keeps it
//! when no neighbor proposed the same color in that round and no neighbor
//! announced it as fixed. A node announces its fixed color once, in the
//! round after it kept it; neighbors then drop that color from their lists.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use super::{Coloring, ColoringError};
use crate::localsim::{
    self, Incoming, MessageSize, Mode, NodeId, NodeInfo, NodeProgram, NodeRng, Outbox, RoundTrace,
    SimConfig,
};
use crate::udg::UnitDiskGraph;

/// `ceil(5.68 omega)`.
pub fn palette_568(omega: u32) -> u32 {
    (568 * omega).div_ceil(100)
}

/// Whether `degree > 5.675 omega`, in exact integer arithmetic.
pub fn a_threshold_exceeded(degree: usize, omega: u32) -> bool {
    1000 * degree as u64 > 5675 * omega as u64
}

/// `20 ceil(log2(n + 2))`.
pub fn list_round_cap(n: usize) -> usize {
    let m = n as u64 + 2;
    let log = 64 - (m - 1).leading_zeros() as usize;
    20 * log
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ListOutcome {
    Colored(u32),
    Failed(String),
}

impl fmt::Display for ListOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListOutcome::Colored(c) => write!(f, "{c}"),
            ListOutcome::Failed(s) => write!(f, "failed:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ListMessage {
    Hello { id: NodeId, degree: usize },
    /// Closed neighborhood of a high-degree node within the high-degree set.
    HighSet(BTreeSet<NodeId>),
    Fixed(u32),
    Propose(u32),
}

impl MessageSize for ListMessage {
    fn size(&self) -> usize {
        match self {
            ListMessage::Hello { .. } => 2,
            ListMessage::HighSet(s) => s.len(),
            ListMessage::Fixed(_) | ListMessage::Propose(_) => 1,
        }
    }
}

/// The proposal loop shared by both programs.
#[derive(Debug, Clone, PartialEq)]
pub struct ListState {
    id: NodeId,
    degree: usize,
    list: BTreeSet<u32>,
    color: Option<u32>,
    proposal: Option<u32>,
    announce: bool,
    colored_ports: BTreeSet<usize>,
    failure: Option<String>,
    // high-degree phase bookkeeping (unused by the baseline)
    high: bool,
    peers: BTreeMap<usize, (NodeId, usize)>,
    high_set: BTreeSet<NodeId>,
}

impl ListState {
    fn new(id: NodeId, degree: usize) -> Self {
        ListState {
            id,
            degree,
            list: BTreeSet::new(),
            color: None,
            proposal: None,
            announce: false,
            colored_ports: BTreeSet::new(),
            failure: None,
            high: false,
            peers: BTreeMap::new(),
            high_set: BTreeSet::new(),
        }
    }

    fn fix(&mut self, c: u32) {
        self.color = Some(c);
        self.announce = true;
    }

    fn propose(&mut self, rng: &mut NodeRng) -> Outbox<ListMessage> {
        if let Some(c) = self.color {
            if self.announce {
                self.announce = false;
                return Outbox::Broadcast(ListMessage::Fixed(c));
            }
            return Outbox::Silent;
        }
        if self.failure.is_some() || self.list.is_empty() {
            return Outbox::Silent;
        }
        let k = rng.random_range(0..self.list.len());
        let c = *self.list.iter().nth(k).unwrap();
        self.proposal = Some(c);
        Outbox::Broadcast(ListMessage::Propose(c))
    }

    fn absorb(&mut self, inbox: &[Incoming<ListMessage>]) {
        let mut clash = false;
        for m in inbox {
            match m.msg {
                ListMessage::Fixed(c) => {
                    self.colored_ports.insert(m.port);
                    self.list.remove(&c);
                    clash |= self.proposal == Some(c);
                }
                ListMessage::Propose(c) => clash |= self.proposal == Some(c),
                _ => {}
            }
        }
        if self.color.is_some() || self.failure.is_some() {
            return;
        }
        match self.proposal.take() {
            Some(c) if !clash => self.fix(c),
            _ => {
                if self.colored_ports.len() == self.degree {
                    match self.list.first() {
                        Some(&c) => self.fix(c),
                        None => self.failure = Some("empty list".into()),
                    }
                } else if self.list.is_empty() {
                    self.failure = Some("empty list".into());
                }
            }
        }
    }

    fn outcome(&self) -> Option<ListOutcome> {
        if let Some(f) = &self.failure {
            return Some(ListOutcome::Failed(f.clone()));
        }
        self.color.map(ListOutcome::Colored)
    }
}

/// The 5.68ω program.
///
/// Round 1: `Hello{id, degree}`. Round 2: high-degree nodes (degree above
/// 5.675 ω) exchange their closed high-degree neighborhoods; equal sets
/// everywhere certify that the component is a clique, which then colors
/// itself by id rank. Round 3: those colors are announced and the other
/// nodes build their lists. From round 4 on, the proposal loop runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiveSixEightProgram {
    pub omega: u32,
}

impl NodeProgram for FiveSixEightProgram {
    type State = ListState;
    type Message = ListMessage;
    type Output = ListOutcome;

    fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> ListState {
        let mut s = ListState::new(info.id, info.degree);
        s.high = a_threshold_exceeded(info.degree, self.omega);
        s.list = (0..palette_568(self.omega)).collect();
        if info.degree == 0 {
            s.color = Some(0);
        }
        s
    }

    fn send(&self, s: &mut ListState, round: usize, rng: &mut NodeRng) -> Outbox<ListMessage> {
        match round {
            1 => Outbox::Broadcast(ListMessage::Hello {
                id: s.id,
                degree: s.degree,
            }),
            2 if s.high => Outbox::Broadcast(ListMessage::HighSet(s.high_set.clone())),
            2 => Outbox::Silent,
            3 => match (s.high, s.color) {
                (true, Some(c)) => {
                    s.announce = false;
                    Outbox::Broadcast(ListMessage::Fixed(c))
                }
                _ => Outbox::Silent,
            },
            _ => s.propose(rng),
        }
    }

    fn receive(&self, s: &mut ListState, round: usize, inbox: Vec<Incoming<ListMessage>>, _rng: &mut NodeRng) {
        match round {
            1 => {
                for m in &inbox {
                    if let ListMessage::Hello { id, degree } = m.msg {
                        s.peers.insert(m.port, (id, degree));
                    }
                }
                s.high_set = s
                    .peers
                    .values()
                    .filter(|&&(_, d)| a_threshold_exceeded(d, self.omega))
                    .map(|&(id, _)| id)
                    .chain([s.id])
                    .collect();
            }
            2 => {
                if !s.high {
                    return;
                }
                for m in &inbox {
                    if let ListMessage::HighSet(other) = &m.msg {
                        if *other != s.high_set {
                            s.failure = Some("high-degree component is not a clique".into());
                            return;
                        }
                    }
                }
                let rank = s.high_set.range(..s.id).count() as u32;
                if rank >= self.omega {
                    s.failure = Some(format!("high-degree clique larger than omega={}", self.omega));
                } else {
                    s.color = Some(rank);
                }
            }
            3 => {
                if s.high {
                    return;
                }
                for m in &inbox {
                    if let ListMessage::Fixed(c) = m.msg {
                        s.list.remove(&c);
                        s.colored_ports.insert(m.port);
                    }
                }
            }
            _ => s.absorb(&inbox),
        }
    }

    fn output(&self, s: &ListState) -> Option<ListOutcome> {
        s.outcome()
    }
}

/// Δ+1 baseline: lists `{0..d(v)}`, proposals from round 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaselineProgram;

impl NodeProgram for BaselineProgram {
    type State = ListState;
    type Message = ListMessage;
    type Output = ListOutcome;

    fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> ListState {
        let mut s = ListState::new(info.id, info.degree);
        s.list = (0..=info.degree as u32).collect();
        if info.degree == 0 {
            s.color = Some(0);
        }
        s
    }

    fn send(&self, s: &mut ListState, _round: usize, rng: &mut NodeRng) -> Outbox<ListMessage> {
        s.propose(rng)
    }

    fn receive(&self, s: &mut ListState, _round: usize, inbox: Vec<Incoming<ListMessage>>, _rng: &mut NodeRng) {
        s.absorb(&inbox);
    }

    fn output(&self, s: &ListState) -> Option<ListOutcome> {
        s.outcome()
    }
}

fn collect(
    trace: &RoundTrace<ListOutcome>,
    cap: usize,
    palette_size: u32,
) -> Result<Coloring, ColoringError> {
    let mut colors = Vec::with_capacity(trace.outputs.len());
    for (v, out) in trace.outputs.iter().enumerate() {
        match out {
            Some(ListOutcome::Colored(c)) => colors.push(*c),
            Some(ListOutcome::Failed(reason)) => {
                return Err(ColoringError::NodeFailed {
                    vertex: v,
                    reason: reason.clone(),
                })
            }
            None => {
                return Err(ColoringError::RoundCapExceeded {
                    cap,
                    unfinished: trace.outputs.iter().filter(|o| o.is_none()).count(),
                })
            }
        }
    }
    Ok(Coloring {
        colors,
        palette_size,
    })
}

/// Runs the 5.68ω program in the abstract model.
pub fn color_568(
    g: &UnitDiskGraph,
    omega: u32,
    seed: u64,
) -> Result<(Coloring, RoundTrace<ListOutcome>), ColoringError> {
    if omega == 0 && g.n() > 0 {
        return Err(ColoringError::InvalidParameter("omega must be positive".into()));
    }
    let cap = list_round_cap(g.n());
    let trace = localsim::run(
        g,
        FiveSixEightProgram { omega },
        SimConfig::new(Mode::Abstract, seed, cap),
    );
    let c = collect(&trace, cap, palette_568(omega))?;
    Ok((c, trace))
}

pub fn color_greedy_baseline(
    g: &UnitDiskGraph,
    seed: u64,
) -> Result<(Coloring, RoundTrace<ListOutcome>), ColoringError> {
    let cap = list_round_cap(g.n());
    let trace = localsim::run(g, BaselineProgram, SimConfig::new(Mode::Abstract, seed, cap));
    let c = collect(&trace, cap, g.max_degree() as u32 + 1)?;
    Ok((c, trace))
}

/// Geometric facts about the high-degree set, checked after the fact.
#[derive(Debug, Clone, PartialEq)]
pub struct HighDegreeReport {
    pub high: Vec<usize>,
    /// Adjacent high-degree pairs at distance 1/2 or more.
    pub far_pairs: Vec<(usize, usize)>,
    /// Components of the high-degree subgraph that are not cliques.
    pub non_cliques: Vec<Vec<usize>>,
}

impl HighDegreeReport {
    pub fn passed(&self) -> bool {
        self.far_pairs.is_empty() && self.non_cliques.is_empty()
    }
}

pub fn check_high_degree_set(g: &UnitDiskGraph, omega: u32) -> HighDegreeReport {
    let is_high: Vec<bool> = (0..g.n())
        .map(|v| a_threshold_exceeded(g.degree(v), omega))
        .collect();
    let high: Vec<usize> = (0..g.n()).filter(|&v| is_high[v]).collect();
    let far_pairs = g
        .edges()
        .filter(|&(u, v, d)| is_high[u] && is_high[v] && d >= 0.5)
        .map(|(u, v, _)| (u, v))
        .collect();
    let mut seen = vec![false; g.n()];
    let mut non_cliques = Vec::new();
    for &s in &high {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for nb in g.neighbors(comp[i]) {
                if is_high[nb.id] && !seen[nb.id] {
                    seen[nb.id] = true;
                    comp.push(nb.id);
                }
            }
            i += 1;
        }
        let clique = comp
            .iter()
            .all(|&u| comp.iter().all(|&v| u == v || g.are_adjacent(u, v)));
        if !clique {
            comp.sort_unstable();
            non_cliques.push(comp);
        }
    }
    HighDegreeReport {
        high,
        far_pairs,
        non_cliques,
    }
}
