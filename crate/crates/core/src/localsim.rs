//! Synchronous LOCAL-model simulator.
//!
//! Every round, all nodes first compute their outgoing messages from their
//! pre-round state, then every node receives the messages addressed to it.
//! Nodes address neighbors by port number (`0..degree`); identifiers only
//! become known through messages. Randomness comes from a per-node ChaCha
//! stream derived from `(seed, node index)`, so a run is a pure function of
//! graph, program and configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Debug, Display, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::Point;
use crate::udg::UnitDiskGraph;

pub type NodeRng = ChaCha8Rng;

/// Identifiers handed to the nodes; distinct integers in `[1, n^alpha]`.
pub type NodeId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Abstract,
    LocationAware,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdAssignment {
    /// Node `i` gets identifier `i + 1`.
    InputOrder,
    /// Seeded sample of `n` distinct values from `1..=n^alpha`.
    Random { alpha: u32 },
}

impl Default for IdAssignment {
    fn default() -> Self {
        IdAssignment::Random { alpha: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    pub seed: u64,
    pub round_cap: usize,
    pub ids: IdAssignment,
}

impl SimConfig {
    pub fn new(mode: Mode, seed: u64, round_cap: usize) -> Self {
        SimConfig {
            mode,
            seed,
            round_cap,
            ids: IdAssignment::default(),
        }
    }

    pub fn with_ids(mut self, ids: IdAssignment) -> Self {
        self.ids = ids;
        self
    }
}

/// What a node knows before the first round.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeInfo {
    pub id: NodeId,
    pub degree: usize,
    /// Present only in location-aware mode.
    pub position: Option<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outbox<M> {
    Silent,
    Broadcast(M),
    /// One optional message per port.
    PerPort(Vec<Option<M>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Incoming<M> {
    pub port: usize,
    pub msg: M,
}

/// Rough size of a message in machine words, for reporting only.
pub trait MessageSize {
    fn size(&self) -> usize;
}

impl MessageSize for () {
    fn size(&self) -> usize {
        0
    }
}

impl MessageSize for u64 {
    fn size(&self) -> usize {
        1
    }
}

/// A distributed protocol, run identically at every node.
pub trait NodeProgram {
    type State;
    type Message: Clone + MessageSize;
    type Output: Clone + PartialEq + Debug;

    fn init(&self, info: &NodeInfo, rng: &mut NodeRng) -> Self::State;

    /// Messages for `round` (1-based), computed from the pre-round state.
    fn send(&self, state: &mut Self::State, round: usize, rng: &mut NodeRng)
        -> Outbox<Self::Message>;

    fn receive(
        &self,
        state: &mut Self::State,
        round: usize,
        inbox: Vec<Incoming<Self::Message>>,
        rng: &mut NodeRng,
    );

    /// `Some` once the node has decided; must not change afterwards.
    fn output(&self, state: &Self::State) -> Option<Self::Output>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundStats {
    pub messages: usize,
    pub max_message_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace<O> {
    pub rounds_executed: usize,
    pub rounds: Vec<RoundStats>,
    pub ids: Vec<NodeId>,
    pub outputs: Vec<Option<O>>,
    /// Round after which each node first produced its output (0 = at init).
    pub finish_round: Vec<Option<usize>>,
    pub cap_exceeded: bool,
    /// Nodes whose output changed after they had finished.
    pub output_changes: Vec<usize>,
}

impl<O> RoundTrace<O> {
    pub fn all_finished(&self) -> bool {
        self.outputs.iter().all(Option::is_some)
    }

    pub fn total_messages(&self) -> usize {
        self.rounds.iter().map(|r| r.messages).sum()
    }

    pub fn max_message_size(&self) -> usize {
        self.rounds
            .iter()
            .map(|r| r.max_message_size)
            .max()
            .unwrap_or(0)
    }
}

impl<O: Display> RoundTrace<O> {
    /// One line per node: `id output finish_round` (`-` when absent).
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, id) in self.ids.iter().enumerate() {
            let o = self.outputs[i]
                .as_ref()
                .map_or_else(|| "-".to_string(), |o| o.to_string());
            let f = self.finish_round[i].map_or_else(|| "-".to_string(), |r| r.to_string());
            writeln!(out, "{id} {o} {f}").unwrap();
        }
        out
    }
}

/// Assigns identifiers for `n` nodes.
pub fn assign_ids(n: usize, seed: u64, scheme: IdAssignment) -> Vec<NodeId> {
    match scheme {
        IdAssignment::InputOrder => (1..=n as u64).collect(),
        IdAssignment::Random { alpha } => {
            let space = (n as u64).saturating_pow(alpha.max(1)).max(n as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            if space <= usize::MAX as u64 {
                rand::seq::index::sample(&mut rng, space as usize, n)
                    .into_iter()
                    .map(|v| v as u64 + 1)
                    .collect()
            } else {
                let mut seen = BTreeSet::new();
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let v = rand::Rng::random_range(&mut rng, 1..=space);
                    if seen.insert(v) {
                        out.push(v);
                    }
                }
                out
            }
        }
    }
}

/// Per-node stream: the same ChaCha key for the whole run, stream `i`.
pub fn node_rng(seed: u64, node: usize) -> NodeRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(node as u64);
    rng
}

/// Step-by-step execution of one program on one graph.
pub struct Simulator<'g, P: NodeProgram> {
    graph: &'g UnitDiskGraph,
    program: P,
    config: SimConfig,
    ids: Vec<NodeId>,
    states: Vec<P::State>,
    rngs: Vec<NodeRng>,
    /// `back_port[v][p]`: the port under which `v` appears at its p-th neighbor.
    back_port: Vec<Vec<usize>>,
    round: usize,
    stats: Vec<RoundStats>,
    outputs: Vec<Option<P::Output>>,
    finish_round: Vec<Option<usize>>,
    output_changes: BTreeSet<usize>,
}

impl<'g, P: NodeProgram> Simulator<'g, P> {
    pub fn new(graph: &'g UnitDiskGraph, program: P, config: SimConfig) -> Self {
        let n = graph.n();
        let ids = assign_ids(n, config.seed, config.ids);
        let mut rngs: Vec<NodeRng> = (0..n).map(|i| node_rng(config.seed, i)).collect();
        let states: Vec<P::State> = (0..n)
            .map(|v| {
                let info = NodeInfo {
                    id: ids[v],
                    degree: graph.degree(v),
                    position: match config.mode {
                        Mode::LocationAware => Some(graph.position(v)),
                        Mode::Abstract => None,
                    },
                };
                program.init(&info, &mut rngs[v])
            })
            .collect();
        let back_port = (0..n)
            .map(|v| {
                graph
                    .neighbors(v)
                    .iter()
                    .map(|nb| {
                        graph
                            .neighbors(nb.id)
                            .binary_search_by_key(&v, |x| x.id)
                            .expect("adjacency is symmetric")
                    })
                    .collect()
            })
            .collect();
        let mut sim = Simulator {
            graph,
            program,
            config,
            ids,
            states,
            rngs,
            back_port,
            round: 0,
            stats: Vec::new(),
            outputs: vec![None; n],
            finish_round: vec![None; n],
            output_changes: BTreeSet::new(),
        };
        sim.record_outputs();
        sim
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn state(&self, v: usize) -> &P::State {
        &self.states[v]
    }

    pub fn program(&self) -> &P {
        &self.program
    }

    pub fn all_finished(&self) -> bool {
        self.outputs.iter().all(Option::is_some)
    }

    fn record_outputs(&mut self) {
        for v in 0..self.states.len() {
            let now = self.program.output(&self.states[v]);
            match (&self.outputs[v], now) {
                (None, Some(o)) => {
                    self.outputs[v] = Some(o);
                    self.finish_round[v] = Some(self.round);
                }
                (Some(prev), now) => {
                    if now.as_ref() != Some(prev) {
                        self.output_changes.insert(v);
                    }
                }
                (None, None) => {}
            }
        }
    }

    /// Executes one lock-step round.
    pub fn step(&mut self) {
        self.round += 1;
        let round = self.round;
        let n = self.states.len();
        let outboxes: Vec<Outbox<P::Message>> = (0..n)
            .map(|v| {
                self.program
                    .send(&mut self.states[v], round, &mut self.rngs[v])
            })
            .collect();
        let mut inboxes: Vec<Vec<Incoming<P::Message>>> = (0..n).map(|_| Vec::new()).collect();
        let mut stats = RoundStats {
            messages: 0,
            max_message_size: 0,
        };
        for (v, outbox) in outboxes.into_iter().enumerate() {
            let nbrs = self.graph.neighbors(v);
            let mut deliver = |p: usize, msg: P::Message| {
                stats.messages += 1;
                stats.max_message_size = stats.max_message_size.max(msg.size());
                inboxes[nbrs[p].id].push(Incoming {
                    port: self.back_port[v][p],
                    msg,
                });
            };
            match outbox {
                Outbox::Silent => {}
                Outbox::Broadcast(msg) => {
                    for p in 0..nbrs.len() {
                        deliver(p, msg.clone());
                    }
                }
                Outbox::PerPort(msgs) => {
                    for (p, msg) in msgs.into_iter().enumerate().take(nbrs.len()) {
                        if let Some(msg) = msg {
                            deliver(p, msg);
                        }
                    }
                }
            }
        }
        for (v, mut inbox) in inboxes.into_iter().enumerate() {
            inbox.sort_by_key(|m| m.port);
            self.program
                .receive(&mut self.states[v], round, inbox, &mut self.rngs[v]);
        }
        self.stats.push(stats);
        self.record_outputs();
    }

    /// Runs until every node has an output or the round cap is reached.
    pub fn run(mut self) -> RoundTrace<P::Output> {
        while !self.all_finished() && self.round < self.config.round_cap {
            self.step();
        }
        self.into_trace()
    }

    pub fn into_trace(self) -> RoundTrace<P::Output> {
        let cap_exceeded = !self.all_finished();
        RoundTrace {
            rounds_executed: self.round,
            rounds: self.stats,
            ids: self.ids,
            outputs: self.outputs,
            finish_round: self.finish_round,
            cap_exceeded,
            output_changes: self.output_changes.into_iter().collect(),
        }
    }
}

/// Runs `program` on `graph` to completion or to the round cap.
pub fn run<P: NodeProgram>(
    graph: &UnitDiskGraph,
    program: P,
    config: SimConfig,
) -> RoundTrace<P::Output> {
    Simulator::new(graph, program, config).run()
}

// ---------------------------------------------------------------------------
// Component gathering

/// What a node has learned about another node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub position: Option<Point>,
    /// `None` until the node's full neighbor list is known.
    pub neighbors: Option<BTreeSet<NodeId>>,
}

/// A labelled subgraph as known by one node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentView {
    pub records: BTreeMap<NodeId, NodeRecord>,
}

impl ComponentView {
    pub fn single(id: NodeId, position: Option<Point>, neighbors: BTreeSet<NodeId>) -> Self {
        let mut records = BTreeMap::new();
        records.insert(
            id,
            NodeRecord {
                position,
                neighbors: Some(neighbors),
            },
        );
        ComponentView { records }
    }

    /// Adds a node whose neighborhood is not yet known.
    pub fn note(&mut self, id: NodeId, position: Option<Point>) {
        self.records.entry(id).or_insert(NodeRecord {
            position,
            neighbors: None,
        });
    }

    /// Merges another view; returns whether anything was learned.
    pub fn merge(&mut self, other: &ComponentView) -> bool {
        let mut changed = false;
        for (id, rec) in &other.records {
            match self.records.get_mut(id) {
                None => {
                    self.records.insert(*id, rec.clone());
                    changed = true;
                }
                Some(mine) => {
                    if mine.neighbors.is_none() && rec.neighbors.is_some() {
                        mine.neighbors = rec.neighbors.clone();
                        changed = true;
                    }
                    if mine.position.is_none() && rec.position.is_some() {
                        mine.position = rec.position;
                        changed = true;
                    }
                }
            }
        }
        changed
    }

    /// True when every known node has a complete neighbor list and every
    /// referenced node is known: the view is then a whole component.
    pub fn is_closed(&self) -> bool {
        self.records.values().all(|r| {
            r.neighbors
                .as_ref()
                .is_some_and(|ns| ns.iter().all(|id| self.records.contains_key(id)))
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.records.keys().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.records
            .values()
            .filter_map(|r| r.neighbors.as_ref())
            .map(BTreeSet::len)
            .sum::<usize>()
            / 2
    }
}

impl MessageSize for ComponentView {
    fn size(&self) -> usize {
        self.records
            .values()
            .map(|r| 1 + r.neighbors.as_ref().map_or(0, BTreeSet::len))
            .sum()
    }
}

impl Display for ComponentView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.records.keys().map(|id| id.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GatherOutcome {
    Complete(ComponentView),
    /// The round budget ran out before the view closed.
    Incomplete(ComponentView),
}

impl GatherOutcome {
    pub fn view(&self) -> &ComponentView {
        match self {
            GatherOutcome::Complete(v) | GatherOutcome::Incomplete(v) => v,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, GatherOutcome::Complete(_))
    }
}

impl Display for GatherOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GatherOutcome::Complete(v) => write!(f, "complete:{v}"),
            GatherOutcome::Incomplete(v) => write!(f, "incomplete:{v}"),
        }
    }
}

/// Flooding program: every node learns its whole connected component
/// (ids, edges, and positions when location-aware).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GatherComponent {
    pub radius_cap: usize,
}

pub fn gather_component(radius_cap: usize) -> GatherComponent {
    GatherComponent { radius_cap }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GatherState {
    pub id: NodeId,
    pub position: Option<Point>,
    pub view: ComponentView,
    pub outcome: Option<GatherOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GatherMessage {
    Hello { id: NodeId, position: Option<Point> },
    View(ComponentView),
}

impl MessageSize for GatherMessage {
    fn size(&self) -> usize {
        match self {
            GatherMessage::Hello { .. } => 1,
            GatherMessage::View(v) => v.size(),
        }
    }
}

impl NodeProgram for GatherComponent {
    type State = GatherState;
    type Message = GatherMessage;
    type Output = GatherOutcome;

    fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> GatherState {
        let mut view = ComponentView::default();
        let mut outcome = None;
        if info.degree == 0 {
            view = ComponentView::single(info.id, info.position, BTreeSet::new());
            outcome = Some(GatherOutcome::Complete(view.clone()));
        } else {
            view.note(info.id, info.position);
        }
        GatherState {
            id: info.id,
            position: info.position,
            view,
            outcome,
        }
    }

    fn send(&self, state: &mut GatherState, round: usize, _rng: &mut NodeRng) -> Outbox<GatherMessage> {
        if round == 1 {
            Outbox::Broadcast(GatherMessage::Hello {
                id: state.id,
                position: state.position,
            })
        } else {
            Outbox::Broadcast(GatherMessage::View(state.view.clone()))
        }
    }

    fn receive(
        &self,
        state: &mut GatherState,
        round: usize,
        inbox: Vec<Incoming<GatherMessage>>,
        _rng: &mut NodeRng,
    ) {
        for m in inbox {
            match m.msg {
                GatherMessage::Hello { id, position } => {
                    state.view.note(id, position);
                    if let Some(rec) = state.view.records.get_mut(&state.id) {
                        rec.neighbors.get_or_insert_with(BTreeSet::new).insert(id);
                    }
                }
                GatherMessage::View(v) => {
                    state.view.merge(&v);
                }
            }
        }
        if state.outcome.is_none() {
            if state.view.is_closed() {
                state.outcome = Some(GatherOutcome::Complete(state.view.clone()));
            } else if round >= self.radius_cap {
                state.outcome = Some(GatherOutcome::Incomplete(state.view.clone()));
            }
        }
    }

    fn output(&self, state: &GatherState) -> Option<GatherOutcome> {
        state.outcome.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> UnitDiskGraph {
        UnitDiskGraph::from_points((0..n).map(|i| Point::new(0.9 * i as f64, 0.0))).unwrap()
    }

    struct OwnId;

    impl NodeProgram for OwnId {
        type State = NodeId;
        type Message = ();
        type Output = NodeId;

        fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> NodeId {
            info.id
        }
        fn send(&self, _: &mut NodeId, _: usize, _: &mut NodeRng) -> Outbox<()> {
            Outbox::Silent
        }
        fn receive(&self, _: &mut NodeId, _: usize, _: Vec<Incoming<()>>, _: &mut NodeRng) {}
        fn output(&self, s: &NodeId) -> Option<NodeId> {
            Some(*s)
        }
    }

    /// Floods the set of ids within distance t, with no termination rule.
    struct Ball;

    impl NodeProgram for Ball {
        type State = BTreeSet<NodeId>;
        type Message = Vec<NodeId>;
        type Output = ();

        fn init(&self, info: &NodeInfo, _: &mut NodeRng) -> Self::State {
            BTreeSet::from([info.id])
        }
        fn send(&self, s: &mut Self::State, _: usize, _: &mut NodeRng) -> Outbox<Vec<NodeId>> {
            Outbox::Broadcast(s.iter().copied().collect())
        }
        fn receive(&self, s: &mut Self::State, _: usize, inbox: Vec<Incoming<Vec<NodeId>>>, _: &mut NodeRng) {
            for m in inbox {
                s.extend(m.msg);
            }
        }
        fn output(&self, _: &Self::State) -> Option<()> {
            None
        }
    }

    impl MessageSize for Vec<NodeId> {
        fn size(&self) -> usize {
            self.len()
        }
    }

    #[test]
    fn zero_round_program() {
        let g = UnitDiskGraph::from_points([
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.1),
            Point::new(1.0, 0.0),
        ])
        .unwrap();
        let cfg = SimConfig::new(Mode::Abstract, 3, 5);
        let trace = run(&g, OwnId, cfg);
        assert!(trace.rounds_executed <= 1);
        assert!(!trace.cap_exceeded);
        let outs: Vec<NodeId> = trace.outputs.iter().map(|o| o.unwrap()).collect();
        assert_eq!(outs, trace.ids);
    }

    #[test]
    fn ids_are_distinct_and_bounded() {
        for n in [1usize, 2, 10, 300] {
            let ids = assign_ids(n, 99, IdAssignment::Random { alpha: 2 });
            let set: BTreeSet<_> = ids.iter().copied().collect();
            assert_eq!(set.len(), n);
            assert!(ids.iter().all(|&i| i >= 1 && i <= (n * n) as u64));
        }
        assert_eq!(assign_ids(3, 0, IdAssignment::InputOrder), vec![1, 2, 3]);
    }

    #[test]
    fn ball_after_two_rounds_on_path() {
        let g = path(5);
        let cfg = SimConfig::new(Mode::Abstract, 1, 10).with_ids(IdAssignment::InputOrder);
        let mut sim = Simulator::new(&g, Ball, cfg);
        sim.step();
        sim.step();
        // BFS oracle: nodes within 2 hops of node 2 in the path are all five
        let expect: BTreeSet<NodeId> = (1..=5).collect();
        assert_eq!(sim.state(2), &expect);
        assert_eq!(sim.state(0), &BTreeSet::from([1, 2, 3]));
    }

    #[test]
    fn gather_on_short_path() {
        let g = path(3);
        let cfg = SimConfig::new(Mode::Abstract, 5, 4);
        let trace = run(&g, gather_component(4), cfg);
        assert!(!trace.cap_exceeded);
        for o in &trace.outputs {
            let o = o.as_ref().unwrap();
            assert!(o.is_complete());
            assert_eq!(o.view().len(), 3);
            assert_eq!(o.view().edge_count(), 2);
        }
    }

    #[test]
    fn gather_isolated_vertex() {
        let g = UnitDiskGraph::from_points([Point::new(0.0, 0.0)]).unwrap();
        let trace = run(&g, gather_component(1), SimConfig::new(Mode::LocationAware, 0, 1));
        let o = trace.outputs[0].as_ref().unwrap();
        assert!(o.is_complete());
        assert_eq!(o.view().len(), 1);
        assert_eq!(
            o.view().records.values().next().unwrap().position,
            Some(Point::new(0.0, 0.0))
        );
    }

    #[test]
    fn gather_reports_incomplete_when_cap_too_small() {
        let g = path(6);
        let trace = run(&g, gather_component(2), SimConfig::new(Mode::Abstract, 0, 10));
        assert!(trace.outputs.iter().all(|o| !o.as_ref().unwrap().is_complete()));
    }

    #[test]
    fn runs_are_deterministic() {
        let g = path(7);
        let cfg = SimConfig::new(Mode::LocationAware, 42, 20);
        let a = run(&g, gather_component(20), cfg);
        let b = run(&g, gather_component(20), cfg);
        assert_eq!(a, b);
        assert_eq!(a.export(), b.export());
    }
}
