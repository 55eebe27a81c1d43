//! Location-aware 4ω coloring.
//!
//! The plane is cut into horizontal stripes of height `sqrt(3)/2`. Each
//! stripe carries unit-length rectangles repeating with period 6, staggered
//! by 2.2 from one stripe to the next; what remains of a stripe are segments
//! of length 5. Segments in stripes `j ≡ i (mod 3)` share the color block
//! `[i ω, (i+1) ω)`, and all rectangles share `[3ω, 4ω)`. Every part is
//! colored optimally by the strip greedy after gathering its component.

use std::collections::BTreeSet;
use std::fmt;

use super::strip::{strip_greedy, StripPoint};
use super::{Coloring, ColoringError};
use crate::geometry::{Point, STRIP_HEIGHT};
use crate::localsim::{
    self, ComponentView, Incoming, MessageSize, Mode, NodeId, NodeInfo, NodeProgram, NodeRng,
    Outbox, RoundTrace, SimConfig,
};
use crate::udg::UnitDiskGraph;

/// Rounds allowed for gathering a part (part diameter is at most 20).
pub const GATHER_CAP: usize = 24;
/// Total round budget of the 4ω program.
pub const ROUND_CAP: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripeLayout {
    pub height: f64,
    pub period: f64,
    pub rect_len: f64,
    pub stagger: f64,
}

impl Default for StripeLayout {
    fn default() -> Self {
        StripeLayout {
            height: STRIP_HEIGHT,
            period: 6.0,
            rect_len: 1.0,
            stagger: 2.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// Segment between rectangles `index` and `index + 1` of `stripe`.
    Segment { class: u8, stripe: i64, index: i64 },
    Rectangle { stripe: i64, index: i64 },
}

impl Region {
    /// First color of the block this region draws from.
    pub fn palette_offset(&self, omega: u32) -> u32 {
        match *self {
            Region::Segment { class, .. } => class as u32 * omega,
            Region::Rectangle { .. } => 3 * omega,
        }
    }
}

/// Gaps between parts that are colored from the same block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub same_stripe_gap: f64,
    pub adjacent_stripe_gap: f64,
    pub two_apart_distance: f64,
    pub segment_length: f64,
}

impl StripeLayout {
    /// Stripe `j` covers `[(j-1) h, j h)`.
    pub fn stripe_index(&self, y: f64) -> i64 {
        (y / self.height).floor() as i64 + 1
    }

    /// Horizontal offset of the rectangle lattice in stripe `j`.
    pub fn offset(&self, stripe: i64) -> f64 {
        (self.stagger * stripe as f64).rem_euclid(self.period)
    }

    pub fn classify(&self, p: Point) -> Region {
        let stripe = self.stripe_index(p.y);
        let rel = p.x - self.offset(stripe);
        let index = (rel / self.period).floor() as i64;
        let s = rel - index as f64 * self.period;
        if s < self.rect_len {
            Region::Rectangle { stripe, index }
        } else {
            Region::Segment {
                class: stripe.rem_euclid(3) as u8,
                stripe,
                index,
            }
        }
    }

    /// Circular gap between unit rectangles whose offsets differ by `shift`.
    fn circular_gap(&self, shift: f64) -> f64 {
        let s = shift.rem_euclid(self.period);
        (s - self.rect_len).min(self.period - s - self.rect_len)
    }

    pub fn separation(&self) -> Separation {
        Separation {
            same_stripe_gap: self.period - self.rect_len,
            adjacent_stripe_gap: self.circular_gap(self.stagger),
            two_apart_distance: self.circular_gap(2.0 * self.stagger).hypot(self.height),
            segment_length: self.period - self.rect_len,
        }
    }

    /// Checks that rectangles are pairwise more than 1 apart, consecutive
    /// rectangles at most 5 apart, and segments no longer than 5.
    pub fn verify(&self) -> Result<Separation, ColoringError> {
        let s = self.separation();
        let fail = |what: String| Err(ColoringError::Layout(what));
        if s.same_stripe_gap <= 1.0 || s.same_stripe_gap > 5.0 {
            return fail(format!("same-stripe gap {}", s.same_stripe_gap));
        }
        if s.adjacent_stripe_gap <= 1.0 {
            return fail(format!("adjacent-stripe gap {}", s.adjacent_stripe_gap));
        }
        if s.two_apart_distance <= 1.0 {
            return fail(format!("two-apart distance {}", s.two_apart_distance));
        }
        if 2.0 * self.height <= 1.0 {
            return fail("stripes three apart are within distance 1".into());
        }
        if s.segment_length > 5.0 {
            return fail(format!("segment length {}", s.segment_length));
        }
        Ok(s)
    }
}

/// Gathering restricted to neighbors that share a part.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PartView {
    pub view: ComponentView,
    pub peer_ports: BTreeSet<usize>,
}

impl PartView {
    pub fn new(id: NodeId, position: Point, peers: &[(usize, NodeId, Point)]) -> Self {
        let mut view = ComponentView::single(
            id,
            Some(position),
            peers.iter().map(|&(_, pid, _)| pid).collect(),
        );
        for &(_, pid, pos) in peers {
            view.note(pid, Some(pos));
        }
        PartView {
            view,
            peer_ports: peers.iter().map(|&(port, _, _)| port).collect(),
        }
    }

    /// Strip-greedy color of `id` within the gathered part.
    pub fn color_of(&self, id: NodeId) -> Result<(u32, u32), ColoringError> {
        let pts: Vec<StripPoint> = self
            .view
            .records
            .iter()
            .map(|(&key, rec)| StripPoint {
                key,
                pos: rec.position.expect("location-aware gather carries positions"),
            })
            .collect();
        let colors = strip_greedy(&pts)?;
        let used = colors.iter().copied().max().map_or(0, |c| c + 1);
        let mine = pts
            .iter()
            .position(|p| p.key == id)
            .map(|i| colors[i])
            .expect("own record present");
        Ok((mine, used))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartOutcome {
    Colored(u32),
    /// The part needs more than `omega` colors, so `omega` was too small.
    TooManyColors { used: u32 },
    /// The part did not close within the gather budget.
    Unstable,
    Invalid(String),
}

impl fmt::Display for PartOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartOutcome::Colored(c) => write!(f, "{c}"),
            PartOutcome::TooManyColors { used } => write!(f, "too-many-colors:{used}"),
            PartOutcome::Unstable => write!(f, "unstable"),
            PartOutcome::Invalid(s) => write!(f, "invalid:{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartMessage {
    Hello { id: NodeId, position: Point },
    View(ComponentView),
}

impl MessageSize for PartMessage {
    fn size(&self) -> usize {
        match self {
            PartMessage::Hello { .. } => 3,
            PartMessage::View(v) => v.size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourOmegaState {
    id: NodeId,
    position: Option<Point>,
    region: Option<Region>,
    part: Option<PartView>,
    outcome: Option<PartOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourOmegaProgram {
    pub omega: u32,
    pub layout: StripeLayout,
}

impl FourOmegaProgram {
    fn finish(&self, state: &mut FourOmegaState) {
        let (Some(part), Some(region)) = (&state.part, state.region) else {
            return;
        };
        state.outcome = Some(match part.color_of(state.id) {
            Ok((c, used)) if used <= self.omega => {
                PartOutcome::Colored(region.palette_offset(self.omega) + c)
            }
            Ok((_, used)) => PartOutcome::TooManyColors { used },
            Err(e) => PartOutcome::Invalid(e.to_string()),
        });
    }
}

impl NodeProgram for FourOmegaProgram {
    type State = FourOmegaState;
    type Message = PartMessage;
    type Output = PartOutcome;

    fn init(&self, info: &NodeInfo, _rng: &mut NodeRng) -> FourOmegaState {
        let mut state = FourOmegaState {
            id: info.id,
            position: info.position,
            region: info.position.map(|p| self.layout.classify(p)),
            part: None,
            outcome: None,
        };
        match info.position {
            None => {
                state.outcome = Some(PartOutcome::Invalid("needs coordinates".into()));
            }
            Some(p) if info.degree == 0 => {
                state.part = Some(PartView::new(info.id, p, &[]));
                self.finish(&mut state);
            }
            Some(_) => {}
        }
        state
    }

    fn send(&self, state: &mut FourOmegaState, round: usize, _rng: &mut NodeRng) -> Outbox<PartMessage> {
        let Some(position) = state.position else {
            return Outbox::Silent;
        };
        if round == 1 {
            return Outbox::Broadcast(PartMessage::Hello {
                id: state.id,
                position,
            });
        }
        match &state.part {
            Some(part) if !part.peer_ports.is_empty() => {
                let last = *part.peer_ports.iter().next_back().unwrap();
                Outbox::PerPort(
                    (0..=last)
                        .map(|p| {
                            part.peer_ports
                                .contains(&p)
                                .then(|| PartMessage::View(part.view.clone()))
                        })
                        .collect(),
                )
            }
            _ => Outbox::Silent,
        }
    }

    fn receive(
        &self,
        state: &mut FourOmegaState,
        round: usize,
        inbox: Vec<Incoming<PartMessage>>,
        _rng: &mut NodeRng,
    ) {
        let (Some(position), Some(region)) = (state.position, state.region) else {
            return;
        };
        if round == 1 {
            let peers: Vec<(usize, NodeId, Point)> = inbox
                .iter()
                .filter_map(|m| match m.msg {
                    PartMessage::Hello { id, position } => {
                        (self.layout.classify(position) == region).then_some((m.port, id, position))
                    }
                    PartMessage::View(_) => None,
                })
                .collect();
            state.part = Some(PartView::new(state.id, position, &peers));
        } else if let Some(part) = state.part.as_mut() {
            for m in inbox {
                if let PartMessage::View(v) = m.msg {
                    if part.peer_ports.contains(&m.port) {
                        part.view.merge(&v);
                    }
                }
            }
        }
        if state.outcome.is_none() {
            if state.part.as_ref().is_some_and(|p| p.view.is_closed()) {
                self.finish(state);
            } else if round > GATHER_CAP {
                state.outcome = Some(PartOutcome::Unstable);
            }
        }
    }

    fn output(&self, state: &FourOmegaState) -> Option<PartOutcome> {
        state.outcome.clone()
    }
}

/// Runs the 4ω program in location-aware mode and assembles the coloring.
pub fn color_4omega(
    g: &UnitDiskGraph,
    omega: u32,
    seed: u64,
) -> Result<(Coloring, RoundTrace<PartOutcome>), ColoringError> {
    if omega == 0 && g.n() > 0 {
        return Err(ColoringError::InvalidParameter("omega must be positive".into()));
    }
    let layout = StripeLayout::default();
    layout.verify()?;
    let program = FourOmegaProgram { omega, layout };
    let trace = localsim::run(g, program, SimConfig::new(Mode::LocationAware, seed, ROUND_CAP));
    let mut colors = Vec::with_capacity(g.n());
    for (v, out) in trace.outputs.iter().enumerate() {
        match out {
            Some(PartOutcome::Colored(c)) => colors.push(*c),
            Some(other) => {
                return Err(ColoringError::NodeFailed {
                    vertex: v,
                    reason: other.to_string(),
                })
            }
            None => {
                return Err(ColoringError::RoundCapExceeded {
                    cap: ROUND_CAP,
                    unfinished: trace.outputs.iter().filter(|o| o.is_none()).count(),
                })
            }
        }
    }
    Ok((
        Coloring {
            colors,
            palette_size: 4 * omega,
        },
        trace,
    ))
}
