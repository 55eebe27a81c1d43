//! After `t` rounds a node's state may depend only on its `t`-hop ball.
//! Moving every vertex at hop distance `t + 2` or more far away changes the
//! graph beyond that ball (including degrees at distance `t + 1`) and must
//! leave the state after `t` rounds untouched.

mod common;

use std::collections::VecDeque;
use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udcolor::coloring::{BaselineProgram, FiveSixEightProgram, FourOmegaProgram, StripeLayout};
use udcolor::geometry::Point;
use udcolor::localsim::{gather_component, IdAssignment, Mode, NodeProgram, SimConfig, Simulator};
use udcolor::udg::UnitDiskGraph;

fn hops(g: &UnitDiskGraph, src: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.n()];
    d[src] = 0;
    let mut q = VecDeque::from([src]);
    while let Some(u) = q.pop_front() {
        for nb in g.neighbors(u) {
            if d[nb.id] == usize::MAX {
                d[nb.id] = d[u] + 1;
                q.push_back(nb.id);
            }
        }
    }
    d
}

fn state_after<P>(g: &UnitDiskGraph, program: P, cfg: SimConfig, v: usize, t: usize) -> P::State
where
    P: NodeProgram,
    P::State: Clone,
{
    let mut sim = Simulator::new(g, program, cfg);
    for _ in 0..t {
        sim.step();
    }
    sim.state(v).clone()
}

fn check<P>(make: impl Fn() -> P, mode: Mode, label: &str)
where
    P: NodeProgram,
    P::State: Clone + PartialEq + Debug,
{
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut tested = 0;
    for inst in 0..20u64 {
        let pts: Vec<Point> = (0..120)
            .map(|_| Point::new(rng.random_range(0.0..9.0), rng.random_range(0.0..3.0)))
            .collect();
        let g = UnitDiskGraph::from_points(pts.clone()).unwrap();
        let v = rng.random_range(0..g.n());
        let t = 1 + (inst as usize % 3);
        let d = hops(&g, v);
        if !d.iter().any(|&h| h != usize::MAX && h >= t + 2) {
            continue;
        }
        let moved: Vec<Point> = pts
            .iter()
            .zip(&d)
            .map(|(p, &h)| if h >= t + 2 { Point::new(p.x + 1000.0, p.y) } else { *p })
            .collect();
        let h = UnitDiskGraph::from_points(moved).unwrap();
        let cfg = SimConfig::new(mode, inst, 100).with_ids(IdAssignment::InputOrder);
        let a = state_after(&g, make(), cfg, v, t);
        let b = state_after(&h, make(), cfg, v, t);
        assert_eq!(a, b, "{label}: instance {inst}, node {v}, t={t}");
        tested += 1;
    }
    assert!(tested >= 10, "{label}: only {tested} informative instances");
}

#[test]
fn gather_is_local() {
    check(|| gather_component(50), Mode::Abstract, "gather");
}

#[test]
fn five_six_eight_is_local() {
    check(|| FiveSixEightProgram { omega: 1 }, Mode::Abstract, "568 (high phase)");
    check(|| FiveSixEightProgram { omega: 6 }, Mode::Abstract, "568");
}

#[test]
fn baseline_is_local() {
    check(|| BaselineProgram, Mode::Abstract, "baseline");
}

#[test]
fn four_omega_is_local() {
    check(
        || FourOmegaProgram {
            omega: 6,
            layout: StripeLayout::default(),
        },
        Mode::LocationAware,
        "4omega",
    );
}
