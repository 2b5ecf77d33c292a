//! Zero-temperature asymptotics: barrier and escape functions on the minimum
//! spanning tree, and the sink-cutting recursion that yields asymptotic
//! eigenvalue exponents with indicator eigenvectors.
//!
//! Eigenpairs come out ordered by increasing eigenvalue, which means the
//! barrier exponents satisfy `delta[0] >= delta[1] >= ...`: the deepest trap
//! relaxes slowest and is found first.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::mst::{self, SpanningTree};
use crate::network::{EdgeIx, Network, StateIx};
use crate::util::OrdF64;

const NO_EDGE: EdgeIx = usize::MAX;
const NO_STATE: StateIx = usize::MAX;

/// Tolerance used when hunting for exact-value collisions that break the
/// genericness assumption.
pub const GENERICNESS_TOLERANCE: f64 = 1e-12;

/// Barrier function u, escape function v = u - V, and for every state the
/// sink it drains to together with the highest saddle on the way there.
///
/// States outside the computed region report NaN / `None`.
#[derive(Debug)]
pub struct BarrierFunctions {
    u: Vec<f64>,
    v: Vec<f64>,
    sink_of: Vec<StateIx>,
    bottleneck: Vec<EdgeIx>,
}

impl BarrierFunctions {
    fn unset(n: usize) -> Self {
        BarrierFunctions {
            u: vec![f64::NAN; n],
            v: vec![f64::NAN; n],
            sink_of: vec![NO_STATE; n],
            bottleneck: vec![NO_EDGE; n],
        }
    }

    /// Lowest highest-saddle energy separating `i` from the sink set. At a
    /// sink this is the state's own energy.
    pub fn u(&self, i: StateIx) -> f64 {
        self.u[i]
    }

    /// Escape barrier v(i) = u(i) - V_i; zero at sinks.
    pub fn v(&self, i: StateIx) -> f64 {
        self.v[i]
    }

    /// The sink realizing u(i), or `None` outside the computed region.
    pub fn sink_of(&self, i: StateIx) -> Option<StateIx> {
        match self.sink_of[i] {
            NO_STATE => None,
            s => Some(s),
        }
    }

    /// Highest saddle on the path from `i` to its sink; `None` at sinks and
    /// outside the computed region.
    pub fn bottleneck_edge(&self, i: StateIx) -> Option<EdgeIx> {
        match self.bottleneck[i] {
            NO_EDGE => None,
            e => Some(e),
        }
    }

    /// Whether state `i` was part of the computed region.
    pub fn is_defined(&self, i: StateIx) -> bool {
        self.sink_of[i] != NO_STATE
    }
}

/// Scratch buffers shared by repeated propagation sweeps so the recursion
/// does not allocate per step.
struct Scratch {
    stamp: Vec<u64>,
    done: Vec<u64>,
    epoch: u64,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { stamp: vec![0; n], done: vec![0; n], epoch: 0 }
    }
}

/// Multi-sink minimax sweep over the alive tree edges. Processes states in
/// increasing barrier order so each state is finalized with the least
/// attainable path maximum; relies on saddles dominating their endpoint
/// minima, which `Network::build` guarantees by clamping.
///
/// When `restrict` is true, only states stamped with the current epoch are
/// touched. Returns the number of finalized states.
fn propagate(
    net: &Network,
    adj: &[Vec<EdgeIx>],
    dead: &[bool],
    sinks: &[StateIx],
    restrict: bool,
    scratch: &mut Scratch,
    bar: &mut BarrierFunctions,
) -> usize {
    let epoch = scratch.epoch;
    let mut heap: BinaryHeap<Reverse<(OrdF64, StateIx, StateIx, EdgeIx)>> = BinaryHeap::new();
    for &s in sinks {
        heap.push(Reverse((OrdF64(net.energy(s)), s, s, NO_EDGE)));
    }
    let mut finalized = 0usize;
    while let Some(Reverse((OrdF64(u), i, sink, bneck))) = heap.pop() {
        if scratch.done[i] == epoch {
            continue;
        }
        scratch.done[i] = epoch;
        finalized += 1;
        bar.u[i] = u;
        bar.v[i] = u - net.energy(i);
        bar.sink_of[i] = sink;
        bar.bottleneck[i] = bneck;
        for &e in &adj[i] {
            if dead[e] {
                continue;
            }
            let j = net.edge(e).other(i);
            if scratch.done[j] == epoch || (restrict && scratch.stamp[j] != epoch) {
                continue;
            }
            let cost = net.edge(e).energy;
            let cand_u = if cost > u { cost } else { u };
            let cand_bneck = mst::max_edge(net, bneck, e);
            heap.push(Reverse((OrdF64(cand_u), j, sink, cand_bneck)));
        }
    }
    finalized
}

/// Computes barrier and escape functions on the spanning tree for the given
/// sink set, optionally restricted to a connected subset of states.
///
/// Every sink `s` gets `u(s) = V_s` and `v(s) = 0`; other states get the
/// lowest highest-saddle energy over tree paths into the sink set.
pub fn barrier_escape(
    net: &Network,
    tree: &SpanningTree,
    sinks: &[StateIx],
    restricted_to: Option<&[StateIx]>,
) -> Result<BarrierFunctions> {
    let n = net.num_states();
    if sinks.is_empty() {
        return Err(Error::domain("barrier functions need at least one sink"));
    }
    for &s in sinks {
        if s >= n {
            return Err(Error::domain(format!("sink index {s} out of range for {n} states")));
        }
    }
    let mut scratch = Scratch::new(n);
    scratch.epoch = 1;
    let adj: Vec<Vec<EdgeIx>> = (0..n).map(|i| tree.adjacent(i).to_vec()).collect();
    let mut expected = n;
    if let Some(set) = restricted_to {
        expected = 0;
        for &i in set {
            if i >= n {
                return Err(Error::domain(format!("state index {i} out of range for {n} states")));
            }
            if scratch.stamp[i] != scratch.epoch {
                scratch.stamp[i] = scratch.epoch;
                expected += 1;
            }
        }
        for &s in sinks {
            if scratch.stamp[s] != scratch.epoch {
                return Err(Error::structure(format!(
                    "sink state {s} lies outside the restricted component"
                )));
            }
        }
        // The restriction must be one connected piece of the tree.
        let mut stack = vec![set[0]];
        let mut seen = 1usize;
        scratch.done[set[0]] = scratch.epoch;
        while let Some(i) = stack.pop() {
            for &e in &adj[i] {
                let j = net.edge(e).other(i);
                if scratch.stamp[j] == scratch.epoch && scratch.done[j] != scratch.epoch {
                    scratch.done[j] = scratch.epoch;
                    stack.push(j);
                    seen += 1;
                }
            }
        }
        if seen != expected {
            return Err(Error::structure(
                "restricted state set is not a single connected piece of the tree",
            ));
        }
        scratch.epoch += 1;
        for &i in set {
            scratch.stamp[i] = scratch.epoch;
        }
    }
    let dead = vec![false; net.num_edges()];
    let mut bar = BarrierFunctions::unset(n);
    let reached = propagate(
        net,
        &adj,
        &dead,
        sinks,
        restricted_to.is_some(),
        &mut scratch,
        &mut bar,
    );
    debug_assert_eq!(reached, expected);
    Ok(bar)
}

/// One step of the asymptotic recursion: the k-th slowest relaxation mode.
///
/// The eigenvalue behaves as `exp(-delta / T)` for small temperature `T`, and
/// the right eigenvector approaches the indicator of `members`.
#[derive(Debug, Clone)]
pub struct AsymptoticEigenpair {
    /// Rank k, starting at 1 for the slowest nonzero mode.
    pub rank: usize,
    /// The new sink s*_k, the deepest state of the detached set.
    pub sink: StateIx,
    /// The cut saddle: highest edge on the path from the sink to the
    /// previously established sink set.
    pub cutting_edge: EdgeIx,
    /// Barrier exponent delta_k = V(cutting_edge) - V(sink).
    pub delta: f64,
    /// Quasi-invariant set S_k: the forest component of the sink once the
    /// cutting edge is removed. Sorted by state index.
    pub members: Vec<StateIx>,
    /// Freidlin cycle C_k: the states whose barrier value changed in this
    /// step (always including the sink). Sorted by state index.
    pub changed: Vec<StateIx>,
    /// Label of the forest component the cutting edge belonged to when it
    /// was cut; used to classify near-ties between consecutive steps.
    pub(crate) component_label: usize,
}

impl AsymptoticEigenpair {
    /// Indicator vector of S_k over `n` states.
    pub fn indicator(&self, n: usize) -> Vec<f64> {
        let mut phi = vec![0.0; n];
        for &i in &self.members {
            phi[i] = 1.0;
        }
        phi
    }

    /// Whether state `i` belongs to S_k.
    pub fn contains(&self, i: StateIx) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// The asymptotic spectrum: sinks, cutting edges, and barrier exponents for
/// the requested number of slowest modes.
pub struct AsymptoticSpectrum {
    initial_sink: StateIx,
    pairs: Vec<AsymptoticEigenpair>,
}

impl AsymptoticSpectrum {
    /// The global minimum s*_0 seeding the recursion.
    pub fn initial_sink(&self) -> StateIx {
        self.initial_sink
    }

    pub fn pairs(&self) -> &[AsymptoticEigenpair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Barrier exponents in emission order (non-increasing on generic
    /// landscapes).
    pub fn deltas(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.delta).collect()
    }
}

struct Recursion<'a> {
    net: &'a Network,
    adj: Vec<Vec<EdgeIx>>,
    dead: Vec<bool>,
    bar: BarrierFunctions,
    comp: Vec<usize>,
    is_sink: Vec<bool>,
    heap: BinaryHeap<(OrdF64, Reverse<StateIx>)>,
    scratch: Scratch,
}

impl<'a> Recursion<'a> {
    fn start(net: &'a Network, tree: &SpanningTree) -> Self {
        let n = net.num_states();
        let adj: Vec<Vec<EdgeIx>> = (0..n).map(|i| tree.adjacent(i).to_vec()).collect();
        let dead = vec![false; net.num_edges()];
        let mut scratch = Scratch::new(n);
        scratch.epoch = 1;
        let mut bar = BarrierFunctions::unset(n);
        let s0 = net.global_minimum();
        propagate(net, &adj, &dead, &[s0], false, &mut scratch, &mut bar);
        let mut is_sink = vec![false; n];
        is_sink[s0] = true;
        let mut heap = BinaryHeap::with_capacity(n);
        for i in 0..n {
            if i != s0 {
                heap.push((OrdF64(bar.v[i]), Reverse(i)));
            }
        }
        Recursion {
            net,
            adj,
            dead,
            bar,
            comp: vec![0; n],
            is_sink,
            heap,
            scratch,
        }
    }

    /// Pops the state with the largest escape barrier, preferring the lowest
    /// index on exact ties. Entries made stale by later updates are skipped.
    fn select(&mut self) -> (StateIx, f64) {
        loop {
            let (OrdF64(val), Reverse(i)) = self
                .heap
                .pop()
                .expect("a non-sink state remains while k <= N-1");
            if self.is_sink[i] || val.to_bits() != self.bar.v[i].to_bits() {
                continue;
            }
            return (i, val);
        }
    }

    fn step(&mut self, rank: usize) -> AsymptoticEigenpair {
        let (sink, delta) = self.select();
        let cutting_edge = self.bar.bottleneck[sink];
        debug_assert_ne!(cutting_edge, NO_EDGE);
        let component_label = self.comp[sink];
        self.dead[cutting_edge] = true;

        // The detached component, stamped for the restricted sweep below.
        self.scratch.epoch += 1;
        let epoch = self.scratch.epoch;
        let mut members = vec![sink];
        self.scratch.stamp[sink] = epoch;
        let mut head = 0;
        while head < members.len() {
            let i = members[head];
            head += 1;
            for &e in &self.adj[i] {
                if self.dead[e] {
                    continue;
                }
                let j = self.net.edge(e).other(i);
                if self.scratch.stamp[j] != epoch {
                    self.scratch.stamp[j] = epoch;
                    members.push(j);
                }
            }
        }

        let old_u: Vec<f64> = members.iter().map(|&i| self.bar.u[i]).collect();
        self.is_sink[sink] = true;
        let reached = propagate(
            self.net,
            &self.adj,
            &self.dead,
            &[sink],
            true,
            &mut self.scratch,
            &mut self.bar,
        );
        debug_assert_eq!(reached, members.len());

        let mut changed = Vec::new();
        for (&i, &ou) in members.iter().zip(&old_u) {
            if self.bar.u[i].to_bits() != ou.to_bits() {
                changed.push(i);
                if !self.is_sink[i] {
                    self.heap.push((OrdF64(self.bar.v[i]), Reverse(i)));
                }
            }
        }
        if !changed.contains(&sink) {
            changed.push(sink);
        }
        changed.sort_unstable();
        for &i in &members {
            self.comp[i] = rank;
        }
        members.sort_unstable();

        AsymptoticEigenpair {
            rank,
            sink,
            cutting_edge,
            delta,
            members,
            changed,
            component_label,
        }
    }

    #[cfg(test)]
    fn sinks(&self) -> Vec<StateIx> {
        (0..self.net.num_states()).filter(|&i| self.is_sink[i]).collect()
    }
}

fn spectrum_with_observer(
    net: &Network,
    k_max: usize,
    mut observe: impl FnMut(&Recursion),
) -> Result<AsymptoticSpectrum> {
    let tree = mst::minimum_spanning_tree(net)?;
    let n = net.num_states();
    if k_max < 1 || k_max > n.saturating_sub(1) {
        return Err(Error::domain(format!(
            "spectrum depth {k_max} outside 1..={} for {n} states",
            n.saturating_sub(1)
        )));
    }
    let mut rec = Recursion::start(net, &tree);
    let mut pairs = Vec::with_capacity(k_max);
    for rank in 1..=k_max {
        pairs.push(rec.step(rank));
        observe(&rec);
    }
    Ok(AsymptoticSpectrum { initial_sink: net.global_minimum(), pairs })
}

/// Runs the sink-cutting recursion for the `k_max` slowest relaxation modes.
///
/// Starting from the global minimum, each step picks the non-sink state with
/// the largest escape barrier, cuts the highest saddle on its path to the
/// sink set, and records the detached component as the next quasi-invariant
/// set. Barrier values are refreshed only inside the detached component.
pub fn asymptotic_spectrum(net: &Network, k_max: usize) -> Result<AsymptoticSpectrum> {
    spectrum_with_observer(net, k_max, |_| {})
}

/// A pair of consecutive recursion steps whose barrier exponents collide
/// within [`GENERICNESS_TOLERANCE`].
///
/// A tie is benign when the second cut happened outside the component
/// detached by the first, in which case the two modes merely share a rate
/// and their eigenvectors are still correct. A tie inside that component can
/// corrupt the two indicator vectors involved, though never later ones.
#[derive(Debug, Clone)]
pub struct DeltaTie {
    pub first_rank: usize,
    pub second_rank: usize,
    pub delta: f64,
    pub benign: bool,
}

/// Violations of the genericness assumption: collisions among state
/// energies, saddle energies, or realized barrier exponents.
#[derive(Debug, Clone, Default)]
pub struct GenericnessReport {
    /// Pairs of distinct states with equal energy (each collision chain
    /// reported as adjacent pairs in energy order).
    pub duplicate_state_energies: Vec<(StateIx, StateIx)>,
    /// Pairs of distinct edges with equal saddle energy.
    pub duplicate_saddle_energies: Vec<(EdgeIx, EdgeIx)>,
    /// Consecutive recursion steps with equal barrier exponent.
    pub delta_ties: Vec<DeltaTie>,
}

impl GenericnessReport {
    pub fn is_generic(&self) -> bool {
        self.duplicate_state_energies.is_empty()
            && self.duplicate_saddle_energies.is_empty()
            && self.delta_ties.is_empty()
    }
}

fn duplicate_pairs(values: impl Iterator<Item = f64>) -> Vec<(usize, usize)> {
    let mut order: Vec<(f64, usize)> = values.enumerate().map(|(i, x)| (x, i)).collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut out = Vec::new();
    for w in order.windows(2) {
        if (w[1].0 - w[0].0).abs() <= GENERICNESS_TOLERANCE {
            let (i, j) = (w[0].1, w[1].1);
            out.push((i.min(j), i.max(j)));
        }
    }
    out
}

/// Scans a network for violations of the genericness assumption underlying
/// the asymptotic recursion.
///
/// Duplicate state and saddle energies are always reported. Barrier-exponent
/// ties are analyzed by running the full recursion, which needs a connected
/// network; on a disconnected one only the energy collisions are reported.
pub fn check_genericness(net: &Network) -> GenericnessReport {
    let mut report = GenericnessReport {
        duplicate_state_energies: duplicate_pairs(net.states().iter().map(|m| m.energy)),
        duplicate_saddle_energies: duplicate_pairs(net.edges().iter().map(|e| e.energy)),
        delta_ties: Vec::new(),
    };
    if net.num_states() < 2 || !net.is_connected() {
        return report;
    }
    let spectrum = asymptotic_spectrum(net, net.num_states() - 1)
        .expect("connected network admits a full recursion");
    for w in spectrum.pairs().windows(2) {
        if (w[0].delta - w[1].delta).abs() <= GENERICNESS_TOLERANCE {
            report.delta_ties.push(DeltaTie {
                first_rank: w[0].rank,
                second_rank: w[1].rank,
                delta: w[0].delta,
                benign: w[1].component_label != w[0].rank,
            });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn barrier_three_chain_single_sink() {
        let net = synthetic::three_chain();
        let tree = mst::minimum_spanning_tree(&net).unwrap();
        let bar = barrier_escape(&net, &tree, &[0], None).unwrap();
        assert_eq!(bar.u(0), 0.0);
        assert_eq!(bar.v(0), 0.0);
        assert!((bar.u(1) - 1.0).abs() < 1e-15);
        assert!((bar.v(1) - 0.5).abs() < 1e-15);
        assert!((bar.u(2) - 1.0).abs() < 1e-15);
        assert!((bar.v(2) - 0.9).abs() < 1e-15);
        assert_eq!(bar.sink_of(1), Some(0));
        assert_eq!(bar.sink_of(2), Some(0));
        assert_eq!(bar.bottleneck_edge(0), None);
        let b2 = bar.bottleneck_edge(2).unwrap();
        assert_eq!((net.edge(b2).a, net.edge(b2).b), (0, 1));
    }

    #[test]
    fn barrier_every_state_a_sink() {
        let net = synthetic::three_chain();
        let tree = mst::minimum_spanning_tree(&net).unwrap();
        let bar = barrier_escape(&net, &tree, &[0, 1, 2], None).unwrap();
        for i in 0..3 {
            assert_eq!(bar.u(i), net.energy(i));
            assert_eq!(bar.v(i), 0.0);
            assert_eq!(bar.sink_of(i), Some(i));
            assert_eq!(bar.bottleneck_edge(i), None);
        }
    }

    #[test]
    fn barrier_multi_sink_takes_nearest() {
        let net = synthetic::three_chain();
        let tree = mst::minimum_spanning_tree(&net).unwrap();
        let bar = barrier_escape(&net, &tree, &[0, 2], None).unwrap();
        assert!((bar.u(1) - 0.7).abs() < 1e-15);
        assert_eq!(bar.sink_of(1), Some(2));
    }

    #[test]
    fn barrier_restriction_and_errors() {
        let net = synthetic::three_chain();
        let tree = mst::minimum_spanning_tree(&net).unwrap();
        let bar = barrier_escape(&net, &tree, &[2], Some(&[1, 2])).unwrap();
        assert!(!bar.is_defined(0));
        assert!(bar.u(0).is_nan());
        assert!((bar.u(1) - 0.7).abs() < 1e-15);
        assert_eq!(bar.sink_of(1), Some(2));

        let err = barrier_escape(&net, &tree, &[0], Some(&[1, 2])).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        let err = barrier_escape(&net, &tree, &[], None).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = barrier_escape(&net, &tree, &[0, 2], Some(&[0, 2])).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn spectrum_three_chain() {
        let net = synthetic::three_chain();
        let spec = asymptotic_spectrum(&net, 2).unwrap();
        assert_eq!(spec.initial_sink(), 0);
        let p1 = &spec.pairs()[0];
        assert_eq!(p1.rank, 1);
        assert_eq!(p1.sink, 2);
        let cut = net.edge(p1.cutting_edge);
        assert_eq!((cut.a, cut.b), (0, 1));
        assert!((p1.delta - 0.9).abs() < 1e-15);
        assert_eq!(p1.members, vec![1, 2]);
        assert_eq!(p1.changed, vec![1, 2]);
        let p2 = &spec.pairs()[1];
        assert_eq!(p2.sink, 1);
        let cut = net.edge(p2.cutting_edge);
        assert_eq!((cut.a, cut.b), (1, 2));
        assert!((p2.delta - 0.2).abs() < 1e-15);
        assert_eq!(p2.members, vec![1]);
        assert_eq!(p2.changed, vec![1]);
        assert!(p1.delta > p2.delta);
        assert_eq!(p1.indicator(3), vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn spectrum_two_state() {
        let net = synthetic::two_state(0.0, 0.4, 1.1);
        let spec = asymptotic_spectrum(&net, 1).unwrap();
        let p = &spec.pairs()[0];
        assert_eq!(p.sink, 1);
        assert!((p.delta - 0.7).abs() < 1e-15);
        assert_eq!(p.members, vec![1]);
    }

    #[test]
    fn spectrum_star_funnel_order() {
        let net = synthetic::funnel_with_satellites();
        let spec = asymptotic_spectrum(&net, 6).unwrap();
        let sinks: Vec<StateIx> = spec.pairs().iter().map(|p| p.sink).collect();
        assert_eq!(sinks, vec![6, 5, 4, 1, 2, 3]);
        for p in spec.pairs() {
            assert_eq!(p.members, vec![p.sink]);
            let cut = net.edge(p.cutting_edge);
            assert_eq!((cut.a, cut.b), (0, p.sink));
            let direct = cut.energy - net.energy(p.sink);
            assert_eq!(p.delta.to_bits(), direct.to_bits());
        }
        let deltas = spec.deltas();
        let expect = [4.615, 4.56, 4.50, 1.10, 0.22, 0.15];
        for (d, e) in deltas.iter().zip(expect) {
            assert!((d - e).abs() < 1e-12, "delta {d} vs {e}");
        }
        for w in deltas.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn spectrum_depth_out_of_range() {
        let net = synthetic::three_chain();
        assert!(matches!(asymptotic_spectrum(&net, 0), Err(Error::Domain(_))));
        assert!(matches!(asymptotic_spectrum(&net, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn incremental_update_matches_global_recomputation() {
        let net = synthetic::random_landscape(7, 40, 12);
        let k_max = 20;
        let mut checked = 0;
        spectrum_with_observer(&net, k_max, |rec| {
            let n = rec.net.num_states();
            let mut scratch = Scratch::new(n);
            scratch.epoch = 1;
            let mut fresh = BarrierFunctions::unset(n);
            let sinks = rec.sinks();
            let reached =
                propagate(rec.net, &rec.adj, &rec.dead, &sinks, false, &mut scratch, &mut fresh);
            assert_eq!(reached, n);
            for i in 0..n {
                assert_eq!(fresh.u[i].to_bits(), rec.bar.u[i].to_bits(), "u at {i}");
                assert_eq!(fresh.v[i].to_bits(), rec.bar.v[i].to_bits(), "v at {i}");
                assert_eq!(fresh.sink_of[i], rec.bar.sink_of[i], "sink at {i}");
                assert_eq!(fresh.bottleneck[i], rec.bar.bottleneck[i], "bottleneck at {i}");
            }
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked, k_max);
    }

    #[test]
    fn partition_and_component_invariants() {
        let net = synthetic::random_landscape(11, 30, 8);
        let n = net.num_states();
        let spec = asymptotic_spectrum(&net, n - 1).unwrap();
        let tree = mst::minimum_spanning_tree(&net).unwrap();

        // Replay the cuts, checking S_k is the component of its sink.
        let mut dead = vec![false; net.num_edges()];
        for p in spec.pairs() {
            dead[p.cutting_edge] = true;
            let mut seen = vec![false; n];
            let mut stack = vec![p.sink];
            seen[p.sink] = true;
            let mut comp = vec![p.sink];
            while let Some(i) = stack.pop() {
                for &e in tree.adjacent(i) {
                    if dead[e] {
                        continue;
                    }
                    let j = net.edge(e).other(i);
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                        comp.push(j);
                    }
                }
            }
            comp.sort_unstable();
            assert_eq!(comp, p.members);
            assert!(p.changed.iter().all(|i| p.members.contains(i)));
            assert!(p.changed.contains(&p.sink));
            assert!(p.delta > 0.0);
        }

        // After all N-1 cuts every state is a sink and its own component.
        let mut sinks: Vec<StateIx> = spec.pairs().iter().map(|p| p.sink).collect();
        sinks.push(spec.initial_sink());
        sinks.sort_unstable();
        let all: Vec<StateIx> = (0..n).collect();
        assert_eq!(sinks, all);

        let deltas = spec.deltas();
        for w in deltas.windows(2) {
            assert!(w[0] >= w[1], "deltas must not increase: {} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn tie_in_separate_components_is_benign() {
        // Deep branch {1,2} is detached first; afterwards state 3 (still in
        // the root component) and state 1 (inside the detached component)
        // carry barrier exponents that differ only in the last bits.
        let net = synthetic::from_energies(
            &[0.0, 0.5, 0.2, 0.3],
            &[(0, 1, 5.5), (1, 2, 1.2), (0, 3, 1.0)],
        );
        let report = check_genericness(&net);
        assert!(report.duplicate_state_energies.is_empty());
        assert!(report.duplicate_saddle_energies.is_empty());
        assert_eq!(report.delta_ties.len(), 1);
        let tie = &report.delta_ties[0];
        assert_eq!((tie.first_rank, tie.second_rank), (2, 3));
        assert!(tie.benign);
    }

    #[test]
    fn tie_inside_detached_component_is_corrupt() {
        // Cutting the trunk detaches {1,2,3}; the follow-up cut happens
        // inside that fresh component with an equal exponent.
        let net = synthetic::from_energies(
            &[0.0, 0.6, 0.05, 0.1],
            &[(0, 1, 3.0), (1, 2, 1.75), (1, 3, 3.05)],
        );
        let spec = asymptotic_spectrum(&net, 3).unwrap();
        assert_eq!(spec.pairs()[0].sink, 2);
        assert_eq!(spec.pairs()[0].members, vec![1, 2, 3]);
        assert_eq!(spec.pairs()[1].sink, 3);
        let report = check_genericness(&net);
        assert_eq!(report.delta_ties.len(), 1);
        let tie = &report.delta_ties[0];
        assert_eq!((tie.first_rank, tie.second_rank), (1, 2));
        assert!(!tie.benign);
    }

    #[test]
    fn genericness_clean_and_duplicates() {
        assert!(check_genericness(&synthetic::three_chain()).is_generic());

        let dup_state = synthetic::from_energies(
            &[0.3, 0.5, 0.5],
            &[(0, 1, 1.0), (1, 2, 1.4)],
        );
        let report = check_genericness(&dup_state);
        assert_eq!(report.duplicate_state_energies, vec![(1, 2)]);

        let dup_saddle = synthetic::from_energies(
            &[0.0, 0.4, 0.1],
            &[(0, 1, 1.3), (1, 2, 1.3)],
        );
        let report = check_genericness(&dup_saddle);
        assert_eq!(report.duplicate_saddle_energies, vec![(0, 1)]);
    }

    #[test]
    fn nonincreasing_deltas_on_random_landscapes() {
        for seed in [1, 2, 3] {
            let net = synthetic::random_landscape(seed, 25, 10);
            let spec = asymptotic_spectrum(&net, 24).unwrap();
            let deltas = spec.deltas();
            for w in deltas.windows(2) {
                assert!(w[0] >= w[1]);
            }
            if check_genericness(&net).is_generic() {
                for w in deltas.windows(2) {
                    assert!(w[0] > w[1]);
                }
            }
        }
    }
}
