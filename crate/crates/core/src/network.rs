//! Network model: local minima joined by transition states.
//!
//! States and edges are indexed contiguously from zero. External catalog ids
//! are kept alongside so that sub-networks (largest connected component,
//! energy-capped networks) can always be traced back to the original catalog.

use crate::{Error, Result};
use std::collections::HashMap;

/// Internal state index, contiguous from zero.
pub type StateIx = usize;
/// Internal edge index, contiguous from zero.
pub type EdgeIx = usize;

/// One local minimum as read from a catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimumRecord {
    /// External catalog id.
    pub id: u64,
    /// Potential at the minimum.
    pub energy: f64,
    /// Point group order `O_i`.
    pub point_group_order: u64,
    /// Mean vibrational frequency, geometric mean over the kappa modes.
    pub mean_frequency: f64,
}

/// One transition state as read from a catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionStateRecord {
    /// External ids of the two minima this saddle connects.
    pub from: u64,
    pub to: u64,
    /// Potential at the saddle.
    pub energy: f64,
    /// Point group order `O_ij`.
    pub point_group_order: u64,
    /// Mean vibrational frequency over the kappa-1 stable modes.
    pub mean_frequency: f64,
}

/// A minimum inside a built network.
#[derive(Debug, Clone)]
pub struct Minimum {
    pub energy: f64,
    pub point_group_order: u64,
    pub mean_frequency: f64,
}

/// A transition state inside a built network. Endpoints satisfy `a < b`.
#[derive(Debug, Clone)]
pub struct Saddle {
    pub a: StateIx,
    pub b: StateIx,
    /// Saddle potential, clamped up to `max(V_a, V_b)` if the catalog value
    /// dips below an endpoint.
    pub energy: f64,
    pub point_group_order: u64,
    pub mean_frequency: f64,
}

impl Saddle {
    /// The endpoint other than `i`; panics if `i` is not an endpoint.
    pub fn other(&self, i: StateIx) -> StateIx {
        if i == self.a {
            self.b
        } else if i == self.b {
            self.a
        } else {
            panic!("state {i} is not an endpoint of edge ({}, {})", self.a, self.b)
        }
    }
}

/// Counters describing what network construction had to fix up.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Duplicate saddles merged away (the lowest-energy one is kept).
    pub merged_duplicate_saddles: usize,
    /// Saddles whose catalog energy was below an endpoint and was clamped.
    pub clamped_saddles: usize,
}

/// A landscape network: minima, transition states and adjacency.
#[derive(Debug, Clone)]
pub struct Network {
    states: Vec<Minimum>,
    edges: Vec<Saddle>,
    adjacency: Vec<Vec<EdgeIx>>,
    kappa: u32,
    external_ids: Vec<u64>,
    index_of: HashMap<u64, StateIx>,
    report: BuildReport,
}

impl Network {
    /// Build a network from catalog records.
    ///
    /// Duplicate saddles between the same pair of minima are merged keeping
    /// the lowest-energy one; saddle energies below the higher endpoint are
    /// clamped up to it. Both fixups are counted in the [`BuildReport`].
    pub fn build(
        minima: &[MinimumRecord],
        saddles: &[TransitionStateRecord],
        kappa: u32,
    ) -> Result<Network> {
        if minima.is_empty() {
            return Err(Error::structure("network needs at least one minimum"));
        }
        if kappa < 1 {
            return Err(Error::domain("kappa must be a positive integer"));
        }
        let mut index_of = HashMap::with_capacity(minima.len());
        let mut states = Vec::with_capacity(minima.len());
        let mut external_ids = Vec::with_capacity(minima.len());
        for (ix, m) in minima.iter().enumerate() {
            if !m.energy.is_finite() {
                return Err(Error::domain(format!(
                    "minimum {} has non-finite energy",
                    m.id
                )));
            }
            if m.point_group_order == 0 {
                return Err(Error::domain(format!(
                    "minimum {} has nonpositive point group order",
                    m.id
                )));
            }
            if !(m.mean_frequency > 0.0 && m.mean_frequency.is_finite()) {
                return Err(Error::domain(format!(
                    "minimum {} has nonpositive mean frequency",
                    m.id
                )));
            }
            if index_of.insert(m.id, ix).is_some() {
                return Err(Error::structure(format!("duplicate minimum id {}", m.id)));
            }
            states.push(Minimum {
                energy: m.energy,
                point_group_order: m.point_group_order,
                mean_frequency: m.mean_frequency,
            });
            external_ids.push(m.id);
        }

        let mut report = BuildReport::default();
        // Keep the lowest-energy saddle per state pair; first wins on ties.
        let mut best: HashMap<(StateIx, StateIx), Saddle> = HashMap::new();
        for ts in saddles {
            let ia = *index_of.get(&ts.from).ok_or_else(|| {
                Error::structure(format!("transition state references unknown minimum {}", ts.from))
            })?;
            let ib = *index_of.get(&ts.to).ok_or_else(|| {
                Error::structure(format!("transition state references unknown minimum {}", ts.to))
            })?;
            if ia == ib {
                return Err(Error::structure(format!(
                    "transition state connects minimum {} to itself",
                    ts.from
                )));
            }
            if !ts.energy.is_finite() {
                return Err(Error::domain(format!(
                    "transition state ({}, {}) has non-finite energy",
                    ts.from, ts.to
                )));
            }
            if ts.point_group_order == 0 {
                return Err(Error::domain(format!(
                    "transition state ({}, {}) has nonpositive point group order",
                    ts.from, ts.to
                )));
            }
            if !(ts.mean_frequency > 0.0 && ts.mean_frequency.is_finite()) {
                return Err(Error::domain(format!(
                    "transition state ({}, {}) has nonpositive mean frequency",
                    ts.from, ts.to
                )));
            }
            let (a, b) = if ia < ib { (ia, ib) } else { (ib, ia) };
            let cand = Saddle {
                a,
                b,
                energy: ts.energy,
                point_group_order: ts.point_group_order,
                mean_frequency: ts.mean_frequency,
            };
            match best.entry((a, b)) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(cand);
                }
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    report.merged_duplicate_saddles += 1;
                    if cand.energy < e.get().energy {
                        e.insert(cand);
                    }
                }
            }
        }

        let mut edges: Vec<Saddle> = best.into_values().collect();
        edges.sort_by_key(|e| (e.a, e.b));
        for e in &mut edges {
            let floor = states[e.a].energy.max(states[e.b].energy);
            if e.energy < floor {
                e.energy = floor;
                report.clamped_saddles += 1;
            }
        }

        let mut adjacency = vec![Vec::new(); states.len()];
        for (ix, e) in edges.iter().enumerate() {
            adjacency[e.a].push(ix);
            adjacency[e.b].push(ix);
        }

        Ok(Network {
            states,
            edges,
            adjacency,
            kappa,
            external_ids,
            index_of,
            report,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn state(&self, i: StateIx) -> &Minimum {
        &self.states[i]
    }

    pub fn states(&self) -> &[Minimum] {
        &self.states
    }

    pub fn edge(&self, e: EdgeIx) -> &Saddle {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Saddle] {
        &self.edges
    }

    /// Edge indices incident to state `i`.
    pub fn incident(&self, i: StateIx) -> &[EdgeIx] {
        &self.adjacency[i]
    }

    pub fn energy(&self, i: StateIx) -> f64 {
        self.states[i].energy
    }

    /// External catalog id of internal state `i`.
    pub fn external_id(&self, i: StateIx) -> u64 {
        self.external_ids[i]
    }

    /// Internal index for an external catalog id.
    pub fn resolve(&self, id: u64) -> Option<StateIx> {
        self.index_of.get(&id).copied()
    }

    pub fn build_report(&self) -> &BuildReport {
        &self.report
    }

    /// Edge between `i` and `j` if one exists.
    pub fn edge_between(&self, i: StateIx, j: StateIx) -> Option<EdgeIx> {
        self.adjacency[i]
            .iter()
            .copied()
            .find(|&e| self.edges[e].other(i) == j)
    }

    /// State of lowest potential; lowest index on exact ties.
    pub fn global_minimum(&self) -> StateIx {
        let mut best = 0;
        for i in 1..self.states.len() {
            if self.states[i].energy < self.states[best].energy {
                best = i;
            }
        }
        best
    }

    /// Connected components as sorted state lists, discovered in index order.
    pub fn components(&self) -> Vec<Vec<StateIx>> {
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut comp = Vec::new();
            while let Some(i) = stack.pop() {
                comp.push(i);
                for &e in &self.adjacency[i] {
                    let j = self.edges[e].other(i);
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Restriction of the network to `keep` (sorted, deduplicated internally).
    /// Edges with both endpoints kept survive; external ids are carried over.
    pub fn subnetwork(&self, keep: &[StateIx]) -> Result<Network> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::structure("subnetwork of zero states"));
        }
        if *keep.last().unwrap() >= self.states.len() {
            return Err(Error::structure("subnetwork state index out of range"));
        }
        let mut new_ix = vec![usize::MAX; self.states.len()];
        for (new, &old) in keep.iter().enumerate() {
            new_ix[old] = new;
        }
        let states: Vec<Minimum> = keep.iter().map(|&i| self.states[i].clone()).collect();
        let external_ids: Vec<u64> = keep.iter().map(|&i| self.external_ids[i]).collect();
        let index_of = external_ids
            .iter()
            .enumerate()
            .map(|(ix, &id)| (id, ix))
            .collect();
        let mut edges = Vec::new();
        for e in &self.edges {
            let (na, nb) = (new_ix[e.a], new_ix[e.b]);
            if na != usize::MAX && nb != usize::MAX {
                let (a, b) = if na < nb { (na, nb) } else { (nb, na) };
                edges.push(Saddle {
                    a,
                    b,
                    energy: e.energy,
                    point_group_order: e.point_group_order,
                    mean_frequency: e.mean_frequency,
                });
            }
        }
        edges.sort_by_key(|e| (e.a, e.b));
        let mut adjacency = vec![Vec::new(); states.len()];
        for (ix, e) in edges.iter().enumerate() {
            adjacency[e.a].push(ix);
            adjacency[e.b].push(ix);
        }
        Ok(Network {
            states,
            edges,
            adjacency,
            kappa: self.kappa,
            external_ids,
            index_of,
            report: self.report.clone(),
        })
    }

    /// Largest connected component; ties go to the component containing the
    /// lowest state index.
    pub fn largest_connected_component(&self) -> Result<Network> {
        let comps = self.components();
        let best = comps
            .iter()
            .max_by_key(|c| (c.len(), std::cmp::Reverse(c[0])))
            .expect("at least one component");
        self.subnetwork(best)
    }

    /// Energy-capped network: drop every edge with saddle energy >= `v_max`,
    /// then keep the connected component of `reference`.
    pub fn cap(&self, v_max: f64, reference: StateIx) -> Result<Network> {
        if reference >= self.states.len() {
            return Err(Error::domain(format!(
                "reference state {reference} out of range"
            )));
        }
        if !(v_max > self.states[reference].energy) {
            return Err(Error::domain(format!(
                "cap {v_max} does not exceed the reference state energy {}",
                self.states[reference].energy
            )));
        }
        let n = self.states.len();
        let mut seen = vec![false; n];
        let mut stack = vec![reference];
        seen[reference] = true;
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(i);
            for &e in &self.adjacency[i] {
                if self.edges[e].energy >= v_max {
                    continue;
                }
                let j = self.edges[e].other(i);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        let mut sub = self.subnetwork(&comp)?;
        sub.edges.retain(|e| e.energy < v_max);
        let mut adjacency = vec![Vec::new(); sub.states.len()];
        for (ix, e) in sub.edges.iter().enumerate() {
            adjacency[e.a].push(ix);
            adjacency[e.b].push(ix);
        }
        sub.adjacency = adjacency;
        Ok(sub)
    }
}
