//! Disconnectivity graphs for plotting: the `top_n` lowest-potential states,
//! lumped into groups separated by barriers below a threshold, joined into a
//! merge tree keyed by saddle potential.
//!
//! Lumping runs over the minimum spanning tree merge order: scanning edges by
//! increasing saddle potential, two components fuse into one group when the
//! saddle sits less than `lump_threshold` above the lower of their minima.
//! Since component minima only decrease and saddles only increase along the
//! scan, this gives every pair inside a group a connecting path whose saddles
//! all stay within the threshold of the pair's lower member.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, StateIx};

/// One lumped group of states.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Group {
    /// External id of the lowest-potential member.
    pub representative: u64,
    /// Potential of the representative.
    pub energy: f64,
    /// External ids of all members, ascending potential.
    pub members: Vec<u64>,
    /// Coloring value of the representative, when coloring was supplied.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub color: Option<f64>,
}

/// Merge-tree node: either a leaf group or an inner merge at `barrier`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Node {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub barrier: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<Node>,
}

/// The lumped hierarchy over the selected states. `roots` is a forest when
/// the selected states do not form one connected piece.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DisconnectivityGraph {
    pub threshold: f64,
    pub groups: Vec<Group>,
    pub roots: Vec<Node>,
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            self.parent[i] = self.find(self.parent[i]);
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[rb] = ra;
        ra
    }
}

pub fn disconnectivity_graph(
    net: &Network,
    top_n: usize,
    lump_threshold: f64,
    coloring: Option<&[f64]>,
) -> Result<DisconnectivityGraph> {
    let n = net.num_states();
    if top_n == 0 || top_n > n {
        return Err(Error::domain(format!(
            "top_n must be in 1..={n}, got {top_n}"
        )));
    }
    if !(lump_threshold > 0.0) {
        return Err(Error::domain("lump threshold must be positive"));
    }
    if let Some(c) = coloring {
        if c.len() != n {
            return Err(Error::domain(format!(
                "coloring has {} values for {n} states",
                c.len()
            )));
        }
    }

    let mut by_energy: Vec<StateIx> = (0..n).collect();
    by_energy.sort_by(|&a, &b| {
        net.state(a)
            .energy
            .total_cmp(&net.state(b).energy)
            .then(a.cmp(&b))
    });
    let selected = &by_energy[..top_n];
    let mut pos = vec![usize::MAX; n];
    for (p, &i) in selected.iter().enumerate() {
        pos[i] = p;
    }

    // Edges induced on the selection, ascending saddle potential.
    let mut edges: Vec<(f64, usize, usize)> = (0..net.num_edges())
        .filter_map(|e| {
            let s = net.edge(e);
            (pos[s.a] != usize::MAX && pos[s.b] != usize::MAX)
                .then(|| (s.energy, pos[s.a], pos[s.b]))
        })
        .collect();
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Phase one: lump within the threshold.
    let mut dsu = Dsu::new(top_n);
    let mut comp_min: Vec<f64> = selected.iter().map(|&i| net.state(i).energy).collect();
    let mut skipped = Vec::new();
    for &(v, a, b) in &edges {
        let (ra, rb) = (dsu.find(a), dsu.find(b));
        if ra == rb {
            continue;
        }
        let low = comp_min[ra].min(comp_min[rb]);
        if v - low < lump_threshold {
            let r = dsu.union(ra, rb);
            comp_min[r] = low;
        } else {
            skipped.push((v, a, b));
        }
    }

    let mut group_of = vec![usize::MAX; top_n];
    let mut groups: Vec<Group> = Vec::new();
    for p in 0..top_n {
        let r = dsu.find(p);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Group {
                representative: 0,
                energy: f64::INFINITY,
                members: Vec::new(),
                color: None,
            });
        }
        let g = &mut groups[group_of[r]];
        let i = selected[p];
        // Selection order is ascending potential, so the first member seen
        // is the representative and members stay sorted.
        if g.members.is_empty() {
            g.representative = net.external_id(i);
            g.energy = net.state(i).energy;
            g.color = coloring.map(|c| c[i]);
        }
        g.members.push(net.external_id(i));
    }
    let leaf_of: Vec<usize> = (0..top_n).map(|p| group_of[dsu.find(p)]).collect();

    // Phase two: the remaining merges build the tree, lowest saddle first.
    let mut nodes: Vec<Option<Node>> = (0..groups.len())
        .map(|g| {
            Some(Node {
                group: Some(g),
                barrier: None,
                children: Vec::new(),
            })
        })
        .collect();
    let mut tree_dsu = Dsu::new(groups.len());
    let mut node_of: Vec<usize> = (0..groups.len()).collect();
    for &(v, a, b) in &skipped {
        let (ra, rb) = (tree_dsu.find(leaf_of[a]), tree_dsu.find(leaf_of[b]));
        if ra == rb {
            continue;
        }
        let left = nodes[node_of[ra]].take().unwrap();
        let right = nodes[node_of[rb]].take().unwrap();
        let merged = Node {
            group: None,
            barrier: Some(v),
            children: vec![left, right],
        };
        let r = tree_dsu.union(ra, rb);
        let slot = node_of[if r == ra { rb } else { ra }];
        nodes[slot] = Some(merged);
        node_of[r] = slot;
    }
    let mut seen_roots = std::collections::HashSet::new();
    let mut roots = Vec::new();
    for g in 0..groups.len() {
        let r = tree_dsu.find(g);
        if seen_roots.insert(r) {
            roots.push(nodes[node_of[r]].take().unwrap());
        }
    }

    Ok(DisconnectivityGraph {
        threshold: lump_threshold,
        groups,
        roots,
    })
}

impl DisconnectivityGraph {
    /// Hierarchical machine-readable form; field order is fixed, so equal
    /// graphs serialize identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}
