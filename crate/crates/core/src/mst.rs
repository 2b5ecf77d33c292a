//! Minimum spanning tree of the saddle costs and minimax path queries.
//!
//! On the MST, the highest saddle along the unique tree path between two
//! states equals the minimax saddle over all paths in the full network, so
//! tree path-max queries answer barrier questions. Queries use an
//! ancestor-jump (binary lifting) table, O(log N) each after O(N log N)
//! preprocessing.

use crate::network::{EdgeIx, Network, StateIx};
use crate::{Error, Result};

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Spanning tree rooted at the global minimum, with ancestor-jump tables.
pub struct SpanningTree {
    root: StateIx,
    parent: Vec<Option<(StateIx, EdgeIx)>>,
    depth: Vec<u32>,
    /// States in breadth-first order from the root.
    order: Vec<StateIx>,
    tree_edges: Vec<EdgeIx>,
    tree_adj: Vec<Vec<EdgeIx>>,
    is_tree_edge: Vec<bool>,
    up: Vec<Vec<u32>>,
    up_max: Vec<Vec<EdgeIx>>,
    total_cost: f64,
}

const NO_EDGE: EdgeIx = usize::MAX;

/// Pick the higher-cost edge; exact ties go to the lexicographically
/// smaller endpoint pair so results do not depend on traversal order.
pub(crate) fn max_edge(net: &Network, a: EdgeIx, b: EdgeIx) -> EdgeIx {
    if a == NO_EDGE {
        return b;
    }
    if b == NO_EDGE {
        return a;
    }
    let (ea, eb) = (net.edge(a), net.edge(b));
    match ea.energy.total_cmp(&eb.energy) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if (ea.a, ea.b) <= (eb.a, eb.b) {
                a
            } else {
                b
            }
        }
    }
}

/// Kruskal's algorithm on saddle energies; equal-cost edges are taken in
/// lexicographic endpoint order. The network must be connected.
pub fn minimum_spanning_tree(net: &Network) -> Result<SpanningTree> {
    let n = net.num_states();
    if n == 0 {
        return Err(Error::structure("empty network has no spanning tree"));
    }
    let mut by_cost: Vec<EdgeIx> = (0..net.num_edges()).collect();
    by_cost.sort_by(|&x, &y| {
        let (ex, ey) = (net.edge(x), net.edge(y));
        ex.energy
            .total_cmp(&ey.energy)
            .then_with(|| (ex.a, ex.b).cmp(&(ey.a, ey.b)))
    });

    let mut uf = UnionFind::new(n);
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut total_cost = 0.0;
    for e in by_cost {
        let edge = net.edge(e);
        if uf.union(edge.a, edge.b) {
            tree_edges.push(e);
            total_cost += edge.energy;
            if tree_edges.len() == n - 1 {
                break;
            }
        }
    }
    if tree_edges.len() != n - 1 {
        return Err(Error::structure(
            "network is disconnected; spanning tree does not exist",
        ));
    }

    let mut tree_adj = vec![Vec::new(); n];
    let mut is_tree_edge = vec![false; net.num_edges()];
    for &e in &tree_edges {
        let edge = net.edge(e);
        tree_adj[edge.a].push(e);
        tree_adj[edge.b].push(e);
        is_tree_edge[e] = true;
    }

    let root = net.global_minimum();
    let mut parent = vec![None; n];
    let mut depth = vec![0u32; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(root);
    seen[root] = true;
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &e in &tree_adj[i] {
            let j = net.edge(e).other(i);
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some((i, e));
                depth[j] = depth[i] + 1;
                queue.push_back(j);
            }
        }
    }

    let levels = (usize::BITS - n.leading_zeros()).max(1) as usize;
    let mut up = vec![vec![0u32; n]; levels];
    let mut up_max = vec![vec![NO_EDGE; n]; levels];
    for i in 0..n {
        match parent[i] {
            Some((p, e)) => {
                up[0][i] = p as u32;
                up_max[0][i] = e;
            }
            None => up[0][i] = i as u32,
        }
    }
    for k in 1..levels {
        for i in 0..n {
            let mid = up[k - 1][i] as usize;
            up[k][i] = up[k - 1][mid];
            let first = up_max[k - 1][i];
            let second = up_max[k - 1][mid];
            up_max[k][i] = if first == NO_EDGE {
                NO_EDGE
            } else if second == NO_EDGE {
                first
            } else {
                max_edge(net, first, second)
            };
        }
    }

    Ok(SpanningTree {
        root,
        parent,
        depth,
        order,
        tree_edges,
        tree_adj,
        is_tree_edge,
        up,
        up_max,
        total_cost,
    })
}

impl SpanningTree {
    pub fn root(&self) -> StateIx {
        self.root
    }

    pub fn parent(&self, i: StateIx) -> Option<(StateIx, EdgeIx)> {
        self.parent[i]
    }

    pub fn depth(&self, i: StateIx) -> u32 {
        self.depth[i]
    }

    /// States in breadth-first order from the root.
    pub fn bfs_order(&self) -> &[StateIx] {
        &self.order
    }

    pub fn edges(&self) -> &[EdgeIx] {
        &self.tree_edges
    }

    pub fn contains_edge(&self, e: EdgeIx) -> bool {
        self.is_tree_edge[e]
    }

    /// Tree edges incident to `i`.
    pub fn adjacent(&self, i: StateIx) -> &[EdgeIx] {
        &self.tree_adj[i]
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }

    /// Highest-cost edge on the tree path between `i` and `j`; None if i == j.
    pub fn path_max_edge(&self, net: &Network, i: StateIx, j: StateIx) -> Option<EdgeIx> {
        if i == j {
            return None;
        }
        let (mut a, mut b) = (i, j);
        let mut best = NO_EDGE;
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = self.depth[a] - self.depth[b];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                best = max_edge(net, best, self.up_max[k][a]);
                a = self.up[k][a] as usize;
            }
            diff >>= 1;
            k += 1;
        }
        if a == b {
            return Some(best);
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][a] != self.up[k][b] {
                best = max_edge(net, best, self.up_max[k][a]);
                best = max_edge(net, best, self.up_max[k][b]);
                a = self.up[k][a] as usize;
                b = self.up[k][b] as usize;
            }
        }
        best = max_edge(net, best, self.up_max[0][a]);
        best = max_edge(net, best, self.up_max[0][b]);
        Some(best)
    }

    /// The unique tree path from `i` to `j`, inclusive of both ends, and the
    /// highest saddle on it.
    pub fn minmax_path(
        &self,
        net: &Network,
        i: StateIx,
        j: StateIx,
    ) -> (Vec<StateIx>, Option<EdgeIx>) {
        if i == j {
            return (vec![i], None);
        }
        // climb both ends to the LCA
        let (mut a, mut b) = (i, j);
        let mut left = vec![a];
        let mut right = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap().0;
            left.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap().0;
            right.push(b);
        }
        while a != b {
            a = self.parent[a].unwrap().0;
            b = self.parent[b].unwrap().0;
            left.push(a);
            right.push(b);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        let best = self.path_max_edge(net, i, j);
        (left, best)
    }
}
