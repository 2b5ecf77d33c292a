//! Sparse symmetric kernels: lower-triangle CSC storage, reverse
//! Cuthill-McKee ordering, an up-looking LDL^T factorization for shifted
//! eigensolves, and zero-fill incomplete Cholesky with conjugate gradients
//! for positive definite systems.

use crate::generator::Generator;

/// Symmetric matrix stored as its lower triangle in CSC form. Every column
/// holds its diagonal entry first, then strictly-lower rows in increasing
/// order.
pub(crate) struct SparseSym {
    pub n: usize,
    pub colptr: Vec<usize>,
    pub rowind: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSym {
    /// Assembles from per-column entry lists `(row, value)` with `row >= col`.
    /// Duplicate entries are summed; missing diagonals become explicit zeros.
    pub fn from_columns(n: usize, mut cols: Vec<Vec<(usize, f64)>>) -> SparseSym {
        assert_eq!(cols.len(), n);
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowind = Vec::new();
        let mut values = Vec::new();
        colptr.push(0);
        for (j, col) in cols.iter_mut().enumerate() {
            col.sort_by_key(|&(r, _)| r);
            if col.first().map(|&(r, _)| r) != Some(j) {
                rowind.push(j);
                values.push(0.0);
            }
            let mut last = usize::MAX;
            for &(r, v) in col.iter() {
                assert!(r >= j, "entry above the diagonal");
                if r == last {
                    *values.last_mut().unwrap() += v;
                } else {
                    rowind.push(r);
                    values.push(v);
                    last = r;
                }
            }
            colptr.push(rowind.len());
        }
        SparseSym { n, colptr, rowind, values }
    }

    /// A = -L_sym - shift * I at the generator's temperature: diagonal
    /// escape rates minus the shift, off-diagonals minus the geometric-mean
    /// couplings. Positive definite for shift < 0, indefinite between
    /// eigenvalues.
    pub fn shifted_neg_lsym(gen: &Generator, shift: f64) -> SparseSym {
        let n = gen.num_states();
        let mut cols: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|i| vec![(i, gen.escape_rate(i) - shift)])
            .collect();
        for (e, r) in gen.edge_rates().iter().enumerate() {
            let edge = gen.network().edge(e);
            let (lo, hi) = (edge.a, edge.b);
            cols[lo].push((hi, -(r.s_fwd * r.s_bwd)));
        }
        SparseSym::from_columns(n, cols)
    }

    /// Neighbor lists of the symmetric pattern, diagonal excluded.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for j in 0..self.n {
            for p in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowind[p];
                if i != j {
                    adj[j].push(i);
                    adj[i].push(j);
                }
            }
        }
        adj
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for j in 0..self.n {
            for p in self.colptr[j]..self.colptr[j + 1] {
                let i = self.rowind[p];
                let a = self.values[p];
                y[i] += a * x[j];
                if i != j {
                    y[j] += a * x[i];
                }
            }
        }
    }
}

/// Reverse Cuthill-McKee ordering of an undirected graph given as neighbor
/// lists. Returns `perm` with `perm[new] = old`. Works per component,
/// starting each from a low-degree pseudo-peripheral vertex.
pub(crate) fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_layers = |start: usize, visited: &[bool]| -> Vec<usize> {
        let mut seen = vec![false; n];
        let mut frontier = vec![start];
        seen[start] = true;
        let mut last = vec![start];
        while !frontier.is_empty() {
            last = frontier.clone();
            let mut next = Vec::new();
            for &i in &frontier {
                for &j in &adj[i] {
                    if !seen[j] && !visited[j] {
                        seen[j] = true;
                        next.push(j);
                    }
                }
            }
            frontier = next;
        }
        last
    };

    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // Double-BFS pseudo-peripheral heuristic.
        let mut start = seed;
        let far = bfs_layers(start, &visited);
        if let Some(&best) = far.iter().min_by_key(|&&i| (degree[i], i)) {
            start = best;
        }

        let mut queue = std::collections::VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        let comp_begin = order.len();
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut nbrs: Vec<usize> = adj[i].iter().copied().filter(|&j| !visited[j]).collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            nbrs.dedup();
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
        order[comp_begin..].reverse();
    }
    order
}

/// Signals a zero or non-finite pivot during LDL^T elimination.
#[derive(Debug)]
pub(crate) struct SingularPivot;

/// LDL^T factorization of a permuted symmetric matrix. `perm[new] = old`.
pub(crate) struct LdlFactor {
    n: usize,
    perm: Vec<usize>,
    lp: Vec<usize>,
    li: Vec<usize>,
    lx: Vec<f64>,
    d: Vec<f64>,
}

/// Up-looking LDL^T with an elimination-tree symbolic pass, after the Davis
/// LDL scheme. The input is the lower triangle; no pivoting is performed, so
/// an indefinite matrix may surface a zero pivot, reported as an error.
pub(crate) fn ldl_factor(a: &SparseSym, perm: &[usize]) -> Result<LdlFactor, SingularPivot> {
    let n = a.n;
    assert_eq!(perm.len(), n);
    let mut iperm = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        iperm[old] = new;
    }

    // Permuted UPPER-triangle pattern: for each new column k, the new rows
    // i <= k of A(perm, perm). Entry (i_old, j_old) of the lower triangle
    // lands in upper column max(i_new, j_new).
    let mut up_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for j_old in 0..n {
        for p in a.colptr[j_old]..a.colptr[j_old + 1] {
            let i_old = a.rowind[p];
            let v = a.values[p];
            let (ni, nj) = (iperm[i_old], iperm[j_old]);
            let (lo, hi) = if ni <= nj { (ni, nj) } else { (nj, ni) };
            up_cols[hi].push((lo, v));
        }
    }
    for col in up_cols.iter_mut() {
        col.sort_by_key(|&(r, _)| r);
    }

    // Symbolic: elimination tree and column counts.
    let mut parent = vec![usize::MAX; n];
    let mut flag = vec![usize::MAX; n];
    let mut lnz = vec![0usize; n];
    for k in 0..n {
        flag[k] = k;
        for &(i, _) in &up_cols[k] {
            let mut i = i;
            while i < k && flag[i] != k {
                if parent[i] == usize::MAX {
                    parent[i] = k;
                }
                lnz[i] += 1;
                flag[i] = k;
                i = parent[i];
            }
        }
    }
    let mut lp = vec![0usize; n + 1];
    for k in 0..n {
        lp[k + 1] = lp[k] + lnz[k];
    }
    let nnz = lp[n];
    let mut li = vec![0usize; nnz];
    let mut lx = vec![0.0f64; nnz];
    let mut d = vec![0.0f64; n];
    let mut next = lp.clone();

    // Numeric pass.
    let mut y = vec![0.0f64; n];
    let mut pattern = vec![0usize; n];
    for k in 0..n {
        flag[k] = k;
        let mut top = n;
        let mut dk = 0.0f64;
        for &(i, v) in &up_cols[k] {
            if i == k {
                dk += v;
                continue;
            }
            y[i] += v;
            let mut len = 0usize;
            let mut i = i;
            while flag[i] != k {
                pattern[len] = i;
                len += 1;
                flag[i] = k;
                i = parent[i];
            }
            while len > 0 {
                len -= 1;
                top -= 1;
                pattern[top] = pattern[len];
            }
        }
        for t in top..n {
            let j = pattern[t];
            let yj = y[j];
            y[j] = 0.0;
            let lkj = yj / d[j];
            for p in lp[j]..next[j] {
                y[li[p]] -= lx[p] * yj;
            }
            li[next[j]] = k;
            lx[next[j]] = lkj;
            next[j] += 1;
            dk -= lkj * yj;
        }
        if dk == 0.0 || !dk.is_finite() {
            return Err(SingularPivot);
        }
        d[k] = dk;
    }

    Ok(LdlFactor { n, perm: perm.to_vec(), lp, li, lx, d })
}

impl LdlFactor {
    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut z = vec![0.0f64; n];
        for (new, &old) in self.perm.iter().enumerate() {
            z[new] = b[old];
        }
        for j in 0..n {
            let zj = z[j];
            for p in self.lp[j]..self.lp[j + 1] {
                z[self.li[p]] -= self.lx[p] * zj;
            }
        }
        for j in 0..n {
            z[j] /= self.d[j];
        }
        for j in (0..n).rev() {
            let mut s = z[j];
            for p in self.lp[j]..self.lp[j + 1] {
                s -= self.lx[p] * z[self.li[p]];
            }
            z[j] = s;
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = z[new];
        }
    }
}

/// Zero-fill incomplete Cholesky L L^T ~= A on the pattern of A. Fails with
/// the offending column when a pivot is not strictly positive, in which case
/// callers fall back to a diagonal preconditioner.
pub(crate) struct Ic0 {
    n: usize,
    colptr: Vec<usize>,
    rowind: Vec<usize>,
    values: Vec<f64>,
}

pub(crate) fn ic0(a: &SparseSym) -> Result<Ic0, SingularPivot> {
    let n = a.n;
    let colptr = a.colptr.clone();
    let rowind = a.rowind.clone();
    let mut values = a.values.clone();

    // link[j]: columns whose next update touches row j; cur[j]: position of
    // that next update inside column j.
    let mut link: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut cur = vec![0usize; n];

    for k in 0..n {
        let updaters = std::mem::take(&mut link[k]);
        for j in updaters {
            let ljk = values[cur[j]];
            // Subtract ljk * L[k.., j] from the matching pattern of column k.
            let mut pk = colptr[k];
            for p in cur[j]..colptr[j + 1] {
                let i = rowind[p];
                while pk < colptr[k + 1] && rowind[pk] < i {
                    pk += 1;
                }
                if pk < colptr[k + 1] && rowind[pk] == i {
                    values[pk] -= ljk * values[p];
                }
            }
            cur[j] += 1;
            if cur[j] < colptr[j + 1] {
                let nxt = rowind[cur[j]];
                link[nxt].push(j);
            }
        }
        let dk = values[colptr[k]];
        if !(dk > 0.0) || !dk.is_finite() {
            return Err(SingularPivot);
        }
        let root = dk.sqrt();
        values[colptr[k]] = root;
        for p in (colptr[k] + 1)..colptr[k + 1] {
            values[p] /= root;
        }
        if colptr[k] + 1 < colptr[k + 1] {
            cur[k] = colptr[k] + 1;
            let nxt = rowind[cur[k]];
            link[nxt].push(k);
        }
    }
    Ok(Ic0 { n, colptr, rowind, values })
}

impl Ic0 {
    /// Applies (L L^T)^{-1} r.
    pub fn solve(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
        for j in 0..self.n {
            let zj = z[j] / self.values[self.colptr[j]];
            z[j] = zj;
            for p in (self.colptr[j] + 1)..self.colptr[j + 1] {
                z[self.rowind[p]] -= self.values[p] * zj;
            }
        }
        for j in (0..self.n).rev() {
            let mut s = z[j];
            for p in (self.colptr[j] + 1)..self.colptr[j + 1] {
                s -= self.values[p] * z[self.rowind[p]];
            }
            z[j] = s / self.values[self.colptr[j]];
        }
    }
}

pub(crate) struct PcgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

/// Preconditioned conjugate gradients for S.P.D. systems. Convergence is
/// declared when ||r|| <= tol * ||b|| (or ||r|| <= tol for zero b).
pub(crate) fn pcg(
    apply: &dyn Fn(&[f64], &mut [f64]),
    precond: &dyn Fn(&[f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> PcgOutcome {
    let n = b.len();
    let norm_b = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = if norm_b > 0.0 { tol * norm_b } else { tol };

    let mut x = vec![0.0f64; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0f64; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0f64; n];

    let mut res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut iterations = 0;
    while res > target && iterations < max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 || !pap.is_finite() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        iterations += 1;
        if res <= target {
            break;
        }
        precond(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    PcgOutcome { x, iterations, converged: res <= target, residual: res }
}
