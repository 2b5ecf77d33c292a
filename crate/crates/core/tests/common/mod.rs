#![allow(dead_code)]

// Shared oracles for the integration suite. Everything here is deliberately
// naive: straight-line dense algorithms that are easy to audit and serve as
// independent references for the library's sparse and recursive code paths.

/// Solves A x = b for dense row-major A by LU with partial pivoting.
/// Panics on singular systems; callers pass well-conditioned interiors.
pub fn lu_solve(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[perm[col] * n + col].abs();
        for (r, &pr) in perm.iter().enumerate().skip(col + 1) {
            let v = m[pr * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        assert!(best > 0.0, "singular matrix in lu_solve");
        perm.swap(col, piv);
        let prow = perm[col];
        for &rrow in perm.iter().skip(col + 1) {
            let f = m[rrow * n + col] / m[prow * n + col];
            if f == 0.0 {
                continue;
            }
            m[rrow * n + col] = f;
            for j in col + 1..n {
                m[rrow * n + j] -= f * m[prow * n + j];
            }
        }
    }
    let mut y = vec![0.0f64; n];
    for i in 0..n {
        let mut s = x[perm[i]];
        for j in 0..i {
            s -= m[perm[i] * n + j] * y[j];
        }
        y[i] = s;
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= m[perm[i] * n + j] * x[j];
        }
        x[i] = s / m[perm[i] * n + i];
    }
    x
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0f64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn inf_norm(n: usize, a: &[f64]) -> f64 {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense matrix exponential by scaling and squaring with a Taylor core.
/// Adequate for the modest norms used in the distribution-evolution checks.
pub fn expm(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let norm = inf_norm(n, a);
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled: Vec<f64> = a.iter().map(|v| v * scale).collect();
    let mut result = vec![0.0f64; n * n];
    for i in 0..n {
        result[i * n + i] = 1.0;
    }
    let mut term = result.clone();
    for k in 1..=24 {
        term = mat_mul(n, &term, &scaled);
        let inv = 1.0 / k as f64;
        for v in term.iter_mut() {
            *v *= inv;
        }
        for (r, t) in result.iter_mut().zip(term.iter()) {
            *r += t;
        }
        if inf_norm(n, &term) < 1e-300 {
            break;
        }
    }
    for _ in 0..squarings {
        result = mat_mul(n, &result, &result);
    }
    result
}

pub fn mat_vec(n: usize, a: &[f64], x: &[f64]) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

/// All-pairs minimax saddle energies by the Floyd-Warshall recurrence
/// m[i][j] = min(m[i][j], max(m[i][k], m[k][j])).
pub fn minimax_saddles(net: &ktn::Network) -> Vec<Vec<f64>> {
    let n = net.num_states();
    let mut m = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = f64::NEG_INFINITY;
    }
    for e in 0..net.num_edges() {
        let s = net.edge(e);
        let (a, b) = (s.a, s.b);
        if s.energy < m[a][b] {
            m[a][b] = s.energy;
            m[b][a] = s.energy;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let mik = m[i][k];
            if !mik.is_finite() {
                continue;
            }
            for j in 0..n {
                let cand = mik.max(m[k][j]);
                if cand < m[i][j] {
                    m[i][j] = cand;
                }
            }
        }
    }
    m
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    (dot(a, b) / (na * nb)).abs()
}

/// Least-squares fit of ln y = ln a - d / t, returning (a, d).
pub fn arrhenius_oracle(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in points {
        let x = 1.0 / t;
        let ly = y.ln();
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (intercept.exp(), -slope)
}
