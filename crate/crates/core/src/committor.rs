//! Transition path theory on the network: committor probabilities between a
//! source set A and a product set B, the reactive current they induce, the
//! reaction rate through isocommittor cuts, and the forward and backward
//! transition rates.

use crate::eigencurrent::{CutSet, EdgeCurrentField};
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::network::{Network, StateIx};
use crate::sparse::{ic0, pcg, SparseSym};
use crate::util::comp_sum;

/// Committor probabilities q_i of reaching B before A, with boundary data
/// q = 0 on A and q = 1 on B imposed exactly.
#[derive(Debug, Clone)]
pub struct CommittorField {
    pub a: Vec<StateIx>,
    pub b: Vec<StateIx>,
    pub q: Vec<f64>,
    /// Relative residual of the conjugated interior solve.
    pub residual: f64,
    pub iterations: usize,
    /// States in components touching neither A nor B, where the committor
    /// equation leaves q undefined; they carry the equilibrium-weighted mean
    /// boundary value instead.
    pub flagged: Vec<StateIx>,
}

const SIDE_INTERIOR: u8 = 0;
const SIDE_A: u8 = 1;
const SIDE_B: u8 = 2;

fn classify(net: &Network, a: &[StateIx], b: &[StateIx]) -> Result<Vec<u8>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("A and B must be nonempty"));
    }
    let mut side = vec![SIDE_INTERIOR; net.num_states()];
    for &i in a {
        if i >= net.num_states() {
            return Err(Error::domain("A contains a state out of range"));
        }
        side[i] = SIDE_A;
    }
    for &i in b {
        if i >= net.num_states() {
            return Err(Error::domain("B contains a state out of range"));
        }
        if side[i] == SIDE_A {
            return Err(Error::domain("A and B must be disjoint"));
        }
        side[i] = SIDE_B;
    }
    Ok(side)
}

/// Solves the committor equation. The interior block of -L_sym is symmetric
/// positive definite, so the pi-conjugated unknowns x_i = sqrt(pi_i) q_i are
/// found by conjugate gradients, preconditioned by zero-fill incomplete
/// Cholesky (or the diagonal if that factorization breaks down). Interior
/// components with no path to either boundary set are excluded from the
/// solve, flagged, and given the equilibrium-weighted mean boundary value.
pub fn committor(
    gen: &Generator<'_>,
    a: &[StateIx],
    b: &[StateIx],
    tol: f64,
) -> Result<CommittorField> {
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let net = gen.network();
    let n = net.num_states();
    let side = classify(net, a, b)?;

    // Interior states reachable from the boundary. Only edges whose
    // symmetrized coupling survives underflow connect states in the solve, so
    // reachability walks those; at low temperature a connected network can
    // still strand interior states behind fully underflowed edges.
    let mut reached = vec![false; n];
    let mut queue: std::collections::VecDeque<StateIx> = (0..n)
        .filter(|&i| side[i] != SIDE_INTERIOR)
        .inspect(|&i| reached[i] = true)
        .collect();
    while let Some(i) = queue.pop_front() {
        for &e in net.incident(i) {
            let r = &gen.edge_rates()[e];
            if r.s_fwd * r.s_bwd == 0.0 {
                continue;
            }
            let j = net.edge(e).other(i);
            if !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        }
    }

    let interior: Vec<StateIx> = (0..n)
        .filter(|&i| side[i] == SIDE_INTERIOR && reached[i])
        .collect();
    let flagged: Vec<StateIx> = (0..n)
        .filter(|&i| side[i] == SIDE_INTERIOR && !reached[i])
        .collect();
    let mut pos = vec![usize::MAX; n];
    for (p, &i) in interior.iter().enumerate() {
        pos[i] = p;
    }

    let m = interior.len();
    let mut cols: Vec<Vec<(usize, f64)>> = (0..m)
        .map(|p| vec![(p, gen.escape_rate(interior[p]))])
        .collect();
    let mut rhs = vec![0.0f64; m];
    for (e, r) in gen.edge_rates().iter().enumerate() {
        let edge = net.edge(e);
        let w = r.s_fwd * r.s_bwd;
        for (i, j) in [(edge.a, edge.b), (edge.b, edge.a)] {
            if side[i] == SIDE_INTERIOR && reached[i] && side[j] == SIDE_B {
                rhs[pos[i]] += w * gen.sqrt_pi()[j];
            }
        }
        if side[edge.a] == SIDE_INTERIOR
            && side[edge.b] == SIDE_INTERIOR
            && reached[edge.a]
            && reached[edge.b]
        {
            let (lo, hi) = (pos[edge.a].min(pos[edge.b]), pos[edge.a].max(pos[edge.b]));
            cols[lo].push((hi, -w));
        }
    }

    let mut q = vec![0.0f64; n];
    for &i in b {
        q[i] = 1.0;
    }

    let mut residual = 0.0;
    let mut iterations = 0;
    if m > 0 {
        let mat = SparseSym::from_columns(m, cols);
        let prec = ic0(&mat);
        let diag: Vec<f64> = (0..m).map(|p| gen.escape_rate(interior[p])).collect();
        let apply = |x: &[f64], y: &mut [f64]| mat.apply(x, y);
        let cap = (10.0 * (n as f64).sqrt()).ceil() as usize + 10;
        let out = match &prec {
            Ok(p) => pcg(&apply, &|r, z| p.solve(r, z), &rhs, tol, cap),
            Err(_) => pcg(
                &apply,
                &|r, z| {
                    for ((zi, ri), di) in z.iter_mut().zip(r).zip(&diag) {
                        *zi = ri / di;
                    }
                },
                &rhs,
                tol,
                cap,
            ),
        };
        let norm_b = comp_sum(rhs.iter().map(|v| v * v)).sqrt();
        if !out.converged {
            return Err(Error::convergence(
                "committor conjugate-gradient solve did not reach tolerance",
            ));
        }
        residual = if norm_b > 0.0 { out.residual / norm_b } else { 0.0 };
        iterations = out.iterations;
        for (p, &i) in interior.iter().enumerate() {
            q[i] = out.x[p] / gen.sqrt_pi()[i];
        }
    }

    if !flagged.is_empty() {
        let wa = comp_sum(a.iter().map(|&i| gen.pi()[i]));
        let wb = comp_sum(b.iter().map(|&i| gen.pi()[i]));
        let neutral = if wa + wb > 0.0 { wb / (wa + wb) } else { 0.5 };
        for &i in &flagged {
            q[i] = neutral;
        }
    }

    for &v in &q {
        if !(-1e-10..=1.0 + 1e-10).contains(&v) {
            return Err(Error::convergence(
                "committor left [0, 1] beyond tolerance; solve unreliable",
            ));
        }
    }

    Ok(CommittorField {
        a: a.to_vec(),
        b: b.to_vec(),
        q,
        residual,
        iterations,
        flagged,
    })
}

/// Worst interior balance defect max |sum_j L_ij q_j| / escape_i, a
/// scale-free check of the harmonicity of q away from the boundary.
pub fn harmonic_residual(gen: &Generator<'_>, field: &CommittorField) -> f64 {
    let net = gen.network();
    let mut boundary = vec![false; net.num_states()];
    for &i in field.a.iter().chain(&field.b) {
        boundary[i] = true;
    }
    let mut worst = 0.0f64;
    for i in 0..net.num_states() {
        if boundary[i] || field.flagged.contains(&i) {
            continue;
        }
        let esc = gen.escape_rate(i);
        if esc == 0.0 {
            continue;
        }
        let bal = comp_sum(
            net.incident(i)
                .iter()
                .map(|&e| gen.rate(i, net.edge(e).other(i)) * (field.q[net.edge(e).other(i)] - field.q[i])),
        );
        worst = worst.max(bal.abs() / esc);
    }
    worst
}

/// The reactive current of a committor field: on each edge,
/// F_ab = pi_a L_ab (q_b - q_a), positive from low committor to high.
pub fn reactive_current(gen: &Generator<'_>, field: &CommittorField) -> Result<EdgeCurrentField> {
    if field.q.len() != gen.num_states() {
        return Err(Error::structure("committor size does not match the network"));
    }
    EdgeCurrentField::from_potential(gen, &field.q)
}

/// Edges crossing the committor level set, oriented from q <= level to
/// q > level, with their reactive currents and total flux.
pub fn isocommittor_cut(
    gen: &Generator<'_>,
    field: &CommittorField,
    level: f64,
) -> Result<CutSet> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::domain("isocommittor level must lie in [0, 1)"));
    }
    let current = reactive_current(gen, field)?;
    let net = gen.network();
    let mut s_plus = Vec::new();
    let mut s_minus = Vec::new();
    for (i, &qi) in field.q.iter().enumerate() {
        if qi <= level {
            s_plus.push(i);
        } else {
            s_minus.push(i);
        }
    }
    let mut edges = Vec::new();
    let mut currents = Vec::new();
    for e in 0..net.num_edges() {
        let edge = net.edge(e);
        let (qa, qb) = (field.q[edge.a], field.q[edge.b]);
        if (qa <= level) != (qb <= level) {
            edges.push(e);
            currents.push(if qa <= level {
                current.current(e)
            } else {
                -current.current(e)
            });
        }
    }
    let flux = comp_sum(currents.iter().copied());
    Ok(CutSet { s_plus, s_minus, edges, currents, flux })
}

/// Reaction rate nu_R: the reactive flux through the isocommittor cut at
/// `level`. Flux conservation makes the result level-independent.
pub fn transition_rate(gen: &Generator<'_>, field: &CommittorField, level: f64) -> Result<f64> {
    Ok(isocommittor_cut(gen, field, level)?.flux)
}

/// Forward and backward transition rates
/// k_AB = nu_R / sum_i pi_i (1 - q_i) and k_BA = nu_R / sum_i pi_i q_i.
pub fn tpt_rates(gen: &Generator<'_>, field: &CommittorField, nu_r: f64) -> Result<(f64, f64)> {
    if field.q.len() != gen.num_states() {
        return Err(Error::structure("committor size does not match the network"));
    }
    let toward_a = comp_sum(gen.pi().iter().zip(&field.q).map(|(p, q)| p * (1.0 - q)));
    let toward_b = comp_sum(gen.pi().iter().zip(&field.q).map(|(p, q)| p * q));
    if toward_a <= 0.0 || toward_b <= 0.0 {
        return Err(Error::domain(
            "equilibrium mass on one side of the committor is zero",
        ));
    }
    Ok((nu_r / toward_a, nu_r / toward_b))
}
