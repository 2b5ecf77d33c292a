//! Eigencurrent analysis: the probability current carried by one relaxation
//! mode, per-state emission and absorption, the sign partition with its
//! emission-absorption cut, and per-edge current distributions over a cut.

use crate::continuation::EigenpairRecord;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::network::{EdgeIx, Network, StateIx};
use crate::util::comp_sum;

/// Signed per-edge current of one eigenpair, stored once per edge oriented
/// from the edge's lower endpoint `a` to its upper endpoint `b`. The reverse
/// direction is the negation, so antisymmetry holds by representation.
#[derive(Debug, Clone)]
pub struct EdgeCurrentField {
    temperature: f64,
    lambda: f64,
    time: f64,
    currents: Vec<f64>,
}

impl EdgeCurrentField {
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Current on edge `e` in its canonical a -> b orientation.
    pub fn current(&self, e: EdgeIx) -> f64 {
        self.currents[e]
    }

    pub fn currents(&self) -> &[f64] {
        &self.currents
    }

    /// Current from `i` to `j`; zero when no edge joins them.
    pub fn directed(&self, net: &Network, i: StateIx, j: StateIx) -> f64 {
        match net.edge_between(i, j) {
            None => 0.0,
            Some(e) => {
                if net.edge(e).a == i {
                    self.currents[e]
                } else {
                    -self.currents[e]
                }
            }
        }
    }

    /// Gradient-driven current of a per-state potential:
    /// F_ab = pi_a L_ab (p_b - p_a), as the reactive current of a committor.
    pub(crate) fn from_potential(gen: &Generator<'_>, potential: &[f64]) -> Result<Self> {
        if potential.len() != gen.num_states() {
            return Err(Error::structure("potential size does not match the network"));
        }
        let currents = (0..gen.network().num_edges())
            .map(|e| {
                let w = edge_flux_weight(gen, e);
                if w == 0.0 {
                    return 0.0;
                }
                let edge = gen.network().edge(e);
                w * (potential[edge.b] - potential[edge.a])
            })
            .collect();
        Ok(EdgeCurrentField {
            temperature: gen.temperature(),
            lambda: 0.0,
            time: 0.0,
            currents,
        })
    }
}

/// Per-state emission rates of one eigenpair and the sign partition of its
/// right eigenvector.
#[derive(Debug, Clone)]
pub struct EmissionReport {
    /// lambda pi_i phi_i per state: positive states emit, negative absorb.
    pub rates: Vec<f64>,
    /// States with phi >= 0 (zeros included).
    pub s_plus: Vec<StateIx>,
    /// States with phi < 0.
    pub s_minus: Vec<StateIx>,
    /// Total emission over s_plus.
    pub emitted: f64,
    /// Total over s_minus; balances the emission up to rounding.
    pub absorbed: f64,
}

/// A two-sided partition of the states with its crossing edges and their
/// currents, oriented from the first side to the second.
#[derive(Debug, Clone)]
pub struct CutSet {
    pub s_plus: Vec<StateIx>,
    pub s_minus: Vec<StateIx>,
    pub edges: Vec<EdgeIx>,
    pub currents: Vec<f64>,
    pub flux: f64,
}

/// Sorted per-edge composition of a cut's current.
#[derive(Debug, Clone)]
pub struct CutDistribution {
    /// Crossing edges, largest current first.
    pub edges: Vec<EdgeIx>,
    pub currents: Vec<f64>,
    /// Fractions of the total flux.
    pub shares: Vec<f64>,
    /// Running share totals, ending at 1.
    pub cdf: Vec<f64>,
}

fn check_pair(gen: &Generator<'_>, pair: &EigenpairRecord) -> Result<()> {
    if pair.t != gen.temperature() {
        return Err(Error::structure(
            "eigenpair temperature does not match the generator",
        ));
    }
    if pair.psi.len() != gen.num_states() {
        return Err(Error::structure("eigenpair size does not match the network"));
    }
    Ok(())
}

/// Flux weight of an edge: the geometric mean of pi_a L_ab and pi_b L_ba,
/// which detailed balance makes equal. Assembled in log space so one
/// expression serves both directions exactly.
fn edge_flux_weight(gen: &Generator<'_>, e: EdgeIx) -> f64 {
    let edge = gen.network().edge(e);
    let r = &gen.edge_rates()[e];
    let log_pi = gen.log_pi();
    ((log_pi[edge.a] + r.log_fwd + log_pi[edge.b] + r.log_bwd) / 2.0).exp()
}

/// The eigencurrent of `pair` at time `t`: on each edge,
/// F_ab = pi_a L_ab e^{-lambda t} (phi_a - phi_b).
pub fn eigencurrent(gen: &Generator<'_>, pair: &EigenpairRecord, t: f64) -> Result<EdgeCurrentField> {
    check_pair(gen, pair)?;
    if !(t >= 0.0) {
        return Err(Error::domain("time must be nonnegative"));
    }
    let decay = (-pair.lambda * t).exp();
    let currents = (0..gen.network().num_edges())
        .map(|e| {
            let w = edge_flux_weight(gen, e);
            if w == 0.0 {
                return 0.0;
            }
            let edge = gen.network().edge(e);
            decay * (w * (pair.phi[edge.a] - pair.phi[edge.b]))
        })
        .collect();
    Ok(EdgeCurrentField {
        temperature: gen.temperature(),
        lambda: pair.lambda,
        time: t,
        currents,
    })
}

/// Per-state emission rates lambda pi_i phi_i (evaluated through
/// pi_i phi_i = sqrt(pi_i) psi_i) and the sign partition of phi.
pub fn emission_absorption(gen: &Generator<'_>, pair: &EigenpairRecord) -> Result<EmissionReport> {
    check_pair(gen, pair)?;
    let mut rates = Vec::with_capacity(pair.psi.len());
    let mut s_plus = Vec::new();
    let mut s_minus = Vec::new();
    for (i, (&psi, &sq)) in pair.psi.iter().zip(gen.sqrt_pi()).enumerate() {
        rates.push(pair.lambda * sq * psi);
        if psi >= 0.0 {
            s_plus.push(i);
        } else {
            s_minus.push(i);
        }
    }
    let emitted = comp_sum(s_plus.iter().map(|&i| rates[i]));
    let absorbed = comp_sum(s_minus.iter().map(|&i| rates[i]));
    Ok(EmissionReport { rates, s_plus, s_minus, emitted, absorbed })
}

/// The cut between the emitting side S+ and the absorbing side S-. Its flux
/// equals the total emission of S+, and it is maximal over all cuts.
pub fn emission_absorption_cut(gen: &Generator<'_>, pair: &EigenpairRecord) -> Result<CutSet> {
    let report = emission_absorption(gen, pair)?;
    if report.s_plus.is_empty() || report.s_minus.is_empty() {
        return Err(Error::structure(
            "eigenvector does not change sign; no emission-absorption cut exists",
        ));
    }
    let field = eigencurrent(gen, pair, 0.0)?;
    let net = gen.network();
    let mut side = vec![false; gen.num_states()];
    for &i in &report.s_plus {
        side[i] = true;
    }
    let mut edges = Vec::new();
    let mut currents = Vec::new();
    for e in 0..net.num_edges() {
        let edge = net.edge(e);
        if side[edge.a] != side[edge.b] {
            edges.push(e);
            currents.push(if side[edge.a] {
                field.current(e)
            } else {
                -field.current(e)
            });
        }
    }
    let flux = comp_sum(currents.iter().copied());
    Ok(CutSet {
        s_plus: report.s_plus,
        s_minus: report.s_minus,
        edges,
        currents,
        flux,
    })
}

/// Net current from `s_prime` to `s_second`, which must partition the states.
pub fn cut_flux(
    net: &Network,
    field: &EdgeCurrentField,
    s_prime: &[StateIx],
    s_second: &[StateIx],
) -> Result<f64> {
    let n = net.num_states();
    let mut seen = vec![0u8; n];
    for &i in s_prime {
        if i >= n {
            return Err(Error::structure("partition state out of range"));
        }
        seen[i] += 1;
    }
    for &i in s_second {
        if i >= n {
            return Err(Error::structure("partition state out of range"));
        }
        seen[i] += 2;
    }
    if seen.iter().any(|&s| s != 1 && s != 2) {
        return Err(Error::structure(
            "partition sides must cover every state exactly once",
        ));
    }
    Ok(comp_sum((0..net.num_edges()).filter_map(|e| {
        let edge = net.edge(e);
        match (seen[edge.a], seen[edge.b]) {
            (1, 2) => Some(field.current(e)),
            (2, 1) => Some(-field.current(e)),
            _ => None,
        }
    })))
}

/// Sorts a cut's per-edge currents descending and reports shares of the
/// total with their running sums.
pub fn cut_current_distribution(cut: &CutSet) -> Result<CutDistribution> {
    if cut.edges.is_empty() {
        return Err(Error::domain("cut has no crossing edges"));
    }
    let mut order: Vec<usize> = (0..cut.edges.len()).collect();
    order.sort_by(|&p, &q| cut.currents[q].total_cmp(&cut.currents[p]));
    let edges: Vec<EdgeIx> = order.iter().map(|&p| cut.edges[p]).collect();
    let currents: Vec<f64> = order.iter().map(|&p| cut.currents[p]).collect();
    let total = comp_sum(currents.iter().copied());
    if total == 0.0 {
        return Err(Error::domain("cut carries no current"));
    }
    let shares: Vec<f64> = currents.iter().map(|c| c / total).collect();
    let mut cdf = Vec::with_capacity(shares.len());
    let mut acc = 0.0;
    for &s in &shares {
        acc += s;
        cdf.push(acc);
    }
    Ok(CutDistribution { edges, currents, shares, cdf })
}

/// Worst node-balance defect of a current field against its eigenpair,
/// measured in units of lambda (the natural scale of the balance identity).
/// For the stationary mode the raw divergence is returned instead.
pub fn node_balance_residual(
    gen: &Generator<'_>,
    pair: &EigenpairRecord,
    field: &EdgeCurrentField,
) -> Result<f64> {
    check_pair(gen, pair)?;
    let net = gen.network();
    let decay = (-pair.lambda * field.time).exp();
    let mut worst = 0.0f64;
    for i in 0..net.num_states() {
        let div = comp_sum(net.incident(i).iter().map(|&e| {
            if net.edge(e).a == i {
                field.current(e)
            } else {
                -field.current(e)
            }
        }));
        let target = decay * pair.lambda * gen.sqrt_pi()[i] * pair.psi[i];
        worst = worst.max((div - target).abs());
    }
    if pair.lambda == 0.0 {
        Ok(worst)
    } else {
        Ok(worst / (decay * pair.lambda))
    }
}
