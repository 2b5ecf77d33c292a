//! Harmonic rate law, equilibrium distribution and the network generator.
//!
//! The rate from minimum i to minimum j through the saddle ij is
//!
//! ```text
//! L_ij(T) = O_i nu_i^kappa / (O_ij nu_ij^(kappa-1)) * exp(-(V_ij - V_i)/T)
//! ```
//!
//! and the equilibrium distribution is
//!
//! ```text
//! pi_i(T) ~ exp(-V_i/T) / (O_i nu_i^kappa)
//! ```
//!
//! which together satisfy detailed balance pi_i L_ij = pi_j L_ji exactly: both
//! sides reduce to exp(-V_ij/T) / (O_ij nu_ij^(kappa-1)) up to the partition
//! function. All exponents are assembled in log space and exponentiated last.
//!
//! The generator stores each directed rate through its square root, so the
//! symmetrized operator P^(1/2) L P^(-1/2) is exactly -M^T M for the edge
//! difference operator (M x)_e = s_ij x_i - s_ji x_j with s_ij = sqrt(L_ij).
//! That gives an exactly symmetric, exactly negative-semidefinite operator,
//! and a Rayleigh quotient that can be evaluated as a sum of squares to high
//! relative accuracy even when the eigenvalue is many orders of magnitude
//! below the operator norm.

use crate::network::{EdgeIx, Network, StateIx};
use crate::util::{comp_sum, log_sum_exp, Dd};
use crate::{Error, Result};

/// Log of the directed rate along edge `e`. `forward` means from the lower
/// endpoint `a` toward `b`.
fn log_rate_directed(net: &Network, e: EdgeIx, forward: bool, t: f64) -> f64 {
    let edge = net.edge(e);
    let src = if forward { edge.a } else { edge.b };
    let kappa = net.kappa() as f64;
    let m = net.state(src);
    (m.point_group_order as f64).ln() + kappa * m.mean_frequency.ln()
        - (edge.point_group_order as f64).ln()
        - (kappa - 1.0) * edge.mean_frequency.ln()
        - (edge.energy - m.energy) / t
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("temperature must be positive, got {t}")));
    }
    Ok(())
}

/// Harmonic rate from `i` to `j`; 0 if no edge joins them.
///
/// A strictly positive barrier at low temperature underflows to an exact 0;
/// [`Generator`] counts those edges in [`Generator::underflowed_rates`].
pub fn pairwise_rate(net: &Network, i: StateIx, j: StateIx, t: f64) -> Result<f64> {
    check_temperature(t)?;
    if i >= net.num_states() || j >= net.num_states() {
        return Err(Error::domain("state index out of range"));
    }
    match net.edge_between(i, j) {
        None => Ok(0.0),
        Some(e) => Ok(log_rate_directed(net, e, net.edge(e).a == i, t).exp()),
    }
}

/// Equilibrium (Gibbs) distribution at temperature `t`, normalized to sum 1.
pub fn equilibrium_distribution(net: &Network, t: f64) -> Result<Vec<f64>> {
    check_temperature(t)?;
    Ok(log_equilibrium(net, t).iter().map(|lw| lw.exp()).collect())
}

/// Log of the equilibrium distribution, normalized with max subtraction.
fn log_equilibrium(net: &Network, t: f64) -> Vec<f64> {
    let kappa = net.kappa() as f64;
    let mut logw: Vec<f64> = net
        .states()
        .iter()
        .map(|m| {
            -m.energy / t - (m.point_group_order as f64).ln() - kappa * m.mean_frequency.ln()
        })
        .collect();
    let logz = log_sum_exp(&logw);
    for lw in &mut logw {
        *lw -= logz;
    }
    logw
}

/// Per-edge rate data. `s_fwd` is sqrt(L_ab), `s_bwd` is sqrt(L_ba); the
/// stored rates are defined as the squares of these, so detailed balance and
/// the M^T M factorization hold exactly for the stored values.
#[derive(Debug, Clone)]
pub struct EdgeRates {
    pub s_fwd: f64,
    pub s_bwd: f64,
    pub log_fwd: f64,
    pub log_bwd: f64,
}

/// The generator of the network at a fixed temperature.
#[derive(Debug, Clone)]
pub struct Generator<'a> {
    net: &'a Network,
    t: f64,
    edge_rates: Vec<EdgeRates>,
    /// Diagonal of -L_sym, i.e. total escape rate per state.
    escape: Vec<f64>,
    pi: Vec<f64>,
    log_pi: Vec<f64>,
    sqrt_pi: Vec<f64>,
    norm_inf: f64,
    underflowed: usize,
}

impl Network {
    /// Build the generator at temperature `t`. The network must be connected.
    pub fn generator(&self, t: f64) -> Result<Generator<'_>> {
        check_temperature(t)?;
        if !self.is_connected() {
            return Err(Error::structure(
                "generator requires a connected network; take the largest connected component first",
            ));
        }
        let log_pi = log_equilibrium(self, t);
        let pi: Vec<f64> = log_pi.iter().map(|l| l.exp()).collect();
        let sqrt_pi: Vec<f64> = log_pi.iter().map(|l| (0.5 * l).exp()).collect();

        let mut edge_rates = Vec::with_capacity(self.num_edges());
        let mut underflowed = 0usize;
        for e in 0..self.num_edges() {
            let log_fwd = log_rate_directed(self, e, true, t);
            let log_bwd = log_rate_directed(self, e, false, t);
            let s_fwd = (0.5 * log_fwd).exp();
            let s_bwd = (0.5 * log_bwd).exp();
            if s_fwd * s_fwd == 0.0 || s_bwd * s_bwd == 0.0 {
                underflowed += 1;
            }
            edge_rates.push(EdgeRates {
                s_fwd,
                s_bwd,
                log_fwd,
                log_bwd,
            });
        }

        let n = self.num_states();
        let mut escape = vec![0.0f64; n];
        let mut offdiag_sum = vec![0.0f64; n];
        for (e, r) in edge_rates.iter().enumerate() {
            let edge = self.edge(e);
            escape[edge.a] += r.s_fwd * r.s_fwd;
            escape[edge.b] += r.s_bwd * r.s_bwd;
            let coupling = r.s_fwd * r.s_bwd;
            offdiag_sum[edge.a] += coupling;
            offdiag_sum[edge.b] += coupling;
        }
        let norm_inf = (0..n)
            .map(|i| escape[i] + offdiag_sum[i])
            .fold(0.0f64, f64::max);

        Ok(Generator {
            net: self,
            t,
            edge_rates,
            escape,
            pi,
            log_pi,
            sqrt_pi,
            norm_inf,
            underflowed,
        })
    }
}

impl<'a> Generator<'a> {
    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn num_states(&self) -> usize {
        self.net.num_states()
    }

    pub fn temperature(&self) -> f64 {
        self.t
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn log_pi(&self) -> &[f64] {
        &self.log_pi
    }

    pub fn sqrt_pi(&self) -> &[f64] {
        &self.sqrt_pi
    }

    pub fn edge_rates(&self) -> &[EdgeRates] {
        &self.edge_rates
    }

    /// Number of edges with at least one direction underflowed to rate 0.
    pub fn underflowed_rates(&self) -> usize {
        self.underflowed
    }

    /// Infinity norm of the symmetrized operator.
    pub fn sym_norm_inf(&self) -> f64 {
        self.norm_inf
    }

    /// Total escape rate (-L_ii) of state `i`.
    pub fn escape_rate(&self, i: StateIx) -> f64 {
        self.escape[i]
    }

    /// Stored rate from `i` to `j`; 0 if no edge joins them.
    pub fn rate(&self, i: StateIx, j: StateIx) -> f64 {
        match self.net.edge_between(i, j) {
            None => 0.0,
            Some(e) => {
                let r = &self.edge_rates[e];
                if self.net.edge(e).a == i {
                    r.s_fwd * r.s_fwd
                } else {
                    r.s_bwd * r.s_bwd
                }
            }
        }
    }

    /// Dense generator matrix L, row-major. Intended for small networks.
    pub fn dense_l(&self) -> Vec<f64> {
        let n = self.num_states();
        let mut l = vec![0.0f64; n * n];
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            l[edge.a * n + edge.b] = r.s_fwd * r.s_fwd;
            l[edge.b * n + edge.a] = r.s_bwd * r.s_bwd;
        }
        for i in 0..n {
            l[i * n + i] = -self.escape[i];
        }
        l
    }

    /// y = L_sym x through the exact -M^T M factorization.
    pub fn symmetrized_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.num_states() {
            return Err(Error::domain("vector length does not match network size"));
        }
        let mut y = vec![0.0f64; x.len()];
        self.symmetrized_apply_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn symmetrized_apply_into(&self, x: &[f64], y: &mut [f64]) {
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            let d = r.s_fwd * x[edge.a] - r.s_bwd * x[edge.b];
            y[edge.a] -= r.s_fwd * d;
            y[edge.b] += r.s_bwd * d;
        }
    }

    /// Rayleigh quotient x^T L_sym x / x^T x evaluated as a compensated sum
    /// of per-edge squares. Relative accuracy is O(eps) in the quotient even
    /// when it is far below the operator norm, which plain x^T (L_sym x)
    /// cannot achieve.
    pub fn dirichlet_quotient(&self, x: &[f64]) -> f64 {
        let mut hi_parts = Vec::with_capacity(self.edge_rates.len());
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            let d = Dd::two_prod(r.s_fwd, x[edge.a]).sub(Dd::two_prod(r.s_bwd, x[edge.b]));
            hi_parts.push(d.mul(d).value());
        }
        let num = comp_sum(hi_parts);
        let den = comp_sum(x.iter().map(|v| v * v));
        -num / den
    }

    /// Bilinear Dirichlet form x^T (-L_sym) y as a compensated sum of
    /// per-edge products. Shares the quotient's property that values far
    /// below the operator norm keep full relative accuracy.
    pub fn dirichlet_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut parts = Vec::with_capacity(self.edge_rates.len());
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            let mx = Dd::two_prod(r.s_fwd, x[edge.a]).sub(Dd::two_prod(r.s_bwd, x[edge.b]));
            let my = Dd::two_prod(r.s_fwd, y[edge.a]).sub(Dd::two_prod(r.s_bwd, y[edge.b]));
            parts.push(mx.mul(my).value());
        }
        comp_sum(parts)
    }

    /// Largest relative detailed-balance violation over all edges.
    pub fn detailed_balance_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            let lhs = self.pi[edge.a] * (r.s_fwd * r.s_fwd);
            let rhs = self.pi[edge.b] * (r.s_bwd * r.s_bwd);
            let scale = lhs.abs().max(rhs.abs());
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).abs() / scale);
            }
        }
        worst
    }

    /// Largest row-sum residual of L relative to the largest diagonal entry.
    pub fn row_sum_residual(&self) -> f64 {
        let n = self.num_states();
        let mut sums = vec![0.0f64; n];
        for (e, r) in self.edge_rates.iter().enumerate() {
            let edge = self.net.edge(e);
            sums[edge.a] += r.s_fwd * r.s_fwd;
            sums[edge.b] += r.s_bwd * r.s_bwd;
        }
        let scale = self.escape.iter().fold(0.0f64, |a, &b| a.max(b));
        if scale == 0.0 {
            return 0.0;
        }
        (0..n)
            .map(|i| (sums[i] - self.escape[i]).abs())
            .fold(0.0f64, f64::max)
            / scale
    }
}
