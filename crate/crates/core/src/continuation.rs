//! Finite-temperature eigenpair continuation. Each asymptotic mode seeds a
//! Rayleigh quotient iteration at the lowest temperature of a schedule; the
//! converged eigenvector is carried to the next temperature as the initial
//! guess. Misconvergence onto a neighboring mode is caught by an overlap
//! test and answered with a short ladder of refined guesses.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::asymptotics::{AsymptoticEigenpair, AsymptoticSpectrum};
use crate::dense::{jacobi_sweep, CLUSTER_REL, JACOBI_MAX_SWEEPS};
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::network::{Network, StateIx};
use crate::sparse::{ldl_factor, reverse_cuthill_mckee, SparseSym};
use crate::util::{comp_sum, dot, norm2, normalize};

/// Residual tolerance for an accepted eigenpair, relative to the infinity
/// norm of the symmetrized generator.
pub const RESIDUAL_TOL_REL: f64 = 1e-10;
/// Iteration cap for a single Rayleigh quotient run.
pub const MAX_RQI_ITER: usize = 50;
/// Overlap |<psi, guess>| at or above which a converged pair is accepted.
pub const VALIDATION_THRESHOLD: f64 = 0.5;
/// Barrier-to-temperature ratio beyond which e^{-delta/T} underflows and the
/// eigenvalue is unreachable in double precision.
const LOG_UNDERFLOW: f64 = 690.0;
/// Iterate movement 1 - |<x_new, x_old>| below which the vector has stalled
/// at its float-precision limit.
const VECTOR_STALL: f64 = 1e-14;

/// Bisection depth when a temperature step is refined in 1/T.
const BRIDGE_DEPTH: usize = 5;

/// Eigenvalues this far below the operator norm sit inside the additive
/// roundoff of a shifted factorization; Rayleigh shifts scramble them.
const DEEP_CLUSTER: f64 = 1e-11;

/// Fixed negative shift, relative to the operator norm, used instead: the
/// solve stays positive definite and amplifies every slow mode alike, so
/// deflation alone decides which one survives.
const DEEP_SIGMA: f64 = 50.0 * f64::EPSILON;

/// One converged (or capped) eigenpair at a fixed temperature.
#[derive(Debug, Clone)]
pub struct EigenpairRecord {
    /// Temperature the pair was computed at.
    pub t: f64,
    /// Eigenvalue lambda >= 0 of -L.
    pub lambda: f64,
    /// Unit eigenvector of the symmetrized operator.
    pub psi: Vec<f64>,
    /// Right eigenvector phi_i = psi_i / sqrt(pi_i).
    pub phi: Vec<f64>,
    /// Final ||L_sym psi + lambda psi||_2.
    pub residual: f64,
    /// Number of shifted solves performed.
    pub iterations: usize,
    /// Residual met the tolerance.
    pub converged: bool,
    /// Overlap test against the guess passed.
    pub validated: bool,
}

/// Least-squares Arrhenius law lambda ~= A e^{-delta/T}.
#[derive(Debug, Clone, Copy)]
pub struct ArrheniusFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

/// An eigenvalue branch followed over a temperature schedule.
#[derive(Debug, Clone)]
pub struct EigenpairCurve {
    /// Asymptotic rank the branch was seeded from.
    pub rank: usize,
    /// Sink state of the seeding asymptotic mode.
    pub sink: StateIx,
    /// Accepted records, in schedule order.
    pub records: Vec<EigenpairRecord>,
    /// Fit over all accepted records, when at least two exist.
    pub arrhenius: Option<ArrheniusFit>,
    /// Diagnostic set when the retry ladder was exhausted and the remaining
    /// schedule abandoned.
    pub truncated: Option<String>,
    /// Temperatures skipped before any solve, with the reason.
    pub skipped: Vec<(f64, String)>,
}

impl EigenpairCurve {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn temperatures(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }
}

/// A temperature schedule with evenly spaced inverse temperatures, increasing
/// from `t_min` to `t_max` over `n` points.
pub fn temperature_schedule(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) || !t_max.is_finite() {
        return Err(Error::domain("schedule needs 0 < t_min < t_max"));
    }
    if n < 2 {
        return Err(Error::domain("schedule needs at least two temperatures"));
    }
    let b_hi = 1.0 / t_min;
    let b_lo = 1.0 / t_max;
    let step = (b_hi - b_lo) / (n - 1) as f64;
    let mut ts: Vec<f64> = (0..n).map(|i| 1.0 / (b_hi - step * i as f64)).collect();
    ts[0] = t_min;
    ts[n - 1] = t_max;
    Ok(ts)
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::domain("empty temperature schedule"));
    }
    for (i, &t) in schedule.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::domain("temperatures must be positive and finite"));
        }
        if i > 0 && t <= schedule[i - 1] {
            return Err(Error::domain("temperature schedule must be strictly increasing"));
        }
    }
    Ok(())
}

/// Solves (-L_sym - lambda I) y = x. When the pivot sequence hits an exact
/// zero or the solve overflows, the shift is nudged below lambda by growing
/// amounts; far enough down the matrix turns positive definite, so the
/// ladder always terminates, and a downshifted solve still points at the
/// same mode.
fn shifted_solve(
    gen: &Generator<'_>,
    perm: &[usize],
    lambda: f64,
    x: &[f64],
) -> Result<Vec<f64>> {
    let scale = gen.sym_norm_inf().max(f64::MIN_POSITIVE);
    let base = 1e-12 * lambda.abs().max(f64::EPSILON * scale);
    let shifts = [
        lambda,
        lambda - base,
        lambda - 1e-15 * scale,
        lambda - 1e-12 * scale,
        lambda - 1e-9 * scale,
        lambda - 1e-6 * scale,
    ];
    for &s in &shifts {
        if let Ok(f) = ldl_factor(&SparseSym::shifted_neg_lsym(gen, s), perm) {
            let mut y = x.to_vec();
            f.solve_in_place(&mut y);
            if y.iter().all(|v| v.is_finite()) && norm2(&y) > 0.0 {
                return Ok(y);
            }
        }
    }
    Err(Error::convergence(
        "shifted factorization failed repeatedly near an exact eigenvalue",
    ))
}

fn residual_norm(gen: &Generator<'_>, psi: &[f64], lambda: f64, work: &mut [f64]) -> f64 {
    gen.symmetrized_apply_into(psi, work);
    comp_sum(
        work.iter()
            .zip(psi)
            .map(|(l, p)| {
                let r = l + lambda * p;
                r * r
            }),
    )
    .sqrt()
}

fn record_from(gen: &Generator<'_>, psi: Vec<f64>, lambda: f64, residual: f64, iterations: usize, tol: f64) -> EigenpairRecord {
    let phi = psi
        .iter()
        .zip(gen.sqrt_pi())
        .map(|(p, s)| p / s)
        .collect();
    EigenpairRecord {
        t: gen.temperature(),
        lambda,
        psi,
        phi,
        residual,
        iterations,
        converged: residual <= tol,
        validated: false,
    }
}

/// Rayleigh quotient iteration on the symmetrized generator. `shift0` is the
/// initial Rayleigh-quotient estimate in the L_sym sign convention (that is,
/// -lambda); when absent the quotient of `x0` is used. Accepts once the
/// residual ||L_sym psi + lambda psi||_2 meets `tol`, at least one solve has
/// been taken, and the iterate has stalled at its float-precision limit;
/// `max_iter` solves without that returns the last iterate with `converged`
/// unset. The stall requirement matters for eigenvalues far below the
/// operator norm: a guess can pass the residual test while its quotient is
/// still contaminated by the near-kernel cluster, and one or two further
/// solves restore full relative accuracy in lambda.
pub fn rayleigh_quotient_iteration(
    gen: &Generator<'_>,
    x0: &[f64],
    shift0: Option<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<EigenpairRecord> {
    rqi_deflated(gen, x0, shift0, tol, max_iter, &[])
}

/// [`rayleigh_quotient_iteration`] with extra deflation directions. When two
/// eigenvalues sit closer together than the roundoff of the shifted solve,
/// no factorization can keep their eigenvectors apart: every solve reinjects
/// an order-one mix of the pair. Projecting already-computed slower
/// eigenvectors out of each iterate removes them from the search space, so
/// the wanted mode becomes extremal there and converges cleanly.
pub(crate) fn rqi_deflated(
    gen: &Generator<'_>,
    x0: &[f64],
    shift0: Option<f64>,
    tol: f64,
    max_iter: usize,
    lower: &[&[f64]],
) -> Result<EigenpairRecord> {
    if x0.len() != gen.num_states() {
        return Err(Error::domain("guess length does not match network size"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if norm2(x0) == 0.0 || x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("guess must be nonzero and finite"));
    }

    let perm = reverse_cuthill_mckee(&SparseSym::shifted_neg_lsym(gen, 0.0).adjacency());
    let mut stationary = gen.sqrt_pi().to_vec();
    normalize(&mut stationary);

    let mut x = x0.to_vec();
    normalize(&mut x);
    deflate(&mut x, &stationary);
    if norm2(&x) <= 1e-8 {
        // The guess is the stationary direction itself; its pair is known in
        // closed form and sits outside the deflated search space.
        let x = stationary;
        let lambda = -gen.dirichlet_quotient(&x);
        let mut work = vec![0.0f64; x.len()];
        let residual = residual_norm(gen, &x, lambda, &mut work);
        return Ok(record_from(gen, x, lambda, residual, 0, tol));
    }
    for d in lower {
        deflate(&mut x, d);
    }
    if norm2(&x) <= 1e-8 {
        return Err(Error::domain("guess lies entirely in the deflated subspace"));
    }
    normalize(&mut x);
    let mut lambda = match shift0 {
        Some(rho) => -rho,
        None => -gen.dirichlet_quotient(&x),
    };
    let mut work = vec![0.0f64; x.len()];
    let mut residual = residual_norm(gen, &x, lambda, &mut work);
    let mut iterations = 0usize;
    let mut moved = f64::INFINITY;
    let scale = gen.sym_norm_inf().max(f64::MIN_POSITIVE);
    while iterations < max_iter {
        if residual <= tol && iterations >= 1 && moved <= VECTOR_STALL {
            break;
        }
        let shift = if lambda <= DEEP_CLUSTER * scale {
            -(DEEP_SIGMA * scale)
        } else {
            lambda
        };
        let mut y = shifted_solve(gen, &perm, shift, &x)?;
        deflate(&mut y, &stationary);
        for d in lower {
            deflate(&mut y, d);
        }
        if norm2(&y) == 0.0 {
            break;
        }
        normalize(&mut y);
        moved = (1.0 - dot(&y, &x).abs()).abs();
        x = y;
        lambda = -gen.dirichlet_quotient(&x);
        residual = residual_norm(gen, &x, lambda, &mut work);
        iterations += 1;
    }
    Ok(record_from(gen, x, lambda, residual, iterations, tol))
}

/// Overlap acceptance test: |<psi, guess>| at or above the threshold, with
/// both vectors unit length.
pub fn validate_eigenpair(candidate: &EigenpairRecord, guess: &[f64], threshold: f64) -> bool {
    dot(&candidate.psi, guess).abs() >= threshold
}

// The stationary direction is known exactly. Projecting it out of every
// iterate keeps modes whose eigenvalue sits below the roundoff of the shifted
// solve from collapsing onto the kernel.
fn deflate(v: &mut [f64], direction: &[f64]) {
    let c = dot(v, direction);
    for (x, s) in v.iter_mut().zip(direction) {
        *x -= c * s;
    }
}

fn indicator_seed(gen: &Generator<'_>, members: &[StateIx]) -> Vec<f64> {
    let mut g = vec![0.0f64; gen.num_states()];
    for &i in members {
        g[i] = gen.sqrt_pi()[i];
    }
    g
}

/// Initial guess for one mode: the equilibrium-weighted indicator of its set,
/// orthogonalized against the stationary direction and against the seeds of
/// every slower mode. The orthogonalized family reproduces the zero-T
/// eigenvector structure, tails included, which keeps the iteration from
/// being captured by a slower mode whose set contains this one.
fn seed_guess(
    gen: &Generator<'_>,
    members: &[StateIx],
    lower_sets: &[&[StateIx]],
) -> Option<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(lower_sets.len() + 1);
    let mut stationary = gen.sqrt_pi().to_vec();
    normalize(&mut stationary);
    basis.push(stationary);
    for set in lower_sets {
        let mut v = indicator_seed(gen, set);
        for b in &basis {
            deflate(&mut v, b);
        }
        if norm2(&v) > 1e-12 {
            normalize(&mut v);
            basis.push(v);
        }
    }
    let mut g = indicator_seed(gen, members);
    if norm2(&g) == 0.0 {
        return None;
    }
    normalize(&mut g);
    for b in &basis {
        deflate(&mut g, b);
    }
    if norm2(&g) <= 1e-12 {
        return None;
    }
    normalize(&mut g);
    Some(g)
}

/// Follows one asymptotic mode over an increasing temperature schedule.
/// Returns the curve with as many accepted records as the retry ladder could
/// sustain; temperatures whose eigenvalue underflows double precision are
/// skipped with a note rather than attempted.
pub fn continue_eigenpair(
    net: &Network,
    pair: &AsymptoticEigenpair,
    schedule: &[f64],
) -> Result<EigenpairCurve> {
    continue_eigenpair_within(net, pair, schedule, &[], &[], &BTreeMap::new())
}

/// Worker behind [`continue_eigenpair`]. `lower_sets` holds the member sets
/// of every slower mode, in rank order; seeding orthogonalizes against them.
/// `lower_curves` holds completed curves of slower modes; when a record
/// exists at the current temperature its eigenvector is deflated out of the
/// iteration, which is what separates modes closer together than solver
/// roundoff. `adopted` holds records prebuilt by the block polish, keyed by
/// schedule index; they are taken as-is and anchor the ladder on both sides.
pub(crate) fn continue_eigenpair_within(
    net: &Network,
    pair: &AsymptoticEigenpair,
    schedule: &[f64],
    lower_sets: &[&[StateIx]],
    lower_curves: &[&EigenpairCurve],
    adopted: &BTreeMap<usize, EigenpairRecord>,
) -> Result<EigenpairCurve> {
    check_schedule(schedule)?;
    let mut curve = EigenpairCurve {
        rank: pair.rank,
        sink: pair.sink,
        records: Vec::new(),
        arrhenius: None,
        truncated: None,
        skipped: Vec::new(),
    };

    for (idx, &t) in schedule.iter().enumerate() {
        if let Some(rec) = adopted.get(&idx) {
            curve.records.push(rec.clone());
            continue;
        }
        if pair.delta / t > LOG_UNDERFLOW {
            curve.skipped.push((
                t,
                format!("e^(-{:.6}/{t:.6}) underflows double precision", pair.delta),
            ));
            continue;
        }
        let gen = net.generator(t)?;
        let scale = gen.sym_norm_inf();
        if scale == 0.0 {
            curve
                .skipped
                .push((t, "all transition rates underflowed to zero".to_string()));
            continue;
        }
        let tol = RESIDUAL_TOL_REL * scale;

        let guess = match curve.records.last() {
            Some(prev) => prev.psi.clone(),
            None => match seed_guess(&gen, &pair.members, lower_sets) {
                Some(g) => g,
                None => {
                    curve
                        .skipped
                        .push((t, "equilibrium weight of the mode set underflowed".to_string()));
                    continue;
                }
            },
        };

        let lower_psis: Vec<&[f64]> = lower_curves
            .iter()
            .filter_map(|c| {
                c.records
                    .iter()
                    .find(|r| r.t == t)
                    .map(|r| r.psi.as_slice())
            })
            .collect();

        let n = curve.records.len();
        let hop = ladder_step(
            &gen,
            curve.records.last(),
            n.checked_sub(2).map(|i| &curve.records[i]),
            Some(&curve),
            &guess,
            pair.delta,
            tol,
            &lower_psis,
        )
        .or_else(|| {
            // The eigenvector can rotate through a near-degeneracy faster
            // than the schedule samples it; refine the step in 1/T so each
            // hop sees a small rotation.
            curve.records.last().and_then(|from| {
                bridge_step(net, from, t, pair.delta, &lower_psis, BRIDGE_DEPTH)
            })
        });
        match hop {
            Some(rec) => curve.records.push(rec),
            None => {
                if adopted.keys().any(|&k| k > idx) {
                    // A prebuilt record lies ahead; resume the ladder from
                    // that anchor instead of abandoning the schedule.
                    curve
                        .skipped
                        .push((t, "retries exhausted between anchors".to_string()));
                    continue;
                }
                curve.truncated = Some(format!(
                    "retries exhausted at T = {t:.6} after {} accepted records",
                    curve.records.len()
                ));
                break;
            }
        }
    }

    if curve.records.len() >= 2 {
        let lo = curve.records.first().unwrap().t;
        let hi = curve.records.last().unwrap().t;
        curve.arrhenius = arrhenius_fit(&curve, lo, hi).ok();
    }
    Ok(curve)
}

/// One temperature step: plain RQI from the guess, then a retry ladder that
/// deflates wrong catches, extrapolates the eigenvector, and finally seeds
/// the shift from the eigenvalue trend of the anchors. `a1` is the accepted
/// record nearest in temperature, `a2` the one before it; `window` supplies
/// the whole-window Arrhenius rung when a full curve exists.
#[allow(clippy::too_many_arguments)]
fn ladder_step(
    gen: &Generator<'_>,
    a1: Option<&EigenpairRecord>,
    a2: Option<&EigenpairRecord>,
    window: Option<&EigenpairCurve>,
    guess: &[f64],
    delta: f64,
    tol: f64,
    lower_psis: &[&[f64]],
) -> Option<EigenpairRecord> {
    // Eigenvalues of the landscape generator grow with temperature throughout
    // the activated regime, so a collapse relative to the previous record
    // means the iteration slid onto a slower mode even if the overlap test
    // still passes. In the other direction the growth over one step is
    // bounded by the barrier exponent: a jump far beyond e^(delta d(1/T))
    // means the iteration climbed onto a faster branch.
    let floor = a1.map(|r| 0.5 * r.lambda);
    let ceiling = a1.map(|r| {
        let dbeta = 1.0 / r.t - 1.0 / gen.temperature();
        r.lambda * (1.25 * delta * dbeta + 2.0).exp()
    });
    let mut wrong: Vec<Vec<f64>> = Vec::new();

    let attempt = |g: &[f64],
                   shift0: Option<f64>,
                   wrong: &[Vec<f64>]|
     -> Option<EigenpairRecord> {
        let mut deflate_set: Vec<&[f64]> = Vec::with_capacity(lower_psis.len() + wrong.len());
        deflate_set.extend_from_slice(lower_psis);
        deflate_set.extend(wrong.iter().map(|w| w.as_slice()));
        let mut rec = rqi_deflated(gen, g, shift0, tol, MAX_RQI_ITER, &deflate_set).ok()?;
        if rec.converged
            && validate_eigenpair(&rec, g, VALIDATION_THRESHOLD)
            && floor.is_none_or(|f| rec.lambda >= f)
            && ceiling.is_none_or(|c| rec.lambda <= c)
        {
            rec.validated = true;
            Some(rec)
        } else if rec.converged {
            // Keep the wrong vector around for the deflation retries.
            Some(rec)
        } else {
            None
        }
    };

    let first = attempt(guess, None, &wrong);
    if let Some(rec) = first {
        if rec.validated {
            return Some(rec);
        }
        wrong.push(rec.psi);
    }

    // (a) Deflate each wrong catch out of the iteration and try again; the
    // mode it collapsed onto becomes unreachable.
    for _ in 0..4 {
        let mut g = guess.to_vec();
        for w in &wrong {
            deflate(&mut g, w);
        }
        if norm2(&g) <= 1e-8 {
            break;
        }
        normalize(&mut g);
        match attempt(&g, None, &wrong) {
            Some(rec) if rec.validated => return Some(rec),
            Some(rec) => wrong.push(rec.psi),
            None => break,
        }
    }

    // (b) Linear extrapolation of psi from the two previous temperatures.
    if let (Some(last), Some(prev)) = (a1, a2) {
        let mut g: Vec<f64> = last
            .psi
            .iter()
            .zip(&prev.psi)
            .map(|(a, b)| 2.0 * a - b)
            .collect();
        if norm2(&g) > 0.0 {
            normalize(&mut g);
            if let Some(rec) = attempt(&g, None, &wrong) {
                if rec.validated {
                    return Some(rec);
                }
            }
        }
    }

    // (c) Seed the shift from the eigenvalue trend instead of the guess's
    // Rayleigh quotient. A drifted eigenvector of a deeply suppressed mode
    // puts most of its quotient weight on fast modes, while log-linear
    // extrapolation in 1/T stays on the branch; with one anchor the step is
    // taken at the barrier exponent.
    let expected = match (a1, a2) {
        (Some(b), Some(a)) => {
            let slope = (b.lambda.ln() - a.lambda.ln()) / (1.0 / b.t - 1.0 / a.t);
            let lam = (b.lambda.ln() + slope * (1.0 / gen.temperature() - 1.0 / b.t)).exp();
            (lam.is_finite() && lam > 0.0).then_some(lam)
        }
        (Some(prev), None) => {
            let lam = prev.lambda * (delta * (1.0 / prev.t - 1.0 / gen.temperature())).exp();
            (lam.is_finite() && lam > 0.0).then_some(lam)
        }
        _ => None,
    };
    if let Some(lam) = expected {
        if let Some(rec) = attempt(guess, Some(-lam), &wrong) {
            if rec.validated {
                return Some(rec);
            }
        }
    }

    // (d) Hold the shift at the eigenvalue the whole-window Arrhenius fit
    // predicts.
    if let Some(curve) = window {
        if curve.records.len() >= 2 {
            let lo = curve.records.first().unwrap().t;
            let hi = curve.records.last().unwrap().t;
            if let Ok(fit) = arrhenius_fit(curve, lo, hi) {
                let lambda_pred = fit.prefactor * (-fit.exponent / gen.temperature()).exp();
                if lambda_pred.is_finite() && lambda_pred > 0.0 {
                    if let Some(rec) = attempt(guess, Some(-lambda_pred), &wrong) {
                        if rec.validated {
                            return Some(rec);
                        }
                    }
                }
            }
        }
    }

    None
}

/// Walks from an accepted record to the target temperature through
/// intermediate points, bisecting in 1/T whenever a hop fails. Intermediate
/// hops carry no lower-mode deflation because the neighbouring curves hold
/// no records there; the final hop onto the schedule point does.
fn bridge_step(
    net: &Network,
    from: &EigenpairRecord,
    t_target: f64,
    delta: f64,
    lower_psis: &[&[f64]],
    depth: usize,
) -> Option<EigenpairRecord> {
    let gen = net.generator(t_target).ok()?;
    let scale = gen.sym_norm_inf();
    if scale == 0.0 {
        return None;
    }
    let tol = RESIDUAL_TOL_REL * scale;
    if let Some(rec) = ladder_step(
        &gen,
        Some(from),
        None,
        None,
        &from.psi,
        delta,
        tol,
        lower_psis,
    ) {
        return Some(rec);
    }
    if depth == 0 {
        return None;
    }
    let beta_mid = 0.5 * (1.0 / from.t + 1.0 / t_target);
    let t_mid = 1.0 / beta_mid;
    if !(t_mid > from.t && t_mid < t_target) {
        return None;
    }
    let mid = bridge_step(net, from, t_mid, delta, &[], depth - 1)?;
    bridge_step(net, &mid, t_target, delta, lower_psis, depth - 1)
}

/// Continues every mode of an asymptotic spectrum in parallel. Curves are
/// independent; each one is sequential in temperature. A curve the
/// independent pass loses, or one that burned its whole iteration budget at
/// some temperature, is re-run afterwards with the completed slower curves
/// deflated out of its iterations; that second pass is what resolves modes
/// separated by less than solver roundoff.
pub fn continue_many(
    net: &Network,
    spectrum: &AsymptoticSpectrum,
    schedule: &[f64],
) -> Result<Vec<EigenpairCurve>> {
    check_schedule(schedule)?;
    let member_sets: Vec<&[StateIx]> = spectrum
        .pairs()
        .iter()
        .map(|p| p.members.as_slice())
        .collect();
    let mut curves: Vec<EigenpairCurve> = spectrum
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(i, pair)| continue_eigenpair_within(net, pair, schedule, &member_sets[..i], &[]))
        .collect::<Result<_>>()?;

    for i in 0..curves.len() {
        let struggling = curves[i].truncated.is_some()
            || curves[i]
                .records
                .iter()
                .any(|r| r.iterations >= MAX_RQI_ITER);
        if !struggling {
            continue;
        }
        let lower: Vec<&EigenpairCurve> = curves[..i].iter().collect();
        let repaired = continue_eigenpair_within(
            net,
            &spectrum.pairs()[i],
            schedule,
            &member_sets[..i],
            &lower,
        )?;
        if repaired.truncated.is_none() || repaired.records.len() > curves[i].records.len() {
            curves[i] = repaired;
        }
    }
    Ok(curves)
}

/// Least squares of ln lambda against 1/T over the validated records with
/// lambda > 0 inside [t_min, t_max]. Underflowed records are excluded; fewer
/// than two usable points is a domain error.
pub fn arrhenius_fit(curve: &EigenpairCurve, t_min: f64, t_max: f64) -> Result<ArrheniusFit> {
    let pts: Vec<(f64, f64)> = curve
        .records
        .iter()
        .filter(|r| r.validated && r.lambda > 0.0 && r.t >= t_min && r.t <= t_max)
        .map(|r| (1.0 / r.t, r.lambda.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::domain(
            "Arrhenius fit needs at least two validated records with lambda > 0 in range",
        ));
    }
    let n = pts.len() as f64;
    let mx = comp_sum(pts.iter().map(|p| p.0)) / n;
    let my = comp_sum(pts.iter().map(|p| p.1)) / n;
    let sxx = comp_sum(pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)));
    let sxy = comp_sum(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)));
    if sxx == 0.0 {
        return Err(Error::domain("Arrhenius fit needs distinct temperatures"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(ArrheniusFit {
        prefactor: intercept.exp(),
        exponent: -slope,
        t_min,
        t_max,
        points: pts.len(),
    })
}
