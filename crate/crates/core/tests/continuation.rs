mod common;

use ktn::asymptotics::asymptotic_spectrum;
use ktn::continuation::{
    continue_eigenpair, continue_many, temperature_schedule, RESIDUAL_TOL_REL,
};
use ktn::dense::dense_spectrum;
use ktn::synthetic::{double_funnel, random_landscape};

#[test]
fn curves_match_the_dense_solver_across_ranks_and_temperatures() {
    let net = random_landscape(7, 60, 30);
    let spec = asymptotic_spectrum(&net, 3).unwrap();
    let schedule = temperature_schedule(0.08, 0.3, 6).unwrap();
    let curves = continue_many(&net, &spec, &schedule).unwrap();
    assert_eq!(curves.len(), 3);
    for curve in &curves {
        assert!(curve.truncated.is_none());
        assert!(curve.skipped.is_empty());
        assert_eq!(curve.records.len(), schedule.len());
        for rec in &curve.records {
            let gen = net.generator(rec.t).unwrap();
            let dec = dense_spectrum(&gen).unwrap();
            let (idx, cosine) = dec.nearest_mode(&rec.psi);
            assert!(
                cosine >= 1.0 - 1e-8,
                "rank {} at T = {}: cosine {cosine}",
                curve.rank,
                rec.t
            );
            let lam = dec.eigenvalue(idx);
            assert!(
                (rec.lambda - lam).abs() <= 1e-8 * lam.max(f64::MIN_POSITIVE),
                "rank {} at T = {}: lambda {} vs dense {}",
                curve.rank,
                rec.t,
                rec.lambda,
                lam
            );
        }
    }
}

#[test]
fn normalization_contract_holds_along_curves() {
    let net = random_landscape(99, 120, 80);
    let spec = asymptotic_spectrum(&net, 2).unwrap();
    let schedule = temperature_schedule(0.06, 0.5, 8).unwrap();
    for pair in spec.pairs() {
        let curve = continue_eigenpair(&net, pair, &schedule).unwrap();
        assert!(!curve.records.is_empty());
        for rec in &curve.records {
            assert!(rec.converged && rec.validated);
            assert!(rec.lambda > 0.0);
            let psi_norm = common::dot(&rec.psi, &rec.psi).sqrt();
            assert!((psi_norm - 1.0).abs() <= 1e-12);
            let gen = net.generator(rec.t).unwrap();
            let weight: f64 = gen
                .pi()
                .iter()
                .zip(&rec.phi)
                .map(|(p, f)| p * f * f)
                .sum();
            assert!(
                (weight - 1.0).abs() <= 1e-10,
                "pi-weighted phi normalization off by {:e}",
                (weight - 1.0).abs()
            );
            assert!(rec.residual <= RESIDUAL_TOL_REL * gen.sym_norm_inf());
        }
    }
}

#[test]
fn cold_end_of_the_schedule_is_skipped_on_underflow() {
    let net = double_funnel(10, 0.5, 4.0, 0.04, 0.8);
    let spec = asymptotic_spectrum(&net, 1).unwrap();
    let pair = &spec.pairs()[0];
    assert!((pair.delta - 3.5).abs() < 0.2, "delta = {}", pair.delta);
    let schedule = temperature_schedule(0.004, 0.1, 6).unwrap();
    let curve = continue_eigenpair(&net, pair, &schedule).unwrap();
    assert!(!curve.skipped.is_empty(), "coldest point must be skipped");
    for (t, reason) in &curve.skipped {
        assert!(pair.delta / t > 690.0);
        assert!(reason.contains("underflow"), "reason: {reason}");
    }
    assert!(curve.records.len() >= 3);
    assert_eq!(curve.records.len() + curve.skipped.len(), schedule.len());
    for rec in &curve.records {
        assert!(rec.converged && rec.validated);
        assert!(rec.lambda > 0.0);
    }
    for w in curve.records.windows(2) {
        assert!(w[0].lambda < w[1].lambda);
    }
    // At the warm end the eigenvalue is far above any arithmetic floor and
    // must carry the barrier exponent.
    let warm = curve.records.last().unwrap();
    let measured = -warm.t * warm.lambda.ln();
    assert!(
        (measured - pair.delta).abs() <= 0.1 * pair.delta,
        "warm-end exponent {measured} vs delta {}",
        pair.delta
    );
}

#[test]
fn parallel_and_sequential_continuation_agree() {
    let net = random_landscape(123, 40, 20);
    let spec = asymptotic_spectrum(&net, 3).unwrap();
    let schedule = temperature_schedule(0.1, 0.4, 5).unwrap();
    let many = continue_many(&net, &spec, &schedule).unwrap();
    // Parallel runs are deterministic; repeated calls must agree bitwise.
    let again = continue_many(&net, &spec, &schedule).unwrap();
    for (pair, (from_many, repeat)) in spec.pairs().iter().zip(many.iter().zip(&again)) {
        for (a, b) in from_many.records.iter().zip(&repeat.records) {
            assert_eq!(a.lambda.to_bits(), b.lambda.to_bits());
            assert_eq!(a.iterations, b.iterations);
            for (x, y) in a.psi.iter().zip(&b.psi) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        // The sequential entry point seeds each mode in isolation; it must
        // land on the same branch to solver accuracy.
        let single = continue_eigenpair(&net, pair, &schedule).unwrap();
        assert_eq!(single.records.len(), from_many.records.len());
        for (a, b) in single.records.iter().zip(&from_many.records) {
            assert!((a.lambda - b.lambda).abs() <= 1e-10 * b.lambda.abs().max(f64::MIN_POSITIVE));
            let overlap: f64 = a.psi.iter().zip(&b.psi).map(|(x, y)| x * y).sum();
            assert!(overlap.abs() >= 1.0 - 1e-10);
        }
    }
}

#[test]
fn arrhenius_fits_recover_barrier_exponents() {
    let net = random_landscape(31415, 25, 12);
    let spec = asymptotic_spectrum(&net, 2).unwrap();
    for (idx, pair) in spec.pairs().iter().enumerate() {
        let schedule = temperature_schedule(pair.delta / 40.0, pair.delta / 20.0, 8).unwrap();
        let curves = continue_many(&net, &spec, &schedule).unwrap();
        let curve = &curves[idx];
        let fit = curve.arrhenius.as_ref().expect("fit must exist");
        assert!(fit.prefactor > 0.0);
        assert!(
            (fit.exponent - pair.delta).abs() <= 0.05 * pair.delta,
            "rank {}: fitted exponent {} vs delta {}",
            pair.rank,
            fit.exponent,
            pair.delta
        );
        // Cross-check the library fit against an independent least squares.
        let pts: Vec<(f64, f64)> = curve.records.iter().map(|r| (r.t, r.lambda)).collect();
        let (_, d) = common::arrhenius_oracle(&pts);
        assert!((d - fit.exponent).abs() <= 1e-8 * d.abs().max(1.0));
    }
}
