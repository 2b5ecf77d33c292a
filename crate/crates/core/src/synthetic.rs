//! Small constructed networks used throughout the tests, examples and docs.

use crate::network::{MinimumRecord, Network, TransitionStateRecord};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Network from plain energies with unit prefactors and kappa = 3.
/// `edges` entries are (state, state, saddle energy) with zero-based states.
pub fn from_energies(states: &[f64], edges: &[(usize, usize, f64)]) -> Network {
    let minima: Vec<MinimumRecord> = states
        .iter()
        .enumerate()
        .map(|(i, &energy)| MinimumRecord {
            id: i as u64 + 1,
            energy,
            point_group_order: 1,
            mean_frequency: 1.0,
        })
        .collect();
    let saddles: Vec<TransitionStateRecord> = edges
        .iter()
        .map(|&(a, b, energy)| TransitionStateRecord {
            from: a as u64 + 1,
            to: b as u64 + 1,
            energy,
            point_group_order: 1,
            mean_frequency: 1.0,
        })
        .collect();
    Network::build(&minima, &saddles, 3).expect("valid synthetic network")
}

/// The standard three-state chain: V = (0, 0.5, 0.1), saddles 1.0 and 0.7.
pub fn three_chain() -> Network {
    from_energies(&[0.0, 0.5, 0.1], &[(0, 1, 1.0), (1, 2, 0.7)])
}

/// Two states with a single saddle.
pub fn two_state(v0: f64, v1: f64, saddle: f64) -> Network {
    from_energies(&[v0, v1], &[(0, 1, saddle)])
}

/// Two mirrored funnels of `n` states each, joined by a single saddle at
/// `v_top`. State 0 is the global minimum of funnel one; state `n` is the
/// bottom of funnel two at `v_second`. Within a funnel, consecutive states
/// climb by `step` and are joined by saddles `barrier` above the higher one.
pub fn double_funnel(n: usize, v_second: f64, v_top: f64, step: f64, barrier: f64) -> Network {
    assert!(n >= 2);
    let mut states = Vec::with_capacity(2 * n);
    let mut edges = Vec::new();
    for i in 0..n {
        states.push(i as f64 * step);
    }
    for i in 0..n {
        states.push(v_second + i as f64 * step);
    }
    for i in 0..n - 1 {
        let high = states[i + 1];
        edges.push((i, i + 1, high + barrier));
        let high2 = states[n + i + 1];
        edges.push((n + i, n + i + 1, high2 + barrier));
    }
    edges.push((n - 1, 2 * n - 1, v_top));
    from_energies(&states, &edges)
}

/// A funnel with a second sink behind a moderate barrier, two shallow local
/// minima, and three satellite states behind very high, closely spaced
/// saddles. Capping between the funnel barrier and the satellite saddles
/// removes the satellites and widens the leading asymptotic gap.
pub fn funnel_with_satellites() -> Network {
    let states = vec![
        0.0,  // 0 global minimum
        0.10, // 1 second sink
        0.50, // 2 shallow
        0.55, // 3 shallow
        0.45, // 4 satellite
        0.40, // 5 satellite
        0.35, // 6 satellite
    ];
    let edges = vec![
        (0, 1, 1.20), // funnel barrier: delta 1.10 for the second sink
        (0, 2, 0.72), // delta 0.22
        (0, 3, 0.70), // delta 0.15
        (0, 4, 4.95), // delta 4.50
        (0, 5, 4.96), // delta 4.56
        (0, 6, 4.96500000000000015), // delta 4.615
    ];
    from_energies(&states, &edges)
}

/// Two single-state traps whose eigenvalue curves cross: one has the lower
/// barrier, the other the larger entropic prefactor.
pub fn crossing_funnels() -> Network {
    let minima = vec![
        MinimumRecord { id: 1, energy: 0.0, point_group_order: 1, mean_frequency: 1.0 },
        MinimumRecord { id: 2, energy: 0.15, point_group_order: 1, mean_frequency: 1.0 },
        MinimumRecord { id: 3, energy: 0.10, point_group_order: 1, mean_frequency: 1.5 },
    ];
    let saddles = vec![
        TransitionStateRecord { from: 1, to: 2, energy: 1.15, point_group_order: 1, mean_frequency: 1.0 },
        TransitionStateRecord { from: 1, to: 3, energy: 1.30, point_group_order: 1, mean_frequency: 1.0 },
    ];
    Network::build(&minima, &saddles, 12).expect("valid synthetic network")
}

/// Random connected landscape network with `n` states, a random spanning
/// tree plus `extra_edges` chords, energies in [0, 1), saddles above the
/// higher endpoint by (0, 1), and mild random prefactors. Deterministic in
/// the seed.
pub fn random_landscape(seed: u64, n: usize, extra_edges: usize) -> Network {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut minima = Vec::with_capacity(n);
    for i in 0..n {
        minima.push(MinimumRecord {
            id: i as u64 + 1,
            energy: rng.gen::<f64>(),
            point_group_order: rng.gen_range(1..=3),
            mean_frequency: 0.8 + 0.45 * rng.gen::<f64>(),
        });
    }
    let mut pairs = std::collections::HashSet::new();
    let mut saddles = Vec::new();
    let push = |a: usize, b: usize, rng: &mut ChaCha8Rng, saddles: &mut Vec<TransitionStateRecord>, minima: &[MinimumRecord]| {
        let floor = minima[a].energy.max(minima[b].energy);
        saddles.push(TransitionStateRecord {
            from: a as u64 + 1,
            to: b as u64 + 1,
            energy: floor + rng.gen::<f64>().max(1e-9),
            point_group_order: rng.gen_range(1..=2),
            mean_frequency: 0.8 + 0.45 * rng.gen::<f64>(),
        });
    };
    for i in 1..n {
        let j = rng.gen_range(0..i);
        pairs.insert((j.min(i), j.max(i)));
        push(i, j, &mut rng, &mut saddles, &minima);
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 20 * extra_edges + 100 {
        attempts += 1;
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if pairs.insert(key) {
            push(a, b, &mut rng, &mut saddles, &minima);
            added += 1;
        }
    }
    Network::build(&minima, &saddles, 3).expect("valid synthetic network")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_chain_shape() {
        let net = three_chain();
        assert_eq!(net.num_states(), 3);
        assert_eq!(net.num_edges(), 2);
        assert_eq!(net.global_minimum(), 0);
    }

    #[test]
    fn double_funnel_shape() {
        let net = double_funnel(10, 0.07, 1.2, 0.03, 0.08);
        assert_eq!(net.num_states(), 20);
        assert_eq!(net.num_edges(), 19);
        assert!(net.is_connected());
        assert_eq!(net.global_minimum(), 0);
    }

    #[test]
    fn random_landscape_is_connected_and_deterministic() {
        let a = random_landscape(7, 40, 30);
        let b = random_landscape(7, 40, 30);
        assert!(a.is_connected());
        assert_eq!(a.num_edges(), b.num_edges());
        for e in 0..a.num_edges() {
            assert_eq!(a.edge(e).energy.to_bits(), b.edge(e).energy.to_bits());
        }
        // saddles sit above both endpoints
        for e in a.edges() {
            assert!(e.energy > a.energy(e.a).max(a.energy(e.b)));
        }
    }
}
