mod common;

use proptest::prelude::*;
use qwalk_core::statistics::{forward_single, forward_two};
use qwalk_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Correlator built from the term-by-term coherent sum over output modes in
/// the given (unsorted) order.
fn naive_correlator(w: &UnitaryMatrix, r: &OccupationVector, outs: &[usize]) -> f64 {
    enumerate_sources(r, outs.len())
        .unwrap()
        .map(|q| {
            let pref = multiplicity_prefactor(r, &q).unwrap() as f64;
            pref * naive_coherent_sum(w, &q, outs, r.species()).norm_sqr()
        })
        .sum()
}

fn instance(seed: u64, max_half: usize, max_particles: usize, species: Species) -> (UnitaryMatrix, OccupationVector, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = 2 * rng.gen_range(1..=max_half);
    let cap = if species == Species::Fermion { modes.min(max_particles) } else { max_particles };
    let n = rng.gen_range(1..=cap);
    let w = random_unitary(&mut rng, modes);
    let r = random_occupation(&mut rng, modes, n, species);
    (w, r, rng)
}

fn species_strategy() -> impl Strategy<Value = Species> {
    prop_oneof![Just(Species::Boson), Just(Species::Fermion)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn correlator_matches_oracle_for_arbitrary_unitaries(seed in any::<u64>(), species in species_strategy()) {
        let (w, r, mut rng) = instance(seed, 3, 4, species);
        let modes = w.dim();
        let exp = expand_final_state(&w, &r).unwrap();
        for m in 1..=r.total() {
            let outs = ModeTuple::new((0..m).map(|_| rng.gen_range(1..=modes)).collect(), modes).unwrap();
            let engine = general_correlator(&w, &r, &outs).unwrap().value;
            let oracle = oracle_correlator(&exp, &outs);
            prop_assert!((engine - oracle).abs() < 1e-10, "outs {:?}: {} vs {}", outs.modes(), engine, oracle);
        }
    }

    #[test]
    fn correlator_ignores_output_order(seed in any::<u64>(), species in species_strategy()) {
        let (w, r, mut rng) = instance(seed, 3, 5, species);
        let modes = w.dim();
        let m = rng.gen_range(1..=r.total());
        let mut outs: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=modes)).collect();
        let sorted = general_correlator(&w, &r, &ModeTuple::new(outs.clone(), modes).unwrap()).unwrap().value;
        outs.shuffle(&mut rng);
        let shuffled = naive_correlator(&w, &r, &outs);
        prop_assert!((sorted - shuffled).abs() < 1e-12, "{} vs {}", sorted, shuffled);
        prop_assert!(sorted >= 0.0);
    }

    #[test]
    fn joint_marginals_match_single_mode(seed in any::<u64>(), species in species_strategy()) {
        let (w, r, mut rng) = instance(seed, 4, 5, species);
        let modes = w.dim();
        let i = rng.gen_range(1..=modes);
        let j = (i % modes) + 1;
        prop_assume!(i != j);
        let joint = two_mode_distribution(&w, &r, i, j).unwrap();
        let left = joint.marginal(0).unwrap();
        let right = joint.marginal(1).unwrap();
        let pi = single_mode_distribution(&w, &r, i).unwrap();
        let pj = single_mode_distribution(&w, &r, j).unwrap();
        for k in 0..=r.total() {
            prop_assert!((left.single(k) - pi.single(k)).abs() < 1e-9);
            prop_assert!((right.single(k) - pj.single(k)).abs() < 1e-9);
        }
    }

    #[test]
    fn inverted_distributions_reproduce_moments(seed in any::<u64>(), species in species_strategy()) {
        let (w, r, mut rng) = instance(seed, 3, 5, species);
        let modes = w.dim();
        let i = rng.gen_range(1..=modes);
        let q = single_mode_moments(&w, &r, i).unwrap();
        let back = forward_single(&invert_single(&q).unwrap());
        for (a, b) in q.values().iter().zip(back.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        if modes > 1 {
            let j = if i == modes { 1 } else { i + 1 };
            let grid = two_mode_moments(&w, &r, i, j).unwrap();
            let back = forward_two(&invert_two(&grid).unwrap());
            for (a, b) in grid.values().iter().zip(back.values()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn random_distributions_survive_round_trip(seed in any::<u64>(), len in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_distribution(&mut rng, len);
        let d = CountingDistribution::from_probabilities(1, len - 1, p.clone()).unwrap();
        let back = invert_single(&forward_single(&d)).unwrap();
        for (a, b) in p.iter().zip(back.probabilities()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn distinguishable_matches_labelled_enumeration(seed in any::<u64>()) {
        let (w, r, mut rng) = instance(seed, 3, 4, Species::Distinguishable);
        let modes = w.dim();
        let i = rng.gen_range(1..=modes);
        let j = if i == modes { 1 } else { i + 1 };
        let roster = ParticleRoster::from(&r);
        let n = roster.len();
        let side = n + 1;
        let mut brute = vec![0.0; side * side];
        for code in 0..modes.pow(n as u32) {
            let mut c = code;
            let (mut p, mut ki, mut kj) = (1.0, 0, 0);
            for &s in roster.start_modes() {
                let out = c % modes + 1;
                c /= modes;
                p *= w.amplitude(s, out).norm_sqr();
                ki += usize::from(out == i);
                kj += usize::from(out == j && j != i);
            }
            brute[ki * side + kj] += p;
        }
        let d = joint_counting_distribution(&roster, &w, &[i, j]).unwrap();
        for (a, b) in d.probabilities().iter().zip(&brute) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(d.normalization_defect() < 1e-14);
        let single = single_mode_statistics(&roster, &w, i).unwrap();
        prop_assert!((single.mean() - mean_occupation(&w, &r, i).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn source_enumeration_is_reproducible(occ in proptest::collection::vec(0u32..3, 1..7), m in 1usize..6) {
        let r = OccupationVector::new(occ, Species::Boson).unwrap();
        prop_assume!(m <= r.total());
        let a: Vec<_> = enumerate_sources(&r, m).unwrap().collect();
        let b: Vec<_> = enumerate_sources(&r, m).unwrap().collect();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.windows(2).all(|p| p[0] < p[1]));
        // sum over q of prefactor * S(q) counts ordered draws of m distinct particles
        let ordered: u64 = a.iter().map(|q| multiplicity_prefactor(&r, q).unwrap() * multiset_permutation_count(q)).sum();
        prop_assert_eq!(ordered, falling_factorial(r.total(), m));
    }
}

#[test]
fn single_particle_species_reduce_to_one_walk() {
    let w = evolution(LatticeConfig::new(3, 5).unwrap()).unwrap();
    let mut reference: Option<CountingDistribution> = None;
    for species in Species::ALL {
        let r = OccupationVector::new(vec![0, 0, 1, 0, 0, 0], species).unwrap();
        let d = two_mode_distribution(&w, &r, 2, 5).unwrap();
        let o = oracle_counting(&expand_final_state(&w, &r).unwrap(), &[2, 5]).unwrap();
        for (a, b) in d.probabilities().iter().zip(o.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
        if let Some(ref base) = reference {
            for (a, b) in d.probabilities().iter().zip(base.probabilities()) {
                assert!((a - b).abs() < 1e-12, "{species}");
            }
        } else {
            reference = Some(d);
        }
    }
}

#[test]
fn execution_modes_are_bit_identical() {
    let w = evolution(LatticeConfig::new(6, 9).unwrap()).unwrap();
    let r = OccupationVector::central_block(12, 4, Species::Boson).unwrap();
    let seq = pair_averaged_statistics_with(&w, &r, 4, Execution::Sequential).unwrap();
    let def = pair_averaged_statistics(&w, &r, 4).unwrap();
    assert_eq!(seq.pairs_used, def.pairs_used);
    for (a, b) in seq.distribution.probabilities().iter().zip(def.distribution.probabilities()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn identity_sum_rule() {
    let id = UnitaryMatrix::identity(4);
    let r = OccupationVector::new(vec![0, 0, 6, 0], Species::Boson).unwrap();
    for m in 1..=6 {
        let q = general_correlator(&id, &r, &ModeTuple::repeated(3, m, 4).unwrap()).unwrap();
        assert!((q.value - falling_factorial(6, m) as f64).abs() < 1e-9);
    }
}

#[test]
fn fermionic_single_mode_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let w = random_unitary(&mut rng, 6);
        let r = random_occupation(&mut rng, 6, 4, Species::Fermion);
        for i in 1..=6 {
            let p = single_mode_distribution(&w, &r, i).unwrap();
            assert!(p.probabilities()[2..].iter().all(|&x| x.abs() < 1e-12));
            let j = if i == 6 { 1 } else { i + 1 };
            let q = general_correlator(&w, &r, &ModeTuple::new(vec![i, j, i], 6).unwrap()).unwrap();
            assert_eq!(q.value, 0.0);
        }
    }
}
