//! Test-only reference implementations and random instance generators.
#![allow(dead_code)]

use num_complex::Complex64;
use qwalk_core::{OccupationVector, SourceMultiset, Species, UnitaryMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

/// Haar-ish random unitary: Gram-Schmidt on complex Gaussian columns.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> UnitaryMatrix {
    let gauss = |rng: &mut R| {
        // Box-Muller
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(gauss(rng), gauss(rng))).collect();
        for _ in 0..2 {
            for u in &cols {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    let rows: Vec<Vec<Complex64>> = (0..dim).map(|r| (0..dim).map(|c| cols[c][r]).collect()).collect();
    UnitaryMatrix::from_rows(&rows).expect("Gram-Schmidt output is unitary")
}

/// `particles` particles on `modes` modes: independent uniform placement for
/// bosons and distinguishable particles, a uniform subset for fermions.
pub fn random_occupation<R: Rng>(rng: &mut R, modes: usize, particles: usize, species: Species) -> OccupationVector {
    let mut occ = vec![0u32; modes];
    if species == Species::Fermion {
        let mut idx: Vec<usize> = (0..modes).collect();
        idx.shuffle(rng);
        for &j in &idx[..particles] {
            occ[j] = 1;
        }
    } else {
        for _ in 0..particles {
            occ[rng.gen_range(0..modes)] += 1;
        }
    }
    OccupationVector::new(occ, species).unwrap()
}

/// Next lexicographic permutation in place; false when `v` was the last one.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Sign of the permutation sorting `v` (entries assumed distinct).
fn parity_sign(v: &[usize]) -> f64 {
    let inversions = (0..v.len())
        .flat_map(|a| (a + 1..v.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| v[a] > v[b])
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Coherent sum written out term by term: every distinct ordering `sigma`
/// of `q`, weighted by 1 (bosons) or its sign (fermions).
pub fn naive_coherent_sum(w: &UnitaryMatrix, q: &SourceMultiset, outs: &[usize], species: Species) -> Complex64 {
    let mut sigma = q.modes().to_vec();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        let f = match species {
            Species::Fermion => parity_sign(&sigma),
            _ => 1.0,
        };
        let prod = sigma
            .iter()
            .zip(outs)
            .fold(Complex64::new(1.0, 0.0), |p, (&src, &dst)| p * w.amplitude(src, dst));
        total += prod * f;
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    total
}

/// Row-major square matrix of random complex entries in the unit box.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Permanent as the plain sum over all `n!` permutations.
pub fn naive_permanent(a: &[Complex64], n: usize) -> Complex64 {
    let mut sigma: Vec<usize> = (0..n).collect();
    let mut total = Complex64::new(0.0, 0.0);
    loop {
        total += (0..n).fold(Complex64::new(1.0, 0.0), |p, r| p * a[r * n + sigma[r]]);
        if !next_permutation(&mut sigma) {
            break;
        }
    }
    total
}

/// Random probability vector over `len` outcomes.
pub fn random_distribution<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..1.0)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}
