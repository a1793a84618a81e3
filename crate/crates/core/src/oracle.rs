//! Brute-force Fock-space reference.
//!
//! Expands the evolved product state `prod_j (r_j!)^(-1/2) (sum_q W_jq a†_q)^(r_j) |0>`
//! over the full occupation basis and evaluates observables by direct
//! summation. Only feasible for a handful of particles and modes; the caps
//! below are enforced.
//!
//! Fermionic basis states are `a†_{p1} a†_{p2} … |0>` with `p1 < p2 < …`, so
//! creating a particle in mode `q` picks up `(-1)^(number of occupied modes below q)`.
//!
//! Distinguishable particles have no state on the symmetric or
//! antisymmetric Fock space; their expansion stores the square roots of the
//! occupation-pattern probabilities, which is all the observables use.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::combinatorics::{factorial, falling_factorial, OccupationVector, Species};
use crate::correlator::ModeTuple;
use crate::distinguishable::ParticleRoster;
use crate::error::{Result, WalkError};
use crate::lattice::UnitaryMatrix;
use crate::statistics::CountingDistribution;

pub const ORACLE_MAX_PARTICLES: usize = 6;
pub const ORACLE_MAX_MODES: usize = 8;

/// Final state written out in the occupation-number basis.
#[derive(Debug, Clone)]
pub struct FockExpansion {
    species: Species,
    particles: usize,
    basis: Vec<Vec<u8>>,
    amplitudes: Vec<Complex64>,
}

impl FockExpansion {
    pub fn species(&self) -> Species {
        self.species
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of each basis state, in basis order.
    pub fn probabilities(&self) -> impl Iterator<Item = (&[u8], f64)> + '_ {
        self.basis.iter().map(Vec::as_slice).zip(self.amplitudes.iter().map(|a| a.norm_sqr()))
    }
}

fn check_caps(w: &UnitaryMatrix, r: &OccupationVector) -> Result<()> {
    if w.dim() != r.modes() {
        return Err(WalkError::DimensionMismatch { expected: w.dim(), found: r.modes() });
    }
    if r.total() > ORACLE_MAX_PARTICLES {
        return Err(WalkError::OracleCap { what: "particles", value: r.total(), cap: ORACLE_MAX_PARTICLES });
    }
    if w.dim() > ORACLE_MAX_MODES {
        return Err(WalkError::OracleCap { what: "modes", value: w.dim(), cap: ORACLE_MAX_MODES });
    }
    Ok(())
}

/// Expands the final state of `r` evolved by `w`.
pub fn expand_final_state(w: &UnitaryMatrix, r: &OccupationVector) -> Result<FockExpansion> {
    check_caps(w, r)?;
    let modes = w.dim();
    let species = r.species();
    let state: BTreeMap<Vec<u8>, Complex64> = match species {
        Species::Distinguishable => distinguishable_patterns(w, r),
        Species::Boson | Species::Fermion => {
            let mut state = BTreeMap::new();
            state.insert(vec![0u8; modes], Complex64::new(1.0, 0.0));
            // the rightmost factor of the product acts on the vacuum first
            for (j, rj) in r.occupied().collect::<Vec<_>>().into_iter().rev() {
                for _ in 0..rj {
                    state = apply_creation(&state, w.row(j - 1), species);
                }
            }
            let norm = r.occupied().map(|(_, rj)| factorial(rj as usize) as f64).product::<f64>().sqrt();
            state.values_mut().for_each(|a| *a /= norm);
            state
        }
    };
    let (basis, amplitudes) = state.into_iter().filter(|(_, a)| a.norm_sqr() > 0.0).unzip();
    Ok(FockExpansion { species, particles: r.total(), basis, amplitudes })
}

/// Applies `sum_q coeffs[q] a†_q`.
fn apply_creation(state: &BTreeMap<Vec<u8>, Complex64>, coeffs: &[Complex64], species: Species) -> BTreeMap<Vec<u8>, Complex64> {
    let mut out: BTreeMap<Vec<u8>, Complex64> = BTreeMap::new();
    for (occ, &amp) in state {
        for (q, &c) in coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let factor = match species {
                Species::Boson => ((occ[q] + 1) as f64).sqrt(),
                Species::Fermion => {
                    if occ[q] > 0 {
                        continue;
                    }
                    let below: u32 = occ[..q].iter().map(|&n| n as u32).sum();
                    if below % 2 == 1 {
                        -1.0
                    } else {
                        1.0
                    }
                }
                Species::Distinguishable => unreachable!("handled separately"),
            };
            let mut next = occ.clone();
            next[q] += 1;
            *out.entry(next).or_insert(Complex64::new(0.0, 0.0)) += amp * c * factor;
        }
    }
    out
}

fn distinguishable_patterns(w: &UnitaryMatrix, r: &OccupationVector) -> BTreeMap<Vec<u8>, Complex64> {
    let mut probs: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    probs.insert(vec![0u8; w.dim()], 1.0);
    for &s in ParticleRoster::from(r).start_modes() {
        let mut next = BTreeMap::new();
        for (occ, p) in &probs {
            for (q, amp) in w.row(s - 1).iter().enumerate() {
                let mut o = occ.clone();
                o[q] += 1;
                *next.entry(o).or_insert(0.0) += p * amp.norm_sqr();
            }
        }
        probs = next;
    }
    probs.into_iter().map(|(k, p)| (k, Complex64::new(p.sqrt(), 0.0))).collect()
}

/// `<a†_{i1}…a†_{im} a_{i1}…a_{im}>` evaluated diagonally in the number basis.
pub fn oracle_correlator(exp: &FockExpansion, outs: &ModeTuple) -> f64 {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &i in outs.modes() {
        match counts.last_mut() {
            Some((mode, c)) if *mode == i => *c += 1,
            _ => counts.push((i, 1)),
        }
    }
    exp.probabilities()
        .map(|(occ, p)| {
            let weight: u64 = counts
                .iter()
                .map(|&(i, mu)| falling_factorial(occ[i - 1] as usize, mu))
                .product();
            p * weight as f64
        })
        .sum()
}

/// Marginal counting distribution of one or two watched modes (1-based).
pub fn oracle_counting(exp: &FockExpansion, modes: &[usize]) -> Result<CountingDistribution> {
    if modes.is_empty() || modes.len() > 2 {
        return Err(WalkError::TooManyWatchedModes { max: 2, found: modes.len() });
    }
    let dim = exp.basis.first().map_or(0, Vec::len);
    for &i in modes {
        if i == 0 || i > dim {
            return Err(WalkError::ModeOutOfRange { mode: i, modes: dim });
        }
    }
    if modes.len() == 2 && modes[0] == modes[1] {
        return Err(WalkError::RepeatedMode(modes[0]));
    }
    let n = exp.particles;
    let side = n + 1;
    let mut probs = vec![0.0; if modes.len() == 1 { side } else { side * side }];
    for (occ, p) in exp.probabilities() {
        let a = occ[modes[0] - 1] as usize;
        let idx = match modes.get(1) {
            Some(&j) => a * side + occ[j - 1] as usize,
            None => a,
        };
        probs[idx] += p;
    }
    CountingDistribution::from_probabilities(modes.len(), n, probs)
}
