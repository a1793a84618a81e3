//! Exact counting statistics for distinguishable particles.
//!
//! Without many-particle interference each particle walks independently;
//! the joint counts in up to two watched modes follow by convolving the
//! per-particle categorical distributions `{p(i_1), p(i_2), 1 - p(i_1) - p(i_2)}`.

use crate::combinatorics::OccupationVector;
use crate::error::{Result, WalkError};
use crate::lattice::UnitaryMatrix;
use crate::statistics::CountingDistribution;

/// One start mode (1-based) per labelled particle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleRoster {
    start_modes: Vec<usize>,
}

impl ParticleRoster {
    pub fn new(start_modes: Vec<usize>) -> Self {
        Self { start_modes }
    }

    pub fn start_modes(&self) -> &[usize] {
        &self.start_modes
    }

    pub fn len(&self) -> usize {
        self.start_modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start_modes.is_empty()
    }
}

impl From<&OccupationVector> for ParticleRoster {
    fn from(r: &OccupationVector) -> Self {
        let mut start_modes = Vec::with_capacity(r.total());
        for (mode, count) in r.occupied() {
            start_modes.extend(std::iter::repeat_n(mode, count as usize));
        }
        Self { start_modes }
    }
}

/// Output-mode distribution `|W_{s,i}|^2` of one particle entering mode `s`.
pub fn single_particle_distribution(w: &UnitaryMatrix, s: usize) -> Result<Vec<f64>> {
    if s == 0 || s > w.dim() {
        return Err(WalkError::ModeOutOfRange { mode: s, modes: w.dim() });
    }
    Ok(w.row(s - 1).iter().map(|z| z.norm_sqr()).collect())
}

/// Joint counts in one or two distinct watched modes (1-based).
pub fn joint_counting_distribution(
    roster: &ParticleRoster,
    w: &UnitaryMatrix,
    watched: &[usize],
) -> Result<CountingDistribution> {
    if watched.is_empty() || watched.len() > 2 {
        return Err(WalkError::TooManyWatchedModes { max: 2, found: watched.len() });
    }
    for &i in watched {
        if i == 0 || i > w.dim() {
            return Err(WalkError::ModeOutOfRange { mode: i, modes: w.dim() });
        }
    }
    if watched.len() == 2 && watched[0] == watched[1] {
        return Err(WalkError::RepeatedMode(watched[0]));
    }
    let n = roster.len();
    let side = n + 1;
    // table[a * side + b]: probability of a particles in watched[0], b in watched[1]
    let mut table = vec![0.0; side * side];
    table[0] = 1.0;
    for (seen, &s) in roster.start_modes().iter().enumerate() {
        if s == 0 || s > w.dim() {
            return Err(WalkError::ModeOutOfRange { mode: s, modes: w.dim() });
        }
        let p1 = w.amplitude(s, watched[0]).norm_sqr();
        let p2 = watched.get(1).map_or(0.0, |&j| w.amplitude(s, j).norm_sqr());
        let rest = (1.0 - p1 - p2).max(0.0);
        let mut next = vec![0.0; side * side];
        for a in 0..=seen {
            for b in 0..=seen - a {
                let v = table[a * side + b];
                if v == 0.0 {
                    continue;
                }
                next[a * side + b] += v * rest;
                next[(a + 1) * side + b] += v * p1;
                next[a * side + b + 1] += v * p2;
            }
        }
        table = next;
    }
    if watched.len() == 1 {
        let probs: Vec<f64> = (0..side).map(|a| table[a * side]).collect();
        Ok(CountingDistribution::exact(1, n, probs))
    } else {
        Ok(CountingDistribution::exact(2, n, table))
    }
}

/// Single-mode (Poisson-binomial) counting statistics.
pub fn single_mode_statistics(roster: &ParticleRoster, w: &UnitaryMatrix, i: usize) -> Result<CountingDistribution> {
    joint_counting_distribution(roster, w, &[i])
}
