//! Occupation vectors, source multisets and the counting factors of the
//! general correlator.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, WalkError};

/// Largest particle number whose factorials fit exactly in a `u64`.
pub const MAX_PARTICLES: usize = 20;

const FACTORIALS: [u64; MAX_PARTICLES + 1] = {
    let mut t = [1u64; MAX_PARTICLES + 1];
    let mut k = 1;
    while k <= MAX_PARTICLES {
        t[k] = t[k - 1] * k as u64;
        k += 1;
    }
    t
};

/// Exact `k!` for `k <= 20`.
///
/// # Panics
/// If `k > MAX_PARTICLES`.
pub fn factorial(k: usize) -> u64 {
    FACTORIALS[k]
}

/// `k! / (k - m)!`, zero when `m > k`.
pub fn falling_factorial(k: usize, m: usize) -> u64 {
    if m > k {
        0
    } else {
        FACTORIALS[k] / FACTORIALS[k - m]
    }
}

/// Particle statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Boson,
    Fermion,
    Distinguishable,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::Boson, Species::Fermion, Species::Distinguishable];

    pub fn as_str(self) -> &'static str {
        match self {
            Species::Boson => "boson",
            Species::Fermion => "fermion",
            Species::Distinguishable => "distinguishable",
        }
    }

    /// Short label used in table headers.
    pub fn short(self) -> &'static str {
        match self {
            Species::Boson => "boson",
            Species::Fermion => "fermion",
            Species::Distinguishable => "dist",
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Species {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "boson" | "bosons" | "b" => Ok(Species::Boson),
            "fermion" | "fermions" | "f" => Ok(Species::Fermion),
            "distinguishable" | "dist" | "d" => Ok(Species::Distinguishable),
            other => Err(format!("unknown species `{other}`")),
        }
    }
}

/// Initial occupations `r_1..r_{2L}` of the input modes together with the
/// particle species.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationVector {
    occupations: Vec<u32>,
    species: Species,
    total: usize,
}

impl OccupationVector {
    pub fn new(occupations: Vec<u32>, species: Species) -> Result<Self> {
        if species == Species::Fermion {
            if let Some((j, &r)) = occupations.iter().enumerate().find(|(_, &r)| r > 1) {
                return Err(WalkError::PauliViolation { mode: j + 1, occupation: r });
            }
        }
        let total: usize = occupations.iter().map(|&r| r as usize).sum();
        if total > MAX_PARTICLES {
            return Err(WalkError::TooManyParticles { particles: total, max: MAX_PARTICLES });
        }
        Ok(Self { occupations, species, total })
    }

    /// `particles` singly occupied adjacent modes centred on a lattice of
    /// `modes` modes: `L - N/2 + 1 ..= L + N/2` for even `N` (1-based).
    /// Odd `N` puts the extra particle on the upper side.
    pub fn central_block(modes: usize, particles: usize, species: Species) -> Result<Self> {
        if particles > modes {
            return Err(WalkError::TooManyParticles { particles, max: modes });
        }
        let half = modes / 2;
        let first = half + 1 - particles / 2;
        Self::block(modes, first, particles, species)
    }

    /// `particles` singly occupied modes `first ..= first + particles - 1` (1-based).
    pub fn block(modes: usize, first: usize, particles: usize, species: Species) -> Result<Self> {
        let last = first + particles.max(1) - 1;
        if first == 0 || last > modes {
            return Err(WalkError::ModeOutOfRange { mode: if first == 0 { 0 } else { last }, modes });
        }
        let mut occ = vec![0u32; modes];
        for r in occ.iter_mut().skip(first - 1).take(particles) {
            *r = 1;
        }
        Self::new(occ, species)
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    /// Occupation of mode `mode` (1-based).
    pub fn get(&self, mode: usize) -> u32 {
        self.occupations[mode - 1]
    }

    pub fn species(&self) -> Species {
        self.species
    }

    /// Same occupations, different species (re-validated).
    pub fn with_species(&self, species: Species) -> Result<Self> {
        Self::new(self.occupations.clone(), species)
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    /// Total particle number `N`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// `(mode, occupation)` for each occupied mode, ascending (1-based).
    pub fn occupied(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.occupations
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .map(|(j, &r)| (j + 1, r))
    }
}

/// Non-decreasing tuple `q_1 <= … <= q_m` of source modes (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceMultiset {
    modes: Vec<usize>,
}

impl SourceMultiset {
    /// Sorts the given modes.
    pub fn new(mut modes: Vec<usize>) -> Self {
        modes.sort_unstable();
        Self { modes }
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `(mode, multiplicity)` pairs in ascending mode order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &q in &self.modes {
            match out.last_mut() {
                Some((mode, count)) if *mode == q => *count += 1,
                _ => out.push((q, 1)),
            }
        }
        out
    }
}

/// Streams every source multiset of size `m` compatible with `r`, in
/// lexicographic order.
pub fn enumerate_sources(r: &OccupationVector, m: usize) -> Result<SourceIter> {
    if m == 0 || m > r.total() {
        return Err(WalkError::OrderOutOfRange { m, particles: r.total() });
    }
    Ok(SourceIter::new(r, m))
}

/// Iterator behind [`enumerate_sources`].
///
/// Internally walks per-mode draw counts `c_l <= r_l` with `sum c_l = m` in
/// decreasing lexicographic order, which is increasing lexicographic order
/// of the expanded tuples.
#[derive(Debug, Clone)]
pub struct SourceIter {
    modes: Vec<usize>,
    capacity: Vec<u32>,
    counts: Vec<u32>,
    done: bool,
}

impl SourceIter {
    fn new(r: &OccupationVector, m: usize) -> Self {
        let (modes, capacity): (Vec<usize>, Vec<u32>) = r.occupied().unzip();
        let mut counts = vec![0; modes.len()];
        fill_greedy(&mut counts, &capacity, 0, m as u32);
        Self { modes, capacity, counts, done: false }
    }

    fn current(&self) -> SourceMultiset {
        let mut out = Vec::with_capacity(self.counts.iter().sum::<u32>() as usize);
        for (&mode, &c) in self.modes.iter().zip(&self.counts) {
            out.extend(std::iter::repeat_n(mode, c as usize));
        }
        SourceMultiset { modes: out }
    }

    fn advance(&mut self) {
        let k = self.counts.len();
        let mut suffix_count = 0u32;
        let mut suffix_cap = 0u32;
        for p in (0..k).rev() {
            if self.counts[p] > 0 && suffix_cap > suffix_count {
                self.counts[p] -= 1;
                let amount = suffix_count + 1;
                fill_greedy(&mut self.counts, &self.capacity, p + 1, amount);
                return;
            }
            suffix_count += self.counts[p];
            suffix_cap += self.capacity[p];
        }
        self.done = true;
    }
}

fn fill_greedy(counts: &mut [u32], capacity: &[u32], from: usize, mut amount: u32) {
    for (c, &cap) in counts[from..].iter_mut().zip(&capacity[from..]) {
        *c = cap.min(amount);
        amount -= *c;
    }
}

impl Iterator for SourceIter {
    type Item = SourceMultiset;

    fn next(&mut self) -> Option<SourceMultiset> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// `prod_l r_l! / (r_l - mu_l)!` for the draw counts `mu_l` of `q`.
pub fn multiplicity_prefactor(r: &OccupationVector, q: &SourceMultiset) -> Result<u64> {
    let mut out = 1u64;
    for (mode, mu) in q.multiplicities() {
        if mode == 0 || mode > r.modes() {
            return Err(WalkError::ModeOutOfRange { mode, modes: r.modes() });
        }
        let held = r.get(mode);
        if mu > held as usize {
            return Err(WalkError::OverdrawnSource { mode, drawn: mu, held });
        }
        out *= falling_factorial(held as usize, mu);
    }
    Ok(out)
}

/// Number of distinct orderings of `q`: `m! / prod_l mu_l!`.
pub fn multiset_permutation_count(q: &SourceMultiset) -> u64 {
    q.multiplicities()
        .iter()
        .fold(factorial(q.len()), |acc, &(_, mu)| acc / factorial(mu))
}
