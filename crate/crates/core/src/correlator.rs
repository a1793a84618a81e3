//! Multi-mode particle-number correlators `<a†_{i1}…a†_{im} a_{i1}…a_{im}>`
//! of the evolved product state.
//!
//! The correlator is an incoherent sum over source multisets `q` (which
//! input modes the `m` detected particles came from) of
//! `prod_l r_l!/(r_l - mu_l)! * |A(q)|^2`, where the coherent amplitude
//! `A(q)` sums `prod_j W[sigma_j][i_j]` over the distinct orderings `sigma`
//! of `q`, signed by parity for fermions. For bosons `A(q)` is a permanent
//! divided by `prod_l mu_l!`; for fermions it is a determinant.

use num_complex::Complex64;

use crate::combinatorics::{enumerate_sources, factorial, multiplicity_prefactor, OccupationVector, SourceMultiset, Species};
use crate::error::{Result, WalkError};
use crate::exec::Execution;
use crate::kernels::{determinant, ryser_permanent_grouped};
use crate::lattice::UnitaryMatrix;

/// Source multisets handed to the executor per batch.
const SOURCE_CHUNK: usize = 512;

/// Output modes `i_1 <= … <= i_m` (1-based, repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeTuple {
    modes: Vec<usize>,
}

impl ModeTuple {
    /// Validates against a lattice of `dim` modes and sorts.
    pub fn new(mut modes: Vec<usize>, dim: usize) -> Result<Self> {
        if let Some(&mode) = modes.iter().find(|&&i| i == 0 || i > dim) {
            return Err(WalkError::ModeOutOfRange { mode, modes: dim });
        }
        modes.sort_unstable();
        Ok(Self { modes })
    }

    /// Mode `i` repeated `m` times.
    pub fn repeated(i: usize, m: usize, dim: usize) -> Result<Self> {
        Self::new(vec![i; m], dim)
    }

    /// Mode `i` repeated `mi` times followed by mode `j` repeated `mj` times.
    pub fn pair(i: usize, mi: usize, j: usize, mj: usize, dim: usize) -> Result<Self> {
        let mut v = vec![i; mi];
        v.extend(std::iter::repeat_n(j, mj));
        Self::new(v, dim)
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

    pub fn has_repeats(&self) -> bool {
        self.modes.windows(2).any(|w| w[0] == w[1])
    }
}

/// Value of a correlator together with the number of incoherent terms summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorResult {
    pub value: f64,
    pub term_count: usize,
}

fn check_dims(w: &UnitaryMatrix, r: &OccupationVector) -> Result<()> {
    if w.dim() != r.modes() {
        return Err(WalkError::DimensionMismatch { expected: w.dim(), found: r.modes() });
    }
    Ok(())
}

fn check_mode(i: usize, dim: usize) -> Result<()> {
    if i == 0 || i > dim {
        return Err(WalkError::ModeOutOfRange { mode: i, modes: dim });
    }
    Ok(())
}

/// `(value, run length)` of a sorted slice.
fn run_lengths(sorted: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((x, c)) if *x == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// `<n_i> = sum_k |W_ki|^2 r_k`, the same for every species.
pub fn mean_occupation(w: &UnitaryMatrix, r: &OccupationVector, i: usize) -> Result<f64> {
    check_dims(w, r)?;
    check_mode(i, w.dim())?;
    Ok(r.occupied()
        .map(|(k, rk)| w.amplitude(k, i).norm_sqr() * rk as f64)
        .sum())
}

/// Two distinct output modes: exchange term `|W_ki W_lj ± W_kj W_li|^2` over
/// pairs of distinct sources plus the same-source term `|W_ki W_kj|^2 r_k(r_k-1)`.
pub fn two_mode_correlator(w: &UnitaryMatrix, r: &OccupationVector, i: usize, j: usize) -> Result<f64> {
    check_dims(w, r)?;
    check_mode(i, w.dim())?;
    check_mode(j, w.dim())?;
    if i == j {
        return Err(WalkError::RepeatedMode(i));
    }
    let sign = match r.species() {
        Species::Boson => 1.0,
        Species::Fermion => -1.0,
        s => return Err(WalkError::UnsupportedSpecies(s)),
    };
    let occupied: Vec<(usize, u32)> = r.occupied().collect();
    let mut total = 0.0;
    for (a, &(k, rk)) in occupied.iter().enumerate() {
        for &(l, rl) in &occupied[a + 1..] {
            let amp = w.amplitude(k, i) * w.amplitude(l, j) + sign * w.amplitude(k, j) * w.amplitude(l, i);
            total += amp.norm_sqr() * (rk * rl) as f64;
        }
        let same = (w.amplitude(k, i) * w.amplitude(k, j)).norm_sqr();
        total += same * (rk as f64) * (rk as f64 - 1.0);
    }
    Ok(total)
}

/// Coherent amplitude of source multiset `q` into output modes `outs`:
/// `perm(M) / prod mu_l!` for bosons, `det(M)` for fermions, where
/// `M[a][b] = W[q_a][outs_b]`.
pub fn coherent_sum_kernel(w: &UnitaryMatrix, q: &SourceMultiset, outs: &ModeTuple, species: Species) -> Result<Complex64> {
    if q.len() != outs.len() {
        return Err(WalkError::OrderOutOfRange { m: outs.len(), particles: q.len() });
    }
    if let Some(&mode) = q.modes().iter().find(|&&src| src == 0 || src > w.dim()) {
        return Err(WalkError::ModeOutOfRange { mode, modes: w.dim() });
    }
    Kernel::new(outs, species).map(|k| k.amplitude(w, q))
}

/// Output-side data shared by every source multiset of one correlator.
struct Kernel<'a> {
    outs: &'a ModeTuple,
    species: Species,
    groups: Vec<usize>,
    mult: Vec<usize>,
}

impl<'a> Kernel<'a> {
    fn new(outs: &'a ModeTuple, species: Species) -> Result<Self> {
        if species == Species::Distinguishable {
            return Err(WalkError::UnsupportedSpecies(species));
        }
        let (groups, mult) = run_lengths(outs.modes()).into_iter().unzip();
        Ok(Self { outs, species, groups, mult })
    }

    fn amplitude(&self, w: &UnitaryMatrix, q: &SourceMultiset) -> Complex64 {
        let m = q.len();
        match self.species {
            Species::Boson => {
                // repeated output modes are grouped columns of the permanent
                let mut cols = Vec::with_capacity(m * self.groups.len());
                for &src in q.modes() {
                    cols.extend(self.groups.iter().map(|&dst| w.amplitude(src, dst)));
                }
                let overcount: u64 = run_lengths(q.modes()).iter().map(|&(_, mu)| factorial(mu)).product();
                ryser_permanent_grouped(&cols, m, &self.mult) / overcount as f64
            }
            _ => {
                let mut matrix = Vec::with_capacity(m * m);
                for &src in q.modes() {
                    matrix.extend(self.outs.modes().iter().map(|&dst| w.amplitude(src, dst)));
                }
                determinant(&matrix, m)
            }
        }
    }
}

/// General `m`-mode correlator, evaluated with the default [`Execution`].
pub fn general_correlator(w: &UnitaryMatrix, r: &OccupationVector, outs: &ModeTuple) -> Result<CorrelatorResult> {
    general_correlator_with(w, r, outs, Execution::default())
}

/// General `m`-mode correlator.
///
/// An empty `outs` gives the state norm, 1. Fermionic correlators with a
/// repeated output mode are exactly zero.
pub fn general_correlator_with(
    w: &UnitaryMatrix,
    r: &OccupationVector,
    outs: &ModeTuple,
    exec: Execution,
) -> Result<CorrelatorResult> {
    check_dims(w, r)?;
    if let Some(&mode) = outs.modes().iter().find(|&&i| i == 0 || i > w.dim()) {
        return Err(WalkError::ModeOutOfRange { mode, modes: w.dim() });
    }
    let species = r.species();
    if species == Species::Distinguishable {
        return Err(WalkError::UnsupportedSpecies(species));
    }
    let m = outs.len();
    if m == 0 {
        return Ok(CorrelatorResult { value: 1.0, term_count: 0 });
    }
    if m > r.total() {
        return Err(WalkError::OrderOutOfRange { m, particles: r.total() });
    }
    if species == Species::Fermion && outs.has_repeats() {
        return Ok(CorrelatorResult { value: 0.0, term_count: 0 });
    }

    let kernel = Kernel::new(outs, species)?;
    let term = |q: &SourceMultiset| -> Result<f64> {
        let pref = multiplicity_prefactor(r, q)? as f64;
        Ok(pref * kernel.amplitude(w, q).norm_sqr())
    };

    let mut sources = enumerate_sources(r, m)?;
    let mut value = 0.0;
    let mut term_count = 0;
    let mut chunk: Vec<SourceMultiset> = Vec::with_capacity(SOURCE_CHUNK);
    loop {
        chunk.clear();
        chunk.extend(sources.by_ref().take(SOURCE_CHUNK));
        if chunk.is_empty() {
            break;
        }
        let terms = if chunk.len() > 1 { exec.try_map(&chunk, term)? } else { vec![term(&chunk[0])?] };
        term_count += terms.len();
        value += terms.iter().sum::<f64>();
    }
    Ok(CorrelatorResult { value: value.max(0.0), term_count })
}
