//! Counting statistics from falling-factorial moments.
//!
//! Single mode: `Q_m = sum_k P(k) k!/(k-m)!`, inverted by
//! `P(k) = sum_{m>=k} (-1)^(m-k) Q_m / (k! (m-k)!)`. The two-mode relation
//! is the tensor product of two single-mode maps and inverts the same way
//! along each axis.

use crate::combinatorics::{factorial, falling_factorial, OccupationVector, Species};
use crate::correlator::{general_correlator_with, ModeTuple};
use crate::distinguishable::{joint_counting_distribution, ParticleRoster};
use crate::error::{Result, WalkError};
use crate::exec::Execution;
use crate::lattice::UnitaryMatrix;

/// Largest tolerated `|sum P - 1|` after inversion.
pub const NORMALIZATION_GATE: f64 = 1e-6;

/// Largest tolerated `|Q_0 - 1|` in a moment table.
const NORM_MOMENT_TOL: f64 = 1e-9;

/// Per-entry rounding budget, in units of the magnitude of the summed terms.
const ROUNDOFF_FACTOR: f64 = 64.0 * f64::EPSILON;

/// Falling-factorial moments of one mode (`Q_m`, `m = 0..=N`) or of a
/// mode pair (`Q_{mi,mj}` on the `(N+1) x (N+1)` grid, row-major in `mi`).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    arity: usize,
    particles: usize,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn single(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(WalkError::MalformedMoments("empty moment list".into()));
        }
        let particles = values.len() - 1;
        Self::checked(1, particles, values)
    }

    pub fn joint(particles: usize, values: Vec<f64>) -> Result<Self> {
        let side = particles + 1;
        if values.len() != side * side {
            return Err(WalkError::MalformedMoments(format!(
                "expected {} grid values for N = {particles}, got {}",
                side * side,
                values.len()
            )));
        }
        Self::checked(2, particles, values)
    }

    fn checked(arity: usize, particles: usize, values: Vec<f64>) -> Result<Self> {
        if (values[0] - 1.0).abs() > NORM_MOMENT_TOL {
            return Err(WalkError::MalformedMoments(format!("zeroth moment is {}, not 1", values[0])));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(WalkError::MalformedMoments(format!("non-finite moment {v}")));
        }
        Ok(Self { arity, particles, values })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Q_m` of a single-mode table.
    pub fn get(&self, m: usize) -> f64 {
        debug_assert_eq!(self.arity, 1);
        self.values[m]
    }

    /// `Q_{mi,mj}` of a two-mode table.
    pub fn get2(&self, mi: usize, mj: usize) -> f64 {
        debug_assert_eq!(self.arity, 2);
        self.values[mi * (self.particles + 1) + mj]
    }
}

/// Probabilities `P(k)` (arity 1) or `P(k_i, k_j)` (arity 2, row-major in `k_i`)
/// for counts `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingDistribution {
    arity: usize,
    max_count: usize,
    probabilities: Vec<f64>,
    roundoff: Vec<f64>,
    normalization_defect: f64,
}

impl CountingDistribution {
    /// Wraps probabilities that carry no cancellation error.
    pub(crate) fn exact(arity: usize, max_count: usize, probabilities: Vec<f64>) -> Self {
        let roundoff = probabilities.iter().map(|p| ROUNDOFF_FACTOR * p.abs()).collect();
        let normalization_defect = (probabilities.iter().sum::<f64>() - 1.0).abs();
        Self { arity, max_count, probabilities, roundoff, normalization_defect }
    }

    /// Builds a distribution from directly computed (non-negative) probabilities.
    pub fn from_probabilities(arity: usize, max_count: usize, probabilities: Vec<f64>) -> Result<Self> {
        let side = max_count + 1;
        let expected = if arity == 1 { side } else { side * side };
        if !(1..=2).contains(&arity) || probabilities.len() != expected {
            return Err(WalkError::MalformedMoments(format!(
                "arity {arity} distribution over 0..={max_count} needs {expected} entries, got {}",
                probabilities.len()
            )));
        }
        let d = Self::exact(arity, max_count, probabilities);
        d.gate()?;
        Ok(d)
    }

    fn from_inversion(arity: usize, max_count: usize, raw: Vec<f64>, magnitude: Vec<f64>) -> Result<Self> {
        let normalization_defect = (raw.iter().sum::<f64>() - 1.0).abs();
        let d = Self {
            arity,
            max_count,
            probabilities: raw.into_iter().map(|p| p.max(0.0)).collect(),
            roundoff: magnitude.into_iter().map(|m| ROUNDOFF_FACTOR * m).collect(),
            normalization_defect,
        };
        d.gate()?;
        Ok(d)
    }

    fn gate(&self) -> Result<()> {
        if self.normalization_defect.is_nan() || self.normalization_defect > NORMALIZATION_GATE {
            return Err(WalkError::NormalizationDefect { defect: self.normalization_defect, gate: NORMALIZATION_GATE });
        }
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Largest count represented (the particle number `N`).
    pub fn max_count(&self) -> usize {
        self.max_count
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `|sum P - 1|` before negative entries were clamped.
    pub fn normalization_defect(&self) -> f64 {
        self.normalization_defect
    }

    /// `P(k)` of a single-mode distribution.
    pub fn single(&self, k: usize) -> f64 {
        debug_assert_eq!(self.arity, 1);
        self.probabilities[k]
    }

    /// `P(k_i, k_j)` of a two-mode distribution.
    pub fn joint(&self, ki: usize, kj: usize) -> f64 {
        debug_assert_eq!(self.arity, 2);
        self.probabilities[ki * (self.max_count + 1) + kj]
    }

    fn joint_roundoff(&self, ki: usize, kj: usize) -> f64 {
        self.roundoff[ki * (self.max_count + 1) + kj]
    }

    /// Marginal of a two-mode distribution on its first (`axis = 0`) or second mode.
    pub fn marginal(&self, axis: usize) -> Result<CountingDistribution> {
        if self.arity != 2 {
            return Err(WalkError::WrongArity { expected: 2, found: self.arity });
        }
        let side = self.max_count + 1;
        let mut probs = vec![0.0; side];
        for a in 0..side {
            for b in 0..side {
                let k = if axis == 0 { a } else { b };
                probs[k] += self.joint(a, b);
            }
        }
        Ok(Self::exact(1, self.max_count, probs))
    }

    /// Mean count of a single-mode distribution.
    pub fn mean(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

/// `Q_m` for `m = 0..=N` in output mode `i`.
pub fn single_mode_moments(w: &UnitaryMatrix, r: &OccupationVector, i: usize) -> Result<MomentTable> {
    single_mode_moments_with(w, r, i, Execution::default())
}

pub fn single_mode_moments_with(w: &UnitaryMatrix, r: &OccupationVector, i: usize, exec: Execution) -> Result<MomentTable> {
    if r.species() == Species::Distinguishable {
        let d = joint_counting_distribution(&ParticleRoster::from(r), w, &[i])?;
        return Ok(forward_single(&d));
    }
    let dim = w.dim();
    let orders: Vec<usize> = (1..=r.total()).collect();
    let tail = exec.try_map(&orders, |&m| {
        let outs = ModeTuple::repeated(i, m, dim)?;
        general_correlator_with(w, r, &outs, exec).map(|c| c.value)
    })?;
    let mut values = Vec::with_capacity(r.total() + 1);
    values.push(1.0);
    values.extend(tail);
    MomentTable::single(values)
}

/// Inverts single-mode moments into `P(k)`.
pub fn invert_single(moments: &MomentTable) -> Result<CountingDistribution> {
    if moments.arity() != 1 {
        return Err(WalkError::WrongArity { expected: 1, found: moments.arity() });
    }
    let n = moments.particles();
    let mut raw = vec![0.0; n + 1];
    let mut magnitude = vec![0.0; n + 1];
    for k in 0..=n {
        for m in k..=n {
            let term = moments.get(m) * inversion_weight(k, m);
            raw[k] += term;
            magnitude[k] += term.abs();
        }
    }
    CountingDistribution::from_inversion(1, n, raw, magnitude)
}

/// `(-1)^(m-k) / (k! (m-k)!)`.
fn inversion_weight(k: usize, m: usize) -> f64 {
    let w = 1.0 / (factorial(k) as f64 * factorial(m - k) as f64);
    if (m - k) % 2 == 1 {
        -w
    } else {
        w
    }
}

/// `Q_{mi,mj}` for output modes `i != j`; entries with `mi + mj > N` are zero.
pub fn two_mode_moments(w: &UnitaryMatrix, r: &OccupationVector, i: usize, j: usize) -> Result<MomentTable> {
    two_mode_moments_with(w, r, i, j, Execution::default())
}

pub fn two_mode_moments_with(
    w: &UnitaryMatrix,
    r: &OccupationVector,
    i: usize,
    j: usize,
    exec: Execution,
) -> Result<MomentTable> {
    if i == j {
        return Err(WalkError::RepeatedMode(i));
    }
    if r.species() == Species::Distinguishable {
        let d = joint_counting_distribution(&ParticleRoster::from(r), w, &[i, j])?;
        return Ok(forward_two(&d));
    }
    let n = r.total();
    let side = n + 1;
    let dim = w.dim();
    let cells: Vec<(usize, usize)> = (0..side)
        .flat_map(|mi| (0..side - mi).map(move |mj| (mi, mj)))
        .filter(|&c| c != (0, 0))
        .collect();
    let computed = exec.try_map(&cells, |&(mi, mj)| {
        let outs = ModeTuple::pair(i, mi, j, mj, dim)?;
        general_correlator_with(w, r, &outs, exec).map(|c| c.value)
    })?;
    let mut values = vec![0.0; side * side];
    values[0] = 1.0;
    for (&(mi, mj), v) in cells.iter().zip(computed) {
        values[mi * side + mj] = v;
    }
    MomentTable::joint(n, values)
}

/// Inverts a two-mode moment grid into `P(k_i, k_j)`.
pub fn invert_two(moments: &MomentTable) -> Result<CountingDistribution> {
    if moments.arity() != 2 {
        return Err(WalkError::WrongArity { expected: 2, found: moments.arity() });
    }
    let n = moments.particles();
    let side = n + 1;
    let mut raw = vec![0.0; side * side];
    let mut magnitude = vec![0.0; side * side];
    for ki in 0..side {
        for kj in 0..side {
            let (mut acc, mut mag) = (0.0, 0.0);
            for mi in ki..side {
                let wi = inversion_weight(ki, mi);
                for mj in kj..side {
                    let q = moments.get2(mi, mj);
                    if q == 0.0 {
                        continue;
                    }
                    let term = q * wi * inversion_weight(kj, mj);
                    acc += term;
                    mag += term.abs();
                }
            }
            raw[ki * side + kj] = acc;
            magnitude[ki * side + kj] = mag;
        }
    }
    CountingDistribution::from_inversion(2, n, raw, magnitude)
}

/// `Q_m = sum_k P(k) k!/(k-m)!`.
pub fn forward_single(p: &CountingDistribution) -> MomentTable {
    let n = p.max_count();
    let values = (0..=n)
        .map(|m| (m..=n).map(|k| p.single(k) * falling_factorial(k, m) as f64).sum())
        .collect();
    MomentTable { arity: 1, particles: n, values }
}

/// `Q_{mi,mj} = sum P(ki,kj) ki!/(ki-mi)! kj!/(kj-mj)!`.
pub fn forward_two(p: &CountingDistribution) -> MomentTable {
    let n = p.max_count();
    let side = n + 1;
    let mut values = vec![0.0; side * side];
    for mi in 0..side {
        for mj in 0..side {
            let mut acc = 0.0;
            for ki in mi..side {
                for kj in mj..side {
                    acc += p.joint(ki, kj) * (falling_factorial(ki, mi) * falling_factorial(kj, mj)) as f64;
                }
            }
            values[mi * side + mj] = acc;
        }
    }
    MomentTable { arity: 2, particles: n, values }
}

/// Counting statistics of mode `i`: moment inversion for bosons and
/// fermions, convolution for distinguishable particles.
pub fn single_mode_distribution(w: &UnitaryMatrix, r: &OccupationVector, i: usize) -> Result<CountingDistribution> {
    single_mode_distribution_with(w, r, i, Execution::default())
}

pub fn single_mode_distribution_with(
    w: &UnitaryMatrix,
    r: &OccupationVector,
    i: usize,
    exec: Execution,
) -> Result<CountingDistribution> {
    match r.species() {
        Species::Distinguishable => joint_counting_distribution(&ParticleRoster::from(r), w, &[i]),
        _ => invert_single(&single_mode_moments_with(w, r, i, exec)?),
    }
}

/// Joint counting statistics of modes `i != j`.
pub fn two_mode_distribution(w: &UnitaryMatrix, r: &OccupationVector, i: usize, j: usize) -> Result<CountingDistribution> {
    two_mode_distribution_with(w, r, i, j, Execution::default())
}

pub fn two_mode_distribution_with(
    w: &UnitaryMatrix,
    r: &OccupationVector,
    i: usize,
    j: usize,
    exec: Execution,
) -> Result<CountingDistribution> {
    match r.species() {
        Species::Distinguishable => joint_counting_distribution(&ParticleRoster::from(r), w, &[i, j]),
        _ => invert_two(&two_mode_moments_with(w, r, i, j, exec)?),
    }
}

/// Distribution of the imbalance `Δk = k_i - k_j` given `k_i + k_j = m`.
///
/// Entry `t` of [`probabilities`](Self::probabilities) belongs to
/// `k_i = t`, i.e. `Δk = 2t - m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceDistribution {
    m: usize,
    probabilities: Vec<f64>,
}

impl ImbalanceDistribution {
    pub fn new(m: usize, probabilities: Vec<f64>) -> Self {
        assert_eq!(probabilities.len(), m + 1, "imbalance support is k_i = 0..=m");
        Self { m, probabilities }
    }

    pub fn condition(&self) -> usize {
        self.m
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// `(Δk, P)` pairs in ascending `Δk`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let m = self.m as i64;
        self.probabilities.iter().enumerate().map(move |(t, &p)| (2 * t as i64 - m, p))
    }

    /// Probability of imbalance `dk`; zero off the support.
    pub fn get(&self, dk: i64) -> f64 {
        let m = self.m as i64;
        if dk.abs() > m || (dk + m) % 2 != 0 {
            return 0.0;
        }
        self.probabilities[((dk + m) / 2) as usize]
    }

    /// Same distribution under `Δk -> -Δk`.
    pub fn mirrored(&self) -> Self {
        let mut p = self.probabilities.clone();
        p.reverse();
        Self { m: self.m, probabilities: p }
    }

    /// Half the L1 distance, over the union of both supports.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let reach = self.m.max(other.m) as i64;
        0.5 * (-reach..=reach).map(|dk| (self.get(dk) - other.get(dk)).abs()).sum::<f64>()
    }

    pub fn local_maxima(&self) -> usize {
        local_maxima(&self.probabilities)
    }
}

/// Number of entries strictly larger than each of their neighbours.
pub fn local_maxima(values: &[f64]) -> usize {
    (0..values.len())
        .filter(|&t| {
            let left = t == 0 || values[t] > values[t - 1];
            let right = t + 1 == values.len() || values[t] > values[t + 1];
            left && right && values.len() > 1
        })
        .count()
}

/// Renormalised slice `k_i + k_j = m` of a joint distribution.
///
/// The condition counts as impossible when its probability is not above
/// the rounding noise of the entries on the slice.
pub fn conditional_imbalance(p: &CountingDistribution, m: usize) -> Result<ImbalanceDistribution> {
    if p.arity() != 2 {
        return Err(WalkError::WrongArity { expected: 2, found: p.arity() });
    }
    if m > p.max_count() {
        return Err(WalkError::OrderOutOfRange { m, particles: p.max_count() });
    }
    let slice: Vec<f64> = (0..=m).map(|ki| p.joint(ki, m - ki)).collect();
    let noise: f64 = (0..=m).map(|ki| p.joint_roundoff(ki, m - ki)).sum();
    let mass: f64 = slice.iter().sum();
    if mass.is_nan() || mass <= noise || mass <= 0.0 {
        return Err(WalkError::ZeroProbabilityCondition { m });
    }
    Ok(ImbalanceDistribution::new(m, slice.into_iter().map(|v| v / mass).collect()))
}

/// Unweighted mean of the conditional imbalance distributions over mode pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAverage {
    pub distribution: ImbalanceDistribution,
    /// Pairs whose conditioning event was possible.
    pub pairs_used: usize,
    pub pairs_total: usize,
}

/// Averages [`conditional_imbalance`] over all unordered pairs `i < j`,
/// skipping pairs whose condition has zero probability.
pub fn pair_averaged_statistics(w: &UnitaryMatrix, r: &OccupationVector, m: usize) -> Result<PairAverage> {
    pair_averaged_statistics_with(w, r, m, Execution::default())
}

pub fn pair_averaged_statistics_with(
    w: &UnitaryMatrix,
    r: &OccupationVector,
    m: usize,
    exec: Execution,
) -> Result<PairAverage> {
    if m > r.total() {
        return Err(WalkError::OrderOutOfRange { m, particles: r.total() });
    }
    average_conditionals(w.dim(), m, exec, |i, j| {
        two_mode_distribution_with(w, r, i, j, Execution::Sequential)
    })
}

/// Pair average over any source of joint distributions.
pub fn average_conditionals<F>(modes: usize, m: usize, exec: Execution, joint: F) -> Result<PairAverage>
where
    F: Fn(usize, usize) -> Result<CountingDistribution> + Sync + Send,
{
    let pairs: Vec<(usize, usize)> = (1..=modes)
        .flat_map(|i| (i + 1..=modes).map(move |j| (i, j)))
        .collect();
    let results = exec.map(&pairs, |&(i, j)| joint(i, j).and_then(|p| conditional_imbalance(&p, m)));
    let mut sum = vec![0.0; m + 1];
    let mut used = 0;
    for res in results {
        match res {
            Ok(d) => {
                used += 1;
                for (s, p) in sum.iter_mut().zip(d.probabilities()) {
                    *s += p;
                }
            }
            Err(WalkError::ZeroProbabilityCondition { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(WalkError::NoContributingPairs { m });
    }
    let distribution = ImbalanceDistribution::new(m, sum.into_iter().map(|s| s / used as f64).collect());
    Ok(PairAverage { distribution, pairs_used: used, pairs_total: pairs.len() })
}
