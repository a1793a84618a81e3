//! Evaluates a scenario into a table.

use std::sync::atomic::{AtomicU64, Ordering};

use qwalk_core::statistics::NORMALIZATION_GATE;
use qwalk_core::{
    average_conditionals, conditional_imbalance, evolution, expand_final_state, mean_occupation, oracle_correlator,
    oracle_counting, single_mode_distribution, two_mode_distribution, CountingDistribution, Execution,
    ImbalanceDistribution, LatticeConfig, ModeTuple, OccupationVector, Species, UnitaryMatrix, WalkError,
};

use crate::config::{Engine, Observable, Order, Scenario};
use crate::error::ScenarioError;

/// One `(steps, occupations, observable)` combination.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub steps: usize,
    pub occupations: Vec<u32>,
    pub particles: usize,
    /// The request with `m = N` resolved.
    pub observable: Observable,
    /// Index columns of each row (`k`, `(k_i, k_j)`, `Δk` or mode).
    pub index: Vec<Vec<i64>>,
    /// One value column per species, in scenario order.
    pub values: Vec<Vec<f64>>,
    /// Normalization defect per species.
    pub defects: Vec<f64>,
    /// `(used, total)` mode pairs per species for pair averages.
    pub pairs: Vec<Option<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub index_columns: Vec<&'static str>,
    /// `P` for probabilities, `mean` for occupation profiles.
    pub value_prefix: &'static str,
    pub species: Vec<Species>,
    pub series: Vec<Series>,
}

impl Table {
    pub fn columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        if self.series.len() > 1 {
            cols.push("series".to_string());
        }
        cols.extend(self.index_columns.iter().map(|c| c.to_string()));
        cols.extend(self.species.iter().map(|s| format!("{}_{}", self.value_prefix, s.short())));
        cols.extend(self.species.iter().map(|s| format!("defect_{}", s.short())));
        cols
    }
}

struct Column {
    index: Vec<Vec<i64>>,
    values: Vec<f64>,
    defect: f64,
    pairs: Option<(usize, usize)>,
}

/// Runs every series of the scenario for every species.
pub fn evaluate(s: &Scenario) -> Result<Table, ScenarioError> {
    let first = s.observables[0];
    let index_columns = match first {
        Observable::MeanProfile => vec!["mode"],
        Observable::SingleMode(_) => vec!["k"],
        Observable::TwoMode(..) => vec!["k_i", "k_j"],
        Observable::Conditional { .. } | Observable::PairAveraged { .. } => vec!["dk"],
    };
    let value_prefix = if first == Observable::MeanProfile { "mean" } else { "P" };
    let mut series = Vec::new();
    for &steps in &s.steps {
        let w = evolution(LatticeConfig::new(s.half_modes, steps)?)?;
        for occ in &s.occupations {
            let occupations = occ.resolve(s.modes());
            for obs in &s.observables {
                let mut out: Option<Series> = None;
                for &species in &s.species {
                    let r = OccupationVector::new(occupations.clone(), species)?;
                    let observable = resolve_order(*obs, r.total());
                    let col = match s.engine {
                        Engine::Main => main_column(&w, &r, observable)?,
                        Engine::Oracle => oracle_column(&w, &r, observable)?,
                    };
                    if col.defect.is_nan() || col.defect > NORMALIZATION_GATE {
                        return Err(ScenarioError::Numerical(format!(
                            "normalization defect {:.3e} exceeds {NORMALIZATION_GATE:e} for {species} at steps={steps}, observable {observable}",
                            col.defect
                        )));
                    }
                    let entry = out.get_or_insert_with(|| Series {
                        steps,
                        occupations: occupations.clone(),
                        particles: r.total(),
                        observable,
                        index: col.index.clone(),
                        values: Vec::new(),
                        defects: Vec::new(),
                        pairs: Vec::new(),
                    });
                    entry.values.push(col.values);
                    entry.defects.push(col.defect);
                    entry.pairs.push(col.pairs);
                }
                series.extend(out);
            }
        }
    }
    Ok(Table { index_columns, value_prefix, species: s.species.clone(), series })
}

fn resolve_order(obs: Observable, particles: usize) -> Observable {
    let fixed = |m: Order| Order::Fixed(m.resolve(particles));
    match obs {
        Observable::Conditional { m, i, j } => Observable::Conditional { m: fixed(m), i, j },
        Observable::PairAveraged { m } => Observable::PairAveraged { m: fixed(m) },
        other => other,
    }
}

fn order(m: Order) -> usize {
    match m {
        Order::Fixed(m) => m,
        Order::AllParticles => unreachable!("resolved before evaluation"),
    }
}

fn main_column(w: &UnitaryMatrix, r: &OccupationVector, obs: Observable) -> Result<Column, WalkError> {
    match obs {
        Observable::MeanProfile => {
            let means = (1..=w.dim()).map(|i| mean_occupation(w, r, i)).collect::<Result<Vec<_>, _>>()?;
            Ok(profile_column(means, r.total()))
        }
        Observable::SingleMode(i) => Ok(single_column(&single_mode_distribution(w, r, i)?)),
        Observable::TwoMode(i, j) => Ok(joint_column(&two_mode_distribution(w, r, i, j)?)),
        Observable::Conditional { m, i, j } => {
            let joint = two_mode_distribution(w, r, i, j)?;
            Ok(imbalance_column(&conditional_imbalance(&joint, order(m))?, joint.normalization_defect(), None))
        }
        Observable::PairAveraged { m } => pair_column(w.dim(), order(m), |i, j| two_mode_distribution(w, r, i, j)),
    }
}

fn oracle_column(w: &UnitaryMatrix, r: &OccupationVector, obs: Observable) -> Result<Column, WalkError> {
    let exp = expand_final_state(w, r)?;
    match obs {
        Observable::MeanProfile => {
            let means = (1..=w.dim())
                .map(|i| Ok(oracle_correlator(&exp, &ModeTuple::repeated(i, 1, w.dim())?)))
                .collect::<Result<Vec<_>, WalkError>>()?;
            Ok(profile_column(means, r.total()))
        }
        Observable::SingleMode(i) => Ok(single_column(&oracle_counting(&exp, &[i])?)),
        Observable::TwoMode(i, j) => Ok(joint_column(&oracle_counting(&exp, &[i, j])?)),
        Observable::Conditional { m, i, j } => {
            let joint = oracle_counting(&exp, &[i, j])?;
            Ok(imbalance_column(&conditional_imbalance(&joint, order(m))?, joint.normalization_defect(), None))
        }
        Observable::PairAveraged { m } => pair_column(w.dim(), order(m), |i, j| oracle_counting(&exp, &[i, j])),
    }
}

/// Defect of a mean profile is the particle-number deficit.
fn profile_column(means: Vec<f64>, particles: usize) -> Column {
    let defect = (means.iter().sum::<f64>() - particles as f64).abs();
    Column { index: (1..=means.len() as i64).map(|i| vec![i]).collect(), values: means, defect, pairs: None }
}

fn single_column(p: &CountingDistribution) -> Column {
    Column {
        index: (0..p.probabilities().len() as i64).map(|k| vec![k]).collect(),
        values: p.probabilities().to_vec(),
        defect: p.normalization_defect(),
        pairs: None,
    }
}

fn joint_column(p: &CountingDistribution) -> Column {
    let side = p.max_count() as i64 + 1;
    Column {
        index: (0..side * side).map(|c| vec![c / side, c % side]).collect(),
        values: p.probabilities().to_vec(),
        defect: p.normalization_defect(),
        pairs: None,
    }
}

/// The conditional table is renormalised, so its defect is reported
/// together with that of the joint distribution it came from.
fn imbalance_column(d: &ImbalanceDistribution, upstream: f64, pairs: Option<(usize, usize)>) -> Column {
    let own = (d.probabilities().iter().sum::<f64>() - 1.0).abs();
    Column {
        index: d.iter().map(|(dk, _)| vec![dk]).collect(),
        values: d.probabilities().to_vec(),
        defect: own.max(upstream),
        pairs,
    }
}

fn pair_column<F>(modes: usize, m: usize, joint: F) -> Result<Column, WalkError>
where
    F: Fn(usize, usize) -> Result<CountingDistribution, WalkError> + Sync + Send,
{
    // non-negative floats order like their bit patterns
    let worst = AtomicU64::new(0);
    let avg = average_conditionals(modes, m, Execution::default(), |i, j| {
        let p = joint(i, j)?;
        worst.fetch_max(p.normalization_defect().to_bits(), Ordering::Relaxed);
        Ok(p)
    })?;
    let upstream = f64::from_bits(worst.into_inner());
    Ok(imbalance_column(&avg.distribution, upstream, Some((avg.pairs_used, avg.pairs_total))))
}
