//! Measurement-based Pauli computation: magic cluster states, adaptive
//! destructive X/Y schedules, trajectory sampling over local pairs, exact
//! branch propagation and a dense Born-rule oracle.

mod schedule;
mod state;

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use schedule::{MeasurementSchedule, ScheduleStep};
pub use state::{magic_cluster, magic_cluster_statevector, Graph, MagicClusterSpec};

use crate::catalog::PhaseSpaceCatalog;
use crate::dense::{eigenprojector, DenseOperator, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::expectation::FloatOperator;
use crate::local::LocalPair;
use crate::pauli::PauliPoint;
use crate::robustness::{decompose_probability, robustness, QuasiDistribution};
use crate::update::destructive_update;

/// Probability per outcome string, bits in schedule order.
pub type OutcomeDistribution = BTreeMap<String, f64>;

/// Cap on live `(pair, prefix)` nodes in [`propagate_exact`].
pub const BRANCH_CAP: usize = 1 << 20;

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

/// Dense adaptive simulation: project, renormalize, trace out.
pub fn born_oracle(rho: &FloatOperator, schedule: &MeasurementSchedule) -> Result<OutcomeDistribution> {
    schedule.check_register(rho.n())?;
    if rho.n() > DENSE_LIMIT {
        return Err(Error::TooManyQubits { what: "Born oracle", n: rho.n(), limit: DENSE_LIMIT });
    }
    let mut out = OutcomeDistribution::new();
    let mut stack: Vec<(String, f64, DenseOperator)> = vec![(String::new(), 1.0, rho.to_matrix()?)];
    while let Some((prefix, p, m)) = stack.pop() {
        let i = prefix.len();
        if i == schedule.len() {
            *out.entry(prefix).or_insert(0.0) += p;
            continue;
        }
        let step = &schedule.steps()[i];
        let q = schedule.register_index(i);
        let b = PauliPoint::local(m.n(), q, step.axis_for(&prefix)?);
        for r in [false, true] {
            let proj = eigenprojector(&b, r)?;
            let post = proj.mul(&m).mul(&proj);
            let pr = post.trace().re;
            if pr > 1e-14 {
                let next = post.scale(1.0 / pr).partial_trace(q);
                stack.push((format!("{prefix}{}", if r { '1' } else { '0' }), p * pr, next));
            }
        }
    }
    Ok(out)
}

fn check_inputs(catalog: &PhaseSpaceCatalog, q: &QuasiDistribution, schedule: &MeasurementSchedule) -> Result<()> {
    if q.n != catalog.n() {
        return Err(Error::DimensionMismatch(q.n, catalog.n()));
    }
    schedule.check_register(catalog.n())?;
    for t in &q.terms {
        let m = catalog.members().get(t.index).ok_or_else(|| Error::invalid(format!("term index {} out of range", t.index)))?;
        if m.pair.is_none() {
            return Err(Error::invalid(format!("member {} has no local pair", m.label)));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub index: u64,
    pub outcomes: Vec<bool>,
    /// Catalog label of the initial state, then each successor pair.
    pub states: Vec<String>,
    /// Sign of the sampled coefficient; `+1` for probability distributions.
    pub sign: f64,
}

impl Trajectory {
    pub fn outcome_string(&self) -> String {
        bit_string(&self.outcomes)
    }
}

/// Initial-state sampler plus the schedule walk shared by trajectory runs.
struct Walker<'a> {
    catalog: &'a PhaseSpaceCatalog,
    q: &'a QuasiDistribution,
    schedule: &'a MeasurementSchedule,
    dist: WeightedIndex<f64>,
}

impl<'a> Walker<'a> {
    fn new(catalog: &'a PhaseSpaceCatalog, q: &'a QuasiDistribution, schedule: &'a MeasurementSchedule) -> Result<Self> {
        check_inputs(catalog, q, schedule)?;
        let dist = WeightedIndex::new(q.terms.iter().map(|t| t.p.abs())).map_err(|e| Error::invalid(format!("cannot sample initial state: {e}")))?;
        Ok(Walker { catalog, q, schedule, dist })
    }

    fn rng(seed: u64, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng
    }

    fn walk(&self, rng: &mut ChaCha8Rng, mut visit: impl FnMut(&LocalPair)) -> Result<(usize, Vec<bool>, f64)> {
        let k = self.dist.sample(rng);
        let term = &self.q.terms[k];
        let mut pair = self.catalog.members()[term.index].pair.clone().expect("checked");
        let mut outcomes = Vec::with_capacity(self.schedule.len());
        for (i, step) in self.schedule.steps().iter().enumerate() {
            let prefix = bit_string(&outcomes);
            let update = destructive_update(&pair, self.schedule.register_index(i), step.axis_for(&prefix)?)?;
            let r = match (update[0].probability, update[1].probability) {
                (p, _) if p == 1.0 => false,
                (_, p) if p == 1.0 => true,
                _ => rng.random::<bool>(),
            };
            pair = update[r as usize].successors[0].1.clone();
            visit(&pair);
            outcomes.push(r);
        }
        Ok((k, outcomes, term.p.signum()))
    }
}

fn pair_label(p: &LocalPair) -> String {
    let body: Vec<String> = p.entries().map(|(a, g)| format!("{}{}", if g { '-' } else { '+' }, a)).collect();
    format!("pair[{}]", body.join(","))
}

/// One run of the sampling algorithm; trajectory `index` draws from its own
/// stream of the generator seeded by `seed`.
pub fn run_trajectory(catalog: &PhaseSpaceCatalog, initial: &QuasiDistribution, schedule: &MeasurementSchedule, seed: u64, index: u64) -> Result<Trajectory> {
    let walker = Walker::new(catalog, initial, schedule)?;
    let mut rng = Walker::rng(seed, index);
    let mut states = Vec::new();
    let (k, outcomes, sign) = walker.walk(&mut rng, |p| states.push(pair_label(p)))?;
    states.insert(0, catalog.members()[initial.terms[k].index].label.clone());
    Ok(Trajectory { seed, index, outcomes, states, sign })
}

/// Pushes the whole (signed) distribution through the closed-form updates,
/// merging equal pairs under equal prefixes.
pub fn propagate_exact(catalog: &PhaseSpaceCatalog, initial: &QuasiDistribution, schedule: &MeasurementSchedule) -> Result<OutcomeDistribution> {
    check_inputs(catalog, initial, schedule)?;
    let mut level: BTreeMap<String, BTreeMap<LocalPair, f64>> = BTreeMap::new();
    let root = level.entry(String::new()).or_default();
    for t in &initial.terms {
        *root.entry(catalog.members()[t.index].pair.clone().expect("checked")).or_insert(0.0) += t.p;
    }
    for (i, step) in schedule.steps().iter().enumerate() {
        let q = schedule.register_index(i);
        let mut next: BTreeMap<String, BTreeMap<LocalPair, f64>> = BTreeMap::new();
        let mut nodes = 0usize;
        for (prefix, pairs) in &level {
            let axis = step.axis_for(prefix)?;
            for (pair, w) in pairs {
                for out in destructive_update(pair, q, axis)? {
                    if out.probability == 0.0 {
                        continue;
                    }
                    let key = format!("{prefix}{}", if out.outcome { '1' } else { '0' });
                    let slot = next.entry(key).or_default();
                    for (sw, succ) in out.successors {
                        let e = slot.entry(succ).or_insert_with(|| {
                            nodes += 1;
                            0.0
                        });
                        *e += w * out.probability * sw;
                    }
                }
            }
        }
        if nodes > BRANCH_CAP {
            return Err(Error::ResourceGuard(format!("{nodes} branches after step {}", i + 1)));
        }
        level = next;
    }
    Ok(level.into_iter().map(|(k, v)| (k, v.values().sum())).collect())
}

/// `½ Σ |p(s) - q(s)|`.
pub fn total_variation(p: &OutcomeDistribution, q: &OutcomeDistribution) -> f64 {
    let keys: std::collections::BTreeSet<&String> = p.keys().chain(q.keys()).collect();
    0.5 * keys.into_iter().map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimulationMode {
    Sample,
    Exact,
    Quasi,
}

impl SimulationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimulationMode::Sample => "sample",
            SimulationMode::Exact => "exact",
            SimulationMode::Quasi => "quasi",
        }
    }
}

impl std::str::FromStr for SimulationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample" => Ok(SimulationMode::Sample),
            "exact" => Ok(SimulationMode::Exact),
            "quasi" => Ok(SimulationMode::Quasi),
            _ => Err(Error::invalid(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub mode: SimulationMode,
    pub shots: u64,
    pub seed: u64,
    pub catalog: String,
    /// `‖p‖₁` of the initial decomposition.
    pub one_norm: f64,
    pub distribution: OutcomeDistribution,
    /// Standard errors of the estimates (sample and quasi modes).
    pub std_error: Option<OutcomeDistribution>,
    pub oracle: Option<OutcomeDistribution>,
    pub tv_distance: Option<f64>,
}

/// Per-outcome estimates `‖p‖₁ · mean(sign · [s])` with standard errors.
fn estimate(results: &[(String, f64)], shots: u64, one_norm: f64) -> (OutcomeDistribution, OutcomeDistribution) {
    let mut sums: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for (s, sign) in results {
        let e = sums.entry(s.clone()).or_insert((0.0, 0.0));
        e.0 += sign;
        e.1 += 1.0;
    }
    let n = shots as f64;
    let mut est = OutcomeDistribution::new();
    let mut se = OutcomeDistribution::new();
    for (s, (sum, sq)) in sums {
        let mean = sum / n;
        let var = if shots > 1 { (sq / n - mean * mean).max(0.0) * n / (n - 1.0) } else { 0.0 };
        est.insert(s.clone(), one_norm * mean);
        se.insert(s, one_norm * (var / n).sqrt());
    }
    (est, se)
}

/// Runs `shots` trajectories in parallel; results are in trajectory order.
pub fn sample_trajectories(
    catalog: &PhaseSpaceCatalog,
    initial: &QuasiDistribution,
    schedule: &MeasurementSchedule,
    shots: u64,
    seed: u64,
) -> Result<Vec<(String, f64)>> {
    let walker = Walker::new(catalog, initial, schedule)?;
    (0..shots)
        .into_par_iter()
        .map(|i| {
            let mut rng = Walker::rng(seed, i);
            let (_, outcomes, sign) = walker.walk(&mut rng, |_| {})?;
            Ok((bit_string(&outcomes), sign))
        })
        .collect()
}

/// Decomposes `state` over the catalog and simulates the schedule. Sample
/// mode needs a convex decomposition and fails with `Infeasible` outside the
/// catalog hull; exact and quasi modes use the minimal-norm one. The oracle
/// comparison is included whenever the register fits the dense
/// limit.
pub fn simulate(
    state: &FloatOperator,
    schedule: &MeasurementSchedule,
    catalog: &PhaseSpaceCatalog,
    mode: SimulationMode,
    shots: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if state.n() != catalog.n() {
        return Err(Error::DimensionMismatch(state.n(), catalog.n()));
    }
    schedule.check_register(state.n())?;
    // Exact propagation is linear, so a signed decomposition serves as well.
    let initial = match mode {
        SimulationMode::Sample => decompose_probability(state, catalog)?,
        _ => robustness(state, catalog)?.1,
    };
    let (distribution, std_error) = match mode {
        SimulationMode::Exact => (propagate_exact(catalog, &initial, schedule)?, None),
        _ => {
            if shots == 0 {
                return Err(Error::invalid("sampling needs at least one shot"));
            }
            let results = sample_trajectories(catalog, &initial, schedule, shots, seed)?;
            let (est, se) = estimate(&results, shots, initial.one_norm);
            (est, Some(se))
        }
    };
    let oracle = if state.n() <= DENSE_LIMIT { Some(born_oracle(state, schedule)?) } else { None };
    let tv_distance = oracle.as_ref().map(|o| total_variation(&distribution, o));
    Ok(SimulationReport {
        mode,
        shots: if mode == SimulationMode::Exact { 0 } else { shots },
        seed,
        catalog: catalog.name().to_string(),
        one_norm: initial.one_norm,
        distribution,
        std_error,
        oracle,
        tv_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_phase_space, CatalogName};
    use crate::pauli::Axis;

    fn single_member(pair: LocalPair) -> (PhaseSpaceCatalog, QuasiDistribution) {
        let c = PhaseSpaceCatalog::new(CatalogName::Custom, pair.n(), vec![crate::catalog::CatalogMember::from_pair("s", pair)]).unwrap();
        let q = QuasiDistribution::from_coefficients(&c, &[1.0]).unwrap();
        (c, q)
    }

    #[test]
    fn oracle_basics() {
        let plus = magic_cluster(&MagicClusterSpec::new(Graph::edgeless(1), []).unwrap()).unwrap();
        let d = born_oracle(&plus, &MeasurementSchedule::fixed(&[(0, Axis::X)]).unwrap()).unwrap();
        assert!((d["0"] - 1.0).abs() < 1e-12 && !d.contains_key("1"));
        let t = magic_cluster(&MagicClusterSpec::new(Graph::edgeless(1), [0]).unwrap()).unwrap();
        let d = born_oracle(&t, &MeasurementSchedule::fixed(&[(0, Axis::X)]).unwrap()).unwrap();
        assert!((d["0"] - (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0).abs() < 1e-12);
        assert!((d.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_vertex_trajectory() {
        let (c, q) = single_member(LocalPair::deterministic(&[(false, false, false), (false, false, false)]));
        let s = MeasurementSchedule::fixed(&[(0, Axis::X), (1, Axis::X)]).unwrap();
        for i in 0..20 {
            assert_eq!(run_trajectory(&c, &q, &s, 1, i).unwrap().outcome_string(), "00");
        }
        assert_eq!(propagate_exact(&c, &q, &s).unwrap(), OutcomeDistribution::from([("00".into(), 1.0)]));
    }

    #[test]
    fn maximally_mixed_gives_uniform_bits() {
        let omega = crate::local::LocallyClosedSet::new(2, [PauliPoint::zero(2)]).unwrap();
        let (c, q) = single_member(LocalPair::new(omega, vec![false]).unwrap());
        let s = MeasurementSchedule::fixed(&[(1, Axis::Y), (0, Axis::X)]).unwrap();
        let d = propagate_exact(&c, &q, &s).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.values().all(|p| *p == 0.25));
    }

    #[test]
    fn graph_state_over_vertices() {
        let state = magic_cluster(&MagicClusterSpec::new(Graph::path(2), []).unwrap()).unwrap();
        let c = build_phase_space(CatalogName::Vert, 2).unwrap();
        let sched = MeasurementSchedule::fixed(&[(0, Axis::X), (1, Axis::X)]).unwrap();
        let exact = simulate(&state, &sched, &c, SimulationMode::Exact, 0, 0).unwrap();
        assert!(exact.tv_distance.unwrap() < 1e-9);
        let sampled = simulate(&state, &sched, &c, SimulationMode::Sample, 100_000, 3).unwrap();
        let oracle = sampled.oracle.as_ref().unwrap();
        let se = sampled.std_error.as_ref().unwrap();
        for (k, p) in oracle {
            let got = sampled.distribution.get(k).copied().unwrap_or(0.0);
            let sigma = (p * (1.0 - p) / 1e5).sqrt();
            assert!((got - p).abs() <= 3.0 * sigma + 1e-12, "{k}: {got} vs {p} (se {:?})", se.get(k));
        }
    }

    #[test]
    fn trajectories_are_reproducible() {
        let c = build_phase_space(CatalogName::Det, 2).unwrap();
        let q = decompose_probability(&FloatOperator::maximally_mixed(2), &c).unwrap();
        let s = MeasurementSchedule::fixed(&[(0, Axis::Y), (1, Axis::X)]).unwrap();
        let a = run_trajectory(&c, &q, &s, 42, 7).unwrap();
        assert_eq!(a, run_trajectory(&c, &q, &s, 42, 7).unwrap());
        assert_eq!(a.states.len(), 3);
        let runs: Vec<String> = (0..32).map(|i| run_trajectory(&c, &q, &s, 42, i).unwrap().outcome_string()).collect();
        assert!(runs.iter().any(|r| r != &runs[0]));
        let batch = sample_trajectories(&c, &q, &s, 32, 42).unwrap();
        assert_eq!(batch.iter().map(|b| b.0.clone()).collect::<Vec<_>>(), runs);
    }

    #[test]
    fn undefined_rule_is_an_error() {
        let (c, q) = single_member(LocalPair::deterministic(&[(true, false, false), (false, false, false)]));
        let step2 = ScheduleStep { qubit: 1, basis: BTreeMap::from([("0".into(), Axis::X)]) };
        let s = MeasurementSchedule::new(vec![ScheduleStep::fixed(0, Axis::X), step2]).unwrap();
        assert!(run_trajectory(&c, &q, &s, 0, 0).is_err());
        assert!(propagate_exact(&c, &q, &s).is_err());
    }
}
