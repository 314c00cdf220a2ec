//! Robustness `R_V(ρ) = min ‖p‖₁` over affine decompositions
//! `ρ = Σ p(α) A_α`, convex decompositions, and signed sampling.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::PhaseSpaceCatalog;
use crate::error::{Error, Result};
use crate::expectation::FloatOperator;
use crate::lp::{find_feasible, solve, ColumnSource, LpOptions, LpSolution};

/// Reconstruction residual accepted for any returned decomposition.
pub const RESIDUAL_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiTerm {
    /// Position in the catalog.
    pub index: usize,
    pub label: String,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiDistribution {
    pub catalog: String,
    pub n: usize,
    pub terms: Vec<QuasiTerm>,
    pub one_norm: f64,
}

impl QuasiDistribution {
    /// Non-zero coefficients of a full coefficient vector.
    pub fn from_coefficients(catalog: &PhaseSpaceCatalog, p: &[f64]) -> Result<Self> {
        if p.len() != catalog.len() {
            return Err(Error::DimensionMismatch(p.len(), catalog.len()));
        }
        let terms: Vec<QuasiTerm> = p
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| QuasiTerm { index: i, label: catalog.members()[i].label.clone(), p: *v })
            .collect();
        let one_norm = terms.iter().map(|t| t.p.abs()).sum();
        Ok(QuasiDistribution { catalog: catalog.name().to_string(), n: catalog.n(), terms, one_norm })
    }

    pub fn total(&self) -> f64 {
        self.terms.iter().map(|t| t.p).sum()
    }

    pub fn is_probability(&self) -> bool {
        self.terms.iter().all(|t| t.p >= 0.0)
    }

    /// `Σ p(α) A_α`.
    pub fn reconstruct(&self, catalog: &PhaseSpaceCatalog) -> Result<FloatOperator> {
        if catalog.n() != self.n {
            return Err(Error::DimensionMismatch(catalog.n(), self.n));
        }
        let mut acc = FloatOperator::zeros(self.n);
        for t in &self.terms {
            let m = catalog.members().get(t.index).ok_or_else(|| Error::invalid(format!("term index {} out of range", t.index)))?;
            acc.add_scaled(&t.p, &m.op);
        }
        Ok(acc)
    }

    /// `max |ρ - Σ p(α) A_α|` over all expectations.
    pub fn residual(&self, rho: &FloatOperator, catalog: &PhaseSpaceCatalog) -> Result<f64> {
        Ok(self.reconstruct(catalog)?.max_abs_diff(rho))
    }
}

/// Catalog members as columns; with `split`, column `j + len` is `-A_j`
/// and every column costs 1.
struct CatalogColumns<'a> {
    cols: Vec<&'a [f64]>,
    rhs: &'a [f64],
    split: bool,
}

impl<'a> CatalogColumns<'a> {
    fn new(rho: &'a FloatOperator, catalog: &'a PhaseSpaceCatalog, split: bool) -> Result<Self> {
        if rho.n() != catalog.n() {
            return Err(Error::DimensionMismatch(rho.n(), catalog.n()));
        }
        Ok(CatalogColumns { cols: catalog.members().iter().map(|m| m.op.values()).collect(), rhs: rho.values(), split })
    }

    fn base(&self, j: usize) -> (&[f64], f64) {
        let k = self.cols.len();
        if j < k {
            (self.cols[j], 1.0)
        } else {
            (self.cols[j - k], -1.0)
        }
    }
}

impl ColumnSource for CatalogColumns<'_> {
    fn rows(&self) -> usize {
        self.rhs.len()
    }

    fn rhs(&self) -> &[f64] {
        self.rhs
    }

    fn len(&self) -> usize {
        self.cols.len() * if self.split { 2 } else { 1 }
    }

    fn cost(&self, _j: usize) -> f64 {
        if self.split {
            1.0
        } else {
            0.0
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let (c, s) = self.base(j);
        s * c.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }

    fn write(&self, j: usize, out: &mut [f64]) {
        let (c, s) = self.base(j);
        for (o, a) in out.iter_mut().zip(c) {
            *o = s * a;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub value: f64,
    pub quasi: QuasiDistribution,
    pub residual: f64,
    pub lp: LpSolution,
}

/// `R_V(ρ)` with the optimal quasi-distribution; `Infeasible` when the
/// catalog does not span `ρ`.
pub fn robustness(rho: &FloatOperator, catalog: &PhaseSpaceCatalog) -> Result<(f64, QuasiDistribution)> {
    let r = robustness_report(rho, catalog, &LpOptions::default())?;
    Ok((r.value, r.quasi))
}

pub fn robustness_report(rho: &FloatOperator, catalog: &PhaseSpaceCatalog, opts: &LpOptions) -> Result<RobustnessReport> {
    let cols = CatalogColumns::new(rho, catalog, true)?;
    let lp = solve(&cols, opts)?;
    let k = catalog.len();
    let p: Vec<f64> = (0..k).map(|j| lp.x[j] - lp.x[j + k]).collect();
    let quasi = QuasiDistribution::from_coefficients(catalog, &p)?;
    let residual = quasi.residual(rho, catalog)?;
    if residual > RESIDUAL_TOL {
        return Err(Error::invalid(format!("decomposition residual {residual:e} above tolerance")));
    }
    Ok(RobustnessReport { value: quasi.one_norm, quasi, residual, lp })
}

/// A convex decomposition of `ρ` over the catalog, or `Infeasible`.
pub fn decompose_probability(rho: &FloatOperator, catalog: &PhaseSpaceCatalog) -> Result<QuasiDistribution> {
    let cols = CatalogColumns::new(rho, catalog, false)?;
    let lp = find_feasible(&cols, &LpOptions::default())?;
    let q = QuasiDistribution::from_coefficients(catalog, &lp.x)?;
    if q.residual(rho, catalog)? > RESIDUAL_TOL {
        return Err(Error::Infeasible);
    }
    Ok(q)
}

/// Draws term positions with probability `|p(α)| / ‖p‖₁` and reports the
/// sign of `p(α)` as `±1`.
#[derive(Clone, Debug)]
pub struct SignedSampler {
    dist: WeightedIndex<f64>,
    signs: Vec<f64>,
    rng: ChaCha8Rng,
}

impl SignedSampler {
    pub fn new(q: &QuasiDistribution, rng: ChaCha8Rng) -> Result<Self> {
        let dist = WeightedIndex::new(q.terms.iter().map(|t| t.p.abs()))
            .map_err(|e| Error::invalid(format!("cannot sample from quasi-distribution: {e}")))?;
        Ok(SignedSampler { dist, signs: q.terms.iter().map(|t| t.p.signum()).collect(), rng })
    }

    /// Term position within `q.terms` and its sign.
    pub fn draw(&mut self) -> (usize, f64) {
        let k = self.dist.sample(&mut self.rng);
        (k, self.signs[k])
    }
}

impl Iterator for SignedSampler {
    type Item = (usize, f64);

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.draw())
    }
}

pub fn signed_sampler(q: &QuasiDistribution, seed: u64) -> Result<SignedSampler> {
    SignedSampler::new(q, ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_phase_space, CatalogMember, CatalogName};
    use crate::local::LocalPair;
    use crate::pauli::PauliPoint;
    use crate::polytope::tensor;
    use rand::Rng;

    fn eight() -> PhaseSpaceCatalog {
        build_phase_space(CatalogName::Det, 1).unwrap()
    }

    fn bloch(x: f64, y: f64, z: f64) -> FloatOperator {
        FloatOperator::from_entries(1, [(PauliPoint::x_on(1, 0), x), (PauliPoint::y_on(1, 0), y), (PauliPoint::z_on(1, 0), z)]).unwrap()
    }

    #[test]
    fn member_has_unit_robustness() {
        let c = build_phase_space(CatalogName::Stab, 2).unwrap();
        for m in c.members().iter().step_by(7) {
            let (v, q) = robustness(&m.op, &c).unwrap();
            assert!((v - 1.0).abs() < 1e-9);
            assert!(q.residual(&m.op, &c).unwrap() < 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_over_eight_states() {
        let c = eight();
        let q = decompose_probability(&FloatOperator::maximally_mixed(1), &c).unwrap();
        assert!(q.is_probability());
        assert!((q.total() - 1.0).abs() < 1e-12);
        assert!(q.residual(&FloatOperator::maximally_mixed(1), &c).unwrap() < 1e-12);
    }

    #[test]
    fn outside_the_octahedron() {
        // |0><0| has z = 1; the eight-state cube needs |x|+... no: the cube
        // contains the whole Bloch ball, so go outside the cube instead.
        let c = eight();
        let rho = bloch(0.0, 0.0, 1.5);
        assert!(matches!(decompose_probability(&rho, &c), Err(Error::Infeasible)));
        let (v, q) = robustness(&rho, &c).unwrap();
        assert!((v - 1.5).abs() < 1e-9, "{v}");
        assert!((q.total() - 1.0).abs() < 1e-9);
        // Stabilizer octahedron: |T> needs weight (1 + √2)/2 · ... checked
        // against the closed form R = |x| + |y| + |z| for points with
        // |x| + |y| + |z| >= 1.
        let s = build_phase_space(CatalogName::Stab, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (v, _) = robustness(&bloch(h, h, 0.0), &s).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn signed_sampler_frequencies() {
        let c = eight();
        let q = QuasiDistribution::from_coefficients(&c, &[1.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(q.one_norm, 2.0);
        let draws: Vec<(usize, f64)> = signed_sampler(&q, 7).unwrap().take(100_000).collect();
        let first = draws.iter().filter(|d| d.0 == 0).count() as f64 / 1e5;
        assert!((first - 0.75).abs() < 0.01, "{first}");
        assert!(draws.iter().all(|&(k, s)| (k == 0) == (s > 0.0)));
        let again: Vec<(usize, f64)> = signed_sampler(&q, 7).unwrap().take(1000).collect();
        assert_eq!(&draws[..1000], &again[..]);
    }

    #[test]
    fn signed_estimator_is_unbiased() {
        let c = eight();
        let rho = bloch(0.9, -0.8, 0.7);
        let (_, q) = robustness(&rho, &c).unwrap();
        let target = PauliPoint::x_on(1, 0);
        let exact = *rho.get(&target);
        let samples: Vec<f64> = signed_sampler(&q, 11)
            .unwrap()
            .take(100_000)
            .map(|(k, s)| q.one_norm * s * c.members()[q.terms[k].index].op.get(&target))
            .collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        let se = (var / samples.len() as f64).sqrt();
        assert!((mean - exact).abs() < 3.0 * se + 1e-12, "{mean} vs {exact}");
    }

    #[test]
    fn det_robustness_is_submultiplicative() {
        let one = eight();
        let two = build_phase_space(CatalogName::Det, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut pt = || {
                let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                bloch(v[0] * 1.3, v[1] * 1.3, v[2] * 1.3)
            };
            let (a, b) = (pt(), pt());
            let ra = robustness(&a, &one).unwrap().0;
            let rb = robustness(&b, &one).unwrap().0;
            let rab = robustness(&tensor(&a, &b), &two).unwrap().0;
            assert!(rab <= ra * rb + 1e-6, "{rab} > {ra} * {rb}");
        }
    }

    #[test]
    fn span_failure_is_infeasible() {
        let m = CatalogMember::from_pair("det", LocalPair::deterministic(&[(false, false, false)]));
        let c = PhaseSpaceCatalog::new(CatalogName::Custom, 1, vec![m]).unwrap();
        assert!(matches!(robustness(&bloch(0.1, 0.0, 0.0), &c), Err(Error::Infeasible)));
    }
}
