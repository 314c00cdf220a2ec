use loclambda::catalog::{build_phase_space, CatalogName};
use loclambda::local::{random_max_weight_pair, LocalPair};
use loclambda::mbpc::{magic_cluster, Graph, MagicClusterSpec};
use loclambda::polytope::{enumerate_vertices, local_lambda_facets, membership, DdOptions};
use loclambda::update::{
    destructive_update, facet_chain, generic_update_distribution, project_operator, MeasurementSpec, UpdateObjective,
};
use loclambda::{Axis, ExactOperator, FloatOperator, PauliPoint, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn t_state() -> FloatOperator {
    magic_cluster(&MagicClusterSpec::all_magic(Graph::edgeless(1))).unwrap()
}

#[test]
fn t_state_over_eight_states() {
    let det = build_phase_space(CatalogName::Det, 1).unwrap();
    let spec = MeasurementSpec::nondestructive(0, Axis::X);
    let out = generic_update_distribution(&t_state(), &spec, &det, UpdateObjective::Feasibility).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (o, want) in out.iter().zip([(1.0 + h) / 2.0, (1.0 - h) / 2.0]) {
        assert!((o.probability - want).abs() < 1e-12);
        let q = o.distribution.as_ref().unwrap();
        assert!(q.is_probability());
        assert!((q.total() - want).abs() < 1e-9);
        let post = loclambda::update::measure_operator(&t_state(), &spec, o.outcome).unwrap();
        assert!(q.reconstruct(&det).unwrap().max_abs_diff(&post) < 1e-9);
    }
}

#[test]
fn deterministic_member_gives_point_mass() {
    let pair = LocalPair::deterministic(&[(true, false, true), (false, true, false)]);
    let det = build_phase_space(CatalogName::Det, 1).unwrap();
    let out = generic_update_distribution(
        &pair.operator::<f64>(),
        &MeasurementSpec::destructive(0, Axis::Z),
        &det,
        UpdateObjective::Feasibility,
    )
    .unwrap();
    assert!(out[0].distribution.is_none());
    let q = out[1].distribution.as_ref().unwrap();
    assert_eq!(q.terms.len(), 1);
    assert!((q.terms[0].p - 1.0).abs() < 1e-12);
    let want = LocalPair::deterministic(&[(false, true, false)]).operator::<f64>();
    assert_eq!(det.members()[q.terms[0].index].op, want);
}

#[test]
fn generic_matches_closed_form_on_max_weight_pairs() {
    let vert = build_phase_space(CatalogName::Vert, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let pair = random_max_weight_pair(2, &mut rng);
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let closed = destructive_update(&pair, 0, axis).unwrap();
            let generic = generic_update_distribution(
                &pair.operator::<f64>(),
                &MeasurementSpec::destructive(0, axis),
                &vert,
                UpdateObjective::Feasibility,
            )
            .unwrap();
            for (c, g) in closed.iter().zip(&generic) {
                assert!((c.probability - g.probability).abs() < 1e-12);
                let q = g.distribution.as_ref().unwrap();
                assert_eq!(q.terms.len(), 1);
                let succ = c.successors[0].1.operator::<f64>();
                assert_eq!(vert.members()[q.terms[0].index].op, succ);
            }
        }
    }
}

#[test]
fn min_norm_outside_the_hull() {
    let rho = magic_cluster(&MagicClusterSpec::all_magic(Graph::path(2))).unwrap();
    let det = build_phase_space(CatalogName::Det, 1).unwrap();
    let spec = MeasurementSpec::destructive(0, Axis::Y);
    let out = generic_update_distribution(&rho, &spec, &det, UpdateObjective::MinNorm).unwrap();
    let total: f64 = out.iter().map(|o| o.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for o in &out {
        let q = o.distribution.as_ref().unwrap();
        let post = loclambda::update::measure_operator(&rho, &spec, o.outcome).unwrap();
        assert!(q.reconstruct(&det).unwrap().max_abs_diff(&post) < 1e-7);
        assert!(q.one_norm >= o.probability - 1e-9);
    }
}

fn random_rational<R: Rng>(rng: &mut R, den: i64) -> Rational {
    Rational::from_ratio(rng.random_range(-den..=den), den)
}

#[test]
fn projections_preserve_the_local_polytope() {
    let sys = local_lambda_facets(2).unwrap();
    let verts = enumerate_vertices(&sys, &DdOptions::default()).unwrap().into_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let quarter = Rational::from_ratio(1, 4);
    for _ in 0..20 {
        let mut a = ExactOperator::maximally_mixed(2).scale(&quarter);
        let ws: Vec<i64> = (0..4).map(|_| rng.random_range(1..10)).collect();
        let total: i64 = ws.iter().sum();
        for w in ws {
            let v = &verts[rng.random_range(0..verts.len())];
            a.add_scaled(&(Rational::from_ratio(3 * w, 4 * total)), v);
        }
        assert!(membership(&a, &sys).unwrap().status.is_member());
        for q in 0..2 {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                for r in [false, true] {
                    let p = project_operator(&a, &PauliPoint::local(2, q, axis), r).unwrap();
                    if let Some(v) = p.normalized() {
                        assert!(membership(&v, &sys).unwrap().status.is_member());
                    }
                }
            }
        }
    }
}

#[test]
fn facet_chain_witnesses_violations() {
    let sys = local_lambda_facets(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut seen = 0;
    while seen < 20 {
        let e: Vec<Rational> =
            (0..16).map(|i| if i == 0 { Rational::from_i64(1) } else { random_rational(&mut rng, 3) }).collect();
        let a = ExactOperator::from_table(2, e).unwrap();
        let rep = membership(&a, &sys).unwrap();
        let Some(&j) = rep.violated.first() else { continue };
        seen += 1;
        let facet = &sys.facets()[j];
        let chain = facet_chain(&a, facet.label()).unwrap();
        assert_eq!(chain.last().unwrap(), &facet.value(&a));
        // Where every step has non-zero trace, the conditional factors
        // multiply out to the facet value.
        if chain.iter().all(|t| *t != Rational::from_i64(0)) {
            let mut prev = Rational::from_i64(1);
            let mut prod = Rational::from_i64(1);
            for t in &chain {
                prod = prod * (t.clone() / prev);
                prev = t.clone();
            }
            assert_eq!(prod, facet.value(&a));
        }
        assert!(chain.last().unwrap() < &Rational::from_i64(0));
    }
}
