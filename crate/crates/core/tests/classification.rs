use kms_dynamics::groupoid::{
    conformality_residual, isotropy_class, kms_census, kms_census_with, rees_map, CensusOptions, CensusOutcome,
    CocycleSpec, ExtremalState, IsotropyClass, Notion, Provenance, ResidualTests, TestSet, TransferPath,
};
use kms_dynamics::measure::Atom;
use kms_dynamics::orbit::{critical_classes, unramified_tree, Assumptions, Region, DEFAULT_NODE_BUDGET};
use kms_dynamics::thermo::DimensionEstimate;
use kms_dynamics::{MetricSpec, RationalMap, SpherePoint};
use num_complex::Complex64;

fn rees() -> RationalMap {
    rees_map(Complex64::new(0.75, 0.5))
}

fn rees_assumptions() -> Assumptions {
    Assumptions {
        collet_eckmann: false,
        critical_preperiodic: Some(false),
    }
}

#[test]
fn rees_orbit_of_zero_is_a_point() {
    let map = rees();
    // the only preimage of 0 is the critical point 2
    let pre = map.preimages(&SpherePoint::ZERO);
    assert_eq!(pre.len(), 1);
    assert!(pre[0].point.approx_eq(&SpherePoint::real(2.0), 1e-9));
    assert_eq!(pre[0].multiplicity, 2);
    let tree = unramified_tree(&map, &SpherePoint::ZERO, 6, &MetricSpec::Chordal, DEFAULT_NODE_BUDGET).unwrap();
    assert_eq!(tree.nodes.len(), 1);

    let classes = critical_classes(&map, Region::JuliaIsSphere, 400, &rees_assumptions()).unwrap();
    let zero = classes
        .iter()
        .find(|c| c.representative.approx_eq(&SpherePoint::ZERO, 1e-12))
        .unwrap();
    assert!(zero.finite);
    assert_eq!(zero.val_infinity, 2);
    assert_eq!(zero.members, vec![SpherePoint::ZERO]);
}

#[test]
fn rees_census_has_two_dirac_states_at_zero() {
    let map = rees();
    for beta in [-1.0, 0.5, 3.0] {
        let c = kms_census(
            &map,
            Region::JuliaIsSphere,
            beta,
            &CocycleSpec::Gauge,
            &rees_assumptions(),
        )
        .unwrap();
        let at_zero: usize = c
            .states
            .iter()
            .filter_map(|s| match s {
                ExtremalState::Atomic {
                    multiplicity,
                    measure: Some(m),
                    ..
                } if m.is_dirac_at(&SpherePoint::ZERO, 1e-12) => Some(*multiplicity),
                _ => None,
            })
            .sum();
        assert_eq!(at_zero, 2, "β = {beta}");
        assert_eq!(c.non_atomic, 0);
    }
    // above log 2 the infinite class of the critical point 2 also counts
    let hot = kms_census(
        &map,
        Region::JuliaIsSphere,
        3.0,
        &CocycleSpec::Gauge,
        &rees_assumptions(),
    )
    .unwrap();
    assert_eq!(hot.total, 6);
}

#[test]
fn square_map_gauge_census() {
    let map = RationalMap::quadratic(Complex64::new(0.0, 0.0));
    let none = Assumptions::default();
    let at = |beta: f64| kms_census(&map, Region::Julia, beta, &CocycleSpec::Gauge, &none).unwrap();
    assert_eq!(at(0.5).total, 0);
    assert_eq!(at(1.2).total, 0);
    let crit = at(2f64.ln());
    assert_eq!((crit.total, crit.non_atomic), (1, 1));
    assert!(matches!(
        &crit.states[0],
        ExtremalState::NonAtomic { measure } if measure.provenance == Provenance::Lyubich
    ));
}

#[test]
fn conformal_census_pattern_for_ce_parameter() {
    let map = RationalMap::quadratic(Complex64::new(-1.9, 0.0));
    let dim = DimensionEstimate {
        value: 1.125,
        error: 0.012,
        non_rigorous: true,
        by_depth: Vec::new(),
    };
    let opts = CensusOptions {
        dimension: Some(dim),
        ..Default::default()
    };
    let ce = Assumptions {
        collet_eckmann: true,
        critical_preperiodic: None,
    };
    let spec = CocycleSpec::Conformal {
        metric: MetricSpec::Flat,
    };
    let totals: Vec<usize> = [0.9, 1.125, 1.35]
        .iter()
        .map(|&b| {
            kms_census_with(&map, Region::Julia, b, &spec, &ce, &opts)
                .unwrap()
                .total
        })
        .collect();
    assert_eq!(totals, vec![0, 1, 2]);

    let plain = kms_census_with(&map, Region::Julia, 1.35, &spec, &Assumptions::default(), &opts).unwrap();
    assert!(matches!(plain.outcome, CensusOutcome::Unsupported { .. }));
}

#[test]
fn isotropy_witnesses() {
    let sq = RationalMap::quadratic(Complex64::new(0.0, 0.0));
    let cheb = RationalMap::quadratic(Complex64::new(-2.0, 0.0));
    let cases = [
        (isotropy_class(&sq, &SpherePoint::new(0.3, 0.1), 200), "trivial"),
        (isotropy_class(&sq, &SpherePoint::real(1.0), 200), "Z"),
        (isotropy_class(&rees(), &SpherePoint::ZERO, 200), "Z_2"),
        (isotropy_class(&cheb, &SpherePoint::ZERO, 200), "Z⊕Z_2"),
    ];
    for (class, label) in &cases {
        assert_eq!(class.to_string(), *label);
    }
    assert_eq!(cases[3].0, IsotropyClass::IntegerCrossCyclic { d: 2 });
}

#[test]
fn dirac_mass_at_parabolic_point() {
    let map = RationalMap::from_real(&[0.0, 1.0, 1.0, 0.25], &[1.0]).unwrap();
    let dirac = vec![Atom {
        point: SpherePoint::ZERO,
        weight: 1.0,
    }];
    let spec = CocycleSpec::Conformal {
        metric: MetricSpec::Flat,
    };
    let loop_at_zero = TransferPath::new(&map, SpherePoint::ZERO, 1, SpherePoint::ZERO, 0).unwrap();
    for beta in [-1.0, 1.0, 2.0] {
        let g = conformality_residual(
            &dirac,
            &map,
            beta,
            &spec,
            Notion::Groupoid,
            &ResidualTests::Paths(vec![loop_at_zero.clone()]),
        )
        .unwrap();
        assert!(g.max_residual < 1e-12);
        let o = conformality_residual(
            &dirac,
            &map,
            beta,
            &spec,
            Notion::Ordinary,
            &ResidualTests::Sets(vec![TestSet::Points {
                points: vec![SpherePoint::real(-2.0)],
            }]),
        )
        .unwrap();
        assert_eq!(o.max_residual, 1.0);
    }
}
