//! Acceptance run: one timed PASS/FAIL line per criterion.
//!
//! `cargo test -p kms-dynamics-cli --test acceptance`

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kms_dynamics::groupoid::{
    atomic_measure, cocycle_value, conformality_residual, interval_partition, isotropy_class, kms_census,
    kms_census_with, poincare_partial_sums, rees_map, reweight_measure, sector_partition, CensusOptions, CocycleSpec,
    ExtremalState, Notion, Provenance, ResidualTests, TestSet, TransferPath,
};
use kms_dynamics::measure::{Atom, PointMasses};
use kms_dynamics::orbit::{
    backward_tree, critical_classes, unramified_tree, val_infinity, Assumptions, Region, DEFAULT_NODE_BUDGET,
};
use kms_dynamics::sphere::{BaseMetric, Poly, Weight};
use kms_dynamics::thermo::{arcsine_cdf, bowen_dimension, julia_seeds, ks_distance, lyubich_measure};
use kms_dynamics::{Chart, MetricSpec, RationalMap, SpherePoint};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};

type Outcome = Result<String, String>;
/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn quadratic(re: f64, im: f64) -> RationalMap {
    RationalMap::quadratic(Complex64::new(re, im))
}

fn gauge_total(
    map: &RationalMap,
    region: Region,
    beta: f64,
    a: &Assumptions,
) -> Result<kms_dynamics::groupoid::KmsCensus, String> {
    kms_census(map, region, beta, &CocycleSpec::Gauge, a).map_err(|e| e.to_string())
}

fn square_map_census() -> Outcome {
    let map = quadratic(0.0, 0.0);
    let none = Assumptions::default();
    let mut got = Vec::new();
    for beta in [0.5, 2f64.ln(), 1.2] {
        got.push(gauge_total(&map, Region::Julia, beta, &none)?);
    }
    let totals: Vec<usize> = got.iter().map(|c| c.total).collect();
    ensure(totals == [0, 1, 0], format!("totals {totals:?}"))?;
    let lyubich = matches!(
        &got[1].states[..],
        [ExtremalState::NonAtomic { measure }] if measure.provenance == Provenance::Lyubich
    );
    ensure(lyubich, "state at log 2 is not the Lyubich measure")?;
    Ok(format!("totals {totals:?}"))
}

fn rees_census() -> Outcome {
    let map = rees_map(Complex64::new(0.75, 0.5));
    let flags = Assumptions {
        collet_eckmann: false,
        critical_preperiodic: Some(false),
    };
    let pre = map.preimages(&SpherePoint::ZERO);
    ensure(
        pre.len() == 1 && pre[0].point.approx_eq(&SpherePoint::real(2.0), 1e-9),
        "preimages of 0",
    )?;
    let tree = unramified_tree(&map, &SpherePoint::ZERO, 8, &MetricSpec::Chordal, DEFAULT_NODE_BUDGET)
        .map_err(|e| e.to_string())?;
    ensure(tree.nodes.len() == 1, "grand orbit of 0 is not {0}")?;
    let classes = critical_classes(&map, Region::JuliaIsSphere, 400, &flags).map_err(|e| e.to_string())?;
    let zero = classes
        .iter()
        .find(|c| c.representative.approx_eq(&SpherePoint::ZERO, 1e-12))
        .ok_or("no class at 0")?;
    ensure(
        zero.finite && zero.members == [SpherePoint::ZERO],
        "class of 0 is not {0}",
    )?;
    let val = val_infinity(&map, &SpherePoint::ZERO, 400).value();
    ensure(val == Some(2), format!("VAL_inf {val:?}"))?;
    let mut counts = Vec::new();
    let mut totals = Vec::new();
    for beta in [-1.0, 0.5, 3.0] {
        let c = gauge_total(&map, Region::JuliaIsSphere, beta, &flags)?;
        totals.push(c.total);
        let n: usize = c
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
        counts.push(n);
    }
    ensure(counts == [2, 2, 2], format!("Dirac states at 0: {counts:?}"))?;
    // above ln 2 the infinite class of the critical point 2 (VAL_inf 4) adds
    // four more states
    ensure(totals == [2, 2, 6], format!("census totals {totals:?}"))?;
    Ok(format!(
        "VAL_inf 2, Dirac-at-0 states {counts:?}, census totals {totals:?}"
    ))
}

fn parabolic_discriminator() -> Outcome {
    let map = RationalMap::from_real(&[0.0, 1.0, 1.0, 0.25], &[1.0]).map_err(|e| e.to_string())?;
    let dirac = vec![Atom {
        point: SpherePoint::ZERO,
        weight: 1.0,
    }];
    let spec = CocycleSpec::Conformal {
        metric: MetricSpec::Flat,
    };
    let path = TransferPath::new(&map, SpherePoint::ZERO, 1, SpherePoint::ZERO, 0).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for beta in [-1.0, 1.0, 2.0] {
        let g = conformality_residual(
            &dirac,
            &map,
            beta,
            &spec,
            Notion::Groupoid,
            &ResidualTests::Paths(vec![path.clone()]),
        )
        .map_err(|e| e.to_string())?;
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
        .map_err(|e| e.to_string())?;
        ensure(
            g.max_residual < 1e-12,
            format!("groupoid residual {} at β={beta}", g.max_residual),
        )?;
        ensure(
            o.max_residual == 1.0,
            format!("ordinary residual {} at β={beta}", o.max_residual),
        )?;
        worst = worst.max(g.max_residual);
    }
    Ok(format!("groupoid ≤ {worst:.1e}, ordinary = 1"))
}

fn isotropy_table() -> Outcome {
    let sq = quadratic(0.0, 0.0);
    let got = [
        isotropy_class(&sq, &SpherePoint::new(0.3, 0.1), 200).to_string(),
        isotropy_class(&sq, &SpherePoint::real(1.0), 200).to_string(),
        isotropy_class(&rees_map(Complex64::new(0.75, 0.5)), &SpherePoint::ZERO, 200).to_string(),
        isotropy_class(&quadratic(-2.0, 0.0), &SpherePoint::ZERO, 200).to_string(),
    ];
    ensure(got == ["trivial", "Z", "Z_2", "Z⊕Z_2"], format!("{got:?}"))?;
    Ok(got.join(" / "))
}

/// Least-squares slope of `ln y_k` against `k`.
fn log_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = ys.iter().map(|y| y.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, y) in ys.iter().enumerate() {
        sxy += (k as f64 - mx) * (y.ln() - my);
        sxx += (k as f64 - mx).powi(2);
    }
    sxy / sxx
}

fn increment_rate() -> Outcome {
    let map = quadratic(0.0, 0.0);
    let mut report = Vec::new();
    for beta in [2f64.ln() - 0.3, 2f64.ln() + 0.3] {
        let s = poincare_partial_sums(&map, &SpherePoint::new(0.6, 0.2), beta, &CocycleSpec::Gauge, 14)
            .map_err(|e| e.to_string())?;
        let slope = log_slope(&s.increments);
        let expected = 2f64.ln() - beta;
        ensure(
            (slope - expected).abs() <= 0.1 * expected.abs(),
            format!("slope {slope} vs {expected} at β={beta}"),
        )?;
        report.push(format!("{slope:+.4}"));
    }
    Ok(format!("slopes {}", report.join(", ")))
}

/// Largest `|m(R^{-1}(B)) - m(B)|` over the cells.
fn invariance_residual(map: &RationalMap, atoms: &[Atom], cells: &[TestSet]) -> f64 {
    let images: Vec<SpherePoint> = atoms.iter().map(|a| map.eval(&a.point)).collect();
    cells
        .iter()
        .map(|t| {
            let TestSet::Cell { cell } = t else { unreachable!() };
            let pulled: f64 = atoms
                .iter()
                .zip(&images)
                .filter(|(_, y)| cell.contains(y))
                .map(|(a, _)| a.weight)
                .sum();
            let here: f64 = atoms.iter().filter(|a| cell.contains(&a.point)).map(|a| a.weight).sum();
            (pulled - here).abs()
        })
        .fold(0.0, f64::max)
}

fn lyubich_invariance() -> Outcome {
    let mut report = Vec::new();
    for (map, cells) in [
        (quadratic(0.0, 0.0), sector_partition(32, 0.5, 2.0)),
        (quadratic(-2.0, 0.0), interval_partition(32, -2.0, 2.0 + 1e-9)),
    ] {
        let seed = julia_seeds(&map).map_err(|e| e.to_string())?[0];
        let m = lyubich_measure(&map, 16, &seed).map_err(|e| e.to_string())?;
        let covered: f64 = m
            .atoms
            .iter()
            .filter(|a| {
                cells
                    .iter()
                    .any(|t| matches!(t, TestSet::Cell { cell } if cell.contains(&a.point)))
            })
            .map(|a| a.weight)
            .sum();
        ensure((covered - 1.0).abs() < 1e-9, format!("partition covers mass {covered}"))?;
        let r = invariance_residual(&map, &m.atoms, &cells);
        ensure(r < 0.01, format!("cell residual {r}"))?;
        report.push(format!("residual {r:.1e}"));
    }
    let cheb = quadratic(-2.0, 0.0);
    let m =
        lyubich_measure(&cheb, 16, &julia_seeds(&cheb).map_err(|e| e.to_string())?[0]).map_err(|e| e.to_string())?;
    let samples: Vec<(f64, f64)> = m
        .atoms
        .iter()
        .map(|a| (a.point.finite().unwrap().re, a.weight))
        .collect();
    let ks = ks_distance(&samples, arcsine_cdf);
    ensure(ks < 0.02, format!("KS {ks}"))?;
    report.push(format!("KS {ks:.1e}"));
    Ok(report.join(", "))
}

fn bowen_roots() -> Outcome {
    let oracle = 1.0 + 0.01 / (4.0 * 2f64.ln());
    let cases = [(0.0, 1.0, 0.01), (0.1, oracle, 0.005), (-2.0, 1.0, 0.02)];
    let mut report = Vec::new();
    for (c, target, tol) in cases {
        let est = bowen_dimension(&quadratic(c, 0.0), 1e-8).map_err(|e| e.to_string())?;
        ensure(
            (est.value - target).abs() <= tol,
            format!("c={c}: {} vs {target} ± {tol}", est.value),
        )?;
        report.push(format!("{:.4}", est.value));
    }
    Ok(format!("δ* = {}", report.join(", ")))
}

fn misiurewicz_pattern() -> Outcome {
    let map = quadratic(0.0, 1.0);
    let dim = bowen_dimension(&map, 1e-8).map_err(|e| e.to_string())?;
    let ce = Assumptions {
        collet_eckmann: true,
        critical_preperiodic: Some(true),
    };
    let opts = CensusOptions {
        dimension: Some(dim.clone()),
        ..Default::default()
    };
    let spec = CocycleSpec::Conformal {
        metric: MetricSpec::Flat,
    };
    let betas = [
        dim.value - 0.2,
        dim.value - 0.5 * dim.error,
        dim.value,
        dim.value + 0.5 * dim.error,
        dim.value + 0.2,
    ];
    let mut totals = Vec::new();
    for b in betas {
        let c = kms_census_with(&map, Region::Julia, b, &spec, &ce, &opts).map_err(|e| e.to_string())?;
        totals.push(c.total);
    }
    ensure(totals == [0, 1, 1, 1, 0], format!("totals {totals:?}"))?;
    Ok(format!("HD {:.4} ± {:.0e}, totals {totals:?}", dim.value, dim.error))
}

// Property checks, the same invariants as the core property suite.

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn small_c() -> impl Strategy<Value = Complex64> {
    (0.0..0.3f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn annulus(r0: f64, r1: f64) -> impl Strategy<Value = SpherePoint> {
    (r0..r1, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| SpherePoint::Finite(Complex64::from_polar(r, t)))
}

fn descend(map: &RationalMap, w: SpherePoint, branches: &[usize]) -> SpherePoint {
    branches.iter().fold(w, |z, &b| {
        let pre = map.preimages(&z);
        pre[b % pre.len()].point
    })
}

fn numeric_order(map: &RationalMap, n: usize, x: Complex64) -> usize {
    let f = |u: Complex64| map.iterate(n, &SpherePoint::Finite(u)).finite().unwrap();
    let dir = Complex64::from_polar(1.0, 0.37);
    let d1 = (f(x + dir * 1e-2) - f(x)).norm();
    let d2 = (f(x + dir * 1e-3) - f(x)).norm();
    (d1 / d2).log10().round() as usize
}

fn cocycle_additivity() -> Result<(), String> {
    let specs = [
        CocycleSpec::Conformal {
            metric: MetricSpec::Flat,
        },
        CocycleSpec::Conformal {
            metric: MetricSpec::Chordal,
        },
        CocycleSpec::Gauge,
    ];
    let strategy = (
        small_c(),
        annulus(0.4, 1.8),
        (0usize..3, 0usize..3, 0usize..3, 0usize..3),
        proptest::collection::vec(0usize..2, 6),
    );
    runner(64)
        .run(&strategy, |(c, x, (n1, l1, n2, l2), b)| {
            let map = RationalMap::quadratic(c);
            let z1 = descend(&map, map.iterate(n1, &x), &b[..l1]);
            let z2 = descend(&map, map.iterate(n2, &z1), &b[3..3 + l2]);
            let p1 = TransferPath::new(&map, x, n1, z1, l1).unwrap();
            let p2 = TransferPath::new(&map, z1, n2, z2, l2).unwrap();
            let p = p1.then(&p2, &map).unwrap();
            for spec in &specs {
                let whole = cocycle_value(spec, &p, &map).unwrap();
                let parts = cocycle_value(spec, &p1, &map).unwrap() + cocycle_value(spec, &p2, &map).unwrap();
                prop_assert!((whole - parts).abs() < 1e-9);
            }
            Ok(())
        })
        .map_err(|e| format!("cocycle additivity: {e}"))
}

fn normalization() -> Result<(), String> {
    runner(64)
        .run(&(small_c(), annulus(0.4, 1.8), 1.0..3.0f64), |(c, x, beta)| {
            let m = atomic_measure(&RationalMap::quadratic(c), &x, beta, &CocycleSpec::Gauge, 8).unwrap();
            prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
            Ok(())
        })
        .map_err(|e| format!("normalization: {e}"))
}

fn germ_counts() -> Result<(), String> {
    let strategy = (
        small_c(),
        annulus(0.4, 1.8),
        1usize..4,
        proptest::collection::vec(0usize..2, 4),
    );
    runner(20)
        .run(&strategy, |(c, x, k, b)| {
            let map = RationalMap::quadratic(c);
            let y = descend(&map, SpherePoint::ZERO, &b[..k]);
            let g = map.germ_count(1, &SpherePoint::ZERO, k + 1, &y).unwrap();
            prop_assert_eq!(g, numeric_order(&map, k + 1, y.finite().unwrap()));
            let y = descend(&map, x, &b[..k]);
            let g = map.germ_count(0, &x, k, &y).unwrap();
            prop_assert_eq!(g, numeric_order(&map, k, y.finite().unwrap()));
            Ok(())
        })
        .map_err(|e| format!("germ count: {e}"))
}

fn chart_consistency() -> Result<(), String> {
    let strategy = (
        proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 6),
        annulus(0.5, 2.0),
    );
    runner(64)
        .run(&strategy, |(coeffs, x)| {
            let c: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            let Ok(map) = RationalMap::new(Poly::new(c[..3].to_vec()), Poly::new(c[3..].to_vec())) else {
                return Ok(());
            };
            let Some(w) = map.eval(&x).finite() else { return Ok(()) };
            if map.degree() != 2 || w.norm() < 0.1 || w.norm() > 10.0 {
                return Ok(());
            }
            let reference = map.derivative_norm(&x, &MetricSpec::Chordal);
            for s in [Chart::Z, Chart::W] {
                for t in [Chart::Z, Chart::W] {
                    let v = map.derivative_norm_in_charts(&x, s, t, &MetricSpec::Chordal).unwrap();
                    prop_assert!((v - reference).abs() <= 1e-9 * reference.max(1.0));
                }
            }
            Ok(())
        })
        .map_err(|e| format!("chart consistency: {e}"))
}

fn reweight_invariance() -> Result<(), String> {
    let map = quadratic(-1.9, 0.0);
    let dim = kms_dynamics::thermo::DimensionEstimate {
        value: 1.12,
        error: 0.02,
        non_rigorous: true,
        by_depth: Vec::new(),
    };
    let mut opts = CensusOptions {
        dimension: Some(dim),
        ..Default::default()
    };
    opts.series.depth = 10;
    let assume = Assumptions {
        collet_eckmann: true,
        critical_preperiodic: None,
    };
    runner(12)
        .run(&(-0.5..0.5f64, -0.5..0.5f64, 0.1..0.6f64), |(a, b, dbeta)| {
            let r = Weight::new("exp", move |p: &SpherePoint| {
                let z = p.finite().unwrap();
                (a * z.re + b * z.im).exp()
            });
            let flat = CocycleSpec::Conformal {
                metric: MetricSpec::Flat,
            };
            let weighted = CocycleSpec::Conformal {
                metric: MetricSpec::weighted(BaseMetric::Flat, r.clone()),
            };
            let beta = 1.14 + dbeta;
            let c1 = kms_census_with(&map, Region::Julia, beta, &flat, &assume, &opts).unwrap();
            let c2 = kms_census_with(&map, Region::Julia, beta, &weighted, &assume, &opts).unwrap();
            prop_assert_eq!(c1.total, c2.total);
            let x = SpherePoint::real(0.3);
            let m1 = atomic_measure(&map, &x, beta + 1.0, &flat, 8).unwrap();
            let m2 = atomic_measure(&map, &x, beta + 1.0, &weighted, 8).unwrap();
            for (u, v) in m2.atoms.iter().zip(&reweight_measure(&m1, &r).atoms) {
                prop_assert!((u.weight - v.weight).abs() < 1e-9);
            }
            Ok(())
        })
        .map_err(|e| format!("reweight invariance: {e}"))
}

fn chain_rule() -> Result<(), String> {
    runner(64)
        .run(
            &(small_c(), annulus(0.4, 1.8), any::<bool>(), 0usize..1000),
            |(c, x, chordal, pick)| {
                let map = RationalMap::quadratic(c);
                let metric = if chordal { MetricSpec::Chordal } else { MetricSpec::Flat };
                let tree = backward_tree(&map, &x, 6, &metric).unwrap();
                let i = pick % tree.nodes.len();
                let node = &tree.nodes[i];
                let direct: f64 = tree.path(i)[..node.generation]
                    .iter()
                    .map(|p| map.derivative_norm(p, &metric).ln())
                    .sum();
                prop_assert!((node.log_derivative - direct).abs() < 1e-6);
                Ok(())
            },
        )
        .map_err(|e| format!("chain rule: {e}"))
}

/// Runs every command and format twice and compares the bytes written.
fn cli_reproducibility() -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rees = [
        "--map",
        "l*(1-2/z)^2",
        "--param",
        "l=0.75+0.5i",
        "--julia-is-sphere",
        "--seed",
        "7",
    ];
    let misiurewicz = ["--map", "z^2+c", "--param", "c=i", "--assume-ce"];
    let runs: Vec<Vec<&str>> = vec![
        vec!["classify", "--point", "0", "--map", "z^2-2"],
        vec!["census", "--beta", "0.5,logd,1", "--format", "json"],
        vec!["census", "--beta", "0.5,logd,1", "--format", "csv"],
        [
            &misiurewicz[..],
            &[
                "phase-diagram",
                "--beta-min",
                "1",
                "--beta-max",
                "1.5",
                "--steps",
                "5",
                "--format",
                "csv",
            ],
        ]
        .concat(),
        [
            &misiurewicz[..],
            &[
                "phase-diagram",
                "--beta-min",
                "1",
                "--beta-max",
                "1.5",
                "--steps",
                "5",
                "--format",
                "json",
            ],
        ]
        .concat(),
        [
            &misiurewicz[..],
            &[
                "phase-diagram",
                "--beta-min",
                "1",
                "--beta-max",
                "1.5",
                "--steps",
                "5",
                "--format",
                "png",
            ],
        ]
        .concat(),
        vec!["julia", "--map", "z^2-1", "--resolution", "96"],
        [&rees[..], &["julia", "--resolution", "96", "--points", "20000"]].concat(),
        vec!["pressure", "--format", "csv"],
        vec!["pressure", "--format", "json"],
        vec!["--depth", "10", "measure", "--format", "csv"],
        vec!["--depth", "10", "measure", "--format", "json"],
        vec!["--depth", "10", "measure", "--format", "cloud"],
        vec![
            "--seed", "3", "measure", "--kind", "eigen", "--delta", "1", "--format", "cloud",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("{i}-{rep}"));
            let mut argv = vec!["rkms"];
            argv.extend(args.iter().copied());
            argv.extend(["--out", path.to_str().unwrap()]);
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = kms_dynamics_cli::run_args(argv, &mut out, &mut err);
            ensure(
                code == 0,
                format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&err)),
            )?;
            outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
        }
        ensure(
            !outputs[0].is_empty() && outputs[0] == outputs[1],
            format!("{args:?} is not reproducible"),
        )?;
    }
    Ok(runs.len())
}

fn property_suites() -> Outcome {
    cocycle_additivity()?;
    normalization()?;
    germ_counts()?;
    chart_consistency()?;
    reweight_invariance()?;
    chain_rule()?;
    let n = cli_reproducibility()?;
    Ok(format!("6 property suites, {n} CLI outputs byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("gauge census of z^2", 5, square_map_census),
        ("Rees map states at 0", 5, rees_census),
        ("ordinary vs groupoid residual", 1, parabolic_discriminator),
        ("isotropy witnesses", 2, isotropy_table),
        ("Poincaré increment rate", 30, increment_rate),
        ("Lyubich invariance", 60, lyubich_invariance),
        ("Bowen dimension", 120, bowen_roots),
        ("Misiurewicz phase pattern", 120, misiurewicz_pattern),
        ("property suites", 600, property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "{tag} {} {name:<32} {:>8.2} s (limit {limit} s)  {detail}",
            i + 1,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
