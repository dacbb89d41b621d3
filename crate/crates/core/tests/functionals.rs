use rand::SeedableRng;
use ratmvc_core::fixtures;
use ratmvc_core::newton::{all_critical_fixed, h_condition_check, newton_map};
use ratmvc_core::sample::{
    box_c64, random_affine, random_polynomial, random_squarefree, trial_seed, TrialRng,
};
use ratmvc_core::search::{
    load_witness, reevaluate, run_search, witness_archive, Objective, SearchConfig, Witness,
};
use ratmvc_core::smale::{smale_quantity, thm1_report};
use ratmvc_core::sphere::DEFAULT_POINT_TOL as TOL;
use ratmvc_core::{Error, Polynomial, RationalMap, SpherePoint, C64};

#[test]
fn smale_is_affine_invariant() {
    for i in 0..200 {
        let mut rng = TrialRng::seed_from_u64(trial_seed(800, i));
        let p = random_polynomial(&mut rng, 2 + (i as usize % 6));
        let x = box_c64(&mut rng);
        let Ok(s) = smale_quantity(&p, x, TOL) else {
            continue;
        };
        let (a, b) = (random_affine(&mut rng), random_affine(&mut rng));
        let [a1, a0, _, ad] = a.entries();
        let [b1, b0, _, bd] = b.entries();
        // A ∘ p ∘ B with A(w) = (a1 w + a0)/ad, B(z) = (b1 z + b0)/bd
        let inner = Polynomial::new(vec![b0 / bd, b1 / bd]);
        let moved = (&p.compose(&inner).scale(a1 / ad)) + &Polynomial::constant(a0 / ad);
        let x2 = (x - b0 / bd) / (b1 / bd);
        let s2 = smale_quantity(&moved, x2, TOL).unwrap();
        assert!(
            (s - s2).abs() <= 1e-8 * s.max(1.0),
            "trial {i}: {s} vs {s2}"
        );
    }
}

#[test]
fn polynomial_candidates_with_y_infinity() {
    for i in 0..100 {
        let mut rng = TrialRng::seed_from_u64(trial_seed(801, i));
        let p = random_polynomial(&mut rng, 2 + (i as usize % 5));
        let x = box_c64(&mut rng);
        let Ok(s) = smale_quantity(&p, x, TOL) else {
            continue;
        };
        let r = RationalMap::polynomial(p.clone()).unwrap();
        let rep = thm1_report(&r, SpherePoint::Finite(x), SpherePoint::Infinity, TOL).unwrap();
        let dp = p.derivative().eval(x);
        for c in &rep.candidates {
            let z = c.critical[0].as_finite().unwrap();
            let want = (dp * (z - x) / (p.eval(z) - p.eval(x))).norm();
            assert!((c.value - want).abs() <= 1e-9 * want.max(1.0));
        }
        assert!((rep.best.unwrap() - 1.0 / s).abs() <= 1e-9 * (1.0 / s).max(1.0));
    }
}

#[test]
fn h_condition_implies_fixed_critical_points() {
    // a (z - c)^n + b (z - c) always satisfies the condition
    for i in 0..30 {
        let mut rng = TrialRng::seed_from_u64(trial_seed(802, i));
        let n = 2 + (i as usize % 5);
        let (a, b, c) = (box_c64(&mut rng), box_c64(&mut rng), box_c64(&mut rng));
        let shift = Polynomial::new(vec![-c, C64::new(1.0, 0.0)]);
        let h = &shift.pow(n).scale(a) + &shift.scale(b);
        let rep = h_condition_check(&h).unwrap();
        assert!(rep.holds, "trial {i}");
        let r = newton_map(&h, &Polynomial::one()).unwrap();
        assert!(all_critical_fixed(&r).unwrap().all_fixed, "trial {i}");
    }
    assert!(
        all_critical_fixed(&fixtures::quartic_newton_map())
            .unwrap()
            .all_fixed
    );
}

#[test]
fn finite_fixed_points_of_all_critical_fixed_newton_maps_are_critical() {
    let mut seen = 0;
    for i in 0..200 {
        let mut rng = TrialRng::seed_from_u64(trial_seed(803, i));
        let (g, _) = random_squarefree(&mut rng, 2 + (i as usize % 5), 1e-2);
        let r = newton_map(&g, &Polynomial::one()).unwrap();
        if !all_critical_fixed(&r).unwrap().all_fixed {
            continue;
        }
        seen += 1;
        for f in r.fixed_points().unwrap() {
            if !f.location.is_infinite() {
                assert!(f.is_critical);
            }
        }
    }
    // quadratics are always in this class
    assert!(seen >= 40);
}

#[test]
fn witness_archive_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SearchConfig::new(3, Objective::Thm2BestMin);
    cfg.restarts = 2;
    cfg.max_evals = 200;
    cfg.seed = 5;
    let res = run_search(&cfg).unwrap();
    let path = dir.path().join("w.json");
    let archived = witness_archive(&res, &path).unwrap();
    let loaded = load_witness(&path).unwrap();
    let v = reevaluate(&loaded).unwrap();
    assert!((v - archived.value).abs() <= 1e-10 * v.max(1.0));

    std::fs::write(&path, "{\"config\": 3").unwrap();
    assert!(matches!(load_witness(&path), Err(Error::Parse(_))));

    let mut tampered = loaded.clone();
    tampered.value += 1e-3;
    assert!(matches!(
        reevaluate(&tampered),
        Err(Error::WitnessMismatch { .. })
    ));
}

#[test]
fn p0_witness_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p0.json");
    let witness = Witness {
        objective: Objective::Thm1BestMin,
        degree: 4,
        polynomial: None,
        map: Some(fixtures::p0(4)),
        x: SpherePoint::finite(0.0, 0.0),
        y: Some(SpherePoint::Infinity),
    };
    let value = witness.evaluate().unwrap();
    assert!((value - 4.0 / 3.0).abs() < 1e-12);
    let archive = ratmvc_core::search::WitnessArchive {
        config: SearchConfig::new(4, Objective::Thm1BestMin),
        seed: 0,
        witness,
        value,
        recomputed: value,
    };
    std::fs::write(&path, serde_json::to_string(&archive).unwrap()).unwrap();
    assert!((reevaluate(&load_witness(&path).unwrap()).unwrap() - value).abs() < 1e-14);
}

#[test]
fn search_respects_theorem_bounds() {
    for obj in [
        Objective::Thm1BestMin,
        Objective::Thm2BestMin,
        Objective::SmaleMax,
    ] {
        let mut cfg = SearchConfig::new(3, obj);
        cfg.restarts = 3;
        cfg.max_evals = 400;
        cfg.seed = 17;
        let res = run_search(&cfg).unwrap();
        assert_eq!(res.bound_violations(), 0);
        for r in &res.trace {
            let h: Vec<f64> = r.history.iter().map(|h| h.1).collect();
            let improving = if obj.maximises() {
                h.windows(2).all(|w| w[1] > w[0])
            } else {
                h.windows(2).all(|w| w[1] < w[0])
            };
            assert!(improving);
        }
    }
}
