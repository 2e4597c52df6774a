mod common;

use common::{exhaustive_minimum, random_qubo, rng, scaled_params, EntryOracle};
use moqubo_core::anneal::{acceptance_probability, run_da, AnnealParams};
use moqubo_core::qap::{build_constraint_qubo, build_cost_qubo, penalty_weight};
use moqubo_core::Error;

#[test]
fn identical_seeds_give_identical_runs() {
    let q = random_qubo(&mut rng(3), 20, 50);
    let p = AnnealParams::defaults_for_size(20, 17);
    assert_eq!(run_da(&q, &p, true).unwrap(), run_da(&q, &p, true).unwrap());
    let other = run_da(&q, &AnnealParams { seed: 18, ..p }, true).unwrap();
    assert_ne!(other.trace, run_da(&q, &p, true).unwrap().trace);
}

#[test]
fn trace_invariants_hold() {
    for seed in 0..10 {
        let q = random_qubo(&mut rng(seed), 16, 40);
        let params = scaled_params(400, 200.0, seed);
        let out = run_da(&q, &params, true).unwrap();
        let recs = &out.trace.records;
        assert_eq!(recs.len(), 400);
        assert_eq!(out.best_energy, EntryOracle::new(&q).energy(&out.best));
        assert_eq!(recs.last().unwrap().best_energy, out.best_energy);

        let mut prev_offset = 0.0;
        let mut prev_best = i64::MAX;
        let mut prev_temp = f64::INFINITY;
        let mut stuck = 0u64;
        for r in recs {
            assert!(r.best_energy <= prev_best);
            assert!(r.temperature <= prev_temp);
            assert!(r.temperature > params.delta_f * (1.0 - params.xi));
            if r.offset == 0.0 {
                prev_offset = 0.0;
            } else {
                assert_eq!(r.offset, prev_offset + params.beta, "offset must grow by beta per stuck iteration");
                prev_offset = r.offset;
                stuck += 1;
            }
            prev_best = r.best_energy;
            prev_temp = r.temperature;
        }
        assert_eq!(out.applied_flips + stuck, 400);
        assert_eq!(out.coupling_builds, 1);
    }
}

#[test]
fn tracing_does_not_change_the_result() {
    let q = random_qubo(&mut rng(9), 12, 30);
    let p = scaled_params(300, 100.0, 4);
    let a = run_da(&q, &p, true).unwrap();
    let b = run_da(&q, &p, false).unwrap();
    assert_eq!((a.best, a.best_energy, a.applied_flips), (b.best, b.best_energy, b.applied_flips));
    assert!(b.trace.records.is_empty());
}

#[test]
fn scaled_schedule_finds_exhaustive_minimum() {
    let mut hits = 0;
    for seed in 0..20 {
        let q = random_qubo(&mut rng(100 + seed), 12, 20);
        let (min, _) = exhaustive_minimum(&q);
        let out = run_da(&q, &scaled_params(3000, 60.0, seed), false).unwrap();
        assert!(out.best_energy >= min);
        hits += usize::from(out.best_energy == min);
    }
    assert!(hits >= 18, "only {hits}/20 runs reached the minimum");
}

#[test]
fn penalised_worked_example_reaches_optimum_with_scaled_schedule() {
    let inst = common::worked_instance();
    let c = build_cost_qubo(&inst, 0).unwrap();
    let q = c.add_scaled(&build_constraint_qubo(3).unwrap(), penalty_weight(&c)).unwrap();
    let (min, _) = exhaustive_minimum(&q);
    assert_eq!(min, 32);
    for seed in 0..20 {
        let out = run_da(&q, &scaled_params(2000, 200.0, seed), false).unwrap();
        assert_eq!(out.best_energy, min, "seed {seed}");
    }
}

#[test]
fn acceptance_probability_properties() {
    assert_eq!(acceptance_probability(-5.0, 0.0, 1.0).unwrap(), 1.0);
    assert_eq!(acceptance_probability(0.0, 0.0, 1.0).unwrap(), 1.0);
    assert_eq!(acceptance_probability(10.0, 10.0, 3.0).unwrap(), 1.0);
    let p = acceptance_probability(2.0, 0.0, 1.0).unwrap();
    assert!((p - (-2.0f64).exp()).abs() < 1e-15);
    assert!(acceptance_probability(3.0, 1.0, 1.0).unwrap() > p - 1e-15);
    assert_eq!(acceptance_probability(1.0, 0.0, 0.0), Err(Error::NonPositiveTemperature(0.0)));
}

#[test]
fn invalid_schedules_are_rejected() {
    let q = random_qubo(&mut rng(1), 4, 5);
    let base = AnnealParams::defaults_for_size(4, 0);
    for bad in [
        AnnealParams { delta0: 0.0, ..base },
        AnnealParams { delta_f: -1.0, ..base },
        AnnealParams { xi: 1.0, ..base },
        AnnealParams { xi: -0.1, ..base },
        AnnealParams { beta: -1.0, ..base },
    ] {
        assert!(run_da(&q, &bad, false).is_err(), "{bad:?}");
    }
}
