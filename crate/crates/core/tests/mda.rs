mod common;

use common::*;
use moqubo_core::archive::{ArchivePolicy, EnergyVector};
use moqubo_core::mda::{
    build_objective_pair, lenient_probability, run_mda, strict_probability, AcceptanceRule, MdaParams, ObjectivePair,
};
use moqubo_core::qap::{
    build_constraint_qubo, build_cost_qubo, decode_solution, generate_instance, penalty_weight, QapInstance,
};
use moqubo_core::anneal::AnnealParams;
use proptest::prelude::*;

fn pair_for(inst: &QapInstance) -> ObjectivePair {
    let r = build_cost_qubo(inst, 0).unwrap();
    let s = build_cost_qubo(inst, 1).unwrap();
    let g = build_constraint_qubo(inst.n()).unwrap();
    build_objective_pair(&r, &s, &g, penalty_weight(&r), penalty_weight(&s)).unwrap()
}

fn params(pair: &ObjectivePair, i_max: u64, seed: u64, acceptance: AcceptanceRule, policy: ArchivePolicy) -> MdaParams {
    let delta0 = pair.y.max_abs_coefficient().max(pair.z.max_abs_coefficient()) as f64;
    MdaParams { anneal: scaled_params(i_max, delta0, seed), acceptance, archive_policy: policy, capacity: pair.size() }
}

const RULES: [AcceptanceRule; 2] = [AcceptanceRule::Strict, AcceptanceRule::Lenient];
const POLICIES: [ArchivePolicy; 2] = [ArchivePolicy::Explore, ArchivePolicy::Exploit];

proptest! {
    #[test]
    fn strict_never_exceeds_lenient(de1 in -1e6f64..1e6, de2 in -1e6f64..1e6, t in 1e-3f64..1e9) {
        let s = strict_probability(de1, de2, t).unwrap();
        let l = lenient_probability(de1, de2, t).unwrap();
        prop_assert!(s <= l);
        prop_assert!((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&l));
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let pair = pair_for(&generate_instance(4, 2, 0.0, 1).unwrap());
    for rule in RULES {
        for policy in POLICIES {
            let p = params(&pair, 500, 7, rule, policy);
            assert_eq!(run_mda(&pair, &p, true).unwrap(), run_mda(&pair, &p, true).unwrap());
        }
    }
}

#[test]
fn archive_and_front_invariants() {
    for seed in 0..6 {
        let inst = generate_instance(4, 2, 0.2, seed).unwrap();
        let pair = pair_for(&inst);
        let (oy, oz) = (EntryOracle::new(&pair.y), EntryOracle::new(&pair.z));
        for rule in RULES {
            for policy in POLICIES {
                let p = params(&pair, 800, seed, rule, policy);
                let out = run_mda(&pair, &p, true).unwrap();
                assert_eq!(out.coupling_builds, 2);
                assert!(out.archive.len() <= p.capacity);
                assert!(!out.front.is_empty());
                assert!(out.front.len() <= p.capacity);
                for e in &out.archive {
                    assert_eq!(e.energies, EnergyVector::new(vec![oy.energy(&e.solution), oz.energy(&e.solution)]));
                }
                for a in &out.front {
                    assert!(out.archive.contains(a));
                    for b in &out.front {
                        assert!(!dominates(a.energies.values(), b.energies.values()));
                    }
                }
                assert_eq!(out.trace.len(), 800);
                assert_eq!(out.trace.iter().filter(|t| t.escaped).count() as u64, out.escapes);
                assert_eq!(out.applied_flips + out.escapes, 800);
                assert!(out.trace.iter().all(|t| t.archive_len >= 1 && t.archive_len <= p.capacity));
            }
        }
    }
}

#[test]
fn feasible_front_points_never_beat_the_true_front() {
    for seed in 0..3 {
        let inst = generate_instance(5, 2, 0.0, 50 + seed).unwrap();
        let truth = true_front(&inst);
        let pair = pair_for(&inst);
        let mut found_true_point = false;
        for run in 0..4 {
            let out = run_mda(&pair, &params(&pair, 6000, run, AcceptanceRule::Strict, ArchivePolicy::Explore), false)
                .unwrap();
            for e in &out.front {
                let Some(sigma) = decode_solution(&e.solution, 5).unwrap() else { continue };
                let costs = vec![direct_cost(&inst, 0, sigma.as_slice()), direct_cost(&inst, 1, sigma.as_slice())];
                // On feasible vectors the penalised energies equal the raw costs.
                assert_eq!(e.energies.values(), costs.as_slice());
                for t in &truth {
                    assert!(!dominates(&costs, t), "{costs:?} dominates true front point {t:?}");
                }
                found_true_point |= truth.contains(&costs);
            }
        }
        assert!(found_true_point, "instance {seed}: no run reached the true front");
    }
}

#[test]
fn identical_objectives_give_an_equal_energy_front() {
    let inst = generate_instance(4, 1, 0.0, 5).unwrap();
    let r = build_cost_qubo(&inst, 0).unwrap();
    let g = build_constraint_qubo(4).unwrap();
    let a = penalty_weight(&r);
    let pair = build_objective_pair(&r, &r, &g, a, a).unwrap();
    for rule in RULES {
        for policy in POLICIES {
            let out = run_mda(&pair, &params(&pair, 1000, 3, rule, policy), false).unwrap();
            let first = &out.front[0].energies;
            assert!(out.front.iter().all(|e| &e.energies == first));
            assert_eq!(first.values()[0], first.values()[1]);
        }
    }
}

#[test]
fn rejects_bad_configuration() {
    let pair = pair_for(&generate_instance(3, 2, 0.0, 0).unwrap());
    let ok = params(&pair, 10, 0, AcceptanceRule::Strict, ArchivePolicy::Explore);
    assert!(run_mda(&pair, &MdaParams { capacity: 0, ..ok }, false).is_err());
    assert!(run_mda(&pair, &MdaParams { anneal: AnnealParams { delta0: -1.0, ..ok.anneal }, ..ok }, false).is_err());
    let small = build_constraint_qubo(2).unwrap();
    assert!(ObjectivePair::new(pair.y.clone(), small).is_err());
}
