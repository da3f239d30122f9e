//! Convex-roof optimizer, trial decompositions and the analytic reduced
//! states of the W families.

use tangle_core::convexroof::{decomposition_from_mixer, ensemble_average_tangle, optimize_roof};
use tangle_core::measures::{mixed_family_tangle, wootters_tangle};
use tangle_core::monogamy::{check_ckw, check_generalized};
use tangle_core::qstate::partial_trace;
use tangle_core::rng;
use tangle_core::states::{
    self, mixed_family, random_mixed, random_partitioned_w, random_pure, reduced_block_analytic, reduced_pair_analytic,
    trial_ensemble, trial_ensemble_with, w_partitioned,
};
use tangle_core::{certified_tangle, CMatrix, MixedFamilySpec, Partition, QubitCut, RoofConfig, WClassSpec, C64};

fn spec(a: f64, b: &[f64], p: f64) -> MixedFamilySpec {
    MixedFamilySpec::new(WClassSpec::from_real(a, b).unwrap(), p).unwrap()
}

#[test]
fn trial_family_reproduces_the_state_and_is_minimal_at_q_equal_p() {
    let (a, b) = (0.6, [0.48, 0.64]);
    let (a2, b2) = (0.36, 0.64);
    for i in 1..=10 {
        let p = i as f64 / 10.0;
        let s = spec(a, &b, p);
        let rho = mixed_family(&s);
        for j in 0..=5 {
            let q = p + (1.0 - p) * j as f64 / 5.0;
            let e = trial_ensemble_with(&s, q).unwrap();
            assert!(rho.distance(e.mixture().matrix()) < 1e-12, "p={p} q={q}");
            let avg = ensemble_average_tangle(&e, &QubitCut::single(0)).unwrap();
            assert!((avg - 4.0 * p * q * a2 * b2).abs() < 1e-12, "p={p} q={q}");
        }
        let best = ensemble_average_tangle(&trial_ensemble(&s), &QubitCut::single(0)).unwrap();
        assert!((best - mixed_family_tangle(&s).value).abs() < 1e-12);
    }
    assert!(trial_ensemble_with(&spec(a, &b, 0.5), 0.4).is_err());
}

#[test]
fn trial_ensemble_is_a_unitary_mixing_of_the_spectrum() {
    let s = spec(0.5, &[0.5, 0.5, 0.5], 0.7);
    let rho = mixed_family(&s);
    let e = rho.eigh();
    let trial = trial_ensemble(&s);
    // U_jk = ⟨v_k|ψ̃_j⟩ / √μ_k with ψ̃_j = √w_j ψ_j
    let mixer = CMatrix::from_fn(3, 2, |j, k| {
        let m = &trial.members()[j];
        let overlap: C64 = (0..rho.dim()).map(|i| e.vectors[(i, k)].conj() * m.state.amplitudes()[i]).sum();
        overlap * (m.weight / e.values[k]).sqrt()
    });
    assert!((mixer.adjoint() * &mixer - CMatrix::identity(2, 2)).norm() < 1e-12);
    let rebuilt = decomposition_from_mixer(&rho, &mixer).unwrap();
    let avg = ensemble_average_tangle(&rebuilt, &QubitCut::single(0)).unwrap();
    assert!((avg - mixed_family_tangle(&s).value).abs() < 1e-12);
    for (x, y) in rebuilt.members().iter().zip(trial.members()) {
        assert!((x.weight - y.weight).abs() < 1e-12);
        assert!((x.state.inner(&y.state).norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn analytic_block_states_match_partial_traces() {
    let mut r = rng::seeded(41);
    for i in 0..100 {
        let shape: Vec<usize> = match i % 4 {
            0 => vec![1, 2],
            1 => vec![2, 2],
            2 => vec![1, 1, 2],
            _ => vec![3, 1],
        };
        let spec = random_partitioned_w(&shape, &mut r).unwrap();
        let (psi, partition) = w_partitioned(&spec).unwrap();
        for block in partition.blocks() {
            let mut keep = vec![0];
            keep.extend(&block.qubits);
            let direct = psi.reduced(&keep).unwrap();
            let analytic = mixed_family(&reduced_block_analytic(&spec, &block.name).unwrap());
            assert!(direct.distance(analytic.matrix()) < 1e-13, "sample {i} block {}", block.name);
        }
    }
}

#[test]
fn analytic_pair_states_match_partial_traces() {
    let mut r = rng::seeded(42);
    for i in 0..50 {
        let w = states::random_w_class(2 + i % 4, &mut r).unwrap();
        let s = MixedFamilySpec::new(w, (i as f64 + 0.5) / 50.0).unwrap();
        let rho = mixed_family(&s);
        for j in 1..s.n_qubits() {
            let direct = partial_trace(&rho, &[0, j]).unwrap();
            let analytic = reduced_pair_analytic(&s, j).unwrap();
            assert!(direct.distance(analytic.matrix()) < 1e-13, "sample {i} pair {j}");
        }
    }
}

#[test]
fn every_decomposition_bounds_the_tangle_from_above() {
    for seed in 0..30u64 {
        let rho = random_mixed(2, 3, 70 + seed).unwrap();
        let exact = wootters_tangle(&rho).unwrap().value;
        let mut g = rng::seeded(seed);
        for m in 3..=6 {
            let u = rng::random_unitary(m, &mut g).columns(0, 3).into_owned();
            let e = decomposition_from_mixer(&rho, &u).unwrap();
            assert!(rho.distance(e.mixture().matrix()) < 1e-12);
            assert!(ensemble_average_tangle(&e, &QubitCut::single(0)).unwrap() >= exact - 1e-12);
        }
    }
}

#[test]
fn more_restarts_never_raise_the_bound() {
    for seed in 0..5u64 {
        let rho = random_mixed(3, 3, 300 + seed).unwrap();
        let cut = QubitCut::single(1);
        let mut previous = f64::INFINITY;
        for restarts in [1, 2, 4, 8] {
            let cfg = RoofConfig { restarts, ..RoofConfig::default().with_seed(seed) };
            let upper = optimize_roof(&rho, &cut, &cfg).unwrap().upper;
            assert!(upper <= previous + 1e-15, "seed {seed} restarts {restarts}");
            previous = upper;
        }
    }
}

#[test]
fn optimizer_is_deterministic_for_a_seed() {
    let rho = random_mixed(3, 2, 12).unwrap();
    let cfg = RoofConfig { restarts: 3, ..RoofConfig::default().with_seed(9) };
    let a = optimize_roof(&rho, &QubitCut::single(0), &cfg).unwrap();
    let b = optimize_roof(&rho, &QubitCut::single(0), &cfg).unwrap();
    assert_eq!(a.upper.to_bits(), b.upper.to_bits());
}

#[test]
fn singleton_blocks_reduce_to_ckw() {
    for seed in 0..20u64 {
        let n = 3 + seed as usize % 2;
        let psi = random_pure(n, 800 + seed).unwrap();
        for focus in 0..n {
            let ckw = check_ckw(&psi, focus).unwrap();
            let general = check_generalized(&psi, &Partition::singletons(n, focus).unwrap(), &RoofConfig::default()).unwrap();
            assert_eq!(ckw.verdict, general.verdict);
            assert!((ckw.slack - general.slack).abs() < 1e-14);
            assert!(general.certified());
        }
    }
}

#[test]
fn certified_bracket_contains_the_closed_form() {
    for (a, b, p) in [(0.6, vec![0.8], 0.3), (0.5, vec![0.5, 0.5, 0.5], 0.9), (0.8, vec![0.36, 0.48], 0.55)] {
        let s = spec(a, &b, p);
        let bracket = certified_tangle(&mixed_family(&s), 0, &RoofConfig::default()).unwrap();
        assert!(bracket.certified);
        assert!(bracket.lower <= bracket.upper + 1e-12);
        assert!(bracket.contains(mixed_family_tangle(&s).value, 1e-9));
    }
}

#[test]
fn random_pure_marginals_are_maximally_mixed_on_average() {
    let mut acc = CMatrix::zeros(2, 2);
    let samples = 4000;
    for seed in 0..samples {
        acc += partial_trace(&random_pure(3, seed).unwrap().projector(), &[1]).unwrap().matrix();
    }
    let mean = acc.unscale(samples as f64);
    let target = CMatrix::identity(2, 2).scale(0.5);
    // standard error of each entry is about 0.2/√samples
    assert!((mean - target).norm() < 0.02);
}
