//! Property tests: structural invariants that hold for every input.

use proptest::prelude::*;
use tangle_core::measures::{negativity, pure_tangle, realignment_measure, wootters_tangle};
use tangle_core::qstate::{partial_trace, partial_transpose, realign, trace_norm};
use tangle_core::states::{random_mixed, w_class, EnsembleMember};
use tangle_core::{CMatrix, Ensemble, PureState, QubitCut, WClassSpec, C64};

fn pure_state(n: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(move |v| PureState::normalized(n, v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap())
}

/// `[[e^{iα} cos θ, e^{iβ} sin θ], [−e^{−iβ} sin θ, e^{−iα} cos θ]]`.
fn su2() -> impl Strategy<Value = [[C64; 2]; 2]> {
    (0.0f64..6.3, 0.0f64..6.3, 0.0f64..6.3).prop_map(|(t, a, b)| {
        let (c, s) = (t.cos(), t.sin());
        [
            [C64::from_polar(c, a), C64::from_polar(s, b)],
            [-C64::from_polar(s, -b), C64::from_polar(c, -a)],
        ]
    })
}

fn cut_of(mask: usize, n: usize) -> QubitCut {
    QubitCut::new((0..n).filter(|q| mask >> q & 1 == 1).collect::<Vec<_>>()).unwrap()
}

fn complement(cut: &QubitCut, n: usize) -> QubitCut {
    QubitCut::new(cut.side_b(n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_keeps_trace_and_hermiticity(seed in any::<u64>(), rank in 1usize..=16, keep in 1usize..15) {
        let rho = random_mixed(4, rank, seed).unwrap();
        let keep: Vec<usize> = (0..4).filter(|q| keep >> q & 1 == 1).collect();
        let r = partial_trace(&rho, &keep).unwrap();
        prop_assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!((r.matrix() - r.matrix().adjoint()).norm() < 1e-13);
    }

    #[test]
    fn tangle_is_symmetric_across_the_cut(psi in pure_state(4), mask in 1usize..15) {
        let cut = cut_of(mask, 4);
        let a = pure_tangle(&psi, &cut).unwrap().value;
        let b = pure_tangle(&psi, &complement(&cut, 4)).unwrap().value;
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-15..=2.0).contains(&a));
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>(), mask in 1usize..7) {
        let rho = random_mixed(3, 3, seed).unwrap();
        let on: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 1).collect();
        let once = partial_transpose(&rho, &on).unwrap();
        // the transposed matrix need not be PSD, so undo it by index swap
        let back = CMatrix::from_fn(8, 8, |i, j| {
            let m: usize = on.iter().map(|&q| 1 << (2 - q)).sum();
            once[((i & !m) | (j & m), (j & !m) | (i & m))]
        });
        prop_assert!((&back - rho.matrix()).norm() == 0.0);
    }

    #[test]
    fn product_states_are_not_entangled(a in pure_state(1), b in pure_state(2), sa in any::<u64>(), sb in any::<u64>()) {
        let psi = a.kron(&b).unwrap();
        let cut = QubitCut::single(0);
        prop_assert!(pure_tangle(&psi, &cut).unwrap().value < 1e-14);
        let rho_a = random_mixed(1, 2, sa).unwrap();
        let rho_b = random_mixed(2, 4, sb).unwrap();
        let product = rho_a.kron(&rho_b).unwrap();
        prop_assert!(trace_norm(&realign(&product, &cut).unwrap()) <= 1.0 + 1e-12);
        prop_assert!(realignment_measure(&product, &cut).unwrap().value < 1e-12);
        prop_assert!(negativity(&product, &cut).unwrap().value < 1e-12);
    }

    #[test]
    fn measures_are_local_unitary_invariant(psi in pure_state(3), u in su2(), v in su2(), q in 0usize..3) {
        let rotated = psi.apply_single_qubit(q, &u).unwrap().apply_single_qubit((q + 1) % 3, &v).unwrap();
        for mask in 1usize..7 {
            let cut = cut_of(mask, 3);
            let t0 = pure_tangle(&psi, &cut).unwrap().value;
            let t1 = pure_tangle(&rotated, &cut).unwrap().value;
            prop_assert!((t0 - t1).abs() < 1e-12);
            let n0 = negativity(&psi.projector(), &cut).unwrap().value;
            let n1 = negativity(&rotated.projector(), &cut).unwrap().value;
            prop_assert!((n0 - n1).abs() < 1e-10);
        }
        let c0 = wootters_tangle(&psi.reduced(&[0, 1]).unwrap()).unwrap().value;
        let c1 = wootters_tangle(&rotated.reduced(&[0, 1]).unwrap()).unwrap().value;
        prop_assert!((c0 - c1).abs() < 1e-10);
    }

    #[test]
    fn wootters_is_invariant_under_local_unitaries_on_mixtures(
        psis in prop::collection::vec(pure_state(2), 1..4),
        weights in prop::collection::vec(0.05f64..1.0, 4),
        u in su2(),
        v in su2(),
    ) {
        let total: f64 = weights[..psis.len()].iter().sum();
        let build = |rotate: bool| {
            let members = psis
                .iter()
                .zip(&weights)
                .map(|(p, w)| {
                    let state = if rotate { p.apply_single_qubit(0, &u).unwrap().apply_single_qubit(1, &v).unwrap() } else { p.clone() };
                    EnsembleMember { weight: w / total, state }
                })
                .collect();
            Ensemble::new(members).unwrap().mixture()
        };
        let (a, b) = (build(false), build(true));
        prop_assert!((wootters_tangle(&a).unwrap().value - wootters_tangle(&b).unwrap().value).abs() < 1e-9);
    }

    #[test]
    fn permuting_w_amplitudes_permutes_pair_tangles(
        a in 0.1f64..1.0,
        b in prop::collection::vec(0.1f64..1.0, 3),
        shift in 1usize..3,
    ) {
        let norm = (a * a + b.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let b: Vec<f64> = b.iter().map(|x| x / norm).collect();
        let spec = WClassSpec::from_real(a / norm, &b).unwrap();
        let mut rolled = b.clone();
        rolled.rotate_left(shift);
        let spec2 = WClassSpec::from_real(a / norm, &rolled).unwrap();
        let (w1, w2) = (w_class(&spec), w_class(&spec2));
        let cut = QubitCut::single(0);
        prop_assert!((pure_tangle(&w1, &cut).unwrap().value - pure_tangle(&w2, &cut).unwrap().value).abs() < 1e-13);
        for j in 0..3 {
            let k = (j + 3 - shift) % 3;
            let t1 = wootters_tangle(&w1.reduced(&[0, j + 1]).unwrap()).unwrap().value;
            let t2 = wootters_tangle(&w2.reduced(&[0, k + 1]).unwrap()).unwrap().value;
            prop_assert!((t1 - t2).abs() < 1e-12);
        }
    }
}
