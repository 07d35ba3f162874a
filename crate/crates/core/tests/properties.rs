use std::sync::Arc;

use proptest::prelude::*;

use zzsim::channels::{
    apply_decoherence, apply_gate, apply_zz, rb_step, DensityMatrix, GateLabel, NoiseParams,
};
use zzsim::coupler::omega_minus_of_flux;
use zzsim::hilbert::{build_hamiltonian, total_excitation, HilbertSpace};
use zzsim::linalg::{c, eigh, frobenius, spectral_map, CMatrix};
use zzsim::perturbation::{exchange_j, iswap_derivative_ratio, zeta_perturbative};
use zzsim::rb::{rb_curve, RbConfig, RbMode};
use zzsim::spectrum::{diagonalize, zeta_exact};
use zzsim::tomography::{
    gate_fidelity, nonphysical_error, project_physical, ptm_from_channel, ptm_from_unitary, sqrt_iswap,
    ThermalGateModel,
};
use zzsim::units::{ghz, mhz, TWO_PI};
use zzsim::{DeviceParams, Qubit};

fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0f64..1.0, 2 * n * n)
        .prop_map(move |v| CMatrix::from_fn(n, n, |i, j| c(v[2 * (i * n + j)], v[2 * (i * n + j) + 1])))
}

fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n).prop_map(|a| {
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let (values, vectors) = eigh(&h);
        spectral_map(&values, &vectors, |x| c(0.0, 3.0 * x).exp())
    })
}

fn density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    complex_matrix(n).prop_map(|a| {
        let m = &a * a.adjoint();
        let tr = m.trace();
        DensityMatrix::new(m / tr).unwrap()
    })
}

fn noise() -> impl Strategy<Value = NoiseParams> {
    (5e-6f64..100e-6, 0.1f64..2.0, 10e-9f64..100e-9).prop_map(|(t1, ratio, tg)| {
        NoiseParams::new(t1, (t1 * ratio).min(2.0 * t1), tg).unwrap()
    })
}

/// Device A with couplings rescaled and a coupler detuned below both qubits.
fn device_below() -> impl Strategy<Value = (DeviceParams, f64)> {
    (0.7f64..1.3, 0.4f64..2.0).prop_map(|(scale, offset)| {
        let mut p = DeviceParams::device_a();
        p.g = p.g.scaled(scale);
        let w = p.omega.q1.min(p.omega.q2) - ghz(offset);
        (p, w)
    })
}

fn assert_state(m: &CMatrix) {
    assert!((m.trace().re - 1.0).abs() < 1e-10 && m.trace().im.abs() < 1e-10);
    assert!(frobenius(&(m - m.adjoint())) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_excitations((p, w) in device_below()) {
        let space = Arc::new(HilbertSpace::default_device());
        let h = build_hamiltonian(&p, &space, w).unwrap();
        let norm = h.frobenius_norm();
        let defect = frobenius(&(h.matrix() - h.matrix().adjoint()));
        prop_assert!(defect < 1e-12 * norm);
        let n = total_excitation(&space);
        let comm = h.commutator(&n).unwrap();
        prop_assert!(comm.frobenius_norm() < 1e-10 * norm);
    }

    #[test]
    fn larger_truncation_keeps_retained_elements((p, w) in device_below(), extra in 1usize..3) {
        let small = Arc::new(HilbertSpace::device([3, 3, 2, 3]).unwrap());
        let big = Arc::new(HilbertSpace::device([3 + extra, 3, 2 + extra, 3 + extra]).unwrap());
        let hs = build_hamiltonian(&p, &small, w).unwrap();
        let hb = build_hamiltonian(&p, &big, w).unwrap();
        for i in 0..small.total_dim() {
            for j in 0..small.total_dim() {
                let (bra, ket) = (small.occupations(i), small.occupations(j));
                let a = hs.element(bra, ket).unwrap();
                let b = hb.element(bra, ket).unwrap();
                prop_assert!((a - b).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn perturbative_zeta_is_exchange_symmetric((p, w) in device_below()) {
        let a = zeta_perturbative(&p, w).unwrap();
        let b = zeta_perturbative(&p.with_qubits_swapped(), w).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn derivative_ratio_exceeds_one_below_qubits((p, w) in device_below()) {
        prop_assert!(iswap_derivative_ratio(&p, w).unwrap() > 1.0);
    }

    #[test]
    fn exchange_is_monotone_between_poles(scale in 0.7f64..1.3) {
        let mut p = DeviceParams::device_b();
        p.g = p.g.scaled(scale);
        let top = p.omega.q1.min(p.omega.q2) - ghz(0.1);
        let grid: Vec<f64> = (0..200).map(|k| top - ghz(3.0) + ghz(2.9) * k as f64 / 199.0).collect();
        let js: Vec<f64> = grid.iter().map(|&w| exchange_j(&p, w).unwrap()).collect();
        let signs: Vec<bool> = js.windows(2).map(|d| d[1] > d[0]).collect();
        prop_assert!(signs.iter().all(|&s| s == signs[0]));
    }

    #[test]
    fn flux_map_is_periodic(phi in -3.0f64..3.0, k in -4i32..4) {
        let p = DeviceParams::device_b();
        let a = omega_minus_of_flux(&p, phi);
        let b = omega_minus_of_flux(&p, phi + k as f64);
        prop_assert!((a - b).abs() <= 1e-6 * p.omega_minus_max);
    }

    #[test]
    fn channels_preserve_trace_and_hermiticity(
        rho in density(4),
        u in unitary(4),
        n1 in noise(),
        n2 in noise(),
        zeta in -50.0f64..50.0,
        g1 in 0usize..7,
        g2 in 0usize..7,
    ) {
        let zeta = mhz(zeta);
        assert_state(apply_gate(&rho, &u).unwrap().matrix());
        assert_state(apply_zz(&rho, zeta, n1.gate_time).unwrap().matrix());
        assert_state(zzsim::channels::apply_decoherence_on(&rho, Qubit::One, &n1).unwrap().matrix());
        let n2 = NoiseParams { gate_time: n1.gate_time, ..n2 };
        let out = rb_step(&rho, (GateLabel::ALL[g1], GateLabel::ALL[g2]), zeta, &n1, &n2).unwrap();
        assert_state(out.matrix());
    }

    #[test]
    fn ground_state_is_stationary_under_decoherence(n in noise()) {
        let ground = DensityMatrix::basis(2, 0).unwrap();
        let out = apply_decoherence(&ground, &n).unwrap();
        prop_assert!(frobenius(&(out.matrix() - ground.matrix())) < 1e-14);
    }

    #[test]
    fn ptm_of_composition_is_product(u in unitary(4), v in unitary(4)) {
        let ru = ptm_from_unitary(&u).unwrap();
        let rv = ptm_from_unitary(&v).unwrap();
        let uv = &u * &v;
        let composed = ptm_from_channel(2, |rho| &uv * rho * uv.adjoint()).unwrap();
        let product = ru.after(&rv).unwrap();
        prop_assert!((composed.matrix() - product.matrix()).amax() < 1e-10);
    }

    #[test]
    fn gate_fidelity_is_symmetric(u in unitary(4), v in unitary(4)) {
        let ru = ptm_from_unitary(&u).unwrap();
        let rv = ptm_from_unitary(&v).unwrap();
        let a = gate_fidelity(&ru, &rv, 2).unwrap();
        let b = gate_fidelity(&rv, &ru, 2).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((gate_fidelity(&ru, &ru, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn physical_ptm_has_no_nonphysical_error(u in unitary(4)) {
        let r = ptm_from_unitary(&u).unwrap();
        prop_assert!(nonphysical_error(&r, &r.nearest_cp().unwrap(), 2).unwrap() < 1e-9);
    }

    #[test]
    fn projection_is_idempotent(a in complex_matrix(4)) {
        let (once, d1) = project_physical(&a).unwrap();
        let (twice, d2) = project_physical(once.matrix()).unwrap();
        prop_assert!(d1 >= 0.0);
        prop_assert!(d2 < 1e-20);
        prop_assert!(frobenius(&(once.matrix() - twice.matrix())) < 1e-12);
    }

    #[test]
    fn projection_distance_shrinks_with_noise(rho in density(4), e in complex_matrix(4)) {
        let e = (&e + e.adjoint()) * c(0.5, 0.0);
        let mut last = f64::INFINITY;
        for scale in [0.5, 0.1, 0.02, 0.0] {
            let (_, d) = project_physical(&(rho.matrix() + &e * c(scale, 0.0))).unwrap();
            prop_assert!(d <= last + 1e-15);
            last = d;
        }
        prop_assert!(last < 1e-20);
    }

    #[test]
    fn excited_coupler_root_round_trips(alpha in 1u32..9) {
        let model = ThermalGateModel::new(0.1, alpha as f64, 95e-9).unwrap();
        let root = model.excited_unitary().unwrap();
        let mut back = root.clone();
        for _ in 1..alpha {
            back = &back * &root;
        }
        prop_assert!(frobenius(&(back - sqrt_iswap())) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn exact_zeta_ignores_global_shift((p, w) in device_below(), shift in -1.0f64..1.0) {
        let space = Arc::new(HilbertSpace::default_device());
        let a = zeta_exact(&p, w, &space).unwrap();
        let b = zeta_exact(&p.shifted(ghz(shift)), w + ghz(shift), &space).unwrap();
        prop_assert!((a - b).abs() < TWO_PI * 1.0);
    }

    #[test]
    fn exact_zeta_is_exchange_symmetric((p, w) in device_below()) {
        let space = Arc::new(HilbertSpace::default_device());
        let a = zeta_exact(&p, w, &space).unwrap();
        let b = zeta_exact(&p.with_qubits_swapped(), w, &space).unwrap();
        prop_assert!((a - b).abs() < TWO_PI * 1.0);
    }

    #[test]
    fn eigenvectors_live_in_one_sector((p, w) in device_below()) {
        let space = Arc::new(HilbertSpace::device([3, 3, 2, 3]).unwrap());
        let h = build_hamiltonian(&p, &space, w).unwrap();
        let spec = diagonalize(&h).unwrap();
        for k in 0..spec.len() {
            let col = spec.eigenvectors.column(k);
            let mut weight = [0.0; 12];
            for i in 0..space.total_dim() {
                weight[space.excitations(i)] += col[i].norm_sqr();
            }
            let top = weight.iter().cloned().fold(0.0, f64::max);
            prop_assert!(1.0 - top < 1e-10);
        }
    }

    #[test]
    fn rb_is_deterministic_per_seed(seed in any::<u64>(), zeta in 0.0f64..3.0) {
        let mut cfg = RbConfig::for_device(&DeviceParams::device_b(), mhz(zeta), RbMode::Simultaneous, seed).unwrap();
        cfg.lengths = vec![1, 4, 16];
        cfg.trials = 5;
        let a = rb_curve(&cfg).unwrap();
        let b = rb_curve(&cfg).unwrap();
        for (x, y) in a.mean_p0.iter().zip(&b.mean_p0) {
            prop_assert_eq!(x[0].to_bits(), y[0].to_bits());
            prop_assert_eq!(x[1].to_bits(), y[1].to_bits());
        }
    }
}

