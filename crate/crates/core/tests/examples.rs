//! Worked examples at the public API.

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ntqpt::linalg::{banded_eigen, BandedSymmetricMatrix};
use ntqpt::models::{
    build_coherent_state, build_hamiltonian, build_order_parameter, build_parity, semiclassical_critical_energy,
    variational_minimum, Basis, CoherentParams, Side,
};
use ntqpt::quench::{
    build_equilibrium_ensemble, expand_initial_state, expectation, run_quench, thermal_reference, time_average_oracle,
    QuenchContext,
};
use ntqpt::scaling::{initial_coupling_range, target_energy};
use ntqpt::spectral::{
    detect_precursor, diagonalize_by_parity, pair_doublets, spectrum_for, with_semiclassical_pairing, Detector,
    DetectorParams, LevelId, SpectrumCache,
};
use ntqpt::{ModelSpec, StateVector};

const S2: f64 = std::f64::consts::SQRT_2;

fn dense(m: &BandedSymmetricMatrix) -> DMatrix<f64> {
    m.to_dense()
}

fn sorted_eigenvalues(spec: &ModelSpec) -> Vec<f64> {
    let mut v = banded_eigen(&build_hamiltonian(spec).unwrap(), false).unwrap().values;
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn bh_single_particle() {
    for lambda in [-7.0, 0.0, 3.3] {
        let h = dense(&build_hamiltonian(&ModelSpec::bh(1, lambda)).unwrap());
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
        let e = sorted_eigenvalues(&ModelSpec::bh(1, lambda));
        assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-15);
    }
}

#[test]
fn bh_two_particles() {
    let h = dense(&build_hamiltonian(&ModelSpec::bh(2, 2.0)).unwrap());
    for (i, d) in [-1.0, 0.0, -1.0].iter().enumerate() {
        assert_abs_diff_eq!(h[(i, i)], d, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(h[(0, 1)], -S2, epsilon = 1e-15);
    assert_abs_diff_eq!(h[(1, 2)], -S2, epsilon = 1e-15);
    assert_eq!(h[(0, 2)], 0.0);
}

#[test]
fn lmg_two_particles() {
    let spec = ModelSpec::lmg(2, 0.0);
    let h = dense(&build_hamiltonian(&spec).unwrap());
    for (i, d) in [-1.0, -2.0, -1.0].iter().enumerate() {
        assert_abs_diff_eq!(h[(i, i)], d, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(h[(0, 2)], -1.0, epsilon = 1e-15);
    assert_eq!(h[(0, 1)], 0.0);
    let e = sorted_eigenvalues(&spec);
    for (x, want) in e.iter().zip([-2.0, -2.0, 0.0]) {
        assert_abs_diff_eq!(*x, want, epsilon = 1e-14);
    }
}

#[test]
fn dicke_noninteracting_ladder() {
    let (n, n_max) = (4, 5);
    let mut want: Vec<f64> = Vec::new();
    for m in -2..=2 {
        for k in 0..=n_max {
            want.push((m + k as i32) as f64);
        }
    }
    want.sort_by(f64::total_cmp);
    let got = sorted_eigenvalues(&ModelSpec::dicke(n, 0.0, n_max));
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
    }
}

#[test]
fn parity_operators() {
    let s = dense(&build_parity(&ModelSpec::bh(2, 1.0)).unwrap());
    assert_eq!(s, DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]));
    let s = dense(&build_parity(&ModelSpec::lmg(3, 0.5)).unwrap());
    assert_eq!(s, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, -1.0])));
}

#[test]
fn order_parameters() {
    let o = dense(&build_order_parameter(&ModelSpec::bh(2, 1.0)).unwrap());
    assert_eq!(o, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-2.0, 0.0, 2.0])));
    let o = dense(&build_order_parameter(&ModelSpec::lmg(2, 0.5)).unwrap());
    assert_abs_diff_eq!(o[(0, 1)], S2, epsilon = 1e-15);
    assert_abs_diff_eq!(o[(1, 2)], S2, epsilon = 1e-15);
    assert_eq!(o[(0, 0)], 0.0);
}

#[test]
fn coherent_states() {
    let spec = ModelSpec::bh(5, 1.0);
    let psi = build_coherent_state(&spec, &CoherentParams::Bh { gamma0: 1.0, gamma1: 0.0 }).unwrap();
    assert_abs_diff_eq!(psi.amplitudes[5], 1.0, epsilon = 1e-15);
    let psi = build_coherent_state(&ModelSpec::bh(2, 1.0), &CoherentParams::bh_angle(std::f64::consts::FRAC_PI_4)).unwrap();
    for (a, b) in psi.amplitudes.iter().zip([0.5, 1.0 / S2, 0.5]) {
        assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
    }
    let psi = build_coherent_state(&ModelSpec::lmg(7, 0.5), &CoherentParams::Lmg { beta_c: 0.0 }).unwrap();
    assert_abs_diff_eq!(psi.amplitudes[0], 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-15);
}

#[test]
fn variational_limits() {
    let v = variational_minimum(&ModelSpec::bh(40, 0.0), 1).unwrap();
    assert_abs_diff_eq!(v.energy, -40.0, epsilon = 1e-9);
    assert!(!v.broken);
    let v = variational_minimum(&ModelSpec::lmg(40, 1.0), 1).unwrap();
    assert_abs_diff_eq!(v.energy, 0.0, epsilon = 1e-9);

    let spec = ModelSpec::dicke(16, 0.75, 80);
    let v = variational_minimum(&spec, 1).unwrap();
    let exact = diagonalize_by_parity(&spec).unwrap().ground_energy;
    assert!(v.order_parameter > 0.0 && v.energy < -8.0);
    assert!(v.energy >= exact && (v.energy - exact) / 16.0 < 0.05);
}

#[test]
fn variational_gap_closes_with_size() {
    let gaps: Vec<f64> = [10usize, 100, 1000]
        .iter()
        .map(|&n| {
            let spec = ModelSpec::lmg(n, 0.7);
            let exact = diagonalize_by_parity(&spec).unwrap().ground_energy;
            let v = variational_minimum(&spec, 1).unwrap();
            assert!(v.energy >= exact - 1e-9);
            (v.energy - exact) / n as f64
        })
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn critical_energies() {
    assert_abs_diff_eq!(semiclassical_critical_energy(&ModelSpec::dicke(64, 0.75, 10)), -32.0, epsilon = 1e-12);
    assert_abs_diff_eq!(semiclassical_critical_energy(&ModelSpec::lmg(100, 0.7)), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(semiclassical_critical_energy(&ModelSpec::bh(100, -7.0)), 275.0, epsilon = 1e-10);
}

#[test]
fn eigensolver_against_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 50;
    let mut m = BandedSymmetricMatrix::zeros(n);
    for offset in 0..4 {
        m.set_diagonal(offset, (0..n - offset).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    }
    let got = banded_eigen(&m, true).unwrap();
    let mut want: Vec<f64> = m.to_dense().symmetric_eigen().eigenvalues.iter().copied().collect();
    want.sort_by(f64::total_cmp);
    for (a, b) in got.values.iter().zip(&want) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
    }
    let hopping = BandedSymmetricMatrix::from_dense(&DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0])).unwrap();
    let e = banded_eigen(&hopping, false).unwrap().values;
    assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-15);
}

#[test]
fn cutoff_below_first_excitation_keeps_ground_doublet() {
    let s = diagonalize_by_parity(&ModelSpec::lmg(100, 0.7)).unwrap();
    let levels = s.levels();
    let cutoff = 0.5 * (levels[2].energy - s.ground_energy);
    let s = pair_doublets(s, cutoff, Side::Below);
    assert_eq!(s.pairing.doublets.len(), 1);
    assert_eq!((s.pairing.doublets[0].index_plus, s.pairing.doublets[0].index_minus), (0, 0));
}

#[test]
fn expansion_of_eigenvectors() {
    let spec = ModelSpec::lmg(60, 0.7);
    let s = diagonalize_by_parity(&spec).unwrap();
    let v = s.vector(LevelId { parity: -1, index: 3 });
    let c = expand_initial_state(&StateVector::new(v, Basis::of(&spec)).unwrap(), &s).unwrap();
    assert_abs_diff_eq!(c.get(LevelId { parity: -1, index: 3 }), 1.0, epsilon = 1e-12);
    assert!(c.plus.iter().all(|x| x.abs() < 1e-12));

    let vp = s.vector(LevelId { parity: 1, index: 0 });
    let vm = s.vector(LevelId { parity: -1, index: 0 });
    let amps = vp.iter().zip(&vm).map(|(a, b)| (a + b) / S2).collect();
    let c = expand_initial_state(&StateVector::new(amps, Basis::of(&spec)).unwrap(), &s).unwrap();
    assert_abs_diff_eq!(c.plus[0], 1.0 / S2, epsilon = 1e-12);
    assert_abs_diff_eq!(c.minus[0], 1.0 / S2, epsilon = 1e-12);
}

#[test]
fn doublet_superposition_keeps_full_coherence() {
    let spec = ModelSpec::lmg(60, 0.7);
    let s = with_semiclassical_pairing(diagonalize_by_parity(&spec).unwrap());
    let (p, m) = (LevelId { parity: 1, index: 0 }, LevelId { parity: -1, index: 0 });
    let amps = s.vector(p).iter().zip(s.vector(m)).map(|(a, b)| (a + b) / S2).collect();
    let psi = StateVector::new(amps, Basis::of(&spec)).unwrap();
    let c = expand_initial_state(&psi, &s).unwrap();
    let ens = build_equilibrium_ensemble(&c, &s);
    let o = build_order_parameter(&spec).unwrap();
    let want = s.matrix_element(p, &o, m);
    assert_abs_diff_eq!(expectation(&ens, &o, &s).unwrap(), want, epsilon = 1e-10);
    assert_abs_diff_eq!(expectation(&ens.without_coherences(), &o, &s).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn ensemble_normalization_and_energy() {
    let spec = ModelSpec::lmg(300, 0.7);
    let s = with_semiclassical_pairing(diagonalize_by_parity(&spec).unwrap());
    let v = variational_minimum(&spec.with_lambda(0.4), 1).unwrap();
    let psi = build_coherent_state(&spec, &v.params).unwrap();
    let ens = build_equilibrium_ensemble(&expand_initial_state(&psi, &s).unwrap(), &s);
    let h = build_hamiltonian(&spec).unwrap();
    assert_abs_diff_eq!(expectation(&ens, &BandedSymmetricMatrix::identity(spec.dim()), &s).unwrap(), 1.0, epsilon = 1e-10);
    let e = h.bilinear(&psi.amplitudes, &psi.amplitudes);
    assert_abs_diff_eq!(expectation(&ens, &h, &s).unwrap(), e, epsilon = 1e-8 * e.abs().max(1.0));
}

#[test]
fn lmg_quench_is_ordered_below_critical_energy() {
    let r = run_quench(&ModelSpec::lmg(2000, 0.7), 0.4, 1, 1.0).unwrap();
    assert!(r.reduced_e < 0.0 && r.order_parameter > 0.0, "{r:?}");
}

#[test]
fn null_quench() {
    let spec = ModelSpec::lmg(400, 0.7);
    let r = run_quench(&spec, 0.7, 1, 1.0).unwrap();
    let v = variational_minimum(&spec, 1).unwrap();
    assert!(r.e_f < 1.0, "{}", r.e_f);
    assert_abs_diff_eq!(r.order_parameter, v.order_parameter / 400.0, epsilon = 0.02);
    assert_abs_diff_eq!(r.work_per_particle, 0.0, epsilon = 1e-12);
}

#[test]
fn lmg_quench_above_critical_energy_is_disordered() {
    let r = run_quench(&ModelSpec::lmg(500, 0.7), -10.0, 1, 1.0).unwrap();
    assert!(r.reduced_e > 0.0 && r.order_parameter.abs() < 1e-10, "{r:?}");
}

#[test]
fn bh_orders_above_critical_energy() {
    let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::bh(300, -7.0)).unwrap()), 1.0).unwrap();
    let target = 1.2 * ctx.critical_excitation();
    let hot = target_energy(&ctx, target, 1, initial_coupling_range(ctx.spec())).unwrap().result;
    assert!(hot.reduced_e > 0.0 && hot.order_parameter > 0.1, "{hot:?}");
}

#[test]
fn time_average_of_conserved_quantities() {
    let spec = ModelSpec::bh(20, -7.0);
    let s = diagonalize_by_parity(&spec).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    let psi = build_coherent_state(&spec, &CoherentParams::bh_angle(0.4)).unwrap();
    let e = h.bilinear(&psi.amplitudes, &psi.amplitudes);
    assert_abs_diff_eq!(time_average_oracle(&psi, &s, &h, 50.0, 64).unwrap(), e, epsilon = 1e-9);

    let id = LevelId { parity: 1, index: 4 };
    let eig = StateVector::new(s.vector(id), Basis::of(&spec)).unwrap();
    let a = build_parity(&spec).unwrap();
    let diag = s.matrix_element(id, &h, id);
    assert_abs_diff_eq!(time_average_oracle(&eig, &s, &h, 10.0, 7).unwrap(), diag, epsilon = 1e-9);
    assert_abs_diff_eq!(time_average_oracle(&eig, &s, &a, 10.0, 7).unwrap(), 1.0, epsilon = 1e-9);
}

#[test]
fn thermal_limits() {
    let spec = ModelSpec::dicke(8, 0.75, 40);
    let s = diagonalize_by_parity(&spec).unwrap();
    let o = build_order_parameter(&spec).unwrap();
    let h = build_hamiltonian(&spec).unwrap();
    for beta in [0.1, 1.0, 10.0] {
        assert!(thermal_reference(&s, beta, &o).unwrap().abs() < 1e-10);
        assert_abs_diff_eq!(thermal_reference(&s, beta, &BandedSymmetricMatrix::identity(spec.dim())).unwrap(), 1.0, epsilon = 1e-12);
    }
    let cold = thermal_reference(&s, 1e3, &h).unwrap();
    let doublet = [s.plus.values[0], s.minus.values[0]];
    assert!(cold >= doublet[0].min(doublet[1]) - 1e-9 && cold <= doublet[0].max(doublet[1]) + 1e-9);
    assert!(thermal_reference(&s, 0.0, &h).is_err());
}

#[test]
fn ground_target_drives_initial_coupling_to_final() {
    let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::lmg(300, 0.7)).unwrap()), 1.0).unwrap();
    let t = target_energy(&ctx, 0.2, 1, initial_coupling_range(ctx.spec())).unwrap();
    assert!((t.lambda_i - 0.7).abs() < 0.05, "{}", t.lambda_i);
    let v = variational_minimum(ctx.spec(), 1).unwrap();
    assert_abs_diff_eq!(t.result.order_parameter, v.order_parameter / 300.0, epsilon = 0.03);
}

#[test]
fn lmg_precursor_converges_to_critical_energy() {
    let offsets: Vec<f64> = [500usize, 1000, 2000]
        .iter()
        .map(|&n| {
            let ctx = QuenchContext::new(with_semiclassical_pairing(diagonalize_by_parity(&ModelSpec::lmg(n, 0.7)).unwrap()), 1.0).unwrap();
            let p = detect_precursor(ctx.spectrum(), Detector::DensityPeak, &DetectorParams::default()).unwrap();
            (p.energy - ctx.critical_excitation()).abs()
        })
        .collect();
    assert!(offsets.windows(2).all(|w| w[1] < w[0]), "{offsets:?}");
}

#[test]
fn no_precursor_without_degeneracies() {
    let s = diagonalize_by_parity(&ModelSpec::lmg(200, 1.0)).unwrap();
    assert!(detect_precursor(&s, Detector::DoubletSplitting, &DetectorParams::default()).is_err());
}

#[test]
fn cached_spectrum_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = SpectrumCache::new(dir.path()).unwrap();
    let spec = ModelSpec::dicke(6, 0.9, 20);
    let first = spectrum_for(&spec, Some(&cache)).unwrap();
    let bytes = std::fs::read(cache.path(&spec)).unwrap();
    let second = spectrum_for(&spec, Some(&cache)).unwrap();
    assert_eq!(first, second);
    assert_eq!(std::fs::read(cache.path(&spec)).unwrap(), bytes);
}
