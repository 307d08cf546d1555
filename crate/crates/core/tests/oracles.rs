#![allow(clippy::needless_range_loop)]

mod common;

use nonlocality::bell::{cglmp_functional, chsh_functional, evaluate, lv_bound};
use nonlocality::quantum::{bell_operator, canonical_settings, fourier_settings, joint_probabilities, PhaseSettings};
use nonlocality::resistance::{chsh_embed_numeric, chsh_embed_resistance, noise_state, NoiseModel};
use nonlocality::seesaw::{optimize_violation, param_count, unitary_from_params, OptimizerConfig};
use nonlocality::spectra::{max_violation, table1};
use nonlocality::tensor::{hermitian_spectrum, schmidt_state, CMatrix, DensityMatrix};
use nonlocality::witness::{decomposition_at, scan_decomposition, witness_from};
use nonlocality::{Complex, Rational64};

fn canonical_operator(d: usize) -> CMatrix<f64> {
    let f = cglmp_functional::<f64>(d).unwrap();
    bell_operator::<f64, f64, _>(&f, &canonical_settings(d).unwrap()).unwrap()
}

#[test]
fn probabilities_match_phase_formula() {
    let mut rng = common::rng(11);
    for d in [2, 3, 4, 5] {
        for _ in 0..20 {
            let alice = common::random_phases(d, &mut rng);
            let bob = common::random_phases(d, &mut rng);
            let s = fourier_settings(&PhaseSettings::new(alice.clone(), bob.clone()).unwrap()).unwrap();
            let phi = common::random_pure(d, &mut rng);
            let p = joint_probabilities(&phi.projector(), &s).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    for k in 0..d {
                        for l in 0..d {
                            let expected = common::closed_form_probability(&phi, &alice[a], &bob[b], k, l);
                            assert!((p.get(a, b, k, l) - expected).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn operator_matches_expanded_form() {
    let mut rng = common::rng(12);
    let f = cglmp_functional::<f64>(3).unwrap();
    for _ in 0..20 {
        let alice = common::random_phases(3, &mut rng);
        let bob = common::random_phases(3, &mut rng);
        let s = fourier_settings(&PhaseSettings::new(alice.clone(), bob.clone()).unwrap()).unwrap();
        let b = bell_operator::<f64, f64, _>(&f, &s).unwrap();
        assert!(b.max_abs_diff(&common::closed_form_operator_d3(&alice, &bob)) < 1e-10);
    }
}

#[test]
fn uniform_table_cancels() {
    for d in 2..=8 {
        let f = cglmp_functional::<Rational64>(d).unwrap();
        let p = nonlocality::bell::ProbabilityTable::<f64>::uniform(d);
        // direct summation of the coefficient tensor
        let direct: f64 = f.coefficients().iter().map(|c| *c.numer() as f64 / *c.denom() as f64).sum::<f64>() / (d * d) as f64;
        assert!(direct.abs() < 1e-14);
        assert!(evaluate(&f, &p).unwrap().abs() < 1e-14);
    }
}

#[test]
fn lv_bound_matches_brute_force() {
    // full d^4 enumeration without factorization
    for d in 2..=5 {
        let f = cglmp_functional::<Rational64>(d).unwrap();
        let mut best = None;
        for a0 in 0..d {
            for a1 in 0..d {
                for b0 in 0..d {
                    for b1 in 0..d {
                        let v = nonlocality::bell::deterministic_value(&f, [a0, a1], [b0, b1]);
                        if best.as_ref().is_none_or(|b| &v > b) {
                            best = Some(v);
                        }
                    }
                }
            }
        }
        assert_eq!(lv_bound(&f).unwrap().value, best.unwrap());
    }
    let chsh = chsh_functional::<Rational64>(2).unwrap();
    assert_eq!(lv_bound(&chsh).unwrap().value, Rational64::from_integer(2));
}

#[test]
fn closest_separable_state_by_relative_entropy() {
    // minimize S(ρ‖σ) over σ = Σ q_ij |ij⟩⟨ij| by mirror descent with a
    // finite-difference gradient of -⟨φ|log σ|φ⟩
    let root = (11.0f64).sqrt() - 3.0f64.sqrt();
    let gamma = root / 2.0;
    let phi = schmidt_state(&[1.0, gamma, 1.0]).unwrap();
    let d = 3;
    let n = d * d;
    let objective = |q: &[f64]| {
        let sigma = CMatrix::diagonal(&q.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>());
        let s = hermitian_spectrum(&sigma).unwrap();
        let log = CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| s.vectors.row(i)[k] * s.values[k].ln() * s.vectors.row(j)[k].conj()).sum()
        });
        -log.expectation(phi.amplitudes())
    };
    let mut q = vec![1.0 / n as f64; n];
    let h = 1e-7;
    for _ in 0..400 {
        let base = objective(&q);
        let grad: Vec<f64> = (0..n)
            .map(|i| {
                let mut e = q.clone();
                e[i] += h;
                (objective(&e) - base) / h
            })
            .collect();
        let mut next: Vec<f64> = q.iter().zip(&grad).map(|(x, g)| x * (-0.5 * g).exp()).collect();
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        q = next;
    }
    let found = CMatrix::diagonal(&q.iter().map(|&x| Complex::new(x, 0.0)).collect::<Vec<_>>());
    let closed = noise_state(&phi, NoiseModel::ClosestSeparablePure).unwrap();
    assert!(found.max_abs_diff(closed.matrix()) < 1e-4, "{:?}", q);
}

#[test]
fn fourier_unitary_is_reachable_in_parameter_chart() {
    let settings = canonical_settings::<f64>(3).unwrap();
    // measured unitary U_FT·diag(e^{iφ}) is the adjoint of the stored one
    let target = settings.unitary(nonlocality::tensor::Subsystem::A, 1).adjoint();
    let target = target.matrix().clone();
    let dist = |theta: &[f64]| (unitary_from_params(3, theta).unwrap().matrix() - &target).frobenius_norm();
    let mut rng = common::rng(3);
    let mut best = f64::INFINITY;
    for _ in 0..8 {
        let mut theta: Vec<f64> = (0..param_count(3)).map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0)).collect();
        let mut value = dist(&theta);
        let mut step = 0.5;
        for _ in 0..4000 {
            if value < 1e-8 || step < 1e-14 {
                break;
            }
            let h = 1e-7;
            let grad: Vec<f64> = (0..theta.len())
                .map(|i| {
                    let mut a = theta.clone();
                    let mut b = theta.clone();
                    a[i] += h;
                    b[i] -= h;
                    (dist(&a) - dist(&b)) / (2.0 * h)
                })
                .collect();
            let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            loop {
                let trial: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g / gn).collect();
                let v = dist(&trial);
                if v < value {
                    theta = trial;
                    value = v;
                    step *= 1.5;
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        best = best.min(value);
        if best < 1e-6 {
            break;
        }
    }
    assert!(best < 1e-6, "closest {best}");
}

#[test]
fn embedded_resistance_closed_form_vs_operator() {
    for d in 2..=10 {
        let closed: f64 = chsh_embed_resistance(d).unwrap();
        // independent noise value: direct trace of the operator against I/d²
        let f = chsh_functional::<f64>(d).unwrap();
        let s = nonlocality::quantum::chsh_embedded_settings::<f64>(d).unwrap();
        let b = bell_operator::<f64, f64, _>(&f, &s).unwrap();
        let noise = b.trace().re / (d * d) as f64;
        let x = 2.0 * ((d as f64 - 2.0) / d as f64).powi(2);
        assert!((noise - x).abs() < 1e-12);
        let signal = b.expectation(&embedded_pair(d));
        assert!((signal - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let numeric = chsh_embed_numeric::<f64>(d).unwrap().lambda_star;
        assert!((numeric - (2.0 - x) / (signal - x)).abs() < 1e-12);
        assert!((closed - numeric).abs() < 1e-10);
    }
    for d in 2..50 {
        assert!(chsh_embed_resistance::<f64>(d + 1).unwrap() < chsh_embed_resistance::<f64>(d).unwrap());
    }
    let x10 = 2.0 * 0.8f64.powi(2);
    assert!((chsh_embed_resistance::<f64>(10).unwrap() - (2.0 - x10) / (2.0 * 2f64.sqrt() - x10)).abs() < 1e-12);
}

/// (|00⟩ + |11⟩)/√2 inside C^d ⊗ C^d.
fn embedded_pair(d: usize) -> Vec<Complex<f64>> {
    let mut v = vec![Complex::new(0.0, 0.0); d * d];
    v[0] = Complex::new(0.5f64.sqrt(), 0.0);
    v[d + 1] = Complex::new(0.5f64.sqrt(), 0.0);
    v
}

#[test]
fn table_trends() {
    let rows = table1::<f64>(3, 8).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].difference_percent > w[0].difference_percent);
    }
    for r in &rows {
        assert!(!r.degenerate);
        assert!(r.value_operator_max >= r.value_max_entangled - 1e-10);
        let expected = 100.0 * (r.value_operator_max / r.value_max_entangled - 1.0);
        assert!((r.difference_percent - expected).abs() < 1e-9);
        let d = r.d;
        for j in 0..d {
            for jb in 0..d {
                if j != jb {
                    assert!(r.optimal_state.amplitude(j, jb).norm() < 1e-8);
                }
            }
        }
    }
    // the d = 5 maximum is 3.0157; 3.0517 is not attained
    let d5 = &rows[2];
    assert!((d5.value_operator_max - 3.0157).abs() < 1e-3);
    assert!((d5.value_operator_max - 3.0517).abs() > 1e-2);
}

#[test]
fn mv_thresholds_coincide_and_noise_is_traceless() {
    let b = canonical_operator(3);
    let mut rng = common::rng(21);
    // any Schmidt-diagonal σ has zero expectation
    for _ in 0..50 {
        let q: Vec<f64> = (0..9).map(|_| rand::Rng::random_range(&mut rng, 0.0..1.0)).collect();
        let t: f64 = q.iter().sum();
        let sigma = CMatrix::diagonal(&q.iter().map(|x| Complex::new(x / t, 0.0)).collect::<Vec<_>>());
        assert!(sigma.trace_product(&b).re.abs() < 1e-12);
    }
    let top = max_violation(&b).unwrap();
    let reports = nonlocality::resistance::compare_measures(&top.state, &cglmp_functional::<f64>(3).unwrap(), &canonical_settings::<f64>(3).unwrap()).unwrap();
    for r in &reports {
        assert!((r.lambda_star - reports[0].lambda_star).abs() < 1e-10);
        assert!(r.noise_value.abs() < 1e-12);
    }
    assert!((reports[0].lambda_star - 0.6861).abs() < 5e-5);
}

#[test]
fn witness_screens_product_states() {
    let w = witness_from(&canonical_operator(3), 2.0).unwrap();
    let mut rng = common::rng(31);
    for _ in 0..1000 {
        assert!(w.expectation(&common::random_product_pure(3, &mut rng)) >= -1e-9);
    }
}

#[test]
fn decomposition_certificates_inside_interval() {
    let w = witness_from(&canonical_operator(3), 2.0).unwrap();
    let scan = scan_decomposition(&w, 0.0, 3.0, 301).unwrap();
    let (lo, hi) = scan.feasible_interval.unwrap();
    for i in 0..=20 {
        let k = lo + (hi - lo) * i as f64 / 20.0;
        let dec = decomposition_at(&w, k).unwrap().expect("feasible");
        assert!(dec.min_eigenvalue_p >= -1e-10);
        assert!(dec.min_eigenvalue_q >= -1e-12);
        let pa_t = nonlocality::tensor::partial_transpose(&dec.q, nonlocality::tensor::Subsystem::A).unwrap();
        assert!((&dec.p + &pa_t).max_abs_diff(&w.matrix) < 1e-12);
    }
}

#[test]
fn implication_chain_on_mixtures() {
    // isotropic mixture just above the white-noise threshold is distillable
    let psi = nonlocality::tensor::max_entangled::<f64>(3).unwrap();
    let rho = DensityMatrix::mixture(0.70, &psi.projector(), &DensityMatrix::maximally_mixed(3).unwrap()).unwrap();
    let dist = nonlocality::witness::distillable_by_fidelity(&rho);
    assert!(dist.distillable);
    assert!((dist.margin - (0.70 + 0.30 / 9.0 - 1.0 / 3.0)).abs() < 1e-12);
    let w = witness_from(&canonical_operator(3), 2.0).unwrap();
    assert!(w.expectation(&rho) < 0.0);
}

#[test]
fn randomized_phase_settings_exploration() {
    // outcomes are recorded, not asserted
    let mut rng = common::rng(41);
    let f = cglmp_functional::<f64>(3).unwrap();
    let mut decomposable = 0;
    let mut tried = 0;
    for _ in 0..40 {
        let alice = common::random_phases(3, &mut rng);
        let bob = common::random_phases(3, &mut rng);
        let s = fourier_settings(&PhaseSettings::new(alice, bob).unwrap()).unwrap();
        let b = bell_operator::<f64, f64, _>(&f, &s).unwrap();
        if max_violation(&b).unwrap().value <= 2.0 {
            continue;
        }
        tried += 1;
        let scan = scan_decomposition(&witness_from(&b, 2.0).unwrap(), 0.0, 3.0, 61).unwrap();
        if scan.is_decomposable() {
            decomposable += 1;
        }
    }
    eprintln!("random violating phase settings: {decomposable} of {tried} decomposable by the antisymmetric recipe");
}

#[test]
fn two_qubit_chsh_scan_exploration() {
    let f = chsh_functional::<f64>(2).unwrap();
    let s = nonlocality::quantum::chsh_embedded_settings::<f64>(2).unwrap();
    let b = bell_operator::<f64, f64, _>(&f, &s).unwrap();
    let scan = scan_decomposition(&witness_from(&b, 2.0).unwrap(), 0.0, 4.0, 401).unwrap();
    eprintln!("d=2 CHSH witness: feasible interval {:?}, best {:?}", scan.feasible_interval, scan.best());
}

#[test]
fn optimizer_reproducible_and_state_step_exact() {
    let f = cglmp_functional::<f64>(3).unwrap();
    let cfg = OptimizerConfig { restarts: 3, max_iterations: 30, seed: 99, ..Default::default() };
    let a = optimize_violation::<f64, f64>(&f, 3, &cfg).unwrap();
    let b = optimize_violation::<f64, f64>(&f, 3, &cfg).unwrap();
    assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
    assert_eq!(a.restart, b.restart);
    let op = bell_operator::<f64, f64, _>(&f, &a.best_settings).unwrap();
    let top = max_violation(&op).unwrap();
    assert!((top.value - a.best_value).abs() < 1e-9);
    assert!((a.best_state.projector().expectation(&op) - a.best_value).abs() < 1e-9);
}
