use adiakit::bounds::{fit_power_law, FitWindow};
use adiakit::davies::{davies_generator, gibbs_state, BathSpec, SpectralFunction};
use adiakit::linalg;
use adiakit::models::{example1_iss_closed_form, ConstantFamily};
use adiakit::norm::induced_trace_norm;
use adiakit::superop::{is_cptp, vectorize};
use adiakit::sweep::log_ladder;
use adiakit::tabulate::MatrixInterpolant;
use adiakit::{lindbladian, reduced_resolvent, zero_projector, LiouvillianFamily, QOperator, Superoperator, C64};
use ndarray::Array2;
use proptest::prelude::*;

fn arb_op(d: usize) -> impl Strategy<Value = QOperator> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
        let m = Array2::from_shape_vec((d, d), v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap();
        QOperator::new(m).unwrap()
    })
}

fn arb_hermitian(d: usize) -> impl Strategy<Value = QOperator> {
    arb_op(d).prop_map(|a| QOperator::new(linalg::hermitian_part(a.matrix())).unwrap())
}

/// Random Lindbladian with two generic jump operators; its kernel is one-dimensional almost surely.
fn arb_lindbladian(d: usize) -> impl Strategy<Value = Superoperator> {
    (arb_hermitian(d), arb_op(d), arb_op(d)).prop_map(|(h, a, b)| lindbladian(&h, &[a, b]).unwrap())
}

fn identity_minus(p: &Superoperator) -> Superoperator {
    &p.identity_like() - p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn semigroup_is_cptp(l in arb_lindbladian(2), h in 0.01f64..5.0) {
        let r = is_cptp(&l.expm(h), 1e-9);
        prop_assert!(r.passed, "{r:?}");
    }

    #[test]
    fn semigroup_is_trace_norm_contractive(l in arb_lindbladian(2), h in 0.01f64..5.0) {
        let n = induced_trace_norm(&l.expm(h));
        prop_assert!(n <= 1.0 + 1e-8, "{n}");
        prop_assert!(n >= 1.0 - 1e-6, "{n}");
    }

    #[test]
    fn zero_projector_identities(l in arb_lindbladian(3)) {
        let p = zero_projector(&l, 1e-10).unwrap();
        let scale = l.norm2();
        prop_assert!((&p.dot(&p) - &p).max_abs() < 1e-8);
        prop_assert!(l.dot(&p).max_abs() < 1e-8 * scale);
        prop_assert!(p.dot(&l).max_abs() < 1e-8 * scale);
        prop_assert!(identity_minus(&p).trace_annihilation_residual() < 1e-8);
    }

    #[test]
    fn reduced_resolvent_inverts_off_kernel(l in arb_lindbladian(2)) {
        let p = zero_projector(&l, 1e-10).unwrap();
        let s = reduced_resolvent(&l, &p).unwrap();
        let q = identity_minus(&p);
        prop_assert!((&s.dot(&l) - &q).max_abs() < 1e-7);
        prop_assert!((&l.dot(&s) - &q).max_abs() < 1e-7);
        prop_assert!(s.dot(&p).max_abs() < 1e-8 * s.norm2().max(1.0));
    }

    #[test]
    fn amplitude_damping_closed_form_is_stationary(
        m in proptest::array::uniform3(-3.0f64..3.0),
        gamma in 0.01f64..3.0,
    ) {
        let f = ConstantFamily::amplitude_damping(m, gamma).unwrap();
        let rho = example1_iss_closed_form(m, gamma).unwrap();
        let r = f.generator(0.0).unwrap().apply_vec(&vectorize(rho.op()));
        prop_assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
        prop_assert!((rho.op().trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ohmic_rates_satisfy_kms(omega in 0.01f64..20.0, beta in 0.1f64..5.0) {
        let bath = BathSpec::new(beta, SpectralFunction::reference_ohmic());
        let ratio = bath.gamma(-omega) / bath.gamma(omega);
        prop_assert!((ratio / (-beta * omega).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn davies_generator_fixes_the_gibbs_state(h in arb_hermitian(2), a in arb_hermitian(2), beta in 0.2f64..3.0) {
        let mut bath = BathSpec::new(beta, SpectralFunction::reference_ohmic());
        bath.lamb_shift = false;
        let (e, _) = h.eigh().unwrap();
        prop_assume!((e[1] - e[0]).abs() > 1e-3);
        let l = davies_generator(&h, &a, &bath).unwrap();
        let rho = gibbs_state(&h, beta).unwrap();
        let r = l.apply_vec(&vectorize(rho.op()));
        prop_assert!(r.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10 * l.norm2().max(1.0));
    }

    #[test]
    fn power_law_fit_is_exact_on_exact_data(prefactor in 0.01f64..1e3, exponent in 0.1f64..3.0) {
        let rows: Vec<(f64, f64)> = log_ladder(2.0, 6.0, 9).into_iter().map(|t| (t, prefactor / t.powf(exponent))).collect();
        let fit = fit_power_law(&rows, FitWindow::All).unwrap();
        prop_assert!((fit.exponent - exponent).abs() < 1e-10);
        prop_assert!((fit.prefactor / prefactor - 1.0).abs() < 1e-8);
    }

    #[test]
    fn log_ladder_is_increasing(lo in -2.0f64..4.0, span in 0.1f64..4.0, n in 2usize..40) {
        let l = log_ladder(lo, lo + span, n);
        prop_assert_eq!(l.len(), n);
        prop_assert!(l.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((l[0].log10() - lo).abs() < 1e-12);
        prop_assert!((l[n - 1].log10() - lo - span).abs() < 1e-12);
    }

    #[test]
    fn interpolant_reproduces_smooth_matrices(a in -2.0f64..2.0, b in 0.5f64..6.0, s in 0.0f64..1.0) {
        let f = move |x: f64| -> adiakit::Result<Array2<C64>> {
            Ok(Array2::from_shape_fn((2, 2), |(i, j)| C64::new((b * x + i as f64).sin() * a, (x * j as f64).exp())))
        };
        let t = MatrixInterpolant::build(f, 0.0, 1.0, 16, 1e-12).unwrap();
        let d = (&t.eval(s) - &f(s).unwrap()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-10, "{d}");
    }
}
