//! Tripartite monogamy analysis on `2 ⊗ 2 ⊗ d` pure states: the concurrence
//! triple and residuals, product-form classification, the equal-marginal
//! family with its conjugate-swapped partner, and randomized scans.

mod battery;
mod example;
mod report;
mod scan;
mod theorem1;
mod theorem2;

pub use battery::{
    theorem1_battery, theorem2_battery, BatteryFailure, Theorem1Battery, Theorem2Battery,
    GENERIC_ASSIST_MIN, GENERIC_GAP_MIN, PRODUCT_ASSIST_TOL, PRODUCT_GAP_TOL,
};
pub use example::{
    build_example_state, example_rho_ab, run_example_check, Comparison, ExampleCheck,
    EXAMPLE_CONCURRENCE_TOL, EXAMPLE_MATRIX_TOL, EXAMPLE_ROOF_TOL,
};
pub use report::{
    detect_product_form, monogamy_triple, MonogamyReport, ProductForm, PPT_TOL, PRODUCT_TOL,
};
pub(crate) use report::require_tripartite;
pub use scan::{
    scan_conjecture, Histogram, InjectedSample, ScanSummary, ScanViolation, HISTOGRAM_BINS,
    RERUN_FACTOR, VIOLATION_THRESHOLD,
};
pub use theorem1::{check_theorem1, Theorem1Verdict, ROOF_VALUE_TOL};
pub use theorem2::{
    build_equal_marginal_state, expand_in_basis, psi_prime, psi_prime_deviation,
    to_b_schmidt_frame, verify_theorem2, EqualMarginalSpec, Theorem2Verdict, EXPANSION_TOL,
    PSI_PRIME_TOL,
};

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::error::Error;
    use crate::measures::RoofConfig;
    use crate::numerics::{ComplexMatrix, ZERO};
    use crate::states::random::{haar_unitary, stream_rng};
    use crate::states::{random_pure, PureState};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn ghz() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 8];
        amps[0] = c(h);
        amps[7] = c(h);
        PureState::new(vec![2, 2, 2], amps).unwrap()
    }

    fn w_state() -> PureState {
        let s = 1.0 / 3f64.sqrt();
        let mut amps = vec![ZERO; 8];
        amps[4] = c(s);
        amps[2] = c(s);
        amps[1] = c(s);
        PureState::new(vec![2, 2, 2], amps).unwrap()
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![2, 2], vec![c(h), ZERO, ZERO, c(h)]).unwrap()
    }

    fn as_tripartite(s: PureState, d: usize) -> PureState {
        PureState::new(vec![2, 2, d], s.into_amps()).unwrap()
    }

    #[test]
    fn example_state_values() {
        let psi = build_example_state();
        let n: f64 = psi.amps().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-15);
        let r = monogamy_triple(&psi, &RoofConfig::maximize()).unwrap();
        assert!((r.c_a_bc - 1.0).abs() < 1e-12);
        assert!(r.c_ab < 1e-12);
        assert!((r.c_ac_assist - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-6);
        assert!((r.equality_residual - 1.0 / 9.0).abs() < 1e-6);
        assert!(r.ppt_ab);
        assert_eq!(r.ckw_residual, None);
        assert_eq!(r.product_form, ProductForm::None);
        let rho = psi.reduced(&[0, 1]).unwrap();
        assert!(rho.matrix().max_abs_diff(&example_rho_ab()) < 1e-15);
    }

    #[test]
    fn ghz_and_w_triples() {
        let cfg = RoofConfig::maximize();
        let g = monogamy_triple(&ghz(), &cfg).unwrap();
        assert!((g.c_a_bc - 1.0).abs() < 1e-12 && g.c_ab < 1e-12);
        assert!((g.c_ac_assist - 1.0).abs() < 1e-12 && g.equality_residual.abs() < 1e-12);

        let w = monogamy_triple(&w_state(), &cfg).unwrap();
        assert!((w.c_a_bc - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((w.c_ab - 2.0 / 3.0).abs() < 1e-12);
        assert!((w.c_ac_assist - 2.0 / 3.0).abs() < 1e-12);
        assert!(w.equality_residual.abs() < 1e-12);
        // C_AC = 2/3 too, so CKW is tight; C^a_AB = 2/3 gives dual residual 0
        assert!(w.ckw_residual.unwrap().abs() < 1e-12);
        assert!(w.dual_residual.unwrap().abs() < 1e-12);
    }

    #[test]
    fn ghz_through_roof_at_d3() {
        // embed GHZ in d = 3: |000⟩ + |111⟩
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 12];
        amps[0] = c(h);
        amps[6 + 3 + 1] = c(h);
        let psi = PureState::new(vec![2, 2, 3], amps).unwrap();
        let r = monogamy_triple(&psi, &RoofConfig::maximize()).unwrap();
        assert!((r.c_ac_assist - 1.0).abs() < 1e-8);
        assert!(r.roof_converged);
    }

    #[test]
    fn product_forms() {
        let zero = PureState::basis(vec![2], &[0]).unwrap();
        let a_factor = as_tripartite(zero.tensor(&bell()), 2);
        assert_eq!(detect_product_form(&a_factor, 1e-9).unwrap(), ProductForm::AFactor);
        let two = PureState::basis(vec![3], &[2]).unwrap();
        let c_factor = as_tripartite(bell().tensor(&two), 3);
        assert_eq!(detect_product_form(&c_factor, 1e-9).unwrap(), ProductForm::CFactor);
        assert_eq!(detect_product_form(&ghz(), 1e-9).unwrap(), ProductForm::None);
        let all = PureState::basis(vec![2, 2, 2], &[0, 1, 0]).unwrap();
        assert_eq!(detect_product_form(&all, 1e-9).unwrap(), ProductForm::Both);
        assert!(matches!(
            detect_product_form(&bell(), 1e-9),
            Err(Error::WrongDims { .. })
        ));
        let r = monogamy_triple(&a_factor, &RoofConfig::maximize()).unwrap();
        assert!(r.c_a_bc < 1e-12 && r.c_ab < 1e-12 && r.c_ac_assist < 1e-12);
    }

    #[test]
    fn theorem1_verdicts() {
        let cfg = RoofConfig::maximize().with_restarts(8);
        let a = random_pure(&[2], 1).unwrap();
        let bc = random_pure(&[2, 3], 2).unwrap();
        let v = check_theorem1(&as_tripartite(a.tensor(&bc), 3), &cfg, 1e-6).unwrap();
        assert!(v.product && v.no_assistance && v.equal_concurrence && v.consistent);

        let v = check_theorem1(&build_example_state(), &cfg, 1e-6).unwrap();
        assert!(!v.product && !v.no_assistance && !v.equal_concurrence && v.consistent);
        let v = check_theorem1(&ghz(), &cfg, 1e-6).unwrap();
        assert!(!v.product && !v.no_assistance && !v.equal_concurrence && v.consistent);
    }

    fn random_spec(d: usize, seed: u64) -> EqualMarginalSpec {
        EqualMarginalSpec::random(d, &mut stream_rng(seed, 0)).unwrap()
    }

    #[test]
    fn equal_marginal_members_share_the_a_marginal() {
        let spec = random_spec(3, 5);
        let (p0, p1) = spec.basis();
        for p in [p0, p1] {
            let s = PureState::new(vec![2, 3], p).unwrap();
            let ra = s.reduced(&[0]).unwrap();
            let mu = spec.mu();
            assert!(ra.matrix().max_abs_diff(&ComplexMatrix::from_diag(&mu)) < 1e-14);
        }
        let psi = build_equal_marginal_state(&spec).unwrap();
        let r = monogamy_triple(&psi, &RoofConfig::maximize()).unwrap();
        assert!((r.c_a_bc - spec.expected_concurrence()).abs() < 1e-12);
        assert!((r.c_ac_assist - r.c_a_bc).abs() < 1e-6);
        assert!(r.ppt_ab && r.c_ab < 1e-8);
    }

    #[test]
    fn equal_marginal_degenerate_specs() {
        let u = haar_unitary(3, &mut stream_rng(1, 0));
        let ghz_like = EqualMarginalSpec::new(3, [0.5, 0.5], [1.0, 0.0], u.clone()).unwrap();
        let v = verify_theorem2(&ghz_like, &RoofConfig::maximize(), 1e-6).unwrap();
        assert!((v.report.c_a_bc - 1.0).abs() < 1e-12);
        assert!(v.premise_met && v.passed && v.report.c_ab < 1e-12);

        let product = EqualMarginalSpec::new(3, [1.0, 0.0], [0.3, 0.7], u).unwrap();
        let v = verify_theorem2(&product, &RoofConfig::maximize(), 1e-6).unwrap();
        assert!(v.report.c_a_bc < 1e-12 && v.report.c_ac_assist < 1e-12 && v.report.c_ab < 1e-12);
        assert!(v.passed);
    }

    #[test]
    fn spec_validation() {
        let u = ComplexMatrix::identity(2);
        assert!(matches!(
            EqualMarginalSpec::new(2, [0.6, 0.6], [1.0, 0.0], u.clone()),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            EqualMarginalSpec::new(3, [0.5, 0.5], [1.0, 0.0], u.clone()),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            EqualMarginalSpec::new(2, [0.5, 0.5], [1.0, 0.0], u.scale(2.0)),
            Err(Error::InvalidSpec(_))
        ));
    }

    /// Oracle: partial transpose computed by explicit index swap on the
    /// full tripartite density matrix, independent of the reduced-state code.
    fn pt_ab_oracle(psi: &PureState) -> ComplexMatrix {
        let d = psi.dims()[2];
        let a = psi.amps();
        let mut out = ComplexMatrix::zeros(4, 4);
        for ia in 0..2 {
            for ib in 0..2 {
                for ja in 0..2 {
                    for jb in 0..2 {
                        let mut acc = ZERO;
                        for cc in 0..d {
                            // ⟨ia jb| ρ_AB |ja ib⟩
                            acc += a[ia * 2 * d + jb * d + cc] * a[ja * 2 * d + ib * d + cc].conj();
                        }
                        out[(ia * 2 + ib, ja * 2 + jb)] = acc;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn psi_prime_identity() {
        for seed in 0..20 {
            let spec = random_spec(2 + (seed as usize % 3), seed);
            let psi = build_equal_marginal_state(&spec).unwrap();
            let (p0, p1) = spec.basis();
            let basis = (p0.as_slice(), p1.as_slice());
            let coeffs = expand_in_basis(&psi, basis).unwrap();
            let prime = psi_prime(&psi, basis, coeffs).unwrap();
            let dev = prime.reduced(&[0, 1]).unwrap().matrix().max_abs_diff(&pt_ab_oracle(&psi));
            assert!(dev < 1e-12, "seed {seed}: {dev}");
            let rotated = to_b_schmidt_frame(&psi).unwrap();
            assert!(psi_prime_deviation(&rotated, basis).unwrap() < 1e-12);
        }
    }

    #[test]
    fn psi_prime_trivial_expansion_swaps_branches() {
        // coefficients (1, 0, 0, 1): Ψ = ψ0|0⟩ + ψ1|1⟩ → Ψ′ = ψ1|0⟩ + ψ0|1⟩ (up to conjugation)
        let spec = random_spec(3, 77);
        let psi = build_equal_marginal_state(&EqualMarginalSpec::new(
            3,
            spec.mu(),
            [0.5, 0.5],
            spec.u().clone(),
        )
        .unwrap())
        .unwrap();
        let (p0, p1) = spec.basis();
        let h = c(std::f64::consts::FRAC_1_SQRT_2);
        let prime = psi_prime(&psi, (&p0, &p1), [h, ZERO, ZERO, h]).unwrap();
        for a in 0..2 {
            for cc in 0..3 {
                assert!((prime.amps()[a * 6 + cc] - p1[a * 3 + cc] * h).norm() < 1e-15);
                assert!((prime.amps()[a * 6 + 3 + cc] - p0[a * 3 + cc] * h).norm() < 1e-15);
            }
        }
        assert!(
            prime.reduced(&[0, 1]).unwrap().matrix().max_abs_diff(&pt_ab_oracle(&psi)) < 1e-12
        );
        assert!(matches!(
            psi_prime(&psi, (&p0, &p1), [h, ZERO, ZERO, c(0.5)]),
            Err(Error::ExpansionMismatch(_))
        ));
    }

    #[test]
    fn theorem2_on_random_specs() {
        let cfg = RoofConfig::maximize().with_restarts(8);
        for seed in 0..10 {
            let v = verify_theorem2(&random_spec(3, seed), &cfg, 1e-6).unwrap();
            assert!(v.premise_met && v.passed, "seed {seed}: {v:?}");
        }
    }

    #[test]
    fn small_batteries_pass() {
        let cfg = RoofConfig::maximize().with_restarts(4);
        let b = theorem1_battery(3, 10, 3, &cfg, 1e-6).unwrap();
        assert!(b.failures.is_empty(), "{:?}", b.failures);
        assert_eq!(b.generic_samples, 10);
        let b = theorem2_battery(2, 10, 3, &cfg, 1e-6).unwrap();
        assert!(b.failures.is_empty() && b.passed == 10);
        assert!(b.max_c_ab < 1e-8 && b.max_psi_prime_deviation < 1e-9);
    }

    #[test]
    fn example_check_passes() {
        let check = run_example_check(&RoofConfig::maximize()).unwrap();
        assert!(check.passed, "{check:?}");
        assert_eq!(check.comparisons.len(), 4);
    }
}
