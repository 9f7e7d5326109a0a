use monogamy_core::measures::{concurrence_2qubit, pure_concurrence, spin_flip};
use monogamy_core::numerics::{hermitian_eig, sqrt_det2, ComplexMatrix};
use monogamy_core::states::random::{complex_gaussian, random_density_with, random_pure_with};
use monogamy_core::states::{random_pure, stream_rng};
use proptest::prelude::*;

fn psd2(seed: u64, rank: usize) -> ComplexMatrix {
    let mut rng = stream_rng(seed, 1);
    let g = ComplexMatrix::from_vec(2, rank, (0..2 * rank).map(|_| complex_gaussian(&mut rng)).collect())
        .unwrap();
    let mut m = g.matmul(&g.adjoint());
    m.hermitize();
    m
}

/// det from the eigenvalues instead of the closed form.
fn det2_oracle(m: &ComplexMatrix) -> f64 {
    let e = hermitian_eig(m, 1e-14).unwrap().eigenvalues;
    (e[0] * e[1]).max(0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn eig_reconstructs_and_is_orthonormal(seed in any::<u64>(), n in 2usize..9) {
        let mut rng = stream_rng(seed, 0);
        let g = ComplexMatrix::from_vec(n, n, (0..n * n).map(|_| complex_gaussian(&mut rng)).collect()).unwrap();
        let mut h = &g + &g.adjoint();
        h.hermitize();
        let r = hermitian_eig(&h, 1e-14).unwrap();
        let scale = h.frobenius();
        prop_assert!(r.reconstruct_with(|x| x).max_abs_diff(&h) <= 1e-10 * scale.max(1.0));
        let v = &r.eigenvectors;
        prop_assert!(v.adjoint().matmul(v).max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-10);
        prop_assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_det2_matches_eigenvalues(seed in any::<u64>(), rank in 1usize..3) {
        let m = psd2(seed, rank);
        // compare determinants: at rank 1 both roots are √(round-off)
        let scale = m.frobenius().powi(2);
        prop_assert!((sqrt_det2(&m).unwrap().powi(2) - det2_oracle(&m)).abs() <= 1e-12 * scale);
    }

    #[test]
    fn minkowski(seed in any::<u64>()) {
        let (a, b) = (psd2(seed, 2), psd2(seed ^ 0x9e37, 2));
        let lhs = sqrt_det2(&(&a + &b)).unwrap();
        prop_assert!(lhs >= sqrt_det2(&a).unwrap() + sqrt_det2(&b).unwrap() - 1e-10);
    }

    #[test]
    fn rank_lemma(seed in any::<u64>(), l0 in 0.0f64..3.0, l1 in 0.0f64..3.0, l2 in 0.0f64..3.0) {
        let (rho, s0, s1) = (psd2(seed, 1), psd2(seed ^ 1, 2), psd2(seed ^ 2, 2));
        let mix = &rho.scale(l0) + &s0.scale(l1);
        prop_assert!(sqrt_det2(&mix).unwrap() >= l1 * sqrt_det2(&s0).unwrap() - 1e-10);
        let base = &s0.scale(l1) + &s1.scale(l2);
        let full = &rho.scale(l0) + &base;
        prop_assert!(sqrt_det2(&full).unwrap() >= sqrt_det2(&base).unwrap() - 1e-10);
    }

    #[test]
    fn partial_traces_compose(seed in any::<u64>(), d in 2usize..5) {
        let rho = random_density_with(&[2, 2, d], 3, &mut stream_rng(seed, 0)).unwrap();
        let direct = rho.partial_trace(&[0]).unwrap();
        let stepwise = rho.partial_trace(&[0, 1]).unwrap().partial_trace(&[0]).unwrap();
        prop_assert!(direct.matrix().max_abs_diff(stepwise.matrix()) <= 1e-12);
        prop_assert!((rho.partial_trace(&[1, 2]).unwrap().matrix().trace().re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn pure_marginals_share_spectrum(seed in any::<u64>(), d in 2usize..6) {
        let psi = random_pure_with(&[2, 2, d], &mut stream_rng(seed, 0)).unwrap();
        // ρ_A and ρ_BC carry the same nonzero spectrum
        let a = hermitian_eig(psi.reduced(&[0]).unwrap().matrix(), 1e-14).unwrap().eigenvalues;
        let bc = hermitian_eig(psi.reduced(&[1, 2]).unwrap().matrix(), 1e-14).unwrap().eigenvalues;
        let top = &bc[bc.len() - 2..];
        prop_assert!((a[0] - top[0]).abs() <= 1e-10 && (a[1] - top[1]).abs() <= 1e-10);
        let c = pure_concurrence(&psi, &[0]).unwrap();
        prop_assert!((c - 2.0 * (a[0] * a[1]).max(0.0).sqrt()).abs() <= 1e-7);
    }

    #[test]
    fn wootters_on_pure_states_matches_pure_formula(seed in any::<u64>()) {
        let psi = random_pure(&[2, 2], seed).unwrap();
        let direct = pure_concurrence(&psi, &[0]).unwrap();
        prop_assert!((concurrence_2qubit(&psi.density()).unwrap() - direct).abs() <= 1e-7);
        // ρ̃ = |ψ̃⟩⟨ψ̃| for pure ρ, so tr ρρ̃ = |⟨ψ|ψ̃⟩|² = C²
        let rho = psi.density();
        let overlap = rho.matrix().matmul(&spin_flip(&rho).unwrap()).trace().re;
        prop_assert!((overlap - direct * direct).abs() <= 1e-10);
    }
}

#[test]
fn haar_purity_mean() {
    // E tr ρ_A² = (2 + d)/(2d + 1) for Haar states on 2 ⊗ d
    for d in [2usize, 3, 6] {
        let n = 4000;
        let purities: Vec<f64> = (0..n)
            .map(|k| {
                let psi = random_pure_with(&[2, d], &mut stream_rng(77, k)).unwrap();
                psi.reduced(&[0]).unwrap().purity()
            })
            .collect();
        let mean = purities.iter().sum::<f64>() / n as f64;
        let var = purities.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let se = (var / n as f64).sqrt();
        let expected = (2 + d) as f64 / (2 * d + 1) as f64;
        assert!((mean - expected).abs() <= 5.0 * se, "d={d}: {mean} vs {expected} (se {se})");
    }
}
