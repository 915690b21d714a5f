use golomb_rmt::codes::{hamming_code, nu_map, tau_autocorrelation, tau_values, TauClass};
use golomb_rmt::eigen::{
    circulant_eigenvalues, dense_sym_eigenvalues, jacobi_eigenvalues, spectrum_square, CirculantBackend, Solver, Spectrum,
};
use golomb_rmt::ensembles::{
    build_pseudo, member_rng, pseudo_members, sample_random_circulant, sample_wigner, EnsembleSpec, ShiftSelection,
    SymCirculant,
};
use golomb_rmt::gf2::{default_primitive, primitive_polynomials};
use golomb_rmt::laws::{empirical_moment, ensemble_stats, ks_distance, ks_distance_sorted, RefLaw};
use golomb_rmt::sequences::{autocorrelation_all, axiom_balance, berlekamp_massey, window_check, MSeq};
use golomb_rmt::Gf2Poly;
use proptest::prelude::*;

/// A random m-sequence of degree 2..=max_m with a random non-zero seed.
fn mseq(max_m: u32) -> impl Strategy<Value = MSeq> {
    (2..=max_m, any::<u64>(), any::<prop::sample::Index>()).prop_map(|(m, seed, pick)| {
        let polys = primitive_polynomials(m).unwrap();
        let f = polys[pick.index(polys.len())];
        let mask = (1u64 << m) - 1;
        let state = match seed & mask {
            0 => 1,
            s => s,
        };
        let bits: Vec<u8> = (0..m).map(|j| ((state >> j) & 1) as u8).collect();
        MSeq::new(f, &bits).unwrap()
    })
}

fn random_circulant() -> impl Strategy<Value = SymCirculant> {
    (1usize..=60, any::<u64>()).prop_map(|(h, seed)| sample_random_circulant(2 * h + 1, &mut member_rng(seed, 0)).unwrap())
}

fn spectrum(c: &SymCirculant) -> Spectrum {
    circulant_eigenvalues(c, CirculantBackend::Direct).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gf2_multiplication_commutes_mod_primitive(a in 0u64..1 << 12, b in 0u64..1 << 12, m in 2u32..=12) {
        let f = default_primitive(m).unwrap();
        let (a, b) = (Gf2Poly::from_bits(a), Gf2Poly::from_bits(b));
        prop_assert_eq!(a.mul_mod(b, f).unwrap(), b.mul_mod(a, f).unwrap());
        let ab = a.mul_mod(b, f).unwrap();
        prop_assert!(ab.degree().is_none_or(|d| d < m));
    }

    #[test]
    fn reciprocal_is_an_involution_on_polys_with_constant_term(bits in 1u64..1 << 20) {
        let f = Gf2Poly::from_bits(bits | 1);
        prop_assert_eq!(f.reciprocal().reciprocal(), f);
    }

    #[test]
    fn m_sequences_satisfy_the_axioms(s in mseq(10)) {
        let n = s.len() as i64;
        prop_assert_eq!(axiom_balance(&s), -1);
        let ac = autocorrelation_all(&s);
        prop_assert_eq!(ac[0], n);
        prop_assert!(ac[1..].iter().all(|&c| c == -1));
        prop_assert!(window_check(&s, s.degree()));
        prop_assert_eq!(berlekamp_massey(&s.periods(2)).complexity, s.degree() as usize);
    }

    #[test]
    fn pseudo_matrices_are_palindromic_with_constant_diagonal(s in mseq(9), a in any::<usize>(), neg in any::<bool>()) {
        let sign = if neg { -1 } else { 1 };
        let c = build_pseudo(&s, a % s.len(), sign).unwrap();
        prop_assert!(c.is_palindromic());
        prop_assert_eq!(c.first_row()[0], sign);
        prop_assert_eq!(c.scale(), 1.0 / (2.0 * (s.len() as f64).sqrt()));
    }

    #[test]
    fn negating_a_member_negates_its_spectrum(s in mseq(9), a in any::<usize>()) {
        let a = a % s.len();
        let plus = spectrum(&build_pseudo(&s, a, 1).unwrap());
        let minus = spectrum(&build_pseudo(&s, a, -1).unwrap());
        prop_assert!(plus.negated().max_abs_diff(&minus) < 1e-12);
    }

    #[test]
    fn shifting_the_sequence_permutes_the_ensemble(s in mseq(8), k in any::<usize>(), a in any::<usize>()) {
        let (k, a) = (k % s.len(), a % s.len());
        let from_shifted = build_pseudo(&s.shifted(k), a, 1).unwrap();
        let direct = build_pseudo(&s, (a + k) % s.len(), 1).unwrap();
        prop_assert_eq!(from_shifted.first_row(), direct.first_row());
    }

    #[test]
    fn realization_is_deterministic(n in 2usize..40, seed in any::<u64>(), stream in 0u64..8) {
        let spec = EnsembleSpec::Wigner { n, rng_seed: seed, stream };
        let a = spec.realize().unwrap().to_dense();
        let b = spec.realize().unwrap().to_dense();
        prop_assert_eq!(a.packed(), b.packed());
        prop_assert_eq!(spec.hash(), EnsembleSpec::Wigner { n, rng_seed: seed, stream }.hash());
    }

    #[test]
    fn trace_and_frobenius_match_the_spectrum(c in random_circulant()) {
        let sp = spectrum(&c);
        let dense = c.to_dense();
        let trace: f64 = sp.values().iter().sum();
        let frob: f64 = sp.values().iter().map(|v| v * v).sum();
        prop_assert!((trace - dense.trace()).abs() <= 1e-9 * dense.trace().abs().max(1.0));
        prop_assert!((frob - dense.frobenius_sq()).abs() <= 1e-9 * dense.frobenius_sq());
    }

    #[test]
    fn solvers_agree_on_circulants(c in random_circulant()) {
        let dense = c.to_dense();
        let fast = spectrum(&c);
        let fft = circulant_eigenvalues(&c, CirculantBackend::Fft).unwrap();
        let ql = dense_sym_eigenvalues(&dense).unwrap();
        let jacobi = jacobi_eigenvalues(&dense).unwrap();
        for other in [&fft, &ql, &jacobi] {
            prop_assert!(fast.max_abs_diff(other) < 1e-8);
        }
    }

    #[test]
    fn solvers_agree_on_wigner(n in 1usize..48, seed in any::<u64>()) {
        let w = sample_wigner(n, &mut member_rng(seed, 0)).unwrap();
        let ql = dense_sym_eigenvalues(&w).unwrap();
        let jacobi = jacobi_eigenvalues(&w).unwrap();
        prop_assert!(ql.max_abs_diff(&jacobi) < 1e-8);
    }

    #[test]
    fn nu_is_invariant_under_tuple_permutation(mut t in prop::collection::vec(0usize..31, 1..6), seed in any::<u64>()) {
        let before = nu_map(&t, 31);
        let mut rng = member_rng(seed, 0);
        rand::seq::SliceRandom::shuffle(t.as_mut_slice(), &mut rng);
        prop_assert_eq!(nu_map(&t, 31), before);
    }

    #[test]
    fn tau_is_zero_or_a_shift(s in mseq(6), t in prop::collection::vec(any::<usize>(), 1..5)) {
        let n = s.len();
        let t: Vec<usize> = t.into_iter().map(|x| x % n).collect();
        let (tau, class) = tau_values(&s, &t).unwrap();
        let in_dual = hamming_code(s.generator()).unwrap().contains(&nu_map(&t, n));
        match class {
            TauClass::Zero => {
                prop_assert!(in_dual);
                prop_assert_eq!(tau_autocorrelation(&tau), n as i64);
            }
            TauClass::Shift(b) => {
                prop_assert!(!in_dual);
                prop_assert_eq!(&tau, &s.shifted(b).bits().clone());
                prop_assert_eq!(tau_autocorrelation(&tau), -1);
            }
        }
    }

    #[test]
    fn ks_distance_is_order_free_and_bounded(mut xs in prop::collection::vec(-2.0f64..2.0, 1..200), seed in any::<u64>()) {
        let a = ks_distance(&Spectrum::new(xs.clone(), Solver::Jacobi).unwrap(), &RefLaw::Semicircle);
        rand::seq::SliceRandom::shuffle(xs.as_mut_slice(), &mut member_rng(seed, 0));
        let b = ks_distance(&Spectrum::new(xs.clone(), Solver::Jacobi).unwrap(), &RefLaw::Semicircle);
        prop_assert_eq!(a, b);
        prop_assert!((0.0..=1.0).contains(&a));
        xs.sort_by(f64::total_cmp);
        prop_assert_eq!(ks_distance_sorted(&xs, &RefLaw::Semicircle), a);
    }

    #[test]
    fn squaring_maps_moments(c in random_circulant(), r in 1u32..5) {
        let sp = spectrum(&c);
        let sq = spectrum_square(&sp);
        let want = 4f64.powi(r as i32) * empirical_moment(&sp, 2 * r);
        prop_assert!((empirical_moment(&sq, r) - want).abs() <= 1e-10 * want.abs().max(1.0));
    }
}

#[test]
fn ensemble_stats_is_reproducible() {
    let s = MSeq::new(default_primitive(7).unwrap(), &[1; 7]).unwrap();
    let specs = pseudo_members(&s, ShiftSelection::All, true, false).unwrap();
    let run = || ensemble_stats(&specs, 4, Some(40), 11, RefLaw::Semicircle, CirculantBackend::Direct).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    assert_eq!(a.member_indices.len(), 40);
}
