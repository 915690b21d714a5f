//! Cross-module checks against independent oracles.

use golomb_rmt::codes::{hamming_code, simplex_code, verify_appendix_identities};
use golomb_rmt::eigen::{dense_sym_eigenvalues, tridiag_eigenvalues, CirculantBackend};
use golomb_rmt::ensembles::{
    member_rng, pseudo_ensemble, sample_tridiag_hermite, sample_wigner, EnsembleSpec, TridiagVariant,
};
use golomb_rmt::gf2::{default_primitive, primitive_polynomials};
use golomb_rmt::laws::{empirical_moment, ensemble_stats, ks_distance, mean_std, trace_moment_oracle, RefLaw};
use golomb_rmt::sequences::{parse_seed, run_battery, MSeq};
use golomb_rmt::Gf2Poly;

fn poly(text: &str) -> Gf2Poly {
    text.parse().unwrap()
}

#[test]
fn long_sequence_from_ones_seed() {
    let f = poly("x^13+x^8+x^5+x^3+1");
    let s = MSeq::new(f, &parse_seed("ones", 13).unwrap()).unwrap();
    assert_eq!(s.len(), 8191);
    assert!(run_battery(&s).pass());
}

#[test]
fn small_graph_sequence_passes_battery() {
    let s = MSeq::new(poly("x^5+x^2+1"), &[1, 1, 0, 1, 0]).unwrap();
    let report = run_battery(&s);
    assert!(report.pass());
    assert_eq!(report.linear_complexity, 5);
}

#[test]
fn wigner_moments_match_trace_oracle() {
    for k in 0..5 {
        let w = sample_wigner(64, &mut member_rng(3, k)).unwrap();
        let sp = dense_sym_eigenvalues(&w).unwrap();
        assert!((empirical_moment(&sp, 2) - 0.25).abs() < 1e-12);
        for r in 1..=6 {
            let oracle = trace_moment_oracle(&w, r).unwrap();
            assert!((empirical_moment(&sp, r) - oracle).abs() < 1e-10, "r={r}");
        }
    }
}

#[test]
fn wigner_fourth_moment_near_catalan() {
    let beta4: Vec<f64> = (0..100)
        .map(|k| {
            let w = sample_wigner(512, &mut member_rng(512, k)).unwrap();
            empirical_moment(&dense_sym_eigenvalues(&w).unwrap(), 4)
        })
        .collect();
    let (mean, _) = mean_std(&beta4);
    assert!((mean - 0.125).abs() < 0.005, "mean beta4 {mean}");
}

#[test]
fn pseudo_ensemble_odd_moments_cancel() {
    let s = MSeq::new(default_primitive(7).unwrap(), &[1; 7]).unwrap();
    let specs = pseudo_ensemble(&s);
    assert_eq!(specs.len(), 2 * 127);
    let report = ensemble_stats(&specs, 5, None, 0, RefLaw::Semicircle, CirculantBackend::Direct).unwrap();
    for r in [1, 3, 5] {
        assert!(report.mean_of(r).abs() < 1e-13, "r={r}: {}", report.mean_of(r));
    }
    assert!((report.mean_of(2) - 0.25).abs() < 1e-12);
}

#[test]
fn ensemble_spec_json_round_trip() {
    let s = MSeq::new(default_primitive(5).unwrap(), &[1; 5]).unwrap();
    let spec = EnsembleSpec::pseudo(&s, 4, -1);
    let back: EnsembleSpec = serde_json::from_str(&spec.to_string()).unwrap();
    assert_eq!(back, spec);
    let a = spec.spectrum(CirculantBackend::Direct).unwrap();
    let b = back.spectrum(CirculantBackend::Direct).unwrap();
    assert_eq!(a, b);
}

#[test]
fn standard_tridiagonal_is_semicircular() {
    let t = sample_tridiag_hermite(1000, &mut member_rng(1000, 0), TridiagVariant::Standard).unwrap();
    let ks = ks_distance(&tridiag_eigenvalues(&t).unwrap(), &RefLaw::Semicircle);
    assert!(ks < 0.05, "ks {ks}");
    let lit = sample_tridiag_hermite(1000, &mut member_rng(1000, 0), TridiagVariant::PaperLiteral).unwrap();
    let sp = tridiag_eigenvalues(&lit).unwrap();
    assert!(sp.max() > 1.5);
}

#[test]
fn simplex_and_hamming_are_dual() {
    for m in 2..=5 {
        for f in primitive_polynomials(m).unwrap() {
            let simplex = simplex_code(f).unwrap();
            let hamming = hamming_code(f).unwrap();
            let n = (1usize << m) - 1;
            assert_eq!(simplex.dimension() + hamming.dimension(), n);
            let words = simplex.codewords().unwrap();
            hamming
                .for_each_codeword(|h| assert!(words.iter().all(|w| !w.dot(h))))
                .unwrap();
        }
    }
}

#[test]
fn appendix_counts_partition_tuples() {
    for (m, r) in [(3, 2), (3, 4), (4, 4)] {
        let s = MSeq::new(default_primitive(m).unwrap(), &vec![1; m as usize]).unwrap();
        let rep = verify_appendix_identities(&s, r, true).unwrap();
        assert!(rep.pass(), "{rep:?}");
        assert_eq!(rep.gamma_0 + rep.gamma_g + rep.even_tuples, rep.tuples);
        if r == 2 {
            assert_eq!(rep.even_tuples, rep.tuples);
        }
    }
    let s = MSeq::new(default_primitive(4).unwrap(), &[1; 4]).unwrap();
    assert_eq!(verify_appendix_identities(&s, 4, true).unwrap().tuples, 3375);
}
