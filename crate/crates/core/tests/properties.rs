//! Randomised cross-checks between independent routes to the same quantity.

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngSeed};

use topochain::chain::{min_gap, ChainSpec};
use topochain::correlators::{bdg_correlator_oracle, correlator_table};
use topochain::ed::{ed_ground_state, ed_qfi_from_state, ed_string_correlator};
use topochain::pauli::{dual_operator, dual_product_check, PauliString};
use topochain::qfi::{finite_qfi_density, qfi_density, Variant};
use topochain::toeplitz::{leading_minors, pivoted_det, scf_series, scf_toeplitz_entry};
use topochain::winding::{winding_integral, winding_number};

/// Fixed seed so every run draws the same cases; `ED_CASES` widens the ED sweep.
fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x7c_2024),
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..Config::default()
    }
}

/// Up to three neighbours, couplings in [−2, 2], μ in [−4, 4], gap at least 0.05.
fn gapped_spec() -> impl Strategy<Value = ChainSpec> {
    (1usize..=3)
        .prop_flat_map(|nf| (prop::collection::vec(prop::array::uniform2(-2.0..2.0f64), nf), -4.0..4.0f64))
        .prop_map(|(c, mu)| ChainSpec::new(c, mu).unwrap())
        .prop_filter("gapped", |s| min_gap(s).1 > 0.05)
}

fn nonzero_nu(max: i64) -> impl Strategy<Value = i64> {
    (1..=max, any::<bool>()).prop_map(|(n, neg)| if neg { -n } else { n })
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn winding_from_roots_matches_the_loop_integral(spec in gapped_spec()) {
        let w = winding_number(&spec, 1e-8).unwrap();
        let integral = winding_integral(&spec, 4096);
        prop_assert!((w.from_roots - integral).abs() < 1e-6, "{} vs {}", w.from_roots, integral);
        prop_assert!(w.agreement);
    }
}

proptest! {
    #![proptest_config(config(30))]

    #[test]
    fn momentum_sum_matches_real_space_bdg(spec in gapped_spec(), half in 4usize..40) {
        let l = 2 * half;
        let fast = correlator_table(&spec, l).unwrap();
        let dense = bdg_correlator_oracle(&spec, l).unwrap();
        for r in -(l as i64) + 1..l as i64 {
            prop_assert!((fast.get(r) - dense.get(r)).abs() < 1e-10, "r={} {} vs {}", r, fast.get(r), dense.get(r));
        }
    }
}

proptest! {
    // 40 tables × 25 sizes = 1000 minors
    #![proptest_config(config(40))]

    #[test]
    fn fast_minors_match_pivoted_lu(spec in gapped_spec(), nu in nonzero_nu(4), half in 16usize..40) {
        let l = 2 * half;
        let table = correlator_table(&spec, l).unwrap();
        let symbol = |k: i64| table.get(k - nu);
        let fast = leading_minors(&symbol, 25);
        for (m, (det, _)) in fast.iter().enumerate() {
            let lu = pivoted_det(&symbol, m + 1);
            prop_assert!((det - lu).abs() < 1e-8, "m={} {} vs {}", m + 1, det, lu);
        }
    }

    #[test]
    fn fast_minors_match_lu_on_generic_symbols(
        coeffs in prop::collection::vec(-1.0..1.0f64, 61),
        diag in 0.0..3.0f64,
    ) {
        let t = |k: i64| coeffs[(k + 30) as usize] + if k == 0 { diag } else { 0.0 };
        for (m, (det, _)) in leading_minors(&t, 30).iter().enumerate() {
            let lu = pivoted_det(&t, m + 1);
            prop_assert!((det - lu).abs() <= 1e-8 * lu.abs().max(1.0), "m={} {} vs {}", m + 1, det, lu);
        }
    }
}

proptest! {
    #![proptest_config(config(20))]

    /// `c → c†` swaps the plain and staggered witnesses; `c → ic` sends ν to −ν.
    #[test]
    fn interchange_symmetries_hold_for_the_qfi(spec in gapped_spec(), nu in nonzero_nu(3), half in 10usize..40) {
        let l = 2 * half;
        let table = correlator_table(&spec, l).unwrap();
        let conj = correlator_table(&spec.particle_hole(), l).unwrap();
        let rot = correlator_table(&spec.phase_rotated(), l).unwrap();
        for (v, w) in [(Variant::Plain, Variant::Staggered), (Variant::Staggered, Variant::Plain)] {
            let f = qfi_density(&table, nu, v).unwrap();
            let g = qfi_density(&conj, nu, w).unwrap();
            prop_assert!((f - g).abs() < 1e-9, "particle-hole {:?}: {} vs {}", v, f, g);
            let h = qfi_density(&rot, -nu, v).unwrap();
            prop_assert!((f - h).abs() < 1e-9, "phase rotation {:?}: {} vs {}", v, f, h);
        }
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn dual_operators_commute_off_overlap(nu in nonzero_nu(6), i in 1usize..20, j in 1usize..20) {
        let l = 30;
        let a = dual_operator(nu, i, l).unwrap();
        let b = dual_operator(nu, j, l).unwrap();
        prop_assert!(a.commutes_with(&b), "ν={} i={} j={}", nu, i, j);
    }
}

#[test]
fn dual_operators_square_to_identity() {
    let l = 20;
    for nu in (-6i64..=6).filter(|&n| n != 0) {
        for j in 1..=l + 1 - nu.unsigned_abs() as usize {
            let tau = dual_operator(nu, j, l).unwrap();
            assert!(tau.is_hermitian(), "ν={nu} j={j}");
            assert_eq!(&tau * &tau, PauliString::identity(), "ν={nu} j={j}");
        }
    }
}

#[test]
fn dual_products_equal_spin_strings() {
    let l = 20;
    for nu in (-6i64..=6).filter(|&n| n != 0) {
        let n = nu.unsigned_abs() as usize;
        for i in 1..=l - n {
            for r in 1..=l + 1 - n - i {
                assert!(dual_product_check(nu, i, r, l).unwrap(), "ν={nu} i={i} r={r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(config(std::env::var("ED_CASES").ok().and_then(|v| v.parse().ok()).unwrap_or(12)))]

    /// Free-fermion pipeline against exact diagonalisation of the spin chain.
    #[test]
    fn scf_and_qfi_match_exact_diagonalisation(spec in gapped_spec(), half in 3usize..=6) {
        let l = 2 * half;
        let gs = ed_ground_state(&spec, l).unwrap();
        let table = correlator_table(&spec, l).unwrap();
        for nu in (-3i64..=3).filter(|&n| n != 0 && (n.unsigned_abs() as usize) < l) {
            let series = scf_series(&table, nu, l - nu.unsigned_abs() as usize).unwrap();
            for e in &series.entries {
                let ed = ed_string_correlator(&gs, nu, 1, e.r).unwrap();
                prop_assert!((ed - e.c).abs() < 1e-8, "ν={} r={}: {} vs {}", nu, e.r, ed, e.c);
            }
            for v in [Variant::Plain, Variant::Staggered] {
                let ed = ed_qfi_from_state(&gs, nu, v).unwrap();
                let ff = finite_qfi_density(&table, nu, v).unwrap();
                prop_assert!((ed - ff).abs() < 1e-8, "ν={} {:?}: {} vs {}", nu, v, ed, ff);
            }
        }
    }
}

#[test]
fn toeplitz_entry_is_the_shifted_correlator() {
    let spec = ChainSpec::new(vec![[1.0, 0.5], [0.3, -0.2]], 0.4).unwrap();
    let table = correlator_table(&spec, 20).unwrap();
    for nu in [-2, 1, 3] {
        for (i, j) in [(0, 0), (3, 1), (1, 4)] {
            assert_eq!(scf_toeplitz_entry(&table, nu, i, j), table.get(i as i64 - j as i64 - nu));
        }
    }
}
