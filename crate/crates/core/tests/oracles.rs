//! Analytic constructions against dense or brute-force references, and the
//! scan-level agreement of the witnesses with the winding number.

use topochain::chain::ChainSpec;
use topochain::honeycomb::{simplex_scan, HoneycombPhase};
use topochain::majorana::{bdg_null_space_oracle, principal_angles, solve_left_modes, solve_right_modes, to_complex, MzmSet, Species};
use topochain::qfi::{length_grid, mu_grid, phase_scan};
use topochain::reproduce::{argmax_nu, spec_n3};
use topochain::winding::{critical_mu_values, winding_number};

fn assert_matches_oracle(set: &MzmSet, spec: &ChainSpec) {
    let oracle = bdg_null_space_oracle(spec, set.length, 1e-3).unwrap();
    assert_eq!(oracle.count, set.count());
    let side = if oracle.a_side == set.side { Species::A } else { Species::B };
    assert_eq!(side, set.species, "{:?} modes sit on the wrong edge", set.species);
    let reference = to_complex(oracle.span(set.species));
    for angle in principal_angles(&set.modes, &reference) {
        assert!(angle < 1e-4, "principal angle {angle}");
    }
}

#[test]
fn analytic_modes_span_the_bdg_null_space() {
    // the slowest μ = −2 mode decays like 0.8965^j, so L = 60 leaves a 1e-3 edge overlap
    for (mu, l) in [(0.0, 60), (-2.0, 120), (1.0, 60)] {
        let spec = spec_n3().with_mu(mu);
        let left = solve_left_modes(&spec, l).unwrap();
        let right = solve_right_modes(&spec, l).unwrap();
        assert_eq!(left.count(), right.count());
        assert_matches_oracle(&left, &spec);
        assert_matches_oracle(&right, &spec);
    }
}

#[test]
fn negative_winding_modes_span_the_bdg_null_space() {
    let spec = ChainSpec::from_xy(&[[0.2, 1.0], [0.0, 0.9]], 0.3).unwrap();
    assert_eq!(winding_number(&spec, 1e-8).unwrap().nu(), Some(-1));
    let left = solve_left_modes(&spec, 80).unwrap();
    assert_eq!(left.count(), 1);
    assert_matches_oracle(&left, &spec);
}

#[test]
fn honeycomb_argmax_agrees_with_the_phase_diagram() {
    let rows = simplex_scan(20, &length_grid(100, 400, 50)).unwrap();
    let interior: Vec<_> = rows.iter().filter(|r| r.phase != HoneycombPhase::Boundary).collect();
    let agree = interior.iter().filter(|r| r.argmax_phase(0.5) == r.phase).count();
    let frac = agree as f64 / interior.len() as f64;
    assert!(frac >= 0.95, "{agree}/{} points agree", interior.len());
}

#[test]
fn three_range_scan_picks_the_winding() {
    let spec = spec_n3();
    let mus = mu_grid(-4.0, 7.0, 0.5).unwrap();
    let crit = critical_mu_values(&spec).unwrap();
    let rows = phase_scan(&spec, &mus, &[1, 2, 3], &length_grid(250, 1200, 190));
    let mut checked = 0;
    for row in &rows {
        if crit.iter().any(|c| (c - row.mu).abs() <= 0.05) || row.fits.is_empty() {
            continue;
        }
        checked += 1;
        assert_eq!(argmax_nu(&row.fits, 0.5), row.winding as i64, "μ = {}", row.mu);
    }
    assert!(checked >= 15, "only {checked} gapped points");
}
