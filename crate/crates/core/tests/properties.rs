use std::f64::consts::PI;

use logunimodal::analytic::{psi, psi_prime, sigma_bm_sigma};
use logunimodal::criteria::{build_counterexample, theta_sweep, CounterexampleRule, COUNT_GRID};
use logunimodal::unimodality::{is_log_unimodal_curve, Verdict};
use logunimodal::zhong::{GridSpec, ZhongContext};
use logunimodal::{Family, MeasureSpec, Tolerances};
use num_complex::Complex;
use proptest::prelude::*;

fn tol() -> Tolerances<f64> {
    Tolerances::default()
}

fn family() -> impl Strategy<Value = Family<f64>> {
    prop_oneof![
        (0.05..3.1f64).prop_map(|b| Family::Lambda { b }),
        (0.1..5.0f64).prop_map(|t| Family::HalfNormal { t }),
        (0.5..5.0f64, 0.2..3.0f64).prop_map(|(p, theta)| Family::Gamma { p, theta }),
        (1.0..4.0f64, 1.0..4.0f64).prop_map(|(p, q)| Family::Beta { p, q }),
        Just(Family::MarchenkoPastur),
        Just(Family::MarchenkoPasturInverse),
        (0.1..0.9f64).prop_map(|alpha| Family::BooleanStable { alpha }),
        (0.1..2.0f64, 0.05..3.0f64).prop_map(|(alpha, w)| Family::UniformInterval { alpha, beta: alpha + w }),
        (-1.0..1.0f64, 0.2..1.5f64).prop_map(|(m, s)| Family::LogNormal { m, s }),
    ]
}

fn upper_point() -> impl Strategy<Value = Complex<f64>> {
    (-5.0..5.0f64, -2.0..1.0f64).prop_map(|(re, lg)| Complex::new(re, 10f64.powf(lg)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn densities_have_unit_mass(f in family()) {
        let nu = MeasureSpec::named(f).unwrap();
        let m: f64 = nu.integrate(|_| 1.0, &[], &tol()).unwrap();
        prop_assert!((m - 1.0).abs() < 1e-6, "{:?}: {}", f, m);
    }

    #[test]
    fn psi_maps_upper_half_plane_to_itself(f in family(), z in upper_point()) {
        let nu = MeasureSpec::named(f).unwrap();
        prop_assert!(psi(&nu, z, &tol()).unwrap().im > 0.0);
    }

    #[test]
    fn psi_prime_matches_differences(f in family(), z in upper_point()) {
        let nu = MeasureSpec::named(f).unwrap();
        let h = 1e-5;
        let fd = (psi(&nu, z + h, &tol()).unwrap() - psi(&nu, z - h, &tol()).unwrap()) / (2.0 * h);
        let d = psi_prime(&nu, z, &tol()).unwrap();
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1e-3), "{:?} at {}: {} vs {}", f, z, fd, d);
    }

    #[test]
    fn sigma_semigroup(s in 0.01..3.0f64, t in 0.01..3.0f64, z in upper_point()) {
        let a = sigma_bm_sigma(s, z).unwrap() * sigma_bm_sigma(t, z).unwrap();
        let b = sigma_bm_sigma(s + t, z).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0));
    }

    #[test]
    fn atomic_inversion_is_an_involution(pairs in prop::collection::vec((0.1..1.0f64, 0.05..20.0f64), 1..6)) {
        let total: f64 = pairs.iter().map(|p| p.0).sum();
        let mut norm: Vec<(f64, f64)> = pairs.iter().map(|&(w, x)| (w / total, x)).collect();
        norm.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        norm.dedup_by(|a, b| a.1 == b.1);
        let total: f64 = norm.iter().map(|p| p.0).sum();
        let norm: Vec<(f64, f64)> = norm.into_iter().map(|(w, x)| (w / total, x)).collect();
        let nu = MeasureSpec::atomic(&norm, 1e-9).unwrap();
        let back = nu.invert(1e-12).unwrap().invert(1e-12).unwrap();
        let (a, b) = (nu.point_masses().unwrap(), back.point_masses().unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            prop_assert!((p.location - q.location).abs() <= 1e-14 * p.location);
            prop_assert_eq!(p.weight, q.weight);
        }
    }

    #[test]
    fn blowup_is_positive(f in family(), r in -3.0..3.0f64) {
        let nu = MeasureSpec::named(f).unwrap();
        prop_assert!(nu.f_blowup(10f64.powf(r), &tol()) > 0.0);
    }
}

#[test]
fn criterion_agrees_with_density_verdict() {
    let t = tol();
    let (example, _) = build_counterexample::<f64>(30, CounterexampleRule::Example48).unwrap();
    let fixtures = [
        (MeasureSpec::named(Family::Dirac { c: 1.0 }).unwrap(), 1.0),
        (MeasureSpec::named(Family::Lambda { b: PI / 2.0 }).unwrap(), 1.0),
        (example.clone(), 0.5),
        (example, 2.0),
    ];
    for (nu, tt) in fixtures {
        let sweep = theta_sweep(&nu, tt, None, None, COUNT_GRID, &t).unwrap();
        let curve = ZhongContext::new(nu.clone(), tt, t).unwrap().density_curve(&GridSpec::default()).unwrap();
        let verdict = is_log_unimodal_curve(&curve, 1e-4).unwrap().verdict;
        assert_ne!(verdict, Verdict::Inconclusive);
        assert_eq!(sweep.verdict, verdict == Verdict::Unimodal, "t={tt}: max count {}", sweep.max_count);
    }
}
