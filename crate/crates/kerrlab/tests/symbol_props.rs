use proptest::prelude::*;

use kerrlab::kerr_geometry::{new_params, BlackHoleParams, ModFunctions};
use kerrlab::multiplier_builder::{build_multipliers, total_bulk_current, Constants, MultiplierSet, Quadratic, Regime};
use kerrlab::phase_space::{partition_of_unity, FrequencyTriplet};
use kerrlab::symbol_calculus::{s1_symbol, s2_symbol, wave_symbol, xi_rstar, PhasePoint};

fn spin() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0..0.95f64]
}

fn unit_xi(a: f64) -> impl Strategy<Value = FrequencyTriplet> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::FRAC_PI_2, any::<bool>()).prop_filter_map(
        "inadmissible",
        move |(al, be, neg)| {
            let p = new_params(a, 1.0).unwrap();
            let (sa, ca) = al.sin_cos();
            let sgn = if neg { -1.0 } else { 1.0 };
            let xi = FrequencyTriplet::new(ca, sgn * sa * be.cos(), sa * be.sin());
            (xi.lambda > 1e-3 && xi.is_admissible(&p)).then_some(xi)
        },
    )
}

fn spin_and_xi() -> impl Strategy<Value = (f64, FrequencyTriplet)> {
    spin().prop_flat_map(|a| (Just(a), unit_xi(a)))
}

fn setup(a: f64) -> (BlackHoleParams, ModFunctions, Constants) {
    let p = new_params(a, 1.0).unwrap();
    let mods = ModFunctions::defaults(&p).unwrap();
    let c = Constants::hint(&p, (1.0 - a) / 16.0);
    (p, mods, c)
}

/// Weighted multiplier sets at Ξ, with the partition taken at |Ξ| = 4 where it
/// is homogeneous.
fn sets_at(p: &BlackHoleParams, mods: &ModFunctions, c: &Constants, xi: &FrequencyTriplet) -> Vec<(f64, MultiplierSet)> {
    let chi = partition_of_unity(p, &xi.scaled(4.0 / xi.norm()), c.delta_f).unwrap();
    Regime::ALL
        .iter()
        .filter(|r| chi[r.index()] > 0.0)
        .filter_map(|&r| build_multipliers(p, mods, r, xi, c).ok().map(|s| (chi[r.index()], s)))
        .collect()
}

fn radius(c: &Constants, s: f64) -> f64 {
    c.r_in + s * (c.r_out - c.r_in)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symbols_have_their_degrees((a, xi) in spin_and_xi(), r_off in 0.0..40.0f64, xr in -5.0..5.0f64) {
        let (p, mods, c) = setup(a);
        let r = c.r_in + r_off;
        let pt = PhasePoint::new(r, xr, xi);
        let s1 = s1_symbol(&p, &mods, r, &xi);
        let s2 = s2_symbol(&p, &mods, r, &xi);
        let w = wave_symbol(&p, &mods, &pt);
        for lam in [0.5, 2.0, 7.0] {
            let x = xi.scaled(lam);
            let tol = |v: f64| 1e-12 * lam * lam * (v.abs() + r * r);
            prop_assert!((s1_symbol(&p, &mods, r, &x) - lam * s1).abs() < tol(s1) / lam);
            prop_assert!((s2_symbol(&p, &mods, r, &x) - lam * lam * s2).abs() < tol(s2));
            prop_assert!((wave_symbol(&p, &mods, &pt.scaled(lam)) - lam * lam * w).abs() < tol(w) * (1.0 + xr * xr));
        }
    }

    #[test]
    fn bulk_current_is_quadratically_homogeneous((a, xi) in spin_and_xi(), s in 0.0..1.0f64, xr in -3.0..3.0f64) {
        let (p, mods, c) = setup(a);
        let sets = sets_at(&p, &mods, &c, &xi);
        let refs: Vec<(f64, &MultiplierSet)> = sets.iter().map(|(w, s)| (*w, s)).collect();
        let pt = PhasePoint::new(radius(&c, s), xr, xi);
        let q1 = total_bulk_current(&p, &mods, &refs, &pt);
        for lam in [0.5, 2.0, 7.0] {
            let ql = total_bulk_current(&p, &mods, &refs, &pt.scaled(lam));
            let scale = lam * lam * refs.iter().map(|(w, set)| {
                let q = set.quadratic(&p, pt.r);
                w * w * (q.d.abs() + q.l.abs() + q.f.abs())
            }).sum::<f64>() * (1.0 + xr * xr);
            prop_assert!((ql - lam * lam * q1).abs() <= 1e-10 * scale.max(1e-300), "{ql} vs {}", lam * lam * q1);
        }
    }

    /// After completing the square the remainder sees only Ξ, not ξ_r.
    #[test]
    fn square_completion_remainder_is_xi_r_free((a, xi) in spin_and_xi(), s in 0.0..1.0f64) {
        let (p, mods, c) = setup(a);
        let sets = sets_at(&p, &mods, &c, &xi);
        let refs: Vec<(f64, &MultiplierSet)> = sets.iter().map(|(w, s)| (*w, s)).collect();
        let r = radius(&c, s);
        let mut q = Quadratic::ZERO;
        for (w, set) in &refs {
            q.add_scaled(w * w, &set.quadratic(&p, r));
        }
        prop_assume!(q.d.abs() > 1e-12);
        let rem: Vec<f64> = [-3.0, 0.0, 5.0]
            .iter()
            .map(|&xr| {
                let pt = PhasePoint::new(r, xr, xi);
                let xt = xi_rstar(&p, &mods, &pt);
                total_bulk_current(&p, &mods, &refs, &pt) - q.d * (xt + q.eta()).powi(2)
            })
            .collect();
        let scale = rem[1].abs().max(q.d.abs()).max(q.f.abs()).max(1e-3);
        for v in &rem {
            prop_assert!((v - rem[1]).abs() < 1e-9 * scale, "{rem:?}");
        }
        prop_assert!((rem[1] - q.remainder()).abs() < 1e-9 * scale);
    }
}
