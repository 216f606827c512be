use num_complex::Complex64;
use proptest::prelude::*;

use kerrlab::kerr_geometry::BlackHoleParams;
use kerrlab::radial_wave_lab::scatter::stationary_solution;
use kerrlab::radial_wave_lab::{
    evolve, inverse_tortoise, scattering_oracle, tortoise, BoundaryKind, Direction, Drive, EvolveOptions,
    EvolveOutput, InitialData, ModeSpec, Packet, RadialGrid, ScatterOptions,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tortoise_round_trip(a in prop_oneof![Just(0.0), 0.0..0.999f64], e in -8.0..4.0f64) {
        let p = BlackHoleParams::new(a, 1.0).unwrap();
        let r = p.r_plus + 10f64.powf(e);
        let back = inverse_tortoise(&p, tortoise(&p, r).unwrap()).unwrap();
        prop_assert!((back - r).abs() < 1e-10 * r.max(1.0), "{r} -> {back}");
    }
}

/// Max relative energy change of a reflecting a = 0 run with Δt = Δr*/2.
fn energy_drift(h: f64) -> f64 {
    let p = BlackHoleParams::new(0.0, 1.0).unwrap();
    let mode = ModeSpec::new(0, 6f64.sqrt()).unwrap();
    let opts = EvolveOptions {
        grid: RadialGrid {
            r_star_min: -60.0,
            r_star_max: 60.0,
            dr_star: h,
        },
        dt: 0.5 * h,
        t_final: 100.0,
        boundary: BoundaryKind::Reflecting,
        ..Default::default()
    };
    let init = InitialData::Packet(Packet {
        center: 10.0,
        width: 3.0,
        omega0: 0.6,
        direction: Direction::Ingoing,
        amplitude: 1.0,
    });
    let out = evolve(&p, &mode, &init, &opts).unwrap();
    let e0 = out.series[0].energy;
    out.series.iter().map(|d| ((d.energy - e0) / e0).abs()).fold(0.0, f64::max)
}

struct Driven {
    out: EvolveOutput,
    grid: RadialGrid,
    omega: f64,
}

/// Starts from rest and drives u = e^{−iωt} at the right end, switched on over
/// `ramp` so slowly that the cavity formed by the Dirichlet end is hardly
/// excited.
fn driven(p: &BlackHoleParams, mode: &ModeSpec, omega: f64, h: f64, ramp: f64, t_final: f64) -> Driven {
    let grid = RadialGrid {
        r_star_min: -30.0,
        r_star_max: 30.0,
        dr_star: h,
    };
    let opts = EvolveOptions {
        grid,
        dt: 0.5 * h,
        t_final,
        boundary: BoundaryKind::Absorbing,
        record_every: 1000,
        trap_omega: None,
        drive: Some(Drive {
            omega,
            amplitude: 1.0,
            ramp,
        }),
    };
    let zero = vec![Complex64::new(0.0, 0.0); grid.len()];
    let out = evolve(p, mode, &InitialData::Arrays { u: zero.clone(), v: zero }, &opts).unwrap();
    Driven { out, grid, omega }
}

/// RMS mismatch between the driven field and the stationary profile scaled to
/// the drive amplitude at the right end. The profile is integrated four times
/// finer than the grid so that its own error does not count.
fn profile_mismatch(p: &BlackHoleParams, mode: &ModeSpec, d: &Driven) -> f64 {
    let n = d.grid.len();
    let (_, phi, _) =
        stationary_solution(p, mode, d.omega, d.grid.r_star_min, d.grid.r_star_max, 4 * (n - 1)).unwrap();
    let st = &d.out.state;
    let c = Complex64::from_polar(1.0, -d.omega * st.t) / phi[4 * (n - 1)];
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        num += (st.u[i] - c * phi[4 * i]).norm_sqr();
        den += (c * phi[4 * i]).norm_sqr();
    }
    (num / den).sqrt()
}

#[test]
fn energy_drift_converges_at_second_order_or_better() {
    let (coarse, fine) = (energy_drift(0.1), energy_drift(0.05));
    assert!(coarse / fine >= 3.5, "drift {coarse:.3e} -> {fine:.3e}");
}

#[test]
fn driven_field_matches_stationary_profile() {
    let p = BlackHoleParams::new(0.9, 1.0).unwrap();
    let mode = ModeSpec::new(1, 2f64.sqrt()).unwrap();
    let coarse = profile_mismatch(&p, &mode, &driven(&p, &mode, 0.3, 0.1, 400.0, 700.0));
    let fine = profile_mismatch(&p, &mode, &driven(&p, &mode, 0.3, 0.05, 400.0, 700.0));
    assert!(fine < 0.02, "rms mismatch {fine:.3e}");
    assert!(coarse / fine >= 3.5, "mismatch {coarse:.3e} -> {fine:.3e}");
}

/// A partially reflected probe (|R|² ≈ 1/4) at a = 0.9: the energy the left
/// end absorbs, per unit incident flux, must be k|T|²/ω.
#[test]
fn horizon_flux_uses_the_shifted_wavenumber() {
    let p = BlackHoleParams::new(0.9, 1.0).unwrap();
    let mode = ModeSpec::new(1, 6f64.sqrt()).unwrap();
    let om = 0.45;
    let d = driven(&p, &mode, om, 0.05, 700.0, 1000.0);
    let st = &d.out.state;
    // incident amplitude from a point well inside the right end
    let j = d.grid.len() - 101;
    let h = d.grid.h();
    let du = (st.u[j + 1] - st.u[j - 1]) / (2.0 * h);
    let a_in = 0.5 * (st.u[j] - du / (I * om)) * Complex64::from_polar(1.0, om * d.grid.x(j));
    let absorbed = d.out.series.last().unwrap().flux_left / (2.0 * om * om * a_in.norm_sqr());

    let o = ScatterOptions {
        r_star_min: d.grid.r_star_min,
        r_star_max: d.grid.r_star_max,
        ..Default::default()
    };
    let res = scattering_oracle(&p, &mode, om, &o).unwrap();
    assert!(res.r2() > 0.2, "probe is barely reflected: |R|² = {}", res.r2());
    let expect = res.k * res.t2() / om;
    assert!((absorbed - expect).abs() < 0.01 * expect, "absorbed {absorbed} vs k|T|²/ω = {expect}");
}
