//! Kerr metric, inverse metric and volume data in Boyer–Lindquist, ingoing
//! Eddington–Finkelstein and normalized coordinates.
//!
//! Coordinates are ordered `(t | v₊ | τ, r, θ, φ | φ₊ | φ̃)` in all charts.

use crate::error::{KerrError, Result};

pub type Mat4 = [[f64; 4]; 4];

/// Polar cap excluded from every θ grid.
pub const THETA_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BlackHoleParams {
    pub m: f64,
    pub a: f64,
    pub r_plus: f64,
    pub r_minus: f64,
    pub omega_h: f64,
}

impl BlackHoleParams {
    /// Subextremal parameters; the spin is stored as `|a|`.
    pub fn new(a: f64, m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(KerrError::NonpositiveMass(m));
        }
        let a = a.abs();
        if !(a < m) {
            return Err(KerrError::ExtremalOrSuper { a, m });
        }
        let s = ((m - a) * (m + a)).sqrt();
        let r_plus = m + s;
        Ok(Self {
            m,
            a,
            r_plus,
            r_minus: m - s,
            omega_h: a / (2.0 * m * r_plus),
        })
    }

    /// Spin ratio a/m.
    pub fn spin(&self) -> f64 {
        self.a / self.m
    }

    #[inline]
    pub fn delta(&self, r: f64) -> f64 {
        r * r - 2.0 * self.m * r + self.a * self.a
    }

    /// r² + a².
    #[inline]
    pub fn r2a2(&self, r: f64) -> f64 {
        r * r + self.a * self.a
    }

    /// μ = Δ/(r²+a²).
    #[inline]
    pub fn mu(&self, r: f64) -> f64 {
        self.delta(r) / self.r2a2(r)
    }

    /// ∂_r μ.
    #[inline]
    pub fn dmu(&self, r: f64) -> f64 {
        let s = self.r2a2(r);
        (2.0 * (r - self.m) * s - 2.0 * r * self.delta(r)) / (s * s)
    }

    /// |q|² = r² + a²cos²θ.
    #[inline]
    pub fn q2(&self, r: f64, theta: f64) -> f64 {
        let c = theta.cos();
        r * r + self.a * self.a * c * c
    }

    /// Σ² = (r²+a²)² − a²sin²θ Δ.
    #[inline]
    pub fn sigma2(&self, r: f64, theta: f64) -> f64 {
        let s = theta.sin();
        let w = self.r2a2(r);
        w * w - self.a * self.a * s * s * self.delta(r)
    }

    /// Horizon-shifted frequency k₊ = ξ_τ + ω_H ξ_φ.
    #[inline]
    pub fn k_plus(&self, xi_tau: f64, xi_phi: f64) -> f64 {
        xi_tau + self.omega_h * xi_phi
    }
}

pub fn new_params(a: f64, m: f64) -> Result<BlackHoleParams> {
    BlackHoleParams::new(a, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    BoyerLindquist,
    IngoingEF,
    Normalized,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::BoyerLindquist => "BoyerLindquist",
            Chart::IngoingEF => "IngoingEF",
            Chart::Normalized => "Normalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordPoint {
    pub chart: Chart,
    pub coords: [f64; 4],
}

impl CoordPoint {
    pub fn new(chart: Chart, t: f64, r: f64, theta: f64, phi: f64) -> Self {
        Self {
            chart,
            coords: [t, r, theta, phi],
        }
    }
    pub fn r(&self) -> f64 {
        self.coords[1]
    }
    pub fn theta(&self) -> f64 {
        self.coords[2]
    }
}

fn expect_chart(pt: &CoordPoint, chart: Chart) -> Result<()> {
    if pt.chart == chart {
        Ok(())
    } else {
        Err(KerrError::ChartMismatch {
            expected: chart.name(),
            found: pt.chart.name(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricComponents {
    pub g: Mat4,
    pub ginv: Mat4,
    pub sqrt_det: f64,
}

impl MetricComponents {
    /// max |(g·ginv − I)_{αβ}|.
    pub fn inverse_defect(&self) -> f64 {
        let p = mat_mul(&self.g, &self.ginv);
        let mut worst = 0.0f64;
        for (i, row) in p.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - id).abs());
            }
        }
        worst
    }
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn transpose(a: &Mat4) -> Mat4 {
    let mut t = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det4(a: &Mat4) -> f64 {
    let mut m = *a;
    let mut det = 1.0;
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

fn sym(g: &mut Mat4, i: usize, j: usize, v: f64) {
    g[i][j] = v;
    g[j][i] = v;
}

/// Boyer–Lindquist metric and its closed-form inverse.
pub fn metric_bl(p: &BlackHoleParams, pt: &CoordPoint) -> Result<MetricComponents> {
    expect_chart(pt, Chart::BoyerLindquist)?;
    let (r, th) = (pt.r(), pt.theta());
    let delta = p.delta(r);
    if !(delta > 0.0) || r <= p.r_plus {
        return Err(KerrError::HorizonSingular { r, delta });
    }
    let (m, a) = (p.m, p.a);
    let q2 = p.q2(r, th);
    let s2 = th.sin().powi(2);
    let sig2 = p.sigma2(r, th);

    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(delta - a * a * s2) / q2;
    sym(&mut g, 0, 3, -2.0 * a * m * r * s2 / q2);
    g[1][1] = q2 / delta;
    g[2][2] = q2;
    g[3][3] = sig2 * s2 / q2;

    let mut gi = [[0.0; 4]; 4];
    gi[0][0] = -sig2 / (q2 * delta);
    sym(&mut gi, 0, 3, -2.0 * a * m * r / (q2 * delta));
    gi[1][1] = delta / q2;
    gi[2][2] = 1.0 / q2;
    gi[3][3] = (delta - a * a * s2) / (q2 * delta * s2);

    Ok(MetricComponents {
        g,
        ginv: gi,
        sqrt_det: q2 * th.sin().abs(),
    })
}

/// Metric and inverse in a chart `(v₊ − t_mod, r, θ, φ₊ − φ_mod)` with the
/// given modifier derivatives. `t' = φ' = 0` is the ingoing
/// Eddington–Finkelstein chart itself.
fn modified_ef(p: &BlackHoleParams, r: f64, th: f64, tp: f64, pp: f64) -> MetricComponents {
    let (m, a) = (p.m, p.a);
    let q2 = p.q2(r, th);
    let s2 = th.sin().powi(2);
    let sig2 = p.sigma2(r, th);
    let delta = p.delta(r);
    let w = p.r2a2(r);

    // Ingoing EF line element.
    let mut ef = [[0.0; 4]; 4];
    ef[0][0] = -(1.0 - 2.0 * m * r / q2);
    sym(&mut ef, 0, 1, 1.0);
    sym(&mut ef, 0, 3, -2.0 * a * m * r * s2 / q2);
    sym(&mut ef, 1, 3, -a * s2);
    ef[2][2] = q2;
    ef[3][3] = sig2 * s2 / q2;

    // dv₊ = dτ + t' dr, dφ₊ = dφ̃ + φ' dr
    let mut j = [[0.0; 4]; 4];
    for (i, row) in j.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    j[0][1] = tp;
    j[3][1] = pp;
    let g = mat_mul(&transpose(&j), &mat_mul(&ef, &j));

    let mut gi = [[0.0; 4]; 4];
    gi[0][0] = (a * a * s2 - 2.0 * w * tp + delta * tp * tp) / q2;
    gi[1][1] = delta / q2;
    sym(&mut gi, 0, 1, w * (1.0 - p.mu(r) * tp) / q2);
    sym(&mut gi, 1, 3, (a - delta * pp) / q2);
    sym(
        &mut gi,
        0,
        3,
        (a * (1.0 - tp) - pp * w * (1.0 - p.mu(r) * tp)) / q2,
    );
    gi[2][2] = 1.0 / q2;
    gi[3][3] = (1.0 / s2 - 2.0 * a * pp + delta * pp * pp) / q2;

    MetricComponents {
        g,
        ginv: gi,
        sqrt_det: q2 * th.sin().abs(),
    }
}

/// Ingoing Eddington–Finkelstein metric; regular across the horizon.
pub fn metric_ef(p: &BlackHoleParams, pt: &CoordPoint) -> Result<MetricComponents> {
    expect_chart(pt, Chart::IngoingEF)?;
    Ok(modified_ef(p, pt.r(), pt.theta(), 0.0, 0.0))
}

/// Normalized-chart metric, with the inverse in closed form.
pub fn inverse_metric_normalized(
    p: &BlackHoleParams,
    mods: &ModFunctions,
    pt: &CoordPoint,
) -> Result<MetricComponents> {
    expect_chart(pt, Chart::Normalized)?;
    let r = pt.r();
    let (c, c2m, e) = mods.blend_coefficients(r);
    Ok(blended(p, r, pt.theta(), c, c2m, e))
}

/// Metric and inverse for t_mod' = e + (1 − c)μ⁻¹, φ_mod' = (1 − c)a/Δ,
/// i.e. the Boyer–Lindquist chart moved a fraction c of the way to the chart
/// with t_mod' = e/c. Written through the Kerr frame forms so that the Δ⁻¹
/// terms only appear multiplied by 1 − c², which is passed in exactly.
fn blended(p: &BlackHoleParams, r: f64, th: f64, c: f64, one_minus_c2: f64, e: f64) -> MetricComponents {
    let (m, a) = (p.m, p.a);
    let q2 = p.q2(r, th);
    let s2 = th.sin().powi(2);
    let sig2 = p.sigma2(r, th);
    let delta = p.delta(r);
    let w = p.r2a2(r);
    // only divide by Δ where it is weighted in
    let by_delta = |x: f64| if one_minus_c2 == 0.0 { 0.0 } else { one_minus_c2 * x / delta };

    let mut g = [[0.0; 4]; 4];
    g[0][0] = -(delta - a * a * s2) / q2;
    sym(&mut g, 0, 3, -2.0 * a * m * r * s2 / q2);
    g[3][3] = sig2 * s2 / q2;
    g[2][2] = q2;
    sym(&mut g, 0, 1, c - e * (delta - a * a * s2) / q2);
    sym(&mut g, 1, 3, -a * s2 * (2.0 * m * r * e + c * q2) / q2);
    g[1][1] = by_delta(q2) + 2.0 * c * e - e * e * (delta - a * a * s2) / q2;

    let mut gi = [[0.0; 4]; 4];
    gi[0][0] = (a * a * s2 + delta * e * e - 2.0 * c * e * w - by_delta(w * w)) / q2;
    sym(&mut gi, 0, 3, (a - c * a * e - by_delta(a * w)) / q2);
    gi[3][3] = (1.0 / s2 - by_delta(a * a)) / q2;
    gi[1][1] = delta / q2;
    gi[2][2] = 1.0 / q2;
    sym(&mut gi, 0, 1, (c * w - delta * e) / q2);
    sym(&mut gi, 1, 3, c * a / q2);

    MetricComponents {
        g,
        ginv: gi,
        sqrt_det: q2 * th.sin().abs(),
    }
}

/// C² quintic smoothstep 6x⁵ − 15x⁴ + 10x³ clamped to [0, 1].
#[inline]
pub fn smoothstep5(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

/// Derivative of [`smoothstep5`] with respect to its argument.
#[inline]
pub fn smoothstep5_d(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    30.0 * x * x * (1.0 - x) * (1.0 - x)
}

/// The modifier derivatives t_mod' and φ_mod' of the normalized chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModFunctions {
    pub params: BlackHoleParams,
    pub delta_h: f64,
    pub delta_bl: f64,
    /// Inner blend region `[r₊(1+δ_BL), r₊(1+2δ_BL)]`.
    pub inner: (f64, f64),
    /// Outer blend region `[12m, 13m]`.
    pub outer: (f64, f64),
    /// Test hook: a bump added to t_mod' inside the inner blend.
    corruption: f64,
}

/// Outcome of the spacelike certification of the blends.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BlendReport {
    /// Smallest relative distance of t_mod' to the ends of the allowed
    /// interval over the grid.
    pub margin: f64,
    pub worst_r: f64,
    pub worst_theta: f64,
}

impl ModFunctions {
    fn unchecked(p: &BlackHoleParams, delta_h: f64, delta_bl: f64) -> Self {
        Self {
            params: *p,
            delta_h,
            delta_bl,
            inner: (p.r_plus * (1.0 + delta_bl), p.r_plus * (1.0 + 2.0 * delta_bl)),
            outer: (12.0 * p.m, 13.0 * p.m),
            corruption: 0.0,
        }
    }

    /// Copy with t_mod' pushed out of the spacelike interval in the inner blend.
    pub fn corrupted(&self, amplitude: f64) -> Self {
        Self {
            corruption: amplitude,
            ..*self
        }
    }

    /// Default constants δ_BL = (1−a/m)/10, δ_H = δ_BL/100.
    pub fn defaults(p: &BlackHoleParams) -> Result<Self> {
        let (dh, dbl) = default_deltas(p);
        build_mod_functions(p, dh, dbl)
    }

    pub fn t_prime(&self, r: f64) -> f64 {
        let p = &self.params;
        let m2 = p.m * p.m;
        let near = m2 / (r * r);
        if r <= self.inner.0 {
            return near;
        }
        let inv_mu = 1.0 / p.mu(r);
        if r < self.inner.1 {
            let x = (r - self.inner.0) / (self.inner.1 - self.inner.0);
            let s = smoothstep5(x);
            let bump = self.corruption * 16.0 * s * (1.0 - s) * p.r2a2(r) / p.delta(r);
            return (1.0 - s) * near + s * inv_mu + bump;
        }
        if r <= self.outer.0 {
            return inv_mu;
        }
        let far = 2.0 * inv_mu - near;
        if r < self.outer.1 {
            let s = smoothstep5((r - self.outer.0) / (self.outer.1 - self.outer.0));
            return (1.0 - s) * inv_mu + s * far;
        }
        far
    }

    pub fn phi_prime(&self, r: f64) -> f64 {
        let p = &self.params;
        if r <= self.inner.0 {
            return 0.0;
        }
        let bl = p.a / p.delta(r);
        if r < self.inner.1 {
            return smoothstep5((r - self.inner.0) / (self.inner.1 - self.inner.0)) * bl;
        }
        if r <= self.outer.0 {
            return bl;
        }
        if r < self.outer.1 {
            let s = smoothstep5((r - self.outer.0) / (self.outer.1 - self.outer.0));
            return (1.0 + s) * bl;
        }
        2.0 * bl
    }

    /// (c, 1 − c², e) with t_mod' = e + (1 − c)μ⁻¹ and φ_mod' = (1 − c)a/Δ:
    /// c = 1 near the horizon, 0 in the Boyer–Lindquist window, −1 far out.
    pub fn blend_coefficients(&self, r: f64) -> (f64, f64, f64) {
        let p = &self.params;
        let near = p.m * p.m / (r * r);
        if r <= self.inner.0 {
            return (1.0, 0.0, near);
        }
        if r < self.inner.1 {
            let s = smoothstep5((r - self.inner.0) / (self.inner.1 - self.inner.0));
            let bump = self.corruption * 16.0 * s * (1.0 - s) * p.r2a2(r) / p.delta(r);
            return (1.0 - s, s * (2.0 - s), (1.0 - s) * near + bump);
        }
        if r <= self.outer.0 {
            return (0.0, 1.0, 0.0);
        }
        if r < self.outer.1 {
            let s = smoothstep5((r - self.outer.0) / (self.outer.1 - self.outer.0));
            return (-s, (1.0 - s) * (1.0 + s), -s * near);
        }
        (-1.0, 0.0, -near)
    }

    /// Ends of the open interval t_mod' must lie in for level sets of τ to be
    /// spacelike at (r, θ), valid where Δ > 0.
    pub fn spacelike_interval(&self, r: f64, theta: f64) -> (f64, f64) {
        let p = &self.params;
        let w = p.r2a2(r);
        let delta = p.delta(r);
        let s2 = theta.sin().powi(2);
        let root = (w * w - p.a * p.a * s2 * delta).sqrt();
        // lower end rewritten to avoid cancellation: (w − root)/Δ = a²s²/(w + root)
        (p.a * p.a * s2 / (w + root), (w + root) / delta)
    }

    /// Grid certification of the spacelike inequality on both blend regions.
    pub fn certify_blends(&self, n_r: usize, n_theta: usize) -> BlendReport {
        let mut rep = BlendReport {
            margin: f64::INFINITY,
            worst_r: f64::NAN,
            worst_theta: f64::NAN,
        };
        for &(lo, hi) in &[self.inner, self.outer] {
            for i in 0..n_r {
                let r = lo + (hi - lo) * i as f64 / (n_r - 1) as f64;
                let tp = self.t_prime(r);
                for j in 0..n_theta {
                    let th = THETA_MIN + (std::f64::consts::PI - 2.0 * THETA_MIN) * j as f64
                        / (n_theta - 1) as f64;
                    let (l, u) = self.spacelike_interval(r, th);
                    let gap = ((tp - l) / l.abs().max(tp.abs()).max(1e-300))
                        .min((u - tp) / u.abs().max(1e-300));
                    if gap < rep.margin || gap.is_nan() {
                        rep = BlendReport {
                            margin: gap,
                            worst_r: r,
                            worst_theta: th,
                        };
                    }
                }
            }
        }
        rep
    }
}

/// Default (δ_H, δ_BL) for the given spin.
pub fn default_deltas(p: &BlackHoleParams) -> (f64, f64) {
    let dbl = (1.0 - p.spin()) / 10.0;
    let dred = dbl / 10.0;
    (dred / 10.0, dbl)
}

/// Build t_mod', φ_mod' and certify the spacelike condition on a
/// 400 × 64 grid per blend region.
pub fn build_mod_functions(p: &BlackHoleParams, delta_h: f64, delta_bl: f64) -> Result<ModFunctions> {
    build_mod_functions_with(p, delta_h, delta_bl, 0.0)
}

/// As [`build_mod_functions`], with the corruption hook applied before
/// certification.
pub fn build_mod_functions_with(
    p: &BlackHoleParams,
    delta_h: f64,
    delta_bl: f64,
    corruption: f64,
) -> Result<ModFunctions> {
    let slack = 1.0 + 1e-9;
    let cap = (1.0 - p.spin()) / 5.0;
    if !(delta_h > 0.0 && delta_bl > 0.0) {
        return Err(KerrError::BlendInfeasible {
            reason: format!("constants must be positive (delta_h={delta_h}, delta_bl={delta_bl})"),
            r: f64::NAN,
            theta: f64::NAN,
            margin: f64::NAN,
        });
    }
    if delta_bl > cap * slack || delta_h > delta_bl / 5.0 * slack {
        return Err(KerrError::BlendInfeasible {
            reason: format!(
                "ordering delta_h <= delta_bl/5, delta_bl <= (1-a/m)/5 violated (delta_h={delta_h}, delta_bl={delta_bl})"
            ),
            r: p.r_plus * (1.0 + delta_bl),
            theta: std::f64::consts::FRAC_PI_2,
            margin: cap - delta_bl,
        });
    }
    let mods = ModFunctions::unchecked(p, delta_h, delta_bl).corrupted(corruption);
    let rep = mods.certify_blends(400, 64);
    if !(rep.margin > 0.0) {
        return Err(KerrError::BlendInfeasible {
            reason: "t_mod' leaves the spacelike interval".into(),
            r: rep.worst_r,
            theta: rep.worst_theta,
            margin: rep.margin,
        });
    }
    Ok(mods)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn bl(r: f64, th: f64) -> CoordPoint {
        CoordPoint::new(Chart::BoyerLindquist, 0.0, r, th, 0.0)
    }

    #[test]
    fn params_examples() {
        let p = new_params(0.0, 1.0).unwrap();
        assert_eq!((p.r_plus, p.r_minus, p.omega_h), (2.0, 0.0, 0.0));
        let p = new_params(0.6, 1.0).unwrap();
        assert!((p.r_plus - 1.8).abs() < 1e-15);
        assert!((p.r_minus - 0.2).abs() < 1e-15);
        assert!((p.omega_h - 1.0 / 6.0).abs() < 1e-15);
        assert!(p.delta(p.r_plus).abs() < 1e-15 && p.delta(p.r_minus).abs() < 1e-15);
        assert!(matches!(
            new_params(1.0, 1.0),
            Err(KerrError::ExtremalOrSuper { .. })
        ));
        assert!(matches!(
            new_params(0.0, 0.0),
            Err(KerrError::NonpositiveMass(_))
        ));
        assert_eq!(new_params(-0.5, 1.0).unwrap().a, 0.5);
    }

    #[test]
    fn schwarzschild_at_four_m() {
        let p = new_params(0.0, 1.0).unwrap();
        let g = metric_bl(&p, &bl(4.0, FRAC_PI_2)).unwrap().g;
        assert!((g[0][0] + 0.5).abs() < 1e-15);
        assert!((g[1][1] - 2.0).abs() < 1e-15);
        assert!((g[2][2] - 16.0).abs() < 1e-15);
        assert!((g[3][3] - 16.0).abs() < 1e-15);
    }

    #[test]
    fn bl_inverse_and_determinant() {
        let p = new_params(0.6, 1.0).unwrap();
        let mc = metric_bl(&p, &bl(3.0, FRAC_PI_2)).unwrap();
        assert!(mc.inverse_defect() < 1e-12);

        let p = new_params(0.9, 1.0).unwrap();
        let mc = metric_bl(&p, &bl(2.0, FRAC_PI_3)).unwrap();
        let det = det4(&mc.g);
        let q2 = 4.0 + 0.81 * 0.25;
        let closed = q2 * FRAC_PI_3.sin();
        assert!(((-det).sqrt() - closed).abs() < 1e-12 * closed);
        assert!((mc.sqrt_det - closed).abs() < 1e-14);
    }

    #[test]
    fn bl_rejects_horizon_and_wrong_chart() {
        let p = new_params(0.6, 1.0).unwrap();
        assert!(matches!(
            metric_bl(&p, &bl(1.5, 1.0)),
            Err(KerrError::HorizonSingular { .. })
        ));
        let ef = CoordPoint::new(Chart::IngoingEF, 0.0, 3.0, 1.0, 0.0);
        assert!(matches!(
            metric_bl(&p, &ef),
            Err(KerrError::ChartMismatch { .. })
        ));
    }

    #[test]
    fn ef_regular_on_horizon() {
        let p = new_params(0.0, 1.0).unwrap();
        let pt = CoordPoint::new(Chart::IngoingEF, 0.0, 2.0, FRAC_PI_2, 0.0);
        let mc = metric_ef(&p, &pt).unwrap();
        assert!(mc.g[0][0].abs() < 1e-15);
        assert_eq!(mc.g[0][1], 1.0);
        assert!(mc.g.iter().flatten().all(|v| v.is_finite()));

        let p = new_params(0.6, 1.0).unwrap();
        let pt = CoordPoint::new(Chart::IngoingEF, 0.0, 1.8, 1.0, 0.0);
        let mc = metric_ef(&p, &pt).unwrap();
        let d = det4(&mc.g);
        assert!(d < 0.0 && d.is_finite());
        assert!(mc.inverse_defect() < 1e-12);
    }

    #[test]
    fn ef_pulls_back_to_bl() {
        let p = new_params(0.6, 1.0).unwrap();
        let (r, th) = (5.0, FRAC_PI_2);
        let ef = metric_ef(&p, &CoordPoint::new(Chart::IngoingEF, 0.0, r, th, 0.0))
            .unwrap()
            .g;
        let blg = metric_bl(&p, &bl(r, th)).unwrap().g;
        // (t, r, θ, φ) → (v₊, r, θ, φ₊)
        let mut j = [[0.0; 4]; 4];
        for (i, row) in j.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        j[0][1] = 1.0 / p.mu(r);
        j[3][1] = p.a / p.delta(r);
        let pulled = mat_mul(&transpose(&j), &mat_mul(&ef, &j));
        for i in 0..4 {
            for k in 0..4 {
                assert!((pulled[i][k] - blg[i][k]).abs() < 1e-10, "{i}{k}");
            }
        }
    }

    #[test]
    fn blend_form_matches_pullback() {
        let p = new_params(0.7, 1.0).unwrap();
        let mods = ModFunctions::defaults(&p).unwrap();
        for r in [1.6, 1.72, 1.76, 1.8, 5.0, 12.4, 12.9, 40.0] {
            let (c, c2m, e) = mods.blend_coefficients(r);
            let (tp, pp) = (mods.t_prime(r), mods.phi_prime(r));
            let bl = 1.0 - c;
            assert!((e + bl / p.mu(r) - tp).abs() < 1e-12 * tp.abs().max(1.0), "r={r}");
            assert!(((1.0 - c) * p.a / p.delta(r) - pp).abs() < 1e-12 * pp.abs().max(1.0), "r={r}");
            assert!((1.0 - c * c - c2m).abs() < 1e-15);
            let th = 0.9;
            let x = modified_ef(&p, r, th, tp, pp);
            let y = blended(&p, r, th, c, c2m, e);
            for i in 0..4 {
                for j in 0..4 {
                    let sc = x.g[i][j].abs().max(1.0);
                    assert!((x.g[i][j] - y.g[i][j]).abs() < 1e-9 * sc, "g r={r} {i}{j}");
                    let sc = x.ginv[i][j].abs().max(1.0);
                    assert!((x.ginv[i][j] - y.ginv[i][j]).abs() < 1e-9 * sc, "ginv r={r} {i}{j}");
                }
            }
        }
    }

    #[test]
    fn mod_function_pieces() {
        let p = new_params(0.9, 1.0).unwrap();
        let mods = ModFunctions::defaults(&p).unwrap();
        let r = 5.0;
        assert!((mods.t_prime(r) - 1.0 / p.mu(r)).abs() < 1e-14);
        assert!((mods.phi_prime(r) - p.a / p.delta(r)).abs() < 1e-14);
        let r = 20.0;
        assert!((mods.t_prime(r) - (2.0 / p.mu(r) - 1.0 / (r * r))).abs() < 1e-14);
        assert!((mods.phi_prime(r) - 2.0 * p.a / p.delta(r)).abs() < 1e-14);
        let r = p.r_plus;
        assert!((mods.t_prime(r) - 1.0 / (r * r)).abs() < 1e-14);
        assert_eq!(mods.phi_prime(r), 0.0);
    }

    #[test]
    fn blend_examples() {
        let p = new_params(0.0, 1.0).unwrap();
        assert!(ModFunctions::defaults(&p).is_ok());
        let p = new_params(0.9, 1.0).unwrap();
        let mods = build_mod_functions(&p, 0.004, 0.02).unwrap();
        assert!(mods.certify_blends(200, 32).margin > 0.0);
        assert!(matches!(
            build_mod_functions(&p, 0.004, 0.5),
            Err(KerrError::BlendInfeasible { .. })
        ));
        assert!(matches!(
            build_mod_functions_with(&p, 0.0004, 0.01, 1.0),
            Err(KerrError::BlendInfeasible { .. })
        ));
    }

    #[test]
    fn normalized_in_bl_window() {
        let p = new_params(0.6, 1.0).unwrap();
        let mods = ModFunctions::defaults(&p).unwrap();
        for &th in &[0.3, 1.0, FRAC_PI_2] {
            let r = 4.0;
            let mc = inverse_metric_normalized(
                &p,
                &mods,
                &CoordPoint::new(Chart::Normalized, 0.0, r, th, 0.0),
            )
            .unwrap();
            let q2 = p.q2(r, th);
            let s2 = th.sin().powi(2);
            let expect = -(p.r2a2(r) * q2 + 2.0 * p.m * r * p.a * p.a * s2) / (q2 * p.delta(r));
            assert!((mc.ginv[0][0] - expect).abs() < 1e-12 * expect.abs());
        }
        let p0 = new_params(0.0, 1.0).unwrap();
        let m0 = ModFunctions::defaults(&p0).unwrap();
        let mc = inverse_metric_normalized(
            &p0,
            &m0,
            &CoordPoint::new(Chart::Normalized, 0.0, 3.0, 0.7, 0.0),
        )
        .unwrap();
        assert!((mc.ginv[1][1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_on_horizon() {
        let p = new_params(0.6, 1.0).unwrap();
        let mods = ModFunctions::defaults(&p).unwrap();
        let r = p.r_plus;
        let mc = inverse_metric_normalized(
            &p,
            &mods,
            &CoordPoint::new(Chart::Normalized, 0.0, r, FRAC_PI_2, 0.0),
        )
        .unwrap();
        assert!(mc.ginv[1][1].abs() < 1e-15);
        let expect = p.r2a2(r) / p.q2(r, FRAC_PI_2);
        assert!((mc.ginv[0][1] - expect).abs() < 1e-14);
        assert!(mc.ginv[0][1] != 0.0);
        assert!(mc.inverse_defect() < 1e-12);
    }

    #[test]
    fn smoothstep_ends() {
        assert_eq!(smoothstep5(0.0), 0.0);
        assert_eq!(smoothstep5(1.0), 1.0);
        assert_eq!(smoothstep5_d(0.0), 0.0);
        assert_eq!(smoothstep5_d(1.0), 0.0);
        let h = 1e-6;
        let fd = (smoothstep5(0.3 + h) - smoothstep5(0.3 - h)) / (2.0 * h);
        assert!((fd - smoothstep5_d(0.3)).abs() < 1e-8);
    }
}
