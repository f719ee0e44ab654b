//! Closed-form Euclidean quantities for `(R^d, |·|, L^d)`: unit-ball volumes,
//! Green functions, the single-pole Riesz kernel `R_p(z) = |p−z|^{1−d}/ω_d`
//! and integrals of it over spheres, hyperplanes and balls.
//!
//! All integrands are invariant under rotations about the axis through the
//! poles, so every integral reduces to one or two angular/radial integrals
//! evaluated with composite Gauss–Legendre rules.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_QUAD_RTOL: f64 = 1e-10;
const GL_ORDER: usize = 16;
const MAX_PANELS: usize = 1 << 12;

/// Volume of the unit ball of `R^d`.
pub fn omega(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => omega(d - 2) * 2.0 * PI / d as f64,
    }
}

/// `H^{d−1}(S^{d−1}) = d·ω_d`.
///
/// Ratios written `ω_{d−1}/ω_d` for the small-ball slope of the Riesz mass
/// use this surface measure in the numerator, giving `d`; with the volume of
/// the unit `(d−1)`-ball instead the slope would be `ω_{d−1}/ω_d` (2/π in
/// the plane), which disagrees with the radial integral.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * omega(d)
}

/// Nodes and weights of the Gauss–Legendre rule of order `n` on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        nodes[i] = -t;
        nodes[n - 1 - i] = t;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: std::sync::OnceLock<(Vec<f64>, Vec<f64>)> = std::sync::OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gl_rule();
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * w;
            nodes.iter().zip(weights).map(|(t, wt)| wt * f(lo + 0.5 * w * (t + 1.0))).sum::<f64>() * 0.5 * w
        })
        .sum()
}

/// Composite Gauss–Legendre with panel doubling until two successive
/// values agree to `rtol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut panels = 1;
    let mut prev = composite(&f, a, b, panels);
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = composite(&f, a, b, panels);
        change = (next - prev).abs();
        if change <= rtol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { nodes: panels * GL_ORDER, change })
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    Ok(())
}

fn dist(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::input(format!("points of dimension {} and {}", a.len(), b.len())));
    }
    check_dim(a.len())?;
    Ok(a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt())
}

/// `R_p` as a function of the distance to the pole.
pub fn riesz_kernel(d: usize, s: f64) -> f64 {
    s.powi(1 - d as i32) / omega(d)
}

fn green_radial(d: usize, s: f64) -> f64 {
    match d {
        1 => -0.5 * s,
        2 => -s.ln() / (2.0 * PI),
        _ => s.powi(2 - d as i32) / (d as f64 * (d as f64 - 2.0) * omega(d)),
    }
}

/// Fundamental solution of `−Δ` with pole `x`, evaluated at `z`.
pub fn green(x: &[f64], z: &[f64]) -> Result<f64> {
    let s = dist(x, z)?;
    if s == 0.0 {
        return Err(Error::Pole);
    }
    Ok(green_radial(x.len(), s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    /// Central-difference `|∇G_x|(z)`.
    pub numeric: f64,
    /// `R_x(z) / d`.
    pub analytic: f64,
    pub relative_error: f64,
    /// Step exceeds 1% of `|x − z|`.
    pub flagged: bool,
}

/// Compares the finite-difference gradient of `G_x` with `d⁻¹ R_x`.
pub fn gradient_identity_check(x: &[f64], z: &[f64], step: f64) -> Result<GradientCheck> {
    let s = dist(x, z)?;
    if s == 0.0 {
        return Err(Error::Pole);
    }
    if !(step > 0.0) {
        return Err(Error::input("step must be positive"));
    }
    let d = x.len();
    let mut sq = 0.0;
    let mut p = z.to_vec();
    for i in 0..d {
        p[i] = z[i] + step;
        let fwd = green(x, &p)?;
        p[i] = z[i] - step;
        let bwd = green(x, &p)?;
        p[i] = z[i];
        sq += ((fwd - bwd) / (2.0 * step)).powi(2);
    }
    let numeric = sq.sqrt();
    let analytic = riesz_kernel(d, s) / d as f64;
    Ok(GradientCheck {
        numeric,
        analytic,
        relative_error: (numeric - analytic).abs() / analytic,
        flagged: step > 0.01 * s,
    })
}

/// `∫_{S_ρ} f dH^{d−1}` for `f` depending only on the angle `θ` to a fixed
/// axis: `ρ^{d−1} |S^{d−2}| ∫_0^π f(θ) sin^{d−2}θ dθ`. Interior break points
/// split the angular range where `f` has a kink.
fn axial_sphere_integral(d: usize, rho: f64, f: impl Fn(f64) -> f64, breaks: &[f64], rtol: f64) -> Result<f64> {
    if d == 1 {
        return Ok(f(0.0) + f(PI));
    }
    let mut cuts = vec![0.0];
    cuts.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < PI));
    cuts.push(PI);
    let g = |t: f64| f(t) * t.sin().powi(d as i32 - 2);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(g, w[0], w[1], rtol)?;
    }
    Ok(rho.powi(d as i32 - 1) * sphere_area(d - 1) * total)
}

/// `∫_{∂B_r(p)} R_p dH^{d−1}`; equals `d` for every `r > 0`.
pub fn sphere_energy(d: usize, r: f64) -> Result<f64> {
    check_dim(d)?;
    if !(r > 0.0) {
        return Err(Error::input("sphere radius must be positive"));
    }
    let k = riesz_kernel(d, r);
    axial_sphere_integral(d, r, |_| k, &[], DEFAULT_QUAD_RTOL)
}

/// Two poles and a truncation parameter in `R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EuclideanConfig {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub truncation: f64,
    pub rtol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMass {
    pub x_term: f64,
    pub y_term: f64,
    pub total: f64,
}

impl EuclideanConfig {
    pub fn new(x: Vec<f64>, y: Vec<f64>, truncation: f64) -> Result<Self> {
        let s = dist(&x, &y)?;
        if s == 0.0 {
            return Err(Error::precondition("poles coincide"));
        }
        if !(truncation >= 1.0) {
            return Err(Error::precondition(format!("truncation must be at least 1, got {truncation}")));
        }
        Ok(Self { x, y, truncation, rtol: DEFAULT_QUAD_RTOL })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn pole_distance(&self) -> f64 {
        dist(&self.x, &self.y).unwrap_or(f64::NAN)
    }

    /// Radius `2L·|x − y|` of the support ball around `x`.
    pub fn support_radius(&self) -> f64 {
        2.0 * self.truncation * self.pole_distance()
    }

    /// `∫_{∂B^L} |R_y − R_x| dH^{d−1}` over the boundary of the support ball.
    pub fn delta_l(&self) -> Result<f64> {
        let d = self.dim();
        let big_d = self.pole_distance();
        let rho = self.support_radius();
        let rx = riesz_kernel(d, rho);
        let f = |t: f64| {
            let sy = (rho * rho + big_d * big_d - 2.0 * rho * big_d * t.cos()).sqrt();
            (riesz_kernel(d, sy) - rx).abs()
        };
        // |z − y| = ρ exactly where cos θ = |x−y| / 2ρ
        let kink = (big_d / (2.0 * rho)).acos();
        axial_sphere_integral(d, rho, f, &[kink], self.rtol)
    }

    /// `∫ R^L_{x,y} dH^{d−1}` over the bisector hyperplane inside the
    /// support ball.
    pub fn halfspace_separator_energy(&self) -> Result<f64> {
        Ok(self.halfspace_terms()?.iter().sum())
    }

    /// `[x-term, y-term]` of the bisector integral.
    pub fn halfspace_terms(&self) -> Result<[f64; 2]> {
        let d = self.dim();
        let a = 0.5 * self.pole_distance();
        let rho = self.support_radius();
        let t_max = (rho * rho - a * a).sqrt();
        if d == 1 {
            let k = riesz_kernel(1, a);
            return Ok([k, k]);
        }
        // ρ = a sinh u turns R_p dH^{d−1} into |S^{d−2}| tanh^{d−2}(u) du / ω_d
        let u_max = (t_max / a).asinh();
        let mid = self.midpoint();
        let term = |p: &[f64]| -> Result<f64> {
            let off = dist(p, &mid)?;
            let f = |u: f64| {
                let r = off * u.sinh();
                riesz_kernel(d, (off * off + r * r).sqrt()) * r.powi(d as i32 - 2) * off * u.cosh()
            };
            Ok(sphere_area(d - 1) * integrate(f, 0.0, u_max, self.rtol)?)
        };
        Ok([term(&self.x)?, term(&self.y)?])
    }

    fn midpoint(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    /// `m^L_{x,y}(B_r(x))` split into the pole terms; the `x`-term is
    /// `d·r` exactly, the `y`-term is a volume integral.
    pub fn riesz_ball_mass(&self, r: f64) -> Result<BallMass> {
        let big_d = self.pole_distance();
        if !(r > 0.0 && r < big_d) {
            return Err(Error::precondition(format!("need 0 < r < |x−y| = {big_d}, got {r}")));
        }
        let d = self.dim();
        let x_term = d as f64 * r;
        let y_term = if d == 1 {
            riesz_kernel(1, 1.0) * 2.0 * r
        } else {
            let shell = |s: f64| -> f64 {
                let f = |t: f64| riesz_kernel(d, (s * s + big_d * big_d - 2.0 * s * big_d * t.cos()).sqrt());
                axial_sphere_integral(d, s, f, &[], self.rtol).unwrap_or(f64::NAN)
            };
            let v = integrate(shell, 0.0, r, self.rtol)?;
            if !v.is_finite() {
                return Err(Error::Quadrature { nodes: MAX_PANELS * GL_ORDER, change: f64::NAN });
            }
            v
        };
        Ok(BallMass { x_term, y_term, total: x_term + y_term })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * b.abs()
    }

    #[test]
    fn unit_ball_volumes() {
        assert!(close(omega(2), PI, 1e-15));
        assert!(close(omega(3), 4.0 * PI / 3.0, 1e-15));
        assert!(close(omega(4), PI * PI / 2.0, 1e-15));
        assert!(close(sphere_area(2), 2.0 * PI, 1e-15));
    }

    #[test]
    fn gauss_rule_is_exact_on_polynomials() {
        let (t, w) = gauss_legendre(16);
        for k in 0..32 {
            let q: f64 = t.iter().zip(&w).map(|(t, w)| w * t.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-13, "{k} {q}");
        }
    }

    #[test]
    fn green_values() {
        assert_eq!(green(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(close(green(&[0.0; 3], &[0.0, 1.0, 0.0]).unwrap(), 1.0 / (4.0 * PI), 1e-14));
        let e = std::f64::consts::E;
        assert!(close(green(&[0.0, 0.0], &[0.0, e]).unwrap(), -1.0 / (2.0 * PI), 1e-14));
        assert!(matches!(green(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::Pole)));
    }

    #[test]
    fn gradient_identity() {
        let c = gradient_identity_check(&[0.0; 3], &[1.0, 0.0, 0.0], 1e-4).unwrap();
        assert!(close(c.analytic, 1.0 / (4.0 * PI), 1e-14));
        assert!(c.relative_error <= 1e-5 && !c.flagged);
        let c = gradient_identity_check(&[0.0, 0.0], &[0.0, 2.0], 1e-4).unwrap();
        assert!(close(c.analytic, 1.0 / (4.0 * PI), 1e-14));
        assert!(c.relative_error <= 1e-5);
        let coarse = gradient_identity_check(&[0.0, 0.0], &[0.3, 0.4], 1e-2).unwrap();
        let fine = gradient_identity_check(&[0.0, 0.0], &[0.3, 0.4], 1e-3).unwrap();
        let order = coarse.relative_error / fine.relative_error;
        assert!((order / 100.0 - 1.0).abs() < 0.05, "{order}");
        assert!(coarse.flagged);
    }

    #[test]
    fn sphere_energy_is_the_dimension() {
        for d in 1..=6 {
            for r in [0.5, 1.0, 2.0] {
                let e = sphere_energy(d, r).unwrap();
                assert!(close(e, d as f64, 1e-10), "{d} {r} {e}");
            }
        }
        assert!(sphere_energy(2, 0.0).is_err());
    }

    #[test]
    fn bisector_closed_form_in_the_plane() {
        for (l, big_d) in [(1.0, 1.0), (4.0, 1.0), (4.0, 0.3)] {
            let cfg = EuclideanConfig::new(vec![0.0, 0.0], vec![big_d, 0.0], l).unwrap();
            let t = (4.0 * l * l * big_d * big_d - big_d * big_d / 4.0).sqrt();
            let want = 4.0 / PI * (2.0 * t / big_d).asinh();
            let got = cfg.halfspace_separator_energy().unwrap();
            assert!(close(got, want, 1e-9), "{got} {want}");
            let [a, b] = cfg.halfspace_terms().unwrap();
            assert!(close(a, b, 1e-12));
        }
    }

    #[test]
    fn bisector_closed_form_in_space() {
        let cfg = EuclideanConfig::new(vec![0.0; 3], vec![0.0, 0.0, 1.0], 2.0).unwrap();
        // 2·(3/4π)·2π ∫_0^T ρ/(1/4 + ρ²) dρ
        let t2: f64 = 16.0 - 0.25;
        let want = 1.5 * (1.0 + t2 / 0.25).ln();
        assert!(close(cfg.halfspace_separator_energy().unwrap(), want, 1e-9));
    }

    #[test]
    fn delta_decreases_and_is_scale_free() {
        for d in [2, 3] {
            let mut prev = f64::INFINITY;
            for l in [1.0, 2.0, 4.0, 8.0] {
                let mut y = vec![0.0; d];
                y[0] = 1.0;
                let v = EuclideanConfig::new(vec![0.0; d], y.clone(), l).unwrap().delta_l().unwrap();
                assert!(v < prev, "{d} {l} {v}");
                prev = v;
                y[0] = 2.0;
                let w = EuclideanConfig::new(vec![0.0; d], y, l).unwrap().delta_l().unwrap();
                assert!(close(w, v, 1e-9));
            }
        }
    }

    #[test]
    fn separator_beats_energy_minus_delta() {
        for d in [2, 3, 4] {
            for l in [1.0, 2.0, 4.0, 8.0] {
                let mut y = vec![0.0; d];
                y[d - 1] = 1.0;
                let cfg = EuclideanConfig::new(vec![0.0; d], y, l).unwrap();
                let sep = cfg.halfspace_separator_energy().unwrap();
                let lower = sphere_energy(d, 1.0).unwrap() - cfg.delta_l().unwrap();
                assert!(sep >= lower, "{d} {l} {sep} {lower}");
                assert!(sep >= d as f64 / 2.0);
            }
        }
    }

    #[test]
    fn ball_mass_split() {
        let cfg = EuclideanConfig::new(vec![0.0, 0.0], vec![1.0, 0.0], 1.0).unwrap();
        let m = cfg.riesz_ball_mass(0.1).unwrap();
        assert_eq!(m.x_term, 2.0 * 0.1);
        // disc mean of 1/|z−y| exceeds the centre value by about r²/8
        assert!(close(m.y_term, 0.01, 0.01), "{}", m.y_term);
        let small = cfg.riesz_ball_mass(1e-3).unwrap();
        assert!(close(small.total / 1e-3, 2.0, 1e-3));
        assert!(cfg.riesz_ball_mass(1.0).is_err());
        let c3 = EuclideanConfig::new(vec![0.0; 3], vec![0.0, 0.0, 2.0], 1.0).unwrap();
        let m3 = c3.riesz_ball_mass(0.5).unwrap();
        // shell average of |z−y|^{-2} is ln((D+s)/(D−s))/(2sD); integrate in s
        let (r, big_d) = (0.5f64, 2.0f64);
        let oracle = 1.5 / big_d * (0.5 * (r * r - big_d * big_d) * ((big_d + r) / (big_d - r)).ln() + big_d * r);
        assert!(close(m3.y_term, oracle, 1e-9), "{} {oracle}", m3.y_term);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(EuclideanConfig::new(vec![0.0, 0.0], vec![0.0, 0.0], 1.0).is_err());
        assert!(EuclideanConfig::new(vec![0.0, 0.0], vec![1.0, 0.0], 0.5).is_err());
        assert!(EuclideanConfig::new(vec![0.0, 0.0], vec![1.0], 1.0).is_err());
    }
}
