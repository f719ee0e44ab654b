//! Riesz potentials with two poles, truncated Riesz measures, the discrete
//! Hardy–Littlewood maximal function and the pointwise / averaged Poincaré
//! ratio checkers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{in_open_ball, BallProfile, PointCloudSpace, VertexId};

/// Single-pole kernel `z ↦ d(p, z) / m(B_{d(p,z)}(p))`, zero at the pole.
#[derive(Clone, Debug)]
pub struct PoleKernel {
    profile: BallProfile,
}

impl PoleKernel {
    pub fn new(space: &PointCloudSpace, pole: VertexId) -> Self {
        Self {
            profile: BallProfile::new(space, pole),
        }
    }

    pub fn pole(&self) -> VertexId {
        self.profile.center()
    }

    pub fn distance(&self, z: VertexId) -> f64 {
        self.profile.distances()[z]
    }

    pub fn distances(&self) -> &[f64] {
        self.profile.distances()
    }

    pub fn profile(&self) -> &BallProfile {
        &self.profile
    }

    /// Kernel value at `z`; unreachable vertices (graph metric) give 0.
    pub fn value(&self, z: VertexId) -> f64 {
        if z == self.pole() {
            return 0.0;
        }
        let d = self.distance(z);
        if !d.is_finite() {
            return 0.0;
        }
        d / self.profile.mass_open(d)
    }
}

/// `R_{x,y}(z)` for a single evaluation point.
pub fn riesz_potential(space: &PointCloudSpace, x: VertexId, y: VertexId, z: VertexId) -> Result<f64> {
    check_poles(space, x, y)?;
    space.check_vertex(z)?;
    if z == x || z == y {
        return Ok(0.0);
    }
    Ok(riesz_pole_term(space, x, z)? + riesz_pole_term(space, y, z)?)
}

/// One pole term `d(p, z) / m(B_{d(p,z)}(p))`, zero at `z = p`.
pub fn riesz_pole_term(space: &PointCloudSpace, pole: VertexId, z: VertexId) -> Result<f64> {
    space.check_vertex(pole)?;
    space.check_vertex(z)?;
    Ok(PoleKernel::new(space, pole).value(z))
}

fn check_poles(space: &PointCloudSpace, x: VertexId, y: VertexId) -> Result<()> {
    space.check_vertex(x)?;
    space.check_vertex(y)?;
    if x == y {
        return Err(Error::input("Riesz poles must be distinct"));
    }
    Ok(())
}

/// Both pole kernels for a pair `(x, y)`.
#[derive(Clone, Debug)]
pub struct RieszKernel {
    pub px: PoleKernel,
    pub py: PoleKernel,
}

impl RieszKernel {
    pub fn new(space: &PointCloudSpace, x: VertexId, y: VertexId) -> Result<Self> {
        check_poles(space, x, y)?;
        Ok(Self {
            px: PoleKernel::new(space, x),
            py: PoleKernel::new(space, y),
        })
    }

    pub fn potential(&self, z: VertexId) -> f64 {
        if z == self.px.pole() || z == self.py.pole() {
            return 0.0;
        }
        self.px.value(z) + self.py.value(z)
    }

    pub fn pole_distance(&self) -> f64 {
        self.px.distance(self.py.pole())
    }
}

/// Truncated Riesz measure `m^L_{x,y} = χ_{B_{2L d(x,y)}(x)} R_{x,y} m`,
/// stored densely per vertex.
#[derive(Clone, Debug)]
pub struct RieszMeasure {
    x: VertexId,
    y: VertexId,
    truncation: f64,
    pole_distance: f64,
    weights: Vec<f64>,
    support: Vec<VertexId>,
}

/// Serialized form: poles, truncation and the nonzero weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszRecord {
    pub x: VertexId,
    pub y: VertexId,
    pub truncation: f64,
    pub weights: Vec<(VertexId, f64)>,
}

pub fn riesz_measure(space: &PointCloudSpace, x: VertexId, y: VertexId, truncation: f64) -> Result<RieszMeasure> {
    let kernel = RieszKernel::new(space, x, y)?;
    RieszMeasure::from_kernel(space, &kernel, truncation)
}

impl RieszMeasure {
    pub fn from_kernel(space: &PointCloudSpace, kernel: &RieszKernel, truncation: f64) -> Result<Self> {
        if !(truncation >= 1.0 && truncation.is_finite()) {
            return Err(Error::precondition(format!("truncation L must be >= 1, got {truncation}")));
        }
        let x = kernel.px.pole();
        let y = kernel.py.pole();
        let dxy = kernel.pole_distance();
        if !dxy.is_finite() {
            return Err(Error::input(format!("poles {x} and {y} are not connected")));
        }
        let radius = 2.0 * truncation * dxy;
        let mut weights = vec![0.0; space.len()];
        let mut support = Vec::new();
        for z in 0..space.len() {
            if in_open_ball(kernel.px.distance(z), radius) {
                support.push(z);
                weights[z] = kernel.potential(z) * space.weight(z);
            }
        }
        Ok(Self {
            x,
            y,
            truncation,
            pole_distance: dxy,
            weights,
            support,
        })
    }

    pub fn poles(&self) -> (VertexId, VertexId) {
        (self.x, self.y)
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn pole_distance(&self) -> f64 {
        self.pole_distance
    }

    /// Radius `2 L d(x, y)` of the support ball around `x`.
    pub fn support_radius(&self) -> f64 {
        2.0 * self.truncation * self.pole_distance
    }

    pub fn support(&self) -> &[VertexId] {
        &self.support
    }

    pub fn weight(&self, z: VertexId) -> f64 {
        self.weights[z]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mass_of(&self, set: &[VertexId]) -> f64 {
        set.iter().map(|&z| self.weights[z]).sum()
    }

    pub fn mass_of_mask(&self, mask: &[bool]) -> f64 {
        self.weights
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(w, _)| w)
            .sum()
    }

    /// `∫ f dm^L_{x,y}` for a per-vertex field.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.support.iter().map(|&z| f[z] * self.weights[z]).sum()
    }

    /// Upper bound `8 C_D L d(x, y)` for a given doubling constant.
    pub fn mass_bound(&self, doubling: f64) -> f64 {
        8.0 * doubling * self.truncation * self.pole_distance
    }

    pub fn to_record(&self) -> RieszRecord {
        RieszRecord {
            x: self.x,
            y: self.y,
            truncation: self.truncation,
            weights: self
                .support
                .iter()
                .filter(|&&z| self.weights[z] > 0.0)
                .map(|&z| (z, self.weights[z]))
                .collect(),
        }
    }
}

/// `M_s f(z) = max` of ball averages of `|f|` over the distinct open balls
/// `B_r(z)`, `0 < r < s`.
pub fn maximal_function(space: &PointCloudSpace, f: &[f64], s: f64, z: VertexId) -> Result<f64> {
    space.check_vertex(z)?;
    if !(s > 0.0) {
        return Err(Error::precondition(format!("maximal-function scale must be positive, got {s}")));
    }
    let prof = BallProfile::new(space, z);
    Ok(maximal_from_profile(space, &prof, f, s))
}

pub(crate) fn maximal_from_profile(space: &PointCloudSpace, prof: &BallProfile, f: &[f64], s: f64) -> f64 {
    let order = prof.order();
    let sorted = prof.sorted_distances();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut best: f64 = 0.0;
    for (k, &v) in order.iter().enumerate() {
        if !in_open_ball(sorted[k], s) {
            break;
        }
        num += f[v].abs() * space.weight(v);
        den += space.weight(v);
        let group_end = k + 1 == order.len() || in_open_ball(sorted[k], sorted[k + 1]);
        if group_end {
            best = best.max(num / den);
        }
    }
    best
}

/// Result of a pointwise Poincaré ratio evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtpiRatio {
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
}

/// `|u(x) − u(y)| / ∫ lip u dm^L_{x,y}`; `0/0` is reported as 0, `a/0` as ∞.
pub fn ptpi_check(space: &PointCloudSpace, u: &[f64], x: VertexId, y: VertexId, truncation: f64) -> Result<PtpiRatio> {
    let measure = riesz_measure(space, x, y, truncation)?;
    ptpi_with_measure(space, u, &measure)
}

pub fn ptpi_with_measure(space: &PointCloudSpace, u: &[f64], measure: &RieszMeasure) -> Result<PtpiRatio> {
    check_field(space, u)?;
    let (x, y) = measure.poles();
    let numerator = (u[x] - u[y]).abs();
    let denominator = measure.integrate(&space.local_lip(u));
    Ok(PtpiRatio {
        ratio: safe_ratio(numerator, denominator),
        numerator,
        denominator,
    })
}

/// Result of an averaged Poincaré ratio evaluation on a ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiRatio {
    pub ratio: f64,
    /// `⨍_{B_r} |u − ⨍ u|`.
    pub oscillation: f64,
    /// `⨍_{B_{λr}} lip u`.
    pub gradient_average: f64,
    /// The dilated ball reaches the boundary of the cloud.
    pub boundary_contaminated: bool,
}

/// `⨍_{B_r} |u − u_B| / (r ⨍_{B_{λr}} lip u)`.
pub fn pi_check(space: &PointCloudSpace, u: &[f64], center: VertexId, r: f64, lambda: f64) -> Result<PiRatio> {
    check_field(space, u)?;
    space.check_vertex(center)?;
    if !(r > 0.0 && lambda >= 1.0) {
        return Err(Error::precondition(format!("need r > 0 and λ >= 1, got r={r}, λ={lambda}")));
    }
    let prof = BallProfile::new(space, center);
    let ball = prof.ball(r);
    let mass: f64 = ball.iter().map(|&i| space.weight(i)).sum();
    let mean = ball.iter().map(|&i| u[i] * space.weight(i)).sum::<f64>() / mass;
    let oscillation = ball.iter().map(|&i| (u[i] - mean).abs() * space.weight(i)).sum::<f64>() / mass;
    let lip = space.local_lip(u);
    let big = prof.ball(lambda * r);
    let big_mass: f64 = big.iter().map(|&i| space.weight(i)).sum();
    let gradient_average = big.iter().map(|&i| lip[i] * space.weight(i)).sum::<f64>() / big_mass;
    let boundary = space.boundary_mask();
    let boundary_contaminated = big.iter().any(|&i| boundary[i]);
    Ok(PiRatio {
        ratio: safe_ratio(oscillation, r * gradient_average),
        oscillation,
        gradient_average,
        boundary_contaminated,
    })
}

fn check_field(space: &PointCloudSpace, u: &[f64]) -> Result<()> {
    if u.len() != space.len() {
        return Err(Error::input(format!("field has {} values, space has {} vertices", u.len(), space.len())));
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::precondition("field must be finite everywhere"));
    }
    Ok(())
}

/// `a / b` with `0/0 = 0` and `a/0 = ∞`.
pub fn safe_ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}
