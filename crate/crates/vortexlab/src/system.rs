//! Domain types: vorticities, points on the plane and the sphere, model
//! parameters, and validated vortex systems.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Minimum pairwise chordal/Euclidean distance between vortices.
pub const DISTINCT_TOL: f64 = 1e-10;
/// Below this radius the polar view of a plane point is undefined.
pub const POLAR_UNDEFINED_TOL: f64 = 1e-13;
/// Vortices within this colatitude of a pole use tangent-plane coordinates.
pub const POLE_CHART_TOL: f64 = 1e-6;

/// Circulation strength of a point vortex. Zero is rejected: the strengths
/// divide the symplectic form, so a zero vortex has no equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vorticity(f64);

impl Vorticity {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Config(format!(
                "vorticity must be finite, got {value}"
            )));
        }
        if value == 0.0 {
            return Err(Error::Config("zero-strength vortex rejected".into()));
        }
        Ok(Vorticity(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A point on the unit sphere, stored as (colatitude, longitude).
///
/// At an exact pole the longitude is pure gauge: it is stored as 0 and the
/// point is flagged, so downstream code can switch to tangent-plane
/// coordinates instead of trusting the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    theta: f64,
    phi: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    gauge_pole: bool,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Config("sphere point angles must be finite".into()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Config(format!("colatitude {theta} outside [0, pi]")));
        }
        let at_pole = theta <= 1e-12 || theta >= PI - 1e-12;
        Ok(SpherePoint {
            theta: if theta <= 1e-12 {
                0.0
            } else if theta >= PI - 1e-12 {
                PI
            } else {
                theta
            },
            phi: if at_pole { 0.0 } else { wrap_two_pi(phi) },
            gauge_pole: at_pole,
        })
    }

    pub fn from_cartesian(x: [f64; 3]) -> Result<Self> {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "point off the unit sphere: |x| = {norm}"
            )));
        }
        let theta = (x[2] / norm).clamp(-1.0, 1.0).acos();
        let phi = x[1].atan2(x[0]);
        SpherePoint::new(theta, phi)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Longitude is gauge (meaningless) at the poles.
    pub fn phi_is_gauge(&self) -> bool {
        self.gauge_pole
    }

    pub fn cartesian(&self) -> [f64; 3] {
        let s = self.theta.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.theta.cos()]
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }
}

/// A point on the plane. Cartesian storage is authoritative; the polar view
/// is offered only away from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::Config("plane point must be finite".into()));
        }
        Ok(PlanePoint { x, y })
    }

    pub fn from_polar(rho: f64, phi: f64) -> Result<Self> {
        if rho < 0.0 || !rho.is_finite() || !phi.is_finite() {
            return Err(Error::Config(format!(
                "invalid polar point (rho={rho}, phi={phi})"
            )));
        }
        Ok(PlanePoint {
            x: rho * phi.cos(),
            y: rho * phi.sin(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in [0, 2π), or `None` at the origin where it is undefined.
    pub fn phi(&self) -> Option<f64> {
        if self.rho() < POLAR_UNDEFINED_TOL {
            None
        } else {
            Some(wrap_two_pi(self.y.atan2(self.x)))
        }
    }
}

/// Which of the four models a system evolves under. `Sphere` is the Ω = 0
/// case of the rotating sphere and is kept as its own tag because the
/// non-rotating sphere has the larger SO(3) symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Model {
    Planar,
    RotatingPlane { omega: f64 },
    Geostrophic { kappa: f64 },
    Sphere,
    RotatingSphere { omega: f64 },
}

impl Model {
    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Geostrophic { kappa } => {
                if !kappa.is_finite() || *kappa < 0.0 {
                    return Err(Error::Config(format!(
                        "kappa must be finite and >= 0, got {kappa}"
                    )));
                }
            }
            Model::RotatingPlane { omega } | Model::RotatingSphere { omega } => {
                if !omega.is_finite() {
                    return Err(Error::Config("omega must be finite".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Model::Sphere | Model::RotatingSphere { .. })
    }

    pub fn omega(&self) -> f64 {
        match self {
            Model::RotatingPlane { omega } | Model::RotatingSphere { omega } => *omega,
            _ => 0.0,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            Model::Geostrophic { kappa } => *kappa,
            _ => 0.0,
        }
    }

    /// Output label. The rotating sphere is labeled as the frozen-background
    /// reduction it is: exact on ring relative equilibria, an approximation
    /// elsewhere.
    pub fn label(&self) -> &'static str {
        match self {
            Model::Planar => "planar",
            Model::RotatingPlane { .. } => "plane-rotating",
            Model::Geostrophic { .. } => "geostrophic",
            Model::Sphere => "sphere",
            Model::RotatingSphere { .. } => "sphere-rotating-frozen",
        }
    }

    pub fn parse(name: &str, omega: f64, kappa: f64) -> Result<Model> {
        let model = match name {
            "planar" | "plane" => Model::Planar,
            "plane-rotating" | "rotating-plane" => Model::RotatingPlane { omega },
            "geostrophic" => Model::Geostrophic { kappa },
            "sphere" => {
                if omega != 0.0 {
                    Model::RotatingSphere { omega }
                } else {
                    Model::Sphere
                }
            }
            "sphere-rotating" | "sphere-rotating-frozen" => Model::RotatingSphere { omega },
            other => return Err(Error::Config(format!("unknown model '{other}'"))),
        };
        if !model.is_sphere()
            && model.omega() == 0.0
            && matches!(model, Model::RotatingPlane { .. })
        {
            // Ω = 0 rotating plane is just the plane; keep the tag the user asked for.
        }
        model.validate()?;
        Ok(model)
    }
}

/// Positions of a system, matching the model's geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Points {
    Plane(Vec<PlanePoint>),
    Sphere(Vec<SpherePoint>),
}

impl Points {
    pub fn len(&self) -> usize {
        match self {
            Points::Plane(v) => v.len(),
            Points::Sphere(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Embedded position: (x, y, 0) on the plane, the unit vector on the sphere.
    pub fn embedded(&self, i: usize) -> [f64; 3] {
        match self {
            Points::Plane(v) => [v[i].x, v[i].y, 0.0],
            Points::Sphere(v) => v[i].cartesian(),
        }
    }
}

/// A validated configuration of point vortices in one of the four models.
///
/// Immutable after construction; all operations take `&self` and the type is
/// `Send + Sync`, so systems can be shared freely between workers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VortexSystem {
    model: Model,
    points: Points,
    strengths: Vec<Vorticity>,
}

impl VortexSystem {
    pub fn new(model: Model, points: Points, strengths: Vec<Vorticity>) -> Result<Self> {
        model.validate()?;
        if points.len() != strengths.len() {
            return Err(Error::Config(format!(
                "{} points but {} strengths",
                points.len(),
                strengths.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::Config("empty vortex system".into()));
        }
        match (&model, &points) {
            (m, Points::Plane(_)) if m.is_sphere() => {
                return Err(Error::Config("sphere model with plane points".into()))
            }
            (m, Points::Sphere(_)) if !m.is_sphere() => {
                return Err(Error::Config("plane model with sphere points".into()))
            }
            _ => {}
        }
        let sys = VortexSystem {
            model,
            points,
            strengths,
        };
        let (i, j, d) = sys.closest_pair();
        if d <= DISTINCT_TOL {
            return Err(Error::Config(format!(
                "vortices {i} and {j} coincide (distance {d:.3e})"
            )));
        }
        Ok(sys)
    }

    pub fn n(&self) -> usize {
        self.strengths.len()
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn points(&self) -> &Points {
        &self.points
    }

    pub fn strength(&self, i: usize) -> f64 {
        self.strengths[i].value()
    }

    pub fn strengths(&self) -> Vec<f64> {
        self.strengths.iter().map(|v| v.value()).collect()
    }

    pub fn total_vorticity(&self) -> f64 {
        self.strengths.iter().map(|v| v.value()).sum()
    }

    /// Rebuild with a different model of the same geometry kind.
    pub fn with_model(&self, model: Model) -> Result<Self> {
        VortexSystem::new(model, self.points.clone(), self.strengths.clone())
    }

    /// Chordal (sphere) or Euclidean (plane) distance between vortices.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let a = self.points.embedded(i);
        let b = self.points.embedded(j);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    pub fn closest_pair(&self) -> (usize, usize, f64) {
        let n = self.n();
        let mut best = (0, 0, f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                let d = self.distance(i, j);
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        best
    }

    pub fn min_separation(&self) -> f64 {
        self.closest_pair().2
    }

    pub fn diameter(&self) -> f64 {
        let n = self.n();
        let mut d = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }

    /// The system rotated by `angle` about the symmetry axis (z on the
    /// sphere, the origin on the plane).
    pub fn rotated_z(&self, angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let points = match &self.points {
            Points::Plane(v) => Points::Plane(
                v.iter()
                    .map(|p| PlanePoint {
                        x: c * p.x - s * p.y,
                        y: s * p.x + c * p.y,
                    })
                    .collect(),
            ),
            Points::Sphere(v) => Points::Sphere(
                v.iter()
                    .map(|p| {
                        let x = p.cartesian();
                        SpherePoint::from_cartesian([
                            c * x[0] - s * x[1],
                            s * x[0] + c * x[1],
                            x[2],
                        ])
                        .expect("rotation preserves the sphere")
                    })
                    .collect(),
            ),
        };
        VortexSystem {
            model: self.model,
            points,
            strengths: self.strengths.clone(),
        }
    }

    /// True when the two systems contain the same (position, strength) pairs
    /// up to `tol`, regardless of ordering.
    pub fn same_weighted_configuration(&self, other: &Self, tol: f64) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut used = vec![false; self.n()];
        'outer: for i in 0..self.n() {
            let a = self.points.embedded(i);
            for j in 0..other.n() {
                if used[j] || (self.strength(i) - other.strength(j)).abs() > tol {
                    continue;
                }
                let b = other.points.embedded(j);
                let d =
                    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                if d <= tol {
                    used[j] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Flat phase-space state used by the integrators: (x, y) per vortex on
    /// the plane, the embedded unit vector per vortex on the sphere.
    pub fn to_state(&self) -> Vec<f64> {
        match &self.points {
            Points::Plane(v) => v.iter().flat_map(|p| [p.x, p.y]).collect(),
            Points::Sphere(v) => v.iter().flat_map(|p| p.cartesian()).collect(),
        }
    }

    pub fn from_state(model: Model, strengths: &[Vorticity], state: &[f64]) -> Result<Self> {
        let points = if model.is_sphere() {
            let mut pts = Vec::with_capacity(state.len() / 3);
            for c in state.chunks_exact(3) {
                let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                pts.push(SpherePoint::from_cartesian([
                    c[0] / norm,
                    c[1] / norm,
                    c[2] / norm,
                ])?);
            }
            Points::Sphere(pts)
        } else {
            Points::Plane(
                state
                    .chunks_exact(2)
                    .map(|c| PlanePoint { x: c[0], y: c[1] })
                    .collect(),
            )
        };
        VortexSystem::new(model, points, strengths.to_vec())
    }
}

pub(crate) fn wrap_two_pi(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p < 0.0 {
        p += 2.0 * PI;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vorticity_rejected() {
        assert!(Vorticity::new(0.0).is_err());
        assert!(Vorticity::new(f64::NAN).is_err());
        assert!(Vorticity::new(-1.5).is_ok());
    }

    #[test]
    fn sphere_point_pole_gauge() {
        let p = SpherePoint::new(0.0, 1.3).unwrap();
        assert!(p.phi_is_gauge());
        assert_eq!(p.phi(), 0.0);
        let c = p.cartesian();
        assert!((c[2] - 1.0).abs() < 1e-15);

        let q = SpherePoint::new(1.0, -0.5).unwrap();
        assert!(!q.phi_is_gauge());
        assert!((q.phi() - (2.0 * PI - 0.5)).abs() < 1e-12);
        let n = q.cartesian().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plane_point_polar_views() {
        let p = PlanePoint::from_polar(2.0, PI / 3.0).unwrap();
        assert!((p.rho() - 2.0).abs() < 1e-12);
        assert!((p.phi().unwrap() - PI / 3.0).abs() < 1e-12);

        let origin = PlanePoint::new(0.0, 0.0).unwrap();
        assert_eq!(origin.phi(), None);
        assert!(PlanePoint::from_polar(-1.0, 0.0).is_err());
    }

    #[test]
    fn coincident_vortices_rejected() {
        let pts = Points::Plane(vec![
            PlanePoint { x: 1.0, y: 0.0 },
            PlanePoint { x: 1.0, y: 5e-11 },
        ]);
        let s = vec![Vorticity::new(1.0).unwrap(), Vorticity::new(1.0).unwrap()];
        assert!(VortexSystem::new(Model::Planar, pts, s).is_err());
    }

    #[test]
    fn model_point_kind_must_match() {
        let pts = Points::Plane(vec![PlanePoint { x: 1.0, y: 0.0 }]);
        let s = vec![Vorticity::new(1.0).unwrap()];
        assert!(VortexSystem::new(Model::Sphere, pts, s).is_err());
    }

    #[test]
    fn kappa_zero_is_valid_geostrophic() {
        assert!(Model::Geostrophic { kappa: 0.0 }.validate().is_ok());
        assert!(Model::Geostrophic { kappa: -1.0 }.validate().is_err());
    }
}
