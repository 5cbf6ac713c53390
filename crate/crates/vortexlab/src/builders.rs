//! Builders for the named ring configurations.
//!
//! Families follow the point-group naming used for vortex rings: `C_N(R)` is
//! a planar regular polygon of N unit vortices, `C_N(R,p)` adds a central
//! vortex, `C_Nv(R)` / `C_Nv(R,p)` are their spherical analogues with an
//! optional North-pole vortex, and the `D` families are symmetric double
//! rings (mirror-aligned, staggered, or the alternating equatorial ring).

use crate::system::{Model, PlanePoint, Points, SpherePoint, VortexSystem, Vorticity};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Symmetry families of ring configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingFamily {
    /// Planar ring of N unit vortices.
    CNR,
    /// Planar ring with a central vortex.
    CNRp,
    /// Spherical ring at fixed colatitude.
    CNvR,
    /// Spherical ring with a North-pole vortex.
    CNvRp,
    /// Two mirror rings at θ0 and π−θ0, aligned longitudes.
    DNh2R,
    /// Two rings at θ0 and θ1 (default π−θ0), staggered by π/n.
    DNdRRp,
    /// 2n alternating-sign vortices on the equator.
    D2NhRe,
}

impl RingFamily {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "CNR" => RingFamily::CNR,
            "CNRp" => RingFamily::CNRp,
            "CNvR" => RingFamily::CNvR,
            "CNvRp" => RingFamily::CNvRp,
            "DNh2R" => RingFamily::DNh2R,
            "DNdRRp" => RingFamily::DNdRRp,
            "D2NhRe" => RingFamily::D2NhRe,
            other => return Err(Error::Config(format!("unknown ring family '{other}'"))),
        })
    }

    pub fn on_sphere(&self) -> bool {
        !matches!(self, RingFamily::CNR | RingFamily::CNRp)
    }
}

/// Symbolic description of a ring arrangement.
///
/// `radius_or_theta0` is the ring radius for planar families and the ring
/// colatitude for spherical ones. `epsilon` is the common phase offset of
/// the first ring; the phase between stacked rings is fixed by the family
/// (aligned for DNh, staggered by π/n for DNd).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    pub family: RingFamily,
    pub n: usize,
    pub radius_or_theta0: f64,
    #[serde(default)]
    pub epsilon: f64,
    /// Central (planar) or polar (spherical) vortex strength for `p` families
    /// and for double rings with `k_p > 0`.
    #[serde(default)]
    pub lambda_pole_or_center: Option<f64>,
    /// Second-ring colatitude for DNd; ignored elsewhere.
    #[serde(default)]
    pub theta1: Option<f64>,
    /// Number of polar vortices on double rings (0 or 2).
    #[serde(default)]
    pub k_p: usize,
}

impl RingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("ring needs n >= 2, got {}", self.n)));
        }
        if self.family.on_sphere() && !matches!(self.family, RingFamily::D2NhRe) {
            let t = self.radius_or_theta0;
            if !(t > 0.0 && t < PI) {
                return Err(Error::Config(format!(
                    "ring colatitude {t} outside (0, pi)"
                )));
            }
        }
        if !self.family.on_sphere() && self.radius_or_theta0 <= 0.0 {
            return Err(Error::Config("ring radius must be positive".into()));
        }
        Ok(())
    }

    /// Build the configuration with the model implied by the family
    /// (Planar or Sphere); lift to rotating/geostrophic models with
    /// [`VortexSystem::with_model`].
    pub fn build(&self) -> Result<VortexSystem> {
        self.validate()?;
        match self.family {
            RingFamily::CNR => build_planar_ring(self.n, self.radius_or_theta0, None),
            RingFamily::CNRp => {
                let lam = self.lambda_pole_or_center.ok_or_else(|| {
                    Error::Config("CNRp requires a central vortex strength".into())
                })?;
                build_planar_ring(self.n, self.radius_or_theta0, Some(lam))
            }
            RingFamily::CNvR => build_sphere_ring(self.n, self.radius_or_theta0, None, 0.0),
            RingFamily::CNvRp => {
                let lam = self.lambda_pole_or_center.ok_or_else(|| {
                    Error::Config("CNvRp requires a polar vortex strength".into())
                })?;
                build_sphere_ring(self.n, self.radius_or_theta0, Some(lam), 0.0)
            }
            RingFamily::DNh2R | RingFamily::DNdRRp | RingFamily::D2NhRe => build_double_ring(
                self.family,
                self.n,
                self.radius_or_theta0,
                self.theta1,
                self.k_p,
                self.lambda_pole_or_center.unwrap_or(1.0),
            ),
        }
    }
}

/// Planar ring of `n` unit vortices at radius `r`, angles `2πj/n`, with an
/// optional central vortex of strength `lambda_center`.
pub fn build_planar_ring(n: usize, r: f64, lambda_center: Option<f64>) -> Result<VortexSystem> {
    if n < 2 {
        return Err(Error::Config(format!("planar ring needs n >= 2, got {n}")));
    }
    if r <= 0.0 || !r.is_finite() {
        return Err(Error::Config(format!(
            "planar ring needs radius > 0, got {r}"
        )));
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut strengths = Vec::with_capacity(n + 1);
    for j in 1..=n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        points.push(PlanePoint::from_polar(r, phi)?);
        strengths.push(Vorticity::new(1.0)?);
    }
    if let Some(lam) = lambda_center {
        points.push(PlanePoint::new(0.0, 0.0)?);
        strengths.push(Vorticity::new(lam)?);
    }
    let sys = VortexSystem::new(Model::Planar, Points::Plane(points), strengths)?;
    check_ring_symmetry(&sys, n)?;
    Ok(sys)
}

/// Spherical ring of `n` unit vortices at colatitude `theta0`, longitudes
/// `2πj/n`, with an optional North-pole vortex. `omega != 0` selects the
/// frozen-background rotating sphere.
pub fn build_sphere_ring(
    n: usize,
    theta0: f64,
    lambda_pole: Option<f64>,
    omega: f64,
) -> Result<VortexSystem> {
    if n < 2 {
        return Err(Error::Config(format!("sphere ring needs n >= 2, got {n}")));
    }
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::Config(format!(
            "ring colatitude must lie strictly between the poles, got {theta0}"
        )));
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut strengths = Vec::with_capacity(n + 1);
    for j in 1..=n {
        points.push(SpherePoint::new(theta0, 2.0 * PI * j as f64 / n as f64)?);
        strengths.push(Vorticity::new(1.0)?);
    }
    if let Some(lam) = lambda_pole {
        points.push(SpherePoint::new(0.0, 0.0)?);
        strengths.push(Vorticity::new(lam)?);
    }
    let model = if omega == 0.0 {
        Model::Sphere
    } else {
        Model::RotatingSphere { omega }
    };
    let sys = VortexSystem::new(model, Points::Sphere(points), strengths)?;
    check_ring_symmetry(&sys, n)?;
    Ok(sys)
}

/// Symmetric double rings of opposite vorticities: the mirror ring carries
/// strength -1, so the pair co-rotates rigidly and the total momentum
/// `2n cos θ0` is nonzero away from the equator. `k_p` polar vortices come
/// in ± pairs only: a single pole would break the defining mirror symmetry
/// (z-flip combined with strength reversal).
pub fn build_double_ring(
    family: RingFamily,
    n: usize,
    theta0: f64,
    theta1: Option<f64>,
    k_p: usize,
    lambda_pole: f64,
) -> Result<VortexSystem> {
    if n < 2 {
        return Err(Error::Config(format!("double ring needs n >= 2, got {n}")));
    }
    let mut points = Vec::new();
    let mut strengths = Vec::new();
    let mut ring = |theta: f64, eps: f64, lam: f64, count: usize| -> Result<()> {
        for j in 1..=count {
            points.push(SpherePoint::new(
                theta,
                eps + 2.0 * PI * j as f64 / count as f64,
            )?);
            strengths.push(Vorticity::new(lam)?);
        }
        Ok(())
    };
    match family {
        RingFamily::DNh2R => {
            if !(theta0 > 0.0 && theta0 < PI / 2.0) {
                return Err(Error::Config(format!(
                    "DNh ring colatitude must lie in (0, pi/2), got {theta0}"
                )));
            }
            ring(theta0, 0.0, 1.0, n)?;
            ring(PI - theta0, 0.0, -1.0, n)?;
        }
        RingFamily::DNdRRp => {
            if !(theta0 > 0.0 && theta0 < PI) {
                return Err(Error::Config(format!(
                    "DNd ring colatitude outside (0, pi): {theta0}"
                )));
            }
            let t1 = theta1.unwrap_or(PI - theta0);
            if !(t1 > 0.0 && t1 < PI) {
                return Err(Error::Config(format!(
                    "DNd second colatitude outside (0, pi): {t1}"
                )));
            }
            if (t1 - theta0).abs() < 1e-12 {
                return Err(Error::Config("DNd rings coincide".into()));
            }
            ring(theta0, 0.0, 1.0, n)?;
            ring(t1, PI / n as f64, -1.0, n)?;
        }
        RingFamily::D2NhRe => {
            // 2n vortices on the equator with alternating signs
            for j in 1..=2 * n {
                points.push(SpherePoint::new(PI / 2.0, PI * j as f64 / n as f64)?);
                strengths.push(Vorticity::new(if j % 2 == 1 { 1.0 } else { -1.0 })?);
            }
        }
        other => {
            return Err(Error::Config(format!(
                "{other:?} is not a double-ring family"
            )));
        }
    }
    match k_p {
        0 => {}
        2 => {
            points.push(SpherePoint::new(0.0, 0.0)?);
            strengths.push(Vorticity::new(lambda_pole)?);
            points.push(SpherePoint::new(PI, 0.0)?);
            strengths.push(Vorticity::new(-lambda_pole)?);
        }
        k => {
            return Err(Error::Config(format!(
                "double rings take k_p in {{0, 2}} polar vortices, got {k}"
            )));
        }
    }
    let sys = VortexSystem::new(Model::Sphere, Points::Sphere(points), strengths)?;
    check_ring_symmetry(&sys, n)?;
    check_mirror_symmetry(&sys, family, n)?;
    Ok(sys)
}

/// Rotating by 2π/n about the axis must permute the (position, strength)
/// pairs exactly.
fn check_ring_symmetry(sys: &VortexSystem, n: usize) -> Result<()> {
    let rotated = sys.rotated_z(2.0 * PI / n as f64);
    if !sys.same_weighted_configuration(&rotated, 1e-12) {
        return Err(Error::Config(
            "built configuration lacks the claimed C_n symmetry".into(),
        ));
    }
    Ok(())
}

/// Double rings must be fixed by their defining mirror operation: a z-flip
/// composed with a family-specific twist and strength reversal.
fn check_mirror_symmetry(sys: &VortexSystem, family: RingFamily, n: usize) -> Result<()> {
    let twist = match family {
        RingFamily::DNh2R => Some(0.0),
        RingFamily::DNdRRp | RingFamily::D2NhRe => Some(PI / n as f64),
        _ => None,
    };
    let Some(twist) = twist else { return Ok(()) };
    let Points::Sphere(pts) = sys.points() else {
        unreachable!()
    };
    let flipped: Vec<SpherePoint> = pts
        .iter()
        .map(|p| {
            let x = p.cartesian();
            let (c, s) = (twist.cos(), twist.sin());
            SpherePoint::from_cartesian([c * x[0] - s * x[1], s * x[0] + c * x[1], -x[2]])
                .expect("isometry preserves the sphere")
        })
        .collect();
    let image = VortexSystem::new(
        sys.model(),
        Points::Sphere(flipped),
        (0..sys.n())
            .map(|i| Vorticity::new(-sys.strength(i)).unwrap())
            .collect(),
    )?;
    if sys.same_weighted_configuration(&image, 1e-12) {
        Ok(())
    } else if matches!(family, RingFamily::DNdRRp) {
        // Non-mirror DNd pairs (theta1 != pi - theta0) are buildable but
        // carry no symmetry guarantee.
        Ok(())
    } else {
        Err(Error::Config(
            "double ring lacks its defining mirror symmetry".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4r_positions() {
        let sys = build_planar_ring(4, 1.0, None).unwrap();
        assert_eq!(sys.n(), 4);
        // angles {π/2, π, 3π/2, 2π} on the unit circle
        let expect = [[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]];
        for e in expect {
            let hit = (0..4).any(|i| {
                let p = sys.points().embedded(i);
                (p[0] - e[0]).abs() < 1e-12 && (p[1] - e[1]).abs() < 1e-12
            });
            assert!(hit, "missing ring vertex {e:?}");
        }
        // polygon symmetry: positions sum to zero
        let sum = (0..4).fold([0.0, 0.0], |a, i| {
            let p = sys.points().embedded(i);
            [a[0] + p[0], a[1] + p[1]]
        });
        assert!(sum[0].abs() < 1e-12 && sum[1].abs() < 1e-12);
    }

    #[test]
    fn c3rp_center_strength() {
        let sys = build_planar_ring(3, 1.0, Some(0.5)).unwrap();
        assert_eq!(sys.n(), 4);
        assert!((sys.strength(3) - 0.5).abs() < 1e-15);
        assert!((sys.points().embedded(3)[0]).abs() < 1e-15);
        // ring vortices agree with the no-center build exactly
        let bare = build_planar_ring(3, 1.0, None).unwrap();
        for i in 0..3 {
            assert_eq!(sys.points().embedded(i), bare.points().embedded(i));
        }
    }

    #[test]
    fn builder_errors() {
        assert!(build_planar_ring(1, 1.0, None).is_err());
        assert!(build_planar_ring(4, 0.0, None).is_err());
        assert!(build_planar_ring(4, 1.0, Some(0.0)).is_err());
        assert!(build_sphere_ring(4, 0.0, None, 0.0).is_err());
        assert!(build_sphere_ring(4, PI, None, 0.0).is_err());
    }

    #[test]
    fn c5v_ring_colatitudes() {
        let sys = build_sphere_ring(5, PI / 4.0, None, 0.0).unwrap();
        for i in 0..5 {
            assert!((sys.points().embedded(i)[2] - (0.5f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn c3vp_total_vorticity() {
        let sys = build_sphere_ring(3, PI / 3.0, Some(-1.0), 0.0).unwrap();
        assert!((sys.total_vorticity() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn omega_passthrough() {
        let sys = build_sphere_ring(4, PI / 6.0, None, 0.3).unwrap();
        assert_eq!(sys.model(), Model::RotatingSphere { omega: 0.3 });
    }

    #[test]
    fn dnh_mirror_rings() {
        let sys = build_double_ring(RingFamily::DNh2R, 4, PI / 3.0, None, 0, 1.0).unwrap();
        assert_eq!(sys.n(), 8);
        for i in 0..8 {
            let z = sys.points().embedded(i)[2];
            let lam = sys.strength(i);
            // upper ring carries +1, the mirror ring -1
            assert!((z - 0.5).abs() < 1e-12 || (z + 0.5).abs() < 1e-12);
            assert!((lam - z.signum()).abs() < 1e-12, "z = {z}, λ = {lam}");
        }
        // aligned longitudes: each lower vortex sits under an upper one
        let Points::Sphere(pts) = sys.points() else {
            unreachable!()
        };
        for p in pts.iter().filter(|p| p.theta() > PI / 2.0) {
            assert!(pts
                .iter()
                .filter(|q| q.theta() < PI / 2.0)
                .any(|q| (q.phi() - p.phi()).abs() < 1e-12));
        }
    }

    #[test]
    fn dnd_staggered_longitudes() {
        let sys = build_double_ring(
            RingFamily::DNdRRp,
            4,
            PI / 3.0,
            Some(2.0 * PI / 3.0),
            0,
            1.0,
        )
        .unwrap();
        let Points::Sphere(pts) = sys.points() else {
            unreachable!()
        };
        let upper: Vec<f64> = pts
            .iter()
            .filter(|p| p.theta() < PI / 2.0)
            .map(|p| p.phi())
            .collect();
        let lower: Vec<f64> = pts
            .iter()
            .filter(|p| p.theta() > PI / 2.0)
            .map(|p| p.phi())
            .collect();
        assert_eq!((upper.len(), lower.len()), (4, 4));
        // every lower longitude sits exactly halfway between upper ones
        for l in &lower {
            let nearest = upper
                .iter()
                .map(|u| {
                    let d = (l - u).rem_euclid(2.0 * PI);
                    d.min(2.0 * PI - d)
                })
                .fold(f64::INFINITY, f64::min);
            assert!((nearest - PI / 4.0).abs() < 1e-12, "stagger {nearest}");
        }
    }

    #[test]
    fn d2nh_alternating_equator() {
        let sys = build_double_ring(RingFamily::D2NhRe, 3, 0.0, None, 0, 1.0).unwrap();
        assert_eq!(sys.n(), 6);
        assert!(sys.total_vorticity().abs() < 1e-15);
        for i in 0..6 {
            assert!(sys.points().embedded(i)[2].abs() < 1e-12);
        }
        let plus = (0..6).filter(|&i| sys.strength(i) > 0.0).count();
        assert_eq!(plus, 3);
    }

    #[test]
    fn single_pole_on_double_ring_rejected() {
        assert!(build_double_ring(RingFamily::DNh2R, 4, PI / 3.0, None, 1, 1.0).is_err());
    }

    #[test]
    fn rotation_permutes_weighted_configuration() {
        let cases: Vec<(VortexSystem, usize)> = vec![
            (build_planar_ring(5, 1.3, Some(-0.7)).unwrap(), 5),
            (build_sphere_ring(6, 0.9, Some(2.0), 0.0).unwrap(), 6),
            (
                build_double_ring(RingFamily::DNh2R, 3, 0.7, None, 2, -0.5).unwrap(),
                3,
            ),
            (
                build_double_ring(RingFamily::DNdRRp, 5, 1.0, None, 0, 1.0).unwrap(),
                5,
            ),
            (
                build_double_ring(RingFamily::D2NhRe, 4, 0.0, None, 2, 0.8).unwrap(),
                4,
            ),
        ];
        for (sys, n) in cases {
            let rot = sys.rotated_z(2.0 * PI / n as f64);
            assert!(sys.same_weighted_configuration(&rot, 1e-12));
            let off = sys.rotated_z(0.37);
            assert!(!sys.same_weighted_configuration(&off, 1e-9));
        }
    }
}
