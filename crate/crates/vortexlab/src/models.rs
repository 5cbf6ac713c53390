//! Hamiltonians, momentum maps, velocity fields, and the frozen Coriolis
//! background for the four models.
//!
//! Two energy conventions coexist:
//!
//! * [`hamiltonian`] reports each model's textbook value: the planar
//!   `-(1/4π) Σ λλ ln d²`, the geostrophic `Σ λλ K0(κ d)`, the spherical
//!   `(1/4π) Σ λλ ln(1 - x·x)`, plus the rotating-frame terms.
//! * [`hamiltonian_normalized`] is the internal unit driving all dynamics
//!   and stability work. It absorbs the `4π` so that a planar ring of `N`
//!   unit vortices with central strength `λ` rotates at exactly
//!   `ξ = (N - 1 + 2λ)/(4R²)`, and a frozen-background sphere adds exactly
//!   `Ω` to every longitude rate.
//!
//! In the normalized convention the canonical structure is
//! `λ ẋ = ∂H/∂y, λ ẏ = -∂H/∂x` per planar vortex and
//! `λ q̇ = -∂H/∂φ, λ φ̇ = ∂H/∂q` with `q = cos θ` per spherical vortex;
//! the signed momentum generating the rotation is `-Σ λ ρ²/2` on the plane
//! and `+Σ λ cos θ` on the sphere. [`momentum_so2`] reports the customary
//! positive-quadratic form on the plane; the sign bookkeeping is internal.

use crate::specfun::{bessel_k0, bessel_k1};
use crate::system::{Model, Points, VortexSystem};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Hamiltonian and momenta of a system, as carried along trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyMomentum {
    /// Raw (per-model convention) Hamiltonian.
    pub h: f64,
    /// Internal normalized Hamiltonian.
    pub h_normalized: f64,
    /// Rotational momentum about the symmetry axis.
    pub j_so2: f64,
    /// Momentum vector for sphere models.
    pub m_vec: Option<[f64; 3]>,
}

/// Per-vortex phase-space rates in the normalized convention.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityField {
    /// (dx/dt, dy/dt) per vortex.
    Plane(Vec<[f64; 2]>),
    /// Embedded rates per vortex, with chart rates (dθ/dt, dφ/dt) where the
    /// chart is defined (`None` at a pole, where φ is gauge).
    Sphere {
        cartesian: Vec<[f64; 3]>,
        angular: Vec<Option<[f64; 2]>>,
    },
}

impl VelocityField {
    /// Maximum embedded speed over the vortices.
    pub fn max_speed(&self) -> f64 {
        match self {
            VelocityField::Plane(v) => v.iter().map(|r| r[0].hypot(r[1])).fold(0.0, f64::max),
            VelocityField::Sphere { cartesian, .. } => cartesian
                .iter()
                .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt())
                .fold(0.0, f64::max),
        }
    }
}

const COLLISION_TOL: f64 = 1e-10;

/// Pairwise interaction kernel in the normalized convention, as a function
/// of separation `d`: value and d/d(d). Geostrophic with κ = 0 reduces to
/// the logarithmic planar kernel.
pub(crate) fn plane_kernel(model: Model, d: f64) -> Result<(f64, f64)> {
    match model {
        Model::Geostrophic { kappa } if kappa > 0.0 => {
            let x = kappa * d;
            Ok((0.5 * bessel_k0(x)?, -0.5 * kappa * bessel_k1(x)?))
        }
        _ => Ok((-0.5 * d.ln(), -0.5 / d)),
    }
}

fn check_separation(d2: f64, i: usize, j: usize) -> Result<()> {
    if d2 < COLLISION_TOL * COLLISION_TOL {
        return Err(Error::Singularity(format!(
            "vortices {i} and {j} at distance {:.3e}",
            d2.sqrt()
        )));
    }
    Ok(())
}

/// Normalized Hamiltonian on a flat integrator state (see
/// [`VortexSystem::to_state`]); `strengths` in system order.
pub(crate) fn h_norm_state(model: Model, strengths: &[f64], state: &[f64]) -> Result<f64> {
    let n = strengths.len();
    let mut h = 0.0;
    if model.is_sphere() {
        for i in 0..n {
            let xi = &state[3 * i..3 * i + 3];
            for j in i + 1..n {
                let xj = &state[3 * j..3 * j + 3];
                let dot = xi[0] * xj[0] + xi[1] * xj[1] + xi[2] * xj[2];
                let one_m = 1.0 - dot;
                check_separation(2.0 * one_m, i, j)?;
                h += strengths[i] * strengths[j] * one_m.ln();
            }
            h += model.omega() * strengths[i] * xi[2];
        }
    } else {
        for i in 0..n {
            let (xi, yi) = (state[2 * i], state[2 * i + 1]);
            for j in i + 1..n {
                let (xj, yj) = (state[2 * j], state[2 * j + 1]);
                let d2 = (xi - xj).powi(2) + (yi - yj).powi(2);
                check_separation(d2, i, j)?;
                let (g, _) = plane_kernel(model, d2.sqrt())?;
                h += strengths[i] * strengths[j] * g;
            }
            // rotating frame adds Ω times the signed momentum -Σ λ ρ²/2
            h -= model.omega() * 0.5 * strengths[i] * (xi * xi + yi * yi);
        }
    }
    Ok(h)
}

/// Phase-space velocity on a flat state, normalized convention.
pub(crate) fn rhs_state(
    model: Model,
    strengths: &[f64],
    state: &[f64],
    out: &mut [f64],
) -> Result<()> {
    let n = strengths.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    if model.is_sphere() {
        let omega = model.omega();
        for i in 0..n {
            let xi = [state[3 * i], state[3 * i + 1], state[3 * i + 2]];
            let mut v = [omega * -xi[1], omega * xi[0], 0.0]; // Ω ẑ × x
            for j in 0..n {
                if j == i {
                    continue;
                }
                let xj = [state[3 * j], state[3 * j + 1], state[3 * j + 2]];
                let dot = xi[0] * xj[0] + xi[1] * xj[1] + xi[2] * xj[2];
                let one_m = 1.0 - dot;
                check_separation(2.0 * one_m, i, j)?;
                let w = strengths[j] / one_m;
                v[0] += w * (xi[1] * xj[2] - xi[2] * xj[1]);
                v[1] += w * (xi[2] * xj[0] - xi[0] * xj[2]);
                v[2] += w * (xi[0] * xj[1] - xi[1] * xj[0]);
            }
            out[3 * i..3 * i + 3].copy_from_slice(&v);
        }
    } else {
        let omega = model.omega();
        for i in 0..n {
            let (xi, yi) = (state[2 * i], state[2 * i + 1]);
            let mut vx = -omega * yi;
            let mut vy = omega * xi;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let (xj, yj) = (state[2 * j], state[2 * j + 1]);
                let dx = xi - xj;
                let dy = yi - yj;
                let d2 = dx * dx + dy * dy;
                check_separation(d2, i, j)?;
                let d = d2.sqrt();
                let (_, gp) = plane_kernel(model, d)?;
                // λ ẋ = ∂H/∂y, λ ẏ = -∂H/∂x
                vx += strengths[j] * gp * dy / d;
                vy -= strengths[j] * gp * dx / d;
            }
            out[2 * i] = vx;
            out[2 * i + 1] = vy;
        }
    }
    Ok(())
}

/// Raw Hamiltonian in the model's own convention.
///
/// For the frozen-background rotating sphere the constant background
/// self-energy (a double integral independent of the vortex positions under
/// the frozen profile) is omitted; only the vortex-background cross term
/// `(Ω/2) Σ λ cos θ` is reported.
pub fn hamiltonian(sys: &VortexSystem) -> Result<f64> {
    let n = sys.n();
    let mut pair = 0.0;
    match sys.points() {
        Points::Plane(pts) => {
            for i in 0..n {
                for j in i + 1..n {
                    let d2 = (pts[i].x - pts[j].x).powi(2) + (pts[i].y - pts[j].y).powi(2);
                    check_separation(d2, i, j)?;
                    pair += sys.strength(i)
                        * sys.strength(j)
                        * match sys.model() {
                            Model::Geostrophic { kappa } if kappa > 0.0 => {
                                bessel_k0(kappa * d2.sqrt())?
                            }
                            _ => -d2.ln() / (4.0 * PI),
                        };
                }
            }
            if let Model::RotatingPlane { omega } = sys.model() {
                pair += omega * momentum_so2(sys);
            }
        }
        Points::Sphere(pts) => {
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = (pts[i].cartesian(), pts[j].cartesian());
                    let one_m = 1.0 - (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
                    check_separation(2.0 * one_m, i, j)?;
                    pair += sys.strength(i) * sys.strength(j) * one_m.ln() / (4.0 * PI);
                }
            }
            if let Model::RotatingSphere { omega } = sys.model() {
                pair += 0.5
                    * omega
                    * (0..n)
                        .map(|i| sys.strength(i) * pts[i].cos_theta())
                        .sum::<f64>();
            }
        }
    }
    Ok(pair)
}

/// Normalized Hamiltonian (the internal dynamics unit).
pub fn hamiltonian_normalized(sys: &VortexSystem) -> Result<f64> {
    h_norm_state(sys.model(), &sys.strengths(), &sys.to_state())
}

/// Velocity field of the system in the normalized convention.
pub fn velocity(sys: &VortexSystem) -> Result<VelocityField> {
    let strengths = sys.strengths();
    let state = sys.to_state();
    let mut out = vec![0.0; state.len()];
    rhs_state(sys.model(), &strengths, &state, &mut out)?;
    Ok(match sys.points() {
        Points::Plane(_) => {
            VelocityField::Plane(out.chunks_exact(2).map(|c| [c[0], c[1]]).collect())
        }
        Points::Sphere(pts) => {
            let cartesian: Vec<[f64; 3]> =
                out.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
            let angular = pts
                .iter()
                .zip(&cartesian)
                .map(|(p, v)| {
                    if p.phi_is_gauge() {
                        None
                    } else {
                        let (st, ct) = (p.theta().sin(), p.theta().cos());
                        let (sp, cp) = (p.phi().sin(), p.phi().cos());
                        let theta_dot = v[0] * ct * cp + v[1] * ct * sp - v[2] * st;
                        let phi_dot = (-v[0] * sp + v[1] * cp) / st;
                        Some([theta_dot, phi_dot])
                    }
                })
                .collect();
            VelocityField::Sphere { cartesian, angular }
        }
    })
}

/// Rotational (SO(2)) momentum: `Σ λ ρ²/2` on the plane, `Σ λ cos θ` on the
/// sphere. Conserved along trajectories in every model.
pub fn momentum_so2(sys: &VortexSystem) -> f64 {
    match sys.points() {
        Points::Plane(pts) => pts
            .iter()
            .enumerate()
            .map(|(i, p)| 0.5 * sys.strength(i) * (p.x * p.x + p.y * p.y))
            .sum(),
        Points::Sphere(pts) => pts
            .iter()
            .enumerate()
            .map(|(i, p)| sys.strength(i) * p.cos_theta())
            .sum(),
    }
}

/// Momentum vector `Σ λ x` of a sphere system, plus the frozen-background
/// contribution `(0, 0, 8πΩ/3)` when the sphere rotates. Errors on plane
/// models.
pub fn momentum_sphere(sys: &VortexSystem) -> Result<[f64; 3]> {
    let Points::Sphere(pts) = sys.points() else {
        return Err(Error::Domain(
            "momentum vector is defined for sphere models only".into(),
        ));
    };
    let mut m = [0.0; 3];
    for (i, p) in pts.iter().enumerate() {
        let x = p.cartesian();
        for k in 0..3 {
            m[k] += sys.strength(i) * x[k];
        }
    }
    m[2] += background_momentum_z(sys.model().omega());
    Ok(m)
}

/// z-component of the background vorticity's momentum vector:
/// the integral of `2Ω cos θ · cos θ` over the unit sphere.
pub fn background_momentum_z(omega: f64) -> f64 {
    8.0 * PI * omega / 3.0
}

/// Potential felt by a unit vortex from the frozen background vorticity,
/// with the gauge fixed to zero at the equator: value `Ω cos θ` and
/// θ-derivative `-Ω sin θ`. The φ-derivative is identically zero.
pub fn background_potential(theta: f64, omega: f64) -> (f64, f64) {
    (omega * theta.cos(), -omega * theta.sin())
}

/// Full energy/momentum diagnostics of a system.
pub fn energy_momentum(sys: &VortexSystem) -> Result<EnergyMomentum> {
    Ok(EnergyMomentum {
        h: hamiltonian(sys)?,
        h_normalized: hamiltonian_normalized(sys)?,
        j_so2: momentum_so2(sys),
        m_vec: if sys.model().is_sphere() {
            Some(momentum_sphere(sys)?)
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_planar_ring, build_sphere_ring};
    use crate::system::{PlanePoint, SpherePoint, Vorticity};

    fn plane_pair(d: f64, model: Model) -> VortexSystem {
        VortexSystem::new(
            model,
            Points::Plane(vec![
                PlanePoint {
                    x: -d / 2.0,
                    y: 0.0,
                },
                PlanePoint { x: d / 2.0, y: 0.0 },
            ]),
            vec![Vorticity::new(1.0).unwrap(), Vorticity::new(1.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn raw_hamiltonian_values() {
        // two unit vortices at distance 1: ln 1 = 0
        assert!(hamiltonian(&plane_pair(1.0, Model::Planar)).unwrap().abs() < 1e-15);
        // distance e: -(1/4π) ln e² = -1/(2π)
        let h = hamiltonian(&plane_pair(std::f64::consts::E, Model::Planar)).unwrap();
        assert!((h + 1.0 / (2.0 * PI)).abs() < 1e-14);
        // geostrophic κ=1 at distance 1: K0(1)
        let h = hamiltonian(&plane_pair(1.0, Model::Geostrophic { kappa: 1.0 })).unwrap();
        assert!((h - 0.421024438).abs() < 1e-9);
    }

    #[test]
    fn symmetric_pair_rigid_rotation() {
        // Two unit vortices at (±1/2, 0) rotate rigidly about the origin.
        // In the normalized unit the pair's angular velocity is
        // (N-1)/(4R²) = 1 at R = 1/2, i.e. speed 1/2 perpendicular to the
        // separation (the textbook 1/(4π)-convention speed is 1/(2π)).
        let sys = plane_pair(1.0, Model::Planar);
        let VelocityField::Plane(v) = velocity(&sys).unwrap() else {
            unreachable!()
        };
        assert!(v[0][0].abs() < 1e-15 && v[1][0].abs() < 1e-15);
        assert!((v[0][1] + 0.5).abs() < 1e-14); // vortex at x = -1/2 moves down
        assert!((v[1][1] - 0.5).abs() < 1e-14); // vortex at x = +1/2 moves up
    }

    #[test]
    fn single_vortex_on_rotating_sphere() {
        let sys = VortexSystem::new(
            Model::RotatingSphere { omega: 0.7 },
            Points::Sphere(vec![SpherePoint::new(PI / 4.0, 0.3).unwrap()]),
            vec![Vorticity::new(1.0).unwrap()],
        )
        .unwrap();
        let VelocityField::Sphere { angular, .. } = velocity(&sys).unwrap() else {
            unreachable!()
        };
        let [theta_dot, phi_dot] = angular[0].unwrap();
        assert!(theta_dot.abs() < 1e-14);
        assert!((phi_dot - 0.7).abs() < 1e-14);
    }

    #[test]
    fn geostrophic_matches_planar_at_tiny_kappa() {
        let mk = |model| {
            VortexSystem::new(
                model,
                Points::Plane(vec![
                    PlanePoint { x: 0.3, y: -0.2 },
                    PlanePoint { x: -0.8, y: 0.5 },
                    PlanePoint { x: 0.9, y: 0.8 },
                    PlanePoint { x: -0.1, y: -0.9 },
                ]),
                vec![
                    Vorticity::new(1.0).unwrap(),
                    Vorticity::new(-0.5).unwrap(),
                    Vorticity::new(2.0).unwrap(),
                    Vorticity::new(0.7).unwrap(),
                ],
            )
            .unwrap()
        };
        let VelocityField::Plane(vg) = velocity(&mk(Model::Geostrophic { kappa: 1e-8 })).unwrap()
        else {
            unreachable!()
        };
        let VelocityField::Plane(vp) = velocity(&mk(Model::Planar)).unwrap() else {
            unreachable!()
        };
        for (a, b) in vg.iter().zip(&vp) {
            for k in 0..2 {
                assert!(
                    (a[k] - b[k]).abs() < 1e-6 * b[k].abs().max(1e-3),
                    "{a:?} vs {b:?}"
                );
            }
        }
    }

    #[test]
    fn momentum_examples() {
        let c4 = build_planar_ring(4, 1.0, None).unwrap();
        assert!((momentum_so2(&c4) - 2.0).abs() < 1e-14);

        let c3v = build_sphere_ring(3, PI / 3.0, None, 0.0).unwrap();
        assert!((momentum_so2(&c3v) - 1.5).abs() < 1e-14);

        let with_pole = build_sphere_ring(3, PI / 3.0, Some(-0.8), 0.0).unwrap();
        assert!((momentum_so2(&with_pole) - (1.5 - 0.8)).abs() < 1e-14);
    }

    #[test]
    fn momentum_vector_background() {
        let single = VortexSystem::new(
            Model::Sphere,
            Points::Sphere(vec![SpherePoint::new(0.0, 0.0).unwrap()]),
            vec![Vorticity::new(1.0).unwrap()],
        )
        .unwrap();
        let m = momentum_sphere(&single).unwrap();
        assert!((m[0], m[1], m[2]) == (0.0, 0.0, 1.0) || (m[2] - 1.0).abs() < 1e-15);

        // background z-offset 8πΩ/3, cross-checked by Simpson quadrature of
        // ∫ 2Ω cos²θ dS with Ω = 0.3
        let omega = 0.3;
        let n = 2000; // even
        let f = |th: f64| 2.0 * omega * th.cos().powi(2) * th.sin() * 2.0 * PI;
        let h = PI / n as f64;
        let mut quad = f(0.0) + f(PI);
        for i in 1..n {
            quad += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        quad *= h / 3.0;
        let bg = background_momentum_z(omega);
        assert!((bg - 8.0 * PI * 0.3 / 3.0).abs() < 1e-15);
        assert!((quad - bg).abs() < 1e-10, "quadrature {quad} vs {bg}");

        let ring = build_sphere_ring(4, 1.1, None, omega).unwrap();
        let m = momentum_sphere(&ring).unwrap();
        assert!((m[2] - (momentum_so2(&ring) + bg)).abs() < 1e-12);

        // alternating equatorial ring: point part cancels exactly
        let pm = crate::builders::build_double_ring(
            crate::builders::RingFamily::D2NhRe,
            3,
            0.0,
            None,
            0,
            1.0,
        )
        .unwrap();
        let m = momentum_sphere(&pm).unwrap();
        assert!(m[0].abs() < 1e-14 && m[1].abs() < 1e-14 && m[2].abs() < 1e-14);

        assert!(momentum_sphere(&build_planar_ring(3, 1.0, None).unwrap()).is_err());
    }

    #[test]
    fn background_potential_values() {
        let (v, d) = background_potential(PI / 2.0, 1.0);
        assert!(v.abs() < 1e-15 && (d + 1.0).abs() < 1e-15);
        let (_, d) = background_potential(PI / 4.0, 2.0);
        assert!((d + 2.0f64.sqrt()).abs() < 1e-14);
        assert_eq!(background_potential(1.234, 0.0), (0.0, 0.0));
    }

    /// The velocity field must be the symplectic gradient of the normalized
    /// Hamiltonian: λ ẋ = ∂H/∂y, λ ẏ = -∂H/∂x on the plane and
    /// λ q̇ = -∂H/∂φ, λ φ̇ = ∂H/∂q on the sphere.
    #[test]
    fn velocity_is_symplectic_gradient() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 1e-6;
        let models = [
            Model::Planar,
            Model::RotatingPlane { omega: 0.8 },
            Model::Geostrophic { kappa: 1.3 },
            Model::Sphere,
            Model::RotatingSphere { omega: 0.4 },
        ];
        for model in models {
            for _ in 0..3 {
                let n = 5;
                let strengths: Vec<f64> = (0..n)
                    .map(|_| rng.gen_range(0.4..1.6) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                    .collect();
                if model.is_sphere() {
                    let qs: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.85..0.85)).collect();
                    let ps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
                    let hn = |qs: &[f64], ps: &[f64]| {
                        let mut state = Vec::new();
                        for (q, p) in qs.iter().zip(ps) {
                            let s = (1.0f64 - q * q).sqrt();
                            state.extend_from_slice(&[s * p.cos(), s * p.sin(), *q]);
                        }
                        h_norm_state(model, &strengths, &state).unwrap()
                    };
                    let mut state = Vec::new();
                    for (q, p) in qs.iter().zip(&ps) {
                        let s = (1.0f64 - q * q).sqrt();
                        state.extend_from_slice(&[s * p.cos(), s * p.sin(), *q]);
                    }
                    let mut rates = vec![0.0; 3 * n];
                    rhs_state(model, &strengths, &state, &mut rates).unwrap();
                    for i in 0..n {
                        let mut qp = qs.clone();
                        let mut qm = qs.clone();
                        qp[i] += h;
                        qm[i] -= h;
                        let dh_dq = (hn(&qp, &ps) - hn(&qm, &ps)) / (2.0 * h);
                        let mut pp = ps.clone();
                        let mut pm = ps.clone();
                        pp[i] += h;
                        pm[i] -= h;
                        let dh_dp = (hn(&qs, &pp) - hn(&qs, &pm)) / (2.0 * h);
                        // chart rates from the cartesian ones
                        let q = qs[i];
                        let s = (1.0f64 - q * q).sqrt();
                        let (cp, sp) = (ps[i].cos(), ps[i].sin());
                        let v = &rates[3 * i..3 * i + 3];
                        let q_dot = v[2];
                        let phi_dot = (-v[0] * sp + v[1] * cp) / s;
                        let scale = dh_dq.abs().max(dh_dp.abs()).max(1.0);
                        assert!(
                            (strengths[i] * q_dot + dh_dp).abs() < 2e-5 * scale,
                            "sphere q̇: {} vs {}",
                            strengths[i] * q_dot,
                            -dh_dp
                        );
                        assert!(
                            (strengths[i] * phi_dot - dh_dq).abs() < 2e-5 * scale,
                            "sphere φ̇: {} vs {}",
                            strengths[i] * phi_dot,
                            dh_dq
                        );
                    }
                } else {
                    let state: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.2..1.2)).collect();
                    if min_sep_plane(&state) < 0.25 {
                        continue;
                    }
                    let mut rates = vec![0.0; 2 * n];
                    rhs_state(model, &strengths, &state, &mut rates).unwrap();
                    for k in 0..2 * n {
                        let mut sp = state.clone();
                        let mut sm = state.clone();
                        sp[k] += h;
                        sm[k] -= h;
                        let d = (h_norm_state(model, &strengths, &sp).unwrap()
                            - h_norm_state(model, &strengths, &sm).unwrap())
                            / (2.0 * h);
                        let i = k / 2;
                        let expected = if k % 2 == 0 {
                            // ∂H/∂x = -λ ẏ
                            -strengths[i] * rates[2 * i + 1]
                        } else {
                            strengths[i] * rates[2 * i]
                        };
                        assert!(
                            (d - expected).abs() < 2e-5 * d.abs().max(1.0),
                            "{model:?} coord {k}: {d} vs {expected}"
                        );
                    }
                }
            }
        }
    }

    fn min_sep_plane(state: &[f64]) -> f64 {
        let n = state.len() / 2;
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let d = ((state[2 * i] - state[2 * j]).powi(2)
                    + (state[2 * i + 1] - state[2 * j + 1]).powi(2))
                .sqrt();
                m = m.min(d);
            }
        }
        m
    }

    #[test]
    fn so2_equivariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sys = build_sphere_ring(5, 0.9, Some(1.3), 0.25).unwrap();
        let VelocityField::Sphere { cartesian: v0, .. } = velocity(&sys).unwrap() else {
            unreachable!()
        };
        for _ in 0..10 {
            let g: f64 = rng.gen_range(0.0..2.0 * PI);
            let (c, s) = (g.cos(), g.sin());
            let VelocityField::Sphere { cartesian: vg, .. } = velocity(&sys.rotated_z(g)).unwrap()
            else {
                unreachable!()
            };
            for (a, b) in v0.iter().zip(&vg) {
                let rot = [c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]];
                for k in 0..3 {
                    assert!((rot[k] - b[k]).abs() < 1e-12, "equivariance broke at g={g}");
                }
            }
        }
    }
}
