//! Property tests of the structural invariants.

use proptest::prelude::*;
use std::f64::consts::PI;
use vortexlab::models::{momentum_so2, momentum_sphere, velocity, VelocityField};
use vortexlab::specfun::BesselEval;
use vortexlab::stability::trig_sum;
use vortexlab::{build_planar_ring, build_sphere_ring, SpherePoint};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Rotating a ring by its symmetry angle permutes the weighted
    /// configuration; a generic rotation does not.
    #[test]
    fn ring_rotation_symmetry(n in 2usize..9, theta0 in 0.2f64..2.9, lam in prop_oneof![Just(None), (0.2f64..2.0).prop_map(Some)]) {
        let sys = build_sphere_ring(n, theta0, lam, 0.0).unwrap();
        let rot = sys.rotated_z(2.0 * PI / n as f64);
        prop_assert!(sys.same_weighted_configuration(&rot, 1e-12));
        let generic = sys.rotated_z(2.0 * PI / n as f64 + 0.1);
        prop_assert!(!sys.same_weighted_configuration(&generic, 1e-9));
    }

    /// The planar builder's ring vortices are unaffected by the central one.
    #[test]
    fn center_does_not_move_ring(n in 3usize..9, r in 0.3f64..3.0, lam in 0.1f64..2.0) {
        let bare = build_planar_ring(n, r, None).unwrap();
        let with = build_planar_ring(n, r, Some(lam)).unwrap();
        for i in 0..n {
            prop_assert_eq!(bare.points().embedded(i), with.points().embedded(i));
        }
    }

    /// K1 > K0 > 0, both strictly decreasing.
    #[test]
    fn bessel_ordering(a in -5.0f64..1.4, d in 0.01f64..1.0) {
        let x = 10f64.powf(a);
        let y = x * (1.0 + d);
        let ex = BesselEval::new(x).unwrap();
        let ey = BesselEval::new(y).unwrap();
        prop_assert!(ex.k0 > 0.0 && ex.k1 > ex.k0);
        prop_assert!(ey.k0 < ex.k0 && ey.k1 < ex.k1);
    }

    /// Sphere points round-trip through cartesian coordinates.
    #[test]
    fn sphere_point_round_trip(theta in 1e-3f64..PI - 1e-3, phi in -10.0f64..10.0) {
        let p = SpherePoint::new(theta, phi).unwrap();
        let q = SpherePoint::from_cartesian(p.cartesian()).unwrap();
        prop_assert!((p.theta() - q.theta()).abs() < 1e-12);
        if !p.phi_is_gauge() {
            prop_assert!((p.phi() - q.phi()).abs() < 1e-9);
        }
    }

    /// The momentum vector's z-component is the SO(2) momentum plus the
    /// fixed background contribution.
    #[test]
    fn momentum_vector_z_identity(n in 2usize..7, theta0 in 0.2f64..2.9, omega in 0.0f64..1.0) {
        let sys = build_sphere_ring(n, theta0, None, omega).unwrap();
        let m = momentum_sphere(&sys).unwrap();
        let expect = momentum_so2(&sys) + 8.0 * PI * omega / 3.0;
        prop_assert!((m[2] - expect).abs() < 1e-12);
    }

    /// Velocity is equivariant under rotations about the symmetry axis.
    #[test]
    fn velocity_equivariance(g in 0.0f64..2.0 * PI) {
        let sys = build_sphere_ring(4, 1.1, Some(0.7), 0.2).unwrap();
        let VelocityField::Sphere { cartesian: v0, .. } = velocity(&sys).unwrap() else {
            unreachable!()
        };
        let VelocityField::Sphere { cartesian: vg, .. } =
            velocity(&sys.rotated_z(g)).unwrap() else { unreachable!() };
        let (c, s) = (g.cos(), g.sin());
        for (a, b) in v0.iter().zip(&vg) {
            let rot = [c * a[0] - s * a[1], s * a[0] + c * a[1], a[2]];
            for k in 0..3 {
                prop_assert!((rot[k] - b[k]).abs() < 1e-12);
            }
        }
    }

    /// The mode sum matches its closed form for every (n, ell).
    #[test]
    fn trig_sum_closed_form(n in 2usize..40, frac in 0.0f64..1.0) {
        let ell = 1 + ((n - 1) as f64 * frac) as usize;
        prop_assume!(ell < n);
        let direct = trig_sum(n, ell).unwrap();
        let nf = n as f64;
        let closed = (nf * nf - 1.0) / 3.0 - 2.0 * ell as f64 * (nf - ell as f64);
        prop_assert!((direct - closed).abs() < 1e-9);
    }
}
