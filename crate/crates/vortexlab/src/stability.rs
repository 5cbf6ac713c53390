//! The energy-momentum stability engine for ring relative equilibria.
//!
//! Pipeline: detect the ring structure of a configuration, measure its
//! angular velocity ξ from the velocity field, verify it is a critical
//! point of the augmented Hamiltonian `H - ξ J`, build the symmetry-adapted
//! basis of the symplectic slice, project the Hessian onto it (asserting
//! block-diagonality), form the linearization with the restricted
//! symplectic form, and classify:
//!
//! * definite Hessian (either sign)      → Lyapunov stable modulo rotations,
//! * some eigenvalue off the imaginary axis → linearly unstable,
//! * imaginary, semisimple spectrum with an indefinite Hessian → elliptic,
//! * a Hessian eigenvalue within tolerance of zero, or a defective
//!   imaginary eigenvalue → degenerate (the method is inconclusive).
//!
//! The slice is the orthogonal complement of the rotation direction inside
//! the kernel of the conserved momenta: the single SO(2) momentum for plane
//! models and the frozen-background rotating sphere, all three components
//! of `Σ λ x` for the non-rotating sphere (whose symmetry group is the full
//! rotation group).
//!
//! Plane-family Hessians are scaled so that the ring-mode diagonal entries
//! take the classical closed-form values `N ℓ (N-ℓ)/2` and
//! `(N/2)(-(ℓ-1)(N-ℓ-1) + N-1+4λ)` in the basis where mode vectors carry
//! squared norm `N/2`; equivalently the block scale is 4x the dynamical
//! normalization, with block angular velocity `ξ_blk = N-1+2λ` at R = 1.
//! Verdicts are scale-invariant, and the `xi` field always reports the
//! dynamical value.

use crate::mat::{orthonormal_columns, Mat};
use crate::models::{velocity, VelocityField};
use crate::smalleig::{gen_eig, sym_eig, GenSpectrum};
use crate::specfun::bessel_k1;
use crate::system::{Model, Points, VortexSystem, POLE_CHART_TOL};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative tolerance below which a Hessian eigenvalue counts as zero.
pub const DEFAULT_TOL_REL: f64 = 1e-8;
/// Off-block couplings above this fraction of the Hessian norm are a bug in
/// the symmetry-adapted basis and abort the analysis.
const BLOCK_DIAG_HARD_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    LyapunovStable,
    Elliptic,
    LinearlyUnstable,
    Degenerate,
}

impl VerdictKind {
    pub fn code(&self) -> char {
        match self {
            VerdictKind::LyapunovStable => 'S',
            VerdictKind::Elliptic => 'E',
            VerdictKind::LinearlyUnstable => 'U',
            VerdictKind::Degenerate => 'D',
        }
    }
}

/// Stability verdict with its eigenvalue evidence.
#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub kind: VerdictKind,
    pub hessian_eigs: Vec<f64>,
    pub linearization_eigs: Vec<(f64, f64)>,
    pub tolerance_used: f64,
    /// Angular velocity of the relative equilibrium, dynamical scale.
    pub xi: f64,
    pub note: Option<String>,
}

/// Symmetry-adapted orthonormal basis of the symplectic slice.
#[derive(Debug, Clone)]
pub struct SliceBasis {
    /// Unit vectors in chart coordinates.
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// (sector label, mode index ℓ, start, len) spans of the Hessian blocks.
    pub blocks: Vec<(String, usize, usize, usize)>,
    /// Spans of the linearization sectors (even/odd blocks of one ℓ merge).
    pub l_sectors: Vec<(String, usize, usize, usize)>,
}

impl SliceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Block-diagonal slice Hessian.
#[derive(Debug, Clone)]
pub struct SliceHessian {
    pub blocks: Vec<(String, Mat)>,
    /// Largest off-block coupling relative to the Hessian norm.
    pub offblock_residual: f64,
    /// Full projected matrix, for the equivalence tests.
    pub full: Mat,
}

impl SliceHessian {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (_, b) in &self.blocks {
            out.extend(sym_eig(b)?.eigenvalues);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }
}

/// Full stability analysis of a ring configuration.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub verdict: StabilityVerdict,
    pub basis: SliceBasis,
    pub hessian: SliceHessian,
    pub linearization: Vec<(String, Mat)>,
    /// Dynamical angular velocity.
    pub xi: f64,
    /// Number of ring vortices.
    pub n_ring: usize,
}

// ---------------------------------------------------------------------------
// chart
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum Slot {
    /// (ρ, φ) of a plane vortex away from the origin.
    PlaneRing,
    /// (x, y) of a plane vortex at the origin.
    PlaneOrigin,
    /// (q = cos θ, φ) of a sphere vortex away from the poles.
    SphereRing,
    /// Tangent coordinates at the north pole.
    PoleNorth,
}

/// Chart layout of an analyzable configuration: one ring of identical
/// vortices plus at most one central/polar vortex.
#[derive(Debug, Clone)]
struct Chart {
    model: Model,
    strengths: Vec<f64>,
    slots: Vec<Slot>,
    ring: Vec<usize>,
    special: Option<usize>,
}

impl Chart {
    fn detect(sys: &VortexSystem) -> Result<Self> {
        let n = sys.n();
        let mut slots = Vec::with_capacity(n);
        let mut ring = Vec::new();
        let mut special = None;
        match sys.points() {
            Points::Plane(pts) => {
                for (i, p) in pts.iter().enumerate() {
                    if p.rho() < 1e-9 {
                        if special.replace(i).is_some() {
                            return Err(Error::Config(
                                "more than one central vortex; not a ring configuration".into(),
                            ));
                        }
                        slots.push(Slot::PlaneOrigin);
                    } else {
                        ring.push(i);
                        slots.push(Slot::PlaneRing);
                    }
                }
            }
            Points::Sphere(pts) => {
                for (i, p) in pts.iter().enumerate() {
                    if p.theta() < POLE_CHART_TOL {
                        if special.replace(i).is_some() {
                            return Err(Error::Config("more than one polar vortex".into()));
                        }
                        slots.push(Slot::PoleNorth);
                    } else if p.theta() > PI - POLE_CHART_TOL {
                        return Err(Error::Config(
                            "south-pole vortex: analyze the reflected configuration with the \
                             vortex at the north pole"
                                .into(),
                        ));
                    } else {
                        ring.push(i);
                        slots.push(Slot::SphereRing);
                    }
                }
            }
        }
        let m = ring.len();
        if m < 2 {
            return Err(Error::Config("fewer than two ring vortices".into()));
        }
        if !sys.model().is_sphere() && m < 3 {
            return Err(Error::Config(
                "planar rings of two vortices are collinear and degenerate; need n >= 3".into(),
            ));
        }
        // identical strengths, common latitude/radius, equal spacing
        let s0 = sys.strength(ring[0]);
        for &i in &ring {
            if (sys.strength(i) - s0).abs() > 1e-12 * s0.abs() {
                return Err(Error::Config(
                    "ring vortices must carry identical strengths".into(),
                ));
            }
        }
        let mut phis: Vec<f64> = Vec::with_capacity(m);
        match sys.points() {
            Points::Plane(pts) => {
                let r0 = pts[ring[0]].rho();
                for &i in &ring {
                    if (pts[i].rho() - r0).abs() > 1e-9 * r0 {
                        return Err(Error::Config("ring vortices must share one radius".into()));
                    }
                    phis.push(pts[i].phi().unwrap());
                }
            }
            Points::Sphere(pts) => {
                let t0 = pts[ring[0]].theta();
                for &i in &ring {
                    if (pts[i].theta() - t0).abs() > 1e-9 {
                        return Err(Error::Config(
                            "ring vortices must share one colatitude".into(),
                        ));
                    }
                    phis.push(pts[i].phi());
                }
            }
        }
        phis.sort_by(f64::total_cmp);
        for k in 0..m {
            let next = if k + 1 < m {
                phis[k + 1]
            } else {
                phis[0] + 2.0 * PI
            };
            if ((next - phis[k]) - 2.0 * PI / m as f64).abs() > 1e-9 {
                return Err(Error::Config(
                    "ring longitudes are not equally spaced".into(),
                ));
            }
        }
        if matches!(sys.model(), Model::RotatingPlane { .. }) && sys.total_vorticity().abs() < 1e-12
        {
            return Err(Error::ZeroMomentum(
                "rotating-plane lift needs nonzero total vorticity (no barycentre)".into(),
            ));
        }
        Ok(Chart {
            model: sys.model(),
            strengths: sys.strengths(),
            slots,
            ring,
            special,
        })
    }

    fn coords(&self, sys: &VortexSystem) -> Vec<f64> {
        let mut c = Vec::with_capacity(2 * self.slots.len());
        match sys.points() {
            Points::Plane(pts) => {
                for (i, slot) in self.slots.iter().enumerate() {
                    match slot {
                        Slot::PlaneRing => {
                            c.push(pts[i].rho());
                            c.push(pts[i].phi().unwrap());
                        }
                        Slot::PlaneOrigin => {
                            c.push(pts[i].x);
                            c.push(pts[i].y);
                        }
                        _ => unreachable!(),
                    }
                }
            }
            Points::Sphere(pts) => {
                for (i, slot) in self.slots.iter().enumerate() {
                    match slot {
                        Slot::SphereRing => {
                            c.push(pts[i].cos_theta());
                            c.push(pts[i].phi());
                        }
                        Slot::PoleNorth => {
                            let x = pts[i].cartesian();
                            c.push(x[0]);
                            c.push(x[1]);
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
        c
    }

    /// Embedded positions (x, y[, z]) with the per-coordinate Jacobians of
    /// the chart.
    fn embed(&self, coords: &[f64]) -> (Vec<[f64; 3]>, Vec<[[f64; 3]; 2]>) {
        let n = self.slots.len();
        let mut pos = Vec::with_capacity(n);
        let mut jac = Vec::with_capacity(n);
        for (i, slot) in self.slots.iter().enumerate() {
            let (a, b) = (coords[2 * i], coords[2 * i + 1]);
            match slot {
                Slot::PlaneRing => {
                    let (c, s) = (b.cos(), b.sin());
                    pos.push([a * c, a * s, 0.0]);
                    jac.push([[c, s, 0.0], [-a * s, a * c, 0.0]]);
                }
                Slot::PlaneOrigin => {
                    pos.push([a, b, 0.0]);
                    jac.push([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
                }
                Slot::SphereRing => {
                    let q = a;
                    let s = (1.0 - q * q).sqrt();
                    let (cp, sp) = (b.cos(), b.sin());
                    pos.push([s * cp, s * sp, q]);
                    jac.push([[-q * cp / s, -q * sp / s, 1.0], [-s * sp, s * cp, 0.0]]);
                }
                Slot::PoleNorth => {
                    let w = (1.0 - a * a - b * b).sqrt();
                    pos.push([a, b, w]);
                    jac.push([[1.0, 0.0, -a / w], [0.0, 1.0, -b / w]]);
                }
            }
        }
        (pos, jac)
    }

    /// Gradient of `H - xi J` in chart coordinates (dynamical scale).
    fn grad_aug(&self, coords: &[f64], xi: f64) -> Result<Vec<f64>> {
        let n = self.slots.len();
        let (pos, jac) = self.embed(coords);
        // embedded gradient of the pair interaction
        let mut g = vec![[0.0f64; 3]; n];
        if self.model.is_sphere() {
            for i in 0..n {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let dot = pos[i][0] * pos[j][0] + pos[i][1] * pos[j][1] + pos[i][2] * pos[j][2];
                    let w = -self.strengths[i] * self.strengths[j] / (1.0 - dot);
                    for k in 0..3 {
                        g[i][k] += w * pos[j][k];
                    }
                }
            }
            // background plus momentum: (Ω - ξ) Σ λ z
            let c = self.model.omega() - xi;
            for i in 0..n {
                g[i][2] += c * self.strengths[i];
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let dx = pos[i][0] - pos[j][0];
                    let dy = pos[i][1] - pos[j][1];
                    let d = (dx * dx + dy * dy).sqrt();
                    let gp = match self.model {
                        Model::Geostrophic { kappa } if kappa > 0.0 => {
                            -0.5 * kappa * bessel_k1(kappa * d)?
                        }
                        _ => -0.5 / d,
                    } * self.strengths[i]
                        * self.strengths[j];
                    g[i][0] += gp * dx / d;
                    g[i][1] += gp * dy / d;
                }
                // rotating frame and momentum term: (Ω - ξ) d(-Σ λ ρ²/2)
                let c = self.model.omega() - xi;
                g[i][0] -= c * self.strengths[i] * pos[i][0];
                g[i][1] -= c * self.strengths[i] * pos[i][1];
            }
        }
        // chain rule into the chart
        let mut out = vec![0.0; 2 * n];
        for i in 0..n {
            for ab in 0..2 {
                out[2 * i + ab] = (0..3).map(|k| jac[i][ab][k] * g[i][k]).sum();
            }
        }
        Ok(out)
    }

    /// Matrix of the symplectic form on the chart basis vectors.
    fn omega_matrix(&self, coords: &[f64]) -> Mat {
        let n = self.slots.len();
        let mut w = Mat::zeros(2 * n, 2 * n);
        for (i, slot) in self.slots.iter().enumerate() {
            let lam = self.strengths[i];
            let v = match slot {
                Slot::PlaneRing => lam * coords[2 * i], // λ ρ dρ∧dφ
                Slot::PlaneOrigin => lam,               // λ dx∧dy
                Slot::SphereRing => -lam,               // λ dφ∧dq
                Slot::PoleNorth => lam,                 // λ du∧dv
            };
            w[(2 * i, 2 * i + 1)] = v;
            w[(2 * i + 1, 2 * i)] = -v;
        }
        w
    }

    /// Gradient rows of the conserved momenta constraining the slice.
    fn momentum_rows(&self, coords: &[f64]) -> Vec<Vec<f64>> {
        let n = self.slots.len();
        let (pos, jac) = self.embed(coords);
        let mut rows = Vec::new();
        if self.model.is_sphere() {
            let comps: &[usize] = if matches!(self.model, Model::Sphere) {
                &[0, 1, 2] // full momentum vector of the non-rotating sphere
            } else {
                &[2] // only J_z survives the rotation
            };
            for &k in comps {
                let mut row = vec![0.0; 2 * n];
                for i in 0..n {
                    for ab in 0..2 {
                        row[2 * i + ab] = self.strengths[i] * jac[i][ab][k];
                    }
                }
                rows.push(row);
            }
        } else {
            let mut row = vec![0.0; 2 * n];
            for i in 0..n {
                for ab in 0..2 {
                    row[2 * i + ab] =
                        self.strengths[i] * (jac[i][ab][0] * pos[i][0] + jac[i][ab][1] * pos[i][1]);
                }
            }
            rows.push(row);
        }
        rows
    }

    /// Infinitesimal rotation about the axis, in chart coordinates.
    fn group_direction(&self, coords: &[f64]) -> Vec<f64> {
        let n = self.slots.len();
        let mut v = vec![0.0; 2 * n];
        for (i, slot) in self.slots.iter().enumerate() {
            match slot {
                Slot::PlaneRing | Slot::SphereRing => v[2 * i + 1] = 1.0,
                Slot::PlaneOrigin | Slot::PoleNorth => {
                    // generator (-y, x); zero at the origin/pole itself
                    v[2 * i] = -coords[2 * i + 1];
                    v[2 * i + 1] = coords[2 * i];
                }
            }
        }
        v
    }
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

/// Angular velocity of the ring (dynamical scale), with a rigid-rotation
/// consistency check on the velocity field.
fn ring_xi(sys: &VortexSystem, chart: &Chart) -> Result<f64> {
    let vel = velocity(sys)?;
    let mut xi: Option<f64> = None;
    // floor the scale at 1: a lifted ring can be static (ξ0 + Ω = 0), and
    // the residual checks must not divide by its vanishing speed
    let scale = vel.max_speed().max(1.0);
    match (&vel, sys.points()) {
        (VelocityField::Plane(rates), Points::Plane(pts)) => {
            for &i in &chart.ring {
                let p = pts[i];
                let r2 = p.x * p.x + p.y * p.y;
                let radial = (p.x * rates[i][0] + p.y * rates[i][1]) / r2.sqrt();
                let omega = (p.x * rates[i][1] - p.y * rates[i][0]) / r2;
                if radial.abs() > 1e-9 * scale {
                    return Err(Error::NotRelativeEquilibrium(format!(
                        "ring vortex {i} has radial velocity {radial:.2e}"
                    )));
                }
                if let Some(x) = xi {
                    if (omega - x).abs() > 1e-9 * scale.max(x.abs()) {
                        return Err(Error::NotRelativeEquilibrium(
                            "ring vortices rotate at different rates".into(),
                        ));
                    }
                } else {
                    xi = Some(omega);
                }
            }
        }
        (VelocityField::Sphere { angular, .. }, _) => {
            for &i in &chart.ring {
                let [theta_dot, phi_dot] =
                    angular[i].ok_or_else(|| Error::Config("ring vortex at a pole".into()))?;
                if theta_dot.abs() > 1e-9 * scale {
                    return Err(Error::NotRelativeEquilibrium(format!(
                        "ring vortex {i} drifts in colatitude at {theta_dot:.2e}"
                    )));
                }
                if let Some(x) = xi {
                    if (phi_dot - x).abs() > 1e-9 * scale.max(x.abs()) {
                        return Err(Error::NotRelativeEquilibrium(
                            "ring vortices rotate at different rates".into(),
                        ));
                    }
                } else {
                    xi = Some(phi_dot);
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(xi.expect("ring is nonempty"))
}

/// Hessian scale factor: plane families are reported in the block
/// normalization (4x dynamical); the sphere in its natural one.
fn block_scale(model: Model) -> f64 {
    if model.is_sphere() {
        1.0
    } else {
        4.0
    }
}

/// The full chart Hessian of the augmented Hamiltonian at the relative
/// equilibrium, by Richardson-extrapolated central differences of the
/// analytic gradient, symmetrized. Errors when the configuration is not a
/// critical point (gradient residual above 1e-8).
pub fn augmented_hessian(sys: &VortexSystem) -> Result<(Mat, f64)> {
    let chart = Chart::detect(sys)?;
    let coords = chart.coords(sys);
    let xi = ring_xi(sys, &chart)?;
    augmented_hessian_inner(&chart, &coords, xi)
}

fn augmented_hessian_inner(chart: &Chart, coords: &[f64], xi: f64) -> Result<(Mat, f64)> {
    let g0 = chart.grad_aug(coords, xi)?;
    let resid = g0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if resid > 1e-8 {
        return Err(Error::NotRelativeEquilibrium(format!(
            "augmented-Hamiltonian gradient residual {resid:.3e}"
        )));
    }
    let n = coords.len();
    let h = 1e-5;
    let mut q = Mat::zeros(n, n);
    let col = |j: usize, hh: f64| -> Result<Vec<f64>> {
        let mut cp = coords.to_vec();
        cp[j] += hh;
        let gp = chart.grad_aug(&cp, xi)?;
        cp[j] -= 2.0 * hh;
        let gm = chart.grad_aug(&cp, xi)?;
        Ok(gp
            .iter()
            .zip(&gm)
            .map(|(p, m)| (p - m) / (2.0 * hh))
            .collect())
    };
    for j in 0..n {
        let d1 = col(j, h)?;
        let d2 = col(j, h / 2.0)?;
        for i in 0..n {
            q[(i, j)] = (4.0 * d2[i] - d1[i]) / 3.0;
        }
    }
    let mut q = q.symmetrized();
    let scale = block_scale(chart.model);
    if scale != 1.0 {
        for v in &mut q.data {
            *v *= scale;
        }
    }
    Ok((q, xi))
}

/// Build the symmetry-adapted basis of the symplectic slice.
pub fn slice_basis(sys: &VortexSystem) -> Result<SliceBasis> {
    let chart = Chart::detect(sys)?;
    let coords = chart.coords(sys);
    slice_basis_inner(&chart, &coords)
}

fn slice_basis_inner(chart: &Chart, coords: &[f64]) -> Result<SliceBasis> {
    let n = chart.slots.len();
    let m = chart.ring.len();
    let dim = 2 * n;
    // ring longitudes in ring order
    let phis: Vec<f64> = chart.ring.iter().map(|&i| coords[2 * i + 1]).collect();

    let mut constraints = chart.momentum_rows(coords);
    constraints.push(chart.group_direction(coords));

    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut blocks: Vec<(String, usize, usize, usize)> = Vec::new();
    let mut l_sectors: Vec<(String, usize, usize, usize)> = Vec::new();

    let pattern = |offsets: &[(usize, f64)]| -> Vec<f64> {
        let mut v = vec![0.0; dim];
        for &(idx, val) in offsets {
            v[idx] = val;
        }
        v
    };

    for ell in 1..=m / 2 {
        let cos_pat: Vec<f64> = phis.iter().map(|p| (ell as f64 * p).cos()).collect();
        let sin_pat: Vec<f64> = phis.iter().map(|p| (ell as f64 * p).sin()).collect();
        let has_sin = 2 * ell != m;
        // even family under φ → -φ: radial cos-mode, angular sin-mode, x/u
        let mut even: Vec<(String, Vec<f64>)> = Vec::new();
        let mut odd: Vec<(String, Vec<f64>)> = Vec::new();
        even.push((
            format!("a_r^{ell}"),
            pattern(
                &chart
                    .ring
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (2 * i, cos_pat[k]))
                    .collect::<Vec<_>>(),
            ),
        ));
        if has_sin {
            even.push((
                format!("b_t^{ell}"),
                pattern(
                    &chart
                        .ring
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| (2 * i + 1, sin_pat[k]))
                        .collect::<Vec<_>>(),
                ),
            ));
            odd.push((
                format!("b_r^{ell}"),
                pattern(
                    &chart
                        .ring
                        .iter()
                        .enumerate()
                        .map(|(k, &i)| (2 * i, sin_pat[k]))
                        .collect::<Vec<_>>(),
                ),
            ));
        }
        odd.push((
            format!("a_t^{ell}"),
            pattern(
                &chart
                    .ring
                    .iter()
                    .enumerate()
                    .map(|(k, &i)| (2 * i + 1, cos_pat[k]))
                    .collect::<Vec<_>>(),
            ),
        ));
        if ell == 1 {
            if let Some(s) = chart.special {
                even.push(("c_x".into(), pattern(&[(2 * s, 1.0)])));
                odd.push(("c_y".into(), pattern(&[(2 * s + 1, 1.0)])));
            }
        }

        let sector_start = vectors.len();
        for (tag, family) in [("even", even), ("odd", odd)] {
            let block_start = vectors.len();
            let kept = project_family(&family, &constraints);
            for (lab, v) in kept {
                labels.push(lab);
                vectors.push(v);
            }
            let len = vectors.len() - block_start;
            if len > 0 {
                blocks.push((format!("l={ell} {tag}"), ell, block_start, len));
            }
        }
        let sector_len = vectors.len() - sector_start;
        if sector_len > 0 {
            l_sectors.push((format!("l={ell}"), ell, sector_start, sector_len));
        }
    }

    // invariants: in the momentum kernel, orthogonal to the group direction,
    // orthonormal
    for (vi, v) in vectors.iter().enumerate() {
        for c in &constraints {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            let cn: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            if dot.abs() > 1e-12 * cn.max(1.0) {
                return Err(Error::SymmetryBasis(format!(
                    "slice vector {vi} violates a momentum/group constraint by {dot:.2e}"
                )));
            }
        }
        for (wi, w) in vectors.iter().enumerate() {
            let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
            let target = if vi == wi { 1.0 } else { 0.0 };
            if (dot - target).abs() > 1e-12 {
                return Err(Error::SymmetryBasis(format!(
                    "slice vectors {vi}, {wi} not orthonormal: {dot}"
                )));
            }
        }
    }

    Ok(SliceBasis {
        vectors,
        labels,
        blocks,
        l_sectors,
    })
}

/// Restrict a family of vectors to the joint kernel of the constraints,
/// keeping within the family's span, and orthonormalize.
fn project_family(
    family: &[(String, Vec<f64>)],
    constraints: &[Vec<f64>],
) -> Vec<(String, Vec<f64>)> {
    if family.is_empty() {
        return Vec::new();
    }
    let dim = family[0].1.len();
    let k = family.len();
    // orthonormalize the family first
    let fam_basis = orthonormal_columns(
        &family.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(),
        1e-10,
    );
    // constraint rows restricted to the family span
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for c in constraints {
        let r: Vec<f64> = fam_basis
            .iter()
            .map(|b| b.iter().zip(c).map(|(x, y)| x * y).sum())
            .collect();
        let nrm: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let full: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-10 * full.max(1.0) {
            rows.push(r);
        }
    }
    // kernel of the rows inside R^len(fam_basis)
    let row_space = orthonormal_columns(&rows, 1e-12);
    let mut kernel: Vec<Vec<f64>> = Vec::new();
    for i in 0..fam_basis.len() {
        let mut e = vec![0.0; fam_basis.len()];
        e[i] = 1.0;
        for r in &row_space {
            let dot: f64 = e.iter().zip(r).map(|(a, b)| a * b).sum();
            for (ei, ri) in e.iter_mut().zip(r) {
                *ei -= dot * ri;
            }
        }
        kernel.push(e);
    }
    let kernel = orthonormal_columns(&kernel, 1e-8);
    // back to chart coordinates
    let mut out = Vec::new();
    for kv in &kernel {
        let mut v = vec![0.0; dim];
        for (w, b) in kv.iter().zip(&fam_basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += w * bi;
            }
        }
        // label by the dominant original member; '~' marks vectors mixed by
        // the momentum projection
        let mut best = (0usize, 0.0f64);
        for (j, (_, f)) in family.iter().enumerate() {
            let fn2: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = v.iter().zip(f).map(|(a, b)| a * b).sum::<f64>() / fn2;
            if dot.abs() > best.1 {
                best = (j, dot.abs());
            }
        }
        let suffix = if kernel.len() < k { "~" } else { "" };
        out.push((format!("{}{}", family[best.0].0, suffix), v));
    }
    out
}

/// Project the augmented Hessian onto the slice.
pub fn block_hessian(sys: &VortexSystem) -> Result<(SliceHessian, SliceBasis, f64)> {
    let chart = Chart::detect(sys)?;
    let coords = chart.coords(sys);
    let xi = ring_xi(sys, &chart)?;
    let (q, _) = augmented_hessian_inner(&chart, &coords, xi)?;
    let basis = slice_basis_inner(&chart, &coords)?;
    let hess = project_blocks(&q, &basis)?;
    Ok((hess, basis, xi))
}

fn project_blocks(q: &Mat, basis: &SliceBasis) -> Result<SliceHessian> {
    let d = basis.dim();
    let mut full = Mat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = 0.0;
            for i in 0..q.n_rows {
                let va = basis.vectors[a][i];
                if va == 0.0 {
                    continue;
                }
                for j in 0..q.n_cols {
                    acc += va * q[(i, j)] * basis.vectors[b][j];
                }
            }
            full[(a, b)] = acc;
        }
    }
    let norm = full.max_abs().max(1e-12);
    let mut offblock = 0.0f64;
    let mut blocks = Vec::new();
    for (label, _, start, len) in &basis.blocks {
        let mut m = Mat::zeros(*len, *len);
        for i in 0..*len {
            for j in 0..*len {
                m[(i, j)] = full[(start + i, start + j)];
            }
        }
        blocks.push((label.clone(), m));
    }
    // couplings outside the declared blocks
    for a in 0..d {
        for b in 0..d {
            let same = basis
                .blocks
                .iter()
                .any(|(_, _, s, l)| a >= *s && a < s + l && b >= *s && b < s + l);
            if !same {
                offblock = offblock.max(full[(a, b)].abs());
            }
        }
    }
    let offblock_residual = offblock / norm;
    if offblock_residual > BLOCK_DIAG_HARD_TOL {
        return Err(Error::SymmetryBasis(format!(
            "off-block coupling {offblock:.3e} exceeds {BLOCK_DIAG_HARD_TOL:e} of the norm {norm:.3e}"
        )));
    }
    Ok(SliceHessian {
        blocks,
        offblock_residual,
        full,
    })
}

/// Linearization sectors `L = Ω⁻¹ Q` on the slice, grouped by mode index.
pub fn block_linearization(sys: &VortexSystem) -> Result<Vec<(String, Mat)>> {
    let report = analyze(sys)?;
    Ok(report.linearization)
}

fn linearization_sectors(
    omega_full: &Mat,
    hess: &SliceHessian,
    basis: &SliceBasis,
) -> Result<Vec<(String, Mat)>> {
    let mut out = Vec::new();
    for (label, _, start, len) in &basis.l_sectors {
        // restricted symplectic form on the sector
        let mut w = Mat::zeros(*len, *len);
        for a in 0..*len {
            for b in 0..*len {
                let mut acc = 0.0;
                for i in 0..omega_full.n_rows {
                    let va = basis.vectors[start + a][i];
                    if va == 0.0 {
                        continue;
                    }
                    for j in 0..omega_full.n_cols {
                        acc += va * omega_full[(i, j)] * basis.vectors[start + b][j];
                    }
                }
                w[(a, b)] = acc;
            }
        }
        let mut q = Mat::zeros(*len, *len);
        for a in 0..*len {
            for b in 0..*len {
                q[(a, b)] = hess.full[(start + a, start + b)];
            }
        }
        let l = w.solve_mat(&q).ok_or_else(|| {
            Error::SymmetryBasis(format!("restricted symplectic form is singular on {label}"))
        })?;
        out.push((label.clone(), l));
    }
    Ok(out)
}

/// Classify from the block eigendata.
pub fn classify(
    hessian: &SliceHessian,
    linearization: &[(String, Mat)],
    xi: f64,
    tol_rel: f64,
) -> Result<StabilityVerdict> {
    let hessian_eigs = hessian.eigenvalues()?;
    if hessian_eigs.is_empty() {
        return Ok(StabilityVerdict {
            kind: VerdictKind::LyapunovStable,
            hessian_eigs,
            linearization_eigs: Vec::new(),
            tolerance_used: tol_rel,
            xi,
            note: Some("slice is empty: the configuration is rigid".into()),
        });
    }
    let scale = hessian_eigs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = tol_rel * scale.max(1.0);

    let mut spectra: Vec<GenSpectrum> = Vec::new();
    for (_, l) in linearization {
        spectra.push(gen_eig(l)?);
    }
    let linearization_eigs: Vec<(f64, f64)> = spectra
        .iter()
        .flat_map(|s| s.eigenvalues.iter().map(|z| (z.re, z.im)))
        .collect();

    let near_zero = hessian_eigs.iter().any(|v| v.abs() < tol);
    if near_zero {
        return Ok(StabilityVerdict {
            kind: VerdictKind::Degenerate,
            hessian_eigs,
            linearization_eigs,
            tolerance_used: tol_rel,
            xi,
            note: Some(
                "a slice Hessian eigenvalue vanishes within tolerance; the energy method is \
                 inconclusive and higher-order analysis would be required"
                    .into(),
            ),
        });
    }
    let definite = hessian_eigs.iter().all(|v| *v > 0.0) || hessian_eigs.iter().all(|v| *v < 0.0);
    if definite {
        return Ok(StabilityVerdict {
            kind: VerdictKind::LyapunovStable,
            hessian_eigs,
            linearization_eigs,
            tolerance_used: tol_rel,
            xi,
            note: None,
        });
    }
    let scale_l = spectra.iter().map(|s| s.max_abs()).fold(0.0f64, f64::max);
    let max_re = spectra
        .iter()
        .map(|s| s.max_real_part())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_re > tol_rel * scale_l.max(1.0) {
        return Ok(StabilityVerdict {
            kind: VerdictKind::LinearlyUnstable,
            hessian_eigs,
            linearization_eigs,
            tolerance_used: tol_rel,
            xi,
            note: None,
        });
    }
    if spectra.iter().all(|s| s.semisimple) {
        Ok(StabilityVerdict {
            kind: VerdictKind::Elliptic,
            hessian_eigs,
            linearization_eigs,
            tolerance_used: tol_rel,
            xi,
            note: Some("spectrally stable but the Hessian is indefinite".into()),
        })
    } else {
        Ok(StabilityVerdict {
            kind: VerdictKind::Degenerate,
            hessian_eigs,
            linearization_eigs,
            tolerance_used: tol_rel,
            xi,
            note: Some("repeated imaginary eigenvalue with a defective block".into()),
        })
    }
}

/// Full numeric analysis of a ring configuration.
pub fn analyze(sys: &VortexSystem) -> Result<StabilityReport> {
    analyze_with_tol(sys, DEFAULT_TOL_REL)
}

pub fn analyze_with_tol(sys: &VortexSystem, tol_rel: f64) -> Result<StabilityReport> {
    let chart = Chart::detect(sys)?;
    let coords = chart.coords(sys);
    let xi = ring_xi(sys, &chart)?;
    let (q, _) = augmented_hessian_inner(&chart, &coords, xi)?;
    let basis = slice_basis_inner(&chart, &coords)?;
    let hessian = project_blocks(&q, &basis)?;
    let omega = chart.omega_matrix(&coords);
    let linearization = linearization_sectors(&omega, &hessian, &basis)?;
    let verdict = classify(&hessian, &linearization, xi, tol_rel)?;
    Ok(StabilityReport {
        verdict,
        basis,
        hessian,
        linearization,
        xi,
        n_ring: chart.ring.len(),
    })
}

// ---------------------------------------------------------------------------
// closed forms
// ---------------------------------------------------------------------------

fn verdict_only(kind: VerdictKind, xi: f64, note: Option<String>) -> StabilityVerdict {
    StabilityVerdict {
        kind,
        hessian_eigs: Vec::new(),
        linearization_eigs: Vec::new(),
        tolerance_used: 0.0,
        xi,
        note,
    }
}

/// Width of the equality band around closed-form boundaries.
const BOUNDARY_BAND: f64 = 1e-12;

/// Closed-form verdict for the planar ring, with (`Some(λ)`) or without a
/// central vortex. Boundary equalities return `Degenerate`: the theorems
/// use strict inequalities.
pub fn closed_form_planar(n: usize, lambda: Option<f64>) -> Result<StabilityVerdict> {
    if n < 3 {
        return Err(Error::Config(
            "planar ring classification needs n >= 3".into(),
        ));
    }
    let nf = n as f64;
    let Some(lam) = lambda else {
        // bare ring: stable up to the heptagon, unstable beyond
        let kind = if n <= 7 {
            VerdictKind::LyapunovStable
        } else {
            VerdictKind::LinearlyUnstable
        };
        let note = (n == 7).then(|| {
            "the heptagon's stability is not decided by the quadratic energy method".to_string()
        });
        return Ok(verdict_only(kind, (nf - 1.0) / 4.0, note));
    };
    let xi = (nf - 1.0 + 2.0 * lam) / 4.0;
    let upper = (nf - 1.0) * (nf - 1.0) / 4.0;
    if n == 3 {
        let kind = if (lam).abs() < BOUNDARY_BAND || (lam - 1.0).abs() < BOUNDARY_BAND {
            VerdictKind::Degenerate
        } else if lam > 0.0 && lam < 1.0 {
            VerdictKind::LyapunovStable
        } else if lam < 0.0 {
            VerdictKind::Elliptic
        } else {
            VerdictKind::LinearlyUnstable
        };
        return Ok(verdict_only(kind, xi, None));
    }
    let eps = if n % 2 == 0 { 1.0 } else { 0.0 };
    let lower = (nf * nf - 8.0 * nf + 7.0 + eps) / 16.0;
    let band = BOUNDARY_BAND * upper.max(1.0);
    if (lam - lower).abs() < band || (lam - upper).abs() < band || lam.abs() < band {
        return Ok(verdict_only(
            VerdictKind::Degenerate,
            xi,
            Some("on a stability boundary".into()),
        ));
    }
    let kind = if lam > lower.max(0.0) && lam < upper {
        VerdictKind::LyapunovStable
    } else if lam > lower && lam < 0.0 {
        VerdictKind::Elliptic
    } else {
        VerdictKind::LinearlyUnstable
    };
    Ok(verdict_only(kind, xi, None))
}

/// Closed-form verdict for the spherical ring of `n` identical vortices at
/// colatitude `theta0`.
pub fn closed_form_sphere_ring(n: usize, theta0: f64) -> Result<StabilityVerdict> {
    if n < 2 {
        return Err(Error::Config(
            "sphere ring classification needs n >= 2".into(),
        ));
    }
    let c2 = theta0.cos().powi(2);
    let kind = match n {
        2 | 3 => VerdictKind::LyapunovStable,
        4 | 5 | 6 => {
            let threshold = match n {
                4 => 1.0 / 3.0,
                5 => 0.5,
                _ => 0.8,
            };
            if (c2 - threshold).abs() < BOUNDARY_BAND {
                VerdictKind::Degenerate
            } else if c2 > threshold {
                VerdictKind::LyapunovStable
            } else {
                VerdictKind::LinearlyUnstable
            }
        }
        _ => VerdictKind::LinearlyUnstable,
    };
    Ok(verdict_only(kind, 0.0, None))
}

/// Closed-form verdict for the spherical ring with a polar vortex of
/// strength `lambda`. The underlying theorem leaves a gap: configurations
/// proven neither stable nor spectrally unstable report `Degenerate` with a
/// `theorem-gap` note (numerically these come out elliptic).
pub fn closed_form_sphere_ring_polar(
    n: usize,
    theta0: f64,
    lambda: f64,
) -> Result<StabilityVerdict> {
    if n < 2 {
        return Err(Error::Config(
            "polar-ring classification needs n >= 2".into(),
        ));
    }
    let nf = n as f64;
    let c = theta0.cos();
    if (nf * c + lambda).abs() < 1e-12 {
        return Err(Error::ZeroMomentum(format!(
            "total momentum N cosθ0 + λ = {:.3e} vanishes",
            nf * c + lambda
        )));
    }
    let s2 = theta0.sin().powi(2);
    if n == 2 {
        let e = (1.0 + 2.0 * c) * ((1.0 + c).powi(2) * lambda + c * (2.0 + 3.0 * c));
        let kind = if e.abs() < BOUNDARY_BAND {
            VerdictKind::Degenerate
        } else if e < 0.0 {
            VerdictKind::LyapunovStable
        } else {
            VerdictKind::LinearlyUnstable
        };
        return Ok(verdict_only(kind, 0.0, None));
    }
    let a = (nf * c - nf + 2.0) * (1.0 + c).powi(2);
    let lam1 = (nf - 1.0) * c * (nf * s2 + 2.0 * (nf - 1.0) * c) / a;
    let spectral_rhs = (nf * s2 + 4.0 * (nf - 1.0) * c).powi(2);
    if n == 3 {
        let spec_unstable = 8.0 * a * lambda > spectral_rhs;
        let lyap = a * lambda * (lambda + nf * c) * (lambda - lam1) < 0.0;
        let kind = if (8.0 * a * lambda - spectral_rhs).abs() < BOUNDARY_BAND {
            VerdictKind::Degenerate
        } else if spec_unstable {
            VerdictKind::LinearlyUnstable
        } else if lyap {
            VerdictKind::LyapunovStable
        } else {
            return Ok(verdict_only(
                VerdictKind::Degenerate,
                0.0,
                Some("theorem-gap: spectrally stable but not energy-certified".into()),
            ));
        };
        return Ok(verdict_only(kind, 0.0, None));
    }
    let c_n = if n % 2 == 0 {
        nf * nf / 4.0
    } else {
        (nf * nf - 1.0) / 4.0
    };
    let lam0 = (c_n - (nf - 1.0) * (1.0 + c * c)) / (1.0 + c).powi(2);
    let on_boundary = (lambda - lam0).abs() < BOUNDARY_BAND
        || (8.0 * a * lambda - spectral_rhs).abs() < BOUNDARY_BAND
        || (a * lambda * (lambda + nf * c) * (lambda - lam1)).abs() < BOUNDARY_BAND;
    if on_boundary {
        return Ok(verdict_only(
            VerdictKind::Degenerate,
            0.0,
            Some("on a stability boundary".into()),
        ));
    }
    let spec_unstable = lambda < lam0 || 8.0 * a * lambda > spectral_rhs;
    if spec_unstable {
        return Ok(verdict_only(VerdictKind::LinearlyUnstable, 0.0, None));
    }
    let lyap = lambda > lam0 && a * lambda * (lambda + nf * c) * (lambda - lam1) < 0.0;
    if lyap {
        Ok(verdict_only(VerdictKind::LyapunovStable, 0.0, None))
    } else {
        Ok(verdict_only(
            VerdictKind::Degenerate,
            0.0,
            Some("theorem-gap: spectrally stable but not energy-certified".into()),
        ))
    }
}

/// Direct evaluation of `Σ_{j=1}^{n-1} cos(2πℓj/n) / sin²(πj/n)`.
/// Closed form: `(n² - 1)/3 - 2ℓ(n - ℓ)`.
pub fn trig_sum(n: usize, ell: usize) -> Result<f64> {
    if ell == 0 || ell >= n {
        return Err(Error::Config(format!(
            "trig_sum needs 1 <= ell < n, got ell={ell}, n={n}"
        )));
    }
    let nf = n as f64;
    Ok((1..n)
        .map(|j| {
            let jf = j as f64;
            (2.0 * PI * ell as f64 * jf / nf).cos() / (PI * jf / nf).sin().powi(2)
        })
        .sum())
}

// ---------------------------------------------------------------------------
// closed-form reference data for the ring-with-center block analysis
// ---------------------------------------------------------------------------

/// Angular-mode diagonal entry `N ℓ (N-ℓ)/2`.
pub fn ring_mode_phi(n: usize, ell: usize) -> f64 {
    let nf = n as f64;
    nf * ell as f64 * (nf - ell as f64) / 2.0
}

/// Radial-mode diagonal entry `(N/2)(-(ℓ-1)(N-ℓ-1) + N-1 + 4λ)`.
pub fn ring_mode_theta(n: usize, ell: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    let lf = ell as f64;
    nf / 2.0 * (-(lf - 1.0) * (nf - lf - 1.0) + nf - 1.0 + 4.0 * lambda)
}

/// Ring-to-center coupling magnitude `N λ √(N/2)`.
pub fn ring_center_coupling(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    nf * lambda * (nf / 2.0).sqrt()
}

/// Center diagonal entry `N ξ_blk λ / 2` with `ξ_blk = N - 1 + 2λ`.
pub fn ring_center_diagonal(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0 + 2.0 * lambda) * lambda / 2.0
}

/// Determinant of the 3x3 mixed mode-1/center block:
/// `-N³ λ (λ + (N-1)/2)(λ - (N-1)²/4)`.
pub fn ring_block_det(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    -nf.powi(3) * lambda * (lambda + (nf - 1.0) / 2.0) * (lambda - (nf - 1.0).powi(2) / 4.0)
}

/// The full linearization spectrum of the planar ring with central vortex
/// at block scale: `± i (N-1+2λ)` once, `± sqrt(4λ - (N-1)²)` twice, and
/// `± i (2/N) sqrt(λθ(ℓ) λφ(ℓ))` with multiplicity 2 for `ℓ < N/2` and 1
/// for `ℓ = N/2`.
pub fn ring_block_spectrum(n: usize, lambda: Option<f64>) -> Vec<Complex64> {
    let nf = n as f64;
    let mut out = Vec::new();
    let lam = lambda.unwrap_or(0.0);
    if lambda.is_some() {
        let xi_blk = nf - 1.0 + 2.0 * lam;
        out.push(Complex64::new(0.0, xi_blk));
        out.push(Complex64::new(0.0, -xi_blk));
    }
    let disc = 4.0 * lam - (nf - 1.0).powi(2);
    let root = Complex64::new(disc.max(0.0).sqrt(), (-disc).max(0.0).sqrt());
    // the mode-1 pair is double with or without the central vortex
    for _ in 0..2 {
        out.push(root);
        out.push(-root);
    }
    for ell in 2..=n / 2 {
        let prod = ring_mode_theta(n, ell, lam) * ring_mode_phi(n, ell);
        let z = if prod >= 0.0 {
            Complex64::new(0.0, 2.0 / nf * prod.sqrt())
        } else {
            Complex64::new(2.0 / nf * (-prod).sqrt(), 0.0)
        };
        let mult = if 2 * ell == n { 1 } else { 2 };
        for _ in 0..mult {
            out.push(z);
            out.push(-z);
        }
    }
    out
}
