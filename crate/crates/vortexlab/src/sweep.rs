//! Parameter-plane scans and frontier bisection for the ring stability
//! diagrams.
//!
//! Geostrophic scans fix the ring radius to 1 and the ring vorticity to 1,
//! treating κ as the dimensionless parameter (κR is the physical group).
//! Every (κ, λ) cell is a relative equilibrium by symmetry; its angular
//! velocity is solved from the radial equilibrium condition inside the
//! stability engine, which re-verifies the critical-point property.

use crate::builders::{build_planar_ring, build_sphere_ring};
use crate::stability::{analyze, VerdictKind};
use crate::system::Model;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Families whose diagrams the sweeps reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepFamily {
    GeostrophicRing,
    GeostrophicRingCenter,
    PlanarRingCenter,
    PlanarRing,
    SphereRing,
    SphereRingPolar,
}

impl SweepFamily {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "geostrophic-ring" => SweepFamily::GeostrophicRing,
            "geostrophic-ring-center" => SweepFamily::GeostrophicRingCenter,
            "planar-ring-center" => SweepFamily::PlanarRingCenter,
            "planar-ring" => SweepFamily::PlanarRing,
            "sphere-ring" => SweepFamily::SphereRing,
            "sphere-ring-polar" => SweepFamily::SphereRingPolar,
            other => return Err(Error::Config(format!("unknown sweep family '{other}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SweepFamily::GeostrophicRing => "geostrophic-ring",
            SweepFamily::GeostrophicRingCenter => "geostrophic-ring-center",
            SweepFamily::PlanarRingCenter => "planar-ring-center",
            SweepFamily::PlanarRing => "planar-ring",
            SweepFamily::SphereRing => "sphere-ring",
            SweepFamily::SphereRingPolar => "sphere-ring-polar",
        }
    }

    fn uses_lambda(&self) -> bool {
        matches!(
            self,
            SweepFamily::GeostrophicRingCenter
                | SweepFamily::PlanarRingCenter
                | SweepFamily::SphereRingPolar
        )
    }

    fn uses_kappa(&self) -> bool {
        matches!(
            self,
            SweepFamily::GeostrophicRing | SweepFamily::GeostrophicRingCenter
        )
    }
}

/// Fixed parameters of a scan (those not being swept).
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct FixedParams {
    pub kappa: f64,
    pub lambda: Option<f64>,
    pub theta0: f64,
}

fn build_member(
    family: SweepFamily,
    n: usize,
    kappa: f64,
    lambda: Option<f64>,
    theta0: f64,
) -> Result<crate::system::VortexSystem> {
    Ok(match family {
        SweepFamily::GeostrophicRing => {
            build_planar_ring(n, 1.0, None)?.with_model(Model::Geostrophic { kappa })?
        }
        SweepFamily::GeostrophicRingCenter => {
            let lam = lambda
                .ok_or_else(|| Error::Config("geostrophic-ring-center needs lambda".into()))?;
            build_planar_ring(n, 1.0, Some(lam))?.with_model(Model::Geostrophic { kappa })?
        }
        SweepFamily::PlanarRingCenter => {
            let lam =
                lambda.ok_or_else(|| Error::Config("planar-ring-center needs lambda".into()))?;
            build_planar_ring(n, 1.0, Some(lam))?
        }
        SweepFamily::PlanarRing => build_planar_ring(n, 1.0, None)?,
        SweepFamily::SphereRing => build_sphere_ring(n, theta0, None, 0.0)?,
        SweepFamily::SphereRingPolar => {
            let lam =
                lambda.ok_or_else(|| Error::Config("sphere-ring-polar needs lambda".into()))?;
            build_sphere_ring(n, theta0, Some(lam), 0.0)?
        }
    })
}

/// Verdict of one parameter point.
pub fn verdict_at(
    family: SweepFamily,
    n: usize,
    kappa: f64,
    lambda: Option<f64>,
    theta0: f64,
) -> Result<VerdictKind> {
    Ok(analyze(&build_member(family, n, kappa, lambda, theta0)?)?
        .verdict
        .kind)
}

/// Verdict plus the classifying scalar for frontier bisection: the smallest
/// Hessian eigenvalue in magnitude, signed positive when the form is
/// definite. It crosses zero exactly where a stable region ends, which
/// locates frontiers far more sharply than the tolerance-banded verdict.
fn classifying_scalar(
    family: SweepFamily,
    n: usize,
    kappa: f64,
    lambda: Option<f64>,
    theta0: f64,
) -> Result<(VerdictKind, f64)> {
    let report = analyze(&build_member(family, n, kappa, lambda, theta0)?)?;
    let eigs = report.hessian.eigenvalues()?;
    let scalar = if eigs.is_empty() {
        1.0
    } else {
        let min_abs = eigs.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        let definite = eigs.iter().all(|v| *v > 0.0) || eigs.iter().all(|v| *v < 0.0);
        if definite {
            min_abs
        } else {
            -min_abs
        }
    };
    Ok((report.verdict.kind, scalar))
}

/// Inclusive arithmetic grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "grid spec '{spec}' is not lo:hi:step"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|e| Error::Config(format!("bad grid value: {e}")))
            })
            .collect::<Result<_>>()?;
        let g = Grid {
            lo: nums[0],
            hi: nums[1],
            step: nums[2],
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || self.hi < self.lo {
            return Err(Error::Config(format!("invalid grid {self:?}")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 0.5).floor() as usize + 1;
        (0..count).map(|k| self.lo + k as f64 * self.step).collect()
    }
}

/// One cell of a stability diagram.
#[derive(Debug, Clone, Serialize)]
pub struct DiagramCell {
    pub kappa: f64,
    pub lambda: f64,
    pub verdict: char,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Scan a (κ, λ) grid. Non-center families collapse the λ axis to the
/// single value 0 (no central vortex); pure-plane families collapse κ.
/// Cells where the configuration cannot be built or certified (for example
/// λ = 0, a zero-strength central vortex on a stability boundary) are
/// marked `D` with a diagnostic.
pub fn sweep_plane(
    family: SweepFamily,
    n: usize,
    kappa: Grid,
    lambda: Grid,
) -> Result<Vec<DiagramCell>> {
    kappa.validate()?;
    lambda.validate()?;
    let kappas = if family.uses_kappa() {
        kappa.values()
    } else {
        vec![0.0]
    };
    let lambdas = if family.uses_lambda() {
        lambda.values()
    } else {
        vec![0.0]
    };
    let cells: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| lambdas.iter().map(move |&l| (k, l)))
        .collect();
    let out: Vec<DiagramCell> = cells
        .par_iter()
        .map(|&(k, l)| {
            let lam = family.uses_lambda().then_some(l);
            match verdict_at(family, n, k, lam, 0.0) {
                Ok(v) => DiagramCell {
                    kappa: k,
                    lambda: l,
                    verdict: v.code(),
                    diagnostic: None,
                },
                Err(e) => DiagramCell {
                    kappa: k,
                    lambda: l,
                    verdict: 'D',
                    diagnostic: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(out)
}

/// Which parameter a frontier search scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanParam {
    Kappa,
    Lambda,
    Theta0,
    /// Scan in cos²θ0; brackets and thresholds are in that variable.
    CosSqTheta0,
}

/// A located stability frontier.
#[derive(Debug, Clone, Serialize)]
pub struct Frontier {
    pub param: ScanParam,
    pub bracket: (f64, f64),
    pub threshold: f64,
    pub verdict_lo: char,
    pub verdict_hi: char,
    pub tol: f64,
}

fn eval_scan(
    family: SweepFamily,
    n: usize,
    fixed: FixedParams,
    param: ScanParam,
    value: f64,
) -> Result<(VerdictKind, f64)> {
    let (kappa, lambda, theta0) = match param {
        ScanParam::Kappa => (value, fixed.lambda, fixed.theta0),
        ScanParam::Lambda => (fixed.kappa, Some(value), fixed.theta0),
        ScanParam::Theta0 => (fixed.kappa, fixed.lambda, value),
        ScanParam::CosSqTheta0 => (fixed.kappa, fixed.lambda, value.sqrt().acos()),
    };
    classifying_scalar(family, n, kappa, lambda, theta0)
}

/// Locate a verdict change inside the bracket down to width `tol`.
///
/// When the two sides have definiteness scalars of opposite sign (any
/// frontier bounding a stable region), the bisection follows the scalar's
/// zero crossing; otherwise it falls back to halving on the verdict itself.
pub fn find_frontier(
    family: SweepFamily,
    n: usize,
    fixed: FixedParams,
    param: ScanParam,
    bracket: (f64, f64),
    tol: f64,
) -> Result<Frontier> {
    let (mut lo, mut hi) = bracket;
    let (v_lo, f_lo) = eval_scan(family, n, fixed, param, lo)?;
    let (v_hi, f_hi) = eval_scan(family, n, fixed, param, hi)?;
    if v_lo == v_hi {
        return Err(Error::NoFrontier(format!(
            "verdict {} at both ends of [{lo}, {hi}]",
            v_lo.code()
        )));
    }
    let by_scalar = f_lo * f_hi < 0.0;
    let lo_sign = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (v_mid, f_mid) = eval_scan(family, n, fixed, param, mid)?;
        let take_lo = if by_scalar {
            (f_mid > 0.0) == lo_sign && f_mid != 0.0
        } else {
            v_mid == v_lo
        };
        if take_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Frontier {
        param,
        bracket,
        threshold: 0.5 * (lo + hi),
        verdict_lo: v_lo.code(),
        verdict_hi: v_hi.code(),
        tol,
    })
}

/// CSV with columns `kappa,lambda,verdict`, cells in grid order.
pub fn write_diagram_csv<W: std::io::Write>(cells: &[DiagramCell], mut w: W) -> Result<()> {
    writeln!(w, "kappa,lambda,verdict")?;
    for c in cells {
        writeln!(w, "{:.6},{:.6},{}", c.kappa, c.lambda, c.verdict)?;
    }
    Ok(())
}

/// Companion metadata for a written diagram.
#[derive(Debug, Serialize)]
pub struct DiagramMeta<'a> {
    pub family: &'a str,
    pub n: usize,
    pub kappa: Grid,
    pub lambda: Grid,
    pub tool_version: &'a str,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::closed_form_planar;

    #[test]
    fn grid_values_inclusive() {
        let g = Grid {
            lo: 0.0,
            hi: 1.0,
            step: 0.25,
        };
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert!((v[4] - 1.0).abs() < 1e-12);
        assert!(Grid::parse("0:5:0.05").is_ok());
        assert!(Grid::parse("1:0:0.1").is_err());
    }

    #[test]
    fn kappa_zero_column_matches_planar_closed_form() {
        let n = 5;
        let lambda = Grid {
            lo: -1.3,
            hi: 4.8,
            step: 0.37,
        };
        let cells = sweep_plane(
            SweepFamily::GeostrophicRingCenter,
            n,
            Grid {
                lo: 0.0,
                hi: 0.0,
                step: 1.0,
            },
            lambda,
        )
        .unwrap();
        for c in &cells {
            let closed = closed_form_planar(n, Some(c.lambda)).unwrap();
            assert_eq!(
                c.verdict,
                closed.kind.code(),
                "λ = {}: sweep {} vs closed {}",
                c.lambda,
                c.verdict,
                closed.kind.code()
            );
        }
    }

    #[test]
    fn deterministic_output() {
        let run = || {
            let cells = sweep_plane(
                SweepFamily::GeostrophicRingCenter,
                4,
                Grid {
                    lo: 0.0,
                    hi: 2.0,
                    step: 0.5,
                },
                Grid {
                    lo: -1.0,
                    hi: 2.0,
                    step: 0.5,
                },
            )
            .unwrap();
            let mut buf = Vec::new();
            write_diagram_csv(&cells, &mut buf).unwrap();
            buf
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn planar_center_frontier_at_upper_bound() {
        // C_5(R,p): the central-vortex frontier sits at (N-1)²/4 = 4
        let f = find_frontier(
            SweepFamily::PlanarRingCenter,
            5,
            FixedParams::default(),
            ScanParam::Lambda,
            (3.0, 5.0),
            1e-7,
        )
        .unwrap();
        assert!(
            (f.threshold - 4.0).abs() < 1e-6,
            "threshold {}",
            f.threshold
        );
        assert_eq!((f.verdict_lo, f.verdict_hi), ('S', 'U'));
    }

    #[test]
    fn no_frontier_error() {
        let r = find_frontier(
            SweepFamily::PlanarRingCenter,
            5,
            FixedParams::default(),
            ScanParam::Lambda,
            (1.0, 2.0),
            1e-4,
        );
        assert!(matches!(r, Err(Error::NoFrontier(_))));
    }

    #[test]
    fn refinement_flips_only_near_frontier() {
        // around the N = 6 geostrophic ring frontier at κ* ≈ 1.28
        let coarse = sweep_plane(
            SweepFamily::GeostrophicRing,
            6,
            Grid {
                lo: 0.8,
                hi: 1.8,
                step: 0.2,
            },
            Grid {
                lo: 0.0,
                hi: 0.0,
                step: 1.0,
            },
        )
        .unwrap();
        let fine = sweep_plane(
            SweepFamily::GeostrophicRing,
            6,
            Grid {
                lo: 0.8,
                hi: 1.8,
                step: 0.1,
            },
            Grid {
                lo: 0.0,
                hi: 0.0,
                step: 1.0,
            },
        )
        .unwrap();
        for c in &coarse {
            let same = fine
                .iter()
                .find(|f| (f.kappa - c.kappa).abs() < 1e-12)
                .expect("coarse grid is a subset of the fine one");
            assert_eq!(c.verdict, same.verdict, "κ = {}", c.kappa);
        }
        // verdicts only change once across the frontier
        let codes: Vec<char> = fine.iter().map(|c| c.verdict).collect();
        let flips = codes.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1, "codes {codes:?}");
    }

    #[test]
    fn zero_lambda_cell_marked_degenerate() {
        let cells = sweep_plane(
            SweepFamily::GeostrophicRingCenter,
            4,
            Grid {
                lo: 1.0,
                hi: 1.0,
                step: 1.0,
            },
            Grid {
                lo: -0.5,
                hi: 0.5,
                step: 0.5,
            },
        )
        .unwrap();
        let zero = cells.iter().find(|c| c.lambda == 0.0).unwrap();
        assert_eq!(zero.verdict, 'D');
        assert!(zero.diagnostic.is_some());
    }
}
