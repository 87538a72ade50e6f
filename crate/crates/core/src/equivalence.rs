//! Topological equivalence between two systems on the circle.
//!
//! A homeomorphism h certifies equivalence exactly when it maps the zero set
//! of the first field onto the zero set of the second and the flow
//! directions between corresponding zeros agree — matching directly when h
//! preserves orientation, reversed when it does not. Orientation is decided
//! by the winding of a lift, not by pointwise value order: the map
//! h(x) = 1/2 - x sends 0 to 1/2 and 3/4 to 3/4 yet is decreasing.
//!
//! When no homeomorphism is supplied, `build_plh` constructs the piecewise
//! linear candidate that pins corresponding zeros to each other, trying
//! every cyclic alignment and both orientations, and keeps the first one
//! that verifies.

use crate::analysis::{find_fixed_points, AnalysisOpts};
use crate::circle::{ccw_gap, circ_dist, wrap, CirclePoint};
use crate::error::{Error, Result};
use crate::expr::VectorFieldExpr;
use serde::Serialize;

pub const MATCH_TOL: f64 = 1e-6;
const MONOTONE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// A circle homeomorphism given by breakpoint pairs with linear
/// interpolation between them.
#[derive(Debug, Clone, Serialize)]
pub struct PiecewiseLinearHomeo {
    /// (x, h(x)) pairs; x strictly increasing counterclockwise, images
    /// traversing the circle monotonically in the stated orientation.
    pub breakpoints: Vec<(CirclePoint, CirclePoint)>,
    pub orientation: Orientation,
}

impl PiecewiseLinearHomeo {
    pub fn new(
        mut breakpoints: Vec<(CirclePoint, CirclePoint)>,
        orientation: Orientation,
    ) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::NotAHomeomorphism(
                "at least one breakpoint is required".into(),
            ));
        }
        breakpoints.sort_by(|a, b| a.0.position().partial_cmp(&b.0.position()).unwrap());
        for w in breakpoints.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::NotAHomeomorphism(
                    "duplicate source breakpoints".into(),
                ));
            }
            if w[0].1 == w[1].1 {
                return Err(Error::NotAHomeomorphism(
                    "duplicate image breakpoints".into(),
                ));
            }
        }
        Ok(PiecewiseLinearHomeo {
            breakpoints,
            orientation,
        })
    }

    pub fn identity() -> Self {
        PiecewiseLinearHomeo {
            breakpoints: vec![(wrap(0.0), wrap(0.0))],
            orientation: Orientation::Increasing,
        }
    }

    /// The orientation-reversing map x ↦ -x.
    pub fn reversal() -> Self {
        PiecewiseLinearHomeo {
            breakpoints: vec![(wrap(0.0), wrap(0.0))],
            orientation: Orientation::Decreasing,
        }
    }

    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        let m = self.breakpoints.len();
        if m == 1 {
            let (x0, y0) = self.breakpoints[0];
            let t = ccw_gap(x0, x);
            return match self.orientation {
                Orientation::Increasing => wrap(y0.position() + t),
                Orientation::Decreasing => wrap(y0.position() - t),
            };
        }
        // Find the segment whose source arc contains x.
        let mut k = m - 1;
        for i in 0..m {
            let a = self.breakpoints[i].0;
            let b = self.breakpoints[(i + 1) % m].0;
            let seg = ccw_gap(a, b);
            let seg = if seg == 0.0 { 1.0 } else { seg };
            if ccw_gap(a, x) < seg || x == a {
                k = i;
                break;
            }
        }
        let (xa, ya) = self.breakpoints[k];
        let (xb, yb) = self.breakpoints[(k + 1) % m];
        let seg = {
            let g = ccw_gap(xa, xb);
            if g == 0.0 {
                1.0
            } else {
                g
            }
        };
        let t = ccw_gap(xa, x) / seg;
        match self.orientation {
            Orientation::Increasing => {
                let span = {
                    let g = ccw_gap(ya, yb);
                    if g == 0.0 {
                        1.0
                    } else {
                        g
                    }
                };
                wrap(ya.position() + t * span)
            }
            Orientation::Decreasing => {
                let span = {
                    let g = ccw_gap(yb, ya);
                    if g == 0.0 {
                        1.0
                    } else {
                        g
                    }
                };
                wrap(ya.position() - t * span)
            }
        }
    }

    /// The inverse map, as the swapped breakpoint list.
    pub fn invert(&self) -> Result<Self> {
        let swapped: Vec<(CirclePoint, CirclePoint)> =
            self.breakpoints.iter().map(|&(x, y)| (y, x)).collect();
        PiecewiseLinearHomeo::new(swapped, self.orientation)
    }
}

/// A candidate equivalence: either an explicit breakpoint map or a DSL
/// expression used as the map y = wrap(h(x)).
#[derive(Debug, Clone)]
pub enum Homeo {
    Plh(PiecewiseLinearHomeo),
    Map(VectorFieldExpr),
}

impl Homeo {
    pub fn eval(&self, x: CirclePoint) -> CirclePoint {
        match self {
            Homeo::Plh(h) => h.eval(x),
            Homeo::Map(e) => wrap(e.eval(x.position())),
        }
    }

    /// Screens the candidate: monotone on a fundamental lift with winding
    /// degree ±1, sampled at 4096 points. Returns the orientation.
    pub fn orientation(&self) -> Result<Orientation> {
        let n = MONOTONE_SAMPLES;
        let mut prev = self.eval(wrap(0.0)).position();
        let mut total = 0.0;
        let mut min_step = f64::INFINITY;
        let mut max_step = f64::NEG_INFINITY;
        for i in 1..=n {
            let x = i as f64 / n as f64;
            let y = self.eval(wrap(x)).position();
            // Unwrap through the nearest image.
            let mut dy = y - prev;
            if dy > 0.5 {
                dy -= 1.0;
            } else if dy < -0.5 {
                dy += 1.0;
            }
            min_step = min_step.min(dy);
            max_step = max_step.max(dy);
            total += dy;
            prev = y;
        }
        let tol = 1e-9;
        if (total - 1.0).abs() < 0.01 && min_step >= -tol {
            Ok(Orientation::Increasing)
        } else if (total + 1.0).abs() < 0.01 && max_step <= tol {
            Ok(Orientation::Decreasing)
        } else {
            Err(Error::NotAHomeomorphism(format!(
                "winding {total:.4} with steps in [{min_step:.2e}, {max_step:.2e}]; \
                 expected a monotone map of degree +1 or -1"
            )))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceVerdict {
    pub equivalent: bool,
    pub zero_set_matched: bool,
    pub sign_conditions_ok: bool,
    pub orientation: Orientation,
    pub failure_detail: Option<String>,
}

/// Checks whether `h` is a topological equivalence carrying `f` onto `g`.
pub fn check_equivalence(
    f: &VectorFieldExpr,
    g: &VectorFieldExpr,
    h: &Homeo,
    opts: &AnalysisOpts,
) -> Result<EquivalenceVerdict> {
    let fset = find_fixed_points(f, opts)?;
    let gset = find_fixed_points(g, opts)?;
    if !fset.is_finite_isolated() || !gset.is_finite_isolated() {
        return Err(Error::UnsupportedZeroSetClass(
            "equivalence checking requires finite isolated zero sets".into(),
        ));
    }
    let orientation = h.orientation()?;
    let fz = fset.locations();
    let gz = gset.locations();

    let (zero_set_matched, match_detail) = zero_sets_match(&fz, &gz, h);
    let (sign_conditions_ok, sign_detail) = if zero_set_matched {
        sign_conditions(f, g, h, &fz, orientation)
    } else {
        (
            false,
            Some("zero sets not matched; signs not checked".into()),
        )
    };

    let equivalent = zero_set_matched && sign_conditions_ok;
    Ok(EquivalenceVerdict {
        equivalent,
        zero_set_matched,
        sign_conditions_ok,
        orientation,
        failure_detail: if equivalent {
            None
        } else {
            match_detail.or(sign_detail)
        },
    })
}

/// Greedy nearest matching of h-images onto g's zeros, then a bijectivity
/// check. Zero sets in this corpus are well separated, so greedy is enough.
fn zero_sets_match(fz: &[CirclePoint], gz: &[CirclePoint], h: &Homeo) -> (bool, Option<String>) {
    if fz.len() != gz.len() {
        return (
            false,
            Some(format!("zero counts differ: {} vs {}", fz.len(), gz.len())),
        );
    }
    if fz.is_empty() {
        return (true, None);
    }
    let mut taken = vec![false; gz.len()];
    for &z in fz {
        let image = h.eval(z);
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, &y) in gz.iter().enumerate() {
            let d = circ_dist(image, y);
            if d < best.0 {
                best = (d, j);
            }
        }
        if best.0 > MATCH_TOL {
            return (
                false,
                Some(format!(
                    "image of zero {z} lands at {image}, {0:.2e} away from the \
                     nearest target zero",
                    best.0
                )),
            );
        }
        if taken[best.1] {
            return (
                false,
                Some(format!(
                    "two zeros map onto the same target near {}",
                    gz[best.1]
                )),
            );
        }
        taken[best.1] = true;
    }
    (true, None)
}

/// Midpoint sign checks on each arc between consecutive zeros of `f`.
fn sign_conditions(
    f: &VectorFieldExpr,
    g: &VectorFieldExpr,
    h: &Homeo,
    fz: &[CirclePoint],
    orientation: Orientation,
) -> (bool, Option<String>) {
    let mids: Vec<CirclePoint> = if fz.is_empty() {
        vec![wrap(0.0)]
    } else {
        let m = fz.len();
        (0..m)
            .map(|k| {
                let a = fz[k];
                let gap = if m == 1 {
                    1.0
                } else {
                    ccw_gap(a, fz[(k + 1) % m])
                };
                wrap(a.position() + 0.5 * gap)
            })
            .collect()
    };
    for mid in mids {
        let sf = f.eval(mid.position()).signum();
        let sg = g.eval(h.eval(mid).position()).signum();
        let ok = match orientation {
            Orientation::Increasing => sf == sg,
            Orientation::Decreasing => sf == -sg,
        };
        if !ok {
            return (
                false,
                Some(format!(
                    "sign condition fails on the arc through {mid}: \
                     f has sign {sf}, g∘h has sign {sg} with {orientation:?} h"
                )),
            );
        }
    }
    (true, None)
}

/// Constructs the piecewise linear homeomorphism pinning zeros of `f` to
/// zeros of `g`, trying all cyclic alignments and both orientations in a
/// fixed order, and returning the first candidate that verifies.
pub fn build_plh(
    f: &VectorFieldExpr,
    g: &VectorFieldExpr,
    opts: &AnalysisOpts,
) -> Result<PiecewiseLinearHomeo> {
    let fset = find_fixed_points(f, opts)?;
    let gset = find_fixed_points(g, opts)?;
    if !fset.is_finite_isolated() || !gset.is_finite_isolated() {
        return Err(Error::UnsupportedZeroSetClass(
            "construction requires finite isolated zero sets".into(),
        ));
    }
    let fz = fset.locations();
    let gz = gset.locations();
    if fz.len() != gz.len() {
        return Err(Error::NoEquivalence(format!(
            "zero counts differ: {} vs {}",
            fz.len(),
            gz.len()
        )));
    }

    if fz.is_empty() {
        for candidate in [
            PiecewiseLinearHomeo::identity(),
            PiecewiseLinearHomeo::reversal(),
        ] {
            let h = Homeo::Plh(candidate.clone());
            if check_equivalence(f, g, &h, opts)?.equivalent {
                return Ok(candidate);
            }
        }
        return Err(Error::NoEquivalence(
            "zero-free fields flow in incompatible directions".into(),
        ));
    }

    let m = fz.len();
    for rot in 0..m {
        for orientation in [Orientation::Increasing, Orientation::Decreasing] {
            let pairs: Vec<(CirclePoint, CirclePoint)> = (0..m)
                .map(|k| {
                    let target = match orientation {
                        Orientation::Increasing => gz[(k + rot) % m],
                        Orientation::Decreasing => gz[(rot + m - k) % m],
                    };
                    (fz[k], target)
                })
                .collect();
            let plh = match PiecewiseLinearHomeo::new(pairs, orientation) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let h = Homeo::Plh(plh.clone());
            if h.orientation().is_err() {
                continue;
            }
            if check_equivalence(f, g, &h, opts)?.equivalent {
                return Ok(plh);
            }
        }
    }
    Err(Error::NoEquivalence(
        "no zero alignment satisfies the sign conditions".into(),
    ))
}
