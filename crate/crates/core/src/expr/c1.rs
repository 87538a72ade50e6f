//! Smoothness validation: is a parsed field actually C¹ on the circle?
//!
//! Checks the seam (value and derivative identified at 0 ≡ 1) and every
//! piecewise/plateau breakpoint. Breakpoint checks compare one-sided
//! difference quotients from the two sides; each side is sharpened by
//! Richardson extrapolation over the step sequence 1e-3, 1e-4, 1e-5, and the
//! best-agreeing candidate pair decides. One-sided quotients converge slowly
//! near bump edges, which is what the extrapolation buys back.

use super::VectorFieldExpr;
use serde::Serialize;

pub const DEFAULT_C1_TOL: f64 = 1e-4;

const STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];

#[derive(Debug, Clone, Serialize)]
pub struct BreakpointCheck {
    pub location: f64,
    pub left_slope: f64,
    pub right_slope: f64,
    pub gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct C1Report {
    pub periodic_value_ok: bool,
    pub periodic_deriv_ok: bool,
    pub periodic_value_gap: f64,
    pub periodic_deriv_gap: f64,
    pub breakpoint_checks: Vec<BreakpointCheck>,
    pub overall: bool,
}

/// One-sided slope estimates at `p` from below, as (raw finest quotient,
/// two Richardson extrapolants).
fn left_candidates(f: &VectorFieldExpr, p: f64) -> [f64; 3] {
    let fp = f.eval_raw(p);
    let q: Vec<f64> = STEPS.iter().map(|h| (fp - f.eval_raw(p - h)) / h).collect();
    [q[2], (10.0 * q[1] - q[0]) / 9.0, (10.0 * q[2] - q[1]) / 9.0]
}

fn right_candidates(f: &VectorFieldExpr, p: f64) -> [f64; 3] {
    let fp = f.eval_raw(p);
    let q: Vec<f64> = STEPS.iter().map(|h| (f.eval_raw(p + h) - fp) / h).collect();
    [q[2], (10.0 * q[1] - q[0]) / 9.0, (10.0 * q[2] - q[1]) / 9.0]
}

/// Validates smoothness with the given tolerance. Failures are reported in
/// the result, never raised.
pub fn validate_c1(f: &VectorFieldExpr, tol: f64) -> C1Report {
    assert!(tol > 0.0, "tolerance must be positive");

    let v0 = f.eval_raw(0.0);
    let v1 = f.eval_raw(1.0);
    let periodic_value_gap = (v0 - v1).abs();
    let periodic_value_ok = periodic_value_gap.is_finite() && periodic_value_gap <= tol;

    let d0 = f.eval_deriv_raw(0.0);
    let d1 = f.eval_deriv_raw(1.0);
    let periodic_deriv_gap = (d0 - d1).abs();
    let periodic_deriv_ok = periodic_deriv_gap.is_finite() && periodic_deriv_gap <= tol;

    let mut breakpoint_checks = Vec::new();
    for p in f.breakpoints() {
        let (lefts, rights) = if p == 0.0 {
            // The seam: the left side lives at the top of the interval.
            (left_candidates(f, 1.0), right_candidates(f, 0.0))
        } else {
            (left_candidates(f, p), right_candidates(f, p))
        };
        // Compare like with like: raw against raw, extrapolant against
        // extrapolant, and keep whichever pairing agrees best.
        let mut best = (f64::INFINITY, lefts[0], rights[0]);
        for k in 0..3 {
            let gap = (lefts[k] - rights[k]).abs();
            if gap.is_finite() && gap < best.0 {
                best = (gap, lefts[k], rights[k]);
            }
        }
        let pass = best.0.is_finite() && best.0 <= tol;
        breakpoint_checks.push(BreakpointCheck {
            location: p,
            left_slope: best.1,
            right_slope: best.2,
            gap: best.0,
            pass,
        });
    }

    let overall =
        periodic_value_ok && periodic_deriv_ok && breakpoint_checks.iter().all(|c| c.pass);
    C1Report {
        periodic_value_ok,
        periodic_deriv_ok,
        periodic_value_gap,
        periodic_deriv_gap,
        breakpoint_checks,
        overall,
    }
}
