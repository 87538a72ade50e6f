//! Orbit integration for ẋ = f(x) on the circle.
//!
//! Integration runs on the universal-cover lift with classical fixed-step
//! fourth-order Runge-Kutta; positions are wrapped for reporting. Backward
//! iterates integrate the reversed field.

use crate::analysis::FixedPointSet;
use crate::circle::{circ_dist, wrap, CirclePoint};
use crate::error::{Error, Result};
use crate::expr::VectorFieldExpr;
use serde::Serialize;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrbitSample {
    pub n: i64,
    pub t: f64,
    pub position: CirclePoint,
    /// Unwrapped coordinate on the universal cover.
    pub lift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Orbit {
    /// Sampling period between recorded iterates.
    pub tau: f64,
    pub samples: Vec<OrbitSample>,
    /// Net signed revolutions over the sampled span.
    pub winding: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitClass {
    ConvergesTo { point: CirclePoint },
    PeriodicWinding,
    Undecided,
}

fn rk4_step(f: &VectorFieldExpr, x: f64, h: f64) -> f64 {
    let k1 = f.eval(x);
    let k2 = f.eval(x + 0.5 * h * k1);
    let k3 = f.eval(x + 0.5 * h * k2);
    let k4 = f.eval(x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates one sampling period of ẋ = sign · f(x) from `x`.
fn advance(f: &VectorFieldExpr, sign: f64, mut x: f64, tau: f64, step: f64) -> Result<f64> {
    let n_steps = (tau / step).ceil().max(1.0) as usize;
    let h = sign * tau / n_steps as f64;
    for _ in 0..n_steps {
        x = rk4_step(f, x, h);
        if !x.is_finite() {
            return Err(Error::NonFinite {
                x,
                context: "orbit integration".into(),
            });
        }
    }
    Ok(x)
}

/// Samples the orbit through `x0` at times n·tau for n in
/// [-n_back, n_fwd].
pub fn integrate(
    f: &VectorFieldExpr,
    x0: CirclePoint,
    tau: f64,
    n_back: usize,
    n_fwd: usize,
    step: f64,
) -> Result<Orbit> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::BadArgument("sampling period must be nonzero".into()));
    }
    if !(step > 0.0) || step > tau.abs() / 10.0 {
        return Err(Error::BadArgument(
            "integration step must be positive and at most tau/10".into(),
        ));
    }

    // Negative tau samples the time-reversed iterates.
    let dir = tau.signum();
    let mut forward = Vec::with_capacity(n_fwd);
    let mut x = x0.position();
    for n in 1..=n_fwd {
        x = advance(f, dir, x, tau.abs(), step)?;
        forward.push((n as i64, x));
    }
    let mut backward = Vec::with_capacity(n_back);
    x = x0.position();
    for n in 1..=n_back {
        x = advance(f, -dir, x, tau.abs(), step)?;
        backward.push((-(n as i64), x));
    }
    backward.reverse();

    let mut samples = Vec::with_capacity(n_back + n_fwd + 1);
    for (n, lift) in backward
        .into_iter()
        .chain(std::iter::once((0, x0.position())))
        .chain(forward)
    {
        samples.push(OrbitSample {
            n,
            t: n as f64 * tau,
            position: wrap(lift),
            lift,
        });
    }

    let displacement = samples.last().unwrap().lift - samples.first().unwrap().lift;
    Ok(Orbit {
        tau,
        samples,
        winding: winding_of(displacement),
    })
}

/// Net revolutions: nearest integer, with exact halves truncated toward
/// zero (a half-turn has not completed a revolution).
fn winding_of(displacement: f64) -> i64 {
    let frac = displacement - displacement.trunc();
    if frac.abs() == 0.5 {
        displacement.trunc() as i64
    } else {
        displacement.round() as i64
    }
}

/// Decides what the forward tail of an orbit does.
pub fn classify_limit(orbit: &Orbit, fps: &FixedPointSet) -> OrbitClass {
    let forward: Vec<&OrbitSample> = orbit.samples.iter().filter(|s| s.n >= 0).collect();
    if forward.len() >= 3 {
        let tail = &forward[forward.len() - 3..];
        for p in &fps.isolated {
            if p.kind == crate::analysis::FixedPointKind::HyperbolicAttractor
                && tail
                    .iter()
                    .all(|s| circ_dist(s.position, p.location) < 1e-6)
            {
                return OrbitClass::ConvergesTo { point: p.location };
            }
        }
    }
    let no_fixed_points =
        fps.isolated.is_empty() && fps.zero_intervals.is_empty() && !fps.whole_circle_zero;
    if no_fixed_points && orbit.winding != 0 {
        return OrbitClass::PeriodicWinding;
    }
    OrbitClass::Undecided
}
