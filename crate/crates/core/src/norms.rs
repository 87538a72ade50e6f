//! C¹ norm and distance estimation.
//!
//! The norm ‖f‖₁ = sup|f| + sup|f′| is estimated on a uniform grid that
//! doubles until the estimate settles (relative change below 0.1%), then a
//! golden-section polish sharpens each supremum inside its grid cell. The
//! certificate records the grid and whether refinement converged; it is a
//! measurement, not a rigorous enclosure.

use crate::error::{Error, Result};
use crate::expr::{Node, VectorFieldExpr};
use serde::Serialize;

const GRID_START: usize = 4096;
const GRID_CAP: usize = 1 << 22;
const REFINE_REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct NormCertificate {
    /// The norm estimate: `sup_f + sup_fprime`.
    pub value: f64,
    pub sup_f: f64,
    pub sup_fprime: f64,
    pub grid_size: usize,
    /// True when doubling the grid changed the estimate by less than 0.1%.
    pub refined: bool,
    pub notes: Vec<String>,
}

/// Suprema of |f| and |f′| on the `n`-point uniform grid (both end points
/// included). Exposed so refinement monotonicity is directly testable.
pub fn grid_suprema(f: &VectorFieldExpr, n: usize) -> Result<(f64, f64, f64, f64)> {
    let mut max_f = 0.0f64;
    let mut max_d = 0.0f64;
    let mut arg_f = 0.0;
    let mut arg_d = 0.0;
    for i in 0..=n {
        let x = i as f64 / n as f64;
        let v = f.eval(x).abs();
        let d = f.eval_deriv(x).abs();
        if !v.is_finite() {
            return Err(Error::NonFinite {
                x,
                context: "norm estimation (value)".into(),
            });
        }
        if !d.is_finite() {
            return Err(Error::NonFinite {
                x,
                context: "norm estimation (derivative)".into(),
            });
        }
        if v > max_f {
            max_f = v;
            arg_f = x;
        }
        if d > max_d {
            max_d = d;
            arg_d = x;
        }
    }
    Ok((max_f, arg_f, max_d, arg_d))
}

/// Measures the C¹ norm of a field.
pub fn c1_norm(f: &VectorFieldExpr) -> Result<NormCertificate> {
    let mut n = GRID_START;
    let mut prev: Option<f64> = None;
    let mut refined = false;
    let (mut max_f, mut arg_f, mut max_d, mut arg_d);
    loop {
        let (mf, af, md, ad) = grid_suprema(f, n)?;
        max_f = mf;
        arg_f = af;
        max_d = md;
        arg_d = ad;
        let est = max_f + max_d;
        if let Some(p) = prev {
            if (est - p).abs() <= REFINE_REL_TOL * est.max(f64::MIN_POSITIVE) {
                refined = true;
                break;
            }
        }
        if n >= GRID_CAP {
            break;
        }
        prev = Some(est);
        n *= 2;
    }

    let cell = 1.0 / n as f64;
    let sup_f = golden_max(|x| f.eval(x).abs(), arg_f - cell, arg_f + cell).max(max_f);
    let sup_fprime = golden_max(|x| f.eval_deriv(x).abs(), arg_d - cell, arg_d + cell).max(max_d);

    let mut notes = Vec::new();
    if !refined {
        notes.push(format!(
            "norm estimate did not settle below {:.1}% relative change at grid {}",
            REFINE_REL_TOL * 100.0,
            n
        ));
    }
    let value = sup_f + sup_fprime;
    if let Some((scale, radius)) = as_scaled_bump(f.root()) {
        let width = 2.0 * radius;
        let e_inv = (-1.0f64).exp();
        let closed_form = scale.abs() * e_inv * (1.0 + 6.0 * e_inv / width);
        if value > closed_form {
            notes.push(format!(
                "measured norm {value:.6} exceeds the closed-form bump estimate \
                 {closed_form:.6} (support width {width}); sizing must use the \
                 measured value"
            ));
        }
    }

    Ok(NormCertificate {
        value,
        sup_f,
        sup_fprime,
        grid_size: n,
        refined,
        notes,
    })
}

/// C¹ distance: the norm of the difference tree.
pub fn c1_dist(f: &VectorFieldExpr, g: &VectorFieldExpr) -> Result<NormCertificate> {
    let diff = VectorFieldExpr::from_node(Node::Sub(
        Box::new(f.root().clone()),
        Box::new(g.root().clone()),
    ));
    c1_norm(&diff)
}

/// Whether `g` lies in the open C¹ ball of radius `eps` around `f`.
pub fn in_ball(f: &VectorFieldExpr, g: &VectorFieldExpr, eps: f64) -> Result<bool> {
    if !(eps > 0.0) {
        return Err(Error::BadArgument("ball radius must be positive".into()));
    }
    Ok(c1_dist(f, g)?.value < eps)
}

fn as_scaled_bump(node: &Node) -> Option<(f64, f64)> {
    match node {
        Node::Bump { radius, .. } => Some((1.0, *radius)),
        Node::Neg(e) => as_scaled_bump(e).map(|(s, r)| (-s, r)),
        Node::Mul(a, b) => match (&**a, &**b) {
            (Node::Const(s), inner) | (inner, Node::Const(s)) => {
                as_scaled_bump(inner).map(|(s2, r)| (s * s2, r))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Golden-section maximization of a unimodal-near-peak function.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    -golden_min(|x| -f(x), lo, hi).0
}

/// Golden-section minimization; returns (min value, argmin).
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.6180339887498949;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..70 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (f(mid).min(fc).min(fd), mid)
}

/// Minimum of `f` over `[lo, hi]`: uniform samples plus a golden polish
/// around the coarse argmin. Returns (min value, argmin).
pub(crate) fn min_on(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> (f64, f64) {
    debug_assert!(hi > lo);
    let mut best = f64::INFINITY;
    let mut arg = lo;
    for i in 0..=samples {
        let x = lo + (hi - lo) * i as f64 / samples as f64;
        let v = f(x);
        if v < best {
            best = v;
            arg = x;
        }
    }
    let cell = (hi - lo) / samples as f64;
    let (polished, px) = golden_min(&f, (arg - cell).max(lo), (arg + cell).min(hi));
    if polished < best {
        (polished, px)
    } else {
        (best, arg)
    }
}
