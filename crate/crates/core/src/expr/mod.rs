//! Expression trees for vector fields on the circle.
//!
//! A field is written in a small DSL (see [`parse`]) and held as an immutable
//! tree. Trees evaluate pointwise, differentiate symbolically, pretty-print
//! to canonical text that re-parses to the identical tree, and can be checked
//! for C¹ smoothness across seams and piece boundaries.
//!
//! Two evaluation conventions matter:
//!
//! * [`VectorFieldExpr::eval`] wraps its argument into `[0, 1)` first; this is
//!   the public, periodic view of the field.
//! * `eval_raw` (crate-internal) leaves the variable unwrapped so that the
//!   smoothness checks can compare the two sides of the seam at 0 ≡ 1.
//!   Bump, plateau, and piecewise nodes wrap internally either way.
//!
//! Multiplication short-circuits on an exactly-zero factor. Fields in this
//! domain routinely pair a polynomial that vanishes at a point with a factor
//! that oscillates or diverges there (`x^5 * sin(1/x^3)` at 0); the
//! short-circuit makes such products evaluate to their continuous limit
//! instead of NaN.

pub(crate) mod builder;
mod c1;
mod deriv;
mod parser;
mod printer;

pub use builder::{add_scaled, constant, difference, scale};
pub use c1::{validate_c1, BreakpointCheck, C1Report, DEFAULT_C1_TOL};
pub use deriv::differentiate;
pub use parser::parse;

use crate::circle::{signed_offset, wrap};
use std::sync::OnceLock;

/// Exponents below this underflow `exp` to zero; clamping keeps bump
/// supports numerically sharp.
const EXP_UNDERFLOW: f64 = -745.0;

/// One piece of a piecewise definition: the half-open interval
/// `[start, end)` inside `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PieceArc {
    pub start: f64,
    pub end: f64,
}

/// Expression node. `Bump` and `Plateau` are the compactly supported
/// primitives; both wrap around the seam at 0 ≡ 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    /// Integer power of a subexpression.
    Pow(Box<Node>, i32),
    Sin(Box<Node>),
    Cos(Box<Node>),
    Exp(Box<Node>),
    /// `exp(-r^2 / (r^2 - u^2))` on the open arc of radius `radius` around
    /// `center` (u is the circular offset from the center), zero outside.
    /// Peak value is e⁻¹ at the center.
    Bump {
        center: f64,
        radius: f64,
    },
    /// Flat-topped bump: e⁻¹ on `[a - m/2, b + m/2]`, zero outside
    /// `(a - m, b + m)`, joined by half-bump ramps of radius `m/2`. C¹ but
    /// not C² at the two inner seams. `b` may exceed 1 to describe an arc
    /// that crosses the seam.
    Plateau {
        a: f64,
        b: f64,
        margin: f64,
    },
    /// Pieces must partition `[0, 1)` exactly, sorted by start.
    Piecewise(Vec<(PieceArc, Node)>),
}

/// A parsed, validated, symbolically differentiable vector field on S¹.
#[derive(Debug)]
pub struct VectorFieldExpr {
    root: Node,
    source: String,
    deriv: OnceLock<Box<VectorFieldExpr>>,
}

impl Clone for VectorFieldExpr {
    fn clone(&self) -> Self {
        VectorFieldExpr {
            root: self.root.clone(),
            source: self.source.clone(),
            deriv: OnceLock::new(),
        }
    }
}

impl PartialEq for VectorFieldExpr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl VectorFieldExpr {
    pub(crate) fn from_node(root: Node) -> Self {
        let source = printer::print(&root);
        VectorFieldExpr {
            root,
            source,
            deriv: OnceLock::new(),
        }
    }

    pub(crate) fn from_parse(root: Node, source: String) -> Self {
        VectorFieldExpr {
            root,
            source,
            deriv: OnceLock::new(),
        }
    }

    /// The text this expression was parsed from (or its canonical form, for
    /// programmatically built trees).
    pub fn source_text(&self) -> &str {
        &self.source
    }

    /// Canonical text; re-parsing it yields an identical tree.
    pub fn to_canonical_text(&self) -> String {
        printer::print(&self.root)
    }

    pub(crate) fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates the field at `x`, wrapped into `[0, 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        eval_node(&self.root, wrap(x).position())
    }

    /// Seam-aware evaluation at an unwrapped coordinate. At `x = 1.0` a
    /// piecewise tree evaluates its final piece, giving the left-limit value
    /// at the seam.
    pub(crate) fn eval_raw(&self, x: f64) -> f64 {
        eval_node(&self.root, x)
    }

    /// The symbolic derivative, built once and cached.
    pub fn derivative(&self) -> &VectorFieldExpr {
        self.deriv
            .get_or_init(|| Box::new(differentiate(self)))
            .as_ref()
    }

    /// Evaluates the symbolic derivative at `x` (same tree walk as
    /// `eval(differentiate(f), x)`).
    pub fn eval_deriv(&self, x: f64) -> f64 {
        self.derivative().eval(x)
    }

    pub(crate) fn eval_deriv_raw(&self, x: f64) -> f64 {
        self.derivative().eval_raw(x)
    }

    /// Locations where smoothness can genuinely break: piecewise boundaries
    /// and plateau ramp seams, wrapped into `[0, 1)` and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        collect_breakpoints(&self.root, &mut out);
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        out
    }

    /// Probes evaluation on a uniform grid and reports the first non-finite
    /// value, if any.
    pub fn check_finite(&self, samples: usize) -> crate::error::Result<()> {
        for i in 0..=samples {
            let x = i as f64 / samples as f64;
            let v = self.eval_raw(x);
            if !v.is_finite() {
                return Err(crate::error::Error::NonFinite {
                    x,
                    context: "field evaluation".into(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn eval_node(node: &Node, x: f64) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var => x,
        Node::Neg(e) => -eval_node(e, x),
        Node::Add(a, b) => eval_node(a, x) + eval_node(b, x),
        Node::Sub(a, b) => eval_node(a, x) - eval_node(b, x),
        Node::Mul(a, b) => {
            let l = eval_node(a, x);
            if l == 0.0 {
                return 0.0;
            }
            let r = eval_node(b, x);
            if r == 0.0 {
                return 0.0;
            }
            l * r
        }
        Node::Div(a, b) => eval_node(a, x) / eval_node(b, x),
        Node::Pow(e, n) => eval_node(e, x).powi(*n),
        Node::Sin(e) => eval_node(e, x).sin(),
        Node::Cos(e) => eval_node(e, x).cos(),
        Node::Exp(e) => eval_node(e, x).exp(),
        Node::Bump { center, radius } => bump_value(*center, *radius, x),
        Node::Plateau { a, b, margin } => plateau_value(*a, *b, *margin, x),
        Node::Piecewise(pieces) => {
            if x == 1.0 {
                // Left limit at the seam: the piece that owns [.., 1).
                let (_, e) = pieces.last().expect("piecewise has pieces");
                return eval_node(e, 1.0);
            }
            let w = wrap(x).position();
            for (arc, e) in pieces {
                if w >= arc.start && w < arc.end {
                    return eval_node(e, w);
                }
            }
            // Unreachable for validated partitions.
            0.0
        }
    }
}

/// The scaled mollifier `exp(-r² / (r² - u²))` with circular offset `u`.
pub(crate) fn bump_value(center: f64, radius: f64, x: f64) -> f64 {
    let u = signed_offset(wrap(x).position(), wrap(center).position());
    bump_profile(u, radius)
}

pub(crate) fn bump_profile(u: f64, radius: f64) -> f64 {
    if u.abs() >= radius {
        return 0.0;
    }
    let r2 = radius * radius;
    let e = -r2 / (r2 - u * u);
    if e <= EXP_UNDERFLOW {
        0.0
    } else {
        e.exp()
    }
}

pub(crate) fn plateau_value(a: f64, b: f64, margin: f64, x: f64) -> f64 {
    let span = b - a;
    let total = span + 2.0 * margin;
    // Offset from the support's left edge, measured counterclockwise.
    let t = wrap(x - (a - margin)).position();
    if t <= 0.0 || t >= total {
        return 0.0;
    }
    let rho = margin / 2.0;
    if t < rho {
        bump_profile(t - rho, rho)
    } else if t <= rho + span + margin {
        (-1.0f64).exp()
    } else {
        bump_profile(t - (rho + span + margin), rho)
    }
}

fn collect_breakpoints(node: &Node, out: &mut Vec<f64>) {
    match node {
        Node::Const(_) | Node::Var | Node::Bump { .. } => {}
        Node::Plateau { a, b, margin } => {
            out.push(wrap(a - margin).position());
            out.push(wrap(a - margin / 2.0).position());
            out.push(wrap(b + margin / 2.0).position());
            out.push(wrap(b + margin).position());
        }
        Node::Neg(e) | Node::Sin(e) | Node::Cos(e) | Node::Exp(e) | Node::Pow(e, _) => {
            collect_breakpoints(e, out)
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            collect_breakpoints(a, out);
            collect_breakpoints(b, out);
        }
        Node::Piecewise(pieces) => {
            for (arc, e) in pieces {
                out.push(arc.start);
                collect_breakpoints(e, out);
            }
        }
    }
}

/// Validates structural invariants of a tree: bump/plateau geometry and
/// piecewise partitions.
pub(crate) fn validate_structure(node: &Node) -> crate::error::Result<()> {
    use crate::error::Error;
    match node {
        Node::Const(c) => {
            if !c.is_finite() {
                return Err(Error::InvalidField("non-finite constant".into()));
            }
        }
        Node::Var => {}
        Node::Bump { radius, .. } => {
            if !(*radius > 0.0) {
                return Err(Error::InvalidField("bump radius must be positive".into()));
            }
            if *radius >= 0.5 {
                return Err(Error::InvalidField(
                    "bump radius must be below 0.5 so the support is a proper arc".into(),
                ));
            }
        }
        Node::Plateau { a, b, margin } => {
            if !(a < b) {
                return Err(Error::InvalidField("plateau requires a < b".into()));
            }
            if !(*margin > 0.0) {
                return Err(Error::InvalidField(
                    "plateau margin must be positive".into(),
                ));
            }
            if (b - a) + 2.0 * margin >= 1.0 {
                return Err(Error::InvalidField(
                    "plateau support must be a proper arc of the circle".into(),
                ));
            }
            if *a < 0.0 || *a >= 1.0 {
                return Err(Error::InvalidField(
                    "plateau start must lie in [0, 1)".into(),
                ));
            }
        }
        Node::Neg(e) | Node::Sin(e) | Node::Cos(e) | Node::Exp(e) | Node::Pow(e, _) => {
            validate_structure(e)?
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            validate_structure(a)?;
            validate_structure(b)?;
        }
        Node::Piecewise(pieces) => {
            if pieces.is_empty() {
                return Err(Error::InvalidField(
                    "piecewise needs at least one piece".into(),
                ));
            }
            let mut sorted = pieces.clone();
            sorted.sort_by(|(a, _), (b, _)| a.start.partial_cmp(&b.start).unwrap());
            if sorted[0].0.start != 0.0 {
                return Err(Error::InvalidField("piecewise arcs must start at 0".into()));
            }
            for w in sorted.windows(2) {
                if w[0].0.end != w[1].0.start {
                    return Err(Error::InvalidField(format!(
                        "piecewise arcs must partition [0, 1) with no gap or overlap; \
                         found [{}, {}) followed by [{}, {})",
                        w[0].0.start, w[0].0.end, w[1].0.start, w[1].0.end
                    )));
                }
            }
            if sorted.last().unwrap().0.end != 1.0 {
                return Err(Error::InvalidField("piecewise arcs must end at 1".into()));
            }
            for (arc, e) in pieces {
                if !(arc.start < arc.end) {
                    return Err(Error::InvalidField("empty piecewise arc".into()));
                }
                validate_structure(e)?;
            }
        }
    }
    Ok(())
}
