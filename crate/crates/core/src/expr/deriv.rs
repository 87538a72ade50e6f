//! Symbolic differentiation.
//!
//! Every node differentiates to a tree built from ordinary DSL nodes, so
//! derivatives print, re-parse, and differentiate again. Bump and plateau
//! nodes use their closed forms: with u the offset from the center,
//!
//! ```text
//! d/dx bump = bump * (-2 r² u) / (r² - u²)²
//! ```
//!
//! The rational factor is written with a plain `x - c` offset. That is only
//! valid near the support, which is fine when the support stays inside
//! `(0, 1)`: everywhere else the bump factor is exactly zero and the product
//! short-circuits. When the support crosses the seam, the derivative is laid
//! out piecewise with the offset constant shifted per piece.

use super::builder::{
    add, constant_node, div, mul, neg, offset_node, pow, segments_to_piecewise, sub, Segment,
};
use super::{Node, VectorFieldExpr};
use crate::circle::wrap;

/// Exact symbolic derivative as a new expression.
pub fn differentiate(f: &VectorFieldExpr) -> VectorFieldExpr {
    VectorFieldExpr::from_node(d(f.root()))
}

fn d(node: &Node) -> Node {
    match node {
        Node::Const(_) => Node::Const(0.0),
        Node::Var => Node::Const(1.0),
        Node::Neg(e) => neg(d(e)),
        Node::Add(a, b) => add(d(a), d(b)),
        Node::Sub(a, b) => sub(d(a), d(b)),
        Node::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Node::Div(a, b) => div(
            sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
            pow((**b).clone(), 2),
        ),
        Node::Pow(e, n) => {
            if *n == 0 {
                Node::Const(0.0)
            } else {
                mul(
                    mul(constant_node(*n as f64), pow((**e).clone(), n - 1)),
                    d(e),
                )
            }
        }
        Node::Sin(e) => mul(Node::Cos(e.clone()), d(e)),
        Node::Cos(e) => neg(mul(Node::Sin(e.clone()), d(e))),
        Node::Exp(e) => mul(Node::Exp(e.clone()), d(e)),
        Node::Bump { center, radius } => bump_derivative(*center, *radius),
        Node::Plateau { a, b, margin } => plateau_derivative(*a, *b, *margin),
        Node::Piecewise(pieces) => {
            Node::Piecewise(pieces.iter().map(|(arc, e)| (*arc, d(e))).collect())
        }
    }
}

/// `bump(c, r) * (-2 r² (x - c)) / (r² - (x - c)²)²` with `c` shifted by
/// `shift` to keep the raw offset correct on a wrapped piece.
fn bump_slope_product(center: f64, radius: f64, shift: f64) -> Node {
    let c = center + shift;
    let r2 = radius * radius;
    let u = offset_node(c);
    let rational = div(
        mul(constant_node(2.0 * r2), u.clone()),
        pow(sub(constant_node(r2), pow(u, 2)), 2),
    );
    neg(mul(
        Node::Bump {
            center: wrap(center).position(),
            radius,
        },
        rational,
    ))
}

fn bump_derivative(center: f64, radius: f64) -> Node {
    let c = wrap(center).position();
    if c - radius >= 0.0 && c + radius <= 1.0 {
        bump_slope_product(c, radius, 0.0)
    } else {
        // Support crosses the seam; lay the product out piecewise.
        segments_to_piecewise(vec![Segment::new(c - radius, c + radius, move |shift| {
            bump_slope_product(c, radius, shift)
        })])
    }
}

fn plateau_derivative(a: f64, b: f64, margin: f64) -> Node {
    let rho = margin / 2.0;
    let rise_center = a - rho;
    let fall_center = b + rho;
    // Only the two ramps have nonzero slope; each is half of a bump of
    // radius m/2 centered at the inner seam.
    let rise = Segment::new(a - margin, a - rho, move |shift| {
        bump_slope_product(rise_center, rho, shift)
    });
    let fall = Segment::new(b + rho, b + margin, move |shift| {
        bump_slope_product(fall_center, rho, shift)
    });
    segments_to_piecewise(vec![rise, fall])
}

#[cfg(test)]
mod tests {
    use crate::expr::{differentiate, parse, VectorFieldExpr};

    /// Central finite differences; the independent check for every symbolic
    /// derivative in this module.
    pub fn central_diff(f: &VectorFieldExpr, x: f64, h: f64) -> f64 {
        (f.eval(x + h) - f.eval(x - h)) / (2.0 * h)
    }

    /// Richardson-refined central differences (five-point). The plain
    /// quotient at the base step carries ~1e-6 truncation on steep bump
    /// flanks; one extrapolation removes it.
    pub fn refined_central_diff(f: &VectorFieldExpr, x: f64, h: f64) -> f64 {
        (4.0 * central_diff(f, x, h / 2.0) - central_diff(f, x, h)) / 3.0
    }

    fn assert_derivative_matches(src: &str, avoid: &[f64], tol: f64) {
        let f = parse(src).unwrap();
        let h = 1e-5;
        let mut checked = 0;
        for i in 0..1000 {
            let x = (i as f64 + 0.5) / 1000.0;
            if avoid.iter().any(|a| (x - a).abs() < 3.0 * h) {
                continue;
            }
            let sym = f.eval_deriv(x);
            let num = refined_central_diff(&f, x, h);
            assert!(
                (sym - num).abs() <= tol,
                "{src}: at x = {x}, symbolic {sym} vs numeric {num}"
            );
            checked += 1;
        }
        assert!(checked > 900);
    }

    #[test]
    fn chain_rule_on_sin() {
        let f = parse("sin(2*pi*x)").unwrap();
        let d = differentiate(&f);
        let tau = 2.0 * std::f64::consts::PI;
        for i in 0..50 {
            let x = i as f64 / 50.0;
            assert!((d.eval(x) - tau * (tau * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_derivative_is_zero() {
        let f = parse("4").unwrap();
        assert_eq!(differentiate(&f).eval(0.3), 0.0);
    }

    #[test]
    fn bump_derivative_matches_finite_differences() {
        // Interior points of the support; the oracle and tolerance follow the
        // derivative check used everywhere else.
        let f = parse("bump(x; 0.5, 0.1)").unwrap();
        let h = 1e-5;
        for i in 1..1000 {
            let x = 0.4 + 0.2 * i as f64 / 1000.0;
            let sym = f.eval_deriv(x);
            let num = refined_central_diff(&f, x, h);
            assert!((sym - num).abs() < 1e-6, "x = {x}: {sym} vs {num}");
        }
    }

    #[test]
    fn wrapped_bump_derivative_is_correct_across_seam() {
        let f = parse("bump(x; 0.05, 0.1)").unwrap();
        for x in [0.96, 0.99, 0.0, 0.01, 0.05, 0.1, 0.14] {
            let sym = f.eval_deriv(x);
            let num = central_diff(&f, x, 1e-6);
            assert!((sym - num).abs() < 1e-5, "x = {x}: {sym} vs {num}");
        }
        // Odd symmetry of the slope about the wrapped center.
        assert!((f.eval_deriv(0.05 + 0.04) + f.eval_deriv(0.05 - 0.04)).abs() < 1e-9);
    }

    #[test]
    fn plateau_derivative_vanishes_on_flat_top() {
        let f = parse("plateau(x; 0.4, 0.6, 0.1)").unwrap();
        assert_eq!(f.eval_deriv(0.5), 0.0);
        assert_eq!(f.eval_deriv(0.36), 0.0);
        assert_eq!(f.eval_deriv(0.2), 0.0);
        assert!(f.eval_deriv(0.32) > 0.0);
        assert!(f.eval_deriv(0.68) < 0.0);
    }

    #[test]
    fn mixed_trees_match_finite_differences() {
        assert_derivative_matches("x^3 - 2*x + 1", &[], 1e-6);
        assert_derivative_matches("sin(2*pi*x) * cos(2*pi*x)", &[], 1e-6);
        assert_derivative_matches("exp(x) / (1 + x^2)", &[], 1e-6);
        assert_derivative_matches("plateau(x; 0.4, 0.6, 0.1)", &[0.3, 0.35, 0.65, 0.7], 1e-6);
    }

    #[test]
    fn derivative_trees_roundtrip_through_text() {
        for src in [
            "bump(x; 0.5, 0.1)",
            "bump(x; 0.05, 0.1)",
            "plateau(x; 0.4, 0.6, 0.1)",
            "sin(2*pi*x)^3",
        ] {
            let f = parse(src).unwrap();
            let d = differentiate(&f);
            let reparsed = parse(&d.to_canonical_text()).unwrap();
            assert_eq!(d.root(), reparsed.root(), "derivative of {src}");
        }
    }

    #[test]
    fn second_derivatives_evaluate() {
        let f = parse("bump(x; 0.5, 0.1)").unwrap();
        let d2 = differentiate(f.derivative());
        // Negative curvature at the peak, finite everywhere.
        assert!(d2.eval(0.5) < 0.0);
        for i in 0..=200 {
            assert!(d2.eval(i as f64 / 200.0).is_finite());
        }
    }

    #[test]
    fn linearity_after_canonicalization() {
        let e1 = parse("sin(2*pi*x)").unwrap();
        let e2 = parse("x^2 + 1").unwrap();
        let combined = parse("3 * sin(2*pi*x) + (x^2 + 1)").unwrap();
        let lhs = differentiate(&combined);
        let rhs = parse(&format!(
            "3 * ({}) + ({})",
            differentiate(&e1).to_canonical_text(),
            differentiate(&e2).to_canonical_text()
        ))
        .unwrap();
        // Node-for-node equality after the identity folding the builders do.
        assert_eq!(lhs.root(), rhs.root());
    }
}
