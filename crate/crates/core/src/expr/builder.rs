//! Programmatic construction of expression trees.
//!
//! The binary constructors fold additive and multiplicative identities so
//! that derivative trees stay readable. Nothing here attempts real
//! simplification. Constants in built trees are kept non-negative (negation
//! goes through [`neg`]) so canonical text always re-parses to the same tree.

use super::{Node, PieceArc, VectorFieldExpr};

pub(crate) fn constant_node(c: f64) -> Node {
    if c < 0.0 {
        Node::Neg(Box::new(Node::Const(-c)))
    } else {
        Node::Const(c)
    }
}

pub(crate) fn neg(e: Node) -> Node {
    match e {
        Node::Const(c) if c == 0.0 => Node::Const(0.0),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

pub(crate) fn add(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(z), other) if z == 0.0 => other,
        (other, Node::Const(z)) if z == 0.0 => other,
        (a, b) => Node::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Node, b: Node) -> Node {
    match (a, b) {
        (other, Node::Const(z)) if z == 0.0 => other,
        (Node::Const(z), other) if z == 0.0 => neg(other),
        (a, b) => Node::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(z), _) | (_, Node::Const(z)) if z == 0.0 => Node::Const(0.0),
        (Node::Const(o), other) if o == 1.0 => other,
        (other, Node::Const(o)) if o == 1.0 => other,
        (a, b) => Node::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(z), other) if z == 0.0 && other != Node::Const(0.0) => Node::Const(0.0),
        (other, Node::Const(o)) if o == 1.0 => other,
        (a, b) => Node::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(e: Node, n: i32) -> Node {
    match n {
        0 => Node::Const(1.0),
        1 => e,
        _ => Node::Pow(Box::new(e), n),
    }
}

/// `x - c` with the constant folded to keep it non-negative.
pub(crate) fn offset_node(c: f64) -> Node {
    if c == 0.0 {
        Node::Var
    } else if c > 0.0 {
        Node::Sub(Box::new(Node::Var), Box::new(Node::Const(c)))
    } else {
        Node::Add(Box::new(Node::Var), Box::new(Node::Const(-c)))
    }
}

/// A segment of the circle in unwrapped coordinates, with a builder that
/// receives the coordinate shift applied when the segment is wrapped into
/// `[0, 1)`.
pub(crate) struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub build: Box<dyn Fn(f64) -> Node>,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, build: impl Fn(f64) -> Node + 'static) -> Self {
        Segment {
            lo,
            hi,
            build: Box::new(build),
        }
    }
}

/// Lays disjoint segments (total length < 1) onto `[0, 1)` as a piecewise
/// tree, splitting at the seam and filling the gaps with zero.
pub(crate) fn segments_to_piecewise(segments: Vec<Segment>) -> Node {
    let mut pieces: Vec<(PieceArc, Node)> = Vec::new();
    for seg in &segments {
        debug_assert!(seg.lo < seg.hi && seg.hi - seg.lo < 1.0);
        // Normalize so the segment starts in [0, 1).
        let shift = -seg.lo.floor();
        let (lo, hi) = (seg.lo + shift, seg.hi + shift);
        if hi <= 1.0 {
            pieces.push((PieceArc { start: lo, end: hi }, (seg.build)(shift)));
        } else {
            pieces.push((
                PieceArc {
                    start: lo,
                    end: 1.0,
                },
                (seg.build)(shift),
            ));
            pieces.push((
                PieceArc {
                    start: 0.0,
                    end: hi - 1.0,
                },
                (seg.build)(shift - 1.0),
            ));
        }
    }
    pieces.sort_by(|(a, _), (b, _)| a.start.partial_cmp(&b.start).unwrap());
    // Fill gaps with zero pieces so the arcs partition [0, 1) exactly.
    let mut filled: Vec<(PieceArc, Node)> = Vec::new();
    let mut cursor = 0.0;
    for (arc, node) in pieces {
        debug_assert!(arc.start >= cursor, "overlapping segments");
        if arc.start > cursor {
            filled.push((
                PieceArc {
                    start: cursor,
                    end: arc.start,
                },
                Node::Const(0.0),
            ));
        }
        cursor = arc.end;
        filled.push((arc, node));
    }
    if cursor < 1.0 {
        filled.push((
            PieceArc {
                start: cursor,
                end: 1.0,
            },
            Node::Const(0.0),
        ));
    }
    Node::Piecewise(filled)
}

/// The constant field `c`.
pub fn constant(c: f64) -> VectorFieldExpr {
    VectorFieldExpr::from_node(constant_node(c))
}

/// `sigma * f` as a new tree.
pub fn scale(sigma: f64, f: &VectorFieldExpr) -> VectorFieldExpr {
    VectorFieldExpr::from_node(mul(constant_node(sigma), f.root().clone()))
}

/// `f + sigma * p` as a new tree; the workhorse for applying perturbations.
pub fn add_scaled(f: &VectorFieldExpr, sigma: f64, p: &VectorFieldExpr) -> VectorFieldExpr {
    VectorFieldExpr::from_node(add(
        f.root().clone(),
        mul(constant_node(sigma), p.root().clone()),
    ))
}

/// `f - g` as a new tree.
pub fn difference(f: &VectorFieldExpr, g: &VectorFieldExpr) -> VectorFieldExpr {
    VectorFieldExpr::from_node(Node::Sub(
        Box::new(f.root().clone()),
        Box::new(g.root().clone()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn identity_folding() {
        assert_eq!(add(Node::Const(0.0), Node::Var), Node::Var);
        assert_eq!(mul(Node::Const(0.0), Node::Var), Node::Const(0.0));
        assert_eq!(mul(Node::Const(1.0), Node::Var), Node::Var);
        assert_eq!(pow(Node::Var, 1), Node::Var);
        assert_eq!(neg(neg(Node::Var)), Node::Var);
    }

    #[test]
    fn add_scaled_matches_pointwise_sum() {
        let f = parse("sin(2*pi*x)").unwrap();
        let p = parse("bump(x; 0.5, 0.1)").unwrap();
        let g = add_scaled(&f, 0.25, &p);
        for i in 0..100 {
            let x = i as f64 / 100.0;
            assert!((g.eval(x) - (f.eval(x) + 0.25 * p.eval(x))).abs() < 1e-15);
        }
    }

    #[test]
    fn segments_wrap_and_fill() {
        // A segment crossing the seam: (0.9, 1.1) carrying the local offset.
        let node = segments_to_piecewise(vec![Segment::new(0.9, 1.1, |shift: f64| {
            offset_node(1.0 + shift)
        })]);
        let f = VectorFieldExpr::from_node(node);
        assert!((f.eval(0.95) - (-0.05)).abs() < 1e-15);
        assert!((f.eval(0.05) - 0.05).abs() < 1e-15);
        assert_eq!(f.eval(0.5), 0.0);
        // The generated text must re-parse to the identical tree.
        let reparsed = parse(&f.to_canonical_text()).unwrap();
        assert_eq!(&reparsed, &f);
    }
}
