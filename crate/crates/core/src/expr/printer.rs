//! Canonical pretty-printing. The output re-parses to an identical tree.
//!
//! Binary operators parenthesize their right operand whenever it has the
//! same precedence, because the parser builds left-associative trees.
//! Negative constants never appear bare: builders wrap them in `Neg`, which
//! prints inside parentheses except at the start of an expression.

use super::Node;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_ATOM: u8 = 4;

pub(crate) fn print(node: &Node) -> String {
    let mut out = String::new();
    // Top level is expression position, where a leading `-` is grammatical.
    write_node(node, 0, true, &mut out);
    out
}

fn prec(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) | Node::Neg(..) => PREC_ADD,
        Node::Mul(..) | Node::Div(..) => PREC_MUL,
        Node::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn write_node(node: &Node, min_prec: u8, expr_start: bool, out: &mut String) {
    let p = prec(node);
    let needs_paren = p < min_prec || (matches!(node, Node::Neg(..)) && !expr_start);
    if needs_paren {
        out.push('(');
        write_inner(node, out);
        out.push(')');
    } else {
        write_inner(node, out);
    }
}

fn write_inner(node: &Node, out: &mut String) {
    match node {
        Node::Const(c) => out.push_str(&format_number(*c)),
        Node::Var => out.push('x'),
        Node::Neg(e) => {
            out.push('-');
            // Unary minus binds a whole term.
            write_node(e, PREC_MUL, false, out);
        }
        Node::Add(a, b) => {
            write_node(a, PREC_ADD, false, out);
            out.push_str(" + ");
            write_node(b, PREC_ADD + 1, false, out);
        }
        Node::Sub(a, b) => {
            write_node(a, PREC_ADD, false, out);
            out.push_str(" - ");
            write_node(b, PREC_ADD + 1, false, out);
        }
        Node::Mul(a, b) => {
            write_node(a, PREC_MUL, false, out);
            out.push_str(" * ");
            write_node(b, PREC_MUL + 1, false, out);
        }
        Node::Div(a, b) => {
            write_node(a, PREC_MUL, false, out);
            out.push_str(" / ");
            write_node(b, PREC_MUL + 1, false, out);
        }
        Node::Pow(e, n) => {
            write_node(e, PREC_ATOM, false, out);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Node::Sin(e) => write_call("sin", e, out),
        Node::Cos(e) => write_call("cos", e, out),
        Node::Exp(e) => write_call("exp", e, out),
        Node::Bump { center, radius } => {
            out.push_str(&format!(
                "bump(x; {}, {})",
                format_number(*center),
                format_number(*radius)
            ));
        }
        Node::Plateau { a, b, margin } => {
            out.push_str(&format!(
                "plateau(x; {}, {}, {})",
                format_number(*a),
                format_number(*b),
                format_number(*margin)
            ));
        }
        Node::Piecewise(pieces) => {
            out.push_str("piecewise { ");
            for (arc, e) in pieces {
                out.push_str(&format!(
                    "[{}, {}): ",
                    format_number(arc.start),
                    format_number(arc.end)
                ));
                write_node(e, 0, true, out);
                out.push_str("; ");
            }
            out.push('}');
        }
    }
}

fn write_call(name: &str, inner: &Node, out: &mut String) {
    out.push_str(name);
    out.push('(');
    write_node(inner, 0, true, out);
    out.push(')');
}

/// Shortest round-trip decimal form. Parameter positions accept a sign, so
/// negative parameters print naturally.
fn format_number(v: f64) -> String {
    format!("{v}")
}
