//! Semantics-preserving rewrites for reporting.
//!
//! Every rule must agree exactly with [`super::eval`]: intermediate values
//! are always finite and zero is never negative, which is what makes
//! `x + 0 -> x` and `x * 0 -> 0` exact.

use super::eval::{apply_binary, apply_unary, before_switch, compare, eval_node, same_group, sat};
use super::{BinaryOp, EdgeContext, Expr};

fn reads_context(e: &Expr) -> bool {
    match e {
        Expr::Var(_) | Expr::Psi { .. } | Expr::Delta { .. } => true,
        _ => e.children().into_iter().any(reads_context),
    }
}

fn is_const(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Const(c) if sat(*c) == v)
}

fn rewrite(e: Expr) -> Expr {
    // simplify children first
    let e = match e {
        Expr::Unary(op, a) => Expr::Unary(op, Box::new(rewrite(*a))),
        Expr::Binary(op, a, b) => Expr::Binary(op, Box::new(rewrite(*a)), Box::new(rewrite(*b))),
        Expr::Cond(op, xs) => {
            let [a, b, t, f] = *xs;
            Expr::Cond(op, Box::new([rewrite(a), rewrite(b), rewrite(t), rewrite(f)]))
        }
        Expr::IfZero(xs) => {
            let [a, t, f] = *xs;
            Expr::IfZero(Box::new([rewrite(a), rewrite(t), rewrite(f)]))
        }
        Expr::Psi { groups, same, other } => Expr::psi(groups, rewrite(*same), rewrite(*other)),
        Expr::Delta {
            threshold,
            before,
            after,
        } => Expr::delta(threshold, rewrite(*before), rewrite(*after)),
        leaf => leaf,
    };

    if !e.is_terminal() && !reads_context(&e) {
        return Expr::Const(eval_node(&e, &EdgeContext::default()));
    }

    match e {
        Expr::Const(c) => Expr::Const(sat(c)),
        Expr::Unary(op, a) => match *a {
            Expr::Const(c) => Expr::Const(apply_unary(op, c)),
            a => Expr::unary(op, a),
        },
        Expr::Binary(op, a, b) => binary(op, *a, *b),
        Expr::Cond(op, xs) => {
            let [a, b, t, f] = *xs;
            if t == f {
                return t;
            }
            match (&a, &b) {
                (Expr::Const(x), Expr::Const(y)) => {
                    if compare(op, *x, *y) {
                        t
                    } else {
                        f
                    }
                }
                _ => Expr::cond(op, a, b, t, f),
            }
        }
        Expr::IfZero(xs) => {
            let [a, t, f] = *xs;
            if t == f {
                return t;
            }
            match a {
                Expr::Const(x) => {
                    if x == 0.0 {
                        t
                    } else {
                        f
                    }
                }
                a => Expr::if_zero(a, t, f),
            }
        }
        Expr::Psi { groups, same, other } => {
            if same == other {
                *same
            } else if groups == 0.0 || !groups.is_finite() {
                *other
            } else if groups.abs() == 1.0 && same_group(groups, 0.0, 0.0) {
                // every integer id falls in the single group
                *same
            } else {
                Expr::Psi { groups, same, other }
            }
        }
        Expr::Delta {
            threshold,
            before,
            after,
        } => {
            // the edge ratio always lies in [0, 1]
            if before == after || before_switch(threshold, 1.0) {
                *before
            } else if !before_switch(threshold, 0.0) {
                *after
            } else {
                Expr::Delta {
                    threshold,
                    before,
                    after,
                }
            }
        }
        leaf => leaf,
    }
}

fn binary(op: BinaryOp, a: Expr, b: Expr) -> Expr {
    if let (Expr::Const(x), Expr::Const(y)) = (&a, &b) {
        return Expr::Const(apply_binary(op, *x, *y));
    }
    match op {
        BinaryOp::Add if is_const(&b, 0.0) => a,
        BinaryOp::Add if is_const(&a, 0.0) => b,
        BinaryOp::Sub if is_const(&b, 0.0) => a,
        BinaryOp::Sub if a == b => Expr::Const(0.0),
        BinaryOp::Mul if is_const(&b, 1.0) => a,
        BinaryOp::Mul if is_const(&a, 1.0) => b,
        BinaryOp::Mul if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        BinaryOp::Div if is_const(&b, 1.0) => a,
        BinaryOp::Div if is_const(&b, 0.0) || is_const(&a, 0.0) => Expr::Const(0.0),
        BinaryOp::Pow if is_const(&b, 1.0) => a,
        BinaryOp::Pow if is_const(&b, 0.0) => Expr::Const(1.0),
        BinaryOp::Min | BinaryOp::Max if a == b => a,
        _ => Expr::binary(op, a, b),
    }
}

/// Rewrites to a fixpoint.
pub(crate) fn simplify(e: &Expr) -> Expr {
    let mut cur = e.clone();
    loop {
        let next = rewrite(cur.clone());
        if next == cur {
            return next;
        }
        cur = next;
    }
}
