use super::{BinaryOp, CmpOp, Expr, UnaryOp, Var};

/// Saturation bound for intermediate results.
pub(crate) const LIMIT: f64 = 1e300;

/// Attributes of a candidate edge `(i, j)` visible to a generator.
///
/// For undirected networks the in/out degrees equal the degree and the
/// directed/reverse distances equal the undirected distance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeContext {
    pub i: f64,
    pub j: f64,
    pub k_i: f64,
    pub k_j: f64,
    pub kin_i: f64,
    pub kin_j: f64,
    pub kout_i: f64,
    pub kout_j: f64,
    pub d: f64,
    pub dd: f64,
    pub dr: f64,
    pub xi: f64,
}

impl EdgeContext {
    #[inline]
    pub fn get(&self, v: Var) -> f64 {
        match v {
            Var::I => self.i,
            Var::J => self.j,
            Var::Ki => self.k_i,
            Var::Kj => self.k_j,
            Var::KinI => self.kin_i,
            Var::KinJ => self.kin_j,
            Var::KoutI => self.kout_i,
            Var::KoutJ => self.kout_j,
            Var::D => self.d,
            Var::Dd => self.dd,
            Var::Dr => self.dr,
            Var::Xi => self.xi,
        }
    }

    pub fn set(&mut self, v: Var, value: f64) {
        let slot = match v {
            Var::I => &mut self.i,
            Var::J => &mut self.j,
            Var::Ki => &mut self.k_i,
            Var::Kj => &mut self.k_j,
            Var::KinI => &mut self.kin_i,
            Var::KinJ => &mut self.kin_j,
            Var::KoutI => &mut self.kout_i,
            Var::KoutJ => &mut self.kout_j,
            Var::D => &mut self.d,
            Var::Dd => &mut self.dd,
            Var::Dr => &mut self.dr,
            Var::Xi => &mut self.xi,
        };
        *slot = value;
    }
}

/// NaN becomes 0, infinities saturate at +-1e300, and -0 becomes +0.
#[inline]
pub(crate) fn sat(x: f64) -> f64 {
    if x.is_nan() || x == 0.0 {
        0.0
    } else {
        x.clamp(-LIMIT, LIMIT)
    }
}

#[inline]
pub(crate) fn apply_unary(op: UnaryOp, a: f64) -> f64 {
    sat(match op {
        UnaryOp::Exp => a.exp(),
        UnaryOp::Log => {
            if a <= 0.0 {
                0.0
            } else {
                a.ln()
            }
        }
        UnaryOp::Abs => a.abs(),
    })
}

#[inline]
pub(crate) fn apply_binary(op: BinaryOp, a: f64, b: f64) -> f64 {
    sat(match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => {
            if b == 0.0 {
                0.0
            } else {
                a / b
            }
        }
        BinaryOp::Pow => {
            if a < 0.0 && b.fract() != 0.0 {
                (-a).powf(b)
            } else {
                a.powf(b)
            }
        }
        BinaryOp::Min => a.min(b),
        BinaryOp::Max => a.max(b),
    })
}

#[inline]
pub(crate) fn compare(op: CmpOp, a: f64, b: f64) -> bool {
    match op {
        CmpOp::Gt => a > b,
        CmpOp::Lt => a < b,
        CmpOp::Eq => a == b,
    }
}

#[inline]
pub(crate) fn same_group(groups: f64, i: f64, j: f64) -> bool {
    if groups == 0.0 || !groups.is_finite() {
        return false;
    }
    i.rem_euclid(groups) == j.rem_euclid(groups)
}

/// Delta uses its first branch up to and including the threshold.
#[inline]
pub(crate) fn before_switch(threshold: f64, xi: f64) -> bool {
    xi <= threshold
}

/// Internal value of a subtree: finite, possibly negative.
pub(crate) fn eval_node(e: &Expr, ctx: &EdgeContext) -> f64 {
    match e {
        Expr::Const(c) => sat(*c),
        Expr::Var(v) => ctx.get(*v),
        Expr::Unary(op, a) => apply_unary(*op, eval_node(a, ctx)),
        Expr::Binary(op, a, b) => apply_binary(*op, eval_node(a, ctx), eval_node(b, ctx)),
        Expr::Cond(op, xs) => {
            let [a, b, then, otherwise] = xs.as_ref();
            if compare(*op, eval_node(a, ctx), eval_node(b, ctx)) {
                eval_node(then, ctx)
            } else {
                eval_node(otherwise, ctx)
            }
        }
        Expr::IfZero(xs) => {
            let [a, then, otherwise] = xs.as_ref();
            if eval_node(a, ctx) == 0.0 {
                eval_node(then, ctx)
            } else {
                eval_node(otherwise, ctx)
            }
        }
        Expr::Psi { groups, same, other } => {
            if same_group(*groups, ctx.i, ctx.j) {
                eval_node(same, ctx)
            } else {
                eval_node(other, ctx)
            }
        }
        Expr::Delta {
            threshold,
            before,
            after,
        } => {
            if before_switch(*threshold, ctx.xi) {
                eval_node(before, ctx)
            } else {
                eval_node(after, ctx)
            }
        }
    }
}

pub(crate) fn evaluate_root(e: &Expr, ctx: &EdgeContext) -> f64 {
    let w = eval_node(e, ctx);
    if w.is_finite() && w > 0.0 {
        w
    } else {
        0.0
    }
}
