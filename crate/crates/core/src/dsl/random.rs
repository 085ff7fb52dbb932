use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BinaryOp, CmpOp, Expr, GeneratorTree, UnaryOp, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    FixedDepth,
    Grow,
}

/// Parameters for random tree construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitParams {
    pub d_min: usize,
    pub d_max: usize,
    pub p_terminal: f64,
    /// `None` picks fixed-depth or grow with equal probability per tree.
    pub strategy: Option<InitStrategy>,
    pub variables: Vec<Var>,
}

impl Default for InitParams {
    fn default() -> Self {
        Self {
            d_min: 2,
            d_max: 5,
            p_terminal: 0.4,
            strategy: None,
            variables: Var::vocabulary(false),
        }
    }
}

impl InitParams {
    pub fn for_network(directed: bool) -> Self {
        Self {
            variables: Var::vocabulary(directed),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.d_min < 1 || self.d_min > self.d_max {
            return Err(crate::Error::input(format!(
                "need 1 <= d_min <= d_max, got {} and {}",
                self.d_min, self.d_max
            )));
        }
        if !(0.0..=1.0).contains(&self.p_terminal) {
            return Err(crate::Error::input("p_terminal must lie in [0, 1]"));
        }
        if self.variables.is_empty() {
            return Err(crate::Error::input("variable vocabulary is empty"));
        }
        Ok(())
    }
}

const OPERATORS: usize = 16;

/// Exactly 0 with probability 0.1, a uniform integer from 1..=9 with
/// probability 0.4, otherwise uniform in [0, 1).
pub fn random_constant<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let r: f64 = rng.gen();
    if r < 0.1 {
        0.0
    } else if r < 0.5 {
        rng.gen_range(1..10) as f64
    } else {
        rng.gen()
    }
}

fn terminal<R: Rng + ?Sized>(params: &InitParams, rng: &mut R) -> Expr {
    if rng.gen_bool(0.5) {
        Expr::Var(params.variables[rng.gen_range(0..params.variables.len())])
    } else {
        Expr::Const(random_constant(rng))
    }
}

struct Builder<'a, R: ?Sized> {
    params: &'a InitParams,
    rng: &'a mut R,
    depth: usize,
    grow: bool,
}

impl<R: Rng + ?Sized> Builder<'_, R> {
    fn build(&mut self, level: usize) -> Expr {
        let operator = if level < self.depth {
            true
        } else if !self.grow || level >= 2 * self.params.d_max {
            false
        } else {
            !self.rng.gen_bool(self.params.p_terminal)
        };
        if !operator {
            return terminal(self.params, self.rng);
        }
        let op = self.rng.gen_range(0..OPERATORS);
        let mut sub = || self.build(level + 1);
        match op {
            0 => Expr::binary(BinaryOp::Add, sub(), sub()),
            1 => Expr::binary(BinaryOp::Sub, sub(), sub()),
            2 => Expr::binary(BinaryOp::Mul, sub(), sub()),
            3 => Expr::binary(BinaryOp::Div, sub(), sub()),
            4 => Expr::binary(BinaryOp::Pow, sub(), sub()),
            5 => Expr::binary(BinaryOp::Min, sub(), sub()),
            6 => Expr::binary(BinaryOp::Max, sub(), sub()),
            7 => Expr::unary(UnaryOp::Exp, sub()),
            8 => Expr::unary(UnaryOp::Log, sub()),
            9 => Expr::unary(UnaryOp::Abs, sub()),
            10 => Expr::cond(CmpOp::Gt, sub(), sub(), sub(), sub()),
            11 => Expr::cond(CmpOp::Lt, sub(), sub(), sub(), sub()),
            12 => Expr::cond(CmpOp::Eq, sub(), sub(), sub(), sub()),
            13 => Expr::if_zero(sub(), sub(), sub()),
            14 => {
                let (a, b) = (sub(), sub());
                Expr::psi(random_constant(&mut *self.rng), a, b)
            }
            _ => {
                let (a, b) = (sub(), sub());
                Expr::delta(random_constant(&mut *self.rng), a, b)
            }
        }
    }
}

/// Builds a random tree: operators above depth `D ~ U[d_min, d_max]`, then
/// terminals (fixed depth) or terminals with probability `p_terminal` until a
/// hard cap at depth `2 * d_max` (grow).
pub fn random_tree<R: Rng + ?Sized>(params: &InitParams, rng: &mut R) -> GeneratorTree {
    let depth = rng.gen_range(params.d_min..=params.d_max);
    let grow = match params.strategy {
        Some(InitStrategy::FixedDepth) => false,
        Some(InitStrategy::Grow) => true,
        None => rng.gen_bool(0.5),
    };
    let mut b = Builder {
        params,
        rng,
        depth,
        grow,
    };
    GeneratorTree::new(b.build(0))
}

fn graft(target: &GeneratorTree, point: usize, donor: Expr) -> GeneratorTree {
    let mut root = target.root().clone();
    *root.node_mut(point).expect("graft point within tree") = donor;
    GeneratorTree::new(root)
}

/// Headless-chicken mutation; also returns the graft point in `tree`.
pub fn mutate_traced<R: Rng + ?Sized>(
    tree: &GeneratorTree,
    params: &InitParams,
    rng: &mut R,
) -> (GeneratorTree, usize) {
    let point = rng.gen_range(0..tree.size());
    let donor_tree = random_tree(params, rng);
    let pick = rng.gen_range(0..donor_tree.size());
    let donor = donor_tree.root().node(pick).expect("pick within donor").clone();
    (graft(tree, point, donor), point)
}

/// Replaces a uniformly chosen subtree with a uniformly chosen subtree of a
/// fresh random tree. The input is left untouched.
pub fn mutate<R: Rng + ?Sized>(tree: &GeneratorTree, params: &InitParams, rng: &mut R) -> GeneratorTree {
    mutate_traced(tree, params, rng).0
}

pub fn recombine_traced<R: Rng + ?Sized>(
    first: &GeneratorTree,
    second: &GeneratorTree,
    rng: &mut R,
) -> (GeneratorTree, usize, usize) {
    let point = rng.gen_range(0..first.size());
    let pick = rng.gen_range(0..second.size());
    let donor = second.root().node(pick).expect("pick within parent").clone();
    (graft(first, point, donor), point, pick)
}

/// Subtree crossover: a uniformly chosen node of `first` is replaced by the
/// subtree at a uniformly chosen node of `second`.
pub fn recombine<R: Rng + ?Sized>(first: &GeneratorTree, second: &GeneratorTree, rng: &mut R) -> GeneratorTree {
    recombine_traced(first, second, rng).0
}
