mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use netregress::dsl::{mutate, random_tree, recombine, EdgeContext, Expr, GeneratorTree, InitParams};

use common::valid_context;

fn params(directed: bool) -> InitParams {
    InitParams::for_network(directed)
}

fn tree_from(seed: u64, directed: bool) -> GeneratorTree {
    random_tree(&params(directed), &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn simplify_preserves_evaluation_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let contexts: Vec<EdgeContext> = (0..1000).map(|_| valid_context(&mut rng)).collect();
    for t in 0..1000u64 {
        let tree = tree_from(t, t % 3 == 0);
        let simple = tree.simplify();
        assert!(simple.size() <= tree.size());
        for ctx in &contexts {
            let (a, b) = (tree.evaluate(ctx), simple.evaluate(ctx));
            assert_eq!(a.to_bits(), b.to_bits(), "{tree} -> {simple} at {ctx:?}: {a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_parse_round_trip(seed in any::<u64>(), directed in any::<bool>()) {
        let tree = tree_from(seed, directed);
        let text = tree.to_string();
        let back = GeneratorTree::parse(&text).unwrap();
        prop_assert_eq!(&back, &tree);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn evaluation_is_total(seed in any::<u64>(), ctx_seed in any::<u64>(), wild in any::<bool>()) {
        let tree = tree_from(seed, true);
        let mut rng = ChaCha8Rng::seed_from_u64(ctx_seed);
        let mut ctx = valid_context(&mut rng);
        if wild {
            // degenerate inputs must still yield a usable weight
            ctx.k_i = 0.0;
            ctx.d = 1e9;
            ctx.xi = 0.0;
            ctx.i = 0.0;
        }
        let w = tree.evaluate(&ctx);
        prop_assert!(w.is_finite() && w >= 0.0, "{} gave {}", tree, w);
        prop_assert_eq!(w.to_bits(), tree.evaluate(&ctx).to_bits());
    }

    #[test]
    fn variation_keeps_trees_well_formed(a in any::<u64>(), b in any::<u64>(), r in any::<u64>(), directed in any::<bool>()) {
        let p = params(directed);
        let (x, y) = (tree_from(a, directed), tree_from(b, directed));
        let mut rng = ChaCha8Rng::seed_from_u64(r);
        let m = mutate(&x, &p, &mut rng);
        let c = recombine(&x, &y, &mut rng);
        for t in [&m, &c] {
            prop_assert!(t.is_well_formed());
            prop_assert!(GeneratorTree::parse(&t.to_string()).is_ok());
        }
        // the donor subtree cannot be larger than the other parent
        prop_assert!(c.size() < x.size() + y.size());
        prop_assert!(x.is_well_formed() && y.is_well_formed());
    }

    #[test]
    fn delta_equals_its_shorthand(a in any::<u64>(), b in any::<u64>(), g in 0.0f64..1.0, ctx_seed in any::<u64>()) {
        let (first, second) = (tree_from(a, false), tree_from(b, false));
        let delta = GeneratorTree::new(Expr::delta(g, first.root().clone(), second.root().clone()));
        let shorthand = GeneratorTree::parse(&format!("(> xi {g} {second} {first})")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(ctx_seed);
        for _ in 0..20 {
            let mut ctx = valid_context(&mut rng);
            if rng.gen_bool(0.2) {
                ctx.xi = g;
            }
            prop_assert_eq!(delta.evaluate(&ctx).to_bits(), shorthand.evaluate(&ctx).to_bits());
        }
    }

    #[test]
    fn simplify_is_idempotent(seed in any::<u64>()) {
        let once = tree_from(seed, false).simplify();
        prop_assert_eq!(once.simplify(), once);
    }
}
