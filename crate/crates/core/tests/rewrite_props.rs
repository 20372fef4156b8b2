use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeprune_core::embed::{embeds, find_embedding};
use treeprune_core::guard::{match_guard, matched_set};
use treeprune_core::rewrite::{
    apply_rule, enumerate_post_star, fixpoint_tree_k, Caps, RewriteOp, RewriteRule,
};
use treeprune_core::simplify::strip_removals;
use treeprune_core::testing::{
    extend_tree, random_guard, random_op, random_system, random_tree, GuardShape,
};
use treeprune_core::Tree;

const POSITIVE: GuardShape = GuardShape {
    negation: false,
    siblings: false,
};

proptest! {
    #![proptest_config(Config { cases: 1000, ..Config::default() })]

    /// From `t1 ⪯ t2` and a step of `t1`, either the result still embeds
    /// into `t2`, or `t2` takes the same step at the image node.
    #[test]
    fn monotonicity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t1 = random_tree(&mut rng, 3, 5, 3);
        let extra = rng.gen_range(0..4);
        let t2 = extend_tree(&mut rng, &t1, 3, extra);
        let h = find_embedding(&t1, &t2).unwrap();
        let depth = rng.gen_range(1..=3);
        let rule = RewriteRule::new("s", random_guard(&mut rng, 3, depth, POSITIVE), random_op(&mut rng, 3, true));
        for v in t1.paths() {
            let Ok(t1b) = apply_rule(&t1, v, &rule) else { continue };
            if embeds(&t1b, &t2) {
                continue;
            }
            prop_assert!(!rule.op.is_removal(), "removals only shrink");
            let t2b = apply_rule(&t2, &h[v], &rule).expect("guard preserved at the image");
            prop_assert!(embeds(&t1b, &t2b));
        }
    }

    #[test]
    fn domain_changes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tree(&mut rng, 3, 5, 3);
        let rule = RewriteRule::new("s", random_guard(&mut rng, 3, 2, POSITIVE), random_op(&mut rng, 3, true));
        for v in t.paths() {
            let Ok(t2) = apply_rule(&t, v, &rule) else { continue };
            match rule.op {
                RewriteOp::AddChild(_) => prop_assert_eq!(t2.len(), t.len() + 1),
                RewriteOp::RemoveNode => prop_assert!(t2.len() < t.len()),
                _ => prop_assert_eq!(t2.len(), t.len()),
            }
        }
    }
}

proptest! {
    #![proptest_config(Config { cases: 1000, max_global_rejects: 100_000, ..Config::default() })]

    /// Dropping removals changes no matched guard.
    #[test]
    fn removal_elimination(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rules = rng.gen_range(1..=4);
        let sys = random_system(&mut rng, 3, rules, 2, true, 4);
        let caps = Caps { max_nodes: 8, max_trees: 1500, max_steps: 60_000, max_height: Some(2) };
        let with = enumerate_post_star(&sys, caps);
        prop_assume!(with.exhausted);
        let without = enumerate_post_star(&strip_removals(&sys), caps);
        prop_assume!(without.exhausted);
        let guards = sys.query_guards();
        let mut a: Vec<_> = with.trees.iter().flat_map(|t| matched_set(t, &guards)).collect();
        let mut b: Vec<_> = without.trees.iter().flat_map(|t| matched_set(t, &guards)).collect();
        a.sort();
        a.dedup();
        b.sort();
        b.dedup();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(Config { cases: 300, max_global_rejects: 100_000, ..Config::default() })]

    /// The fixpoint tree bounds every reachable tree and adds nothing that
    /// is not reachable at the corresponding node.
    #[test]
    fn fixpoint_tree_is_the_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rules = rng.gen_range(1..=5);
        let sys = random_system(&mut rng, 3, rules, 2, false, 0);
        let k = rng.gen_range(0..=2);
        let post = enumerate_post_star(&sys, Caps { max_nodes: 9, max_trees: 3000, max_steps: 100_000, max_height: Some(k) });
        prop_assume!(post.exhausted);
        let tf = fixpoint_tree_k(&sys, k).unwrap();
        prop_assert!(post.trees.iter().all(|t| embeds(t, &tf)));
        // T_F is itself reachable up to equivalence.
        prop_assert!(post.trees.iter().any(|t| embeds(&tf, t)));
        for v in tf.paths() {
            for &c in tf.label(v).unwrap() {
                let g = treeprune_core::Guard::Atom(c);
                prop_assert!(post.trees.iter().any(|t| t.paths().any(|u| u.depth() == v.depth() && match_guard(t, u, &g).unwrap())));
            }
        }
        let _: &Tree = &tf;
    }
}
