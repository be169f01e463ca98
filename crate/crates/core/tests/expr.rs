mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigor::expr::{Evaluator, Expr};
use rigor::interval::Interval;
use rigor::taylor::IntervalBox;
use support::{random_expr, Fast};

proptest! {
    #[test]
    fn display_round_trips(seed in any::<u64>(), depth in 0usize..6, arity in 1usize..6) {
        let e = random_expr(&mut ChaCha8Rng::seed_from_u64(seed), depth, arity);
        let back = Expr::parse(&e.to_string(), arity).unwrap();
        prop_assert_eq!(back.to_string(), e.to_string());
    }

    #[test]
    fn box_value_contains_samples(seed in any::<u64>(), depth in 0usize..5, arity in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expr(&mut rng, depth, arity);
        let b = IntervalBox::from_pairs(&vec![(-0.5, 0.75); arity]);
        let ev = Evaluator::compile(&e, arity).unwrap();
        let v = ev.value(b.dims()).unwrap();
        let f = Fast::new(&e);
        for x in support::grid(&b, 4) {
            let y = f.eval(&x);
            // f64 sampling error is far below this slack for these sizes.
            let slack = 1e-9 * (1.0 + y.abs());
            prop_assert!(y >= v.lo() - slack && y <= v.hi() + slack, "{} at {:?}: {} not in {}", e, x, y, v);
        }
    }

    #[test]
    fn gradient_matches_symbolic_derivative(seed in any::<u64>(), depth in 0usize..5, arity in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expr(&mut rng, depth, arity);
        let ev = Evaluator::compile(&e, arity).unwrap();
        let x: Vec<Interval> = (0..arity).map(|i| Interval::point(0.3 - 0.2 * i as f64)).collect();
        let g = ev.gradient(&x).unwrap();
        for (i, gi) in g.iter().enumerate() {
            let d = Evaluator::compile(&e.differentiate(i), arity).unwrap().value(&x).unwrap();
            prop_assert!(gi.intersect(&d).is_ok(), "{} d/dx{}: {} vs {}", e, i, gi, d);
        }
    }
}

#[test]
fn derivative_soundness_reduced() {
    let o = support::checks::derivative_soundness(150, 11);
    assert!(o.passed, "{}", o.detail);
}
