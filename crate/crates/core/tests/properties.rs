//! Property tests for the expression layer: printer/parser round-trip,
//! inclusion of point values in the natural extension, and monotonicity of
//! the extension under box shrinking.

use proptest::prelude::*;

use evidprop::expr::{BinOp, ExprAst, Node, UnaryOp};
use evidprop::Interval;

fn variables() -> Vec<String> {
    vec!["a".to_string(), "b".to_string(), "c".to_string()]
}

/// Arbitrary trees over the full operator set. Evaluation may hit domain
/// errors (log of a negative, division by zero); round-trip printing does
/// not care.
fn any_node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (-4.0..4.0f64).prop_map(Node::Const),
        (0usize..3).prop_map(Node::Var),
    ];
    leaf.prop_recursive(5, 48, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Add,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Sub,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Mul,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Div,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Pow,
                Box::new(x),
                Box::new(y)
            )),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Neg, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Exp, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Log, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Sin, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Cos, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Sqrt, Box::new(x))),
        ]
    })
}

/// Trees restricted to operators that are total on all of R, so both
/// evaluators always succeed and the inclusion property can be checked.
fn total_node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (-2.0..2.0f64).prop_map(Node::Const),
        (0usize..3).prop_map(Node::Var),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Add,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Sub,
                Box::new(x),
                Box::new(y)
            )),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Node::Binary(
                BinOp::Mul,
                Box::new(x),
                Box::new(y)
            )),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Neg, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Sin, Box::new(x))),
            inner
                .clone()
                .prop_map(|x| Node::Unary(UnaryOp::Cos, Box::new(x))),
        ]
    })
}

/// A box over the three variables plus an interior point, parameterized by
/// per-dimension (center, halfwidth, relative position).
fn box_and_point() -> impl Strategy<Value = (Vec<Interval>, Vec<f64>)> {
    proptest::collection::vec((-2.0..2.0f64, 0.0..1.5f64, 0.0..=1.0f64), 3).prop_map(|dims| {
        let boxes: Vec<Interval> = dims
            .iter()
            .map(|(c, w, _)| Interval::new(c - w, c + w).unwrap())
            .collect();
        let point: Vec<f64> = dims
            .iter()
            .map(|(c, w, t)| (c - w) + 2.0 * w * t)
            .collect();
        (boxes, point)
    })
}

proptest! {
    #[test]
    fn printer_round_trips(root in any_node()) {
        let ast = ExprAst::from_root(variables(), root).unwrap();
        let printed = ast.to_string();
        let reparsed = ExprAst::parse(&printed, &variables())
            .unwrap_or_else(|e| panic!("`{printed}` failed to re-parse: {e}"));
        prop_assert_eq!(&ast, &reparsed, "printed as `{}`", printed);
    }

    #[test]
    fn point_values_lie_inside_interval_extension(
        root in total_node(),
        (boxes, point) in box_and_point(),
    ) {
        let ast = ExprAst::from_root(variables(), root).unwrap();
        let value = ast.eval_point(&point).unwrap();
        let extension = ast.eval_interval(&boxes).unwrap();
        prop_assert!(
            extension.lo() - 1e-12 <= value && value <= extension.hi() + 1e-12,
            "{} not inside {} for {:?}", value, extension, point
        );
    }

    #[test]
    fn extension_is_monotone_under_box_shrinking(
        root in total_node(),
        dims in proptest::collection::vec(
            (-2.0..2.0f64, 0.0..1.5f64, 0.0..=1.0f64, 0.0..=1.0f64), 3),
    ) {
        // inner box: random sub-interval of each outer component
        let mut outer = Vec::with_capacity(3);
        let mut inner = Vec::with_capacity(3);
        for (c, w, t0, t1) in dims {
            let (lo, hi) = (c - w, c + w);
            outer.push(Interval::new(lo, hi).unwrap());
            let (mut s0, mut s1) = (lo + 2.0 * w * t0, lo + 2.0 * w * t1);
            if s0 > s1 {
                std::mem::swap(&mut s0, &mut s1);
            }
            inner.push(Interval::new(s0, s1).unwrap());
        }
        let ast = ExprAst::from_root(variables(), root).unwrap();
        let wide = ast.eval_interval(&outer).unwrap();
        let narrow = ast.eval_interval(&inner).unwrap();
        prop_assert!(
            wide.lo() - 1e-12 <= narrow.lo() && narrow.hi() <= wide.hi() + 1e-12,
            "{} not inside {}", narrow, wide
        );
    }
}
