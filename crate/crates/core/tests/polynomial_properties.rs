use std::sync::Arc;

use proptest::prelude::*;

use schouten_core::exactpoly::rational::ratio;
use schouten_core::exactpoly::{parse_polynomial, Monomial, Polynomial, Rational, VariableTable};

const NVARS: usize = 3;

fn table() -> Arc<VariableTable> {
    VariableTable::new(["x", "y", "z"]).expect("valid names")
}

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::array::uniform3(0u32..=3), rational()), 0..6).prop_map(|terms| {
        let vars = table();
        Polynomial::from_terms(&vars, terms.into_iter().map(|(e, c)| (Monomial::from_exponents(e.to_vec()), c)))
    })
}

fn point() -> impl Strategy<Value = Vec<Option<Rational>>> {
    prop::collection::vec(rational().prop_map(Some), NVARS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn addition_is_commutative_and_associative(a in polynomial(), b in polynomial(), c in polynomial()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn multiplication_is_commutative_associative_and_distributive(
        a in polynomial(), b in polynomial(), c in polynomial()
    ) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &Polynomial::one(a.vars()), a.clone());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in polynomial(), b in polynomial(), p in point()) {
        let ev = |q: &Polynomial| q.eval_indexed(&p).unwrap();
        prop_assert_eq!(ev(&(&a + &b)), ev(&a) + ev(&b));
        prop_assert_eq!(ev(&(&a * &b)), ev(&a) * ev(&b));
        prop_assert_eq!(ev(&-&a), -ev(&a));
    }

    #[test]
    fn substitution_commutes_with_evaluation(a in polynomial(), q in polynomial(), p in point()) {
        // Substitute x := q, then evaluate, equals evaluating with x := q(p).
        let substituted = a.substitute(0, &q).unwrap();
        let mut shifted = p.clone();
        shifted[0] = Some(q.eval_indexed(&p).unwrap());
        prop_assert_eq!(substituted.eval_indexed(&p).unwrap(), a.eval_indexed(&shifted).unwrap());
    }

    #[test]
    fn square_reduction_agrees_on_the_relation(a in polynomial(), x in rational(), z in rational()) {
        // x^2 = y*z + 1, sampled by solving for y.
        prop_assume!(z != Rational::from_integer(0.into()));
        let vars = a.vars().clone();
        let rhs = &(&Polynomial::var_at(&vars, 1) * &Polynomial::var_at(&vars, 2)) + &Polynomial::one(&vars);
        let reduced = a.reduce_square(0, &rhs).unwrap();
        prop_assert!(reduced.degree_in(0) <= 1);
        let y = (&x * &x - Rational::from_integer(1.into())) / &z;
        let p = vec![Some(x), Some(y), Some(z)];
        prop_assert_eq!(reduced.eval_indexed(&p).unwrap(), a.eval_indexed(&p).unwrap());
    }

    #[test]
    fn printing_then_parsing_round_trips(a in polynomial()) {
        let text = a.to_string();
        let back = parse_polynomial(&text, a.vars()).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn parser_respects_precedence() {
    let vars = table();
    let p = parse_polynomial("-x^2 + 2*x*y - 1/2*(y + z)^2", &vars).unwrap();
    let point = vec![Some(ratio(1, 1)), Some(ratio(2, 1)), Some(ratio(-1, 1))];
    assert_eq!(p.eval_indexed(&point).unwrap(), ratio(5, 2));
}
