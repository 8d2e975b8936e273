//! Ideal membership via a Gröbner basis in graded-lex order.
//!
//! Only used to decide whether a residual vanishes modulo a handful of
//! low-degree relations, so a plain Buchberger loop is enough.

use num_traits::One;

use super::monomial::Monomial;
use super::polynomial::Polynomial;
use super::rational::Rational;
use super::PolyError;

#[derive(Debug, Clone)]
pub struct IdealBasis {
    basis: Vec<Polynomial>,
}

impl IdealBasis {
    /// Computes a reduced Gröbner basis of the ideal spanned by `generators`.
    pub fn new(generators: &[Polynomial]) -> Result<Self, PolyError> {
        let mut basis: Vec<Polynomial> = Vec::new();
        for g in generators {
            if let Some(first) = basis.first() {
                if !first.same_table(g) {
                    return Err(PolyError::TableMismatch);
                }
            }
            if !g.is_zero() {
                basis.push(g.primitive());
            }
        }
        let mut pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        while let Some((i, j)) = pairs.pop() {
            let (li, _) = basis[i].leading_term().expect("nonzero");
            let (lj, _) = basis[j].leading_term().expect("nonzero");
            if li.is_coprime(lj) {
                continue;
            }
            let s = s_polynomial(&basis[i], &basis[j]);
            let r = remainder(&s, &basis);
            if !r.is_zero() {
                let k = basis.len();
                basis.push(r.primitive());
                pairs.extend((0..k).map(|i| (i, k)));
            }
        }
        Ok(IdealBasis { basis: reduce_basis(basis) })
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.basis
    }

    /// Normal form of `p` modulo the ideal.
    pub fn remainder(&self, p: &Polynomial) -> Polynomial {
        remainder(p, &self.basis)
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.remainder(p).is_zero()
    }

    /// True when the ideal is the whole ring, i.e. the relations are inconsistent.
    pub fn is_unit(&self) -> bool {
        self.basis.iter().any(Polynomial::is_constant)
    }
}

fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let (lf, cf) = f.leading_term().expect("nonzero");
    let (lg, cg) = g.leading_term().expect("nonzero");
    let l = lf.lcm(lg);
    let vars = f.vars();
    let a = Polynomial::monomial(vars, lf.quotient_of(&l), Rational::one() / cf);
    let b = Polynomial::monomial(vars, lg.quotient_of(&l), Rational::one() / cg);
    &(&a * f) - &(&b * g)
}

/// Full multivariate division remainder.
fn remainder(p: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let vars = p.vars().clone();
    let mut rest = p.clone();
    let mut out = Polynomial::zero(&vars);
    while let Some((lm, lc)) = rest.leading_term() {
        let (lm, lc): (Monomial, Rational) = (lm.clone(), lc.clone());
        let divisor = basis.iter().find(|g| g.leading_term().is_some_and(|(gm, _)| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.leading_term().expect("nonzero");
                let factor = Polynomial::monomial(&vars, gm.quotient_of(&lm), &lc / gc);
                rest = &rest - &(&factor * g);
            }
            None => {
                let term = Polynomial::monomial(&vars, lm, lc);
                rest = &rest - &term;
                out = &out + &term;
            }
        }
    }
    out
}

fn reduce_basis(mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    // Drop elements whose leading monomial is divisible by another's.
    let mut i = 0;
    while i < basis.len() {
        let (li, _) = basis[i].leading_term().expect("nonzero");
        let redundant = basis.iter().enumerate().any(|(j, g)| {
            let (lj, _) = g.leading_term().expect("nonzero");
            j != i && lj.divides(li) && (lj != li || j < i)
        });
        if redundant {
            basis.remove(i);
        } else {
            i += 1;
        }
    }
    let mut out = Vec::with_capacity(basis.len());
    for k in 0..basis.len() {
        let others: Vec<Polynomial> =
            basis.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, g)| g.clone()).collect();
        out.push(remainder(&basis[k], &others).primitive());
    }
    out.sort_by(|a, b| a.leading_term().map(|t| t.0).cmp(&b.leading_term().map(|t| t.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::{parse_polynomial, VariableTable};

    fn p(text: &str) -> Polynomial {
        parse_polynomial(text, &VariableTable::standard()).unwrap()
    }

    #[test]
    fn membership_needs_s_polynomials() {
        // alpha*(beta^2 - gamma^2 + delta^2) - alpha^3 is in the ideal only
        // through the combination of both generators.
        let ideal =
            IdealBasis::new(&[p("alpha^2 - beta^2 + gamma^2 - delta^2"), p("alpha*gamma - beta*delta")]).unwrap();
        assert!(ideal.contains(&p("alpha^3 - alpha*beta^2 + alpha*gamma^2 - alpha*delta^2")));
        assert!(ideal.contains(&p("(alpha*gamma - beta*delta)*(c + 1)")));
        assert!(!ideal.contains(&p("alpha")));
    }

    #[test]
    fn principal_ideal() {
        let ideal = IdealBasis::new(&[p("alpha*gamma")]).unwrap();
        assert!(ideal.contains(&p("3*alpha*gamma*beta")));
        assert!(!ideal.contains(&p("alpha + gamma")));
        assert_eq!(ideal.remainder(&p("alpha*gamma + beta")), p("beta"));
    }

    #[test]
    fn inconsistent_relations() {
        let ideal = IdealBasis::new(&[p("alpha"), p("alpha - 1")]).unwrap();
        assert!(ideal.is_unit());
        assert!(ideal.contains(&p("beta")));
    }
}
