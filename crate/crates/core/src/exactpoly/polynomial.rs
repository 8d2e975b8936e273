use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::rational::{self, Rational};
use super::table::VariableTable;
use super::PolyError;

/// Multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a map keyed by monomial with no zero coefficients, so
/// two polynomials over the same table are equal exactly when their term maps
/// are equal.
#[derive(Clone)]
pub struct Polynomial {
    vars: Arc<VariableTable>,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(vars: &Arc<VariableTable>) -> Self {
        Polynomial { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Arc<VariableTable>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VariableTable>, value: Rational) -> Self {
        let mut p = Self::zero(vars);
        if !value.is_zero() {
            p.terms.insert(Monomial::one(vars.len()), value);
        }
        p
    }

    pub fn integer(vars: &Arc<VariableTable>, value: i64) -> Self {
        Self::constant(vars, rational::int(value))
    }

    pub fn var(vars: &Arc<VariableTable>, name: &str) -> Result<Self, PolyError> {
        let index = vars.require(name)?;
        Ok(Self::var_at(vars, index))
    }

    pub fn var_at(vars: &Arc<VariableTable>, index: usize) -> Self {
        Self::monomial(vars, Monomial::var(vars.len(), index, 1), Rational::one())
    }

    pub fn monomial(vars: &Arc<VariableTable>, mono: Monomial, coeff: Rational) -> Self {
        assert_eq!(mono.len(), vars.len(), "monomial length must match the table");
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    pub fn from_terms<I>(vars: &Arc<VariableTable>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "monomial length must match the table");
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VariableTable> {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn same_table(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    fn check_table(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.same_table(other) {
            Ok(())
        } else {
            Err(PolyError::TableMismatch)
        }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_table(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_table(other)?;
        let mut out = Polynomial::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect() }
    }

    pub fn pow(&self, exponent: u32) -> Polynomial {
        let mut result = Polynomial::one(&self.vars);
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in one variable; the zero polynomial has degree 0.
    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.exponent(index)).max().unwrap_or(0)
    }

    pub fn degree_in_var(&self, name: &str) -> Result<u32, PolyError> {
        Ok(self.degree_in(self.vars.require(name)?))
    }

    /// Indices of the variables that occur with nonzero exponent.
    pub fn variables(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables().into_iter().map(|i| self.vars.name(i).to_string()).collect()
    }

    /// Coefficient of `var^power`, as a polynomial free of `var`.
    pub fn coefficient_of(&self, index: usize, power: u32) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponent(index) == power)
            .map(|(m, c)| (m.with_exponent(index, 0), c.clone()));
        Polynomial::from_terms(&self.vars, terms)
    }

    /// Leading term under graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Exact evaluation with values looked up by variable name.
    pub fn eval(&self, point: &BTreeMap<String, Rational>) -> Result<Rational, PolyError> {
        let values: Vec<Option<Rational>> = self.vars.names().iter().map(|n| point.get(n).cloned()).collect();
        self.eval_indexed(&values)
    }

    /// Exact evaluation with values indexed by table position.
    pub fn eval_indexed(&self, values: &[Option<Rational>]) -> Result<Rational, PolyError> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values
                    .get(i)
                    .and_then(Option::as_ref)
                    .ok_or_else(|| PolyError::Unassigned(self.vars.name(i).to_string()))?;
                term *= num_traits::pow(v.clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    pub fn eval_f64(&self, values: &[Option<f64>]) -> Result<f64, PolyError> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut term = rational::to_f64(c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values
                    .get(i)
                    .copied()
                    .flatten()
                    .ok_or_else(|| PolyError::Unassigned(self.vars.name(i).to_string()))?;
                term *= v.powi(e as i32);
            }
            total += term;
        }
        Ok(total)
    }

    /// Replaces every assigned variable by its value and keeps the rest symbolic.
    pub fn partial_eval(&self, values: &[Option<Rational>]) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = m.exponents().to_vec();
            for (i, e) in exps.iter_mut().enumerate() {
                if *e == 0 {
                    continue;
                }
                if let Some(Some(v)) = values.get(i) {
                    coeff *= num_traits::pow(v.clone(), *e as usize);
                    *e = 0;
                }
            }
            out.add_term(Monomial::from_exponents(exps), coeff);
        }
        out
    }

    /// Replaces every occurrence of the variable at `index` by `q`.
    pub fn substitute(&self, index: usize, q: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_table(q)?;
        let mut powers: Vec<Polynomial> = vec![Polynomial::one(&self.vars)];
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(index) as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * q;
                powers.push(next);
            }
            let rest = Polynomial::monomial(&self.vars, m.with_exponent(index, 0), c.clone());
            out = &out + &(&rest * &powers[e]);
        }
        Ok(out)
    }

    pub fn substitute_var(&self, name: &str, q: &Polynomial) -> Result<Polynomial, PolyError> {
        self.substitute(self.vars.require(name)?, q)
    }

    /// Rewrites `var^2 -> rhs` until the degree in `var` is at most one.
    /// The result agrees with `self` modulo the ideal `(var^2 - rhs)`.
    pub fn reduce_square(&self, index: usize, rhs: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_table(rhs)?;
        if rhs.degree_in(index) > 0 {
            return Err(PolyError::RhsDependsOnVariable(self.vars.name(index).to_string()));
        }
        let mut powers: Vec<Polynomial> = vec![Polynomial::one(&self.vars)];
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(index);
            let k = (e / 2) as usize;
            while powers.len() <= k {
                let next = &powers[powers.len() - 1] * rhs;
                powers.push(next);
            }
            let rest = Polynomial::monomial(&self.vars, m.with_exponent(index, e % 2), c.clone());
            out = &out + &(&rest * &powers[k]);
        }
        Ok(out)
    }

    pub fn reduce_square_var(&self, name: &str, rhs: &Polynomial) -> Result<Polynomial, PolyError> {
        self.reduce_square(self.vars.require(name)?, rhs)
    }

    /// Moves the polynomial onto another table that contains every variable
    /// it actually uses.
    pub fn retable(&self, target: &Arc<VariableTable>) -> Result<Polynomial, PolyError> {
        let mut map = vec![None; self.vars.len()];
        for i in self.variables() {
            map[i] = Some(target.require(self.vars.name(i))?);
        }
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x > 0 {
                    e[map[i].expect("mapped above")] = x;
                }
            }
            (Monomial::from_exponents(e), c.clone())
        });
        Ok(Polynomial::from_terms(target, terms))
    }

    /// Multiplies through by the least common denominator and makes the
    /// leading coefficient positive. Useful for comparing relations up to a
    /// constant factor.
    pub fn primitive(&self) -> Polynomial {
        let Some((_, lc)) = self.leading_term() else {
            return self.clone();
        };
        let lc = lc.clone();
        self.scale(&(Rational::one() / lc))
    }

    fn fmt_monomial(&self, m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in m.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(self.vars.name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.same_table(other) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl fmt::Display for Polynomial {
    /// Canonical expression string: terms in descending graded-lex order,
    /// parseable by [`parse_polynomial`](super::parse_polynomial).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                self.fmt_monomial(m, f)?;
            } else {
                write!(f, "{abs}*")?;
                self.fmt_monomial(m, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

// Operator impls panic on mismatched tables; use the `checked_*` methods
// when tables may differ.
impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("polynomials over different variable tables")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("polynomials over different variable tables")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("polynomials over different variable tables")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactpoly::rational::{int, ratio};

    fn std_var(name: &str) -> Polynomial {
        Polynomial::var(&VariableTable::standard(), name).unwrap()
    }

    #[test]
    fn doubling_and_identity() {
        let t = VariableTable::standard();
        let b = std_var("beta");
        let half_b2 = (&b * &b).scale(&ratio(1, 2));
        assert_eq!(&half_b2 + &half_b2, &b * &b);
        assert_eq!(&half_b2 + &Polynomial::zero(&t), half_b2);
        assert_eq!(&half_b2 * &Polynomial::one(&t), half_b2);
    }

    #[test]
    fn hand_expansions() {
        let a = std_var("alpha");
        let b = std_var("beta");
        let lhs = &(&a * &a) - &(&a * &b);
        assert_eq!(&lhs + &(&a * &b), &a * &a);
        assert_eq!(&(&a + &b) * &(&a - &b), &(&a * &a) - &(&b * &b));
    }

    #[test]
    fn expand_then_fix_eta() {
        // (2*eta - beta)(2*eta + alpha) at eta = 1 is 4 + 2*alpha - 2*beta - alpha*beta
        let t = VariableTable::standard();
        let a = std_var("alpha");
        let b = std_var("beta");
        let eta = std_var("eta");
        let two = Polynomial::integer(&t, 2);
        let p = &(&(&two * &eta) - &b) * &(&(&two * &eta) + &a);
        let fixed = p.substitute_var("eta", &Polynomial::one(&t)).unwrap();
        let expected = &(&(&Polynomial::integer(&t, 4) + &a.scale(&int(2))) - &b.scale(&int(2))) - &(&a * &b);
        assert_eq!(fixed, expected);
    }

    #[test]
    fn evaluation() {
        let b = std_var("beta");
        let p = (&b * &b).scale(&ratio(3, 2));
        let point = BTreeMap::from([("beta".to_string(), int(2))]);
        assert_eq!(p.eval(&point).unwrap(), int(6));
        assert!(matches!(
            std_var("alpha").eval(&point),
            Err(PolyError::Unassigned(name)) if name == "alpha"
        ));
    }

    #[test]
    fn forced_cancellation_by_substitution() {
        let t = VariableTable::standard();
        let p = &std_var("beta") - &std_var("eta");
        let q = p.substitute_var("beta", &std_var("eta")).unwrap();
        let q = q.substitute_var("eta", &Polynomial::one(&t)).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn square_reduction() {
        let t = VariableTable::standard();
        let a = std_var("alpha");
        let cube = a.pow(3);
        assert_eq!(cube.reduce_square_var("alpha", &Polynomial::one(&t)).unwrap(), a);
        assert!(matches!(cube.reduce_square_var("alpha", &a), Err(PolyError::RhsDependsOnVariable(_))));
    }

    #[test]
    fn display_is_canonical() {
        let a = std_var("alpha");
        let b = std_var("beta");
        let p = &(&a * &a).scale(&ratio(-1, 2)) + &(&b.scale(&int(3)) - &Polynomial::integer(a.vars(), 1));
        assert_eq!(p.to_string(), "-1/2*alpha^2 + 3*beta - 1");
        assert_eq!(Polynomial::zero(a.vars()).to_string(), "0");
    }

    #[test]
    fn mismatched_tables() {
        let other = VariableTable::new(["alpha"]).unwrap();
        let x = Polynomial::var(&other, "alpha").unwrap();
        assert!(matches!(x.checked_add(&std_var("alpha")), Err(PolyError::TableMismatch)));
        assert!(matches!(x.checked_mul(&std_var("alpha")), Err(PolyError::TableMismatch)));
    }
}
