use std::cmp::Ordering;

/// Exponent vector, one entry per variable of the owning table.
///
/// Ordered graded-lexicographically: total degree first, then the
/// exponent of the earliest variable in the table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, index: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[index] = power;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(b, a)| b - a).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn with_exponent(&self, index: usize, power: u32) -> Monomial {
        let mut e = self.0.clone();
        e[index] = power;
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let x = Monomial::var(2, 0, 1);
        let y = Monomial::var(2, 1, 1);
        let y2 = Monomial::var(2, 1, 2);
        let one = Monomial::one(2);
        assert!(one < y);
        assert!(y < x);
        assert!(x < y2);
        assert!(x.mul(&y) < Monomial::var(2, 0, 2));
    }

    #[test]
    fn division_helpers() {
        let a = Monomial::from_exponents(vec![2, 1]);
        let b = Monomial::from_exponents(vec![1, 1]);
        assert!(b.divides(&a));
        assert_eq!(b.quotient_of(&a), Monomial::from_exponents(vec![1, 0]));
        assert_eq!(a.lcm(&Monomial::from_exponents(vec![0, 3])), Monomial::from_exponents(vec![2, 3]));
    }
}
