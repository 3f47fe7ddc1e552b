//! Finite formal sums over an ordered label set.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// Coefficient ring for [`LinearCombination`].
pub trait Scalar: Clone + PartialEq + fmt::Debug + Zero + One + Neg<Output = Self> {
    fn add_in_place(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Scalar for Rational {
    fn add_in_place(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Sparse sum `sum c_l * l`; never stores a zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound(
    serialize = "L: Serialize + Ord, C: Serialize",
    deserialize = "L: Deserialize<'de> + Ord, C: Deserialize<'de>"
))]
pub struct LinearCombination<L: Ord, C = Rational> {
    #[serde(with = "pairs")]
    terms: BTreeMap<L, C>,
}

mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S, L, C>(m: &BTreeMap<L, C>, s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        L: Serialize,
        C: Serialize,
    {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, D, L, C>(d: D) -> Result<BTreeMap<L, C>, D::Error>
    where
        D: Deserializer<'de>,
        L: Deserialize<'de> + Ord,
        C: Deserialize<'de>,
    {
        let v: Vec<(L, C)> = Vec::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}

impl<L: Ord, C> Default for LinearCombination<L, C> {
    fn default() -> Self {
        LinearCombination { terms: BTreeMap::new() }
    }
}

impl<L, C> LinearCombination<L, C>
where
    L: Ord + Clone,
    C: Scalar,
{
    pub fn new() -> Self {
        Self::default()
    }

    /// The single term `1 * l`.
    pub fn basis(l: L) -> Self {
        Self::term(l, C::one())
    }

    pub fn term(l: L, c: C) -> Self {
        let mut out = Self::new();
        out.add_term(l, c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (L, C)>>(it: I) -> Self {
        let mut out = Self::new();
        for (l, c) in it {
            out.add_term(l, c);
        }
        out
    }

    pub fn add_term(&mut self, l: L, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&l) {
            Some(v) => {
                v.add_in_place(&c);
                if v.is_zero() {
                    self.terms.remove(&l);
                }
            }
            None => {
                self.terms.insert(l, c);
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        for (l, v) in &other.terms {
            self.add_term(l.clone(), v.mul_ref(c));
        }
    }

    pub fn scaled(&self, c: &C) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-C::one())
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &C::one());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-C::one());
        out
    }

    pub fn coefficient(&self, l: &L) -> C {
        self.terms.get(l).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, &C)> {
        self.terms.iter()
    }

    pub fn labels(&self) -> impl Iterator<Item = &L> {
        self.terms.keys()
    }

    /// Relabel every term; colliding labels are summed.
    pub fn map_labels<M: Ord + Clone, F: Fn(&L) -> M>(&self, f: F) -> LinearCombination<M, C> {
        LinearCombination::from_terms(self.terms.iter().map(|(l, c)| (f(l), c.clone())))
    }

    /// Extend a map on labels linearly.
    pub fn apply<M, F>(&self, f: F) -> LinearCombination<M, C>
    where
        M: Ord + Clone,
        F: Fn(&L) -> LinearCombination<M, C>,
    {
        let mut out = LinearCombination::new();
        for (l, c) in &self.terms {
            out.add_scaled(&f(l), c);
        }
        out
    }

    /// Extend a bilinear map on labels.
    pub fn bilinear<R, M, F>(&self, other: &LinearCombination<R, C>, f: F) -> LinearCombination<M, C>
    where
        R: Ord + Clone,
        M: Ord + Clone,
        F: Fn(&L, &R) -> LinearCombination<M, C>,
    {
        let mut out = LinearCombination::new();
        for (l, c) in &self.terms {
            for (r, d) in other.iter() {
                out.add_scaled(&f(l, r), &c.mul_ref(d));
            }
        }
        out
    }

    /// Drop and re-insert every term, which is the identity on normalized values.
    pub fn normalize(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(l, c)| (l.clone(), c.clone())))
    }
}

impl<L: Ord + fmt::Debug, C: fmt::Debug> fmt::Debug for LinearCombination<L, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (l, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?}){l:?}")?;
        }
        Ok(())
    }
}

impl<L: Ord + fmt::Display, C: fmt::Display + PartialEq + One + Zero + Clone> fmt::Display
    for LinearCombination<L, C>
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (l, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{l}")?;
            } else {
                write!(f, "({c})·{l}")?;
            }
        }
        Ok(())
    }
}

impl<L: Ord + Clone, C> FromIterator<(L, C)> for LinearCombination<L, C>
where
    C: Scalar,
{
    fn from_iter<I: IntoIterator<Item = (L, C)>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    type Lc = LinearCombination<&'static str>;

    #[test]
    fn cancels_to_empty() {
        let mut v = Lc::term("a", q(1, 2));
        v.add_term("a", q(-1, 2));
        assert!(v.is_zero());
        assert_eq!(v, Lc::new());
    }

    #[test]
    fn bilinear_extension() {
        let a = Lc::from_terms([("x", q(2, 1)), ("y", q(1, 1))]);
        let b = Lc::from_terms([("x", q(1, 1)), ("y", q(-1, 1))]);
        let prod: LinearCombination<String> =
            a.bilinear(&b, |l, r| LinearCombination::basis(format!("{l}{r}")));
        assert_eq!(prod.coefficient(&"xx".to_string()), q(2, 1));
        assert_eq!(prod.coefficient(&"xy".to_string()), q(-2, 1));
        assert_eq!(prod.coefficient(&"yy".to_string()), q(-1, 1));
        assert_eq!(prod.len(), 4);
    }
}
