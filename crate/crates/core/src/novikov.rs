//! Novikov-style formal sums `sum c * alpha^k * T^lambda` with rational `lambda`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::lincomb::Scalar;
use crate::rational::Rational;

/// Exponent pair `(lambda, k)` of a monomial `alpha^k T^lambda`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NovikovMonomial {
    pub t: Rational,
    pub alpha: i64,
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct NovikovScalar {
    terms: BTreeMap<NovikovMonomial, Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarOp {
    Add,
    Mul,
}

impl NovikovScalar {
    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, Rational::zero())
    }

    /// `c * alpha^k * T^t`.
    pub fn monomial(c: Rational, alpha: i64, t: Rational) -> Self {
        let mut out = NovikovScalar::default();
        out.add_monomial(NovikovMonomial { t, alpha }, c);
        out
    }

    pub fn t_power(t: Rational) -> Self {
        Self::monomial(Rational::one(), 0, t)
    }

    /// `alpha * T^lambda`, the basic holonomy-weighted area term.
    pub fn alpha_t(lambda: &Rational) -> Self {
        Self::monomial(Rational::one(), 1, lambda.clone())
    }

    fn add_monomial(&mut self, m: NovikovMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NovikovMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: i64, t: &Rational) -> Rational {
        self.terms
            .get(&NovikovMonomial { t: t.clone(), alpha })
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = NovikovScalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn normalize(&self) -> Self {
        let mut out = NovikovScalar::default();
        for (m, c) in &self.terms {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }
}

/// Exact sum or product of two Novikov scalars.
pub fn scalar_arithmetic(x: &NovikovScalar, y: &NovikovScalar, op: ScalarOp) -> NovikovScalar {
    match op {
        ScalarOp::Add => x + y,
        ScalarOp::Mul => x * y,
    }
}

impl<'a> Add<&'a NovikovScalar> for &'a NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: &NovikovScalar) -> NovikovScalar {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_monomial(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a NovikovScalar> for &'a NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: &NovikovScalar) -> NovikovScalar {
        let mut out = NovikovScalar::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_monomial(
                    NovikovMonomial { t: &m1.t + &m2.t, alpha: m1.alpha + m2.alpha },
                    c1 * c2,
                );
            }
        }
        out
    }
}

impl Add for NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: NovikovScalar) -> NovikovScalar {
        &self + &rhs
    }
}

impl Mul for NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: NovikovScalar) -> NovikovScalar {
        &self * &rhs
    }
}

impl Neg for NovikovScalar {
    type Output = NovikovScalar;
    fn neg(self) -> NovikovScalar {
        NovikovScalar {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Zero for NovikovScalar {
    fn zero() -> Self {
        NovikovScalar::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for NovikovScalar {
    fn one() -> Self {
        NovikovScalar::constant(Rational::one())
    }
}

impl Scalar for NovikovScalar {
    fn add_in_place(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_monomial(m.clone(), c.clone());
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl From<Rational> for NovikovScalar {
    fn from(c: Rational) -> Self {
        NovikovScalar::constant(c)
    }
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut parts = Vec::new();
            if !mag.is_one() || (m.alpha == 0 && m.t.is_zero()) {
                parts.push(mag.to_string());
            }
            match m.alpha {
                0 => {}
                1 => parts.push("α".to_string()),
                k => parts.push(format!("α^{k}")),
            }
            if !m.t.is_zero() {
                if m.t.is_one() {
                    parts.push("T".to_string());
                } else {
                    parts.push(format!("T^{}", m.t));
                }
            }
            write!(f, "{}", parts.join("·"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> std::ops::Sub<&'a NovikovScalar> for &'a NovikovScalar {
    type Output = NovikovScalar;
    fn sub(self, rhs: &NovikovScalar) -> NovikovScalar {
        self + &(-rhs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn exponents_add() {
        let h = NovikovScalar::t_power(q(1, 2));
        assert_eq!(scalar_arithmetic(&h, &h, ScalarOp::Mul), NovikovScalar::t_power(q(1, 1)));
    }

    #[test]
    fn alpha_symbol_algebra() {
        let a = NovikovScalar::alpha_t(&q(3, 7));
        let sq = scalar_arithmetic(&a, &a, ScalarOp::Mul);
        assert_eq!(sq, NovikovScalar::monomial(q(1, 1), 2, q(6, 7)));
    }

    #[test]
    fn cancellation() {
        let lam = q(1, 3);
        let x = &NovikovScalar::one() + &NovikovScalar::alpha_t(&lam);
        let y = NovikovScalar::constant(q(-1, 1));
        assert_eq!(scalar_arithmetic(&x, &y, ScalarOp::Add), NovikovScalar::alpha_t(&lam));
    }

    #[test]
    fn display() {
        let x = &NovikovScalar::one() - &NovikovScalar::alpha_t(&q(1, 2));
        assert_eq!(x.to_string(), "1 - α·T^1/2");
    }
}
