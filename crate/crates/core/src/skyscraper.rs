//! Action of the Hom bases on the skyscraper at `(x, y, t1, t2) = (0, 1, 1 + αT^λ, 0)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::novikov::NovikovScalar;
use crate::rational::Rational;
use crate::report::VerificationReport;
use crate::sheaf::{basis_elements, compose_closed_form, BasisMorphism, CoordinatePolynomial, Morphism, Sector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkyscraperError {
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(Rational),
}

/// The point with `w1 = -1`, `w2 = αT^λ` in the chart `[x:y] = [0:1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkyscraperPoint {
    lambda: Rational,
}

impl SkyscraperPoint {
    pub fn new(lambda: Rational) -> Result<Self, SkyscraperError> {
        if !lambda.is_positive() {
            return Err(SkyscraperError::NonPositiveLambda(lambda));
        }
        Ok(SkyscraperPoint { lambda })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// `αT^λ`, the value of `w2`.
    pub fn w2(&self) -> NovikovScalar {
        NovikovScalar::alpha_t(&self.lambda)
    }

    /// Values of `(x, y, t1, t2)`.
    pub fn coordinates(&self) -> [NovikovScalar; 4] {
        [
            NovikovScalar::zero(),
            NovikovScalar::one(),
            &NovikovScalar::one() + &self.w2(),
            NovikovScalar::zero(),
        ]
    }
}

fn sign_power(i: i64) -> NovikovScalar {
    NovikovScalar::constant(lead_sign(i))
}

/// `(-1)^i (αT^λ)^j` scaled by the value of the leading monomial.
pub fn skyscraper_action(b: &BasisMorphism, p: &SkyscraperPoint) -> NovikovScalar {
    let lead = match (b.sector, b.a.halves()) {
        (Sector::PP | Sector::PPrime, 0) | (Sector::Q, 1) => NovikovScalar::one(),
        (Sector::R, -1) => &NovikovScalar::one() + &p.w2(),
        _ => return NovikovScalar::zero(),
    };
    // (-1)^i1 (αT^λ)^i2, also for negative i2
    let weight = NovikovScalar::monomial(lead_sign(b.i1), b.i2, p.lambda() * &Rational::from(b.i2));
    &lead * &weight
}

fn lead_sign(i: i64) -> Rational {
    Rational::from(if i % 2 == 0 { 1 } else { -1 })
}

/// Linear extension of [`skyscraper_action`].
pub fn skyscraper_action_linear(m: &Morphism, p: &SkyscraperPoint) -> NovikovScalar {
    let mut out = NovikovScalar::zero();
    for (b, c) in m.iter() {
        out = &out + &(&skyscraper_action(b, p) * &NovikovScalar::constant(c.clone()));
    }
    out
}

/// Substitute the point's coordinates into a polynomial.
pub fn evaluate_polynomial(poly: &CoordinatePolynomial, p: &SkyscraperPoint) -> NovikovScalar {
    let coords = p.coordinates();
    let mut out = NovikovScalar::zero();
    for (e, c) in poly.terms() {
        let mut term = NovikovScalar::constant(c.clone());
        for (v, k) in coords.iter().zip(e.iter()) {
            term = &term * &v.pow(*k);
        }
        out = &out + &term;
    }
    out
}

/// The evaluation table for `|a| <= max_a`, `0 <= i1, i2 <= max_i`, checked
/// against the expected `(-1)^i (αT^λ)^j` pattern and against multiplicativity.
pub fn skyscraper_report(p: &SkyscraperPoint, max_a: i64, max_i: i64) -> VerificationReport {
    let mut report = VerificationReport::new("skyscraper");
    report.param("lambda", p.lambda()).param("max_a", max_a).param("max_i", max_i);
    let w2 = p.w2();
    let mut table_ok = true;
    let mut entries = 0;
    for sector in [Sector::PP, Sector::Q] {
        for b in basis_elements(sector, max_a, 0..=max_i) {
            let expected = if (sector == Sector::PP && b.a.halves() == 0) || (sector == Sector::Q && b.a.halves() == 1) {
                &sign_power(b.i1) * &w2.pow(b.i2 as u32)
            } else {
                NovikovScalar::zero()
            };
            entries += 1;
            let got = skyscraper_action(&b, p);
            if got != expected {
                table_ok = false;
                report.check(format!("table/{b}"), false, format!("got {got}, expected {expected}"));
            }
        }
    }
    report.check("table", table_ok, format!("{entries} entries"));
    let mut mult_ok = true;
    let mut pairs = 0;
    for fs in Sector::ALL {
        for gs in Sector::ALL {
            if Sector::compose(gs, fs).is_none() {
                continue;
            }
            let fb = basis_elements(fs, max_a, 0..=max_i);
            let gb = basis_elements(gs, max_a, 0..=max_i);
            for f in &fb {
                let vf = skyscraper_action(f, p);
                for g in &gb {
                    pairs += 1;
                    let prod = compose_closed_form(g, f).expect("composable");
                    let lhs = skyscraper_action_linear(&prod, p);
                    let rhs = &skyscraper_action(g, p) * &vf;
                    if lhs != rhs {
                        mult_ok = false;
                        report.check(format!("multiplicative/{g}.{f}"), false, format!("{lhs} != {rhs}"));
                    }
                }
            }
        }
    }
    report.check("multiplicative", mult_ok, format!("{pairs} composable pairs"));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::sheaf::basis_to_polynomial;

    fn pt() -> SkyscraperPoint {
        SkyscraperPoint::new(q(1, 2)).unwrap()
    }

    #[test]
    fn expected_values() {
        let p = pt();
        assert_eq!(skyscraper_action(&BasisMorphism::p(0, 1, 1), &p), -NovikovScalar::alpha_t(&q(1, 2)));
        assert!(skyscraper_action(&BasisMorphism::p(3, 0, 0), &p).is_zero());
        assert_eq!(
            skyscraper_action(&BasisMorphism::r(-1, 0, 0), &p),
            &NovikovScalar::one() + &NovikovScalar::alpha_t(&q(1, 2))
        );
    }

    #[test]
    fn agrees_with_substitution() {
        let p = pt();
        for sector in Sector::ALL {
            for b in basis_elements(sector, 3, 0..=3) {
                let poly = basis_to_polynomial(&b).unwrap();
                assert_eq!(skyscraper_action(&b, &p), evaluate_polynomial(&poly, &p), "{b}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        assert!(SkyscraperPoint::new(q(0, 1)).is_err());
        assert!(SkyscraperPoint::new(q(-1, 3)).is_err());
    }

    #[test]
    fn report_passes() {
        let r = skyscraper_report(&pt(), 3, 3);
        assert!(r.passed(), "{r:?}");
    }
}
