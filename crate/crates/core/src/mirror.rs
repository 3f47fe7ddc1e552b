//! Laurent polynomials in the mirror chart coordinates and the wall-crossing
//! substitutions between them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::Rational;
use crate::report::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MirrorError {
    #[error("cannot invert the image of {0}: it is not a monomial")]
    NotInvertible(Var),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown substitution {0}")]
    UnknownMap(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    U,
    V,
    Z1,
    Z2,
    Z3,
    Z4,
    /// `ẑ1`
    Zh1,
    /// `ẑ3`
    Zh3,
    W1,
    W2,
}

const NVARS: usize = 10;

impl Var {
    pub const ALL: [Var; NVARS] = [Var::U, Var::V, Var::Z1, Var::Z2, Var::Z3, Var::Z4, Var::Zh1, Var::Zh3, Var::W1, Var::W2];

    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
            Var::Z1 => "z1",
            Var::Z2 => "z2",
            Var::Z3 => "z3",
            Var::Z4 => "z4",
            Var::Zh1 => "ẑ1",
            Var::Zh3 => "ẑ3",
            Var::W1 => "w1",
            Var::W2 => "w2",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = MirrorError;
    fn from_str(s: &str) -> Result<Self, MirrorError> {
        let alias = match s {
            "zh1" => "ẑ1",
            "zh3" => "ẑ3",
            other => other,
        };
        Var::ALL.into_iter().find(|v| v.name() == alias).ok_or_else(|| MirrorError::UnknownVariable(s.to_string()))
    }
}

pub type Exponent = [i32; NVARS];

/// Finite sum of `c * prod v^e`, `e` in `Z`; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentExpression {
    terms: BTreeMap<Exponent, Rational>,
}

impl LaurentExpression {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; NVARS], c)
    }

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        let mut exp = [0; NVARS];
        exp[v.index()] = e;
        Self::monomial(exp, Rational::one())
    }

    pub fn monomial(e: Exponent, c: Rational) -> Self {
        let mut out = Self::zero();
        out.add_term(e, c);
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Variables with a nonzero exponent in some term.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|v| self.terms.keys().any(|e| e[v.index()] != 0)).collect()
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scaled(&-Rational::one()))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, d)| (*e, d * c)))
    }

    pub fn times(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = *e1;
                for (x, y) in e.iter_mut().zip(e2) {
                    *x += y;
                }
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `self^n`; negative powers only for monomials.
    pub fn pow(&self, n: i32) -> Option<Self> {
        if n < 0 {
            return self.inverse()?.pow(-n);
        }
        let mut out = Self::one();
        for _ in 0..n {
            out = out.times(self);
        }
        Some(out)
    }

    /// Inverse of a single term.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        Some(Self::monomial(e.map(|x| -x), c.recip()))
    }
}

impl fmt::Display for LaurentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k > 0 {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            let factors: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[v.index()] != 0)
                .map(|v| match e[v.index()] {
                    1 => v.name().to_string(),
                    p => format!("{}^{p}", v.name()),
                })
                .collect();
            match (mag.is_one(), factors.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (true, false) => f.write_str(&factors.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", factors.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Images of some variables; the others are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMap {
    pub name: String,
    images: BTreeMap<Var, LaurentExpression>,
}

fn x(v: Var) -> LaurentExpression {
    LaurentExpression::var(v)
}

fn one_plus(v: Var) -> LaurentExpression {
    LaurentExpression::one().plus(&x(v))
}

impl SubstitutionMap {
    pub fn new(name: &str) -> Self {
        SubstitutionMap { name: name.to_string(), images: BTreeMap::new() }
    }

    pub fn with(mut self, v: Var, image: LaurentExpression) -> Self {
        self.images.insert(v, image);
        self
    }

    pub fn image(&self, v: Var) -> LaurentExpression {
        self.images.get(&v).cloned().unwrap_or_else(|| x(v))
    }

    /// First wall: `u -> ẑ1 (1 + w1)`.
    pub fn wall_one() -> Self {
        Self::new("wallI").with(Var::U, x(Var::Zh1).times(&one_plus(Var::W1)))
    }

    /// Second wall: `ẑ1 -> z1 (1 + w2)`, `ẑ3 -> z3 (1 + w2)`.
    pub fn wall_two() -> Self {
        Self::new("wallII")
            .with(Var::Zh1, x(Var::Z1).times(&one_plus(Var::W2)))
            .with(Var::Zh3, x(Var::Z3).times(&one_plus(Var::W2)))
    }

    /// `w1 = ẑ3 / ẑ1`.
    pub fn expand_w1() -> Self {
        Self::new("w1").with(Var::W1, x(Var::Zh3).times(&LaurentExpression::var_pow(Var::Zh1, -1)))
    }

    /// `w2 = z2 / z1`.
    pub fn expand_w2() -> Self {
        Self::new("w2").with(Var::W2, x(Var::Z2).times(&LaurentExpression::var_pow(Var::Z1, -1)))
    }

    /// `z4 = z2 z3 / z1`.
    pub fn relation_z4() -> Self {
        Self::new("z4").with(Var::Z4, x(Var::Z2).times(&x(Var::Z3)).times(&LaurentExpression::var_pow(Var::Z1, -1)))
    }

    /// `v = 1 / z1`.
    pub fn chart_v() -> Self {
        Self::new("v").with(Var::V, LaurentExpression::var_pow(Var::Z1, -1))
    }

    pub const NAMES: [&'static str; 6] = ["wallI", "wallII", "w1", "w2", "z4", "v"];

    pub fn named(name: &str) -> Result<Self, MirrorError> {
        match name {
            "wallI" => Ok(Self::wall_one()),
            "wallII" => Ok(Self::wall_two()),
            "w1" => Ok(Self::expand_w1()),
            "w2" => Ok(Self::expand_w2()),
            "z4" => Ok(Self::relation_z4()),
            "v" => Ok(Self::chart_v()),
            _ => Err(MirrorError::UnknownMap(name.to_string())),
        }
    }
}

/// Replace every variable by its image.
pub fn substitute(e: &LaurentExpression, s: &SubstitutionMap) -> Result<LaurentExpression, MirrorError> {
    let mut powers: BTreeMap<(Var, i32), LaurentExpression> = BTreeMap::new();
    let mut out = LaurentExpression::zero();
    for (exp, c) in e.terms() {
        let mut term = LaurentExpression::constant(c.clone());
        for v in Var::ALL {
            let k = exp[v.index()];
            if k == 0 {
                continue;
            }
            if let std::collections::btree_map::Entry::Vacant(slot) = powers.entry((v, k)) {
                slot.insert(s.image(v).pow(k).ok_or(MirrorError::NotInvertible(v))?);
            }
            term = term.times(&powers[&(v, k)]);
        }
        out = out.plus(&term);
    }
    Ok(out)
}

/// Apply the maps left to right.
pub fn substitute_chain(e: &LaurentExpression, maps: &[SubstitutionMap]) -> Result<LaurentExpression, MirrorError> {
    maps.iter().try_fold(e.clone(), |acc, m| substitute(&acc, m))
}

/// `z1 + z2 + z3 + z2 z3 / z1`.
pub fn large_r_image() -> LaurentExpression {
    x(Var::Z1)
        .plus(&x(Var::Z2))
        .plus(&x(Var::Z3))
        .plus(&x(Var::Z2).times(&x(Var::Z3)).times(&LaurentExpression::var_pow(Var::Z1, -1)))
}

/// `z1 + z2 + z3 + z4`.
pub fn large_r_superpotential() -> LaurentExpression {
    [Var::Z1, Var::Z2, Var::Z3, Var::Z4].into_iter().map(x).fold(LaurentExpression::zero(), |a, b| a.plus(&b))
}

fn identity_check(report: &mut VerificationReport, id: &str, got: Result<LaurentExpression, MirrorError>, want: &LaurentExpression) {
    match got {
        Ok(g) => {
            let ok = g == *want;
            report.check(id, ok, if ok { format!("{g}") } else { format!("{g} != {want}") });
        }
        Err(e) => report.check(id, false, e.to_string()),
    }
}

/// Both wall-crossing maps, their composition, and the agreement of the two
/// superpotentials.
pub fn verify_wall_crossing() -> VerificationReport {
    let mut report = VerificationReport::new("wall-crossing");
    let (w1, w2) = (SubstitutionMap::wall_one(), SubstitutionMap::wall_two());
    let (e1, e2) = (SubstitutionMap::expand_w1(), SubstitutionMap::expand_w2());
    let rel = SubstitutionMap::relation_z4();
    let u = x(Var::U);
    let hat_sum = x(Var::Zh1).plus(&x(Var::Zh3));
    report.param("maps", "wallI, w1, wallII, w2");

    identity_check(&mut report, "wallI/u", substitute_chain(&u, &[w1.clone(), e1.clone()]), &hat_sum);
    let z13 = x(Var::Z1).plus(&x(Var::Z3));
    let want = z13.times(&one_plus(Var::W2));
    identity_check(&mut report, "wallII/ẑ1+ẑ3", substitute(&hat_sum, &w2), &want);
    let composed = substitute_chain(&u, &[w1.clone(), e1.clone(), w2.clone(), e2.clone()]);
    identity_check(&mut report, "composed/u", composed.clone(), &large_r_image());

    let rel_zero = substitute(&large_r_image().minus(&large_r_superpotential()), &rel);
    identity_check(&mut report, "relation/z4", rel_zero, &LaurentExpression::zero());
    match composed {
        Ok(c) => {
            let diff = substitute(&c.minus(&large_r_superpotential()), &rel);
            identity_check(&mut report, "superpotential", diff, &LaurentExpression::zero());
        }
        Err(e) => report.check("superpotential", false, e.to_string()),
    }

    match substitute_chain(&u, &[w2.clone(), e2.clone(), w1.clone(), e1.clone()]) {
        Ok(rev) => {
            let differs = rev != large_r_image();
            report.check("order", differs, format!("reversed order gives {rev}"));
        }
        Err(e) => report.check("order", false, e.to_string()),
    }

    // v ẑ1 = 1 + w2 once v = 1/z1
    let chart = substitute_chain(&x(Var::V).times(&x(Var::Zh1)), &[w2.clone(), SubstitutionMap::chart_v()]);
    identity_check(&mut report, "chart/v", chart, &one_plus(Var::W2));
    // u v = (1 + w1)(1 + w2) with u = ẑ1 (1 + w1), v ẑ1 = 1 + w2
    let uv = SubstitutionMap::new("uv")
        .with(Var::U, x(Var::Zh1).times(&one_plus(Var::W1)))
        .with(Var::V, LaurentExpression::var_pow(Var::Zh1, -1).times(&one_plus(Var::W2)));
    identity_check(
        &mut report,
        "conifold-equation",
        substitute(&u.times(&x(Var::V)), &uv),
        &one_plus(Var::W1).times(&one_plus(Var::W2)),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_wall() {
        let got = substitute_chain(&x(Var::U), &[SubstitutionMap::wall_one(), SubstitutionMap::expand_w1()]).unwrap();
        assert_eq!(got, x(Var::Zh1).plus(&x(Var::Zh3)));
        assert_eq!(got.to_string(), "ẑ1 + ẑ3");
    }

    #[test]
    fn identity_map() {
        let e = large_r_image().times(&x(Var::W1));
        assert_eq!(substitute(&e, &SubstitutionMap::new("id")).unwrap(), e);
    }

    #[test]
    fn second_wall() {
        let got = substitute(&x(Var::Zh1).plus(&x(Var::Zh3)), &SubstitutionMap::wall_two()).unwrap();
        let want = x(Var::Z1).plus(&x(Var::Z3)).times(&one_plus(Var::W2));
        assert_eq!(got, want);
        let expanded = substitute(&got, &SubstitutionMap::expand_w2()).unwrap();
        assert_eq!(expanded, large_r_image());
    }

    #[test]
    fn non_unit_denominator() {
        let e = LaurentExpression::var_pow(Var::Zh1, -1);
        assert_eq!(substitute(&e, &SubstitutionMap::wall_two()), Err(MirrorError::NotInvertible(Var::Zh1)));
        let inv = substitute(&LaurentExpression::var_pow(Var::W2, -2), &SubstitutionMap::expand_w2()).unwrap();
        let mut e = [0; NVARS];
        e[Var::Z1.index()] = 2;
        e[Var::Z2.index()] = -2;
        assert_eq!(inv, LaurentExpression::monomial(e, Rational::one()));
    }

    #[test]
    fn report_passes() {
        let r = verify_wall_crossing();
        assert!(r.passed(), "{:?}", r.records);
        assert_eq!(r.summary.total, 8);
    }

    #[test]
    fn normalization() {
        let e = x(Var::Z1).minus(&x(Var::Z1));
        assert!(e.is_zero());
        assert_eq!(e.to_string(), "0");
        let d = large_r_image().scaled(&Rational::new(-1, 2));
        assert_eq!(d.to_string(), "-1/2*z1 - 1/2*z2 - 1/2*z3 - 1/2*z1^-1*z2*z3");
    }

    #[test]
    fn names() {
        for n in SubstitutionMap::NAMES {
            assert_eq!(SubstitutionMap::named(n).unwrap().name, n);
        }
        assert_eq!("zh1".parse::<Var>().unwrap(), Var::Zh1);
        assert!("q".parse::<Var>().is_err());
    }
}
