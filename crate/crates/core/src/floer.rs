//! Wrapped chords between the two Lagrangian sections, triangle counts on the
//! universal cover of the strip, and the resulting product.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lincomb::LinearCombination;
use crate::rational::{binomial, Rational};
use crate::report::{CheckStatus, VerificationReport};
use crate::sheaf::{compose_closed_form, composition_depths, kind_name, BasisMorphism, HalfInteger, Morphism, Sector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FloerError {
    #[error("collinear triangle for slopes ({m}, {n}) and labels ({a}, {b})")]
    Degenerate { m: u32, n: u32, a: HalfInteger, b: HalfInteger },
    #[error("discriminant point at a triangle vertex")]
    VertexOnDiscriminant,
    #[error("chords {g} and {f} are not composable")]
    NotComposable { g: String, f: String },
    #[error("slopes must be positive")]
    ZeroSlope,
}

/// `p_{a,i1,i2}` (and `p'`, `q`, `r`) at a wrapping slope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChordLabel {
    pub sector: Sector,
    pub a: HalfInteger,
    pub i1: i64,
    pub i2: i64,
    pub slope: u32,
}

impl ChordLabel {
    /// The sheaf-side basis element with the same indices.
    pub fn to_basis(&self) -> BasisMorphism {
        BasisMorphism { sector: self.sector, a: self.a, i1: self.i1, i2: self.i2 }
    }

    pub fn from_basis(b: &BasisMorphism, slope: u32) -> Self {
        ChordLabel { sector: b.sector, a: b.a, i1: b.i1, i2: b.i2, slope }
    }

    pub fn in_range(&self) -> bool {
        labels_at(self.sector, self.slope).contains(&self.a)
            && (0..=index_bound(self.a, self.slope)).contains(&self.i1)
            && (0..=index_bound(self.a, self.slope)).contains(&self.i2)
    }
}

impl fmt::Display for ChordLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.sector {
            Sector::PP => "p",
            Sector::PPrime => "p'",
            Sector::Q => "q",
            Sector::R => "r",
        };
        write!(f, "{letter}_{{{},{},{}}}", self.a, self.i1, self.i2)
    }
}

pub type ChordCombination = LinearCombination<ChordLabel>;

/// Values of `a` at slope `n`: integers in `[-n+1, n-1]`, or half-integers in
/// `[-n+1/2, n-1/2]` between different sections.
fn labels_at(sector: Sector, n: u32) -> Vec<HalfInteger> {
    let n = n as i64;
    if n == 0 {
        return Vec::new();
    }
    if sector.half_integer_labels() {
        (-n..n).map(|k| HalfInteger::from_halves(2 * k + 1)).collect()
    } else {
        (-n + 1..n).map(HalfInteger::from_int).collect()
    }
}

/// `floor((n - |a|) / 2)`.
fn index_bound(a: HalfInteger, n: u32) -> i64 {
    (2 * n as i64 - a.abs().halves()).div_euclid(4)
}

/// Every chord of `sector` at slope `n`.
pub fn chord_labels(sector: Sector, n: u32) -> Vec<ChordLabel> {
    let mut out = Vec::new();
    for a in labels_at(sector, n) {
        let k = index_bound(a, n);
        for i1 in 0..=k {
            for i2 in 0..=k {
                out.push(ChordLabel { sector, a, i1, i2, slope: n });
            }
        }
    }
    out
}

/// Labels of slope `max_slope` with both indices in `window`, each placed
/// at the smallest slope whose range contains it.
pub fn localized_labels(sector: Sector, max_slope: u32, window: std::ops::RangeInclusive<i64>) -> Vec<ChordLabel> {
    let mut out = Vec::new();
    for a in labels_at(sector, max_slope) {
        let slope = ((a.abs().halves() + 2) / 2) as u32;
        for i1 in window.clone() {
            for i2 in window.clone() {
                out.push(ChordLabel { sector, a, i1, i2, slope });
            }
        }
    }
    out
}

/// Triangle in the `(s, t)` plane together with the heights of the two
/// discriminant lattices `{0} x (d1 + Z)` and `{0} x (d2 + Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripTriangle {
    pub vertices: [(Rational, Rational); 3],
    pub d1: Rational,
    pub d2: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HitCount {
    pub d1: i64,
    pub d2: i64,
}

impl fmt::Display for HitCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Triangle cut out by `t = 0`, `t = n s - b` and `t = (m + n) s - (a + b)`,
/// with discriminant heights measured from the lift of the target section.
pub fn triangle_vertices(m: u32, n: u32, a: HalfInteger, b: HalfInteger, target: u8) -> Result<StripTriangle, FloerError> {
    if m == 0 || n == 0 {
        return Err(FloerError::ZeroSlope);
    }
    if n as i64 * a.halves() == m as i64 * b.halves() {
        return Err(FloerError::Degenerate { m, n, a, b });
    }
    let (mr, nr) = (Rational::from(m as i64), Rational::from(n as i64));
    let (ar, br) = (a.to_rational(), b.to_rational());
    let s2 = &ar / &mr;
    let t2 = &(&nr * &s2) - &br;
    let height = Rational::new(target as i64, 2);
    let quarter = Rational::new(1, 4);
    Ok(StripTriangle {
        vertices: [
            (&br / &nr, Rational::zero()),
            (s2, t2),
            (&(&ar + &br) / &(&mr + &nr), Rational::zero()),
        ],
        d1: &(-&quarter) - &height,
        d2: &quarter - &height,
    })
}

fn ceil(x: &Rational) -> BigInt {
    -(-x).floor()
}

/// Lattice points of both discriminants in the closed triangle.
pub fn count_discriminant_hits(tri: &StripTriangle) -> Result<HitCount, FloerError> {
    let v = &tri.vertices;
    let mut ts: Vec<Rational> = Vec::new();
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let ((s1, t1), (s2, t2)) = (&v[i], &v[j]);
        if s1.is_zero() {
            ts.push(t1.clone());
        }
        if s1.signum() * s2.signum() < 0 {
            // t at s = 0 along the edge
            let u = &(-s1) / &(s2 - s1);
            ts.push(t1 + &(&u * &(t2 - t1)));
        }
    }
    let (Some(lo), Some(hi)) = (ts.iter().min(), ts.iter().max()) else {
        return Ok(HitCount::default());
    };
    let count = |c: &Rational| -> Result<i64, FloerError> {
        for (s, t) in v.iter() {
            if s.is_zero() && (t - c).is_integer() {
                return Err(FloerError::VertexOnDiscriminant);
            }
        }
        let k = (hi - c).floor() - ceil(&(lo - c)) + BigInt::from(1);
        Ok(k.to_i64().unwrap_or(0).max(0))
    };
    Ok(HitCount { d1: count(&tri.d1)?, d2: count(&tri.d2)? })
}

fn check_composable(g: &ChordLabel, f: &ChordLabel) -> Result<Sector, FloerError> {
    Sector::compose(g.sector, f.sector).ok_or_else(|| FloerError::NotComposable { g: g.to_string(), f: f.to_string() })
}

/// The triangle for `g . f`: `f` at slope `m`, `g` at slope `n`.
pub fn triangle_for(g: &ChordLabel, f: &ChordLabel) -> Result<StripTriangle, FloerError> {
    check_composable(g, f)?;
    triangle_vertices(f.slope, g.slope, f.a, g.a, g.sector.target())
}

/// Hit counts predicted by the closed formulas of the sheaf side.
pub fn closed_form_hits(g: &ChordLabel, f: &ChordLabel) -> HitCount {
    let (d1, d2) = composition_depths(&g.to_basis(), &f.to_basis());
    HitCount { d1, d2 }
}

/// The printed piecewise formulas, for `p . p` (`min(|a|, |b|)` twice) and
/// `r . q` (`min(|a|, |b|) - 1/2`, plus one on the first count).
pub fn printed_hits(g: &ChordLabel, f: &ChordLabel) -> Option<HitCount> {
    let (b, a) = (g.a.halves(), f.a.halves());
    let opposite = a != 0 && b != 0 && (a < 0) != (b < 0);
    match (g.sector, f.sector) {
        (Sector::PP, Sector::PP) => {
            let k = if opposite { (a.abs() / 2).min(b.abs() / 2) } else { 0 };
            Some(HitCount { d1: k, d2: k })
        }
        (Sector::R, Sector::Q) => Some(if opposite {
            let k = (a.abs() - 1).min(b.abs() - 1) / 2;
            HitCount { d1: k + 1, d2: k }
        } else {
            HitCount::default()
        }),
        _ => None,
    }
}

fn hits_or_degenerate(g: &ChordLabel, f: &ChordLabel) -> Result<HitCount, FloerError> {
    match triangle_for(g, f) {
        Ok(t) => count_discriminant_hits(&t),
        Err(FloerError::Degenerate { .. }) => Ok(HitCount::default()),
        Err(e) => Err(e),
    }
}

/// `sum C(d1, s1) C(d2, s2) o_{a+b+offset, i1+j1+s1, i2+j2+s2}` at slope `m + n`,
/// with `offset` in units of `1`.
pub fn pascaleff_product_with_offset(g: &ChordLabel, f: &ChordLabel, offset: i64) -> Result<ChordCombination, FloerError> {
    let sector = check_composable(g, f)?;
    let hits = hits_or_degenerate(g, f)?;
    Ok(expand(sector, hits, g, f, offset))
}

fn expand(sector: Sector, hits: HitCount, g: &ChordLabel, f: &ChordLabel, offset: i64) -> ChordCombination {
    let base = ChordLabel {
        sector,
        a: HalfInteger::from_halves(f.a.halves() + g.a.halves() + 2 * offset),
        i1: f.i1 + g.i1,
        i2: f.i2 + g.i2,
        slope: f.slope + g.slope,
    };
    let mut out = ChordCombination::new();
    for s1 in 0..=hits.d1 {
        for s2 in 0..=hits.d2 {
            out.add_term(
                ChordLabel { i1: base.i1 + s1, i2: base.i2 + s2, ..base },
                &binomial(hits.d1, s1) * &binomial(hits.d2, s2),
            );
        }
    }
    out
}

/// Triangle product `g . f`. Collinear configurations count no hits.
pub fn pascaleff_product(g: &ChordLabel, f: &ChordLabel) -> Result<ChordCombination, FloerError> {
    pascaleff_product_with_offset(g, f, 0)
}

/// Bilinear extension of [`pascaleff_product`].
pub fn pascaleff_linear(g: &ChordCombination, f: &ChordCombination) -> Result<ChordCombination, FloerError> {
    let mut out = ChordCombination::new();
    for (gl, gc) in g.iter() {
        for (fl, fc) in f.iter() {
            out.add_scaled(&pascaleff_product(gl, fl)?, &(gc * fc));
        }
    }
    Ok(out)
}

fn to_sheaf(c: &ChordCombination) -> Morphism {
    c.map_labels(|l| l.to_basis())
}

/// Offsets tried per composition kind.
pub const OFFSET_CANDIDATES: [i64; 3] = [-1, 0, 1];

#[derive(Debug, Clone)]
pub struct RingIsomorphismCheck {
    pub max_slope: u32,
    pub localized: bool,
    /// Use these offsets instead of searching.
    pub forced_offsets: Option<BTreeMap<String, i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairComparison {
    pub pair: String,
    #[serde(rename = "floerResult")]
    pub floer_result: String,
    #[serde(rename = "sheafResult")]
    pub sheaf_result: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingIsomorphismResult {
    /// Offset per kind; `None` if no candidate works for every pair.
    pub offsets: BTreeMap<String, Option<i64>>,
    pub pairs_checked: usize,
    pub mismatches: Vec<PairComparison>,
    pub report: VerificationReport,
}

const KINDS: [(u8, u8, u8); 8] = [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)];

/// Index window of the localized check.
pub const LOCALIZED_WINDOW: (i64, i64) = (-2, 3);

fn labels_for(sector: Sector, max_slope: u32, localized: bool) -> Vec<ChordLabel> {
    if localized {
        return localized_labels(sector, max_slope, LOCALIZED_WINDOW.0..=LOCALIZED_WINDOW.1);
    }
    (1..=max_slope).flat_map(|n| chord_labels(sector, n)).collect()
}

#[derive(Default)]
struct KindTally {
    pairs: usize,
    bad: [usize; 3],
    first_bad: [Option<PairComparison>; 3],
    all_bad: Vec<(usize, PairComparison)>,
    printed_differs: usize,
    first_printed: Option<String>,
    errors: Vec<String>,
}

impl KindTally {
    fn merge(mut self, o: KindTally) -> KindTally {
        self.pairs += o.pairs;
        for k in 0..3 {
            self.bad[k] += o.bad[k];
            if self.first_bad[k].is_none() {
                self.first_bad[k] = o.first_bad[k].clone();
            }
        }
        self.all_bad.extend(o.all_bad);
        self.printed_differs += o.printed_differs;
        self.first_printed = self.first_printed.or(o.first_printed);
        self.errors.extend(o.errors);
        self
    }
}

impl RingIsomorphismCheck {
    pub fn new(max_slope: u32, localized: bool) -> Self {
        RingIsomorphismCheck { max_slope, localized, forced_offsets: None }
    }

    fn candidates(&self, kind: &str) -> Vec<i64> {
        match &self.forced_offsets {
            Some(m) => vec![m.get(kind).copied().unwrap_or(0)],
            None => OFFSET_CANDIDATES.to_vec(),
        }
    }

    fn tally(&self, g: &ChordLabel, f: &ChordLabel, hits: &Result<HitCount, FloerError>, candidates: &[i64], keep_all: bool) -> KindTally {
        let mut t = KindTally { pairs: 1, ..Default::default() };
        let sector = Sector::compose(g.sector, f.sector).expect("composable sectors");
        let floer = match hits {
            Ok(h) => to_sheaf(&expand(sector, *h, g, f, 0)),
            Err(e) => {
                t.errors.push(format!("{g} . {f}: {e}"));
                return t;
            }
        };
        let sheaf = compose_closed_form(&g.to_basis(), &f.to_basis()).expect("composable sectors");
        for (k, &off) in candidates.iter().enumerate() {
            // shifting every label by the same amount preserves their order
            let ok = floer.len() == sheaf.len()
                && floer.iter().zip(sheaf.iter()).all(|((l, c), (m, d))| {
                    c == d && m.a.halves() == l.a.halves() + 2 * off && (m.sector, m.i1, m.i2) == (l.sector, l.i1, l.i2)
                });
            if !ok {
                let shifted = floer.map_labels(|l| BasisMorphism { a: HalfInteger::from_halves(l.a.halves() + 2 * off), ..*l });
                t.bad[k] += 1;
                let cmp = PairComparison {
                    pair: format!("{g} . {f} @ ({}, {})", f.slope, g.slope),
                    floer_result: format!("{shifted}"),
                    sheaf_result: format!("{sheaf}"),
                    matches: false,
                };
                if keep_all {
                    t.all_bad.push((k, cmp.clone()));
                }
                if t.first_bad[k].is_none() {
                    t.first_bad[k] = Some(cmp);
                }
            }
        }
        if let Some(p) = printed_hits(g, f) {
            if p != closed_form_hits(g, f) {
                t.printed_differs += 1;
                t.first_printed
                    .get_or_insert_with(|| format!("{g} . {f}: printed {p}, geometry {}", closed_form_hits(g, f)));
            }
        }
        t
    }

    /// Compare the triangle product with the sheaf closed form on every
    /// composable pair of chords with slopes up to `max_slope`.
    pub fn run(&self) -> RingIsomorphismResult {
        let mut report = VerificationReport::new(if self.localized { "ring-isomorphism-localized" } else { "ring-isomorphism" });
        report.param("max_slope", self.max_slope).param("localized", self.localized);
        if self.localized {
            report.param("window", format!("{}..={}", LOCALIZED_WINDOW.0, LOCALIZED_WINDOW.1));
        }
        let keep_all = self.forced_offsets.is_some();
        let mut offsets = BTreeMap::new();
        let mut mismatches = Vec::new();
        let mut pairs_checked = 0;
        for (i, j, k) in KINDS {
            let fs = labels_for(Sector::between(i, j), self.max_slope, self.localized);
            let gs = labels_for(Sector::between(j, k), self.max_slope, self.localized);
            let kind = kind_name(Sector::between(j, k), Sector::between(i, j));
            let candidates = self.candidates(&kind);
            let tally = fs
                .par_iter()
                .map(|f| {
                    let mut cache: HashMap<(HalfInteger, u32), Result<HitCount, FloerError>> = HashMap::new();
                    gs.iter()
                        .map(|g| {
                            let hits = cache.entry((g.a, g.slope)).or_insert_with(|| hits_or_degenerate(g, f));
                            self.tally(g, f, hits, &candidates, keep_all)
                        })
                        .fold(KindTally::default(), KindTally::merge)
                })
                .reduce(KindTally::default, KindTally::merge);
            pairs_checked += tally.pairs;
            for e in &tally.errors {
                report.check(format!("error/{kind}"), false, e.clone());
            }
            let passing: Vec<i64> = candidates.iter().zip(&tally.bad).filter(|(_, &b)| b == 0).map(|(&o, _)| o).collect();
            let chosen = match passing.as_slice() {
                [o] => Some(*o),
                _ => None,
            };
            offsets.insert(kind.clone(), chosen);
            match chosen {
                Some(o) => report.check(format!("offset/{kind}"), true, format!("offset {o}, {} pairs", tally.pairs)),
                None => {
                    let best = (0..candidates.len()).min_by_key(|&c| tally.bad[c]).unwrap_or(0);
                    let detail = match &tally.first_bad[best] {
                        Some(c) => format!(
                            "{} of {} pairs differ at offset {}; first {}: floer {} vs sheaf {}",
                            tally.bad[best], tally.pairs, candidates[best], c.pair, c.floer_result, c.sheaf_result
                        ),
                        None => format!("offsets {passing:?} all pass"),
                    };
                    report.check(format!("offset/{kind}"), false, detail);
                    if keep_all {
                        mismatches.extend(tally.all_bad.into_iter().filter(|(c, _)| *c == best).map(|(_, p)| p));
                    } else if let Some(c) = tally.first_bad[best].clone() {
                        mismatches.push(c);
                    }
                }
            }
            if tally.printed_differs > 0 {
                report.record(
                    format!("printed/{kind}"),
                    CheckStatus::ReportedDiscrepancy,
                    format!(
                        "printed hit formula differs on {} of {} pairs; first {}",
                        tally.printed_differs,
                        tally.pairs,
                        tally.first_printed.unwrap_or_default()
                    ),
                );
            }
        }
        report.param("pairs", pairs_checked);
        RingIsomorphismResult { offsets, pairs_checked, mismatches, report }
    }
}

/// Standard check followed by the localized one.
pub fn verify_ring_isomorphism(max_slope: u32, localized: bool) -> RingIsomorphismResult {
    RingIsomorphismCheck::new(max_slope, localized).run()
}
