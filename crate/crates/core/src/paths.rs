//! Piecewise-linear paths in the punctured plane: admissibility, winding
//! numbers, line-bundle labels and the torus fibration map.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::fixtures;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("malformed path input: {0}")]
    Json(String),
    #[error("degenerate path: {0}")]
    Degenerate(String),
    #[error("expected a {expected} path")]
    WrongKind { expected: PathKind },
    #[error("path is not admissible: {0}")]
    NotAdmissible(String),
    #[error("loop passes through the origin")]
    ThroughOrigin,
    #[error("no reference bounded path for these punctures")]
    NoReference,
    #[error("bad punctures: {0}")]
    BadPunctures(String),
    #[error("point is not on the surface: {0}")]
    NotOnSurface(String),
}

/// A point of the complex plane with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Gaussian {
    pub re: Rational,
    pub im: Rational,
}

impl Gaussian {
    pub fn new(re: Rational, im: Rational) -> Self {
        Gaussian { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Gaussian { re, im: Rational::zero() }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Gaussian::new(Rational::from(re), Rational::from(im))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Gaussian {
        Gaussian::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Rational {
        self.dot(self)
    }

    /// Real part of `conj(self) * other`.
    pub fn dot(&self, other: &Gaussian) -> Rational {
        &(&self.re * &other.re) + &(&self.im * &other.im)
    }

    /// Imaginary part of `conj(self) * other`.
    pub fn cross(&self, other: &Gaussian) -> Rational {
        &(&self.re * &other.im) - &(&self.im * &other.re)
    }

    pub fn scale(&self, c: &Rational) -> Gaussian {
        Gaussian::new(&self.re * c, &self.im * c)
    }

    fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &Gaussian {
    type Output = Gaussian;
    fn add(self, o: &Gaussian) -> Gaussian {
        Gaussian::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &Gaussian {
    type Output = Gaussian;
    fn sub(self, o: &Gaussian) -> Gaussian {
        Gaussian::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &Gaussian {
    type Output = Gaussian;
    fn mul(self, o: &Gaussian) -> Gaussian {
        Gaussian::new(
            &(&self.re * &o.re) - &(&self.im * &o.im),
            &(&self.re * &o.im) + &(&self.im * &o.re),
        )
    }
}

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

fn small(x: BigInt) -> Result<i64, String> {
    x.to_i64().ok_or_else(|| format!("coordinate {x} exceeds 64 bits"))
}

/// Serialized as `[reNum, reDen, imNum, imDen]`.
impl Serialize for Gaussian {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::Error;
        let parts = [self.re.numer(), self.re.denom(), self.im.numer(), self.im.denom()];
        let mut out = [0i64; 4];
        for (o, p) in out.iter_mut().zip(parts) {
            *o = small(p).map_err(S::Error::custom)?;
        }
        out.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gaussian {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [rn, rd, im_n, im_d] = <[i64; 4]>::deserialize(d)?;
        if rd == 0 || im_d == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Gaussian::new(Rational::new(rn, rd), Rational::new(im_n, im_d)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Runs from the origin to infinity; the ends are the radial rays through
    /// the first and last vertices.
    Section,
    /// Runs from `b` to `a`.
    Bounded,
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathKind::Section => "section",
            PathKind::Bounded => "bounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PLPath {
    kind: PathKind,
    vertices: Vec<Gaussian>,
}

impl PLPath {
    pub fn new(kind: PathKind, vertices: Vec<Gaussian>) -> Result<Self, PathError> {
        let min = match kind {
            PathKind::Section => 1,
            PathKind::Bounded => 2,
        };
        if vertices.len() < min {
            return Err(PathError::Degenerate(format!("{kind} path needs at least {min} vertices")));
        }
        if let Some(i) = (1..vertices.len()).find(|&i| vertices[i] == vertices[i - 1]) {
            return Err(PathError::Degenerate(format!("vertices {} and {i} coincide", i - 1)));
        }
        if kind == PathKind::Section {
            for v in [&vertices[0], vertices.last().unwrap()] {
                if v.is_zero() {
                    return Err(PathError::Degenerate("end ray through the origin has no direction".into()));
                }
            }
        }
        Ok(PLPath { kind, vertices })
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn vertices(&self) -> &[Gaussian] {
        &self.vertices
    }

    /// The same vertices in the opposite order.
    pub fn reversed(&self) -> PLPath {
        let mut v = self.vertices.clone();
        v.reverse();
        PLPath { kind: self.kind, vertices: v }
    }

    /// Insert the point at parameter `0 < t < 1` on every segment.
    pub fn subdivided(&self, t: &Rational) -> PLPath {
        let mut out = vec![self.vertices[0].clone()];
        for w in self.vertices.windows(2) {
            out.push(&w[0] + &(&w[1] - &w[0]).scale(t));
            out.push(w[1].clone());
        }
        PLPath { kind: self.kind, vertices: out }
    }

    fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(self.vertices.len() + 1);
        if self.kind == PathKind::Section {
            out.push(Piece::segment(&Gaussian::default(), &self.vertices[0]));
        }
        for w in self.vertices.windows(2) {
            out.push(Piece::segment(&w[0], &w[1]));
        }
        if self.kind == PathKind::Section {
            let v = self.vertices.last().unwrap();
            out.push(Piece { start: v.clone(), dir: v.clone(), ray: true });
        }
        out
    }
}

/// `start + t dir` for `t` in `[0, 1]`, or `t >= 0` for a ray.
struct Piece {
    start: Gaussian,
    dir: Gaussian,
    ray: bool,
}

impl Piece {
    fn segment(p: &Gaussian, q: &Gaussian) -> Piece {
        Piece { start: p.clone(), dir: q - p, ray: false }
    }

    fn in_range(&self, t: &Rational) -> bool {
        !t.is_negative() && (self.ray || *t <= Rational::one())
    }

    fn at_end(&self, t: &Rational) -> bool {
        t.is_zero() || (!self.ray && t.is_one())
    }
}

enum Contact {
    Miss,
    Crossing(i64),
    /// Interior point of `[a, b]` at the start (`false`) or end (`true`) of the piece.
    Vertex(bool),
    Touch(String),
}

/// How a piece meets the closed segment `[a, b]`.
fn contact(piece: &Piece, a: &Gaussian, b: &Gaussian) -> Contact {
    let e = b - a;
    let d = &piece.dir;
    let ap = a - &piece.start;
    let denom = d.cross(&e);
    if denom.is_zero() {
        if !ap.cross(d).is_zero() {
            return Contact::Miss;
        }
        // collinear: compare positions along the piece
        let dd = d.norm_sqr();
        let ta = &ap.dot(d) / &dd;
        let tb = &(b - &piece.start).dot(d) / &dd;
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        let overlaps = !hi.is_negative() && (piece.ray || lo <= Rational::one());
        return if overlaps { Contact::Touch("runs along the segment".into()) } else { Contact::Miss };
    }
    let t = &ap.cross(&e) / &denom;
    let s = &ap.cross(d) / &denom;
    if !piece.in_range(&t) || s.is_negative() || s > Rational::one() {
        return Contact::Miss;
    }
    if s.is_zero() || s.is_one() {
        return Contact::Touch(format!("passes through {}", if s.is_zero() { a } else { b }));
    }
    if piece.at_end(&t) {
        return Contact::Vertex(!t.is_zero());
    }
    crossing_sign(&(a + &e.scale(&s)), d)
}

fn crossing_sign(x: &Gaussian, d: &Gaussian) -> Contact {
    match x.cross(d).signum() {
        0 => Contact::Touch("crosses radially".into()),
        sg => Contact::Crossing(sg as i64),
    }
}

/// Side of the line through `a` and `b`.
fn side(z: &Gaussian, a: &Gaussian, b: &Gaussian) -> i32 {
    (b - a).cross(&(z - a)).signum()
}

/// The two punctures `a != b` together with the reference bounded path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturedPlane {
    a: Gaussian,
    b: Gaussian,
    reference: Option<PLPath>,
}

impl PuncturedPlane {
    pub fn new(a: Gaussian, b: Gaussian, reference: Option<PLPath>) -> Result<Self, PathError> {
        if a == b {
            return Err(PathError::BadPunctures("a = b".into()));
        }
        if a.is_zero() || b.is_zero() {
            return Err(PathError::BadPunctures("punctures must be nonzero".into()));
        }
        let through_origin = (&a - &b).cross(&a).is_zero() && a.dot(&b).is_negative();
        if through_origin {
            return Err(PathError::BadPunctures("[a, b] contains the origin".into()));
        }
        if let Some(r) = &reference {
            if r.kind != PathKind::Bounded {
                return Err(PathError::WrongKind { expected: PathKind::Bounded });
            }
            if r.vertices[0] != b || r.vertices.last() != Some(&a) {
                return Err(PathError::BadPunctures("reference path must run from b to a".into()));
            }
        }
        Ok(PuncturedPlane { a, b, reference })
    }

    /// `a = -2`, `b = -1` with the bundled reference path.
    pub fn standard() -> Self {
        let sigma0 = parse_doc(fixtures::SIGMA0).expect("bundled fixture").0;
        PuncturedPlane::new(Gaussian::from_ints(-2, 0), Gaussian::from_ints(-1, 0), Some(sigma0)).expect("valid")
    }

    pub fn a(&self) -> &Gaussian {
        &self.a
    }

    pub fn b(&self) -> &Gaussian {
        &self.b
    }

    pub fn reference(&self) -> Option<&PLPath> {
        self.reference.as_ref()
    }

    pub fn epsilon(&self) -> (Gaussian, Gaussian) {
        (self.a.clone(), self.b.clone())
    }

    pub fn epsilon_minus(&self) -> (Gaussian, Gaussian) {
        (-&self.b, -&self.a)
    }

    fn is_puncture(&self, z: &Gaussian) -> bool {
        *z == self.a || *z == self.b
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admissibility {
    pub admissible: bool,
    pub issues: Vec<String>,
}

impl Admissibility {
    fn from_issues(issues: Vec<String>) -> Self {
        Admissibility { admissible: issues.is_empty(), issues }
    }
}

fn scan(path: &PLPath, seg: (&Gaussian, &Gaussian), name: &str) -> (i64, usize, Vec<String>) {
    let mut total = 0;
    let mut crossings = 0;
    let mut issues = Vec::new();
    let pieces = path.pieces();
    for (i, piece) in pieces.iter().enumerate() {
        let c = match contact(piece, seg.0, seg.1) {
            // a vertex inside the segment is handled once, from the piece ending there
            Contact::Vertex(false) if i > 0 => continue,
            Contact::Vertex(true) if i + 1 < pieces.len() => {
                let next = &pieces[i + 1];
                let far = &next.start + &next.dir;
                match side(&piece.start, seg.0, seg.1) * side(&far, seg.0, seg.1) {
                    -1 => crossing_sign(&next.start, &piece.dir),
                    _ => Contact::Touch("touches".into()),
                }
            }
            Contact::Vertex(_) => Contact::Touch("ends on".into()),
            c => c,
        };
        match c {
            Contact::Miss | Contact::Vertex(_) => {}
            Contact::Crossing(s) => {
                total += s;
                crossings += 1;
            }
            Contact::Touch(why) => issues.push(format!("piece {i} {why} {name}")),
        }
    }
    (total, crossings, issues)
}

fn puncture_issues(path: &PLPath, pp: &PuncturedPlane, interior_only: bool) -> Vec<String> {
    let n = path.vertices.len();
    path.vertices
        .iter()
        .enumerate()
        .filter(|(i, v)| (!interior_only || (*i > 0 && *i + 1 < n)) && pp.is_puncture(v))
        .map(|(i, v)| format!("vertex {i} is the puncture {v}"))
        .collect()
}

/// Transversality with `[a, b]` and avoidance of the punctures.
pub fn is_admissible(path: &PLPath, pp: &PuncturedPlane) -> Result<Admissibility, PathError> {
    if path.kind != PathKind::Section {
        return Err(PathError::WrongKind { expected: PathKind::Section });
    }
    let mut issues = puncture_issues(path, pp, false);
    issues.extend(scan(path, (&pp.a, &pp.b), "[a, b]").2);
    Ok(Admissibility::from_issues(issues))
}

/// `|z|` strictly increasing along every piece. End rays always are.
pub fn is_strongly_admissible(path: &PLPath) -> bool {
    // |p + t(q-p)|^2 has derivative 2 Re(conj(p)(q-p)) + 2t|q-p|^2
    path.vertices.windows(2).all(|w| !w[0].dot(&(&w[1] - &w[0])).is_negative())
}

/// Runs from `b` to `a`, `|z|` strictly increasing, transversal to `[-b, -a]`.
pub fn bounded_admissibility(path: &PLPath, pp: &PuncturedPlane) -> Result<Admissibility, PathError> {
    if path.kind != PathKind::Bounded {
        return Err(PathError::WrongKind { expected: PathKind::Bounded });
    }
    let mut issues = puncture_issues(path, pp, true);
    if path.vertices[0] != pp.b || path.vertices.last() != Some(&pp.a) {
        issues.push("does not run from b to a".into());
    }
    if !is_strongly_admissible(path) {
        issues.push("|z| is not strictly increasing".into());
    }
    let (lo, hi) = pp.epsilon_minus();
    let (_, crossings, touches) = scan(path, (&lo, &hi), "[-b, -a]");
    issues.extend(touches);
    if crossings == 0 {
        issues.push("misses [-b, -a]".into());
    }
    Ok(Admissibility::from_issues(issues))
}

/// Signed count of crossings with `[a, b]`; counterclockwise about the origin counts `+1`.
pub fn winding_number(path: &PLPath, pp: &PuncturedPlane) -> Result<i64, PathError> {
    let adm = is_admissible(path, pp)?;
    if !adm.admissible {
        return Err(PathError::NotAdmissible(adm.issues.join("; ")));
    }
    Ok(scan(path, (&pp.a, &pp.b), "[a, b]").0)
}

/// Winding number about the origin of a closed polygon, by signed crossings
/// of the positive real axis.
pub fn loop_winding(vertices: &[Gaussian]) -> Result<i64, PathError> {
    let n = vertices.len();
    let mut w = 0;
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        let d = q - p;
        if p.is_zero() || (p.cross(&d).is_zero() && !p.dot(&d).is_positive() && !q.dot(&d).is_negative()) {
            return Err(PathError::ThroughOrigin);
        }
        let up = p.im <= Rational::zero() && q.im > Rational::zero();
        let down = p.im > Rational::zero() && q.im <= Rational::zero();
        if up || down {
            // the crossing lies right of the origin iff the origin is on the inner side of p -> q
            let side = p.cross(q);
            if up && side.is_positive() {
                w += 1;
            } else if down && side.is_negative() {
                w -= 1;
            }
        }
    }
    Ok(w)
}

/// Winding about the origin of `σ` followed by the reference path backwards.
pub fn winding_number_bounded(path: &PLPath, pp: &PuncturedPlane) -> Result<i64, PathError> {
    if path.kind != PathKind::Bounded {
        return Err(PathError::WrongKind { expected: PathKind::Bounded });
    }
    let reference = pp.reference.as_ref().ok_or(PathError::NoReference)?;
    if path.vertices[0] != pp.b || path.vertices.last() != Some(&pp.a) {
        return Err(PathError::NotAdmissible("does not run from b to a".into()));
    }
    let mut lp = path.vertices.clone();
    lp.extend(reference.vertices.iter().rev().skip(1).take(reference.vertices.len() - 2).cloned());
    loop_winding(&lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Carrier {
    TotalSpace,
    ExceptionalCurve,
}

/// A line bundle on the resolved space or on its exceptional curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BundleLabel {
    pub carrier: Carrier,
    pub degree: i64,
}

impl fmt::Display for BundleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.carrier {
            Carrier::TotalSpace => "O_{X⁰}",
            Carrier::ExceptionalCurve => "O_E",
        };
        match (self.carrier, self.degree) {
            (Carrier::ExceptionalCurve, 0) => f.write_str(base),
            (_, d) => write!(f, "{base}({d})"),
        }
    }
}

/// Section paths give `O(-w)` on the total space, bounded paths `O_E(-w)`.
pub fn syz_transform_label(path: &PLPath, pp: &PuncturedPlane) -> Result<BundleLabel, PathError> {
    match path.kind {
        PathKind::Section => Ok(BundleLabel { carrier: Carrier::TotalSpace, degree: -winding_number(path, pp)? }),
        PathKind::Bounded => {
            let adm = bounded_admissibility(path, pp)?;
            if !adm.admissible {
                return Err(PathError::NotAdmissible(adm.issues.join("; ")));
            }
            Ok(BundleLabel { carrier: Carrier::ExceptionalCurve, degree: -winding_number_bounded(path, pp)? })
        }
    }
}

/// A section path for the standard punctures crossing `[a, b]` exactly `|w|`
/// times, all in the direction of `w`.
pub fn path_with_winding(w: i64) -> PLPath {
    let r = |n: i64, d: i64| Rational::new(n, d);
    let flip = |z: Gaussian| if w < 0 { z.conj() } else { z };
    let mut v = vec![Gaussian::from_ints(1, 0)];
    let turns = w.unsigned_abs() as i64;
    for k in 0..turns {
        // squares of half-size in [5/4, 3/2): the left side meets the real axis inside (-2, -1)
        let s = &r(5, 4) + &r(k, 4 * turns);
        let m = -&s;
        for (x, y) in [(&s, &s), (&m, &s), (&m, &m), (&s, &m)] {
            v.push(flip(Gaussian::new(x.clone(), y.clone())));
        }
    }
    v.push(Gaussian::from_ints(4, 0));
    PLPath::new(PathKind::Section, v).expect("distinct consecutive vertices")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PuncturesDoc {
    a: Gaussian,
    b: Gaussian,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<Vec<Gaussian>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PathDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    version: Option<u32>,
    kind: PathKind,
    vertices: Vec<Gaussian>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    punctures: Option<PuncturesDoc>,
}

fn parse_doc(s: &str) -> Result<(PLPath, Option<PuncturesDoc>), PathError> {
    let doc: PathDoc = serde_json::from_str(s).map_err(|e| PathError::Json(e.to_string()))?;
    Ok((PLPath::new(doc.kind, doc.vertices)?, doc.punctures))
}

/// Parse `{"kind", "vertices", "punctures"}`. Missing punctures, or the
/// standard ones without a reference, use [`PuncturedPlane::standard`].
pub fn path_from_json(s: &str) -> Result<(PLPath, PuncturedPlane), PathError> {
    let (path, punctures) = parse_doc(s)?;
    let pp = match punctures {
        None => PuncturedPlane::standard(),
        Some(p) => match p.reference {
            Some(r) => PuncturedPlane::new(p.a, p.b, Some(PLPath::new(PathKind::Bounded, r)?))?,
            None => {
                let std = PuncturedPlane::standard();
                if p.a == std.a && p.b == std.b {
                    std
                } else {
                    PuncturedPlane::new(p.a, p.b, None)?
                }
            }
        },
    };
    Ok((path, pp))
}

pub fn path_to_json(path: &PLPath, pp: &PuncturedPlane) -> String {
    let doc = PathDoc {
        version: Some(1),
        kind: path.kind,
        vertices: path.vertices.clone(),
        punctures: Some(PuncturesDoc { a: pp.a.clone(), b: pp.b.clone(), reference: None }),
    };
    serde_json::to_string(&doc).expect("serializable")
}

/// `(z, u1, v1, u2, v2)` with `u1 v1 = z - a`, `u2 v2 = z - b`, `z != 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub z: Gaussian,
    pub u1: Gaussian,
    pub v1: Gaussian,
    pub u2: Gaussian,
    pub v2: Gaussian,
}

/// Image in the base, with `|z|` kept squared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasePoint {
    pub r_squared: Rational,
    pub lambda1: Rational,
    pub lambda2: Rational,
}

pub fn fibration_coordinates(y: &SurfacePoint, pp: &PuncturedPlane) -> Result<BasePoint, PathError> {
    if y.z.is_zero() {
        return Err(PathError::NotOnSurface("z = 0".into()));
    }
    if &y.u1 * &y.v1 != &y.z - &pp.a {
        return Err(PathError::NotOnSurface("u1 v1 != z - a".into()));
    }
    if &y.u2 * &y.v2 != &y.z - &pp.b {
        return Err(PathError::NotOnSurface("u2 v2 != z - b".into()));
    }
    let half = Rational::new(1, 2);
    Ok(BasePoint {
        r_squared: y.z.norm_sqr(),
        lambda1: &half * &(&y.u1.norm_sqr() - &y.v1.norm_sqr()),
        lambda2: &half * &(&y.u2.norm_sqr() - &y.v2.norm_sqr()),
    })
}

/// On one of the two discriminant lines.
pub fn discriminant_test(p: &BasePoint, pp: &PuncturedPlane) -> bool {
    (p.r_squared == pp.a.norm_sqr() && p.lambda1.is_zero()) || (p.r_squared == pp.b.norm_sqr() && p.lambda2.is_zero())
}

/// Total turning of a polygonal loop about the origin, in floating point.
#[doc(hidden)]
pub fn loop_angle_f64(vertices: &[Gaussian]) -> f64 {
    let n = vertices.len();
    let mut total = 0.0;
    for i in 0..n {
        let (px, py) = vertices[i].to_f64();
        let (qx, qy) = vertices[(i + 1) % n].to_f64();
        total += (px * qy - py * qx).atan2(px * qx + py * qy);
    }
    total
}
