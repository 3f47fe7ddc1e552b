//! Finite A∞-categories given by generators, sparse structure constants and a pairing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimer::{dimer_to_quiver, permutations, Color, DimerModel};
use crate::linalg::{rank, SparseMatrix};
use crate::lincomb::LinearCombination;
use crate::rational::Rational;
use crate::report::{CheckStatus, VerificationReport};

/// Linear combination of generator indices.
pub type Element = LinearCombination<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AInfinityError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("inputs {0} are not composable")]
    NotComposable(String),
    #[error("m_{arity}{inputs} has a term `{term}` of the wrong degree or Hom space")]
    BadOutput { arity: usize, inputs: String, term: String },
    #[error("pairing <{0}, {1}> does not land in the top degree")]
    BadPairing(String, String),
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Sign rule for the A∞ relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// `Σ (-1)^{r + st} m(1^r ⊗ m_s ⊗ 1^t)` applied with the Koszul sign
    /// `(-1)^{s(|a_1| + ... + |a_r|)}`.
    #[default]
    Unreduced,
    /// `Σ (-1)^{‖a_1‖ + ... + ‖a_r‖} m(a_1, ..., m_s(...), ...)`, `‖a‖ = |a| - 1`.
    ReducedLeft,
    /// The mirror image: the exponent sums `‖a‖` over the inputs after the inner operation.
    ReducedRight,
}

impl SignConvention {
    pub const ALL: [SignConvention; 3] =
        [SignConvention::Unreduced, SignConvention::ReducedLeft, SignConvention::ReducedRight];

    /// Parity of the sign of the insertion of `m_s` after `r` inputs.
    fn exponent(self, degrees: &[i64], r: usize, s: usize) -> i64 {
        let n = degrees.len();
        match self {
            SignConvention::Unreduced => {
                let before: i64 = degrees[..r].iter().sum();
                r as i64 + (s * (n - r - s)) as i64 + s as i64 * before
            }
            SignConvention::ReducedLeft => degrees[..r].iter().map(|d| d - 1).sum(),
            SignConvention::ReducedRight => degrees[r + s..].iter().map(|d| d - 1).sum(),
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignConvention::Unreduced => "unreduced",
            SignConvention::ReducedLeft => "reduced-left",
            SignConvention::ReducedRight => "reduced-right",
        })
    }
}

impl std::str::FromStr for SignConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        SignConvention::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown sign convention `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub source: usize,
    pub target: usize,
}

/// Objects, graded generators of the Hom spaces, the nonzero `m_k` and the pairing.
///
/// Inputs `(a_1, ..., a_k)` are composable when the source of `a_i` is the
/// target of `a_{i+1}`; the output lies in `Hom(source a_k, target a_1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AInfinityPresentation {
    pub objects: Vec<String>,
    pub dimension: i64,
    generators: Vec<Generator>,
    index: HashMap<String, usize>,
    ops: HashMap<Vec<usize>, Element>,
    pairing: BTreeMap<(usize, usize), Rational>,
}

impl AInfinityPresentation {
    pub fn new(objects: Vec<String>, dimension: i64) -> Self {
        AInfinityPresentation {
            objects,
            dimension,
            generators: Vec::new(),
            index: HashMap::new(),
            ops: HashMap::new(),
            pairing: BTreeMap::new(),
        }
    }

    pub fn add_generator(&mut self, name: &str, degree: i64, source: usize, target: usize) -> Result<usize, AInfinityError> {
        if self.index.contains_key(name) {
            return Err(AInfinityError::DuplicateGenerator(name.to_string()));
        }
        for o in [source, target] {
            if o >= self.objects.len() {
                return Err(AInfinityError::UnknownObject(o.to_string()));
            }
        }
        let id = self.generators.len();
        self.generators.push(Generator { name: name.to_string(), degree, source, target });
        self.index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn generator(&self, id: usize) -> &Generator {
        &self.generators[id]
    }

    pub fn id(&self, name: &str) -> Result<usize, AInfinityError> {
        self.index.get(name).copied().ok_or_else(|| AInfinityError::UnknownGenerator(name.to_string()))
    }

    pub fn ids(&self, names: &[&str]) -> Result<Vec<usize>, AInfinityError> {
        names.iter().map(|n| self.id(n)).collect()
    }

    /// Generators of `Hom(source, target)`.
    pub fn hom_basis(&self, source: usize, target: usize) -> Vec<usize> {
        (0..self.generators.len())
            .filter(|&g| self.generators[g].source == source && self.generators[g].target == target)
            .collect()
    }

    pub fn is_composable(&self, inputs: &[usize]) -> bool {
        !inputs.is_empty()
            && inputs.iter().all(|&g| g < self.generators.len())
            && inputs.windows(2).all(|w| self.generators[w[0]].source == self.generators[w[1]].target)
    }

    pub fn names(&self, inputs: &[usize]) -> String {
        let names: Vec<&str> = inputs.iter().map(|&g| self.generators[g].name.as_str()).collect();
        format!("({})", names.join(", "))
    }

    pub fn format_element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (g, c)) in e.iter().enumerate() {
            let name = &self.generators[*g].name;
            let (neg, mag) = if c.is_negative() { (true, -c.clone()) } else { (false, c.clone()) };
            match (k, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag} "));
            }
            out.push_str(name);
        }
        out
    }

    /// Add `value` to `m_k(inputs)`.
    pub fn add_op(&mut self, inputs: &[usize], value: &Element) -> Result<(), AInfinityError> {
        if !self.is_composable(inputs) {
            return Err(AInfinityError::NotComposable(self.names_lossy(inputs)));
        }
        let k = inputs.len();
        let degree: i64 = inputs.iter().map(|&g| self.generators[g].degree).sum::<i64>() + 2 - k as i64;
        let source = self.generators[inputs[k - 1]].source;
        let target = self.generators[inputs[0]].target;
        for g in value.labels() {
            let ok = self.generators.get(*g).is_some_and(|h| h.degree == degree && h.source == source && h.target == target);
            if !ok {
                return Err(AInfinityError::BadOutput {
                    arity: k,
                    inputs: self.names(inputs),
                    term: self.generators.get(*g).map_or_else(|| g.to_string(), |h| h.name.clone()),
                });
            }
        }
        let entry = self.ops.entry(inputs.to_vec()).or_default();
        *entry = entry.plus(value);
        if entry.is_zero() {
            self.ops.remove(inputs);
        }
        Ok(())
    }

    /// Replace `m_k(inputs)` by `value`.
    pub fn set_op(&mut self, inputs: &[usize], value: &Element) -> Result<(), AInfinityError> {
        let old = self.ops.remove(inputs);
        if let Err(e) = self.add_op(inputs, value) {
            if let Some(v) = old {
                self.ops.insert(inputs.to_vec(), v);
            }
            return Err(e);
        }
        Ok(())
    }

    fn names_lossy(&self, inputs: &[usize]) -> String {
        let names: Vec<String> = inputs
            .iter()
            .map(|&g| self.generators.get(g).map_or_else(|| format!("#{g}"), |h| h.name.clone()))
            .collect();
        format!("({})", names.join(", "))
    }

    pub fn op(&self, inputs: &[usize]) -> Option<&Element> {
        self.ops.get(inputs)
    }

    /// Nonzero operations sorted by arity and then by inputs.
    pub fn ops(&self) -> Vec<(&Vec<usize>, &Element)> {
        let mut v: Vec<_> = self.ops.iter().collect();
        v.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn arities(&self) -> BTreeSet<usize> {
        self.ops.keys().map(Vec::len).collect()
    }

    pub fn set_pairing(&mut self, a: usize, b: usize, value: Rational) -> Result<(), AInfinityError> {
        let (ga, gb) = (&self.generators[a], &self.generators[b]);
        if ga.degree + gb.degree != self.dimension || ga.source != gb.target || ga.target != gb.source {
            return Err(AInfinityError::BadPairing(ga.name.clone(), gb.name.clone()));
        }
        if value.is_zero() {
            self.pairing.remove(&(a, b));
        } else {
            self.pairing.insert((a, b), value);
        }
        Ok(())
    }

    pub fn pairing(&self, a: usize, b: usize) -> Rational {
        self.pairing.get(&(a, b)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn pairing_entries(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.pairing.iter()
    }

    pub fn clear_pairing(&mut self) {
        self.pairing.clear();
    }

    /// `⟨e, b⟩` extended linearly in the first slot.
    pub fn pair_element(&self, e: &Element, b: usize) -> Rational {
        let mut acc = Rational::zero();
        for (g, c) in e.iter() {
            if let Some(p) = self.pairing.get(&(*g, b)) {
                acc += &(c * p);
            }
        }
        acc
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.export()).expect("presentation serializes")
    }

    pub fn export(&self) -> PresentationJson {
        PresentationJson {
            objects: self.objects.clone(),
            dimension: self.dimension,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorJson {
                    name: g.name.clone(),
                    degree: g.degree,
                    source: self.objects[g.source].clone(),
                    target: self.objects[g.target].clone(),
                })
                .collect(),
            ops: self
                .ops()
                .into_iter()
                .map(|(inputs, value)| OpJson {
                    arity: inputs.len(),
                    inputs: inputs.iter().map(|&g| self.generators[g].name.clone()).collect(),
                    output: value.iter().map(|(g, c)| (self.generators[*g].name.clone(), c.clone())).collect(),
                })
                .collect(),
            pairing: self
                .pairing
                .iter()
                .map(|((a, b), c)| PairingJson {
                    left: self.generators[*a].name.clone(),
                    right: self.generators[*b].name.clone(),
                    value: c.clone(),
                })
                .collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, AInfinityError> {
        let j: PresentationJson = serde_json::from_str(text).map_err(|e| AInfinityError::Json(e.to_string()))?;
        let object = |name: &str| {
            j.objects.iter().position(|o| o == name).ok_or_else(|| AInfinityError::UnknownObject(name.to_string()))
        };
        let mut a = AInfinityPresentation::new(j.objects.clone(), j.dimension);
        for g in &j.generators {
            a.add_generator(&g.name, g.degree, object(&g.source)?, object(&g.target)?)?;
        }
        for op in &j.ops {
            let inputs: Vec<&str> = op.inputs.iter().map(String::as_str).collect();
            let inputs = a.ids(&inputs)?;
            let mut value = Element::new();
            for (name, c) in &op.output {
                value.add_term(a.id(name)?, c.clone());
            }
            a.add_op(&inputs, &value)?;
        }
        for p in &j.pairing {
            let (l, r) = (a.id(&p.left)?, a.id(&p.right)?);
            a.set_pairing(l, r, p.value.clone())?;
        }
        Ok(a)
    }

    /// Composable tuples of length `n`, counted without listing them.
    pub fn count_composable(&self, n: usize) -> u128 {
        if n == 0 {
            return 0;
        }
        // ways[o] = number of composable tuples of the current length ending (rightmost) with source o
        let mut ways = vec![0u128; self.objects.len()];
        for g in &self.generators {
            ways[g.source] += 1;
        }
        for _ in 1..n {
            let mut next = vec![0u128; self.objects.len()];
            for g in &self.generators {
                next[g.source] += ways[g.target];
            }
            ways = next;
        }
        ways.iter().sum()
    }

    fn by_target(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.objects.len()];
        for (i, g) in self.generators.iter().enumerate() {
            out[g.target].push(i);
        }
        out
    }

    /// Visit every composable tuple of length `n` beginning with `first`.
    fn for_each_tuple<F: FnMut(&[usize])>(&self, n: usize, first: usize, by_target: &[Vec<usize>], f: &mut F) {
        fn go<F: FnMut(&[usize])>(a: &AInfinityPresentation, n: usize, buf: &mut Vec<usize>, bt: &[Vec<usize>], f: &mut F) {
            if buf.len() == n {
                f(buf);
                return;
            }
            let src = a.generators[*buf.last().expect("nonempty")].source;
            for &g in &bt[src] {
                buf.push(g);
                go(a, n, buf, bt, f);
                buf.pop();
            }
        }
        let mut buf = Vec::with_capacity(n);
        buf.push(first);
        go(self, n, &mut buf, by_target, f);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub degree: i64,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpJson {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub output: Vec<(String, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingJson {
    pub left: String,
    pub right: String,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub objects: Vec<String>,
    pub dimension: i64,
    pub generators: Vec<GeneratorJson>,
    pub ops: Vec<OpJson>,
    pub pairing: Vec<PairingJson>,
}

/// Name of the dual of a generator.
pub fn dual_name(name: &str) -> String {
    format!("{name}*")
}

/// The cyclic A∞-category of a dimer: one object per face, identities in degree 0,
/// arrows in degree 1, their duals in degree 2 and co-identities in degree 3.
///
/// An arrow `a : v -> w` of the quiver is a generator of `Hom(w, v)` and `a*` one
/// of `Hom(v, w)`. Besides units and `m_2(a, a*) = id_v*`, `m_2(a*, a) = id_w*`,
/// every cycle `(a_0, ..., a_k)` around a node gives `m_k(a_1, ..., a_k) = ± a_0*`
/// with `+` at white nodes.
pub fn dimer_ainfinity(d: &DimerModel) -> AInfinityPresentation {
    let q = dimer_to_quiver(d);
    let objects = q.vertices.iter().map(|v| format!("F{v}")).collect();
    let mut a = AInfinityPresentation::new(objects, 3);
    let add = |a: &mut AInfinityPresentation, n: &str, deg, s, t| a.add_generator(n, deg, s, t).expect("fresh names");
    let ids: Vec<usize> = q.vertices.iter().map(|&v| add(&mut a, &format!("id{v}"), 0, v, v)).collect();
    let arrows: Vec<usize> = q.arrows.iter().map(|r| add(&mut a, &r.id, 1, r.target, r.source)).collect();
    let duals: Vec<usize> = q.arrows.iter().map(|r| add(&mut a, &dual_name(&r.id), 2, r.source, r.target)).collect();
    let coids: Vec<usize> = q.vertices.iter().map(|&v| add(&mut a, &dual_name(&format!("id{v}")), 3, v, v)).collect();
    let one = Rational::one();
    for g in 0..a.generators().len() {
        let (s, t) = (a.generator(g).source, a.generator(g).target);
        let e = Element::basis(g);
        a.set_op(&[ids[t], g], &e).expect("unit");
        a.set_op(&[g, ids[s]], &e).expect("unit");
    }
    for (i, r) in q.arrows.iter().enumerate() {
        a.set_op(&[arrows[i], duals[i]], &Element::basis(coids[r.source])).expect("pairing product");
        a.set_op(&[duals[i], arrows[i]], &Element::basis(coids[r.target])).expect("pairing product");
        a.set_pairing(arrows[i], duals[i], one.clone()).expect("top degree");
        a.set_pairing(duals[i], arrows[i], one.clone()).expect("top degree");
    }
    for &v in &q.vertices {
        a.set_pairing(ids[v], coids[v], one.clone()).expect("top degree");
        a.set_pairing(coids[v], ids[v], one.clone()).expect("top degree");
    }
    let arrow_index: HashMap<&str, usize> = q.arrows.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    for node in &d.nodes {
        let cycle = d.node_cycle(&node.id).expect("node exists");
        let sign = if node.color == Color::White { one.clone() } else { -one.clone() };
        for r in 0..cycle.len() {
            let rotated: Vec<usize> = (0..cycle.len()).map(|k| arrow_index[cycle[(r + k) % cycle.len()].as_str()]).collect();
            let inputs: Vec<usize> = rotated[1..].iter().map(|&i| arrows[i]).collect();
            a.add_op(&inputs, &Element::term(duals[rotated[0]], sign.clone())).expect("cycle is composable");
        }
    }
    a
}

/// The sixteen structure constants of the conifold presentation: eight `m_3`
/// values around the two nodes and the eight `m_2` products of an arrow with
/// its dual. Objects `0` and `1` are the two faces.
pub fn conifold_reference_table() -> Vec<(Vec<&'static str>, &'static str)> {
    vec![
        (vec!["y", "t1", "x"], "-t2*"),
        (vec!["t2", "y", "t1"], "-x*"),
        (vec!["x", "t2", "y"], "-t1*"),
        (vec!["t1", "x", "t2"], "-y*"),
        (vec!["y", "t2", "x"], "t1*"),
        (vec!["t1", "y", "t2"], "x*"),
        (vec!["x", "t1", "y"], "t2*"),
        (vec!["t2", "x", "t1"], "y*"),
        (vec!["x", "x*"], "id0*"),
        (vec!["y", "y*"], "id0*"),
        (vec!["t2*", "t2"], "id0*"),
        (vec!["t1*", "t1"], "id0*"),
        (vec!["t2", "t2*"], "id1*"),
        (vec!["t1", "t1*"], "id1*"),
        (vec!["x*", "x"], "id1*"),
        (vec!["y*", "y"], "id1*"),
    ]
}

/// Compare `a` with a table of `(inputs, output)` entries written as in
/// [`AInfinityPresentation::format_element`]; `rename` maps the table's
/// generator names to those of `a`.
pub fn check_table(a: &AInfinityPresentation, table: &[(Vec<&str>, &str)], rename: &dyn Fn(&str) -> String) -> VerificationReport {
    let mut report = VerificationReport::new("structure-table");
    report.param("entries", table.len());
    for (inputs, want) in table {
        let names: Vec<String> = inputs.iter().map(|n| rename(n)).collect();
        let id = format!("m{}({})", inputs.len(), names.join(", "));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let want = match want.strip_prefix('-') {
            Some(rest) => format!("-{}", rename(rest)),
            None => rename(want),
        };
        match a.ids(&refs) {
            Ok(ids) => {
                let got = a.format_element(a.op(&ids).unwrap_or(&Element::new()));
                report.check(id, got == want, format!("got {got}, expected {want}"));
            }
            Err(e) => report.check(id, false, e.to_string()),
        }
    }
    report
}

/// Residue of the A∞ relation on one tuple.
fn relation_residue(a: &AInfinityPresentation, tuple: &[usize], inserts: &[(usize, usize)], conv: SignConvention) -> Element {
    let n = tuple.len();
    let degrees: Vec<i64> = tuple.iter().map(|&g| a.generators[g].degree).collect();
    let mut residue = Element::new();
    let mut outer = Vec::with_capacity(n);
    for &(r, s) in inserts {
        let Some(inner) = a.op(&tuple[r..r + s]) else {
            continue;
        };
        let sign = if conv.exponent(&degrees, r, s).rem_euclid(2) == 0 { Rational::one() } else { -Rational::one() };
        for (g, c) in inner.iter() {
            outer.clear();
            outer.extend_from_slice(&tuple[..r]);
            outer.push(*g);
            outer.extend_from_slice(&tuple[r + s..]);
            if let Some(v) = a.op(&outer) {
                residue.add_scaled(v, &(c * &sign));
            }
        }
    }
    residue
}

/// Check `Σ ± m_{n-s+1}(a_1, ..., m_s(...), ..., a_n) = 0` on every composable
/// tuple of length `1 <= n <= max_arity`.
pub fn check_ainfinity_relations(a: &AInfinityPresentation, max_arity: usize, conv: SignConvention) -> VerificationReport {
    let mut report = VerificationReport::new("ainfinity-relations");
    report.param("convention", conv).param("max_arity", max_arity);
    let arities = a.arities();
    let by_target = a.by_target();
    for n in 1..=max_arity {
        let inserts: Vec<(usize, usize)> = (1..=n)
            .filter(|s| arities.contains(s) && arities.contains(&(n - s + 1)))
            .flat_map(|s| (0..=n - s).map(move |r| (r, s)))
            .collect();
        let total = a.count_composable(n);
        let per_first: Vec<(usize, Vec<(Vec<usize>, Element)>)> = (0..a.generators.len())
            .into_par_iter()
            .map(|first| {
                let mut visited = 0;
                let mut bad = Vec::new();
                a.for_each_tuple(n, first, &by_target, &mut |t| {
                    visited += 1;
                    if inserts.is_empty() {
                        return;
                    }
                    let res = relation_residue(a, t, &inserts, conv);
                    if !res.is_zero() {
                        bad.push((t.to_vec(), res));
                    }
                });
                (visited, bad)
            })
            .collect();
        let visited: usize = per_first.iter().map(|(v, _)| v).sum();
        let mut violations: Vec<(Vec<usize>, Element)> = per_first.into_iter().flat_map(|(_, b)| b).collect();
        violations.sort_by(|x, y| x.0.cmp(&y.0));
        for (t, res) in &violations {
            report.check(format!("violation/{}", a.names(t)), false, format!("residue {}", a.format_element(res)));
        }
        let note = if inserts.is_empty() { ", no nonzero insertions possible" } else { "" };
        report.check(
            format!("arity/{n}"),
            violations.is_empty() && visited as u128 == total,
            format!("{visited} composable tuples, {} violations{note}", violations.len()),
        );
    }
    report
}

/// Non-degeneracy of the pairing and cyclic invariance
/// `⟨m_k(a_1, ..., a_k), a_0⟩ = ± ⟨m_k(a_0, ..., a_{k-1}), a_k⟩`.
///
/// The unsigned form is a check; sign mismatches against
/// `(-1)^{‖a_0‖(‖a_1‖ + ... + ‖a_k‖)}` are listed as discrepancies.
pub fn check_cyclicity(a: &AInfinityPresentation) -> VerificationReport {
    let mut report = VerificationReport::new("cyclicity");
    report.param("dimension", a.dimension);
    for v in 0..a.objects.len() {
        for w in 0..a.objects.len() {
            let left = a.hom_basis(v, w);
            let right = a.hom_basis(w, v);
            let mut m = SparseMatrix::zeros(left.len(), right.len());
            for (i, &x) in left.iter().enumerate() {
                for (j, &y) in right.iter().enumerate() {
                    m.set(i, j, a.pairing(x, y)).expect("in bounds");
                }
            }
            let r = rank(&m);
            let ok = left.len() == right.len() && r == left.len();
            report.check(
                format!("nondegenerate/{}->{}", a.objects[v], a.objects[w]),
                ok,
                format!("{}x{} pairing matrix of rank {r}", left.len(), right.len()),
            );
        }
    }
    let mut partners: HashMap<usize, Vec<usize>> = HashMap::new();
    for (&(x, y), _) in a.pairing_entries() {
        partners.entry(x).or_default().push(y);
    }
    let reduced = |g: usize| a.generators[g].degree - 1;
    let (mut unsigned_bad, mut signed_bad, mut checked) = (0, 0, 0);
    for (inputs, value) in a.ops() {
        let k = inputs.len();
        let mut candidates: BTreeSet<usize> = BTreeSet::new();
        for g in value.labels() {
            candidates.extend(partners.get(g).into_iter().flatten());
        }
        for a0 in candidates {
            let lhs = a.pair_element(value, a0);
            if lhs.is_zero() {
                continue;
            }
            checked += 1;
            let mut rotated = Vec::with_capacity(k);
            rotated.push(a0);
            rotated.extend_from_slice(&inputs[..k - 1]);
            let rhs = if a.is_composable(&rotated) {
                a.op(&rotated).map_or_else(Rational::zero, |e| a.pair_element(e, inputs[k - 1]))
            } else {
                Rational::zero()
            };
            let label = format!("<m{k}{}, {}>", a.names(inputs), a.generators[a0].name);
            if lhs.abs() != rhs.abs() {
                unsigned_bad += 1;
                report.check(format!("unsigned/{label}"), false, format!("{lhs} vs rotated {rhs}"));
                continue;
            }
            let exp = reduced(a0) * inputs.iter().map(|&g| reduced(g)).sum::<i64>();
            let expected = if exp.rem_euclid(2) == 0 { rhs.clone() } else { -rhs.clone() };
            if lhs != expected {
                signed_bad += 1;
                report.record(
                    format!("signed/{label}"),
                    CheckStatus::ReportedDiscrepancy,
                    format!("{lhs} vs rotated {rhs} with Koszul sign {}", if exp % 2 == 0 { "+" } else { "-" }),
                );
            }
        }
    }
    report.check("unsigned", unsigned_bad == 0, format!("{checked} nonzero pairings, {unsigned_bad} mismatches"));
    if signed_bad == 0 {
        report.check("signed", true, format!("{checked} nonzero pairings"));
    } else {
        report.record("signed", CheckStatus::ReportedDiscrepancy, format!("{signed_bad} of {checked} differ in sign"));
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryEntry {
    pub from: String,
    pub sign: i8,
    pub to: String,
}

/// A generator bijection with signs carrying every `m_k` of one presentation onto the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub objects: Vec<(String, String)>,
    pub entries: Vec<DictionaryEntry>,
    pub bijections_tried: usize,
}

impl Correspondence {
    pub fn invert(&self) -> Correspondence {
        Correspondence {
            objects: self.objects.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            entries: self
                .entries
                .iter()
                .map(|e| DictionaryEntry { from: e.to.clone(), sign: e.sign, to: e.from.clone() })
                .collect(),
            bijections_tried: self.bijections_tried,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FailureCertificate {
    ObjectCount { left: usize, right: usize },
    /// Some graded Hom space has different dimensions on the two sides for every object map.
    HomDimension { source: String, target: String, degree: i64, left: usize, right: usize },
    /// Under the closest bijection, this operation has different support.
    Support { bijection: Vec<(String, String)>, tuple: String, left: String, right: String },
    /// Coefficients differ in absolute value.
    Magnitude { bijection: Vec<(String, String)>, tuple: String, left: String, right: String },
    /// No choice of signs works; these operations form a minimal contradictory set.
    Signs { bijection: Vec<(String, String)>, tuples: Vec<String> },
    /// A proposed dictionary does not carry the tables onto each other.
    Dictionary { tuple: String, expected: String, found: String },
}

impl fmt::Display for FailureCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureCertificate::ObjectCount { left, right } => write!(f, "{left} objects vs {right}"),
            FailureCertificate::HomDimension { source, target, degree, left, right } => {
                write!(f, "Hom^{degree}({source}, {target}) has dimension {left} vs {right}")
            }
            FailureCertificate::Support { tuple, left, right, .. } => write!(f, "m{tuple} = {left} but image gives {right}"),
            FailureCertificate::Magnitude { tuple, left, right, .. } => {
                write!(f, "m{tuple} coefficients {left} vs {right}")
            }
            FailureCertificate::Signs { tuples, .. } => write!(f, "no consistent signs for {}", tuples.join(", ")),
            FailureCertificate::Dictionary { tuple, expected, found } => {
                write!(f, "m{tuple}: expected {expected}, found {found}")
            }
        }
    }
}

/// Rows of a linear system over GF(2): bit `n` of a row is the right-hand side.
#[derive(Debug, Clone)]
struct Gf2System {
    vars: usize,
    rows: Vec<Vec<u64>>,
}

impl Gf2System {
    fn new(vars: usize) -> Self {
        Gf2System { vars, rows: Vec::new() }
    }

    fn push(&mut self, vars: &[usize], rhs: bool) {
        let mut row = vec![0u64; self.vars / 64 + 1];
        for &v in vars {
            row[v / 64] ^= 1 << (v % 64);
        }
        if rhs {
            row[self.vars / 64] ^= 1 << (self.vars % 64);
        }
        self.rows.push(row);
    }

    fn bit(row: &[u64], i: usize) -> bool {
        row[i / 64] >> (i % 64) & 1 == 1
    }

    /// A solution with free variables zero, or `None`.
    fn solve_subset(&self, subset: &[usize]) -> Option<Vec<bool>> {
        let mut rows: Vec<Vec<u64>> = subset.iter().map(|&i| self.rows[i].clone()).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.vars {
            let Some(p) = (next..rows.len()).find(|&i| Gf2System::bit(&rows[i], col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot = rows[next].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && Gf2System::bit(row, col) {
                    for (w, pw) in row.iter_mut().zip(&pivot) {
                        *w ^= pw;
                    }
                }
            }
            pivots.push((next, col));
            next += 1;
        }
        if rows[next..].iter().any(|r| Gf2System::bit(r, self.vars)) {
            return None;
        }
        let mut sol = vec![false; self.vars];
        for (r, c) in pivots {
            sol[c] = Gf2System::bit(&rows[r], self.vars);
        }
        Some(sol)
    }

    fn solve(&self) -> Option<Vec<bool>> {
        self.solve_subset(&(0..self.rows.len()).collect::<Vec<_>>())
    }

    /// Drop equations one at a time while the rest stays inconsistent.
    fn minimal_inconsistent(&self) -> Vec<usize> {
        let mut keep: Vec<usize> = (0..self.rows.len()).collect();
        let mut i = 0;
        while i < keep.len() {
            let mut trial = keep.clone();
            trial.remove(i);
            if self.solve_subset(&trial).is_none() {
                keep = trial;
            } else {
                i += 1;
            }
        }
        keep
    }
}

enum Attempt {
    Found(Vec<bool>),
    Mismatch(FailureCertificate),
    Signs(FailureCertificate, usize),
}

fn attempt(a: &AInfinityPresentation, b: &AInfinityPresentation, phi: &[usize]) -> Attempt {
    let bijection: Vec<(String, String)> =
        phi.iter().enumerate().map(|(i, &j)| (a.generators[i].name.clone(), b.generators[j].name.clone())).collect();
    let mut inverse = vec![usize::MAX; phi.len()];
    for (i, &j) in phi.iter().enumerate() {
        inverse[j] = i;
    }
    let mut system = Gf2System::new(phi.len());
    let mut equation_tuple = Vec::new();
    for (inputs, value) in a.ops() {
        let mapped: Vec<usize> = inputs.iter().map(|&g| phi[g]).collect();
        let image = value.map_labels(|g| phi[*g]);
        let target = b.op(&mapped).cloned().unwrap_or_default();
        let support_a: BTreeSet<&usize> = image.labels().collect();
        let support_b: BTreeSet<&usize> = target.labels().collect();
        if support_a != support_b {
            return Attempt::Mismatch(FailureCertificate::Support {
                bijection,
                tuple: a.names(inputs),
                left: a.format_element(value),
                right: b.format_element(&target),
            });
        }
        for (g, c) in image.iter() {
            let d = target.coefficient(g);
            if c.abs() != d.abs() {
                return Attempt::Mismatch(FailureCertificate::Magnitude {
                    bijection,
                    tuple: a.names(inputs),
                    left: a.format_element(value),
                    right: b.format_element(&target),
                });
            }
            // ε_out c = ε_inputs d
            let mut vars: Vec<usize> = inputs.clone();
            vars.push(inverse[*g]);
            let mut parity: BTreeMap<usize, bool> = BTreeMap::new();
            for v in vars {
                *parity.entry(v).or_default() ^= true;
            }
            let odd: Vec<usize> = parity.into_iter().filter(|(_, p)| *p).map(|(v, _)| v).collect();
            system.push(&odd, *c != d);
            equation_tuple.push(inputs.clone());
        }
    }
    for (inputs, value) in b.ops() {
        let pulled: Vec<usize> = inputs.iter().map(|&g| inverse[g]).collect();
        if a.op(&pulled).is_none() {
            return Attempt::Mismatch(FailureCertificate::Support {
                bijection,
                tuple: a.names(&pulled),
                left: "0".to_string(),
                right: b.format_element(value),
            });
        }
    }
    match system.solve() {
        Some(sol) => Attempt::Found(sol),
        None => {
            let core = system.minimal_inconsistent();
            let mut tuples: Vec<String> = core.iter().map(|&i| a.names(&equation_tuple[i])).collect();
            tuples.dedup();
            let size = core.len();
            Attempt::Signs(FailureCertificate::Signs { bijection, tuples }, size)
        }
    }
}

/// Search degree-preserving generator bijections with `±1` scalings under which
/// all `m_k` tables agree. `object_map[i]` is the object of `b` assigned to object
/// `i` of `a`; without it every object bijection is tried.
pub fn compare_structures(
    a: &AInfinityPresentation,
    b: &AInfinityPresentation,
    object_map: Option<&[usize]>,
) -> Result<Correspondence, FailureCertificate> {
    if a.objects.len() != b.objects.len() {
        return Err(FailureCertificate::ObjectCount { left: a.objects.len(), right: b.objects.len() });
    }
    let object_maps = match object_map {
        Some(m) => vec![m.to_vec()],
        None => permutations(a.objects.len()),
    };
    let mut tried = 0;
    let mut best: Option<(usize, FailureCertificate)> = None;
    let mut first_mismatch: Option<FailureCertificate> = None;
    for omap in object_maps {
        let mut classes: BTreeMap<(i64, usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (i, g) in a.generators.iter().enumerate() {
            classes.entry((g.degree, omap[g.source], omap[g.target])).or_default().0.push(i);
        }
        for (j, g) in b.generators.iter().enumerate() {
            classes.entry((g.degree, g.source, g.target)).or_default().1.push(j);
        }
        if let Some(((degree, s, t), (l, r))) = classes.iter().find(|(_, (l, r))| l.len() != r.len()) {
            first_mismatch.get_or_insert(FailureCertificate::HomDimension {
                source: b.objects[*s].clone(),
                target: b.objects[*t].clone(),
                degree: *degree,
                left: l.len(),
                right: r.len(),
            });
            continue;
        }
        let class_list: Vec<&(Vec<usize>, Vec<usize>)> = classes.values().collect();
        let perms: Vec<Vec<Vec<usize>>> = class_list.iter().map(|(l, _)| permutations(l.len())).collect();
        let mut choice = vec![0usize; class_list.len()];
        loop {
            tried += 1;
            let mut phi = vec![0usize; a.generators.len()];
            for (c, (l, r)) in class_list.iter().enumerate() {
                for (i, &j) in perms[c][choice[c]].iter().enumerate() {
                    phi[l[i]] = r[j];
                }
            }
            match attempt(a, b, &phi) {
                Attempt::Found(signs) => {
                    let entries = phi
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| DictionaryEntry {
                            from: a.generators[i].name.clone(),
                            sign: if signs[i] { -1 } else { 1 },
                            to: b.generators[j].name.clone(),
                        })
                        .collect();
                    let objects =
                        omap.iter().enumerate().map(|(i, &j)| (a.objects[i].clone(), b.objects[j].clone())).collect();
                    return Ok(Correspondence { objects, entries, bijections_tried: tried });
                }
                Attempt::Signs(cert, size) => {
                    if best.as_ref().is_none_or(|(s, _)| size < *s) {
                        best = Some((size, cert));
                    }
                }
                Attempt::Mismatch(cert) => {
                    first_mismatch.get_or_insert(cert);
                }
            }
            let mut c = 0;
            while c < choice.len() {
                choice[c] += 1;
                if choice[c] < perms[c].len() {
                    break;
                }
                choice[c] = 0;
                c += 1;
            }
            if c == choice.len() {
                break;
            }
        }
    }
    Err(best.map(|(_, c)| c).or(first_mismatch).unwrap_or(FailureCertificate::ObjectCount {
        left: a.objects.len(),
        right: b.objects.len(),
    }))
}

/// Check directly that a dictionary carries every operation of `a` onto `b` and back.
pub fn verify_dictionary(
    a: &AInfinityPresentation,
    b: &AInfinityPresentation,
    dict: &Correspondence,
) -> Result<(), FailureCertificate> {
    let mut phi = vec![None; a.generators.len()];
    for e in &dict.entries {
        let (Ok(i), Ok(j)) = (a.id(&e.from), b.id(&e.to)) else {
            return Err(FailureCertificate::Dictionary {
                tuple: e.from.clone(),
                expected: "a generator".to_string(),
                found: e.to.clone(),
            });
        };
        phi[i] = Some((j, Rational::from(e.sign as i64)));
    }
    let Some(phi): Option<Vec<(usize, Rational)>> = phi.into_iter().collect() else {
        return Err(FailureCertificate::Dictionary {
            tuple: "dictionary".to_string(),
            expected: "every generator mapped".to_string(),
            found: "a gap".to_string(),
        });
    };
    let mut images = 0;
    for (inputs, value) in a.ops() {
        let mapped: Vec<usize> = inputs.iter().map(|&g| phi[g].0).collect();
        let mut scale = Rational::one();
        for &g in inputs {
            scale = &scale * &phi[g].1;
        }
        let mut expected = Element::new();
        for (g, c) in value.iter() {
            expected.add_term(phi[*g].0, c * &phi[*g].1);
        }
        let found = b.op(&mapped).map_or_else(Element::new, |e| e.scaled(&scale));
        if expected != found {
            return Err(FailureCertificate::Dictionary {
                tuple: a.names(inputs),
                expected: b.format_element(&expected),
                found: b.format_element(&found),
            });
        }
        images += 1;
    }
    if images != b.ops().len() {
        return Err(FailureCertificate::Dictionary {
            tuple: "all".to_string(),
            expected: format!("{} operations", b.ops().len()),
            found: format!("{images} images"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn conifold() -> AInfinityPresentation {
        dimer_ainfinity(&fixtures::conifold_dimer())
    }

    fn m(a: &AInfinityPresentation, inputs: &[&str]) -> String {
        a.format_element(a.op(&a.ids(inputs).unwrap()).unwrap_or(&Element::new()))
    }

    #[test]
    fn conifold_tables() {
        let a = conifold();
        assert_eq!(m(&a, &["y", "t1", "x"]), "-t2*");
        assert_eq!(m(&a, &["t1", "y", "t2"]), "x*");
        assert_eq!(m(&a, &["x", "x*"]), "id0*");
        assert_eq!(m(&a, &["t1*", "t1"]), "id0*");
        for g in a.generators() {
            let id = format!("id{}", g.target);
            assert_eq!(m(&a, &[&id, &g.name]), g.name);
        }
        assert_eq!(a.ops().iter().filter(|(k, _)| k.len() == 3).count(), 8);
        let r = check_table(&a, &conifold_reference_table(), &|n| n.to_string());
        assert!(r.passed() && r.summary.total == 16, "{:?}", r.failures().collect::<Vec<_>>());
        let r = check_table(&a, &[(vec!["x", "t1", "y"], "-t2*")], &|n| n.to_string());
        assert!(!r.passed());
    }

    #[test]
    fn shapes_by_degree() {
        for d in [fixtures::conifold_dimer(), fixtures::hexagonal_dimer()] {
            let a = dimer_ainfinity(&d);
            for g in a.generators() {
                let expected = match g.degree {
                    0 => g.name.starts_with("id") && !g.name.ends_with('*'),
                    1 => !g.name.contains('*') && !g.name.starts_with("id"),
                    2 => g.name.ends_with('*') && !g.name.starts_with("id"),
                    3 => g.name.starts_with("id") && g.name.ends_with('*'),
                    _ => false,
                };
                assert!(expected, "{}", g.name);
            }
        }
    }

    #[test]
    fn relations_hold_only_unreduced() {
        let a = conifold();
        let r = check_ainfinity_relations(&a, 6, SignConvention::Unreduced);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        assert!(!check_ainfinity_relations(&a, 4, SignConvention::ReducedLeft).passed());
        let hex = dimer_ainfinity(&fixtures::hexagonal_dimer());
        assert!(check_ainfinity_relations(&hex, 5, SignConvention::Unreduced).passed());
    }

    /// `k[a]/(a^3)` in degree 0 with `a * a^2` wrongly set to `a^2`.
    fn truncated_polynomials(defect: bool) -> (AInfinityPresentation, impl Fn(usize, usize) -> Option<usize>) {
        let mut a = AInfinityPresentation::new(vec!["pt".to_string()], 0);
        for n in ["1", "a", "a2"] {
            a.add_generator(n, 0, 0, 0).unwrap();
        }
        let table = move |p: usize, q: usize| {
            if defect && (p, q) == (1, 2) {
                Some(2)
            } else if p + q <= 2 {
                Some(p + q)
            } else {
                None
            }
        };
        for p in 0..3 {
            for q in 0..3 {
                if let Some(r) = table(p, q) {
                    a.set_op(&[p, q], &Element::basis(r)).unwrap();
                }
            }
        }
        (a, table)
    }

    #[test]
    fn injected_defect_reports_exactly_the_bad_triples() {
        let (good, _) = truncated_polynomials(false);
        assert!(check_ainfinity_relations(&good, 4, SignConvention::Unreduced).passed());
        let (a, table) = truncated_polynomials(true);
        let r = check_ainfinity_relations(&a, 3, SignConvention::Unreduced);
        let reported: BTreeSet<String> =
            r.failures().filter_map(|c| c.id.strip_prefix("violation/").map(str::to_string)).collect();
        let mut expected = BTreeSet::new();
        for p in 0..3 {
            for q in 0..3 {
                for s in 0..3 {
                    let left = table(p, q).and_then(|pq| table(pq, s));
                    let right = table(q, s).and_then(|qs| table(p, qs));
                    if left != right {
                        expected.insert(a.names(&[p, q, s]));
                    }
                }
            }
        }
        assert!(!expected.is_empty());
        assert_eq!(reported, expected);
    }

    #[test]
    fn arity_one_is_vacuous_without_differential() {
        let r = check_ainfinity_relations(&conifold(), 1, SignConvention::Unreduced);
        assert!(r.passed());
        assert_eq!(r.records.len(), 1);
    }

    #[test]
    fn cyclic_pairing() {
        let a = conifold();
        let r = check_cyclicity(&a);
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let (t2, x) = (a.id("t2").unwrap(), a.id("x").unwrap());
        let lhs = a.pair_element(a.op(&a.ids(&["y", "t1", "x"]).unwrap()).unwrap(), t2);
        let rhs = a.pair_element(a.op(&a.ids(&["t2", "y", "t1"]).unwrap()).unwrap(), x);
        assert_eq!(lhs.abs(), Rational::one());
        assert_eq!(lhs.abs(), rhs.abs());
        let mut z = a.clone();
        z.clear_pairing();
        assert!(!check_cyclicity(&z).passed());
    }

    #[test]
    fn self_comparison_is_identity() {
        let a = conifold();
        let c = compare_structures(&a, &a, None).unwrap();
        assert!(c.entries.iter().all(|e| e.from == e.to && e.sign == 1));
        assert!(verify_dictionary(&a, &a, &c.invert()).is_ok());
    }

    #[test]
    fn sign_flip_is_certified() {
        let a = conifold();
        let mut b = a.clone();
        let t = b.ids(&["y", "t1", "x"]).unwrap();
        let v = b.op(&t).unwrap().negated();
        b.set_op(&t, &v).unwrap();
        match compare_structures(&a, &b, Some(&[0, 1])) {
            Err(FailureCertificate::Signs { tuples, .. }) => {
                assert!(tuples.contains(&"(y, t1, x)".to_string()), "{tuples:?}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let a = conifold();
        let back = AInfinityPresentation::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn rejects_bad_operations() {
        let mut a = conifold();
        let (x, y) = (a.id("x").unwrap(), a.id("y").unwrap());
        assert!(matches!(a.add_op(&[x, y], &Element::new()), Err(AInfinityError::NotComposable(_))));
        let t1 = a.id("t1").unwrap();
        assert!(matches!(a.add_op(&[x, t1], &Element::basis(x)), Err(AInfinityError::BadOutput { .. })));
    }

    #[test]
    fn composable_count_matches_enumeration() {
        let a = conifold();
        let bt = a.by_target();
        for n in 1..=4 {
            let mut count = 0u128;
            for first in 0..a.generators().len() {
                a.for_each_tuple(n, first, &bt, &mut |_| count += 1);
            }
            assert_eq!(count, a.count_composable(n));
        }
    }
}
