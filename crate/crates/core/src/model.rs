//! Finite models, embedding-based verification of proper DRSs, and
//! bounded consistency/entailment checks.
//!
//! `verify` enumerates embeddings directly. `consistent` and `entails`
//! ground the DRS over every domain size up to the bound and hand the
//! resulting propositional formula to a DPLL solver, so only the
//! predicates that actually occur are ever instantiated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::drs::{is_proper, Condition, Drs, Marker};
use crate::sat::{satisfiable, Formula};
use crate::syntax::Cursor;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("DRS is not proper (unresolved alpha conditions or free markers)")]
    NotProper,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// A finite model. Individuals are numbered `0..size`; names are kept
/// for display and for the file format.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    domain: Vec<String>,
    interpretation: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl Model {
    pub fn new(names: impl IntoIterator<Item = impl Into<String>>) -> Model {
        Model { domain: names.into_iter().map(Into::into).collect(), interpretation: BTreeMap::new() }
    }

    /// A domain of `n` individuals named `d1..dn`.
    pub fn with_size(n: usize) -> Model {
        Model::new((1..=n).map(|i| format!("d{i}")))
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn individual(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|d| d == name)
    }

    pub fn add(&mut self, pred: impl Into<String>, tuple: Vec<usize>) {
        self.interpretation.entry(pred.into()).or_default().insert(tuple);
    }

    pub fn extension(&self, pred: &str) -> impl Iterator<Item = &Vec<usize>> {
        self.interpretation.get(pred).into_iter().flatten()
    }

    pub fn holds(&self, pred: &str, tuple: &[usize]) -> bool {
        self.interpretation.get(pred).map(|ext| ext.contains(tuple)).unwrap_or(false)
    }

    /// `domain: d1 d2 ...` followed by `pred name: (d1,d2) (d3)` lines.
    pub fn parse(src: &str) -> Result<Model, ModelError> {
        let mut model: Option<Model> = None;
        let mut arities: BTreeMap<String, usize> = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let err = |message: String| ModelError::Format { line, message };
            if let Some(rest) = text.strip_prefix("domain:") {
                if model.is_some() {
                    return Err(err("domain given twice".into()));
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                let unique: BTreeSet<&str> = names.iter().copied().collect();
                if unique.len() != names.len() {
                    return Err(err("duplicate individual in domain".into()));
                }
                model = Some(Model::new(names));
                continue;
            }
            let Some(rest) = text.strip_prefix("pred ") else {
                return Err(err(format!("expected `domain:` or `pred`, found `{text}`")));
            };
            let m = model.as_mut().ok_or_else(|| err("`pred` line before `domain:`".into()))?;
            let (name, tuples) = rest.split_once(':').ok_or_else(|| err("expected `:` after predicate name".into()))?;
            let name = name.trim();
            if name.is_empty() {
                return Err(err("missing predicate name".into()));
            }
            m.interpretation.entry(name.to_string()).or_default();
            let mut cur = Cursor::new(tuples);
            while !cur.at_end() {
                cur.expect("(").map_err(|e| err(e.message))?;
                let mut tuple = Vec::new();
                if !cur.eat(")") {
                    loop {
                        let d = cur.ident().map_err(|e| err(e.message))?;
                        let idx = m.individual(&d).ok_or_else(|| err(format!("`{d}` is not in the domain")))?;
                        tuple.push(idx);
                        if cur.eat(")") {
                            break;
                        }
                        cur.expect(",").map_err(|e| err(e.message))?;
                    }
                }
                match arities.get(name) {
                    Some(&n) if n != tuple.len() => {
                        return Err(err(format!("`{name}` used with arities {n} and {}", tuple.len())));
                    }
                    _ => {
                        arities.insert(name.to_string(), tuple.len());
                    }
                }
                m.add(name, tuple);
            }
        }
        model.ok_or(ModelError::Format { line: 0, message: "missing `domain:` line".into() })
    }

    /// Check the model's extensions against an arity table.
    pub fn check_arities(&self, arities: &BTreeMap<String, usize>) -> Result<(), String> {
        for (pred, ext) in &self.interpretation {
            if let Some(&n) = arities.get(pred) {
                if let Some(t) = ext.iter().find(|t| t.len() != n) {
                    return Err(format!("`{pred}` has arity {n} but the model lists a {}-tuple", t.len()));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "domain: {}", self.domain.join(" "))?;
        for (pred, ext) in &self.interpretation {
            write!(f, "pred {pred}:")?;
            for t in ext {
                let names: Vec<&str> = t.iter().map(|i| self.domain[*i].as_str()).collect();
                write!(f, " ({})", names.join(","))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// An assignment of domain individuals to markers.
pub type Embedding = BTreeMap<Marker, usize>;

/// Is the proper DRS `k` true in `m`? Qualia conditions are skipped.
pub fn verify(k: &Drs, m: &Model) -> Result<bool, ModelError> {
    if !is_proper(k) {
        return Err(ModelError::NotProper);
    }
    Ok(embeddings(k, m, &Embedding::new()).next().is_some())
}

/// Every verifying embedding of `k`'s top universe.
pub fn verifying_embeddings(k: &Drs, m: &Model) -> Result<Vec<Embedding>, ModelError> {
    if !is_proper(k) {
        return Err(ModelError::NotProper);
    }
    Ok(embeddings(k, m, &Embedding::new()).collect())
}

fn extensions<'a>(
    universe: &'a BTreeSet<Marker>,
    size: usize,
    base: &'a Embedding,
) -> impl Iterator<Item = Embedding> + 'a {
    let markers: Vec<Marker> = universe.iter().copied().collect();
    let total = if markers.is_empty() { 1 } else { size.checked_pow(markers.len() as u32).unwrap_or(usize::MAX) };
    (0..total).map(move |mut code| {
        let mut g = base.clone();
        for mk in &markers {
            g.insert(*mk, code % size.max(1));
            code /= size.max(1);
        }
        g
    })
}

fn embeddings<'a>(k: &'a Drs, m: &'a Model, base: &'a Embedding) -> Box<dyn Iterator<Item = Embedding> + 'a> {
    if m.size() == 0 && !k.universe().is_empty() {
        return Box::new(std::iter::empty());
    }
    Box::new(
        extensions(k.universe(), m.size(), base).filter(move |g| k.conditions().iter().all(|c| satisfies(c, m, g))),
    )
}

fn satisfies(c: &Condition, m: &Model, g: &Embedding) -> bool {
    let val = |x: &Marker| g[x];
    match c {
        Condition::Pred { name, args } => m.holds(name, &args.iter().map(val).collect::<Vec<_>>()),
        Condition::Eq(a, b) => val(a) == val(b),
        Condition::Neg(k) => embeddings(k, m, g).next().is_none(),
        Condition::Disj(a, b) => embeddings(a, m, g).next().is_some() || embeddings(b, m, g).next().is_some(),
        Condition::Impl(a, b) => embeddings(a, m, g).all(|h| embeddings(b, m, &h).next().is_some()),
        Condition::Qualia(..) => true,
        Condition::Alpha(_) => unreachable!("verify rejects unresolved DRSs"),
    }
}

/// Ground atoms `pred(tuple)` numbered on first use.
struct Grounder {
    size: usize,
    atoms: BTreeMap<(String, Vec<usize>), usize>,
}

impl Grounder {
    fn atom(&mut self, pred: &str, tuple: Vec<usize>) -> Formula {
        let next = self.atoms.len();
        Formula::Atom(*self.atoms.entry((pred.to_string(), tuple)).or_insert(next))
    }

    fn exists(&mut self, k: &Drs, g: &Embedding) -> Formula {
        let cases: Vec<Embedding> = extensions(k.universe(), self.size, g).collect();
        let parts: Vec<Formula> = cases.iter().map(|h| self.all(k, h)).collect();
        Formula::or(parts)
    }

    fn all(&mut self, k: &Drs, g: &Embedding) -> Formula {
        let parts: Vec<Formula> = k.conditions().iter().map(|c| self.condition(c, g)).collect();
        Formula::and(parts)
    }

    fn condition(&mut self, c: &Condition, g: &Embedding) -> Formula {
        match c {
            Condition::Pred { name, args } => self.atom(name, args.iter().map(|a| g[a]).collect()),
            Condition::Eq(a, b) => {
                if g[a] == g[b] {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Condition::Neg(k) => Formula::not(self.exists(k, g)),
            Condition::Disj(a, b) => {
                let a = self.exists(a, g);
                Formula::or([a, self.exists(b, g)])
            }
            Condition::Impl(a, b) => {
                let cases: Vec<Embedding> = extensions(a.universe(), self.size, g).collect();
                let mut parts = Vec::with_capacity(cases.len());
                for h in &cases {
                    let ante = self.all(a, h);
                    let cons = self.exists(b, h);
                    parts.push(Formula::or([Formula::not(ante), cons]));
                }
                Formula::and(parts)
            }
            Condition::Qualia(..) | Condition::Alpha(_) => Formula::True,
        }
    }
}

fn ground(k: &Drs, size: usize) -> (Formula, Grounder) {
    let mut grounder = Grounder { size, atoms: BTreeMap::new() };
    let f = grounder.exists(k, &Embedding::new());
    (f, grounder)
}

/// Is there a model with between 1 and `bound` individuals verifying `k`?
/// With `bound == 0` nothing is checked and the answer is `true`.
pub fn consistent(k: &Drs, bound: usize) -> Result<bool, ModelError> {
    if !is_proper(k) {
        return Err(ModelError::NotProper);
    }
    Ok(consistent_unchecked(k, bound))
}

pub(crate) fn consistent_unchecked(k: &Drs, bound: usize) -> bool {
    if bound == 0 {
        return true;
    }
    (1..=bound).any(|n| {
        let (f, g) = ground(k, n);
        satisfiable(&f, g.atoms.len())
    })
}

/// Does every model with between 1 and `bound` individuals verifying `k1`
/// also verify `k2`? Vacuously true for `bound == 0`.
pub fn entails(k1: &Drs, k2: &Drs, bound: usize) -> Result<bool, ModelError> {
    if !is_proper(k1) || !is_proper(k2) {
        return Err(ModelError::NotProper);
    }
    Ok(entails_unchecked(k1, k2, bound))
}

pub(crate) fn entails_unchecked(k1: &Drs, k2: &Drs, bound: usize) -> bool {
    (1..=bound).all(|n| {
        let mut grounder = Grounder { size: n, atoms: BTreeMap::new() };
        let a = grounder.exists(k1, &Embedding::new());
        let b = grounder.exists(k2, &Embedding::new());
        !satisfiable(&Formula::and([a, Formula::not(b)]), grounder.atoms.len())
    })
}

/// Predicates (with arity) that matter for truth: those outside qualia.
pub fn signature(k: &Drs) -> BTreeMap<String, usize> {
    fn go(k: &Drs, out: &mut BTreeMap<String, usize>) {
        for c in k.conditions() {
            match c {
                Condition::Pred { name, args } => {
                    out.insert(name.clone(), args.len());
                }
                Condition::Qualia(..) => {}
                other => other.children().into_iter().for_each(|(_, d)| go(d, out)),
            }
        }
    }
    let mut out = BTreeMap::new();
    go(k, &mut out);
    out
}

/// Every model over a domain of `size` individuals interpreting exactly
/// the predicates in `signature`. Exponential; meant for small checks.
pub fn all_models(signature: &BTreeMap<String, usize>, size: usize) -> impl Iterator<Item = Model> {
    let mut slots: Vec<(String, Vec<usize>)> = Vec::new();
    for (pred, &arity) in signature {
        let count = size.pow(arity as u32);
        for mut code in 0..count {
            let mut tuple = Vec::with_capacity(arity);
            for _ in 0..arity {
                tuple.push(code % size);
                code /= size;
            }
            slots.push((pred.clone(), tuple));
        }
    }
    assert!(slots.len() < 63, "signature too large to enumerate");
    (0..1u64 << slots.len()).map(move |bits| {
        let mut m = Model::with_size(size);
        for (i, (pred, tuple)) in slots.iter().enumerate() {
            m.interpretation.entry(pred.clone()).or_default();
            if bits >> i & 1 == 1 {
                m.add(pred.clone(), tuple.clone());
            }
        }
        m
    })
}

/// `consistent` by explicit model enumeration; the reference route for
/// cross-checking the solver on small signatures.
pub fn consistent_by_enumeration(k: &Drs, bound: usize) -> Result<bool, ModelError> {
    if !is_proper(k) {
        return Err(ModelError::NotProper);
    }
    let sig = signature(k);
    for n in 1..=bound {
        for m in all_models(&sig, n) {
            if verify(k, &m)? {
                return Ok(true);
            }
        }
    }
    Ok(bound == 0)
}
