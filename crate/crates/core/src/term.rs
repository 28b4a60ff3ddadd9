//! Typed lambda terms over DRSs, functional composition and qualia-driven
//! type coercion.
//!
//! Terms are kept in their written order (no set semantics); only once a
//! term reduces to a lambda-free box is it turned into a [`Drs`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::drs::{Condition, Drs, Marker, MarkerSupply, QualiaRole, Sort};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemType {
    E,
    T,
    Fn(Box<SemType>, Box<SemType>),
}

impl SemType {
    pub fn fun(arg: SemType, result: SemType) -> SemType {
        SemType::Fn(Box::new(arg), Box::new(result))
    }

    /// `⟨e,t⟩`
    pub fn property() -> SemType {
        SemType::fun(SemType::E, SemType::T)
    }

    /// Build `a1 -> a2 -> ... -> result`.
    pub fn curried(args: impl IntoIterator<Item = SemType>, result: SemType) -> SemType {
        let args: Vec<SemType> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| SemType::fun(a, acc))
    }

    /// Split `a1 -> ... -> an -> r` into its argument types and final result.
    pub fn uncurry(&self) -> (Vec<&SemType>, &SemType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let SemType::Fn(a, r) = cur {
            args.push(a.as_ref());
            cur = r;
        }
        (args, cur)
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemType::E => f.write_str("e"),
            SemType::T => f.write_str("t"),
            SemType::Fn(a, r) => match a.as_ref() {
                SemType::Fn(..) => write!(f, "({a})->{r}"),
                _ => write!(f, "{a}->{r}"),
            },
        }
    }
}

/// A higher-order variable such as `P1` or `E`. The tag is only a
/// display hint; identity is the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunVar {
    pub tag: char,
    pub index: u32,
}

impl fmt::Display for FunVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            write!(f, "{}", self.tag)
        } else {
            write!(f, "{}{}", self.tag, self.index)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Binder {
    /// A discourse marker abstracted at type `e`.
    Marker(Marker),
    Fun(FunVar, SemType),
}

impl Binder {
    pub fn ty(&self) -> SemType {
        match self {
            Binder::Marker(_) => SemType::E,
            Binder::Fun(_, ty) => ty.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Box(TermDrs),
    Marker(Marker),
    Var(FunVar),
    Lam(Binder, Box<Term>),
    App(Box<Term>, Box<Term>),
    Merge(Box<Term>, Box<Term>),
}

/// A box whose sub-DRS slots hold terms rather than DRSs.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermDrs {
    pub universe: Vec<Marker>,
    pub conditions: Vec<TermCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TermCondition {
    Pred { name: String, args: Vec<Marker> },
    Eq(Marker, Marker),
    Impl(Term, Term),
    Neg(Term),
    Disj(Term, Term),
    Alpha(Term),
    Qualia(QualiaRole, Term),
}

/// A DRS abstracted over typed parameters: the unit of composition.
pub type LambdaDrs = Term;

impl TermCondition {
    fn terms(&self) -> Vec<&Term> {
        match self {
            TermCondition::Pred { .. } | TermCondition::Eq(..) => vec![],
            TermCondition::Impl(a, b) | TermCondition::Disj(a, b) => vec![a, b],
            TermCondition::Neg(a) | TermCondition::Alpha(a) | TermCondition::Qualia(_, a) => vec![a],
        }
    }

    fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> TermCondition {
        match self {
            TermCondition::Pred { .. } | TermCondition::Eq(..) => self.clone(),
            TermCondition::Impl(a, b) => TermCondition::Impl(f(a), f(b)),
            TermCondition::Disj(a, b) => TermCondition::Disj(f(a), f(b)),
            TermCondition::Neg(a) => TermCondition::Neg(f(a)),
            TermCondition::Alpha(a) => TermCondition::Alpha(f(a)),
            TermCondition::Qualia(r, a) => TermCondition::Qualia(*r, f(a)),
        }
    }
}

impl TermDrs {
    pub fn new(universe: Vec<Marker>, conditions: Vec<TermCondition>) -> TermDrs {
        let mut out = TermDrs { universe: Vec::new(), conditions: Vec::new() };
        for m in universe {
            out.declare(m);
        }
        for c in conditions {
            out.push(c);
        }
        out
    }

    pub fn declare(&mut self, m: Marker) {
        if !self.universe.contains(&m) {
            self.universe.push(m);
        }
    }

    pub fn push(&mut self, c: TermCondition) {
        if !self.conditions.contains(&c) {
            self.conditions.push(c);
        }
    }

    fn merged(&self, other: &TermDrs) -> TermDrs {
        let mut out = self.clone();
        for m in &other.universe {
            out.declare(*m);
        }
        for c in &other.conditions {
            out.push(c.clone());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable {0}")]
    Unbound(FunVar),
    #[error("{context}: expected {expected}, found {found}")]
    Mismatch { expected: SemType, found: SemType, context: String },
    #[error("cannot apply a term of type {0}")]
    NotAFunction(SemType),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompositionError {
    #[error("functor has type {0}, which takes no argument")]
    NotAFunction(SemType),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("term is not lambda-free: {0}")]
    NotLambdaFree(String),
}

fn mismatch(expected: SemType, found: SemType, context: &str) -> TypeError {
    TypeError::Mismatch { expected, found, context: context.to_string() }
}

impl Term {
    pub fn lam_marker(m: Marker, body: Term) -> Term {
        Term::Lam(Binder::Marker(m), Box::new(body))
    }

    pub fn lam_fun(v: FunVar, ty: SemType, body: Term) -> Term {
        Term::Lam(Binder::Fun(v, ty), Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn merge(a: Term, b: Term) -> Term {
        Term::Merge(Box::new(a), Box::new(b))
    }

    pub fn boxed(universe: Vec<Marker>, conditions: Vec<TermCondition>) -> Term {
        Term::Box(TermDrs::new(universe, conditions))
    }

    /// Leading lambda binders, outermost first.
    pub fn params(&self) -> Vec<&Binder> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Term::Lam(b, body) = cur {
            out.push(b);
            cur = body;
        }
        out
    }

    pub fn is_lambda_free(&self) -> bool {
        match self {
            Term::Box(d) => d.conditions.iter().all(|c| c.terms().iter().all(|t| t.is_lambda_free())),
            Term::Marker(_) => true,
            Term::Var(_) | Term::Lam(..) | Term::App(..) | Term::Merge(..) => false,
        }
    }

    /// Every marker occurring in the term, in first-occurrence order.
    pub fn markers(&self) -> Vec<Marker> {
        let mut out = Vec::new();
        self.visit_markers(&mut |m| {
            if !out.contains(&m) {
                out.push(m)
            }
        });
        out
    }

    fn visit_markers(&self, f: &mut impl FnMut(Marker)) {
        match self {
            Term::Box(d) => {
                d.universe.iter().for_each(|m| f(*m));
                for c in &d.conditions {
                    match c {
                        TermCondition::Pred { args, .. } => args.iter().for_each(|m| f(*m)),
                        TermCondition::Eq(a, b) => {
                            f(*a);
                            f(*b)
                        }
                        other => other.terms().iter().for_each(|t| t.visit_markers(f)),
                    }
                }
            }
            Term::Marker(m) => f(*m),
            Term::Var(_) => {}
            Term::Lam(b, body) => {
                if let Binder::Marker(m) = b {
                    f(*m);
                }
                body.visit_markers(f)
            }
            Term::App(a, b) | Term::Merge(a, b) => {
                a.visit_markers(f);
                b.visit_markers(f)
            }
        }
    }

    pub fn fun_vars(&self) -> Vec<FunVar> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<FunVar>) {
            match t {
                Term::Box(d) => d.conditions.iter().flat_map(|c| c.terms()).for_each(|t| go(t, out)),
                Term::Marker(_) => {}
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(*v)
                    }
                }
                Term::Lam(b, body) => {
                    if let Binder::Fun(v, _) = b {
                        if !out.contains(v) {
                            out.push(*v)
                        }
                    }
                    go(body, out)
                }
                Term::App(a, b) | Term::Merge(a, b) => {
                    go(a, out);
                    go(b, out)
                }
            }
        }
        go(self, &mut out);
        out
    }

    /// Rename markers and higher-order variables throughout, binders included.
    pub fn rename(&self, markers: &BTreeMap<Marker, Marker>, vars: &BTreeMap<FunVar, FunVar>) -> Term {
        let m = |x: &Marker| *markers.get(x).unwrap_or(x);
        match self {
            Term::Box(d) => Term::Box(TermDrs {
                universe: d.universe.iter().map(m).collect(),
                conditions: d
                    .conditions
                    .iter()
                    .map(|c| match c {
                        TermCondition::Pred { name, args } => {
                            TermCondition::Pred { name: name.clone(), args: args.iter().map(m).collect() }
                        }
                        TermCondition::Eq(a, b) => TermCondition::Eq(m(a), m(b)),
                        other => other.map_terms(&mut |t| t.rename(markers, vars)),
                    })
                    .collect(),
            }),
            Term::Marker(x) => Term::Marker(m(x)),
            Term::Var(v) => Term::Var(*vars.get(v).unwrap_or(v)),
            Term::Lam(b, body) => {
                let b = match b {
                    Binder::Marker(x) => Binder::Marker(m(x)),
                    Binder::Fun(v, ty) => Binder::Fun(*vars.get(v).unwrap_or(v), ty.clone()),
                };
                Term::Lam(b, Box::new(body.rename(markers, vars)))
            }
            Term::App(a, b) => Term::app(a.rename(markers, vars), b.rename(markers, vars)),
            Term::Merge(a, b) => Term::merge(a.rename(markers, vars), b.rename(markers, vars)),
        }
    }

    /// A copy in which every marker and variable is fresh. Used when a
    /// lexical entry is instantiated for one occurrence in a sentence.
    pub fn instantiate(&self, supply: &mut MarkerSupply) -> Term {
        let markers: BTreeMap<Marker, Marker> = self.markers().into_iter().map(|m| (m, supply.fresh(m.sort))).collect();
        let vars: BTreeMap<FunVar, FunVar> =
            self.fun_vars().into_iter().map(|v| (v, FunVar { tag: v.tag, index: supply.fresh_index() })).collect();
        self.rename(&markers, &vars)
    }

    /// Fresh names for markers bound inside the term (box universes and
    /// marker binders); free markers keep their identity.
    fn freshen_bound(&self, supply: &mut MarkerSupply) -> Term {
        let mut bound = Vec::new();
        fn go(t: &Term, out: &mut Vec<Marker>) {
            match t {
                Term::Box(d) => {
                    out.extend(d.universe.iter().copied());
                    d.conditions.iter().flat_map(|c| c.terms()).for_each(|t| go(t, out))
                }
                Term::Lam(b, body) => {
                    if let Binder::Marker(m) = b {
                        out.push(*m)
                    }
                    go(body, out)
                }
                Term::App(a, b) | Term::Merge(a, b) => {
                    go(a, out);
                    go(b, out)
                }
                Term::Marker(_) | Term::Var(_) => {}
            }
        }
        go(self, &mut bound);
        let map: BTreeMap<Marker, Marker> = bound.into_iter().map(|m| (m, supply.fresh(m.sort))).collect();
        self.rename(&map, &BTreeMap::new())
    }

    pub fn from_drs(k: &Drs) -> Term {
        Term::Box(TermDrs::new(
            k.universe().iter().copied().collect(),
            k.conditions()
                .iter()
                .map(|c| match c {
                    Condition::Pred { name, args } => TermCondition::Pred { name: name.clone(), args: args.clone() },
                    Condition::Eq(a, b) => TermCondition::Eq(*a, *b),
                    Condition::Impl(a, b) => TermCondition::Impl(Term::from_drs(a), Term::from_drs(b)),
                    Condition::Neg(a) => TermCondition::Neg(Term::from_drs(a)),
                    Condition::Disj(a, b) => TermCondition::Disj(Term::from_drs(a), Term::from_drs(b)),
                    Condition::Alpha(a) => TermCondition::Alpha(Term::from_drs(a)),
                    Condition::Qualia(r, a) => TermCondition::Qualia(*r, Term::from_drs(a)),
                })
                .collect(),
        ))
    }

    /// Convert a reduced, type-`t` term into a DRS. Qualia payloads that are
    /// still abstractions (an event-type quale such as `write`) are closed
    /// existentially: their marker parameters join the payload universe.
    pub fn to_drs(&self) -> Result<Drs, CompositionError> {
        match self {
            Term::Box(d) => {
                let mut conditions = Vec::with_capacity(d.conditions.len());
                for c in &d.conditions {
                    conditions.push(match c {
                        TermCondition::Pred { name, args } => Condition::pred(name.clone(), args.clone()),
                        TermCondition::Eq(a, b) => Condition::Eq(*a, *b),
                        TermCondition::Impl(a, b) => Condition::Impl(a.to_drs()?, b.to_drs()?),
                        TermCondition::Neg(a) => Condition::Neg(a.to_drs()?),
                        TermCondition::Disj(a, b) => Condition::Disj(a.to_drs()?, b.to_drs()?),
                        TermCondition::Alpha(a) => Condition::Alpha(a.to_drs()?),
                        TermCondition::Qualia(r, a) => Condition::Qualia(*r, close_quale(a)?),
                    });
                }
                Ok(Drs::new(d.universe.iter().copied(), conditions))
            }
            other => Err(CompositionError::NotLambdaFree(other.to_string())),
        }
    }
}

fn close_quale(t: &Term) -> Result<Drs, CompositionError> {
    let mut extra = Vec::new();
    let mut cur = t;
    while let Term::Lam(b, body) = cur {
        match b {
            Binder::Marker(m) => extra.push(*m),
            Binder::Fun(..) => return Err(CompositionError::NotLambdaFree(t.to_string())),
        }
        cur = body;
    }
    let inner = cur.to_drs()?;
    let mut out = Drs::new(extra, []);
    out = crate::drs::merge(&out, &inner);
    Ok(out)
}

/// The simple type of a closed term.
pub fn type_of(k: &Term) -> Result<SemType, TypeError> {
    type_in(k, &mut Vec::new())
}

fn type_in(k: &Term, env: &mut Vec<(FunVar, SemType)>) -> Result<SemType, TypeError> {
    match k {
        Term::Marker(_) => Ok(SemType::E),
        Term::Var(v) => env.iter().rev().find(|(w, _)| w == v).map(|(_, t)| t.clone()).ok_or(TypeError::Unbound(*v)),
        Term::Lam(b, body) => {
            let arg = b.ty();
            let pushed = if let Binder::Fun(v, ty) = b {
                env.push((*v, ty.clone()));
                true
            } else {
                false
            };
            let result = type_in(body, env);
            if pushed {
                env.pop();
            }
            Ok(SemType::fun(arg, result?))
        }
        Term::App(f, a) => match type_in(f, env)? {
            SemType::Fn(expected, result) => {
                let found = type_in(a, env)?;
                if found == *expected {
                    Ok(*result)
                } else {
                    Err(mismatch(*expected, found, "argument"))
                }
            }
            other => Err(TypeError::NotAFunction(other)),
        },
        Term::Merge(a, b) => {
            for side in [a, b] {
                let t = type_in(side, env)?;
                if t != SemType::T {
                    return Err(mismatch(SemType::T, t, "merge operand"));
                }
            }
            Ok(SemType::T)
        }
        Term::Box(d) => {
            for c in &d.conditions {
                let must_be_t = !matches!(c, TermCondition::Qualia(..));
                for t in c.terms() {
                    let ty = type_in(t, env)?;
                    if must_be_t && ty != SemType::T {
                        return Err(mismatch(SemType::T, ty, "embedded DRS"));
                    }
                }
            }
            Ok(SemType::T)
        }
    }
}

/// Normal-order beta reduction; merges of two boxes are evaluated.
pub fn beta_reduce(k: &Term, supply: &mut MarkerSupply) -> Term {
    match k {
        Term::App(f, a) => {
            let f = beta_reduce(f, supply);
            let a = beta_reduce(a, supply);
            match f {
                Term::Lam(b, body) => {
                    let reduced = substitute_binder(&body, &b, &a, supply);
                    beta_reduce(&reduced, supply)
                }
                other => Term::app(other, a),
            }
        }
        Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(beta_reduce(body, supply))),
        Term::Merge(a, b) => {
            let a = beta_reduce(a, supply);
            let b = beta_reduce(b, supply);
            match (a, b) {
                (Term::Box(x), Term::Box(y)) => Term::Box(x.merged(&y)),
                (a, b) => Term::merge(a, b),
            }
        }
        Term::Box(d) => Term::Box(TermDrs {
            universe: d.universe.clone(),
            conditions: d.conditions.iter().map(|c| c.map_terms(&mut |t| beta_reduce(t, supply))).collect(),
        }),
        Term::Marker(_) | Term::Var(_) => k.clone(),
    }
}

/// Convenience wrapper drawing fresh markers above those already in `k`.
pub fn normalize(k: &Term) -> Term {
    let mut supply = MarkerSupply::above(k.markers().iter());
    beta_reduce(k, &mut supply)
}

fn substitute_binder(body: &Term, binder: &Binder, arg: &Term, supply: &mut MarkerSupply) -> Term {
    match (binder, arg) {
        (Binder::Marker(m), Term::Marker(n)) => {
            let map = BTreeMap::from([(*m, *n)]);
            replace_marker(body, *m, &map)
        }
        (Binder::Fun(v, _), _) => {
            let mut copies = 0usize;
            replace_var(body, *v, arg, &mut copies, supply)
        }
        // ill-typed redex; leave it in place
        (Binder::Marker(_), _) => Term::app(Term::Lam(binder.clone(), Box::new(body.clone())), arg.clone()),
    }
}

fn replace_marker(t: &Term, m: Marker, map: &BTreeMap<Marker, Marker>) -> Term {
    match t {
        Term::Lam(Binder::Marker(b), _) if *b == m => t.clone(),
        Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(replace_marker(body, m, map))),
        Term::App(a, b) => Term::app(replace_marker(a, m, map), replace_marker(b, m, map)),
        Term::Merge(a, b) => Term::merge(replace_marker(a, m, map), replace_marker(b, m, map)),
        Term::Box(_) | Term::Marker(_) => {
            // boxes below a shadowing lambda are handled by the arm above
            match t {
                Term::Box(d) => {
                    let look = |x: &Marker| *map.get(x).unwrap_or(x);
                    Term::Box(TermDrs {
                        universe: d.universe.iter().map(look).collect(),
                        conditions: d
                            .conditions
                            .iter()
                            .map(|c| match c {
                                TermCondition::Pred { name, args } => {
                                    TermCondition::Pred { name: name.clone(), args: args.iter().map(look).collect() }
                                }
                                TermCondition::Eq(a, b) => TermCondition::Eq(look(a), look(b)),
                                other => other.map_terms(&mut |x| replace_marker(x, m, map)),
                            })
                            .collect(),
                    })
                }
                Term::Marker(x) => Term::Marker(*map.get(x).unwrap_or(x)),
                _ => unreachable!(),
            }
        }
        Term::Var(_) => t.clone(),
    }
}

fn replace_var(t: &Term, v: FunVar, arg: &Term, copies: &mut usize, supply: &mut MarkerSupply) -> Term {
    match t {
        Term::Var(w) if *w == v => {
            *copies += 1;
            if *copies == 1 {
                arg.clone()
            } else {
                arg.freshen_bound(supply)
            }
        }
        Term::Var(_) | Term::Marker(_) => t.clone(),
        Term::Lam(Binder::Fun(w, _), _) if *w == v => t.clone(),
        Term::Lam(b, body) => Term::Lam(b.clone(), Box::new(replace_var(body, v, arg, copies, supply))),
        Term::App(a, b) => {
            let a = replace_var(a, v, arg, copies, supply);
            Term::app(a, replace_var(b, v, arg, copies, supply))
        }
        Term::Merge(a, b) => {
            let a = replace_var(a, v, arg, copies, supply);
            Term::merge(a, replace_var(b, v, arg, copies, supply))
        }
        Term::Box(d) => Term::Box(TermDrs {
            universe: d.universe.clone(),
            conditions: d
                .conditions
                .iter()
                .map(|c| c.map_terms(&mut |x| replace_var(x, v, arg, copies, supply)))
                .collect(),
        }),
    }
}

/// All qualia payloads anywhere in `k`, ordered by role (agentive, telic,
/// formal, constitutive) and then by position.
pub fn qualia_access(k: &Term) -> Vec<(QualiaRole, Term)> {
    let mut found = Vec::new();
    fn go(t: &Term, out: &mut Vec<(QualiaRole, Term)>) {
        match t {
            Term::Box(d) => {
                for c in &d.conditions {
                    if let TermCondition::Qualia(role, payload) = c {
                        out.push((*role, payload.clone()));
                    }
                    c.terms().iter().for_each(|t| go(t, out));
                }
            }
            Term::Lam(_, body) => go(body, out),
            Term::App(a, b) | Term::Merge(a, b) => {
                go(a, out);
                go(b, out)
            }
            Term::Marker(_) | Term::Var(_) => {}
        }
    }
    go(k, &mut found);
    found.sort_by_key(|(role, _)| role.coercion_rank());
    found
}

/// How a composition result was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composed {
    pub term: Term,
    pub coercion: Option<Coercion>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coercion {
    pub role: QualiaRole,
    pub quale: Term,
    /// The argument after coercion, before it was consumed by the functor.
    pub coerced: Term,
}

/// Clause one of composition: plain application when the argument has
/// the functor's input type, otherwise bind the argument's first
/// parameter under the functor and abstract over the rest
/// (`λσ. f(λv. a(v)(σ))`). `None` when neither fits.
pub fn compose_direct(functor: &Term, argument: &Term, supply: &mut MarkerSupply) -> Option<Term> {
    let SemType::Fn(expected, _) = type_of(functor).ok()? else {
        return None;
    };
    let found = type_of(argument).ok()?;
    if found == *expected {
        return Some(beta_reduce(&Term::app(functor.clone(), argument.clone()), supply));
    }
    let SemType::Fn(tau, result) = expected.as_ref() else {
        return None;
    };
    if **result != SemType::T {
        return None;
    }
    let (arg_params, arg_result) = found.uncurry();
    if *arg_result != SemType::T || arg_params.len() < 2 || arg_params[0] != tau.as_ref() {
        return None;
    }
    // reuse the argument's own binder sorts for the fresh parameters
    let sorts: Vec<Option<Sort>> = argument
        .params()
        .iter()
        .map(|b| match b {
            Binder::Marker(m) => Some(m.sort),
            Binder::Fun(..) => None,
        })
        .collect();
    let fresh_binder = |ty: &SemType, position: usize, supply: &mut MarkerSupply| match ty {
        SemType::E => {
            let sort = sorts.get(position).copied().flatten().unwrap_or(Sort::Entity);
            let m = supply.fresh(sort);
            (Binder::Marker(m), Term::Marker(m))
        }
        other => {
            let v = FunVar { tag: 'V', index: supply.fresh_index() };
            (Binder::Fun(v, other.clone()), Term::Var(v))
        }
    };
    let (v_binder, v_ref) = fresh_binder(arg_params[0], 0, supply);
    let mut sigma = Vec::new();
    for (i, ty) in arg_params.iter().enumerate().skip(1) {
        sigma.push(fresh_binder(ty, i, supply));
    }
    let mut inner = Term::app(argument.clone(), v_ref);
    for (_, r) in &sigma {
        inner = Term::app(inner, r.clone());
    }
    let mut out = Term::app(functor.clone(), Term::Lam(v_binder, Box::new(inner)));
    for (b, _) in sigma.into_iter().rev() {
        out = Term::Lam(b, Box::new(out));
    }
    Some(beta_reduce(&out, supply))
}

/// Coerce `k` through each of its qualia. A quale is first tried as the
/// functor over `k`; when that does not type, `k` is used as the functor
/// over the quale (the shape that turns `a book` into a `write`/`read`
/// event type). One coercion step only.
pub fn type_coercion_with_roles(k: &Term, supply: &mut MarkerSupply) -> Vec<Coercion> {
    let mut out: Vec<Coercion> = Vec::new();
    for (role, quale) in qualia_access(k) {
        let coerced = compose_direct(&quale, k, supply).or_else(|| compose_direct(k, &quale, supply));
        if let Some(coerced) = coerced {
            if !out.iter().any(|c| c.coerced == coerced) {
                out.push(Coercion { role, quale, coerced });
            }
        }
    }
    out
}

pub fn type_coercion(k: &Term, supply: &mut MarkerSupply) -> Vec<Term> {
    type_coercion_with_roles(k, supply).into_iter().map(|c| c.coerced).collect()
}

/// Functional composition with coercion as a fallback. An empty result
/// means neither direct composition nor any coercion of the argument works.
pub fn compose(functor: &Term, argument: &Term, supply: &mut MarkerSupply) -> Result<Vec<Composed>, CompositionError> {
    match type_of(functor)? {
        SemType::Fn(..) => {}
        other => return Err(CompositionError::NotAFunction(other)),
    }
    type_of(argument)?;
    if let Some(term) = compose_direct(functor, argument, supply) {
        return Ok(vec![Composed { term, coercion: None }]);
    }
    let mut out: Vec<Composed> = Vec::new();
    for coercion in type_coercion_with_roles(argument, supply) {
        if let Some(term) = compose_direct(functor, &coercion.coerced, supply) {
            if !out.iter().any(|c| c.term == term) {
                out.push(Composed { term, coercion: Some(coercion) });
            }
        }
    }
    Ok(out)
}

pub fn functional_composition(
    functor: &Term,
    argument: &Term,
    supply: &mut MarkerSupply,
) -> Result<Vec<Term>, CompositionError> {
    Ok(compose(functor, argument, supply)?.into_iter().map(|c| c.term).collect())
}
