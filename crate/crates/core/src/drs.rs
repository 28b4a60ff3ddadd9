//! The DRS algebra.
//!
//! A [`Drs`] is a universe of discourse markers plus a set of conditions.
//! Conditions are kept in insertion order (so that paths into a DRS stay
//! stable under substitution) but duplicates are dropped on insertion and
//! equality, ordering and hashing all treat both components as sets.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DrsError {
    #[error("path {0} does not address a sub-DRS")]
    InvalidPath(DrsPath),
    #[error("malformed path `{0}`")]
    MalformedPath(String),
}

/// Entities and events both inhabit semantic type `e`; the sort only
/// constrains which markers an anaphor may pick up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sort {
    Entity,
    Event,
}

impl Sort {
    pub fn tag(self) -> char {
        match self {
            Sort::Entity => 'x',
            Sort::Event => 'e',
        }
    }

    pub fn from_tag(c: char) -> Option<Sort> {
        match c {
            'x' => Some(Sort::Entity),
            'e' => Some(Sort::Event),
            _ => None,
        }
    }
}

/// A discourse marker. Indices are unique across sorts within one derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marker {
    pub index: u32,
    pub sort: Sort,
}

impl Marker {
    pub const fn entity(index: u32) -> Marker {
        Marker { index, sort: Sort::Entity }
    }

    pub const fn event(index: u32) -> Marker {
        Marker { index, sort: Sort::Event }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.sort.tag(), self.index)
    }
}

/// Monotone source of fresh marker indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkerSupply {
    next: u32,
}

impl MarkerSupply {
    pub fn new() -> Self {
        MarkerSupply { next: 1 }
    }

    /// A supply whose first index is strictly above every given marker.
    pub fn above<'a>(markers: impl IntoIterator<Item = &'a Marker>) -> Self {
        let max = markers.into_iter().map(|m| m.index).max().unwrap_or(0);
        MarkerSupply { next: max + 1 }
    }

    pub fn fresh(&mut self, sort: Sort) -> Marker {
        let m = Marker { index: self.next.max(1), sort };
        self.next = m.index + 1;
        m
    }

    pub fn fresh_index(&mut self) -> u32 {
        let i = self.next.max(1);
        self.next = i + 1;
        i
    }

    /// Never hand out an index at or below `index`.
    pub fn reserve_through(&mut self, index: u32) {
        self.next = self.next.max(index + 1);
    }

    pub fn peek(&self) -> u32 {
        self.next.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QualiaRole {
    Formal,
    Constitutive,
    Telic,
    Agentive,
}

impl QualiaRole {
    pub const ALL: [QualiaRole; 4] =
        [QualiaRole::Formal, QualiaRole::Constitutive, QualiaRole::Telic, QualiaRole::Agentive];

    pub fn name(self) -> &'static str {
        match self {
            QualiaRole::Formal => "formal",
            QualiaRole::Constitutive => "constitutive",
            QualiaRole::Telic => "telic",
            QualiaRole::Agentive => "agentive",
        }
    }

    /// Order in which coercion candidates are offered.
    pub fn coercion_rank(self) -> u8 {
        match self {
            QualiaRole::Agentive => 0,
            QualiaRole::Telic => 1,
            QualiaRole::Formal => 2,
            QualiaRole::Constitutive => 3,
        }
    }
}

impl FromStr for QualiaRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "formal" => Ok(QualiaRole::Formal),
            "constitutive" => Ok(QualiaRole::Constitutive),
            "telic" => Ok(QualiaRole::Telic),
            "agentive" => Ok(QualiaRole::Agentive),
            other => Err(format!("unknown qualia role `{other}`")),
        }
    }
}

impl fmt::Display for QualiaRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Pred { name: String, args: Vec<Marker> },
    Eq(Marker, Marker),
    Impl(Drs, Drs),
    Neg(Drs),
    Disj(Drs, Drs),
    Alpha(Drs),
    Qualia(QualiaRole, Drs),
}

impl Condition {
    pub fn pred(name: impl Into<String>, args: impl IntoIterator<Item = Marker>) -> Condition {
        Condition::Pred { name: name.into(), args: args.into_iter().collect() }
    }

    /// Sub-DRSs of this condition together with the slot that reaches them.
    pub fn children(&self) -> Vec<(Slot, &Drs)> {
        match self {
            Condition::Pred { .. } | Condition::Eq(..) => vec![],
            Condition::Impl(a, c) => vec![(Slot::Antecedent, a), (Slot::Consequent, c)],
            Condition::Neg(k) => vec![(Slot::Negated, k)],
            Condition::Disj(l, r) => vec![(Slot::Left, l), (Slot::Right, r)],
            Condition::Alpha(k) => vec![(Slot::Alpha, k)],
            Condition::Qualia(_, k) => vec![(Slot::Qualia, k)],
        }
    }

    pub fn child(&self, slot: Slot) -> Option<&Drs> {
        match (self, slot) {
            (Condition::Impl(a, _), Slot::Antecedent) => Some(a),
            (Condition::Impl(_, c), Slot::Consequent) => Some(c),
            (Condition::Neg(k), Slot::Negated) => Some(k),
            (Condition::Disj(l, _), Slot::Left) => Some(l),
            (Condition::Disj(_, r), Slot::Right) => Some(r),
            (Condition::Alpha(k), Slot::Alpha) => Some(k),
            (Condition::Qualia(_, k), Slot::Qualia) => Some(k),
            _ => None,
        }
    }

    pub fn child_mut(&mut self, slot: Slot) -> Option<&mut Drs> {
        match (self, slot) {
            (Condition::Impl(a, _), Slot::Antecedent) => Some(a),
            (Condition::Impl(_, c), Slot::Consequent) => Some(c),
            (Condition::Neg(k), Slot::Negated) => Some(k),
            (Condition::Disj(l, _), Slot::Left) => Some(l),
            (Condition::Disj(_, r), Slot::Right) => Some(r),
            (Condition::Alpha(k), Slot::Alpha) => Some(k),
            (Condition::Qualia(_, k), Slot::Qualia) => Some(k),
            _ => None,
        }
    }

    /// Apply `f` to every marker occurrence, including nested universes.
    pub fn map_markers(&self, f: &impl Fn(Marker) -> Marker) -> Condition {
        match self {
            Condition::Pred { name, args } => {
                Condition::Pred { name: name.clone(), args: args.iter().map(|m| f(*m)).collect() }
            }
            Condition::Eq(a, b) => Condition::Eq(f(*a), f(*b)),
            Condition::Impl(a, c) => Condition::Impl(a.map_markers(f), c.map_markers(f)),
            Condition::Neg(k) => Condition::Neg(k.map_markers(f)),
            Condition::Disj(l, r) => Condition::Disj(l.map_markers(f), r.map_markers(f)),
            Condition::Alpha(k) => Condition::Alpha(k.map_markers(f)),
            Condition::Qualia(role, k) => Condition::Qualia(*role, k.map_markers(f)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Drs {
    universe: BTreeSet<Marker>,
    conditions: Vec<Condition>,
}

impl Drs {
    pub fn new(universe: impl IntoIterator<Item = Marker>, conditions: impl IntoIterator<Item = Condition>) -> Drs {
        let mut k = Drs { universe: universe.into_iter().collect(), conditions: Vec::new() };
        for c in conditions {
            k.push(c);
        }
        k
    }

    pub fn empty() -> Drs {
        Drs::default()
    }

    pub fn universe(&self) -> &BTreeSet<Marker> {
        &self.universe
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty() && self.conditions.is_empty()
    }

    pub fn declare(&mut self, m: Marker) {
        self.universe.insert(m);
    }

    /// Append a condition unless an equal one is already present.
    pub fn push(&mut self, c: Condition) -> bool {
        if self.conditions.contains(&c) {
            false
        } else {
            self.conditions.push(c);
            true
        }
    }

    /// Insert at a position (clamped), dropping the condition if present.
    pub fn insert(&mut self, at: usize, c: Condition) -> bool {
        if self.conditions.contains(&c) {
            false
        } else {
            let at = at.min(self.conditions.len());
            self.conditions.insert(at, c);
            true
        }
    }

    pub fn remove_condition(&mut self, index: usize) -> Condition {
        self.conditions.remove(index)
    }

    pub fn map_markers(&self, f: &impl Fn(Marker) -> Marker) -> Drs {
        Drs::new(self.universe.iter().map(|m| f(*m)), self.conditions.iter().map(|c| c.map_markers(f)))
    }

    /// Total renaming: every occurrence found in `map` is replaced.
    pub fn rename(&self, map: &BTreeMap<Marker, Marker>) -> Drs {
        self.map_markers(&|m| *map.get(&m).unwrap_or(&m))
    }

    /// Every marker occurring anywhere, declared or not.
    pub fn markers(&self) -> BTreeSet<Marker> {
        let mut out = BTreeSet::new();
        self.collect_markers(&mut out);
        out
    }

    fn collect_markers(&self, out: &mut BTreeSet<Marker>) {
        out.extend(self.universe.iter().copied());
        for c in &self.conditions {
            match c {
                Condition::Pred { args, .. } => out.extend(args.iter().copied()),
                Condition::Eq(a, b) => {
                    out.insert(*a);
                    out.insert(*b);
                }
                other => {
                    for (_, k) in other.children() {
                        k.collect_markers(out);
                    }
                }
            }
        }
    }

    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.walk(&mut |_, k| {
            for c in &k.conditions {
                if let Condition::Pred { name, args } = c {
                    out.insert(name.clone(), args.len());
                }
            }
        });
        out
    }

    /// Pre-order traversal over every sub-DRS with its path.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&DrsPath, &'a Drs)) {
        fn go<'a>(k: &'a Drs, path: &mut DrsPath, f: &mut impl FnMut(&DrsPath, &'a Drs)) {
            f(path, k);
            for (i, c) in k.conditions.iter().enumerate() {
                for (slot, child) in c.children() {
                    path.0.push(Step { condition: i, slot });
                    go(child, path, f);
                    path.0.pop();
                }
            }
        }
        go(self, &mut DrsPath::root(), f)
    }

    pub fn all_paths(&self) -> Vec<DrsPath> {
        let mut out = Vec::new();
        self.walk(&mut |p, _| out.push(p.clone()));
        out
    }

    /// Paths of every α-condition payload, in textual (pre-order) order.
    pub fn alpha_paths(&self) -> Vec<DrsPath> {
        self.all_paths().into_iter().filter(|p| p.last().map(|s| s.slot == Slot::Alpha).unwrap_or(false)).collect()
    }

    pub fn alpha_count(&self) -> usize {
        self.alpha_paths().len()
    }

    pub fn contains_alpha(&self) -> bool {
        self.alpha_count() > 0
    }

    pub fn depth(&self) -> usize {
        1 + self.conditions.iter().flat_map(|c| c.children()).map(|(_, k)| k.depth()).max().unwrap_or(0)
    }

    pub fn at(&self, path: &DrsPath) -> Result<&Drs, DrsError> {
        let mut k = self;
        for step in &path.0 {
            k = k
                .conditions
                .get(step.condition)
                .and_then(|c| c.child(step.slot))
                .ok_or_else(|| DrsError::InvalidPath(path.clone()))?;
        }
        Ok(k)
    }

    pub fn at_mut(&mut self, path: &DrsPath) -> Result<&mut Drs, DrsError> {
        let mut k = self;
        for step in &path.0 {
            k = k
                .conditions
                .get_mut(step.condition)
                .and_then(|c| c.child_mut(step.slot))
                .ok_or_else(|| DrsError::InvalidPath(path.clone()))?;
        }
        Ok(k)
    }

    fn canonical_conditions(&self) -> Vec<&Condition> {
        let mut cs: Vec<&Condition> = self.conditions.iter().collect();
        cs.sort();
        cs.dedup();
        cs
    }
}

impl PartialEq for Drs {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Drs {}

impl PartialOrd for Drs {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Drs {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe.cmp(&other.universe).then_with(|| self.canonical_conditions().cmp(&other.canonical_conditions()))
    }
}

impl Hash for Drs {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.universe.hash(state);
        self.canonical_conditions().hash(state);
    }
}

/// Which sub-DRS of a complex condition a path step enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Antecedent,
    Consequent,
    Negated,
    Left,
    Right,
    Alpha,
    Qualia,
}

impl Slot {
    fn code(self) -> &'static str {
        match self {
            Slot::Antecedent => "ant",
            Slot::Consequent => "cons",
            Slot::Negated => "neg",
            Slot::Left => "left",
            Slot::Right => "right",
            Slot::Alpha => "alpha",
            Slot::Qualia => "q",
        }
    }

    fn from_code(s: &str) -> Option<Slot> {
        Some(match s {
            "ant" => Slot::Antecedent,
            "cons" => Slot::Consequent,
            "neg" => Slot::Negated,
            "left" => Slot::Left,
            "right" => Slot::Right,
            "alpha" => Slot::Alpha,
            "q" => Slot::Qualia,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub condition: usize,
    pub slot: Slot,
}

/// Navigation from a root DRS to one of its sub-DRSs. Printed as `/` for
/// the root and `/0.cons/1.alpha` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DrsPath(Vec<Step>);

impl DrsPath {
    pub fn root() -> DrsPath {
        DrsPath(Vec::new())
    }

    pub fn from_steps(steps: Vec<Step>) -> DrsPath {
        DrsPath(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<Step> {
        self.0.last().copied()
    }

    pub fn child(&self, condition: usize, slot: Slot) -> DrsPath {
        let mut steps = self.0.clone();
        steps.push(Step { condition, slot });
        DrsPath(steps)
    }

    pub fn parent(&self) -> Option<DrsPath> {
        if self.0.is_empty() {
            None
        } else {
            Some(DrsPath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn starts_with(&self, prefix: &DrsPath) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn passes_through_qualia(&self) -> bool {
        self.0.iter().any(|s| s.slot == Slot::Qualia)
    }

    /// The DRSs that subordinate this one, nearest first. The chain is
    /// linear: a consequent is subordinated by its antecedent, everything
    /// else by the box whose condition contains it.
    pub fn superiors(&self) -> Vec<DrsPath> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        while let Some(step) = cur.last() {
            cur = if step.slot == Slot::Consequent {
                let mut steps = cur.0.clone();
                steps.last_mut().unwrap().slot = Slot::Antecedent;
                DrsPath(steps)
            } else {
                cur.parent().unwrap()
            };
            out.push(cur.clone());
        }
        out
    }
}

impl fmt::Display for DrsPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for s in &self.0 {
            write!(f, "/{}.{}", s.condition, s.slot.code())?;
        }
        Ok(())
    }
}

impl FromStr for DrsPath {
    type Err = DrsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DrsError::MalformedPath(s.to_string());
        let s = s.trim();
        if s == "/" {
            return Ok(DrsPath::root());
        }
        let rest = s.strip_prefix('/').ok_or_else(bad)?;
        let mut steps = Vec::new();
        for part in rest.split('/') {
            let (idx, slot) = part.split_once('.').ok_or_else(bad)?;
            steps.push(Step {
                condition: idx.parse().map_err(|_| bad())?,
                slot: Slot::from_code(slot).ok_or_else(bad)?,
            });
        }
        Ok(DrsPath(steps))
    }
}

/// Set union of universes and of condition sets.
pub fn merge(k1: &Drs, k2: &Drs) -> Drs {
    let mut out = k1.clone();
    out.universe.extend(k2.universe.iter().copied());
    for c in &k2.conditions {
        out.push(c.clone());
    }
    out
}

/// One merge per top-level qualia condition, in condition order. Qualia
/// conditions nested deeper are not consulted.
pub fn coercive_accommodation(k: &Drs) -> Vec<Drs> {
    k.conditions
        .iter()
        .filter_map(|c| match c {
            Condition::Qualia(_, inner) => Some(merge(k, inner)),
            _ => None,
        })
        .collect()
}

/// Whether the DRS at `p1` subordinates the DRS at `p2`.
pub fn subordinates(root: &Drs, p1: &DrsPath, p2: &DrsPath) -> Result<bool, DrsError> {
    root.at(p1)?;
    root.at(p2)?;
    Ok(p2.superiors().contains(p1))
}

/// Markers available as link antecedents from the DRS at `from`: its own
/// universe plus the universes of its superiors. Superiors inside a
/// qualia condition are skipped; qualia content only becomes reachable
/// through coercive accommodation.
pub fn accessible_markers(root: &Drs, from: &DrsPath) -> Result<BTreeSet<Marker>, DrsError> {
    let mut out = root.at(from)?.universe.clone();
    for sup in from.superiors() {
        if !sup.passes_through_qualia() {
            out.extend(root.at(&sup)?.universe.iter().copied());
        }
    }
    Ok(out)
}

pub fn substitute(root: &Drs, at: &DrsPath, replacement: Drs) -> Result<Drs, DrsError> {
    let mut out = root.clone();
    *out.at_mut(at)? = replacement;
    Ok(out)
}

/// Markers a box binds for its own conditions. The universe of an
/// α-condition counts as declared in the host box: the anaphor's markers
/// are used by sibling conditions before resolution moves them.
fn scope_declarations(k: &Drs) -> impl Iterator<Item = Marker> + '_ {
    k.universe.iter().copied().chain(k.conditions.iter().flat_map(|c| match c {
        Condition::Alpha(inner) => inner.universe.iter().copied().collect::<Vec<_>>(),
        _ => Vec::new(),
    }))
}

pub fn free_markers(root: &Drs) -> BTreeSet<Marker> {
    fn go(k: &Drs, bound: &BTreeSet<Marker>, out: &mut BTreeSet<Marker>) {
        let mut b = bound.clone();
        b.extend(scope_declarations(k));
        for c in &k.conditions {
            match c {
                Condition::Pred { args, .. } => out.extend(args.iter().filter(|m| !b.contains(m)).copied()),
                Condition::Eq(x, y) => out.extend([x, y].into_iter().filter(|m| !b.contains(m)).copied()),
                Condition::Impl(a, cons) => {
                    go(a, &b, out);
                    let mut inner = b.clone();
                    inner.extend(scope_declarations(a));
                    go(cons, &inner, out);
                }
                other => {
                    for (_, child) in other.children() {
                        go(child, &b, out);
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(root, &BTreeSet::new(), &mut out);
    out
}

pub fn is_proper(k: &Drs) -> bool {
    !k.contains_alpha() && free_markers(k).is_empty()
}

/// Alpha-variant of `k` whose declared markers avoid `avoid`. Free
/// occurrences are left alone.
pub fn rename_fresh(k: &Drs, avoid: &BTreeSet<Marker>) -> Drs {
    let mut all = k.markers();
    all.extend(avoid.iter().copied());
    let mut supply = MarkerSupply::above(all.iter());
    let mut env = BTreeMap::new();
    bind_fresh(scope_declarations(k), avoid, &mut env, &mut supply);
    rename_scoped(k, avoid, &env, &mut supply)
}

fn bind_fresh(
    declared: impl Iterator<Item = Marker>,
    avoid: &BTreeSet<Marker>,
    env: &mut BTreeMap<Marker, Marker>,
    supply: &mut MarkerSupply,
) {
    for m in declared.collect::<BTreeSet<_>>() {
        if avoid.contains(&m) {
            env.insert(m, supply.fresh(m.sort));
        }
    }
}

/// `env` already holds the renamings for `k`'s own scope declarations.
fn rename_scoped(k: &Drs, avoid: &BTreeSet<Marker>, env: &BTreeMap<Marker, Marker>, supply: &mut MarkerSupply) -> Drs {
    let look = |m: &Marker| *env.get(m).unwrap_or(m);
    let universe: Vec<Marker> = k.universe.iter().map(look).collect();
    let mut conditions = Vec::with_capacity(k.conditions.len());
    for c in &k.conditions {
        let enter = |child: &Drs, supply: &mut MarkerSupply| {
            let mut inner = env.clone();
            bind_fresh(scope_declarations(child), avoid, &mut inner, supply);
            (rename_scoped(child, avoid, &inner, supply), inner)
        };
        let renamed = match c {
            Condition::Pred { name, args } => {
                Condition::Pred { name: name.clone(), args: args.iter().map(look).collect() }
            }
            Condition::Eq(a, b) => Condition::Eq(look(a), look(b)),
            Condition::Impl(a, cons) => {
                let (a2, mut inner) = enter(a, supply);
                // the consequent sees the antecedent's declarations
                bind_fresh(scope_declarations(cons), avoid, &mut inner, supply);
                Condition::Impl(a2, rename_scoped(cons, avoid, &inner, supply))
            }
            Condition::Neg(inner) => Condition::Neg(enter(inner, supply).0),
            Condition::Disj(l, r) => {
                let l2 = enter(l, supply).0;
                Condition::Disj(l2, enter(r, supply).0)
            }
            Condition::Alpha(inner) => {
                // the payload universe was declared by the host box
                let mut scope = env.clone();
                let nested = inner.conditions.iter().flat_map(|c| match c {
                    Condition::Alpha(d) => d.universe.iter().copied().collect::<Vec<_>>(),
                    _ => Vec::new(),
                });
                bind_fresh(nested, avoid, &mut scope, supply);
                Condition::Alpha(rename_scoped(inner, avoid, &scope, supply))
            }
            Condition::Qualia(role, inner) => Condition::Qualia(*role, enter(inner, supply).0),
        };
        conditions.push(renamed);
    }
    Drs::new(universe, conditions)
}

/// Structural equality up to a bijective, sort-preserving renaming of
/// markers.
pub fn isomorphic(a: &Drs, b: &Drs) -> bool {
    let ma: Vec<Marker> = a.markers().into_iter().collect();
    let mb: Vec<Marker> = b.markers().into_iter().collect();
    if ma.len() != mb.len() {
        return false;
    }
    let sa = signatures(a);
    let sb = signatures(b);
    let mut candidates: Vec<(Marker, Vec<Marker>)> = Vec::new();
    for m in &ma {
        let options: Vec<Marker> = mb.iter().filter(|n| n.sort == m.sort && sa.get(m) == sb.get(n)).copied().collect();
        if options.is_empty() {
            return false;
        }
        candidates.push((*m, options));
    }
    candidates.sort_by_key(|(_, o)| o.len());
    let mut map = BTreeMap::new();
    let mut used = BTreeSet::new();
    search_bijection(&candidates, 0, &mut map, &mut used, a, b)
}

fn search_bijection(
    candidates: &[(Marker, Vec<Marker>)],
    i: usize,
    map: &mut BTreeMap<Marker, Marker>,
    used: &mut BTreeSet<Marker>,
    a: &Drs,
    b: &Drs,
) -> bool {
    if i == candidates.len() {
        return a.rename(map) == *b;
    }
    let (m, options) = &candidates[i];
    for n in options {
        if used.contains(n) {
            continue;
        }
        map.insert(*m, *n);
        used.insert(*n);
        if search_bijection(candidates, i + 1, map, used, a, b) {
            return true;
        }
        map.remove(m);
        used.remove(n);
    }
    false
}

/// Renaming-invariant description of how each marker is used.
fn signatures(k: &Drs) -> BTreeMap<Marker, Vec<String>> {
    let mut out: BTreeMap<Marker, Vec<String>> = BTreeMap::new();
    k.walk(&mut |p, d| {
        let depth = p.len();
        for m in &d.universe {
            out.entry(*m).or_default().push(format!("decl@{depth}"));
        }
        for c in &d.conditions {
            match c {
                Condition::Pred { name, args } => {
                    for (i, m) in args.iter().enumerate() {
                        out.entry(*m).or_default().push(format!("{name}#{i}@{depth}"));
                    }
                }
                Condition::Eq(x, y) => {
                    out.entry(*x).or_default().push(format!("eq@{depth}"));
                    out.entry(*y).or_default().push(format!("eq@{depth}"));
                }
                _ => {}
            }
        }
    });
    for v in out.values_mut() {
        v.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Marker {
        Marker::entity(i)
    }

    fn p(name: &str, args: &[Marker]) -> Condition {
        Condition::pred(name, args.iter().copied())
    }

    fn celebrity_unresolved() -> Drs {
        let ant = Drs::new([x(1)], [p("celebrity", &[x(1)]), p("I-invite", &[x(1)])]);
        let cons =
            Drs::new([], [Condition::Alpha(Drs::new([x(2)], [p("celebrity", &[x(2)])])), p("never-comes", &[x(2)])]);
        Drs::new([], [Condition::Impl(ant, cons)])
    }

    fn barkeeper_unresolved() -> Drs {
        let quale = Drs::new([x(3)], [p("barkeeper", &[x(3)]), p("of", &[x(3), x(1)])]);
        let ant = Drs::new(
            [x(1)],
            [p("bar", &[x(1)]), Condition::Qualia(QualiaRole::Constitutive, quale), p("I-go-to", &[x(1)])],
        );
        let cons = Drs::new(
            [],
            [Condition::Alpha(Drs::new([x(2)], [p("barkeeper", &[x(2)])])), p("always-throws-me-out", &[x(2)])],
        );
        Drs::new([], [Condition::Impl(ant, cons)])
    }

    fn ant() -> DrsPath {
        DrsPath::root().child(0, Slot::Antecedent)
    }

    fn cons() -> DrsPath {
        DrsPath::root().child(0, Slot::Consequent)
    }

    #[test]
    fn merge_is_set_union() {
        let a = Drs::new([x(1)], [p("bar", &[x(1)])]);
        let b = Drs::new([x(2)], [p("barkeeper", &[x(2)])]);
        let m = merge(&a, &b);
        assert_eq!(m, Drs::new([x(1), x(2)], [p("bar", &[x(1)]), p("barkeeper", &[x(2)])]));
        assert_eq!(merge(&Drs::empty(), &a), a);
        assert_eq!(merge(&a, &a).conditions().len(), 1);
    }

    #[test]
    fn equality_ignores_condition_order() {
        let a = Drs::new([x(1)], [p("a", &[x(1)]), p("b", &[x(1)])]);
        let b = Drs::new([x(1)], [p("b", &[x(1)]), p("a", &[x(1)])]);
        assert_eq!(a, b);
    }

    #[test]
    fn coercive_accommodation_surfaces_top_level_qualia_only() {
        let k = barkeeper_unresolved();
        let antecedent = k.at(&ant()).unwrap();
        let ca = coercive_accommodation(antecedent);
        assert_eq!(ca.len(), 1);
        assert!(ca[0].universe().contains(&x(3)));
        assert!(ca[0].conditions().contains(&p("barkeeper", &[x(3)])));
        assert!(ca[0].conditions().contains(&p("of", &[x(3), x(1)])));
        assert!(coercive_accommodation(&Drs::new([x(1)], [p("party", &[x(1)])])).is_empty());
        // the qualia condition sits inside the implication, not at top level
        assert!(coercive_accommodation(&k).is_empty());
    }

    #[test]
    fn subordination_follows_implication_direction() {
        let k = celebrity_unresolved();
        assert!(subordinates(&k, &ant(), &cons()).unwrap());
        assert!(!subordinates(&k, &cons(), &ant()).unwrap());
        assert!(!subordinates(&k, &ant(), &ant()).unwrap());
        assert!(subordinates(&k, &DrsPath::root(), &cons()).unwrap());
        let bad = DrsPath::root().child(5, Slot::Negated);
        assert!(subordinates(&k, &bad, &ant()).is_err());
    }

    #[test]
    fn accessibility_excludes_qualia_content() {
        let k = barkeeper_unresolved();
        let acc = accessible_markers(&k, &cons()).unwrap();
        assert_eq!(acc, BTreeSet::from([x(1)]));
        let top = Drs::new([x(1)], [p("bar", &[x(1)])]);
        assert_eq!(accessible_markers(&top, &DrsPath::root()).unwrap(), BTreeSet::from([x(1)]));
    }

    #[test]
    fn substitute_replaces_exactly_one_box() {
        let k = celebrity_unresolved();
        let out = substitute(&k, &cons(), Drs::empty()).unwrap();
        assert_eq!(out.at(&cons()).unwrap(), &Drs::empty());
        assert_eq!(out.at(&ant()).unwrap(), k.at(&ant()).unwrap());
        assert_eq!(substitute(&k, &DrsPath::root(), Drs::empty()).unwrap(), Drs::empty());
    }

    #[test]
    fn free_markers_and_properness() {
        assert!(free_markers(&Drs::new([x(1)], [p("bar", &[x(1)])])).is_empty());
        assert_eq!(free_markers(&Drs::new([], [p("bar", &[x(1)])])), BTreeSet::from([x(1)]));
        assert!(!is_proper(&barkeeper_unresolved()));
        assert!(is_proper(&Drs::empty()));
        // anaphor markers count as declared in the host box
        assert!(free_markers(&celebrity_unresolved()).is_empty());
    }

    #[test]
    fn rename_fresh_only_touches_clashing_declarations() {
        let k = Drs::new([x(1)], [p("bar", &[x(1)])]);
        let r = rename_fresh(&k, &BTreeSet::from([x(1)]));
        assert!(!r.universe().contains(&x(1)));
        assert!(isomorphic(&k, &r));
        assert_eq!(rename_fresh(&k, &BTreeSet::new()), k);
        let free = Drs::new([], [p("bar", &[x(7)])]);
        assert_eq!(rename_fresh(&free, &BTreeSet::from([x(7)])), free);
    }

    #[test]
    fn rename_fresh_keeps_consequent_bound_to_antecedent() {
        let k = celebrity_unresolved();
        let r = rename_fresh(&k, &k.markers());
        assert!(r.markers().is_disjoint(&k.markers()));
        assert!(isomorphic(&k, &r));
        assert!(free_markers(&r).is_empty());
    }

    #[test]
    fn path_text_round_trips() {
        let path = cons().child(0, Slot::Alpha);
        assert_eq!(path.to_string(), "/0.cons/0.alpha");
        assert_eq!("/0.cons/0.alpha".parse::<DrsPath>().unwrap(), path);
        assert_eq!("/".parse::<DrsPath>().unwrap(), DrsPath::root());
        assert!("0.cons".parse::<DrsPath>().is_err());
    }

    #[test]
    fn superiors_chain_through_antecedent() {
        let alpha = cons().child(0, Slot::Alpha);
        assert_eq!(alpha.superiors(), vec![cons(), ant(), DrsPath::root()]);
    }

    #[test]
    fn isomorphism_respects_structure() {
        let a = celebrity_unresolved();
        let b = a.map_markers(&|m| Marker::entity(m.index + 10));
        assert!(isomorphic(&a, &b));
        assert!(!isomorphic(&a, &barkeeper_unresolved()));
    }
}
