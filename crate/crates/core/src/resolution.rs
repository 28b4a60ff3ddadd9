//! Anaphora resolution over α-conditions: linking to an accessible
//! suitable marker, bridging through coercively accommodated qualia
//! content, and accommodation, tried strictly in that order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::drs::{
    coercive_accommodation, free_markers, merge, substitute, Condition, Drs, DrsError, DrsPath, Marker, QualiaRole,
    Slot,
};
use crate::model::{consistent_unchecked, entails_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mechanism {
    Link,
    Bridge,
    Accommodate,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Link => "Link",
            Mechanism::Bridge => "Bridge",
            Mechanism::Accommodate => "Accommodate",
        })
    }
}

/// Assignment of the anaphor's markers to markers of a candidate DRS.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SuitabilityMapping {
    pub assignment: BTreeMap<Marker, Marker>,
}

impl fmt::Display for SuitabilityMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.assignment.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionStep {
    /// Path of the α payload in the DRS the step was applied to.
    pub alpha: DrsPath,
    pub mechanism: Mechanism,
    /// Linked box, bridged box, or accommodation site.
    pub site: DrsPath,
    pub mapping: Option<SuitabilityMapping>,
    /// The quale surfaced by a bridge.
    pub quale: Option<QualiaRole>,
    pub anaphor: Drs,
}

impl fmt::Display for ResolutionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha@{} -> {} @{}", self.alpha, self.mechanism, self.site)?;
        if let Some(m) = &self.mapping {
            write!(f, " [m: {m}]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reading {
    pub resolved: Drs,
    pub steps: Vec<ResolutionStep>,
    pub felicity_notes: Vec<String>,
}

impl Reading {
    pub fn mechanisms(&self) -> Vec<Mechanism> {
        self.steps.iter().map(|s| s.mechanism).collect()
    }
}

/// One output of a single resolution step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub result: Drs,
    pub step: ResolutionStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolutionOrder {
    /// Textual order, but pronouns after every other trigger.
    #[default]
    PronounsLast,
    PronounsFirst,
    Textual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionConfig {
    pub order: ResolutionOrder,
    /// Largest domain size tried by the consistency and informativity checks.
    pub domain_bound: usize,
    pub check_acceptability: bool,
    /// Keep only the most global acceptable accommodation site.
    pub prefer_global: bool,
    /// Predicates that a definite normally reaches by bridging; accommodating
    /// them draws a felicity note.
    pub anchored_predicates: BTreeSet<String>,
    /// What was established before the DRS being resolved; the result must
    /// add to it.
    pub context: Drs,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            order: ResolutionOrder::default(),
            domain_bound: 4,
            check_acceptability: true,
            prefer_global: true,
            anchored_predicates: BTreeSet::new(),
            context: Drs::empty(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionError {
    #[error("no antecedent for pronoun at {0}")]
    NoAntecedent(DrsPath),
    #[error("cannot resolve {anaphor} at {path}: no link, bridge or acceptable accommodation site")]
    Unresolvable { path: DrsPath, anaphor: Drs },
    #[error("{0} does not address an alpha condition")]
    NotAlpha(DrsPath),
    #[error(transparent)]
    Path(#[from] DrsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Acceptability {
    Accepted,
    /// Domain bound 0: nothing was checked.
    Vacuous,
    Rejected(String),
}

impl Acceptability {
    pub fn is_ok(&self) -> bool {
        !matches!(self, Acceptability::Rejected(_))
    }
}

/// An anaphor whose only content is its marker: a pronoun.
pub fn is_pronoun(k_alpha: &Drs) -> bool {
    k_alpha.universe().len() == 1 && k_alpha.conditions().iter().all(|c| matches!(c, Condition::Qualia(..)))
}

fn content(k: &Drs) -> impl Iterator<Item = &Condition> {
    k.conditions().iter().filter(|c| !matches!(c, Condition::Qualia(..) | Condition::Alpha(_)))
}

/// Mappings from the anaphor's universe into the candidate's universe
/// (sort-preserving) under which every content condition of the anaphor
/// is a condition of the candidate. Qualia and nested α-conditions of
/// the anaphor are not matched.
pub fn suitable_mappings(k_alpha: &Drs, candidate: &Drs) -> Vec<SuitabilityMapping> {
    let sources: Vec<Marker> = k_alpha.universe().iter().copied().collect();
    let mut out = Vec::new();
    let mut current = BTreeMap::new();
    extend_mapping(&sources, candidate, k_alpha, &mut current, &mut out);
    out
}

fn extend_mapping(
    rest: &[Marker],
    candidate: &Drs,
    k_alpha: &Drs,
    current: &mut BTreeMap<Marker, Marker>,
    out: &mut Vec<SuitabilityMapping>,
) {
    let Some((first, tail)) = rest.split_first() else {
        let ok = content(k_alpha).all(|c| {
            let mapped = c.map_markers(&|m| *current.get(&m).unwrap_or(&m));
            candidate.conditions().contains(&mapped)
        });
        if ok {
            out.push(SuitabilityMapping { assignment: current.clone() });
        }
        return;
    };
    for target in candidate.universe().iter().filter(|t| t.sort == first.sort) {
        current.insert(*first, *target);
        extend_mapping(tail, candidate, k_alpha, current, out);
    }
    current.remove(first);
}

struct AlphaSite<'a> {
    host: DrsPath,
    index: usize,
    payload: &'a Drs,
}

fn alpha_site<'a>(root: &'a Drs, alpha: &DrsPath) -> Result<AlphaSite<'a>, ResolutionError> {
    let step =
        alpha.last().filter(|s| s.slot == Slot::Alpha).ok_or_else(|| ResolutionError::NotAlpha(alpha.clone()))?;
    let host = alpha.parent().expect("non-root path has a parent");
    let payload = root.at(alpha)?;
    Ok(AlphaSite { host, index: step.condition, payload })
}

/// Boxes that subordinate the α payload and may serve as antecedent
/// boxes or sites, nearest first. Boxes inside qualia are skipped.
fn superior_sites(alpha: &DrsPath) -> Vec<DrsPath> {
    alpha.superiors().into_iter().filter(|p| !p.passes_through_qualia()).collect()
}

/// The host box with the α-condition replaced by the anaphor's content
/// and the equations of the mapping, all at the α's position.
fn absorb(host: &Drs, index: usize, payload: &Drs, mapping: Option<&SuitabilityMapping>) -> Drs {
    let mut out = host.clone();
    out.remove_condition(index);
    for m in payload.universe() {
        out.declare(*m);
    }
    let mut at = index;
    let equations = mapping.into_iter().flat_map(|m| m.assignment.iter().map(|(x, y)| Condition::Eq(*x, *y)));
    for c in payload.conditions().iter().cloned().chain(equations) {
        if out.insert(at, c) {
            at += 1;
        }
    }
    out
}

/// Binding-theory filter: a pronoun does not take a co-argument of its
/// own predicate as antecedent ("he likes him").
fn co_argument(host: &Drs, pronoun: Marker, target: Marker) -> bool {
    host.conditions().iter().any(|c| match c {
        Condition::Pred { args, .. } => args.contains(&pronoun) && args.contains(&target),
        _ => false,
    })
}

pub fn link(alpha: &DrsPath, root: &Drs) -> Result<Vec<Candidate>, ResolutionError> {
    let site = alpha_site(root, alpha)?;
    let host = root.at(&site.host)?;
    let pronoun = is_pronoun(site.payload).then(|| *site.payload.universe().iter().next().unwrap());
    let mut out: Vec<Candidate> = Vec::new();
    for k1_path in superior_sites(alpha) {
        let k1 = root.at(&k1_path)?;
        for m in suitable_mappings(site.payload, k1) {
            if let Some(p) = pronoun {
                if co_argument(host, p, m.assignment[&p]) {
                    continue;
                }
            }
            let k3 = absorb(host, site.index, site.payload, Some(&m));
            let result = substitute(root, &site.host, k3)?;
            if out.iter().all(|c| c.result != result) {
                out.push(Candidate {
                    result,
                    step: ResolutionStep {
                        alpha: alpha.clone(),
                        mechanism: Mechanism::Link,
                        site: k1_path.clone(),
                        mapping: Some(m),
                        quale: None,
                        anaphor: site.payload.clone(),
                    },
                });
            }
        }
    }
    Ok(out)
}

/// Surface a quale of a subordinating box and link to its content. The
/// bridged box may be the α's own host (a quale contributed earlier in
/// the same box); merging appends, so the α keeps its index.
pub fn bridge(alpha: &DrsPath, root: &Drs) -> Result<Vec<Candidate>, ResolutionError> {
    let site = alpha_site(root, alpha)?;
    if is_pronoun(site.payload) {
        return Ok(Vec::new());
    }
    let mut out: Vec<Candidate> = Vec::new();
    for k4_path in superior_sites(alpha) {
        let k4 = root.at(&k4_path)?;
        let roles: Vec<QualiaRole> = k4
            .conditions()
            .iter()
            .filter_map(|c| match c {
                Condition::Qualia(r, _) => Some(*r),
                _ => None,
            })
            .collect();
        for (k1, role) in coercive_accommodation(k4).into_iter().zip(roles) {
            for m in suitable_mappings(site.payload, &k1) {
                let surfaced = substitute(root, &k4_path, k1.clone())?;
                let host = surfaced.at(&site.host)?;
                let k3 = absorb(host, site.index, site.payload, Some(&m));
                let result = substitute(&surfaced, &site.host, k3)?;
                if out.iter().all(|c| c.result != result) {
                    out.push(Candidate {
                        result,
                        step: ResolutionStep {
                            alpha: alpha.clone(),
                            mechanism: Mechanism::Bridge,
                            site: k4_path.clone(),
                            mapping: Some(m),
                            quale: Some(role),
                            anaphor: site.payload.clone(),
                        },
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Move the anaphor into a subordinating box, most global first. Sites
/// whose result fails [`acceptable`] are dropped.
pub fn accommodate(alpha: &DrsPath, root: &Drs, config: &ResolutionConfig) -> Result<Vec<Candidate>, ResolutionError> {
    let site = alpha_site(root, alpha)?;
    if is_pronoun(site.payload) {
        return Ok(Vec::new());
    }
    let mut sites = superior_sites(alpha);
    sites.reverse();
    let mut out: Vec<Candidate> = Vec::new();
    for k1_path in sites {
        let mut host = root.at(&site.host)?.clone();
        host.remove_condition(site.index);
        let without = substitute(root, &site.host, host)?;
        let k1 = merge(without.at(&k1_path)?, site.payload);
        let result = substitute(&without, &k1_path, k1)?;
        if !free_markers(&result).is_empty() {
            continue;
        }
        if config.check_acceptability && !acceptable(&result, config).is_ok() {
            continue;
        }
        if out.iter().all(|c| c.result != result) {
            out.push(Candidate {
                result,
                step: ResolutionStep {
                    alpha: alpha.clone(),
                    mechanism: Mechanism::Accommodate,
                    site: k1_path,
                    mapping: None,
                    quale: None,
                    anaphor: site.payload.clone(),
                },
            });
        }
    }
    Ok(out)
}

/// Every α-condition merged into its own host box; used to evaluate a
/// partially resolved DRS.
pub fn project_locally(k: &Drs) -> Drs {
    let mut out = k.clone();
    while let Some(path) = innermost_alphas(&out).into_iter().next() {
        let step = path.last().unwrap();
        let host_path = path.parent().unwrap();
        let mut host = out.at(&host_path).unwrap().clone();
        let payload = match host.remove_condition(step.condition) {
            Condition::Alpha(p) => p,
            _ => unreachable!("path addresses an alpha condition"),
        };
        host = merge(&host, &payload);
        out = substitute(&out, &host_path, host).unwrap();
    }
    out
}

/// No free markers, consistent, and not already entailed by the context,
/// the latter two up to the configured domain bound.
pub fn acceptable(candidate: &Drs, config: &ResolutionConfig) -> Acceptability {
    let free = free_markers(candidate);
    if !free.is_empty() {
        let names: Vec<String> = free.iter().map(|m| m.to_string()).collect();
        return Acceptability::Rejected(format!("free markers {}", names.join(",")));
    }
    if config.domain_bound == 0 {
        return Acceptability::Vacuous;
    }
    let projected = project_locally(candidate);
    if !free_markers(&projected).is_empty() {
        return Acceptability::Rejected("free markers after projection".into());
    }
    if !consistent_unchecked(&projected, config.domain_bound) {
        return Acceptability::Rejected("inconsistent".into());
    }
    let context = project_locally(&config.context);
    if free_markers(&context).is_empty() && entails_unchecked(&context, &projected, config.domain_bound) {
        return Acceptability::Rejected("uninformative".into());
    }
    Acceptability::Accepted
}

/// The linking, bridging or accommodation outputs for one α, whichever
/// is the first non-empty set in that order.
pub fn resolve_one(
    alpha: &DrsPath,
    root: &Drs,
    config: &ResolutionConfig,
) -> Result<(Mechanism, Vec<Candidate>), ResolutionError> {
    let linked = link(alpha, root)?;
    if !linked.is_empty() {
        return Ok((Mechanism::Link, linked));
    }
    let payload = alpha_site(root, alpha)?.payload;
    if is_pronoun(payload) {
        return Err(ResolutionError::NoAntecedent(alpha.clone()));
    }
    let bridged = bridge(alpha, root)?;
    if !bridged.is_empty() {
        return Ok((Mechanism::Bridge, bridged));
    }
    let accommodated = accommodate(alpha, root, config)?;
    if !accommodated.is_empty() {
        return Ok((Mechanism::Accommodate, accommodated));
    }
    Err(ResolutionError::Unresolvable { path: alpha.clone(), anaphor: payload.clone() })
}

/// α payloads that contain no further α-condition.
fn innermost_alphas(k: &Drs) -> Vec<DrsPath> {
    let all = k.alpha_paths();
    all.iter().filter(|p| !all.iter().any(|q| q != *p && q.starts_with(p))).cloned().collect()
}

/// Innermost α-conditions, in the preference order given by `order`.
pub fn pending_alphas(k: &Drs, order: ResolutionOrder) -> Vec<DrsPath> {
    let mut out = innermost_alphas(k);
    let pronoun = |p: &DrsPath| k.at(p).map(is_pronoun).unwrap_or(false);
    match order {
        ResolutionOrder::Textual => {}
        ResolutionOrder::PronounsLast => out.sort_by_key(|p| pronoun(p)),
        ResolutionOrder::PronounsFirst => out.sort_by_key(|p| !pronoun(p)),
    }
    out
}

/// The α-condition to resolve first under `order`, ignoring mechanisms.
pub fn next_alpha(k: &Drs, order: ResolutionOrder) -> Option<DrsPath> {
    pending_alphas(k, order).into_iter().next()
}

/// One step of the cascade over all pending α-conditions: link whatever
/// can be linked, otherwise bridge, otherwise accommodate. The order only
/// breaks ties inside a tier. `None` when nothing is pending.
pub fn resolve_step(
    root: &Drs,
    config: &ResolutionConfig,
) -> Result<Option<(DrsPath, Mechanism, Vec<Candidate>)>, ResolutionError> {
    let pending = pending_alphas(root, config.order);
    let Some(first) = pending.first() else {
        return Ok(None);
    };
    for alpha in &pending {
        let linked = link(alpha, root)?;
        if !linked.is_empty() {
            return Ok(Some((alpha.clone(), Mechanism::Link, linked)));
        }
    }
    let descriptions: Vec<&DrsPath> = pending.iter().filter(|p| !root.at(p).map(is_pronoun).unwrap_or(false)).collect();
    for alpha in &descriptions {
        let bridged = bridge(alpha, root)?;
        if !bridged.is_empty() {
            return Ok(Some(((*alpha).clone(), Mechanism::Bridge, bridged)));
        }
    }
    for alpha in &descriptions {
        let accommodated = accommodate(alpha, root, config)?;
        if !accommodated.is_empty() {
            return Ok(Some(((*alpha).clone(), Mechanism::Accommodate, accommodated)));
        }
    }
    Err(match descriptions.first() {
        Some(alpha) => {
            ResolutionError::Unresolvable { path: (*alpha).clone(), anaphor: alpha_site(root, alpha)?.payload.clone() }
        }
        None => ResolutionError::NoAntecedent(first.clone()),
    })
}

fn felicity_note(step: &ResolutionStep, config: &ResolutionConfig) -> Option<String> {
    if step.mechanism != Mechanism::Accommodate {
        return None;
    }
    let anchored: Vec<&str> = content(&step.anaphor)
        .filter_map(|c| match c {
            Condition::Pred { name, .. } if config.anchored_predicates.contains(name) => Some(name.as_str()),
            _ => None,
        })
        .collect();
    if anchored.is_empty() {
        return None;
    }
    Some(format!(
        "infelicitous: `{}` accommodated at {} with nothing to bridge from; it is normally anchored to a noun that provides it",
        anchored.join(","),
        step.site
    ))
}

/// Resolve every α-condition. Each reading records its steps; distinct
/// links or bridges give distinct readings.
pub fn resolve_all(root: &Drs, config: &ResolutionConfig) -> Result<Vec<Reading>, ResolutionError> {
    let mut done: Vec<Reading> = Vec::new();
    let mut pending = vec![Reading { resolved: root.clone(), steps: Vec::new(), felicity_notes: Vec::new() }];
    if config.domain_bound == 0 && config.check_acceptability && root.contains_alpha() {
        pending[0].felicity_notes.push("acceptability unchecked: domain bound is 0".into());
    }
    while let Some(reading) = pending.pop() {
        let Some((_, mechanism, mut candidates)) = resolve_step(&reading.resolved, config)? else {
            if done.iter().all(|r| r.resolved != reading.resolved) {
                done.push(reading);
            }
            continue;
        };
        if mechanism == Mechanism::Accommodate && config.prefer_global {
            candidates.truncate(1);
        }
        // reversed so that the first candidate is expanded first
        for candidate in candidates.into_iter().rev() {
            let mut next = reading.clone();
            if let Some(note) = felicity_note(&candidate.step, config) {
                next.felicity_notes.push(note);
            }
            next.resolved = candidate.result;
            next.steps.push(candidate.step);
            pending.push(next);
        }
    }
    Ok(done)
}
