//! Lexical entries, the on-disk lexicon format and the builtin fragment.
//!
//! The format is documented in `data/fragment.lex`, which is also the
//! builtin lexicon. A loaded file is merged over the builtin entries;
//! an entry with the same form and category replaces the builtin one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::drs::{Marker, MarkerSupply, QualiaRole};
use crate::syntax::{Cursor, SyntaxError};
use crate::term::{type_of, Binder, SemType, Term, TermCondition, TermDrs, TypeError};

const BUILTIN_SOURCE: &str = include_str!("../data/fragment.lex");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Det,
    Noun,
    ProperName,
    Pronoun,
    /// First-person `i`/`me`: introduces a speaker marker, triggers nothing.
    Deictic,
    VTrans,
    VIntrans,
    VAsp,
    /// A verb with a lexicalized first-person subject (`i invite`).
    SubjVerb,
    Adv,
    Conj,
    Tense,
}

impl Category {
    pub const ALL: [Category; 12] = [
        Category::Det,
        Category::Noun,
        Category::ProperName,
        Category::Pronoun,
        Category::Deictic,
        Category::VTrans,
        Category::VIntrans,
        Category::VAsp,
        Category::SubjVerb,
        Category::Adv,
        Category::Conj,
        Category::Tense,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Category::Det => "det",
            Category::Noun => "noun",
            Category::ProperName => "pn",
            Category::Pronoun => "pron",
            Category::Deictic => "deictic",
            Category::VTrans => "vtrans",
            Category::VIntrans => "vintrans",
            Category::VAsp => "vasp",
            Category::SubjVerb => "subjverb",
            Category::Adv => "adv",
            Category::Conj => "conj",
            Category::Tense => "tense",
        }
    }

    fn is_verbal(self) -> bool {
        matches!(self, Category::VTrans | Category::VIntrans | Category::VAsp | Category::SubjVerb)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL.into_iter().find(|c| c.keyword() == s).ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    /// Lowercased surface form; may span several words.
    pub form: String,
    pub category: Category,
    /// Template semantics. Use [`LexicalEntry::instantiate`] for each
    /// occurrence so that markers stay distinct across a discourse.
    pub semantics: Term,
    pub signature: SemType,
    /// Trailing particle of a phrasal verb (`throw ... out`).
    pub particle: Option<String>,
}

impl LexicalEntry {
    pub fn instantiate(&self, supply: &mut MarkerSupply) -> Term {
        self.semantics.instantiate(supply)
    }

    pub fn words(&self) -> Vec<&str> {
        self.form.split_whitespace().collect()
    }

    pub fn alpha_count(&self) -> usize {
        count_conditions(&self.semantics, &|c| matches!(c, TermCondition::Alpha(_)))
    }

    pub fn has_qualia(&self) -> bool {
        count_conditions(&self.semantics, &|c| matches!(c, TermCondition::Qualia(..))) > 0
    }

    /// The roles of the entry's qualia, in written order.
    pub fn qualia_roles(&self) -> Vec<QualiaRole> {
        let mut out = Vec::new();
        visit_conditions(&self.semantics, &mut |c| {
            if let TermCondition::Qualia(r, _) = c {
                out.push(*r)
            }
        });
        out
    }

    pub fn quale(&self, role: QualiaRole) -> Option<&Term> {
        fn find(t: &Term, role: QualiaRole) -> Option<&Term> {
            match t {
                Term::Box(d) => d.conditions.iter().find_map(|c| match c {
                    TermCondition::Qualia(r, p) if *r == role => Some(p),
                    _ => None,
                }),
                Term::Lam(_, body) => find(body, role),
                Term::App(a, b) | Term::Merge(a, b) => find(a, role).or_else(|| find(b, role)),
                Term::Marker(_) | Term::Var(_) => None,
            }
        }
        find(&self.semantics, role)
    }
}

fn visit_conditions(t: &Term, f: &mut impl FnMut(&TermCondition)) {
    match t {
        Term::Box(d) => {
            for c in &d.conditions {
                f(c);
                match c {
                    TermCondition::Pred { .. } | TermCondition::Eq(..) => {}
                    TermCondition::Impl(a, b) | TermCondition::Disj(a, b) => {
                        visit_conditions(a, f);
                        visit_conditions(b, f)
                    }
                    TermCondition::Neg(a) | TermCondition::Alpha(a) | TermCondition::Qualia(_, a) => {
                        visit_conditions(a, f)
                    }
                }
            }
        }
        Term::Lam(_, body) => visit_conditions(body, f),
        Term::App(a, b) | Term::Merge(a, b) => {
            visit_conditions(a, f);
            visit_conditions(b, f)
        }
        Term::Marker(_) | Term::Var(_) => {}
    }
}

fn count_conditions(t: &Term, pick: &dyn Fn(&TermCondition) -> bool) -> usize {
    let mut n = 0;
    visit_conditions(t, &mut |c| {
        if pick(c) {
            n += 1
        }
    });
    n
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: `{form}` uses predicate `{pred}`, which has no arity declaration")]
    UndeclaredPredicate { line: usize, form: String, pred: String },
    #[error("line {line}: predicate `{pred}` has arity {declared} but is used with {used} argument(s)")]
    ArityMismatch { line: usize, pred: String, declared: usize, used: usize },
    #[error("line {line}: predicate `{pred}` redeclared with arity {new} (was {old})")]
    ArityConflict { line: usize, pred: String, old: usize, new: usize },
    #[error("line {line}: semantics of `{form}` is ill-typed: {source}")]
    IllTyped { line: usize, form: String, source: TypeError },
    #[error("line {line}: `{form}` declares type {declared} but its semantics has type {inferred}")]
    SignatureMismatch { line: usize, form: String, declared: SemType, inferred: SemType },
    #[error("line {line}: `{form}` is a {category}; only nouns carry qualia")]
    QualiaOutsideNoun { line: usize, form: String, category: Category },
    #[error("line {line}: quale of `{form}` refers to unknown entry `{target}`")]
    UnknownReference { line: usize, form: String, target: String },
    #[error("line {line}: `{form}`: {message}")]
    Invalid { line: usize, form: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexicon {
    entries: Vec<LexicalEntry>,
    arities: BTreeMap<String, usize>,
}

impl Lexicon {
    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn arities(&self) -> &BTreeMap<String, usize> {
        &self.arities
    }

    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.arities.get(pred).copied()
    }

    /// Every entry with this form, in lexicon order.
    pub fn lookup(&self, form: &str) -> Vec<&LexicalEntry> {
        let form = normalize_form(form);
        self.entries.iter().filter(|e| e.form == form).collect()
    }

    pub fn lookup_category(&self, form: &str, category: Category) -> Option<&LexicalEntry> {
        let form = normalize_form(form);
        self.entries.iter().find(|e| e.form == form && e.category == category)
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.entries.iter().any(|e| e.words().contains(&word))
    }

    /// Length in words of the longest form.
    pub fn max_form_len(&self) -> usize {
        self.entries.iter().map(|e| e.words().len()).max().unwrap_or(0)
    }

    /// Predicates that occur inside some noun's qualia. A definite built
    /// on one of these normally finds an anchor through bridging.
    pub fn anchored_predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.entries.iter().filter(|e| e.category == Category::Noun) {
            visit_conditions(&e.semantics, &mut |c| {
                if let TermCondition::Qualia(_, payload) = c {
                    visit_conditions(payload, &mut |inner| {
                        if let TermCondition::Pred { name, .. } = inner {
                            out.insert(name.clone());
                        }
                    });
                }
            });
        }
        out
    }

    /// Insert or replace (same form and category) an entry after checking it.
    pub fn insert(&mut self, entry: LexicalEntry) -> Result<(), LexiconError> {
        check_entry(&entry, &self.arities, 0)?;
        self.put(entry);
        Ok(())
    }

    fn put(&mut self, entry: LexicalEntry) {
        match self.entries.iter_mut().find(|e| e.form == entry.form && e.category == entry.category) {
            Some(slot) => *slot = entry,
            None => self.entries.push(entry),
        }
    }

    /// Serialize in the lexicon file format. Every entry is written with
    /// explicit `type:` and `sem:` items; qualia appear inside `sem:`.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for (name, arity) in &self.arities {
            out.push_str(&format!("pred {name}/{arity}\n"));
        }
        for e in &self.entries {
            out.push('\n');
            out.push_str(&format!("{} {} {{\n", e.category, quote_form(&e.form)));
            out.push_str(&format!("  type: {};\n", e.signature));
            out.push_str(&format!("  sem: {};\n", e.semantics));
            if let Some(p) = &e.particle {
                out.push_str(&format!("  particle: {p};\n"));
            }
            out.push_str("}\n");
        }
        out
    }
}

fn normalize_form(form: &str) -> String {
    form.split_whitespace().map(|w| w.to_lowercase()).collect::<Vec<_>>().join(" ")
}

fn quote_form(form: &str) -> String {
    if !form.is_empty() && form.chars().all(crate::syntax::is_ident_char) {
        form.to_string()
    } else {
        format!("\"{form}\"")
    }
}

/// The builtin fragment (`data/fragment.lex`).
pub fn builtin_fragment() -> Lexicon {
    static BUILTIN: OnceLock<Lexicon> = OnceLock::new();
    BUILTIN
        .get_or_init(|| build(Lexicon::default(), BUILTIN_SOURCE).unwrap_or_else(|e| panic!("builtin lexicon: {e}")))
        .clone()
}

/// Parse a lexicon file and merge it over the builtin fragment.
pub fn load_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    build(builtin_fragment(), source)
}

/// Parse a lexicon file on its own, without the builtin entries.
pub fn parse_lexicon(source: &str) -> Result<Lexicon, LexiconError> {
    build(Lexicon::default(), source)
}

enum QualeSpec {
    Inline { vars: Vec<String>, conds: Vec<(String, Vec<String>)> },
    Ref(String),
}

struct RawEntry {
    line: usize,
    form: String,
    category: Category,
    ty: Option<SemType>,
    sem: Option<Term>,
    pred: Option<String>,
    particle: Option<String>,
    qualia: Vec<(QualiaRole, QualeSpec)>,
}

fn build(mut lex: Lexicon, source: &str) -> Result<Lexicon, LexiconError> {
    let (preds, raws) = parse_file(source)?;
    for (line, name, arity) in preds {
        match lex.arities.get(&name) {
            Some(&old) if old != arity => {
                return Err(LexiconError::ArityConflict { line, pred: name, old, new: arity });
            }
            _ => {
                lex.arities.insert(name, arity);
            }
        }
    }
    // Entries with qualia references are built last so that they can
    // point at verbs defined further down the file.
    let (deferred, direct): (Vec<RawEntry>, Vec<RawEntry>) =
        raws.into_iter().partition(|r| r.qualia.iter().any(|(_, q)| matches!(q, QualeSpec::Ref(_))));
    for raw in direct.into_iter().chain(deferred) {
        let line = raw.line;
        let entry = expand(raw, &lex)?;
        check_entry(&entry, &lex.arities, line)?;
        lex.put(entry);
    }
    Ok(lex)
}

fn expand(raw: RawEntry, lex: &Lexicon) -> Result<LexicalEntry, LexiconError> {
    let invalid =
        |message: &str| LexiconError::Invalid { line: raw.line, form: raw.form.clone(), message: message.to_string() };
    if raw.category != Category::Noun {
        if raw.pred.is_some() {
            return Err(invalid("`pred:` is only allowed on nouns"));
        }
        if !raw.qualia.is_empty() {
            return Err(LexiconError::QualiaOutsideNoun { line: raw.line, form: raw.form, category: raw.category });
        }
    }
    if raw.particle.is_some() && raw.category != Category::VTrans {
        return Err(invalid("`particle:` is only allowed on transitive verbs"));
    }
    let semantics = match raw.sem {
        Some(sem) => {
            if !raw.qualia.is_empty() || raw.pred.is_some() {
                return Err(invalid("`sem:` cannot be combined with `pred:` or `qualia`"));
            }
            sem
        }
        None if raw.category == Category::Noun => noun_semantics(&raw, lex)?,
        None => return Err(invalid("missing `sem:`")),
    };
    let inferred = type_of(&semantics).map_err(|source| LexiconError::IllTyped {
        line: raw.line,
        form: raw.form.clone(),
        source,
    })?;
    if let Some(declared) = raw.ty {
        if declared != inferred {
            return Err(LexiconError::SignatureMismatch { line: raw.line, form: raw.form, declared, inferred });
        }
    }
    Ok(LexicalEntry { form: raw.form, category: raw.category, semantics, signature: inferred, particle: raw.particle })
}

/// `lam(self, drs([], [NAME(self), qualia...]))` with `self` as `x:1` and
/// quale variables numbered from 2.
fn noun_semantics(raw: &RawEntry, lex: &Lexicon) -> Result<Term, LexiconError> {
    let this = Marker::entity(1);
    let name = raw.pred.clone().unwrap_or_else(|| raw.form.replace(' ', "-"));
    let mut conditions = vec![TermCondition::Pred { name, args: vec![this] }];
    let mut next = 2;
    let mut pending_refs = Vec::new();
    for (role, spec) in &raw.qualia {
        match spec {
            QualeSpec::Inline { vars, conds } => {
                let mut env = BTreeMap::from([("self".to_string(), this)]);
                let mut universe = Vec::new();
                for v in vars {
                    if env.contains_key(v) {
                        return Err(LexiconError::Invalid {
                            line: raw.line,
                            form: raw.form.clone(),
                            message: format!("quale variable `{v}` declared twice"),
                        });
                    }
                    let m = Marker::entity(next);
                    next += 1;
                    env.insert(v.clone(), m);
                    universe.push(m);
                }
                let mut body = Vec::new();
                for (pred, args) in conds {
                    let mut markers = Vec::new();
                    for a in args {
                        let m = env.get(a).ok_or_else(|| LexiconError::Invalid {
                            line: raw.line,
                            form: raw.form.clone(),
                            message: format!("unbound quale variable `{a}`"),
                        })?;
                        markers.push(*m);
                    }
                    body.push(TermCondition::Pred { name: pred.clone(), args: markers });
                }
                conditions.push(TermCondition::Qualia(*role, Term::boxed(universe, body)));
            }
            QualeSpec::Ref(target) => {
                let found = lex
                    .entries
                    .iter()
                    .filter(|e| e.form == *target && e.category != Category::Noun)
                    .min_by_key(|e| !e.category.is_verbal())
                    .ok_or_else(|| LexiconError::UnknownReference {
                        line: raw.line,
                        form: raw.form.clone(),
                        target: target.clone(),
                    })?;
                pending_refs.push(conditions.len());
                conditions.push(TermCondition::Qualia(*role, found.semantics.clone()));
            }
        }
    }
    // referenced semantics get markers disjoint from the noun's own
    let mut supply = MarkerSupply::new();
    supply.reserve_through(next);
    for i in pending_refs {
        if let TermCondition::Qualia(role, payload) = &conditions[i] {
            let renamed = payload.instantiate(&mut supply);
            conditions[i] = TermCondition::Qualia(*role, renamed);
        }
    }
    Ok(Term::Lam(Binder::Marker(this), Box::new(Term::Box(TermDrs::new(vec![], conditions)))))
}

fn check_entry(entry: &LexicalEntry, arities: &BTreeMap<String, usize>, line: usize) -> Result<(), LexiconError> {
    let inferred = type_of(&entry.semantics).map_err(|source| LexiconError::IllTyped {
        line,
        form: entry.form.clone(),
        source,
    })?;
    if inferred != entry.signature {
        return Err(LexiconError::SignatureMismatch {
            line,
            form: entry.form.clone(),
            declared: entry.signature.clone(),
            inferred,
        });
    }
    if entry.category != Category::Noun && entry.has_qualia() {
        return Err(LexiconError::QualiaOutsideNoun { line, form: entry.form.clone(), category: entry.category });
    }
    let mut problem = None;
    visit_conditions(&entry.semantics, &mut |c| {
        if problem.is_some() {
            return;
        }
        if let TermCondition::Pred { name, args } = c {
            problem = match arities.get(name) {
                None => Some(LexiconError::UndeclaredPredicate { line, form: entry.form.clone(), pred: name.clone() }),
                Some(&n) if n != args.len() => {
                    Some(LexiconError::ArityMismatch { line, pred: name.clone(), declared: n, used: args.len() })
                }
                _ => None,
            };
        }
    });
    problem.map_or(Ok(()), Err)
}

type ParsedFile = (Vec<(usize, String, usize)>, Vec<RawEntry>);

fn parse_file(source: &str) -> Result<ParsedFile, LexiconError> {
    let mut cur = Cursor::new(source);
    let mut preds = Vec::new();
    let mut entries = Vec::new();
    while !cur.at_end() {
        let line = cur.location().0;
        let head = cur.ident()?;
        if head == "pred" {
            let name = cur.ident()?;
            cur.expect("/")?;
            let arity = cur.number()? as usize;
            preds.push((line, name, arity));
            continue;
        }
        let category: Category = head.parse().map_err(|e: String| cur.error(e))?;
        let form = if cur.peek() == Some('"') { cur.quoted()? } else { cur.ident()? };
        let form = normalize_form(&form);
        if form.is_empty() {
            return Err(cur.error("empty form".into()).into());
        }
        cur.expect("{")?;
        let mut raw =
            RawEntry { line, form, category, ty: None, sem: None, pred: None, particle: None, qualia: Vec::new() };
        while !cur.eat("}") {
            let item = cur.ident()?;
            match item.as_str() {
                "type" => {
                    cur.expect(":")?;
                    raw.ty = Some(cur.sem_type()?);
                    cur.expect(";")?;
                }
                "sem" => {
                    cur.expect(":")?;
                    raw.sem = Some(cur.term()?);
                    cur.expect(";")?;
                }
                "pred" => {
                    cur.expect(":")?;
                    raw.pred = Some(cur.ident()?);
                    cur.expect(";")?;
                }
                "particle" => {
                    cur.expect(":")?;
                    raw.particle = Some(cur.ident()?.to_lowercase());
                    cur.expect(";")?;
                }
                "qualia" => {
                    let role: QualiaRole = cur.ident()?.parse().map_err(|e: String| cur.error(e))?;
                    if raw.qualia.iter().any(|(r, _)| *r == role) {
                        return Err(cur.error(format!("{role} quale given twice")).into());
                    }
                    let spec = if cur.eat("@") {
                        let target = if cur.peek() == Some('"') { cur.quoted()? } else { cur.ident()? };
                        cur.expect(";")?;
                        QualeSpec::Ref(normalize_form(&target))
                    } else {
                        let spec = parse_inline_quale(&mut cur)?;
                        cur.eat(";");
                        spec
                    };
                    raw.qualia.push((role, spec));
                }
                other => return Err(cur.error(format!("unknown entry item `{other}`")).into()),
            }
        }
        entries.push(raw);
    }
    Ok((preds, entries))
}

/// `{ z w | p(z), q(self,w) }`
fn parse_inline_quale(cur: &mut Cursor<'_>) -> Result<QualeSpec, SyntaxError> {
    cur.expect("{")?;
    let mut vars = Vec::new();
    while !cur.eat("|") {
        vars.push(cur.ident()?);
        cur.eat(",");
    }
    let mut conds = Vec::new();
    if !cur.eat("}") {
        loop {
            let name = cur.ident()?;
            cur.expect("(")?;
            let mut args = Vec::new();
            if !cur.eat(")") {
                loop {
                    args.push(cur.ident()?);
                    if cur.eat(")") {
                        break;
                    }
                    cur.expect(",")?;
                }
            }
            conds.push((name, args));
            if cur.eat("}") {
                break;
            }
            cur.expect(",")?;
        }
    }
    Ok(QualeSpec::Inline { vars, conds })
}
