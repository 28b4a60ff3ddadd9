//! Tokenizer, fragment parser and the discourse pipeline
//! (parse, build the sentence DRS, merge with the main DRS, resolve).
//!
//! The grammar is fixed:
//!
//! ```text
//! Sentence -> Conj S , S | S
//! S        -> NP VP | SubjVerb NP          (tense wraps S when it is an event type)
//! NP       -> Det N | PN | Pron | Deictic
//! VP       -> Adv VP | VTrans NP [Particle] | VAsp NP | VAsp | VIntrans
//! ```
//!
//! A bare aspectual verb parses but never composes; it is admitted so the
//! failure is reported as a type clash rather than a missing object.
//!
//! Multiword lexical items are matched longest first. Segmentations are
//! tried in that preference order and the first one that parses is used.

use std::fmt;

use thiserror::Error;

use crate::drs::{is_proper, merge, Drs, MarkerSupply};
use crate::lexicon::{Category, LexicalEntry, Lexicon};
use crate::resolution::{resolve_all, Reading, ResolutionConfig, ResolutionError};
use crate::term::{compose, type_of, Coercion, CompositionError, SemType, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    /// A lowercased word and the base form used for lexical lookup.
    Word {
        surface: String,
        lemma: String,
    },
    Comma,
}

impl Token {
    pub fn word(surface: &str) -> Token {
        let surface = surface.to_lowercase();
        let lemma = lemma_of(&surface).to_string();
        Token::Word { surface, lemma }
    }

    pub fn lemma(&self) -> Option<&str> {
        match self {
            Token::Word { lemma, .. } => Some(lemma),
            Token::Comma => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Word { surface, .. } => f.write_str(surface),
            Token::Comma => f.write_str("COMMA"),
        }
    }
}

/// Inflected forms of the fragment's verbs. Past and third-person forms
/// all receive the present-tense semantics.
const INFLECTIONS: &[(&str, &str)] = &[
    ("began", "begin"),
    ("begins", "begin"),
    ("begun", "begin"),
    ("invited", "invite"),
    ("invites", "invite"),
    ("came", "come"),
    ("comes", "come"),
    ("threw", "throw"),
    ("throws", "throw"),
    ("thrown", "throw"),
    ("attended", "attend"),
    ("attends", "attend"),
    ("went", "go"),
    ("goes", "go"),
    ("gave", "give"),
    ("gives", "give"),
    ("given", "give"),
    ("wrote", "write"),
    ("writes", "write"),
    ("written", "write"),
    ("reads", "read"),
];

pub fn lemma_of(word: &str) -> &str {
    INFLECTIONS.iter().find(|(w, _)| *w == word).map(|(_, l)| *l).unwrap_or(word)
}

/// Lowercased word tokens; commas are kept, other punctuation dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut Vec<Token>| {
        if !word.is_empty() {
            out.push(Token::word(word));
            word.clear();
        }
    };
    for c in text.chars() {
        if c.is_alphanumeric() || c == '\'' || c == '-' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            if c == ',' {
                out.push(Token::Comma);
            }
        }
    }
    flush(&mut word, &mut out);
    out
}

/// Split a discourse into sentences at `.`, `?`, `!` and line breaks.
/// `#` starts a comment running to the end of the line.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for part in line.split(['.', '?', '!']) {
            let part = part.trim();
            if !part.is_empty() {
                out.push(part.to_string());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phrase {
    Lexical(Category),
    NounPhrase,
    VerbPhrase,
    Sentence,
    /// A sentence wrapped by tense.
    Tensed,
    /// A conjunction applied to its first clause.
    ConjClause,
    Conditional,
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phrase::Lexical(c) => write!(f, "{c}"),
            Phrase::NounPhrase => f.write_str("NP"),
            Phrase::VerbPhrase => f.write_str("VP"),
            Phrase::Sentence => f.write_str("S"),
            Phrase::Tensed => f.write_str("S+tense"),
            Phrase::ConjClause => f.write_str("Conj+S"),
            Phrase::Conditional => f.write_str("Cond"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DerivationKind {
    /// `position` orders leaves by where they occur in the sentence.
    Lexical {
        entry: LexicalEntry,
        surface: String,
        position: usize,
    },
    Composition {
        functor: Box<Derivation>,
        argument: Box<Derivation>,
        coercion: Option<Coercion>,
    },
}

/// A derivation tree. Every internal node holds one result of composing
/// its functor with its argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub phrase: Phrase,
    pub semantics: Term,
    pub kind: DerivationKind,
}

impl Derivation {
    /// Roles of the qualia used for coercion anywhere in the tree.
    pub fn coercions(&self) -> Vec<&Coercion> {
        match &self.kind {
            DerivationKind::Lexical { .. } => Vec::new(),
            DerivationKind::Composition { functor, argument, coercion } => {
                let mut out = functor.coercions();
                out.extend(argument.coercions());
                out.extend(coercion.iter());
                out
            }
        }
    }

    /// The surface words covered by this node, in sentence order.
    pub fn words(&self) -> String {
        let mut leaves = Vec::new();
        self.collect_surface(&mut leaves);
        leaves.sort_by_key(|(p, _)| *p);
        leaves.into_iter().map(|(_, w)| w).filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ")
    }

    fn collect_surface<'a>(&'a self, out: &mut Vec<(usize, &'a str)>) {
        match &self.kind {
            DerivationKind::Lexical { surface, position, .. } => out.push((*position, surface)),
            DerivationKind::Composition { functor, argument, .. } => {
                functor.collect_surface(out);
                argument.collect_surface(out);
            }
        }
    }

    pub fn leaves(&self) -> Vec<&LexicalEntry> {
        match &self.kind {
            DerivationKind::Lexical { entry, .. } => vec![entry],
            DerivationKind::Composition { functor, argument, .. } => {
                let mut out = functor.leaves();
                out.extend(argument.leaves());
                out
            }
        }
    }

    fn write_tree(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match &self.kind {
            DerivationKind::Lexical { surface, .. } => {
                writeln!(f, "{pad}{} \"{surface}\": {}", self.phrase, self.semantics)
            }
            DerivationKind::Composition { functor, argument, coercion } => {
                match coercion {
                    Some(c) => writeln!(f, "{pad}{} (coerced via {}): {}", self.phrase, c.role, self.semantics)?,
                    None => writeln!(f, "{pad}{}: {}", self.phrase, self.semantics)?,
                }
                functor.write_tree(f, depth + 1)?;
                argument.write_tree(f, depth + 1)
            }
        }
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_tree(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("no parse; longest parsed prefix: `{}`", prefix.join(" "))]
    NoParse { prefix: Vec<String> },
    #[error("composition failed: {0}")]
    Composition(String),
    #[error(transparent)]
    Type(#[from] CompositionError),
    #[error("sentence has type {0}, not a proposition")]
    NotAProposition(SemType),
    #[error("the lexicon has no tense entry `pres`")]
    MissingTense,
}

#[derive(Debug, Clone)]
enum Item<'l> {
    Entries { entries: Vec<&'l LexicalEntry>, surface: String },
    Particle(String),
    Comma,
}

/// Every way of covering `tokens` with lexicon forms, longest match first.
fn segmentations<'l>(tokens: &[Token], lex: &'l Lexicon) -> Result<Vec<Vec<Item<'l>>>, GrammarError> {
    let particles: Vec<&str> = lex.entries().iter().filter_map(|e| e.particle.as_deref()).collect();
    for t in tokens {
        if let Token::Word { surface, lemma } = t {
            if !lex.contains_word(lemma) && !particles.contains(&lemma.as_str()) {
                return Err(GrammarError::UnknownWord(surface.clone()));
            }
        }
    }
    let max = lex.max_form_len();
    let mut out = Vec::new();
    let mut current = Vec::new();
    segment_from(tokens, 0, lex, &particles, max, &mut current, &mut out);
    Ok(out)
}

fn segment_from<'l>(
    tokens: &[Token],
    pos: usize,
    lex: &'l Lexicon,
    particles: &[&str],
    max: usize,
    current: &mut Vec<Item<'l>>,
    out: &mut Vec<Vec<Item<'l>>>,
) {
    if pos == tokens.len() {
        out.push(current.clone());
        return;
    }
    if tokens[pos] == Token::Comma {
        current.push(Item::Comma);
        segment_from(tokens, pos + 1, lex, particles, max, current, out);
        current.pop();
        return;
    }
    for len in (1..=max.min(tokens.len() - pos)).rev() {
        let span = &tokens[pos..pos + len];
        let Some(lemmas) = span.iter().map(Token::lemma).collect::<Option<Vec<&str>>>() else {
            continue;
        };
        let form = lemmas.join(" ");
        let entries = lex.lookup(&form);
        if entries.is_empty() {
            continue;
        }
        let surface = span.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
        current.push(Item::Entries { entries, surface });
        segment_from(tokens, pos + len, lex, particles, max, current, out);
        current.pop();
    }
    if let Some(lemma) = tokens[pos].lemma() {
        if particles.contains(&lemma) {
            current.push(Item::Particle(lemma.to_string()));
            segment_from(tokens, pos + 1, lex, particles, max, current, out);
            current.pop();
        }
    }
}

/// Syntactic tree before semantic construction.
#[derive(Debug, Clone)]
enum Syn<'l> {
    Leaf { entry: &'l LexicalEntry, surface: String, position: usize },
    Node { phrase: Phrase, functor: Box<Syn<'l>>, argument: Box<Syn<'l>> },
}

struct Parser<'a, 'l> {
    items: &'a [Item<'l>],
    /// Furthest item index covered by a complete constituent.
    furthest: usize,
}

impl<'a, 'l> Parser<'a, 'l> {
    fn entries(&self, i: usize, category: Category) -> Vec<Syn<'l>> {
        match self.items.get(i) {
            Some(Item::Entries { entries, surface }) => entries
                .iter()
                .filter(|e| e.category == category)
                .map(|e| Syn::Leaf { entry: e, surface: surface.clone(), position: i })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn reached(&mut self, end: usize) {
        self.furthest = self.furthest.max(end);
    }

    fn node(phrase: Phrase, functor: Syn<'l>, argument: Syn<'l>) -> Syn<'l> {
        Syn::Node { phrase, functor: Box::new(functor), argument: Box::new(argument) }
    }

    fn np(&mut self, i: usize) -> Vec<(Syn<'l>, usize)> {
        let mut out = Vec::new();
        for det in self.entries(i, Category::Det) {
            for noun in self.entries(i + 1, Category::Noun) {
                out.push((Self::node(Phrase::NounPhrase, det.clone(), noun), i + 2));
            }
        }
        for cat in [Category::ProperName, Category::Pronoun, Category::Deictic] {
            for leaf in self.entries(i, cat) {
                out.push((leaf, i + 1));
            }
        }
        for (_, end) in &out {
            self.reached(*end);
        }
        out
    }

    fn vp(&mut self, i: usize) -> Vec<(Syn<'l>, usize)> {
        let mut out = Vec::new();
        for adv in self.entries(i, Category::Adv) {
            for (vp, end) in self.vp(i + 1) {
                out.push((Self::node(Phrase::VerbPhrase, adv.clone(), vp), end));
            }
        }
        for verb in self.entries(i, Category::VTrans) {
            let particle = match &verb {
                Syn::Leaf { entry, .. } => entry.particle.clone(),
                Syn::Node { .. } => None,
            };
            for (obj, end) in self.np(i + 1) {
                let end = match &particle {
                    None => end,
                    Some(p) => match self.items.get(end) {
                        Some(Item::Particle(q)) if q == p => end + 1,
                        _ => continue,
                    },
                };
                let verb = match (&verb, &particle) {
                    (Syn::Leaf { entry, surface, position }, Some(p)) => {
                        Syn::Leaf { entry, surface: format!("{surface} ... {p}"), position: *position }
                    }
                    _ => verb.clone(),
                };
                out.push((Self::node(Phrase::VerbPhrase, obj, verb), end));
            }
        }
        for verb in self.entries(i, Category::VAsp) {
            for (obj, end) in self.np(i + 1) {
                out.push((Self::node(Phrase::VerbPhrase, verb.clone(), obj), end));
            }
        }
        for cat in [Category::VAsp, Category::VIntrans] {
            for verb in self.entries(i, cat) {
                out.push((verb, i + 1));
            }
        }
        for (_, end) in &out {
            self.reached(*end);
        }
        out
    }

    fn s(&mut self, i: usize) -> Vec<(Syn<'l>, usize)> {
        let mut out = Vec::new();
        for (subj, j) in self.np(i) {
            for (vp, end) in self.vp(j) {
                out.push((Self::node(Phrase::Sentence, subj.clone(), vp), end));
            }
        }
        for verb in self.entries(i, Category::SubjVerb) {
            for (obj, end) in self.np(i + 1) {
                out.push((Self::node(Phrase::Sentence, obj, verb.clone()), end));
            }
        }
        for (_, end) in &out {
            self.reached(*end);
        }
        out
    }

    fn sentence(&mut self) -> Vec<Syn<'l>> {
        let n = self.items.len();
        let mut out = Vec::new();
        for conj in self.entries(0, Category::Conj) {
            self.reached(1);
            for (s1, j) in self.s(1) {
                if !matches!(self.items.get(j), Some(Item::Comma)) {
                    continue;
                }
                self.reached(j + 1);
                for (s2, end) in self.s(j + 1) {
                    if end == n {
                        let head = Self::node(Phrase::ConjClause, conj.clone(), s1.clone());
                        out.push(Self::node(Phrase::Conditional, head, s2));
                    }
                }
            }
        }
        for (s, end) in self.s(0) {
            if end == n {
                out.push(s);
            }
        }
        out
    }
}

fn item_width(item: &Item<'_>) -> usize {
    match item {
        Item::Entries { surface, .. } => surface.split_whitespace().count(),
        Item::Particle(_) | Item::Comma => 1,
    }
}

/// All derivations of a sentence, with fresh markers from `supply`.
pub fn parse_sentence_with(
    tokens: &[Token],
    lex: &Lexicon,
    supply: &mut MarkerSupply,
) -> Result<Vec<Derivation>, GrammarError> {
    let mut best_prefix = 0;
    let mut composition_error = None;
    for items in segmentations(tokens, lex)? {
        let mut parser = Parser { items: &items, furthest: 0 };
        let trees = parser.sentence();
        let covered: usize = items[..parser.furthest.min(items.len())].iter().map(item_width).sum();
        best_prefix = best_prefix.max(covered);
        if trees.is_empty() {
            continue;
        }
        let mut out = Vec::new();
        for tree in &trees {
            match derive(tree, lex, supply) {
                Ok(ds) => out.extend(ds),
                Err(e) => composition_error = Some(e),
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    if let Some(e) = composition_error {
        return Err(e);
    }
    Err(GrammarError::NoParse { prefix: tokens[..best_prefix].iter().map(|t| t.to_string()).collect() })
}

/// All derivations of a sentence; markers are numbered from 1.
pub fn parse_sentence(tokens: &[Token], lex: &Lexicon) -> Result<Vec<Derivation>, GrammarError> {
    parse_sentence_with(tokens, lex, &mut MarkerSupply::new())
}

fn derive(syn: &Syn<'_>, lex: &Lexicon, supply: &mut MarkerSupply) -> Result<Vec<Derivation>, GrammarError> {
    match syn {
        Syn::Leaf { entry, surface, position } => Ok(vec![Derivation {
            phrase: Phrase::Lexical(entry.category),
            semantics: entry.instantiate(supply),
            kind: DerivationKind::Lexical { entry: (*entry).clone(), surface: surface.clone(), position: *position },
        }]),
        Syn::Node { phrase, functor, argument } => {
            let functors = derive(functor, lex, supply)?;
            let arguments = derive(argument, lex, supply)?;
            let mut out = Vec::new();
            for f in &functors {
                for a in &arguments {
                    let composed = compose(&f.semantics, &a.semantics, supply).unwrap_or_default();
                    if composed.is_empty() {
                        return Err(clash(f, a));
                    }
                    for c in composed {
                        let d = Derivation {
                            phrase: *phrase,
                            semantics: c.term,
                            kind: DerivationKind::Composition {
                                functor: Box::new(f.clone()),
                                argument: Box::new(a.clone()),
                                coercion: c.coercion,
                            },
                        };
                        out.push(if *phrase == Phrase::Sentence { add_tense(d, lex, supply)? } else { d });
                    }
                }
            }
            Ok(out)
        }
    }
}

fn clash(functor: &Derivation, argument: &Derivation) -> GrammarError {
    let describe = |d: &Derivation| match type_of(&d.semantics) {
        Ok(ty) => format!("`{}` : {ty}", d.words()),
        Err(e) => format!("`{}` (ill-typed: {e})", d.words()),
    };
    let expectation = |d: &Derivation| match type_of(&d.semantics) {
        Ok(SemType::Fn(arg, _)) => format!("; `{}` expects an argument of type {arg}", d.words()),
        _ => String::new(),
    };
    GrammarError::Composition(format!(
        "{} cannot combine with {}{}{}",
        describe(functor),
        describe(argument),
        expectation(functor),
        expectation(argument)
    ))
}

/// Wrap an event-type sentence in the present tense.
fn add_tense(s: Derivation, lex: &Lexicon, supply: &mut MarkerSupply) -> Result<Derivation, GrammarError> {
    if type_of(&s.semantics).map_err(CompositionError::from)? != SemType::property() {
        return Ok(s);
    }
    let pres = lex.lookup_category("pres", Category::Tense).ok_or(GrammarError::MissingTense)?;
    let tense = Derivation {
        phrase: Phrase::Lexical(Category::Tense),
        semantics: pres.instantiate(supply),
        kind: DerivationKind::Lexical { entry: pres.clone(), surface: String::new(), position: usize::MAX },
    };
    let mut results = compose(&tense.semantics, &s.semantics, supply)?;
    if results.is_empty() {
        return Err(GrammarError::Composition("tense does not apply".into()));
    }
    let c = results.remove(0);
    Ok(Derivation {
        phrase: Phrase::Tensed,
        semantics: c.term,
        kind: DerivationKind::Composition { functor: Box::new(tense), argument: Box::new(s), coercion: c.coercion },
    })
}

/// The lambda-free DRS of a complete derivation; α-conditions unresolved.
pub fn build_sentence_drs(d: &Derivation) -> Result<Drs, GrammarError> {
    let ty = type_of(&d.semantics).map_err(CompositionError::from)?;
    if ty != SemType::T {
        return Err(GrammarError::NotAProposition(ty));
    }
    Ok(d.semantics.to_drs()?)
}

/// Number of presupposition triggers (definite articles, proper names,
/// pronouns) among the tokens.
pub fn count_triggers(tokens: &[Token], lex: &Lexicon) -> usize {
    tokens
        .iter()
        .filter_map(Token::lemma)
        .filter(|w| {
            lex.lookup(w).iter().any(|e| {
                matches!(e.category, Category::ProperName | Category::Pronoun)
                    || (e.category == Category::Det && e.alpha_count() > 0)
            })
        })
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Follow the first derivation and first reading at every sentence.
    #[default]
    BestFirst,
    /// Keep every combination, up to `limit` discourse states.
    AllReadings { limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscourseState {
    pub main_drs: Drs,
    pub history: Vec<(String, Reading)>,
}

impl DiscourseState {
    pub fn new() -> Self {
        DiscourseState { main_drs: Drs::empty(), history: Vec::new() }
    }
}

impl Default for DiscourseState {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscourseError {
    #[error("sentence {} (`{sentence}`): {source}", .index + 1)]
    Grammar { index: usize, sentence: String, source: GrammarError },
    #[error("sentence {} (`{sentence}`): {source}", .index + 1)]
    Resolution { index: usize, sentence: String, source: ResolutionError },
}

impl DiscourseError {
    pub fn index(&self) -> usize {
        match self {
            DiscourseError::Grammar { index, .. } | DiscourseError::Resolution { index, .. } => *index,
        }
    }
}

/// Resolution settings to use for a lexicon: the defaults plus the
/// lexicon's qualia-anchored predicates.
pub fn default_config(lex: &Lexicon) -> ResolutionConfig {
    ResolutionConfig { anchored_predicates: lex.anchored_predicates(), ..ResolutionConfig::default() }
}

pub fn process_discourse(
    sentences: &[String],
    lex: &Lexicon,
    policy: Policy,
) -> Result<Vec<DiscourseState>, DiscourseError> {
    process_discourse_with(sentences, lex, policy, &default_config(lex))
}

/// Fold every sentence through parse, build, merge and resolve. Returns
/// one state under [`Policy::BestFirst`], possibly several otherwise.
pub fn process_discourse_with(
    sentences: &[String],
    lex: &Lexicon,
    policy: Policy,
    config: &ResolutionConfig,
) -> Result<Vec<DiscourseState>, DiscourseError> {
    let mut states = vec![DiscourseState::new()];
    for (index, sentence) in sentences.iter().enumerate() {
        let grammar_err = |source| DiscourseError::Grammar { index, sentence: sentence.clone(), source };
        let tokens = tokenize(sentence);
        let mut next_states = Vec::new();
        let mut last_error = None;
        for state in &states {
            let mut supply = MarkerSupply::above(state.main_drs.markers().iter());
            let derivations = parse_sentence_with(&tokens, lex, &mut supply).map_err(grammar_err)?;
            let config = ResolutionConfig { context: state.main_drs.clone(), ..config.clone() };
            for d in &derivations {
                let sentence_drs = build_sentence_drs(d).map_err(grammar_err)?;
                let merged = merge(&state.main_drs, &sentence_drs);
                let readings = match resolve_all(&merged, &config) {
                    Ok(r) => r,
                    Err(e) => {
                        last_error = Some(e);
                        continue;
                    }
                };
                for reading in readings {
                    debug_assert!(is_proper(&reading.resolved));
                    let mut history = state.history.clone();
                    let main_drs = reading.resolved.clone();
                    history.push((sentence.clone(), reading));
                    if next_states.iter().all(|s: &DiscourseState| s.main_drs != main_drs) {
                        next_states.push(DiscourseState { main_drs, history });
                    }
                    if policy == Policy::BestFirst {
                        break;
                    }
                }
                if policy == Policy::BestFirst && !next_states.is_empty() {
                    break;
                }
            }
            if let Policy::AllReadings { limit } = policy {
                if next_states.len() >= limit {
                    next_states.truncate(limit);
                    break;
                }
            }
            if policy == Policy::BestFirst && !next_states.is_empty() {
                break;
            }
        }
        if next_states.is_empty() {
            let source = last_error.expect("no readings implies a resolution error");
            return Err(DiscourseError::Resolution { index, sentence: sentence.clone(), source });
        }
        states = next_states;
    }
    Ok(states)
}
