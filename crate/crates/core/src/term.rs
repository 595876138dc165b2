//! Actions, process terms, substitutions and comparison modulo associativity
//! and commutativity of `+`.
//!
//! Terms are immutable and reference counted, so cloning a [`Term`] is cheap
//! and subterms are shared freely between states, proofs and substitutions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Serialize, Serializer};

use crate::error::Error;

/// A short identifier stored inline.
///
/// At most [`Ident::MAX_LEN`] bytes. Ordering is the byte-wise ordering of the
/// underlying string, so sorting identifiers is stable across runs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident([u8; 16]);

impl Ident {
    pub const MAX_LEN: usize = 15;

    pub fn new(s: &str) -> Option<Ident> {
        let bytes = s.as_bytes();
        if bytes.is_empty() || bytes.len() > Self::MAX_LEN || bytes.contains(&0) {
            return None;
        }
        let mut buf = [0u8; 16];
        buf[..bytes.len()].copy_from_slice(bytes);
        buf[15] = bytes.len() as u8;
        Some(Ident(buf))
    }

    pub fn as_str(&self) -> &str {
        let len = self.0[15] as usize;
        // Only ever built from a &str in `new`.
        std::str::from_utf8(&self.0[..len]).expect("identifier is valid utf-8")
    }
}

/// Builds an identifier from a literal that is known to be valid.
pub(crate) fn ident(s: &str) -> Ident {
    Ident::new(s).unwrap_or_else(|| panic!("invalid identifier literal {s:?}"))
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.as_str())
    }
}

/// An action of `A ∪ Ā ∪ {τ}`.
///
/// The derived order puts `tau` first, then names, then co-names.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Tau,
    Name(Ident),
    CoName(Ident),
}

impl Action {
    pub fn name(s: &str) -> Action {
        Action::Name(ident(s))
    }

    pub fn coname(s: &str) -> Action {
        Action::CoName(ident(s))
    }

    pub fn complement(self) -> Result<Action, Error> {
        match self {
            Action::Tau => Err(Error::ComplementOfTau),
            Action::Name(n) => Ok(Action::CoName(n)),
            Action::CoName(n) => Ok(Action::Name(n)),
        }
    }

    pub fn is_tau(self) -> bool {
        self == Action::Tau
    }

    /// The underlying name, absent for `tau`.
    pub fn base(self) -> Option<Ident> {
        match self {
            Action::Tau => None,
            Action::Name(n) | Action::CoName(n) => Some(n),
        }
    }

    /// True when the two actions can synchronise into a `tau`.
    pub fn complements(self, other: Action) -> bool {
        matches!(
            (self, other),
            (Action::Name(a), Action::CoName(b)) | (Action::CoName(a), Action::Name(b)) if a == b
        )
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => f.write_str("tau"),
            Action::Name(n) => write!(f, "{n}"),
            Action::CoName(n) => write!(f, "~{n}"),
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The finite set of action names `A`. Co-names are derived, never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<Ident>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Alphabet, Error>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out = Vec::new();
        for n in names {
            let n = n.as_ref().trim();
            let valid = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !matches!(n, "tau" | "lmerge" | "cmerge");
            let id = Ident::new(n).filter(|_| valid).ok_or_else(|| Error::InvalidAlphabet(n.to_string()))?;
            out.push(id);
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidAlphabet("empty alphabet".into()));
        }
        Ok(Alphabet { names: out })
    }

    /// Parses a comma separated list such as `a,b`.
    pub fn parse(list: &str) -> Result<Alphabet, Error> {
        Alphabet::new(list.split(',').filter(|s| !s.trim().is_empty()))
    }

    pub fn names(&self) -> &[Ident] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: Ident) -> bool {
        self.names.binary_search(&name).is_ok()
    }

    pub fn contains_action(&self, a: Action) -> bool {
        a.base().is_none_or(|n| self.contains(n))
    }

    /// `A ∪ Ā`, in action order.
    pub fn visible(&self) -> Vec<Action> {
        let mut v: Vec<Action> = self.names.iter().map(|&n| Action::Name(n)).collect();
        v.extend(self.names.iter().map(|&n| Action::CoName(n)));
        v
    }

    /// `A ∪ Ā ∪ {τ}`, in action order.
    pub fn actions(&self) -> Vec<Action> {
        let mut v = vec![Action::Tau];
        v.extend(self.visible());
        v
    }

    /// Names only, as actions (the τ-free, co-name-free fragment).
    pub fn name_actions(&self) -> Vec<Action> {
        self.names.iter().map(|&n| Action::Name(n)).collect()
    }
}

impl Serialize for Alphabet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.names.iter())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.names.iter().map(|n| n.as_str()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// The shape of a term node.
///
/// The derived order (constructor tag first, then fields) is the total order
/// used to sort summands in [`Term::ac_canonical`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TermKind {
    Nil,
    Var(Ident),
    Prefix(Action, Term),
    Sum(Term, Term),
    Par(Term, Term),
    LeftMerge(Term, Term),
    CommMerge(Term, Term),
    /// Application of a binary operator defined by a de Simone rule set.
    Op(Ident, Term, Term),
}

/// A (possibly open) process term.
///
/// Each node caches a structural hash, so hashing is constant time and most
/// unequal terms are told apart without a traversal.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    hash: u64,
    kind: TermKind,
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.kind == other.0.kind)
    }
}

impl Eq for Term {}

impl std::hash::Hash for Term {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Term) -> std::cmp::Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return std::cmp::Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

/// A fixed (unseeded) hasher, so cached hashes are the same in every run.
fn node_hash(kind: &TermKind) -> u64 {
    use std::hash::{Hash, Hasher};
    #[allow(deprecated)]
    let mut h = std::hash::SipHasher::new();
    kind.hash(&mut h);
    h.finish()
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A path into a term: `0` selects the body of a prefix or the left argument
/// of a binary operator, `1` the right argument.
pub type Position = Vec<usize>;

impl Term {
    pub fn new(kind: TermKind) -> Term {
        Term(Arc::new(Node {
            hash: node_hash(&kind),
            kind,
        }))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn nil() -> Term {
        static NIL: OnceLock<Term> = OnceLock::new();
        NIL.get_or_init(|| Term::new(TermKind::Nil)).clone()
    }

    pub fn var(name: &str) -> Term {
        Term::new(TermKind::Var(ident(name)))
    }

    pub fn var_id(name: Ident) -> Term {
        Term::new(TermKind::Var(name))
    }

    pub fn prefix(a: Action, body: Term) -> Term {
        Term::new(TermKind::Prefix(a, body))
    }

    pub fn sum(l: Term, r: Term) -> Term {
        Term::new(TermKind::Sum(l, r))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::new(TermKind::Par(l, r))
    }

    pub fn left_merge(l: Term, r: Term) -> Term {
        Term::new(TermKind::LeftMerge(l, r))
    }

    pub fn comm_merge(l: Term, r: Term) -> Term {
        Term::new(TermKind::CommMerge(l, r))
    }

    pub fn op(name: Ident, l: Term, r: Term) -> Term {
        Term::new(TermKind::Op(name, l, r))
    }

    /// Left-nested sum of the given terms; the empty sum is `0`.
    pub fn sum_of<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::nil(),
            Some(first) => it.fold(first, Term::sum),
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self.kind(), TermKind::Nil)
    }

    pub fn children(&self) -> Vec<&Term> {
        match self.kind() {
            TermKind::Nil | TermKind::Var(_) => vec![],
            TermKind::Prefix(_, t) => vec![t],
            TermKind::Sum(l, r)
            | TermKind::Par(l, r)
            | TermKind::LeftMerge(l, r)
            | TermKind::CommMerge(l, r)
            | TermKind::Op(_, l, r) => vec![l, r],
        }
    }

    /// Same head symbol, new children. Panics if the arity does not match.
    pub fn with_children(&self, mut kids: Vec<Term>) -> Term {
        let arity = self.children().len();
        assert_eq!(kids.len(), arity, "arity mismatch rebuilding a term");
        if arity == 0 {
            return self.clone();
        }
        if arity == 1 {
            let body = kids.pop().expect("one child");
            return match self.kind() {
                TermKind::Prefix(a, _) => Term::prefix(*a, body),
                _ => unreachable!(),
            };
        }
        let r = kids.pop().expect("two children");
        let l = kids.pop().expect("two children");
        match self.kind() {
            TermKind::Sum(..) => Term::sum(l, r),
            TermKind::Par(..) => Term::par(l, r),
            TermKind::LeftMerge(..) => Term::left_merge(l, r),
            TermKind::CommMerge(..) => Term::comm_merge(l, r),
            TermKind::Op(name, ..) => Term::op(*name, l, r),
            _ => unreachable!(),
        }
    }

    /// Number of operator symbols; `0` and variables count zero.
    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::Nil | TermKind::Var(_) => 0,
            _ => 1 + self.children().iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    /// Number of prefix nodes. Every transition strictly decreases it.
    pub fn prefix_count(&self) -> usize {
        let own = usize::from(matches!(self.kind(), TermKind::Prefix(..)));
        own + self.children().iter().map(|c| c.prefix_count()).sum::<usize>()
    }

    /// Summands modulo associativity: nested sums are flattened, `0` itself has
    /// no summands, and `0`s occurring inside a sum are kept.
    pub fn summands(&self) -> Vec<Term> {
        let mut out = Vec::new();
        if !self.is_nil() {
            self.collect_summands(&mut out);
        }
        out
    }

    fn collect_summands(&self, out: &mut Vec<Term>) {
        match self.kind() {
            TermKind::Sum(l, r) => {
                l.collect_summands(out);
                r.collect_summands(out);
            }
            _ => out.push(self.clone()),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Ident>) {
        match self.kind() {
            TermKind::Var(x) => {
                out.insert(*x);
            }
            _ => self.children().iter().for_each(|c| c.collect_vars(out)),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self.kind() {
            TermKind::Var(_) => false,
            _ => self.children().iter().all(|c| c.is_closed()),
        }
    }

    /// No parallel composition, merge operators or user operators: a BCCSP term.
    pub fn is_par_free(&self) -> bool {
        match self.kind() {
            TermKind::Nil | TermKind::Var(_) => true,
            TermKind::Prefix(_, t) => t.is_par_free(),
            TermKind::Sum(l, r) => l.is_par_free() && r.is_par_free(),
            _ => false,
        }
    }

    /// True when the term contains only CCS operators (no merges, no user operators).
    pub fn is_ccs(&self) -> bool {
        match self.kind() {
            TermKind::LeftMerge(..) | TermKind::CommMerge(..) | TermKind::Op(..) => false,
            _ => self.children().iter().all(|c| c.is_ccs()),
        }
    }

    /// Replaces every variable by `f(x)`.
    pub fn map_vars(&self, f: &mut dyn FnMut(Ident) -> Option<Term>) -> Term {
        match self.kind() {
            TermKind::Nil => self.clone(),
            TermKind::Var(x) => f(*x).unwrap_or_else(|| self.clone()),
            _ => {
                let kids: Vec<Term> = self.children().into_iter().map(|c| c.map_vars(f)).collect();
                self.with_children(kids)
            }
        }
    }

    pub fn substitute(&self, sigma: &Substitution) -> Term {
        if sigma.is_empty() {
            return self.clone();
        }
        self.map_vars(&mut |x| sigma.get(x).cloned())
    }

    /// The substitution mapping every variable to `0`.
    pub fn sigma_zero(&self) -> Term {
        self.map_vars(&mut |_| Some(Term::nil()))
    }

    /// Canonical representative modulo associativity and commutativity of `+`:
    /// summands are flattened, sorted by the derived term order and rebuilt as
    /// a left-nested sum. Duplicates and `0` summands are kept.
    pub fn ac_canonical(&self) -> Term {
        match self.kind() {
            TermKind::Nil | TermKind::Var(_) => self.clone(),
            TermKind::Sum(..) => {
                let mut parts: Vec<Term> = self.summands().iter().map(|s| s.ac_canonical()).collect();
                parts.sort();
                Term::sum_of(parts)
            }
            _ => {
                let kids: Vec<Term> = self.children().into_iter().map(|c| c.ac_canonical()).collect();
                self.with_children(kids)
            }
        }
    }

    pub fn ac_equal(&self, other: &Term) -> bool {
        self == other || self.ac_canonical() == other.ac_canonical()
    }

    pub fn subterm(&self, pos: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in pos {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `pos`.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(new),
            Some((&i, rest)) => {
                let kids = self.children();
                let child = kids.get(i)?.replace_at(rest, new)?;
                let mut owned: Vec<Term> = kids.into_iter().cloned().collect();
                owned[i] = child;
                Some(self.with_children(owned))
            }
        }
    }

    /// All actions occurring in prefixes.
    pub fn actions(&self) -> BTreeSet<Action> {
        let mut out = BTreeSet::new();
        self.collect_actions(&mut out);
        out
    }

    fn collect_actions(&self, out: &mut BTreeSet<Action>) {
        if let TermKind::Prefix(a, _) = self.kind() {
            out.insert(*a);
        }
        self.children().iter().for_each(|c| c.collect_actions(out));
    }
}

/// A mapping from variables to terms, extended homomorphically to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Substitution(BTreeMap<Ident, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn insert(&mut self, x: Ident, t: Term) -> Option<Term> {
        self.0.insert(x, t)
    }

    pub fn with(mut self, x: &str, t: Term) -> Substitution {
        self.0.insert(ident(x), t);
        self
    }

    pub fn get(&self, x: Ident) -> Option<&Term> {
        self.0.get(&x)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Term)> {
        self.0.iter()
    }

    pub fn is_closed(&self) -> bool {
        self.0.values().all(Term::is_closed)
    }

    pub fn apply(&self, t: &Term) -> Term {
        t.substitute(self)
    }
}

impl FromIterator<(Ident, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Ident, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Action {
        Action::name("a")
    }
    fn b() -> Action {
        Action::name("b")
    }
    fn c() -> Action {
        Action::name("c")
    }
    fn pre(x: Action, t: Term) -> Term {
        Term::prefix(x, t)
    }
    fn nil() -> Term {
        Term::nil()
    }

    #[test]
    fn complement_is_an_involution() {
        assert_eq!(a().complement().unwrap(), Action::coname("a"));
        assert_eq!(Action::coname("a").complement().unwrap(), a());
        assert!(matches!(Action::Tau.complement(), Err(Error::ComplementOfTau)));
        assert_ne!(a().complement().unwrap(), a());
    }

    #[test]
    fn size_counts_operator_symbols() {
        assert_eq!(nil().size(), 0);
        assert_eq!(Term::sum(pre(a(), nil()), pre(b(), nil())).size(), 3);
        assert_eq!(Term::par(pre(a(), nil()), Term::var("X")).size(), 2);
    }

    #[test]
    fn summands_flatten_sums() {
        let t = Term::sum(Term::sum(pre(a(), nil()), pre(b(), nil())), pre(c(), nil()));
        assert_eq!(t.summands(), vec![pre(a(), nil()), pre(b(), nil()), pre(c(), nil())]);
        assert!(nil().summands().is_empty());
        let nested = pre(a(), Term::sum(pre(b(), nil()), pre(c(), nil())));
        assert_eq!(nested.summands(), vec![nested.clone()]);
    }

    #[test]
    fn substitution_replaces_variables() {
        let t = Term::sum(Term::var("X"), Term::var("Y"));
        let s = Substitution::new().with("X", pre(a(), nil()));
        assert_eq!(t.substitute(&s), Term::sum(pre(a(), nil()), Term::var("Y")));
        let u = Term::par(Term::var("X"), Term::sum(Term::var("Y"), Term::var("Z")));
        assert_eq!(u.sigma_zero(), Term::par(nil(), Term::sum(nil(), nil())));
        let v = pre(a(), Term::var("X"));
        assert_eq!(v.substitute(&Substitution::new()), v);
    }

    #[test]
    fn ac_canonical_sorts_and_keeps_duplicates() {
        let t = Term::sum(pre(b(), nil()), pre(a(), nil()));
        assert_eq!(t.ac_canonical(), Term::sum(pre(a(), nil()), pre(b(), nil())));
        let u = Term::sum(Term::sum(pre(a(), nil()), pre(b(), nil())), pre(a(), nil()));
        assert_eq!(
            u.ac_canonical(),
            Term::sum_of([pre(a(), nil()), pre(a(), nil()), pre(b(), nil())])
        );
        let v = pre(a(), Term::sum(pre(c(), nil()), pre(b(), nil())));
        assert_eq!(v.ac_canonical(), pre(a(), Term::sum(pre(b(), nil()), pre(c(), nil()))));
    }

    #[test]
    fn free_vars_and_closedness() {
        let t = Term::sum(Term::var("X"), pre(a(), Term::var("Y")));
        assert_eq!(t.free_vars(), [ident("X"), ident("Y")].into_iter().collect());
        assert!(Term::par(pre(a(), nil()), pre(b(), nil())).free_vars().is_empty());
        let f = Term::op(ident("f"), Term::var("X"), Term::var("X"));
        assert_eq!(f.free_vars().len(), 1);
        assert!(!f.is_closed());
    }

    #[test]
    fn positions_address_children() {
        let t = Term::par(pre(a(), nil()), Term::sum(pre(b(), nil()), nil()));
        assert_eq!(t.subterm(&[1, 0]), Some(&pre(b(), nil())));
        let r = t.replace_at(&[1, 0], pre(c(), nil())).unwrap();
        assert_eq!(r, Term::par(pre(a(), nil()), Term::sum(pre(c(), nil()), nil())));
        assert!(t.subterm(&[0, 1]).is_none());
    }

    #[test]
    fn ident_order_is_string_order() {
        let mut v = [ident("b"), ident("ab"), ident("a"), ident("abc")];
        v.sort();
        let s: Vec<&str> = v.iter().map(|i| i.as_str()).collect();
        assert_eq!(s, ["a", "ab", "abc", "b"]);
        assert!(Ident::new("sixteen_chars_xx").is_none());
    }
}
