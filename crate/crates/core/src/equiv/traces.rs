//! Decorated-trace semantics and possible futures.
//!
//! Every trace-like semantics below is read off the set of ready traces of a
//! process: sequences `X0 a1 X1 ... an Xn` where `Xi` is the set of initial
//! actions of the state reached after `a1 ... ai`.
//!
//! * T: the action sequences.
//! * CT: traces, plus the completed traces (those that can end in a deadlock).
//! * R: pairs `(φ, X)` with `X` the initials of some `φ`-derivative.
//! * F: pairs `(φ, X)` with `X` disjoint from the initials of some
//!   `φ`-derivative. The failure set is downward closed, so it is fixed by the
//!   minimal ready sets per trace, which is what we store.
//! * FT: like F, with a refusal set after every action. Stored as the minimal
//!   ready vectors per trace under componentwise inclusion.
//! * RT: the ready traces themselves.
//!
//! A possible future of `p` is a pair `(φ, T)` with `T` the trace set of some
//! `φ`-derivative of `p`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::sos::Lts;
use crate::term::Action;

pub type Trace = Vec<Action>;
/// A sorted, duplicate-free set of actions.
pub type Ready = Vec<Action>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ReadyTrace {
    pub actions: Trace,
    /// One more entry than `actions`.
    pub readies: Vec<Ready>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TraceKind {
    T,
    CT,
    F,
    R,
    FT,
    RT,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Denotation {
    Traces(BTreeSet<Trace>),
    Completed {
        traces: BTreeSet<Trace>,
        completed: BTreeSet<Trace>,
    },
    /// Minimal ready sets per trace.
    Failures(BTreeMap<Trace, Vec<Ready>>),
    Readiness(BTreeSet<(Trace, Ready)>),
    /// Minimal ready vectors per trace.
    FailureTraces(BTreeMap<Trace, Vec<Vec<Ready>>>),
    ReadyTraces(BTreeSet<ReadyTrace>),
}

/// All ready traces from `root`.
pub fn ready_traces(lts: &Lts, root: usize) -> BTreeSet<ReadyTrace> {
    ready_traces_modulo(lts, &super::bisim::refine_acyclic(lts), root)
}

/// All ready traces from `root`, by depth-first search over the paths of the
/// quotient modulo `block`, a partition finer than trace equivalence for
/// every decoration (bisimilarity will do).
pub fn ready_traces_modulo(lts: &Lts, block: &[u32], root: usize) -> BTreeSet<ReadyTrace> {
    let classes = block.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
    let mut succ: Vec<Option<Vec<(Action, usize)>>> = vec![None; classes];
    let mut inits: Vec<Ready> = vec![Vec::new(); classes];
    for s in 0..lts.len() {
        let c = block[s] as usize;
        if succ[c].is_none() {
            let mut v: Vec<(Action, usize)> = lts.succ(s).iter().map(|&(a, t)| (a, block[t] as usize)).collect();
            v.sort_unstable();
            v.dedup();
            succ[c] = Some(v);
            inits[c] = lts.init(s);
        }
    }
    let succ: Vec<Vec<(Action, usize)>> = succ.into_iter().map(Option::unwrap_or_default).collect();
    let root = block[root] as usize;
    let mut out = BTreeSet::new();
    let mut actions: Trace = Vec::new();
    let mut readies: Vec<Ready> = vec![inits[root].clone()];
    out.insert(ReadyTrace {
        actions: actions.clone(),
        readies: readies.clone(),
    });
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&mut (s, ref mut k)) = stack.last_mut() {
        if *k < succ[s].len() {
            let (a, t) = succ[s][*k];
            *k += 1;
            actions.push(a);
            readies.push(inits[t].clone());
            out.insert(ReadyTrace {
                actions: actions.clone(),
                readies: readies.clone(),
            });
            stack.push((t, 0));
        } else {
            stack.pop();
            if !stack.is_empty() {
                actions.pop();
                readies.pop();
            }
        }
    }
    out
}

fn subset(a: &[Action], b: &[Action]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn vec_subset(a: &[Ready], b: &[Ready]) -> bool {
    a.iter().zip(b).all(|(x, y)| subset(x, y))
}

/// The minimal elements of `items` under `le`, sorted.
fn minimal<T: Ord + Clone>(items: &BTreeSet<T>, le: impl Fn(&T, &T) -> bool) -> Vec<T> {
    items
        .iter()
        .filter(|x| !items.iter().any(|y| y != *x && le(y, x)))
        .cloned()
        .collect()
}

pub fn denotation(rts: &BTreeSet<ReadyTrace>, kind: TraceKind) -> Denotation {
    let last = |rt: &ReadyTrace| rt.readies.last().cloned().unwrap_or_default();
    match kind {
        TraceKind::T => Denotation::Traces(rts.iter().map(|rt| rt.actions.clone()).collect()),
        TraceKind::CT => Denotation::Completed {
            traces: rts.iter().map(|rt| rt.actions.clone()).collect(),
            completed: rts
                .iter()
                .filter(|rt| rt.readies.last().is_some_and(Vec::is_empty))
                .map(|rt| rt.actions.clone())
                .collect(),
        },
        TraceKind::R => Denotation::Readiness(rts.iter().map(|rt| (rt.actions.clone(), last(rt))).collect()),
        TraceKind::F => {
            let mut by: BTreeMap<Trace, BTreeSet<Ready>> = BTreeMap::new();
            for rt in rts {
                by.entry(rt.actions.clone()).or_default().insert(last(rt));
            }
            Denotation::Failures(by.into_iter().map(|(k, v)| (k, minimal(&v, |a, b| subset(a, b)))).collect())
        }
        TraceKind::FT => {
            let mut by: BTreeMap<Trace, BTreeSet<Vec<Ready>>> = BTreeMap::new();
            for rt in rts {
                by.entry(rt.actions.clone()).or_default().insert(rt.readies.clone());
            }
            Denotation::FailureTraces(
                by.into_iter()
                    .map(|(k, v)| (k, minimal(&v, |a, b| vec_subset(a, b))))
                    .collect(),
            )
        }
        TraceKind::RT => Denotation::ReadyTraces(rts.clone()),
    }
}

fn render(t: &[Action]) -> Vec<String> {
    t.iter().map(Action::to_string).collect()
}

fn complement_of(universe: &[Action], ready: &[Action]) -> Vec<String> {
    universe
        .iter()
        .filter(|a| ready.binary_search(a).is_err())
        .map(Action::to_string)
        .collect()
}

/// The first element of `a` not in `b`, preferring short traces.
fn first_missing<'t, T: Ord>(a: &'t BTreeSet<T>, b: &BTreeSet<T>, len: impl Fn(&T) -> usize) -> Option<&'t T> {
    a.iter().filter(|x| !b.contains(x)).min_by_key(|x| len(x))
}

/// An observation of `p` that `q` lacks. `universe` is the set refusals are
/// taken relative to.
pub fn only_in(p: &Denotation, q: &Denotation, universe: &[Action]) -> Option<Value> {
    match (p, q) {
        (Denotation::Traces(a), Denotation::Traces(b)) => {
            first_missing(a, b, Vec::len).map(|t| json!({"kind": "trace", "trace": render(t)}))
        }
        (
            Denotation::Completed { traces: a, completed: ca },
            Denotation::Completed { traces: b, completed: cb },
        ) => first_missing(a, b, Vec::len)
            .map(|t| json!({"kind": "trace", "trace": render(t)}))
            .or_else(|| first_missing(ca, cb, Vec::len).map(|t| json!({"kind": "completed_trace", "trace": render(t)}))),
        (Denotation::Readiness(a), Denotation::Readiness(b)) => first_missing(a, b, |x| x.0.len())
            .map(|(t, r)| json!({"kind": "ready_pair", "trace": render(t), "ready": render(r)})),
        (Denotation::ReadyTraces(a), Denotation::ReadyTraces(b)) => {
            first_missing(a, b, |x| x.actions.len()).map(|rt| {
                let readies: Vec<Vec<String>> = rt.readies.iter().map(|r| render(r)).collect();
                json!({"kind": "ready_trace", "trace": render(&rt.actions), "readies": readies})
            })
        }
        (Denotation::Failures(a), Denotation::Failures(b)) => {
            let mut best: Option<(&Trace, &Ready)> = None;
            for (t, mins) in a {
                let found = match b.get(t) {
                    None => mins.first(),
                    Some(other) => mins.iter().find(|i| !other.iter().any(|j| subset(j, i))),
                };
                if let Some(i) = found {
                    if best.is_none_or(|(bt, _)| t.len() < bt.len()) {
                        best = Some((t, i));
                    }
                }
            }
            best.map(|(t, i)| json!({"kind": "failure", "trace": render(t), "refusal": complement_of(universe, i)}))
        }
        (Denotation::FailureTraces(a), Denotation::FailureTraces(b)) => {
            let mut best: Option<(&Trace, &Vec<Ready>)> = None;
            for (t, mins) in a {
                let found = match b.get(t) {
                    None => mins.first(),
                    Some(other) => mins.iter().find(|i| !other.iter().any(|j| vec_subset(j, i))),
                };
                if let Some(i) = found {
                    if best.is_none_or(|(bt, _)| t.len() < bt.len()) {
                        best = Some((t, i));
                    }
                }
            }
            best.map(|(t, v)| {
                let refusals: Vec<Vec<String>> = v.iter().map(|r| complement_of(universe, r)).collect();
                json!({"kind": "failure_trace", "trace": render(t), "refusals": refusals})
            })
        }
        _ => None,
    }
}

/// Trace sets of every state, shared, and a class number per state such
/// that two states have the same class iff their trace sets are equal.
pub struct TraceTable {
    pub sets: Vec<Arc<BTreeSet<Trace>>>,
    pub class: Vec<u32>,
}

pub fn trace_table(lts: &Lts) -> TraceTable {
    let n = lts.len();
    let mut sets: Vec<Option<Arc<BTreeSet<Trace>>>> = vec![None; n];
    for s in lts.bottom_up() {
        let mut set: BTreeSet<Trace> = BTreeSet::new();
        set.insert(Vec::new());
        for &(a, t) in lts.succ(s) {
            for tr in sets[t].as_ref().expect("successor visited first").iter() {
                let mut v = Vec::with_capacity(tr.len() + 1);
                v.push(a);
                v.extend_from_slice(tr);
                set.insert(v);
            }
        }
        sets[s] = Some(Arc::new(set));
    }
    let sets: Vec<Arc<BTreeSet<Trace>>> = sets.into_iter().map(|s| s.expect("every state visited")).collect();
    let mut ids: HashMap<Arc<BTreeSet<Trace>>, u32> = HashMap::new();
    let class = sets
        .iter()
        .map(|s| {
            let fresh = ids.len() as u32;
            *ids.entry(s.clone()).or_insert(fresh)
        })
        .collect();
    TraceTable { sets, class }
}

/// Possible futures of `root` as pairs of a trace and the trace class of a
/// derivative (see [`TraceTable`]).
pub fn possible_futures(lts: &Lts, table: &TraceTable, root: usize) -> BTreeSet<(Trace, u32)> {
    let mut out = BTreeSet::new();
    let mut path: Trace = Vec::new();
    out.insert((path.clone(), table.class[root]));
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&mut (s, ref mut k)) = stack.last_mut() {
        if *k < lts.succ(s).len() {
            let (a, t) = lts.succ(s)[*k];
            *k += 1;
            path.push(a);
            out.insert((path.clone(), table.class[t]));
            stack.push((t, 0));
        } else {
            stack.pop();
            if !stack.is_empty() {
                path.pop();
            }
        }
    }
    out
}
