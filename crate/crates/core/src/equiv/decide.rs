//! Deciding the trace-like semantics without listing traces.
//!
//! Each check explores pairs `(S, T)` of state sets reached from the two
//! roots by the same observations (a subset construction run on both sides
//! at once) and compares a local property of every pair. The number of pairs
//! is usually far below the number of traces, which grows with every
//! interleaving.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::sos::Lts;
use crate::term::Action;

use super::traces::{Ready, TraceKind};

type Set = Vec<usize>;

fn subset(a: &[Action], b: &[Action]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

struct Ctx<'a> {
    lts: &'a Lts,
    init: Vec<Ready>,
}

impl Ctx<'_> {
    fn post(&self, set: &[usize], a: Action, keep: impl Fn(&Ready) -> bool) -> Set {
        let mut out: Set = set
            .iter()
            .flat_map(|&s| self.lts.succ(s).iter())
            .filter(|&&(b, t)| b == a && keep(&self.init[t]))
            .map(|&(_, t)| t)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn actions(&self, set: &[usize]) -> BTreeSet<Action> {
        set.iter().flat_map(|&s| self.init[s].iter().copied()).collect()
    }

    /// Labels `(a, initials of the target)` enabled from `set`.
    fn ready_labels(&self, set: &[usize]) -> BTreeSet<(Action, Ready)> {
        set.iter()
            .flat_map(|&s| self.lts.succ(s).iter())
            .map(|&(a, t)| (a, self.init[t].clone()))
            .collect()
    }

    /// Every member of `xs` has a member of `ys` with initials contained in it.
    fn dominated(&self, xs: &[usize], ys: &[usize]) -> bool {
        xs.iter().all(|&x| ys.iter().any(|&y| subset(&self.init[y], &self.init[x])))
    }
}

/// Whether `p` and `q` agree on the semantics `kind`.
pub fn trace_equal(lts: &Lts, p: usize, q: usize, kind: TraceKind) -> bool {
    let ctx = Ctx {
        lts,
        init: (0..lts.len()).map(|s| lts.init(s)).collect(),
    };
    match kind {
        TraceKind::FT => ft_included(&ctx, p, q) && ft_included(&ctx, q, p),
        TraceKind::RT => {
            ctx.init[p] == ctx.init[q]
                && explore(vec![p], vec![q], |s, t, push| {
                    let labels = ctx.ready_labels(s);
                    if labels != ctx.ready_labels(t) {
                        return false;
                    }
                    for (a, r) in labels {
                        push(ctx.post(s, a, |x| *x == r), ctx.post(t, a, |x| *x == r));
                    }
                    true
                })
        }
        _ => explore(vec![p], vec![q], |s, t, push| {
            let local = match kind {
                TraceKind::T => true,
                TraceKind::CT => s.iter().any(|&x| ctx.init[x].is_empty()) == t.iter().any(|&y| ctx.init[y].is_empty()),
                TraceKind::R => {
                    let rs: BTreeSet<&Ready> = s.iter().map(|&x| &ctx.init[x]).collect();
                    let rt: BTreeSet<&Ready> = t.iter().map(|&y| &ctx.init[y]).collect();
                    rs == rt
                }
                TraceKind::F => ctx.dominated(s, t) && ctx.dominated(t, s),
                TraceKind::FT | TraceKind::RT => unreachable!("handled above"),
            };
            let acts = ctx.actions(s);
            if !local || acts != ctx.actions(t) {
                return false;
            }
            for a in acts {
                push(ctx.post(s, a, |_| true), ctx.post(t, a, |_| true));
            }
            true
        }),
    }
}

/// Possible-futures equivalence, given the trace class of every state.
pub fn futures_equal(lts: &Lts, class: &[u32], p: usize, q: usize) -> bool {
    let ctx = Ctx {
        lts,
        init: (0..lts.len()).map(|s| lts.init(s)).collect(),
    };
    explore(vec![p], vec![q], |s, t, push| {
        let cs: BTreeSet<u32> = s.iter().map(|&x| class[x]).collect();
        let ct: BTreeSet<u32> = t.iter().map(|&y| class[y]).collect();
        if cs != ct {
            return false;
        }
        for a in ctx.actions(s) {
            push(ctx.post(s, a, |_| true), ctx.post(t, a, |_| true));
        }
        true
    })
}

/// Every ready trace of `p` is dominated componentwise by a ready trace of
/// `q` with the same actions; this is inclusion of failure traces. Pairs are
/// `(S, T)`: `S` the states of `p` reached with one exact ready trace, `T`
/// all states of `q` reached with a dominated one.
fn ft_included(ctx: &Ctx<'_>, p: usize, q: usize) -> bool {
    if !subset(&ctx.init[q], &ctx.init[p]) {
        return false;
    }
    explore(vec![p], vec![q], |s, t, push| {
        for (a, r) in ctx.ready_labels(s) {
            let t2 = ctx.post(t, a, |x| subset(x, &r));
            if t2.is_empty() {
                return false;
            }
            push(ctx.post(s, a, |x| *x == r), t2);
        }
        true
    })
}

/// Breadth-first search over pairs; `visit` checks a pair and queues its
/// successors through the callback.
fn explore(p: Set, q: Set, mut visit: impl FnMut(&[usize], &[usize], &mut dyn FnMut(Set, Set)) -> bool) -> bool {
    let mut seen: HashSet<(Set, Set)> = HashSet::new();
    let mut queue: VecDeque<(Set, Set)> = VecDeque::new();
    seen.insert((p.clone(), q.clone()));
    queue.push_back((p, q));
    while let Some((s, t)) = queue.pop_front() {
        let mut next: Vec<(Set, Set)> = Vec::new();
        if !visit(&s, &t, &mut |a, b| next.push((a, b))) {
            return false;
        }
        for pair in next {
            if seen.insert(pair.clone()) {
                queue.push_back(pair);
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equiv::traces::{denotation, ready_traces, trace_table};
    use crate::gen::{sample_rng, TermGen};
    use crate::sos::OpRegistry;
    use crate::term::{Alphabet, Term};

    const KINDS: [TraceKind; 6] = [TraceKind::T, TraceKind::CT, TraceKind::F, TraceKind::R, TraceKind::FT, TraceKind::RT];

    #[test]
    fn agrees_with_the_denotations_on_samples() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let gen = TermGen::new(ab.name_actions(), 3);
        let reg = OpRegistry::new();
        let mut hits = [0usize; 6];
        for i in 0..400 {
            let mut rng = sample_rng(11, i);
            let (x, y) = (gen.sample(&mut rng), gen.sample(&mut rng));
            let a = ab.name_actions()[0];
            // mixes unrelated pairs with pairs that agree on coarser semantics
            let (p, q) = match i % 3 {
                0 => (x, y),
                1 => (Term::prefix(a, Term::sum(x.clone(), y.clone())), Term::sum(Term::prefix(a, x), Term::prefix(a, y))),
                _ => (Term::sum(x.clone(), y.clone()), Term::sum(x.clone(), Term::sum(y, Term::prefix(a, x)))),
            };
            let lts = Lts::build_joint(&[p.clone(), q.clone()], &reg).unwrap();
            let (rp, rq) = (lts.roots()[0], lts.roots()[1]);
            let (dp, dq) = (ready_traces(&lts, rp), ready_traces(&lts, rq));
            for k in KINDS {
                let expected = denotation(&dp, k) == denotation(&dq, k);
                assert_eq!(trace_equal(&lts, rp, rq, k), expected, "{k:?}: {p} vs {q}");
                hits[k as usize] += expected as usize;
            }
            let table = trace_table(&lts);
            let fp = crate::equiv::traces::possible_futures(&lts, &table, rp);
            let fq = crate::equiv::traces::possible_futures(&lts, &table, rq);
            assert_eq!(futures_equal(&lts, &table.class, rp, rq), fp == fq, "PF: {p} vs {q}");
        }
        // both outcomes occur for every kind
        assert!(hits.iter().all(|&h| h > 0 && h < 400), "{hits:?}");
    }
}
