//! Behavioural equivalences: the strong spectrum, weak and rooted weak
//! bisimilarity.
//!
//! Definitions fixed here:
//!
//! * B: strong bisimilarity.
//! * 2S: mutual 2-nested simulation, where a 2-nested simulation is a
//!   simulation contained in the converse of the simulation preorder.
//! * RS, CS, S: mutual ready, completed and plain simulation (see [`sim`]).
//! * PF: equality of possible-futures sets.
//! * RT, FT, R, F, CT, T: equality of decorated-trace denotations (see
//!   [`traces`]).
//! * WB, RWB: weak and rooted weak bisimilarity (see [`weak`]).

pub mod bisim;
pub mod decide;
pub mod separate;
pub mod sim;
pub mod traces;
pub mod weak;

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::sos::{Lts, OpRegistry};
use crate::term::{Action, Term};

pub use sim::SimVariant;
pub use traces::{Denotation, ReadyTrace, Trace, TraceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Semantics {
    B,
    S2,
    RS,
    CS,
    S,
    PF,
    RT,
    FT,
    R,
    F,
    CT,
    T,
    RWB,
    WB,
}

impl Semantics {
    pub const ALL: [Semantics; 14] = [
        Semantics::B,
        Semantics::S2,
        Semantics::RS,
        Semantics::CS,
        Semantics::S,
        Semantics::PF,
        Semantics::RT,
        Semantics::FT,
        Semantics::R,
        Semantics::F,
        Semantics::CT,
        Semantics::T,
        Semantics::RWB,
        Semantics::WB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::B => "B",
            Semantics::S2 => "2S",
            Semantics::RS => "RS",
            Semantics::CS => "CS",
            Semantics::S => "S",
            Semantics::PF => "PF",
            Semantics::RT => "RT",
            Semantics::FT => "FT",
            Semantics::R => "R",
            Semantics::F => "F",
            Semantics::CT => "CT",
            Semantics::T => "T",
            Semantics::RWB => "RWB",
            Semantics::WB => "WB",
        }
    }

    pub fn is_weak(self) -> bool {
        matches!(self, Semantics::WB | Semantics::RWB)
    }

    fn trace_kind(self) -> Option<TraceKind> {
        Some(match self {
            Semantics::RT => TraceKind::RT,
            Semantics::FT => TraceKind::FT,
            Semantics::R => TraceKind::R,
            Semantics::F => TraceKind::F,
            Semantics::CT => TraceKind::CT,
            Semantics::T => TraceKind::T,
            _ => return None,
        })
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Semantics {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Semantics> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        let sem = match key.as_str() {
            "b" | "bisim" | "bisimilarity" | "bisimulation" | "strong" => Semantics::B,
            "2s" | "s2" | "nested" | "2-nested" | "nested-sim" => Semantics::S2,
            "rs" | "ready-sim" | "ready-simulation" => Semantics::RS,
            "cs" | "completed-sim" | "completed-simulation" => Semantics::CS,
            "s" | "sim" | "simulation" => Semantics::S,
            "pf" | "futures" | "possible-futures" => Semantics::PF,
            "rt" | "ready-traces" => Semantics::RT,
            "ft" | "failure-traces" => Semantics::FT,
            "r" | "readiness" | "readies" => Semantics::R,
            "f" | "failures" => Semantics::F,
            "ct" | "completed-traces" => Semantics::CT,
            "t" | "traces" => Semantics::T,
            "rwb" | "rooted-weak" | "rooted-weak-bisim" => Semantics::RWB,
            "wb" | "weak" | "weak-bisim" => Semantics::WB,
            _ => return Err(Error::UnknownSemantics(s.to_string())),
        };
        Ok(sem)
    }
}

/// Inclusions of the spectrum, finer first. An equivalence on the left
/// implies the one on the right.
pub const ARROWS: [(Semantics, Semantics); 17] = [
    (Semantics::B, Semantics::S2),
    (Semantics::S2, Semantics::RS),
    (Semantics::S2, Semantics::PF),
    (Semantics::PF, Semantics::R),
    (Semantics::RS, Semantics::RT),
    (Semantics::RS, Semantics::CS),
    (Semantics::RT, Semantics::FT),
    (Semantics::RT, Semantics::R),
    (Semantics::FT, Semantics::F),
    (Semantics::R, Semantics::F),
    (Semantics::F, Semantics::CT),
    (Semantics::CT, Semantics::T),
    (Semantics::CS, Semantics::S),
    (Semantics::CS, Semantics::CT),
    (Semantics::S, Semantics::T),
    (Semantics::B, Semantics::RWB),
    (Semantics::RWB, Semantics::WB),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// An observation that one side has and the other lacks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub only_in: Side,
    pub observation: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub semantics: Semantics,
    pub equal: bool,
    pub witness: Option<Witness>,
}

/// Two processes in one shared transition system, with lazily computed
/// partitions and denotations.
pub struct EquivContext {
    lts: Lts,
    p: usize,
    q: usize,
    bisim: OnceCell<Vec<u32>>,
    ready: OnceCell<[BTreeSet<ReadyTrace>; 2]>,
    traces: OnceCell<traces::TraceTable>,
    futures: OnceCell<[BTreeSet<(Trace, u32)>; 2]>,
    weak: OnceCell<(weak::Saturation, Vec<u32>)>,
}

impl EquivContext {
    pub fn new(p: &Term, q: &Term, reg: &OpRegistry) -> Result<EquivContext> {
        let lts = Lts::build_joint(&[p.clone(), q.clone()], reg)?;
        let (p, q) = (lts.roots()[0], lts.roots()[1]);
        Ok(EquivContext {
            lts,
            p,
            q,
            bisim: OnceCell::new(),
            ready: OnceCell::new(),
            traces: OnceCell::new(),
            futures: OnceCell::new(),
            weak: OnceCell::new(),
        })
    }

    pub fn lts(&self) -> &Lts {
        &self.lts
    }

    fn bisim(&self) -> &[u32] {
        self.bisim.get_or_init(|| bisim::refine_acyclic(&self.lts))
    }

    fn ready(&self) -> &[BTreeSet<ReadyTrace>; 2] {
        self.ready
            .get_or_init(|| {
                let b = self.bisim();
                [
                    traces::ready_traces_modulo(&self.lts, b, self.p),
                    traces::ready_traces_modulo(&self.lts, b, self.q),
                ]
            })
    }

    fn trace_table(&self) -> &traces::TraceTable {
        self.traces.get_or_init(|| traces::trace_table(&self.lts))
    }

    fn futures(&self) -> &[BTreeSet<(Trace, u32)>; 2] {
        self.futures.get_or_init(|| {
            let t = self.trace_table();
            [
                traces::possible_futures(&self.lts, t, self.p),
                traces::possible_futures(&self.lts, t, self.q),
            ]
        })
    }

    fn weak(&self) -> &(weak::Saturation, Vec<u32>) {
        self.weak.get_or_init(|| {
            let sat = weak::weak_saturate(&self.lts);
            let wb = weak::weak_classes(&sat);
            (sat, wb)
        })
    }

    pub fn equal(&self, s: Semantics) -> bool {
        let (p, q) = (self.p, self.q);
        // bisimilarity is finer than every other semantics here
        if p == q || self.bisim()[p] == self.bisim()[q] {
            return true;
        }
        match s {
            Semantics::B => self.bisim()[p] == self.bisim()[q],
            Semantics::S2 => sim::Simulator::new(&self.lts).nested_equiv(p, q),
            Semantics::RS => sim::Simulator::new(&self.lts).equiv(SimVariant::Ready, p, q),
            Semantics::CS => sim::Simulator::new(&self.lts).equiv(SimVariant::Completed, p, q),
            Semantics::S => sim::Simulator::new(&self.lts).equiv(SimVariant::Plain, p, q),
            Semantics::PF => decide::futures_equal(&self.lts, &self.trace_table().class, p, q),
            Semantics::WB => {
                let wb = &self.weak().1;
                wb[p] == wb[q]
            }
            Semantics::RWB => {
                let (sat, wb) = self.weak();
                weak::rooted_unmatched(&self.lts, sat, wb, p, q).is_none()
                    && weak::rooted_unmatched(&self.lts, sat, wb, q, p).is_none()
            }
            _ => {
                let kind = s.trace_kind().expect("remaining semantics are trace-based");
                decide::trace_equal(&self.lts, p, q, kind)
            }
        }
    }

    pub fn matrix(&self) -> Vec<(Semantics, bool)> {
        Semantics::ALL.iter().map(|&s| (s, self.equal(s))).collect()
    }

    pub fn verdict(&self, s: Semantics) -> Verdict {
        let equal = self.equal(s);
        let witness = if equal { None } else { self.witness(s) };
        Verdict {
            semantics: s,
            equal,
            witness,
        }
    }

    fn move_json(&self, kind: &str, a: Action, target: usize) -> Value {
        json!({"kind": kind, "action": a.to_string(), "target": self.lts.state(target).to_string()})
    }

    fn sides(&self) -> [(Side, usize, usize); 2] {
        [(Side::Left, self.p, self.q), (Side::Right, self.q, self.p)]
    }

    fn witness(&self, s: Semantics) -> Option<Witness> {
        let lts = &self.lts;
        let found = |side: Side, observation: Value| Some(Witness { only_in: side, observation });
        match s {
            Semantics::B => {
                let block = self.bisim();
                for (side, a, b) in self.sides() {
                    if let Some((act, t)) = bisim::unmatched_move(lts.successors(), block, a, b) {
                        return found(side, self.move_json("move", act, t));
                    }
                }
                None
            }
            Semantics::RS | Semantics::CS | Semantics::S => {
                let v = match s {
                    Semantics::RS => SimVariant::Ready,
                    Semantics::CS => SimVariant::Completed,
                    _ => SimVariant::Plain,
                };
                let mut simr = sim::Simulator::new(lts);
                for (side, a, b) in self.sides() {
                    if simr.le(v, a, b) {
                        continue;
                    }
                    if let Some(k) = simr.moves_matched(v, a, b) {
                        let (act, t) = lts.succ(a)[k];
                        return found(side, self.move_json("unsimulated_move", act, t));
                    }
                    let init = |x: usize| -> Vec<String> { lts.init(x).iter().map(Action::to_string).collect() };
                    return found(side, json!({"kind": "initials", "initials": init(a), "other": init(b)}));
                }
                None
            }
            Semantics::S2 => {
                let mut simr = sim::Simulator::new(lts);
                for (side, a, b) in self.sides() {
                    if simr.nested_le(a, b) {
                        continue;
                    }
                    if !simr.le(SimVariant::Plain, b, a) {
                        // the other side has a move this side cannot simulate
                        let other = if side == Side::Left { Side::Right } else { Side::Left };
                        let k = simr.moves_matched(SimVariant::Plain, b, a)?;
                        let (act, t) = lts.succ(b)[k];
                        return found(other, self.move_json("unsimulated_move", act, t));
                    }
                    let k = simr.nested_unmatched(a, b)?;
                    let (act, t) = lts.succ(a)[k];
                    return found(side, self.move_json("unmatched_nested_move", act, t));
                }
                None
            }
            Semantics::PF => {
                let f = self.futures();
                let table = self.trace_table();
                for (side, (a, b)) in [(Side::Left, (&f[0], &f[1])), (Side::Right, (&f[1], &f[0]))] {
                    if let Some((tr, class)) = a.iter().filter(|x| !b.contains(x)).min_by_key(|x| x.0.len()) {
                        let state = table.class.iter().position(|c| c == class)?;
                        let future: Vec<Vec<String>> = table.sets[state]
                            .iter()
                            .map(|t| t.iter().map(Action::to_string).collect())
                            .collect();
                        let trace: Vec<String> = tr.iter().map(Action::to_string).collect();
                        return found(side, json!({"kind": "possible_future", "trace": trace, "future": future}));
                    }
                }
                None
            }
            Semantics::WB => {
                let (sat, wb) = self.weak();
                for (side, a, b) in self.sides() {
                    if let Some((act, t)) = bisim::unmatched_move(&sat.weak, wb, a, b) {
                        return found(side, self.move_json("weak_move", act, t));
                    }
                }
                None
            }
            Semantics::RWB => {
                let (sat, wb) = self.weak();
                for (side, a, b) in self.sides() {
                    if let Some((act, t)) = weak::rooted_unmatched(lts, sat, wb, a, b) {
                        return found(side, self.move_json("root_move", act, t));
                    }
                }
                None
            }
            _ => {
                let kind = s.trace_kind()?;
                let r = self.ready();
                let (dp, dq) = (traces::denotation(&r[0], kind), traces::denotation(&r[1], kind));
                let universe = lts.labels();
                if let Some(v) = traces::only_in(&dp, &dq, &universe) {
                    return found(Side::Left, v);
                }
                traces::only_in(&dq, &dp, &universe).and_then(|v| found(Side::Right, v))
            }
        }
    }
}

pub fn strong_bisim(p: &Term, q: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(Semantics::B))
}

/// `p` is simulated by `q` under the given variant.
pub fn simulation_preorder(p: &Term, q: &Term, variant: SimVariant, reg: &OpRegistry) -> Result<bool> {
    let cx = EquivContext::new(p, q, reg)?;
    Ok(sim::Simulator::new(&cx.lts).le(variant, cx.p, cx.q))
}

pub fn nested_simulation_2(p: &Term, q: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(Semantics::S2))
}

pub fn decorated_traces(p: &Term, kind: TraceKind, reg: &OpRegistry) -> Result<Denotation> {
    let lts = Lts::build(p, reg)?;
    Ok(traces::denotation(&traces::ready_traces(&lts, lts.root()), kind))
}

/// Possible futures of `p` with the trace sets spelled out.
pub fn possible_futures_set(p: &Term, reg: &OpRegistry) -> Result<BTreeSet<(Trace, BTreeSet<Trace>)>> {
    let lts = Lts::build(p, reg)?;
    let table = traces::trace_table(&lts);
    let pf = traces::possible_futures(&lts, &table, lts.root());
    Ok(pf
        .into_iter()
        .map(|(tr, class)| {
            let s = table.class.iter().position(|&c| c == class).expect("class of some state");
            (tr, (*table.sets[s]).clone())
        })
        .collect())
}

pub fn pf_equiv(p: &Term, q: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(Semantics::PF))
}

pub fn weak_bisim(p: &Term, q: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(Semantics::WB))
}

pub fn rooted_weak_bisim(p: &Term, q: &Term, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(Semantics::RWB))
}

pub fn equiv(p: &Term, q: &Term, s: Semantics, reg: &OpRegistry) -> Result<bool> {
    Ok(EquivContext::new(p, q, reg)?.equal(s))
}

pub fn verdict(p: &Term, q: &Term, s: Semantics, reg: &OpRegistry) -> Result<Verdict> {
    Ok(EquivContext::new(p, q, reg)?.verdict(s))
}

pub fn spectrum_matrix(p: &Term, q: &Term, reg: &OpRegistry) -> Result<Vec<(Semantics, bool)>> {
    Ok(EquivContext::new(p, q, reg)?.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term::Alphabet;

    fn t(s: &str) -> Term {
        parse_term(s, &Alphabet::new(["a", "b", "c"]).unwrap()).unwrap()
    }

    fn eq(p: &str, q: &str, s: Semantics) -> bool {
        equiv(&t(p), &t(q), s, &OpRegistry::new()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for s in Semantics::ALL {
            assert_eq!(s.name().parse::<Semantics>().unwrap(), s);
        }
        assert_eq!("bisim".parse::<Semantics>().unwrap(), Semantics::B);
        assert!("branching".parse::<Semantics>().is_err());
    }

    #[test]
    fn choice_distribution_matrix() {
        let m = spectrum_matrix(&t("a.(b.0 + c.0)"), &t("a.b.0 + a.c.0"), &OpRegistry::new()).unwrap();
        for (s, v) in m {
            let expected = matches!(s, Semantics::T | Semantics::CT);
            assert_eq!(v, expected, "{s}");
        }
    }

    #[test]
    fn idempotence_and_distribution() {
        assert!(eq("a.b.0 + a.b.0", "a.b.0", Semantics::B));
        assert!(!eq("a.(b.0 + c.0)", "a.b.0 + a.c.0", Semantics::B));
    }

    #[test]
    fn weak_examples() {
        assert!(eq("tau.a.0", "a.0", Semantics::WB));
        assert!(!eq("tau.a.0", "a.0", Semantics::RWB));
        assert!(eq("a.tau.b.0", "a.b.0", Semantics::RWB));
    }

    #[test]
    fn futures_of_a_prefix_and_a_distribution() {
        let a = Action::name("a");
        let pf = possible_futures_set(&t("a.0"), &OpRegistry::new()).unwrap();
        let expected: BTreeSet<(Trace, BTreeSet<Trace>)> = [
            (vec![], [vec![], vec![a]].into_iter().collect()),
            (vec![a], [vec![]].into_iter().collect()),
        ]
        .into_iter()
        .collect();
        assert_eq!(pf, expected);
        assert!(!eq("a.b.0 + a.c.0", "a.(b.0 + c.0)", Semantics::PF));
        assert!(eq("a.0 || b.a.0", "a.b.a.0 + b.(a.0 || a.0)", Semantics::PF));
    }

    #[test]
    fn witnesses_point_at_the_distinguishing_side() {
        let v = verdict(&t("a.(b.0 + c.0)"), &t("a.b.0 + a.c.0"), Semantics::F, &OpRegistry::new()).unwrap();
        assert!(!v.equal);
        let w = v.witness.unwrap();
        assert_eq!(w.only_in, Side::Right);
        assert_eq!(w.observation["kind"], "failure");
        let v = verdict(&t("a.0"), &t("b.0"), Semantics::B, &OpRegistry::new()).unwrap();
        assert_eq!(v.witness.unwrap().observation["action"], "a");
        let v = verdict(&t("a.0"), &t("a.0 + 0"), Semantics::RS, &OpRegistry::new()).unwrap();
        assert!(v.equal && v.witness.is_none());
    }

    #[test]
    fn verdict_json_shape() {
        let v = verdict(&t("a.0"), &t("b.0"), Semantics::RS, &OpRegistry::new()).unwrap();
        let j = serde_json::to_value(&v).unwrap();
        assert_eq!(j["semantics"], "RS");
        assert_eq!(j["equal"], false);
        assert!(j["witness"].is_object());
    }
}
