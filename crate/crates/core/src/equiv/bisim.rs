//! Strong bisimilarity by signature-based partition refinement.

use std::collections::HashMap;

use crate::sos::Lts;
use crate::term::Action;

/// Block numbers of the coarsest bisimulation of an arbitrary finite
/// transition relation. Blocks are numbered in order of first occurrence,
/// so the result is deterministic.
pub fn refine(succ: &[Vec<(Action, usize)>]) -> Vec<u32> {
    let n = succ.len();
    let mut block = vec![0u32; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: HashMap<(u32, Vec<(Action, u32)>), u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig: Vec<(Action, u32)> = succ[s].iter().map(|&(a, t)| (a, block[t])).collect();
            sig.sort_unstable();
            sig.dedup();
            let fresh = ids.len() as u32;
            next.push(*ids.entry((block[s], sig)).or_insert(fresh));
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return block;
        }
        count = new_count;
    }
}

/// The same partition for an acyclic system, in one bottom-up pass: the class
/// of a state is determined by the classes of its successors.
pub fn refine_acyclic(lts: &Lts) -> Vec<u32> {
    let mut block = vec![u32::MAX; lts.len()];
    let mut ids: HashMap<Vec<(Action, u32)>, u32> = HashMap::new();
    for s in lts.bottom_up() {
        let mut sig: Vec<(Action, u32)> = lts.succ(s).iter().map(|&(a, t)| (a, block[t])).collect();
        sig.sort_unstable();
        sig.dedup();
        let fresh = ids.len() as u32;
        block[s] = *ids.entry(sig).or_insert(fresh);
    }
    block
}

/// A move of `from` that `other` cannot match up to the given partition.
pub fn unmatched_move(succ: &[Vec<(Action, usize)>], block: &[u32], from: usize, other: usize) -> Option<(Action, usize)> {
    succ[from]
        .iter()
        .find(|&&(a, t)| !succ[other].iter().any(|&(b, u)| a == b && block[t] == block[u]))
        .copied()
}
