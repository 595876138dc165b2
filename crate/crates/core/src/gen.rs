//! Seeded random terms and exhaustive enumeration of small terms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::term::{Action, Term};

/// The generator for sample `index` under `seed`. Every sample owns an
/// independent stream, so results do not depend on how samples are scheduled.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Depth-bounded random closed terms.
#[derive(Clone, Debug)]
pub struct TermGen {
    pub actions: Vec<Action>,
    pub depth: usize,
    /// Allow parallel composition nodes.
    pub par: bool,
}

impl TermGen {
    pub fn new(actions: Vec<Action>, depth: usize) -> TermGen {
        assert!(!actions.is_empty(), "term generator needs at least one action");
        TermGen { actions, depth, par: true }
    }

    pub fn without_par(mut self) -> TermGen {
        self.par = false;
        self
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Term {
        self.at_depth(rng, self.depth)
    }

    fn at_depth<R: Rng>(&self, rng: &mut R, depth: usize) -> Term {
        if depth == 0 {
            return Term::nil();
        }
        match rng.gen_range(0..10) {
            0..=1 => Term::nil(),
            2..=5 => {
                let a = *self.actions.choose(rng).expect("nonempty actions");
                Term::prefix(a, self.at_depth(rng, depth - 1))
            }
            6..=8 => Term::sum(self.at_depth(rng, depth - 1), self.at_depth(rng, depth - 1)),
            _ if self.par => Term::par(self.at_depth(rng, depth - 1), self.at_depth(rng, depth - 1)),
            _ => Term::sum(self.at_depth(rng, depth - 1), self.at_depth(rng, depth - 1)),
        }
    }

    /// A term with exactly `size` operator symbols.
    pub fn sized<R: Rng>(&self, rng: &mut R, size: usize) -> Term {
        if size == 0 {
            return Term::nil();
        }
        if size == 1 || rng.gen_range(0..10) < 4 {
            let a = *self.actions.choose(rng).expect("nonempty actions");
            return Term::prefix(a, self.sized(rng, size - 1));
        }
        let rest = size - 1;
        let left = rng.gen_range(0..=rest);
        let l = self.sized(rng, left);
        let r = self.sized(rng, rest - left);
        if self.par && rng.gen_range(0..3) == 0 {
            Term::par(l, r)
        } else {
            Term::sum(l, r)
        }
    }
}

/// All closed terms of exactly the given size built from `0`, prefixes over
/// `actions`, `+` and (optionally) `||`. Raw syntax: no identification modulo AC.
pub fn enumerate_closed(actions: &[Action], max_size: usize, par: bool) -> Vec<Vec<Term>> {
    enumerate_terms(actions, &[Term::nil()], max_size, par)
}

/// Like [`enumerate_closed`], with the given size-0 leaves (for instance `0`
/// and some variables) in place of `0` alone.
pub fn enumerate_terms(actions: &[Action], leaves: &[Term], max_size: usize, par: bool) -> Vec<Vec<Term>> {
    let mut by_size: Vec<Vec<Term>> = vec![leaves.to_vec()];
    for n in 1..=max_size {
        let mut layer = Vec::new();
        for body in &by_size[n - 1] {
            for &a in actions {
                layer.push(Term::prefix(a, body.clone()));
            }
        }
        for i in 0..n {
            let j = n - 1 - i;
            for l in &by_size[i] {
                for r in &by_size[j] {
                    layer.push(Term::sum(l.clone(), r.clone()));
                    if par {
                        layer.push(Term::par(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size.push(layer);
    }
    by_size
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acts() -> Vec<Action> {
        vec![Action::name("a"), Action::name("b"), Action::Tau]
    }

    #[test]
    fn same_seed_same_terms() {
        let g = TermGen::new(acts(), 4);
        let a: Vec<Term> = (0..20).map(|i| g.sample(&mut sample_rng(7, i))).collect();
        let b: Vec<Term> = (0..20).map(|i| g.sample(&mut sample_rng(7, i))).collect();
        assert_eq!(a, b);
        let c: Vec<Term> = (0..20).map(|i| g.sample(&mut sample_rng(8, i))).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn sized_terms_have_the_requested_size() {
        let g = TermGen::new(acts(), 4);
        for i in 0..200 {
            let mut rng = sample_rng(1, i);
            let n = (i % 13) as usize;
            assert_eq!(g.sized(&mut rng, n).size(), n);
        }
    }

    #[test]
    fn depth_bounds_the_term() {
        let g = TermGen::new(acts(), 3).without_par();
        for i in 0..200 {
            let t = g.sample(&mut sample_rng(2, i));
            assert!(t.size() <= 7);
            assert!(t.is_par_free());
        }
    }

    #[test]
    fn enumeration_counts() {
        // T(n) = T(n-1) + sum over i+j=n-1 of T(i)T(j), with T(0) = 1
        let layers = enumerate_closed(&[Action::name("a")], 3, false);
        let counts: Vec<usize> = layers.iter().map(Vec::len).collect();
        assert_eq!(counts, [1, 2, 6, 22]);
        let all = enumerate_closed(&[Action::name("a")], 1, true);
        assert_eq!(all[1].len(), 3);
    }
}
