use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};

/// Largest vertex count accepted by the exact solver.
pub const EXACT_LIMIT: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndependenceMode {
    Exact,
    /// Min-degree greedy. The result is only a lower bound on alpha.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Independence {
    pub alpha: usize,
    pub witness: Vec<usize>,
    /// False for the greedy bound.
    pub exact: bool,
}

pub fn independence_number(g: &Graph, mode: IndependenceMode) -> Result<Independence> {
    match mode {
        IndependenceMode::Exact => {
            if g.n() > EXACT_LIMIT {
                return Err(Error::TooLargeForExact { n: g.n(), limit: EXACT_LIMIT });
            }
            let witness = MisSolver::new(g).solve();
            Ok(Independence { alpha: witness.len(), witness, exact: true })
        }
        IndependenceMode::Greedy => {
            let witness = greedy(g);
            Ok(Independence { alpha: witness.len(), witness, exact: false })
        }
    }
}

fn greedy(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut out = Vec::new();
    loop {
        let Some(v) = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (deg[v], v)) else {
            break;
        };
        out.push(v);
        let mut gone = vec![v];
        gone.extend(g.neighbors(v).iter().copied().filter(|&w| alive[w]));
        for &x in &gone {
            alive[x] = false;
        }
        for &x in &gone {
            for &y in g.neighbors(x) {
                if alive[y] {
                    deg[y] -= 1;
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// Branch and bound over `u128` vertex masks.
///
/// Bound: a greedy clique cover of the candidate set; an independent set
/// meets each clique at most once.
struct MisSolver {
    adj: Vec<u128>,
    best: u128,
    best_len: u32,
}

impl MisSolver {
    fn new(g: &Graph) -> Self {
        let adj = (0..g.n())
            .map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w))
            .collect();
        MisSolver { adj, best: 0, best_len: 0 }
    }

    fn solve(mut self) -> Vec<usize> {
        let all = if self.adj.len() == 128 { u128::MAX } else { (1u128 << self.adj.len()) - 1 };
        self.search(all, 0);
        (0..self.adj.len()).filter(|&v| self.best >> v & 1 == 1).collect()
    }

    fn search(&mut self, mut cand: u128, mut chosen: u128) {
        // vertices of candidate-degree <= 1 can always be taken
        loop {
            let mut took = false;
            let mut rest = cand;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if cand >> v & 1 == 1 && (self.adj[v] & cand).count_ones() <= 1 {
                    chosen |= 1 << v;
                    cand &= !(self.adj[v] | 1 << v);
                    took = true;
                }
            }
            if !took {
                break;
            }
        }
        let have = chosen.count_ones();
        if cand == 0 {
            if have > self.best_len {
                self.best_len = have;
                self.best = chosen;
            }
            return;
        }
        if have + self.clique_cover(cand) <= self.best_len {
            return;
        }
        // branch on a maximum-degree candidate (lowest label on ties)
        let mut v = 0;
        let mut best_deg = 0;
        let mut rest = cand;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[x] & cand).count_ones();
            if d > best_deg {
                best_deg = d;
                v = x;
            }
        }
        self.search(cand & !(self.adj[v] | 1 << v), chosen | 1 << v);
        self.search(cand & !(1 << v), chosen);
    }

    fn clique_cover(&self, mut cand: u128) -> u32 {
        let mut cliques = 0;
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            let mut clique_cands = self.adj[v] & cand;
            cand &= !(1 << v);
            while clique_cands != 0 {
                let w = clique_cands.trailing_zeros() as usize;
                cand &= !(1 << w);
                clique_cands &= self.adj[w];
            }
            cliques += 1;
        }
        cliques
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn brute_alpha(g: &Graph) -> usize {
        let n = g.n();
        let adj: Vec<u32> = (0..n)
            .map(|v| g.neighbors(v).iter().fold(0, |m, &w| m | 1 << w))
            .collect();
        (0u32..1 << n)
            .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0))
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn named_examples() {
        let exact = |g: &Graph| independence_number(g, IndependenceMode::Exact).unwrap().alpha;
        assert_eq!(exact(&Graph::cycle(5)), 2);
        assert_eq!(exact(&Graph::complete(7)), 1);
        assert_eq!(exact(&Graph::empty(6)), 6);
        assert_eq!(exact(&Graph::empty(0)), 0);
        // brute force over all 2^10 subsets gives 4
        assert_eq!(brute_alpha(&Graph::petersen()), 4);
        assert_eq!(exact(&Graph::petersen()), 4);
    }

    #[test]
    fn matches_brute_force() {
        let mut r = crate::rng::stream(11, &[]);
        for _ in 0..300 {
            let n = r.gen_range(1..15);
            let p = r.gen_range(0.05..0.9);
            let g = Graph::gnp(n, p, r.gen()).unwrap();
            let res = independence_number(&g, IndependenceMode::Exact).unwrap();
            assert!(g.is_independent(&res.witness));
            assert_eq!(res.alpha, brute_alpha(&g));
            let gr = independence_number(&g, IndependenceMode::Greedy).unwrap();
            assert!(g.is_independent(&gr.witness) && !gr.exact && gr.alpha <= res.alpha);
        }
    }

    #[test]
    fn size_limit_is_explicit() {
        let g = Graph::empty(129);
        assert!(matches!(
            independence_number(&g, IndependenceMode::Exact),
            Err(Error::TooLargeForExact { n: 129, .. })
        ));
        assert_eq!(independence_number(&g, IndependenceMode::Greedy).unwrap().alpha, 129);
        let full = Graph::gnp(128, 0.5, 3).unwrap();
        let res = independence_number(&full, IndependenceMode::Exact).unwrap();
        assert!(full.is_independent(&res.witness));
    }
}
