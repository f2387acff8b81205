use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use super::BigCount;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default cap on memoised subgraphs.
pub const DEFAULT_ACYCLIC_BUDGET: usize = 2_000_000;

const MAX_VERTICES: usize = 128;

pub fn count_acyclic(g: &Graph) -> Result<BigCount> {
    count_acyclic_with_budget(g, DEFAULT_ACYCLIC_BUDGET)
}

/// Number of acyclic orientations, `|chi_G(-1)|`, by deletion-contraction:
/// `a(G) = a(G - e) + a(G / e)` with parallel edges merged.
pub fn count_acyclic_with_budget(g: &Graph, budget: usize) -> Result<BigCount> {
    if g.n() > MAX_VERTICES {
        return Err(Error::TooLargeForExact { n: g.n(), limit: MAX_VERTICES });
    }
    let adj: Vec<u128> =
        (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u128, |m, &w| m | 1 << w)).collect();
    let mut dc = DeletionContraction { memo: HashMap::new(), budget };
    Ok(BigCount(dc.count(adj)?))
}

struct DeletionContraction {
    memo: HashMap<Vec<u128>, BigUint>,
    budget: usize,
}

/// Drops isolated vertices and relabels the rest `0..k` in order.
fn compact(adj: &[u128]) -> Vec<u128> {
    let keep: Vec<usize> = (0..adj.len()).filter(|&v| adj[v] != 0).collect();
    if keep.len() == adj.len() {
        return adj.to_vec();
    }
    let mut map = [u8::MAX; 128];
    for (i, &v) in keep.iter().enumerate() {
        map[v] = i as u8;
    }
    keep.iter()
        .map(|&v| {
            let mut row = adj[v];
            let mut out = 0u128;
            while row != 0 {
                let w = row.trailing_zeros() as usize;
                row &= row - 1;
                out |= 1 << map[w];
            }
            out
        })
        .collect()
}

fn remove_vertex(adj: &mut [u128], v: usize) {
    let mut row = adj[v];
    while row != 0 {
        let w = row.trailing_zeros() as usize;
        row &= row - 1;
        adj[w] &= !(1 << v);
    }
    adj[v] = 0;
}

fn component_of(adj: &[u128], start: usize) -> u128 {
    let mut seen = 1u128 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & !seen;
        seen |= new;
        frontier |= new;
    }
    seen
}

fn factorial(k: usize) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |acc, i| acc * i)
}

impl DeletionContraction {
    fn count(&mut self, adj: Vec<u128>) -> Result<BigUint> {
        let mut adj = compact(&adj);
        let mut factor = BigUint::one();
        // a pendant vertex doubles the count of the rest
        loop {
            let Some(v) = (0..adj.len()).find(|&v| adj[v].count_ones() == 1) else {
                break;
            };
            remove_vertex(&mut adj, v);
            factor <<= 1;
        }
        let adj = compact(&adj);
        let k = adj.len();
        if k == 0 {
            return Ok(factor);
        }
        let edges2: u32 = adj.iter().map(|r| r.count_ones()).sum();
        if edges2 as usize == k * (k - 1) {
            return Ok(factor * factorial(k));
        }
        let comp = component_of(&adj, 0);
        if comp.count_ones() as usize != k {
            let (mut inside, mut outside) = (adj.clone(), adj.clone());
            for v in 0..k {
                if comp >> v & 1 == 1 {
                    outside[v] = 0;
                } else {
                    inside[v] = 0;
                }
            }
            return Ok(factor * self.count(inside)? * self.count(outside)?);
        }
        if let Some(c) = self.memo.get(&adj) {
            return Ok(factor * c);
        }
        if self.memo.len() >= self.budget {
            return Err(Error::Infeasible(format!(
                "acyclic counter exceeded {} memoised subgraphs",
                self.budget
            )));
        }
        // edge at a minimum-degree vertex
        let u = (0..k).min_by_key(|&v| adj[v].count_ones()).expect("nonempty");
        let v = adj[u].trailing_zeros() as usize;
        let mut deleted = adj.clone();
        deleted[u] &= !(1 << v);
        deleted[v] &= !(1 << u);
        let mut contracted = adj.clone();
        let merged = (adj[u] | adj[v]) & !(1 << u | 1 << v);
        remove_vertex(&mut contracted, v);
        remove_vertex(&mut contracted, u);
        contracted[u] = merged;
        let mut rest = merged;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            contracted[w] |= 1 << u;
        }
        let c = self.count(deleted)? + self.count(contracted)?;
        self.memo.insert(adj, c.clone());
        Ok(factor * c)
    }
}
