use serde::Serialize;

use super::Digraph;
use crate::error::{Error, Result};

/// Vertex-disjoint directed paths covering every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathPartition {
    pub paths: Vec<Vec<usize>>,
    /// An independent set (in the underlying graph) with one vertex per
    /// path: the end vertices at which the last reduction attempt failed.
    /// It certifies `paths.len() <= alpha`.
    pub independent_ends: Vec<usize>,
}

/// Path partition into at most alpha(G) paths.
///
/// Starts from singleton paths and repeatedly applies the reduction step of
/// the inductive Gallai-Milgram proof: given a partition whose end vertices
/// are not independent, produce one with a path fewer whose end set is a
/// subset of the old one. When a reduction fails, some partition of a
/// sub-digraph has independent ends of the same count, which is returned as
/// the witness.
pub fn gallai_milgram_partition(d: &Digraph) -> PathPartition {
    let mut paths: Vec<Vec<usize>> = (0..d.n()).map(|v| vec![v]).collect();
    loop {
        match reduce(d, &mut paths) {
            Ok(()) => continue,
            Err(mut ends) => {
                ends.sort_unstable();
                return PathPartition { paths, independent_ends: ends };
            }
        }
    }
}

/// One reduction step. On failure `paths` is left untouched and the
/// independent end set is returned.
fn reduce(d: &Digraph, paths: &mut Vec<Vec<usize>>) -> Result<(), Vec<usize>> {
    let ends: Vec<usize> = paths.iter().map(|p| *p.last().expect("paths are nonempty")).collect();
    let found = (0..ends.len()).find_map(|i| {
        (0..ends.len()).find(|&j| i != j && d.has_arc(ends[i], ends[j])).map(|j| (i, j))
    });
    let Some((i, j)) = found else {
        return Err(ends);
    };
    let (vi, vj) = (ends[i], ends[j]);
    if paths[j].len() == 1 {
        paths[i].push(vj);
        paths.remove(j);
        return Ok(());
    }
    let removed = paths[j].pop().expect("length >= 2");
    let pred = *paths[j].last().expect("length >= 1");
    if let Err(e) = reduce(d, paths) {
        // restore: the failed call left the shortened partition intact
        let k = paths.iter().position(|p| p.last() == Some(&pred)).expect("pred is an end");
        paths[k].push(removed);
        return Err(e);
    }
    // one of pred, vi ends a path; both have an arc into `removed`
    let k = paths
        .iter()
        .position(|p| p.last() == Some(&pred))
        .or_else(|| paths.iter().position(|p| p.last() == Some(&vi)))
        .expect("reduced partition keeps pred or vi as an end");
    paths[k].push(removed);
    Ok(())
}

fn check_tournament(t: &Digraph) -> Result<()> {
    if t.is_tournament() {
        Ok(())
    } else {
        Err(Error::NotATournament(format!("{} vertices, {} arcs", t.n(), t.arcs().len())))
    }
}

/// Hamiltonian path of a tournament by insertion.
pub fn hamiltonian_path_tournament(t: &Digraph) -> Result<Vec<usize>> {
    check_tournament(t)?;
    let mut path: Vec<usize> = Vec::with_capacity(t.n());
    for v in 0..t.n() {
        // first position whose occupant v beats; everything before it beats v
        let pos = path.iter().position(|&w| t.has_arc(v, w)).unwrap_or(path.len());
        path.insert(pos, v);
    }
    Ok(path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TournamentClass {
    pub is_transitive: bool,
    pub is_strongly_connected: bool,
}

pub fn classify_tournament(t: &Digraph) -> Result<TournamentClass> {
    check_tournament(t)?;
    let mut outdeg: Vec<usize> = (0..t.n()).map(|v| t.out_degree(v)).collect();
    outdeg.sort_unstable();
    let is_transitive = outdeg.iter().enumerate().all(|(i, &d)| i == d);
    let is_strongly_connected = t.strongly_connected_components().len() == 1;
    Ok(TournamentClass { is_transitive, is_strongly_connected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{independence_number, IndependenceMode};
    use rand::Rng;

    fn check_partition(d: &Digraph, part: &PathPartition) {
        let mut seen = vec![false; d.n()];
        for p in &part.paths {
            assert!(!p.is_empty());
            for w in p.windows(2) {
                assert!(d.has_arc(w[0], w[1]), "{:?} not an arc", w);
            }
            for &v in p {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(part.independent_ends.len(), part.paths.len());
        for (i, &u) in part.independent_ends.iter().enumerate() {
            for &v in &part.independent_ends[i + 1..] {
                assert!(!d.has_arc(u, v) && !d.has_arc(v, u));
            }
        }
    }

    fn tournament_from_bits(n: usize, bits: u64) -> Digraph {
        let mut arcs = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                arcs.push(if bits >> k & 1 == 1 { (i, j) } else { (j, i) });
                k += 1;
            }
        }
        Digraph::from_arcs(n, arcs).unwrap()
    }

    #[test]
    fn partition_examples() {
        let t = Digraph::transitive_tournament(5);
        let part = gallai_milgram_partition(&t);
        check_partition(&t, &part);
        assert_eq!(part.paths, vec![vec![0, 1, 2, 3, 4]]);

        let e = Digraph::empty(4);
        let part = gallai_milgram_partition(&e);
        check_partition(&e, &part);
        assert_eq!(part.paths.len(), 4);

        let c = Digraph::directed_cycle(3);
        let part = gallai_milgram_partition(&c);
        check_partition(&c, &part);
        assert_eq!(part.paths.len(), 1);
        assert_eq!(part.paths[0].len(), 3);
    }

    #[test]
    fn partition_never_exceeds_alpha() {
        let mut r = crate::rng::stream(21, &[]);
        for _ in 0..300 {
            let n = r.gen_range(1..16);
            let p = r.gen_range(0.05..0.8);
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if r.gen_bool(p) {
                        arcs.push(if r.gen_bool(0.5) { (u, v) } else { (v, u) });
                    }
                }
            }
            let d = Digraph::from_arcs(n, arcs).unwrap();
            let part = gallai_milgram_partition(&d);
            check_partition(&d, &part);
            let alpha = independence_number(&d.underlying().unwrap(), IndependenceMode::Exact)
                .unwrap()
                .alpha;
            assert!(part.paths.len() <= alpha);
        }
    }

    #[test]
    fn hamiltonian_paths_exhaustive() {
        for n in 1..=5usize {
            let pairs = n * (n - 1) / 2;
            for bits in 0..1u64 << pairs {
                let t = tournament_from_bits(n, bits);
                let path = hamiltonian_path_tournament(&t).unwrap();
                assert_eq!(path.len(), n);
                let mut sorted = path.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>());
                assert!(path.windows(2).all(|w| t.has_arc(w[0], w[1])));
            }
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let t = Digraph::transitive_tournament(4);
        assert_eq!(hamiltonian_path_tournament(&t).unwrap(), vec![0, 1, 2, 3]);
        let c = Digraph::directed_cycle(3);
        let p = hamiltonian_path_tournament(&c).unwrap();
        assert!(p.windows(2).all(|w| c.has_arc(w[0], w[1])));
        assert!(matches!(
            hamiltonian_path_tournament(&Digraph::empty(2)),
            Err(Error::NotATournament(_))
        ));
    }

    #[test]
    fn classification() {
        let tt = Digraph::transitive_tournament(3);
        assert_eq!(
            classify_tournament(&tt).unwrap(),
            TournamentClass { is_transitive: true, is_strongly_connected: false }
        );
        let c = Digraph::directed_cycle(3);
        assert_eq!(
            classify_tournament(&c).unwrap(),
            TournamentClass { is_transitive: false, is_strongly_connected: true }
        );
        // source 3 dominating a cyclic triangle
        let d = Digraph::from_arcs(4, [(0, 1), (1, 2), (2, 0), (3, 0), (3, 1), (3, 2)]).unwrap();
        assert_eq!(
            classify_tournament(&d).unwrap(),
            TournamentClass { is_transitive: false, is_strongly_connected: false }
        );
    }

    #[test]
    fn transitive_iff_no_cyclic_triangle_iff_acyclic() {
        let mut r = crate::rng::stream(4, &[]);
        let check = |t: &Digraph| {
            let n = t.n();
            let cls = classify_tournament(t).unwrap();
            let mut cyclic = false;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        cyclic |= t.has_arc(a, b) && t.has_arc(b, c) && t.has_arc(c, a);
                    }
                }
            }
            assert_eq!(cls.is_transitive, !cyclic);
            assert_eq!(cls.is_transitive, !t.has_cycle());
        };
        for n in 1..=4usize {
            for bits in 0..1u64 << (n * (n - 1) / 2) {
                check(&tournament_from_bits(n, bits));
            }
        }
        for _ in 0..500 {
            let n = r.gen_range(5..=7usize);
            check(&tournament_from_bits(n, r.gen()));
        }
    }
}
