use std::collections::{HashMap, VecDeque};

use crate::orientation::{EdgeState, PartialOrientation};
use crate::pattern::ConstraintSet;

/// Result of closing a partial orientation under within-copy forcing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Closure(PartialOrientation),
    Contradiction,
}

impl Propagation {
    pub fn closure(&self) -> Option<&PartialOrientation> {
        match self {
            Propagation::Closure(po) => Some(po),
            Propagation::Contradiction => None,
        }
    }

    pub fn is_contradiction(&self) -> bool {
        matches!(self, Propagation::Contradiction)
    }
}

/// Fixpoint of the within-copy forcing rule.
pub fn propagate(po: &PartialOrientation, cs: &ConstraintSet) -> Propagation {
    Propagator::new(cs).close(po)
}

/// Same closure, with copies first visited in the given order.
pub fn propagate_in_order(po: &PartialOrientation, cs: &ConstraintSet, order: &[usize]) -> Propagation {
    let mut p = Propagator::new(cs);
    let mut states = po.states().to_vec();
    let mut trail = Vec::new();
    if p.run(&mut states, order.iter().copied(), &mut trail) {
        Propagation::Closure(rebuild(states))
    } else {
        Propagation::Contradiction
    }
}

fn rebuild(states: Vec<EdgeState>) -> PartialOrientation {
    let mut po = PartialOrientation::unset(states.len());
    for (e, s) in states.into_iter().enumerate() {
        po.set(e, s);
    }
    po
}

/// What the allowed completions of one copy look like given its set edges.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LocalSummary {
    /// Bits that are 1 in some allowed completion.
    pub ones: u32,
    /// Bits that are 0 in some allowed completion.
    pub zeros: u32,
    pub any: bool,
    /// Every completion is allowed; the copy no longer constrains anything.
    pub all: bool,
}

/// Reusable propagation engine over one constraint set.
///
/// Optionally restricted to copies whose vertices are all at most a bound,
/// which is the prefix graph used when building certificates.
pub struct Propagator<'a> {
    cs: &'a ConstraintSet,
    allowed: Vec<Vec<u32>>,
    cache: HashMap<(u32, u32, u32), LocalSummary>,
    in_queue: Vec<bool>,
    max_vertex: usize,
}

impl<'a> Propagator<'a> {
    pub fn new(cs: &'a ConstraintSet) -> Self {
        let allowed = cs
            .templates()
            .iter()
            .map(|t| (0..t.forbidden.universe() as u32).filter(|&m| !t.forbidden.contains(m)).collect())
            .collect();
        Propagator {
            cs,
            allowed,
            cache: HashMap::new(),
            in_queue: vec![false; cs.len()],
            max_vertex: usize::MAX,
        }
    }

    /// Only copies inside the first `k + 1` vertices take part.
    pub fn restrict_to_prefix(&mut self, k: usize) {
        self.max_vertex = k;
    }

    pub fn constraints(&self) -> &'a ConstraintSet {
        self.cs
    }

    #[inline]
    pub fn copy_active(&self, c: usize) -> bool {
        self.cs.copy(c).max_vertex <= self.max_vertex
    }

    pub fn close(&mut self, po: &PartialOrientation) -> Propagation {
        let mut states = po.states().to_vec();
        let mut trail = Vec::new();
        if self.run(&mut states, 0..self.cs.len(), &mut trail) {
            Propagation::Closure(rebuild(states))
        } else {
            Propagation::Contradiction
        }
    }

    pub(crate) fn summary(&mut self, c: usize, states: &[EdgeState]) -> LocalSummary {
        let copy = self.cs.copy(c);
        let (set, val) = copy.local_state(states);
        let key = (copy.template as u32, set, val);
        if let Some(s) = self.cache.get(&key) {
            return *s;
        }
        let tmpl = &self.cs.templates()[copy.template];
        let full = tmpl.full_mask();
        let unset = full & !set;
        let free_bits = unset.count_ones();
        let allowed = &self.allowed[copy.template];
        let (mut ones, mut zeros, mut count) = (0u32, 0u32, 0u64);
        if (1u64 << free_bits) <= allowed.len() as u64 {
            // enumerate completions of the unset bits
            let mut c = 0u32;
            loop {
                let m = val | c;
                if !tmpl.forbidden.contains(m) {
                    ones |= m;
                    zeros |= !m & full;
                    count += 1;
                }
                if c == unset {
                    break;
                }
                c = (c.wrapping_sub(unset)) & unset;
            }
        } else {
            for &m in allowed {
                if m & set == val {
                    ones |= m;
                    zeros |= !m & full;
                    count += 1;
                }
            }
        }
        let s = LocalSummary { ones, zeros, any: count > 0, all: count == 1u64 << free_bits };
        self.cache.insert(key, s);
        s
    }

    /// Propagates from the seeded copies; newly set edges are pushed on
    /// `trail`. Returns false on contradiction (the trail is still valid
    /// for undoing).
    pub(crate) fn run(
        &mut self,
        states: &mut [EdgeState],
        seeds: impl IntoIterator<Item = usize>,
        trail: &mut Vec<usize>,
    ) -> bool {
        let mut queue = VecDeque::new();
        for c in seeds {
            if self.copy_active(c) && !self.in_queue[c] {
                self.in_queue[c] = true;
                queue.push_back(c);
            }
        }
        let mut ok = true;
        while let Some(c) = queue.pop_front() {
            self.in_queue[c] = false;
            if !ok {
                continue;
            }
            let s = self.summary(c, states);
            if !s.any {
                ok = false;
                continue;
            }
            if s.all {
                continue;
            }
            let copy = self.cs.copy(c);
            for (i, &e) in copy.edges.iter().enumerate() {
                if states[e] != EdgeState::Unset {
                    continue;
                }
                let can1 = s.ones >> i & 1 == 1;
                let can0 = s.zeros >> i & 1 == 1;
                if can1 == can0 {
                    continue;
                }
                states[e] = copy.host_state(i, can1);
                trail.push(e);
                for &d in self.cs.incident(e) {
                    let d = d as usize;
                    if d != c && self.copy_active(d) && !self.in_queue[d] {
                        self.in_queue[d] = true;
                        queue.push_back(d);
                    }
                }
            }
        }
        ok
    }

    /// Propagates after setting `e`; returns false on contradiction.
    pub(crate) fn assign(
        &mut self,
        states: &mut [EdgeState],
        e: usize,
        s: EdgeState,
        trail: &mut Vec<usize>,
    ) -> bool {
        states[e] = s;
        trail.push(e);
        let cs = self.cs;
        self.run(states, cs.incident(e).iter().map(|&c| c as usize), trail)
    }
}

pub(crate) fn undo(states: &mut [EdgeState], trail: &mut Vec<usize>, to: usize) {
    for e in trail.drain(to..) {
        states[e] = EdgeState::Unset;
    }
}
