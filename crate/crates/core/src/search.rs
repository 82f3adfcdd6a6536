//! Backtracking search for natural transformations between finite presheaves.
//!
//! Source elements are visited by increasing object degree. Assigning `a ↦ x`
//! at `c` immediately forces `A(f)(a) ↦ X(f)(x)` for every `f` into `c`;
//! because the action is functorial this single pass enforces naturality.

use crate::presheaf::{same_psh, PresheafMap, Psh};
use crate::site::ObjId;
use std::ops::ControlFlow;

const UNSET: usize = usize::MAX;

/// How an enumeration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Every solution was visited.
    Complete,
    /// The callback asked to stop.
    Stopped,
    /// The node budget ran out.
    Exhausted,
}

/// Result of looking for a single map.
#[derive(Debug, Clone)]
pub enum Found {
    Map(PresheafMap),
    NoMap,
    Exhausted,
}

impl Found {
    pub fn map(self) -> Option<PresheafMap> {
        match self {
            Found::Map(m) => Some(m),
            _ => None,
        }
    }
}

type Allowed<'a> = Box<dyn Fn(ObjId, usize, usize) -> bool + Send + Sync + 'a>;

/// A configurable search for maps `source → target`.
pub struct MapSearch<'a> {
    source: Psh,
    target: Psh,
    fixed: Vec<(ObjId, usize, usize)>,
    /// `p: target → Y` and required values `b[c][a]` of `p ∘ h`.
    fiber: Option<(PresheafMap, Vec<Vec<usize>>)>,
    injective: bool,
    allowed: Option<Allowed<'a>>,
    budget: u64,
}

impl<'a> MapSearch<'a> {
    pub fn new(source: &Psh, target: &Psh) -> Self {
        MapSearch {
            source: source.clone(),
            target: target.clone(),
            fixed: Vec::new(),
            fiber: None,
            injective: false,
            allowed: None,
            budget: u64::MAX,
        }
    }

    /// Requires `h(a) = x` at `c`.
    pub fn fix(mut self, c: ObjId, a: usize, x: usize) -> Self {
        self.fixed.push((c, a, x));
        self
    }

    /// Requires `h ∘ i = v` for maps `i: S → source`, `v: S → target`.
    pub fn fix_along(mut self, i: &PresheafMap, v: &PresheafMap) -> Self {
        debug_assert!(same_psh(i.target(), &self.source) && same_psh(v.target(), &self.target));
        for c in self.source.site().objects() {
            for s in 0..i.source().size(c) {
                self.fixed.push((c, i.apply(c, s), v.apply(c, s)));
            }
        }
        self
    }

    /// Requires `p ∘ h = b` for `p: target → Y`, `b: source → Y`.
    pub fn over(mut self, p: &PresheafMap, b: &PresheafMap) -> Self {
        debug_assert!(same_psh(p.source(), &self.target) && same_psh(b.source(), &self.source));
        self.fiber = Some((p.clone(), b.components().to_vec()));
        self
    }

    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Restricts values: `h(a) = x` at `c` only if `pred(c, a, x)`.
    pub fn allowed(mut self, pred: impl Fn(ObjId, usize, usize) -> bool + Send + Sync + 'a) -> Self {
        self.allowed = Some(Box::new(pred));
        self
    }

    /// Caps the number of tentative assignments.
    pub fn budget(mut self, nodes: u64) -> Self {
        self.budget = nodes;
        self
    }

    /// Visits every solution as raw components.
    pub fn for_each(&self, mut visit: impl FnMut(&[Vec<usize>]) -> ControlFlow<()>) -> Outcome {
        let mut st = State::new(self);
        for &(c, a, x) in &self.fixed {
            if !st.propagate(c, a, x) {
                return Outcome::Complete;
            }
        }
        let order = self.source.elements_by_degree();
        st.run(&order, 0, &mut visit)
    }

    /// The first solution in search order.
    pub fn first(&self) -> Found {
        let mut out = None;
        let r = self.for_each(|h| {
            out = Some(h.to_vec());
            ControlFlow::Break(())
        });
        match (out, r) {
            (Some(h), _) => Found::Map(PresheafMap::from_parts(self.source.clone(), self.target.clone(), h)),
            (None, Outcome::Exhausted) => Found::Exhausted,
            (None, _) => Found::NoMap,
        }
    }

    /// All solutions, or `None` if the budget ran out.
    pub fn all(&self) -> Option<Vec<PresheafMap>> {
        let mut out = Vec::new();
        let r = self.for_each(|h| {
            out.push(PresheafMap::from_parts(self.source.clone(), self.target.clone(), h.to_vec()));
            ControlFlow::Continue(())
        });
        (r == Outcome::Complete).then_some(out)
    }

    /// Number of solutions, or `None` if the budget ran out.
    pub fn count(&self) -> Option<u64> {
        let mut n = 0u64;
        let r = self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        (r == Outcome::Complete).then_some(n)
    }
}

struct State<'s, 'a> {
    cfg: &'s MapSearch<'a>,
    h: Vec<Vec<usize>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(ObjId, usize)>,
    /// `fiber_lists[c][y]` = elements of the target over `y`.
    fiber_lists: Vec<Vec<Vec<usize>>>,
    nodes: u64,
}

impl<'s, 'a> State<'s, 'a> {
    fn new(cfg: &'s MapSearch<'a>) -> Self {
        let site = cfg.source.site();
        let h = site.objects().map(|c| vec![UNSET; cfg.source.size(c)]).collect();
        let used = if cfg.injective {
            site.objects().map(|c| vec![false; cfg.target.size(c)]).collect()
        } else {
            Vec::new()
        };
        let fiber_lists = match &cfg.fiber {
            Some((p, _)) => site
                .objects()
                .map(|c| {
                    let mut l = vec![Vec::new(); p.target().size(c)];
                    for x in 0..cfg.target.size(c) {
                        l[p.apply(c, x)].push(x);
                    }
                    l
                })
                .collect(),
            None => Vec::new(),
        };
        State {
            cfg,
            h,
            used,
            trail: Vec::new(),
            fiber_lists,
            nodes: 0,
        }
    }

    fn assign(&mut self, c: ObjId, a: usize, x: usize) -> bool {
        let cur = self.h[c][a];
        if cur != UNSET {
            return cur == x;
        }
        if let Some((p, b)) = &self.cfg.fiber {
            if p.apply(c, x) != b[c][a] {
                return false;
            }
        }
        if let Some(pred) = &self.cfg.allowed {
            if !pred(c, a, x) {
                return false;
            }
        }
        if self.cfg.injective {
            if self.used[c][x] {
                return false;
            }
            self.used[c][x] = true;
        }
        self.h[c][a] = x;
        self.trail.push((c, a));
        true
    }

    fn propagate(&mut self, c: ObjId, a: usize, x: usize) -> bool {
        let site = self.cfg.source.site();
        if x >= self.cfg.target.size(c) {
            return false;
        }
        if !self.assign(c, a, x) {
            return false;
        }
        for &f in site.morphisms_into(c) {
            let d = site.source(f);
            let a2 = self.cfg.source.act(f, a);
            let x2 = self.cfg.target.act(f, x);
            if !self.assign(d, a2, x2) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (c, a) = self.trail.pop().expect("trail");
            if self.cfg.injective {
                self.used[c][self.h[c][a]] = false;
            }
            self.h[c][a] = UNSET;
        }
    }

    fn run(
        &mut self,
        order: &[(ObjId, usize)],
        mut pos: usize,
        visit: &mut dyn FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    ) -> Outcome {
        while pos < order.len() && self.h[order[pos].0][order[pos].1] != UNSET {
            pos += 1;
        }
        if pos == order.len() {
            return match visit(&self.h) {
                ControlFlow::Continue(()) => Outcome::Complete,
                ControlFlow::Break(()) => Outcome::Stopped,
            };
        }
        let (c, a) = order[pos];
        let candidates: Vec<usize> = match &self.cfg.fiber {
            Some((_, b)) => self.fiber_lists[c][b[c][a]].clone(),
            None => (0..self.cfg.target.size(c)).collect(),
        };
        for x in candidates {
            self.nodes += 1;
            if self.nodes > self.cfg.budget {
                return Outcome::Exhausted;
            }
            let mark = self.trail.len();
            if self.propagate(c, a, x) {
                let r = self.run(order, pos + 1, visit);
                if r != Outcome::Complete {
                    self.undo(mark);
                    return r;
                }
            }
            self.undo(mark);
        }
        Outcome::Complete
    }
}

/// All maps `source → target`, or `None` past the budget.
pub fn all_maps(source: &Psh, target: &Psh, budget: u64) -> Option<Vec<PresheafMap>> {
    MapSearch::new(source, target).budget(budget).all()
}

/// An isomorphism `p → q` if one exists.
pub fn find_isomorphism(p: &Psh, q: &Psh) -> Option<PresheafMap> {
    if p.level_sizes() != q.level_sizes() {
        return None;
    }
    MapSearch::new(p, q).injective().first().map()
}
