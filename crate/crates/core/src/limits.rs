//! Pointwise finite limits and colimits.

use crate::error::{Error, Result};
use crate::presheaf::{same_psh, subobject_from_mask, ArrowSquare, Presheaf, PresheafMap, Psh};
use crate::site::ObjId;
use std::collections::HashMap;
use std::sync::Arc;

fn pair_label(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

/// A pullback cone together with a lookup table for mediators.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub apex: Psh,
    pub p1: PresheafMap,
    pub p2: PresheafMap,
    index: Vec<HashMap<(usize, usize), usize>>,
}

impl Pullback {
    /// Index of the pair `(x, y)` at `c`, if it lies in the pullback.
    pub fn pair_index(&self, c: ObjId, x: usize, y: usize) -> Option<usize> {
        self.index[c].get(&(x, y)).copied()
    }

    /// The unique map `h` with `p1 ∘ h = u` and `p2 ∘ h = v`.
    pub fn mediate(&self, u: &PresheafMap, v: &PresheafMap) -> Result<PresheafMap> {
        if !same_psh(u.source(), v.source())
            || !same_psh(u.target(), self.p1.target())
            || !same_psh(v.target(), self.p2.target())
        {
            return Err(Error::InvalidMap("cone legs do not match the pullback".into()));
        }
        let site = u.site();
        let mut comps = Vec::with_capacity(site.num_objects());
        for c in site.objects() {
            let mut comp = Vec::with_capacity(u.source().size(c));
            for t in 0..u.source().size(c) {
                let i = self
                    .pair_index(c, u.apply(c, t), v.apply(c, t))
                    .ok_or_else(|| Error::InvalidMap("cone does not commute".into()))?;
                comp.push(i);
            }
            comps.push(comp);
        }
        Ok(PresheafMap::from_parts(u.source().clone(), self.apex.clone(), comps))
    }
}

fn pairs_presheaf(x: &Psh, y: &Psh, keep: impl Fn(ObjId, usize, usize) -> bool) -> Pullback {
    let site = x.site().clone();
    let mut pairs: Vec<Vec<(usize, usize)>> = Vec::with_capacity(site.num_objects());
    let mut index = Vec::with_capacity(site.num_objects());
    let mut levels = Vec::with_capacity(site.num_objects());
    for c in site.objects() {
        let mut ps = Vec::new();
        let mut ix = HashMap::new();
        let mut lv = Vec::new();
        for a in 0..x.size(c) {
            for b in 0..y.size(c) {
                if keep(c, a, b) {
                    ix.insert((a, b), ps.len());
                    ps.push((a, b));
                    lv.push(pair_label(x.label(c, a), y.label(c, b)));
                }
            }
        }
        pairs.push(ps);
        index.push(ix);
        levels.push(lv);
    }
    let apex = Arc::new(Presheaf::from_fn(&site, levels, |f, i| {
        let (a, b) = pairs[site.target(f)][i];
        index[site.source(f)][&(x.act(f, a), y.act(f, b))]
    }));
    let p1 = PresheafMap::from_fn(&apex, x, |c, i| pairs[c][i].0);
    let p2 = PresheafMap::from_fn(&apex, y, |c, i| pairs[c][i].1);
    Pullback { apex, p1, p2, index }
}

/// The pullback of `f: X → Z` and `g: Y → Z`.
pub fn pullback(f: &PresheafMap, g: &PresheafMap) -> Result<Pullback> {
    if !same_psh(f.target(), g.target()) {
        return Err(Error::InvalidMap("pullback of maps with different targets".into()));
    }
    Ok(pairs_presheaf(f.source(), g.source(), |c, a, b| f.apply(c, a) == g.apply(c, b)))
}

/// The product `X × Y` with its projections.
pub fn product(x: &Psh, y: &Psh) -> Pullback {
    pairs_presheaf(x, y, |_, _, _| true)
}

/// `u × v: A × B → C × D`.
pub fn product_map(u: &PresheafMap, v: &PresheafMap) -> PresheafMap {
    let dom = product(u.source(), v.source());
    let cod = product(u.target(), v.target());
    let a = u.compose_unchecked(&dom.p1);
    let b = v.compose_unchecked(&dom.p2);
    cod.mediate(&a, &b).expect("product cone")
}

/// A pushout or coproduct cocone.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub apex: Psh,
    pub i1: PresheafMap,
    pub i2: PresheafMap,
}

impl Pushout {
    /// The unique map `k` with `k ∘ i1 = u` and `k ∘ i2 = v`.
    pub fn copair(&self, u: &PresheafMap, v: &PresheafMap) -> Result<PresheafMap> {
        if !same_psh(u.target(), v.target())
            || !same_psh(u.source(), self.i1.source())
            || !same_psh(v.source(), self.i2.source())
        {
            return Err(Error::InvalidMap("cocone legs do not match the pushout".into()));
        }
        let site = u.site();
        let mut comps: Vec<Vec<Option<usize>>> = site.objects().map(|c| vec![None; self.apex.size(c)]).collect();
        for (leg, map) in [(&self.i1, u), (&self.i2, v)] {
            for c in site.objects() {
                for x in 0..map.source().size(c) {
                    let q = leg.apply(c, x);
                    let w = map.apply(c, x);
                    if comps[c][q].replace(w).is_some_and(|old| old != w) {
                        return Err(Error::InvalidMap("cocone does not commute".into()));
                    }
                }
            }
        }
        let comps = comps
            .into_iter()
            .map(|v| v.into_iter().map(|w| w.expect("pushout legs are jointly surjective")).collect())
            .collect();
        Ok(PresheafMap::from_parts(self.apex.clone(), u.target().clone(), comps))
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// The pushout of `f: Z → X` and `g: Z → Y`.
///
/// Each class is labelled by its least member label among `inl:x`, `inr:y`.
pub fn pushout(f: &PresheafMap, g: &PresheafMap) -> Result<Pushout> {
    if !same_psh(f.source(), g.source()) {
        return Err(Error::InvalidMap("pushout of maps with different sources".into()));
    }
    let (x, y) = (f.target(), g.target());
    let site = x.site().clone();
    let mut class_of: Vec<Vec<usize>> = Vec::new();
    let mut levels = Vec::new();
    for c in site.objects() {
        let nx = x.size(c);
        let n = nx + y.size(c);
        let mut parent: Vec<usize> = (0..n).collect();
        for z in 0..f.source().size(c) {
            let a = find(&mut parent, f.apply(c, z));
            let b = find(&mut parent, nx + g.apply(c, z));
            if a != b {
                let (lo, hi) = (a.min(b), a.max(b));
                parent[hi] = lo;
            }
        }
        let label = |i: usize| {
            if i < nx {
                format!("inl:{}", x.label(c, i))
            } else {
                format!("inr:{}", y.label(c, i - nx))
            }
        };
        let mut root_class = vec![usize::MAX; n];
        let mut cls = vec![0; n];
        let mut lv: Vec<String> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            if root_class[r] == usize::MAX {
                root_class[r] = lv.len();
                lv.push(label(i));
            } else {
                let k = root_class[r];
                let l = label(i);
                if l < lv[k] {
                    lv[k] = l;
                }
            }
            cls[i] = root_class[r];
        }
        class_of.push(cls);
        levels.push(lv);
    }
    // representative member of each class, for the action
    let reps: Vec<Vec<usize>> = site
        .objects()
        .map(|c| {
            let mut r = vec![usize::MAX; levels[c].len()];
            for (i, &k) in class_of[c].iter().enumerate() {
                if r[k] == usize::MAX {
                    r[k] = i;
                }
            }
            r
        })
        .collect();
    let act = |f: usize, i: usize| {
        let (s, t) = (site.source(f), site.target(f));
        let nx_t = x.size(t);
        let m = reps[t][i];
        let img = if m < nx_t { x.act(f, m) } else { x.size(s) + y.act(f, m - nx_t) };
        class_of[s][img]
    };
    let apex = Arc::new(Presheaf::from_fn(&site, levels, act));
    let i1 = PresheafMap::from_fn(x, &apex, |c, a| class_of[c][a]);
    let i2 = PresheafMap::from_fn(y, &apex, |c, b| class_of[c][x.size(c) + b]);
    Ok(Pushout { apex, i1, i2 })
}

/// The coproduct `X + Y` with its injections.
pub fn coproduct(x: &Psh, y: &Psh) -> Pushout {
    let zero = crate::presheaf::initial(x.site());
    let f = crate::presheaf::from_initial(&zero, x);
    let g = crate::presheaf::from_initial(&zero, y);
    pushout(&f, &g).expect("common initial source")
}

/// The mediator from the square's source to the pullback of its bottom-right
/// cospan.
pub fn square_mediator(s: &ArrowSquare) -> Result<(Pullback, PresheafMap)> {
    s.check()?;
    let pb = pullback(&s.bottom, &s.right)?;
    let m = pb.mediate(&s.left, &s.top)?;
    Ok((pb, m))
}

/// Whether a commuting square is a pullback.
pub fn is_pullback_square(s: &ArrowSquare) -> Result<bool> {
    Ok(square_mediator(s)?.1.is_iso())
}

/// Levelwise union of two subobjects of the same presheaf.
pub fn effective_union(m1: &PresheafMap, m2: &PresheafMap) -> Result<PresheafMap> {
    if !m1.is_mono() || !m2.is_mono() {
        return Err(Error::NotMono("effective union of a non-mono".into()));
    }
    if !same_psh(m1.target(), m2.target()) {
        return Err(Error::InvalidMap("subobjects of different presheaves".into()));
    }
    let a = crate::presheaf::image_mask(m1);
    let b = crate::presheaf::image_mask(m2);
    let mask: Vec<Vec<bool>> = a
        .iter()
        .zip(&b)
        .map(|(u, v)| u.iter().zip(v).map(|(p, q)| *p || *q).collect())
        .collect();
    Ok(subobject_from_mask(m1.target(), &mask).1)
}

/// Preimage of a levelwise subset under a map.
pub fn preimage_mask(f: &PresheafMap, mask: &[Vec<bool>]) -> Vec<Vec<bool>> {
    f.site()
        .objects()
        .map(|c| (0..f.source().size(c)).map(|x| mask[c][f.apply(c, x)]).collect())
        .collect()
}
