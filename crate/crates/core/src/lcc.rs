//! Base change, pushforward and exponentials.

use crate::error::{Error, Result};
use crate::limits::{product, pullback, Pullback};
use crate::presheaf::{same_psh, terminal, to_terminal, ArrowSquare, Presheaf, PresheafMap, Psh};
use crate::search::{MapSearch, Outcome};
use crate::site::{MorId, ObjId, Site};
use rayon::prelude::*;
use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

/// Default node budget for each section enumeration.
pub const SECTION_BUDGET: u64 = 20_000_000;
/// Largest pushforward level we are willing to build.
pub const MAX_LEVEL: usize = 2_000_000;

/// An object of the slice over `anchor.target()`.
#[derive(Debug, Clone)]
pub struct SliceObject {
    pub total: Psh,
    pub anchor: PresheafMap,
}

impl SliceObject {
    pub fn new(anchor: PresheafMap) -> Self {
        SliceObject {
            total: anchor.source().clone(),
            anchor,
        }
    }

    pub fn base(&self) -> &Psh {
        self.anchor.target()
    }
}

/// `f^* q` together with the projection to `q.total`.
#[derive(Debug, Clone)]
pub struct BaseChange {
    pub slice: SliceObject,
    pub proj: PresheafMap,
    pub pullback: Pullback,
}

/// Pulls `q` back along `f: X → Y`.
pub fn base_change(f: &PresheafMap, q: &SliceObject) -> Result<BaseChange> {
    let pb = pullback(f, &q.anchor)?;
    Ok(BaseChange {
        slice: SliceObject::new(pb.p1.clone()),
        proj: pb.p2.clone(),
        pullback: pb,
    })
}

/// The presheaf `y(c) ×_B A` of pairs `(g: d → c, a)` with `m(a) = B(g)(b)`.
#[derive(Debug, Clone)]
struct Domain {
    psh: Psh,
    /// Flattened elements `(d, g, a)`, grouped by object id.
    elems: Vec<(ObjId, MorId, usize)>,
    index: HashMap<(MorId, usize), usize>,
    proj: PresheafMap,
}

impl Domain {
    fn new(site: &Arc<Site>, m: &PresheafMap, c: ObjId, b: usize) -> Self {
        let a_psh = m.source();
        let bb = m.target();
        let mut elems = Vec::new();
        let mut offset = Vec::with_capacity(site.num_objects());
        let mut levels = Vec::with_capacity(site.num_objects());
        let mut index = HashMap::new();
        for d in site.objects() {
            offset.push(elems.len());
            let mut lv = Vec::new();
            for &g in site.hom(d, c) {
                let bg = bb.act(g, b);
                for a in 0..a_psh.size(d) {
                    if m.apply(d, a) == bg {
                        index.insert((g, a), elems.len());
                        lv.push(format!("{g}:{a}"));
                        elems.push((d, g, a));
                    }
                }
            }
            levels.push(lv);
        }
        let psh = Arc::new(Presheaf::from_fn(site, levels, |h, i| {
            let (e, d) = (site.source(h), site.target(h));
            let (_, g, a) = elems[offset[d] + i];
            let gh = site.compose(g, h).expect("composable");
            index[&(gh, a_psh.act(h, a))] - offset[e]
        }));
        let proj = PresheafMap::from_fn(&psh, a_psh, |d, i| elems[offset[d] + i].2);
        Domain {
            psh,
            elems,
            index,
            proj,
        }
    }

    fn flatten(&self, comps: &[Vec<usize>]) -> Vec<usize> {
        comps.iter().flatten().copied().collect()
    }
}

/// The pushforward `m_* p` with its structure maps.
#[derive(Debug, Clone)]
pub struct Pushforward {
    pub slice: SliceObject,
    /// Counit square: `m^* m_* p → p` over the identity of `A`.
    pub counit: ArrowSquare,
    /// For mono `m`: the square `p → m_* p` over `m`, a pullback.
    pub unit_square: Option<ArrowSquare>,
    pub base_change: BaseChange,
    m: PresheafMap,
    p: SliceObject,
    domains: Vec<Vec<Domain>>,
    entries: Vec<Vec<(usize, Vec<usize>)>>,
    lookup: Vec<HashMap<(usize, Vec<usize>), usize>>,
}

impl Pushforward {
    /// `s(g, a)` for the element `i` at `c`.
    pub fn value(&self, c: ObjId, i: usize, g: MorId, a: usize) -> Option<usize> {
        let (b, vals) = &self.entries[c][i];
        self.domains[c][*b].index.get(&(g, a)).map(|&k| vals[k])
    }

    /// The element over `b` at `c` whose family is `s`.
    pub fn find(&self, c: ObjId, b: usize, s: impl Fn(ObjId, MorId, usize) -> usize) -> Option<usize> {
        let vals: Vec<usize> = self.domains[c][b].elems.iter().map(|&(d, g, a)| s(d, g, a)).collect();
        self.lookup[c].get(&(b, vals)).copied()
    }

    pub fn map(&self) -> &PresheafMap {
        &self.m
    }

    pub fn fibred(&self) -> &SliceObject {
        &self.p
    }

    /// `m_*(φ)` for `φ: p → q` over `A`, where `self = m_* p`, `other = m_* q`.
    pub fn functor_map(&self, other: &Pushforward, phi: &PresheafMap) -> Result<PresheafMap> {
        if !same_psh(phi.source(), &self.p.total) || !same_psh(phi.target(), &other.p.total) {
            return Err(Error::InvalidMap("map does not connect the pushed-forward objects".into()));
        }
        let site = self.m.site();
        let mut comps = Vec::with_capacity(site.num_objects());
        for c in site.objects() {
            let mut comp = Vec::with_capacity(self.entries[c].len());
            for (b, vals) in &self.entries[c] {
                let dom = &self.domains[c][*b];
                let new: Vec<usize> = dom.elems.iter().zip(vals).map(|(&(d, _, _), &x)| phi.apply(d, x)).collect();
                let j = other
                    .lookup[c]
                    .get(&(*b, new))
                    .copied()
                    .ok_or_else(|| Error::InvalidMap("map is not over the base".into()))?;
                comp.push(j);
            }
            comps.push(comp);
        }
        Ok(PresheafMap::from_parts(self.slice.total.clone(), other.slice.total.clone(), comps))
    }
}

/// Computes `m_* p` for `m: A → B` and `p` over `A`.
pub fn pushforward(m: &PresheafMap, p: &SliceObject) -> Result<Pushforward> {
    pushforward_bounded(m, p, SECTION_BUDGET)
}

pub fn pushforward_bounded(m: &PresheafMap, p: &SliceObject, budget: u64) -> Result<Pushforward> {
    if !same_psh(p.base(), m.source()) {
        return Err(Error::InvalidMap("pushforward of an object not over the source".into()));
    }
    let site = m.site().clone();
    let bb = m.target().clone();
    let jobs: Vec<(ObjId, usize)> = site
        .objects()
        .flat_map(|c| (0..bb.size(c)).map(move |b| (c, b)))
        .collect();
    let results: Vec<Result<(Domain, Vec<Vec<usize>>)>> = jobs
        .par_iter()
        .map(|&(c, b)| {
            let dom = Domain::new(&site, m, c, b);
            let mut fams = Vec::new();
            let mut too_many = false;
            let r = MapSearch::new(&dom.psh, &p.total)
                .over(&p.anchor, &dom.proj)
                .budget(budget)
                .for_each(|h| {
                    fams.push(dom.flatten(h));
                    if fams.len() > MAX_LEVEL {
                        too_many = true;
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                });
            if r == Outcome::Exhausted || too_many {
                return Err(Error::BudgetExhausted(format!(
                    "sections over `{}` at `{}`",
                    bb.label(c, b),
                    site.object_label(c)
                )));
            }
            Ok((dom, fams))
        })
        .collect();
    let mut domains: Vec<Vec<Domain>> = site.objects().map(|_| Vec::new()).collect();
    let mut entries: Vec<Vec<(usize, Vec<usize>)>> = site.objects().map(|_| Vec::new()).collect();
    for (&(c, b), r) in jobs.iter().zip(results) {
        let (dom, fams) = r?;
        domains[c].push(dom);
        entries[c].extend(fams.into_iter().map(|v| (b, v)));
        if entries[c].len() > MAX_LEVEL {
            return Err(Error::BudgetExhausted(format!("pushforward level `{}`", site.object_label(c))));
        }
    }
    let lookup: Vec<HashMap<(usize, Vec<usize>), usize>> = entries
        .iter()
        .map(|lv| lv.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect())
        .collect();
    let levels: Vec<Vec<String>> = site
        .objects()
        .map(|c| {
            entries[c]
                .iter()
                .map(|(b, vals)| {
                    let v: Vec<String> = vals.iter().map(usize::to_string).collect();
                    format!("sec:{}:{}", bb.label(c, *b), v.join("."))
                })
                .collect()
        })
        .collect();
    let total = Arc::new(Presheaf::from_fn(&site, levels, |f, i| {
        let (cp, c) = (site.source(f), site.target(f));
        let (b, vals) = &entries[c][i];
        let dom = &domains[c][*b];
        let b2 = bb.act(f, *b);
        let dom2 = &domains[cp][b2];
        let vals2: Vec<usize> = dom2
            .elems
            .iter()
            .map(|&(_, g, a)| vals[dom.index[&(site.compose(f, g).expect("composable"), a)]])
            .collect();
        lookup[cp][&(b2, vals2)]
    }));
    let anchor = PresheafMap::from_fn(&total, &bb, |c, i| entries[c][i].0);
    let slice = SliceObject::new(anchor);

    let bc = base_change(m, &slice)?;
    let pb = &bc.pullback;
    let counit_map = PresheafMap::from_fn(&pb.apex, &p.total, |c, k| {
        let a = pb.p1.apply(c, k);
        let i = pb.p2.apply(c, k);
        let (b, vals) = &entries[c][i];
        vals[domains[c][*b].index[&(site.identity(c), a)]]
    });
    let counit = ArrowSquare::new(
        bc.slice.anchor.clone(),
        p.anchor.clone(),
        counit_map,
        PresheafMap::identity(m.source()),
    )?;

    let unit_square = if m.is_mono() {
        let top = PresheafMap::from_fn(&p.total, &total, |c, x| {
            let a = p.anchor.apply(c, x);
            let b = m.apply(c, a);
            let vals: Vec<usize> = domains[c][b]
                .elems
                .iter()
                .map(|&(_, g, _)| p.total.act(g, x))
                .collect();
            lookup[c][&(b, vals)]
        });
        Some(ArrowSquare::new(p.anchor.clone(), slice.anchor.clone(), top, m.clone())?)
    } else {
        None
    };

    Ok(Pushforward {
        slice,
        counit,
        unit_square,
        base_change: bc,
        m: m.clone(),
        p: p.clone(),
        domains,
        entries,
        lookup,
    })
}

/// The unit `q → m_* m^* q` for `q` over `B`, with the pushforward used.
pub fn adjunction_unit(m: &PresheafMap, q: &SliceObject) -> Result<(Pushforward, PresheafMap)> {
    let bc = base_change(m, q)?;
    let pf = pushforward(m, &bc.slice)?;
    let pb = &bc.pullback;
    let mut comps = Vec::new();
    for c in m.site().objects() {
        let mut comp = Vec::new();
        for y in 0..q.total.size(c) {
            let b = q.anchor.apply(c, y);
            let i = pf
                .find(c, b, |d, g, a| pb.pair_index(d, a, q.total.act(g, y)).expect("pair in pullback"))
                .ok_or_else(|| Error::PostconditionFailure("unit family missing".into()))?;
            comp.push(i);
        }
        comps.push(comp);
    }
    let eta = PresheafMap::from_parts(q.total.clone(), pf.slice.total.clone(), comps);
    Ok((pf, eta))
}

/// The exponential `hom(A, X)` with evaluation.
#[derive(Debug, Clone)]
pub struct Exponential {
    pub hom: Psh,
    /// `hom(A, X) × A → X`.
    pub eval: PresheafMap,
    pf: Pushforward,
    a: Psh,
    x: Psh,
    ax: Pullback,
}

impl Exponential {
    pub fn base(&self) -> &Psh {
        &self.a
    }

    pub fn codomain(&self) -> &Psh {
        &self.x
    }

    /// The transpose `Z → hom(A, X)` of `f: Z × A → X`.
    pub fn curry(&self, z: &Psh, f: &PresheafMap) -> Result<PresheafMap> {
        let site = self.a.site();
        let za = product(z, &self.a);
        if !same_psh(&za.apex, f.source()) || !same_psh(f.target(), &self.x) {
            return Err(Error::InvalidMap("curry expects a map Z × A → X".into()));
        }
        let mut comps = Vec::new();
        for c in site.objects() {
            let mut comp = Vec::new();
            for zz in 0..z.size(c) {
                let i = self
                    .pf
                    .find(c, 0, |d, g, a| {
                        let k = za.pair_index(d, z.act(g, zz), a).expect("pair");
                        self.ax.pair_index(d, a, f.apply(d, k)).expect("pair")
                    })
                    .ok_or_else(|| Error::PostconditionFailure("curried family missing".into()))?;
                comp.push(i);
            }
            comps.push(comp);
        }
        Ok(PresheafMap::from_parts(z.clone(), self.hom.clone(), comps))
    }

    /// The map `Z × A → X` corresponding to `g: Z → hom(A, X)`.
    pub fn uncurry(&self, g: &PresheafMap) -> Result<PresheafMap> {
        if !same_psh(g.target(), &self.hom) {
            return Err(Error::InvalidMap("uncurry expects a map into the exponential".into()));
        }
        let za = product(g.source(), &self.a);
        let ha = product(&self.hom, &self.a);
        let ga = ha.mediate(&g.compose_unchecked(&za.p1), &za.p2)?;
        Ok(self.eval.compose_unchecked(&ga))
    }
}

/// `hom(A, X)` computed as `(A → 1)_* (A × X → A)`.
pub fn exponential(a: &Psh, x: &Psh) -> Result<Exponential> {
    if !crate::presheaf::same_site(a.site(), x.site()) {
        return Err(Error::InvalidPresheaf("exponential over different sites".into()));
    }
    let site = a.site();
    let one = terminal(site);
    let ax = product(a, x);
    let p = SliceObject::new(ax.p1.clone());
    let pf = pushforward(&to_terminal(a, &one), &p)?;
    let hom = Arc::new(pf.slice.total.relabel(|c, i| {
        let l = pf.slice.total.label(c, i);
        format!("hom:{}", l.rsplit(':').next().unwrap_or(""))
    }));
    let ha = product(&hom, a);
    let eval = PresheafMap::from_fn(&ha.apex, x, |c, k| {
        let s = ha.p1.apply(c, k);
        let aa = ha.p2.apply(c, k);
        let v = pf.value(c, s, site.identity(c), aa).expect("identity in domain");
        ax.p2.apply(c, v)
    });
    Ok(Exponential {
        hom,
        eval,
        pf,
        a: a.clone(),
        x: x.clone(),
        ax,
    })
}

/// The slice exponential `(−)^A = a_* a^*` on objects over `B`, for `a: A → B`.
pub fn slice_exponential(a: &PresheafMap, x: &SliceObject) -> Result<SliceObject> {
    let bc = base_change(a, x)?;
    Ok(pushforward(a, &bc.slice)?.slice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{discrete, initial, from_initial, representable, representable_index};
    use crate::site::builtin_simplex_site;

    fn simplex(n: usize) -> Arc<Site> {
        Arc::new(builtin_simplex_site(n).unwrap())
    }

    fn endpoint(s: &Arc<Site>, k: usize) -> PresheafMap {
        let y0 = representable(s, 0).unwrap();
        let y1 = representable(s, 1).unwrap();
        let d = s.morphism_id(&format!("d1_{}", 1 - k)).unwrap();
        PresheafMap::from_fn(&y0, &y1, |c, x| representable_index(s, s.compose(d, s.hom(c, 0)[x]).unwrap()))
    }

    /// Sections counted by odometer over all levelwise functions.
    fn naive_section_count(m: &PresheafMap, p: &SliceObject, c: ObjId, b: usize) -> usize {
        let site = m.site();
        let mut dom = Vec::new();
        for d in site.objects() {
            for &g in site.hom(d, c) {
                for a in 0..m.source().size(d) {
                    if m.apply(d, a) == m.target().act(g, b) {
                        dom.push((d, g, a));
                    }
                }
            }
        }
        let sizes: Vec<usize> = dom.iter().map(|&(d, _, _)| p.total.size(d)).collect();
        if sizes.iter().any(|&n| n == 0) {
            return usize::from(dom.is_empty());
        }
        let mut v = vec![0usize; dom.len()];
        let mut count = 0;
        loop {
            let ok = dom.iter().enumerate().all(|(i, &(d, g, a))| {
                p.anchor.apply(d, v[i]) == a
                    && site.morphisms().iter().enumerate().all(|(h, _)| {
                        if site.target(h) != d {
                            return true;
                        }
                        let gh = site.compose(g, h).unwrap();
                        let a2 = m.source().act(h, a);
                        let j = dom.iter().position(|&(_, g2, a3)| g2 == gh && a3 == a2).unwrap();
                        p.total.act(h, v[i]) == v[j]
                    })
            });
            count += usize::from(ok);
            let mut i = 0;
            loop {
                if i == v.len() {
                    return count;
                }
                v[i] += 1;
                if v[i] < sizes[i] {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn pushforward_along_endpoint_matches_naive() {
        let s = simplex(1);
        let y0 = representable(&s, 0).unwrap();
        let two = discrete(&s, &["a", "b"]);
        let p = SliceObject::new(to_terminal(&two, &y0));
        let m = endpoint(&s, 0);
        let pf = pushforward(&m, &p).unwrap();
        for c in s.objects() {
            let expected: usize = (0..m.target().size(c)).map(|b| naive_section_count(&m, &p, c, b)).sum();
            assert_eq!(pf.slice.total.size(c), expected);
        }
        // m mono: the unit square is a pullback and the counit is invertible
        assert!(crate::limits::is_pullback_square(pf.unit_square.as_ref().unwrap()).unwrap());
        assert!(pf.counit.top.is_iso());
    }

    #[test]
    fn pushforward_identity_and_empty() {
        let s = simplex(2);
        let y1 = representable(&s, 1).unwrap();
        let y2 = representable(&s, 2).unwrap();
        let q = SliceObject::new(PresheafMap::identity(&y1));
        let id = PresheafMap::identity(&y1);
        let pf = pushforward(&id, &q).unwrap();
        assert!(pf.slice.anchor.is_iso());
        let zero = initial(&s);
        let e = from_initial(&zero, &y2);
        let pz = SliceObject::new(PresheafMap::identity(&zero));
        let pf = pushforward(&e, &pz).unwrap();
        assert!(pf.slice.anchor.is_iso());
    }

    #[test]
    fn exponential_sizes_and_currying() {
        let s = simplex(1);
        let y1 = representable(&s, 1).unwrap();
        let ex = exponential(&y1, &y1).unwrap();
        assert_eq!(ex.hom.size(0), 3);
        let one = terminal(&s);
        assert!(crate::search::find_isomorphism(&exponential(&one, &y1).unwrap().hom, &y1).is_some());
        let zero = initial(&s);
        assert_eq!(exponential(&zero, &y1).unwrap().hom.level_sizes(), vec![1, 1]);
        // hom(Z, hom(A,X)) ≅ hom(Z×A, X) on Z = Δ¹
        let za = product(&y1, &y1);
        let maps = MapSearch::new(&za.apex, &y1).all().unwrap();
        let curried: Vec<PresheafMap> = maps.iter().map(|f| ex.curry(&y1, f).unwrap()).collect();
        assert_eq!(MapSearch::new(&y1, &ex.hom).count().unwrap() as usize, maps.len());
        for (f, g) in maps.iter().zip(&curried) {
            assert_eq!(ex.uncurry(g).unwrap().components(), f.components());
        }
    }

    #[test]
    fn triangle_identities() {
        let s = simplex(1);
        let y1 = representable(&s, 1).unwrap();
        let m = endpoint(&s, 1);
        let two = discrete(&s, &["a", "b"]);
        let q = SliceObject::new(crate::limits::product(&y1, &two).p1);
        let (pf, eta) = adjunction_unit(&m, &q).unwrap();
        // ε_{m^*q} ∘ m^*(η_q) = id
        let bcq = base_change(&m, &q).unwrap();
        let med = pf
            .base_change
            .pullback
            .mediate(&bcq.slice.anchor, &eta.compose(&bcq.proj).unwrap())
            .unwrap();
        let tri = pf.counit.top.compose(&med).unwrap();
        assert!(tri.same_as(&PresheafMap::identity(&bcq.slice.total)));
        // m_*(ε_p) ∘ η_{m_* p} = id
        let p = SliceObject::new(to_terminal(&two, &representable(&s, 0).unwrap()));
        let pf2 = pushforward(&m, &p).unwrap();
        let (pf3, eta2) = adjunction_unit(&m, &pf2.slice).unwrap();
        let back = pf3.functor_map(&pf2, &pf2.counit.top).unwrap();
        assert!(back.compose(&eta2).unwrap().same_as(&PresheafMap::identity(&pf2.slice.total)));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::presheaf::discrete;
    use crate::site::builtin_simplex_site;
    use proptest::prelude::*;

    fn disc(s: &Arc<Site>, n: usize) -> Psh {
        let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        discrete(s, &refs)
    }

    fn func(s: &Arc<Site>, src: &Psh, tgt: &Psh, f: &[usize]) -> PresheafMap {
        PresheafMap::new(src.clone(), tgt.clone(), vec![f.to_vec(); s.num_objects()]).unwrap()
    }

    proptest! {
        // Along a mono between discrete presheaves the pushforward is the fibre of p
        // over points of the image and a single point elsewhere; the counit is invertible.
        #[test]
        fn pushforward_along_discrete_mono(
            extra in 0usize..3,
            fibres in prop::collection::vec(0usize..3, 1..4),
            shift in 0usize..3,
        ) {
            let s = Arc::new(builtin_simplex_site(1).unwrap());
            let k = fibres.len();
            let n = k + extra;
            let m: Vec<usize> = (0..k).map(|a| (a + shift) % n).collect();
            let p: Vec<usize> = fibres.iter().enumerate().flat_map(|(a, &r)| std::iter::repeat(a).take(r)).collect();
            let a = disc(&s, k);
            let mm = func(&s, &a, &disc(&s, n), &m);
            let pm = func(&s, &disc(&s, p.len()), &a, &p);
            let pf = pushforward(&mm, &SliceObject::new(pm)).unwrap();
            let expect = fibres.iter().sum::<usize>() + extra;
            for c in 0..s.num_objects() {
                prop_assert_eq!(pf.slice.total.size(c), expect);
            }
            prop_assert!(pf.counit.top.is_iso());
            prop_assert!(pf.counit.check().is_ok());
        }
    }
}
