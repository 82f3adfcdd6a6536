//! Path objects, mapping cocylinders, homotopies and fiber transport.

use crate::cylinder::{cyl, cyl_map, leibniz_tensor, IntervalStructure};
use crate::error::{Error, Result};
use crate::lcc::{base_change, pushforward, BaseChange, SliceObject};
use crate::lifting::is_trivial_fibration;
use crate::limits::{coproduct, is_pullback_square, product, product_map, pullback, Pullback};
use crate::presheaf::{same_psh, terminal, to_terminal, ArrowSquare, PresheafMap, Psh};
use crate::search::{Found, MapSearch};
use crate::site::ObjId;
use std::ops::ControlFlow;

/// Node budget for homotopy and box-filling searches.
pub const HOMOTOPY_BUDGET: u64 = 20_000_000;

/// `Z → I × Z`, `z ↦ (δ_k, z)`, for `iz = I × Z`.
pub fn end_inclusion(s: &IntervalStructure, k: usize, iz: &Pullback) -> PresheafMap {
    let z = iz.p2.target();
    PresheafMap::from_fn(z, &iz.apex, |c, x| iz.pair_index(c, s.endpoint_at(k, c), x).expect("pair"))
}

fn postcondition(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::PostconditionFailure(what.to_string()))
    }
}

fn found(r: Found, what: &str) -> Result<PresheafMap> {
    match r {
        Found::Map(m) => Ok(m),
        Found::NoMap => Err(Error::NoFiller(what.to_string())),
        Found::Exhausted => Err(Error::BudgetExhausted(what.to_string())),
    }
}

/// A homotopy `I × X → Y` from `source` (at `δ_0`) to `target` (at `δ_1`).
#[derive(Debug, Clone)]
pub struct Homotopy {
    pub source: PresheafMap,
    pub target: PresheafMap,
    pub body: PresheafMap,
    /// `I × X`.
    pub cyl: Pullback,
}

impl Homotopy {
    /// Reads off the endpoint maps of `body: I × X → Y`.
    pub fn from_body(s: &IntervalStructure, cyl: Pullback, body: PresheafMap) -> Result<Self> {
        if !same_psh(body.source(), &cyl.apex) {
            return Err(Error::InvalidMap("homotopy body is not defined on the cylinder".into()));
        }
        let source = body.compose_unchecked(&end_inclusion(s, 0, &cyl));
        let target = body.compose_unchecked(&end_inclusion(s, 1, &cyl));
        Ok(Homotopy {
            source,
            target,
            body,
            cyl,
        })
    }

    /// `f ∘ π_X`.
    pub fn constant(s: &IntervalStructure, f: &PresheafMap) -> Self {
        let cx = cyl(s, f.source());
        let body = f.compose_unchecked(&cx.p2);
        Homotopy {
            source: f.clone(),
            target: f.clone(),
            body,
            cyl: cx,
        }
    }

    pub fn domain(&self) -> &Psh {
        self.source.source()
    }

    pub fn codomain(&self) -> &Psh {
        self.source.target()
    }

    pub fn connects(&self, f: &PresheafMap, g: &PresheafMap) -> bool {
        self.source.same_as(f) && self.target.same_as(g)
    }

    /// Whether `q ∘ H = q ∘ f ∘ π_X` for `q: Y → B`.
    pub fn is_over(&self, q: &PresheafMap) -> bool {
        let lhs = q.compose_unchecked(&self.body);
        let rhs = q.compose_unchecked(&self.source).compose_unchecked(&self.cyl.p2);
        lhs.components() == rhs.components()
    }
}

/// Searches for a homotopy `f ≃ g`, over `base: Y → B` when given.
pub fn find_homotopy(
    s: &IntervalStructure,
    f: &PresheafMap,
    g: &PresheafMap,
    base: Option<&PresheafMap>,
    budget: u64,
) -> Result<Option<Homotopy>> {
    if !same_psh(f.source(), g.source()) || !same_psh(f.target(), g.target()) {
        return Err(Error::InvalidMap("homotopy between maps that are not parallel".into()));
    }
    if f.same_as(g) {
        return Ok(Some(Homotopy::constant(s, f)));
    }
    let cx = cyl(s, f.source());
    let mut search = MapSearch::new(&cx.apex, f.target())
        .fix_along(&end_inclusion(s, 0, &cx), f)
        .fix_along(&end_inclusion(s, 1, &cx), g)
        .budget(budget);
    let b;
    if let Some(q) = base {
        b = q.compose_unchecked(f).compose_unchecked(&cx.p2);
        search = search.over(q, &b);
    }
    match search.first() {
        Found::Map(body) => Ok(Some(Homotopy::from_body(s, cx, body)?)),
        Found::NoMap => Ok(None),
        Found::Exhausted => Err(Error::BudgetExhausted("homotopy search".into())),
    }
}

/// A filled box `I × (I × X) → T`; the outer coordinate comes first.
struct BoxFill {
    filler: PresheafMap,
    bd: Pullback,
}

impl BoxFill {
    /// The filler restricted to the outer endpoint `δ_k`, as a map on `I × X`.
    fn at(&self, s: &IntervalStructure, k: usize, cx: &Pullback) -> PresheafMap {
        let bd = &self.bd;
        let inc = PresheafMap::from_fn(&cx.apex, &bd.apex, |c, q| {
            bd.pair_index(c, s.endpoint_at(k, c), q).expect("pair")
        });
        self.filler.compose_unchecked(&inc)
    }
}

/// Fills the open box whose face at outer `δ_j` is `face` and whose sides at
/// inner `δ_0, δ_1` are `sides`, all maps `I × X → T`, relative to `p: T → Z`
/// with `bottom(c, outer, inner)` the required image in `Z`.
#[allow(clippy::too_many_arguments)]
fn fill_box(
    s: &IntervalStructure,
    j: usize,
    cx: &Pullback,
    face: &PresheafMap,
    sides: [&PresheafMap; 2],
    rel: Option<(&PresheafMap, &dyn Fn(ObjId, usize, usize) -> usize)>,
    budget: u64,
) -> Result<BoxFill> {
    let x = cx.p2.target();
    let t = face.target();
    let co = coproduct(&s.one, &s.one);
    let i1 = co.copair(&s.delta[0], &s.delta[1])?;
    let v = product_map(&i1, &PresheafMap::identity(x));
    let lt = leibniz_tensor(&s.delta[j], &v)?;
    let one_d = product(&s.one, v.target());
    let i_c = product(&s.interval, v.source());
    let c_pb = product(&co.apex, x);
    let face_top = PresheafMap::from_fn(&one_d.apex, t, |c, q| face.apply(c, one_d.p2.apply(c, q)));
    let side_top = PresheafMap::from_fn(&i_c.apex, t, |c, q| {
        let u = i_c.p1.apply(c, q);
        let ex = i_c.p2.apply(c, q);
        let e = c_pb.p1.apply(c, ex);
        let xx = c_pb.p2.apply(c, ex);
        let side = if e == co.i1.apply(c, 0) { 0 } else { 1 };
        sides[side].apply(c, cx.pair_index(c, u, xx).expect("pair"))
    });
    let top = lt.pushout.copair(&face_top, &side_top)?;
    let bd = lt.bd.clone();
    let mut search = MapSearch::new(&bd.apex, t).fix_along(&lt.map, &top).budget(budget);
    let bottom;
    if let Some((p, f)) = rel {
        bottom = PresheafMap::from_fn(&bd.apex, p.target(), |c, w| f(c, bd.p1.apply(c, w), bd.p2.apply(c, w)));
        search = search.over(p, &bottom);
    }
    let filler = found(search.first(), "open box has no filler")?;
    Ok(BoxFill { filler, bd })
}

/// `H · K: f ≃ h` for `H: f ≃ g` and `K: g ≃ h`, by box filling in `Y`
/// (over `base: Y → B` when given).
pub fn compose_homotopies(
    s: &IntervalStructure,
    h: &Homotopy,
    k: &Homotopy,
    base: Option<&PresheafMap>,
) -> Result<Homotopy> {
    if !h.target.same_as(&k.source) {
        return Err(Error::InvalidMap("homotopies do not compose".into()));
    }
    let f = &h.source;
    let cx = h.cyl.clone();
    let constant = f.compose_unchecked(&cx.p2);
    let bottom;
    let rel: Option<(&PresheafMap, &dyn Fn(ObjId, usize, usize) -> usize)> = match base {
        Some(q) => {
            bottom = move |c: ObjId, _u: usize, w: usize| q.apply(c, f.apply(c, cx.p2.apply(c, w)));
            Some((q, &bottom))
        }
        None => None,
    };
    let fill = fill_box(s, 0, &h.cyl, &h.body, [&constant, &k.body], rel, HOMOTOPY_BUDGET)?;
    let out = Homotopy::from_body(s, h.cyl.clone(), fill.at(s, 1, &h.cyl))?;
    postcondition(out.connects(&h.source, &k.target), "composite homotopy has the wrong ends")?;
    Ok(out)
}

/// `H⁻¹: g ≃ f` for `H: f ≃ g`.
pub fn invert_homotopy(s: &IntervalStructure, h: &Homotopy, base: Option<&PresheafMap>) -> Result<Homotopy> {
    let f = &h.source;
    let cx = h.cyl.clone();
    let constant = f.compose_unchecked(&cx.p2);
    let bottom;
    let rel: Option<(&PresheafMap, &dyn Fn(ObjId, usize, usize) -> usize)> = match base {
        Some(q) => {
            bottom = move |c: ObjId, _u: usize, w: usize| q.apply(c, f.apply(c, cx.p2.apply(c, w)));
            Some((q, &bottom))
        }
        None => None,
    };
    let fill = fill_box(s, 0, &h.cyl, &constant, [&h.body, &constant], rel, HOMOTOPY_BUDGET)?;
    let out = Homotopy::from_body(s, h.cyl.clone(), fill.at(s, 1, &h.cyl))?;
    postcondition(out.connects(&h.target, &h.source), "inverse homotopy has the wrong ends")?;
    Ok(out)
}

/// The factorization `X → PX → X ×_B X` of the diagonal of `X` over `B`.
#[derive(Debug, Clone)]
pub struct PathObject {
    pub total: Psh,
    /// Reflexivity `X → PX`.
    pub refl: PresheafMap,
    /// Boundary projection `PX → X ×_B X`.
    pub boundary: PresheafMap,
    /// Endpoint projections `PX → X`.
    pub ends: [PresheafMap; 2],
    pub pairs: Pullback,
    /// `PX → B`.
    pub anchor: PresheafMap,
}

impl PathObject {
    pub fn slice(&self) -> SliceObject {
        SliceObject::new(self.anchor.clone())
    }
}

/// The path object `hom(I, X)`.
pub fn path_object(s: &IntervalStructure, x: &Psh) -> Result<PathObject> {
    relative_path_object(s, &to_terminal(x, &terminal(x.site())))
}

/// The path object of `p: X → B` in the slice over `B`, computed as the
/// pushforward of `I × p` along `I × B → B`: paths in `X` lying over a
/// constant path in `B`.
pub fn relative_path_object(s: &IntervalStructure, p: &PresheafMap) -> Result<PathObject> {
    let (x, b) = (p.source(), p.target());
    let site = x.site().clone();
    let ib = cyl(s, b);
    let ix = cyl(s, x);
    let ip = cyl_map(s, p).retyped(ix.apex.clone(), ib.apex.clone());
    let pf = pushforward(&ib.p2, &SliceObject::new(ip))?;
    let total = pf.slice.total.clone();
    let anchor = pf.slice.anchor.clone();
    let end = |k: usize| {
        PresheafMap::from_fn(&total, x, |c, i| {
            let a = ib.pair_index(c, s.endpoint_at(k, c), anchor.apply(c, i)).expect("pair");
            ix.p2.apply(c, pf.value(c, i, site.identity(c), a).expect("identity in domain"))
        })
    };
    let ends = [end(0), end(1)];
    let mut missing = false;
    let refl = PresheafMap::from_fn(x, &total, |c, xx| {
        pf.find(c, p.apply(c, xx), |d, g, a| {
            ix.pair_index(d, ib.p1.apply(d, a), x.act(g, xx)).expect("pair")
        })
        .unwrap_or_else(|| {
            missing = true;
            0
        })
    });
    postcondition(!missing, "constant path missing from the path object")?;
    let pairs = pullback(p, p)?;
    let boundary = pairs.mediate(&ends[0], &ends[1])?;
    let id = PresheafMap::identity(x);
    for e in &ends {
        postcondition(e.compose_unchecked(&refl).same_as(&id), "endpoint does not retract reflexivity")?;
    }
    Ok(PathObject {
        total,
        refl,
        boundary,
        ends,
        pairs,
        anchor,
    })
}

/// The factorization `X_0 → Mf → X_1` of `f`.
#[derive(Debug, Clone)]
pub struct MappingCocylinder {
    pub total: Psh,
    pub j: PresheafMap,
    pub e: PresheafMap,
    /// `Mf → X_0`, retracting `j`.
    pub proj: PresheafMap,
    /// Path object of `X_1` over the base.
    pub path: PathObject,
    /// `X_0 ×_A X_1`.
    pub pairs: Pullback,
    /// `Mf` as the pullback of the boundary projection along `f × X_1`.
    pub square: Pullback,
    /// `Mf → A`.
    pub anchor: PresheafMap,
}

/// Builds the mapping cocylinder of `f: X_0 → X_1`, over `base: X_1 → A`
/// when given and absolutely otherwise.
pub fn mapping_cocylinder(s: &IntervalStructure, f: &PresheafMap, base: Option<&PresheafMap>) -> Result<MappingCocylinder> {
    let x0 = f.source();
    let x1 = f.target();
    let p1 = match base {
        Some(q) => {
            if !same_psh(q.source(), x1) {
                return Err(Error::InvalidMap("base map does not start at the codomain".into()));
            }
            q.clone()
        }
        None => to_terminal(x1, &terminal(x1.site())),
    };
    let p0 = p1.compose_unchecked(f);
    let path = relative_path_object(s, &p1)?;
    let pairs = pullback(&p0, &p1)?;
    let fx = path.pairs.mediate(&f.compose_unchecked(&pairs.p1), &pairs.p2)?;
    let square = pullback(&fx, &path.boundary)?;
    let e = pairs.p2.compose_unchecked(&square.p1);
    let proj = pairs.p1.compose_unchecked(&square.p1);
    let graph = pairs.mediate(&PresheafMap::identity(x0), f)?;
    let j = square.mediate(&graph, &path.refl.compose_unchecked(f))?;
    postcondition(e.compose_unchecked(&j).same_as(f), "e ∘ j differs from f")?;
    postcondition(
        proj.compose_unchecked(&j).same_as(&PresheafMap::identity(x0)),
        "j is not a section of the projection",
    )?;
    let top = ArrowSquare::new(j.clone(), path.refl.clone(), f.clone(), square.p2.clone())?;
    postcondition(is_pullback_square(&top)?, "reflexivity square is not a pullback")?;
    let anchor = p1.compose_unchecked(&e);
    Ok(MappingCocylinder {
        total: square.apex.clone(),
        j,
        e,
        proj,
        path,
        pairs,
        square,
        anchor,
    })
}

/// Whether `f` is an equivalence: the second leg of its mapping cocylinder
/// is a trivial fibration.
pub fn is_equivalence(s: &IntervalStructure, f: &PresheafMap, base: Option<&PresheafMap>) -> Result<bool> {
    let mc = mapping_cocylinder(s, f, base)?;
    is_trivial_fibration(&mc.e)
}

/// A homotopy inverse `g` of `f` with `g ∘ f ≃ id` and `f ∘ g ≃ id`.
#[derive(Debug, Clone)]
pub struct HomotopyInverse {
    pub inverse: PresheafMap,
    pub left: Homotopy,
    pub right: Homotopy,
}

/// Bounded search for a homotopy inverse of `f`, over `base: X_1 → A` when
/// given. Maps `g` are tried in search order.
pub fn find_homotopy_inverse(
    s: &IntervalStructure,
    f: &PresheafMap,
    base: Option<&PresheafMap>,
    budget: u64,
) -> Result<Option<HomotopyInverse>> {
    let (x0, x1) = (f.source(), f.target());
    let p0 = base.map(|q| q.compose_unchecked(f));
    let mut search = MapSearch::new(x1, x0).budget(budget);
    if let (Some(q), Some(p0)) = (base, &p0) {
        search = search.over(p0, q);
    }
    let id0 = PresheafMap::identity(x0);
    let id1 = PresheafMap::identity(x1);
    let mut out = None;
    let mut err = None;
    let r = search.for_each(|gc| {
        let g = PresheafMap::from_parts(x1.clone(), x0.clone(), gc.to_vec());
        let step = || -> Result<Option<HomotopyInverse>> {
            let Some(left) = find_homotopy(s, &g.compose_unchecked(f), &id0, p0.as_ref(), budget)? else {
                return Ok(None);
            };
            let Some(right) = find_homotopy(s, &f.compose_unchecked(&g), &id1, base, budget)? else {
                return Ok(None);
            };
            Ok(Some(HomotopyInverse {
                inverse: g.clone(),
                left,
                right,
            }))
        };
        match step() {
            Ok(Some(h)) => {
                out = Some(h);
                ControlFlow::Break(())
            }
            Ok(None) => ControlFlow::Continue(()),
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    if out.is_none() && r == crate::search::Outcome::Exhausted {
        return Err(Error::BudgetExhausted("homotopy inverse search".into()));
    }
    Ok(out)
}

/// Transport between the end fibers of a fibration `p: X → I × A`.
#[derive(Debug, Clone)]
pub struct FiberTransport {
    /// `X_k`, the pullback of `p` along `δ_k × A`.
    pub fibers: [BaseChange; 2],
    /// `f_k: I × X_k → X`, lifting `δ_k × X_k`.
    pub lifts: [PresheafMap; 2],
    /// `u_0: X_0 → X_1` and `u_1: X_1 → X_0`, over `A`.
    pub maps: [PresheafMap; 2],
    /// `id ≃ u_1 u_0` on `X_0` and `id ≃ u_0 u_1` on `X_1`, over `A`.
    pub homotopies: [Homotopy; 2],
}

pub fn fiber_transport(s: &IntervalStructure, p: &PresheafMap, a: &Psh) -> Result<FiberTransport> {
    let ia = cyl(s, a);
    if !same_psh(p.target(), &ia.apex) {
        return Err(Error::InvalidMap("fiber transport needs a map into I × A".into()));
    }
    let q = SliceObject::new(p.clone());
    let fibers = [
        base_change(&end_inclusion(s, 0, &ia), &q)?,
        base_change(&end_inclusion(s, 1, &ia), &q)?,
    ];
    let cyls = [cyl(s, &fibers[0].slice.total), cyl(s, &fibers[1].slice.total)];
    let mut lifts = Vec::new();
    for k in 0..2 {
        let (xk, cx) = (&fibers[k], &cyls[k]);
        let bottom = PresheafMap::from_fn(&cx.apex, &ia.apex, |c, w| {
            let t = cx.p1.apply(c, w);
            let x = cx.p2.apply(c, w);
            ia.pair_index(c, t, xk.slice.anchor.apply(c, x)).expect("pair")
        });
        let r = MapSearch::new(&cx.apex, p.source())
            .fix_along(&end_inclusion(s, k, cx), &xk.proj)
            .over(p, &bottom)
            .budget(HOMOTOPY_BUDGET)
            .first();
        lifts.push(found(r, "no lift of the end inclusion; the map is not a fibration")?);
    }
    let lifts: [PresheafMap; 2] = [lifts[0].clone(), lifts[1].clone()];
    let transport = |k: usize| -> Result<PresheafMap> {
        let (from, to) = (&fibers[k], &fibers[1 - k]);
        let w = lifts[k].compose_unchecked(&end_inclusion(s, 1 - k, &cyls[k]));
        to.pullback.mediate(&from.slice.anchor, &w)
    };
    let maps = [transport(0)?, transport(1)?];
    let mut homotopies = Vec::new();
    for k in 0..2 {
        // on X_k: face at outer δ_{1-k} is u_k, sides are f_k and f_{1-k}(I × u_k)
        let (xk, cx) = (&fibers[k], &cyls[k]);
        let uk = &maps[k];
        let other = &fibers[1 - k];
        let face = other.proj.compose_unchecked(uk).compose_unchecked(&cx.p2);
        let back = lifts[1 - k].compose_unchecked(&cyl_map(s, uk));
        let anchor = &xk.slice.anchor;
        let bottom = |c: ObjId, u: usize, w: usize| {
            ia.pair_index(c, u, anchor.apply(c, cx.p2.apply(c, w))).expect("pair")
        };
        let fill = fill_box(s, 1 - k, cx, &face, [&lifts[k], &back], Some((p, &bottom)), HOMOTOPY_BUDGET)?;
        let raw = fill.at(s, k, cx);
        let body = xk.pullback.mediate(&anchor.compose_unchecked(&cx.p2), &raw)?;
        let h = Homotopy::from_body(s, cx.clone(), body)?;
        let round = maps[1 - k].compose_unchecked(uk);
        postcondition(
            h.connects(&PresheafMap::identity(&xk.slice.total), &round),
            "transport homotopy has the wrong ends",
        )?;
        postcondition(h.is_over(anchor), "transport homotopy is not over the base")?;
        homotopies.push(h);
    }
    let homotopies = [homotopies[0].clone(), homotopies[1].clone()];
    Ok(FiberTransport {
        fibers,
        lifts,
        maps,
        homotopies,
    })
}

/// A section `σ` of `p: Y → X` with a homotopy over `X` from `σ p` (at `δ_k`)
/// to the identity (at `δ_{1-k}`), constant along `σ`.
#[derive(Debug, Clone)]
pub struct Retraction {
    pub k: usize,
    pub section: PresheafMap,
    pub homotopy: Homotopy,
}

/// Extracts strong deformation data from a trivial fibration.
pub fn sdr_extract(s: &IntervalStructure, p: &PresheafMap, k: usize) -> Result<Retraction> {
    if k > 1 {
        return Err(Error::InvalidMap("endpoint index must be 0 or 1".into()));
    }
    if !is_trivial_fibration(p)? {
        return Err(Error::HypothesisFailure("map is not a trivial fibration".into()));
    }
    let (y, x) = (p.source(), p.target());
    let section = found(
        MapSearch::new(x, y)
            .over(p, &PresheafMap::identity(x))
            .budget(HOMOTOPY_BUDGET)
            .first(),
        "no section",
    )?;
    let cy = cyl(s, y);
    let cx = cyl(s, x);
    let sp = section.compose_unchecked(p);
    let along = cyl_map(s, &section);
    let on_section = section.compose_unchecked(&cx.p2);
    let bottom = p.compose_unchecked(&cy.p2);
    let body = found(
        MapSearch::new(&cy.apex, y)
            .fix_along(&end_inclusion(s, k, &cy), &sp)
            .fix_along(&end_inclusion(s, 1 - k, &cy), &PresheafMap::identity(y))
            .fix_along(&along, &on_section)
            .over(p, &bottom)
            .budget(HOMOTOPY_BUDGET)
            .first(),
        "no relative homotopy",
    )?;
    let homotopy = Homotopy::from_body(s, cy, body)?;
    let ends = if k == 0 {
        homotopy.connects(&sp, &PresheafMap::identity(y))
    } else {
        homotopy.connects(&PresheafMap::identity(y), &sp)
    };
    postcondition(ends && homotopy.is_over(p), "deformation data fails verification")?;
    Ok(Retraction { k, section, homotopy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::builtin_interval;
    use crate::lifting::is_fibration;
    use crate::nerve::{nerve, FiniteCategory};
    use crate::presheaf::{discrete, representable};
    use crate::site::{builtin_simplex_site, Site};
    use std::sync::Arc;

    fn simplex(n: usize) -> Arc<Site> {
        Arc::new(builtin_simplex_site(n).unwrap())
    }

    /// The vertex `e` as a map `1 → X`.
    fn point_to(x: &Psh, e: usize) -> PresheafMap {
        let site = x.site();
        let comps = site.objects().map(|d| vec![x.act(site.hom(d, 0)[0], e)]).collect();
        PresheafMap::new(terminal(site), x.clone(), comps).unwrap()
    }

    #[test]
    fn path_object_of_terminal_is_terminal() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let po = path_object(&s, &terminal(&site)).unwrap();
        assert_eq!(po.total.level_sizes(), vec![1, 1, 1]);
        assert!(po.refl.is_iso() && po.boundary.is_iso());
    }

    #[test]
    fn path_object_of_two_points_is_diagonal() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let x = discrete(&site, &["a", "b"]);
        let po = path_object(&s, &x).unwrap();
        // maps I × y(c) → discrete are constant, so PX ≅ X
        assert_eq!(po.total.level_sizes(), vec![2, 2, 2]);
        assert!(po.refl.is_iso());
        assert!(po.boundary.is_mono());
        assert_eq!(po.pairs.apex.level_sizes(), vec![4, 4, 4]);
    }

    #[test]
    fn path_object_of_a_groupoid_has_the_expected_projections() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let x = nerve(&site, &FiniteCategory::codiscrete(2)).unwrap().psh;
        assert!(is_fibration(&to_terminal(&x, &terminal(&site)), &s).unwrap());
        let po = path_object(&s, &x).unwrap();
        assert!(is_fibration(&po.boundary, &s).unwrap());
        assert!(is_trivial_fibration(&po.ends[0]).unwrap());
        assert!(is_trivial_fibration(&po.ends[1]).unwrap());
    }

    #[test]
    fn mapping_cocylinder_of_identity_is_path_object() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let x = nerve(&site, &FiniteCategory::codiscrete(2)).unwrap().psh;
        let mc = mapping_cocylinder(&s, &PresheafMap::identity(&x), None).unwrap();
        assert_eq!(mc.total.level_sizes(), mc.path.total.level_sizes());
        assert!(mc.square.p2.is_iso());
        assert!(mc.e.same_as(&mc.path.ends[1].compose_unchecked(&mc.square.p2)));
    }

    #[test]
    fn mapping_cocylinder_into_terminal_is_the_source() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let x = discrete(&site, &["a", "b", "c"]);
        let f = to_terminal(&x, &terminal(&site));
        let mc = mapping_cocylinder(&s, &f, None).unwrap();
        assert!(mc.proj.is_iso());
    }

    /// Elements of `X_0 ×_{X_1} X_1^{I}` counted directly: pairs of an element
    /// and a map `I × y(c) → X_1` starting at its image.
    fn naive_cocylinder_sizes(s: &IntervalStructure, f: &PresheafMap) -> Vec<usize> {
        let site = f.site();
        let x1 = f.target();
        let mut out = Vec::new();
        for c in site.objects() {
            let yc = representable(site, c).unwrap();
            let icy = cyl(s, &yc);
            let inc0 = end_inclusion(s, 0, &icy);
            let mut n = 0;
            let paths = MapSearch::new(&icy.apex, x1).all().unwrap();
            for x0 in 0..f.source().size(c) {
                for g in &paths {
                    // g restricted to δ_0 must be y(c) → X_1 classifying f(x0)
                    let start = g.compose_unchecked(&inc0);
                    let id_index = site.hom(c, c).iter().position(|&m| site.is_identity(m)).unwrap();
                    let elt = start.apply(c, id_index);
                    if elt == f.apply(c, x0) {
                        n += 1;
                    }
                }
            }
            out.push(n);
        }
        out
    }

    #[test]
    fn mapping_cocylinder_of_an_endpoint_matches_direct_count() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let y1 = representable(&site, 1).unwrap();
        let f = s.delta[0].retyped(terminal(&site), y1.clone());
        let mc = mapping_cocylinder(&s, &f, None).unwrap();
        assert_eq!(mc.total.level_sizes(), naive_cocylinder_sizes(&s, &f));
    }

    #[test]
    fn homotopy_search() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let f = s.delta[0].clone();
        let g = s.delta[1].clone();
        let h = find_homotopy(&s, &f, &g, None, HOMOTOPY_BUDGET).unwrap().unwrap();
        // I × 1 → I is forced to be the projection
        assert!(h.body.is_iso());
        assert!(find_homotopy(&s, &g, &f, None, HOMOTOPY_BUDGET).unwrap().is_none());
        let d = discrete(&site, &["a", "b"]);
        let a = point_to(&d, 0);
        let b = point_to(&d, 1);
        assert!(find_homotopy(&s, &a, &b, None, HOMOTOPY_BUDGET).unwrap().is_none());
        let c = find_homotopy(&s, &a, &a, None, HOMOTOPY_BUDGET).unwrap().unwrap();
        assert!(c.body.same_as(&a.compose_unchecked(&c.cyl.p2)));
    }

    #[test]
    fn homotopies_compose_and_invert_in_a_groupoid() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let x = nerve(&site, &FiniteCategory::codiscrete(3)).unwrap().psh;
        let pts: Vec<PresheafMap> = (0..3).map(|i| point_to(&x, i)).collect();
        let h01 = find_homotopy(&s, &pts[0], &pts[1], None, HOMOTOPY_BUDGET).unwrap().unwrap();
        let h12 = find_homotopy(&s, &pts[1], &pts[2], None, HOMOTOPY_BUDGET).unwrap().unwrap();
        let h02 = compose_homotopies(&s, &h01, &h12, None).unwrap();
        assert!(h02.connects(&pts[0], &pts[2]));
        let inv = invert_homotopy(&s, &h01, None).unwrap();
        assert!(inv.connects(&pts[1], &pts[0]));
        let back = invert_homotopy(&s, &inv, None).unwrap();
        assert!(back.connects(&pts[0], &pts[1]));
        let unit = compose_homotopies(&s, &h01, &Homotopy::constant(&s, &pts[1]), None).unwrap();
        assert!(unit.connects(&pts[0], &pts[1]));
        // a loop composed with its inverse is homotopic to the constant path
        let lp = compose_homotopies(&s, &h01, &inv, None).unwrap();
        assert!(lp.connects(&pts[0], &pts[0]));
    }

    #[test]
    fn equivalences() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let one = terminal(&site);
        let x = nerve(&site, &FiniteCategory::codiscrete(2)).unwrap().psh;
        assert!(is_equivalence(&s, &PresheafMap::identity(&x), None).unwrap());
        assert!(is_equivalence(&s, &to_terminal(&x, &one), None).unwrap());
        let two = discrete(&site, &["a", "b"]);
        assert!(!is_equivalence(&s, &to_terminal(&two, &one), None).unwrap());
        // Δ¹ is not fibrant and Δ¹ → Δ⁰ fails the definition
        let y1 = representable(&site, 1).unwrap();
        assert!(!is_equivalence(&s, &to_terminal(&y1, &one), None).unwrap());
    }

    #[test]
    fn homotopy_inverse_of_groupoid_contraction() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let one = terminal(&site);
        let x = nerve(&site, &FiniteCategory::codiscrete(2)).unwrap().psh;
        let inv = find_homotopy_inverse(&s, &to_terminal(&x, &one), None, HOMOTOPY_BUDGET)
            .unwrap()
            .unwrap();
        assert!(inv.right.connects(&PresheafMap::identity(&one), &PresheafMap::identity(&one)));
        let two = discrete(&site, &["a", "b"]);
        assert!(find_homotopy_inverse(&s, &to_terminal(&two, &one), None, HOMOTOPY_BUDGET)
            .unwrap()
            .is_none());
    }

    #[test]
    fn transport_along_a_product() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let one = terminal(&site);
        let fib = discrete(&site, &["a", "b"]);
        let ia = cyl(&s, &one);
        let tot = product(&fib, &ia.apex);
        let t = fiber_transport(&s, &tot.p2, &one).unwrap();
        assert!(t.maps[0].is_iso() && t.maps[1].is_iso());
        for k in 0..2 {
            assert_eq!(t.fibers[k].slice.total.level_sizes(), vec![2, 2, 2]);
        }
    }

    #[test]
    fn transport_of_empty_fibration() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let one = terminal(&site);
        let ia = cyl(&s, &one);
        let empty = crate::presheaf::initial(&site);
        let p = crate::presheaf::from_initial(&empty, &ia.apex);
        let t = fiber_transport(&s, &p, &one).unwrap();
        assert!(t.fibers[0].slice.total.is_empty());
        assert!(t.maps[0].source().is_empty());
    }

    #[test]
    fn retraction_of_trivial_fibrations() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let one = terminal(&site);
        let r = sdr_extract(&s, &PresheafMap::identity(&one), 0).unwrap();
        assert!(r.section.is_iso());
        let x = nerve(&site, &FiniteCategory::codiscrete(2)).unwrap().psh;
        for k in 0..2 {
            let po = path_object(&s, &x).unwrap();
            let r = sdr_extract(&s, &po.ends[k], k).unwrap();
            assert!(po.ends[k].compose_unchecked(&r.section).is_iso());
        }
        let y1 = representable(&site, 1).unwrap();
        assert!(matches!(
            sdr_extract(&s, &to_terminal(&y1, &one), 0),
            Err(Error::HypothesisFailure(_))
        ));
    }
}
