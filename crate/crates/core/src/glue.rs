//! Equivalence extension and extension of fibrations along cofibrations.

use crate::cylinder::{cyl, leibniz_tensor, theta_square, IntervalStructure};
use crate::error::{Error, Result};
use crate::homotopy::{
    fiber_transport, is_equivalence, mapping_cocylinder, relative_path_object, FiberTransport,
    MappingCocylinder,
};
use crate::lcc::{adjunction_unit, base_change, pushforward, BaseChange, Pushforward, SliceObject};
use crate::lifting::{
    biased_retract_verify, connection_retraction, is_fibration, is_trivial_fibration, CellCertificate,
    GeneratorFamily,
};
use crate::limits::{is_pullback_square, product, pullback, pushout};
use crate::presheaf::{boundary, image_mask, same_psh, subobject_from_mask, ArrowSquare, PresheafMap};
use crate::search::{Found, MapSearch};
use std::collections::HashMap;

fn hypothesis(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisFailure(what.to_string()))
    }
}

fn postcondition(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::PostconditionFailure(what.to_string()))
    }
}

/// An isomorphism `p → q` commuting with the given maps `p → Z`, `q → Z`.
pub fn iso_over(p: &PresheafMap, q: &PresheafMap) -> Option<PresheafMap> {
    if p.source().level_sizes() != q.source().level_sizes() {
        return None;
    }
    MapSearch::new(p.source(), q.source()).over(q, p).injective().first().map()
}

/// The solid part of the glueing diagram.
#[derive(Debug, Clone)]
pub struct GlueInput {
    /// The cofibration `m: A → B`.
    pub m: PresheafMap,
    /// `Y_1 → B`.
    pub y1: SliceObject,
    /// `X_1 = A ×_B Y_1` with its map to `Y_1`.
    pub x1: BaseChange,
    /// `X_0 → A`.
    pub x0: SliceObject,
    /// `f: X_0 → X_1` over `A`.
    pub f: PresheafMap,
}

impl GlueInput {
    /// Builds the input; `f` must land in `A ×_B Y_1` as computed by
    /// `base_change(m, y1)`.
    pub fn new(m: PresheafMap, y1: SliceObject, x0: SliceObject, f: PresheafMap) -> Result<Self> {
        if !same_psh(y1.base(), m.target()) || !same_psh(x0.base(), m.source()) {
            return Err(Error::InvalidMap("glue input bases do not match the cofibration".into()));
        }
        let x1 = base_change(&m, &y1)?;
        if !same_psh(f.source(), &x0.total) || !same_psh(f.target(), &x1.slice.total) {
            return Err(Error::InvalidMap("equivalence must run from X_0 to A ×_B Y_1".into()));
        }
        let f = f.retyped(x0.total.clone(), x1.slice.total.clone());
        Ok(GlueInput { m, y1, x1, x0, f })
    }

    /// Checks every hypothesis, naming the first one that fails.
    pub fn validate(&self, s: &IntervalStructure) -> Result<()> {
        hypothesis(self.m.is_mono(), "A → B is not a cofibration")?;
        let lower = ArrowSquare::new(
            self.x1.slice.anchor.clone(),
            self.y1.anchor.clone(),
            self.x1.proj.clone(),
            self.m.clone(),
        )?;
        hypothesis(is_pullback_square(&lower)?, "lower square is not a pullback")?;
        hypothesis(
            self.x1.slice.anchor.compose_unchecked(&self.f).same_as(&self.x0.anchor),
            "X_0 → X_1 is not over A",
        )?;
        hypothesis(is_fibration(&self.x0.anchor, s)?, "X_0 → A is not a fibration")?;
        hypothesis(is_fibration(&self.y1.anchor, s)?, "Y_1 → B is not a fibration")?;
        hypothesis(
            is_equivalence(s, &self.f, Some(&self.x1.slice.anchor))?,
            "X_0 → X_1 is not an equivalence over A",
        )?;
        Ok(())
    }
}

/// The completed glueing diagram.
#[derive(Debug, Clone)]
pub struct GlueOutput {
    /// `Y_0 → B`.
    pub y0: SliceObject,
    /// `Y_0 → Y_1`.
    pub to_y1: PresheafMap,
    /// `X_0 → Y_0` over `A → B`.
    pub back: ArrowSquare,
    /// `N → Y_1`, the pushforward of the mapping cocylinder.
    pub n: SliceObject,
    pub y0_to_n: PresheafMap,
    pub cocylinder: MappingCocylinder,
    /// Named postconditions, all verified.
    pub checks: Vec<(String, bool)>,
}

/// Extends `X_0 → X_1` along `A → B` to `Y_0 → Y_1`.
pub fn equivalence_extend(s: &IntervalStructure, input: &GlueInput) -> Result<GlueOutput> {
    input.validate(s)?;
    let mc = mapping_cocylinder(s, &input.f, Some(&input.x1.slice.anchor))?;
    postcondition(is_trivial_fibration(&mc.e)?, "M → X_1 is not a trivial fibration")?;
    let i = &input.x1.proj;
    postcondition(i.is_mono(), "X_1 → Y_1 is not mono")?;
    let pf0 = pushforward(i, &SliceObject::new(input.f.clone()))?;
    let pfm = pushforward(i, &SliceObject::new(mc.e.clone()))?;
    let y0_to_n = pf0.functor_map(&pfm, &mc.j)?;
    let to_y1 = pf0.slice.anchor.clone();
    let y0 = SliceObject::new(input.y1.anchor.compose_unchecked(&to_y1));
    let unit = pf0
        .unit_square
        .as_ref()
        .ok_or_else(|| Error::PostconditionFailure("pushforward along a mono lacks its unit".into()))?;
    let back = ArrowSquare::new(input.x0.anchor.clone(), y0.anchor.clone(), unit.top.clone(), input.m.clone())?;
    let n = pfm.slice.clone();
    let mut checks = Vec::new();
    checks.push(("back square is a pullback".to_string(), is_pullback_square(&back)?));
    checks.push(("Y_0 → B is a fibration".to_string(), is_fibration(&y0.anchor, s)?));
    checks.push((
        "Y_0 → Y_1 is an equivalence over B".to_string(),
        is_equivalence(s, &to_y1, Some(&input.y1.anchor))?,
    ));
    checks.push(("N → Y_1 is a trivial fibration".to_string(), is_trivial_fibration(&n.anchor)?));
    checks.push((
        "induced decomposition is the mapping cocylinder factorization".to_string(),
        decomposition_is_cocylinder(s, input, &to_y1)?,
    ));
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::PostconditionFailure(name.clone()));
    }
    Ok(GlueOutput {
        y0,
        to_y1,
        back,
        n,
        y0_to_n,
        cocylinder: mc,
        checks,
    })
}

/// Builds `Q = m_* X_0 ×_{m_* X_1} P_B Y_1` (paths whose start lies in the
/// image of `m_* f`) with `Y_0 → Q → Y_1`, and compares it with the mapping
/// cocylinder of `Y_0 → Y_1` over `B`.
fn decomposition_is_cocylinder(s: &IntervalStructure, input: &GlueInput, to_y1: &PresheafMap) -> Result<bool> {
    let m = &input.m;
    let path = relative_path_object(s, &input.y1.anchor)?;
    let (pf_y, eta) = adjunction_unit(m, &input.y1)?;
    let pf_x0 = pushforward(m, &input.x0)?;
    let mf = pf_x0.functor_map(&pf_y, &input.f)?;
    let start = eta.compose_unchecked(&path.ends[0]);
    let q = pullback(&mf, &start)?;
    let y0 = pullback(&mf, &eta)?;
    let j = q.mediate(&y0.p1, &path.refl.compose_unchecked(&y0.p2))?;
    let e = path.ends[1].compose_unchecked(&q.p2);
    let Some(iso) = iso_over(to_y1, &y0.p2) else {
        return Ok(false);
    };
    let own = mapping_cocylinder(s, to_y1, Some(&input.y1.anchor))?;
    let j = j.compose_unchecked(&iso);
    if j.target().level_sizes() != own.total.level_sizes() {
        return Ok(false);
    }
    let found = MapSearch::new(j.target(), &own.total)
        .fix_along(&j, &own.j)
        .over(&own.e, &e)
        .injective()
        .first();
    Ok(matches!(found, Found::Map(_)))
}

/// The two factors of `Y_1 → (I ⊘_B Y_1)^A ×_{Y_1^A} Y_1`: whether the
/// `δ_0` projection of the path object over `B` is a trivial fibration, and
/// whether the Leibniz exponential of the `δ_1` projection with `m` is.
pub fn glue_factor_checks(s: &IntervalStructure, m: &PresheafMap, y1: &SliceObject) -> Result<[bool; 2]> {
    let path = relative_path_object(s, &y1.anchor)?;
    let first = is_trivial_fibration(&path.ends[0])?;
    let p = path.slice();
    let (pf_p, eta_p) = adjunction_unit(m, &p)?;
    let (pf_y, eta_y) = adjunction_unit(m, y1)?;
    let bc_p = base_change(m, &p)?;
    let bc_y = base_change(m, y1)?;
    let e1 = &path.ends[1];
    let phi = bc_y
        .pullback
        .mediate(&bc_p.slice.anchor, &e1.compose_unchecked(&bc_p.proj))?;
    let e1_a = pf_p.functor_map(&pf_y, &phi)?;
    let corner = pullback(&e1_a, &eta_y)?;
    let leibniz = corner.mediate(&eta_p, e1)?;
    let second = is_trivial_fibration(&leibniz)?;
    Ok([first, second])
}

/// A trivial fibration extended along a cofibration.
#[derive(Debug, Clone)]
pub struct TrivfibExtension {
    pub pushforward: Pushforward,
    /// `X → Y` over `m`, a pullback.
    pub back: ArrowSquare,
}

impl TrivfibExtension {
    pub fn extension(&self) -> &SliceObject {
        &self.pushforward.slice
    }
}

/// Extends a trivial fibration `p` over `A` along `m: A → B` by pushforward.
pub fn trivfib_extend(m: &PresheafMap, p: &SliceObject) -> Result<TrivfibExtension> {
    hypothesis(m.is_mono(), "A → B is not a cofibration")?;
    hypothesis(is_trivial_fibration(&p.anchor)?, "X → A is not a trivial fibration")?;
    let pf = pushforward(m, p)?;
    let back = pf
        .unit_square
        .clone()
        .ok_or_else(|| Error::PostconditionFailure("pushforward along a mono lacks its unit".into()))?;
    postcondition(is_pullback_square(&back)?, "back square is not a pullback")?;
    postcondition(is_trivial_fibration(&pf.slice.anchor)?, "Y → B is not a trivial fibration")?;
    Ok(TrivfibExtension { pushforward: pf, back })
}

/// A fibration extended along `θ_k ⊗̂ m`.
#[derive(Debug, Clone)]
pub struct ThetaExtension {
    pub k: usize,
    pub square: ArrowSquare,
    /// The part of the input over `B`.
    pub y1: BaseChange,
    /// The part of the input over `I × A`.
    pub cylinder_part: BaseChange,
    pub transport: FiberTransport,
    pub glue: GlueOutput,
    /// The comparison from the input restricted along the top of the
    /// square to the output restricted along `m`; an isomorphism over `A`.
    pub coherence: PresheafMap,
}

impl ThetaExtension {
    pub fn extension(&self) -> &SliceObject {
        &self.glue.y0
    }
}

/// Extends a fibration `q` over `B ⊔_A (I × A)` (the domain of `δ_k ⊗̂ m`)
/// to a fibration over `B`.
pub fn fib_extend_theta(s: &IntervalStructure, k: usize, m: &PresheafMap, q: &SliceObject) -> Result<ThetaExtension> {
    hypothesis(m.is_mono(), "A → B is not a cofibration")?;
    let (square, lt) = theta_square(s, k, m)?;
    let po = &lt.pushout;
    if !same_psh(q.base(), &po.apex) {
        return Err(Error::InvalidMap("fibration is not over the domain of δ_k ⊗̂ m".into()));
    }
    let q = SliceObject::new(q.anchor.retyped(q.total.clone(), po.apex.clone()));
    hypothesis(is_fibration(&q.anchor, s)?, "map is not a fibration")?;
    let (a, b) = (m.source(), m.target());
    let one_b = product(&s.one, b);
    let into_one_b = PresheafMap::from_fn(b, &one_b.apex, |c, x| one_b.pair_index(c, 0, x).expect("pair"));
    let jb = po.i1.compose_unchecked(&into_one_b);
    let y1 = base_change(&jb, &q)?;
    let ia = cyl(s, a);
    let ja = po.i2.retyped(ia.apex.clone(), po.apex.clone());
    let xi = base_change(&ja, &q)?;
    let transport = fiber_transport(s, &xi.slice.anchor, a)?;
    // the fiber at δ_k is A ×_B Y_1 up to the canonical comparison
    let x1 = base_change(m, &y1.slice)?;
    let near = &transport.fibers[k];
    let to_y1 = y1.pullback.mediate(
        &m.compose_unchecked(&near.slice.anchor),
        &xi.proj.compose_unchecked(&near.proj),
    )?;
    let compare = x1.pullback.mediate(&near.slice.anchor, &to_y1)?;
    postcondition(compare.is_iso(), "end fiber differs from the restriction of the B part")?;
    let f = compare.compose_unchecked(&transport.maps[1 - k]);
    let x0 = transport.fibers[1 - k].slice.clone();
    let input = GlueInput::new(m.clone(), y1.slice.clone(), x0, f)?;
    let glue = equivalence_extend(s, &input)?;
    // coherence: top^* q → X_0 → m^* Y_0
    let top_q = base_change(&square.top, &q)?;
    let far = &transport.fibers[1 - k];
    let to_x0 = PresheafMap::from_fn(&top_q.slice.total, &far.slice.total, |c, w| {
        let aa = top_q.pullback.p1.apply(c, w);
        let z = top_q.pullback.p2.apply(c, w);
        let t = ia.pair_index(c, s.endpoint_at(1 - k, c), aa).expect("pair");
        let xi_el = xi.pullback.pair_index(c, t, z).expect("pair in cylinder part");
        far.pullback.pair_index(c, aa, xi_el).expect("pair in end fiber")
    });
    let out = base_change(m, &glue.y0)?;
    let coherence = out
        .pullback
        .mediate(&top_q.slice.anchor, &glue.back.top.compose_unchecked(&to_x0))?;
    postcondition(coherence.is_iso(), "extension does not restrict to the input")?;
    Ok(ThetaExtension {
        k,
        square,
        y1,
        cylinder_part: xi,
        transport,
        glue,
        coherence,
    })
}

/// A fibration extended along a single generator `δ_k ⊗̂ m` of `J`.
#[derive(Debug, Clone)]
pub struct GeneratorExtension {
    pub extension: SliceObject,
    /// `E → l^* Y`, an isomorphism over the domain of the generator.
    pub coherence: PresheafMap,
    pub theta: ThetaExtension,
}

/// Extends `e` over the domain of `l = δ_k ⊗̂ m` to its codomain, through the
/// θ-square and the connection retraction.
pub fn fib_extend_generator(
    s: &IntervalStructure,
    k: usize,
    m: &PresheafMap,
    e: &SliceObject,
) -> Result<GeneratorExtension> {
    let (theta, r) = connection_retraction(s, k, m)?;
    let l = theta.left.clone();
    if !same_psh(e.base(), l.source()) {
        return Err(Error::InvalidMap("fibration is not over the generator's domain".into()));
    }
    let e = SliceObject::new(e.anchor.retyped(e.total.clone(), l.source().clone()));
    let id = ArrowSquare::identity_on(&l);
    postcondition(biased_retract_verify(&id, &theta, &id, &r), "θ-square is not a biased retract")?;
    let q_l = base_change(&r.top, &e)?;
    let theta_ext = fib_extend_theta(s, k, &l, &q_l.slice)?;
    // E → θ.top^* r.top^* E, then the coherence of the θ-extension
    let top_q = base_change(&theta.top, &q_l.slice)?;
    let to_top = PresheafMap::from_fn(&e.total, &top_q.slice.total, |c, x| {
        let u = e.anchor.apply(c, x);
        let w = theta.top.apply(c, u);
        let z = q_l.pullback.pair_index(c, w, x).expect("pair");
        top_q.pullback.pair_index(c, u, z).expect("pair")
    });
    let coherence = theta_ext.coherence.compose_unchecked(&to_top);
    postcondition(coherence.is_iso(), "generator extension does not restrict to the input")?;
    Ok(GeneratorExtension {
        extension: theta_ext.glue.y0.clone(),
        coherence,
        theta: theta_ext,
    })
}

/// A fibration extended along a certified relative cell complex.
#[derive(Debug, Clone)]
pub struct CellularExtension {
    /// `Y → B`.
    pub extension: SliceObject,
    /// `X → Y` over `m`, a pullback.
    pub back: ArrowSquare,
    pub cells: usize,
}

/// Reads `k` and the object of a member named `d<k>*bd<obj>`.
fn parse_generator(name: &str) -> Option<(usize, &str)> {
    let rest = name.strip_prefix('d')?;
    let (k, obj) = rest.split_once("*bd")?;
    let k: usize = k.parse().ok()?;
    (k <= 1).then_some((k, obj))
}

/// Extends `p` over `A` along `m: A → B` presented by `cert` over `family`.
pub fn fib_extend_cellular(
    s: &IntervalStructure,
    m: &PresheafMap,
    cert: &CellCertificate,
    family: &GeneratorFamily,
    p: &SliceObject,
) -> Result<CellularExtension> {
    hypothesis(m.is_mono(), "A → B is not a cofibration")?;
    if !same_psh(p.base(), m.source()) {
        return Err(Error::InvalidMap("fibration is not over the domain of the cofibration".into()));
    }
    hypothesis(is_fibration(&p.anchor, s)?, "X → A is not a fibration")?;
    let site = m.site().clone();
    let b = m.target().clone();
    // current stage: a subobject S of B with E → S, and X → E
    let mut mask = image_mask(m);
    let (_, mut incl) = subobject_from_mask(&b, &mask);
    let a_to_s = factor_through(m, &incl)?;
    let mut e = SliceObject::new(a_to_s.compose_unchecked(&p.anchor));
    let mut fwd = PresheafMap::identity(&p.total);
    let mut cells = 0;
    for (si, stage) in cert.stages.iter().enumerate() {
        postcondition(stage.before == mask, "certificate stage does not start at the current subobject")?;
        for cell in &stage.cells {
            let member = family
                .members
                .iter()
                .find(|x| x.name == cell.member && x.is_arrow)
                .ok_or_else(|| Error::HypothesisFailure(format!("cell `{}` is not in the family", cell.member)))?;
            let (k, obj) = parse_generator(&cell.member)
                .ok_or_else(|| Error::HypothesisFailure(format!("cell `{}` is not a J generator", cell.member)))?;
            let bd = boundary(&site, site.object_id(obj)?)?;
            let lt = leibniz_tensor(&s.delta[k], &bd)?;
            let l = lt.map;
            let j = member.attach();
            postcondition(
                same_psh(l.source(), j.source()) && same_psh(l.target(), j.target()) && l.same_as(j),
                "generator differs from its family member",
            )?;
            let phi = cell.phi.retyped(l.target().clone(), b.clone());
            let attach = factor_through(&phi.compose_unchecked(&l), &incl)?;
            let e_c = base_change(&attach, &e)?;
            let gen = fib_extend_generator(s, k, &bd, &e_c.slice)?;
            let d_side = base_change(&l, &gen.extension)?;
            let into_d = d_side.proj.compose_unchecked(&gen.coherence);
            let total_po = pushout(&e_c.proj, &into_d)?;
            let mut next = mask.clone();
            for (row, irow) in next.iter_mut().zip(image_mask(&phi)) {
                for (x, y) in row.iter_mut().zip(irow) {
                    *x |= y;
                }
            }
            let (_, incl2) = subobject_from_mask(&b, &next);
            let s_to = factor_through(&incl, &incl2)?;
            let d_to = factor_through(&phi, &incl2)?;
            let base_po = pushout(&attach, &l)?;
            postcondition(
                base_po.copair(&s_to, &d_to)?.is_iso(),
                &format!("stage {} cell is not a pushout", si + 1),
            )?;
            let anchor = total_po.copair(
                &s_to.compose_unchecked(&e.anchor),
                &d_to.compose_unchecked(&gen.extension.anchor),
            )?;
            fwd = total_po.i1.compose_unchecked(&fwd);
            e = SliceObject::new(anchor);
            incl = incl2;
            mask = next;
            cells += 1;
        }
        postcondition(stage.after == mask, "certificate stage does not end at the computed subobject")?;
    }
    postcondition(incl.is_iso(), "certificate does not exhaust the codomain")?;
    let extension = SliceObject::new(incl.compose_unchecked(&e.anchor));
    let back = ArrowSquare::new(p.anchor.clone(), extension.anchor.clone(), fwd, m.clone())?;
    postcondition(is_pullback_square(&back)?, "extension does not restrict to the input")?;
    postcondition(is_fibration(&extension.anchor, s)?, "extension is not a fibration")?;
    Ok(CellularExtension { extension, back, cells })
}

/// The unique `g` with `incl ∘ g = f` for mono `incl`.
fn factor_through(f: &PresheafMap, incl: &PresheafMap) -> Result<PresheafMap> {
    let site = f.site();
    let mut comps = Vec::new();
    for c in site.objects() {
        let pos: HashMap<usize, usize> = (0..incl.source().size(c)).map(|i| (incl.apply(c, i), i)).collect();
        let mut comp = Vec::new();
        for x in 0..f.source().size(c) {
            comp.push(
                *pos.get(&f.apply(c, x))
                    .ok_or_else(|| Error::InvalidMap("map does not factor through the subobject".into()))?,
            );
        }
        comps.push(comp);
    }
    PresheafMap::new(f.source().clone(), incl.source().clone(), comps)
}
