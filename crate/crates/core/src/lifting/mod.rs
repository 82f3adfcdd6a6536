//! Lifting problems, right lifting properties and generator families.

mod cells;

pub use cells::{cell_certify, factorize_bounded, CellCertificate, CellOutcome, CellStage, Factorization, PlacedCell};

use crate::cylinder::{leibniz_tensor, theta_square, IntervalStructure};
use crate::error::{Error, Result};
use crate::presheaf::{boundary, horn, same_psh, ArrowSquare, PresheafMap};
use crate::search::{Found, MapSearch, Outcome};
use crate::site::Site;
use rayon::prelude::*;
use std::ops::ControlFlow;
use std::sync::Arc;

/// Lifting a square `l' → l` against `p`, given `u: dom l → X`, `v: cod l → Y`.
///
/// A filler is `d: cod l' → X` with `d ∘ l' = u ∘ top` and `p ∘ d = v ∘ bottom`.
#[derive(Debug, Clone)]
pub struct LiftingProblem {
    pub left: ArrowSquare,
    pub right: PresheafMap,
    pub u: PresheafMap,
    pub v: PresheafMap,
}

impl LiftingProblem {
    pub fn new(left: ArrowSquare, right: PresheafMap, u: PresheafMap, v: PresheafMap) -> Result<Self> {
        let l = &left.right;
        let ok = same_psh(u.source(), l.source())
            && same_psh(v.source(), l.target())
            && same_psh(u.target(), right.source())
            && same_psh(v.target(), right.target());
        if !ok {
            return Err(Error::InvalidMap("lifting problem maps do not fit together".into()));
        }
        if right.compose_unchecked(&u).components() != v.compose_unchecked(l).components() {
            return Err(Error::InvalidMap("outer square of the lifting problem does not commute".into()));
        }
        Ok(LiftingProblem { left, right, u, v })
    }

    /// An arrow-versus-arrow problem.
    pub fn arrow(l: &PresheafMap, p: &PresheafMap, u: PresheafMap, v: PresheafMap) -> Result<Self> {
        Self::new(ArrowSquare::identity_on(l), p.clone(), u, v)
    }
}

fn filler_search<'a>(prob: &LiftingProblem) -> MapSearch<'a> {
    let sq = &prob.left;
    let top = prob.u.compose_unchecked(&sq.top);
    let bottom = prob.v.compose_unchecked(&sq.bottom);
    MapSearch::new(sq.left.target(), prob.right.source())
        .fix_along(&sq.left, &top)
        .over(&prob.right, &bottom)
}

/// The first filler in canonical order, or `None` when none exists.
pub fn solve_lift(prob: &LiftingProblem) -> Option<PresheafMap> {
    filler_search(prob).first().map()
}

/// Like [`solve_lift`] with a node budget.
pub fn solve_lift_bounded(prob: &LiftingProblem, budget: u64) -> Found {
    filler_search(prob).budget(budget).first()
}

/// Number of fillers.
pub fn count_fillers(prob: &LiftingProblem) -> Option<u64> {
    filler_search(prob).count()
}

/// A named member of a generator family.
#[derive(Debug, Clone)]
pub struct Member {
    pub name: String,
    pub square: ArrowSquare,
    pub is_arrow: bool,
}

impl Member {
    pub fn arrow(name: impl Into<String>, l: PresheafMap) -> Self {
        Member {
            name: name.into(),
            square: ArrowSquare::identity_on(&l),
            is_arrow: true,
        }
    }

    pub fn square(name: impl Into<String>, sq: ArrowSquare) -> Self {
        Member {
            name: name.into(),
            square: sq,
            is_arrow: false,
        }
    }

    /// The arrow the attachments are made to.
    pub fn attach(&self) -> &PresheafMap {
        &self.square.right
    }
}

/// An ordered family of arrows or squares.
#[derive(Debug, Clone)]
pub struct GeneratorFamily {
    pub name: String,
    pub members: Vec<Member>,
}

/// Boundary inclusions `∂c ↪ c` in object order.
pub fn gen_cofibrations(site: &Arc<Site>) -> Result<GeneratorFamily> {
    let members = site
        .objects()
        .map(|c| Ok(Member::arrow(format!("bd{}", site.object_label(c)), boundary(site, c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorFamily {
        name: "GenCof".into(),
        members,
    })
}

/// Objects whose Leibniz products with the interval stay within the site.
fn cylinder_objects(site: &Site, upto: Option<usize>) -> Result<Vec<usize>> {
    let top = site.max_degree();
    if let Some(n) = upto {
        if n + 1 > top {
            return Err(Error::DimensionBudgetExceeded(format!(
                "cylinders on degree {n} need degree {}, site stops at {top}",
                n + 1
            )));
        }
    }
    let limit = upto.unwrap_or(top.saturating_sub(1));
    Ok(site.objects().filter(|&c| site.degree(c) <= limit && site.degree(c) < top).collect())
}

/// `J = {δ_k ⊗̂ (∂c ↪ c)}` for objects `c` whose cylinder fits in the site.
pub fn gen_trivcofs(site: &Arc<Site>, s: &IntervalStructure) -> Result<GeneratorFamily> {
    gen_trivcofs_upto(site, s, None)
}

pub fn gen_trivcofs_upto(site: &Arc<Site>, s: &IntervalStructure, upto: Option<usize>) -> Result<GeneratorFamily> {
    let mut members = Vec::new();
    for k in 0..2 {
        for c in cylinder_objects(site, upto)? {
            let m = boundary(site, c)?;
            let l = leibniz_tensor(&s.delta[k], &m)?.map;
            members.push(Member::arrow(format!("d{k}*bd{}", site.object_label(c)), l));
        }
    }
    Ok(GeneratorFamily {
        name: "J".into(),
        members,
    })
}

/// `J' = {θ_k ⊗̂ (∂c ↪ c)}`, as squares.
pub fn gen_squares(site: &Arc<Site>, s: &IntervalStructure) -> Result<GeneratorFamily> {
    let mut members = Vec::new();
    for k in 0..2 {
        for c in cylinder_objects(site, None)? {
            let m = boundary(site, c)?;
            let (sq, _) = theta_square(s, k, &m)?;
            members.push(Member::square(format!("theta{k}*bd{}", site.object_label(c)), sq));
        }
    }
    Ok(GeneratorFamily {
        name: "J'".into(),
        members,
    })
}

/// Horn inclusions `Λ^n_k ↪ Δ^n` of a built-in simplex site.
pub fn horn_family(site: &Arc<Site>) -> Result<GeneratorFamily> {
    let mut members = Vec::new();
    for n in 1..=site.max_degree() {
        for k in 0..=n {
            members.push(Member::arrow(format!("horn{n}.{k}"), horn(site, n, k)?));
        }
    }
    Ok(GeneratorFamily {
        name: "Horn".into(),
        members,
    })
}

/// Three-valued answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl Verdict {
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => Verdict::Fails,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Holds,
        }
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "PASS",
            Verdict::Fails => "FAIL",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

/// Per-member outcome of an RLP check.
#[derive(Debug, Clone)]
pub enum MemberWitness {
    /// Every attachment has a filler; one filler is kept if any attachment exists.
    Lifts { attachments: u64, filler: Option<PresheafMap> },
    /// An attachment without filler.
    Fails { u: PresheafMap, v: PresheafMap },
    Unknown { reason: String },
}

#[derive(Debug, Clone)]
pub struct RlpReport {
    pub family: String,
    pub witnesses: Vec<(String, MemberWitness)>,
}

impl RlpReport {
    pub fn verdict(&self) -> Verdict {
        self.witnesses.iter().fold(Verdict::Holds, |acc, (_, w)| {
            acc.and(match w {
                MemberWitness::Lifts { .. } => Verdict::Holds,
                MemberWitness::Fails { .. } => Verdict::Fails,
                MemberWitness::Unknown { .. } => Verdict::Unknown,
            })
        })
    }

    pub fn holds(&self) -> bool {
        self.verdict() == Verdict::Holds
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.witnesses
            .iter()
            .find(|(_, w)| matches!(w, MemberWitness::Fails { .. }))
            .map(|(n, _)| n.as_str())
    }

    /// Deterministic text form.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, w) in &self.witnesses {
            let line = match w {
                MemberWitness::Lifts { attachments, .. } => format!("{name}: lifts ({attachments} attachments)"),
                MemberWitness::Fails { .. } => format!("{name}: no filler for some attachment"),
                MemberWitness::Unknown { reason } => format!("{name}: unknown ({reason})"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Search limits for RLP checks.
#[derive(Debug, Clone, Copy)]
pub struct RlpBudget {
    pub max_attachments: u64,
    pub search_nodes: u64,
}

impl Default for RlpBudget {
    fn default() -> Self {
        RlpBudget {
            max_attachments: 2_000_000,
            search_nodes: 50_000_000,
        }
    }
}

/// Checks one member against `p`, enumerating all attachments.
pub fn member_rlp(member: &Member, p: &PresheafMap, budget: RlpBudget) -> MemberWitness {
    let l = member.attach();
    let sq = &member.square;
    let mut attachments = 0u64;
    let mut filler = None;
    let mut failure: Option<(PresheafMap, PresheafMap)> = None;
    let mut unknown: Option<String> = None;
    let vs = MapSearch::new(l.target(), p.target()).budget(budget.search_nodes);
    let r = vs.for_each(|vc| {
        let v = PresheafMap::from_parts(l.target().clone(), p.target().clone(), vc.to_vec());
        let vl = v.compose_unchecked(l);
        let us = MapSearch::new(l.source(), p.source()).over(p, &vl).budget(budget.search_nodes);
        let r = us.for_each(|uc| {
            attachments += 1;
            if attachments > budget.max_attachments {
                unknown = Some("attachment budget exhausted".into());
                return ControlFlow::Break(());
            }
            let u = PresheafMap::from_parts(l.source().clone(), p.source().clone(), uc.to_vec());
            let top = u.compose_unchecked(&sq.top);
            let bottom = v.compose_unchecked(&sq.bottom);
            let found = MapSearch::new(sq.left.target(), p.source())
                .fix_along(&sq.left, &top)
                .over(p, &bottom)
                .budget(budget.search_nodes)
                .first();
            match found {
                Found::Map(d) => {
                    if filler.is_none() {
                        filler = Some(d);
                    }
                    ControlFlow::Continue(())
                }
                Found::NoMap => {
                    failure = Some((u, v.clone()));
                    ControlFlow::Break(())
                }
                Found::Exhausted => {
                    unknown = Some("filler search budget exhausted".into());
                    ControlFlow::Break(())
                }
            }
        });
        if r == Outcome::Exhausted && unknown.is_none() {
            unknown = Some("attachment search budget exhausted".into());
        }
        if failure.is_some() || unknown.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if let Some((u, v)) = failure {
        return MemberWitness::Fails { u, v };
    }
    if let Some(reason) = unknown {
        return MemberWitness::Unknown { reason };
    }
    if r == Outcome::Exhausted {
        return MemberWitness::Unknown {
            reason: "attachment search budget exhausted".into(),
        };
    }
    MemberWitness::Lifts { attachments, filler }
}

pub fn has_rlp_bounded(p: &PresheafMap, family: &GeneratorFamily, budget: RlpBudget) -> RlpReport {
    let witnesses = family
        .members
        .par_iter()
        .map(|m| (m.name.clone(), member_rlp(m, p, budget)))
        .collect();
    RlpReport {
        family: family.name.clone(),
        witnesses,
    }
}

pub fn has_rlp(p: &PresheafMap, family: &GeneratorFamily) -> RlpReport {
    has_rlp_bounded(p, family, RlpBudget::default())
}

pub fn is_trivial_fibration(p: &PresheafMap) -> Result<bool> {
    Ok(has_rlp(p, &gen_cofibrations(p.site())?).holds())
}

pub fn is_fibration(p: &PresheafMap, s: &IntervalStructure) -> Result<bool> {
    Ok(has_rlp(p, &gen_trivcofs(p.site(), s)?).holds())
}

pub fn is_kan_fibration_horn(p: &PresheafMap) -> Result<bool> {
    Ok(has_rlp(p, &horn_family(p.site())?).holds())
}

/// Checks `r ∘ inner ∘ s = outer` for squares `outer: f' → f`,
/// `inner: g' → g`, `s: f' → g'` and `r: g → f`.
pub fn biased_retract_verify(outer: &ArrowSquare, inner: &ArrowSquare, s: &ArrowSquare, r: &ArrowSquare) -> bool {
    if [outer, inner, s, r].iter().any(|q| q.check().is_err()) {
        return false;
    }
    let fits = same_psh(s.left.source(), outer.left.source())
        && same_psh(s.left.target(), outer.left.target())
        && same_psh(s.right.source(), inner.left.source())
        && same_psh(s.right.target(), inner.left.target())
        && same_psh(r.left.source(), inner.right.source())
        && same_psh(r.left.target(), inner.right.target())
        && same_psh(r.right.source(), outer.right.source())
        && same_psh(r.right.target(), outer.right.target());
    if !fits {
        return false;
    }
    let top = r.top.compose_unchecked(&inner.top).compose_unchecked(&s.top);
    let bottom = r.bottom.compose_unchecked(&inner.bottom).compose_unchecked(&s.bottom);
    top.components() == outer.top.components() && bottom.components() == outer.bottom.components()
}

/// For `l = δ_k ⊗̂ m`, the square `θ_k ⊗̂ l: l → δ_k ⊗̂ l` together with its
/// retraction `δ_k ⊗̂ l → l` built from the connection `c^k`.
pub fn connection_retraction(
    s: &IntervalStructure,
    k: usize,
    m: &PresheafMap,
) -> Result<(ArrowSquare, ArrowSquare)> {
    let lt = leibniz_tensor(&s.delta[k], m)?;
    let l = &lt.map;
    let ib = &lt.bd; // I × B
    let (theta, outer) = theta_square(s, k, l)?;
    let iib = &outer.bd; // I × (I × B)
    let site = s.site();
    let ii = s.square();
    // r(u, (t, b)) = (c^k(u, t), b)
    let bottom = PresheafMap::from_fn(&iib.apex, &ib.apex, |c, q| {
        let u = iib.p1.apply(c, q);
        let tb = iib.p2.apply(c, q);
        let t = ib.p1.apply(c, tb);
        let b = ib.p2.apply(c, tb);
        let w = s.conn[k].apply(c, ii.pair_index(c, u, t).expect("pair"));
        ib.pair_index(c, w, b).expect("pair")
    });
    let inv: Vec<std::collections::HashMap<usize, usize>> = site
        .objects()
        .map(|c| (0..l.source().size(c)).map(|x| (l.apply(c, x), x)).collect())
        .collect();
    let mut comps = Vec::new();
    for c in site.objects() {
        let mut comp = Vec::new();
        for q in 0..outer.map.source().size(c) {
            let y = bottom.apply(c, outer.map.apply(c, q));
            comp.push(*inv[c].get(&y).ok_or_else(|| {
                Error::PostconditionFailure("connection retraction leaves the domain".into())
            })?);
        }
        comps.push(comp);
    }
    let top = PresheafMap::new(outer.map.source().clone(), l.source().clone(), comps)?;
    let r = ArrowSquare::new(outer.map.clone(), l.clone(), top, bottom)?;
    Ok((theta, r))
}
