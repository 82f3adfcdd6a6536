//! Bounded cell-complex certificates and the bounded small object argument.

use super::{GeneratorFamily, Member};
use crate::error::Result;
use crate::limits::pushout;
use crate::presheaf::{image_mask, subobject_from_mask, PresheafMap, Psh};
use crate::search::{Found, MapSearch};
use std::ops::ControlFlow;

/// A generator placed inside the codomain.
#[derive(Debug, Clone)]
pub struct PlacedCell {
    pub member: String,
    /// Injective `φ: cod(j) → B` with `φ ∘ j` inside the previous stage.
    pub phi: PresheafMap,
}

#[derive(Debug, Clone)]
pub struct CellStage {
    pub cells: Vec<PlacedCell>,
    pub before: Vec<Vec<bool>>,
    pub after: Vec<Vec<bool>>,
}

/// A verified presentation of `m` as a finite relative cell complex.
#[derive(Debug, Clone)]
pub struct CellCertificate {
    pub stages: Vec<CellStage>,
}

impl CellCertificate {
    pub fn cell_count(&self) -> usize {
        self.stages.iter().map(|s| s.cells.len()).sum()
    }
}

#[derive(Debug, Clone)]
pub enum CellOutcome {
    Certificate(CellCertificate),
    Refuted(String),
    Unknown(String),
}

fn count(mask: &[Vec<bool>]) -> usize {
    mask.iter().flatten().filter(|&&b| b).count()
}

/// Checks that `S ∪ φ(D)` is the pushout of `j` along `φ ∘ j: C → S`.
fn verify_cell(b: &Psh, s: &[Vec<bool>], j: &PresheafMap, phi: &PresheafMap) -> Result<Option<Vec<Vec<bool>>>> {
    let site = b.site();
    let img = image_mask(phi);
    let after: Vec<Vec<bool>> = s
        .iter()
        .zip(&img)
        .map(|(u, v)| u.iter().zip(v).map(|(p, q)| *p || *q).collect())
        .collect();
    let (sub, s_incl) = subobject_from_mask(b, s);
    let (sub_after, after_incl) = subobject_from_mask(b, &after);
    let pos = |incl: &PresheafMap, c: usize| -> std::collections::HashMap<usize, usize> {
        (0..incl.source().size(c)).map(|i| (incl.apply(c, i), i)).collect()
    };
    let pos_s: Vec<_> = site.objects().map(|c| pos(&s_incl, c)).collect();
    let pos_a: Vec<_> = site.objects().map(|c| pos(&after_incl, c)).collect();
    let mut attach = Vec::new();
    for c in site.objects() {
        let mut comp = Vec::new();
        for x in 0..j.source().size(c) {
            match pos_s[c].get(&phi.apply(c, j.apply(c, x))) {
                Some(&i) => comp.push(i),
                None => return Ok(None),
            }
        }
        attach.push(comp);
    }
    let attach = PresheafMap::new(j.source().clone(), sub.clone(), attach)?;
    let po = pushout(&attach, j)?;
    let s_to = PresheafMap::from_fn(&sub, &sub_after, |c, i| pos_a[c][&s_incl.apply(c, i)]);
    let phi_to = PresheafMap::from_fn(phi.source(), &sub_after, |c, d| pos_a[c][&phi.apply(c, d)]);
    let med = po.copair(&s_to, &phi_to)?;
    Ok(med.is_iso().then_some(after))
}

/// Looks for a finite relative cell presentation of `m` by members of
/// `family`, attaching greedily stage by stage.
pub fn cell_certify(m: &PresheafMap, family: &GeneratorFamily, max_stages: usize, max_cells: usize) -> CellOutcome {
    let arrows: Vec<&Member> = family.members.iter().filter(|x| x.is_arrow).collect();
    if !m.is_mono() {
        if arrows.iter().all(|x| x.attach().is_mono()) {
            return CellOutcome::Refuted("map is not mono but every generator is".into());
        }
        return CellOutcome::Unknown("map is not mono".into());
    }
    let b = m.target().clone();
    let total = b.total_size();
    let mut s = image_mask(m);
    let mut stages = Vec::new();
    let mut trace = Vec::new();
    while count(&s) < total {
        if stages.len() >= max_stages {
            return CellOutcome::Unknown(format!(
                "stage budget reached with {} of {} elements covered; {}",
                count(&s),
                total,
                trace.join("; ")
            ));
        }
        let before = s.clone();
        let mut claimed: Vec<Vec<bool>> = s.iter().map(|l| vec![false; l.len()]).collect();
        let mut cells: Vec<PlacedCell> = Vec::new();
        let mut cur = s.clone();
        'members: for mem in &arrows {
            let j = mem.attach();
            if j.is_iso() {
                continue;
            }
            let jm = image_mask(j);
            while cells.len() < max_cells {
                let found = MapSearch::new(j.target(), &b)
                    .injective()
                    .allowed(|c, d, y| {
                        if jm[c][d] {
                            before[c][y]
                        } else {
                            !before[c][y] && !claimed[c][y]
                        }
                    })
                    .budget(5_000_000)
                    .first();
                let phi = match found {
                    Found::Map(phi) => phi,
                    Found::NoMap => break,
                    Found::Exhausted => {
                        trace.push(format!("search for {} exhausted", mem.name));
                        break;
                    }
                };
                match verify_cell(&b, &cur, j, &phi) {
                    Ok(Some(after)) => cur = after,
                    _ => {
                        return CellOutcome::Unknown(format!("pushout check failed for {}", mem.name));
                    }
                }
                for c in 0..claimed.len() {
                    for d in 0..phi.source().size(c) {
                        if !jm[c][d] {
                            claimed[c][phi.apply(c, d)] = true;
                        }
                    }
                }
                cells.push(PlacedCell {
                    member: mem.name.clone(),
                    phi,
                });
            }
            if cells.len() >= max_cells {
                break 'members;
            }
        }
        if cells.is_empty() {
            return CellOutcome::Unknown(format!(
                "no generator attaches at stage {} ({} of {} elements covered)",
                stages.len() + 1,
                count(&s),
                total
            ));
        }
        trace.push(format!("stage {}: {} cells", stages.len() + 1, cells.len()));
        s = cur;
        stages.push(CellStage {
            cells,
            before,
            after: s.clone(),
        });
    }
    CellOutcome::Certificate(CellCertificate { stages })
}

/// A factorization `f = right ∘ left` produced by the bounded small object
/// argument.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub stages: usize,
    pub cells: usize,
    /// Whether `right` was verified to lift against every member.
    pub complete: bool,
}

/// Runs the small object argument for at most `max_stages` rounds of at most
/// `max_cells` cells each.
pub fn factorize_bounded(
    f: &PresheafMap,
    family: &GeneratorFamily,
    max_stages: usize,
    max_cells: usize,
) -> Result<Factorization> {
    let mut left = PresheafMap::identity(f.source());
    let mut right = f.clone();
    let mut cells_total = 0;
    for stage in 0..=max_stages {
        // collect failing attachments against the current right map
        let mut failing: Vec<(usize, PresheafMap)> = Vec::new();
        for (mi, mem) in family.members.iter().enumerate().filter(|(_, m)| m.is_arrow) {
            let j = mem.attach();
            let _ = MapSearch::new(j.target(), right.target()).for_each(|vc| {
                let v = PresheafMap::from_parts(j.target().clone(), right.target().clone(), vc.to_vec());
                let vj = v.compose_unchecked(j);
                let _ = MapSearch::new(j.source(), right.source()).over(&right, &vj).for_each(|uc| {
                    let u = PresheafMap::from_parts(j.source().clone(), right.source().clone(), uc.to_vec());
                    let has = MapSearch::new(j.target(), right.source())
                        .fix_along(j, &u)
                        .over(&right, &v)
                        .first();
                    if matches!(has, Found::NoMap) {
                        failing.push((mi, u));
                    }
                    if failing.len() >= max_cells {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                });
                if failing.len() >= max_cells {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if failing.len() >= max_cells {
                break;
            }
        }
        if failing.is_empty() {
            return Ok(Factorization {
                left,
                right,
                stages: stage,
                cells: cells_total,
                complete: true,
            });
        }
        if stage == max_stages {
            break;
        }
        // attach cells one pushout at a time, carrying the earlier
        // attachments forward along the inclusions
        let mut fwd = PresheafMap::identity(right.source());
        for (mi, u) in failing {
            let j = family.members[mi].attach();
            let u_now = fwd.compose_unchecked(&u);
            let po = pushout(&u_now, j)?;
            let v = find_bottom(j, &u_now, &right)?;
            let new_right = po.copair(&right, &v)?;
            left = po.i1.compose_unchecked(&left);
            fwd = po.i1.compose_unchecked(&fwd);
            right = new_right;
            cells_total += 1;
        }
    }
    Ok(Factorization {
        left,
        right,
        stages: max_stages,
        cells: cells_total,
        complete: false,
    })
}

/// Some `v` with `v ∘ j = right ∘ u`.
fn find_bottom(j: &PresheafMap, u: &PresheafMap, right: &PresheafMap) -> Result<PresheafMap> {
    let ru = right.compose_unchecked(u);
    MapSearch::new(j.target(), right.target())
        .fix_along(j, &ru)
        .first()
        .map()
        .ok_or_else(|| crate::error::Error::PostconditionFailure("attachment has no bottom map".into()))
}
