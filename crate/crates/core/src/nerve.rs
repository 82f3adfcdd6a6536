//! Nerves of finite categories over sites with a point model.

use crate::error::{Error, Result};
use crate::presheaf::{Presheaf, PresheafMap, Psh};
use crate::site::{ObjId, Site};
use std::collections::HashMap;
use std::sync::Arc;

/// A finite category given by its composition table. Morphisms `0..n` are
/// the identities of the `n` objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    pub name: String,
    pub objects: Vec<String>,
    /// `(label, source, target)`.
    pub morphisms: Vec<(String, usize, usize)>,
    /// `compose[g][f] = g ∘ f` when `target(f) = source(g)`.
    pub compose: Vec<Vec<Option<usize>>>,
}

impl FiniteCategory {
    /// Builds a category from its non-identity arrows and a composition
    /// function on full morphism indices, checking the axioms.
    pub fn new(
        name: &str,
        objects: Vec<String>,
        arrows: Vec<(String, usize, usize)>,
        comp: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let n = objects.len();
        let mut morphisms: Vec<(String, usize, usize)> =
            (0..n).map(|o| (format!("id{}", objects[o]), o, o)).collect();
        morphisms.extend(arrows);
        let m = morphisms.len();
        let mut compose = vec![vec![None; m]; m];
        for g in 0..m {
            for f in 0..m {
                if morphisms[f].2 != morphisms[g].1 {
                    continue;
                }
                let h = if g < n {
                    f
                } else if f < n {
                    g
                } else {
                    comp(g, f).ok_or_else(|| {
                        Error::InvalidRelation(format!("missing composite {} ∘ {}", morphisms[g].0, morphisms[f].0))
                    })?
                };
                if h >= m || morphisms[h].1 != morphisms[f].1 || morphisms[h].2 != morphisms[g].2 {
                    return Err(Error::InvalidRelation(format!(
                        "composite {} ∘ {} has the wrong type",
                        morphisms[g].0, morphisms[f].0
                    )));
                }
                compose[g][f] = Some(h);
            }
        }
        for h in 0..m {
            for g in 0..m {
                for f in 0..m {
                    if let (Some(gf), Some(hg)) = (compose[g][f], compose[h][g]) {
                        if compose[h][gf] != compose[hg][f] {
                            return Err(Error::InvalidRelation("composition is not associative".into()));
                        }
                    }
                }
            }
        }
        Ok(FiniteCategory {
            name: name.to_string(),
            objects,
            morphisms,
            compose,
        })
    }

    /// A thin category: at most one arrow `i → j` for each pair in `rel`.
    fn thin(name: &str, n: usize, rel: impl Fn(usize, usize) -> bool, sym: &str) -> Self {
        let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut arrows = Vec::new();
        let mut idx: HashMap<(usize, usize), usize> = (0..n).map(|o| ((o, o), o)).collect();
        for i in 0..n {
            for j in 0..n {
                if i != j && rel(i, j) {
                    idx.insert((i, j), n + arrows.len());
                    arrows.push((format!("{i}{sym}{j}"), i, j));
                }
            }
        }
        let all: Vec<(usize, usize)> = (0..n).map(|o| (o, o)).chain(arrows.iter().map(|a| (a.1, a.2))).collect();
        FiniteCategory::new(name, objects, arrows, |g, f| idx.get(&(all[f].0, all[g].1)).copied())
            .expect("thin category")
    }

    /// The linear order `0 < 1 < ... < n-1`.
    pub fn linear(n: usize) -> Self {
        Self::thin(&format!("lin{n}"), n, |i, j| i < j, "<")
    }

    /// `n` objects with exactly one morphism between any two.
    pub fn codiscrete(n: usize) -> Self {
        Self::thin(&format!("codisc{n}"), n, |_, _| true, "~")
    }

    /// `n` objects, identities only.
    pub fn discrete(n: usize) -> Self {
        Self::thin(&format!("disc{n}"), n, |_, _| false, "")
    }

    /// The cyclic group of order `n` as a one-object category.
    pub fn cyclic(n: usize) -> Self {
        let arrows: Vec<(String, usize, usize)> = (1..n).map(|k| (format!("g{k}"), 0, 0)).collect();
        FiniteCategory::new(&format!("Z{n}"), vec!["*".into()], arrows, |g, f| Some((g + f) % n))
            .expect("cyclic group")
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn source(&self, f: usize) -> usize {
        self.morphisms[f].1
    }

    pub fn target(&self, f: usize) -> usize {
        self.morphisms[f].2
    }

    pub fn hom(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.morphisms.len())
            .filter(|&f| self.source(f) == a && self.target(f) == b)
            .collect()
    }
}

/// A functor between finite categories, given on objects and morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFunctor {
    pub objects: Vec<usize>,
    pub morphisms: Vec<usize>,
}

impl FiniteFunctor {
    pub fn validate(&self, c: &FiniteCategory, d: &FiniteCategory) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMap(format!("functor {} -> {}: {m}", c.name, d.name)));
        if self.objects.len() != c.num_objects() || self.morphisms.len() != c.morphisms.len() {
            return bad("wrong shape");
        }
        for f in 0..c.morphisms.len() {
            let g = self.morphisms[f];
            if g >= d.morphisms.len()
                || d.source(g) != self.objects[c.source(f)]
                || d.target(g) != self.objects[c.target(f)]
            {
                return bad("morphism has the wrong type");
            }
        }
        for o in 0..c.num_objects() {
            if self.morphisms[o] != self.objects[o] {
                return bad("identity not preserved");
            }
        }
        for g in 0..c.morphisms.len() {
            for f in 0..c.morphisms.len() {
                if let Some(gf) = c.compose[g][f] {
                    if d.compose[self.morphisms[g]][self.morphisms[f]] != Some(self.morphisms[gf]) {
                        return bad("composition not preserved");
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element data: objects at points and morphisms at comparable pairs.
type Simplex = (Vec<usize>, Vec<usize>);

fn comparable_pairs(order: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = order.len();
    let mut out = Vec::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && order[p][q] {
                out.push((p, q));
            }
        }
    }
    out
}

fn functors_from_poset(order: &[Vec<bool>], cat: &FiniteCategory) -> Vec<Simplex> {
    let n = order.len();
    let pairs = comparable_pairs(order);
    let pair_ix: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut out = Vec::new();
    let mut objs = vec![0; n];
    fn objects_rec(
        i: usize,
        objs: &mut Vec<usize>,
        order: &[Vec<bool>],
        pairs: &[(usize, usize)],
        pair_ix: &HashMap<(usize, usize), usize>,
        cat: &FiniteCategory,
        out: &mut Vec<Simplex>,
    ) {
        if i == objs.len() {
            let mut mors = vec![usize::MAX; pairs.len()];
            morphs_rec(0, objs, &mut mors, order, pairs, pair_ix, cat, out);
            return;
        }
        for o in 0..cat.num_objects() {
            objs[i] = o;
            objects_rec(i + 1, objs, order, pairs, pair_ix, cat, out);
        }
    }
    #[allow(clippy::too_many_arguments)]
    fn morphs_rec(
        k: usize,
        objs: &[usize],
        mors: &mut Vec<usize>,
        order: &[Vec<bool>],
        pairs: &[(usize, usize)],
        pair_ix: &HashMap<(usize, usize), usize>,
        cat: &FiniteCategory,
        out: &mut Vec<Simplex>,
    ) {
        if k == pairs.len() {
            out.push((objs.to_vec(), mors.clone()));
            return;
        }
        let (p, q) = pairs[k];
        let mor_at = |a: usize, b: usize, mors: &[usize]| -> Option<usize> {
            if a == b {
                Some(objs[a])
            } else {
                let m = mors[pair_ix[&(a, b)]];
                (m != usize::MAX).then_some(m)
            }
        };
        for f in cat.hom(objs[p], objs[q]) {
            mors[k] = f;
            // check every triangle p ≤ r ≤ s whose three sides are assigned
            let ok = (0..objs.len()).all(|r| {
                [(p, q, r), (p, r, q), (r, p, q)].iter().all(|&(a, b, c)| {
                    if !(order[a][b] && order[b][c]) {
                        return true;
                    }
                    match (mor_at(a, b, mors), mor_at(b, c, mors), mor_at(a, c, mors)) {
                        (Some(x), Some(y), Some(z)) => cat.compose[y][x] == Some(z),
                        _ => true,
                    }
                })
            });
            if ok {
                morphs_rec(k + 1, objs, mors, order, pairs, pair_ix, cat, out);
            }
        }
        mors[k] = usize::MAX;
    }
    objects_rec(0, &mut objs, order, &pairs, &pair_ix, cat, &mut out);
    out
}

fn simplex_label(cat: &FiniteCategory, s: &Simplex) -> String {
    let objs: Vec<&str> = s.0.iter().map(|&o| cat.objects[o].as_str()).collect();
    let mors: Vec<&str> = s.1.iter().map(|&m| cat.morphisms[m].0.as_str()).collect();
    format!("[{}|{}]", objs.join(","), mors.join(","))
}

/// A nerve together with the simplex data of each element.
#[derive(Debug, Clone)]
pub struct Nerve {
    pub psh: Psh,
    pub category: FiniteCategory,
    simplices: Vec<Vec<Simplex>>,
}

/// The nerve `N(C)(c) = Fun(points(c), C)` over a site with a point model.
pub fn nerve(site: &Arc<Site>, cat: &FiniteCategory) -> Result<Nerve> {
    let pm = site
        .points()
        .ok_or_else(|| Error::HypothesisFailure("nerves need a site with a point model".into()))?;
    let simplices: Vec<Vec<Simplex>> = site.objects().map(|c| functors_from_poset(&pm.order[c], cat)).collect();
    let index: Vec<HashMap<&Simplex, usize>> = simplices
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let pairs: Vec<Vec<(usize, usize)>> = site.objects().map(|c| comparable_pairs(&pm.order[c])).collect();
    let pair_ix: Vec<HashMap<(usize, usize), usize>> = pairs
        .iter()
        .map(|ps| ps.iter().enumerate().map(|(i, &p)| (p, i)).collect())
        .collect();
    let levels: Vec<Vec<String>> = simplices
        .iter()
        .map(|l| l.iter().map(|s| simplex_label(cat, s)).collect())
        .collect();
    let act = |f: usize, x: usize| -> usize {
        let (d, c) = (site.source(f), site.target(f));
        let phi = &pm.maps[f];
        let (objs, mors) = &simplices[c][x];
        let new_objs: Vec<usize> = (0..pm.points[d]).map(|p| objs[phi[p]]).collect();
        let new_mors: Vec<usize> = pairs[d]
            .iter()
            .map(|&(p, q)| {
                let (a, b) = (phi[p], phi[q]);
                if a == b {
                    objs[a]
                } else {
                    mors[pair_ix[c][&(a, b)]]
                }
            })
            .collect();
        index[d][&(new_objs, new_mors)]
    };
    let psh = Arc::new(Presheaf::from_fn(site, levels, act));
    Ok(Nerve {
        psh,
        category: cat.clone(),
        simplices,
    })
}

/// The map of nerves induced by a functor.
pub fn nerve_map(f: &FiniteFunctor, source: &Nerve, target: &Nerve) -> Result<PresheafMap> {
    f.validate(&source.category, &target.category)?;
    let site = source.psh.site();
    let index: Vec<HashMap<&Simplex, usize>> = target
        .simplices
        .iter()
        .map(|l| l.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let comps = site
        .objects()
        .map(|c: ObjId| {
            source.simplices[c]
                .iter()
                .map(|(objs, mors)| {
                    let key: Simplex = (
                        objs.iter().map(|&o| f.objects[o]).collect(),
                        mors.iter().map(|&m| f.morphisms[m]).collect(),
                    );
                    index[c][&key]
                })
                .collect()
        })
        .collect();
    PresheafMap::new(source.psh.clone(), target.psh.clone(), comps)
}
