//! Finite presheaves, natural transformations and commuting squares.

mod format;

pub use format::{parse_presheaf_file, serialize_map, serialize_presheaf, Registry};

use crate::error::{Error, Result};
use crate::site::{MorId, ObjId, Site};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A finite presheaf on a [`Site`].
///
/// Elements are indexed per object; `action[f][x]` is the index of `P(f)(x)`
/// in the level of `source(f)` for `x` in the level of `target(f)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Presheaf {
    site: Arc<Site>,
    levels: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
}

pub type Psh = Arc<Presheaf>;

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presheaf{:?}", self.level_sizes())
    }
}

/// A functoriality violation found by [`validate_presheaf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub morphisms: (String, String),
    pub object: String,
    pub element: String,
}

pub(crate) fn same_site(a: &Site, b: &Site) -> bool {
    std::ptr::eq(a, b) || a == b
}

pub(crate) fn same_psh(a: &Psh, b: &Psh) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl Presheaf {
    /// Builds a presheaf, checking shape and functoriality.
    pub fn new(site: Arc<Site>, levels: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Result<Self> {
        if levels.len() != site.num_objects() || action.len() != site.num_morphisms() {
            return Err(Error::InvalidPresheaf("wrong number of levels or actions".into()));
        }
        for (c, level) in levels.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for l in level {
                if l.is_empty() || l.contains(char::is_whitespace) || l == "->" {
                    return Err(Error::InvalidPresheaf(format!("bad label `{l}`")));
                }
                if !seen.insert(l) {
                    return Err(Error::InvalidPresheaf(format!(
                        "duplicate label `{l}` at `{}`",
                        site.object_label(c)
                    )));
                }
            }
        }
        for (f, act) in action.iter().enumerate() {
            let (s, t) = (site.source(f), site.target(f));
            if act.len() != levels[t].len() || act.iter().any(|&x| x >= levels[s].len()) {
                return Err(Error::InvalidPresheaf(format!(
                    "action of `{}` has wrong shape",
                    site.morphism(f).label
                )));
            }
        }
        let p = Presheaf { site, levels, action };
        let v = validate_presheaf(&p);
        if let Some(first) = v.first() {
            return Err(Error::InvalidPresheaf(format!(
                "functoriality fails for ({}, {}) at {} `{}`",
                first.morphisms.0, first.morphisms.1, first.object, first.element
            )));
        }
        Ok(p)
    }

    /// Builds a presheaf from data known to be valid.
    pub(crate) fn from_parts(site: Arc<Site>, levels: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Self {
        let p = Presheaf { site, levels, action };
        debug_assert!(validate_presheaf(&p).is_empty());
        p
    }

    /// Builds a presheaf from levels and a function computing the action.
    pub(crate) fn from_fn(
        site: &Arc<Site>,
        levels: Vec<Vec<String>>,
        mut act: impl FnMut(MorId, usize) -> usize,
    ) -> Self {
        let action = (0..site.num_morphisms())
            .map(|f| (0..levels[site.target(f)].len()).map(|x| act(f, x)).collect())
            .collect();
        Self::from_parts(site.clone(), levels, action)
    }

    pub fn site(&self) -> &Arc<Site> {
        &self.site
    }

    pub fn level(&self, c: ObjId) -> &[String] {
        &self.levels[c]
    }

    pub fn levels(&self) -> &[Vec<String>] {
        &self.levels
    }

    pub fn size(&self, c: ObjId) -> usize {
        self.levels[c].len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_size() == 0
    }

    pub fn label(&self, c: ObjId, x: usize) -> &str {
        &self.levels[c][x]
    }

    /// `P(f)(x)` for `x` in the level of `target(f)`.
    #[inline]
    pub fn act(&self, f: MorId, x: usize) -> usize {
        self.action[f][x]
    }

    pub fn action_table(&self, f: MorId) -> &[usize] {
        &self.action[f]
    }

    pub fn index_of(&self, c: ObjId, label: &str) -> Option<usize> {
        self.levels[c].iter().position(|l| l == label)
    }

    pub fn label_index(&self, c: ObjId) -> HashMap<&str, usize> {
        self.levels[c].iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
    }

    /// All elements as `(object, index)` pairs, objects by increasing degree.
    pub fn elements_by_degree(&self) -> Vec<(ObjId, usize)> {
        self.site
            .objects_by_degree()
            .into_iter()
            .flat_map(|c| (0..self.size(c)).map(move |x| (c, x)))
            .collect()
    }

    /// Same structure with new labels.
    pub fn relabel(&self, mut label: impl FnMut(ObjId, usize) -> String) -> Presheaf {
        let levels = (0..self.levels.len())
            .map(|c| (0..self.size(c)).map(|x| label(c, x)).collect())
            .collect();
        Presheaf::from_parts(self.site.clone(), levels, self.action.clone())
    }
}

/// Lists every functoriality violation of `p`.
pub fn validate_presheaf(p: &Presheaf) -> Vec<Violation> {
    let site = &p.site;
    let mut out = Vec::new();
    for c in site.objects() {
        let id = site.identity(c);
        for x in 0..p.size(c) {
            if p.act(id, x) != x {
                out.push(Violation {
                    morphisms: (site.morphism(id).label.clone(), site.morphism(id).label.clone()),
                    object: site.object_label(c).to_string(),
                    element: p.label(c, x).to_string(),
                });
            }
        }
    }
    let n = site.num_morphisms();
    for g in 0..n {
        for f in 0..n {
            let Some(gf) = site.compose(g, f) else { continue };
            let c = site.target(g);
            for x in 0..p.size(c) {
                // P(g∘f) = P(f)∘P(g)
                if p.act(gf, x) != p.act(f, p.act(g, x)) {
                    out.push(Violation {
                        morphisms: (site.morphism(g).label.clone(), site.morphism(f).label.clone()),
                        object: site.object_label(c).to_string(),
                        element: p.label(c, x).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// A natural transformation between presheaves on the same site.
#[derive(Clone, PartialEq, Eq)]
pub struct PresheafMap {
    source: Psh,
    target: Psh,
    components: Vec<Vec<usize>>,
}

impl fmt::Debug for PresheafMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Map{:?}", self.components)
    }
}

impl PresheafMap {
    /// Builds a map, checking shape and naturality.
    pub fn new(source: Psh, target: Psh, components: Vec<Vec<usize>>) -> Result<Self> {
        if !same_site(source.site(), target.site()) {
            return Err(Error::InvalidMap("source and target over different sites".into()));
        }
        let site = source.site().clone();
        if components.len() != site.num_objects() {
            return Err(Error::InvalidMap("wrong number of components".into()));
        }
        for c in site.objects() {
            if components[c].len() != source.size(c) || components[c].iter().any(|&y| y >= target.size(c)) {
                return Err(Error::InvalidMap(format!(
                    "component at `{}` has wrong shape",
                    site.object_label(c)
                )));
            }
        }
        let m = PresheafMap {
            source,
            target,
            components,
        };
        if let Some((f, x)) = m.naturality_violation() {
            return Err(Error::InvalidMap(format!(
                "not natural at `{}` for element `{}`",
                site.morphism(f).label,
                m.source.label(site.target(f), x)
            )));
        }
        Ok(m)
    }

    pub(crate) fn from_parts(source: Psh, target: Psh, components: Vec<Vec<usize>>) -> Self {
        let m = PresheafMap {
            source,
            target,
            components,
        };
        debug_assert!(m.naturality_violation().is_none(), "constructed map is not natural");
        m
    }

    pub(crate) fn from_fn(source: &Psh, target: &Psh, mut f: impl FnMut(ObjId, usize) -> usize) -> Self {
        let components = (0..source.site().num_objects())
            .map(|c| (0..source.size(c)).map(|x| f(c, x)).collect())
            .collect();
        Self::from_parts(source.clone(), target.clone(), components)
    }

    /// First `(morphism, element)` where naturality fails.
    pub fn naturality_violation(&self) -> Option<(MorId, usize)> {
        let site = self.source.site();
        for f in 0..site.num_morphisms() {
            let c = site.target(f);
            let d = site.source(f);
            for x in 0..self.source.size(c) {
                if self.target.act(f, self.components[c][x]) != self.components[d][self.source.act(f, x)] {
                    return Some((f, x));
                }
            }
        }
        None
    }

    pub fn identity(p: &Psh) -> Self {
        PresheafMap {
            source: p.clone(),
            target: p.clone(),
            components: p.levels.iter().map(|l| (0..l.len()).collect()).collect(),
        }
    }

    pub fn source(&self) -> &Psh {
        &self.source
    }

    pub fn target(&self) -> &Psh {
        &self.target
    }

    pub fn site(&self) -> &Arc<Site> {
        self.source.site()
    }

    #[inline]
    pub fn apply(&self, c: ObjId, x: usize) -> usize {
        self.components[c][x]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PresheafMap) -> Result<PresheafMap> {
        if !same_psh(&other.target, &self.source) {
            return Err(Error::InvalidMap("composing maps with mismatched objects".into()));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &PresheafMap) -> PresheafMap {
        let components = other
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| comp.iter().map(|&x| self.components[c][x]).collect())
            .collect();
        PresheafMap {
            source: other.source.clone(),
            target: self.target.clone(),
            components,
        }
    }

    /// Same components with a replaced (structurally equal) source or target.
    pub(crate) fn retyped(&self, source: Psh, target: Psh) -> PresheafMap {
        PresheafMap {
            source,
            target,
            components: self.components.clone(),
        }
    }

    pub fn is_mono(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            comp.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        self.components.iter().enumerate().all(|(c, comp)| {
            let mut seen = vec![false; self.target.size(c)];
            for &y in comp {
                seen[y] = true;
            }
            seen.into_iter().all(|b| b)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Option<PresheafMap> {
        if !self.is_iso() {
            return None;
        }
        let components = self
            .components
            .iter()
            .map(|comp| {
                let mut inv = vec![0; comp.len()];
                for (x, &y) in comp.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        Some(PresheafMap {
            source: self.target.clone(),
            target: self.source.clone(),
            components,
        })
    }

    /// Pointwise equality of parallel maps.
    pub fn same_as(&self, other: &PresheafMap) -> bool {
        same_psh(&self.source, &other.source)
            && same_psh(&self.target, &other.target)
            && self.components == other.components
    }
}

/// Whether `m` is a monomorphism (componentwise injective).
pub fn is_mono(m: &PresheafMap) -> bool {
    m.is_mono()
}

/// A commuting square `right ∘ top = bottom ∘ left`.
///
/// ```text
///   A --top--> B
///   |          |
/// left       right
///   v          v
///   C -bottom-> D
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowSquare {
    pub left: PresheafMap,
    pub right: PresheafMap,
    pub top: PresheafMap,
    pub bottom: PresheafMap,
}

impl ArrowSquare {
    pub fn new(left: PresheafMap, right: PresheafMap, top: PresheafMap, bottom: PresheafMap) -> Result<Self> {
        let s = ArrowSquare {
            left,
            right,
            top,
            bottom,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<()> {
        let ok_types = same_psh(self.top.source(), self.left.source())
            && same_psh(self.top.target(), self.right.source())
            && same_psh(self.bottom.source(), self.left.target())
            && same_psh(self.bottom.target(), self.right.target());
        if !ok_types {
            return Err(Error::InvalidMap("square corners do not match".into()));
        }
        let a = self.right.compose_unchecked(&self.top);
        let b = self.bottom.compose_unchecked(&self.left);
        if a.components != b.components {
            return Err(Error::InvalidMap("square does not commute".into()));
        }
        Ok(())
    }

    /// An arrow viewed as the identity square on itself.
    pub fn identity_on(l: &PresheafMap) -> Self {
        ArrowSquare {
            left: l.clone(),
            right: l.clone(),
            top: PresheafMap::identity(l.source()),
            bottom: PresheafMap::identity(l.target()),
        }
    }
}

/// The terminal presheaf: one element `*` at every object.
pub fn terminal(site: &Arc<Site>) -> Psh {
    let levels = vec![vec!["*".to_string()]; site.num_objects()];
    Arc::new(Presheaf::from_fn(site, levels, |_, _| 0))
}

/// The initial (empty) presheaf.
pub fn initial(site: &Arc<Site>) -> Psh {
    let levels = vec![Vec::new(); site.num_objects()];
    Arc::new(Presheaf::from_fn(site, levels, |_, _| 0))
}

/// The unique map into the terminal presheaf.
pub fn to_terminal(p: &Psh, one: &Psh) -> PresheafMap {
    PresheafMap::from_fn(p, one, |_, _| 0)
}

/// The unique map out of the initial presheaf.
pub fn from_initial(zero: &Psh, p: &Psh) -> PresheafMap {
    PresheafMap::from_fn(zero, p, |_, _| 0)
}

/// The finite coproduct of `n` copies of the terminal presheaf.
pub fn discrete(site: &Arc<Site>, labels: &[&str]) -> Psh {
    let levels = vec![labels.iter().map(|s| s.to_string()).collect::<Vec<_>>(); site.num_objects()];
    Arc::new(Presheaf::from_fn(site, levels, |_, x| x))
}

/// The representable presheaf `hom(-, c)`, labelled by morphism labels.
pub fn representable(site: &Arc<Site>, c: ObjId) -> Result<Psh> {
    if c >= site.num_objects() {
        return Err(Error::UnknownObject(c.to_string()));
    }
    let mut pos = vec![usize::MAX; site.num_morphisms()];
    let levels: Vec<Vec<String>> = site
        .objects()
        .map(|d| {
            site.hom(d, c)
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    pos[g] = i;
                    site.morphism(g).label.clone()
                })
                .collect()
        })
        .collect();
    let p = Presheaf::from_fn(site, levels, |f, x| {
        let g = site.hom(site.target(f), c)[x];
        pos[site.compose(g, f).expect("composable")]
    });
    Ok(Arc::new(p))
}

/// Index of a morphism `g: d -> c` as an element of `representable(c)` at `d`.
pub fn representable_index(site: &Site, g: MorId) -> usize {
    site.hom(site.source(g), site.target(g))
        .iter()
        .position(|&h| h == g)
        .expect("morphism in its own hom-set")
}

/// A levelwise subset of `p` closed under the action, as a presheaf with the
/// same labels together with its inclusion.
pub fn subobject_from_mask(p: &Psh, mask: &[Vec<bool>]) -> (Psh, PresheafMap) {
    let site = p.site();
    let mut index: Vec<Vec<usize>> = Vec::with_capacity(mask.len());
    let mut levels = Vec::with_capacity(mask.len());
    let mut positions = Vec::with_capacity(mask.len());
    for c in site.objects() {
        let mut ix = vec![usize::MAX; p.size(c)];
        let mut lv = Vec::new();
        let mut ps = Vec::new();
        for x in 0..p.size(c) {
            if mask[c][x] {
                ix[x] = lv.len();
                lv.push(p.label(c, x).to_string());
                ps.push(x);
            }
        }
        index.push(ix);
        levels.push(lv);
        positions.push(ps);
    }
    let sub = Arc::new(Presheaf::from_fn(site, levels, |f, i| {
        let x = positions[site.target(f)][i];
        index[site.source(f)][p.act(f, x)]
    }));
    let incl = PresheafMap::from_fn(&sub, p, |c, i| positions[c][i]);
    (sub, incl)
}

/// Levelwise image mask of a map.
pub fn image_mask(m: &PresheafMap) -> Vec<Vec<bool>> {
    let t = m.target();
    t.site()
        .objects()
        .map(|c| {
            let mut v = vec![false; t.size(c)];
            for &y in &m.components()[c] {
                v[y] = true;
            }
            v
        })
        .collect()
}

/// Factors `f` as an epimorphism onto its image followed by the inclusion.
pub fn image_factorization(f: &PresheafMap) -> (PresheafMap, PresheafMap) {
    let mask = image_mask(f);
    let (im, mono) = subobject_from_mask(f.target(), &mask);
    let site = f.site();
    let pos: Vec<HashMap<usize, usize>> = site
        .objects()
        .map(|c| mono.components()[c].iter().enumerate().map(|(i, &y)| (y, i)).collect())
        .collect();
    let epi = PresheafMap::from_fn(f.source(), &im, |c, x| pos[c][&f.apply(c, x)]);
    (epi, mono)
}

/// Closure of a seed set under the action.
pub fn closure_mask(p: &Presheaf, seeds: &[(ObjId, usize)]) -> Vec<Vec<bool>> {
    let site = p.site();
    let mut mask: Vec<Vec<bool>> = site.objects().map(|c| vec![false; p.size(c)]).collect();
    for &(c, x) in seeds {
        for &f in site.morphisms_into(c) {
            mask[site.source(f)][p.act(f, x)] = true;
        }
    }
    mask
}

/// The smallest subpresheaf containing the seeds, as a mono into `p`.
pub fn subpresheaf_generated(p: &Psh, seeds: &[(ObjId, usize)]) -> PresheafMap {
    subobject_from_mask(p, &closure_mask(p, seeds)).1
}

/// Degeneracy mask at `c`: elements in the image of the action of a
/// morphism out of `c` into an object of smaller degree.
pub fn degenerate_mask(p: &Presheaf, c: ObjId) -> Vec<bool> {
    let site = p.site();
    let mut mask = vec![false; p.size(c)];
    for f in 0..site.num_morphisms() {
        if site.source(f) == c && site.degree(site.target(f)) < site.degree(c) {
            for y in 0..p.size(site.target(f)) {
                mask[p.act(f, y)] = true;
            }
        }
    }
    mask
}

/// Number of nondegenerate elements at `c`.
pub fn nondegenerate_count(p: &Presheaf, c: ObjId) -> usize {
    degenerate_mask(p, c).into_iter().filter(|d| !d).count()
}

/// The boundary `∂c ⊆ y(c)`: elements factoring through an object of
/// strictly smaller degree.
pub fn boundary(site: &Arc<Site>, c: ObjId) -> Result<PresheafMap> {
    let y = representable(site, c)?;
    let seeds: Vec<(ObjId, usize)> = site
        .objects()
        .filter(|&d| site.degree(d) < site.degree(c))
        .flat_map(|d| (0..y.size(d)).map(move |x| (d, x)))
        .collect();
    Ok(subpresheaf_generated(&y, &seeds))
}

/// The horn `Λ^n_k ⊆ Δ^n` generated by the faces `d{n}_i`, `i != k`, of a
/// built-in simplex site.
pub fn horn(site: &Arc<Site>, n: usize, k: usize) -> Result<PresheafMap> {
    if n == 0 || k > n {
        return Err(Error::InvalidMap(format!("no horn Λ^{n}_{k}")));
    }
    let c = site.object_id(&n.to_string())?;
    let y = representable(site, c)?;
    let mut seeds = Vec::new();
    for i in (0..=n).filter(|&i| i != k) {
        let face = site.morphism_id(&format!("d{n}_{i}"))?;
        seeds.push((site.source(face), representable_index(site, face)));
    }
    Ok(subpresheaf_generated(&y, &seeds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::site::builtin_simplex_site;

    fn simplex(n: usize) -> Arc<Site> {
        Arc::new(builtin_simplex_site(n).unwrap())
    }

    #[test]
    fn representables_are_valid() {
        for n in 1..=3 {
            let s = simplex(n);
            for c in s.objects() {
                let y = representable(&s, c).unwrap();
                assert!(validate_presheaf(&y).is_empty());
            }
        }
        let s = simplex(1);
        let y1 = representable(&s, 1).unwrap();
        assert_eq!(y1.level_sizes(), vec![2, 3]);
    }

    #[test]
    fn broken_identity_is_reported() {
        let s = simplex(1);
        let y1 = representable(&s, 1).unwrap();
        let mut action: Vec<Vec<usize>> = (0..s.num_morphisms()).map(|f| y1.action_table(f).to_vec()).collect();
        // break d1_0 composed after s0_0 acting on the degenerate edge
        let d = s.morphism_id("d1_0").unwrap();
        action[d] = action[d].iter().map(|&x| 1 - x).collect();
        let p = Presheaf {
            site: s.clone(),
            levels: y1.levels().to_vec(),
            action,
        };
        let v = validate_presheaf(&p);
        assert!(!v.is_empty());
        assert!(v.iter().any(|v| v.morphisms.0 == "s0_0" || v.morphisms.1 == "s0_0"));
        assert!(Presheaf::new(s, p.levels.clone(), p.action.clone()).is_err());
    }

    #[test]
    fn relabelled_representable_is_valid() {
        let s = simplex(2);
        let y = representable(&s, 2).unwrap();
        let r = y.relabel(|c, x| format!("e{c}_{x}"));
        assert!(validate_presheaf(&r).is_empty());
    }

    #[test]
    fn mono_and_epi() {
        let s = simplex(2);
        let one = terminal(&s);
        let two = discrete(&s, &["a", "b"]);
        assert!(PresheafMap::identity(&two).is_mono());
        assert!(!to_terminal(&two, &one).is_mono());
        let b = boundary(&s, 2).unwrap();
        assert!(b.is_mono());
    }

    #[test]
    fn boundary_of_two_simplex_counts() {
        // non-surjective monotone maps, counted by brute force
        let s = simplex(2);
        let b = boundary(&s, 2).unwrap();
        let brute = |m: usize| -> usize {
            // non-surjective monotone maps [m] -> [2]
            let mut count = 0;
            for code in 0..3usize.pow(m as u32 + 1) {
                let mut c = code;
                let v: Vec<usize> = (0..=m).map(|_| { let r = c % 3; c /= 3; r }).collect();
                if v.windows(2).all(|w| w[0] <= w[1]) && !(0..3).all(|k| v.contains(&k)) {
                    count += 1;
                }
            }
            count
        };
        assert_eq!(b.source().level_sizes(), vec![brute(0), brute(1), brute(2)]);
    }

    #[test]
    fn horn_generated_from_faces() {
        let s = simplex(2);
        let h = horn(&s, 2, 1).unwrap();
        let src = h.source();
        assert_eq!(src.size(0), 3);
        // nondegenerate edges: level 1 minus degeneracies of vertices
        assert_eq!(src.size(1) - 3, 2);
        assert!(h.is_mono());
    }

    #[test]
    fn image_of_degeneracy() {
        let s = simplex(1);
        let y1 = representable(&s, 1).unwrap();
        let y0 = representable(&s, 0).unwrap();
        let s0 = s.morphism_id("s0_0").unwrap();
        let m = PresheafMap::from_fn(&y1, &y0, |c, x| {
            let g = s.hom(c, 1)[x];
            representable_index(&s, s.compose(s0, g).unwrap())
        });
        let (epi, mono) = image_factorization(&m);
        assert!(mono.is_iso());
        assert!(epi.is_epi());
        assert!(mono.compose(&epi).unwrap().same_as(&m));
    }

    #[test]
    fn subpresheaf_edge_cases() {
        let s = simplex(2);
        let y = representable(&s, 2).unwrap();
        let all: Vec<(ObjId, usize)> = y.elements_by_degree();
        assert!(subpresheaf_generated(&y, &all).is_iso());
        assert!(subpresheaf_generated(&y, &[]).source().is_empty());
    }
}
