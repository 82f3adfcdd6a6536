//! Finite base categories.
//!
//! A [`Site`] is a finite category with a fully materialized composition
//! table. Sites are built from a presentation (objects, generating
//! morphisms, relations) by bounded completion of the relations into a
//! confluent rewriting system, followed by enumeration of normal forms.

mod builtin;
mod format;
mod rewrite;

pub use builtin::{builtin_cube_site, builtin_simplex_site};
pub use format::{parse_site, serialize_site};

use crate::error::{Error, Result};
use rewrite::RewriteSystem;
use std::collections::HashMap;

/// Default bound on the length of words considered during completion.
pub const DEFAULT_WORD_BOUND: usize = 16;

/// Index of an object of a site.
pub type ObjId = usize;
/// Index of a morphism of a site, in canonical order.
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub source: ObjId,
    pub target: ObjId,
}

/// A word `g1.g2.....gk` denoting `g1 ∘ g2 ∘ ... ∘ gk`; the empty word is the
/// identity on `object`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Word {
    Identity(ObjId),
    Gens(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Presentation {
    pub name: String,
    pub objects: Vec<String>,
    pub degrees: Vec<usize>,
    pub generators: Vec<Generator>,
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(name: impl Into<String>) -> Self {
        Presentation {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn object(&mut self, label: impl Into<String>, degree: usize) -> ObjId {
        self.objects.push(label.into());
        self.degrees.push(degree);
        self.objects.len() - 1
    }

    pub fn generator(&mut self, label: impl Into<String>, source: ObjId, target: ObjId) -> usize {
        self.generators.push(Generator {
            label: label.into(),
            source,
            target,
        });
        self.generators.len() - 1
    }

    pub fn relation(&mut self, lhs: Word, rhs: Word) {
        self.relations.push((lhs, rhs));
    }

    pub fn object_id(&self, label: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn generator_id(&self, label: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.label == label)
    }

    /// Source and target of a word, or `None` if it is not composable.
    pub fn word_type(&self, w: &Word) -> Option<(ObjId, ObjId)> {
        match w {
            Word::Identity(o) => Some((*o, *o)),
            Word::Gens(gs) => {
                let first = self.generators.get(*gs.first()?)?;
                let tgt = first.target;
                let mut src = first.source;
                for &g in &gs[1..] {
                    let gen = self.generators.get(g)?;
                    if gen.target != src {
                        return None;
                    }
                    src = gen.source;
                }
                Some((src, tgt))
            }
        }
    }

    pub fn word_label(&self, w: &Word) -> String {
        match w {
            Word::Identity(o) => format!("id_{}", self.objects[*o]),
            Word::Gens(gs) => gs
                .iter()
                .map(|&g| self.generators[g].label.as_str())
                .collect::<Vec<_>>()
                .join("."),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub label: String,
    pub source: ObjId,
    pub target: ObjId,
    /// Normal-form word; empty for identities.
    pub word: Vec<usize>,
}

/// Concrete interpretation of a site as finite posets and monotone maps.
///
/// Built-in sites carry one: the points of `[n]` are `0..=n` for simplices
/// and `{0,1}^n` (as bitmasks) for cubes. It is used to define interval
/// connections and nerves of categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointModel {
    /// Number of points of each object.
    pub points: Vec<usize>,
    /// `order[c][p][q]` iff `p <= q` in object `c`.
    pub order: Vec<Vec<Vec<bool>>>,
    /// For each morphism, the function on points.
    pub maps: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Site {
    presentation: Presentation,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    /// `table[g * n + f] = g ∘ f` for composable pairs.
    table: Vec<Option<MorId>>,
    into: Vec<Vec<MorId>>,
    hom: Vec<Vec<Vec<MorId>>>,
    by_label: HashMap<String, MorId>,
    points: Option<PointModel>,
}

impl Site {
    pub fn name(&self) -> &str {
        &self.presentation.name
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn num_objects(&self) -> usize {
        self.presentation.objects.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.num_objects()
    }

    pub fn object_label(&self, c: ObjId) -> &str {
        &self.presentation.objects[c]
    }

    pub fn object_id(&self, label: &str) -> Result<ObjId> {
        self.presentation
            .object_id(label)
            .ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    pub fn degree(&self, c: ObjId) -> usize {
        self.presentation.degrees[c]
    }

    pub fn max_degree(&self) -> usize {
        self.presentation.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, f: MorId) -> &Morphism {
        &self.morphisms[f]
    }

    pub fn source(&self, f: MorId) -> ObjId {
        self.morphisms[f].source
    }

    pub fn target(&self, f: MorId) -> ObjId {
        self.morphisms[f].target
    }

    pub fn identity(&self, c: ObjId) -> MorId {
        self.identities[c]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.morphisms[f].word.is_empty()
    }

    pub fn morphism_id(&self, label: &str) -> Result<MorId> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownMorphism(label.to_string()))
    }

    /// `g ∘ f`, or `None` when `source(g) != target(f)`.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.table[g * self.morphisms.len() + f]
    }

    /// Morphisms with the given target, in canonical order.
    pub fn morphisms_into(&self, c: ObjId) -> &[MorId] {
        &self.into[c]
    }

    /// `hom(d, c)` in canonical order.
    pub fn hom(&self, d: ObjId, c: ObjId) -> &[MorId] {
        &self.hom[d][c]
    }

    /// Objects sorted by degree, ties by declaration order.
    pub fn objects_by_degree(&self) -> Vec<ObjId> {
        let mut objs: Vec<ObjId> = self.objects().collect();
        objs.sort_by_key(|&c| (self.degree(c), c));
        objs
    }

    pub fn points(&self) -> Option<&PointModel> {
        self.points.as_ref()
    }

    pub(crate) fn set_points(&mut self, points: PointModel) {
        self.points = Some(points);
    }

    /// A terminal object, if the site has one.
    pub fn terminal_object(&self) -> Option<ObjId> {
        self.objects()
            .find(|&t| self.objects().all(|c| self.hom(c, t).len() == 1))
    }

    /// Exhaustive check of the category axioms; returns every violation.
    pub fn verify(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let n = self.morphisms.len();
        for c in self.objects() {
            let id = self.identity(c);
            for &f in &self.into[c] {
                if self.compose(id, f) != Some(f) {
                    errs.push(format!("left identity fails for {}", self.morphisms[f].label));
                }
            }
            for f in 0..n {
                if self.source(f) == c && self.compose(f, id) != Some(f) {
                    errs.push(format!("right identity fails for {}", self.morphisms[f].label));
                }
            }
        }
        for h in 0..n {
            for g in 0..n {
                let Some(hg) = self.compose(h, g) else { continue };
                for f in 0..n {
                    let Some(gf) = self.compose(g, f) else { continue };
                    let lhs = self.compose(hg, f);
                    let rhs = self.compose(h, gf);
                    if lhs.is_none() || lhs != rhs {
                        errs.push(format!(
                            "associativity fails for ({}, {}, {})",
                            self.morphisms[h].label, self.morphisms[g].label, self.morphisms[f].label
                        ));
                    }
                }
            }
        }
        for g in 0..n {
            for f in 0..n {
                let composable = self.source(g) == self.target(f);
                match self.compose(g, f) {
                    Some(gf) if composable => {
                        if self.source(gf) != self.source(f) || self.target(gf) != self.target(g) {
                            errs.push(format!("composite has wrong type at ({g}, {f})"));
                        }
                    }
                    None if !composable => {}
                    _ => errs.push(format!("composition table not total at ({g}, {f})")),
                }
            }
        }
        errs
    }
}

/// Builds a site from a presentation with the default word bound.
pub fn build_site(presentation: Presentation) -> Result<Site> {
    build_site_bounded(presentation, DEFAULT_WORD_BOUND)
}

/// Builds a site from a presentation, completing the relations into a
/// confluent rewriting system over words of length at most `bound`.
pub fn build_site_bounded(presentation: Presentation, bound: usize) -> Result<Site> {
    for (o, _) in presentation.objects.iter().enumerate() {
        if presentation.objects[..o].contains(&presentation.objects[o]) {
            return Err(Error::InvalidRelation(format!(
                "duplicate object `{}`",
                presentation.objects[o]
            )));
        }
    }
    for (i, g) in presentation.generators.iter().enumerate() {
        if g.source >= presentation.objects.len() || g.target >= presentation.objects.len() {
            return Err(Error::UnknownObject(g.label.clone()));
        }
        if g.label.is_empty() || g.label.contains('.') || g.label.contains(char::is_whitespace) {
            return Err(Error::InvalidRelation(format!("bad generator label `{}`", g.label)));
        }
        if presentation.generators[..i].iter().any(|h| h.label == g.label) {
            return Err(Error::InvalidRelation(format!("duplicate generator `{}`", g.label)));
        }
    }
    let mut rules = Vec::new();
    for (lhs, rhs) in &presentation.relations {
        let lt = presentation.word_type(lhs);
        let rt = presentation.word_type(rhs);
        match (lt, rt) {
            (Some(a), Some(b)) if a == b => {}
            _ => {
                return Err(Error::InvalidRelation(format!(
                    "{} = {}",
                    presentation.word_label(lhs),
                    presentation.word_label(rhs)
                )))
            }
        }
        let l = match lhs {
            Word::Identity(_) => vec![],
            Word::Gens(g) => g.clone(),
        };
        let r = match rhs {
            Word::Identity(_) => vec![],
            Word::Gens(g) => g.clone(),
        };
        if l != r {
            rules.push((l, r));
        }
    }
    let system = RewriteSystem::complete(rules, bound)?;

    // Enumerate normal forms by length.
    let gens = &presentation.generators;
    let mut words: Vec<(ObjId, ObjId, Vec<usize>)> = presentation
        .objects
        .iter()
        .enumerate()
        .map(|(o, _)| (o, o, vec![]))
        .collect();
    let mut frontier: Vec<(ObjId, ObjId, Vec<usize>)> = words.clone();
    let mut len = 0;
    while !frontier.is_empty() {
        len += 1;
        if len > bound {
            return Err(Error::NonTerminatingPresentation { bound });
        }
        let mut next = Vec::new();
        for (src, tgt, w) in &frontier {
            for (gi, g) in gens.iter().enumerate() {
                if g.source != *tgt {
                    continue;
                }
                let mut nw = Vec::with_capacity(w.len() + 1);
                nw.push(gi);
                nw.extend_from_slice(w);
                if system.is_irreducible_prefix(&nw) {
                    next.push((*src, g.target, nw));
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }

    // Canonical order: identities first by object, then words lexicographically.
    words.sort_by(|a, b| a.2.cmp(&b.2).then(a.0.cmp(&b.0)));
    let morphisms: Vec<Morphism> = words
        .into_iter()
        .map(|(src, tgt, w)| {
            let label = if w.is_empty() {
                presentation.word_label(&Word::Identity(src))
            } else {
                presentation.word_label(&Word::Gens(w.clone()))
            };
            Morphism {
                label,
                source: src,
                target: tgt,
                word: w,
            }
        })
        .collect();
    let n = morphisms.len();
    let mut index: HashMap<(ObjId, Vec<usize>), MorId> = HashMap::new();
    for (i, m) in morphisms.iter().enumerate() {
        index.insert((m.source, m.word.clone()), i);
    }
    let identities: Vec<MorId> = (0..presentation.objects.len())
        .map(|o| index[&(o, vec![])])
        .collect();
    let mut table = vec![None; n * n];
    for g in 0..n {
        for f in 0..n {
            if morphisms[g].source != morphisms[f].target {
                continue;
            }
            let mut w = morphisms[g].word.clone();
            w.extend_from_slice(&morphisms[f].word);
            let nf = system.normalize(w);
            let id = index
                .get(&(morphisms[f].source, nf))
                .copied()
                .ok_or(Error::NonTerminatingPresentation { bound })?;
            table[g * n + f] = Some(id);
        }
    }
    let k = presentation.objects.len();
    let mut into = vec![Vec::new(); k];
    let mut hom = vec![vec![Vec::new(); k]; k];
    let mut by_label = HashMap::new();
    for (i, m) in morphisms.iter().enumerate() {
        into[m.target].push(i);
        hom[m.source][m.target].push(i);
        by_label.insert(m.label.clone(), i);
    }
    Ok(Site {
        presentation,
        morphisms,
        identities,
        table,
        into,
        hom,
        by_label,
        points: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category() {
        let mut p = Presentation::new("pt");
        p.object("*", 0);
        let s = build_site(p).unwrap();
        assert_eq!(s.num_morphisms(), 1);
        assert!(s.verify().is_empty());
    }

    #[test]
    fn arrow_category() {
        let mut p = Presentation::new("arrow");
        let a = p.object("a", 0);
        let b = p.object("b", 1);
        p.generator("f", a, b);
        let s = build_site(p).unwrap();
        assert_eq!(s.num_morphisms(), 3);
        assert!(s.verify().is_empty());
        assert_eq!(s.hom(a, b).len(), 1);
    }

    #[test]
    fn free_loop_does_not_terminate() {
        let mut p = Presentation::new("loop");
        let a = p.object("a", 0);
        p.generator("e", a, a);
        assert!(matches!(
            build_site(p),
            Err(Error::NonTerminatingPresentation { .. })
        ));
    }

    #[test]
    fn idempotent_loop() {
        let mut p = Presentation::new("idem");
        let a = p.object("a", 0);
        let e = p.generator("e", a, a);
        p.relation(Word::Gens(vec![e, e]), Word::Gens(vec![e]));
        let s = build_site(p).unwrap();
        assert_eq!(s.num_morphisms(), 2);
        assert!(s.verify().is_empty());
    }

    #[test]
    fn relation_with_mismatched_endpoints_is_rejected() {
        let mut p = Presentation::new("bad");
        let a = p.object("a", 0);
        let b = p.object("b", 1);
        let f = p.generator("f", a, b);
        let g = p.generator("g", b, a);
        p.relation(Word::Gens(vec![f]), Word::Gens(vec![g]));
        assert!(matches!(build_site(p), Err(Error::InvalidRelation(_))));
    }

    #[test]
    fn group_z3() {
        let mut p = Presentation::new("z3");
        let a = p.object("a", 0);
        let g = p.generator("g", a, a);
        p.relation(Word::Gens(vec![g, g, g]), Word::Identity(a));
        let s = build_site(p).unwrap();
        assert_eq!(s.num_morphisms(), 3);
        assert!(s.verify().is_empty());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::site::{builtin_cube_site, builtin_simplex_site};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn sites() -> &'static [Site; 2] {
        static S: OnceLock<[Site; 2]> = OnceLock::new();
        S.get_or_init(|| [builtin_simplex_site(3).unwrap(), builtin_cube_site(2).unwrap()])
    }

    proptest! {
        #[test]
        fn composition_is_associative_and_unital(k in 0usize..2, a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
            let s = &sites()[k];
            let h = a % s.num_morphisms();
            let into: &[MorId] = s.morphisms_into(s.source(h));
            let g = into[b % into.len()];
            let into_g: &[MorId] = s.morphisms_into(s.source(g));
            let f = into_g[c % into_g.len()];
            let hg = s.compose(h, g).unwrap();
            let gf = s.compose(g, f).unwrap();
            prop_assert_eq!(s.compose(hg, f), s.compose(h, gf));
            prop_assert_eq!(s.compose(h, s.identity(s.source(h))), Some(h));
            prop_assert_eq!(s.compose(s.identity(s.target(h)), h), Some(h));
        }
    }
}
