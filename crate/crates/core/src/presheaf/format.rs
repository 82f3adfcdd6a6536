use super::{Presheaf, PresheafMap, Psh};
use crate::error::{Error, Result};
use crate::site::{MorId, Site};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Named presheaves and maps read from files.
#[derive(Debug, Default, Clone)]
pub struct Registry {
    pub presheaves: BTreeMap<String, Psh>,
    pub maps: BTreeMap<String, PresheafMap>,
}

impl Registry {
    pub fn presheaf(&self, name: &str) -> Option<&Psh> {
        self.presheaves.get(name)
    }

    pub fn map(&self, name: &str) -> Option<&PresheafMap> {
        self.maps.get(name)
    }
}

/// Morphism ids of the generators that survive as normal forms.
fn generator_morphisms(site: &Site) -> Vec<(usize, MorId)> {
    let mut out: Vec<(usize, MorId)> = site
        .morphisms()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.word.len() == 1)
        .map(|(f, m)| (m.word[0], f))
        .collect();
    out.sort();
    out
}

enum Block {
    Presheaf {
        name: String,
        line: usize,
        levels: Vec<Option<Vec<String>>>,
        acts: Vec<(usize, MorId, String, String)>,
    },
    Map {
        name: String,
        line: usize,
        source: Psh,
        target: Psh,
        at: Vec<(usize, usize, String, String)>,
    },
}

fn finish(block: Block, site: &Arc<Site>, file: &str, reg: &mut Registry) -> Result<()> {
    let perr = |line: usize, msg: String| Error::Parse {
        file: file.to_string(),
        line,
        msg,
    };
    match block {
        Block::Presheaf {
            name,
            line,
            levels,
            acts,
        } => {
            let levels: Vec<Vec<String>> = levels.into_iter().map(Option::unwrap_or_default).collect();
            let index: Vec<std::collections::HashMap<&str, usize>> = levels
                .iter()
                .map(|l| l.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect())
                .collect();
            let mut given: Vec<Vec<Option<usize>>> = (0..site.num_morphisms())
                .map(|f| vec![None; levels[site.target(f)].len()])
                .collect();
            for (ln, f, a, b) in &acts {
                let (s, t) = (site.source(*f), site.target(*f));
                let x = *index[t].get(a.as_str()).ok_or_else(|| perr(*ln, format!("unknown element `{a}`")))?;
                let y = *index[s].get(b.as_str()).ok_or_else(|| perr(*ln, format!("unknown element `{b}`")))?;
                if given[*f][x].replace(y).is_some_and(|old| old != y) {
                    return Err(perr(*ln, format!("conflicting action on `{a}`")));
                }
            }
            let gens = generator_morphisms(site);
            let gen_mor = |g: usize| gens.iter().find(|(h, _)| *h == g).map(|(_, f)| *f);
            let mut action = Vec::with_capacity(site.num_morphisms());
            for f in 0..site.num_morphisms() {
                let m = site.morphism(f);
                let mut table = Vec::with_capacity(levels[m.target].len());
                for x in 0..levels[m.target].len() {
                    // word g1.g2...gk acts as P(gk)∘...∘P(g1)
                    let mut cur = Some(x);
                    for &g in &m.word {
                        cur = cur.and_then(|y| gen_mor(g).and_then(|gf| given[gf][y]));
                    }
                    let v = match (given[f][x], cur) {
                        (Some(a), Some(b)) if a != b => {
                            return Err(perr(line, format!("action of `{}` disagrees with its generators", m.label)))
                        }
                        (Some(a), _) | (None, Some(a)) => a,
                        (None, None) => {
                            return Err(perr(
                                line,
                                format!("missing action of `{}` on `{}`", m.label, levels[m.target][x]),
                            ))
                        }
                    };
                    table.push(v);
                }
                action.push(table);
            }
            let p = Presheaf::new(site.clone(), levels, action).map_err(|e| perr(line, e.to_string()))?;
            reg.presheaves.insert(name, Arc::new(p));
        }
        Block::Map {
            name,
            line,
            source,
            target,
            at,
        } => {
            let mut comps: Vec<Vec<Option<usize>>> = site.objects().map(|c| vec![None; source.size(c)]).collect();
            for (ln, c, a, b) in &at {
                let x = source.index_of(*c, a).ok_or_else(|| perr(*ln, format!("unknown element `{a}`")))?;
                let y = target.index_of(*c, b).ok_or_else(|| perr(*ln, format!("unknown element `{b}`")))?;
                if comps[*c][x].replace(y).is_some_and(|old| old != y) {
                    return Err(perr(*ln, format!("conflicting value on `{a}`")));
                }
            }
            let mut components = Vec::new();
            for (c, comp) in comps.into_iter().enumerate() {
                let mut v = Vec::new();
                for (x, y) in comp.into_iter().enumerate() {
                    v.push(y.ok_or_else(|| {
                        perr(line, format!("missing value on `{}` at `{}`", source.label(c, x), site.object_label(c)))
                    })?);
                }
                components.push(v);
            }
            let m = PresheafMap::new(source, target, components).map_err(|e| perr(line, e.to_string()))?;
            reg.maps.insert(name, m);
        }
    }
    Ok(())
}

/// Parses presheaf and map blocks, adding them to `reg`.
///
/// Actions only need to be given for generators; other morphisms act through
/// their normal-form words.
pub fn parse_presheaf_file(text: &str, file: &str, site: &Arc<Site>, reg: &mut Registry) -> Result<()> {
    let mut current: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| Error::Parse {
            file: file.to_string(),
            line,
            msg,
        };
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let head_obj = |tok: &str| -> Result<usize> {
            let name = tok.strip_suffix(':').ok_or_else(|| err("expected `<object>:`".into()))?;
            site.object_id(name).map_err(|_| err(format!("unknown object `{name}`")))
        };
        match toks[0] {
            "presheaf" => {
                if toks.len() != 4 || toks[2] != "over" {
                    return Err(err("expected `presheaf <name> over <site>`".into()));
                }
                if toks[3] != site.name() {
                    return Err(err(format!("presheaf over `{}` but site is `{}`", toks[3], site.name())));
                }
                if let Some(b) = current.take() {
                    finish(b, site, file, reg)?;
                }
                if reg.presheaves.contains_key(toks[1]) {
                    return Err(err(format!("duplicate presheaf `{}`", toks[1])));
                }
                current = Some(Block::Presheaf {
                    name: toks[1].to_string(),
                    line,
                    levels: vec![None; site.num_objects()],
                    acts: Vec::new(),
                });
            }
            "map" => {
                if toks.len() != 5 || toks[3] != "->" {
                    return Err(err("expected `map <name>: <P> -> <Q>`".into()));
                }
                if let Some(b) = current.take() {
                    finish(b, site, file, reg)?;
                }
                let name = toks[1].strip_suffix(':').ok_or_else(|| err("expected `<name>:`".into()))?;
                if reg.maps.contains_key(name) {
                    return Err(err(format!("duplicate map `{name}`")));
                }
                let get = |n: &str| reg.presheaf(n).cloned().ok_or_else(|| err(format!("unknown presheaf `{n}`")));
                current = Some(Block::Map {
                    name: name.to_string(),
                    line,
                    source: get(toks[2])?,
                    target: get(toks[4])?,
                    at: Vec::new(),
                });
            }
            "level" => {
                let Some(Block::Presheaf { levels, .. }) = current.as_mut() else {
                    return Err(err("`level` outside a presheaf block".into()));
                };
                let c = head_obj(toks.get(1).copied().unwrap_or(""))?;
                if levels[c].is_some() {
                    return Err(err("duplicate level".into()));
                }
                levels[c] = Some(toks[2..].iter().map(|s| s.to_string()).collect());
            }
            "act" => {
                let Some(Block::Presheaf { acts, .. }) = current.as_mut() else {
                    return Err(err("`act` outside a presheaf block".into()));
                };
                if toks.len() != 5 || toks[3] != "->" {
                    return Err(err("expected `act <morphism>: <e> -> <e'>`".into()));
                }
                let name = toks[1].strip_suffix(':').ok_or_else(|| err("expected `<morphism>:`".into()))?;
                let f = site.morphism_id(name).map_err(|_| err(format!("unknown morphism `{name}`")))?;
                acts.push((line, f, toks[2].to_string(), toks[4].to_string()));
            }
            "at" => {
                let Some(Block::Map { at, .. }) = current.as_mut() else {
                    return Err(err("`at` outside a map block".into()));
                };
                if toks.len() != 5 || toks[3] != "->" {
                    return Err(err("expected `at <object>: <e> -> <e'>`".into()));
                }
                let c = head_obj(toks[1])?;
                at.push((line, c, toks[2].to_string(), toks[4].to_string()));
            }
            other => return Err(err(format!("unrecognized line starting with `{other}`"))),
        }
    }
    if let Some(b) = current.take() {
        finish(b, site, file, reg)?;
    }
    Ok(())
}

/// Serializes a presheaf, giving actions for generators only.
pub fn serialize_presheaf(name: &str, p: &Presheaf) -> String {
    let site = p.site();
    let mut out = format!("presheaf {} over {}\n", name, site.name());
    for c in site.objects() {
        out.push_str(&format!("level {}:", site.object_label(c)));
        for l in p.level(c) {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
    }
    for (_, f) in generator_morphisms(site) {
        let (s, t) = (site.source(f), site.target(f));
        for x in 0..p.size(t) {
            out.push_str(&format!(
                "act {}: {} -> {}\n",
                site.morphism(f).label,
                p.label(t, x),
                p.label(s, p.act(f, x))
            ));
        }
    }
    out
}

/// Serializes a map between named presheaves.
pub fn serialize_map(name: &str, source: &str, target: &str, m: &PresheafMap) -> String {
    let site = m.site();
    let mut out = format!("map {name}: {source} -> {target}\n");
    for c in site.objects() {
        for x in 0..m.source().size(c) {
            out.push_str(&format!(
                "at {}: {} -> {}\n",
                site.object_label(c),
                m.source().label(c, x),
                m.target().label(c, m.apply(c, x))
            ));
        }
    }
    out
}
