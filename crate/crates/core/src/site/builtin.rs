//! Truncated simplex and cube categories.

use super::{build_site, ObjId, PointModel, Presentation, Site, Word};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

fn gen(p: &Presentation, label: &str) -> usize {
    p.generator_id(label).expect("generator declared")
}

fn word(p: &Presentation, labels: &[String]) -> Word {
    Word::Gens(labels.iter().map(|l| gen(p, l)).collect())
}

/// Function on points of a generator, given the interpretation of each label.
fn eval_word(gens: &[Vec<usize>], src_points: usize, w: &[usize]) -> Vec<usize> {
    (0..src_points)
        .map(|mut x| {
            for &g in w.iter().rev() {
                x = gens[g][x];
            }
            x
        })
        .collect()
}

fn attach_points(
    mut site: Site,
    points: Vec<usize>,
    order: Vec<Vec<Vec<bool>>>,
    gen_maps: &[Vec<usize>],
) -> Result<Site> {
    let maps: Vec<Vec<usize>> = site
        .morphisms()
        .iter()
        .map(|m| eval_word(gen_maps, points[m.source], &m.word))
        .collect();
    for c in site.objects() {
        for d in site.objects() {
            let hom = site.hom(d, c);
            for (i, &f) in hom.iter().enumerate() {
                for &g in &hom[..i] {
                    if maps[f] == maps[g] {
                        return Err(Error::InvalidRelation(format!(
                            "built-in presentation is not faithful: {} = {}",
                            site.morphism(f).label,
                            site.morphism(g).label
                        )));
                    }
                }
            }
        }
    }
    site.set_points(PointModel {
        points,
        order,
        maps,
    });
    Ok(site)
}

/// The simplex category truncated to `[0..=n]`, presented by coface and
/// codegeneracy maps subject to the cosimplicial identities.
pub fn builtin_simplex_site(n: usize) -> Result<Site> {
    if n == 0 {
        return Err(Error::InvalidRelation("truncation level must be >= 1".into()));
    }
    let mut p = Presentation::new(format!("simplex{n}"));
    let objs: Vec<ObjId> = (0..=n).map(|k| p.object(k.to_string(), k)).collect();
    let mut gen_maps: Vec<Vec<usize>> = Vec::new();
    // cofaces d{k}_{i}: [k-1] -> [k], skipping i
    for k in 1..=n {
        for i in 0..=k {
            p.generator(format!("d{k}_{i}"), objs[k - 1], objs[k]);
            gen_maps.push((0..k).map(|x| if x < i { x } else { x + 1 }).collect());
        }
    }
    // codegeneracies s{k}_{j}: [k+1] -> [k], hitting j twice
    for k in 0..n {
        for j in 0..=k {
            p.generator(format!("s{k}_{j}"), objs[k + 1], objs[k]);
            gen_maps.push((0..k + 2).map(|x| if x <= j { x } else { x - 1 }).collect());
        }
    }
    let d = |k: usize, i: usize| format!("d{k}_{i}");
    let s = |k: usize, j: usize| format!("s{k}_{j}");
    let mut rels: Vec<(Vec<String>, Option<Vec<String>>, usize)> = Vec::new();
    // d^j d^i = d^i d^{j-1}, i < j
    for k in 1..n {
        for j in 0..=k + 1 {
            for i in 0..j {
                rels.push((vec![d(k + 1, j), d(k, i)], Some(vec![d(k + 1, i), d(k, j - 1)]), 0));
            }
        }
    }
    // s^j s^i = s^i s^{j+1}, i <= j
    for k in 1..n {
        for j in 0..k {
            for i in 0..=j {
                rels.push((vec![s(k - 1, j), s(k, i)], Some(vec![s(k - 1, i), s(k, j + 1)]), 0));
            }
        }
    }
    // s^j d^i
    for k in 1..=n {
        for j in 0..k {
            for i in 0..=k {
                let lhs = vec![s(k - 1, j), d(k, i)];
                if i == j || i == j + 1 {
                    rels.push((lhs, None, k - 1));
                } else if i < j {
                    rels.push((lhs, Some(vec![d(k - 1, i), s(k - 2, j - 1)]), 0));
                } else {
                    rels.push((lhs, Some(vec![d(k - 1, i - 1), s(k - 2, j)]), 0));
                }
            }
        }
    }
    for (l, r, obj) in rels {
        let lw = word(&p, &l);
        let rw = match r {
            Some(r) => word(&p, &r),
            None => Word::Identity(objs[obj]),
        };
        p.relation(lw, rw);
    }
    let points: Vec<usize> = (0..=n).map(|k| k + 1).collect();
    let order = points
        .iter()
        .map(|&m| (0..m).map(|a| (0..m).map(|b| a <= b).collect()).collect())
        .collect();
    let site = build_site(p)?;
    attach_points(site, points, order, &gen_maps)
}

/// The cube category with both connections truncated to `[0..=n]`.
///
/// Generators are faces `d{k}_{i}_{e}` (insert constant `e` at coordinate
/// `i`), degeneracies `s{k}_{i}` (drop coordinate `i`) and connections
/// `g{k}_{i}_{e}` (merge coordinates `i, i+1` by min for `e = 0`, max for
/// `e = 1`). The relations are all equations between composable words of
/// length at most two that hold in the standard interpretation on
/// `{0,1}^k`; completion recovers the full category.
pub fn builtin_cube_site(n: usize) -> Result<Site> {
    if n == 0 {
        return Err(Error::InvalidRelation("truncation level must be >= 1".into()));
    }
    let mut p = Presentation::new(format!("cube{n}"));
    let objs: Vec<ObjId> = (0..=n).map(|k| p.object(k.to_string(), k)).collect();
    let mut gen_maps: Vec<Vec<usize>> = Vec::new();
    let bit = |x: usize, i: usize| (x >> i) & 1;
    for k in 1..=n {
        for i in 0..k {
            for e in 0..2 {
                p.generator(format!("d{k}_{i}_{e}"), objs[k - 1], objs[k]);
                gen_maps.push(
                    (0..1usize << (k - 1))
                        .map(|x| {
                            let low = x & ((1 << i) - 1);
                            let high = x >> i;
                            low | (e << i) | (high << (i + 1))
                        })
                        .collect(),
                );
            }
        }
    }
    for k in 0..n {
        for i in 0..=k {
            p.generator(format!("s{k}_{i}"), objs[k + 1], objs[k]);
            gen_maps.push(
                (0..1usize << (k + 1))
                    .map(|x| {
                        let low = x & ((1 << i) - 1);
                        let high = x >> (i + 1);
                        low | (high << i)
                    })
                    .collect(),
            );
        }
    }
    for k in 1..n {
        for i in 0..k {
            for e in 0..2 {
                p.generator(format!("g{k}_{i}_{e}"), objs[k + 1], objs[k]);
                gen_maps.push(
                    (0..1usize << (k + 1))
                        .map(|x| {
                            let a = bit(x, i);
                            let b = bit(x, i + 1);
                            let v = if e == 0 { a & b } else { a | b };
                            let low = x & ((1 << i) - 1);
                            let high = x >> (i + 2);
                            low | (v << i) | (high << (i + 1))
                        })
                        .collect(),
                );
            }
        }
    }
    let points: Vec<usize> = (0..=n).map(|k| 1usize << k).collect();
    // Words of length <= 2 grouped by semantics.
    let mut classes: BTreeMap<(ObjId, ObjId, Vec<usize>), Vec<Vec<usize>>> = BTreeMap::new();
    for o in 0..=n {
        classes
            .entry((o, o, (0..points[o]).collect()))
            .or_default()
            .push(vec![]);
    }
    let ng = p.generators.len();
    for g in 0..ng {
        let (s, t) = (p.generators[g].source, p.generators[g].target);
        classes
            .entry((s, t, gen_maps[g].clone()))
            .or_default()
            .push(vec![g]);
    }
    for g in 0..ng {
        for f in 0..ng {
            if p.generators[g].source != p.generators[f].target {
                continue;
            }
            let s = p.generators[f].source;
            let t = p.generators[g].target;
            let w = vec![g, f];
            let m = eval_word(&gen_maps, points[s], &w);
            classes.entry((s, t, m)).or_default().push(w);
        }
    }
    for ((s, _, _), words) in classes {
        let mut words = words;
        words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let rep = &words[0];
        let rep_w = if rep.is_empty() {
            Word::Identity(s)
        } else {
            Word::Gens(rep.clone())
        };
        for w in &words[1..] {
            p.relation(Word::Gens(w.clone()), rep_w.clone());
        }
    }
    let order = points
        .iter()
        .map(|&m| (0..m).map(|a| (0..m).map(|b| a & b == a).collect()).collect())
        .collect();
    let site = build_site(p)?;
    attach_points(site, points, order, &gen_maps)
}
