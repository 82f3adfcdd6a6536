//! Acceptance criteria. Prints one line per criterion and exits non-zero if
//! any of them fails.

use psw::audit::{load_manifest, path_object_checks, Budgets, Corpus, Families, Overrides, Role, SiteSpec};
use psw::cylinder::{builtin_interval, verify_interval_laws};
use psw::glue::{equivalence_extend, trivfib_extend};
use psw::lcc::{base_change, pushforward, SliceObject};
use psw::lifting::{
    cell_certify, gen_squares, gen_trivcofs, has_rlp_bounded, horn_family, is_trivial_fibration, CellOutcome,
    GeneratorFamily, RlpBudget, Verdict,
};
use psw::limits::{product, pullback};
use psw::presheaf::{subobject_from_mask, Presheaf, PresheafMap, Psh};
use psw::site::{builtin_cube_site, builtin_simplex_site, ObjId};
use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

const C1_LIMIT: Duration = Duration::from_secs(10);
const C2_LIMIT: Duration = Duration::from_secs(120);
const C5_LIMIT: Duration = Duration::from_secs(600);
const C2_MIN_PAIRS: usize = 10;
const C4_MIN_MAPS: usize = 20;
const C5_MAX_CANDIDATES: u64 = 1_000_000;
const C6_MIN_INPUTS: usize = 5;
const C7_MIN_INSTANCES: usize = 5;
const C7_MAX_CANDIDATES: usize = 20_000;
const C8_MIN_TRIANGLES: usize = 15;
const C9_MIN_INSTANCES: usize = 3;
const C9_STAGES: usize = 6;
const C9_CELLS: usize = 64;

fn corpus(name: &str) -> Corpus {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(format!("{name}.manifest"));
    load_manifest(&path, &Overrides::default()).expect("default corpus loads")
}

fn holds(v: Verdict) -> Option<bool> {
    match v {
        Verdict::Holds => Some(true),
        Verdict::Fails => Some(false),
        Verdict::Unknown => None,
    }
}

fn rlp(p: &PresheafMap, fam: &GeneratorFamily) -> Option<bool> {
    holds(has_rlp_bounded(p, fam, RlpBudget::default()).verdict())
}

// ---------------------------------------------------------------------------
// naive natural-family enumeration

/// Index set of `y(c) ×_B A` over `b`: triples `(d, g: d → c, a)` with
/// `m(a) = B(g)(b)`.
fn family_index(m: &PresheafMap, c: ObjId, b: usize) -> Vec<(ObjId, usize, usize)> {
    let site = m.site();
    let (a_psh, b_psh) = (m.source(), m.target());
    let mut out = Vec::new();
    for d in site.objects() {
        for &g in site.hom(d, c) {
            for a in 0..a_psh.size(d) {
                if m.apply(d, a) == b_psh.act(g, b) {
                    out.push((d, g, a));
                }
            }
        }
    }
    out
}

/// Every natural family `s` on the index set with `p(s(d, g, a)) = a`, by
/// backtracking over plain assignments.
fn naive_families(m: &PresheafMap, p: &PresheafMap, c: ObjId, b: usize) -> Vec<Vec<usize>> {
    let site = m.site();
    let a_psh = m.source();
    let x = p.source();
    let idx = family_index(m, c, b);
    let pos: HashMap<(ObjId, usize, usize), usize> = idx.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // constraints X(h)(s[i]) == s[j]
    let mut cons: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); idx.len()];
    for (i, &(d, g, a)) in idx.iter().enumerate() {
        for &h in site.morphisms_into(d) {
            let j = pos[&(site.source(h), site.compose(g, h).unwrap(), a_psh.act(h, a))];
            cons[i].push((h, j, true));
            cons[j].push((h, i, false));
        }
    }
    let choices: Vec<Vec<usize>> = idx
        .iter()
        .map(|&(d, _, a)| (0..x.size(d)).filter(|&y| p.apply(d, y) == a).collect())
        .collect();
    let mut out = Vec::new();
    let mut s: Vec<Option<usize>> = vec![None; idx.len()];
    fn go(
        i: usize,
        s: &mut Vec<Option<usize>>,
        choices: &[Vec<usize>],
        cons: &[Vec<(usize, usize, bool)>],
        x: &Presheaf,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == s.len() {
            out.push(s.iter().map(|v| v.unwrap()).collect());
            return;
        }
        for &y in &choices[i] {
            s[i] = Some(y);
            let ok = cons[i].iter().all(|&(h, j, upper)| match s[j] {
                None => true,
                Some(z) => {
                    if upper {
                        x.act(h, y) == z
                    } else {
                        x.act(h, z) == y
                    }
                }
            });
            if ok {
                go(i + 1, s, choices, cons, x, out);
            }
        }
        s[i] = None;
    }
    go(0, &mut s, &choices, &cons, x, &mut out);
    out
}

/// The naive pushforward as a presheaf over `B`, with per-level lookup of
/// `(b, family)`.
struct NaivePushforward {
    total: Psh,
    anchor: PresheafMap,
    elems: Vec<Vec<(usize, Vec<usize>)>>,
    lookup: Vec<HashMap<(usize, Vec<usize>), usize>>,
}

fn naive_pushforward(m: &PresheafMap, p: &PresheafMap) -> NaivePushforward {
    let site = m.site().clone();
    let bb = m.target();
    let mut elems: Vec<Vec<(usize, Vec<usize>)>> = Vec::new();
    for c in site.objects() {
        let mut lv = Vec::new();
        for b in 0..bb.size(c) {
            for s in naive_families(m, p, c, b) {
                lv.push((b, s));
            }
        }
        elems.push(lv);
    }
    let lookup: Vec<HashMap<(usize, Vec<usize>), usize>> = elems
        .iter()
        .map(|lv| lv.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect())
        .collect();
    let index: Vec<Vec<HashMap<(ObjId, usize, usize), usize>>> = site
        .objects()
        .map(|c| {
            (0..bb.size(c))
                .map(|b| family_index(m, c, b).into_iter().enumerate().map(|(i, e)| (e, i)).collect())
                .collect()
        })
        .collect();
    let levels: Vec<Vec<String>> = elems
        .iter()
        .map(|lv| {
            lv.iter()
                .map(|(b, s)| {
                    let v: Vec<String> = s.iter().map(usize::to_string).collect();
                    format!("n{b}:{}", v.join("."))
                })
                .collect()
        })
        .collect();
    let mut action = Vec::new();
    for f in 0..site.num_morphisms() {
        let (cp, c) = (site.source(f), site.target(f));
        let table: Vec<usize> = elems[c]
            .iter()
            .map(|(b, s)| {
                let b2 = bb.act(f, *b);
                let s2: Vec<usize> = family_index(m, cp, b2)
                    .iter()
                    .map(|&(d, g, a)| s[index[c][*b][&(d, site.compose(f, g).unwrap(), a)]])
                    .collect();
                lookup[cp][&(b2, s2)]
            })
            .collect();
        action.push(table);
    }
    let total: Psh = Arc::new(Presheaf::new(site.clone(), levels, action).expect("naive pushforward is a presheaf"));
    let comps = elems.iter().map(|lv| lv.iter().map(|(b, _)| *b).collect()).collect();
    let anchor = PresheafMap::new(total.clone(), bb.clone(), comps).expect("anchor is natural");
    NaivePushforward {
        total,
        anchor,
        elems,
        lookup,
    }
}

// ---------------------------------------------------------------------------
// naive lifting oracle

/// A small generating set of `P`: greedy cover by generated subpresheaves,
/// preferring lower degree on ties.
fn generators(p: &Presheaf) -> Vec<(ObjId, usize)> {
    let site = p.site();
    let closure = |c: ObjId, x: usize| -> Vec<(ObjId, usize)> {
        let mut v: Vec<(ObjId, usize)> = site.morphisms_into(c).iter().map(|&f| (site.source(f), p.act(f, x))).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let all: Vec<(ObjId, usize)> = site.objects().flat_map(|c| (0..p.size(c)).map(move |x| (c, x))).collect();
    let closures: Vec<Vec<(ObjId, usize)>> = all.iter().map(|&(c, x)| closure(c, x)).collect();
    let mut covered: HashSet<(ObjId, usize)> = HashSet::new();
    let mut out = Vec::new();
    while covered.len() < all.len() {
        let best = (0..all.len())
            .filter(|&i| !covered.contains(&all[i]))
            .max_by_key(|&i| {
                let gain = closures[i].iter().filter(|e| !covered.contains(*e)).count();
                (gain, std::cmp::Reverse(site.degree(all[i].0)), std::cmp::Reverse(i))
            })
            .unwrap();
        out.push(all[best]);
        covered.extend(closures[best].iter().copied());
    }
    out
}

/// All natural maps `P → X` by assigning generators freely and keeping the
/// consistent assignments; `None` past the candidate limit.
fn all_maps_naive(p: &Psh, x: &Psh, limit: u64) -> Option<Vec<Vec<Vec<usize>>>> {
    let site = p.site();
    let gens = generators(p);
    let mut count: u64 = 1;
    for &(c, _) in &gens {
        count = count.checked_mul(x.size(c) as u64)?;
        if count > limit {
            return None;
        }
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        if gens.iter().all(|&(c, _)| x.size(c) > 0) || gens.is_empty() {
            let mut comps: Vec<Vec<Option<usize>>> = site.objects().map(|c| vec![None; p.size(c)]).collect();
            let mut ok = true;
            'gens: for (k, &(c, e)) in gens.iter().enumerate() {
                for &f in site.morphisms_into(c) {
                    let (d, pe, xe) = (site.source(f), p.act(f, e), x.act(f, choice[k]));
                    match comps[d][pe] {
                        Some(v) if v != xe => {
                            ok = false;
                            break 'gens;
                        }
                        _ => comps[d][pe] = Some(xe),
                    }
                }
            }
            if ok {
                let comps: Vec<Vec<usize>> = comps.into_iter().map(|l| l.into_iter().map(|v| v.unwrap()).collect()).collect();
                let natural = (0..site.num_morphisms())
                    .all(|f| (0..p.size(site.target(f))).all(|e| x.act(f, comps[site.target(f)][e]) == comps[site.source(f)][p.act(f, e)]));
                assert!(natural, "generator extension is natural");
                out.push(comps);
            }
        } else {
            break;
        }
        for k in 0..gens.len() {
            choice[k] += 1;
            if choice[k] < x.size(gens[k].0) {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    Some(out)
}

fn compose_comps(g: &[Vec<usize>], f: &[Vec<usize>]) -> Vec<Vec<usize>> {
    f.iter().zip(g).map(|(fc, gc)| fc.iter().map(|&y| gc[y]).collect()).collect()
}

/// `l ⧄ p` by enumerating every attachment and every diagonal.
fn naive_lifts(l: &PresheafMap, p: &PresheafMap, limit: u64) -> Option<bool> {
    let diagonals = all_maps_naive(l.target(), p.source(), limit)?;
    let tops = all_maps_naive(l.source(), p.source(), limit)?;
    let bottoms = all_maps_naive(l.target(), p.target(), limit)?;
    let lc = l.components();
    let pc = p.components();
    let solved: HashSet<(Vec<Vec<usize>>, Vec<Vec<usize>>)> = diagonals
        .iter()
        .map(|d| (compose_comps(d, lc), compose_comps(pc, d)))
        .collect();
    let mut by_bottom: HashMap<Vec<Vec<usize>>, Vec<&Vec<Vec<usize>>>> = HashMap::new();
    for v in &bottoms {
        by_bottom.entry(compose_comps(v, lc)).or_default().push(v);
    }
    for u in &tops {
        if let Some(vs) = by_bottom.get(&compose_comps(pc, u)) {
            for v in vs {
                if !solved.contains(&(u.clone(), (*v).clone())) {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

fn naive_family(fam: &GeneratorFamily, p: &PresheafMap) -> Option<bool> {
    let mut all = true;
    for m in &fam.members {
        all &= naive_lifts(m.attach(), p, C5_MAX_CANDIDATES)?;
    }
    Some(all)
}

// ---------------------------------------------------------------------------

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn c1() -> Outcome {
    let t = Instant::now();
    let mut failures = Vec::new();
    let mut names = HashSet::new();
    for (tag, site) in [("simplex3", builtin_simplex_site(3)), ("cube2", builtin_cube_site(2))] {
        let site = Arc::new(site.expect("builtin site"));
        let s = builtin_interval(&site).expect("builtin interval");
        for (n, ok) in verify_interval_laws(&s).checks {
            if !ok {
                failures.push(format!("{tag}/{n}"));
            }
            names.insert(n);
        }
    }
    let covered = names.contains("contraction-connection") && names.contains("disjoint-endpoints");
    let el = t.elapsed();
    outcome(
        failures.is_empty() && covered && el < C1_LIMIT,
        format!("{} laws per site, failures {:?}, {:.2}s", names.len(), failures, el.as_secs_f64()),
    )
}

fn c2() -> Outcome {
    let t = Instant::now();
    let c = corpus("simplex2");
    let site = &c.site;
    let map = |n: &str| c.map(n).unwrap().clone();
    let psh = |n: &str| c.presheaf(n).unwrap().clone();
    let ms = ["d0", "d1", "e0", "x", "bd1", "bd2", "h21", "h20", "j0", "j2", "idG2"];
    let fibres = ["D2", "G2", "Z2"];
    let mut pairs = 0;
    let mut bad = Vec::new();
    for (i, mn) in ms.iter().enumerate() {
        let m = map(mn);
        let a = m.source().clone();
        let fibre = psh(fibres[i % fibres.len()]);
        let candidates = [product(&a, &fibre).p1, PresheafMap::identity(&a)];
        for (j, p) in candidates.into_iter().enumerate() {
            pairs += 1;
            let tag = format!("{mn}/{j}");
            let pf = match pushforward(&m, &SliceObject::new(p.clone())) {
                Ok(pf) => pf,
                Err(e) => {
                    bad.push(format!("{tag}: {e}"));
                    continue;
                }
            };
            let bc = base_change(&m, &pf.slice).unwrap();
            let pb = &bc.pullback;
            let mediator: Vec<Vec<usize>> = site
                .objects()
                .map(|c| {
                    (0..pb.apex.size(c))
                        .map(|k| {
                            let (a, i) = (pb.p1.apply(c, k), pb.p2.apply(c, k));
                            pf.value(c, i, site.identity(c), a).unwrap()
                        })
                        .collect()
                })
                .collect();
            let med = PresheafMap::new(pb.apex.clone(), p.source().clone(), mediator).unwrap();
            let over = site
                .objects()
                .all(|c| (0..pb.apex.size(c)).all(|k| p.apply(c, med.apply(c, k)) == pb.p1.apply(c, k)));
            if !(med.is_iso() && over) {
                bad.push(format!("{tag}: reflection mediator not a bijection over A"));
            }
            let naive = naive_pushforward(&m, &p);
            for c in site.objects() {
                for b in 0..m.target().size(c) {
                    let lib = (0..pf.slice.total.size(c)).filter(|&i| pf.slice.anchor.apply(c, i) == b).count();
                    let nv = naive.elems[c].iter().filter(|(bb, _)| *bb == b).count();
                    if lib != nv {
                        bad.push(format!("{tag}: fibre over {b} at {c}: {lib} vs naive {nv}"));
                    }
                }
            }
        }
    }
    let el = t.elapsed();
    outcome(
        bad.is_empty() && pairs >= C2_MIN_PAIRS && el < C2_LIMIT,
        format!("{pairs} pairs, mismatches {bad:?}, {:.2}s", el.as_secs_f64()),
    )
}

fn c3() -> Outcome {
    let mut total = 0;
    let mut bad = Vec::new();
    for name in ["simplex2", "cube2"] {
        let c = corpus(name);
        let fams = Families::new(&c.site, &c.interval, matches!(c.site_spec, SiteSpec::Simplex(_))).unwrap();
        for x in c.fibrant() {
            for chk in path_object_checks(&c.interval, &fams, &x, c.presheaf(&x).unwrap(), &Budgets::default()) {
                total += 1;
                if chk.verdict != Verdict::Holds {
                    bad.push(format!("{name}/{} {}", chk.name, chk.verdict.as_str()));
                }
            }
        }
    }
    outcome(bad.is_empty() && total > 0, format!("{total} checks, failures {bad:?}"))
}

fn c4() -> Outcome {
    let c = corpus("simplex2");
    let j = gen_trivcofs(&c.site, &c.interval).unwrap();
    let jp = gen_squares(&c.site, &c.interval).unwrap();
    let maps = c.sweep_maps();
    let mut bad = Vec::new();
    for n in &maps {
        let p = c.map(n).unwrap();
        let (a, b) = (rlp(p, &j), rlp(p, &jp));
        if a.is_none() || a != b {
            bad.push(format!("{n}: J {a:?} J' {b:?}"));
        }
    }
    outcome(
        bad.is_empty() && maps.len() >= C4_MIN_MAPS,
        format!("{} maps, discrepancies {bad:?}", maps.len()),
    )
}

fn c5() -> Outcome {
    let t = Instant::now();
    let c = corpus("simplex2");
    let j = gen_trivcofs(&c.site, &c.interval).unwrap();
    let horns = horn_family(&c.site).unwrap();
    let maps = c.sweep_maps();
    let mut bad = Vec::new();
    let mut oracle = 0;
    for n in &maps {
        let p = c.map(n).unwrap();
        let (fj, fh) = (rlp(p, &j), rlp(p, &horns));
        if fj.is_none() || fj != fh {
            bad.push(format!("{n}: J {fj:?} horn {fh:?}"));
            continue;
        }
        if let (Some(nj), Some(nh)) = (naive_family(&j, p), naive_family(&horns, p)) {
            oracle += 1;
            if Some(nj) != fj || Some(nh) != fh {
                bad.push(format!("{n}: naive J {nj} horn {nh}, engine {fj:?}"));
            }
        }
    }
    let el = t.elapsed();
    outcome(
        bad.is_empty() && oracle > 0 && el < C5_LIMIT,
        format!(
            "{} maps, {oracle} replayed by the naive oracle, discrepancies {bad:?}, {:.2}s",
            maps.len(),
            el.as_secs_f64()
        ),
    )
}

fn c6() -> Outcome {
    let c = corpus("simplex2");
    let mut n = 0;
    let mut degenerate_m = false;
    let mut degenerate_f = false;
    let mut bad = Vec::new();
    for r in &c.roles {
        let Role::Glue { m, y1, x0, g } = r else { continue };
        n += 1;
        let input = psw::audit::glue_input(&c, m, y1, x0, g.as_deref()).unwrap();
        degenerate_m |= input.m.is_iso();
        degenerate_f |= input.f.is_iso() && g.is_none();
        match equivalence_extend(&c.interval, &input) {
            Ok(out) => {
                for (k, ok) in &out.checks {
                    if !ok {
                        bad.push(format!("{m},{y1}: {k}"));
                    }
                }
            }
            Err(e) => bad.push(format!("{m},{y1}: {e}")),
        }
    }
    outcome(
        bad.is_empty() && n >= C6_MIN_INPUTS && degenerate_m && degenerate_f,
        format!("{n} inputs (m = id: {degenerate_m}, f = id: {degenerate_f}), failures {bad:?}"),
    )
}

/// Closed subsets of the elements of `n` containing every element over the
/// image of `m`; each is one candidate extension.
fn candidate_extensions(naive: &NaivePushforward, m: &PresheafMap) -> Option<Vec<Vec<Vec<bool>>>> {
    let site = m.site();
    let img: Vec<HashSet<usize>> = site
        .objects()
        .map(|c| (0..m.source().size(c)).map(|a| m.apply(c, a)).collect())
        .collect();
    let mut objs: Vec<ObjId> = site.objects().collect();
    objs.sort_by_key(|&c| site.degree(c));
    let free: Vec<(ObjId, usize)> = objs
        .iter()
        .flat_map(|&c| (0..naive.total.size(c)).map(move |i| (c, i)))
        .filter(|&(c, i)| !img[c].contains(&naive.elems[c][i].0))
        .collect();
    let mask: Vec<Vec<bool>> = site
        .objects()
        .map(|c| (0..naive.total.size(c)).map(|i| img[c].contains(&naive.elems[c][i].0)).collect())
        .collect();
    let pos: HashMap<(ObjId, usize), usize> = free.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    // free restrictions and free parents of each free element, by position
    let mut down: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
    for (k, &(c, i)) in free.iter().enumerate() {
        for &f in site.morphisms_into(c) {
            if let Some(&j) = pos.get(&(site.source(f), naive.total.act(f, i))) {
                if j != k {
                    down[k].push(j);
                    up[j].push(k);
                }
            }
        }
    }
    fn go(k: usize, chosen: &mut Vec<Option<bool>>, down: &[Vec<usize>], up: &[Vec<usize>], out: &mut Vec<Vec<bool>>) -> bool {
        if out.len() > C7_MAX_CANDIDATES {
            return false;
        }
        if k == chosen.len() {
            out.push(chosen.iter().map(|v| v.unwrap()).collect());
            return true;
        }
        // out: no chosen parent; in: no excluded restriction
        for take in [false, true] {
            let ok = if take {
                down[k].iter().all(|&j| chosen[j] != Some(false))
            } else {
                up[k].iter().all(|&j| chosen[j] != Some(true))
            };
            if ok {
                chosen[k] = Some(take);
                let r = go(k + 1, chosen, down, up, out);
                chosen[k] = None;
                if !r {
                    return false;
                }
            }
        }
        true
    }
    let mut picks = Vec::new();
    if !go(0, &mut vec![None; free.len()], &down, &up, &mut picks) {
        return None;
    }
    let out = picks
        .into_iter()
        .map(|pick| {
            let mut m = mask.clone();
            for (k, &(c, i)) in free.iter().enumerate() {
                m[c][i] = pick[k];
            }
            m
        })
        .collect();
    Some(out)
}

fn c7() -> Outcome {
    let c = corpus("simplex2");
    let mut n = 0;
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for r in &c.roles {
        let Role::Extension { cartesian: false, m, p } = r else { continue };
        let tag = format!("{m},{p}");
        let (m, p) = (c.map(m).unwrap(), c.map(p).unwrap());
        let ext = match trivfib_extend(m, &SliceObject::new(p.clone())) {
            Ok(e) => e,
            Err(e) => {
                bad.push(format!("{tag}: {e}"));
                continue;
            }
        };
        let out = ext.extension();
        if !is_trivial_fibration(&out.anchor).unwrap() {
            bad.push(format!("{tag}: output is not a trivial fibration"));
        }
        let naive = naive_pushforward(m, p);
        // identify the output with a member of the brute-force set
        let site = &c.site;
        let pf = &ext.pushforward;
        let mut ident: Vec<Vec<usize>> = Vec::new();
        let mut injective = true;
        for cc in site.objects() {
            let mut seen = HashSet::new();
            let mut comp = Vec::new();
            for i in 0..out.total.size(cc) {
                let b = out.anchor.apply(cc, i);
                let fam: Vec<usize> = family_index(m, cc, b)
                    .iter()
                    .map(|&(_, g, a)| pf.value(cc, i, g, a).unwrap())
                    .collect();
                match naive.lookup[cc].get(&(b, fam)) {
                    Some(&k) => {
                        injective &= seen.insert(k);
                        comp.push(k);
                    }
                    None => injective = false,
                }
            }
            ident.push(comp);
        }
        let found = injective && ident.iter().map(Vec::len).collect::<Vec<_>>() == naive.total.level_sizes();
        let natural = found && PresheafMap::new(out.total.clone(), naive.total.clone(), ident).is_ok();
        let Some(candidates) = candidate_extensions(&naive, m) else {
            bad.push(format!("{tag}: brute force too large"));
            continue;
        };
        let mut valid = Vec::new();
        for mask in &candidates {
            let (_, incl) = subobject_from_mask(&naive.total, mask);
            let q = naive.anchor.compose(&incl).unwrap();
            if is_trivial_fibration(&q).unwrap() {
                valid.push(mask.iter().all(|l| l.iter().all(|&b| b)));
            }
        }
        let full_valid = valid.iter().any(|&full| full);
        if !(found && natural && full_valid) {
            bad.push(format!("{tag}: output in brute-force set: {}", found && natural && full_valid));
        }
        n += 1;
        sizes.push(format!("{tag}:{}/{}", valid.len(), candidates.len()));
    }
    outcome(
        bad.is_empty() && n >= C7_MIN_INSTANCES,
        format!("{n} instances, valid/candidate extensions [{}], failures {bad:?}", sizes.join(" ")),
    )
}

fn c8() -> Outcome {
    let c = corpus("simplex2");
    let j = gen_trivcofs(&c.site, &c.interval).unwrap();
    let gc = psw::lifting::gen_cofibrations(&c.site).unwrap();
    let mut n = 0;
    let mut applicable = 0;
    let mut bad = Vec::new();
    for r in &c.roles {
        let Role::Triangle { q, p } = r else { continue };
        n += 1;
        let (qm, pm) = (c.map(q).unwrap(), c.map(p).unwrap());
        let rm = pm.compose(qm).unwrap();
        let legs = [qm, pm, &rm];
        if legs.iter().any(|l| rlp(l, &j) != Some(true)) {
            bad.push(format!("{q},{p}: not a triangle of fibrations"));
            continue;
        }
        let Some(t) = legs.iter().map(|l| rlp(l, &gc)).collect::<Option<Vec<bool>>>() else {
            bad.push(format!("{q},{p}: undetermined"));
            continue;
        };
        let (tq, tp, tr) = (t[0], t[1], t[2]);
        for (h1, h2, concl) in [(tp, tq, tr), (tp, tr, tq), (tq, tr, tp)] {
            if h1 && h2 {
                applicable += 1;
                if !concl {
                    bad.push(format!("{q},{p}: case fails"));
                }
            }
        }
    }
    outcome(
        bad.is_empty() && n >= C8_MIN_TRIANGLES,
        format!("{n} triangles, {applicable} applicable cases, failures {bad:?}"),
    )
}

fn c9() -> Outcome {
    let c = corpus("simplex2");
    let j = gen_trivcofs(&c.site, &c.interval).unwrap();
    let mut n = 0;
    let mut bad = Vec::new();
    let mut traces = Vec::new();
    for r in &c.roles {
        let Role::Frobenius { m, p } = r else { continue };
        n += 1;
        let (mm, pm) = (c.map(m).unwrap(), c.map(p).unwrap());
        if !j.members.iter().any(|g| g.attach().same_as(mm)) {
            bad.push(format!("{m}: not a J-generator"));
            continue;
        }
        let pulled = pullback(mm, pm).unwrap().p2;
        match cell_certify(&pulled, &j, C9_STAGES, C9_CELLS) {
            CellOutcome::Certificate(cert) => traces.push(format!("{m}:{}x{}", cert.stages.len(), cert.cell_count())),
            CellOutcome::Refuted(why) | CellOutcome::Unknown(why) => bad.push(format!("{m},{p}: {why}")),
        }
    }
    outcome(
        bad.is_empty() && n >= C9_MIN_INSTANCES,
        format!("{n} instances, stages x cells [{}], failures {bad:?}", traces.join(" ")),
    )
}

fn c10() -> Outcome {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join("simplex2.manifest");
    let dir = std::env::temp_dir().join(format!("psw-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut reports = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.join(format!("report-{jobs}.txt"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_psw"))
            .args(["audit", "--jobs", jobs, "--manifest"])
            .arg(&manifest)
            .arg("--report")
            .arg(&out)
            .stderr(std::process::Stdio::null())
            .status()
            .expect("psw runs");
        reports.push((status.code(), std::fs::read(&out).unwrap_or_default()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    let same = !reports[0].1.is_empty() && reports[0] == reports[1];
    outcome(
        same,
        format!("--jobs 1 vs 3: {} bytes, identical {same}, exit {:?}", reports[0].1.len(), reports[0].0),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("interval laws", c1),
        ("lcc correctness", c2),
        ("path objects", c3),
        ("filling = composition", c4),
        ("kan coincidence", c5),
        ("glueing postconditions", c6),
        ("trivial fibration extension", c7),
        ("two out of three", c8),
        ("frobenius", c9),
        ("determinism", c10),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failed += usize::from(!o.ok);
        println!("criterion {:>2} {name}: {} ({})", k + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
