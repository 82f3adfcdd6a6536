//! Interval objects, cylinders and the Leibniz calculus.

use crate::error::{Error, Result};
use crate::lcc::{exponential, Exponential};
use crate::limits::{coproduct, is_pullback_square, product, product_map, pullback, pushout, Pullback, Pushout};
use crate::presheaf::{
    from_initial, image_mask, initial, same_psh, terminal, to_terminal, ArrowSquare, Presheaf, PresheafMap, Psh,
    Registry,
};
use crate::site::{ObjId, Site};
use std::sync::Arc;

/// An interval object with endpoints, contraction and connections.
#[derive(Debug, Clone)]
pub struct IntervalStructure {
    pub name: String,
    pub interval: Psh,
    pub one: Psh,
    /// `δ_0, δ_1: 1 → I`.
    pub delta: [PresheafMap; 2],
    /// `ε: I → 1`.
    pub epsilon: PresheafMap,
    /// `c^0, c^1: I × I → I`, with source `product(I, I)`.
    pub conn: [PresheafMap; 2],
    /// Optional `σ: I × I → I × I`.
    pub symmetry: Option<PresheafMap>,
    ii: Pullback,
}

impl IntervalStructure {
    /// Assembles an interval from maps, checking their shapes only.
    pub fn new(
        name: &str,
        delta: [PresheafMap; 2],
        epsilon: PresheafMap,
        conn: [PresheafMap; 2],
        symmetry: Option<PresheafMap>,
    ) -> Result<Self> {
        let interval = epsilon.source().clone();
        let site = interval.site().clone();
        let one = terminal(&site);
        let ii = product(&interval, &interval);
        let fit = |m: &PresheafMap, s: &Psh, t: &Psh, what: &str| -> Result<PresheafMap> {
            if same_shape(m.source(), s) && same_shape(m.target(), t) {
                Ok(m.retyped(s.clone(), t.clone()))
            } else {
                Err(Error::InvalidMap(format!("interval map `{what}` has the wrong type")))
            }
        };
        let delta = [
            fit(&delta[0], &one, &interval, "d0")?,
            fit(&delta[1], &one, &interval, "d1")?,
        ];
        let epsilon = fit(&epsilon, &interval, &one, "eps")?;
        let conn = [
            fit(&conn[0], &ii.apex, &interval, "c0")?,
            fit(&conn[1], &ii.apex, &interval, "c1")?,
        ];
        let symmetry = symmetry.map(|s| fit(&s, &ii.apex, &ii.apex, "sym")).transpose()?;
        Ok(IntervalStructure {
            name: name.to_string(),
            interval,
            one,
            delta,
            epsilon,
            conn,
            symmetry,
            ii,
        })
    }

    pub fn site(&self) -> &Arc<Site> {
        self.interval.site()
    }

    /// `I × I` with its projections.
    pub fn square(&self) -> &Pullback {
        &self.ii
    }

    /// `i¹ = [δ_0, δ_1]: 1 + 1 → I`.
    pub fn endpoints(&self) -> PresheafMap {
        let co = coproduct(&self.one, &self.one);
        co.copair(&self.delta[0], &self.delta[1]).expect("endpoint copair")
    }

    /// The element `δ_k` at `c`.
    pub fn endpoint_at(&self, k: usize, c: ObjId) -> usize {
        self.delta[k].apply(c, 0)
    }
}

/// Same level sizes and action tables, labels ignored.
fn same_shape(a: &Presheaf, b: &Presheaf) -> bool {
    crate::presheaf::same_site(a.site(), b.site())
        && a.level_sizes() == b.level_sizes()
        && (0..a.site().num_morphisms()).all(|f| a.action_table(f) == b.action_table(f))
}

/// The representable interval `y([1])` of a built-in site, with
/// connections given pointwise by min and max and the swap symmetry.
pub fn builtin_interval(site: &Arc<Site>) -> Result<IntervalStructure> {
    let pm = site
        .points()
        .ok_or_else(|| Error::HypothesisFailure("site has no point model".into()))?;
    let one_obj = site.object_id("1")?;
    if pm.points[one_obj] != 2 {
        return Err(Error::HypothesisFailure("object `1` is not a two-point interval".into()));
    }
    let i = crate::presheaf::representable(site, one_obj)?;
    let fun = |c: ObjId, x: usize| -> &Vec<usize> { &pm.maps[site.hom(c, one_obj)[x]] };
    let find = |c: ObjId, f: &[usize]| -> Result<usize> {
        (0..i.size(c)).find(|&x| fun(c, x) == f).ok_or_else(|| {
            Error::HypothesisFailure(format!(
                "pointwise connection is not a map `{}` -> `1`",
                site.object_label(c)
            ))
        })
    };
    let one = terminal(site);
    let mut delta = Vec::new();
    for k in 0..2 {
        let comps = site
            .objects()
            .map(|c| Ok(vec![find(c, &vec![k; pm.points[c]])?]))
            .collect::<Result<Vec<_>>>()?;
        delta.push(PresheafMap::new(one.clone(), i.clone(), comps)?);
    }
    let ii = product(&i, &i);
    let mut conn = Vec::new();
    for op in [usize::min as fn(usize, usize) -> usize, usize::max] {
        let comps = site
            .objects()
            .map(|c| {
                (0..ii.apex.size(c))
                    .map(|k| {
                        let (u, v) = (fun(c, ii.p1.apply(c, k)), fun(c, ii.p2.apply(c, k)));
                        let w: Vec<usize> = u.iter().zip(v).map(|(&a, &b)| op(a, b)).collect();
                        find(c, &w)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        conn.push(PresheafMap::new(ii.apex.clone(), i.clone(), comps)?);
    }
    let sym = ii.mediate(&ii.p2, &ii.p1)?;
    let epsilon = to_terminal(&i, &one);
    let [d0, d1]: [PresheafMap; 2] = delta.try_into().expect("two endpoints");
    let [c0, c1]: [PresheafMap; 2] = conn.try_into().expect("two connections");
    IntervalStructure::new(site.name(), [d0, d1], epsilon, [c0, c1], Some(sym))
}

/// Reads `interval <name> uses I=<psh> d0=<map> d1=<map> eps=<map> c0=<map> c1=<map> [sym=<map>]`.
pub fn parse_interval_line(line: &str, reg: &Registry) -> Result<IntervalStructure> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() < 8 || toks[0] != "interval" || toks[2] != "uses" {
        return Err(Error::InvalidMap("expected `interval <name> uses ...`".into()));
    }
    let mut get = std::collections::HashMap::new();
    for t in &toks[3..] {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::InvalidMap(format!("expected key=value, got `{t}`")))?;
        get.insert(k, v);
    }
    let map = |k: &str| -> Result<PresheafMap> {
        let name = get.get(k).ok_or_else(|| Error::InvalidMap(format!("missing `{k}`")))?;
        reg.map(name)
            .cloned()
            .ok_or_else(|| Error::InvalidMap(format!("unknown map `{name}`")))
    };
    let i_name = get.get("I").ok_or_else(|| Error::InvalidMap("missing `I`".into()))?;
    let i = reg
        .presheaf(i_name)
        .ok_or_else(|| Error::InvalidPresheaf(format!("unknown presheaf `{i_name}`")))?;
    let eps = map("eps")?;
    if !same_psh(eps.source(), i) {
        return Err(Error::InvalidMap("`eps` is not defined on `I`".into()));
    }
    let sym = if get.contains_key("sym") { Some(map("sym")?) } else { None };
    IntervalStructure::new(toks[1], [map("d0")?, map("d1")?], eps, [map("c0")?, map("c1")?], sym)
}

/// `I × X` with its projections.
pub fn cyl(s: &IntervalStructure, x: &Psh) -> Pullback {
    product(&s.interval, x)
}

/// `I × f`.
pub fn cyl_map(s: &IntervalStructure, f: &PresheafMap) -> PresheafMap {
    product_map(&PresheafMap::identity(&s.interval), f)
}

/// `hom(I, X)`.
pub fn cocyl(s: &IntervalStructure, x: &Psh) -> Result<Exponential> {
    exponential(&s.interval, x)
}

/// The pushout-product of `u: A → B` and `v: C → D`.
#[derive(Debug, Clone)]
pub struct LeibnizTensor {
    /// `(A × D) ⊔_{A × C} (B × C)`.
    pub pushout: Pushout,
    /// The corner map to `B × D`.
    pub map: PresheafMap,
    pub bd: Pullback,
}

pub fn leibniz_tensor(u: &PresheafMap, v: &PresheafMap) -> Result<LeibnizTensor> {
    let av = product_map(&PresheafMap::identity(u.source()), v);
    let uc = product_map(u, &PresheafMap::identity(v.source()));
    let po = pushout(&av, &uc)?;
    let ud = product_map(u, &PresheafMap::identity(v.target()));
    let bv = product_map(&PresheafMap::identity(u.target()), v);
    let map = po.copair(&ud, &bv)?;
    let bd = product(u.target(), v.target());
    Ok(LeibnizTensor { pushout: po, map, bd })
}

/// The pullback-hom of `u: A → B` and `p: X → Y`.
#[derive(Debug, Clone)]
pub struct LeibnizHom {
    /// `hom(B, X) → hom(A, X) ×_{hom(A, Y)} hom(B, Y)`.
    pub map: PresheafMap,
    pub corner: Pullback,
    pub hom_bx: Exponential,
}

pub fn leibniz_hom(u: &PresheafMap, p: &PresheafMap) -> Result<LeibnizHom> {
    let (a, b) = (u.source(), u.target());
    let (x, y) = (p.source(), p.target());
    let bx = exponential(b, x)?;
    let ax = exponential(a, x)?;
    let by = exponential(b, y)?;
    let ay = exponential(a, y)?;
    // hom(E, Z) → hom(A, Z) by precomposition with u
    let pre = |e: &Exponential, target: &Exponential| -> Result<PresheafMap> {
        let ha = product(&e.hom, a);
        let hb = product(&e.hom, b);
        let step = hb.mediate(&ha.p1, &u.compose_unchecked(&ha.p2))?;
        target.curry(&e.hom, &e.eval.compose_unchecked(&step))
    };
    let post = |e: &Exponential, target: &Exponential| -> Result<PresheafMap> {
        target.curry(&e.hom, &p.compose_unchecked(&e.eval))
    };
    let bx_ax = pre(&bx, &ax)?;
    let ax_ay = post(&ax, &ay)?;
    let by_ay = pre(&by, &ay)?;
    let bx_by = post(&bx, &by)?;
    let corner = pullback(&ax_ay, &by_ay)?;
    let map = corner.mediate(&bx_ax, &bx_by)?;
    Ok(LeibnizHom {
        map,
        corner,
        hom_bx: bx,
    })
}

/// `i^n: ∂I^n → I^n`; fails above the site's top degree.
pub fn boundary_i(s: &IntervalStructure, n: usize) -> Result<PresheafMap> {
    let site = s.site();
    if n > site.max_degree() {
        return Err(Error::DimensionBudgetExceeded(format!(
            "i^{n} needs cells of dimension {n}, site stops at {}",
            site.max_degree()
        )));
    }
    match n {
        0 => Ok(from_initial(&initial(site), &s.one)),
        1 => Ok(s.endpoints()),
        _ => {
            let mut cur = s.endpoints();
            for _ in 1..n {
                cur = leibniz_tensor(&s.endpoints(), &cur)?.map;
            }
            Ok(cur)
        }
    }
}

/// The square `θ_k ⊗̂ m` from `m` to `δ_k ⊗̂ m`, with its Leibniz data.
pub fn theta_square(s: &IntervalStructure, k: usize, m: &PresheafMap) -> Result<(ArrowSquare, LeibnizTensor)> {
    if k > 1 {
        return Err(Error::InvalidMap("endpoint index must be 0 or 1".into()));
    }
    let lt = leibniz_tensor(&s.delta[k], m)?;
    let ia = cyl(s, m.source());
    let ib = &lt.bd;
    let other = |c: ObjId| s.endpoint_at(1 - k, c);
    let top_ia = PresheafMap::from_fn(m.source(), &ia.apex, |c, a| ia.pair_index(c, other(c), a).expect("pair"));
    let top = lt.pushout.i2.compose_unchecked(&top_ia);
    let bottom = PresheafMap::from_fn(m.target(), &ib.apex, |c, b| ib.pair_index(c, other(c), b).expect("pair"));
    let sq = ArrowSquare::new(m.clone(), lt.map.clone(), top, bottom)?;
    Ok((sq, lt))
}

/// Outcome of checking the interval laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalReport {
    pub checks: Vec<(String, bool)>,
}

impl IntervalReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect()
    }
}

pub fn verify_interval_laws(s: &IntervalStructure) -> IntervalReport {
    let site = s.site();
    let ii = &s.ii;
    let pair = |c: ObjId, u: usize, v: usize| ii.pair_index(c, u, v).expect("pair");
    let mut checks = Vec::new();

    let section = (0..2).all(|k| s.epsilon.compose_unchecked(&s.delta[k]).same_as(&PresheafMap::identity(&s.one)));
    checks.push(("section".to_string(), section));

    let connection = (0..2).all(|k| {
        site.objects().all(|c| {
            let (dk, dn) = (s.endpoint_at(k, c), s.endpoint_at(1 - k, c));
            (0..s.interval.size(c)).all(|x| {
                let ck = |u, v| s.conn[k].apply(c, pair(c, u, v));
                ck(dk, x) == dk && ck(x, dk) == dk && ck(dn, x) == x && ck(x, dn) == x
            })
        })
    });
    checks.push(("connection".to_string(), connection));

    let contraction = (0..2).all(|k| {
        let lhs = s.epsilon.compose_unchecked(&s.conn[k]);
        let rhs = s.epsilon.compose_unchecked(&ii.p1);
        lhs.components() == rhs.components()
    });
    checks.push(("contraction-connection".to_string(), contraction));

    let zero = initial(site);
    let disjoint = ArrowSquare::new(
        from_initial(&zero, &s.one),
        s.delta[1].clone(),
        from_initial(&zero, &s.one),
        s.delta[0].clone(),
    )
    .and_then(|sq| is_pullback_square(&sq))
    .unwrap_or(false);
    checks.push(("disjoint-endpoints".to_string(), disjoint));

    if let Some(sigma) = &s.symmetry {
        let invol = sigma.compose_unchecked(sigma).same_as(&PresheafMap::identity(&ii.apex));
        let swaps = site.objects().all(|c| {
            (0..2).all(|k| {
                let d = s.endpoint_at(k, c);
                (0..s.interval.size(c)).all(|x| sigma.apply(c, pair(c, d, x)) == pair(c, x, d))
            })
        });
        let fixes = (0..2).all(|k| s.conn[k].compose_unchecked(sigma).components() == s.conn[k].components());
        checks.push(("symmetry".to_string(), invol && swaps && fixes));
        let leib = (0..2).all(|k| {
            let a = leibniz_tensor(&s.endpoints(), &s.delta[k]);
            let b = leibniz_tensor(&s.delta[k], &s.endpoints());
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    let (ma, mb) = (image_mask(&a.map), image_mask(&b.map));
                    a.map.is_mono()
                        && b.map.is_mono()
                        && site.objects().all(|c| (0..ii.apex.size(c)).all(|q| ma[c][q] == mb[c][sigma.apply(c, q)]))
                }
                _ => false,
            }
        });
        checks.push(("symmetry-leibniz".to_string(), leib));
    }
    IntervalReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::{boundary, nondegenerate_count, representable};
    use crate::search::find_isomorphism;
    use crate::site::{builtin_cube_site, builtin_simplex_site};

    fn simplex(n: usize) -> Arc<Site> {
        Arc::new(builtin_simplex_site(n).unwrap())
    }

    #[test]
    fn builtin_intervals_satisfy_laws() {
        for site in [simplex(1), simplex(2), simplex(3), Arc::new(builtin_cube_site(1).unwrap()), Arc::new(builtin_cube_site(2).unwrap())] {
            let s = builtin_interval(&site).unwrap();
            let r = verify_interval_laws(&s);
            assert!(r.passed(), "{}: {:?}", site.name(), r.failures());
        }
    }

    #[test]
    fn connections_need_closure_on_large_cubes() {
        let site = Arc::new(builtin_cube_site(3).unwrap());
        assert!(matches!(builtin_interval(&site), Err(Error::HypothesisFailure(_))));
    }

    #[test]
    fn broken_connection_is_named() {
        let s = builtin_interval(&simplex(2)).unwrap();
        let mut broken = s.clone();
        broken.conn[0] = s.square().p1.clone();
        let r = verify_interval_laws(&broken);
        assert_eq!(r.failures(), vec!["connection", "symmetry"]);
    }

    #[test]
    fn cylinder_sizes() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        assert!(find_isomorphism(&cyl(&s, &s.one).apex, &s.interval).is_some());
        assert_eq!(cocyl(&s, &s.one).unwrap().hom.level_sizes(), vec![1, 1, 1]);
        assert_eq!(cyl(&s, &s.interval).apex.level_sizes(), vec![4, 9, 16]);
    }

    #[test]
    fn boundary_of_square() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let i2 = boundary_i(&s, 2).unwrap();
        assert!(i2.is_mono());
        let dom = i2.source();
        let nd: Vec<usize> = site.objects().map(|c| nondegenerate_count(dom, c)).collect();
        assert_eq!(nd, vec![4, 4, 0]);
        assert!(boundary_i(&s, 0).unwrap().source().is_empty());
        assert!(matches!(boundary_i(&s, 3), Err(Error::DimensionBudgetExceeded(_))));
        let cube = Arc::new(builtin_cube_site(2).unwrap());
        let sc = builtin_interval(&cube).unwrap();
        let b = boundary_i(&sc, 2).unwrap();
        let nd: Vec<usize> = cube.objects().map(|c| nondegenerate_count(b.source(), c)).collect();
        assert_eq!(nd, vec![4, 4, 0]);
        let db = boundary(&cube, 2).unwrap();
        assert!(find_isomorphism(b.source(), db.source()).is_some());
    }

    #[test]
    fn leibniz_units() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let y1 = representable(&site, 1).unwrap();
        let id = PresheafMap::identity(&y1);
        assert!(leibniz_tensor(&id, &s.endpoints()).unwrap().map.is_iso());
        let zero = initial(&site);
        let lt = leibniz_tensor(&s.delta[0], &from_initial(&zero, &y1)).unwrap();
        assert!(lt.map.is_mono());
        assert_eq!(lt.pushout.apex.level_sizes(), y1.level_sizes());
    }

    #[test]
    fn leibniz_hom_units() {
        let site = simplex(1);
        let s = builtin_interval(&site).unwrap();
        let y1 = representable(&site, 1).unwrap();
        let p = to_terminal(&y1, &s.one);
        assert!(leibniz_hom(&PresheafMap::identity(&y1), &p).unwrap().map.is_iso());
        let lh = leibniz_hom(&from_initial(&initial(&site), &s.one), &p).unwrap();
        assert!(find_isomorphism(lh.map.source(), &y1).is_some());
        assert_eq!(lh.map.target().level_sizes(), vec![1, 1]);
        // δ_0 ⊸ (X → 1) is the endpoint projection hom(I, X) → X
        let lh = leibniz_hom(&s.delta[0], &p).unwrap();
        assert_eq!(lh.map.source().level_sizes(), cocyl(&s, &y1).unwrap().hom.level_sizes());
        assert!(lh.map.is_epi());
    }

    #[test]
    fn theta_squares_commute() {
        let site = simplex(2);
        let s = builtin_interval(&site).unwrap();
        let b1 = boundary(&site, 1).unwrap();
        for k in 0..2 {
            let (sq, lt) = theta_square(&s, k, &b1).unwrap();
            assert!(sq.check().is_ok() && lt.map.is_mono());
            let zero = initial(&site);
            let (sq0, _) = theta_square(&s, k, &from_initial(&zero, &s.one)).unwrap();
            assert!(find_isomorphism(sq0.right.target(), &cyl(&s, &s.one).apex).is_some());
        }
    }
}
