//! Instance checks of the model-structure criterion hypotheses.

use crate::cylinder::IntervalStructure;
use crate::error::{Error, Result};
use crate::glue::{equivalence_extend, fib_extend_cellular, trivfib_extend, GlueInput};
use crate::homotopy::{path_object, sdr_extract};
use crate::lcc::SliceObject;
use crate::lifting::{
    cell_certify, factorize_bounded, gen_cofibrations, gen_squares, gen_trivcofs, has_rlp_bounded, horn_family, CellCertificate,
    CellOutcome, Factorization, GeneratorFamily, MemberWitness, RlpBudget, RlpReport, Verdict,
};
use crate::limits::{is_pullback_square, pullback};
use crate::presheaf::{PresheafMap, Psh};
use crate::site::Site;
use std::sync::Arc;

/// One named verdict with its witness lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict, witness: Vec<String>) -> Self {
        Check {
            name: name.into(),
            verdict,
            witness,
        }
    }

    /// A failed check carrying an error as its witness.
    pub fn error(name: impl Into<String>, e: &Error) -> Self {
        Check::new(name, Verdict::Fails, vec![format!("error: {e}")])
    }
}

/// Search limits shared by every check.
#[derive(Debug, Clone, Copy)]
pub struct Budgets {
    pub cells: usize,
    pub stages: usize,
    pub rlp: RlpBudget,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            cells: 64,
            stages: 6,
            rlp: RlpBudget::default(),
        }
    }
}

/// The generator families of a site and interval.
#[derive(Debug, Clone)]
pub struct Families {
    pub gencof: GeneratorFamily,
    pub j: GeneratorFamily,
    pub j_prime: GeneratorFamily,
    pub horn: Option<GeneratorFamily>,
}

impl Families {
    /// Horns are only built when `simplicial` is set.
    pub fn new(site: &Arc<Site>, s: &IntervalStructure, simplicial: bool) -> Result<Self> {
        Ok(Families {
            gencof: gen_cofibrations(site)?,
            j: gen_trivcofs(site, s)?,
            j_prime: gen_squares(site, s)?,
            horn: if simplicial { Some(horn_family(site)?) } else { None },
        })
    }
}

/// Verdict of an RLP report with a one-line summary.
pub fn summarize(rep: &RlpReport) -> (Verdict, String) {
    let v = rep.verdict();
    let detail = match v {
        Verdict::Holds => String::new(),
        Verdict::Fails => format!(" at {}", rep.first_failure().unwrap_or("?")),
        Verdict::Unknown => rep
            .witnesses
            .iter()
            .find_map(|(n, w)| match w {
                MemberWitness::Unknown { reason } => Some(format!(" at {n} ({reason})")),
                _ => None,
            })
            .unwrap_or_default(),
    };
    (v, format!("{} {}{}", rep.family, v.as_str(), detail))
}

/// One-line listing of a map, object by object.
pub fn render_map(m: &PresheafMap) -> String {
    let site = m.site();
    site.objects()
        .map(|c| {
            let pairs: Vec<String> = (0..m.source().size(c))
                .map(|x| format!("{}>{}", m.source().label(c, x), m.target().label(c, m.apply(c, x))))
                .collect();
            format!("{}: {}", site.object_label(c), pairs.join(" "))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// The unfillable attachment of the first failing member, if any.
pub fn failure_witness(rep: &RlpReport) -> Vec<String> {
    rep.witnesses
        .iter()
        .find_map(|(n, w)| match w {
            MemberWitness::Fails { u, v } => Some(vec![
                format!("{n} top: {}", render_map(u)),
                format!("{n} bottom: {}", render_map(v)),
            ]),
            _ => None,
        })
        .unwrap_or_default()
}

fn rlp(p: &PresheafMap, fam: &GeneratorFamily, b: &Budgets) -> (Verdict, String, Vec<String>) {
    let rep = has_rlp_bounded(p, fam, b.rlp);
    let (v, line) = summarize(&rep);
    (v, line, failure_witness(&rep))
}

fn certificate_line(cert: &CellCertificate) -> String {
    format!("{} stages, {} cells", cert.stages.len(), cert.cell_count())
}

/// Per-stage member counts of a certificate.
pub fn certificate_trace(cert: &CellCertificate) -> Vec<String> {
    cert.stages
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let mut names: Vec<&str> = st.cells.iter().map(|c| c.member.as_str()).collect();
            names.sort_unstable();
            names.dedup();
            let counts: Vec<String> = names
                .iter()
                .map(|n| format!("{n} x{}", st.cells.iter().filter(|c| c.member == *n).count()))
                .collect();
            format!("stage {}: {}", i + 1, counts.join(", "))
        })
        .collect()
}

fn verdict_of(ok: bool) -> Verdict {
    Verdict::from_bool(ok)
}

/// Span property: `a1: A → Y`, `a2: A → X` with `r ∘ a1 = a2` and `r` a
/// fibration; `r` must be a trivial fibration.
pub fn span_check(
    s: &IntervalStructure,
    fams: &Families,
    name: &str,
    a1: &PresheafMap,
    a2: &PresheafMap,
    r: &PresheafMap,
    b: &Budgets,
) -> Result<Check> {
    let commutes = r.compose(a1).map(|ra| ra.same_as(a2)).unwrap_or(false);
    if !commutes {
        return Err(Error::HypothesisFailure("span triangle does not commute".into()));
    }
    let mut witness = Vec::new();
    for (leg, a) in [("a1", a1), ("a2", a2)] {
        witness.push(match cell_certify(a, &fams.j, b.stages, b.cells) {
            CellOutcome::Certificate(c) => format!("{leg}: certified over J, {}", certificate_line(&c)),
            CellOutcome::Refuted(why) => format!("{leg}: refuted as a J-cell complex ({why})"),
            CellOutcome::Unknown(why) => format!("{leg}: claimed, no certificate found ({why})"),
        });
    }
    let (fv, fl, _) = rlp(r, &fams.j, b);
    match fv {
        Verdict::Fails => return Err(Error::HypothesisFailure(format!("r is not a fibration: {fl}"))),
        Verdict::Unknown => {
            witness.push(format!("r fibration: {fl}"));
            return Ok(Check::new(name, Verdict::Unknown, witness));
        }
        Verdict::Holds => witness.push(format!("r fibration: {fl}")),
    }
    let (tv, tl, tw) = rlp(r, &fams.gencof, b);
    witness.push(format!("r trivial fibration: {tl}"));
    witness.extend(tw);
    if tv == Verdict::Holds {
        for k in 0..2 {
            let ret = sdr_extract(s, r, k)?;
            witness.push(format!(
                "retract {k}: section and homotopy over r, constant along the section (I x Y sizes {:?})",
                ret.homotopy.body.source().level_sizes()
            ));
        }
    }
    Ok(Check::new(name, tv, witness))
}

/// Two-out-of-three for trivial fibrations on a triangle `r = p ∘ q` of
/// fibrations.
pub fn tf_2oo3_check(fams: &Families, name: &str, q: &PresheafMap, p: &PresheafMap, b: &Budgets) -> Result<Check> {
    let r = p.compose(q)?;
    let legs = [("q", q), ("p", p), ("r", &r)];
    let mut witness = Vec::new();
    for (n, m) in legs {
        let (v, l, w) = rlp(m, &fams.j, b);
        witness.push(format!("{n} fibration: {l}"));
        witness.extend(w);
        match v {
            Verdict::Fails => return Ok(Check::new(name, Verdict::Fails, witness)),
            Verdict::Unknown => return Ok(Check::new(name, Verdict::Unknown, witness)),
            Verdict::Holds => {}
        }
    }
    let (tf, tw): (Vec<Verdict>, Vec<Vec<String>>) = legs
        .iter()
        .map(|(n, m)| {
            let (v, l, w) = rlp(m, &fams.gencof, b);
            witness.push(format!("{n} trivial: {l}"));
            (v, w)
        })
        .unzip();
    let (tq, tp, tr) = (tf[0], tf[1], tf[2]);
    let cases = [
        ("i", "p, q", tp, tq, "r", tr, &tw[2]),
        ("ii", "p, r", tp, tr, "q", tq, &tw[0]),
        ("iii", "q, r", tq, tr, "p", tp, &tw[1]),
    ];
    let mut failures = Vec::new();
    let mut verdict = Verdict::Holds;
    for (label, hyp, h1, h2, concl, c, cw) in cases {
        let line = match (h1, h2) {
            (Verdict::Fails, _) | (_, Verdict::Fails) => "not applicable".to_string(),
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => {
                verdict = verdict.and(Verdict::Unknown);
                "undetermined".to_string()
            }
            _ => {
                verdict = verdict.and(c);
                if c == Verdict::Fails {
                    failures.extend(cw.iter().cloned());
                }
                format!("{concl} trivial: {}", c.as_str())
            }
        };
        witness.push(format!("case ({label}) {hyp} trivial: {line}"));
    }
    witness.extend(failures);
    Ok(Check::new(name, verdict, witness))
}

/// Pulls a certified trivial cofibration `m` back along `p` and certifies
/// the result.
pub fn frobenius_check(fams: &Families, name: &str, m: &PresheafMap, p: &PresheafMap, b: &Budgets) -> Result<Check> {
    let mut witness = Vec::new();
    match cell_certify(m, &fams.j, b.stages, b.cells) {
        CellOutcome::Certificate(c) => witness.push(format!("m: certified over J, {}", certificate_line(&c))),
        CellOutcome::Refuted(why) | CellOutcome::Unknown(why) => {
            return Err(Error::HypothesisFailure(format!("m has no J-certificate: {why}")))
        }
    }
    let pb = pullback(m, p)?;
    let pulled = &pb.p2;
    witness.push(format!(
        "pullback: {:?} -> {:?}",
        pulled.source().level_sizes(),
        pulled.target().level_sizes()
    ));
    let verdict = match cell_certify(pulled, &fams.j, b.stages, b.cells) {
        CellOutcome::Certificate(c) => {
            witness.push(format!("certificate: {}", certificate_line(&c)));
            witness.extend(certificate_trace(&c));
            Verdict::Holds
        }
        CellOutcome::Refuted(why) => {
            witness.push(format!("refuted: {why}"));
            Verdict::Fails
        }
        CellOutcome::Unknown(why) => {
            witness.push(format!("budget-limited cell search: {why}"));
            Verdict::Unknown
        }
    };
    Ok(Check::new(name, verdict, witness))
}

/// Which weak factorization system to factor through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wfs {
    /// Cofibration, then trivial fibration.
    Ctf,
    /// Trivial cofibration, then fibration.
    Tcf,
}

#[derive(Debug, Clone)]
pub enum FactorizeOutcome {
    Complete {
        factorization: Factorization,
        certificate: Option<CellCertificate>,
    },
    /// The right leg still fails these members.
    Partial {
        factorization: Factorization,
        residual: Vec<String>,
    },
}

/// Bounded small object argument with an independent certificate for the
/// left leg.
pub fn factorize(f: &PresheafMap, wfs: Wfs, fams: &Families, b: &Budgets) -> Result<FactorizeOutcome> {
    let fam = match wfs {
        Wfs::Ctf => &fams.gencof,
        Wfs::Tcf => &fams.j,
    };
    let fz = factorize_bounded(f, fam, b.stages, b.cells)?;
    if !fz.complete {
        let rep = has_rlp_bounded(&fz.right, fam, b.rlp);
        let residual = rep
            .witnesses
            .iter()
            .filter(|(_, w)| !matches!(w, MemberWitness::Lifts { .. }))
            .map(|(n, _)| n.clone())
            .collect();
        return Ok(FactorizeOutcome::Partial {
            factorization: fz,
            residual,
        });
    }
    let certificate = match cell_certify(&fz.left, fam, b.stages.max(fz.stages), b.cells.max(fz.cells)) {
        CellOutcome::Certificate(c) => Some(c),
        _ => None,
    };
    Ok(FactorizeOutcome::Complete {
        factorization: fz,
        certificate,
    })
}

pub fn factorize_check(name: &str, f: &PresheafMap, wfs: Wfs, fams: &Families, b: &Budgets) -> Result<Check> {
    let fam = match wfs {
        Wfs::Ctf => &fams.gencof,
        Wfs::Tcf => &fams.j,
    };
    Ok(match factorize(f, wfs, fams, b)? {
        FactorizeOutcome::Complete {
            factorization: fz,
            certificate,
        } => {
            let composite = fz.right.compose(&fz.left).map(|c| c.same_as(f)).unwrap_or(false);
            let (rv, rl, rw) = rlp(&fz.right, fam, b);
            let mut witness = vec![
                format!("stages {}, cells {}", fz.stages, fz.cells),
                format!("middle object {:?}", fz.left.target().level_sizes()),
                format!("composite equals f: {composite}"),
                format!("right leg: {rl}"),
            ];
            witness.extend(rw);
            let cv = match &certificate {
                Some(c) => {
                    witness.push(format!("left leg certified over {}: {}", fam.name, certificate_line(c)));
                    Verdict::Holds
                }
                None => {
                    witness.push("left leg: certificate search exhausted".into());
                    Verdict::Unknown
                }
            };
            Check::new(name, verdict_of(composite).and(rv).and(cv), witness)
        }
        FactorizeOutcome::Partial { factorization, residual } => Check::new(
            name,
            Verdict::Unknown,
            vec![
                format!("stage budget {} reached after {} cells", factorization.stages, factorization.cells),
                format!("residual failing members: {}", residual.join(" ")),
            ],
        ),
    })
}

/// Which exchange property to exhibit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeKind {
    TrivfibAlongTrivcof,
    CartesianFibAlongTrivcof,
}

/// Produces the exchange square along `m` for `p` by extension and checks it.
pub fn exchange_check(
    s: &IntervalStructure,
    fams: &Families,
    name: &str,
    kind: ExchangeKind,
    m: &PresheafMap,
    p: &PresheafMap,
    b: &Budgets,
) -> Result<Check> {
    let slice = SliceObject::new(p.clone());
    let (back, ext, mut witness) = match kind {
        ExchangeKind::TrivfibAlongTrivcof => {
            let out = trivfib_extend(m, &slice)?;
            let ext = out.extension().anchor.clone();
            (out.back, ext, vec!["kind: trivial fibration along a cofibration".to_string()])
        }
        ExchangeKind::CartesianFibAlongTrivcof => {
            let cert = match cell_certify(m, &fams.j, b.stages, b.cells) {
                CellOutcome::Certificate(c) => c,
                CellOutcome::Refuted(why) | CellOutcome::Unknown(why) => {
                    return Ok(Check::new(
                        name,
                        Verdict::Unknown,
                        vec![format!("budget-limited cell search: {why}")],
                    ))
                }
            };
            let out = fib_extend_cellular(s, m, &cert, &fams.j, &slice)?;
            let w = vec![
                "kind: cartesian fibration along a trivial cofibration".to_string(),
                format!("certificate: {}", certificate_line(&cert)),
            ];
            (out.back, out.extension.anchor, w)
        }
    };
    let pb = is_pullback_square(&back)?;
    let (ev, el, ew) = match kind {
        ExchangeKind::TrivfibAlongTrivcof => rlp(&ext, &fams.gencof, b),
        ExchangeKind::CartesianFibAlongTrivcof => rlp(&ext, &fams.j, b),
    };
    witness.push(format!("extension {:?} over {:?}", ext.source().level_sizes(), ext.target().level_sizes()));
    witness.push(format!("square is a pullback: {pb}"));
    witness.push(format!("extension: {el}"));
    witness.extend(ew);
    Ok(Check::new(name, verdict_of(pb).and(ev), witness))
}

/// Runs the equivalence extension and reports its postconditions.
pub fn glue_check(s: &IntervalStructure, name: &str, input: &GlueInput) -> Check {
    match equivalence_extend(s, input) {
        Ok(out) => {
            let mut witness = vec![format!(
                "Y0 {:?} over B {:?}",
                out.y0.total.level_sizes(),
                out.y0.base().level_sizes()
            )];
            witness.extend(out.checks.iter().map(|(n, ok)| format!("{n}: {ok}")));
            let ok = out.checks.iter().all(|(_, ok)| *ok);
            Check::new(name, verdict_of(ok), witness)
        }
        Err(e) => Check::error(name, &e),
    }
}

/// Path object checks: the boundary projection is a fibration and both
/// endpoint projections are trivial fibrations.
pub fn path_object_checks(s: &IntervalStructure, fams: &Families, name: &str, x: &Psh, b: &Budgets) -> Vec<Check> {
    let po = match path_object(s, x) {
        Ok(po) => po,
        Err(e) => return vec![Check::error(format!("path/{name}"), &e)],
    };
    let sizes = format!("PX {:?}", po.total.level_sizes());
    let (bv, bl, bw) = rlp(&po.boundary, &fams.j, b);
    let mut out = vec![Check::new(format!("path/{name}/boundary"), bv, [vec![sizes, bl], bw].concat())];
    for k in 0..2 {
        let (v, l, w) = rlp(&po.ends[k], &fams.gencof, b);
        out.push(Check::new(format!("path/{name}/end{k}"), v, [vec![l], w].concat()));
    }
    out
}

/// Compares the right lifting classes of two families on `p`.
pub fn compare_families(
    name: &str,
    p: &PresheafMap,
    left: &GeneratorFamily,
    right: &GeneratorFamily,
    b: &Budgets,
) -> Check {
    let (lv, ll, lw) = rlp(p, left, b);
    let (rv, rl, rw) = rlp(p, right, b);
    let verdict = match (lv, rv) {
        (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
        (x, y) => verdict_of(x == y),
    };
    let mut witness = vec![ll, rl];
    if verdict == Verdict::Fails {
        witness.extend(lw);
        witness.extend(rw);
    }
    Check::new(name, verdict, witness)
}

/// `p` has the right lifting property against the family.
pub fn lifting_check(name: &str, p: &PresheafMap, fam: &GeneratorFamily, b: &Budgets) -> Check {
    let (v, l, w) = rlp(p, fam, b);
    let mut witness = vec![l];
    witness.extend(w);
    Check::new(name, v, witness)
}
