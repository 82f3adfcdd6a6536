//! Model-structure audits over a corpus of finite instances.

mod checks;
mod manifest;

pub use checks::{
    certificate_trace, compare_families, failure_witness, render_map, exchange_check, factorize, factorize_check, frobenius_check, glue_check,
    lifting_check, path_object_checks, span_check, summarize, tf_2oo3_check, Budgets, Check, ExchangeKind,
    Families, FactorizeOutcome, Wfs,
};
pub use manifest::{
    build_site_spec, digest, load_manifest, load_manifest_text, Corpus, IntervalSpec, Overrides, Role, SiteSpec, Value,
};

use crate::cylinder::verify_interval_laws;
use crate::error::{Error, Result};
use crate::glue::GlueInput;
use crate::lcc::{base_change, SliceObject};
use crate::lifting::Verdict;
use crate::presheaf::PresheafMap;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

/// A titled group of checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

/// The outcome of an audit. `render` is deterministic; timing is kept apart.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub config: Vec<(String, String)>,
    pub digests: Vec<(String, String)>,
    pub sections: Vec<Section>,
    pub timing: Vec<(String, Duration)>,
}

impl AuditReport {
    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.sections.iter().flat_map(|s| s.checks.iter())
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks().find(|c| c.name == name)
    }

    pub fn section(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.checks().filter(|c| c.verdict == v).count()
    }

    /// 0 all pass, 1 any failure, 2 unknowns without failures.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Fails) > 0 {
            1
        } else if self.count(Verdict::Unknown) > 0 {
            2
        } else {
            0
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("psw audit report\n");
        for (k, v) in &self.config {
            let _ = writeln!(out, "config {k}: {v}");
        }
        for (f, d) in &self.digests {
            let _ = writeln!(out, "digest {f}: {d}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n[{}]", s.title);
            for n in &s.notes {
                let _ = writeln!(out, "NOTE {n}");
            }
            for c in &s.checks {
                let _ = writeln!(out, "CHECK {} {}", c.name, c.verdict.as_str());
                for w in &c.witness {
                    let _ = writeln!(out, "    {w}");
                }
            }
        }
        let _ = writeln!(
            out,
            "\n[summary]\npass {}\nfail {}\nunknown {}",
            self.count(Verdict::Holds),
            self.count(Verdict::Fails),
            self.count(Verdict::Unknown)
        );
        out
    }

    /// Per-section wall-clock time, for stderr.
    pub fn render_timing(&self) -> String {
        self.timing
            .iter()
            .map(|(s, d)| format!("time {s}: {:.3}s\n", d.as_secs_f64()))
            .collect()
    }
}

/// Builds the glue input of a `glue-bundle` entry.
pub fn glue_input(corpus: &Corpus, m: &str, y1: &str, x0: &str, g: Option<&str>) -> Result<GlueInput> {
    let m = corpus.map(m)?.clone();
    let y1 = SliceObject::new(corpus.map(y1)?.clone());
    match g {
        None => {
            let x1 = base_change(&m, &y1)?;
            let id = PresheafMap::identity(&x1.slice.total);
            GlueInput::new(m, y1, x1.slice, id)
        }
        Some(g) => {
            let x0 = corpus.map(x0)?.clone();
            let x1 = base_change(&m, &y1)?;
            let f = x1.pullback.mediate(&x0, corpus.map(g)?)?;
            GlueInput::new(m, y1, SliceObject::new(x0), f)
        }
    }
}

type Job<'a> = Box<dyn Fn() -> Vec<Check> + Send + Sync + 'a>;

fn guarded(name: String, r: Result<Check>) -> Vec<Check> {
    vec![r.unwrap_or_else(|e| Check::error(name, &e))]
}

/// Runs every audit over the corpus. Items run on the current rayon pool
/// and are merged in manifest order.
pub fn model_audit(corpus: &Corpus, budgets: &Budgets) -> Result<AuditReport> {
    let s = &corpus.interval;
    let site = &corpus.site;
    let simplicial = matches!(corpus.site_spec, SiteSpec::Simplex(_));
    let fams = Families::new(site, s, simplicial)?;
    let b = budgets;
    let mut sections: Vec<(String, Vec<String>, Vec<Job>)> = Vec::new();
    fn add<'a>(into: &mut Vec<(String, Vec<String>, Vec<Job<'a>>)>, title: &str, notes: Vec<String>, jobs: Vec<Job<'a>>) {
        if !jobs.is_empty() || !notes.is_empty() {
            into.push((title.to_string(), notes, jobs));
        }
    }
    macro_rules! push {
        ($t:expr, $n:expr, $j:expr $(,)?) => {
            add(&mut sections, $t, $n, $j)
        };
    }

    let laws: Vec<Job> = vec![Box::new(|| {
        verify_interval_laws(s)
            .checks
            .into_iter()
            .map(|(n, ok)| Check::new(format!("interval/{n}"), Verdict::from_bool(ok), vec![]))
            .collect()
    })];
    push!("interval-laws", vec![], laws);

    if !corpus.roles.is_empty() {
        let mut fam_list = vec![&fams.gencof, &fams.j, &fams.j_prime];
        fam_list.extend(fams.horn.as_ref());
        let jobs: Vec<Job> = fam_list
            .into_iter()
            .map(|f| -> Job {
                Box::new(move || {
                    let names: Vec<&str> = f.members.iter().map(|m| m.name.as_str()).collect();
                    vec![Check::new(
                        format!("family/{}", f.name),
                        Verdict::from_bool(!f.members.is_empty()),
                        vec![format!("members: {}", names.join(" "))],
                    )]
                })
            })
            .collect();
        push!("families", vec![], jobs);
    }

    let mut fib_jobs: Vec<Job> = Vec::new();
    for x in corpus.fibrant() {
        let fam = &fams.j;
        fib_jobs.push(Box::new(move || {
            let p = corpus.map(&format!("{x}!")).expect("bang map").clone();
            vec![lifting_check(&format!("fibrant/{x}"), &p, fam, b)]
        }));
    }
    for r in &corpus.roles {
        if let Role::Fibration(n) = r {
            let fam = &fams.j;
            fib_jobs.push(Box::new(move || {
                vec![lifting_check(&format!("fibration/{n}"), corpus.map(n).expect("map"), fam, b)]
            }));
        }
    }
    push!("fibrancy", vec![], fib_jobs);

    let sweep = corpus.sweep_maps();
    let fc: Vec<Job> = sweep
        .iter()
        .map(|n| -> Job {
            let fams = &fams;
            let n = n.clone();
            Box::new(move || {
                let p = corpus.map(&n).expect("map");
                vec![compare_families(&format!("fill-comp/{n}"), p, &fams.j, &fams.j_prime, b)]
            })
        })
        .collect();
    push!("filling-composition", vec![], fc);

    if let Some(horns) = &fams.horn {
        let kan: Vec<Job> = sweep
            .iter()
            .map(|n| -> Job {
                let fams = &fams;
                let n = n.clone();
                Box::new(move || {
                    let p = corpus.map(&n).expect("map");
                    vec![compare_families(&format!("kan/{n}"), p, &fams.j, horns, b)]
                })
            })
            .collect();
        push!("kan-coincidence", vec![], kan);
    }

    let paths: Vec<Job> = corpus
        .fibrant()
        .into_iter()
        .map(|x| -> Job {
            let fams = &fams;
            Box::new(move || path_object_checks(s, fams, &x, corpus.presheaf(&x).expect("presheaf"), b))
        })
        .collect();
    push!("path-objects", vec![], paths);

    let mut spans: Vec<Job> = Vec::new();
    let mut tris: Vec<Job> = Vec::new();
    let mut frobs: Vec<Job> = Vec::new();
    let mut glues: Vec<Job> = Vec::new();
    let mut exts: Vec<Job> = Vec::new();
    let mut facts: Vec<Job> = Vec::new();
    let fams_ref = &fams;
    for r in &corpus.roles {
        match r {
            Role::Span { a1, a2, r } => spans.push(Box::new(move || {
                let name = format!("span/{a1},{a2},{r}");
                let run = || span_check(s, fams_ref, &name, corpus.map(a1)?, corpus.map(a2)?, corpus.map(r)?, b);
                guarded(name.clone(), run())
            })),
            Role::Triangle { q, p } => tris.push(Box::new(move || {
                let name = format!("2oo3/{q},{p}");
                guarded(name.clone(), tf_2oo3_check(fams_ref, &name, corpus.map(q).expect("map"), corpus.map(p).expect("map"), b))
            })),
            Role::Frobenius { m, p } => frobs.push(Box::new(move || {
                let name = format!("frobenius/{m},{p}");
                guarded(name.clone(), frobenius_check(fams_ref, &name, corpus.map(m).expect("map"), corpus.map(p).expect("map"), b))
            })),
            Role::Glue { m, y1, x0, g } => glues.push(Box::new(move || {
                let name = format!("glue/{m},{y1},{x0}{}", g.as_ref().map(|g| format!(",{g}")).unwrap_or_default());
                match glue_input(corpus, m, y1, x0, g.as_deref()) {
                    Ok(input) => vec![glue_check(s, &name, &input)],
                    Err(e) => vec![Check::error(name, &e)],
                }
            })),
            Role::Extension { cartesian, m, p } => exts.push(Box::new(move || {
                let (kind, tag) = if *cartesian {
                    (ExchangeKind::CartesianFibAlongTrivcof, "cartesian")
                } else {
                    (ExchangeKind::TrivfibAlongTrivcof, "trivfib")
                };
                let name = format!("exchange/{tag}/{m},{p}");
                let run = || exchange_check(s, fams_ref, &name, kind, corpus.map(m)?, corpus.map(p)?, b);
                guarded(name.clone(), run())
            })),
            Role::Factorize { tcf, f } => facts.push(Box::new(move || {
                let (wfs, tag) = if *tcf { (Wfs::Tcf, "tcf") } else { (Wfs::Ctf, "ctf") };
                let name = format!("factorize/{tag}/{f}");
                guarded(name.clone(), factorize_check(&name, corpus.map(f).expect("map"), wfs, fams_ref, b))
            })),
            _ => {}
        }
    }
    push!("span", vec![], spans);
    push!("two-out-of-three", vec![], tris);
    push!("frobenius", vec![], frobs);
    push!("glue", vec![], glues);
    push!("exchange", vec![], exts);
    push!("factorization", vec![], facts);
    push!(
        "assumptions",
        vec![
            format!("verdicts are relative to the truncated site {}", site.name()),
            "locality: satisfied by finiteness, not checked".into(),
            "tininess: satisfied by finiteness, not checked".into(),
        ],
        vec![],
    );

    // flatten, run in parallel, and regroup in manifest order
    let flat: Vec<(usize, &Job)> = sections
        .iter()
        .enumerate()
        .flat_map(|(i, (_, _, jobs))| jobs.iter().map(move |j| (i, j)))
        .collect();
    let results: Vec<(usize, Vec<Check>, Duration)> = flat
        .par_iter()
        .map(|(i, job)| {
            let t = Instant::now();
            let out = job();
            (*i, out, t.elapsed())
        })
        .collect();
    let mut out: Vec<Section> = sections
        .iter()
        .map(|(title, notes, _)| Section {
            title: title.clone(),
            checks: Vec::new(),
            notes: notes.clone(),
        })
        .collect();
    let mut timing: Vec<(String, Duration)> = sections.iter().map(|(t, _, _)| (t.clone(), Duration::ZERO)).collect();
    for (i, checks, d) in results {
        out[i].checks.extend(checks);
        timing[i].1 += d;
    }
    let mut config = corpus.echo();
    config.push((
        "budgets".into(),
        format!(
            "cells={} stages={} attachments={} nodes={}",
            b.cells, b.stages, b.rlp.max_attachments, b.rlp.search_nodes
        ),
    ));
    Ok(AuditReport {
        config,
        digests: corpus.digests.clone(),
        sections: out,
        timing,
    })
}

/// Runs `model_audit` on a dedicated pool of `jobs` workers.
pub fn model_audit_with_jobs(corpus: &Corpus, budgets: &Budgets, jobs: usize) -> Result<AuditReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    pool.install(|| model_audit(corpus, budgets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::Path;

    const SMALL: &str = "site simplex 1\n\
        interval builtin\n\
        let one = terminal\n\
        let G = nerve codiscrete 2\n\
        let D = nerve discrete 2\n\
        let P = product G D\n\
        let x = point G [0|]\n\
        let idone = identity one\n\
        fibrant-candidate G D\n\
        fibration-candidate P.p1\n\
        map-candidate x\n\
        triangle-instance P.p1 G!\n\
        span-instance x idone G!\n\
        glue-bundle x P.p1 -\n";

    fn small() -> Corpus {
        load_manifest_text(SMALL, "small.manifest", Path::new("."), "small", &Overrides::default(), Vec::new())
            .unwrap()
    }

    fn verdict(k: u8) -> Verdict {
        [Verdict::Holds, Verdict::Fails, Verdict::Unknown][k as usize % 3]
    }

    #[test]
    fn small_corpus_audit() {
        let b = Budgets::default();
        let r = model_audit(&small(), &b).unwrap();
        assert_eq!(r.count(Verdict::Fails), 0, "{}", r.render());
        for n in ["fibrant/G", "fibrant/D", "fibration/P.p1"] {
            assert_eq!(r.find(n).map(|c| c.verdict), Some(Verdict::Holds), "{n}");
        }
        let titles: Vec<&str> = r.sections.iter().map(|s| s.title.as_str()).collect();
        let pos = |t: &str| titles.iter().position(|x| *x == t);
        assert!(pos("interval-laws") < pos("glue"));
        assert!(r.render().starts_with("psw audit report\n"));
        assert!(r.render().ends_with(&format!("unknown {}\n", r.count(Verdict::Unknown))));
    }

    #[test]
    fn render_ignores_thread_count() {
        let b = Budgets::default();
        let c = small();
        let one = model_audit_with_jobs(&c, &b, 1).unwrap();
        let many = model_audit_with_jobs(&c, &b, 3).unwrap();
        assert_eq!(one.render(), many.render());
    }

    proptest! {
        #[test]
        fn exit_code_follows_counts(vs in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..4), 0..4)) {
            let sections = vs
                .iter()
                .enumerate()
                .map(|(i, s)| Section {
                    title: format!("s{i}"),
                    checks: s.iter().enumerate().map(|(j, &k)| Check::new(format!("c{i}.{j}"), verdict(k), vec![])).collect(),
                    notes: vec![],
                })
                .collect();
            let r = AuditReport { config: vec![], digests: vec![], sections, timing: vec![] };
            let all: Vec<Verdict> = vs.iter().flatten().map(|&k| verdict(k)).collect();
            let want = if all.contains(&Verdict::Fails) { 1 } else if all.contains(&Verdict::Unknown) { 2 } else { 0 };
            prop_assert_eq!(r.exit_code(), want);
            prop_assert_eq!(r.count(Verdict::Holds) + r.count(Verdict::Fails) + r.count(Verdict::Unknown), all.len());
            prop_assert_eq!(r.render().matches("\nCHECK ").count(), all.len());
        }
    }
}
