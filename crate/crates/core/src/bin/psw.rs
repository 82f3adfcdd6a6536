use clap::{Parser, Subcommand, ValueEnum};
use psw::audit::{
    factorize_check, glue_check, glue_input, lifting_check, render_map, load_manifest, model_audit, Budgets, Check, Corpus,
    Families, IntervalSpec, Overrides, Role, SiteSpec, Wfs,
};
use psw::error::{Error, Result};
use psw::glue::equivalence_extend;
use psw::lifting::{member_rlp, solve_lift, GeneratorFamily, LiftingProblem, Member, MemberWitness, Verdict};
use psw::presheaf::{parse_presheaf_file, serialize_map, serialize_presheaf, Registry};
use psw::site::parse_site;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "psw", version, about = "Finite presheaf model-structure workbench")]
struct Cli {
    /// `simplex:N`, `cube:N` or a site file; overrides the manifest.
    #[arg(long, global = true)]
    site: Option<String>,
    /// `builtin` or an interval file; overrides the manifest.
    #[arg(long, global = true)]
    interval: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, default_value_t = 64)]
    budget_cells: usize,
    #[arg(long, global = true, default_value_t = 6)]
    budget_stages: usize,
    /// Accepted for scripts; nothing here is randomized.
    #[arg(long, global = true)]
    seedless: bool,
    /// Manifest supplying named maps to `check`, `lift` and `factorize`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    IsFibration,
    IsTrivialFibration,
    IsKanFibrationHorn,
}

#[derive(Clone, Copy, ValueEnum)]
enum WfsArg {
    Ctf,
    Tcf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse manifests, site files and presheaf files.
    Validate { files: Vec<PathBuf> },
    /// Run one lifting-property check on a named map.
    Check {
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        map: String,
    },
    /// Lift a map or `FAMILY:member` against a map.
    Lift {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, requires = "bottom")]
        top: Option<String>,
        #[arg(long, requires = "top")]
        bottom: Option<String>,
    },
    /// Bounded small-object factorization.
    Factorize {
        #[arg(long, value_enum)]
        wfs: WfsArg,
        #[arg(long)]
        map: String,
        /// Cell budget; defaults to `--budget-cells`.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Extend a fibration along a map from a manifest's first `glue-bundle`.
    Glue {
        #[arg(long)]
        bundle: PathBuf,
        /// Where to write `Y0`; printed before the report otherwise.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full audit over a manifest.
    Audit {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Report path; stdout otherwise.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn overrides(cli: &Cli) -> Result<Overrides> {
    Ok(Overrides {
        site: cli.site.as_deref().map(SiteSpec::parse).transpose()?,
        interval: cli.interval.as_deref().map(IntervalSpec::parse),
    })
}

fn budgets(cli: &Cli) -> Budgets {
    Budgets {
        cells: cli.budget_cells,
        stages: cli.budget_stages,
        ..Budgets::default()
    }
}

fn corpus(cli: &Cli, path: Option<&Path>) -> Result<Corpus> {
    let path = path
        .or(cli.manifest.as_deref())
        .ok_or_else(|| Error::Io("a manifest is required (--manifest)".into()))?;
    load_manifest(path, &overrides(cli)?)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::Unknown => 2,
    }
}

fn print_check(c: &Check) -> u8 {
    println!("CHECK {} {}", c.name, c.verdict.as_str());
    for w in &c.witness {
        println!("    {w}");
    }
    verdict_code(c.verdict)
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn validate(cli: &Cli, files: &[PathBuf]) -> Result<u8> {
    for f in files {
        let name = f.display().to_string();
        match f.extension().and_then(|e| e.to_str()) {
            Some("manifest") => {
                let c = load_manifest(f, &overrides(cli)?)?;
                println!("OK {name}: manifest, {} values, {} roles", c.values.len(), c.roles.len());
            }
            Some("site") => {
                let s = parse_site(&read(f)?, &name)?;
                println!("OK {name}: site {}, {} objects", s.name(), s.num_objects());
            }
            _ => {
                let spec = SiteSpec::parse(cli.site.as_deref().unwrap_or("simplex:2"))?;
                let site = psw::audit::build_site_spec(&spec, &mut Vec::new())?;
                let mut reg = Registry::default();
                parse_presheaf_file(&read(f)?, &name, &site, &mut reg)?;
                println!(
                    "OK {name}: {} presheaves, {} maps",
                    reg.presheaves.len(),
                    reg.maps.len()
                );
            }
        }
    }
    Ok(0)
}

fn check(cli: &Cli, op: Op, map: &str) -> Result<u8> {
    let c = corpus(cli, None)?;
    let simplicial = matches!(c.site_spec, SiteSpec::Simplex(_));
    let fams = Families::new(&c.site, &c.interval, simplicial)?;
    let (fam, tag) = match op {
        Op::IsFibration => (&fams.j, "is_fibration"),
        Op::IsTrivialFibration => (&fams.gencof, "is_trivial_fibration"),
        Op::IsKanFibrationHorn => (
            fams.horn
                .as_ref()
                .ok_or_else(|| Error::HypothesisFailure("horns need a simplex site".into()))?,
            "is_kan_fibration_horn",
        ),
    };
    Ok(print_check(&lifting_check(&format!("{tag}/{map}"), c.map(map)?, fam, &budgets(cli))))
}

/// A manifest map, or `FAMILY:member` from GenCof, J, J' or Horn.
fn left_member(c: &Corpus, fams: &Families, name: &str) -> Result<Member> {
    if let Some((fam, member)) = name.split_once(':') {
        let family: &GeneratorFamily = match fam {
            "GenCof" => &fams.gencof,
            "J" => &fams.j,
            "J'" => &fams.j_prime,
            "Horn" => fams.horn.as_ref().ok_or_else(|| Error::InvalidMap("no horns on this site".into()))?,
            _ => return Err(Error::InvalidMap(format!("unknown family `{fam}`"))),
        };
        return family
            .members
            .iter()
            .find(|m| m.name == member)
            .cloned()
            .ok_or_else(|| Error::InvalidMap(format!("no member `{member}` in {fam}")));
    }
    Ok(Member::arrow(name, c.map(name)?.clone()))
}

fn lift(cli: &Cli, left: &str, right: &str, top: Option<&str>, bottom: Option<&str>) -> Result<u8> {
    let c = corpus(cli, None)?;
    let fams = Families::new(&c.site, &c.interval, matches!(c.site_spec, SiteSpec::Simplex(_)))?;
    let member = left_member(&c, &fams, left)?;
    let p = c.map(right)?;
    let name = format!("lift/{left},{right}");
    let check = match (top, bottom) {
        (Some(u), Some(v)) => {
            let prob = LiftingProblem::new(member.square.clone(), p.clone(), c.map(u)?.clone(), c.map(v)?.clone())?;
            match solve_lift(&prob) {
                Some(d) => Check::new(name, Verdict::Holds, vec![format!("filler: {}", render_map(&d))]),
                None => Check::new(name, Verdict::Fails, vec!["no filler".into()]),
            }
        }
        _ => match member_rlp(&member, p, budgets(cli).rlp) {
            MemberWitness::Lifts { attachments, .. } => {
                Check::new(name, Verdict::Holds, vec![format!("{attachments} attachments, all filled")])
            }
            MemberWitness::Fails { u, v } => Check::new(
                name,
                Verdict::Fails,
                vec![format!("top: {}", render_map(&u)), format!("bottom: {}", render_map(&v))],
            ),
            MemberWitness::Unknown { reason } => Check::new(name, Verdict::Unknown, vec![reason]),
        },
    };
    Ok(print_check(&check))
}

fn factorize(cli: &Cli, wfs: WfsArg, map: &str, budget: Option<usize>) -> Result<u8> {
    let c = corpus(cli, None)?;
    let fams = Families::new(&c.site, &c.interval, matches!(c.site_spec, SiteSpec::Simplex(_)))?;
    let mut b = budgets(cli);
    if let Some(n) = budget {
        b.cells = n;
    }
    let (wfs, tag) = match wfs {
        WfsArg::Ctf => (Wfs::Ctf, "ctf"),
        WfsArg::Tcf => (Wfs::Tcf, "tcf"),
    };
    let name = format!("factorize/{tag}/{map}");
    Ok(print_check(&factorize_check(&name, c.map(map)?, wfs, &fams, &b)?))
}

fn glue(cli: &Cli, bundle: &Path, out: Option<&Path>) -> Result<u8> {
    let c = corpus(cli, Some(bundle))?;
    let (m, y1, x0, g) = c
        .roles
        .iter()
        .find_map(|r| match r {
            Role::Glue { m, y1, x0, g } => Some((m, y1, x0, g)),
            _ => None,
        })
        .ok_or_else(|| Error::Io(format!("{}: no glue-bundle entry", bundle.display())))?;
    let input = glue_input(&c, m, y1, x0, g.as_deref())?;
    let output = equivalence_extend(&c.interval, &input)?;
    let y0 = &output.y0.anchor;
    let text = format!(
        "{}{}",
        serialize_presheaf("Y0", y0.source()),
        serialize_map("Y0.p", "Y0", "B", y0)
    );
    match out {
        Some(path) => std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(print_check(&glue_check(&c.interval, &format!("glue/{m},{y1},{x0}{}", g.as_ref().map(|g| format!(",{g}")).unwrap_or_default()), &input)))
}

fn audit(cli: &Cli, manifest: Option<&Path>, report: Option<&Path>) -> Result<u8> {
    let c = corpus(cli, manifest)?;
    let r = model_audit(&c, &budgets(cli))?;
    let text = r.render();
    match report {
        Some(path) => std::fs::write(path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    eprint!("{}", r.render_timing());
    Ok(r.exit_code() as u8)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Validate { files } => validate(cli, files),
        Cmd::Check { op, map } => check(cli, *op, map),
        Cmd::Lift {
            left,
            right,
            top,
            bottom,
        } => lift(cli, left, right, top.as_deref(), bottom.as_deref()),
        Cmd::Factorize { wfs, map, budget } => factorize(cli, *wfs, map, *budget),
        Cmd::Glue { bundle, out } => glue(cli, bundle, out.as_deref()),
        Cmd::Audit { manifest, report } => audit(cli, manifest.as_deref(), report.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
