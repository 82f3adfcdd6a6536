//! Corpus manifests: named presheaves and maps with role tags.
//!
//! ```text
//! site simplex 2
//! interval builtin
//! include shapes.psh
//! let G = nerve codiscrete 2
//! let P = product G G
//! fibrant-candidate G
//! fibration-candidate P.p1
//! ```

use crate::cylinder::{builtin_interval, parse_interval_line, IntervalStructure};
use crate::error::{Error, Result};
use crate::lifting::{gen_cofibrations, gen_trivcofs, horn_family, GeneratorFamily};
use crate::limits::{product, product_map, pullback};
use crate::nerve::{nerve, FiniteCategory};
use crate::presheaf::{
    boundary, discrete, from_initial, horn, initial, parse_presheaf_file, representable, terminal, to_terminal,
    PresheafMap, Psh, Registry,
};
use crate::site::{builtin_cube_site, builtin_simplex_site, parse_site, Site};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Where the site comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SiteSpec {
    Simplex(usize),
    Cube(usize),
    File(PathBuf),
}

impl SiteSpec {
    /// Reads `simplex:N`, `cube:N` or a path.
    pub fn parse(s: &str) -> Result<Self> {
        let num = |n: &str| {
            n.parse::<usize>()
                .map_err(|_| Error::InvalidRelation(format!("bad truncation degree `{n}`")))
        };
        if let Some(n) = s.strip_prefix("simplex:") {
            return Ok(SiteSpec::Simplex(num(n)?));
        }
        if let Some(n) = s.strip_prefix("cube:") {
            return Ok(SiteSpec::Cube(num(n)?));
        }
        Ok(SiteSpec::File(PathBuf::from(s)))
    }

    fn describe(&self) -> String {
        match self {
            SiteSpec::Simplex(n) => format!("simplex:{n}"),
            SiteSpec::Cube(n) => format!("cube:{n}"),
            SiteSpec::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntervalSpec {
    Builtin,
    File(PathBuf),
}

impl IntervalSpec {
    pub fn parse(s: &str) -> Self {
        if s == "builtin" {
            IntervalSpec::Builtin
        } else {
            IntervalSpec::File(PathBuf::from(s))
        }
    }

    fn describe(&self) -> String {
        match self {
            IntervalSpec::Builtin => "builtin".into(),
            IntervalSpec::File(p) => p.display().to_string(),
        }
    }
}

/// Role tags attached to corpus entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Role {
    Fibrant(String),
    Fibration(String),
    Map(String),
    Span { a1: String, a2: String, r: String },
    /// `q: X → Y` followed by `p: Y → Z`.
    Triangle { q: String, p: String },
    Frobenius { m: String, p: String },
    Glue { m: String, y1: String, x0: String, g: Option<String> },
    Extension { cartesian: bool, m: String, p: String },
    Factorize { tcf: bool, f: String },
}

/// A named value in the corpus.
#[derive(Debug, Clone)]
pub enum Value {
    Psh(Psh),
    Map(PresheafMap),
}

/// A loaded manifest.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub name: String,
    pub site: Arc<Site>,
    pub site_spec: SiteSpec,
    pub interval: IntervalStructure,
    pub interval_spec: IntervalSpec,
    pub values: BTreeMap<String, Value>,
    pub roles: Vec<Role>,
    /// `(file, sha256)` for every input read, in reading order.
    pub digests: Vec<(String, String)>,
}

impl Corpus {
    pub fn presheaf(&self, name: &str) -> Result<&Psh> {
        match self.values.get(name) {
            Some(Value::Psh(p)) => Ok(p),
            Some(Value::Map(_)) => Err(Error::InvalidPresheaf(format!("`{name}` is a map"))),
            None => Err(Error::InvalidPresheaf(format!("unknown presheaf `{name}`"))),
        }
    }

    pub fn map(&self, name: &str) -> Result<&PresheafMap> {
        match self.values.get(name) {
            Some(Value::Map(m)) => Ok(m),
            Some(Value::Psh(_)) => Err(Error::InvalidMap(format!("`{name}` is a presheaf"))),
            None => Err(Error::InvalidMap(format!("unknown map `{name}`"))),
        }
    }

    /// Names of the maps swept by the lifting comparisons: fibration and map
    /// candidates, then `X!` for every fibrant candidate.
    pub fn sweep_maps(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.roles {
            if let Role::Fibration(n) | Role::Map(n) = r {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        }
        for r in &self.roles {
            if let Role::Fibrant(x) = r {
                let n = format!("{x}!");
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }

    pub fn fibrant(&self) -> Vec<String> {
        self.roles
            .iter()
            .filter_map(|r| match r {
                Role::Fibrant(x) => Some(x.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub site: Option<SiteSpec>,
    pub interval: Option<IntervalSpec>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path, digests: &mut Vec<(String, String)>) -> Result<String> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let shown = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    digests.push((shown, digest(text.as_bytes())));
    Ok(text)
}

pub fn build_site_spec(spec: &SiteSpec, digests: &mut Vec<(String, String)>) -> Result<Arc<Site>> {
    Ok(Arc::new(match spec {
        SiteSpec::Simplex(n) => builtin_simplex_site(*n)?,
        SiteSpec::Cube(n) => builtin_cube_site(*n)?,
        SiteSpec::File(p) => {
            let text = read(p, digests)?;
            parse_site(&text, &p.display().to_string())?
        }
    }))
}

/// Reads an interval file: presheaf and map blocks plus one `interval` line.
fn interval_from_file(path: &Path, site: &Arc<Site>, digests: &mut Vec<(String, String)>) -> Result<IntervalStructure> {
    let text = read(path, digests)?;
    let file = path.display().to_string();
    let is_interval = |l: &str| l.trim_start().starts_with("interval ");
    let lines: Vec<&str> = text.lines().filter(|l| is_interval(l)).collect();
    // blank out the interval line so parse errors keep their line numbers
    let rest: Vec<&str> = text.lines().map(|l| if is_interval(l) { "" } else { l }).collect();
    let mut reg = Registry::default();
    parse_presheaf_file(&rest.join("\n"), &file, site, &mut reg)?;
    match lines.as_slice() {
        [line] => parse_interval_line(line.trim(), &reg),
        _ => Err(Error::Parse {
            file,
            line: 0,
            msg: "expected exactly one `interval` line".into(),
        }),
    }
}

/// A map `1 → X` picking the element labelled `label` at the terminal object.
fn point(site: &Arc<Site>, one: &Psh, x: &Psh, label: &str) -> Result<PresheafMap> {
    let t = site
        .terminal_object()
        .ok_or_else(|| Error::HypothesisFailure("site has no terminal object".into()))?;
    let e = x.index_of(t, label).ok_or_else(|| Error::UnknownElement {
        object: site.object_label(t).to_string(),
        element: label.to_string(),
    })?;
    let comps = site.objects().map(|c| vec![x.act(site.hom(c, t)[0], e)]).collect();
    PresheafMap::new(one.clone(), x.clone(), comps)
}

fn family(site: &Arc<Site>, s: &IntervalStructure, name: &str) -> Result<GeneratorFamily> {
    match name {
        "GenCof" => gen_cofibrations(site),
        "J" => gen_trivcofs(site, s),
        "Horn" => horn_family(site),
        _ => Err(Error::InvalidMap(format!("unknown generator family `{name}`"))),
    }
}

struct Loader {
    site: Arc<Site>,
    interval: IntervalStructure,
    one: Psh,
    values: BTreeMap<String, Value>,
}

impl Loader {
    fn psh(&self, n: &str) -> Result<Psh> {
        match self.values.get(n) {
            Some(Value::Psh(p)) => Ok(p.clone()),
            _ => Err(Error::InvalidPresheaf(format!("unknown presheaf `{n}`"))),
        }
    }

    fn map(&self, n: &str) -> Result<PresheafMap> {
        match self.values.get(n) {
            Some(Value::Map(m)) => Ok(m.clone()),
            _ => Err(Error::InvalidMap(format!("unknown map `{n}`"))),
        }
    }

    fn obj(&self, label: &str) -> Result<usize> {
        self.site.object_id(label)
    }

    fn define(&mut self, name: &str, toks: &[&str]) -> Result<()> {
        let site = self.site.clone();
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidMap(format!("expected a number, got `{t}`")))
        };
        let arity = |n: usize| -> Result<()> {
            if toks.len() == n + 1 {
                Ok(())
            } else {
                Err(Error::InvalidMap(format!("`{}` takes {n} arguments", toks[0])))
            }
        };
        let value = match toks[0] {
            "nerve" => {
                arity(2)?;
                let n = num(toks[2])?;
                let cat = match toks[1] {
                    "codiscrete" => FiniteCategory::codiscrete(n),
                    "linear" => FiniteCategory::linear(n),
                    "discrete" => FiniteCategory::discrete(n),
                    "cyclic" => FiniteCategory::cyclic(n),
                    other => return Err(Error::InvalidMap(format!("unknown category family `{other}`"))),
                };
                Value::Psh(nerve(&site, &cat)?.psh)
            }
            "discrete" => Value::Psh(discrete(&site, &toks[1..])),
            "representable" => {
                arity(1)?;
                Value::Psh(representable(&site, self.obj(toks[1])?)?)
            }
            "terminal" => Value::Psh(self.one.clone()),
            "initial" => Value::Psh(initial(&site)),
            "interval" => Value::Psh(self.interval.interval.clone()),
            "product" | "pullback" => {
                arity(2)?;
                let pb = if toks[0] == "product" {
                    product(&self.psh(toks[1])?, &self.psh(toks[2])?)
                } else {
                    pullback(&self.map(toks[1])?, &self.map(toks[2])?)?
                };
                self.values.insert(format!("{name}.p1"), Value::Map(pb.p1.clone()));
                self.values.insert(format!("{name}.p2"), Value::Map(pb.p2.clone()));
                Value::Psh(pb.apex)
            }
            "bang" => {
                arity(1)?;
                Value::Map(to_terminal(&self.psh(toks[1])?, &self.one))
            }
            "from-initial" => {
                arity(1)?;
                Value::Map(from_initial(&initial(&site), &self.psh(toks[1])?))
            }
            "identity" => {
                arity(1)?;
                Value::Map(PresheafMap::identity(&self.psh(toks[1])?))
            }
            "point" => {
                arity(2)?;
                Value::Map(point(&site, &self.one, &self.psh(toks[1])?, toks[2])?)
            }
            "boundary" => {
                arity(1)?;
                Value::Map(boundary(&site, self.obj(toks[1])?)?)
            }
            "horn" => {
                arity(2)?;
                Value::Map(horn(&site, num(toks[1])?, num(toks[2])?)?)
            }
            "endpoint" => {
                arity(1)?;
                let k = num(toks[1])?;
                if k > 1 {
                    return Err(Error::InvalidMap("endpoint index must be 0 or 1".into()));
                }
                Value::Map(self.interval.delta[k].clone())
            }
            "compose" => {
                arity(2)?;
                Value::Map(self.map(toks[1])?.compose(&self.map(toks[2])?)?)
            }
            "product-map" => {
                arity(2)?;
                Value::Map(product_map(&self.map(toks[1])?, &self.map(toks[2])?))
            }
            "generator" => {
                arity(2)?;
                let fam = family(&site, &self.interval, toks[1])?;
                let m = fam
                    .members
                    .iter()
                    .find(|m| m.name == toks[2])
                    .ok_or_else(|| Error::InvalidMap(format!("no member `{}` in {}", toks[2], toks[1])))?;
                Value::Map(m.attach().clone())
            }
            "source" | "target" => {
                arity(1)?;
                let m = self.map(toks[1])?;
                Value::Psh(if toks[0] == "source" { m.source() } else { m.target() }.clone())
            }
            other => return Err(Error::InvalidMap(format!("unknown constructor `{other}`"))),
        };
        self.values.insert(name.to_string(), value);
        Ok(())
    }
}

/// Parses and evaluates a manifest.
pub fn load_manifest(path: &Path, overrides: &Overrides) -> Result<Corpus> {
    let mut digests = Vec::new();
    let text = read(path, &mut digests)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    load_manifest_text(&text, &path.display().to_string(), &dir, &name, overrides, digests)
}

/// Evaluates manifest text; relative paths resolve against `dir`.
pub fn load_manifest_text(
    text: &str,
    file: &str,
    dir: &Path,
    name: &str,
    overrides: &Overrides,
    mut digests: Vec<(String, String)>,
) -> Result<Corpus> {
    let perr = |line: usize, e: Error| match e {
        Error::Parse { .. } | Error::Io(_) => e,
        other => Error::Parse {
            file: file.to_string(),
            line,
            msg: other.to_string(),
        },
    };
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, t)| !t.is_empty())
        .collect();
    let mut site_spec = None;
    let mut interval_spec = None;
    for (ln, t) in &lines {
        match t[0] {
            "site" => {
                let spec = match t.as_slice() {
                    ["site", "simplex", n] => SiteSpec::parse(&format!("simplex:{n}")),
                    ["site", "cube", n] => SiteSpec::parse(&format!("cube:{n}")),
                    ["site", "file", p] => Ok(SiteSpec::File(dir.join(p))),
                    _ => Err(Error::InvalidRelation("expected `site simplex|cube N` or `site file PATH`".into())),
                }
                .map_err(|e| perr(*ln, e))?;
                site_spec = Some(spec);
            }
            "interval" => {
                interval_spec = Some(match t.as_slice() {
                    ["interval", "builtin"] => IntervalSpec::Builtin,
                    ["interval", "file", p] => IntervalSpec::File(dir.join(p)),
                    _ => return Err(perr(*ln, Error::InvalidMap("expected `interval builtin|file PATH`".into()))),
                });
            }
            _ => {}
        }
    }
    let site_spec = overrides
        .site
        .clone()
        .or(site_spec)
        .ok_or_else(|| perr(0, Error::InvalidRelation("manifest names no site".into())))?;
    let interval_spec = overrides.interval.clone().or(interval_spec).unwrap_or(IntervalSpec::Builtin);
    let site = build_site_spec(&site_spec, &mut digests)?;
    let interval = match &interval_spec {
        IntervalSpec::Builtin => builtin_interval(&site)?,
        IntervalSpec::File(p) => interval_from_file(p, &site, &mut digests)?,
    };
    let mut ld = Loader {
        one: terminal(&site),
        site,
        interval,
        values: BTreeMap::new(),
    };
    let mut roles = Vec::new();
    for (ln, t) in &lines {
        let ln = *ln;
        let need = |n: usize| -> Result<()> {
            if t.len() == n + 1 {
                Ok(())
            } else {
                Err(perr(ln, Error::InvalidMap(format!("`{}` takes {n} arguments", t[0]))))
            }
        };
        match t[0] {
            "site" | "interval" => {}
            "include" => {
                need(1)?;
                let p = dir.join(t[1]);
                let body = read(&p, &mut digests)?;
                let mut reg = Registry::default();
                parse_presheaf_file(&body, &p.display().to_string(), &ld.site, &mut reg)?;
                for (n, v) in reg.presheaves {
                    ld.values.insert(n, Value::Psh(v));
                }
                for (n, v) in reg.maps {
                    ld.values.insert(n, Value::Map(v));
                }
            }
            "let" => {
                if t.len() < 4 || t[2] != "=" {
                    return Err(perr(ln, Error::InvalidMap("expected `let NAME = EXPR`".into())));
                }
                if ld.values.contains_key(t[1]) {
                    return Err(perr(ln, Error::InvalidMap(format!("`{}` is already defined", t[1]))));
                }
                ld.define(t[1], &t[3..]).map_err(|e| perr(ln, e))?;
            }
            "fibrant-candidate" | "fibration-candidate" | "map-candidate" => {
                for n in &t[1..] {
                    let role = match t[0] {
                        "fibrant-candidate" => {
                            let x = ld.psh(n).map_err(|e| perr(ln, e))?;
                            ld.values.insert(format!("{n}!"), Value::Map(to_terminal(&x, &ld.one)));
                            Role::Fibrant(n.to_string())
                        }
                        "fibration-candidate" => {
                            ld.map(n).map_err(|e| perr(ln, e))?;
                            Role::Fibration(n.to_string())
                        }
                        _ => {
                            ld.map(n).map_err(|e| perr(ln, e))?;
                            Role::Map(n.to_string())
                        }
                    };
                    roles.push(role);
                }
            }
            "span-instance" => {
                need(3)?;
                for n in &t[1..] {
                    ld.map(n).map_err(|e| perr(ln, e))?;
                }
                roles.push(Role::Span {
                    a1: t[1].into(),
                    a2: t[2].into(),
                    r: t[3].into(),
                });
            }
            "triangle-instance" => {
                need(2)?;
                let (q, p) = (ld.map(t[1]).map_err(|e| perr(ln, e))?, ld.map(t[2]).map_err(|e| perr(ln, e))?);
                p.compose(&q).map_err(|e| perr(ln, e))?;
                roles.push(Role::Triangle {
                    q: t[1].into(),
                    p: t[2].into(),
                });
            }
            "frobenius-instance" => {
                need(2)?;
                for n in &t[1..] {
                    ld.map(n).map_err(|e| perr(ln, e))?;
                }
                roles.push(Role::Frobenius {
                    m: t[1].into(),
                    p: t[2].into(),
                });
            }
            "glue-bundle" => {
                if !(t.len() == 4 && t[3] == "-" || t.len() == 5 && t[3] != "-") {
                    return Err(perr(ln, Error::InvalidMap("expected `glue-bundle M Y1 - ` or `glue-bundle M Y1 X0 G`".into())));
                }
                for n in &t[1..] {
                    if *n != "-" {
                        ld.map(n).map_err(|e| perr(ln, e))?;
                    }
                }
                roles.push(Role::Glue {
                    m: t[1].into(),
                    y1: t[2].into(),
                    x0: t[3].into(),
                    g: t.get(4).map(|s| s.to_string()),
                });
            }
            "extension-instance" => {
                need(3)?;
                let cartesian = match t[1] {
                    "trivfib" => false,
                    "cartesian" => true,
                    _ => return Err(perr(ln, Error::InvalidMap("kind must be `trivfib` or `cartesian`".into()))),
                };
                for n in &t[2..] {
                    ld.map(n).map_err(|e| perr(ln, e))?;
                }
                roles.push(Role::Extension {
                    cartesian,
                    m: t[2].into(),
                    p: t[3].into(),
                });
            }
            "factorize-instance" => {
                need(2)?;
                let tcf = match t[1] {
                    "ctf" => false,
                    "tcf" => true,
                    _ => return Err(perr(ln, Error::InvalidMap("wfs must be `ctf` or `tcf`".into()))),
                };
                ld.map(t[2]).map_err(|e| perr(ln, e))?;
                roles.push(Role::Factorize { tcf, f: t[2].into() });
            }
            other => return Err(perr(ln, Error::InvalidMap(format!("unknown directive `{other}`")))),
        }
    }
    Ok(Corpus {
        name: name.to_string(),
        site: ld.site,
        site_spec,
        interval: ld.interval,
        interval_spec,
        values: ld.values,
        roles,
        digests,
    })
}

impl Corpus {
    /// The configuration lines echoed at the top of a report.
    pub fn echo(&self) -> Vec<(String, String)> {
        vec![
            ("manifest".into(), self.name.clone()),
            ("site".into(), format!("{} ({})", self.site.name(), self.site_spec.describe())),
            ("interval".into(), format!("{} ({})", self.interval.name, self.interval_spec.describe())),
        ]
    }
}
