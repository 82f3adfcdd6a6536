use super::{build_site, Presentation, Site, Word};
use crate::error::{Error, Result};

fn parse_word(p: &Presentation, tok: &str, file: &str, line: usize) -> Result<Word> {
    let err = |msg: String| Error::Parse {
        file: file.to_string(),
        line,
        msg,
    };
    if let Some(obj) = tok.strip_prefix("id_") {
        if let Some(o) = p.object_id(obj) {
            return Ok(Word::Identity(o));
        }
    }
    let gens = tok
        .split('.')
        .map(|g| {
            p.generator_id(g)
                .ok_or_else(|| err(format!("unknown generator `{g}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word::Gens(gens))
}

/// Parses the line-oriented site format.
pub fn parse_site(text: &str, file: &str) -> Result<Site> {
    let mut p = Presentation::default();
    let mut named = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: &str| Error::Parse {
            file: file.to_string(),
            line,
            msg: msg.to_string(),
        };
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "site" if toks.len() == 2 && !named => {
                p.name = toks[1].to_string();
                named = true;
            }
            "object" if toks.len() == 4 && toks[2] == "degree" => {
                let d: usize = toks[3].parse().map_err(|_| err("bad degree"))?;
                if p.object_id(toks[1]).is_some() {
                    return Err(err("duplicate object"));
                }
                p.object(toks[1], d);
            }
            "gen" if toks.len() == 6 && toks[2] == ":" && toks[4] == "->" => {
                let s = p.object_id(toks[3]).ok_or_else(|| err("unknown source object"))?;
                let t = p.object_id(toks[5]).ok_or_else(|| err("unknown target object"))?;
                p.generator(toks[1], s, t);
            }
            "rel" if toks.len() == 4 && toks[2] == "=" => {
                let lhs = parse_word(&p, toks[1], file, line)?;
                let rhs = parse_word(&p, toks[3], file, line)?;
                p.relation(lhs, rhs);
            }
            _ => return Err(err("unrecognized line")),
        }
    }
    if !named {
        return Err(Error::Parse {
            file: file.to_string(),
            line: 0,
            msg: "missing `site` header".into(),
        });
    }
    build_site(p)
}

/// Serializes the presentation a site was built from, in input order.
pub fn serialize_site(site: &Site) -> String {
    let p = site.presentation();
    let mut out = format!("site {}\n", p.name);
    for (o, label) in p.objects.iter().enumerate() {
        out.push_str(&format!("object {} degree {}\n", label, p.degrees[o]));
    }
    for g in &p.generators {
        out.push_str(&format!(
            "gen {} : {} -> {}\n",
            g.label, p.objects[g.source], p.objects[g.target]
        ));
    }
    for (l, r) in &p.relations {
        out.push_str(&format!("rel {} = {}\n", p.word_label(l), p.word_label(r)));
    }
    out
}
