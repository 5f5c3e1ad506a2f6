//! Line-oriented text format for presentations, words, steps and paths.

use std::fmt::Write as _;

use thiserror::Error;

use super::{
    Flavor, GenId, Mode, MorGen, ObjId, Order, Path, Presentation, Prim, Relation, Step, Term,
    WeightSet, WeightSpec, Word,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}: {msg}")]
    Type { line: usize, msg: String },
    #[error("line {line}: duplicate {kind} `{name}`")]
    Duplicate { line: usize, kind: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_char)
}

/// Splits one whitespace-free token into declared object names; the
/// segmentation must exist and be unique.
fn segment(objects: &[String], tok: &str) -> Result<Word, String> {
    let n = tok.len();
    // ways[i] = number of segmentations of tok[i..], capped at 2
    let mut ways = vec![0u8; n + 1];
    let mut choice = vec![usize::MAX; n + 1];
    ways[n] = 1;
    for i in (0..n).rev() {
        if !tok.is_char_boundary(i) {
            continue;
        }
        for (k, o) in objects.iter().enumerate() {
            if tok[i..].starts_with(o.as_str()) && ways[i + o.len()] > 0 {
                if ways[i] == 0 {
                    choice[i] = k;
                }
                ways[i] = (ways[i] + ways[i + o.len()]).min(2);
            }
        }
    }
    match ways[0] {
        0 => Err(format!("`{tok}` is not a word over the declared objects")),
        1 => {
            let mut out = Vec::new();
            let mut i = 0;
            while i < n {
                let k = choice[i];
                out.push(k as ObjId);
                i += objects[k].len();
            }
            Ok(out)
        }
        _ => Err(format!("`{tok}` splits into objects in more than one way; separate them with spaces")),
    }
}

fn word_from(objects: &[String], text: &str) -> Result<Word, String> {
    let text = text.trim();
    if text == "0" || text.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        if tok == "0" {
            continue;
        }
        out.extend(segment(objects, tok)?);
    }
    Ok(out)
}

pub fn parse_word(p: &Presentation, text: &str) -> Result<Word, ParseError> {
    word_from(&p.objects, text).map_err(|m| syntax(1, 1, m))
}

fn step_from(p: &Presentation, text: &str) -> Result<Step, String> {
    let text = text.trim();
    let open = text.find('[').ok_or_else(|| format!("`{text}` is not a step `x[gen]y`"))?;
    let close = text[open..].find(']').map(|i| i + open).ok_or_else(|| format!("unclosed `[` in `{text}`"))?;
    let name = text[open + 1..close].trim();
    let gen = p.gen_id(name).ok_or_else(|| format!("unknown generator `{name}`"))?;
    let left = word_from(&p.objects, &text[..open])?;
    let right = word_from(&p.objects, &text[close + 1..])?;
    Ok(Step { left, gen, right })
}

pub fn parse_step(p: &Presentation, text: &str) -> Result<Step, ParseError> {
    step_from(p, text).map_err(|m| syntax(1, 1, m))
}

fn path_from(p: &Presentation, text: &str) -> Result<Path, String> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("id") {
        if rest.is_empty() || rest.starts_with(char::is_whitespace) {
            return Ok(Path::id(word_from(&p.objects, rest)?));
        }
    }
    let mut steps = Vec::new();
    for part in text.split(';') {
        steps.push(step_from(p, part)?);
    }
    let source = p.step_source(&steps[0]);
    let path = Path { source, steps };
    p.check_path(&path)?;
    Ok(path)
}

pub fn parse_path(p: &Presentation, text: &str) -> Result<Path, ParseError> {
    path_from(p, text).map_err(|m| syntax(1, 1, m))
}

struct Line<'a> {
    no: usize,
    text: &'a str,
}

fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

/// Parses and validates a document.
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let p = parse_unchecked(text)?;
    let diags = p.validate();
    if let Some(d) = diags.first() {
        return Err(ParseError::Invalid(d.message.clone()));
    }
    Ok(p)
}

/// Parses a document without the final validation pass, so that
/// diagnostics can be listed separately.
pub fn parse_unchecked(text: &str) -> Result<Presentation, ParseError> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Line { no: i + 1, text: strip_comment(l) })
        .collect();
    let mut p = Presentation::new(Mode::Monoidal);
    let mut i = 0;
    let mut seen_mode = false;
    while i < lines.len() {
        let Line { no, text } = lines[i];
        let t = text.trim();
        i += 1;
        if t.is_empty() {
            continue;
        }
        let (kw, rest) = match t.find(char::is_whitespace) {
            Some(k) => (&t[..k], t[k..].trim()),
            None => (t, ""),
        };
        let col = text.find(kw).unwrap_or(0) + 1;
        match kw {
            "mode" => {
                if seen_mode || !p.objects.is_empty() || !p.gens.is_empty() {
                    return Err(syntax(no, col, "`mode` must come first and only once"));
                }
                seen_mode = true;
                p.mode = match rest {
                    "path" => Mode::Path,
                    "monoidal" => Mode::Monoidal,
                    _ => return Err(syntax(no, col + 5, format!("unknown mode `{rest}`"))),
                };
            }
            "objects" => {
                for name in rest.split_whitespace() {
                    if !is_ident(name) {
                        return Err(syntax(no, col, format!("`{name}` is not a valid object name")));
                    }
                    if p.objects.iter().any(|o| o == name) {
                        return Err(ParseError::Duplicate { line: no, kind: "object", name: name.into() });
                    }
                    p.objects.push(name.to_string());
                }
            }
            "gen" | "eqgen" => {
                let (name, body) = split_decl(no, col, rest, ':')?;
                if p.gen_id(name).is_some() {
                    return Err(ParseError::Duplicate { line: no, kind: "generator", name: name.into() });
                }
                let (src, tgt) = body
                    .split_once("->")
                    .ok_or_else(|| syntax(no, col, "expected `source -> target`"))?;
                let source = word_from(&p.objects, src).map_err(|m| ParseError::Type { line: no, msg: m })?;
                let target = word_from(&p.objects, tgt).map_err(|m| ParseError::Type { line: no, msg: m })?;
                let equational = kw == "eqgen";
                p.gens.push(MorGen { name: name.to_string(), source, target, equational });
                if equational {
                    p.equational.push(name.to_string());
                }
            }
            "equational" => {
                for name in rest.split_whitespace() {
                    if !p.equational.iter().any(|e| e == name) {
                        p.equational.push(name.to_string());
                    }
                    if let Some(g) = p.gen_id(name) {
                        p.gens[g].equational = true;
                    }
                }
            }
            "rel" => {
                let (name, body) = split_decl(no, col, rest, ':')?;
                if p.rel_id(name).is_some() {
                    return Err(ParseError::Duplicate { line: no, kind: "relation", name: name.into() });
                }
                let (l, r) = body
                    .split_once("=>")
                    .ok_or_else(|| syntax(no, col, "expected `path => path`"))?;
                let ty = |m: String| ParseError::Type { line: no, msg: format!("relation `{name}`: {m}") };
                let lhs = path_from(&p, l).map_err(ty)?;
                let rhs = path_from(&p, r).map_err(ty)?;
                if lhs.source != rhs.source {
                    return Err(ty("sides have different sources".into()));
                }
                if lhs.target(&p) != rhs.target(&p) {
                    return Err(ty("sides have different targets".into()));
                }
                p.rels.push(Relation { name: name.to_string(), lhs, rhs });
            }
            "weight" => {
                let mut block = String::from(rest);
                while !block.contains('}') {
                    if i >= lines.len() {
                        return Err(syntax(no, col, "unterminated weight block"));
                    }
                    block.push(' ');
                    block.push_str(lines[i].text);
                    i += 1;
                }
                parse_weight(&mut p, no, &block)?;
            }
            _ => return Err(syntax(no, col, format!("unknown keyword `{kw}`"))),
        }
    }
    let rank = |e: &String| p.gen_id(e).unwrap_or(usize::MAX);
    let mut eq = p.equational.clone();
    eq.sort_by_key(rank);
    p.equational = eq;
    Ok(p)
}

fn split_decl(no: usize, col: usize, rest: &str, sep: char) -> Result<(&str, &str), ParseError> {
    let (name, body) = rest
        .split_once(sep)
        .ok_or_else(|| syntax(no, col, format!("expected `name {sep} ...`")))?;
    let name = name.trim();
    if !is_ident(name) {
        return Err(syntax(no, col, format!("`{name}` is not a valid name")));
    }
    Ok((name, body))
}

fn parse_weight(p: &mut Presentation, no: usize, block: &str) -> Result<(), ParseError> {
    let err = |m: String| syntax(no, 1, m);
    let open = block.find('{').ok_or_else(|| err("expected `{`".into()))?;
    let close = block.rfind('}').unwrap();
    let header: Vec<&str> = block[..open].split_whitespace().collect();
    let body = &block[open + 1..close];
    if !block[close + 1..].trim().is_empty() {
        return Err(err("text after `}`".into()));
    }
    let mut it = header.iter().copied().peekable();
    let which = it.next().ok_or_else(|| err("missing weight name".into()))?;
    if which != "omega1" && which != "omega2" {
        return Err(err(format!("unknown weight `{which}`; expected omega1 or omega2")));
    }
    let mut flavor = None;
    let mut opposite = false;
    let mut order = Order::Lex;
    let mut dim = None;
    while let Some(tok) = it.next() {
        match tok {
            "equational_vertical" => flavor = Some(Flavor::EquationalVertical),
            "equational_base" => flavor = Some(Flavor::EquationalBase),
            "opposite" => opposite = true,
            "on" => {
                let on = it.next().unwrap_or("");
                let want = if which == "omega1" { "steps" } else { "rels" };
                if on != want {
                    return Err(err(format!("{which} must be declared `on {want}`")));
                }
            }
            "order" => {
                order = match it.next() {
                    Some("lex") => Order::Lex,
                    Some("pointwise") => Order::Pointwise,
                    o => return Err(err(format!("unknown order `{}`", o.unwrap_or("")))),
                }
            }
            "dim" => {
                let d = it.next().and_then(|d| d.parse::<usize>().ok()).filter(|&d| d >= 1);
                dim = Some(d.ok_or_else(|| err("`dim` needs a positive integer".into()))?);
            }
            _ => return Err(err(format!("unexpected `{tok}` in weight header"))),
        }
    }
    if which == "omega1" && flavor.is_some() {
        return Err(err("cylinder flavours apply to omega2 only".into()));
    }
    let dim = dim.ok_or_else(|| err("missing `dim`".into()))?;
    let mut entries = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let (name, after) = rest.split_once("->").ok_or_else(|| err(format!("expected `name -> (...)` at `{rest}`")))?;
        let name = name.trim();
        let after = after.trim_start();
        if !after.starts_with('(') {
            return Err(err(format!("expected `(` after `{name} ->`")));
        }
        let mut depth = 0;
        let mut end = None;
        for (k, c) in after.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(k);
                        break;
                    }
                }
                _ => {}
            }
        }
        let end = end.ok_or_else(|| err(format!("unbalanced parentheses for `{name}`")))?;
        let terms: Vec<Term> = split_top(&after[1..end])
            .into_iter()
            .map(|t| parse_term(p, t).map_err(&err))
            .collect::<Result<_, _>>()?;
        if terms.len() != dim {
            return Err(err(format!("entry `{name}` has {} components, expected {dim}", terms.len())));
        }
        let known = if which == "omega1" {
            p.gen_id(name).is_some()
        } else {
            name == "exch" || p.rel_id(name).is_some()
        };
        if !known {
            return Err(ParseError::Type { line: no, msg: format!("weight entry `{name}` names nothing declared") });
        }
        if entries.iter().any(|(n, _): &(String, Vec<Term>)| n == name) {
            return Err(ParseError::Duplicate { line: no, kind: "weight entry", name: name.into() });
        }
        entries.push((name.to_string(), terms));
        rest = after[end + 1..].trim_start();
    }
    let spec = WeightSpec { dim, order, entries };
    let set: &mut WeightSet = if opposite { &mut p.weights.opposite } else { &mut p.weights.own };
    let slot = match (which, flavor) {
        ("omega1", _) => &mut set.omega1,
        (_, None) => &mut set.omega2,
        (_, Some(Flavor::EquationalVertical)) => &mut set.omega2_vertical,
        (_, Some(Flavor::EquationalBase)) => &mut set.omega2_base,
    };
    if slot.is_some() {
        return Err(ParseError::Duplicate { line: no, kind: "weight block", name: which.into() });
    }
    *slot = Some(spec);
    Ok(())
}

/// Splits on commas that are not nested in parentheses.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (k, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_term(p: &Presentation, s: &str) -> Result<Term, String> {
    let mut out = Vec::new();
    for part in s.split('+') {
        let part = part.trim();
        if let Ok(n) = part.parse::<u64>() {
            if n != 0 {
                out.push(Prim::Const(n));
            }
            continue;
        }
        let (head, args) = part
            .split_once('(')
            .and_then(|(h, a)| a.strip_suffix(')').map(|a| (h.trim(), a)))
            .ok_or_else(|| format!("cannot read weight term `{part}`"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        let sym = |k: usize| -> Result<ObjId, String> {
            let a = args.get(k).ok_or_else(|| format!("`{head}` is missing an argument"))?;
            p.object_id(a).ok_or_else(|| format!("unknown object `{a}` in weight term"))
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{head}` takes {n} argument(s)"))
            }
        };
        let prim = match head {
            "const" => {
                arity(1)?;
                Prim::Const(args[0].parse().map_err(|_| format!("bad constant `{}`", args[0]))?)
            }
            "countL" => {
                arity(1)?;
                Prim::CountL(sym(0)?)
            }
            "countR" => {
                arity(1)?;
                Prim::CountR(sym(0)?)
            }
            "count" => {
                arity(1)?;
                Prim::Count(sym(0)?)
            }
            "ctx_transp" => {
                arity(2)?;
                Prim::CtxTransp(sym(0)?, sym(1)?)
            }
            "transp" => {
                arity(2)?;
                Prim::Transp(sym(0)?, sym(1)?)
            }
            _ => return Err(format!("unknown weight primitive `{head}`")),
        };
        out.push(prim);
    }
    Ok(out)
}

fn show_prim(p: &Presentation, prim: &Prim) -> String {
    let o = |c: &ObjId| p.objects[*c as usize].as_str();
    match prim {
        Prim::Const(n) => n.to_string(),
        Prim::CountL(a) => format!("countL({})", o(a)),
        Prim::CountR(a) => format!("countR({})", o(a)),
        Prim::Count(a) => format!("count({})", o(a)),
        Prim::CtxTransp(b, a) => format!("ctx_transp({},{})", o(b), o(a)),
        Prim::Transp(b, a) => format!("transp({},{})", o(b), o(a)),
    }
}

pub fn show_term(p: &Presentation, t: &Term) -> String {
    if t.is_empty() {
        return "0".into();
    }
    t.iter().map(|x| show_prim(p, x)).collect::<Vec<_>>().join(" + ")
}

fn show_spec(p: &Presentation, out: &mut String, which: &str, qual: &str, spec: &WeightSpec) {
    let on = if which == "omega1" { "steps" } else { "rels" };
    let order = match spec.order {
        Order::Lex => "lex",
        Order::Pointwise => "pointwise",
    };
    let _ = writeln!(out, "weight {which}{qual} on {on} order {order} dim {} {{", spec.dim);
    for (name, terms) in &spec.entries {
        let ts: Vec<String> = terms.iter().map(|t| show_term(p, t)).collect();
        let _ = writeln!(out, "  {name} -> ({})", ts.join(", "));
    }
    out.push_str("}\n");
}

fn show_set(p: &Presentation, out: &mut String, set: &WeightSet, opposite: bool) {
    let o = if opposite { " opposite" } else { "" };
    if let Some(s) = &set.omega1 {
        show_spec(p, out, "omega1", o, s);
    }
    if let Some(s) = &set.omega2 {
        show_spec(p, out, "omega2", o, s);
    }
    if let Some(s) = &set.omega2_vertical {
        show_spec(p, out, "omega2", &format!(" equational_vertical{o}"), s);
    }
    if let Some(s) = &set.omega2_base {
        show_spec(p, out, "omega2", &format!(" equational_base{o}"), s);
    }
}

fn show_endpoint(p: &Presentation, w: &[ObjId]) -> String {
    if w.is_empty() {
        "0".into()
    } else {
        w.iter().map(|&c| p.objects[c as usize].as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Canonical text; `parse_presentation` of the result rebuilds `p`.
pub fn print_presentation(p: &Presentation) -> String {
    let mut out = String::new();
    let mode = match p.mode {
        Mode::Path => "path",
        Mode::Monoidal => "monoidal",
    };
    let _ = writeln!(out, "mode {mode}");
    if !p.objects.is_empty() {
        let _ = writeln!(out, "objects {}", p.objects.join(" "));
    }
    for g in &p.gens {
        let kw = if g.equational { "eqgen" } else { "gen" };
        let _ = writeln!(out, "{kw} {} : {} -> {}", g.name, show_endpoint(p, &g.source), show_endpoint(p, &g.target));
    }
    let extra: Vec<&String> = p.equational.iter().filter(|e| p.gen_id(e).is_none_or(|g: GenId| !p.gens[g].equational)).collect();
    if !extra.is_empty() {
        let _ = writeln!(out, "equational {}", extra.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
    }
    for r in &p.rels {
        let _ = writeln!(out, "rel {} : {} => {}", r.name, p.show_path(&r.lhs), p.show_path(&r.rhs));
    }
    show_set(p, &mut out, &p.weights.own, false);
    show_set(p, &mut out, &p.weights.opposite, true);
    out
}
