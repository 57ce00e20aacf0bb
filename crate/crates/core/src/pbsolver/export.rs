//! OPB and CPLEX LP writers, and an LP reader for binary models.

use std::fmt::Write as _;

use thiserror::Error;

use super::model::{Cmp, LinearConstraint, PbModel};

const LP_LINE: usize = 250;

/// Writes the model in OPB. Variables become `x1..xN` in id order; `<=`
/// rows are negated into `>=`. Maximization is written as minimizing the
/// negated objective.
pub fn export_opb(model: &PbModel) -> String {
    let cons: Vec<&LinearConstraint> = model.all_constraints().collect();
    let mut out = String::new();
    let _ = writeln!(out, "* #variable= {} #constraint= {}", model.num_vars(), cons.len());
    if !model.lazy_constraints().is_empty() {
        let _ = writeln!(out, "* includes {} constraints found by separation", model.lazy_constraints().len());
    }
    for (v, name) in model.names().iter().enumerate() {
        let _ = writeln!(out, "* x{} {}", v + 1, name);
    }
    let obj: Vec<(i64, usize)> =
        model.objective().iter().enumerate().filter(|(_, &w)| w != 0).map(|(v, &w)| (-w, v)).collect();
    if !obj.is_empty() {
        let _ = writeln!(out, "min: {} ;", opb_terms(&obj));
    }
    for c in cons {
        let (terms, cmp, rhs) = match c.cmp {
            Cmp::Le => (c.terms.iter().map(|&(a, v)| (-a, v)).collect(), ">=", -c.rhs),
            Cmp::Ge => (c.terms.clone(), ">=", c.rhs),
            Cmp::Eq => (c.terms.clone(), "=", c.rhs),
        };
        let _ = writeln!(out, "{} {} {} ;", opb_terms(&terms), cmp, rhs);
    }
    out
}

fn opb_terms(terms: &[(i64, usize)]) -> String {
    terms.iter().map(|&(a, v)| format!("{a:+} x{}", v + 1)).collect::<Vec<_>>().join(" ")
}

/// Writes the model in CPLEX LP with every variable declared binary, in id
/// order, so `parse_lp` rebuilds the same ids.
pub fn export_lp(model: &PbModel) -> String {
    let mut out = String::from("\\ binary maximization model\n");
    if !model.lazy_constraints().is_empty() {
        let _ = writeln!(out, "\\ includes {} constraints found by separation", model.lazy_constraints().len());
    }
    out.push_str("Maximize\n");
    let obj: Vec<(i64, usize)> =
        model.objective().iter().enumerate().filter(|(_, &w)| w != 0).map(|(v, &w)| (w, v)).collect();
    push_wrapped(&mut out, "obj:", &lp_terms(model, &obj), "");
    out.push_str("Subject To\n");
    for (i, c) in model.all_constraints().enumerate() {
        let cmp = match c.cmp {
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
            Cmp::Eq => "=",
        };
        push_wrapped(&mut out, &format!("c{i}:"), &lp_terms(model, &c.terms), &format!("{cmp} {}", c.rhs));
    }
    out.push_str("Binary\n");
    let names: Vec<String> = model.names().to_vec();
    push_wrapped(&mut out, "", &names, "");
    out.push_str("End\n");
    out
}

fn lp_terms(model: &PbModel, terms: &[(i64, usize)]) -> Vec<String> {
    if terms.is_empty() {
        return if model.num_vars() > 0 { vec![format!("0 {}", model.name(0))] } else { Vec::new() };
    }
    terms
        .iter()
        .enumerate()
        .map(|(i, &(a, v))| {
            let sign = if a < 0 { "-" } else if i == 0 { "" } else { "+" };
            let mag = a.abs();
            let coef = if mag == 1 { String::new() } else { format!("{mag} ") };
            let sep = if sign.is_empty() { "" } else { " " };
            format!("{sign}{sep}{coef}{}", model.name(v))
        })
        .collect()
}

fn push_wrapped(out: &mut String, head: &str, pieces: &[String], tail: &str) {
    let mut line = format!(" {head}");
    for p in pieces.iter().map(String::as_str).chain((!tail.is_empty()).then_some(tail)) {
        if line.len() + p.len() + 1 > LP_LINE && !line.trim().is_empty() {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        if !line.ends_with(' ') {
            line.push(' ');
        }
        line.push_str(p);
    }
    out.push_str(&line);
    out.push('\n');
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct LpParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Ident(String),
    Plus,
    Minus,
    Colon,
    Cmp(Cmp),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LpParseError> {
    let mut toks = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('\\').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        let err = |m: String| LpParseError { line: ln + 1, message: m };
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                // Integral decimals such as `3.0` are accepted.
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    let fs = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if chars[fs..i].iter().any(|&d| d != '0') {
                        return Err(err(format!("fractional coefficient {}", chars[start..i].iter().collect::<String>())));
                    }
                }
                let v = s.parse::<i64>().map_err(|e| err(format!("bad number {s}: {e}")))?;
                toks.push((ln + 1, Tok::Num(v)));
            } else if c.is_alphabetic() || "_!\"#$%&()/,.;?@'`{}|~[]".contains(c) {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || "_!\"#$%&()/,.;?@'`{}|~[]".contains(chars[i]))
                {
                    i += 1;
                }
                toks.push((ln + 1, Tok::Ident(chars[start..i].iter().collect())));
            } else {
                let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
                let (tok, len) = match (c, two.as_str()) {
                    (_, "<=") | (_, "=<") => (Tok::Cmp(Cmp::Le), 2),
                    (_, ">=") | (_, "=>") => (Tok::Cmp(Cmp::Ge), 2),
                    ('<', _) => (Tok::Cmp(Cmp::Le), 1),
                    ('>', _) => (Tok::Cmp(Cmp::Ge), 1),
                    ('=', _) => (Tok::Cmp(Cmp::Eq), 1),
                    ('+', _) => (Tok::Plus, 1),
                    ('-', _) => (Tok::Minus, 1),
                    (':', _) => (Tok::Colon, 1),
                    _ => return Err(err(format!("unexpected character {c:?}"))),
                };
                toks.push((ln + 1, tok));
                i += len;
            }
        }
    }
    Ok(toks)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Constraints,
    Binary,
    End,
}

fn section_keyword(toks: &[(usize, Tok)], i: usize) -> Option<(Section, usize, bool)> {
    let Tok::Ident(w) = &toks[i].1 else { return None };
    let next_is_colon = matches!(toks.get(i + 1), Some((_, Tok::Colon)));
    if next_is_colon {
        return None;
    }
    let lower = w.to_ascii_lowercase();
    let next = |j: usize| match toks.get(i + j) {
        Some((_, Tok::Ident(x))) => Some(x.to_ascii_lowercase()),
        _ => None,
    };
    match lower.as_str() {
        "maximize" | "maximise" | "maximum" | "max" => Some((Section::Objective, 1, true)),
        "minimize" | "minimise" | "minimum" | "min" => Some((Section::Objective, 1, false)),
        "subject" if next(1).as_deref() == Some("to") => Some((Section::Constraints, 2, true)),
        "such" if next(1).as_deref() == Some("that") => Some((Section::Constraints, 2, true)),
        "st" | "s.t." => Some((Section::Constraints, 1, true)),
        "binary" | "binaries" | "bin" => Some((Section::Binary, 1, true)),
        "end" => Some((Section::End, 1, true)),
        _ => None,
    }
}

type Row = (usize, Vec<(i64, String)>, Cmp, i64);

/// Parses an LP file whose variables are all declared binary. Variable ids
/// follow the order of the binary declarations; every row becomes an
/// explicit constraint.
pub fn parse_lp(text: &str) -> Result<PbModel, LpParseError> {
    let toks = lex(text)?;
    let mut section = Section::Start;
    let mut maximize = true;
    let mut objective: Vec<(i64, String)> = Vec::new();
    // (line, terms, comparator, rhs)
    let mut rows: Vec<Row> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        if let Some((s, len, flag)) = section_keyword(&toks, i) {
            if s == Section::Objective {
                maximize = flag;
            }
            section = s;
            i += len;
            continue;
        }
        let line = toks[i].0;
        let err = |m: &str| LpParseError { line, message: m.to_string() };
        match section {
            Section::Start => return Err(err("expected an objective section")),
            Section::End => return Err(err("content after End")),
            Section::Binary => {
                let Tok::Ident(name) = &toks[i].1 else { return Err(err("expected a variable name")) };
                binaries.push(name.clone());
                i += 1;
            }
            Section::Objective => {
                i = skip_label(&toks, i);
                let (terms, next) = parse_expr(&toks, i)?;
                objective.extend(terms);
                i = next;
            }
            Section::Constraints => {
                i = skip_label(&toks, i);
                let (terms, next) = parse_expr(&toks, i)?;
                let Some((_, Tok::Cmp(cmp))) = toks.get(next) else { return Err(err("expected a comparison")) };
                let mut j = next + 1;
                let mut sign = 1;
                if let Some((_, Tok::Minus)) = toks.get(j) {
                    sign = -1;
                    j += 1;
                } else if let Some((_, Tok::Plus)) = toks.get(j) {
                    j += 1;
                }
                let Some((_, Tok::Num(rhs))) = toks.get(j) else { return Err(err("expected a right-hand side")) };
                rows.push((line, terms, *cmp, sign * rhs));
                i = j + 1;
            }
        }
    }
    if section != Section::End {
        return Err(LpParseError { line: text.lines().count(), message: "missing End".into() });
    }
    let mut model = PbModel::new();
    for name in &binaries {
        if model.var(name).is_some() {
            return Err(LpParseError { line: 0, message: format!("variable {name} declared twice") });
        }
        model.add_var(name.clone(), 0);
    }
    let resolve = |model: &PbModel, line: usize, terms: Vec<(i64, String)>| {
        terms
            .into_iter()
            .map(|(a, name)| {
                model
                    .var(&name)
                    .map(|v| (a, v))
                    .ok_or_else(|| LpParseError { line, message: format!("variable {name} is not declared binary") })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let sign = if maximize { 1 } else { -1 };
    let mut obj = vec![0i64; model.num_vars()];
    for (a, v) in resolve(&model, 1, objective)? {
        obj[v] += sign * a;
    }
    for (v, w) in obj.into_iter().enumerate() {
        model.set_objective(v, w);
    }
    for (line, terms, cmp, rhs) in rows {
        let terms = resolve(&model, line, terms)?;
        model.add_constraint(LinearConstraint::new(terms, cmp, rhs));
    }
    Ok(model)
}

fn skip_label(toks: &[(usize, Tok)], i: usize) -> usize {
    match (toks.get(i), toks.get(i + 1)) {
        (Some((_, Tok::Ident(_))), Some((_, Tok::Colon))) => i + 2,
        _ => i,
    }
}

/// Reads `[sign] [coef] name` terms until a token that cannot continue the
/// expression.
fn parse_expr(toks: &[(usize, Tok)], mut i: usize) -> Result<(Vec<(i64, String)>, usize), LpParseError> {
    let mut terms = Vec::new();
    loop {
        if section_keyword(toks, i).is_some() || i >= toks.len() {
            return Ok((terms, i));
        }
        // A new labelled row starts here.
        if matches!(toks.get(i + 1), Some((_, Tok::Colon))) && !terms.is_empty() {
            return Ok((terms, i));
        }
        let line = toks[i].0;
        let mut sign = 1;
        let mut j = i;
        match &toks[j].1 {
            Tok::Plus => j += 1,
            Tok::Minus => {
                sign = -1;
                j += 1;
            }
            Tok::Cmp(_) => return Ok((terms, i)),
            _ if !terms.is_empty() => return Ok((terms, i)),
            _ => {}
        }
        let mut coef = 1;
        if let Some((_, Tok::Num(c))) = toks.get(j) {
            coef = *c;
            j += 1;
        }
        match toks.get(j) {
            Some((_, Tok::Ident(name))) => {
                terms.push((sign * coef, name.clone()));
                i = j + 1;
            }
            _ => return Err(LpParseError { line, message: "expected a variable".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PbModel {
        let mut m = PbModel::new();
        let a = m.add_var("s_e0", 3);
        let b = m.add_var("s_e1", -1);
        let c = m.add_var("x_f0", 0);
        m.add_constraint(LinearConstraint::le([(1, a), (2, b)], 2));
        m.add_constraint(LinearConstraint::ge([(-1, a), (1, c)], -1));
        m.add_constraint(LinearConstraint::eq([(1, b), (1, c)], 1));
        m.add_constraint(LinearConstraint::le([], 0));
        m
    }

    #[test]
    fn opb_layout() {
        let text = export_opb(&sample());
        assert!(text.starts_with("* #variable= 3 #constraint= 4\n"));
        assert!(text.contains("min: -3 x1 +1 x2 ;"));
        assert!(text.contains("-1 x1 -2 x2 >= -2 ;"));
        assert!(text.contains("+1 x2 +1 x3 = 1 ;"));
    }

    #[test]
    fn lp_round_trip() {
        let m = sample();
        let text = export_lp(&m);
        assert!(text.contains("Maximize\n obj: 3 s_e0 - s_e1\n"));
        let back = parse_lp(&text).unwrap();
        assert_eq!(back.structure(), m.structure());
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = PbModel::new();
        let vs: Vec<_> = (0..200).map(|i| m.add_var(format!("t_i0_u{i}_v{}", i + 1), 1)).collect();
        m.add_constraint(LinearConstraint::le(vs.iter().map(|&v| (1, v)), 7));
        let text = export_lp(&m);
        assert!(text.lines().all(|l| l.len() <= LP_LINE + 20));
        assert_eq!(parse_lp(&text).unwrap().structure(), m.structure());
    }

    #[test]
    fn minimize_and_errors() {
        let m = parse_lp("Minimize\n 2 x + y\nSubject To\n x + y >= 1\nBinaries\n x y\nEnd\n").unwrap();
        assert_eq!(m.objective(), &[-2, -1]);
        assert!(parse_lp("Maximize\n x\nSubject To\n x <= 1\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n 1.5 x\nBinary\n x\nEnd\n").is_err());
        assert!(parse_lp("Maximize\n x\nBinary\n x\n").is_err());
    }
}
