//! A small integer linear program representation and its LP-format text
//! encoding (the CPLEX-style `Minimize / Subject To / Binaries / End` layout
//! understood by most MIP solvers).

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Eq,
    Le,
    Ge,
}

impl Comparator {
    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Comparator::Eq => lhs == rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "=",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// `(variable index, coefficient)` pairs, each variable at most once.
    pub terms: Vec<(usize, i64)>,
    pub cmp: Comparator,
    pub rhs: i64,
}

impl Constraint {
    pub fn lhs(&self, values: &[bool]) -> i64 {
        self.terms
            .iter()
            .filter(|(v, _)| values[*v])
            .map(|(_, c)| c)
            .sum()
    }
}

/// A pure binary program with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub var_names: Vec<String>,
    /// Dense objective, one coefficient per variable.
    pub objective: Vec<i64>,
    pub constraints: Vec<Constraint>,
}

const TERMS_PER_LINE: usize = 12;

fn write_expr(out: &mut String, terms: impl Iterator<Item = (usize, i64)>, names: &[String]) {
    for (k, (v, c)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0 { "-" } else { "+" };
        let mag = c.unsigned_abs();
        if k == 0 {
            if c < 0 {
                out.push_str(" -");
            }
        } else {
            let _ = write!(out, " {sign}");
        }
        if mag == 1 {
            let _ = write!(out, " {}", names[v]);
        } else {
            let _ = write!(out, " {mag} {}", names[v]);
        }
    }
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn objective_value(&self, values: &[bool]) -> i64 {
        self.objective
            .iter()
            .zip(values)
            .filter(|(_, &x)| x)
            .map(|(c, _)| c)
            .sum()
    }

    /// First constraint violated by the assignment, if any.
    pub fn first_violation(&self, values: &[bool]) -> Option<&Constraint> {
        self.constraints
            .iter()
            .find(|c| !c.cmp.holds(c.lhs(values), c.rhs))
    }

    /// Writes the program in LP format. Output is deterministic.
    pub fn to_lp_string(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "\\ {line}");
        }
        out.push_str(match self.sense {
            Sense::Minimize => "Minimize\n",
            Sense::Maximize => "Maximize\n",
        });
        out.push_str(" obj:");
        write_expr(
            &mut out,
            self.objective
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(v, &c)| (v, c)),
            &self.var_names,
        );
        out.push_str("\nSubject To\n");
        for c in &self.constraints {
            let _ = write!(out, " {}:", c.name);
            write_expr(&mut out, c.terms.iter().copied(), &self.var_names);
            let _ = writeln!(out, " {} {}", c.cmp, c.rhs);
        }
        out.push_str("Binaries\n");
        for chunk in self.var_names.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
        out.push_str("End\n");
        out
    }

    /// Parses LP text of the shape produced by [`LinearProgram::to_lp_string`]:
    /// one objective, linear constraints, and a `Binaries` section listing
    /// every variable. Variable order follows the `Binaries` section.
    pub fn parse_lp(text: &str) -> Result<Self> {
        Parser::default().parse(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Objective,
    Constraints,
    Bounds,
    Binaries,
    End,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Name(String),
    Label(String),
    Number(f64),
    Plus,
    Minus,
    Cmp(Comparator),
}

struct RawRow {
    line: usize,
    name: Option<String>,
    terms: Vec<(String, i64)>,
    cmp: Option<Comparator>,
    rhs: Option<i64>,
}

#[derive(Default)]
struct Parser {
    sense: Option<Sense>,
    objective: Option<RawRow>,
    rows: Vec<RawRow>,
    binaries: Vec<(usize, String)>,
}

fn section_header(line: &str) -> Option<Section> {
    let lower = line.trim().to_ascii_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    match words.as_slice() {
        ["minimize" | "minimise" | "minimum" | "min"] => Some(Section::Objective),
        ["maximize" | "maximise" | "maximum" | "max"] => Some(Section::Objective),
        ["subject", "to"] | ["such", "that"] | ["st"] | ["s.t."] => Some(Section::Constraints),
        ["bounds" | "bound"] => Some(Section::Bounds),
        ["binaries" | "binary" | "bin"] => Some(Section::Binaries),
        ["end"] => Some(Section::End),
        _ => None,
    }
}

fn lp_err(line: usize, msg: impl Into<String>) -> Error {
    Error::LpParse {
        line,
        msg: msg.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            _ if c.is_whitespace() => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '<' | '>' | '=' => {
                let mut op = String::from(c);
                if i + 1 < chars.len() && matches!(chars[i + 1], '<' | '>' | '=') {
                    op.push(chars[i + 1]);
                    i += 1;
                }
                i += 1;
                let cmp = match op.as_str() {
                    "=" | "==" => Comparator::Eq,
                    "<" | "<=" | "=<" => Comparator::Le,
                    ">" | ">=" | "=>" => Comparator::Ge,
                    _ => return Err(lp_err(line_no, format!("bad operator {op:?}"))),
                };
                tokens.push(Token::Cmp(cmp));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || ((chars[i] == 'e' || chars[i] == 'E')
                            && i + 1 < chars.len()
                            && (chars[i + 1].is_ascii_digit()
                                || chars[i + 1] == '+'
                                || chars[i + 1] == '-'))
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|_| lp_err(line_no, format!("bad number {s:?}")))?;
                tokens.push(Token::Number(v));
            }
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !matches!(chars[i], '+' | '-' | '<' | '>' | '=' | ':')
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == ':' {
                    i += 1;
                    tokens.push(Token::Label(s));
                } else if s.is_empty() {
                    return Err(lp_err(line_no, format!("unexpected character {c:?}")));
                } else {
                    tokens.push(Token::Name(s));
                }
            }
        }
    }
    Ok(tokens)
}

fn to_int(line: usize, v: f64) -> Result<i64> {
    if v.fract() != 0.0 || !v.is_finite() {
        return Err(lp_err(line, format!("non-integer coefficient {v}")));
    }
    Ok(v as i64)
}

impl Parser {
    fn parse(mut self, text: &str) -> Result<LinearProgram> {
        let mut section = Section::None;
        let mut current: Option<RawRow> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('\\').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            if let Some(next) = section_header(line) {
                self.finish_row(&mut current, section)?;
                if next == Section::Objective {
                    if self.sense.is_some() {
                        return Err(lp_err(line_no, "more than one objective section"));
                    }
                    let lower = line.trim().to_ascii_lowercase();
                    self.sense = Some(if lower.starts_with("min") {
                        Sense::Minimize
                    } else {
                        Sense::Maximize
                    });
                }
                section = next;
                continue;
            }
            match section {
                Section::None => return Err(lp_err(line_no, "content before objective section")),
                Section::End => return Err(lp_err(line_no, "content after End")),
                Section::Bounds => return Err(lp_err(line_no, "Bounds section is not supported")),
                Section::Binaries => {
                    for name in line.split_whitespace() {
                        self.binaries.push((line_no, name.to_string()));
                    }
                }
                Section::Objective | Section::Constraints => {
                    for tok in tokenize(line_no, line)? {
                        self.feed(&mut current, section, line_no, tok)?;
                    }
                }
            }
        }
        self.finish_row(&mut current, section)?;
        if section != Section::End {
            return Err(lp_err(text.lines().count(), "missing End"));
        }
        self.build()
    }

    fn feed(
        &mut self,
        current: &mut Option<RawRow>,
        section: Section,
        line: usize,
        tok: Token,
    ) -> Result<()> {
        // a constraint ends once its right-hand side is read
        if section == Section::Constraints {
            if let Some(row) = current.as_ref() {
                if row.rhs.is_some() {
                    self.finish_row(current, section)?;
                }
            }
        }
        let row = current.get_or_insert_with(|| RawRow {
            line,
            name: None,
            terms: Vec::new(),
            cmp: None,
            rhs: None,
        });
        match tok {
            Token::Label(name) => {
                if row.name.is_some() || !row.terms.is_empty() {
                    return Err(lp_err(line, format!("unexpected label {name:?}")));
                }
                row.name = Some(name);
            }
            Token::Cmp(cmp) => {
                let dangling = row.terms.last().is_some_and(|(n, _)| n.is_empty());
                if section != Section::Constraints || row.cmp.is_some() || dangling {
                    return Err(lp_err(line, "unexpected comparator"));
                }
                row.cmp = Some(cmp);
            }
            Token::Plus | Token::Minus | Token::Number(_) | Token::Name(_) => {
                Self::push_term_token(row, line, tok)?;
            }
        }
        Ok(())
    }

    fn push_term_token(row: &mut RawRow, line: usize, tok: Token) -> Result<()> {
        // pending sign/coefficient are encoded as a trailing ("", coef) term
        let pending = matches!(row.terms.last(), Some((name, _)) if name.is_empty());
        if row.cmp.is_some() {
            // right-hand side: optional sign then number
            match tok {
                Token::Minus if row.rhs.is_none() && !pending => {
                    row.terms.push((String::new(), -1));
                }
                Token::Plus if row.rhs.is_none() && !pending => {
                    row.terms.push((String::new(), 1));
                }
                Token::Number(v) if row.rhs.is_none() => {
                    let sign = if pending {
                        row.terms.pop().unwrap().1
                    } else {
                        1
                    };
                    row.rhs = Some(sign * to_int(line, v)?);
                }
                _ => return Err(lp_err(line, "malformed right-hand side")),
            }
            return Ok(());
        }
        match tok {
            Token::Plus | Token::Minus => {
                let s = if tok == Token::Minus { -1 } else { 1 };
                if pending {
                    let last = row.terms.last_mut().unwrap();
                    last.1 *= s;
                } else {
                    row.terms.push((String::new(), s));
                }
            }
            Token::Number(v) => {
                let c = to_int(line, v)?;
                if pending {
                    let last = row.terms.last_mut().unwrap();
                    if last.1.abs() != 1 {
                        return Err(lp_err(line, "two consecutive coefficients"));
                    }
                    last.1 *= c;
                } else {
                    if !row.terms.is_empty() {
                        return Err(lp_err(line, "missing operator between terms"));
                    }
                    row.terms.push((String::new(), c));
                }
            }
            Token::Name(name) => {
                if pending {
                    row.terms.last_mut().unwrap().0 = name;
                } else {
                    if !row.terms.is_empty() {
                        return Err(lp_err(line, "missing operator between terms"));
                    }
                    row.terms.push((name, 1));
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn finish_row(&mut self, current: &mut Option<RawRow>, section: Section) -> Result<()> {
        let Some(row) = current.take() else {
            return Ok(());
        };
        if row.terms.iter().any(|(n, _)| n.is_empty()) {
            return Err(lp_err(row.line, "dangling coefficient or sign"));
        }
        match section {
            Section::Objective => {
                if self.objective.is_some() {
                    return Err(lp_err(row.line, "more than one objective"));
                }
                self.objective = Some(row);
            }
            Section::Constraints => {
                if row.cmp.is_none() || row.rhs.is_none() {
                    return Err(lp_err(row.line, "incomplete constraint"));
                }
                self.rows.push(row);
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn build(self) -> Result<LinearProgram> {
        let sense = self
            .sense
            .ok_or_else(|| lp_err(1, "no objective section"))?;
        let mut index = HashMap::new();
        let mut var_names = Vec::with_capacity(self.binaries.len());
        for (line, name) in self.binaries {
            if index.insert(name.clone(), var_names.len()).is_some() {
                return Err(lp_err(line, format!("variable {name:?} declared twice")));
            }
            var_names.push(name);
        }
        let resolve = |row: &RawRow| -> Result<Vec<(usize, i64)>> {
            let mut terms: Vec<(usize, i64)> = Vec::with_capacity(row.terms.len());
            for (name, c) in &row.terms {
                let v = *index.get(name).ok_or_else(|| {
                    lp_err(
                        row.line,
                        format!("variable {name:?} is not declared binary"),
                    )
                })?;
                if let Some(t) = terms.iter_mut().find(|(u, _)| *u == v) {
                    t.1 += c;
                } else {
                    terms.push((v, *c));
                }
            }
            Ok(terms)
        };
        let mut objective = vec![0; var_names.len()];
        if let Some(row) = &self.objective {
            for (v, c) in resolve(row)? {
                objective[v] += c;
            }
        }
        let mut constraints = Vec::with_capacity(self.rows.len());
        for (k, row) in self.rows.iter().enumerate() {
            constraints.push(Constraint {
                name: row.name.clone().unwrap_or_else(|| format!("R{}", k + 1)),
                terms: resolve(row)?,
                cmp: row.cmp.unwrap(),
                rhs: row.rhs.unwrap(),
            });
        }
        Ok(LinearProgram {
            sense,
            var_names,
            objective,
            constraints,
        })
    }
}
