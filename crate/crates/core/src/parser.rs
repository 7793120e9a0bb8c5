//! Text syntax for polynomials and problem files.
//!
//! Polynomial grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := signed (('+' | '-') signed)*
//! signed  := '-' signed | '+' signed | product
//! product := power ('*' power)*
//! power   := atom ('^' INTEGER)?
//! atom    := INTEGER ('/' INTEGER)? | IDENT | '(' expr ')'
//! ```
//!
//! so `^` binds tighter than `*`, which binds tighter than unary minus.
//!
//! Problem files:
//!
//! ```text
//! vars: x y z w
//! mode: map          # or: matrix
//! f1 = ...           # f1..f4 in map mode, m11..m44 (row-major) in matrix mode
//! ```

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at position {position}")]
    UnknownVariable { position: usize, name: String },
    #[error("exponent at position {position} is not a nonnegative integer")]
    BadExponent { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownVariable { position, .. }
            | ParseError::BadExponent { position } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("line {line}: malformed header: {message}")]
    Header { line: usize, message: String },
    #[error("line {line}: {source}")]
    Expression {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("line {line}: malformed entry: {message}")]
    Entry { line: usize, message: String },
    #[error("duplicate variable '{0}'")]
    DuplicateVariable(String),
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Map,
    Matrix,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Map => "map",
            Mode::Matrix => "matrix",
        })
    }
}

/// A parsed problem: either the four components of a map `f` or the sixteen
/// entries (row-major) of a polynomial matrix `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub mode: Mode,
    pub ring: Arc<Ring>,
    pub entries: Vec<Polynomial>,
}

impl ProblemSpec {
    pub fn vars(&self) -> &[String] {
        self.ring.names()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i].1 == '.' {
                return Err(ParseError::Syntax {
                    position: chars[i].0,
                    message: "decimal numbers are not supported; use p/q".into(),
                });
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_' || chars[i].1 == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| *c).collect();
            out.push((pos, Tok::Ident(s)));
        } else {
            return Err(ParseError::Syntax { position: pos, message: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    ring: &'a Arc<Ring>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { position: self.pos(), message: message.into() }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.signed()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    let rhs = self.signed()?;
                    acc = &acc + &rhs;
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    let rhs = self.signed()?;
                    acc = &acc - &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.idx += 1;
                Ok(-&self.signed()?)
            }
            Some(Tok::Plus) => {
                self.idx += 1;
                self.signed()
            }
            _ => self.product(),
        }
    }

    fn product(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.power()?;
        while let Some(Tok::Star) = self.peek() {
            self.idx += 1;
            let rhs = self.power()?;
            acc = &acc * &rhs;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.idx += 1;
            let position = self.pos();
            let exp = match self.toks.get(self.idx) {
                Some((_, Tok::Int(n))) => n.clone(),
                _ => return Err(ParseError::BadExponent { position }),
            };
            self.idx += 1;
            if let Some(Tok::Slash) = self.peek() {
                return Err(ParseError::BadExponent { position });
            }
            let e: u32 = exp
                .try_into()
                .ok()
                .filter(|&e: &u32| e <= u16::MAX as u32)
                .ok_or(ParseError::BadExponent { position })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let position = self.pos();
        match self.toks.get(self.idx).cloned() {
            Some((_, Tok::Int(n))) => {
                self.idx += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.idx += 1;
                    let dpos = self.pos();
                    let d = match self.toks.get(self.idx) {
                        Some((_, Tok::Int(d))) => d.clone(),
                        _ => return Err(self.err("expected integer denominator after '/'")),
                    };
                    if d.is_zero() {
                        return Err(ParseError::Syntax { position: dpos, message: "zero denominator".into() });
                    }
                    self.idx += 1;
                    return Ok(Polynomial::constant(self.ring, BigRational::new(n, d)));
                }
                Ok(Polynomial::constant(self.ring, BigRational::from_integer(n)))
            }
            Some((_, Tok::Ident(name))) => {
                self.idx += 1;
                match self.ring.var_index(&name) {
                    Some(i) => Ok(Polynomial::var(self.ring, i)),
                    None => Err(ParseError::UnknownVariable { position, name }),
                }
            }
            Some((_, Tok::LParen)) => {
                self.idx += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.idx += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(_) => Err(self.err("expected a number, variable or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse `text` into the canonical expanded form over `ring`.
pub fn parse_polynomial(text: &str, ring: &Arc<Ring>) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, idx: 0, end: text.len(), ring };
    let p = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(parser.err("unexpected trailing input"));
    }
    Ok(p)
}

/// Render in the deterministic text form accepted by [`parse_polynomial`].
///
/// Terms appear in lex-descending order regardless of the ring's order, so
/// the output does not depend on how the polynomial was computed.
pub fn render_polynomial(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let names = p.ring().names();
    let mut terms: Vec<_> = p.terms().iter().collect();
    terms.sort_by(|a, b| MonomialOrder::Lex.cmp(&b.0, &a.0));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        if k == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        let abs = c.abs();
        let mono = render_monomial(m, names);
        match (abs.is_one(), mono.is_empty()) {
            (_, true) => out.push_str(&abs.to_string()),
            (true, false) => out.push_str(&mono),
            (false, false) => {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
    }
    out
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        match m.exponent(i) {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Parse a problem file.
pub fn parse_problem(file_text: &str) -> Result<ProblemSpec, ProblemError> {
    let mut lines = file_text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, vars_line) = lines
        .next()
        .ok_or(ProblemError::Header { line: 1, message: "missing 'vars:' line".into() })?;
    let vars_rest = vars_line
        .strip_prefix("vars:")
        .ok_or_else(|| ProblemError::Header { line, message: "expected 'vars: <4 names>'".into() })?;
    let names: Vec<&str> = vars_rest.split_whitespace().collect();
    if names.len() != 4 {
        return Err(ProblemError::Header {
            line,
            message: format!("expected exactly 4 variables, found {}", names.len()),
        });
    }
    let mut seen = HashSet::new();
    for n in &names {
        if !is_identifier(n) {
            return Err(ProblemError::Header { line, message: format!("invalid variable name '{n}'") });
        }
        if !seen.insert(*n) {
            return Err(ProblemError::DuplicateVariable(n.to_string()));
        }
    }
    let ring = Ring::new(&names, MonomialOrder::DegRevLex);

    let (line, mode_line) = lines
        .next()
        .ok_or(ProblemError::Header { line: line + 1, message: "missing 'mode:' line".into() })?;
    let mode = match mode_line.strip_prefix("mode:").map(str::trim) {
        Some("map") => Mode::Map,
        Some("matrix") => Mode::Matrix,
        _ => {
            return Err(ProblemError::Header { line, message: "expected 'mode: map' or 'mode: matrix'".into() })
        }
    };

    let labels: Vec<String> = match mode {
        Mode::Map => (1..=4).map(|i| format!("f{i}")).collect(),
        Mode::Matrix => (1..=4).flat_map(|i| (1..=4).map(move |j| format!("m{i}{j}"))).collect(),
    };
    let mut slots: Vec<Option<Polynomial>> = vec![None; labels.len()];
    let mut found = 0;
    for (line, text) in lines {
        let (label, expr) = text
            .split_once('=')
            .ok_or_else(|| ProblemError::Entry { line, message: "expected '<label> = <expression>'".into() })?;
        let label = label.trim();
        let slot = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| ProblemError::Entry { line, message: format!("unexpected label '{label}'") })?;
        if slots[slot].is_some() {
            return Err(ProblemError::Entry { line, message: format!("label '{label}' given twice") });
        }
        let offset = text.len() - text[text.find('=').unwrap() + 1..].len();
        let poly = parse_polynomial(expr, &ring).map_err(|e| ProblemError::Expression {
            line,
            source: shift_position(e, offset),
        })?;
        slots[slot] = Some(poly);
        found += 1;
    }
    if found != labels.len() {
        return Err(ProblemError::EntryCount { expected: labels.len(), found });
    }
    Ok(ProblemSpec { mode, ring, entries: slots.into_iter().map(|s| s.expect("all slots filled")).collect() })
}

fn shift_position(e: ParseError, offset: usize) -> ParseError {
    match e {
        ParseError::Syntax { position, message } => ParseError::Syntax { position: position + offset, message },
        ParseError::UnknownVariable { position, name } => {
            ParseError::UnknownVariable { position: position + offset, name }
        }
        ParseError::BadExponent { position } => ParseError::BadExponent { position: position + offset },
    }
}

/// Render a problem back to file form.
pub fn render_problem(spec: &ProblemSpec) -> String {
    let mut out = format!("vars: {}\nmode: {}\n", spec.vars().join(" "), spec.mode);
    match spec.mode {
        Mode::Map => {
            for (i, e) in spec.entries.iter().enumerate() {
                out.push_str(&format!("f{} = {}\n", i + 1, render_polynomial(e)));
            }
        }
        Mode::Matrix => {
            for (k, e) in spec.entries.iter().enumerate() {
                out.push_str(&format!("m{}{} = {}\n", k / 4 + 1, k % 4 + 1, render_polynomial(e)));
            }
        }
    }
    out
}

/// Parse a comma-separated rational point such as `0,1/2,-3,0`.
pub fn parse_point(text: &str) -> Result<Vec<BigRational>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in text.split(',') {
        let ring = Ring::new::<&str>(&[], MonomialOrder::DegRevLex);
        let p = parse_polynomial(part, &ring).map_err(|e| shift_position(e, offset))?;
        out.push(p.constant_coefficient());
        offset += part.len() + 1;
    }
    Ok(out)
}

/// `p/q` or `p` for integers.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{ratio, MAX_VARS};
    use proptest::prelude::*;

    fn ring() -> Arc<Ring> {
        Ring::xyzw()
    }

    #[test]
    fn parses_first_component_of_example_map() {
        let p = parse_polynomial("x - 2*y^2 + z*w", &ring()).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.coefficient(&Monomial::from_exponents(&[0, 2, 0, 0])), ratio(-2, 1));
        assert_eq!(render_polynomial(&p), "x - 2*y^2 + z*w");
    }

    #[test]
    fn zero_parses_to_empty() {
        let p = parse_polynomial("0", &ring()).unwrap();
        assert!(p.is_zero());
        assert_eq!(render_polynomial(&p), "0");
    }

    #[test]
    fn expands_products() {
        let p = parse_polynomial("(1-x)*(1-z)*x + y*z*w", &ring()).unwrap();
        let q = parse_polynomial("x - x^2 - x*z + x^2*z + y*z*w", &ring()).unwrap();
        assert_eq!(p, q);
        assert_eq!(p.num_terms(), 5);
    }

    #[test]
    fn renders_rational_coefficients() {
        let p = parse_polynomial("3/2*x", &ring()).unwrap();
        assert_eq!(render_polynomial(&p), "3/2*x");
        let q = parse_polynomial("-x^2 - 1/3", &ring()).unwrap();
        assert_eq!(render_polynomial(&q), "-x^2 - 1/3");
    }

    #[test]
    fn precedence() {
        let r = ring();
        assert_eq!(parse_polynomial("-x^2", &r).unwrap(), parse_polynomial("-(x^2)", &r).unwrap());
        assert_eq!(parse_polynomial("2*x^2*y", &r).unwrap(), parse_polynomial("2*(x^2)*y", &r).unwrap());
        assert_eq!(parse_polynomial("x - y - z", &r).unwrap(), parse_polynomial("x - (y + z)", &r).unwrap());
        assert_eq!(parse_polynomial("--x", &r).unwrap(), parse_polynomial("x", &r).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let r = ring();
        assert_eq!(
            parse_polynomial("x + q", &r),
            Err(ParseError::UnknownVariable { position: 4, name: "q".into() })
        );
        assert_eq!(parse_polynomial("x^-1", &r), Err(ParseError::BadExponent { position: 2 }));
        assert_eq!(parse_polynomial("x^y", &r), Err(ParseError::BadExponent { position: 2 }));
        assert_eq!(parse_polynomial("x^1/2", &r), Err(ParseError::BadExponent { position: 2 }));
        assert!(matches!(parse_polynomial("x +", &r), Err(ParseError::Syntax { position: 3, .. })));
        assert!(matches!(parse_polynomial("(x + y", &r), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("x y", &r), Err(ParseError::Syntax { position: 2, .. })));
        assert!(matches!(parse_polynomial("1.5*x", &r), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("1/0", &r), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_polynomial("", &r), Err(ParseError::Syntax { .. })));
    }

    const F_PLUS: &str = "\
# f_+ from the examples
vars: x y z w
mode: map
f1 = x
f2 = y

f3 = z^2 - w^2 + x*z + y*w
f4 = z*w
";

    #[test]
    fn parses_map_problem() {
        let spec = parse_problem(F_PLUS).unwrap();
        assert_eq!(spec.mode, Mode::Map);
        assert_eq!(spec.entries.len(), 4);
        assert_eq!(render_polynomial(&spec.entries[2]), "x*z + y*w + z^2 - w^2");
    }

    fn nonfinite_matrix_text(skip_last: bool) -> String {
        let entries = [
            "x", "y", "z", "0", "z^3", "w", "0", "0", "0", "0", "1-x", "y", "w", "0", "0", "1-z",
        ];
        let mut s = String::from("vars: x y z w\nmode: matrix\n");
        let n = if skip_last { 15 } else { 16 };
        for (k, e) in entries.iter().enumerate().take(n) {
            s.push_str(&format!("m{}{} = {}\n", k / 4 + 1, k % 4 + 1, e));
        }
        s
    }

    #[test]
    fn parses_matrix_problem() {
        let spec = parse_problem(&nonfinite_matrix_text(false)).unwrap();
        assert_eq!(spec.mode, Mode::Matrix);
        assert_eq!(spec.entries.len(), 16);
        assert_eq!(render_polynomial(&spec.entries[10]), "-x + 1");
    }

    #[test]
    fn rejects_short_matrix() {
        let err = parse_problem(&nonfinite_matrix_text(true)).unwrap_err();
        assert_eq!(err, ProblemError::EntryCount { expected: 16, found: 15 });
        assert_eq!(err.to_string(), "expected 16 entries, found 15");
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(parse_problem("vars: x y z\nmode: map\n"), Err(ProblemError::Header { .. })));
        assert_eq!(
            parse_problem("vars: x y x w\nmode: map\n"),
            Err(ProblemError::DuplicateVariable("x".into()))
        );
        assert!(matches!(parse_problem("vars: a b c d\nmode: tensor\n"), Err(ProblemError::Header { line: 2, .. })));
        assert!(matches!(
            parse_problem("vars: a b c d\nmode: map\nf1 = a\nf1 = b\n"),
            Err(ProblemError::Entry { line: 4, .. })
        ));
        assert!(matches!(
            parse_problem("vars: a b c d\nmode: map\nf1 = a + x\n"),
            Err(ProblemError::Expression { line: 3, source: ParseError::UnknownVariable { .. } })
        ));
    }

    #[test]
    fn free_form_variable_names() {
        let spec = parse_problem("vars: u v s t\nmode: map\nf1=u\nf2=v\nf3=s*t\nf4=t^2\n").unwrap();
        assert_eq!(render_polynomial(&spec.entries[2]), "s*t");
        let again = parse_problem(&render_problem(&spec)).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn point_parsing() {
        let p = parse_point("0, 1/2,-3,0").unwrap();
        assert_eq!(p, vec![ratio(0, 1), ratio(1, 2), ratio(-3, 1), ratio(0, 1)]);
        assert!(parse_point("0,a,0,0").is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(((0u16..4, 0u16..4, 0u16..4, 0u16..4), -20i64..21, 1i64..9), 0..8).prop_map(
            |ts| {
                Polynomial::from_terms(
                    &Ring::xyzw(),
                    ts.into_iter().map(|((a, b, c, d), n, den)| {
                        (Monomial::from_exponents(&[a, b, c, d]), ratio(n, den))
                    }),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(p in arb_poly()) {
            let text = render_polynomial(&p);
            prop_assert_eq!(parse_polynomial(&text, &Ring::xyzw()).unwrap(), p);
        }
    }

    #[test]
    fn max_vars_is_enough_for_doubled_ring() {
        assert!(ring().doubled().nvars() <= MAX_VARS);
    }
}
