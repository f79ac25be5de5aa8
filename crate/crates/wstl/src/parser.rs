//! Text grammar for weighted formulae, with spanned errors and a canonical
//! round-trip printer.
//!
//! ```text
//! formula   := chain
//! chain     := unary ( ("&&" | "||") wlist? unary )*
//! unary     := "!" unary | ("G" | "F") interval wspec? unary | atom
//! atom      := "TRUE" | "FALSE" | "(" formula ")" | predicate
//! predicate := affine (">=" | "<=" | ">" | "<") number pmode?
//! pmode     := "{" ("bool" number | "scale" number) "}"
//! affine    := ["-"] term ( ("+" | "-") term )*
//! term      := number [ "*" ident ] | ident
//! interval  := "[" int "," int "]"
//! wlist     := "[" number ("," number)* "]"
//! wspec     := "{" ("const" number | "disc" number | "vec" wlist
//!                  | "gauss" number ("(" number "," number "," number ")")+ ) "}"
//! ```
//!
//! All `&&` (or all `||`) at one level form a single n-ary node carrying one
//! shared weight list; `&&` and `||` may not mix without parentheses. `!`
//! applies to the whole temporal formula that follows it. Predicates are
//! rearranged to the `l(S(t)) >= 0` form, so `<=` and `<` negate the affine
//! part; strict and non-strict comparisons are not distinguished beyond
//! that. `#` starts a comment running to the end of the line.

use crate::formula::{AffineExpr, Formula, PredicateMode};
use crate::signal::TimeInterval;
use crate::weights::{GaussTerm, WeightDomain, WeightFn};

/// Byte range plus 1-based line/column of where it starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedToken,
    BadWeight,
    BadInterval,
    BadPredicate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.span.line, self.span.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Star,
    Plus,
    Minus,
    Bang,
    AndAnd,
    OrOr,
    Ge,
    Le,
    Gt,
    Lt,
    True,
    False,
    Always,
    Eventually,
    Ident(String),
    Number(f64),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("`{name}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            Tok::True => "`TRUE`".to_string(),
            Tok::False => "`FALSE`".to_string(),
            Tok::Always => "`G`".to_string(),
            Tok::Eventually => "`F`".to_string(),
            Tok::LParen => "`(`".to_string(),
            Tok::RParen => "`)`".to_string(),
            Tok::LBracket => "`[`".to_string(),
            Tok::RBracket => "`]`".to_string(),
            Tok::LBrace => "`{`".to_string(),
            Tok::RBrace => "`}`".to_string(),
            Tok::Comma => "`,`".to_string(),
            Tok::Star => "`*`".to_string(),
            Tok::Plus => "`+`".to_string(),
            Tok::Minus => "`-`".to_string(),
            Tok::Bang => "`!`".to_string(),
            Tok::AndAnd => "`&&`".to_string(),
            Tok::OrOr => "`||`".to_string(),
            Tok::Ge => "`>=`".to_string(),
            Tok::Le => "`<=`".to_string(),
            Tok::Gt => "`>`".to_string(),
            Tok::Lt => "`<`".to_string(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut line_start = 0;

    let span_at = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        start,
        end,
        line,
        column: text[line_start..start].chars().count() + 1,
    };

    while i < bytes.len() {
        let c = text[i..].chars().next().unwrap();
        if c == '\n' {
            line += 1;
            i += 1;
            line_start = i;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '!' => Some(Tok::Bang),
            _ => None,
        };
        if let Some(tok) = tok {
            i += 1;
            tokens.push((tok, span_at(start, i, line, line_start)));
            continue;
        }
        match c {
            '&' | '|' => {
                let pair = if c == '&' { Tok::AndAnd } else { Tok::OrOr };
                if bytes.get(i + 1) == Some(&(c as u8)) {
                    i += 2;
                    tokens.push((pair, span_at(start, i, line, line_start)));
                } else {
                    return Err(ParseError {
                        span: span_at(start, i + 1, line, line_start),
                        kind: ParseErrorKind::UnexpectedToken,
                        message: format!("expected `{c}{c}`, found a single `{c}`"),
                    });
                }
            }
            '>' | '<' => {
                let eq = bytes.get(i + 1) == Some(&b'=');
                let tok = match (c, eq) {
                    ('>', true) => Tok::Ge,
                    ('>', false) => Tok::Gt,
                    ('<', true) => Tok::Le,
                    ('<', false) => Tok::Lt,
                    _ => unreachable!(),
                };
                i += if eq { 2 } else { 1 };
                tokens.push((tok, span_at(start, i, line, line_start)));
            }
            '0'..='9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let span = span_at(start, i, line, line_start);
                let value: f64 = text[start..i].parse().map_err(|_| ParseError {
                    span,
                    kind: ParseErrorKind::UnexpectedToken,
                    message: format!("cannot parse number `{}`", &text[start..i]),
                })?;
                tokens.push((Tok::Number(value), span));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = i;
                for ch in text[i..].chars() {
                    if ch.is_alphanumeric() || ch == '_' {
                        end += ch.len_utf8();
                    } else {
                        break;
                    }
                }
                let word = &text[i..end];
                i = end;
                let tok = match word {
                    "TRUE" => Tok::True,
                    "FALSE" => Tok::False,
                    "G" => Tok::Always,
                    "F" => Tok::Eventually,
                    _ => Tok::Ident(word.to_string()),
                };
                tokens.push((tok, span_at(start, i, line, line_start)));
            }
            other => {
                return Err(ParseError {
                    span: span_at(start, i + other.len_utf8(), line, line_start),
                    kind: ParseErrorKind::UnexpectedToken,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    tokens.push((
        Tok::Eof,
        span_at(bytes.len(), bytes.len(), line, line_start),
    ));
    Ok(tokens)
}

/// Parses a formula; weights default to the constant 1 when omitted.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.chain()?;
    let (tok, span) = parser.peek().clone();
    if tok != Tok::Eof {
        return Err(ParseError {
            span,
            kind: ParseErrorKind::UnexpectedToken,
            message: format!("expected end of input, found {}", tok.describe()),
        });
    }
    Ok(formula)
}

struct Parser {
    tokens: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, SourceSpan) {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> (Tok, SourceSpan) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, span: SourceSpan, kind: ParseErrorKind, message: String) -> ParseError {
        ParseError { span, kind, message }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let (tok, span) = self.peek();
        self.err(
            *span,
            ParseErrorKind::UnexpectedToken,
            format!("expected {expected}, found {}", tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<SourceSpan, ParseError> {
        if self.peek().0 == tok {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn chain(&mut self) -> Result<Formula, ParseError> {
        let first = self.unary()?;
        let mut operands = vec![first];
        let mut is_or: Option<bool> = None;
        let mut weights: Option<(Vec<f64>, SourceSpan)> = None;

        loop {
            let or = match self.peek().0 {
                Tok::AndAnd => false,
                Tok::OrOr => true,
                _ => break,
            };
            let (_, op_span) = self.advance();
            match is_or {
                None => is_or = Some(or),
                Some(prev) if prev != or => {
                    return Err(self.err(
                        op_span,
                        ParseErrorKind::UnexpectedToken,
                        "cannot mix `&&` and `||` at the same level; add parentheses"
                            .to_string(),
                    ));
                }
                _ => {}
            }
            if self.peek().0 == Tok::LBracket {
                let (list, span) = self.weight_list()?;
                if weights.is_some() {
                    return Err(self.err(
                        span,
                        ParseErrorKind::BadWeight,
                        "a `&&`/`||` chain takes a single weight list".to_string(),
                    ));
                }
                weights = Some((list, span));
            }
            operands.push(self.unary()?);
        }

        if operands.len() == 1 {
            return Ok(operands.pop().unwrap());
        }
        let weights = match weights {
            None => WeightFn::unit(),
            Some((list, span)) => {
                if list.len() != operands.len() {
                    return Err(self.err(
                        span,
                        ParseErrorKind::BadWeight,
                        format!(
                            "weight list has {} entries but the chain has {} operands",
                            list.len(),
                            operands.len()
                        ),
                    ));
                }
                WeightFn::Explicit(list)
            }
        };
        Ok(if is_or == Some(true) {
            Formula::Or { subs: operands, weights }
        } else {
            Formula::And { subs: operands, weights }
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().0 {
            Tok::Bang => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Always => {
                self.advance();
                self.temporal(false)
            }
            Tok::Eventually => {
                self.advance();
                self.temporal(true)
            }
            _ => self.atom(),
        }
    }

    fn temporal(&mut self, eventually: bool) -> Result<Formula, ParseError> {
        let interval = self.interval()?;
        let weights = if self.peek().0 == Tok::LBrace {
            self.weight_spec(interval)?
        } else {
            WeightFn::unit()
        };
        let sub = self.unary()?;
        Ok(if eventually {
            Formula::eventually_weighted(interval, weights, sub)
        } else {
            Formula::always_weighted(interval, weights, sub)
        })
    }

    fn interval(&mut self) -> Result<TimeInterval, ParseError> {
        let open = self.expect(Tok::LBracket, "`[` to open the time interval")?;
        let a = self.interval_bound()?;
        self.expect(Tok::Comma, "`,` between interval bounds")?;
        let b = self.interval_bound()?;
        let close = self.expect(Tok::RBracket, "`]` to close the time interval")?;
        TimeInterval::new(a, b).map_err(|_| {
            self.err(
                SourceSpan {
                    start: open.start,
                    end: close.end,
                    line: open.line,
                    column: open.column,
                },
                ParseErrorKind::BadInterval,
                format!("interval [{a},{b}] must satisfy a <= b"),
            )
        })
    }

    fn interval_bound(&mut self) -> Result<usize, ParseError> {
        let (tok, span) = self.peek().clone();
        match tok {
            Tok::Number(v) if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 => {
                self.advance();
                Ok(v as usize)
            }
            Tok::Number(v) => Err(self.err(
                span,
                ParseErrorKind::BadInterval,
                format!("interval bound `{v}` must be a non-negative integer"),
            )),
            Tok::Minus => Err(self.err(
                span,
                ParseErrorKind::BadInterval,
                "interval bounds must be non-negative".to_string(),
            )),
            other => Err(self.err(
                span,
                ParseErrorKind::BadInterval,
                format!("expected an integer interval bound, found {}", other.describe()),
            )),
        }
    }

    fn weight_list(&mut self) -> Result<(Vec<f64>, SourceSpan), ParseError> {
        let open = self.expect(Tok::LBracket, "`[` to open the weight list")?;
        let mut values = vec![self.weight_value()?];
        while self.peek().0 == Tok::Comma {
            self.advance();
            values.push(self.weight_value()?);
        }
        let close = self.expect(Tok::RBracket, "`]` to close the weight list")?;
        Ok((
            values,
            SourceSpan {
                start: open.start,
                end: close.end,
                line: open.line,
                column: open.column,
            },
        ))
    }

    fn weight_value(&mut self) -> Result<f64, ParseError> {
        let (value, span) = self.signed_number("a weight")?;
        if !value.is_finite() || value <= 0.0 {
            return Err(self.err(
                span,
                ParseErrorKind::BadWeight,
                format!("weight `{value}` must be strictly positive"),
            ));
        }
        Ok(value)
    }

    fn weight_spec(&mut self, interval: TimeInterval) -> Result<WeightFn, ParseError> {
        self.expect(Tok::LBrace, "`{` to open the weight specification")?;
        let (tok, span) = self.advance();
        let kind = match tok {
            Tok::Ident(word) => word,
            other => {
                return Err(self.err(
                    span,
                    ParseErrorKind::UnexpectedToken,
                    format!(
                        "expected `const`, `disc`, `vec`, or `gauss`, found {}",
                        other.describe()
                    ),
                ));
            }
        };
        let weights = match kind.as_str() {
            "const" => WeightFn::Constant(self.weight_value()?),
            "disc" => WeightFn::Discount(self.weight_value()?),
            "vec" => {
                let (values, span) = self.weight_list()?;
                if values.len() != interval.len() {
                    return Err(self.err(
                        span,
                        ParseErrorKind::BadWeight,
                        format!(
                            "weight vector has {} entries but interval {} has {} steps",
                            values.len(),
                            interval,
                            interval.len()
                        ),
                    ));
                }
                WeightFn::Explicit(values)
            }
            "gauss" => {
                let floor = self.weight_value()?;
                let mut terms = Vec::new();
                while self.peek().0 == Tok::LParen {
                    self.advance();
                    let (center, _) = self.signed_number("a Gaussian center")?;
                    self.expect(Tok::Comma, "`,` between Gaussian parameters")?;
                    let (width, wspan) = self.signed_number("a Gaussian width")?;
                    self.expect(Tok::Comma, "`,` between Gaussian parameters")?;
                    let (amplitude, aspan) = self.signed_number("a Gaussian amplitude")?;
                    self.expect(Tok::RParen, "`)` to close the Gaussian term")?;
                    if !(width.is_finite() && width > 0.0) {
                        return Err(self.err(
                            wspan,
                            ParseErrorKind::BadWeight,
                            "Gaussian width must be strictly positive".to_string(),
                        ));
                    }
                    if !(amplitude.is_finite() && amplitude >= 0.0) {
                        return Err(self.err(
                            aspan,
                            ParseErrorKind::BadWeight,
                            "Gaussian amplitude must be non-negative".to_string(),
                        ));
                    }
                    if !center.is_finite() {
                        return Err(self.err(
                            aspan,
                            ParseErrorKind::BadWeight,
                            "Gaussian center must be finite".to_string(),
                        ));
                    }
                    terms.push(GaussTerm {
                        center,
                        width,
                        amplitude,
                    });
                }
                if terms.is_empty() {
                    return Err(self.unexpected("`(` opening at least one `(center,width,amplitude)` term"));
                }
                WeightFn::GaussianMixture { floor, terms }
            }
            other => {
                return Err(self.err(
                    span,
                    ParseErrorKind::UnexpectedToken,
                    format!("expected `const`, `disc`, `vec`, or `gauss`, found `{other}`"),
                ));
            }
        };
        self.expect(Tok::RBrace, "`}` to close the weight specification")?;
        Ok(weights)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().0.clone() {
            Tok::True => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.advance();
                let inner = self.chain()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(_) | Tok::Number(_) | Tok::Minus => self.predicate(),
            _ => Err(self.unexpected(
                "a formula (`TRUE`, `FALSE`, `!`, `G`, `F`, `(`, or a predicate)",
            )),
        }
    }

    fn predicate(&mut self) -> Result<Formula, ParseError> {
        let start = self.peek().1;
        let mut coefficients: Vec<(String, f64)> = Vec::new();
        let mut offset = 0.0;

        let mut sign = 1.0;
        if self.peek().0 == Tok::Minus {
            self.advance();
            sign = -1.0;
        }
        loop {
            match self.peek().0.clone() {
                Tok::Number(value) => {
                    self.advance();
                    if self.peek().0 == Tok::Star {
                        self.advance();
                        let (tok, span) = self.advance();
                        match tok {
                            Tok::Ident(name) => coefficients.push((name, sign * value)),
                            other => {
                                return Err(self.err(
                                    span,
                                    ParseErrorKind::BadPredicate,
                                    format!(
                                        "expected a component name after `*`, found {}",
                                        other.describe()
                                    ),
                                ));
                            }
                        }
                    } else {
                        offset += sign * value;
                    }
                }
                Tok::Ident(name) => {
                    self.advance();
                    coefficients.push((name, sign));
                }
                _ => return Err(self.unexpected("a number or component name")),
            }
            sign = match self.peek().0 {
                Tok::Plus => 1.0,
                Tok::Minus => -1.0,
                _ => break,
            };
            self.advance();
        }

        let (relop, _) = match self.peek().0 {
            Tok::Ge | Tok::Gt | Tok::Le | Tok::Lt => self.advance(),
            _ => return Err(self.unexpected("a comparison (`>=`, `<=`, `>`, or `<`)")),
        };
        let (rhs, _) = self.signed_number("the comparison bound")?;

        // rearrange to l(S(t)) >= 0
        let geq = matches!(relop, Tok::Ge | Tok::Gt);
        let (coefficients, offset) = if geq {
            (coefficients, offset - rhs)
        } else {
            (
                coefficients.into_iter().map(|(n, c)| (n, -c)).collect(),
                rhs - offset,
            )
        };

        let end = self.tokens[self.pos.saturating_sub(1)].1;
        let expr = AffineExpr::new(coefficients, offset).map_err(|e| {
            self.err(
                SourceSpan {
                    start: start.start,
                    end: end.end,
                    line: start.line,
                    column: start.column,
                },
                ParseErrorKind::BadPredicate,
                e.to_string(),
            )
        })?;

        let mode = if self.peek().0 == Tok::LBrace {
            self.predicate_mode()?
        } else {
            PredicateMode::metric()
        };
        Ok(Formula::pred_mode(expr, mode))
    }

    fn predicate_mode(&mut self) -> Result<PredicateMode, ParseError> {
        self.expect(Tok::LBrace, "`{`")?;
        let (tok, span) = self.advance();
        let kind = match tok {
            Tok::Ident(word) => word,
            other => {
                return Err(self.err(
                    span,
                    ParseErrorKind::BadPredicate,
                    format!("expected `bool` or `scale`, found {}", other.describe()),
                ));
            }
        };
        let (value, vspan) = self.signed_number("a positive parameter")?;
        if !value.is_finite() || value <= 0.0 {
            return Err(self.err(
                vspan,
                ParseErrorKind::BadPredicate,
                format!("predicate mode parameter `{value}` must be strictly positive"),
            ));
        }
        let mode = match kind.as_str() {
            "bool" => PredicateMode::Boolean { magnitude: value },
            "scale" => PredicateMode::Metric { scale: value },
            other => {
                return Err(self.err(
                    span,
                    ParseErrorKind::BadPredicate,
                    format!("expected `bool` or `scale`, found `{other}`"),
                ));
            }
        };
        self.expect(Tok::RBrace, "`}`")?;
        Ok(mode)
    }

    fn signed_number(&mut self, what: &str) -> Result<(f64, SourceSpan), ParseError> {
        let mut sign = 1.0;
        let start = self.peek().1;
        if self.peek().0 == Tok::Minus {
            self.advance();
            sign = -1.0;
        }
        match self.peek().0.clone() {
            Tok::Number(value) => {
                let (_, span) = self.advance();
                Ok((
                    sign * value,
                    SourceSpan {
                        start: start.start,
                        end: span.end,
                        line: start.line,
                        column: start.column,
                    },
                ))
            }
            _ => Err(self.unexpected(what)),
        }
    }
}

/// Canonical text for a formula, such that `parse(print(f))` is structurally
/// equal to `f`, weights included.
///
/// Unit weights (`const 1`) and the default metric predicate mode are
/// elided. Operand weights of `And`/`Or` print as an explicit list; the rare
/// parametric operand weight is printed realized (the text then parses back
/// to the equal explicit vector).
pub fn print(formula: &Formula) -> String {
    let mut out = String::new();
    print_node(formula, &mut out);
    out
}

fn print_node(formula: &Formula, out: &mut String) {
    match formula {
        Formula::True => out.push_str("TRUE"),
        Formula::False => out.push_str("FALSE"),
        Formula::Predicate(p) => {
            print_affine(&p.expr, out);
            out.push_str(" >= 0");
            match p.mode {
                PredicateMode::Metric { scale } => {
                    if scale != 1.0 {
                        out.push_str(&format!(" {{scale {scale}}}"));
                    }
                }
                PredicateMode::Boolean { magnitude } => {
                    out.push_str(&format!(" {{bool {magnitude}}}"));
                }
            }
        }
        Formula::Not(sub) => {
            out.push('!');
            print_child(sub, out);
        }
        Formula::And { subs, weights } | Formula::Or { subs, weights } => {
            let op = if matches!(formula, Formula::Or { .. }) {
                " ||"
            } else {
                " &&"
            };
            print_child(&subs[0], out);
            for (i, sub) in subs.iter().enumerate().skip(1) {
                out.push_str(op);
                if i == 1 {
                    print_operand_weights(weights, subs.len(), out);
                }
                out.push(' ');
                print_child(sub, out);
            }
        }
        Formula::Always { interval, weights, sub }
        | Formula::Eventually { interval, weights, sub } => {
            out.push(if matches!(formula, Formula::Always { .. }) {
                'G'
            } else {
                'F'
            });
            out.push_str(&format!("{interval}"));
            print_weight_spec(weights, out);
            out.push(' ');
            print_child(sub, out);
        }
    }
}

fn print_child(formula: &Formula, out: &mut String) {
    match formula {
        Formula::True | Formula::False => print_node(formula, out),
        _ => {
            out.push('(');
            print_node(formula, out);
            out.push(')');
        }
    }
}

fn print_affine(expr: &AffineExpr, out: &mut String) {
    let mut first = true;
    for (name, coef) in expr.coefficients() {
        let magnitude = coef.abs();
        if first {
            if coef < 0.0 {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(if coef < 0.0 { " - " } else { " + " });
        }
        if magnitude == 1.0 {
            out.push_str(name);
        } else {
            out.push_str(&format!("{magnitude}*{name}"));
        }
    }
    let offset = expr.offset();
    if offset != 0.0 {
        out.push_str(if offset < 0.0 { " - " } else { " + " });
        out.push_str(&format!("{}", offset.abs()));
    }
}

fn print_operand_weights(weights: &WeightFn, arity: usize, out: &mut String) {
    if weights.is_unit() {
        return;
    }
    let values = match weights {
        WeightFn::Explicit(v) => v.clone(),
        other => match other.realize(WeightDomain::Count(arity)) {
            Ok(v) => v,
            Err(_) => return,
        },
    };
    out.push('[');
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("{v}"));
    }
    out.push(']');
}

fn print_weight_spec(weights: &WeightFn, out: &mut String) {
    match weights {
        WeightFn::Constant(c) if *c == 1.0 => {}
        WeightFn::Constant(c) => out.push_str(&format!("{{const {c}}}")),
        WeightFn::Discount(gamma) => out.push_str(&format!("{{disc {gamma}}}")),
        WeightFn::Explicit(v) => {
            out.push_str("{vec [");
            for (i, value) in v.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{value}"));
            }
            out.push_str("]}");
        }
        WeightFn::GaussianMixture { floor, terms } => {
            out.push_str(&format!("{{gauss {floor}"));
            for t in terms {
                out.push_str(&format!(" ({},{},{})", t.center, t.width, t.amplitude));
            }
            out.push('}');
        }
    }
}
