//! Reader and writer for the parenthesised, double-quoted statement format:
//!
//! ```text
//! ("Bob" "is" "big" "+")                              // a fact
//! ((("someone" "is" "big" "+")) -> ("someone" "is" "rough" "+"))
//! ```
//!
//! `//` starts a comment that runs to the end of the line.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::logic::{Atom, Literal, Polarity, Predicate, Rule, Sentence, Term, Theory, Variable};

/// Byte offsets into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> SourceSpan {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("syntax error at {span}: {message}")]
pub struct SyntaxError {
    pub message: String,
    pub span: SourceSpan,
}

impl SyntaxError {
    fn new(message: impl Into<String>, span: SourceSpan) -> SyntaxError {
        SyntaxError { message: message.into(), span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Arrow,
    Str(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
    /// Comment lines on their own lines before this token.
    leading: Vec<String>,
    /// A comment later on the same line as this token.
    trailing: Vec<String>,
}

fn tokenize(text: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out: Vec<Token> = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut token_on_line = false;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'\n' => {
                token_on_line = false;
                i += 1;
            }
            b' ' | b'\t' | b'\r' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                let end = text[i..].find('\n').map_or(text.len(), |n| i + n);
                let comment = text[i + 2..end].trim().to_string();
                match out.last_mut() {
                    Some(last) if token_on_line => last.trailing.push(comment),
                    _ => pending.push(comment),
                }
                i = end;
            }
            b'(' | b')' => {
                let tok = if c == b'(' { Tok::Open } else { Tok::Close };
                out.push(Token {
                    tok,
                    span: SourceSpan::new(i, i + 1),
                    leading: std::mem::take(&mut pending),
                    trailing: Vec::new(),
                });
                token_on_line = true;
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push(Token {
                    tok: Tok::Arrow,
                    span: SourceSpan::new(i, i + 2),
                    leading: std::mem::take(&mut pending),
                    trailing: Vec::new(),
                });
                token_on_line = true;
                i += 2;
            }
            b'"' => {
                let rest = &text[i + 1..];
                let Some(close) = rest.find(['"', '\n']) else {
                    return Err(SyntaxError::new("unterminated string", SourceSpan::new(i, text.len())));
                };
                if rest.as_bytes()[close] == b'\n' {
                    return Err(SyntaxError::new("unterminated string", SourceSpan::new(i, i + 1 + close)));
                }
                let s = &rest[..close];
                let span = SourceSpan::new(i, i + close + 2);
                if s.is_empty() || s.trim() != s {
                    return Err(SyntaxError::new("empty or padded symbol", span));
                }
                out.push(Token {
                    tok: Tok::Str(s.to_string()),
                    span,
                    leading: std::mem::take(&mut pending),
                    trailing: Vec::new(),
                });
                token_on_line = true;
                i += close + 2;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::new(
                    format!("unexpected character `{ch}`"),
                    SourceSpan::new(i, i + ch.len_utf8()),
                ));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    len: usize,
}

impl Parser {
    /// Leading comments of the statement's first token plus every trailing
    /// comment inside the statement.
    fn comments(&self, first: usize) -> Vec<String> {
        let mut out = self.toks[first].leading.clone();
        for t in &self.toks[first..self.pos] {
            out.extend(t.trailing.iter().cloned());
        }
        out
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan::new(self.len, self.len)
    }

    fn next(&mut self, what: &str) -> Result<Token, SyntaxError> {
        let t =
            self.toks.get(self.pos).cloned().ok_or_else(|| {
                SyntaxError::new(format!("unexpected end of input, expected {what}"), self.eof_span())
            })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, SyntaxError> {
        let t = self.next(what)?;
        if t.tok != tok {
            return Err(SyntaxError::new(format!("expected {what}"), t.span));
        }
        Ok(t)
    }

    /// `( entity "is" attribute polarity )` or `( entity relation entity polarity )`,
    /// with the opening parenthesis already consumed.
    fn fact_body(&mut self, open: SourceSpan) -> Result<(Literal, SourceSpan), SyntaxError> {
        let mut words = Vec::new();
        let close = loop {
            let t = self.next("`)`")?;
            match t.tok {
                Tok::Str(s) => words.push((s, t.span)),
                Tok::Close => break t.span,
                _ => return Err(SyntaxError::new("unexpected token inside fact", t.span)),
            }
        };
        let span = open.join(close);
        if words.len() != 4 {
            return Err(SyntaxError::new(
                format!("a fact has 4 tokens (entity predicate object polarity), found {}", words.len()),
                span,
            ));
        }
        let polarity = match words[3].0.as_str() {
            "+" => Polarity::Positive,
            "-" => Polarity::Negative,
            other => return Err(SyntaxError::new(format!("unknown polarity `{other}`"), words[3].1)),
        };
        let subject = match Variable::from_word(&words[0].0) {
            Some(v) => Term::Var(v),
            None => Term::Name(words[0].0.clone()),
        };
        let predicate = if words[1].0 == "is" { Predicate::Is } else { Predicate::Relation(words[1].0.clone()) };
        let atom = Atom { subject, predicate, object: words[2].0.clone() };
        Ok((Literal { atom, polarity }, span))
    }

    fn fact(&mut self) -> Result<(Literal, SourceSpan), SyntaxError> {
        let open = self.expect(Tok::Open, "`(`")?;
        self.fact_body(open.span)
    }
}

#[derive(Debug, Clone)]
enum Statement {
    Fact(Literal),
    Rule(Vec<Literal>, Literal),
}

/// A statement together with the comment lines that precede it.
#[derive(Debug, Clone)]
pub struct Annotated {
    pub sentence: usize,
    pub comments: Vec<String>,
    pub span: SourceSpan,
}

fn parse_statements(text: &str) -> Result<Vec<(Statement, Vec<String>, SourceSpan)>, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len() };
    let mut out = Vec::new();
    while p.peek().is_some() {
        let first_tok = p.pos;
        let open = p.expect(Tok::Open, "`(` starting a statement")?;
        match p.peek().map(|t| t.tok.clone()) {
            Some(Tok::Open) => {
                // rule: ( (fact+) -> fact )
                let list_open = p.next("`(`")?;
                let mut conditions = Vec::new();
                loop {
                    match p.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Open) => conditions.push(p.fact()?.0),
                        Some(Tok::Close) => {
                            p.pos += 1;
                            break;
                        }
                        Some(_) => {
                            let t = p.next("")?;
                            return Err(SyntaxError::new("expected a condition or `)`", t.span));
                        }
                        None => return Err(SyntaxError::new("unclosed condition list", list_open.span)),
                    }
                }
                if conditions.is_empty() {
                    return Err(SyntaxError::new("a rule needs at least one condition", list_open.span));
                }
                p.expect(Tok::Arrow, "`->`")?;
                let (conclusion, _) = p.fact()?;
                let close = p.expect(Tok::Close, "`)` closing the rule")?;
                let comments = p.comments(first_tok);
                out.push((Statement::Rule(conditions, conclusion), comments, open.span.join(close.span)));
            }
            Some(Tok::Str(_)) => {
                let (lit, span) = p.fact_body(open.span)?;
                out.push((Statement::Fact(lit), p.comments(first_tok), span));
            }
            Some(_) => {
                let t = p.next("")?;
                return Err(SyntaxError::new("expected a fact or a rule", t.span));
            }
            None => return Err(SyntaxError::new("unexpected end of input after `(`", p.eof_span())),
        }
    }
    Ok(out)
}

/// Parse a whole theory. Rules get ids `rule1`, `rule2`, ... in text order.
pub fn parse_theory(text: &str) -> Result<Theory, SyntaxError> {
    parse_theory_annotated(text).map(|(t, _)| t)
}

pub fn parse_theory_annotated(text: &str) -> Result<(Theory, Vec<Annotated>), SyntaxError> {
    let mut facts = Vec::new();
    let mut rules = Vec::new();
    let mut order = Vec::new();
    let mut notes = Vec::new();
    for (idx, (st, comments, span)) in parse_statements(text)?.into_iter().enumerate() {
        match st {
            Statement::Fact(l) => {
                order.push(Sentence::Fact(facts.len()));
                facts.push(l);
            }
            Statement::Rule(c, h) => {
                order.push(Sentence::Rule(rules.len()));
                rules.push(Rule::new(format!("rule{}", rules.len() + 1), c, h));
            }
        }
        notes.push(Annotated { sentence: idx, comments, span });
    }
    Ok((Theory::with_order(facts, rules, order), notes))
}

/// A single fact-shaped literal such as `("Bob" "is" "green" "+")`.
pub fn parse_literal(text: &str) -> Result<Literal, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, len: text.len() };
    let (lit, _) = p.fact()?;
    if let Some(t) = p.peek() {
        return Err(SyntaxError::new("trailing input after literal", t.span));
    }
    Ok(lit)
}

pub fn emit_literal(l: &Literal) -> String {
    format!(
        "(\"{}\" \"{}\" \"{}\" \"{}\")",
        l.atom.subject.text(),
        l.atom.predicate.text(),
        l.atom.object,
        l.polarity.symbol()
    )
}

pub fn emit_rule(r: &Rule) -> String {
    let conds: Vec<String> = r.conditions.iter().map(emit_literal).collect();
    format!("(({}) -> {})", conds.join(" "), emit_literal(&r.conclusion))
}

/// One statement per line, in sentence order.
pub fn emit_theory(t: &Theory) -> String {
    let mut out = String::new();
    for s in &t.sentence_order {
        match *s {
            Sentence::Fact(i) => out.push_str(&emit_literal(&t.facts[i])),
            Sentence::Rule(i) => out.push_str(&emit_rule(&t.rules[i])),
        }
        out.push('\n');
    }
    out
}

/// Order-independent identity of a theory: its statement lines, sorted and
/// deduplicated.
pub fn canonical_text(t: &Theory) -> String {
    let mut lines: Vec<String> = t.facts.iter().map(emit_literal).chain(t.rules.iter().map(emit_rule)).collect();
    lines.sort();
    lines.dedup();
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::TheoryType;

    pub(crate) const ANNOTATED_EXAMPLE: &str = r#"("Bob" "is" "big" "+")       // Bob is big.
("Bob" "is" "green" "-")     // Bob is not green.
("Bob" "is" "quiet" "-")     // Bob is not quiet.

// Nice, smart people are rough.
((("someone" "is" "nice" "+")
  ("someone" "is" "smart" "+"))
        -> ("someone" "is" "rough" "+"))

// If someone is quiet and round then they are
((("someone" "is" "quiet" "+")        //  not big.
  ("someone" "is" "round" "+"))
        -> ("someone" "is" "big" "-"))

// If Bob is not green then Bob is nice.
((("Bob" "is" "green" "-"))
        -> ("Bob" "is" "nice" "+"))
"#;

    #[test]
    fn single_fact() {
        let t = parse_theory(r#"("Bob" "is" "big" "+")"#).unwrap();
        assert_eq!(t.facts, vec![Atom::is(Term::name("Bob"), "big").positive()]);
        assert!(t.rules.is_empty());
    }

    #[test]
    fn ground_rule_with_negated_condition() {
        let t = parse_theory(r#"((("Bob" "is" "green" "-")) -> ("Bob" "is" "nice" "+"))"#).unwrap();
        assert_eq!(t.rules.len(), 1);
        let r = &t.rules[0];
        assert_eq!(r.conditions, vec![Atom::is(Term::name("Bob"), "green").negative()]);
        assert_eq!(r.conclusion, Atom::is(Term::name("Bob"), "nice").positive());
        assert_eq!(r.id, "rule1");
    }

    #[test]
    fn empty_input() {
        let t = parse_theory("").unwrap();
        assert!(t.is_empty());
        let t = parse_theory("  // only a comment\n").unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn annotated_example_parses() {
        let (t, notes) = parse_theory_annotated(ANNOTATED_EXAMPLE).unwrap();
        assert_eq!(t.facts.len(), 3);
        assert_eq!(t.rules.len(), 3);
        assert_eq!(t.theory_type, TheoryType::Type1Att);
        assert!(t.negation);
        assert_eq!(notes[0].comments, vec!["Bob is big.".to_string()]);
        assert_eq!(notes[3].comments, vec!["Nice, smart people are rough.".to_string()]);
        assert_eq!(notes[4].comments.join(" "), "If someone is quiet and round then they are not big.");
        let rule = &t.rules[1];
        assert_eq!(rule.conclusion, Atom::is(Term::Var(Variable::Someone), "big").negative());
    }

    #[test]
    fn emit_one_fact() {
        let t = Theory::new(vec![Atom::is(Term::name("Anne"), "red").positive()], vec![]);
        assert_eq!(emit_theory(&t), "(\"Anne\" \"is\" \"red\" \"+\")\n");
    }

    #[test]
    fn annotated_example_round_trip() {
        let t = parse_theory(ANNOTATED_EXAMPLE).unwrap();
        let again = parse_theory(&emit_theory(&t)).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_theory(r#"("Bob" "is" "big" "?")"#).unwrap_err();
        assert!(e.message.contains("polarity"));
        assert_eq!(e.span, SourceSpan::new(18, 21));

        let e = parse_theory(r#"("Bob" "is" "big")"#).unwrap_err();
        assert!(e.message.contains("4 tokens"));

        let e = parse_theory(r#"("Bob" "is" "big" "+""#).unwrap_err();
        assert!(e.message.contains("end of input"));

        let e = parse_theory(r#"("Bob" "is" "big" "+"))"#).unwrap_err();
        assert_eq!(e.span, SourceSpan::new(22, 23));

        assert!(parse_theory(r#"((("a" "is" "b" "+")) ("a" "is" "c" "+"))"#).is_err());
        assert!(parse_theory(r#"(() -> ("a" "is" "c" "+"))"#).is_err());
        assert!(parse_theory(r#"("Bob is big +")"#).is_err());
        assert!(parse_theory("(\"Bob\" \"is\nbig\" \"+\")").is_err());
    }

    #[test]
    fn literal_parsing() {
        let l = parse_literal(r#" ("the cat" "likes" "dog" "-") "#).unwrap();
        assert_eq!(l, Atom::relation(Term::name("the cat"), "likes", "dog").negative());
        assert!(parse_literal(r#"("a" "is" "b" "+") ("a" "is" "b" "+")"#).is_err());
    }

    #[test]
    fn canonical_ignores_order() {
        let a = parse_theory("(\"A\" \"is\" \"b\" \"+\")\n(\"C\" \"is\" \"d\" \"+\")").unwrap();
        let b = parse_theory("(\"C\" \"is\" \"d\" \"+\")\n(\"A\" \"is\" \"b\" \"+\")").unwrap();
        assert_eq!(canonical_text(&a), canonical_text(&b));
    }
}
