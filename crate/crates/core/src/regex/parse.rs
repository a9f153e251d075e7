use std::collections::BTreeSet;

use thiserror::Error;

use super::ContentModel;
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at offset {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("the empty-set constant at offset {pos} is not part of the content-model language")]
    EmptySet { pos: usize },
}

/// How an identifier run such as `abc` is split into labels.
#[derive(Debug, Clone)]
pub enum SymbolMode {
    /// The whole run is one label (XML-style names).
    Whole,
    /// Each character is a label (`ab+c` is `a`, `b+`, `c`).
    SingleChar,
    /// Longest-match segmentation against a known alphabet; a run that cannot
    /// be segmented is an unknown symbol.
    Alphabet(BTreeSet<Label>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Eps,
    LParen,
    RParen,
    Comma,
    Bar,
    Star,
    Opt,
    Plus,
    Hash,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

fn lex(text: &str, mode: &SymbolMode) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '|' => Some(Tok::Bar),
            '*' => Some(Tok::Star),
            '?' => Some(Tok::Opt),
            '+' | '⁺' => Some(Tok::Plus),
            '#' => Some(Tok::Hash),
            'ε' => Some(Tok::Eps),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((pos, t));
            i += 1;
            continue;
        }
        if c.is_whitespace() || c == '^' || c == '·' {
            i += 1;
            continue;
        }
        if c == '∅' {
            return Err(ParseError::EmptySet { pos });
        }
        if !is_ident_start(c) {
            return Err(ParseError::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
        let start = i;
        while i < chars.len() && is_ident_char(chars[i].1) {
            i += 1;
        }
        let run: String = chars[start..i].iter().map(|(_, c)| c).collect();
        segment(&run, pos, mode, &mut toks)?;
    }
    Ok(toks)
}

fn segment(run: &str, pos: usize, mode: &SymbolMode, out: &mut Vec<(usize, Tok)>) -> Result<(), ParseError> {
    match mode {
        SymbolMode::Whole => {
            out.push((pos, if run == "eps" { Tok::Eps } else { Tok::Ident(run.to_string()) }));
        }
        SymbolMode::SingleChar => {
            if run == "eps" {
                out.push((pos, Tok::Eps));
            } else {
                for (k, c) in run.char_indices() {
                    out.push((pos + k, Tok::Ident(c.to_string())));
                }
            }
        }
        SymbolMode::Alphabet(alphabet) => {
            if alphabet.contains(run) {
                out.push((pos, Tok::Ident(run.to_string())));
                return Ok(());
            }
            if run == "eps" {
                out.push((pos, Tok::Eps));
                return Ok(());
            }
            let mut rest = run;
            let mut offset = pos;
            while !rest.is_empty() {
                let len = (1..=rest.len())
                    .rev()
                    .filter(|&n| rest.is_char_boundary(n))
                    .find(|&n| alphabet.contains(&rest[..n]))
                    .ok_or_else(|| ParseError::UnknownSymbol { pos, name: run.to_string() })?;
                out.push((offset, Tok::Ident(rest[..len].to_string())));
                rest = &rest[len..];
                offset += len;
            }
        }
    }
    Ok(())
}

/// A parsed operand that remembers whether it was a directly parenthesized
/// sequence, which is how `#` tuples are written: `(a,b)#(c)`.
enum Parsed {
    Plain(ContentModel),
    Group(Vec<ContentModel>),
}

impl Parsed {
    fn into_model(self) -> ContentModel {
        match self {
            Parsed::Plain(m) => m,
            Parsed::Group(items) => ContentModel::concat(items),
        }
    }

    fn into_tuple(self) -> Vec<ContentModel> {
        match self {
            Parsed::Plain(m) => vec![m],
            Parsed::Group(items) => items,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn starts_item(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::Eps | Tok::LParen))
    }

    fn alt(&mut self) -> Result<Parsed, ParseError> {
        let mut alts = vec![self.seq()?];
        while self.eat(&Tok::Bar) {
            alts.push(self.seq()?);
        }
        if alts.len() == 1 {
            let items = alts.pop().unwrap();
            if items.len() >= 2 {
                return Ok(Parsed::Group(items));
            }
            return Ok(Parsed::Plain(ContentModel::concat(items)));
        }
        Ok(Parsed::Plain(ContentModel::disj(alts.into_iter().map(ContentModel::concat).collect())))
    }

    fn seq(&mut self) -> Result<Vec<ContentModel>, ParseError> {
        let mut items = vec![self.hash_item()?.into_model()];
        loop {
            if self.eat(&Tok::Comma) || self.starts_item() {
                items.push(self.hash_item()?.into_model());
            } else {
                return Ok(items);
            }
        }
    }

    fn hash_item(&mut self) -> Result<Parsed, ParseError> {
        let first = self.item()?;
        if self.peek() != Some(&Tok::Hash) {
            return Ok(first);
        }
        let mut acc = first.into_tuple();
        while self.eat(&Tok::Hash) {
            let right = self.item()?.into_tuple();
            acc = vec![ContentModel::hash(acc, right)];
        }
        Ok(Parsed::Plain(acc.pop().unwrap()))
    }

    fn item(&mut self) -> Result<Parsed, ParseError> {
        let mut base = self.base()?;
        loop {
            let wrap: fn(ContentModel) -> ContentModel = match self.peek() {
                Some(Tok::Star) => ContentModel::star,
                Some(Tok::Opt) => ContentModel::opt,
                Some(Tok::Plus) => ContentModel::plus,
                _ => return Ok(base),
            };
            self.idx += 1;
            base = Parsed::Plain(wrap(base.into_model()));
        }
    }

    fn base(&mut self) -> Result<Parsed, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                Ok(Parsed::Plain(ContentModel::Symbol(Label::from(name))))
            }
            Some(Tok::Eps) => {
                self.idx += 1;
                Ok(Parsed::Plain(ContentModel::Epsilon))
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.alt()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                Ok(inner)
            }
            Some(t) => self.error(format!("unexpected token {t:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a content model. Concatenation is juxtaposition or `,`; postfix
/// `*`, `?`, `+` (optionally written `^*` etc.); infix `|`; `#` between
/// operands where a parenthesized sequence is a tuple; `eps` or `ε` is the
/// empty word.
pub fn parse_content_model(text: &str, mode: &SymbolMode) -> Result<ContentModel, ParseError> {
    let toks = lex(text, mode)?;
    let mut p = Parser { toks, idx: 0, end: text.len() };
    if p.peek().is_none() {
        return p.error("empty content model");
    }
    let m = p.alt()?.into_model();
    if p.peek().is_some() {
        return p.error("trailing input");
    }
    Ok(m)
}
