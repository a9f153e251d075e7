use std::collections::BTreeSet;
use std::str::FromStr;

use super::{Dtd, DtdError};
use crate::label::Label;
use crate::regex::{parse_content_model, ContentModel, ParseError, SymbolMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtdFormat {
    /// `root r` directive, `label := model` rules, `#` comment lines.
    Native,
    /// `<!ELEMENT name model>` declarations with a `<!-- root: name -->` comment.
    Xml,
}

impl FromStr for DtdFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" => Ok(DtdFormat::Native),
            "xml" | "xml-dtd" => Ok(DtdFormat::Xml),
            other => Err(format!("unknown DTD format `{other}` (expected native or xml)")),
        }
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

struct RawRule {
    line: usize,
    label: Label,
    text: String,
}

pub(super) fn parse_dtd(text: &str, format: DtdFormat, root: Option<&str>) -> Result<Dtd, DtdError> {
    let (rules, directive) = match format {
        DtdFormat::Native => split_native(text)?,
        DtdFormat::Xml => split_xml(text)?,
    };
    if rules.is_empty() {
        return Err(DtdError::Empty);
    }
    let mut declared = BTreeSet::new();
    for r in &rules {
        if !declared.insert(r.label.clone()) {
            return Err(DtdError::DuplicateRule(r.label.clone()));
        }
    }
    let mode = match format {
        DtdFormat::Native => SymbolMode::Alphabet(declared),
        DtdFormat::Xml => SymbolMode::Whole,
    };
    let mut parsed = Vec::with_capacity(rules.len());
    for r in &rules {
        let model = match format {
            DtdFormat::Xml => xml_model(r, &mode)?,
            DtdFormat::Native => parse_content_model(&r.text, &mode).map_err(|e| match e {
                ParseError::UnknownSymbol { name, .. } => {
                    DtdError::UndeclaredLabel { rule: r.label.clone(), label: name }
                }
                source => DtdError::ContentModel { line: r.line, label: r.label.clone(), source },
            })?,
        };
        parsed.push((r.label.clone(), model));
    }
    let root = root
        .map(Label::new)
        .or(directive)
        .or_else(|| match format {
            DtdFormat::Native => Some(rules[0].label.clone()),
            DtdFormat::Xml => None,
        })
        .ok_or(DtdError::MissingRoot)?;
    Dtd::new(root, parsed)
}

fn split_native(text: &str) -> Result<(Vec<RawRule>, Option<Label>), DtdError> {
    let mut rules = Vec::new();
    let mut root = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((lhs, rhs)) = line.split_once(":=") {
            let lhs = lhs.trim();
            if !is_name(lhs) {
                return Err(DtdError::Syntax { line: lineno, msg: format!("invalid label `{lhs}`") });
            }
            rules.push(RawRule { line: lineno, label: Label::new(lhs), text: rhs.trim().to_string() });
            continue;
        }
        let mut words = line.split_whitespace();
        match (words.next(), words.next(), words.next()) {
            (Some("root"), Some(name), None) if is_name(name) => {
                if root.replace(Label::new(name)).is_some() {
                    return Err(DtdError::Syntax { line: lineno, msg: "second root directive".into() });
                }
            }
            _ => {
                return Err(DtdError::Syntax {
                    line: lineno,
                    msg: format!("expected `root <label>` or `<label> := <model>`, found `{line}`"),
                })
            }
        }
    }
    Ok((rules, root))
}

fn split_xml(text: &str) -> Result<(Vec<RawRule>, Option<Label>), DtdError> {
    let line_of = |offset: usize| text[..offset].matches('\n').count() + 1;
    let mut rules = Vec::new();
    let mut root = None;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let trimmed = rest.trim_start();
        if trimmed.is_empty() {
            break;
        }
        i += rest.len() - trimmed.len();
        let line = line_of(i);
        if let Some(body) = trimmed.strip_prefix("<!--") {
            let end = body.find("-->").ok_or_else(|| DtdError::Syntax { line, msg: "unterminated comment".into() })?;
            if let Some(name) = body[..end].trim().strip_prefix("root:") {
                let name = name.trim();
                if !is_name(name) {
                    return Err(DtdError::Syntax { line, msg: format!("invalid root label `{name}`") });
                }
                if root.replace(Label::new(name)).is_some() {
                    return Err(DtdError::Syntax { line, msg: "second root directive".into() });
                }
            }
            i += 4 + end + 3;
        } else if let Some(body) = trimmed.strip_prefix("<!ELEMENT") {
            let end = body
                .find('>')
                .ok_or_else(|| DtdError::Syntax { line, msg: "unterminated ELEMENT declaration".into() })?;
            let decl = body[..end].trim();
            let (name, model) = decl
                .split_once(char::is_whitespace)
                .ok_or_else(|| DtdError::Syntax { line, msg: "ELEMENT declaration without content model".into() })?;
            if !is_name(name) {
                return Err(DtdError::Syntax { line, msg: format!("invalid element name `{name}`") });
            }
            rules.push(RawRule { line, label: Label::new(name), text: model.trim().to_string() });
            i += "<!ELEMENT".len() + end + 1;
        } else if trimmed.starts_with("<!") || trimmed.starts_with("<?") {
            // Other declarations (attributes, entities, processing
            // instructions) carry nothing the element structure depends on.
            let mut quote = None;
            let end = trimmed
                .char_indices()
                .find(|&(_, c)| {
                    match quote {
                        Some(q) if c == q => quote = None,
                        Some(_) => {}
                        None if c == '"' || c == '\'' => quote = Some(c),
                        None => return c == '>',
                    }
                    false
                })
                .map(|(k, _)| k)
                .ok_or_else(|| DtdError::Syntax { line, msg: "unterminated declaration".into() })?;
            i += end + 1;
        } else {
            return Err(DtdError::Syntax { line, msg: "expected a markup declaration".into() });
        }
    }
    Ok((rules, root))
}

fn xml_model(r: &RawRule, mode: &SymbolMode) -> Result<ContentModel, DtdError> {
    let compact: String = r.text.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "EMPTY" | "(#PCDATA)" | "(#PCDATA)*" => Ok(ContentModel::Epsilon),
        "ANY" => Err(DtdError::Unsupported(r.label.clone())),
        s if s.contains("#PCDATA") => Err(DtdError::Unsupported(r.label.clone())),
        _ => parse_content_model(&r.text, mode).map_err(|source| DtdError::ContentModel {
            line: r.line,
            label: r.label.clone(),
            source,
        }),
    }
}
