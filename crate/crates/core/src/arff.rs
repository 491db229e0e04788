//! ARFF reading and writing, plus a loader that turns a directory of labeled
//! text files into a dataset.
//!
//! Supported grammar:
//!
//! * `@relation`, `@attribute` and `@data` keywords in any letter case.
//! * Attribute types `numeric` (aliases `real`, `integer`), `string` and
//!   nominal `{v1,v2,...}`.
//! * `%` starts a comment that runs to the end of the line (outside quotes).
//! * Tokens may be single- or double-quoted. Inside quotes the quote
//!   character is escaped by doubling it; `\n`, `\r`, `\t` and `\\` are
//!   also recognized so that multi-line text survives a round trip.
//! * Dense rows `v1,v2,...` and sparse rows `{index value, ...}`.
//!   Omitted sparse entries are `0` for numeric attributes and the first
//!   declared value for nominal attributes. String attributes cannot be
//!   omitted.
//! * An unquoted `?` is a missing value.
//!
//! The class attribute of a parsed file is its last attribute when that
//! attribute is nominal; otherwise the dataset has no class.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Name given to the class attribute by [`load_text_directory`].
pub const CLASS_ATTRIBUTE: &str = "@@class@@";
/// Name given to the text attribute by [`load_text_directory`].
pub const TEXT_ATTRIBUTE: &str = "text";

#[derive(Debug, Error)]
pub enum ArffError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: expected {expected} values, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("bad value at line {line}, column {column}: {message}")]
    Domain {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid UTF-8 at line {line}, column {column}")]
    Encoding { line: usize, column: usize },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no text files found in any class directory under {}", .0.display())]
    EmptyCorpus(PathBuf),
}

impl ArffError {
    /// `(line, column)` of a positioned parse error.
    pub fn position(&self) -> Option<(usize, usize)> {
        match *self {
            ArffError::Syntax { line, column, .. }
            | ArffError::Domain { line, column, .. }
            | ArffError::Encoding { line, column } => Some((line, column)),
            ArffError::Arity { line, .. } => Some((line, 1)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric,
    Nominal(Vec<String>),
    String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDecl {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeDecl {
    pub fn numeric(name: impl Into<String>) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn string(name: impl Into<String>) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttributeKind::String,
        }
    }

    pub fn nominal<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Self {
        AttributeDecl {
            name: name.into(),
            kind: AttributeKind::Nominal(values.into_iter().map(Into::into).collect()),
        }
    }

    pub fn nominal_values(&self) -> Option<&[String]> {
        match &self.kind {
            AttributeKind::Nominal(v) => Some(v),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err("attribute names must be non-empty".into());
        }
        if let AttributeKind::Nominal(values) = &self.kind {
            if values.is_empty() {
                return Err(format!("nominal attribute '{}' declares no values", self.name));
            }
            for (i, v) in values.iter().enumerate() {
                if values[..i].contains(v) {
                    return Err(format!(
                        "nominal attribute '{}' declares '{}' twice",
                        self.name, v
                    ));
                }
            }
        }
        Ok(())
    }
}

/// One cell of an instance row. Nominal values are stored as an index into
/// the attribute's declared value list.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Numeric(f64),
    Nominal(usize),
    String(String),
    Missing,
}

/// A raw review: its text and class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    pub label: String,
}

/// In-memory ARFF content. Immutable once built; every constructor checks
/// the structural invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    relation: String,
    attributes: Vec<AttributeDecl>,
    instances: Vec<Vec<Value>>,
    class_index: Option<usize>,
}

impl Dataset {
    pub fn new(
        relation: impl Into<String>,
        attributes: Vec<AttributeDecl>,
        instances: Vec<Vec<Value>>,
        class_index: Option<usize>,
    ) -> Result<Self, ArffError> {
        for a in &attributes {
            a.validate().map_err(ArffError::Invalid)?;
        }
        if let Some(ci) = class_index {
            match attributes.get(ci) {
                Some(a) if a.nominal_values().is_some() => {}
                Some(a) => {
                    return Err(ArffError::Invalid(format!(
                        "class attribute '{}' is not nominal",
                        a.name
                    )))
                }
                None => {
                    return Err(ArffError::Invalid(format!(
                        "class index {ci} out of range for {} attributes",
                        attributes.len()
                    )))
                }
            }
        }
        for (r, row) in instances.iter().enumerate() {
            if row.len() != attributes.len() {
                return Err(ArffError::Invalid(format!(
                    "instance {r} has {} values for {} attributes",
                    row.len(),
                    attributes.len()
                )));
            }
            for (value, attr) in row.iter().zip(&attributes) {
                let ok = match (value, &attr.kind) {
                    (Value::Missing, _) => true,
                    (Value::Numeric(x), AttributeKind::Numeric) => x.is_finite(),
                    (Value::Nominal(i), AttributeKind::Nominal(vals)) => *i < vals.len(),
                    (Value::String(_), AttributeKind::String) => true,
                    _ => false,
                };
                if !ok {
                    return Err(ArffError::Invalid(format!(
                        "instance {r}: value {value:?} does not fit attribute '{}'",
                        attr.name
                    )));
                }
            }
        }
        Ok(Dataset {
            relation: relation.into(),
            attributes,
            instances,
            class_index,
        })
    }

    pub fn relation_name(&self) -> &str {
        &self.relation
    }

    pub fn attributes(&self) -> &[AttributeDecl] {
        &self.attributes
    }

    pub fn instances(&self) -> &[Vec<Value>] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn class_index(&self) -> Option<usize> {
        self.class_index
    }

    pub fn class_values(&self) -> Option<&[String]> {
        self.class_index
            .and_then(|ci| self.attributes[ci].nominal_values())
    }

    /// Class label index of every instance; `None` where the class is missing.
    pub fn class_labels(&self) -> Option<Vec<Option<usize>>> {
        let ci = self.class_index?;
        Some(
            self.instances
                .iter()
                .map(|row| match row[ci] {
                    Value::Nominal(i) => Some(i),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn has_missing(&self) -> bool {
        self.instances
            .iter()
            .any(|row| row.iter().any(|v| matches!(v, Value::Missing)))
    }

    /// Same header, subset of rows (in the given order).
    pub fn select(&self, rows: &[usize]) -> Dataset {
        Dataset {
            relation: self.relation.clone(),
            attributes: self.attributes.clone(),
            instances: rows.iter().map(|&r| self.instances[r].clone()).collect(),
            class_index: self.class_index,
        }
    }

    /// Index of the single string attribute of a text dataset.
    pub fn text_attribute(&self) -> Result<usize, ArffError> {
        let strings: Vec<usize> = self
            .attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == AttributeKind::String)
            .map(|(i, _)| i)
            .collect();
        match (strings.as_slice(), self.class_index) {
            ([s], Some(_)) if self.attributes.len() == 2 => Ok(*s),
            _ => Err(ArffError::Invalid(
                "expected exactly one string attribute and one nominal class attribute".into(),
            )),
        }
    }

    /// Text documents of a (string, class) dataset.
    pub fn documents(&self) -> Result<Vec<Document>, ArffError> {
        let ti = self.text_attribute()?;
        let ci = self.class_index.expect("checked by text_attribute");
        let classes = self.class_values().expect("class is nominal");
        self.instances
            .iter()
            .enumerate()
            .map(|(r, row)| match (&row[ti], &row[ci]) {
                (Value::String(text), Value::Nominal(c)) => Ok(Document {
                    text: text.clone(),
                    label: classes[*c].clone(),
                }),
                _ => Err(ArffError::Invalid(format!("instance {r} has a missing value"))),
            })
            .collect()
    }

    /// Builds a two-attribute text dataset (`text`, class) from documents.
    pub fn from_documents(
        relation: impl Into<String>,
        class_values: Vec<String>,
        docs: &[Document],
    ) -> Result<Dataset, ArffError> {
        let rows = docs
            .iter()
            .map(|d| {
                let c = class_values
                    .iter()
                    .position(|v| *v == d.label)
                    .ok_or_else(|| {
                        ArffError::Invalid(format!("label '{}' is not a declared class", d.label))
                    })?;
                Ok(vec![Value::String(d.text.clone()), Value::Nominal(c)])
            })
            .collect::<Result<Vec<_>, ArffError>>()?;
        Dataset::new(
            relation,
            vec![
                AttributeDecl::string(TEXT_ATTRIBUTE),
                AttributeDecl::nominal(CLASS_ATTRIBUTE, class_values),
            ],
            rows,
            Some(1),
        )
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Bare(String),
    Quoted(String),
    LBrace,
    RBrace,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    column: usize,
}

impl Token {
    fn text(&self) -> Option<&str> {
        match &self.kind {
            TokKind::Bare(s) | TokKind::Quoted(s) => Some(s),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        match &self.kind {
            TokKind::Bare(s) => format!("'{s}'"),
            TokKind::Quoted(s) => format!("quoted '{s}'"),
            TokKind::LBrace => "'{'".into(),
            TokKind::RBrace => "'}'".into(),
            TokKind::Comma => "','".into(),
        }
    }
}

fn is_bare_terminator(c: char) -> bool {
    c.is_whitespace() || matches!(c, ',' | '{' | '}' | '%' | '\'' | '"')
}

fn lex_line(line: &str, line_no: usize) -> Result<Vec<Token>, ArffError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '%' => break,
            '{' => {
                tokens.push(Token { kind: TokKind::LBrace, column });
                i += 1;
            }
            '}' => {
                tokens.push(Token { kind: TokKind::RBrace, column });
                i += 1;
            }
            ',' => {
                tokens.push(Token { kind: TokKind::Comma, column });
                i += 1;
            }
            '\'' | '"' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&ch) = chars.get(i) else {
                        return Err(ArffError::Syntax {
                            line: line_no,
                            column,
                            message: "unterminated quoted token".into(),
                        });
                    };
                    if ch == quote {
                        if chars.get(i + 1) == Some(&quote) {
                            s.push(quote);
                            i += 2;
                        } else {
                            i += 1;
                            break;
                        }
                    } else if ch == '\\' {
                        match chars.get(i + 1) {
                            Some('n') => s.push('\n'),
                            Some('r') => s.push('\r'),
                            Some('t') => s.push('\t'),
                            Some('\\') => s.push('\\'),
                            Some('\'') => s.push('\''),
                            Some('"') => s.push('"'),
                            Some(&other) => {
                                s.push('\\');
                                s.push(other);
                            }
                            None => s.push('\\'),
                        }
                        i += 2;
                    } else {
                        s.push(ch);
                        i += 1;
                    }
                }
                tokens.push(Token {
                    kind: TokKind::Quoted(s),
                    column,
                });
            }
            _ => {
                let start = i;
                while i < chars.len() && !is_bare_terminator(chars[i]) {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokKind::Bare(chars[start..i].iter().collect()),
                    column,
                });
            }
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ArffError {
    ArffError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses ARFF from raw bytes, rejecting invalid UTF-8 with its position.
pub fn parse_arff_bytes(bytes: &[u8]) -> Result<Dataset, ArffError> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse_arff(s),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid
                .iter()
                .rposition(|&b| b == b'\n')
                .map_or(0, |p| p + 1);
            // valid prefix is UTF-8, so this cannot fail
            let column = std::str::from_utf8(&valid[line_start..])
                .map_or(1, |s| s.chars().count() + 1);
            Err(ArffError::Encoding { line, column })
        }
    }
}

pub fn parse_arff(source: &str) -> Result<Dataset, ArffError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let mut relation: Option<String> = None;
    let mut attributes: Vec<AttributeDecl> = Vec::new();
    let mut instances: Vec<Vec<Value>> = Vec::new();
    let mut in_data = false;
    let mut last_line = 0;

    for (idx, raw) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = lex_line(line, line_no)?;
        if tokens.is_empty() {
            continue;
        }
        if in_data {
            instances.push(parse_row(&tokens, &attributes, line_no)?);
            continue;
        }

        let head = &tokens[0];
        let keyword = match &head.kind {
            TokKind::Bare(s) if s.starts_with('@') => s.to_ascii_lowercase(),
            _ => {
                return Err(syntax(
                    line_no,
                    head.column,
                    format!("expected a declaration, found {}", head.describe()),
                ))
            }
        };
        match keyword.as_str() {
            "@relation" => {
                if relation.is_some() {
                    return Err(syntax(line_no, head.column, "duplicate @relation"));
                }
                if !attributes.is_empty() {
                    return Err(syntax(line_no, head.column, "@relation must precede @attribute"));
                }
                relation = Some(single_name(&tokens, line_no, "relation")?);
            }
            "@attribute" => {
                if relation.is_none() {
                    return Err(syntax(line_no, head.column, "@attribute before @relation"));
                }
                attributes.push(parse_attribute(&tokens, line_no)?);
            }
            "@data" => {
                if attributes.is_empty() {
                    return Err(syntax(line_no, head.column, "@data before any @attribute"));
                }
                if let Some(extra) = tokens.get(1) {
                    return Err(syntax(line_no, extra.column, "unexpected token after @data"));
                }
                in_data = true;
            }
            _ => {
                return Err(syntax(
                    line_no,
                    head.column,
                    format!("unknown declaration {}", head.describe()),
                ))
            }
        }
    }

    if !in_data {
        return Err(syntax(last_line.max(1), 1, "unexpected end of input: missing @data section"));
    }
    let class_index = match attributes.last() {
        Some(a) if a.nominal_values().is_some() => Some(attributes.len() - 1),
        _ => None,
    };
    Dataset::new(relation.unwrap_or_default(), attributes, instances, class_index)
}

fn single_name(tokens: &[Token], line_no: usize, what: &str) -> Result<String, ArffError> {
    let Some(tok) = tokens.get(1) else {
        return Err(syntax(line_no, tokens[0].column, format!("missing {what} name")));
    };
    let name = tok
        .text()
        .ok_or_else(|| syntax(line_no, tok.column, format!("expected {what} name, found {}", tok.describe())))?;
    if let Some(extra) = tokens.get(2) {
        return Err(syntax(line_no, extra.column, format!("unexpected {} after {what} name", extra.describe())));
    }
    Ok(name.to_string())
}

fn parse_attribute(tokens: &[Token], line_no: usize) -> Result<AttributeDecl, ArffError> {
    let name_tok = tokens
        .get(1)
        .ok_or_else(|| syntax(line_no, tokens[0].column, "missing attribute name"))?;
    let name = name_tok
        .text()
        .ok_or_else(|| syntax(line_no, name_tok.column, "expected attribute name"))?
        .to_string();
    if name.is_empty() {
        return Err(syntax(line_no, name_tok.column, "empty attribute name"));
    }
    let type_tok = tokens
        .get(2)
        .ok_or_else(|| syntax(line_no, name_tok.column, "missing attribute type"))?;
    let (kind, consumed) = match &type_tok.kind {
        TokKind::Bare(t) => {
            let kind = match t.to_ascii_lowercase().as_str() {
                "numeric" | "real" | "integer" => AttributeKind::Numeric,
                "string" => AttributeKind::String,
                other => {
                    return Err(syntax(
                        line_no,
                        type_tok.column,
                        format!("unsupported attribute type '{other}'"),
                    ))
                }
            };
            (kind, 3)
        }
        TokKind::LBrace => {
            let mut values = Vec::new();
            let mut i = 3;
            loop {
                let tok = tokens
                    .get(i)
                    .ok_or_else(|| syntax(line_no, type_tok.column, "unterminated nominal value list"))?;
                match (&tok.kind, values.is_empty()) {
                    (TokKind::RBrace, true) if i == 3 => {
                        return Err(syntax(line_no, tok.column, "empty nominal value list"))
                    }
                    (TokKind::Bare(v) | TokKind::Quoted(v), _) => {
                        if values.contains(v) {
                            return Err(syntax(line_no, tok.column, format!("duplicate nominal value '{v}'")));
                        }
                        values.push(v.clone());
                        let sep = tokens
                            .get(i + 1)
                            .ok_or_else(|| syntax(line_no, tok.column, "unterminated nominal value list"))?;
                        match sep.kind {
                            TokKind::Comma => i += 2,
                            TokKind::RBrace => {
                                i += 2;
                                break;
                            }
                            _ => {
                                return Err(syntax(
                                    line_no,
                                    sep.column,
                                    format!("expected ',' or '}}', found {}", sep.describe()),
                                ))
                            }
                        }
                    }
                    _ => {
                        return Err(syntax(
                            line_no,
                            tok.column,
                            format!("expected nominal value, found {}", tok.describe()),
                        ))
                    }
                }
            }
            (AttributeKind::Nominal(values), i)
        }
        _ => {
            return Err(syntax(
                line_no,
                type_tok.column,
                format!("expected attribute type, found {}", type_tok.describe()),
            ))
        }
    };
    if let Some(extra) = tokens.get(consumed) {
        return Err(syntax(
            line_no,
            extra.column,
            format!("unexpected {} after attribute type", extra.describe()),
        ));
    }
    Ok(AttributeDecl { name, kind })
}

fn convert_value(tok: &Token, attr: &AttributeDecl, line_no: usize) -> Result<Value, ArffError> {
    let (text, quoted) = match &tok.kind {
        TokKind::Bare(s) => (s.as_str(), false),
        TokKind::Quoted(s) => (s.as_str(), true),
        _ => {
            return Err(syntax(
                line_no,
                tok.column,
                format!("expected a value, found {}", tok.describe()),
            ))
        }
    };
    if !quoted && text == "?" {
        return Ok(Value::Missing);
    }
    let domain = |message: String| ArffError::Domain {
        line: line_no,
        column: tok.column,
        message,
    };
    match &attr.kind {
        AttributeKind::Numeric => match text.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Value::Numeric(x)),
            _ => Err(domain(format!(
                "'{text}' is not a finite number (attribute '{}')",
                attr.name
            ))),
        },
        AttributeKind::Nominal(values) => values
            .iter()
            .position(|v| v == text)
            .map(Value::Nominal)
            .ok_or_else(|| domain(format!("'{text}' is not declared for attribute '{}'", attr.name))),
        AttributeKind::String => Ok(Value::String(text.to_string())),
    }
}

fn parse_row(tokens: &[Token], attributes: &[AttributeDecl], line_no: usize) -> Result<Vec<Value>, ArffError> {
    if tokens[0].kind == TokKind::LBrace {
        return parse_sparse_row(tokens, attributes, line_no);
    }
    let mut values = Vec::with_capacity(attributes.len());
    let mut i = 0;
    loop {
        let tok = &tokens[i];
        match attributes.get(values.len()) {
            Some(attr) => values.push(convert_value(tok, attr, line_no)?),
            None => {
                // count the remaining values for the arity report
                let found = values.len()
                    + tokens[i..].iter().filter(|t| t.text().is_some()).count();
                return Err(ArffError::Arity {
                    line: line_no,
                    expected: attributes.len(),
                    found,
                });
            }
        }
        match tokens.get(i + 1) {
            None => break,
            Some(t) if t.kind == TokKind::Comma => {
                if tokens.get(i + 2).is_none() {
                    return Err(syntax(line_no, t.column, "trailing ','"));
                }
                i += 2;
            }
            Some(t) => {
                return Err(syntax(
                    line_no,
                    t.column,
                    format!("expected ',' between values, found {}", t.describe()),
                ))
            }
        }
    }
    if values.len() != attributes.len() {
        return Err(ArffError::Arity {
            line: line_no,
            expected: attributes.len(),
            found: values.len(),
        });
    }
    Ok(values)
}

fn parse_sparse_row(tokens: &[Token], attributes: &[AttributeDecl], line_no: usize) -> Result<Vec<Value>, ArffError> {
    let mut slots: Vec<Option<Value>> = vec![None; attributes.len()];
    let mut i = 1;
    let mut expect_entry = false;
    loop {
        let tok = tokens
            .get(i)
            .ok_or_else(|| syntax(line_no, tokens[i - 1].column, "unterminated sparse row"))?;
        if tok.kind == TokKind::RBrace && !expect_entry {
            if let Some(extra) = tokens.get(i + 1) {
                return Err(syntax(line_no, extra.column, "unexpected token after sparse row"));
            }
            break;
        }
        let index = match &tok.kind {
            TokKind::Bare(s) => s
                .parse::<usize>()
                .map_err(|_| syntax(line_no, tok.column, format!("invalid sparse index '{s}'")))?,
            _ => {
                return Err(syntax(
                    line_no,
                    tok.column,
                    format!("expected sparse index, found {}", tok.describe()),
                ))
            }
        };
        let attr = attributes.get(index).ok_or_else(|| ArffError::Domain {
            line: line_no,
            column: tok.column,
            message: format!("sparse index {index} out of range ({} attributes)", attributes.len()),
        })?;
        if slots[index].is_some() {
            return Err(syntax(line_no, tok.column, format!("sparse index {index} repeated")));
        }
        let value_tok = tokens
            .get(i + 1)
            .ok_or_else(|| syntax(line_no, tok.column, "sparse entry missing its value"))?;
        slots[index] = Some(convert_value(value_tok, attr, line_no)?);
        match tokens.get(i + 2) {
            Some(t) if t.kind == TokKind::Comma => {
                expect_entry = true;
                i += 3;
            }
            Some(t) if t.kind == TokKind::RBrace => {
                expect_entry = false;
                i += 2;
            }
            Some(t) => {
                return Err(syntax(
                    line_no,
                    t.column,
                    format!("expected ',' or '}}' in sparse row, found {}", t.describe()),
                ))
            }
            None => return Err(syntax(line_no, value_tok.column, "unterminated sparse row")),
        }
    }
    slots
        .into_iter()
        .zip(attributes)
        .map(|(slot, attr)| match (slot, &attr.kind) {
            (Some(v), _) => Ok(v),
            (None, AttributeKind::Numeric) => Ok(Value::Numeric(0.0)),
            (None, AttributeKind::Nominal(_)) => Ok(Value::Nominal(0)),
            (None, AttributeKind::String) => Err(ArffError::Domain {
                line: line_no,
                column: 1,
                message: format!("sparse row omits string attribute '{}'", attr.name),
            }),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

/// Row layout used by the writer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowStyle {
    #[default]
    Dense,
    /// `{index value,...}`, omitting numeric zeros and first-declared nominal values.
    Sparse,
}

fn needs_quoting(s: &str) -> bool {
    s.is_empty()
        || s == "?"
        || s.chars().any(|c| {
            c.is_whitespace() || c.is_control() || matches!(c, ',' | '\'' | '"' | '%' | '{' | '}' | '\\')
        })
}

/// Quotes `s` when it would not survive as a bare token.
pub fn quote(s: &str) -> String {
    if !needs_quoting(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        match c {
            '\'' => out.push_str("''"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

fn format_value(out: &mut String, value: &Value, attr: &AttributeDecl) {
    match value {
        Value::Missing => out.push('?'),
        Value::Numeric(x) => {
            let _ = write!(out, "{x}");
        }
        Value::Nominal(i) => out.push_str(&quote(&attr.nominal_values().expect("nominal attribute")[*i])),
        Value::String(s) => out.push_str(&quote(s)),
    }
}

/// Canonical dense ARFF text for `dataset`.
pub fn write_arff(dataset: &Dataset) -> String {
    write_arff_with(dataset, RowStyle::Dense)
}

pub fn write_arff_with(dataset: &Dataset, style: RowStyle) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "@relation {}\n", quote(&dataset.relation));
    for attr in &dataset.attributes {
        let _ = write!(out, "@attribute {} ", quote(&attr.name));
        match &attr.kind {
            AttributeKind::Numeric => out.push_str("numeric"),
            AttributeKind::String => out.push_str("string"),
            AttributeKind::Nominal(values) => {
                out.push('{');
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&quote(v));
                }
                out.push('}');
            }
        }
        out.push('\n');
    }
    out.push_str("\n@data\n");
    for row in &dataset.instances {
        match style {
            RowStyle::Dense => {
                for (i, (v, attr)) in row.iter().zip(&dataset.attributes).enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    format_value(&mut out, v, attr);
                }
            }
            RowStyle::Sparse => {
                out.push('{');
                let mut first = true;
                for (i, (v, attr)) in row.iter().zip(&dataset.attributes).enumerate() {
                    let implicit = match v {
                        Value::Numeric(x) => *x == 0.0,
                        Value::Nominal(n) => *n == 0,
                        _ => false,
                    };
                    if implicit {
                        continue;
                    }
                    if !first {
                        out.push(',');
                    }
                    first = false;
                    let _ = write!(out, "{i} ");
                    format_value(&mut out, v, attr);
                }
                out.push('}');
            }
        }
        out.push('\n');
    }
    out
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_arff(self))
    }
}

// ---------------------------------------------------------------------------
// Text directory loader
// ---------------------------------------------------------------------------

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArffError + '_ {
    move |source| ArffError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<(String, PathBuf)>, ArffError> {
    let mut entries = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else {
            return Err(ArffError::Io {
                path: entry.path(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, "file name is not UTF-8"),
            });
        };
        if name.starts_with('.') {
            continue;
        }
        entries.push((name.to_string(), entry.path()));
    }
    entries.sort();
    Ok(entries)
}

/// Loads `root/<class>/<file>` into a (`text`, `@@class@@`) dataset.
///
/// Class values are the subdirectory names in sorted order, including
/// subdirectories that hold no files. Instances are ordered by class and
/// then by file name; hidden entries (leading `.`) are skipped.
pub fn load_text_directory(root: &Path) -> Result<Dataset, ArffError> {
    let mut classes = Vec::new();
    let mut docs = Vec::new();
    for (name, path) in sorted_entries(root)? {
        if !path.is_dir() {
            continue;
        }
        classes.push(name.clone());
        for (_, file) in sorted_entries(&path)? {
            if !file.is_file() {
                continue;
            }
            let bytes = fs::read(&file).map_err(io_err(&file))?;
            let text = String::from_utf8(bytes).map_err(|e| ArffError::Io {
                path: file.clone(),
                source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
            })?;
            docs.push(Document {
                text,
                label: name.clone(),
            });
        }
    }
    if docs.is_empty() {
        return Err(ArffError::EmptyCorpus(root.to_path_buf()));
    }
    let relation = root
        .file_name()
        .and_then(|n| n.to_str())
        .filter(|n| !n.is_empty())
        .unwrap_or("text_files");
    Dataset::from_documents(relation, classes, &docs)
}
