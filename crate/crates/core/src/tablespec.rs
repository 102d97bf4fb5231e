//! Table-specification text: OCR clean-up, parsing and the schema IR.
//!
//! The accepted document layout is a title line naming the table, a header line
//! (`Column Name  Data type  Size  Constraint`) and one row per column:
//!
//! ```text
//! Student Mark
//! Column Name  Data type  Size  Constraint
//! Stud_id      Number     9     Primary key
//! Total        Number     6,3   Check <100
//! Result       Varchar2   10    Check "pass" or "fail"
//! ```
//!
//! Rows are split on the datatype keyword rather than on fixed byte offsets, so
//! spacing shifted by OCR does not matter. Words before the keyword form the
//! column name (joined with `_`), the token after it is the size, and whatever
//! remains is constraint text.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Maximum NUMBER precision accepted by the target dialect.
pub const MAX_PRECISION: u32 = 38;
/// Maximum VARCHAR2 length accepted by the target dialect.
pub const MAX_LENGTH: u32 = 4000;

/// OCR text after normalization, one entry per non-blank line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSpecDocument {
    pub source_name: String,
    pub lines: Vec<String>,
}

impl RawSpecDocument {
    /// Normalizes `raw` and splits it into lines.
    pub fn from_text(source_name: impl Into<String>, raw: &str) -> Self {
        let normalized = normalize_ocr_text(raw);
        RawSpecDocument {
            source_name: source_name.into(),
            lines: normalized.lines().map(str::to_owned).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Datatype {
    Number,
    Varchar2,
}

impl Datatype {
    fn from_keyword(word: &str) -> Option<Self> {
        if word.eq_ignore_ascii_case("number") {
            Some(Datatype::Number)
        } else if word.eq_ignore_ascii_case("varchar2") {
            Some(Datatype::Varchar2)
        } else {
            None
        }
    }

    /// Keyword as written in table-specification documents.
    pub fn spec_keyword(self) -> &'static str {
        match self {
            Datatype::Number => "Number",
            Datatype::Varchar2 => "Varchar2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "UPPERCASE")]
pub enum SizeSpec {
    Length { length: u32 },
    Precision { precision: u32, scale: Option<u32> },
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SizeSpec::Length { length } => write!(f, "{length}"),
            SizeSpec::Precision { precision, scale: None } => write!(f, "{precision}"),
            SizeSpec::Precision { precision, scale: Some(s) } => write!(f, "{precision},{s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    pub const ALL: [CompareOp; 6] = [
        CompareOp::Lt,
        CompareOp::Le,
        CompareOp::Gt,
        CompareOp::Ge,
        CompareOp::Eq,
        CompareOp::Ne,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "=",
            CompareOp::Ne => "<>",
        }
    }

    /// Longest operator prefix of `s` and the text after it.
    fn strip_prefix(s: &str) -> Option<(CompareOp, &str)> {
        const TABLE: [(&str, CompareOp); 7] = [
            ("<=", CompareOp::Le),
            (">=", CompareOp::Ge),
            ("<>", CompareOp::Ne),
            ("!=", CompareOp::Ne),
            ("<", CompareOp::Lt),
            (">", CompareOp::Gt),
            ("=", CompareOp::Eq),
        ];
        TABLE
            .iter()
            .find_map(|(sym, op)| s.strip_prefix(sym).map(|rest| (*op, rest)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintSpec {
    None,
    PrimaryKey,
    Unique,
    CheckComparison { op: CompareOp, literal: f64 },
    CheckEnum { values: Vec<String> },
}

impl ConstraintSpec {
    pub fn is_check(&self) -> bool {
        matches!(
            self,
            ConstraintSpec::CheckComparison { .. } | ConstraintSpec::CheckEnum { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub datatype: Datatype,
    /// `None` only for a NUMBER written without a size.
    pub size: Option<SizeSpec>,
    pub constraint: ConstraintSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub table_name: String,
    pub columns: Vec<ColumnSpec>,
}

impl TableSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("TableSpec serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// An invariant breach reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Violation {
    EmptyTable,
    InvalidIdentifier { name: String },
    DuplicateColumn { name: String },
    MultiplePrimaryKeys { columns: Vec<String> },
    ScaleExceedsPrecision { column: String },
    PrecisionOutOfRange { column: String },
    LengthOutOfRange { column: String },
    SizeKindMismatch { column: String },
    MissingLength { column: String },
    EmptyCheckEnum { column: String },
    InvalidEnumValue { column: String, value: String },
    NonFiniteLiteral { column: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyTable => write!(f, "table has no columns"),
            Violation::InvalidIdentifier { name } => write!(f, "invalid identifier {name:?}"),
            Violation::DuplicateColumn { name } => write!(f, "duplicate column {name:?}"),
            Violation::MultiplePrimaryKeys { columns } => {
                write!(f, "more than one primary key: {}", columns.join(", "))
            }
            Violation::ScaleExceedsPrecision { column } => {
                write!(f, "{column}: scale exceeds precision")
            }
            Violation::PrecisionOutOfRange { column } => {
                write!(f, "{column}: precision outside 1..={MAX_PRECISION}")
            }
            Violation::LengthOutOfRange { column } => {
                write!(f, "{column}: length outside 1..={MAX_LENGTH}")
            }
            Violation::SizeKindMismatch { column } => {
                write!(f, "{column}: size form does not match datatype")
            }
            Violation::MissingLength { column } => write!(f, "{column}: VARCHAR2 needs a length"),
            Violation::EmptyCheckEnum { column } => write!(f, "{column}: check lists no values"),
            Violation::InvalidEnumValue { column, value } => {
                write!(f, "{column}: unusable check value {value:?}")
            }
            Violation::NonFiniteLiteral { column } => {
                write!(f, "{column}: check literal is not finite")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: unknown datatype in {text:?}")]
    UnknownDatatype { line: usize, text: String },
    #[error("line {line}: malformed size in {text:?}")]
    MalformedSize { line: usize, text: String },
    #[error("line {line}: malformed constraint in {text:?}")]
    MalformedConstraint { line: usize, text: String },
    #[error("header line `Column Name / Data type / Size / Constraint` not found")]
    MissingHeader,
    #[error("no table name before the header line")]
    MissingTitle,
    #[error("table has no data rows")]
    EmptyTable,
    #[error("table violates schema rules: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
}

impl ParseError {
    /// Variant name, for error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::UnknownDatatype { .. } => "UnknownDatatype",
            ParseError::MalformedSize { .. } => "MalformedSize",
            ParseError::MalformedConstraint { .. } => "MalformedConstraint",
            ParseError::MissingHeader => "MissingHeader",
            ParseError::MissingTitle => "MissingTitle",
            ParseError::EmptyTable => "EmptyTable",
            ParseError::Invalid(_) => "Invalid",
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Text-level OCR rectification.
///
/// Tabs and whitespace runs become a single space, lines are trimmed and blank
/// lines dropped, smart quotes become ASCII quotes. Inside a token that is
/// otherwise numeric (digits and commas, optionally led by a comparison
/// operator) the letters `O`/`o` become `0` and `l`/`I` become `1`.
/// Identifiers are never touched.
pub fn normalize_ocr_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for line in raw.lines() {
        let line: String = line
            .chars()
            .map(|c| match c {
                '\u{201C}' | '\u{201D}' => '"',
                '\u{2018}' | '\u{2019}' => '\'',
                c => c,
            })
            .collect();
        let mut first = true;
        for token in line.split_whitespace() {
            if first {
                if !out.is_empty() {
                    out.push('\n');
                }
                first = false;
            } else {
                out.push(' ');
            }
            repair_numeric_token(token, &mut out);
        }
    }
    out
}

fn repair_numeric_token(token: &str, out: &mut String) {
    let body = token.trim_start_matches(['<', '>', '=', '!']);
    let prefix = &token[..token.len() - body.len()];
    let confusable = |c: char| matches!(c, 'O' | 'o' | 'l' | 'I');
    let numeric_context = body.chars().any(|c| c.is_ascii_digit())
        && body
            .chars()
            .all(|c| c.is_ascii_digit() || c == ',' || confusable(c));
    if !numeric_context {
        out.push_str(token);
        return;
    }
    out.push_str(prefix);
    out.extend(body.chars().map(|c| match c {
        'O' | 'o' => '0',
        'l' | 'I' => '1',
        c => c,
    }));
}

fn is_header(line: &str) -> bool {
    let letters: String = line
        .chars()
        .filter(char::is_ascii_alphabetic)
        .map(|c| c.to_ascii_lowercase())
        .collect();
    letters == "columnnamedatatypesizeconstraint"
}

/// `[A-Za-z][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a normalized document into a validated [`TableSpec`].
pub fn parse_table_spec(doc: &RawSpecDocument) -> Result<TableSpec, ParseError> {
    let header_at = doc
        .lines
        .iter()
        .position(|l| is_header(l))
        .ok_or(ParseError::MissingHeader)?;
    let title = doc.lines[..header_at]
        .iter()
        .find(|l| !l.trim().is_empty())
        .ok_or(ParseError::MissingTitle)?;
    let table_name = title.split_whitespace().collect::<Vec<_>>().join("_");

    let columns = doc.lines[header_at + 1..]
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_row(header_at + 2 + i, l))
        .collect::<Result<Vec<_>, _>>()?;
    if columns.is_empty() {
        return Err(ParseError::EmptyTable);
    }

    let spec = TableSpec {
        table_name,
        columns,
    };
    let violations = validate(&spec);
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(ParseError::Invalid(violations))
    }
}

/// Convenience wrapper: normalize `raw` then parse it.
pub fn parse_table_text(source_name: &str, raw: &str) -> Result<TableSpec, ParseError> {
    parse_table_spec(&RawSpecDocument::from_text(source_name, raw))
}

fn parse_row(line_no: usize, line: &str) -> Result<ColumnSpec, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let unknown = || ParseError::UnknownDatatype {
        line: line_no,
        text: line.to_owned(),
    };
    let malformed_size = || ParseError::MalformedSize {
        line: line_no,
        text: line.to_owned(),
    };

    // The name occupies at least the first token. When a keyword is directly
    // followed by another keyword ("Phone Number Varchar2 10") the first one is
    // part of the name.
    let (dt_at, datatype) = (1..tokens.len())
        .filter_map(|i| Datatype::from_keyword(tokens[i]).map(|d| (i, d)))
        .find(|&(i, _)| {
            tokens
                .get(i + 1)
                .map_or(true, |next| Datatype::from_keyword(next).is_none())
        })
        .ok_or_else(unknown)?;
    let name = tokens[..dt_at].join("_");

    let mut rest = &tokens[dt_at + 1..];
    let mut size_text = None;
    if let Some(first) = rest.first() {
        if first.starts_with(|c: char| c.is_ascii_digit() || c == '(') {
            // OCR sometimes splits "5,3" into "5," and "3".
            if first.ends_with(',') && rest.len() > 1 && rest[1].chars().all(|c| c.is_ascii_digit())
            {
                size_text = Some(format!("{first}{}", rest[1]));
                rest = &rest[2..];
            } else {
                size_text = Some((*first).to_owned());
                rest = &rest[1..];
            }
        }
    }
    let size = match size_text {
        Some(t) => Some(parse_size(&t, datatype).ok_or_else(malformed_size)?),
        None if datatype == Datatype::Varchar2 => return Err(malformed_size()),
        None => None,
    };

    let constraint_text = rest.join(" ");
    let constraint =
        parse_constraint(&constraint_text, &name).ok_or_else(|| ParseError::MalformedConstraint {
            line: line_no,
            text: line.to_owned(),
        })?;

    Ok(ColumnSpec {
        name,
        datatype,
        size,
        constraint,
    })
}

fn parse_size(text: &str, datatype: Datatype) -> Option<SizeSpec> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .unwrap_or(text);
    let number = |s: &str| -> Option<u32> {
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    let mut parts = inner.split(',');
    let first = number(parts.next()?)?;
    let second = parts.next().map(number);
    if parts.next().is_some() {
        return None;
    }
    match (datatype, second) {
        (Datatype::Varchar2, None) => Some(SizeSpec::Length { length: first }),
        (Datatype::Varchar2, Some(_)) => None,
        (Datatype::Number, None) => Some(SizeSpec::Precision {
            precision: first,
            scale: None,
        }),
        (Datatype::Number, Some(scale)) => Some(SizeSpec::Precision {
            precision: first,
            scale: Some(scale?),
        }),
    }
}

/// Constraint grammar, case-insensitive:
///
/// ```text
/// constraint := ""
///             | "primary" "key"
///             | "unique"
///             | "check" [column] op number
///             | "check" quoted (("or" | ",") quoted)*
/// ```
fn parse_constraint(text: &str, column: &str) -> Option<ConstraintSpec> {
    let text = text.trim();
    if text.is_empty() {
        return Some(ConstraintSpec::None);
    }
    let words: Vec<String> = text
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words == ["primary", "key"] {
        return Some(ConstraintSpec::PrimaryKey);
    }
    if words == ["unique"] {
        return Some(ConstraintSpec::Unique);
    }

    let head = text.get(..5)?;
    if !head.eq_ignore_ascii_case("check") {
        return None;
    }
    let after = &text[5..];
    if after.starts_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let mut body = after.trim_start();
    if body.starts_with(['"', '\'']) {
        return parse_enum_values(body).map(|values| ConstraintSpec::CheckEnum { values });
    }

    if body.starts_with(|c: char| c.is_ascii_alphabetic()) {
        let end = body
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(body.len());
        if !body[..end].eq_ignore_ascii_case(column) {
            return None;
        }
        body = body[end..].trim_start();
    }
    let (op, literal) = CompareOp::strip_prefix(body)?;
    let literal = parse_literal(literal.trim())?;
    Some(ConstraintSpec::CheckComparison { op, literal })
}

/// `-?digits(.digits)?`
fn parse_literal(s: &str) -> Option<f64> {
    let unsigned = s.strip_prefix('-').unwrap_or(s);
    let mut halves = unsigned.splitn(2, '.');
    let int = halves.next()?;
    let frac = halves.next();
    let digits = |p: &str| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit());
    if !digits(int) || frac.is_some_and(|f| !digits(f)) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_enum_values(mut s: &str) -> Option<Vec<String>> {
    let mut values = Vec::new();
    loop {
        let quote = s.chars().next().filter(|c| *c == '"' || *c == '\'')?;
        let close = s[1..].find(quote)? + 1;
        let value = &s[1..close];
        if value.trim().is_empty() {
            return None;
        }
        values.push(value.to_owned());
        s = s[close + 1..].trim_start();
        if s.is_empty() {
            return Some(values);
        }
        if let Some(rest) = s.strip_prefix(',') {
            s = rest.trim_start();
        } else if s.get(..3).is_some_and(|w| w.eq_ignore_ascii_case("or ")) {
            s = s[3..].trim_start();
        } else {
            return None;
        }
    }
}

/// Reports every invariant breach in `spec`; empty means valid.
pub fn validate(spec: &TableSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    if !is_identifier(&spec.table_name) {
        out.push(Violation::InvalidIdentifier {
            name: spec.table_name.clone(),
        });
    }
    if spec.columns.is_empty() {
        out.push(Violation::EmptyTable);
    }

    let mut seen: Vec<String> = Vec::new();
    for col in &spec.columns {
        let name = &col.name;
        if !is_identifier(name) {
            out.push(Violation::InvalidIdentifier { name: name.clone() });
        }
        let folded = name.to_ascii_lowercase();
        if seen.contains(&folded) {
            out.push(Violation::DuplicateColumn { name: name.clone() });
        } else {
            seen.push(folded);
        }

        match (col.datatype, col.size) {
            (Datatype::Number, Some(SizeSpec::Precision { precision, scale })) => {
                if !(1..=MAX_PRECISION).contains(&precision) {
                    out.push(Violation::PrecisionOutOfRange {
                        column: name.clone(),
                    });
                }
                if scale.is_some_and(|s| s > precision) {
                    out.push(Violation::ScaleExceedsPrecision {
                        column: name.clone(),
                    });
                }
            }
            (Datatype::Number, None) => {}
            (Datatype::Varchar2, Some(SizeSpec::Length { length })) => {
                if !(1..=MAX_LENGTH).contains(&length) {
                    out.push(Violation::LengthOutOfRange {
                        column: name.clone(),
                    });
                }
            }
            (Datatype::Varchar2, None) => out.push(Violation::MissingLength {
                column: name.clone(),
            }),
            _ => out.push(Violation::SizeKindMismatch {
                column: name.clone(),
            }),
        }

        match &col.constraint {
            ConstraintSpec::CheckEnum { values } => {
                if values.is_empty() {
                    out.push(Violation::EmptyCheckEnum {
                        column: name.clone(),
                    });
                }
                for v in values {
                    if !is_usable_enum_value(v) {
                        out.push(Violation::InvalidEnumValue {
                            column: name.clone(),
                            value: v.clone(),
                        });
                    }
                }
            }
            ConstraintSpec::CheckComparison { literal, .. } if !literal.is_finite() => {
                out.push(Violation::NonFiniteLiteral {
                    column: name.clone(),
                });
            }
            _ => {}
        }
    }

    let pks: Vec<String> = spec
        .columns
        .iter()
        .filter(|c| c.constraint == ConstraintSpec::PrimaryKey)
        .map(|c| c.name.clone())
        .collect();
    if pks.len() > 1 {
        out.push(Violation::MultiplePrimaryKeys { columns: pks });
    }
    out
}

/// A check value must survive being written into a spec document and read back.
fn is_usable_enum_value(v: &str) -> bool {
    !v.is_empty() && !v.contains('"') && normalize_ocr_text(v) == v
}
