//! The JSON group-file format and the matrix-entry expression grammar.
//!
//! Entry grammar (z denotes zeta_m):
//!
//! ```text
//! expression := ['+'|'-'] term (('+'|'-') term)*
//! term       := rational ('*' zpow)? | zpow
//! zpow       := 'z' ('^' int)?
//! rational   := int ('/' posint)?
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{QaleError, Result};
use crate::exact::{CycMatrix, CycNumber, Rational, MAX_CYCLOTOMIC_ORDER, MAX_MATRIX_DIM};

/// A parsed group description: generators of a finite subgroup of SU(n)
/// given over Q(zeta_m), plus optional invariant-cohomology overrides
/// (orbit index -> degree -> dimension) and a symplectic-membership flag.
#[derive(Debug, Clone)]
pub struct GroupFile {
    pub name: String,
    pub dimension: usize,
    pub cyclotomic_order: usize,
    pub generators: Vec<CycMatrix>,
    pub overrides: BTreeMap<usize, BTreeMap<usize, u64>>,
    pub force_sp: bool,
}

#[derive(Deserialize)]
struct RawGroupFile {
    name: String,
    dimension: usize,
    cyclotomic_order: usize,
    generators: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    overrides: BTreeMap<String, BTreeMap<String, u64>>,
    #[serde(default)]
    force_sp: Option<bool>,
}

pub fn parse_group_file(path: &Path) -> Result<GroupFile> {
    let text = std::fs::read_to_string(path).map_err(|e| QaleError::Io(e.to_string()))?;
    parse_group_str(&text)
}

pub fn parse_group_str(text: &str) -> Result<GroupFile> {
    let raw: RawGroupFile = serde_json::from_str(text).map_err(|e| QaleError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let n = raw.dimension;
    let m = raw.cyclotomic_order;
    if n == 0 || n > MAX_MATRIX_DIM {
        return Err(QaleError::DimensionMismatch(format!(
            "dimension {n} outside [1, {MAX_MATRIX_DIM}]"
        )));
    }
    if m == 0 || m > MAX_CYCLOTOMIC_ORDER {
        return Err(QaleError::OrderTooLarge(m));
    }
    if raw.generators.is_empty() {
        return Err(QaleError::DimensionMismatch(
            "at least one generator is required".into(),
        ));
    }
    let mut generators = Vec::with_capacity(raw.generators.len());
    for (gi, rows) in raw.generators.iter().enumerate() {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(QaleError::DimensionMismatch(format!(
                "generator {gi} is not an {n}x{n} matrix"
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (ri, row) in rows.iter().enumerate() {
            for (ci, cell) in row.iter().enumerate() {
                let value = parse_entry(cell, m).map_err(|e| match e {
                    QaleError::ParseError {
                        column, message, ..
                    } => QaleError::ParseError {
                        line: 0,
                        column,
                        message: format!("generator {gi}, row {ri}, column {ci}: {message}"),
                    },
                    other => other,
                })?;
                entries.push(value);
            }
        }
        generators.push(CycMatrix::new(n, n, entries)?);
    }
    let mut overrides = BTreeMap::new();
    for (orbit, table) in raw.overrides {
        let oi: usize = orbit.parse().map_err(|_| QaleError::ParseError {
            line: 0,
            column: 0,
            message: format!("override key '{orbit}' is not an orbit index"),
        })?;
        let mut degrees = BTreeMap::new();
        for (deg, dim) in table {
            let d: usize = deg.parse().map_err(|_| QaleError::ParseError {
                line: 0,
                column: 0,
                message: format!("override degree '{deg}' is not a degree"),
            })?;
            degrees.insert(d, dim);
        }
        overrides.insert(oi, degrees);
    }
    Ok(GroupFile {
        name: raw.name,
        dimension: n,
        cyclotomic_order: m,
        generators,
        overrides,
        force_sp: raw.force_sp.unwrap_or(false),
    })
}

/// Parse one matrix entry in the expression grammar into Q(zeta_m).
pub fn parse_entry(text: &str, order: usize) -> Result<CycNumber> {
    let mut p = EntryParser {
        chars: text.char_indices().peekable(),
        text,
        order,
    };
    let value = p.expression()?;
    p.skip_ws();
    if let Some(&(pos, c)) = p.chars.peek() {
        return Err(p.error(pos, format!("unexpected character '{c}'")));
    }
    Ok(value)
}

struct EntryParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    text: &'a str,
    order: usize,
}

impl<'a> EntryParser<'a> {
    fn error(&self, pos: usize, message: String) -> QaleError {
        QaleError::ParseError {
            line: 1,
            column: pos + 1,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(&(_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expression(&mut self) -> Result<CycNumber> {
        let mut sign = 1i64;
        if let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.chars.next();
                if c == '-' {
                    sign = -1;
                }
            }
        }
        let mut acc = self.term()?;
        if sign < 0 {
            acc = -acc;
        }
        while let Some(c) = self.peek() {
            if c != '+' && c != '-' {
                break;
            }
            self.chars.next();
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CycNumber> {
        match self.peek() {
            Some('z') => self.zpow(),
            Some(c) if c.is_ascii_digit() => {
                let q = self.rational()?;
                self.skip_ws();
                if matches!(self.chars.peek(), Some(&(_, '*'))) {
                    self.chars.next();
                    let z = self.zpow()?;
                    Ok(&CycNumber::from_rational(self.order, q) * &z)
                } else {
                    Ok(CycNumber::from_rational(self.order, q))
                }
            }
            Some(c) => {
                let pos = self.chars.peek().map(|&(p, _)| p).unwrap_or(0);
                Err(self.error(pos, format!("expected a term, found '{c}'")))
            }
            None => Err(self.error(self.text.len(), "expected a term".into())),
        }
    }

    fn zpow(&mut self) -> Result<CycNumber> {
        self.skip_ws();
        match self.chars.next() {
            Some((_, 'z')) => {}
            Some((pos, c)) => return Err(self.error(pos, format!("expected 'z', found '{c}'"))),
            None => return Err(self.error(self.text.len(), "expected 'z'".into())),
        }
        let mut exp = 1i64;
        self.skip_ws();
        if matches!(self.chars.peek(), Some(&(_, '^'))) {
            self.chars.next();
            exp = self.integer()?;
        }
        CycNumber::root_of_unity(self.order, exp)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let mut sign = 1i64;
        if matches!(self.chars.peek(), Some(&(_, '-'))) {
            self.chars.next();
            sign = -1;
        }
        let start = match self.chars.peek() {
            Some(&(pos, c)) if c.is_ascii_digit() => pos,
            Some(&(pos, c)) => {
                return Err(self.error(pos, format!("expected a digit, found '{c}'")))
            }
            None => return Err(self.error(self.text.len(), "expected a digit".into())),
        };
        let mut end = start;
        while let Some(&(pos, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                end = pos + c.len_utf8();
                self.chars.next();
            } else {
                break;
            }
        }
        self.text[start..end]
            .parse::<i64>()
            .map(|v| sign * v)
            .map_err(|_| self.error(start, "integer out of range".into()))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.integer()?;
        self.skip_ws();
        if matches!(self.chars.peek(), Some(&(_, '/'))) {
            self.chars.next();
            let den_pos = self
                .chars
                .peek()
                .map(|&(p, _)| p)
                .unwrap_or(self.text.len());
            let den = self.integer()?;
            if den <= 0 {
                return Err(self.error(den_pos, "denominator must be positive".into()));
            }
            Ok(Rational::new(num.into(), den.into()))
        } else {
            Ok(Rational::from_integer(num.into()))
        }
    }
}
