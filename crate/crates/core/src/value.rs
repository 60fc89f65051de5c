//! Literal values carried by items of value concepts.
//!
//! Value concepts identify their items by a typed literal: integers,
//! exact decimals (money, prices), plain strings and date strings.
//! Decimals use [`rust_decimal::Decimal`] so sums over money columns
//! stay exact; the printed form keeps the scale it was parsed with
//! (`3.50` stays `3.50`), which the canonical file formats rely on.

use std::cmp::Ordering;
use std::fmt;

use rust_decimal::Decimal;

/// Declared literal type of a value concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Int,
    Decimal,
    Str,
    /// Date strings compared as plain strings (year granularity in practice).
    Date,
}

impl ValueKind {
    pub fn name(self) -> &'static str {
        match self {
            ValueKind::Int => "int",
            ValueKind::Decimal => "decimal",
            ValueKind::Str => "string",
            ValueKind::Date => "date",
        }
    }

    pub fn parse_name(s: &str) -> Option<ValueKind> {
        match s {
            "int" => Some(ValueKind::Int),
            "decimal" => Some(ValueKind::Decimal),
            "string" => Some(ValueKind::Str),
            "date" => Some(ValueKind::Date),
            _ => None,
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A concrete literal. Equality and ordering are typed: integers and
/// decimals compare numerically, strings lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i64),
    Dec(Decimal),
    Str(String),
}

impl Literal {
    pub fn kind_matches(&self, kind: ValueKind) -> bool {
        matches!(
            (self, kind),
            (Literal::Int(_), ValueKind::Int)
                | (Literal::Dec(_), ValueKind::Decimal)
                | (Literal::Str(_), ValueKind::Str)
                | (Literal::Str(_), ValueKind::Date)
        )
    }

    /// Canonical textual form, used as the item id of value-concept items.
    pub fn canonical(&self) -> String {
        match self {
            Literal::Int(i) => i.to_string(),
            Literal::Dec(d) => d.to_string(),
            Literal::Str(s) => s.clone(),
        }
    }

    /// Parse a literal of the given kind from its canonical form.
    pub fn parse_for(kind: ValueKind, text: &str) -> Option<Literal> {
        match kind {
            ValueKind::Int => text.parse::<i64>().ok().map(Literal::Int),
            ValueKind::Decimal => text.parse::<Decimal>().ok().map(Literal::Dec),
            ValueKind::Str | ValueKind::Date => Some(Literal::Str(text.to_string())),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::Int(a), Literal::Int(b)) => a.cmp(b),
            (Literal::Dec(a), Literal::Dec(b)) => a.cmp(b),
            (Literal::Int(a), Literal::Dec(b)) => Decimal::from(*a).cmp(b),
            (Literal::Dec(a), Literal::Int(b)) => a.cmp(&Decimal::from(*b)),
            (Literal::Str(a), Literal::Str(b)) => a.cmp(b),
            // Mixed numeric/string never occurs within one concept; order by tag.
            (Literal::Str(_), _) => Ordering::Greater,
            (_, Literal::Str(_)) => Ordering::Less,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_keeps_scale() {
        let d = Literal::parse_for(ValueKind::Decimal, "3.50").unwrap();
        assert_eq!(d.canonical(), "3.50");
    }

    #[test]
    fn typed_ordering() {
        let a = Literal::Int(3);
        let b = Literal::Int(22);
        assert!(a < b);
        let s1 = Literal::Str("22".into());
        let s2 = Literal::Str("3".into());
        assert!(s1 < s2);
    }
}
