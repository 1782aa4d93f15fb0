//! The three-valued sign domain shared by sign-set formulas and markings.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }

    pub fn from_symbol(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Neg),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Pos),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Renders a sign vector as a compact string such as `+0-`.
pub fn vector_string(v: &[Sign]) -> String {
    v.iter().map(|s| s.symbol()).collect()
}

/// Parses a compact sign-vector string.
pub fn parse_vector(text: &str) -> Option<Vec<Sign>> {
    text.chars().map(Sign::from_symbol).collect()
}
