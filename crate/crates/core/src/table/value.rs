use std::fmt;

/// A single cell.
///
/// `Missing` is its own variant: it never compares equal to empty text or to
/// any number. Numbers are always finite; constructing a number from NaN or an
/// infinity yields `Missing`.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Boolean(bool),
    Missing,
}

impl Value {
    /// Builds a number cell, folding non-finite results into `Missing`.
    pub fn number(x: f64) -> Value {
        if x.is_finite() {
            Value::Number(x)
        } else {
            Value::Missing
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Boolean(b) => Some(*b),
            _ => None,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "text",
            Value::Boolean(_) => "boolean",
            Value::Missing => "missing",
        }
    }

    /// Exact identity: same variant, same payload, numbers compared bit for bit.
    pub fn identical(&self, other: &Value) -> bool {
        values_identical(self, other)
    }

    /// Hashable form used when a value acts as a row key.
    pub(crate) fn key_repr(&self) -> Option<KeyRepr> {
        match self {
            Value::Number(x) => Some(KeyRepr::Number(x.to_bits())),
            Value::Text(s) => Some(KeyRepr::Text(s.clone())),
            Value::Boolean(b) => Some(KeyRepr::Boolean(*b)),
            Value::Missing => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum KeyRepr {
    Number(u64),
    Text(String),
    Boolean(bool),
}

pub fn values_identical(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.to_bits() == y.to_bits(),
        (Value::Text(x), Value::Text(y)) => x == y,
        (Value::Boolean(x), Value::Boolean(y)) => x == y,
        (Value::Missing, Value::Missing) => true,
        _ => false,
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::number(x)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Boolean(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Renders the cell the way it appears in CSV output, without quoting.
/// Numbers use the shortest decimal form that parses back to the same float.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
            Value::Boolean(true) => f.write_str("TRUE"),
            Value::Boolean(false) => f.write_str("FALSE"),
            Value::Missing => f.write_str("NA"),
        }
    }
}
