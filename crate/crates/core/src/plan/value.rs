use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::extraction::CalendarDate;

/// Semantic types of plan values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Str,
    Int,
    Bool,
    Date,
    Contract,
    Section,
    Text,
    List(Box<Ty>),
    Pair(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn list(t: Ty) -> Ty {
        Ty::List(Box::new(t))
    }

    pub fn pair(a: Ty, b: Ty) -> Ty {
        Ty::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Str => f.write_str("Str"),
            Ty::Int => f.write_str("Int"),
            Ty::Bool => f.write_str("Bool"),
            Ty::Date => f.write_str("Date"),
            Ty::Contract => f.write_str("Contract"),
            Ty::Section => f.write_str("Section"),
            Ty::Text => f.write_str("Text"),
            Ty::List(t) => write!(f, "List<{t}>"),
            Ty::Pair(a, b) => write!(f, "Pair<{a},{b}>"),
        }
    }
}

impl FromStr for Ty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn parse(s: &str) -> Option<(Ty, &str)> {
            let s = s.trim_start();
            let end = s.find(|c: char| !c.is_ascii_alphabetic()).unwrap_or(s.len());
            let (name, rest) = s.split_at(end);
            let ty = match name {
                "Str" => Ty::Str,
                "Int" => Ty::Int,
                "Bool" => Ty::Bool,
                "Date" => Ty::Date,
                "Contract" => Ty::Contract,
                "Section" => Ty::Section,
                "Text" => Ty::Text,
                "List" => {
                    let (inner, rest) = parse(rest.strip_prefix('<')?)?;
                    return Some((Ty::list(inner), rest.trim_start().strip_prefix('>')?));
                }
                "Pair" => {
                    let (a, rest) = parse(rest.strip_prefix('<')?)?;
                    let (b, rest) = parse(rest.trim_start().strip_prefix(',')?)?;
                    return Some((Ty::pair(a, b), rest.trim_start().strip_prefix('>')?));
                }
                _ => return None,
            };
            Some((ty, rest))
        }
        match parse(s) {
            Some((t, rest)) if rest.trim().is_empty() => Ok(t),
            _ => Err(format!("not a semantic type: {s:?}")),
        }
    }
}

impl Serialize for Ty {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ty {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SectionRef {
    pub contract_id: String,
    pub ordinal: usize,
}

/// A runtime plan value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Value {
    Str(String),
    Int(i64),
    Bool(bool),
    Date(CalendarDate),
    Contract(String),
    Section(SectionRef),
    Text(String),
    List(Vec<Value>),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    /// Whether the value inhabits `ty`. Empty lists inhabit every list type.
    pub fn conforms(&self, ty: &Ty) -> bool {
        match (self, ty) {
            (Value::Str(_), Ty::Str)
            | (Value::Int(_), Ty::Int)
            | (Value::Bool(_), Ty::Bool)
            | (Value::Date(_), Ty::Date)
            | (Value::Contract(_), Ty::Contract)
            | (Value::Section(_), Ty::Section)
            | (Value::Text(_), Ty::Text) => true,
            (Value::List(items), Ty::List(t)) => items.iter().all(|v| v.conforms(t)),
            (Value::Pair(a, b), Ty::Pair(ta, tb)) => a.conforms(ta) && b.conforms(tb),
            _ => false,
        }
    }

    /// Emptiness for guards; `None` for values that have no notion of it.
    pub fn is_empty(&self) -> Option<bool> {
        match self {
            Value::List(v) => Some(v.is_empty()),
            Value::Str(s) | Value::Text(s) => Some(s.trim().is_empty()),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Str(_) => "Str",
            Value::Int(_) => "Int",
            Value::Bool(_) => "Bool",
            Value::Date(_) => "Date",
            Value::Contract(_) => "Contract",
            Value::Section(_) => "Section",
            Value::Text(_) => "Text",
            Value::List(_) => "List",
            Value::Pair(..) => "Pair",
        }
    }

    /// Plain rendering used for answers and scoring.
    pub fn render(&self) -> String {
        match self {
            Value::Str(s) | Value::Text(s) | Value::Contract(s) => s.clone(),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Date(d) => d.to_string(),
            Value::Section(s) => format!("{}#{}", s.contract_id, s.ordinal),
            Value::List(items) => items.iter().map(Value::render).collect::<Vec<_>>().join("\n"),
            Value::Pair(a, b) => format!("{}|{}", a.render(), b.render()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_syntax_round_trips() {
        for s in ["Str", "List<Contract>", "List<Pair<Contract,Date>>", "Pair<Str,List<Section>>"] {
            assert_eq!(s.parse::<Ty>().unwrap().to_string(), s);
        }
        assert!("List<Foo>".parse::<Ty>().is_err());
        assert!("List<Str".parse::<Ty>().is_err());
    }

    #[test]
    fn conformance() {
        let v = Value::List(vec![Value::pair(Value::Contract("c".into()), Value::Str("x".into()))]);
        assert!(v.conforms(&"List<Pair<Contract,Str>>".parse().unwrap()));
        assert!(!v.conforms(&"List<Pair<Contract,Date>>".parse().unwrap()));
        assert!(Value::List(vec![]).conforms(&Ty::list(Ty::Section)));
    }

    #[test]
    fn json_shape() {
        let v = Value::pair(Value::Contract("ct-1".into()), Value::Date("01/02/2003".parse().unwrap()));
        let j = serde_json::to_string(&v).unwrap();
        assert_eq!(j, r#"{"type":"pair","value":[{"type":"contract","value":"ct-1"},{"type":"date","value":"01/02/2003"}]}"#);
        assert_eq!(serde_json::from_str::<Value>(&j).unwrap(), v);
    }
}
