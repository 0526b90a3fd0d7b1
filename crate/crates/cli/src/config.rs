//! Flat `key = value` configuration grouped in `[section]` blocks.
//!
//! Lines starting with `#` or `;` are comments. Keys before the first header
//! live in the unnamed section `""`. Command-line flags are applied on top
//! with [`Config::set`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut cfg = Config::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let indent = raw.len() - raw.trim_start().len();
            let body = raw.trim();
            let err = |column: usize, message: String| ParseError {
                line,
                column,
                message,
            };
            if body.is_empty() || body.starts_with('#') || body.starts_with(';') {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let close = rest
                    .find(']')
                    .ok_or_else(|| err(indent + body.len() + 1, "expected ']' to close the section header".into()))?;
                let name = rest[..close].trim();
                if !valid_name(name) {
                    return Err(err(indent + 2, format!("invalid section name '{name}'")));
                }
                let tail = rest[close + 1..].trim();
                if !tail.is_empty() && !tail.starts_with('#') {
                    return Err(err(indent + close + 3, format!("unexpected text '{tail}' after section header")));
                }
                section = name.to_string();
                cfg.sections.entry(section.clone()).or_default();
                continue;
            }
            let eq = body
                .find('=')
                .ok_or_else(|| err(indent + body.len() + 1, "expected '=' after key".into()))?;
            let key = body[..eq].trim();
            if !valid_name(key) {
                return Err(err(indent + 1, format!("invalid key '{key}'")));
            }
            let value = body[eq + 1..].trim();
            let entry = cfg.sections.entry(section.clone()).or_default();
            if entry.contains_key(key) {
                return Err(err(indent + 1, format!("duplicate key '{key}' in section [{section}]")));
            }
            entry.insert(key.to_string(), value.to_string());
        }
        Ok(cfg)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn section(&self, section: &str) -> impl Iterator<Item = (&str, &str)> {
        self.sections
            .get(section)
            .into_iter()
            .flat_map(|m| m.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    pub fn sections(&self) -> &BTreeMap<String, BTreeMap<String, String>> {
        &self.sections
    }

    pub fn from_sections(sections: BTreeMap<String, BTreeMap<String, String>>) -> Self {
        Self { sections }
    }

    /// Typed lookup; `Ok(None)` when absent.
    pub fn value<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, String> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("[{section}] {key}: cannot parse '{v}'")),
        }
    }

    pub fn value_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, String> {
        Ok(self.value(section, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, section: &str, key: &str) -> Result<T, String> {
        self.value(section, key)?
            .ok_or_else(|| format!("[{section}] {key} is required"))
    }

    pub fn flag(&self, section: &str, key: &str) -> Result<bool, String> {
        match self.get(section, key) {
            None => Ok(false),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(format!("[{section}] {key}: expected a boolean, got '{v}'")),
        }
    }
}

/// Inclusive grid `a:b:step`, or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid '{spec}' must look like a:b:step"));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| format!("grid '{spec}': '{s}' is not a number"))
        };
        let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
            return Err(format!("grid '{spec}' needs a <= b and step > 0"));
        }
        let n = ((b - a) / h + 1e-9).floor() as usize;
        if n > 10_000_000 {
            return Err(format!("grid '{spec}' has too many points"));
        }
        // a + i·h rounded to the step's decimal resolution keeps 0.05 grids clean.
        let scale = 1e12;
        Ok((0..=n)
            .map(|i| ((a + i as f64 * h) * scale).round() / scale)
            .collect())
    } else {
        spec.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("list '{spec}': '{s}' is not a number"))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = Config::parse("seed = 7\n# note\n[vol]\nkind = figure1\n\n[energy]\n  y_grid = -3:3:0.05\n").unwrap();
        assert_eq!(c.get("", "seed"), Some("7"));
        assert_eq!(c.get("vol", "kind"), Some("figure1"));
        assert_eq!(c.get("energy", "y_grid"), Some("-3:3:0.05"));
        assert_eq!(c.value::<u64>("", "seed").unwrap(), Some(7));
    }

    #[test]
    fn reports_line_and_column() {
        let e = Config::parse("[vol]\nkind figure1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 13));
        let e = Config::parse("[vol\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = Config::parse("a=1\n  a=2\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = Config::parse("[v]\n = 3\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 2));
    }

    #[test]
    fn set_overrides() {
        let mut c = Config::parse("[mc]\nseed=1\n").unwrap();
        c.set("mc", "seed", "9");
        assert_eq!(c.value::<u64>("mc", "seed").unwrap(), Some(9));
        assert!(c.value::<u64>("vol", "x").unwrap().is_none());
        c.set("mc", "seed", "x");
        assert!(c.value::<u64>("mc", "seed").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("-3:3:0.05").unwrap();
        assert_eq!(g.len(), 121);
        assert_eq!(g[60], 0.0);
        assert_eq!(g[120], 3.0);
        assert_eq!(g[1], -2.95);
        assert_eq!(parse_grid("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}
