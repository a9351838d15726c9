//! Flat `key = value` configuration files with `#` comments.
//!
//! Lists are comma-separated. Complex numbers are written `a`, `bi`, `a+bi`
//! or `a-bi`. Every key must be consumed by the command; leftovers are
//! reported with their line numbers.

use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    used: RefCell<BTreeSet<String>>,
}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

impl FromStr for Config {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(Some(line), format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(err(Some(line), format!("invalid key `{key}`")));
            }
            if let Some((_, first)) = entries.get(key) {
                return Err(err(Some(line), format!("duplicate key `{key}` (first set on line {first})")));
            }
            entries.insert(key.to_string(), (value.trim().to_string(), line));
        }
        Ok(Self {
            entries,
            used: RefCell::new(BTreeSet::new()),
        })
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
        text.parse()
    }

    /// Keys and raw values, for echoing into reports.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, (v, _))| (k.clone(), v.clone())).collect()
    }

    pub fn set(&mut self, key: &str, value: String) {
        let line = self.entries.get(key).map_or(0, |(_, l)| *l);
        self.entries.insert(key.to_string(), (value, line));
    }

    pub fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|(_, l)| *l).filter(|&l| l > 0)
    }

    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => parse(v)
                .map(Some)
                .map_err(|m| err((line > 0).then_some(line), format!("`{key}`: {m}"))),
        }
    }

    fn required<T>(&self, key: &str, value: Option<T>) -> Result<T, ConfigError> {
        value.ok_or_else(|| err(None, format!("missing required key `{key}`")))
    }

    pub fn opt_str(&self, key: &str) -> Option<String> {
        self.raw(key).map(|(v, _)| v.to_string())
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.parsed(key, parse_f64)
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        let v = self.opt_f64(key)?;
        self.required(key, v)
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.parsed(key, |s| s.parse::<u64>().map_err(|e| format!("expected a non-negative integer ({e})")))
    }

    pub fn u64(&self, key: &str) -> Result<u64, ConfigError> {
        let v = self.opt_u64(key)?;
        self.required(key, v)
    }

    pub fn i64(&self, key: &str) -> Result<i64, ConfigError> {
        let v = self.parsed(key, |s| s.parse::<i64>().map_err(|e| format!("expected an integer ({e})")))?;
        self.required(key, v)
    }

    pub fn opt_bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.parsed(key, |s| match s {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(format!("expected true or false, got `{s}`")),
        })
    }

    pub fn opt_list_f64(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        self.parsed(key, |s| split_list(s).map(parse_f64).collect())
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let v = self.opt_list_f64(key)?;
        self.required(key, v)
    }

    pub fn opt_list_u64(&self, key: &str) -> Result<Option<Vec<u64>>, ConfigError> {
        self.parsed(key, |s| {
            split_list(s)
                .map(|x| x.parse::<u64>().map_err(|e| format!("`{x}`: {e}")))
                .collect()
        })
    }

    pub fn opt_list_complex(&self, key: &str) -> Result<Option<Vec<Complex64>>, ConfigError> {
        self.parsed(key, |s| split_list(s).map(parse_complex).collect())
    }

    pub fn list_complex(&self, key: &str) -> Result<Vec<Complex64>, ConfigError> {
        let v = self.opt_list_complex(key)?;
        self.required(key, v)
    }

    /// Error pointing at `key`'s line.
    pub fn invalid(&self, key: &str, message: impl fmt::Display) -> ConfigError {
        err(self.line_of(key), format!("`{key}`: {message}"))
    }

    /// Fails on keys that no getter asked for.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        match self.entries.iter().find(|(k, _)| !used.contains(*k)) {
            Some((k, (_, line))) => Err(err((*line > 0).then_some(*line), format!("unknown key `{k}` for this command"))),
            None => Ok(()),
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return parse_f64(&s).map(|re| Complex64::new(re, 0.0));
    };
    // split before the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_f64(&body[..i])?, &body[i..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => parse_f64(x)?,
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_lists() {
        let c: Config = "# header\nsigma = 0.75  # trailing\n\nshifts = 1, 2\ntargets = 0.2+0.1i, -0.1\n".parse().unwrap();
        assert_eq!(c.f64("sigma").unwrap(), 0.75);
        assert_eq!(c.list_f64("shifts").unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            c.list_complex("targets").unwrap(),
            vec![Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.0)]
        );
        assert!(c.finish().is_ok());
        assert_eq!(c.line_of("shifts"), Some(4));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = "a = 1\nb 2\n".parse::<Config>().unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = "a = 1\na = 2\n".parse::<Config>().unwrap_err();
        assert_eq!(e.line, Some(2));
        let c: Config = "a = 1\nb = x\n".parse().unwrap();
        assert_eq!(c.f64("b").unwrap_err().line, Some(2));
        assert!(c.f64("missing").unwrap_err().line.is_none());
        let c: Config = "a = 1\nextra = 3\n".parse().unwrap();
        c.f64("a").unwrap();
        let e = c.finish().unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.to_string().contains("extra"));
    }

    #[test]
    fn complex_literals() {
        let c = |s| parse_complex(s).unwrap();
        assert_eq!(c("1+i"), Complex64::new(1.0, 1.0));
        assert_eq!(c("-1"), Complex64::new(-1.0, 0.0));
        assert_eq!(c("-2.5i"), Complex64::new(0.0, -2.5));
        assert_eq!(c("i"), Complex64::new(0.0, 1.0));
        assert_eq!(c("1e-3-2e+2i"), Complex64::new(1e-3, -200.0));
        assert_eq!(c("0.2 + 0.1i"), Complex64::new(0.2, 0.1));
        assert!(parse_complex("1+2j").is_err());
        assert!(parse_complex("abc").is_err());
    }
}
