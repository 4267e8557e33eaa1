//! Key-value configuration files.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are ignored. Keys use the long flag names with `-` or `_`
//! interchangeably, e.g. `max-iter = 5000`. Values given on the command line
//! take precedence.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

impl Settings {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
            let key = normalize(k);
            if key.is_empty() {
                return Err(CliError::Config(format!("config line {}: empty key", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `flag` if given, else the parsed file value for `key`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key {key}: {e}"))),
        }
    }

    /// Comma-separated list for `key`, with the same precedence as [`pick`](Self::pick).
    pub fn pick_list(&self, flag: Option<Vec<usize>>, key: &str) -> CliResult<Option<Vec<usize>>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(&normalize(key)) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key {key}: {e}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let s = Settings::parse("# comment\nr = 2\nmax-iter = 50\n\nlevels = 2, 4,8\n").unwrap();
        assert_eq!(s.pick(Some(3usize), "r").unwrap(), Some(3));
        assert_eq!(s.pick(None::<usize>, "r").unwrap(), Some(2));
        assert_eq!(s.pick(None::<usize>, "max_iter").unwrap(), Some(50));
        assert_eq!(s.pick(None::<usize>, "k").unwrap(), None);
        assert_eq!(s.pick_list(None, "levels").unwrap(), Some(vec![2, 4, 8]));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(Settings::parse("r 2").is_err());
        assert!(Settings::parse("= 2").is_err());
        let s = Settings::parse("r = two").unwrap();
        assert!(s.pick(None::<usize>, "r").is_err());
    }
}
