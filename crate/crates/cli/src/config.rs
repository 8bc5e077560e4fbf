//! Optional TOML config: one table per subcommand, keys named like the long
//! flags with `-` replaced by `_`. Flags given on the command line win.

use std::path::Path;

use serde::de::DeserializeOwned;
use toml::{Table, Value};

#[derive(Debug, Default)]
pub struct Config {
    root: Table,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let root: Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(Self { root })
    }

    pub fn section(&self, name: &str) -> Result<Section<'_>, String> {
        match self.root.get(name) {
            None => Ok(Section { name: name.to_string(), table: None }),
            Some(Value::Table(t)) => Ok(Section { name: name.to_string(), table: Some(t) }),
            Some(_) => Err(format!("config: [{name}] must be a table")),
        }
    }
}

pub struct Section<'a> {
    name: String,
    table: Option<&'a Table>,
}

impl Section<'_> {
    /// Reject keys no flag reads, so typos do not pass silently.
    pub fn check_keys(&self, known: &[&str]) -> Result<(), String> {
        if let Some(t) = self.table {
            if let Some(k) = t.keys().find(|k| !known.contains(&k.as_str())) {
                return Err(format!("config: unknown key {k:?} in [{}]", self.name));
            }
        }
        Ok(())
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, String> {
        match self.table.and_then(|t| t.get(key)) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e| format!("config: [{}] {key}: {e}", self.name)),
        }
    }

    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    pub fn pick_list<T: DeserializeOwned>(&self, flag: Vec<T>, key: &str, default: Vec<T>) -> Result<Vec<T>, String> {
        if !flag.is_empty() {
            return Ok(flag);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn pick_flag(&self, flag: bool, key: &str) -> Result<bool, String> {
        Ok(flag || self.get(key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Config {
        Config { root: text.parse().unwrap() }
    }

    #[test]
    fn flags_win_over_file() {
        let c = cfg("[simulate]\nseed = 9\nn = [3, 4]\n");
        let s = c.section("simulate").unwrap();
        assert_eq!(s.pick(Some(1u64), "seed", 0).unwrap(), 1);
        assert_eq!(s.pick(None, "seed", 0u64).unwrap(), 9);
        assert_eq!(s.pick_list(vec![], "n", vec![3usize]).unwrap(), vec![3, 4]);
        assert_eq!(s.pick_list(vec![5], "n", vec![3usize]).unwrap(), vec![5]);
        assert_eq!(s.pick(None, "trials", 7usize).unwrap(), 7);
    }

    #[test]
    fn bad_config_is_reported() {
        let c = cfg("[simulate]\nseed = \"x\"\nbogus = 1\n");
        let s = c.section("simulate").unwrap();
        assert!(s.pick(None, "seed", 0u64).is_err());
        assert!(s.check_keys(&["seed"]).is_err());
        assert!(cfg("simulate = 3").section("simulate").is_err());
        assert!(cfg("").section("certify").unwrap().check_keys(&[]).is_ok());
    }
}
