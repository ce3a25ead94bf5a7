use std::collections::BTreeMap;
use std::fmt;

/// A total store over variable names: every variable reads as 0 unless set.
/// Zero-valued entries are never kept, so structural equality coincides with
/// extensional equality (agreement on the union of keys, absent = 0).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarStore {
    map: BTreeMap<String, i64>,
}

impl VarStore {
    pub fn new() -> VarStore {
        VarStore::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> VarStore
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut s = VarStore::new();
        for (k, v) in pairs {
            s.set(k.into(), v);
        }
        s
    }

    pub fn get(&self, var: &str) -> i64 {
        self.map.get(var).copied().unwrap_or(0)
    }

    pub fn set(&mut self, var: impl Into<String>, value: i64) {
        let var = var.into();
        if value == 0 {
            self.map.remove(&var);
        } else {
            self.map.insert(var, value);
        }
    }

    /// Functional update `s[x := v]`.
    pub fn with(&self, var: impl Into<String>, value: i64) -> VarStore {
        let mut s = self.clone();
        s.set(var, value);
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.map.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl fmt::Display for VarStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        write!(f, "}}")
    }
}
