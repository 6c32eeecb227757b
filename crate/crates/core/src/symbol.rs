//! Symbols on transducer tapes.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use crate::fst::FstError;

/// Text of the epsilon symbol (the empty string).
pub const EPSILON: &str = "<eps>";
/// Text of the unknown symbol, written `?` in most FST literature.
pub const UNKNOWN: &str = "<unk>";

/// A tape symbol.
///
/// Symbol texts are interned process-wide, so equality and hashing look at
/// the pointer only. Ordering is by text (byte order). Cloning is a
/// reference-count bump.
#[derive(Clone)]
pub struct Symbol(Arc<str>);

fn intern(text: &str) -> Arc<str> {
    static TABLE: OnceLock<Mutex<HashSet<Arc<str>>>> = OnceLock::new();
    let mut table = TABLE
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    if let Some(hit) = table.get(text) {
        return Arc::clone(hit);
    }
    let fresh: Arc<str> = Arc::from(text);
    table.insert(Arc::clone(&fresh));
    fresh
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::ptr::hash(Arc::as_ptr(&self.0) as *const u8, state);
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            Ordering::Equal
        } else {
            self.0.cmp(&other.0)
        }
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Symbol {
    /// Parses a symbol from its text.
    ///
    /// The text must be non-empty and free of whitespace. Texts of the form
    /// `<...>` are reserved; only [`EPSILON`] and [`UNKNOWN`] are accepted.
    pub fn new(text: &str) -> Result<Self, FstError> {
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(FstError::InvalidSymbol(text.to_string()));
        }
        if text.starts_with('<') && text.ends_with('>') && text != EPSILON && text != UNKNOWN {
            return Err(FstError::InvalidSymbol(text.to_string()));
        }
        Ok(Symbol(intern(text)))
    }

    pub fn epsilon() -> Self {
        Symbol(intern(EPSILON))
    }

    pub fn unknown() -> Self {
        Symbol(intern(UNKNOWN))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_epsilon(&self) -> bool {
        &*self.0 == EPSILON
    }

    pub fn is_unknown(&self) -> bool {
        &*self.0 == UNKNOWN
    }

    /// True for `<eps>` and `<unk>`.
    pub fn is_reserved(&self) -> bool {
        self.is_epsilon() || self.is_unknown()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// Parses a whitespace-separated token string into symbols.
pub fn tokens(text: &str) -> Result<Vec<Symbol>, FstError> {
    text.split_whitespace().map(Symbol::new).collect()
}

/// Joins symbols with single spaces.
pub fn join(symbols: &[Symbol]) -> String {
    let mut out = String::new();
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s.as_str());
    }
    out
}
