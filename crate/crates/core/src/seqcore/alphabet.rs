use std::fmt;
use std::sync::Arc;

use crate::error::{param, Error, Result};

/// Index of a symbol inside its [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite ordered set of glyphs. Symbols are positions in the list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    glyphs: Arc<[char]>,
}

impl Alphabet {
    pub fn new(glyphs: impl IntoIterator<Item = char>) -> Result<Self> {
        let glyphs: Vec<char> = glyphs.into_iter().collect();
        if glyphs.is_empty() {
            return param("alphabet must be nonempty");
        }
        if glyphs.len() > 256 {
            return param("alphabet too large (max 256 symbols)");
        }
        for (i, g) in glyphs.iter().enumerate() {
            if glyphs[..i].contains(g) {
                return param(format!("duplicate symbol {g:?}"));
            }
            if *g == '|' {
                return param("'|' is reserved as the period separator");
            }
        }
        Ok(Alphabet { glyphs: glyphs.into() })
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet::new(['0', '1']).expect("valid")
    }

    /// `{0, ⋄}` written with glyphs `0` and `d`.
    pub fn zero_diamond() -> Self {
        Alphabet::new(['0', 'd']).expect("valid")
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn glyph(&self, s: Symbol) -> char {
        self.glyphs[s.index()]
    }

    pub fn symbol(&self, glyph: char) -> Result<Symbol> {
        self.glyphs
            .iter()
            .position(|g| *g == glyph)
            .map(|i| Symbol(i as u8))
            .ok_or_else(|| Error::Parse(format!("glyph {glyph:?} not in alphabet {self}")))
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.glyphs.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.glyphs.len()).map(|i| Symbol(i as u8))
    }

    pub fn glyphs(&self) -> &[char] {
        &self.glyphs
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<Symbol>> {
        s.chars().map(|c| self.symbol(c)).collect()
    }

    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|s| self.glyph(*s)).collect()
    }

    /// Symbols 0 and 1 must mean the same glyph in both alphabets.
    pub fn ensure_same(&self, other: &Alphabet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, g) in self.glyphs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(['a', 'a']).is_err());
        assert!(Alphabet::new([]).is_err());
    }

    #[test]
    fn index_symbol_bijection() {
        let a = Alphabet::new(['x', 'y', 'z']).unwrap();
        for s in a.symbols() {
            assert_eq!(a.symbol(a.glyph(s)).unwrap(), s);
        }
    }
}
