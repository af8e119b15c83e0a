//! Free words over the typed generator alphabets used by every presentation.
//!
//! A [`Word`] is always stored freely reduced. Letters carry a sign instead of
//! introducing separate inverse symbols, so abelianization and the kernel
//! action only ever need signed counts.
//!
//! Text syntax: `a1 b2^-1 z3 s1 t2 c1 d1`, one token per letter or power,
//! separated by whitespace. `s1`, `s2`, ... are the braid generators sigma_i,
//! the bare `s` is the pooled sigma class of the abelianized kernel, and `t`
//! stands for tau. `x^k` abbreviates `k` copies of `x`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter {0} is not in the alphabet")]
    NotInAlphabet(Generator),
    #[error("cannot parse token `{0}`")]
    BadToken(String),
}

/// Generator families. `SigmaClass` is the single image of all `sigma_i` in
/// the abelianized kernel; it has no index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Sigma,
    SigmaClass,
    A,
    B,
    Z,
    Tau,
    C,
    D,
}

impl Family {
    pub fn prefix(self) -> &'static str {
        match self {
            Family::Sigma | Family::SigmaClass => "s",
            Family::A => "a",
            Family::B => "b",
            Family::Z => "z",
            Family::Tau => "t",
            Family::C => "c",
            Family::D => "d",
        }
    }

    /// True for the coset letters tau, c, d (lifts of the base group generators).
    pub fn is_coset(self) -> bool {
        matches!(self, Family::Tau | Family::C | Family::D)
    }
}

/// A generator symbol such as `sigma_2` or `c_1`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub family: Family,
    pub index: u32,
}

impl Generator {
    pub const fn new(family: Family, index: u32) -> Self {
        Generator { family, index }
    }
    pub const fn sigma(i: u32) -> Self {
        Generator::new(Family::Sigma, i)
    }
    /// The pooled sigma of the abelianized kernel.
    pub const fn sigma_class() -> Self {
        Generator::new(Family::SigmaClass, 0)
    }
    pub const fn a(r: u32) -> Self {
        Generator::new(Family::A, r)
    }
    pub const fn b(r: u32) -> Self {
        Generator::new(Family::B, r)
    }
    pub const fn z(j: u32) -> Self {
        Generator::new(Family::Z, j)
    }
    pub const fn tau(i: u32) -> Self {
        Generator::new(Family::Tau, i)
    }
    pub const fn c(r: u32) -> Self {
        Generator::new(Family::C, r)
    }
    pub const fn d(r: u32) -> Self {
        Generator::new(Family::D, r)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::SigmaClass => f.write_str("s"),
            fam => write!(f, "{}{}", fam.prefix(), self.index),
        }
    }
}

impl FromStr for Generator {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WordError::BadToken(s.to_string());
        if s == "s" {
            return Ok(Generator::sigma_class());
        }
        let mut chars = s.chars();
        let family = match chars.next().ok_or_else(bad)? {
            's' => Family::Sigma,
            'a' => Family::A,
            'b' => Family::B,
            'z' => Family::Z,
            't' => Family::Tau,
            'c' => Family::C,
            'd' => Family::D,
            _ => return Err(bad()),
        };
        let index: u32 = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Generator::new(family, index))
    }
}

/// A generator with an exponent sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: Generator, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Builds a word from arbitrary letters, reducing eagerly.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::empty();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn gen(g: Generator) -> Self {
        Word {
            letters: vec![Letter::new(g, false)],
        }
    }

    /// `g^k` for any integer `k`.
    pub fn power(g: Generator, k: i64) -> Self {
        let letter = Letter::new(g, k < 0);
        Word {
            letters: vec![letter; k.unsigned_abs() as usize],
        }
    }

    /// Product of words in order.
    pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Self {
        let mut w = Word::empty();
        for part in words {
            for &l in &part.letters {
                w.push(l);
            }
        }
        w
    }

    /// Appends one letter, cancelling against the last letter when possible.
    pub fn push(&mut self, l: Letter) {
        match self.letters.last() {
            Some(&last) if last.cancels(l) => {
                self.letters.pop();
            }
            _ => self.letters.push(l),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inv()).collect(),
        }
    }

    /// `x y x^-1 y^-1`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        Word::product([x, y, &x.inverse(), &y.inverse()])
    }

    /// `u v^-1`: the relator encoding the relation `u = v`.
    pub fn relator(u: &Word, v: &Word) -> Word {
        u.concat(&v.inverse())
    }

    /// Replaces every letter of `from`'s generators by the given word (or its
    /// inverse for inverse letters). Letters without a substitution are kept.
    pub fn substitute<F>(&self, mut f: F) -> Word
    where
        F: FnMut(Generator) -> Option<Word>,
    {
        let mut w = Word::empty();
        for &l in &self.letters {
            match f(l.generator) {
                Some(image) => {
                    let image = if l.inverse { image.inverse() } else { image };
                    for &m in image.letters() {
                        w.push(m);
                    }
                }
                None => w.push(l),
            }
        }
        w
    }

    /// Generators occurring in the word.
    pub fn support(&self) -> BTreeSet<Generator> {
        self.letters.iter().map(|l| l.generator).collect()
    }

    /// Checks the reduced-form invariant (always true for values built
    /// through this API).
    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| !p[0].cancels(p[1]))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            let exp = if l.inverse { -(run as i64) } else { run as i64 };
            match exp {
                1 => write!(f, "{}", l.generator)?,
                e => write!(f, "{}^{}", l.generator, e)?,
            }
            i += run;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = Word::empty();
        for token in s.split_whitespace() {
            let (sym, exp) = match token.split_once('^') {
                Some((sym, exp)) => {
                    let e: i64 = exp.parse().map_err(|_| WordError::BadToken(token.into()))?;
                    if e == 0 {
                        return Err(WordError::BadToken(token.into()));
                    }
                    (sym, e)
                }
                None => (token, 1),
            };
            let g: Generator = sym.parse()?;
            for &l in Word::power(g, exp).letters() {
                w.push(l);
            }
        }
        Ok(w)
    }
}

/// An ordered set of generators. Operations that must stay inside a fixed
/// alphabet go through here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    generators: Vec<Generator>,
    members: BTreeSet<Generator>,
}

impl Alphabet {
    pub fn new(generators: Vec<Generator>) -> Self {
        let members = generators.iter().copied().collect();
        Alphabet {
            generators,
            members,
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, g: Generator) -> bool {
        self.members.contains(&g)
    }

    pub fn position(&self, g: Generator) -> Option<usize> {
        self.generators.iter().position(|&h| h == g)
    }

    pub fn check(&self, w: &Word) -> Result<(), WordError> {
        match w.letters().iter().find(|l| !self.contains(l.generator)) {
            Some(l) => Err(WordError::NotInAlphabet(l.generator)),
            None => Ok(()),
        }
    }

    /// Concatenation restricted to this alphabet.
    pub fn concat(&self, w1: &Word, w2: &Word) -> Result<Word, WordError> {
        self.check(w1)?;
        self.check(w2)?;
        Ok(w1.concat(w2))
    }

    pub fn parse_word(&self, s: &str) -> Result<Word, WordError> {
        let w: Word = s.parse()?;
        self.check(&w)?;
        Ok(w)
    }
}
