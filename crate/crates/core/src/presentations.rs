//! Explicit presentations of the surface braid groups involved in the
//! generalized Fadell–Neuwirth sequence
//! `1 -> B_n(S_g minus m points) -> B_{n,m}(S_g) -> B_m(S_g) -> 1`
//! and of its quotient by the commutator subgroup of the kernel.
//!
//! Relations `u = v` are stored as relators `u v^-1`. Families whose index
//! range is empty for the given parameters are simply empty.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intlinalg::{invariant_factors, IntMatrix, InvariantFactors};
use crate::words::{Alphabet, Family, Generator, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("parameter {name} = {value} is out of range (must be >= {min})")]
    InvalidParameter {
        name: &'static str,
        value: i64,
        min: i64,
    },
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Relation family labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelatorFamily {
    BR,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    SR,
    BRBar,
    R1Bar,
    R2Bar,
    R3Bar,
    R4Bar,
    SRBar,
    IIIa,
    IIIb,
    IIIc,
    IIId,
    Quot1Commute,
    Quot1SigmaSquare,
    Quot1ZFold,
}

const FAMILY_LABELS: [(RelatorFamily, &str); 23] = [
    (RelatorFamily::BR, "BR"),
    (RelatorFamily::R1, "R1"),
    (RelatorFamily::R2, "R2"),
    (RelatorFamily::R3, "R3"),
    (RelatorFamily::R4, "R4"),
    (RelatorFamily::R5, "R5"),
    (RelatorFamily::R6, "R6"),
    (RelatorFamily::R7, "R7"),
    (RelatorFamily::R8, "R8"),
    (RelatorFamily::SR, "SR"),
    (RelatorFamily::BRBar, "BR-bar"),
    (RelatorFamily::R1Bar, "R1-bar"),
    (RelatorFamily::R2Bar, "R2-bar"),
    (RelatorFamily::R3Bar, "R3-bar"),
    (RelatorFamily::R4Bar, "R4-bar"),
    (RelatorFamily::SRBar, "SR-bar"),
    (RelatorFamily::IIIa, "IIIa"),
    (RelatorFamily::IIIb, "IIIb"),
    (RelatorFamily::IIIc, "IIIc"),
    (RelatorFamily::IIId, "IIId"),
    (RelatorFamily::Quot1Commute, "quot1-1"),
    (RelatorFamily::Quot1SigmaSquare, "quot1-2"),
    (RelatorFamily::Quot1ZFold, "quot1-3"),
];

impl RelatorFamily {
    pub fn label(self) -> &'static str {
        FAMILY_LABELS
            .iter()
            .find(|(f, _)| *f == self)
            .map(|(_, s)| *s)
            .unwrap()
    }

    /// The lifted (tau/c/d) counterpart of a closed-surface family.
    pub fn barred(self) -> Option<RelatorFamily> {
        use RelatorFamily::*;
        Some(match self {
            BR => BRBar,
            R1 => R1Bar,
            R2 => R2Bar,
            R3 => R3Bar,
            R4 => R4Bar,
            SR => SRBar,
            _ => return None,
        })
    }
}

impl fmt::Display for RelatorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RelatorFamily {
    type Err = PresentationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FAMILY_LABELS
            .iter()
            .find(|(_, l)| *l == s)
            .map(|(f, _)| *f)
            .ok_or_else(|| PresentationError::Malformed(format!("unknown family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    /// `B_m(S_g)`
    Closed,
    /// `B_n(S_g \ {x_1..x_m})`
    Punctured,
    /// `B_{n,m}(S_g)`
    Mixed,
    /// `B_{n,m}(S_g)` modulo the commutator subgroup of the kernel
    MixedQuotient,
    /// the abelianized kernel
    KernelAb,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Closed => "closed",
            GroupKind::Punctured => "punctured",
            GroupKind::Mixed => "mixed",
            GroupKind::MixedQuotient => "mixed_quotient",
            GroupKind::KernelAb => "kernel_ab",
        }
    }
}

impl FromStr for GroupKind {
    type Err = PresentationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.replace('-', "_").as_str() {
            "closed" => GroupKind::Closed,
            "punctured" => GroupKind::Punctured,
            "mixed" => GroupKind::Mixed,
            "mixed_quotient" => GroupKind::MixedQuotient,
            "kernel_ab" => GroupKind::KernelAb,
            _ => return Err(PresentationError::Malformed(format!("unknown group `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub g: u32,
    pub n: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub family: RelatorFamily,
    pub word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub kind: GroupKind,
    /// For [`GroupKind::Closed`] the `n` field is unused and set to 0.
    pub params: Params,
    pub alphabet: Alphabet,
    pub relators: Vec<Relator>,
}

impl Presentation {
    pub fn family(&self, family: RelatorFamily) -> impl Iterator<Item = &Word> {
        self.relators
            .iter()
            .filter(move |r| r.family == family)
            .map(|r| &r.word)
    }

    pub fn count(&self, family: RelatorFamily) -> usize {
        self.family(family).count()
    }

    /// Checks that every relator is nonempty, reduced and over the alphabet.
    pub fn validate(&self) -> Result<(), PresentationError> {
        for r in &self.relators {
            if r.word.is_empty() || !r.word.is_reduced() {
                return Err(PresentationError::Malformed(format!(
                    "{} relator `{}` is empty or not reduced",
                    r.family, r.word
                )));
            }
            self.alphabet.check(&r.word)?;
        }
        Ok(())
    }
}

fn check_param(name: &'static str, value: u32) -> Result<(), PresentationError> {
    if value == 0 {
        Err(PresentationError::InvalidParameter {
            name,
            value: 0,
            min: 1,
        })
    } else {
        Ok(())
    }
}

struct Out {
    relators: Vec<Relator>,
}

impl Out {
    fn rel(&mut self, family: RelatorFamily, u: Word, v: Word) {
        self.relators.push(Relator {
            family,
            word: Word::relator(&u, &v),
        });
    }
}

fn g1(x: Generator) -> Word {
    Word::gen(x)
}
fn gi(x: Generator) -> Word {
    Word::power(x, -1)
}
fn seq(parts: &[Word]) -> Word {
    Word::product(parts.iter())
}

/// Constructors for the braid and handle generators.
type GeneratorSet = (
    fn(u32) -> Generator,
    fn(u32) -> Generator,
    fn(u32) -> Generator,
);

/// Relations (BR), (R1)–(R4) over braid generators `sigma_1..sigma_{k-1}`,
/// handle generators `a_r, b_r`, written with the given generator constructors
/// so that the same code produces the barred relations over tau, c, d.
fn braid_and_handle_relations(
    out: &mut Out,
    k: u32,
    g: u32,
    (sig, a, b): GeneratorSet,
    tags: [RelatorFamily; 5],
) {
    let [br, r1, r2, r3, r4] = tags;
    let s = |i| g1(sig(i));
    let si = |i| gi(sig(i));
    // (BR)
    for i in 1..k {
        for j in (i + 2)..k {
            out.rel(br, seq(&[s(i), s(j)]), seq(&[s(j), s(i)]));
        }
    }
    for i in 1..k.saturating_sub(1) {
        out.rel(
            br,
            seq(&[s(i), s(i + 1), s(i)]),
            seq(&[s(i + 1), s(i), s(i + 1)]),
        );
    }
    // (R1)
    for x in [a, b] {
        for r in 1..=g {
            for i in 2..k {
                out.rel(r1, seq(&[g1(x(r)), s(i)]), seq(&[s(i), g1(x(r))]));
            }
        }
    }
    if k < 2 {
        return;
    }
    // (R2)
    for x in [a, b] {
        for r in 1..=g {
            let xr = g1(x(r));
            out.rel(
                r2,
                seq(&[si(1), xr.clone(), si(1), xr.clone()]),
                seq(&[xr.clone(), si(1), xr.clone(), si(1)]),
            );
        }
    }
    // (R3), s < r
    for (x, y) in [(a, a), (b, b), (a, b), (b, a)] {
        for r in 1..=g {
            for s_ in 1..r {
                let xs = g1(x(s_));
                let yr = g1(y(r));
                out.rel(
                    r3,
                    seq(&[si(1), xs.clone(), s(1), yr.clone()]),
                    seq(&[yr, si(1), xs, s(1)]),
                );
            }
        }
    }
    // (R4)
    for r in 1..=g {
        let (ar, br_) = (g1(a(r)), g1(b(r)));
        out.rel(
            r4,
            seq(&[si(1), ar.clone(), si(1), br_.clone()]),
            seq(&[br_, si(1), ar, s(1)]),
        );
    }
}

/// `[a_1, b_1^-1] ... [a_g, b_g^-1]` over the given handle generators.
fn handle_commutators(g: u32, a: fn(u32) -> Generator, b: fn(u32) -> Generator) -> Word {
    let mut w = Word::empty();
    for r in 1..=g {
        w = w.concat(&Word::commutator(&g1(a(r)), &gi(b(r))));
    }
    w
}

/// `x_1 x_2 ... x_{k-1}^2 ... x_2 x_1` (empty for `k = 1`).
fn full_twist_block(k: u32, x: fn(u32) -> Generator) -> Word {
    let mut w = Word::empty();
    for i in 1..k {
        w = w.concat(&g1(x(i)));
    }
    for i in (1..k).rev() {
        w = w.concat(&g1(x(i)));
    }
    w
}

fn closed_relators(out: &mut Out, m: u32, g: u32, lifted: bool) {
    use RelatorFamily::*;
    let gens: GeneratorSet = if lifted {
        (Generator::tau, Generator::c, Generator::d)
    } else {
        (Generator::sigma, Generator::a, Generator::b)
    };
    let tags = if lifted {
        [BRBar, R1Bar, R2Bar, R3Bar, R4Bar]
    } else {
        [BR, R1, R2, R3, R4]
    };
    braid_and_handle_relations(out, m, g, gens, tags);
    if !lifted {
        out.rel(
            SR,
            handle_commutators(g, gens.1, gens.2),
            full_twist_block(m, gens.0),
        );
    }
}

fn closed_alphabet(m: u32, g: u32, lifted: bool) -> Vec<Generator> {
    let (s, a, b): GeneratorSet = if lifted {
        (Generator::tau, Generator::c, Generator::d)
    } else {
        (Generator::sigma, Generator::a, Generator::b)
    };
    (1..m)
        .map(s)
        .chain((1..=g).map(a))
        .chain((1..=g).map(b))
        .collect()
}

/// Presentation of `B_m(S_g)`.
pub fn build_closed(m: u32, g: u32) -> Result<Presentation, PresentationError> {
    check_param("m", m)?;
    check_param("g", g)?;
    let mut out = Out {
        relators: Vec::new(),
    };
    closed_relators(&mut out, m, g, false);
    Ok(Presentation {
        kind: GroupKind::Closed,
        params: Params { g, n: 0, m },
        alphabet: Alphabet::new(closed_alphabet(m, g, false)),
        relators: out.relators,
    })
}

fn punctured_alphabet(n: u32, m: u32, g: u32) -> Vec<Generator> {
    let mut gens = closed_alphabet(n, g, false);
    gens.extend((1..m).map(Generator::z));
    gens
}

fn punctured_relators(out: &mut Out, n: u32, m: u32, g: u32) {
    use RelatorFamily::*;
    braid_and_handle_relations(
        out,
        n,
        g,
        (Generator::sigma, Generator::a, Generator::b),
        [BR, R1, R2, R3, R4],
    );
    let s = |i| g1(Generator::sigma(i));
    let si = |i| gi(Generator::sigma(i));
    let z = |j| g1(Generator::z(j));
    // (R5)
    for j in 1..m {
        for i in 2..n {
            out.rel(R5, seq(&[z(j), s(i)]), seq(&[s(i), z(j)]));
        }
    }
    if n < 2 {
        return;
    }
    // (R6)
    for x in [Generator::a as fn(u32) -> Generator, Generator::b] {
        for r in 1..=g {
            for j in 1..m {
                let xr = g1(x(r));
                out.rel(
                    R6,
                    seq(&[si(1), z(j), s(1), xr.clone()]),
                    seq(&[xr, si(1), z(j), s(1)]),
                );
            }
        }
    }
    // (R7)
    for j in 1..m {
        for k in (j + 1)..m {
            out.rel(
                R7,
                seq(&[si(1), z(j), s(1), z(k)]),
                seq(&[z(k), si(1), z(j), s(1)]),
            );
        }
    }
    // (R8)
    for j in 1..m {
        out.rel(
            R8,
            seq(&[si(1), z(j), si(1), z(j)]),
            seq(&[z(j), si(1), z(j), si(1)]),
        );
    }
}

/// Presentation of the punctured-surface braid group `B_n(S_g \ {x_1..x_m})`.
pub fn build_punctured(n: u32, m: u32, g: u32) -> Result<Presentation, PresentationError> {
    check_param("n", n)?;
    check_param("m", m)?;
    check_param("g", g)?;
    let mut out = Out {
        relators: Vec::new(),
    };
    punctured_relators(&mut out, n, m, g);
    Ok(Presentation {
        kind: GroupKind::Punctured,
        params: Params { g, n, m },
        alphabet: Alphabet::new(punctured_alphabet(n, m, g)),
        relators: out.relators,
    })
}

/// Orientation of the long word returned by [`z_m_word`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZmOrientation {
    /// The word equals `z_m^-1` (convention used throughout this crate; it
    /// agrees with `z_m = (z_1 ... z_{m-1})^-1` in the abelianized kernel).
    InverseOfZm,
    /// The word equals `z_m` (the convention of the `SR-bar` footnote).
    Zm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZmWord {
    pub word: Word,
    /// How the crate interprets `word`.
    pub orientation: ZmOrientation,
    /// The competing convention, kept for reporting.
    pub alternative: ZmOrientation,
}

impl ZmWord {
    /// `z_m` itself as a word over the punctured alphabet.
    pub fn zm(&self) -> Word {
        match self.orientation {
            ZmOrientation::InverseOfZm => self.word.inverse(),
            ZmOrientation::Zm => self.word.clone(),
        }
    }
}

/// `W = [a_1,b_1^-1]...[a_g,b_g^-1] sigma_1^-1 ... sigma_{n-1}^-2 ... sigma_1^-1 z_1...z_{m-1}`,
/// the loop of the first strand around the m-th puncture.
pub fn z_m_word(n: u32, m: u32, g: u32) -> Result<ZmWord, PresentationError> {
    check_param("n", n)?;
    check_param("m", m)?;
    check_param("g", g)?;
    let zs: Vec<Word> = (1..m).map(|j| g1(Generator::z(j))).collect();
    let word = Word::product([
        &handle_commutators(g, Generator::a, Generator::b),
        &full_twist_block(n, Generator::sigma).inverse(),
        &Word::product(zs.iter()),
    ]);
    Ok(ZmWord {
        word,
        orientation: ZmOrientation::InverseOfZm,
        alternative: ZmOrientation::Zm,
    })
}

/// Replaces `z_m` (which is not a generator of the punctured group) by its
/// expansion.
fn expand_zm(w: &Word, m: u32, zm: &Word) -> Word {
    w.substitute(|x| (x == Generator::z(m)).then(|| zm.clone()))
}

/// Presentation of the mixed braid group `B_{n,m}(S_g)`. Every occurrence of
/// `z_m` is expanded via [`z_m_word`] so that all relators lie over the
/// declared alphabet.
pub fn build_mixed(n: u32, m: u32, g: u32) -> Result<Presentation, PresentationError> {
    use RelatorFamily::*;
    let zm = z_m_word(n, m, g)?.zm();
    let mut out = Out {
        relators: Vec::new(),
    };

    // (I)
    punctured_relators(&mut out, n, m, g);

    // (II)
    closed_relators(&mut out, m, g, true);
    let lhs = Word::relator(
        &handle_commutators(g, Generator::c, Generator::d),
        &full_twist_block(m, Generator::tau),
    );
    let z_all: Vec<Word> = (1..=m).map(|j| g1(Generator::z(j))).collect();
    let sigma0 = Word::product(z_all.iter());
    let big_sigma = |i: u32| {
        let mut w = Word::empty();
        for k in (1..=i).rev() {
            w = w.concat(&gi(Generator::sigma(k)));
        }
        w.concat(&sigma0)
    };
    let mut rhs = Word::empty();
    for i in (0..n).rev() {
        let s = big_sigma(i);
        rhs = Word::product([&rhs, &s, &gi(Generator::z(1)), &s.inverse()]);
    }
    out.rel(SRBar, lhs, rhs);

    // (III)
    let z1 = || g1(Generator::z(1));
    let z1i = || gi(Generator::z(1));
    let conj = |x: &Word, y: &Word| Word::product([x, y, &x.inverse()]);
    let coset_letters: Vec<Generator> = (1..m)
        .map(Generator::tau)
        .chain((1..=g).map(Generator::c))
        .chain((1..=g).map(Generator::d))
        .collect();
    for &x in &coset_letters {
        for i in 1..n {
            let s = g1(Generator::sigma(i));
            out.rel(IIIa, conj(&g1(x), &s), s);
        }
    }
    // (b): conjugates of a_s
    for j in 1..m {
        for s in 1..=g {
            let a = g1(Generator::a(s));
            out.rel(IIIb, conj(&g1(Generator::tau(j)), &a), a);
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let (a_s, a_r) = (g1(Generator::a(s)), g1(Generator::a(r)));
            let image = match r.cmp(&s) {
                std::cmp::Ordering::Equal => conj(&seq(&[a_s.inverse(), z1i()]), &a_s),
                std::cmp::Ordering::Less => a_s.clone(),
                std::cmp::Ordering::Greater => {
                    conj(&seq(&[a_r.inverse(), z1i(), a_r.clone(), z1()]), &a_s)
                }
            };
            out.rel(IIIb, conj(&g1(Generator::c(r)), &a_s), image);
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let a_s = g1(Generator::a(s));
            let (b_s, b_r) = (g1(Generator::b(s)), g1(Generator::b(r)));
            let image = match r.cmp(&s) {
                std::cmp::Ordering::Equal => conj(
                    &seq(&[b_s.inverse(), z1i(), b_s.clone()]),
                    &seq(&[z1(), a_s.clone()]),
                ),
                std::cmp::Ordering::Less => a_s.clone(),
                std::cmp::Ordering::Greater => {
                    conj(&seq(&[b_r.inverse(), z1i(), b_r.clone(), z1()]), &a_s)
                }
            };
            out.rel(IIIb, conj(&g1(Generator::d(r)), &a_s), image);
        }
    }
    // (c): conjugates of b_s
    for j in 1..m {
        for s in 1..=g {
            let b = g1(Generator::b(s));
            out.rel(IIIc, conj(&g1(Generator::tau(j)), &b), b);
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let (a_s, a_r, b_s) = (
                g1(Generator::a(s)),
                g1(Generator::a(r)),
                g1(Generator::b(s)),
            );
            let image = match r.cmp(&s) {
                std::cmp::Ordering::Equal => seq(&[a_s.inverse(), z1i(), a_s.clone(), b_s.clone()]),
                std::cmp::Ordering::Less => b_s.clone(),
                std::cmp::Ordering::Greater => {
                    conj(&seq(&[a_r.inverse(), z1i(), a_r.clone(), z1()]), &b_s)
                }
            };
            out.rel(IIIc, conj(&g1(Generator::c(r)), &b_s), image);
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let (b_s, b_r) = (g1(Generator::b(s)), g1(Generator::b(r)));
            let image = match r.cmp(&s) {
                std::cmp::Ordering::Equal => conj(&seq(&[b_s.inverse(), z1i()]), &b_s),
                std::cmp::Ordering::Less => b_s.clone(),
                std::cmp::Ordering::Greater => {
                    conj(&seq(&[b_r.inverse(), z1i(), b_r.clone(), z1()]), &b_s)
                }
            };
            out.rel(IIIc, conj(&g1(Generator::d(r)), &b_s), image);
        }
    }
    // (d): conjugates of z_k
    for j in 1..m {
        for k in 1..m {
            let zk = g1(Generator::z(k));
            let image = if j + 1 == k {
                g1(Generator::z(k - 1))
            } else if j == k {
                conj(&zk, &g1(Generator::z(k + 1)))
            } else {
                zk.clone()
            };
            out.rel(IIId, conj(&g1(Generator::tau(j)), &zk), image);
        }
    }
    for r in 1..=g {
        for k in 1..m {
            let zk = g1(Generator::z(k));
            let image = if k == 1 {
                conj(&g1(Generator::a(r)), &zk)
            } else {
                zk.clone()
            };
            out.rel(IIId, conj(&g1(Generator::c(r)), &zk), image);
        }
    }
    for r in 1..=g {
        for k in 1..m {
            let zk = g1(Generator::z(k));
            let image = if k == 1 {
                conj(&gi(Generator::b(r)), &zk)
            } else {
                zk.clone()
            };
            out.rel(IIId, conj(&g1(Generator::d(r)), &zk), image);
        }
    }

    for r in out.relators.iter_mut() {
        r.word = expand_zm(&r.word, m, &zm);
    }
    let mut alphabet = punctured_alphabet(n, m, g);
    alphabet.extend(closed_alphabet(m, g, true));
    Ok(Presentation {
        kind: GroupKind::Mixed,
        params: Params { g, n, m },
        alphabet: Alphabet::new(alphabet),
        relators: out.relators,
    })
}

fn kernel_ab_alphabet(m: u32, g: u32) -> Vec<Generator> {
    std::iter::once(Generator::sigma_class())
        .chain((1..=g).map(Generator::a))
        .chain((1..=g).map(Generator::b))
        .chain((1..=m).map(Generator::z))
        .collect()
}

fn kernel_ab_relators(out: &mut Out, m: u32, g: u32) {
    use RelatorFamily::*;
    let gens = kernel_ab_alphabet(m, g);
    for (i, &x) in gens.iter().enumerate() {
        for &y in &gens[i + 1..] {
            out.relators.push(Relator {
                family: Quot1Commute,
                word: Word::commutator(&g1(x), &g1(y)),
            });
        }
    }
    out.relators.push(Relator {
        family: Quot1SigmaSquare,
        word: Word::power(Generator::sigma_class(), 2),
    });
    let zs: Vec<Word> = (1..m).map(|j| g1(Generator::z(j))).collect();
    out.rel(
        Quot1ZFold,
        g1(Generator::z(m)),
        Word::product(zs.iter()).inverse(),
    );
}

/// Presentation of the abelianized kernel `beta_{n,m} / Gamma_2`.
pub fn build_kernel_abelianization(
    n: u32,
    m: u32,
    g: u32,
) -> Result<Presentation, PresentationError> {
    check_param("n", n)?;
    check_param("m", m)?;
    check_param("g", g)?;
    let mut out = Out {
        relators: Vec::new(),
    };
    kernel_ab_relators(&mut out, m, g);
    Ok(Presentation {
        kind: GroupKind::KernelAb,
        params: Params { g, n, m },
        alphabet: Alphabet::new(kernel_ab_alphabet(m, g)),
        relators: out.relators,
    })
}

/// Presentation of `B_{n,m}(S_g) / Gamma_2(beta_{n,m})`.
///
/// The middle factor of the lifted surface relation is emitted with
/// `tau_{m-1}^-2`, matching the closed-surface relation it lifts.
pub fn build_mixed_quotient(n: u32, m: u32, g: u32) -> Result<Presentation, PresentationError> {
    use RelatorFamily::*;
    check_param("n", n)?;
    check_param("m", m)?;
    check_param("g", g)?;
    let mut out = Out {
        relators: Vec::new(),
    };
    // (I)
    kernel_ab_relators(&mut out, m, g);
    // (II)
    closed_relators(&mut out, m, g, true);
    let lhs = Word::relator(
        &handle_commutators(g, Generator::c, Generator::d),
        &full_twist_block(m, Generator::tau),
    );
    out.rel(SRBar, lhs, Word::power(Generator::z(1), -(n as i64)));
    // (III)
    let comm = |x: Generator, y: Generator| Word::commutator(&g1(x), &g1(y));
    let taus: Vec<Generator> = (1..m).map(Generator::tau).collect();
    let cs: Vec<Generator> = (1..=g).map(Generator::c).collect();
    let ds: Vec<Generator> = (1..=g).map(Generator::d).collect();
    let mut push = |fam, w: Word| {
        out.relators.push(Relator {
            family: fam,
            word: w,
        })
    };
    for &x in taus.iter().chain(&cs).chain(&ds) {
        push(IIIa, comm(x, Generator::sigma_class()));
    }
    for &x in taus.iter().chain(&cs) {
        for s in 1..=g {
            push(IIIa, comm(x, Generator::a(s)));
        }
    }
    for &x in taus.iter().chain(&ds) {
        for s in 1..=g {
            push(IIIa, comm(x, Generator::b(s)));
        }
    }
    for &x in cs.iter().chain(&ds) {
        for k in 1..m {
            push(IIIa, comm(x, Generator::z(k)));
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let (c, b) = (g1(Generator::c(r)), g1(Generator::b(s)));
            let image = if r == s {
                seq(&[gi(Generator::z(1)), b.clone()])
            } else {
                b.clone()
            };
            push(
                IIIb,
                Word::relator(&seq(&[c.clone(), b, c.inverse()]), &image),
            );
        }
    }
    for r in 1..=g {
        for s in 1..=g {
            let (d, a) = (g1(Generator::d(r)), g1(Generator::a(s)));
            let image = if r == s {
                seq(&[g1(Generator::z(1)), a.clone()])
            } else {
                a.clone()
            };
            push(
                IIIc,
                Word::relator(&seq(&[d.clone(), a, d.inverse()]), &image),
            );
        }
    }
    for i in 1..m {
        for k in 1..m {
            let image = if i + 1 == k {
                Generator::z(k - 1)
            } else if i == k {
                Generator::z(k + 1)
            } else {
                Generator::z(k)
            };
            let t = g1(Generator::tau(i));
            push(
                IIId,
                Word::relator(
                    &seq(&[t.clone(), g1(Generator::z(k)), t.inverse()]),
                    &g1(image),
                ),
            );
        }
    }
    let mut alphabet = kernel_ab_alphabet(m, g);
    alphabet.extend(closed_alphabet(m, g, true));
    Ok(Presentation {
        kind: GroupKind::MixedQuotient,
        params: Params { g, n, m },
        alphabet: Alphabet::new(alphabet),
        relators: out.relators,
    })
}

/// Dispatches to the builder for `kind`.
pub fn build(kind: GroupKind, params: Params) -> Result<Presentation, PresentationError> {
    let Params { g, n, m } = params;
    match kind {
        GroupKind::Closed => build_closed(m, g),
        GroupKind::Punctured => build_punctured(n, m, g),
        GroupKind::Mixed => build_mixed(n, m, g),
        GroupKind::MixedQuotient => build_mixed_quotient(n, m, g),
        GroupKind::KernelAb => build_kernel_abelianization(n, m, g),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Serialize, Deserialize)]
struct JsonRelator {
    family: String,
    word: String,
}

#[derive(Serialize, Deserialize)]
struct JsonPresentation {
    group: String,
    params: Params,
    generators: Vec<String>,
    relators: Vec<JsonRelator>,
}

/// Renders a presentation. The JSON form has top-level keys
/// `group`, `params`, `generators`, `relators`; the text form is
///
/// ```text
/// group closed
/// params g=1 n=0 m=2
/// generators s1 a1 b1
/// SR: a1 b1^-1 a1^-1 b1 s1^-2
/// ```
pub fn serialize(p: &Presentation, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let doc = JsonPresentation {
                group: p.kind.name().to_string(),
                params: p.params,
                generators: p
                    .alphabet
                    .generators()
                    .iter()
                    .map(|g| g.to_string())
                    .collect(),
                relators: p
                    .relators
                    .iter()
                    .map(|r| JsonRelator {
                        family: r.family.to_string(),
                        word: r.word.to_string(),
                    })
                    .collect(),
            };
            let mut bytes = serde_json::to_vec_pretty(&doc).expect("presentation serializes");
            bytes.push(b'\n');
            bytes
        }
        Format::Text => {
            let mut s = String::new();
            s.push_str(&format!("group {}\n", p.kind.name()));
            let Params { g, n, m } = p.params;
            s.push_str(&format!("params g={g} n={n} m={m}\n"));
            let gens: Vec<String> = p
                .alphabet
                .generators()
                .iter()
                .map(|g| g.to_string())
                .collect();
            s.push_str(&format!("generators {}\n", gens.join(" ")));
            for r in &p.relators {
                s.push_str(&format!("{}: {}\n", r.family, r.word));
            }
            s.into_bytes()
        }
    }
}

/// Inverse of [`serialize`].
pub fn parse(bytes: &[u8], format: Format) -> Result<Presentation, PresentationError> {
    let malformed = |e: &dyn fmt::Display| PresentationError::Malformed(e.to_string());
    let (kind, params, generators, relators) = match format {
        Format::Json => {
            let doc: JsonPresentation = serde_json::from_slice(bytes).map_err(|e| malformed(&e))?;
            let rels = doc
                .relators
                .into_iter()
                .map(|r| Ok((r.family.parse()?, r.word.parse()?)))
                .collect::<Result<Vec<_>, PresentationError>>()?;
            (doc.group.parse()?, doc.params, doc.generators, rels)
        }
        Format::Text => {
            let text = std::str::from_utf8(bytes).map_err(|e| malformed(&e))?;
            let mut lines = text.lines();
            let mut field = |key: &str| -> Result<String, PresentationError> {
                let line = lines.next().unwrap_or_default();
                line.strip_prefix(key)
                    .map(|rest| rest.trim().to_string())
                    .ok_or_else(|| PresentationError::Malformed(format!("expected `{key}` line")))
            };
            let kind: GroupKind = field("group")?.parse()?;
            let mut params = Params { g: 0, n: 0, m: 0 };
            for kv in field("params")?.split_whitespace() {
                let (k, v) = kv.split_once('=').ok_or_else(|| malformed(&kv))?;
                let v: u32 = v.parse().map_err(|e| malformed(&e))?;
                match k {
                    "g" => params.g = v,
                    "n" => params.n = v,
                    "m" => params.m = v,
                    _ => return Err(malformed(&k)),
                }
            }
            let generators = field("generators")?
                .split_whitespace()
                .map(String::from)
                .collect();
            let rels = lines
                .filter(|l| !l.trim().is_empty())
                .map(|l| {
                    let (fam, w) = l.split_once(':').ok_or_else(|| malformed(&l))?;
                    Ok((fam.trim().parse()?, w.trim().parse()?))
                })
                .collect::<Result<Vec<_>, PresentationError>>()?;
            (kind, params, generators, rels)
        }
    };
    let generators = generators
        .iter()
        .map(|s| s.parse::<Generator>())
        .collect::<Result<Vec<_>, _>>()?;
    let p = Presentation {
        kind,
        params,
        alphabet: Alphabet::new(generators),
        relators: relators
            .into_iter()
            .map(|(family, word)| Relator { family, word })
            .collect(),
    };
    p.validate()?;
    Ok(p)
}

/// Exponent-sum matrix: one row per relator, one column per generator.
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let gens = p.alphabet.generators();
    let rows: Vec<Vec<i64>> = p
        .relators
        .iter()
        .map(|r| {
            let mut row = vec![0i64; gens.len()];
            for l in r.word.letters() {
                let j = p.alphabet.position(l.generator).expect("validated relator");
                row[j] += l.sign();
            }
            row
        })
        .collect();
    IntMatrix::from_rows(gens.len(), &rows)
}

/// Free rank and torsion of the abelianization.
pub fn abelianization(p: &Presentation) -> InvariantFactors {
    invariant_factors(&relation_matrix(p), p.alphabet.len()).expect("matching dimensions")
}

/// Replaces tau, c, d by sigma, a, b.
pub fn unlift(w: &Word) -> Word {
    w.substitute(|x| {
        let fam = match x.family {
            Family::Tau => Family::Sigma,
            Family::C => Family::A,
            Family::D => Family::B,
            _ => return None,
        };
        Some(Word::gen(Generator::new(fam, x.index)))
    })
}

/// Replaces sigma, a, b by tau, c, d.
pub fn lift(w: &Word) -> Word {
    w.substitute(|x| {
        let fam = match x.family {
            Family::Sigma => Family::Tau,
            Family::A => Family::C,
            Family::B => Family::D,
            _ => return None,
        };
        Some(Word::gen(Generator::new(fam, x.index)))
    })
}
