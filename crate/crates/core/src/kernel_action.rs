//! Arithmetic in the abelianized kernel `K(g,m) = Z^(2g+m-1) x Z/2`, the
//! conjugation action of the coset letters `tau_i, c_r, d_r` on it, and the
//! normal form `coset word * kernel vector` for words of the quotient group.
//!
//! Coordinates are ordered `a_1..a_g, b_1..b_g, z_1..z_(m-1)` followed by
//! the `sigma` bit. `z_m` is not a coordinate: it is folded to
//! `-(z_1 + ... + z_(m-1))` as soon as it is read.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::presentations::RelatorFamily;
use crate::words::{Family, Generator, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("letter `{0}` is not in the alphabet for g={1}, n={2}, m={3}")]
    NotInAlphabet(Generator, u32, u32, u32),
    #[error("`{0}` does not act on the kernel (expected tau, c or d)")]
    NotACosetLetter(Generator),
    #[error("no kernel correction is defined for relator family {0}")]
    UnknownFamily(RelatorFamily),
    #[error("vectors live in different kernels: {0:?} vs {1:?}")]
    Shape((u32, u32), (u32, u32)),
}

/// Shape of `K(g,m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelShape {
    pub g: u32,
    pub m: u32,
}

impl KernelShape {
    pub fn new(g: u32, m: u32) -> Self {
        KernelShape { g, m }
    }

    /// Rank of the free part.
    pub fn rank(self) -> usize {
        (2 * self.g + self.m.saturating_sub(1)) as usize
    }

    pub fn a(self, r: u32) -> usize {
        debug_assert!((1..=self.g).contains(&r));
        (r - 1) as usize
    }

    pub fn b(self, r: u32) -> usize {
        debug_assert!((1..=self.g).contains(&r));
        (self.g + r - 1) as usize
    }

    /// Index of `z_j` for `1 <= j <= m-1`.
    pub fn z(self, j: u32) -> usize {
        debug_assert!(j >= 1 && j < self.m);
        (2 * self.g + j - 1) as usize
    }

    /// Human-readable coordinate names, including the trailing `s`.
    pub fn coordinate_names(self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.g).map(|r| format!("a{r}")).collect();
        v.extend((1..=self.g).map(|r| format!("b{r}")));
        v.extend((1..self.m).map(|j| format!("z{j}")));
        v.push("s".into());
        v
    }
}

/// Element of `K(g,m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    shape: KernelShape,
    free: Vec<i64>,
    sigma: u8,
}

impl ExponentVector {
    pub fn zero(g: u32, m: u32) -> Self {
        let shape = KernelShape::new(g, m);
        ExponentVector {
            shape,
            free: vec![0; shape.rank()],
            sigma: 0,
        }
    }

    pub fn from_parts(g: u32, m: u32, free: Vec<i64>, sigma: u8) -> Result<Self, KernelError> {
        let shape = KernelShape::new(g, m);
        if free.len() != shape.rank() {
            return Err(KernelError::Shape((g, m), (free.len() as u32, 0)));
        }
        Ok(ExponentVector {
            shape,
            free,
            sigma: sigma % 2,
        })
    }

    /// Image of a single kernel generator (with sign).
    pub fn of_letter(l: Letter, g: u32, n: u32, m: u32) -> Result<Self, KernelError> {
        let mut v = ExponentVector::zero(g, m);
        v.add_letter(l, n)?;
        Ok(v)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }

    pub fn free(&self) -> &[i64] {
        &self.free
    }

    pub fn sigma(&self) -> u8 {
        self.sigma
    }

    pub fn a(&self, r: u32) -> i64 {
        self.free[self.shape.a(r)]
    }

    pub fn b(&self, r: u32) -> i64 {
        self.free[self.shape.b(r)]
    }

    pub fn z(&self, j: u32) -> i64 {
        self.free[self.shape.z(j)]
    }

    pub fn is_zero(&self) -> bool {
        self.sigma == 0 && self.free.iter().all(|&x| x == 0)
    }

    fn add_letter(&mut self, l: Letter, n: u32) -> Result<(), KernelError> {
        let KernelShape { g, m } = self.shape;
        let x = l.generator;
        let e = l.sign();
        let bad = || KernelError::NotInAlphabet(x, g, n, m);
        match x.family {
            Family::Sigma => {
                if x.index == 0 || x.index >= n {
                    return Err(bad());
                }
                self.sigma ^= 1;
            }
            Family::SigmaClass => self.sigma ^= 1,
            Family::A if (1..=g).contains(&x.index) => self.free[self.shape.a(x.index)] += e,
            Family::B if (1..=g).contains(&x.index) => self.free[self.shape.b(x.index)] += e,
            Family::Z if x.index >= 1 && x.index < m => self.free[self.shape.z(x.index)] += e,
            Family::Z if x.index == m => {
                for j in 1..m {
                    self.free[self.shape.z(j)] -= e;
                }
            }
            _ => return Err(bad()),
        }
        Ok(())
    }

    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        assert_eq!(
            self.shape, other.shape,
            "adding vectors of different kernels"
        );
        ExponentVector {
            shape: self.shape,
            free: self
                .free
                .iter()
                .zip(&other.free)
                .map(|(x, y)| x + y)
                .collect(),
            sigma: self.sigma ^ other.sigma,
        }
    }

    pub fn neg(&self) -> ExponentVector {
        ExponentVector {
            shape: self.shape,
            free: self.free.iter().map(|x| -x).collect(),
            sigma: self.sigma,
        }
    }

    pub fn scale(&self, k: i64) -> ExponentVector {
        ExponentVector {
            shape: self.shape,
            free: self.free.iter().map(|x| x * k).collect(),
            sigma: ((self.sigma as i64 * k).rem_euclid(2)) as u8,
        }
    }
}

impl Serialize for ExponentVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let g = self.shape.g as usize;
        let mut st = s.serialize_struct("ExponentVector", 4)?;
        st.serialize_field("a", &self.free[..g])?;
        st.serialize_field("b", &self.free[g..2 * g])?;
        st.serialize_field("z", &self.free[2 * g..])?;
        st.serialize_field("sigma", &self.sigma)?;
        st.end()
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.shape.coordinate_names();
        let mut parts = Vec::new();
        for (name, &v) in names.iter().zip(&self.free) {
            if v != 0 {
                parts.push(if v == 1 {
                    name.clone()
                } else {
                    format!("{name}^{v}")
                });
            }
        }
        if self.sigma == 1 {
            parts.push("s".into());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Abelianization of a kernel word. Coset letters are rejected.
pub fn abelianize(w: &Word, g: u32, n: u32, m: u32) -> Result<ExponentVector, KernelError> {
    let mut v = ExponentVector::zero(g, m);
    for &l in w.letters() {
        v.add_letter(l, n)?;
    }
    Ok(v)
}

/// Integer matrix of `k -> x k x^-1` on the free part; the sigma bit is
/// fixed by every coset letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMatrix {
    rank: usize,
    /// Row-major; column `j` is the image of basis vector `j`.
    entries: Vec<i64>,
}

impl ActionMatrix {
    pub fn identity(rank: usize) -> Self {
        let mut entries = vec![0; rank * rank];
        for i in 0..rank {
            entries[i * rank + i] = 1;
        }
        ActionMatrix { rank, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.rank + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.rank + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries
            .chunks(self.rank.max(1))
            .take(self.rank)
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn mul(&self, other: &ActionMatrix) -> ActionMatrix {
        let k = self.rank;
        let mut out = ActionMatrix {
            rank: k,
            entries: vec![0; k * k],
        };
        for i in 0..k {
            for l in 0..k {
                let a = self.get(i, l);
                if a != 0 {
                    for j in 0..k {
                        out.entries[i * k + j] += a * other.get(l, j);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &ExponentVector) -> ExponentVector {
        assert_eq!(v.free.len(), self.rank);
        let free = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.get(i, j) * v.free[j]).sum())
            .collect();
        ExponentVector {
            shape: v.shape,
            free,
            sigma: v.sigma,
        }
    }

    /// Sparse view: `(row, col, value)` for every nonzero entry.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let k = self.rank;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(move |(idx, &v)| (idx / k, idx % k, v))
    }
}

/// Matrix of `k -> x^sign k x^-sign` on `K(g,m)`.
pub fn action_of(x: Generator, sign: i32, g: u32, m: u32) -> Result<ActionMatrix, KernelError> {
    let shape = KernelShape::new(g, m);
    let mut mat = ActionMatrix::identity(shape.rank());
    let inverse = sign < 0;
    let bad = || KernelError::NotInAlphabet(x, g, 0, m);
    match x.family {
        Family::Tau => {
            let i = x.index;
            if i == 0 || i >= m {
                return Err(bad());
            }
            if i + 1 < m {
                let (p, q) = (shape.z(i), shape.z(i + 1));
                mat.set(p, p, 0);
                mat.set(q, q, 0);
                mat.set(q, p, 1);
                mat.set(p, q, 1);
            } else {
                let col = shape.z(i);
                for j in 1..m {
                    mat.set(shape.z(j), col, -1);
                }
            }
        }
        Family::C => {
            if !(1..=g).contains(&x.index) {
                return Err(bad());
            }
            if m >= 2 {
                let v = if inverse { 1 } else { -1 };
                mat.set(shape.z(1), shape.b(x.index), v);
            }
        }
        Family::D => {
            if !(1..=g).contains(&x.index) {
                return Err(bad());
            }
            if m >= 2 {
                let v = if inverse { -1 } else { 1 };
                mat.set(shape.z(1), shape.a(x.index), v);
            }
        }
        _ => return Err(KernelError::NotACosetLetter(x)),
    }
    Ok(mat)
}

/// `coset_word * kernel`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub coset_word: Word,
    pub kernel: ExponentVector,
}

impl NormalForm {
    pub fn identity(g: u32, m: u32) -> Self {
        NormalForm {
            coset_word: Word::empty(),
            kernel: ExponentVector::zero(g, m),
        }
    }

    /// Product in the quotient group: the first kernel is pushed right past
    /// the second coset word.
    pub fn compose(&self, other: &NormalForm) -> Result<NormalForm, KernelError> {
        let KernelShape { g, m } = self.kernel.shape;
        let mut k = self.kernel.clone();
        for &l in other.coset_word.letters() {
            k = action_of(l.generator, -l.sign() as i32, g, m)?.apply(&k);
        }
        Ok(NormalForm {
            coset_word: self.coset_word.concat(&other.coset_word),
            kernel: k.add(&other.kernel),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.coset_word.is_empty() && self.kernel.is_zero()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.coset_word.is_empty(), self.kernel.is_zero()) {
            (true, _) => write!(f, "{}", self.kernel),
            (false, true) => write!(f, "{}", self.coset_word),
            (false, false) => write!(f, "{} . {}", self.coset_word, self.kernel),
        }
    }
}

/// Pushes every kernel letter to the right of the coset letters.
pub fn normalize(w: &Word, g: u32, n: u32, m: u32) -> Result<NormalForm, KernelError> {
    let mut coset = Word::empty();
    let mut k = ExponentVector::zero(g, m);
    for &l in w.letters() {
        if l.generator.family.is_coset() {
            k = action_of(l.generator, -l.sign() as i32, g, m)?.apply(&k);
            coset.push(l);
        } else {
            k.add_letter(l, n)?;
        }
    }
    Ok(NormalForm {
        coset_word: coset,
        kernel: k,
    })
}

/// Kernel element that a lifted relator of the closed presentation equals
/// in the quotient group.
pub fn kernel_correction(
    family: RelatorFamily,
    relator: &Word,
    g: u32,
    n: u32,
    m: u32,
) -> Result<ExponentVector, KernelError> {
    use RelatorFamily::*;
    if let Some(x) = relator.support().into_iter().find(|x| !x.family.is_coset()) {
        return Err(KernelError::NotACosetLetter(x));
    }
    match family {
        BR | R1 | R2 | R3 | R4 | BRBar | R1Bar | R2Bar | R3Bar | R4Bar => {
            Ok(ExponentVector::zero(g, m))
        }
        SR | SRBar => Ok(
            ExponentVector::of_letter(Letter::new(Generator::z(1), false), g, n, m)?
                .scale(-(n as i64)),
        ),
        other => Err(KernelError::UnknownFamily(other)),
    }
}
