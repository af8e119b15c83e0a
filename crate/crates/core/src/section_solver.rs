//! The abelianized section problem. A homomorphic section `s` of
//! `B_(n,m)(S_g)/Gamma -> B_m(S_g)` must send each generator `x` of
//! `B_m(S_g)` to `x * k_x` with `k_x` in the abelianized kernel. Writing
//! every coordinate of every `k_x` as an unknown and pushing the images of
//! each relator of `B_m(S_g)` into normal form gives an integer linear
//! system whose right-hand side depends on `n` only through the surface
//! relation. Its feasible set is `D Z` for a modulus `D`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::intlinalg::{IntMatrix, ParameterSet, ParametricSystem, ReducedSystem, SolutionSpace};
use crate::kernel_action::{action_of, kernel_correction, KernelError, KernelShape};
use crate::presentations::{build_closed, lift, PresentationError};
use crate::words::{Family, Generator, Word};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("assignment has {got} entries, the ansatz has {expected} unknowns")]
    Dimension { expected: usize, got: usize },
    #[error("assignment violates {0} constraint rows")]
    Unverified(usize),
    #[error("n = {0} is not admissible")]
    Infeasible(BigInt),
}

/// The exponent of coordinate `coordinate` in the image of `letter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnsatzUnknown {
    pub letter: Generator,
    /// Index into the coordinates of `K(g,m)`; `rank` is the sigma bit.
    pub coordinate: usize,
}

/// Layout of the unknowns for given `(g, m)`: letters `tau_1..tau_(m-1),
/// c_1..c_g, d_1..d_g`, each with `rank + 1` coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ansatz {
    pub shape: KernelShape,
    pub letters: Vec<Generator>,
}

impl Ansatz {
    pub fn new(g: u32, m: u32) -> Self {
        let letters = (1..m)
            .map(Generator::tau)
            .chain((1..=g).map(Generator::c))
            .chain((1..=g).map(Generator::d))
            .collect();
        Ansatz {
            shape: KernelShape::new(g, m),
            letters,
        }
    }

    /// Coordinates per letter, sigma included.
    pub fn width(&self) -> usize {
        self.shape.rank() + 1
    }

    pub fn unknowns(&self) -> usize {
        self.letters.len() * self.width()
    }

    pub fn integer_unknowns(&self) -> usize {
        self.letters.len() * self.shape.rank()
    }

    pub fn mod2_unknowns(&self) -> usize {
        self.letters.len()
    }

    pub fn index(&self, letter: Generator, coordinate: usize) -> usize {
        let l = self
            .letters
            .iter()
            .position(|&x| x == letter)
            .expect("letter not in ansatz");
        l * self.width() + coordinate
    }

    pub fn unknown(&self, idx: usize) -> AnsatzUnknown {
        AnsatzUnknown {
            letter: self.letters[idx / self.width()],
            coordinate: idx % self.width(),
        }
    }

    pub fn is_sigma(&self, idx: usize) -> bool {
        idx % self.width() == self.shape.rank()
    }

    fn name(&self, idx: usize) -> String {
        let u = self.unknown(idx);
        format!(
            "{}.{}",
            u.letter,
            self.shape.coordinate_names()[u.coordinate]
        )
    }

    /// Value of the unknown for `letter` at `coordinate` in `x`.
    pub fn value<'a>(&self, x: &'a [BigInt], letter: Generator, coordinate: usize) -> &'a BigInt {
        &x[self.index(letter, coordinate)]
    }
}

/// Integer combination of ansatz unknowns plus a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl AffineForm {
    fn zero(unknowns: usize) -> Self {
        AffineForm {
            coeffs: vec![0; unknowns],
            constant: 0,
        }
    }

    fn add_scaled(&mut self, other: &AffineForm, k: i64) {
        if k == 0 {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += k * b;
        }
        self.constant += k * other.constant;
    }
}

/// Kernel element with affine coordinates; the last entry is the sigma bit
/// (read modulo 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicKernel {
    pub coords: Vec<AffineForm>,
}

impl SymbolicKernel {
    fn zero(width: usize, unknowns: usize) -> Self {
        SymbolicKernel {
            coords: vec![AffineForm::zero(unknowns); width],
        }
    }

    fn add_scaled(&mut self, other: &SymbolicKernel, k: i64) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            a.add_scaled(b, k);
        }
    }

    /// Applies `x^sign . x^-sign` to the free coordinates.
    fn act(&self, x: Generator, sign: i32, g: u32, m: u32) -> Result<SymbolicKernel, KernelError> {
        let mat = action_of(x, sign, g, m)?;
        let rank = mat.rank();
        let unknowns = self.coords[0].coeffs.len();
        let mut out = SymbolicKernel::zero(rank + 1, unknowns);
        for (i, j, v) in mat.nonzeros() {
            out.coords[i].add_scaled(&self.coords[j], v);
        }
        out.coords[rank] = self.coords[rank].clone();
        Ok(out)
    }
}

/// The symbolic image kernel `k_x` of every letter: one fresh unknown per
/// coordinate.
pub fn build_ansatz(g: u32, m: u32) -> BTreeMap<Generator, SymbolicKernel> {
    let ans = Ansatz::new(g, m);
    let n = ans.unknowns();
    ans.letters
        .iter()
        .map(|&x| {
            let mut k = SymbolicKernel::zero(ans.width(), n);
            for c in 0..ans.width() {
                k.coords[c].coeffs[ans.index(x, c)] = 1;
            }
            (x, k)
        })
        .collect()
}

/// Where a constraint row came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowInfo {
    pub relator: usize,
    pub family: String,
    pub word: String,
    pub coordinate: String,
}

impl fmt::Display for RowInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} #{} [{}] coordinate {}",
            self.family, self.relator, self.word, self.coordinate
        )
    }
}

#[derive(Debug, Clone)]
pub struct Constraints {
    pub ansatz: Ansatz,
    pub system: ParametricSystem,
    pub rows: Vec<RowInfo>,
}

/// Expands `s(w)` for a word in the coset letters, where
/// `s(x) = x k_x`, returning the accumulated kernel.
fn expand(
    w: &Word,
    ansatz: &BTreeMap<Generator, SymbolicKernel>,
    g: u32,
    m: u32,
    width: usize,
    unknowns: usize,
) -> Result<SymbolicKernel, KernelError> {
    let mut k = SymbolicKernel::zero(width, unknowns);
    for &l in w.letters() {
        let x = l.generator;
        let kx = ansatz.get(&x).ok_or(KernelError::NotACosetLetter(x))?;
        if l.inverse {
            // K x^-1 k_x^-1 ... = x^-1 (x (K - k_x) x^-1)
            k.add_scaled(kx, -1);
            k = k.act(x, 1, g, m)?;
        } else {
            k = k.act(x, -1, g, m)?;
            k.add_scaled(kx, 1);
        }
    }
    Ok(k)
}

/// The integer system whose solutions are the abelianized sections.
pub fn extract_constraints(g: u32, m: u32) -> Result<Constraints, SolverError> {
    let closed = build_closed(m, g)?;
    let ans = Ansatz::new(g, m);
    let images = build_ansatz(g, m);
    let (width, unknowns, rank) = (ans.width(), ans.unknowns(), ans.shape.rank());
    let names = ans.shape.coordinate_names();

    let mut rows = Vec::new();
    let mut info = Vec::new();
    let mut b0 = Vec::new();
    let mut b1 = Vec::new();
    let mut modulus = Vec::new();
    for (idx, r) in closed.relators.iter().enumerate() {
        let word = lift(&r.word);
        let family = r.family.barred().unwrap_or(r.family);
        let k = expand(&word, &images, g, m, width, unknowns)?;
        // s(w) = w K must be trivial, and w itself equals `correction`
        let per_n = kernel_correction(family, &word, g, 1, m)?;
        for (c, (form, name)) in k.coords.iter().zip(&names).enumerate() {
            rows.push(form.coeffs.clone());
            b0.push(BigInt::from(-form.constant));
            let corr = if c < rank {
                per_n.free()[c]
            } else {
                per_n.sigma() as i64
            };
            b1.push(BigInt::from(-corr));
            modulus.push(if c == rank { 2 } else { 0 });
            info.push(RowInfo {
                relator: idx,
                family: family.label().to_string(),
                word: word.to_string(),
                coordinate: name.clone(),
            });
        }
    }
    let a = IntMatrix::from_rows(unknowns, &rows);
    let system = ParametricSystem::new(a, b0, b1, modulus).expect("consistent dimensions");
    Ok(Constraints {
        ansatz: ans,
        system,
        rows: info,
    })
}

/// Quantities named in the reduced images of the section.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Diagnostics {
    /// `-(m_(1,1) + m_(1,2))`
    pub k: Option<BigInt>,
    /// `m_(m-1,1)`
    #[serde(rename = "M")]
    pub big_m: Option<BigInt>,
    /// sigma exponent of `s(tau_1)`
    #[serde(rename = "N")]
    pub big_n: Option<BigInt>,
    /// `m_(1,2) + m_(2,3) + ... + m_(m-2,m-1)`
    pub mu: Option<BigInt>,
}

impl Diagnostics {
    fn compute(ans: &Ansatz, x: &[BigInt]) -> Self {
        let m = ans.shape.m;
        let z = |i: u32, j: u32| ans.value(x, Generator::tau(i), ans.shape.z(j)).clone();
        let rank = ans.shape.rank();
        let mut d = Diagnostics::default();
        if m >= 2 {
            d.big_n = Some(ans.value(x, Generator::tau(1), rank).clone());
        }
        if m >= 3 {
            d.k = Some(-(z(1, 1) + z(1, 2)));
            d.big_m = Some(z(m - 1, 1));
            d.mu = Some((1..m - 1).map(|i| z(i, i + 1)).sum());
        }
        d
    }
}

#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub g: u32,
    pub m: u32,
    pub parameter_set: ParameterSet,
    /// `Some(D)` when the admissible `n` are exactly the multiples of `D`.
    pub modulus: Option<BigInt>,
    pub rows: usize,
    pub cols: usize,
    pub witness_n: Option<BigInt>,
    pub witness: Option<Vec<BigInt>>,
    pub diagnostics: Diagnostics,
}

fn big_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(x) => json!(x),
        None => json!(v.to_string()),
    }
}

fn opt_json(v: &Option<BigInt>) -> Value {
    v.as_ref().map(big_json).unwrap_or(Value::Null)
}

impl ObstructionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g,
            "m": self.m,
            "modulus": opt_json(&self.modulus),
            "rows": self.rows,
            "cols": self.cols,
            "witness_n": opt_json(&self.witness_n),
            "witness": self.witness.as_ref().map(|w| w.iter().map(big_json).collect::<Vec<_>>()),
            "diagnostics": {
                "k": opt_json(&self.diagnostics.k),
                "M": opt_json(&self.diagnostics.big_m),
                "N": opt_json(&self.diagnostics.big_n),
                "mu": opt_json(&self.diagnostics.mu),
            },
        })
    }
}

/// Decides for which `n` the abelianized obstruction vanishes.
pub fn obstruction(g: u32, m: u32) -> Result<ObstructionReport, SolverError> {
    let cons = extract_constraints(g, m)?;
    let reduced = ReducedSystem::new(&cons.system);
    let set = reduced.feasible_set();
    let modulus = set.modulus();
    let witness_n = match &set {
        ParameterSet::Empty => None,
        ParameterSet::Single(v) => Some(v.clone()),
        ParameterSet::Progression { modulus, offset } => Some(if offset.is_zero() {
            modulus.clone()
        } else {
            offset.clone()
        }),
    };
    let witness = witness_n.as_ref().and_then(|n| reduced.witness(n));
    let diagnostics = witness
        .as_ref()
        .map(|w| Diagnostics::compute(&cons.ansatz, w))
        .unwrap_or_default();
    Ok(ObstructionReport {
        g,
        m,
        parameter_set: set,
        modulus,
        rows: cons.system.a.rows(),
        cols: cons.system.unknowns(),
        witness_n,
        witness,
        diagnostics,
    })
}

/// Affine space of all abelianized sections at parameter `n`.
pub fn section_space(g: u32, m: u32, n: &BigInt) -> Result<SolutionSpace, SolverError> {
    let cons = extract_constraints(g, m)?;
    ReducedSystem::new(&cons.system)
        .solution_space(n)
        .ok_or_else(|| SolverError::Infeasible(n.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Pass,
    Violated(Vec<RowInfo>),
}

impl Verification {
    pub fn passed(&self) -> bool {
        matches!(self, Verification::Pass)
    }
}

/// Re-checks a claimed assignment against every constraint row.
pub fn verify_ansatz(
    g: u32,
    m: u32,
    n: &BigInt,
    assignment: &[BigInt],
) -> Result<Verification, SolverError> {
    let cons = extract_constraints(g, m)?;
    verify_with(&cons, n, assignment)
}

fn verify_with(cons: &Constraints, n: &BigInt, x: &[BigInt]) -> Result<Verification, SolverError> {
    if x.len() != cons.ansatz.unknowns() {
        return Err(SolverError::Dimension {
            expected: cons.ansatz.unknowns(),
            got: x.len(),
        });
    }
    let bad = cons.system.violated_rows(x, n).expect("dimension checked");
    Ok(if bad.is_empty() {
        Verification::Pass
    } else {
        Verification::Violated(bad.into_iter().map(|i| cons.rows[i].clone()).collect())
    })
}

/// Images of the generators under a verified section, with any departure
/// from the expected reduced pattern listed in `pattern_violations`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedForm {
    pub images: Vec<(Generator, String)>,
    pub pattern_violations: Vec<String>,
}

impl fmt::Display for ReducedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, img) in &self.images {
            writeln!(f, "s({x}) = {img}")?;
        }
        for v in &self.pattern_violations {
            writeln!(f, "pattern: {v}")?;
        }
        Ok(())
    }
}

pub fn reduced_form(
    g: u32,
    m: u32,
    n: &BigInt,
    assignment: &[BigInt],
) -> Result<ReducedForm, SolverError> {
    let cons = extract_constraints(g, m)?;
    if let Verification::Violated(rows) = verify_with(&cons, n, assignment)? {
        return Err(SolverError::Unverified(rows.len()));
    }
    let ans = &cons.ansatz;
    let shape = ans.shape;
    let rank = shape.rank();
    let names = shape.coordinate_names();
    let x = assignment;

    let mut images = Vec::new();
    for &letter in &ans.letters {
        let mut s = letter.to_string();
        for (c, name) in names.iter().enumerate().take(rank + 1) {
            let mut v = ans.value(x, letter, c).clone();
            if c == rank {
                v %= 2;
                if v < BigInt::zero() {
                    v += 2;
                }
            }
            if v.is_zero() {
                continue;
            }
            if v == BigInt::from(1) {
                s.push_str(&format!(" {name}"));
            } else {
                s.push_str(&format!(" {name}^{v}"));
            }
        }
        images.push((letter, s));
    }

    let mut flags = Vec::new();
    let diag = Diagnostics::compute(ans, x);
    let nonzero = |letter: Generator, c: usize| !ans.value(x, letter, c).is_zero();
    let mut flag_if = |cond: bool, msg: String| {
        if cond {
            flags.push(msg);
        }
    };
    let (g, m) = (shape.g, shape.m);
    for i in 1..m {
        let t = Generator::tau(i);
        for r in 1..=g {
            flag_if(nonzero(t, shape.a(r)), format!("s({t}) has a{r} exponent"));
            flag_if(nonzero(t, shape.b(r)), format!("s({t}) has b{r} exponent"));
        }
        if i + 1 < m {
            for j in (1..m).filter(|&j| j != i && j != i + 1) {
                flag_if(nonzero(t, shape.z(j)), format!("s({t}) has z{j} exponent"));
            }
        } else if let Some(big_m) = &diag.big_m {
            for j in 1..m - 1 {
                flag_if(
                    ans.value(x, t, shape.z(j)) != big_m,
                    format!("s({t}) z{j} exponent differs from M"),
                );
            }
        }
        if let Some(big_n) = &diag.big_n {
            let v = ans.value(x, t, rank);
            flag_if(
                (v - big_n) % 2 != BigInt::zero(),
                format!("s({t}) sigma exponent differs from N"),
            );
        }
    }
    if let (Some(big_m), true) = (&diag.big_m, m >= 3) {
        let target = ans.value(x, Generator::tau(m - 1), shape.z(m - 1)) - big_m * 2;
        for i in 1..m - 1 {
            let t = Generator::tau(i);
            let s = ans.value(x, t, shape.z(i)) + ans.value(x, t, shape.z(i + 1));
            flag_if(
                s != target,
                format!("m[{i},{i}] + m[{i},{}] != m[m-1,m-1] - 2M", i + 1),
            );
        }
    }
    for r in 1..=g {
        for (letter, own, other) in [
            (Generator::c(r), Family::A, Family::B),
            (Generator::d(r), Family::B, Family::A),
        ] {
            let coord = |fam: Family, s: u32| match fam {
                Family::A => shape.a(s),
                _ => shape.b(s),
            };
            for s in 1..=g {
                flag_if(
                    nonzero(letter, coord(other, s)),
                    format!("s({letter}) has {}{s} exponent", other.prefix()),
                );
                if s != r {
                    flag_if(
                        nonzero(letter, coord(own, s)),
                        format!("s({letter}) has {}{s} exponent", own.prefix()),
                    );
                }
            }
            if let Some(k) = &diag.k {
                flag_if(
                    ans.value(x, letter, coord(own, r)) != k,
                    format!("s({letter}) {}{r} exponent differs from k", own.prefix()),
                );
            }
            for j in 2..m {
                flag_if(
                    nonzero(letter, shape.z(j)),
                    format!("s({letter}) has z{j} exponent"),
                );
            }
        }
    }
    Ok(ReducedForm {
        images,
        pattern_violations: flags,
    })
}

/// Human-readable name of every unknown, in column order.
pub fn unknown_names(g: u32, m: u32) -> Vec<String> {
    let ans = Ansatz::new(g, m);
    (0..ans.unknowns()).map(|i| ans.name(i)).collect()
}
