//! Exact integer linear algebra: Smith normal form with unimodular
//! transforms, invariant factors, and solvability of integer systems whose
//! right-hand side is affine in one parameter `n`.
//!
//! Rows with modulus 2 are encoded by adjoining one slack unknown with
//! coefficient 2 per such row, so everything runs through the same
//! elimination over the integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("n = {0} is not feasible for this system")]
    Infeasible(BigInt),
    #[error("row modulus must be 0 or 2, got {0}")]
    BadModulus(u32),
}

/// Dense matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = IntMatrix::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds from row vectors; `cols` is needed for the zero-row case.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let k = self.rows;
        if k == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for p in 0..k {
            if a[(p, p)].is_zero() {
                match (p + 1..k).find(|&i| !a[(i, p)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(p, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in p + 1..k {
                for j in p + 1..k {
                    let v = (&a[(i, j)] * &a[(p, p)] - &a[(i, p)] * &a[(p, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, p)] = BigInt::zero();
            }
            prev = a[(p, p)].clone();
        }
        sign * &a[(k - 1, k - 1)]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j];
            if !v.is_zero() {
                let add = v * f;
                self.data[dst * self.cols + j] += add;
            }
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src];
            if !v.is_zero() {
                let add = v * f;
                self.data[i * self.cols + dst] += add;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = -std::mem::take(v);
        }
    }

    /// Nested JSON arrays of decimal strings (entries may exceed 64 bits).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        self.row(i)
                            .iter()
                            .map(|v| serde_json::Value::String(v.to_string()))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `U * A * V = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries, in order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

/// Result of diagonalizing `a` with row operations mirrored onto `row_side`
/// and column operations mirrored onto `col_side`.
struct Diagonalized {
    d: IntMatrix,
    row_side: IntMatrix,
    col_side: IntMatrix,
    rank: usize,
}

/// Core Smith elimination. `row_side` must have `a.rows()` rows; it receives
/// every row operation (so starting from the identity it becomes `U`, and
/// starting from a right-hand side it becomes `U b`). `col_side` must have
/// `a.cols()` columns and becomes `V` when started from the identity.
fn diagonalize(mut a: IntMatrix, mut row_side: IntMatrix, mut col_side: IntMatrix) -> Diagonalized {
    let (rows, cols) = (a.rows(), a.cols());
    let mut t = 0;
    'outer: while t < rows.min(cols) {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block, re-chosen
            // after every reduction round to keep entries small
            let mut best: Option<(usize, usize)> = None;
            'search: for i in t..rows {
                for j in t..cols {
                    let v = &a[(i, j)];
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|b| v.abs() < a[b].abs()) {
                        best = Some((i, j));
                        if v.abs().is_one() {
                            break 'search;
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            a.swap_rows(t, pi);
            row_side.swap_rows(t, pi);
            a.swap_cols(t, pj);
            col_side.swap_cols(t, pj);

            let p = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -nearest_quotient(&a[(i, t)], &p);
                a.add_row(i, t, &q);
                row_side.add_row(i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -nearest_quotient(&a[(t, j)], &p);
                a.add_col(j, t, &q);
                col_side.add_col(j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: pivot must divide the trailing block
            let offender =
                (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    row_side.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            row_side.negate_row(t);
        }
        t += 1;
    }
    Diagonalized {
        d: a,
        row_side,
        col_side,
        rank: t,
    }
}

/// `q` minimizing `|a - q p|`.
fn nearest_quotient(a: &BigInt, p: &BigInt) -> BigInt {
    let q = a.div_floor(p);
    let r = a - &q * p;
    if (&r * 2u32).abs() > p.abs() {
        q + 1
    } else {
        q
    }
}

/// Smith normal form with unimodular witnesses.
pub fn smith(a: &IntMatrix) -> SmithDecomposition {
    let r = diagonalize(
        a.clone(),
        IntMatrix::identity(a.rows()),
        IntMatrix::identity(a.cols()),
    );
    SmithDecomposition {
        u: r.row_side,
        d: r.d,
        v: r.col_side,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantFactors {
    pub free_rank: usize,
    /// Invariant factors greater than 1, in divisibility order.
    pub torsion: Vec<BigInt>,
}

/// Structure of `Z^rank_ambient / rowspace(relation_matrix)`.
pub fn invariant_factors(
    relation_matrix: &IntMatrix,
    rank_ambient: usize,
) -> Result<InvariantFactors, LinAlgError> {
    if relation_matrix.cols() != rank_ambient {
        return Err(LinAlgError::Dimension(format!(
            "relation matrix has {} columns, ambient rank is {rank_ambient}",
            relation_matrix.cols()
        )));
    }
    let diag = smith(relation_matrix).diagonal();
    Ok(InvariantFactors {
        free_rank: rank_ambient - diag.len(),
        torsion: diag.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

/// `A x = b0 + n b1`, with rows of modulus 2 read modulo 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricSystem {
    pub a: IntMatrix,
    pub b0: Vec<BigInt>,
    pub b1: Vec<BigInt>,
    /// 0 (over the integers) or 2 per row.
    pub row_modulus: Vec<u32>,
}

impl ParametricSystem {
    pub fn new(
        a: IntMatrix,
        b0: Vec<BigInt>,
        b1: Vec<BigInt>,
        row_modulus: Vec<u32>,
    ) -> Result<Self, LinAlgError> {
        let r = a.rows();
        if b0.len() != r || b1.len() != r || row_modulus.len() != r {
            return Err(LinAlgError::Dimension(format!(
                "matrix has {r} rows but b0/b1/modulus have {}/{}/{}",
                b0.len(),
                b1.len(),
                row_modulus.len()
            )));
        }
        if let Some(&bad) = row_modulus.iter().find(|&&m| m != 0 && m != 2) {
            return Err(LinAlgError::BadModulus(bad));
        }
        Ok(ParametricSystem {
            a,
            b0,
            b1,
            row_modulus,
        })
    }

    pub fn unknowns(&self) -> usize {
        self.a.cols()
    }

    pub fn rhs(&self, n: &BigInt) -> Vec<BigInt> {
        self.b0
            .iter()
            .zip(&self.b1)
            .map(|(c, d)| c + n * d)
            .collect()
    }

    /// Indices of rows violated by `x` at parameter `n`.
    pub fn violated_rows(&self, x: &[BigInt], n: &BigInt) -> Result<Vec<usize>, LinAlgError> {
        if x.len() != self.unknowns() {
            return Err(LinAlgError::Dimension(format!(
                "assignment has {} entries, system has {} unknowns",
                x.len(),
                self.unknowns()
            )));
        }
        let lhs = self.a.mul_vec(x);
        let rhs = self.rhs(n);
        Ok((0..self.a.rows())
            .filter(|&i| {
                let diff = &lhs[i] - &rhs[i];
                match self.row_modulus[i] {
                    0 => !diff.is_zero(),
                    m => !diff.is_multiple_of(&BigInt::from(m)),
                }
            })
            .collect())
    }

    /// Same solution set with all-zero and repeated rows removed.
    fn without_redundant_rows(&self) -> ParametricSystem {
        let mut seen = std::collections::HashSet::new();
        let mut keep = Vec::new();
        for i in 0..self.a.rows() {
            let trivial = self.b0[i].is_zero()
                && self.b1[i].is_zero()
                && self.a.row(i).iter().all(Zero::is_zero);
            if trivial {
                continue;
            }
            let key = (
                self.a.row(i).to_vec(),
                &self.b0[i],
                &self.b1[i],
                self.row_modulus[i],
            );
            if seen.insert(key) {
                keep.push(i);
            }
        }
        let rows: Vec<Vec<BigInt>> = keep.iter().map(|&i| self.a.row(i).to_vec()).collect();
        ParametricSystem {
            a: IntMatrix::from_rows(self.a.cols(), &rows),
            b0: keep.iter().map(|&i| self.b0[i].clone()).collect(),
            b1: keep.iter().map(|&i| self.b1[i].clone()).collect(),
            row_modulus: keep.iter().map(|&i| self.row_modulus[i]).collect(),
        }
    }

    /// Integer system with one slack column per modulus-2 row.
    fn with_slacks(&self) -> IntMatrix {
        let slack_rows: Vec<usize> = (0..self.a.rows())
            .filter(|&i| self.row_modulus[i] != 0)
            .collect();
        let cols = self.a.cols() + slack_rows.len();
        let mut m = IntMatrix::zeros(self.a.rows(), cols);
        for i in 0..self.a.rows() {
            for j in 0..self.a.cols() {
                m[(i, j)] = self.a[(i, j)].clone();
            }
        }
        for (k, &i) in slack_rows.iter().enumerate() {
            m[(i, self.a.cols() + k)] = BigInt::from(self.row_modulus[i]);
        }
        m
    }
}

/// Reduced system: `D y = c0 + n c1` with `x = V y` (slack coordinates
/// included in `V`).
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    unknowns: usize,
    diag: Vec<BigInt>,
    c0: Vec<BigInt>,
    c1: Vec<BigInt>,
    v: IntMatrix,
}

impl ReducedSystem {
    pub fn new(sys: &ParametricSystem) -> Self {
        let sys = &sys.without_redundant_rows();
        let a = sys.with_slacks();
        let rows = a.rows();
        let mut rhs = IntMatrix::zeros(rows, 2);
        for i in 0..rows {
            rhs[(i, 0)] = sys.b0[i].clone();
            rhs[(i, 1)] = sys.b1[i].clone();
        }
        let cols = a.cols();
        let r = diagonalize(a, rhs, IntMatrix::identity(cols));
        let diag = (0..r.rank).map(|i| r.d[(i, i)].clone()).collect();
        ReducedSystem {
            unknowns: sys.unknowns(),
            diag,
            c0: r.row_side.column(0),
            c1: r.row_side.column(1),
            v: r.col_side,
        }
    }

    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn feasible_set(&self) -> ParameterSet {
        let mut set = ParameterSet::all();
        for (i, d) in self.diag.iter().enumerate() {
            set = set.intersect(&ParameterSet::congruence(&self.c1[i], &(-&self.c0[i]), d));
        }
        for i in self.rank()..self.c0.len() {
            set = set.intersect(&ParameterSet::linear(&self.c1[i], &self.c0[i]));
        }
        set
    }

    fn particular_full(&self, n: &BigInt) -> Option<Vec<BigInt>> {
        let mut y = vec![BigInt::zero(); self.v.cols()];
        for (i, d) in self.diag.iter().enumerate() {
            let rhs = &self.c0[i] + n * &self.c1[i];
            let (q, r) = rhs.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
        for i in self.rank()..self.c0.len() {
            if !(&self.c0[i] + n * &self.c1[i]).is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    pub fn witness(&self, n: &BigInt) -> Option<Vec<BigInt>> {
        self.particular_full(n).map(|mut x| {
            x.truncate(self.unknowns);
            x
        })
    }

    pub fn solution_space(&self, n: &BigInt) -> Option<SolutionSpace> {
        let mut particular = self.particular_full(n)?;
        particular.truncate(self.unknowns);
        let generators: Vec<Vec<BigInt>> = (self.rank()..self.v.cols())
            .map(|j| self.v.column(j)[..self.unknowns].to_vec())
            .collect();
        Some(SolutionSpace {
            particular,
            lattice_basis: lattice_basis(generators, self.unknowns),
        })
    }
}

/// Echelon basis of the lattice spanned by `generators`.
pub fn lattice_basis(generators: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    let k = generators.len();
    if k == 0 {
        return Vec::new();
    }
    let rows: Vec<Vec<BigInt>> = generators;
    let mut m = IntMatrix::from_rows(dim, &rows);
    let mut basis = Vec::new();
    let mut top = 0;
    for col in 0..dim {
        if top == k {
            break;
        }
        // Euclid on column `col` among rows top..
        loop {
            let pivot = (top..k)
                .filter(|&i| !m[(i, col)].is_zero())
                .min_by(|&x, &y| m[(x, col)].abs().cmp(&m[(y, col)].abs()));
            let Some(p) = pivot else { break };
            m.swap_rows(top, p);
            let mut done = true;
            for i in top + 1..k {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let q = -m[(i, col)].div_floor(&m[(top, col)]);
                m.add_row(i, top, &q);
                if !m[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                if m[(top, col)].is_negative() {
                    m.negate_row(top);
                }
                top += 1;
                break;
            }
        }
    }
    for i in 0..top {
        basis.push(m.row(i).to_vec());
    }
    basis
}

/// `particular + span(lattice_basis)` is the full integer solution set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSpace {
    pub particular: Vec<BigInt>,
    pub lattice_basis: Vec<Vec<BigInt>>,
}

/// A set of integers of the form `offset + modulus * Z`, a single point,
/// or nothing. `modulus == 1` is all of `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParameterSet {
    Empty,
    Progression { modulus: BigInt, offset: BigInt },
    Single(BigInt),
}

impl ParameterSet {
    pub fn all() -> Self {
        ParameterSet::Progression {
            modulus: BigInt::one(),
            offset: BigInt::zero(),
        }
    }

    /// `{n : coef * n ≡ target (mod modulus)}`, `modulus >= 1`.
    fn congruence(coef: &BigInt, target: &BigInt, modulus: &BigInt) -> Self {
        let h = coef.gcd(modulus);
        if h.is_zero() {
            // coef = 0 and modulus = 0 cannot happen (modulus >= 1)
            unreachable!();
        }
        if !target.is_multiple_of(&h) {
            return ParameterSet::Empty;
        }
        let md = modulus / &h;
        let c = (coef / &h).mod_floor(&md);
        let t = (target / &h).mod_floor(&md);
        let offset = if md.is_one() {
            BigInt::zero()
        } else {
            let inv = mod_inverse(&c, &md).expect("coprime after dividing by gcd");
            (t * inv).mod_floor(&md)
        };
        ParameterSet::Progression {
            modulus: md,
            offset,
        }
    }

    /// `{n : c0 + n c1 = 0}`.
    fn linear(c1: &BigInt, c0: &BigInt) -> Self {
        if c1.is_zero() {
            if c0.is_zero() {
                ParameterSet::all()
            } else {
                ParameterSet::Empty
            }
        } else if c0.is_multiple_of(c1) {
            ParameterSet::Single(-(c0 / c1))
        } else {
            ParameterSet::Empty
        }
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        match self {
            ParameterSet::Empty => false,
            ParameterSet::Single(v) => v == n,
            ParameterSet::Progression { modulus, offset } => (n - offset).is_multiple_of(modulus),
        }
    }

    pub fn intersect(&self, other: &ParameterSet) -> ParameterSet {
        use ParameterSet::*;
        match (self, other) {
            (Empty, _) | (_, Empty) => Empty,
            (Single(v), s) | (s, Single(v)) => {
                if s.contains(v) {
                    Single(v.clone())
                } else {
                    Empty
                }
            }
            (
                Progression {
                    modulus: m1,
                    offset: o1,
                },
                Progression {
                    modulus: m2,
                    offset: o2,
                },
            ) => {
                // CRT for n ≡ o1 (m1), n ≡ o2 (m2)
                let ext = m1.extended_gcd(m2);
                let g = ext.gcd;
                let diff = o2 - o1;
                if !diff.is_multiple_of(&g) {
                    return Empty;
                }
                let lcm = m1 / &g * m2;
                let k = (&diff / &g * ext.x).mod_floor(&(m2 / &g));
                let offset = (o1 + m1 * k).mod_floor(&lcm);
                Progression {
                    modulus: lcm,
                    offset,
                }
            }
        }
    }

    /// `Some(D)` when the set is the subgroup `D Z`.
    pub fn modulus(&self) -> Option<BigInt> {
        match self {
            ParameterSet::Progression { modulus, offset } if offset.is_zero() => {
                Some(modulus.clone())
            }
            ParameterSet::Single(v) if v.is_zero() => Some(BigInt::zero()),
            _ => None,
        }
    }

    pub fn is_all(&self) -> bool {
        matches!(self, ParameterSet::Progression { modulus, .. } if modulus.is_one())
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// `{n : the system is solvable}`.
pub fn feasible_parameter_set(sys: &ParametricSystem) -> ParameterSet {
    ReducedSystem::new(sys).feasible_set()
}

/// One integer solution at parameter `n` (slacks dropped), or `None`.
pub fn solve_witness(sys: &ParametricSystem, n: &BigInt) -> Option<Vec<BigInt>> {
    ReducedSystem::new(sys).witness(n)
}

/// All integer solutions at parameter `n`.
pub fn solution_space(sys: &ParametricSystem, n: &BigInt) -> Result<SolutionSpace, LinAlgError> {
    ReducedSystem::new(sys)
        .solution_space(n)
        .ok_or_else(|| LinAlgError::Infeasible(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn mat(cols: usize, rows: &[&[i64]]) -> IntMatrix {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        IntMatrix::from_rows(cols, &rows)
    }

    fn sys(cols: usize, rows: &[&[i64]], b0: &[i64], b1: &[i64], md: &[u32]) -> ParametricSystem {
        ParametricSystem::new(
            mat(cols, rows),
            b0.iter().map(|&v| bi(v)).collect(),
            b1.iter().map(|&v| bi(v)).collect(),
            md.to_vec(),
        )
        .unwrap()
    }

    fn check_smith(a: &IntMatrix) {
        let s = smith(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d, "UAV != D for {a:?}");
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let k = s.d.rows().min(s.d.cols());
        for i in 0..k {
            assert!(!s.d[(i, i)].is_negative());
            if i + 1 < k {
                let (x, y) = (&s.d[(i, i)], &s.d[(i + 1, i + 1)]);
                assert!(if x.is_zero() {
                    y.is_zero()
                } else {
                    y.is_multiple_of(x)
                });
            }
        }
    }

    #[test]
    fn smith_examples() {
        let id = IntMatrix::identity(3);
        assert_eq!(smith(&id).d, id);
        let s = smith(&mat(2, &[&[2, 0], &[0, 3]]));
        assert_eq!(s.d, mat(2, &[&[1, 0], &[0, 6]]));
        check_smith(&mat(2, &[&[2, 0], &[0, 3]]));
        let z = IntMatrix::zeros(2, 3);
        assert_eq!(smith(&z).d, z);
    }

    #[test]
    fn smith_random_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let rows: Vec<Vec<i64>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            check_smith(&IntMatrix::from_rows(c, &rows));
        }
    }

    #[test]
    fn determinant_small() {
        assert_eq!(mat(2, &[&[1, 2], &[3, 4]]).determinant(), bi(-2));
        assert_eq!(
            mat(3, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 5]]).determinant(),
            bi(-5)
        );
        assert_eq!(IntMatrix::zeros(0, 0).determinant(), bi(1));
    }

    #[test]
    fn invariant_factor_examples() {
        let f = invariant_factors(&mat(1, &[&[2]]), 1).unwrap();
        assert_eq!(
            f,
            InvariantFactors {
                free_rank: 0,
                torsion: vec![bi(2)]
            }
        );
        let f = invariant_factors(&IntMatrix::zeros(0, 4), 4).unwrap();
        assert_eq!(
            f,
            InvariantFactors {
                free_rank: 4,
                torsion: vec![]
            }
        );
        assert!(invariant_factors(&IntMatrix::zeros(1, 3), 2).is_err());
    }

    #[test]
    fn feasible_examples() {
        assert!(feasible_parameter_set(&sys(1, &[&[1]], &[0], &[1], &[0])).is_all());
        assert_eq!(
            feasible_parameter_set(&sys(1, &[&[2]], &[0], &[1], &[0])).modulus(),
            Some(bi(2))
        );
        let s = sys(2, &[&[1, 0], &[0, 3]], &[0, 0], &[1, 1], &[2, 0]);
        assert_eq!(feasible_parameter_set(&s).modulus(), Some(bi(3)));
    }

    #[test]
    fn witness_examples() {
        let s = sys(1, &[&[2]], &[0], &[1], &[0]);
        assert_eq!(solve_witness(&s, &bi(4)), Some(vec![bi(2)]));
        assert_eq!(solve_witness(&s, &bi(3)), None);
        let s = sys(2, &[&[1, 1], &[1, -1]], &[0, 0], &[1, 1], &[0, 0]);
        assert_eq!(solve_witness(&s, &bi(2)), Some(vec![bi(2), bi(0)]));
    }

    #[test]
    fn solution_space_examples() {
        let s = sys(2, &[&[1, 1]], &[0], &[0], &[0]);
        let sp = solution_space(&s, &bi(0)).unwrap();
        assert_eq!(sp.particular, vec![bi(0), bi(0)]);
        assert_eq!(sp.lattice_basis.len(), 1);
        let b = &sp.lattice_basis[0];
        assert!(b == &vec![bi(1), bi(-1)] || b == &vec![bi(-1), bi(1)]);

        let s = sys(1, &[&[2]], &[0], &[1], &[0]);
        let sp = solution_space(&s, &bi(2)).unwrap();
        assert_eq!(
            sp,
            SolutionSpace {
                particular: vec![bi(1)],
                lattice_basis: vec![]
            }
        );

        let s = sys(1, &[&[1]], &[0], &[0], &[2]);
        let sp = solution_space(&s, &bi(0)).unwrap();
        assert_eq!(
            sp,
            SolutionSpace {
                particular: vec![bi(0)],
                lattice_basis: vec![vec![bi(2)]]
            }
        );

        assert!(solution_space(&sys(1, &[&[2]], &[0], &[1], &[0]), &bi(1)).is_err());
    }

    #[test]
    fn mixed_modulus_example() {
        let s = sys(2, &[&[1, 0], &[0, 3]], &[0, 0], &[1, 1], &[2, 0]);
        let set = feasible_parameter_set(&s);
        for n in 0..=12 {
            assert_eq!(set.contains(&bi(n)), n % 3 == 0, "n={n}");
        }
    }

    /// Exhaustive search over the box `[-bound, bound]^k`.
    fn brute_force(a: &[Vec<i64>], rhs: &[i64], md: &[u32], bound: i64) -> bool {
        let k = a[0].len();
        let ok = |x: &[i64]| {
            a.iter().zip(rhs).zip(md).all(|((row, &r), &m)| {
                let d: i64 = row.iter().zip(x).map(|(p, q)| p * q).sum::<i64>() - r;
                if m == 0 {
                    d == 0
                } else {
                    d.rem_euclid(m as i64) == 0
                }
            })
        };
        let mut x = vec![-bound; k];
        loop {
            if ok(&x) {
                return true;
            }
            let mut i = 0;
            loop {
                if i == k {
                    return false;
                }
                x[i] += 1;
                if x[i] <= bound {
                    break;
                }
                x[i] = -bound;
                i += 1;
            }
        }
    }

    #[test]
    fn feasibility_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..120 {
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(1..=2);
            let a: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-2..=2)).collect())
                .collect();
            let b0: Vec<i64> = (0..rows).map(|_| rng.gen_range(-1..=1)).collect();
            let b1: Vec<i64> = (0..rows).map(|_| rng.gen_range(-1..=1)).collect();
            let md: Vec<u32> = (0..rows)
                .map(|_| if rng.gen_bool(0.3) { 2 } else { 0 })
                .collect();
            let s = ParametricSystem::new(
                IntMatrix::from_rows(cols, &a),
                b0.iter().map(|&v| bi(v)).collect(),
                b1.iter().map(|&v| bi(v)).collect(),
                md.clone(),
            )
            .unwrap();
            let set = feasible_parameter_set(&s);
            for n in 0..=16 {
                let rhs: Vec<i64> = b0.iter().zip(&b1).map(|(c, d)| c + n * d).collect();
                // any solvable 2-unknown system with entries <= 2 has a
                // solution within 2 * 2 * (|rhs| + 1) of the origin
                let bound = 4 * (rhs.iter().map(|v| v.abs()).max().unwrap() + 1) + 2;
                let slow = brute_force(&a, &rhs, &md, bound);
                assert_eq!(set.contains(&bi(n)), slow, "n={n} system {s:?}");
                let w = solve_witness(&s, &bi(n));
                assert_eq!(w.is_some(), slow);
                if let Some(w) = w {
                    assert!(s.violated_rows(&w, &bi(n)).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn solution_space_resubstitutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=4);
            let cols = rng.gen_range(1..=5);
            let a: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-5..=5)).collect())
                .collect();
            let md: Vec<u32> = (0..rows)
                .map(|_| if rng.gen_bool(0.3) { 2 } else { 0 })
                .collect();
            let s = ParametricSystem::new(
                IntMatrix::from_rows(cols, &a),
                vec![bi(0); rows],
                (0..rows).map(|_| bi(rng.gen_range(-3..=3))).collect(),
                md,
            )
            .unwrap();
            let Some(modulus) = feasible_parameter_set(&s).modulus() else {
                continue;
            };
            let sp = solution_space(&s, &modulus).unwrap();
            assert!(s
                .violated_rows(&sp.particular, &modulus)
                .unwrap()
                .is_empty());
            for b in &sp.lattice_basis {
                let x: Vec<BigInt> = sp
                    .particular
                    .iter()
                    .zip(b)
                    .map(|(p, v)| p + v * 3)
                    .collect();
                assert!(s.violated_rows(&x, &modulus).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn parameter_set_algebra() {
        let p = |m: i64, o: i64| ParameterSet::Progression {
            modulus: bi(m),
            offset: bi(o),
        };
        assert_eq!(p(4, 1).intersect(&p(6, 3)), p(12, 9));
        assert_eq!(p(4, 1).intersect(&p(6, 2)), ParameterSet::Empty);
        assert_eq!(
            p(3, 0).intersect(&ParameterSet::Single(bi(6))),
            ParameterSet::Single(bi(6))
        );
        assert_eq!(ParameterSet::congruence(&bi(4), &bi(2), &bi(6)), p(3, 2));
        assert_eq!(
            ParameterSet::congruence(&bi(4), &bi(1), &bi(6)),
            ParameterSet::Empty
        );
    }

    #[test]
    fn dimension_errors() {
        assert!(
            ParametricSystem::new(IntMatrix::zeros(2, 1), vec![bi(0)], vec![bi(0)], vec![0])
                .is_err()
        );
        assert!(matches!(
            ParametricSystem::new(IntMatrix::zeros(1, 1), vec![bi(0)], vec![bi(0)], vec![3]),
            Err(LinAlgError::BadModulus(3))
        ));
        let s = sys(2, &[&[1, 1]], &[0], &[0], &[0]);
        assert!(s.violated_rows(&[bi(1)], &bi(0)).is_err());
    }
}
