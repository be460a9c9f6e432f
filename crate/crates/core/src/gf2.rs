//! Exact linear algebra over the two-element field.
//!
//! Vectors are bit-packed into `u64` words. Matrices are stored row-major as a
//! list of [`BitVec`] rows. Every routine here is deterministic: solutions and
//! bases are canonical functions of the input, so everything built on top of
//! this module is reproducible bit for bit.

use std::fmt;

use crate::error::{Error, Result};

/// Dense bit vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "GF(2) entries are 0 or 1");
            v.set(i, b == 1);
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn lowest(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Index of the highest set bit.
    pub fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones()) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(k * 64 + bit)
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.len {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, ")")
    }
}

/// Row-major matrix over GF(2) with fixed dimensions.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested 0/1 rows.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data: Vec<BitVec> = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix rows");
                BitVec::from_bits(r)
            })
            .collect();
        Self { rows: data.len(), cols, data }
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.ones() {
                m.set(i, j, true);
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

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].get(c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("matrix has {} columns, vector has {} entries", self.cols, x.len())));
        }
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        rref(self).1.len()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form and the ordered pivot columns.
pub fn rref(m: &BitMatrix) -> (BitMatrix, Vec<usize>) {
    let mut out = m.clone();
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..m.cols {
        if next == out.rows {
            break;
        }
        let Some(p) = (next..out.rows).find(|&r| out.data[r].get(c)) else {
            continue;
        };
        out.data.swap(next, p);
        let pivot_row = out.data[next].clone();
        for r in 0..out.rows {
            if r != next && out.data[r].get(c) {
                out.data[r].xor_assign(&pivot_row);
            }
        }
        pivots.push(c);
        next += 1;
    }
    (out, pivots)
}

/// Canonical solution of `a x = b`: free variables of the RREF are set to zero.
/// Returns `Ok(None)` when the system is inconsistent.
pub fn solve_affine(a: &BitMatrix, b: &BitVec) -> Result<Option<BitVec>> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!(
            "right-hand side has {} entries for a matrix with {} rows",
            b.len(),
            a.rows
        )));
    }
    // Augment with b as the last column.
    let mut aug = BitMatrix::zeros(a.rows, a.cols + 1);
    for r in 0..a.rows {
        for c in a.data[r].ones() {
            aug.set(r, c, true);
        }
        if b.get(r) {
            aug.set(r, a.cols, true);
        }
    }
    let (red, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return Ok(None);
    }
    let mut x = BitVec::zeros(a.cols);
    for (r, &c) in pivots.iter().enumerate() {
        if red.get(r, a.cols) {
            x.set(c, true);
        }
    }
    Ok(Some(x))
}

/// Basis of the kernel, one vector per free column of the RREF.
pub fn kernel_basis(a: &BitMatrix) -> Vec<BitVec> {
    let (red, pivots) = rref(a);
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..a.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitVec::unit(a.cols, free);
            for (r, &p) in pivots.iter().enumerate() {
                if red.get(r, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

/// Incremental column basis answering repeated `A x = b` queries.
///
/// Columns are added left to right; a column is kept iff it is independent of
/// the columns kept before it. Solutions are supported on kept columns only, so
/// they coincide with the RREF rule "free variables are zero".
#[derive(Clone, Debug)]
pub struct SpanSolver {
    dim: usize,
    ncols: usize,
    // pivot bit -> (reduced vector, combination of original columns)
    reduced: Vec<(BitVec, Vec<usize>)>,
    by_pivot: Vec<Option<usize>>,
    kept: Vec<bool>,
}

impl SpanSolver {
    pub fn new(dim: usize) -> Self {
        Self { dim, ncols: 0, reduced: Vec::new(), by_pivot: vec![None; dim], kept: Vec::new() }
    }

    pub fn from_columns(dim: usize, columns: &[BitVec]) -> Self {
        let mut s = Self::new(dim);
        for c in columns {
            s.push(c.clone());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn columns(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.reduced.len()
    }

    /// Whether column `j` was independent of the columns before it.
    pub fn is_kept(&self, j: usize) -> bool {
        self.kept[j]
    }

    /// Adds a column; returns whether it was independent.
    pub fn push(&mut self, column: BitVec) -> bool {
        assert_eq!(column.len(), self.dim, "column length mismatch");
        let index = self.ncols;
        self.ncols += 1;
        let (v, mut combo) = self.reduce(column);
        match v.lowest() {
            None => {
                self.kept.push(false);
                false
            }
            Some(p) => {
                combo.push(index);
                combo.sort_unstable();
                self.by_pivot[p] = Some(self.reduced.len());
                self.reduced.push((v, combo));
                self.kept.push(true);
                true
            }
        }
    }

    fn reduce(&self, mut v: BitVec) -> (BitVec, Vec<usize>) {
        let mut combo: Vec<usize> = Vec::new();
        while let Some(p) = v.lowest() {
            match self.by_pivot[p] {
                Some(k) => {
                    let (ref rv, ref rc) = self.reduced[k];
                    v.xor_assign(rv);
                    xor_sorted(&mut combo, rc);
                }
                None => break,
            }
        }
        (v, combo)
    }

    pub fn contains(&self, b: &BitVec) -> bool {
        self.reduce(b.clone()).0.is_zero()
    }

    /// Canonical solution as the sorted list of columns with coefficient one.
    pub fn solve(&self, b: &BitVec) -> Option<Vec<usize>> {
        assert_eq!(b.len(), self.dim, "right-hand side length mismatch");
        let (rest, combo) = self.reduce(b.clone());
        rest.is_zero().then_some(combo)
    }
}

fn xor_sorted(acc: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&other[j..]);
    *acc = out;
}

/// Normal form modulo a subspace: pivots are highest set bits and the normal
/// form of `v` is the unique element of `v + W` vanishing on every pivot.
#[derive(Clone, Debug)]
struct QuotientReducer {
    // sorted by pivot, descending
    basis: Vec<(usize, BitVec)>,
}

impl QuotientReducer {
    fn new(dim: usize, spanning: impl IntoIterator<Item = BitVec>) -> Self {
        let mut by_pivot: Vec<Option<BitVec>> = vec![None; dim];
        for mut v in spanning {
            while let Some(h) = v.highest() {
                match &by_pivot[h] {
                    Some(b) => v.xor_assign(b),
                    None => {
                        by_pivot[h] = Some(v);
                        break;
                    }
                }
            }
        }
        let mut basis: Vec<(usize, BitVec)> =
            by_pivot.into_iter().enumerate().filter_map(|(p, v)| v.map(|v| (p, v))).collect();
        basis.reverse();
        Self { basis }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn normal_form(&self, v: &BitVec) -> BitVec {
        let mut out = v.clone();
        for (p, b) in &self.basis {
            if out.get(*p) {
                out.xor_assign(b);
            }
        }
        out
    }
}

/// Homology `ker(d_out) / im(d_in)` with canonical representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    dim: usize,
    d_out: BitMatrix,
    image: QuotientReducer,
    reps: Vec<BitVec>,
    coords: SpanSolver,
}

impl Homology {
    /// Number of classes.
    pub fn rank(&self) -> usize {
        self.reps.len()
    }

    /// Dimension of the middle space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image_rank(&self) -> usize {
        self.image.rank()
    }

    pub fn class_basis(&self) -> &[BitVec] {
        &self.reps
    }

    pub fn is_cocycle(&self, z: &BitVec) -> bool {
        self.d_out.mul_vec(z).map(|v| v.is_zero()).unwrap_or(false)
    }

    /// Canonical representative of `z + im(d_in)`.
    pub fn normal_form(&self, z: &BitVec) -> BitVec {
        self.image.normal_form(z)
    }

    /// Class coordinates of a cocycle.
    pub fn class_of(&self, z: &BitVec) -> Result<BitVec> {
        if z.len() != self.dim {
            return Err(Error::Dimension(format!("vector of length {} in a space of dimension {}", z.len(), self.dim)));
        }
        if !self.is_cocycle(z) {
            return Err(Error::NotACocycle(format!("{z:?} is not in the kernel")));
        }
        let nf = self.image.normal_form(z);
        let combo = self.coords.solve(&nf).expect("normal form of a cocycle lies in the span of the representatives");
        Ok(BitVec::from_indices(self.reps.len(), combo))
    }

    pub fn representative_of(&self, coords: &BitVec) -> BitVec {
        assert_eq!(coords.len(), self.reps.len(), "class coordinate length mismatch");
        let mut out = BitVec::zeros(self.dim);
        for i in coords.ones() {
            out.xor_assign(&self.reps[i]);
        }
        out
    }

    /// Rebuilds the class basis so that it starts with the given cocycles (in
    /// order), completed by the canonical representatives.
    pub fn with_preferred(&self, preferred: &[BitVec]) -> Result<Homology> {
        let mut reps = Vec::new();
        let mut coords = SpanSolver::new(self.dim);
        for z in preferred {
            if !self.is_cocycle(z) {
                return Err(Error::NotACocycle(format!("preferred representative {z:?}")));
            }
            let nf = self.image.normal_form(z);
            if !coords.push(nf.clone()) {
                return Err(Error::Invalid(format!("preferred representative {z:?} is dependent modulo boundaries")));
            }
            reps.push(nf);
        }
        for r in &self.reps {
            if coords.push(r.clone()) {
                reps.push(r.clone());
            }
        }
        let coords = SpanSolver::from_columns(self.dim, &reps);
        Ok(Homology { reps, coords, ..self.clone() })
    }
}

/// Homology of `V --d_in--> W --d_out--> U` at `W`.
pub fn homology_of_pair(d_in: &BitMatrix, d_out: &BitMatrix) -> Result<Homology> {
    let dim = d_out.cols();
    if d_in.rows() != dim {
        return Err(Error::Dimension(format!(
            "d_in lands in dimension {} but d_out starts in dimension {}",
            d_in.rows(),
            dim
        )));
    }
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        return Err(Error::NotAComplex("d_out * d_in is nonzero".into()));
    }
    let image = QuotientReducer::new(dim, (0..d_in.cols()).map(|c| d_in.column(c)));
    let mut reps = Vec::new();
    let mut coords = SpanSolver::new(dim);
    for k in kernel_basis(d_out) {
        let nf = image.normal_form(&k);
        if coords.push(nf.clone()) {
            reps.push(nf);
        }
    }
    let coords = SpanSolver::from_columns(dim, &reps);
    Ok(Homology { dim, d_out: d_out.clone(), image, reps, coords })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn rref_examples() {
        let (r, p) = rref(&BitMatrix::zeros(0, 0));
        assert_eq!((r.rows(), r.cols()), (0, 0));
        assert!(p.is_empty());

        let (r, p) = rref(&BitMatrix::identity(3));
        assert_eq!(r, BitMatrix::identity(3));
        assert_eq!(p, vec![0, 1, 2]);

        let (r, p) = rref(&m(&[&[1, 1], &[1, 1]]));
        assert_eq!(r, m(&[&[1, 1], &[0, 0]]));
        assert_eq!(p, vec![0]);
    }

    #[test]
    fn solve_examples() {
        let b = BitVec::from_bits(&[1, 0, 1]);
        assert_eq!(solve_affine(&BitMatrix::identity(3), &b).unwrap(), Some(b.clone()));
        let x = solve_affine(&m(&[&[1, 1]]), &BitVec::from_bits(&[1])).unwrap();
        assert_eq!(x, Some(BitVec::from_bits(&[1, 0])));
        let x = solve_affine(&m(&[&[0], &[0]]), &BitVec::from_bits(&[1, 0])).unwrap();
        assert_eq!(x, None);
        assert!(matches!(solve_affine(&BitMatrix::identity(2), &BitVec::zeros(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&BitMatrix::identity(4)).is_empty());
        assert_eq!(kernel_basis(&BitMatrix::zeros(2, 3)).len(), 3);
        assert_eq!(kernel_basis(&m(&[&[1, 1]])), vec![BitVec::from_bits(&[1, 1])]);
    }

    #[test]
    fn homology_examples() {
        let h = homology_of_pair(&BitMatrix::zeros(2, 0), &BitMatrix::zeros(0, 2)).unwrap();
        assert_eq!(h.class_basis(), &[BitVec::unit(2, 0), BitVec::unit(2, 1)]);

        let h = homology_of_pair(&BitMatrix::identity(2), &BitMatrix::zeros(0, 2)).unwrap();
        assert_eq!(h.rank(), 0);

        let h = homology_of_pair(&m(&[&[1], &[1]]), &BitMatrix::zeros(0, 2)).unwrap();
        assert_eq!(h.class_basis(), &[BitVec::from_bits(&[1, 0])]);
        // (0,1) is homologous to (1,0)
        assert_eq!(h.class_of(&BitVec::from_bits(&[0, 1])).unwrap(), BitVec::from_bits(&[1]));
        assert_eq!(h.class_of(&BitVec::from_bits(&[1, 1])).unwrap(), BitVec::from_bits(&[0]));
    }

    #[test]
    fn homology_errors() {
        let err = homology_of_pair(&m(&[&[1], &[0]]), &m(&[&[1, 0]])).unwrap_err();
        assert!(matches!(err, Error::NotAComplex(_)));
        let h = homology_of_pair(&BitMatrix::zeros(2, 0), &m(&[&[1, 0]])).unwrap();
        assert!(matches!(h.class_of(&BitVec::unit(2, 0)), Err(Error::NotACocycle(_))));
    }

    #[test]
    fn preferred_representatives_come_first() {
        let h = homology_of_pair(&BitMatrix::zeros(3, 0), &BitMatrix::zeros(0, 3)).unwrap();
        let pref = BitVec::from_bits(&[1, 1, 0]);
        let h2 = h.with_preferred(std::slice::from_ref(&pref)).unwrap();
        assert_eq!(h2.class_basis()[0], pref);
        assert_eq!(h2.rank(), 3);
        assert_eq!(h2.class_of(&pref).unwrap(), BitVec::unit(3, 0));
    }

    #[test]
    fn span_solver_matches_rref_rule() {
        let a = m(&[&[1, 1, 0, 1], &[0, 1, 1, 1], &[1, 0, 1, 0]]);
        let cols: Vec<BitVec> = (0..4).map(|c| a.column(c)).collect();
        let s = SpanSolver::from_columns(3, &cols);
        for bits in 0..8u8 {
            let b = BitVec::from_bits(&[bits & 1, (bits >> 1) & 1, (bits >> 2) & 1]);
            let expected = solve_affine(&a, &b).unwrap();
            let got = s.solve(&b).map(|c| BitVec::from_indices(4, c));
            assert_eq!(got, expected, "rhs {b:?}");
        }
    }
}
