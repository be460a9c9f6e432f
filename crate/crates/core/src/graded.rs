//! Graded bases, elements of tensor powers and homogeneous multilinear maps.
//!
//! A basis tuple is a `Vec<u32>` of indices into a [`GradedBasis`]. Elements
//! are finite sets of such tuples (coefficients are implicit: presence = 1),
//! so addition is symmetric difference.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

static NEXT_BASIS_ID: AtomicU64 = AtomicU64::new(1);

/// Basis tuple: indices into a [`GradedBasis`].
pub type Tuple = Vec<u32>;

/// Additive multigrading preserved by all structure maps of a presentation.
pub type Weight = Vec<i64>;

/// Ordered list of named, graded basis elements truncated at a degree cap.
#[derive(Debug)]
pub struct GradedBasis {
    id: u64,
    names: Vec<String>,
    degrees: Vec<i32>,
    index: HashMap<String, u32>,
    cap: i32,
    by_degree: BTreeMap<i32, Vec<u32>>,
    weights: Vec<Weight>,
    weight_rank: usize,
}

impl GradedBasis {
    /// Builds a basis; names must be unique, degrees non-negative and at most `cap`.
    pub fn new<S: Into<String>>(elements: impl IntoIterator<Item = (S, i32)>, cap: i32) -> Result<Self> {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        let mut index = HashMap::new();
        let mut by_degree: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
        for (name, degree) in elements {
            let name = name.into();
            if degree < 0 {
                return Err(Error::Degree(format!("basis element `{name}` has negative degree {degree}")));
            }
            if degree > cap {
                return Err(Error::Window(format!("basis element `{name}` has degree {degree} above the cap {cap}")));
            }
            let i = names.len() as u32;
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate basis name `{name}`")));
            }
            by_degree.entry(degree).or_default().push(i);
            names.push(name);
            degrees.push(degree);
        }
        let weights = vec![Vec::new(); names.len()];
        let id = NEXT_BASIS_ID.fetch_add(1, Ordering::Relaxed);
        Ok(Self { id, names, degrees, index, cap, by_degree, weights, weight_rank: 0 })
    }

    /// Attaches one weight vector per element; all must have the same length.
    pub fn with_weights(mut self, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != self.names.len() {
            return Err(Error::Dimension(format!("{} weights for {} basis elements", weights.len(), self.names.len())));
        }
        let rank = weights.first().map_or(0, Vec::len);
        if weights.iter().any(|w| w.len() != rank) {
            return Err(Error::Dimension("weight vectors of different lengths".into()));
        }
        self.weights = weights;
        self.weight_rank = rank;
        Ok(self)
    }

    /// A new basis with the same elements and the given weights.
    pub fn reweighted(&self, weights: Vec<Weight>) -> Result<GradedBasis> {
        let elements = self.names.iter().cloned().zip(self.degrees.iter().copied());
        GradedBasis::new(elements, self.cap)?.with_weights(weights)
    }

    pub fn weight(&self, i: u32) -> &[i64] {
        &self.weights[i as usize]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    /// Sum of the weights of the entries; the empty tuple has weight zero.
    pub fn tuple_weight(&self, tuple: &[u32]) -> Weight {
        let mut out = vec![0; self.weight_rank];
        for &i in tuple {
            for (o, w) in out.iter_mut().zip(&self.weights[i as usize]) {
                *o += w;
            }
        }
        out
    }

    /// Tuples of the given arity and degree split by weight.
    pub fn tuples_by_weight(&self, arity: usize, degree: i32) -> BTreeMap<Weight, Vec<Tuple>> {
        let mut out: BTreeMap<Weight, Vec<Tuple>> = BTreeMap::new();
        for t in self.tuples_of_degree(arity, degree) {
            out.entry(self.tuple_weight(&t)).or_default().push(t);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn cap(&self) -> i32 {
        self.cap
    }

    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: u32) -> i32 {
        self.degrees[i as usize]
    }

    pub fn lookup(&self, name: &str) -> Result<u32> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// Indices of the elements of the given degree, in basis order.
    pub fn of_degree(&self, degree: i32) -> &[u32] {
        self.by_degree.get(&degree).map_or(&[], Vec::as_slice)
    }

    pub fn tuple_degree(&self, tuple: &[u32]) -> i32 {
        tuple.iter().map(|&i| self.degrees[i as usize]).sum()
    }

    pub fn same(&self, other: &GradedBasis) -> bool {
        self.id == other.id
    }

    /// All tuples of the given arity and total degree, in lexicographic order.
    pub fn tuples_of_degree(&self, arity: usize, degree: i32) -> Vec<Tuple> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(arity);
        let min = self.degrees.iter().copied().min().unwrap_or(0);
        self.fill_tuples(arity, degree, min, &mut current, &mut out);
        out
    }

    fn fill_tuples(&self, remaining: usize, degree: i32, min: i32, current: &mut Tuple, out: &mut Vec<Tuple>) {
        if remaining == 0 {
            if degree == 0 {
                out.push(current.clone());
            }
            return;
        }
        if self.is_empty() || degree < min * remaining as i32 {
            return;
        }
        for i in 0..self.len() as u32 {
            let d = self.degrees[i as usize];
            let rest = degree - d;
            if rest < min * (remaining as i32 - 1) {
                continue;
            }
            current.push(i);
            self.fill_tuples(remaining - 1, rest, min, current, out);
            current.pop();
        }
    }

    /// All tuples of the given arity with total degree at most `max_degree`,
    /// grouped by degree in increasing order.
    pub fn tuples_up_to(&self, arity: usize, max_degree: i32) -> Vec<Tuple> {
        (0..=max_degree).flat_map(|t| self.tuples_of_degree(arity, t)).collect()
    }

    pub fn render_tuple(&self, tuple: &[u32]) -> String {
        if tuple.is_empty() {
            return "1".to_string();
        }
        tuple.iter().map(|&i| self.name(i)).collect::<Vec<_>>().join("*")
    }
}

/// Finite GF(2) combination of basis tuples of a fixed arity.
#[derive(Clone)]
pub struct Element {
    basis: Arc<GradedBasis>,
    arity: usize,
    terms: BTreeSet<Tuple>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.basis.same(&other.basis) && self.arity == other.arity && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(basis: &Arc<GradedBasis>, arity: usize) -> Self {
        Self { basis: Arc::clone(basis), arity, terms: BTreeSet::new() }
    }

    /// The scalar 1 (the empty tuple).
    pub fn one(basis: &Arc<GradedBasis>) -> Self {
        Self::from_tuple(basis, Vec::new())
    }

    pub fn from_tuple(basis: &Arc<GradedBasis>, tuple: Tuple) -> Self {
        let mut e = Self::zero(basis, tuple.len());
        e.terms.insert(tuple);
        e
    }

    /// Sum of the given tuples; repeated tuples cancel.
    pub fn from_tuples(basis: &Arc<GradedBasis>, arity: usize, tuples: impl IntoIterator<Item = Tuple>) -> Self {
        let mut e = Self::zero(basis, arity);
        for t in tuples {
            e.add_tuple(t);
        }
        e
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    /// The same tuples over another basis with identical indexing.
    pub fn rebased(&self, basis: &Arc<GradedBasis>) -> Element {
        Element { basis: Arc::clone(basis), arity: self.arity, terms: self.terms.clone() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeSet<Tuple> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        self.terms.contains(tuple)
    }

    /// Adds one tuple (mod 2).
    pub fn add_tuple(&mut self, tuple: Tuple) {
        assert_eq!(tuple.len(), self.arity, "tuple arity differs from element arity");
        if !self.terms.remove(&tuple) {
            self.terms.insert(tuple);
        }
    }

    pub fn add_assign(&mut self, other: &Element) {
        assert!(self.basis.same(&other.basis), "adding elements over different bases");
        assert_eq!(self.arity, other.arity, "adding elements of different arity");
        for t in &other.terms {
            if !self.terms.remove(t) {
                self.terms.insert(t.clone());
            }
        }
    }

    pub fn sum(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    /// Total degree if all terms share one degree; zero has no degree.
    pub fn degree(&self) -> Option<i32> {
        let mut degrees = self.terms.iter().map(|t| self.basis.tuple_degree(t));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn tensor(&self, other: &Element) -> Result<Element> {
        if !self.basis.same(&other.basis) {
            return Err(Error::BasisMismatch);
        }
        let mut out = Element::zero(&self.basis, self.arity + other.arity);
        for a in &self.terms {
            for b in &other.terms {
                let mut t = a.clone();
                t.extend_from_slice(b);
                out.add_tuple(t);
            }
        }
        Ok(out)
    }

    /// Block transpose σ_{m,n}: the input is `n` blocks of length `m`, slot
    /// `i*n + j` of the output is slot `j*m + i` of the input.
    pub fn sigma_permute(&self, m: usize, n: usize) -> Result<Element> {
        if self.arity != m * n {
            return Err(Error::Arity { expected: m * n, found: self.arity });
        }
        Ok(Element::from_tuples(&self.basis, self.arity, self.terms.iter().map(|t| sigma_tuple(m, n, t))))
    }

    /// Coordinates in the list of tuples `index` (tuples not listed are an error).
    pub fn to_bitvec(&self, index: &HashMap<Tuple, usize>, len: usize) -> Result<BitVec> {
        let mut v = BitVec::zeros(len);
        for t in &self.terms {
            let i = index.get(t).ok_or_else(|| {
                Error::Dimension(format!("tuple {} outside the expected graded piece", self.basis.render_tuple(t)))
            })?;
            v.flip(*i);
        }
        Ok(v)
    }

    pub fn from_bitvec(basis: &Arc<GradedBasis>, arity: usize, tuples: &[Tuple], v: &BitVec) -> Element {
        Element::from_tuples(basis, arity, v.ones().map(|i| tuples[i].clone()))
    }

    /// Parses `0` or `term (+ term)*` with `term = name(*name)*`. The arity is
    /// taken from the terms, or from `arity` for `0`; a bare `1` is the
    /// scalar when `arity` is `Some(0)`.
    pub fn parse(basis: &Arc<GradedBasis>, text: &str, arity: Option<usize>) -> Result<Element> {
        let text = text.trim();
        if text == "0" {
            let arity = arity.ok_or_else(|| Error::Invalid("cannot infer the arity of `0`".into()))?;
            return Ok(Element::zero(basis, arity));
        }
        if arity == Some(0) && text == "1" {
            return Ok(Element::one(basis));
        }
        let mut out: Option<Element> = None;
        for term in text.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Invalid(format!("empty term in `{text}`")));
            }
            let tuple = term.split('*').map(|name| basis.lookup(name.trim())).collect::<Result<Tuple>>()?;
            let e = out.get_or_insert_with(|| Element::zero(basis, tuple.len()));
            if tuple.len() != e.arity {
                return Err(Error::Arity { expected: e.arity, found: tuple.len() });
            }
            e.add_tuple(tuple);
        }
        let e = out.expect("at least one term");
        if let Some(a) = arity {
            if a != e.arity {
                return Err(Error::Arity { expected: a, found: e.arity });
            }
        }
        Ok(e)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms.iter().map(|t| self.basis.render_tuple(t)).collect::<Vec<_>>().join(" + ")
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `prefix ⊗ middle ⊗ suffix` for a fixed prefix and suffix tuple.
pub fn splice(prefix: &[u32], middle: &Element, suffix: &[u32]) -> Element {
    let mut out = Element::zero(middle.basis(), prefix.len() + middle.arity() + suffix.len());
    for t in middle.terms() {
        let mut full = Vec::with_capacity(out.arity());
        full.extend_from_slice(prefix);
        full.extend_from_slice(t);
        full.extend_from_slice(suffix);
        out.add_tuple(full);
    }
    out
}

/// σ_{m,n} on a single tuple.
pub fn sigma_tuple(m: usize, n: usize, tuple: &[u32]) -> Tuple {
    debug_assert_eq!(tuple.len(), m * n);
    let mut out = vec![0; m * n];
    for i in 0..m {
        for j in 0..n {
            out[i * n + j] = tuple[j * m + i];
        }
    }
    out
}

/// Anything that evaluates a homogeneous multilinear map on basis tuples.
pub trait Evaluate: Send + Sync {
    fn source(&self) -> &Arc<GradedBasis>;
    fn target(&self) -> &Arc<GradedBasis>;
    fn arity_in(&self) -> usize;
    fn arity_out(&self) -> usize;
    /// Internal degree: output degree minus input degree.
    fn degree(&self) -> i32;
    fn eval(&self, tuple: &[u32]) -> Result<Element>;

    /// Linear extension to an element of the source.
    fn apply(&self, e: &Element) -> Result<Element> {
        if !e.basis().same(self.source()) {
            return Err(Error::BasisMismatch);
        }
        if e.arity() != self.arity_in() {
            return Err(Error::Arity { expected: self.arity_in(), found: e.arity() });
        }
        let mut out = Element::zero(self.target(), self.arity_out());
        for t in e.terms() {
            out.add_assign(&self.eval(t)?);
        }
        Ok(out)
    }
}

type EvalFn = dyn Fn(&[u32]) -> Result<Element> + Send + Sync;

/// A multilinear map given by a closure on basis tuples.
pub struct LazyMap {
    source: Arc<GradedBasis>,
    target: Arc<GradedBasis>,
    m: usize,
    n: usize,
    p: i32,
    f: Box<EvalFn>,
}

impl LazyMap {
    pub fn new(
        source: &Arc<GradedBasis>,
        target: &Arc<GradedBasis>,
        m: usize,
        n: usize,
        p: i32,
        f: impl Fn(&[u32]) -> Result<Element> + Send + Sync + 'static,
    ) -> Self {
        Self { source: Arc::clone(source), target: Arc::clone(target), m, n, p, f: Box::new(f) }
    }
}

impl Evaluate for LazyMap {
    fn source(&self) -> &Arc<GradedBasis> {
        &self.source
    }
    fn target(&self) -> &Arc<GradedBasis> {
        &self.target
    }
    fn arity_in(&self) -> usize {
        self.m
    }
    fn arity_out(&self) -> usize {
        self.n
    }
    fn degree(&self) -> i32 {
        self.p
    }
    fn eval(&self, tuple: &[u32]) -> Result<Element> {
        (self.f)(tuple)
    }
}

/// Homogeneous multilinear map `source^⊗m → target^⊗n` of internal degree
/// `p`, stored as a sparse table. Absent tuples map to zero. Tuples of total
/// degree above `domain_cap` are outside the region where the table is known.
#[derive(Clone)]
pub struct MultiMap {
    source: Arc<GradedBasis>,
    target: Arc<GradedBasis>,
    m: usize,
    n: usize,
    p: i32,
    table: BTreeMap<Tuple, Element>,
    domain_cap: Option<i32>,
}

impl PartialEq for MultiMap {
    fn eq(&self, other: &Self) -> bool {
        self.source.same(&other.source)
            && self.target.same(&other.target)
            && (self.m, self.n, self.p) == (other.m, other.n, other.p)
            && self.table == other.table
    }
}

impl fmt::Debug for MultiMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiMap({},{},{}) {{", self.m, self.n, self.p)?;
        for (k, v) in &self.table {
            write!(f, " {} -> {};", self.source.render_tuple(k), v)?;
        }
        write!(f, " }}")
    }
}

impl MultiMap {
    pub fn zero(source: &Arc<GradedBasis>, target: &Arc<GradedBasis>, m: usize, n: usize, p: i32) -> Self {
        Self {
            source: Arc::clone(source),
            target: Arc::clone(target),
            m,
            n,
            p,
            table: BTreeMap::new(),
            domain_cap: None,
        }
    }

    /// Identity on tuples of arity `m` up to the basis cap.
    pub fn identity(basis: &Arc<GradedBasis>, m: usize) -> Self {
        let mut out = Self::zero(basis, basis, m, m, 0);
        for t in basis.tuples_up_to(m, basis.cap()) {
            out.table.insert(t.clone(), Element::from_tuple(basis, t));
        }
        out.domain_cap = Some(basis.cap());
        out
    }

    /// The same table over other bases with identical indexing.
    pub fn rebased(&self, source: &Arc<GradedBasis>, target: &Arc<GradedBasis>) -> MultiMap {
        MultiMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            m: self.m,
            n: self.n,
            p: self.p,
            table: self.table.iter().map(|(k, v)| (k.clone(), v.rebased(target))).collect(),
            domain_cap: self.domain_cap,
        }
    }

    pub fn with_domain_cap(mut self, cap: Option<i32>) -> Self {
        self.domain_cap = cap;
        self
    }

    pub fn domain_cap(&self) -> Option<i32> {
        self.domain_cap
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> i32 {
        self.p
    }

    pub fn table(&self) -> &BTreeMap<Tuple, Element> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Sets the value on one tuple, checking arities, bases and homogeneity.
    pub fn insert(&mut self, tuple: Tuple, value: Element) -> Result<()> {
        if tuple.len() != self.m {
            return Err(Error::Arity { expected: self.m, found: tuple.len() });
        }
        if value.arity() != self.n {
            return Err(Error::Arity { expected: self.n, found: value.arity() });
        }
        if !value.basis().same(&self.target) {
            return Err(Error::BasisMismatch);
        }
        let want = self.source.tuple_degree(&tuple) + self.p;
        if let Some(bad) = value.terms().iter().find(|t| self.target.tuple_degree(t) != want) {
            return Err(Error::Degree(format!(
                "{} has degree {} but {} maps to degree {want}",
                self.target.render_tuple(bad),
                self.target.tuple_degree(bad),
                self.source.render_tuple(&tuple)
            )));
        }
        if value.is_zero() {
            self.table.remove(&tuple);
        } else {
            self.table.insert(tuple, value);
        }
        Ok(())
    }

    /// Adds `value` to the entry at `tuple`.
    pub fn add_to(&mut self, tuple: Tuple, value: &Element) -> Result<()> {
        let current = self.table.get(&tuple).cloned().unwrap_or_else(|| Element::zero(&self.target, self.n));
        self.insert(tuple, current.sum(value))
    }

    pub fn sum(&self, other: &MultiMap) -> Result<MultiMap> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.table {
            out.add_to(k.clone(), v)?;
        }
        out.domain_cap = min_cap(self.domain_cap, other.domain_cap);
        Ok(out)
    }

    fn check_same_shape(&self, other: &MultiMap) -> Result<()> {
        if !self.source.same(&other.source) || !self.target.same(&other.target) {
            return Err(Error::BasisMismatch);
        }
        if (self.m, self.n) != (other.m, other.n) {
            return Err(Error::Arity { expected: self.m, found: other.m });
        }
        if self.p != other.p {
            return Err(Error::Degree(format!("adding maps of degree {} and {}", self.p, other.p)));
        }
        Ok(())
    }

    /// Tabulates an evaluator on every tuple of total degree at most `window`.
    pub fn materialize(f: &dyn Evaluate, window: i32) -> Result<MultiMap> {
        let mut out = MultiMap::zero(f.source(), f.target(), f.arity_in(), f.arity_out(), f.degree());
        for t in f.source().tuples_up_to(f.arity_in(), window) {
            let v = f.eval(&t)?;
            out.insert(t, v)?;
        }
        out.domain_cap = Some(window);
        Ok(out)
    }

    /// `f ⊗ g`: `(f⊗g)(x⊗y) = f(x)⊗g(y)`.
    pub fn hom_tensor(&self, other: &MultiMap) -> Result<MultiMap> {
        if !self.source.same(&other.source) || !self.target.same(&other.target) {
            return Err(Error::BasisMismatch);
        }
        let mut out = MultiMap::zero(&self.source, &self.target, self.m + other.m, self.n + other.n, self.p + other.p);
        for (a, fa) in &self.table {
            for (b, gb) in &other.table {
                let mut t = a.clone();
                t.extend_from_slice(b);
                out.insert(t, fa.tensor(gb)?)?;
            }
        }
        out.domain_cap = min_cap(self.domain_cap, other.domain_cap);
        Ok(out)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MultiMap) -> Result<MultiMap> {
        if !inner.target.same(&self.source) {
            return Err(Error::BasisMismatch);
        }
        if inner.n != self.m {
            return Err(Error::Arity { expected: self.m, found: inner.n });
        }
        let mut out = MultiMap::zero(&inner.source, &self.target, inner.m, self.n, self.p + inner.p);
        for (k, v) in &inner.table {
            out.insert(k.clone(), self.apply(v)?)?;
        }
        out.domain_cap = inner.domain_cap;
        Ok(out)
    }

    /// Matrix of the restriction to input tuples of the given total degree.
    /// Columns follow [`GradedBasis::tuples_of_degree`] on the source, rows on
    /// the target at degree `input_degree + p`.
    pub fn as_matrix(&self, input_degree: i32) -> Result<BitMatrix> {
        matrix_of(self, input_degree)
    }
}

fn min_cap(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Evaluate for MultiMap {
    fn source(&self) -> &Arc<GradedBasis> {
        &self.source
    }
    fn target(&self) -> &Arc<GradedBasis> {
        &self.target
    }
    fn arity_in(&self) -> usize {
        self.m
    }
    fn arity_out(&self) -> usize {
        self.n
    }
    fn degree(&self) -> i32 {
        self.p
    }
    fn eval(&self, tuple: &[u32]) -> Result<Element> {
        if tuple.len() != self.m {
            return Err(Error::Arity { expected: self.m, found: tuple.len() });
        }
        if let Some(cap) = self.domain_cap {
            let d = self.source.tuple_degree(tuple);
            if d > cap {
                return Err(Error::Window(format!(
                    "input {} of degree {d} exceeds the window {cap}",
                    self.source.render_tuple(tuple)
                )));
            }
        }
        Ok(self.table.get(tuple).cloned().unwrap_or_else(|| Element::zero(&self.target, self.n)))
    }
}

/// Matrix of any evaluator on the graded piece of the given input degree.
pub fn matrix_of(f: &dyn Evaluate, input_degree: i32) -> Result<BitMatrix> {
    let cols = f.source().tuples_of_degree(f.arity_in(), input_degree);
    let rows = f.target().tuples_of_degree(f.arity_out(), input_degree + f.degree());
    let row_index: HashMap<Tuple, usize> = rows.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let columns = cols.iter().map(|t| f.eval(t)?.to_bitvec(&row_index, rows.len())).collect::<Result<Vec<_>>>()?;
    Ok(BitMatrix::from_columns(rows.len(), &columns))
}

/// Evaluates `f1 ⊗ … ⊗ fk` on one tuple; the factors' input arities must add
/// up to the tuple length. All factors share one target basis.
pub fn eval_product(factors: &[&dyn Evaluate], tuple: &[u32]) -> Result<Element> {
    let total: usize = factors.iter().map(|f| f.arity_in()).sum();
    if total != tuple.len() {
        return Err(Error::Arity { expected: total, found: tuple.len() });
    }
    let target = factors
        .first()
        .map(|f| Arc::clone(f.target()))
        .ok_or_else(|| Error::Invalid("empty tensor product of maps".into()))?;
    let mut acc = Element::one(&target);
    let mut at = 0;
    for f in factors {
        let part = f.eval(&tuple[at..at + f.arity_in()])?;
        if part.is_zero() {
            return Ok(Element::zero(&target, factors.iter().map(|f| f.arity_out()).sum()));
        }
        acc = acc.tensor(&part)?;
        at += f.arity_in();
    }
    Ok(acc)
}

/// Linear extension of [`eval_product`].
pub fn apply_product(factors: &[&dyn Evaluate], e: &Element) -> Result<Element> {
    let target = factors
        .first()
        .map(|f| Arc::clone(f.target()))
        .ok_or_else(|| Error::Invalid("empty tensor product of maps".into()))?;
    let mut out = Element::zero(&target, factors.iter().map(|f| f.arity_out()).sum());
    for t in e.terms() {
        out.add_assign(&eval_product(factors, t)?);
    }
    Ok(out)
}

/// The identity of `basis` in arity one, usable as a tensor factor.
pub struct Identity(pub Arc<GradedBasis>);

impl Evaluate for Identity {
    fn source(&self) -> &Arc<GradedBasis> {
        &self.0
    }
    fn target(&self) -> &Arc<GradedBasis> {
        &self.0
    }
    fn arity_in(&self) -> usize {
        1
    }
    fn arity_out(&self) -> usize {
        1
    }
    fn degree(&self) -> i32 {
        0
    }
    fn eval(&self, tuple: &[u32]) -> Result<Element> {
        Ok(Element::from_tuple(&self.0, tuple.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> Arc<GradedBasis> {
        Arc::new(GradedBasis::new([("1", 0), ("a", 2), ("b", 2), ("c", 3), ("d", 4)], 6).unwrap())
    }

    fn el(b: &Arc<GradedBasis>, s: &str) -> Element {
        Element::parse(b, s, None).unwrap()
    }

    #[test]
    fn tensor_examples() {
        let b = basis();
        let x = el(&b, "a*b");
        assert_eq!(Element::one(&b).tensor(&x).unwrap(), x);
        assert_eq!(el(&b, "a").tensor(&el(&b, "b")).unwrap(), x);
        let s = el(&b, "a + b");
        assert_eq!(s.tensor(&s).unwrap(), el(&b, "a*a + a*b + b*a + b*b"));
        let other = Arc::new(GradedBasis::new([("a", 1)], 1).unwrap());
        assert_eq!(x.tensor(&Element::one(&other)), Err(Error::BasisMismatch));
    }

    #[test]
    fn sigma_examples() {
        let b = basis();
        let x = el(&b, "a*b*c*d");
        assert_eq!(x.sigma_permute(2, 2).unwrap(), el(&b, "a*c*b*d"));
        assert_eq!(x.sigma_permute(1, 4).unwrap(), x);
        assert!(x.sigma_permute(3, 2).is_err());
        let db = el(&b, "1*a + a*1");
        let both = db.tensor(&db).unwrap().sigma_permute(2, 2).unwrap();
        assert_eq!(both, el(&b, "1*1*a*a + a*1*1*a + 1*a*a*1 + a*a*1*1"));
    }

    #[test]
    fn parse_and_render() {
        let b = basis();
        let e = el(&b, "b*a + a*b");
        assert_eq!(e.render(), "a*b + b*a");
        assert_eq!(el(&b, "a + a").render(), "0");
        assert_eq!(Element::one(&b).render(), "1");
        assert!(matches!(Element::parse(&b, "a*z", None), Err(Error::UnknownName(_))));
        assert!(matches!(Element::parse(&b, "a + a*b", None), Err(Error::Arity { .. })));
    }

    #[test]
    fn tuple_enumeration() {
        let b = basis();
        let t = b.tuples_of_degree(2, 4);
        let names: Vec<String> = t.iter().map(|t| b.render_tuple(t)).collect();
        assert_eq!(names, ["1*d", "a*a", "a*b", "b*a", "b*b", "d*1"]);
        assert_eq!(b.tuples_of_degree(0, 0), vec![Vec::<u32>::new()]);
        assert!(b.tuples_of_degree(0, 1).is_empty());
    }

    #[test]
    fn map_apply_and_matrix() {
        let b = basis();
        let id = MultiMap::identity(&b, 1);
        let x = el(&b, "a + b");
        assert_eq!(id.apply(&x).unwrap(), x);
        let zero = MultiMap::zero(&b, &b, 1, 1, 0);
        assert!(zero.apply(&x).unwrap().is_zero());
        let m = id.as_matrix(2).unwrap();
        assert_eq!(m, BitMatrix::identity(2));
    }

    #[test]
    fn homogeneity_is_enforced() {
        let b = basis();
        let mut f = MultiMap::zero(&b, &b, 2, 1, 0);
        assert!(matches!(f.insert(vec![1, 2], el(&b, "c")), Err(Error::Degree(_))));
        f.insert(vec![1, 2], el(&b, "d")).unwrap();
        assert_eq!(f.eval(&[1, 2]).unwrap(), el(&b, "d"));
    }

    #[test]
    fn window_is_enforced() {
        let b = basis();
        let id = MultiMap::identity(&b, 1).with_domain_cap(Some(2));
        assert!(id.eval(&[3]).unwrap_err().is_window());
    }

    #[test]
    fn tensor_of_products_on_four_tuple() {
        let b = basis();
        // product: 1 unit, a*a = d, everything else zero
        let mut mu = MultiMap::zero(&b, &b, 2, 1, 0);
        for i in 0..b.len() as u32 {
            mu.insert(vec![0, i], Element::from_tuple(&b, vec![i])).unwrap();
            if i != 0 {
                mu.insert(vec![i, 0], Element::from_tuple(&b, vec![i])).unwrap();
            }
        }
        mu.insert(vec![1, 1], el(&b, "d")).unwrap();
        let mm = mu.hom_tensor(&mu).unwrap();
        let x = el(&b, "a*a*1*b");
        assert_eq!(mm.apply(&x).unwrap(), el(&b, "d*b"));
        assert_eq!(apply_product(&[&mu, &mu], &x).unwrap(), el(&b, "d*b"));
        let id = MultiMap::identity(&b, 1);
        assert_eq!(mu.compose(&id.hom_tensor(&id).unwrap()).unwrap().table(), mu.table());
    }
}
