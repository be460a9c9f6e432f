//! Bar construction of a 1-connected DG algebra: standard differential,
//! deconcatenation coproduct, shuffle product, the product perturbed by the
//! `E_{1,q}` operations, and homology with chosen cocycle representatives.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::gf2::{homology_of_pair, BitMatrix, BitVec, Homology, SpanSolver};
use crate::graded::{Element, Evaluate, GradedBasis, MultiMap, Tuple, Weight};
use crate::presentation::AlgebraPresentation;
use crate::report::{first_mismatch, Check};

/// Renders a word of letters as `[x1|x2|…]`.
pub fn render_word(algebra: &GradedBasis, letters: &[u32]) -> String {
    let inner: Vec<&str> = letters.iter().map(|&x| algebra.name(x)).collect();
    format!("[{}]", inner.join("|"))
}

/// All bar words of bar-degree at most `cap + 1`, with the standard
/// differential on words of bar-degree at most `cap`.
pub struct BarComplex {
    algebra: AlgebraPresentation,
    cap: i32,
    basis: Arc<GradedBasis>,
    words: Vec<Tuple>,
    index: HashMap<Tuple, u32>,
    d: MultiMap,
}

impl std::fmt::Debug for BarComplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BarComplex(cap {}, {} words)", self.cap, self.words.len())
    }
}

/// Enumerates the bar words of `algebra` and assembles the bar differential.
///
/// Words are ordered by bar-degree, then length, then lexicographically in the
/// letters' basis order. The extra degree `cap + 1` is kept so that homology
/// is exact through degree `cap`.
pub fn bar_basis(algebra: &AlgebraPresentation, cap: i32) -> Result<BarComplex> {
    let a = algebra.basis();
    let letters: Vec<u32> = (0..a.len() as u32).filter(|&x| x != algebra.unit()).collect();
    if let Some(&bad) = letters.iter().find(|&&x| a.degree(x) < 2) {
        return Err(Error::NotOneConnected(format!(
            "`{}` has degree {}; letters need degree at least 2",
            a.name(bad),
            a.degree(bad)
        )));
    }
    let top = cap + 1;
    let mut by_degree: Vec<Vec<Tuple>> = vec![Vec::new(); (top.max(0) + 1) as usize];
    by_degree[0].push(Vec::new());
    for t in 1..=top {
        let mut here = Vec::new();
        for &x in &letters {
            let rest = t - (a.degree(x) - 1);
            if rest < 0 {
                continue;
            }
            for w in &by_degree[rest as usize] {
                let mut word = Vec::with_capacity(w.len() + 1);
                word.push(x);
                word.extend_from_slice(w);
                here.push(word);
            }
        }
        here.sort_by(|u, v| u.len().cmp(&v.len()).then_with(|| u.cmp(v)));
        by_degree[t as usize] = here;
    }
    let words: Vec<Tuple> = by_degree.into_iter().flatten().collect();
    let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i as u32)).collect();
    let bar_deg = |w: &Tuple| w.iter().map(|&x| a.degree(x) - 1).sum::<i32>();
    let weights = words.iter().map(|w| a.tuple_weight(w)).collect();
    let basis =
        Arc::new(GradedBasis::new(words.iter().map(|w| (render_word(a, w), bar_deg(w))), top)?.with_weights(weights)?);
    let mut bar =
        BarComplex { algebra: algebra.clone(), cap, d: MultiMap::zero(&basis, &basis, 1, 1, 1), basis, words, index };
    let mut d = MultiMap::zero(&bar.basis, &bar.basis, 1, 1, 1);
    for i in 0..bar.words.len() as u32 {
        if bar.basis.degree(i) <= cap {
            d.insert(vec![i], bar.differential_of_word(i)?)?;
        }
    }
    bar.d = d.with_domain_cap(Some(cap));
    Ok(bar)
}

impl BarComplex {
    pub fn algebra(&self) -> &AlgebraPresentation {
        &self.algebra
    }

    pub fn cap(&self) -> i32 {
        self.cap
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    /// Letters of the word with the given index.
    pub fn word(&self, i: u32) -> &[u32] {
        &self.words[i as usize]
    }

    pub fn empty_word(&self) -> u32 {
        0
    }

    pub fn index_of(&self, letters: &[u32]) -> Result<u32> {
        self.index.get(letters).copied().ok_or_else(|| {
            Error::Window(format!(
                "{} is above bar-degree {}",
                render_word(self.algebra.basis(), letters),
                self.cap + 1
            ))
        })
    }

    /// Parses a bar element such as `[a2|a3] + [a3|a2]` (arity one).
    pub fn parse(&self, text: &str) -> Result<Element> {
        Element::parse(&self.basis, text, Some(1))
    }

    fn words_to_element(&self, words: impl IntoIterator<Item = Tuple>) -> Result<Element> {
        let mut out = Element::zero(&self.basis, 1);
        for w in words {
            out.add_tuple(vec![self.index_of(&w)?]);
        }
        Ok(out)
    }

    /// `Σ [..|dx_i|..] + Σ [..|x_i x_{i+1}|..]`; a product equal to the unit
    /// deletes the letter.
    fn differential_of_word(&self, i: u32) -> Result<Element> {
        let w = self.word(i);
        let a = &self.algebra;
        let mut out = Vec::new();
        for s in 0..w.len() {
            for t in a.d().eval(&w[s..=s])?.terms() {
                let mut v = w.to_vec();
                v[s] = t[0];
                out.push(v);
            }
        }
        for s in 0..w.len().saturating_sub(1) {
            for t in a.mu().eval(&w[s..s + 2])?.terms() {
                let mut v = w[..s].to_vec();
                if t[0] != a.unit() {
                    v.push(t[0]);
                }
                v.extend_from_slice(&w[s + 2..]);
                out.push(v);
            }
        }
        self.words_to_element(out)
    }

    /// The bar differential as a map, defined on words of degree at most `cap`.
    pub fn differential(&self) -> &MultiMap {
        &self.d
    }

    pub fn bar_differential(&self, i: u32) -> Result<Element> {
        self.d.eval(&[i])
    }

    /// Deconcatenation `Σ [x1..xi] ⊗ [xi+1..xk]`.
    pub fn cofree_coproduct(&self, i: u32) -> Result<Element> {
        let w = self.word(i);
        let mut out = Element::zero(&self.basis, 2);
        for s in 0..=w.len() {
            out.add_tuple(vec![self.index_of(&w[..s])?, self.index_of(&w[s..])?]);
        }
        Ok(out)
    }

    /// Sum over all shuffles of the two words.
    pub fn shuffle_product(&self, i: u32, j: u32) -> Result<Element> {
        self.grouped_interleavings(i, j, false)
    }

    /// The product perturbed by the `E_{1,q}` tables: interleavings where a
    /// letter `x` of the first word may absorb a run `y1..yq` of the second
    /// word into the letter(s) of `E_{1,q}(x; y1..yq)`.
    pub fn perturbed_product(&self, i: u32, j: u32) -> Result<Element> {
        self.grouped_interleavings(i, j, true)
    }

    fn grouped_interleavings(&self, i: u32, j: u32, perturbed: bool) -> Result<Element> {
        let (u, v) = (self.word(i), self.word(j));
        let mut memo: HashMap<(usize, usize), BTreeSet<Tuple>> = HashMap::new();
        let words = self.interleave(u, v, 0, 0, perturbed, &mut memo)?;
        self.words_to_element(words)
    }

    fn interleave(
        &self,
        u: &[u32],
        v: &[u32],
        i: usize,
        j: usize,
        perturbed: bool,
        memo: &mut HashMap<(usize, usize), BTreeSet<Tuple>>,
    ) -> Result<BTreeSet<Tuple>> {
        if let Some(done) = memo.get(&(i, j)) {
            return Ok(done.clone());
        }
        let mut out = BTreeSet::new();
        if i == u.len() && j == v.len() {
            out.insert(Vec::new());
        }
        let prepend = |letter: u32, rest: &BTreeSet<Tuple>, out: &mut BTreeSet<Tuple>| {
            for r in rest {
                let mut w = Vec::with_capacity(r.len() + 1);
                w.push(letter);
                w.extend_from_slice(r);
                if !out.remove(&w) {
                    out.insert(w);
                }
            }
        };
        if i < u.len() {
            let rest = self.interleave(u, v, i + 1, j, perturbed, memo)?;
            prepend(u[i], &rest, &mut out);
        }
        if j < v.len() {
            let rest = self.interleave(u, v, i, j + 1, perturbed, memo)?;
            prepend(v[j], &rest, &mut out);
        }
        if perturbed && i < u.len() {
            for (&q, e) in self.algebra.e_family() {
                if j + q > v.len() {
                    continue;
                }
                let mut args = vec![u[i]];
                args.extend_from_slice(&v[j..j + q]);
                let value = e.eval(&args)?;
                if value.is_zero() {
                    continue;
                }
                let rest = self.interleave(u, v, i + 1, j + q, perturbed, memo)?;
                for t in value.terms() {
                    if t[0] == self.algebra.unit() {
                        return Err(Error::Invalid("E_{1,q} produced the unit".into()));
                    }
                    prepend(t[0], &rest, &mut out);
                }
            }
        }
        memo.insert((i, j), out.clone());
        Ok(out)
    }

    /// Bar complex as a presentation: basis = words, `d` = bar differential,
    /// `mu` = perturbed (or plain shuffle) product, `delta` = deconcatenation.
    pub fn to_presentation(&self, perturbed: bool) -> Result<AlgebraPresentation> {
        let b = &self.basis;
        let top = b.cap();
        let mut mu = MultiMap::zero(b, b, 2, 1, 0);
        for t in b.tuples_up_to(2, top) {
            let v = if perturbed { self.perturbed_product(t[0], t[1])? } else { self.shuffle_product(t[0], t[1])? };
            mu.insert(t, v)?;
        }
        let mut delta = MultiMap::zero(b, b, 1, 2, 0);
        for i in 0..b.len() as u32 {
            delta.insert(vec![i], self.cofree_coproduct(i)?)?;
        }
        let d = self.d.clone().with_domain_cap(None);
        AlgebraPresentation::from_parts(Arc::clone(b), self.empty_word(), d, mu, Some(delta), BTreeMap::new())
    }

    /// Exhaustive checks on all words and word pairs of bar-degree at most
    /// `window`: `d² = 0`, coassociativity, coderivation, Hopf compatibility
    /// of the shuffle product, and the chain-map property of the perturbed
    /// product.
    pub fn invariant_checks(&self, window: i32) -> Vec<Check> {
        let b = &self.basis;
        let one = |i: u32| Element::from_tuple(b, vec![i]);
        let render1 = |t: &Tuple| b.name(t[0]).to_string();
        let render2 = |t: &Tuple| format!("{} (x) {}", b.name(t[0]), b.name(t[1]));
        let singles = b.tuples_up_to(1, window.min(self.cap - 1));
        let pairs = b.tuples_up_to(2, window.min(self.cap - 1));
        let zero = |_: &Tuple| Ok(Element::zero(b, 1));
        let host = match self.to_presentation(false) {
            Ok(h) => h,
            Err(e) => return vec![Check::from_outcome("bar complex as a DG Hopf algebra", Err(e))],
        };
        let perturbed = match self.to_presentation(true) {
            Ok(h) => h,
            Err(e) => return vec![Check::from_outcome("perturbed product", Err(e))],
        };
        let delta = host.coproduct().expect("bar presentation has a coproduct");
        let _ = one;
        vec![
            Check::equality("bar d^2 = 0", singles.clone(), render1, |t| self.d.apply(&self.d.eval(t)?), zero),
            Check::equality(
                "bar coproduct is coassociative",
                singles.clone(),
                render1,
                |t| {
                    let mut out = Element::zero(b, 3);
                    for p in delta.eval(t)?.terms() {
                        out.add_assign(&crate::graded::splice(&[], &delta.eval(&p[..1])?, &p[1..]));
                    }
                    Ok(out)
                },
                |t| {
                    let mut out = Element::zero(b, 3);
                    for p in delta.eval(t)?.terms() {
                        out.add_assign(&crate::graded::splice(&p[..1], &delta.eval(&p[1..])?, &[]));
                    }
                    Ok(out)
                },
            ),
            Check::equality(
                "bar d is a coderivation",
                singles,
                render1,
                |t| delta.apply(&self.d.eval(t)?),
                |t| host.d_slots_of(&delta.eval(t)?),
            ),
            Check::equality(
                "shuffle Hopf compatibility",
                pairs.clone(),
                render2,
                |t| delta.apply(&host.mu().eval(t)?),
                |t| host.hopf_side(delta, t),
            ),
            Check::equality(
                "perturbed product is a chain map",
                pairs,
                render2,
                |t| self.d.apply(&perturbed.mu().eval(t)?),
                |t| perturbed.mu().apply(&perturbed.d_slots(t)?),
            ),
        ]
    }
}

/// The relations of a homotopy Gerstenhaber algebra on every tuple of total
/// degree at most `window`, for every arity that can involve a nonzero
/// `E_{1,q}`.
pub fn hga_relations_check(a: &AlgebraPresentation, window: i32) -> Vec<Check> {
    let hga = Hga { a };
    let qmax = a.e_family().keys().copied().max().unwrap_or(0);
    let b = a.basis();
    let render = |t: &Tuple| format!("({})", t.iter().map(|&i| b.name(i)).collect::<Vec<_>>().join(", "));
    let letters = |arity: usize| -> Vec<Tuple> {
        b.tuples_up_to(arity, window).into_iter().filter(|t| !t.contains(&a.unit())).collect()
    };
    let mut checks = Vec::new();
    let top = 2 * qmax + 1;
    let outcome = (1..=top).try_fold(None, |found, q| {
        if found.is_some() {
            return Ok(found);
        }
        first_mismatch(b.tuples_up_to(q + 1, window), render, |t| hga.relation1_lhs(t), |t| hga.relation1_rhs(t))
            .map(|w| w.map(|w| format!("q = {q}, {w}")))
    });
    checks.push(Check::from_outcome("HGA relation (1): differential of E_{1,q}", outcome));
    let outcome = (1..=top).try_fold(None, |found, q| {
        if found.is_some() {
            return Ok(found);
        }
        first_mismatch(b.tuples_up_to(q + 2, window), render, |t| hga.relation2_lhs(t), |t| hga.relation2_rhs(t))
            .map(|w| w.map(|w| format!("q = {q}, {w}")))
    });
    checks.push(Check::from_outcome("HGA relation (2): E_{1,q} on products", outcome));
    let mut outcome = Ok(None);
    'outer: for m in 1..=qmax + 1 {
        for n in 1..=qmax + 1 {
            match first_mismatch(letters(1 + m + n), render, |t| hga.relation3_lhs(t, m), |t| hga.relation3_rhs(t, m)) {
                Ok(None) => {}
                Ok(Some(w)) => {
                    outcome = Ok(Some(format!("m = {m}, n = {n}, {w}")));
                    break 'outer;
                }
                Err(e) => {
                    outcome = Err(e);
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check::from_outcome("HGA relation (3): composition of E operations", outcome));
    checks
}

struct Hga<'a> {
    a: &'a AlgebraPresentation,
}

impl Hga<'_> {
    fn basis(&self) -> &Arc<GradedBasis> {
        self.a.basis()
    }

    /// `E_{1,q}(x; ys)` with `E_{1,0}(x) = x`.
    fn e(&self, x: u32, ys: &[u32]) -> Result<Element> {
        if ys.is_empty() {
            return Ok(Element::from_tuple(self.basis(), vec![x]));
        }
        let mut args = vec![x];
        args.extend_from_slice(ys);
        match self.a.e(ys.len()) {
            Some(f) => f.eval(&args),
            None => Ok(Element::zero(self.basis(), 1)),
        }
    }

    /// `E` extended linearly in every slot.
    fn e_of(&self, x: &Element, ys: &[Element]) -> Result<Element> {
        let mut out = Element::zero(self.basis(), 1);
        let mut args = x.clone();
        for y in ys {
            args = args.tensor(y)?;
        }
        for t in args.terms() {
            out.add_assign(&self.e(t[0], &t[1..])?);
        }
        Ok(out)
    }

    fn mul(&self, x: &Element, y: &Element) -> Result<Element> {
        self.a.mu().apply(&x.tensor(y)?)
    }

    fn one(&self, x: u32) -> Element {
        Element::from_tuple(self.basis(), vec![x])
    }

    fn ones(&self, xs: &[u32]) -> Vec<Element> {
        xs.iter().map(|&x| self.one(x)).collect()
    }

    fn relation1_lhs(&self, t: &[u32]) -> Result<Element> {
        let d = self.a.d();
        let (x, ys) = (t[0], &t[1..]);
        let mut out = d.apply(&self.e(x, ys)?)?;
        let mut args = self.ones(ys);
        out.add_assign(&self.e_of(&d.eval(&[x])?, &args)?);
        for s in 0..ys.len() {
            args[s] = d.eval(&[ys[s]])?;
            out.add_assign(&self.e_of(&self.one(x), &args)?);
            args[s] = self.one(ys[s]);
        }
        Ok(out)
    }

    fn relation1_rhs(&self, t: &[u32]) -> Result<Element> {
        let (x, ys) = (t[0], &t[1..]);
        let q = ys.len();
        let mut out = self.mul(&self.one(ys[0]), &self.e(x, &ys[1..])?)?;
        out.add_assign(&self.mul(&self.e(x, &ys[..q - 1])?, &self.one(ys[q - 1]))?);
        for s in 0..q - 1 {
            let mut args = self.ones(ys);
            let prod = self.a.mu().eval(&ys[s..s + 2])?;
            args.splice(s..s + 2, [prod]);
            out.add_assign(&self.e_of(&self.one(x), &args)?);
        }
        Ok(out)
    }

    fn relation2_lhs(&self, t: &[u32]) -> Result<Element> {
        let prod = self.a.mu().eval(&t[..2])?;
        self.e_of(&prod, &self.ones(&t[2..]))
    }

    fn relation2_rhs(&self, t: &[u32]) -> Result<Element> {
        let (x1, x2, ys) = (t[0], t[1], &t[2..]);
        let q = ys.len();
        let mut out = self.mul(&self.one(x1), &self.e(x2, ys)?)?;
        out.add_assign(&self.mul(&self.e(x1, ys)?, &self.one(x2))?);
        for p in 1..q {
            out.add_assign(&self.mul(&self.e(x1, &ys[..p])?, &self.e(x2, &ys[p..])?)?);
        }
        Ok(out)
    }

    /// `E_{1,n}(E_{1,m}(a; b1..bm); c1..cn)` for `t = (a, b.., c..)`.
    fn relation3_lhs(&self, t: &[u32], m: usize) -> Result<Element> {
        let inner = self.e(t[0], &t[1..=m])?;
        self.e_of(&inner, &self.ones(&t[m + 1..]))
    }

    /// Sum over `0 ≤ i1 ≤ j1 ≤ … ≤ im ≤ jm ≤ n` of
    /// `E(a; c1..c_{i1}, E(b1; c_{i1+1}..c_{j1}), c.., …, c_{jm+1}..c_n)`.
    fn relation3_rhs(&self, t: &[u32], m: usize) -> Result<Element> {
        let (a, bs, cs) = (t[0], &t[1..=m], &t[m + 1..]);
        let mut out = Element::zero(self.basis(), 1);
        let mut bounds = Vec::with_capacity(2 * m);
        self.relation3_terms(a, bs, cs, 0, &mut bounds, &mut out)?;
        Ok(out)
    }

    fn relation3_terms(
        &self,
        a: u32,
        bs: &[u32],
        cs: &[u32],
        from: usize,
        bounds: &mut Vec<usize>,
        out: &mut Element,
    ) -> Result<()> {
        if bounds.len() == 2 * bs.len() {
            let mut args = Vec::new();
            let mut at = 0;
            for (s, &b) in bs.iter().enumerate() {
                let (i, j) = (bounds[2 * s], bounds[2 * s + 1]);
                args.extend(self.ones(&cs[at..i]));
                args.push(self.e(b, &cs[i..j])?);
                at = j;
            }
            args.extend(self.ones(&cs[at..]));
            if args.iter().any(Element::is_zero) {
                return Ok(());
            }
            out.add_assign(&self.e_of(&self.one(a), &args)?);
            return Ok(());
        }
        for next in from..=cs.len() {
            bounds.push(next);
            self.relation3_terms(a, bs, cs, next, bounds, out)?;
            bounds.pop();
        }
        Ok(())
    }
}

/// Homology of a bar complex through degree `cap`, with a chosen
/// cocycle-selecting map `g` from the homology basis to bar cocycles.
/// Everything is computed blockwise by degree and weight.
pub struct BarHomology {
    bar: Arc<BarComplex>,
    basis: Arc<GradedBasis>,
    blocks: Vec<Block>,
    block_of: HashMap<(i32, Weight), usize>,
    g: MultiMap,
    pullbacks: Mutex<HashMap<(usize, i32), PullbackTable>>,
}

type PullbackTable = Arc<BTreeMap<Weight, Pullback>>;

/// Homology of the words of one degree and weight.
struct Block {
    degree: i32,
    words: Vec<u32>,
    homology: Homology,
    classes: Vec<u32>,
}

impl std::fmt::Debug for BarHomology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BarHomology({:?})", self.basis.names())
    }
}

/// Computes bar homology in degrees `0..=cap`. `preferred` names classes by
/// representative cocycles; other classes are named `h<degree>_<index>` and
/// the class of `[]` is named `1`.
pub fn homology(bar: Arc<BarComplex>, preferred: &[(&str, Element)]) -> Result<BarHomology> {
    let b = Arc::clone(bar.basis());
    let cap = bar.cap();
    let mut wanted: HashMap<(i32, Weight), Vec<(&str, &Element)>> = HashMap::new();
    for (name, rep) in preferred {
        let degree = rep.degree().ok_or_else(|| {
            Error::Invalid(format!("preferred representative for `{name}` is zero or not homogeneous"))
        })?;
        let weights: BTreeSet<Weight> = rep.terms().iter().map(|t| b.tuple_weight(t)).collect();
        if weights.len() != 1 {
            return Err(Error::Invalid(format!("preferred representative for `{name}` mixes weights")));
        }
        let weight = weights.into_iter().next().unwrap_or_default();
        wanted.entry((degree, weight)).or_default().push((name, rep));
    }
    let mut blocks = Vec::new();
    let mut block_of = HashMap::new();
    let mut names: Vec<(String, i32)> = Vec::new();
    let mut class_weights: Vec<Weight> = Vec::new();
    let mut reps: Vec<Element> = Vec::new();
    for t in 0..=cap {
        let here = b.tuples_by_weight(1, t);
        let below = if t > 0 { b.tuples_by_weight(1, t - 1) } else { BTreeMap::new() };
        let above = b.tuples_by_weight(1, t + 1);
        let mut auto = 0;
        for (weight, words) in here {
            let words: Vec<u32> = words.into_iter().map(|w| w[0]).collect();
            let firsts = |m: &BTreeMap<Weight, Vec<Tuple>>| -> Vec<u32> {
                m.get(&weight).map(|ws| ws.iter().map(|w| w[0]).collect()).unwrap_or_default()
            };
            let d_in = matrix_between(&bar, &firsts(&below), &words)?;
            let d_out = matrix_between(&bar, &words, &firsts(&above))?;
            let mut h = homology_of_pair(&d_in, &d_out)?;
            let position: HashMap<u32, usize> = words.iter().enumerate().map(|(k, &w)| (w, k)).collect();
            let chosen = wanted.remove(&(t, weight.clone())).unwrap_or_default();
            if !chosen.is_empty() {
                let vs: Vec<BitVec> = chosen
                    .iter()
                    .map(|(_, rep)| BitVec::from_indices(words.len(), rep.terms().iter().map(|w| position[&w[0]])))
                    .collect();
                h = h.with_preferred(&vs)?;
            }
            let mut ids = Vec::new();
            for (k, rep) in h.class_basis().iter().enumerate() {
                let name = match chosen.get(k) {
                    Some((n, _)) => n.to_string(),
                    None if t == 0 => "1".to_string(),
                    None => {
                        auto += 1;
                        format!("h{t}_{}", auto - 1)
                    }
                };
                ids.push(names.len() as u32);
                names.push((name, t));
                class_weights.push(weight.clone());
                reps.push(Element::from_tuples(&b, 1, rep.ones().map(|k| vec![words[k]])));
            }
            block_of.insert((t, weight), blocks.len());
            blocks.push(Block { degree: t, words, homology: h, classes: ids });
        }
    }
    if let Some(((t, _), left)) = wanted.into_iter().next() {
        let name = left.first().map_or("?", |(n, _)| *n);
        return Err(Error::Window(format!("preferred class `{name}` has degree {t} outside the window")));
    }
    let basis = Arc::new(GradedBasis::new(names, cap)?.with_weights(class_weights)?);
    let mut g = MultiMap::zero(&basis, &b, 1, 1, 0);
    for (i, rep) in reps.into_iter().enumerate() {
        g.insert(vec![i as u32], rep)?;
    }
    let g = g.with_domain_cap(Some(cap));
    Ok(BarHomology { bar, basis, blocks, block_of, g, pullbacks: Mutex::new(HashMap::new()) })
}

fn matrix_between(bar: &BarComplex, from: &[u32], to: &[u32]) -> Result<BitMatrix> {
    let row: HashMap<u32, usize> = to.iter().enumerate().map(|(k, &w)| (w, k)).collect();
    let mut m = BitMatrix::zeros(to.len(), from.len());
    for (c, &w) in from.iter().enumerate() {
        for t in bar.bar_differential(w)?.terms() {
            let r = row.get(&t[0]).ok_or_else(|| Error::Window("bar differential left the window".into()))?;
            m.set(*r, c, !m.get(*r, c));
        }
    }
    Ok(m)
}

impl BarHomology {
    pub fn bar(&self) -> &Arc<BarComplex> {
        &self.bar
    }

    /// Basis of the homology, one element per class.
    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    /// Cocycle-selecting map from homology classes to bar cocycles.
    pub fn g(&self) -> &MultiMap {
        &self.g
    }

    pub fn unit_class(&self) -> u32 {
        0
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![0; (self.bar.cap() + 1).max(0) as usize];
        for block in &self.blocks {
            dims[block.degree as usize] += block.homology.rank();
        }
        dims
    }

    /// Class of a bar cocycle (arity one, any mix of degrees up to `cap`).
    pub fn class_of(&self, z: &Element) -> Result<Element> {
        let b = self.bar.basis();
        let mut out = Element::zero(&self.basis, 1);
        let mut by_block: BTreeMap<(i32, Weight), Vec<u32>> = BTreeMap::new();
        for t in z.terms() {
            by_block.entry((b.degree(t[0]), b.tuple_weight(t))).or_default().push(t[0]);
        }
        for ((t, weight), ws) in by_block {
            if t > self.bar.cap() {
                return Err(Error::Window(format!("class of a degree-{t} element above the cap")));
            }
            let block = &self.blocks[self.block_of[&(t, weight)]];
            let position: HashMap<u32, usize> = block.words.iter().enumerate().map(|(k, &w)| (w, k)).collect();
            let v = BitVec::from_indices(block.words.len(), ws.iter().map(|w| position[w]));
            let coords = block.homology.class_of(&v)?;
            for k in coords.ones() {
                out.add_tuple(vec![block.classes[k]]);
            }
        }
        Ok(out)
    }

    /// Expresses a cocycle `c` of arity `n` over the bar basis as
    /// `g^{⊗n}(class) + d_(n)(preimage)`, returning `(class, preimage)`.
    /// The preimage is the canonical one.
    pub fn pullback(&self, c: &Element, host: &AlgebraPresentation) -> Result<(Element, Element)> {
        let n = c.arity();
        let b = self.bar.basis();
        let mut class = Element::zero(&self.basis, n);
        let mut preimage = Element::zero(b, n);
        let mut by_block: BTreeMap<(i32, Weight), Element> = BTreeMap::new();
        for t in c.terms() {
            let key = (b.tuple_degree(t), b.tuple_weight(t));
            by_block.entry(key).or_insert_with(|| Element::zero(b, n)).add_tuple(t.clone());
        }
        for ((deg, weight), part) in by_block {
            let solvers = self.pullback_solvers(n, deg, host)?;
            let p = solvers.get(&weight).ok_or_else(|| Error::NotACocycle(format!("{part} has no class")))?;
            let (cl, pre) = p.solve(&part)?;
            class.add_assign(&cl);
            preimage.add_assign(&pre);
        }
        Ok((class, preimage))
    }

    fn pullback_solvers(
        &self,
        n: usize,
        degree: i32,
        host: &AlgebraPresentation,
    ) -> Result<Arc<BTreeMap<Weight, Pullback>>> {
        if let Some(p) = self.pullbacks.lock().expect("pullback cache poisoned").get(&(n, degree)) {
            return Ok(Arc::clone(p));
        }
        let p = Arc::new(Pullback::all_weights(self, host, n, degree)?);
        self.pullbacks.lock().expect("pullback cache poisoned").insert((n, degree), Arc::clone(&p));
        Ok(p)
    }

    /// Homology as a DG Hopf algebra with zero differential: products and
    /// coproducts are transported from the bar complex (perturbed product
    /// and deconcatenation) through `g` and the class maps. `host` must be
    /// the bar complex as a presentation.
    pub fn to_presentation(&self, host: &AlgebraPresentation) -> Result<AlgebraPresentation> {
        let h = &self.basis;
        let cap = h.cap();
        let mut mu = MultiMap::zero(h, h, 2, 1, 0);
        for t in h.tuples_up_to(2, cap) {
            let prod = host.mu().apply(&self.g.eval(&t[..1])?.tensor(&self.g.eval(&t[1..])?)?)?;
            mu.insert(t, self.class_of(&prod)?)?;
        }
        let delta_ba = host.coproduct()?;
        let mut delta = MultiMap::zero(h, h, 1, 2, 0);
        for x in 0..h.len() as u32 {
            let c = delta_ba.apply(&self.g.eval(&[x])?)?;
            delta.insert(vec![x], self.pullback(&c, host)?.0)?;
        }
        let d = MultiMap::zero(h, h, 1, 1, 1);
        AlgebraPresentation::from_parts(Arc::clone(h), self.unit_class(), d, mu, Some(delta), BTreeMap::new())
    }
}

/// Column basis `[g^{⊗n}(H-tuples) | d_(n)(bar tuples one degree lower)]`
/// for one arity, degree and weight.
struct Pullback {
    rows: HashMap<Tuple, usize>,
    dim: usize,
    classes: Vec<Tuple>,
    lower: Vec<Tuple>,
    solver: SpanSolver,
    h: Arc<GradedBasis>,
    b: Arc<GradedBasis>,
}

impl Pullback {
    fn all_weights(
        hom: &BarHomology,
        host: &AlgebraPresentation,
        n: usize,
        degree: i32,
    ) -> Result<BTreeMap<Weight, Pullback>> {
        let b = hom.bar.basis();
        if degree > hom.bar.cap() {
            return Err(Error::Pullback { degree, msg: format!("degree above the cap {}", hom.bar.cap()) });
        }
        let mut classes = hom.basis.tuples_by_weight(n, degree);
        let mut lower = b.tuples_by_weight(n, degree - 1);
        let mut out = BTreeMap::new();
        for (weight, rows) in b.tuples_by_weight(n, degree) {
            let classes = classes.remove(&weight).unwrap_or_default();
            let lower = lower.remove(&weight).unwrap_or_default();
            out.insert(weight, Pullback::new(hom, host, degree, rows, classes, lower)?);
        }
        if let Some(t) = classes.values().flatten().next() {
            return Err(Error::Pullback { degree, msg: format!("{} has no bar tuples", hom.basis.render_tuple(t)) });
        }
        Ok(out)
    }

    fn new(
        hom: &BarHomology,
        host: &AlgebraPresentation,
        degree: i32,
        row_tuples: Vec<Tuple>,
        classes: Vec<Tuple>,
        lower: Vec<Tuple>,
    ) -> Result<Self> {
        let b = Arc::clone(hom.bar.basis());
        let n = row_tuples.first().map_or(0, Vec::len);
        let dim = row_tuples.len();
        let rows: HashMap<Tuple, usize> = row_tuples.into_iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut solver = SpanSolver::new(dim);
        let gs: Vec<&dyn Evaluate> = vec![&hom.g; n];
        for t in &classes {
            let col = crate::graded::eval_product(&gs, t)?.to_bitvec(&rows, dim)?;
            if !solver.push(col) {
                return Err(Error::Pullback {
                    degree,
                    msg: format!("image of {} under g is dependent modulo boundaries", hom.basis.render_tuple(t)),
                });
            }
        }
        for t in &lower {
            solver.push(host.d_slots(t)?.to_bitvec(&rows, dim)?);
        }
        Ok(Self { rows, dim, classes, lower, solver, h: Arc::clone(&hom.basis), b })
    }

    fn solve(&self, c: &Element) -> Result<(Element, Element)> {
        let v = c.to_bitvec(&self.rows, self.dim)?;
        let combo = self.solver.solve(&v).ok_or_else(|| {
            Error::NotACocycle(format!("{c} is not a cocycle, or the window is too small for its class"))
        })?;
        let k = self.classes.len();
        let n = c.arity();
        let class =
            Element::from_tuples(&self.h, n, combo.iter().filter(|&&i| i < k).map(|&i| self.classes[i].clone()));
        let pre =
            Element::from_tuples(&self.b, n, combo.iter().filter(|&&i| i >= k).map(|&i| self.lower[i - k].clone()));
        Ok((class, pre))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    pub(crate) const LOOP_A: &str =
        "field 2\ncap 24\nbasis 1 0\nbasis a2 2\nbasis a3 3\nbasis b 3\nbasis a2a3 5\nunit 1\n\
                                     mu a2 a3 = a2a3\nmu a3 a2 = a2a3\nE 1 1 b ; b = a2a3\n";

    fn loop_bar(cap: i32) -> BarComplex {
        bar_basis(&parse_presentation(LOOP_A).unwrap(), cap).unwrap()
    }

    fn names(bar: &BarComplex, t: i32) -> Vec<String> {
        bar.basis().of_degree(t).iter().map(|&i| bar.basis().name(i).to_string()).collect()
    }

    #[test]
    fn word_enumeration() {
        let bar = loop_bar(4);
        assert_eq!(names(&bar, 0), ["[]"]);
        assert_eq!(names(&bar, 1), ["[a2]"]);
        assert_eq!(names(&bar, 2), ["[a3]", "[b]", "[a2|a2]"]);
        assert_eq!(names(&bar, 3), ["[a2|a3]", "[a2|b]", "[a3|a2]", "[b|a2]", "[a2|a2|a2]"]);
        let counts: Vec<usize> = (0..=5).map(|t| bar.basis().of_degree(t).len()).collect();
        assert_eq!(counts, [1, 1, 3, 5, 12, 23]);
    }

    #[test]
    fn not_one_connected() {
        let a = parse_presentation("field 2\nbasis 1 0\nbasis x 1\nunit 1\n").unwrap();
        assert!(matches!(bar_basis(&a, 3), Err(Error::NotOneConnected(_))));
        let trivial = parse_presentation("field 2\nbasis 1 0\nunit 1\n").unwrap();
        assert_eq!(bar_basis(&trivial, 3).unwrap().basis().len(), 1);
    }

    #[test]
    fn differential_examples() {
        let bar = loop_bar(4);
        let w = |s: &str| bar.basis().lookup(s).unwrap();
        assert_eq!(bar.bar_differential(w("[a2|a3]")).unwrap(), bar.parse("[a2a3]").unwrap());
        assert!(bar.d.apply(&bar.parse("[a2|a3] + [a3|a2]").unwrap()).unwrap().is_zero());
        assert!(bar.bar_differential(w("[b]")).unwrap().is_zero());
    }

    #[test]
    fn coproduct_and_products() {
        let bar = loop_bar(4);
        let w = |s: &str| bar.basis().lookup(s).unwrap();
        let c = bar.cofree_coproduct(w("[a2|a3]")).unwrap();
        assert_eq!(c.render(), "[]*[a2|a3] + [a2]*[a3] + [a2|a3]*[]");
        assert_eq!(bar.cofree_coproduct(w("[]")).unwrap().render(), "[]*[]");
        assert!(bar.shuffle_product(w("[b]"), w("[b]")).unwrap().is_zero());
        assert_eq!(bar.perturbed_product(w("[b]"), w("[b]")).unwrap(), bar.parse("[a2a3]").unwrap());
        assert_eq!(bar.shuffle_product(w("[]"), w("[a2|b]")).unwrap(), bar.parse("[a2|b]").unwrap());
    }

    #[test]
    fn homology_of_loop_bar() {
        let bar = Arc::new(loop_bar(4));
        let h = homology(Arc::clone(&bar), &[]).unwrap();
        assert_eq!(h.dims(), [1, 1, 3, 4, 9]);
        let z = bar.parse("[a2a3]").unwrap();
        assert!(h.class_of(&z).unwrap().is_zero());
    }

    #[test]
    fn hga_relations_hold_for_loop_algebra() {
        let a = parse_presentation(LOOP_A).unwrap();
        let checks = hga_relations_check(&a, 12);
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn hga_relation_catches_noncommutative_product() {
        let a =
            parse_presentation("field 2\ncap 12\nbasis 1 0\nbasis x 2\nbasis y 2\nbasis xy 4\nunit 1\nmu x y = xy\n")
                .unwrap();
        let checks = hga_relations_check(&a, 8);
        assert!(!checks[0].passed());
        assert!(checks[0].witness.contains("(x, y)") || checks[0].witness.contains("(y, x)"), "{}", checks[0].witness);
    }
}
