//! The Gerstenhaber-Schack triple complex of a DG Hopf algebra.
//!
//! A part of tridegree `(p, m, n)` is a map `H^⊗m → H^⊗n` of internal degree
//! `p`. The three differentials are
//!
//! * `∇f = d_(n) f + f d_(m)`, tridegree `(p+1, m, n)`;
//! * `∂f = λ^n(1⊗f) + f ∂_(m) + ρ^n(f⊗1)`, tridegree `(p, m+1, n)`;
//! * `δf = (1⊗f)λ_m + δ_(n) f + (f⊗1)ρ_m`, tridegree `(p, m, n+1)`;
//!
//! where `λ^n`, `ρ^n` are the module actions of `H` on `H^⊗n` through the
//! iterated coproduct and `λ_m`, `ρ_m` the coactions through the iterated
//! product. Over GF(2) all signs vanish and `D = ∇ + ∂ + δ`.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graded::{splice, Element, Evaluate, GradedBasis, MultiMap, Tuple};
use crate::presentation::AlgebraPresentation;
use crate::report::{first_mismatch, Check};

/// `(p, m, n)`: internal degree, input arity, output arity.
pub type Tridegree = (i32, usize, usize);

/// A finite sum of homogeneous parts indexed by tridegree.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GSCochain {
    parts: BTreeMap<Tridegree, MultiMap>,
}

impl GSCochain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a part; parts of equal tridegree are summed.
    pub fn add_part(&mut self, part: MultiMap) -> Result<()> {
        let key = (part.p(), part.m(), part.n());
        match self.parts.remove(&key) {
            Some(existing) => {
                let sum = existing.sum(&part)?;
                if !sum.is_zero() {
                    self.parts.insert(key, sum);
                }
            }
            None if !part.is_zero() => {
                self.parts.insert(key, part);
            }
            None => {}
        }
        Ok(())
    }

    pub fn part(&self, p: i32, m: usize, n: usize) -> Option<&MultiMap> {
        self.parts.get(&(p, m, n))
    }

    pub fn parts(&self) -> &BTreeMap<Tridegree, MultiMap> {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(MultiMap::is_zero)
    }

    /// Total degree `r = p + m + n - 1` if all parts agree.
    pub fn total_degree(&self) -> Option<i32> {
        let mut degrees = self.parts.keys().map(|&(p, m, n)| p + (m + n) as i32 - 1);
        let first = degrees.next()?;
        degrees.all(|r| r == first).then_some(first)
    }

    pub fn sum(&self, other: &GSCochain) -> Result<GSCochain> {
        let mut out = self.clone();
        for part in other.parts.values() {
            out.add_part(part.clone())?;
        }
        Ok(out)
    }

    /// Renders in the cochain grammar, `omega <n> <m> : <inputs> -> <value>`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for part in self.parts.values() {
            out.push_str(&render_part("omega", part));
        }
        out
    }
}

/// Renders a map as `<keyword> <n> <m> : <inputs> -> <value>` lines.
pub fn render_part(keyword: &str, f: &MultiMap) -> String {
    let mut out = String::new();
    for (k, v) in f.table() {
        let inputs: Vec<&str> = k.iter().map(|&i| f.source().name(i)).collect();
        out.push_str(&format!("{keyword} {} {} : {} -> {}\n", f.n(), f.m(), inputs.join(" "), v));
    }
    out
}

/// `λ^n(x ⊗ y)`: slotwise products with the iterated coproduct of `x`.
pub fn left_module(host: &AlgebraPresentation, x: u32, y: &[u32]) -> Result<Element> {
    module_action(host, x, y, true)
}

/// `ρ^n(y ⊗ x)`.
pub fn right_module(host: &AlgebraPresentation, y: &[u32], x: u32) -> Result<Element> {
    module_action(host, x, y, false)
}

fn module_action(host: &AlgebraPresentation, x: u32, y: &[u32], left: bool) -> Result<Element> {
    let n = y.len();
    let basis = host.basis();
    let mut out = Element::zero(basis, n);
    for split in cached_coproduct_iter(host, x, n)?.terms() {
        let mut acc = Element::one(basis);
        for i in 0..n {
            let pair = if left { [split[i], y[i]] } else { [y[i], split[i]] };
            let prod = host.mu().eval(&pair)?;
            if prod.is_zero() {
                acc = Element::zero(basis, 0);
                break;
            }
            acc = acc.tensor(&prod)?;
        }
        if !acc.is_zero() {
            out.add_assign(&acc);
        }
    }
    Ok(out)
}

/// `λ_m(x1..xm) = Σ x1'⋯xm' ⊗ x1''⊗…⊗xm''`; `λ_1 = Δ`.
pub fn left_comodule(host: &AlgebraPresentation, t: &[u32]) -> Result<Element> {
    comodule_action(host, t, true)
}

/// `ρ_m(x1..xm) = Σ x1'⊗…⊗xm' ⊗ x1''⋯xm''`; `ρ_1 = Δ`.
pub fn right_comodule(host: &AlgebraPresentation, t: &[u32]) -> Result<Element> {
    comodule_action(host, t, false)
}

fn comodule_action(host: &AlgebraPresentation, t: &[u32], left: bool) -> Result<Element> {
    let delta = host.coproduct()?;
    let splits: Vec<Vec<Tuple>> =
        t.iter().map(|&x| Ok(delta.eval(&[x])?.terms().iter().cloned().collect())).collect::<Result<_>>()?;
    let mut out = Element::zero(host.basis(), t.len() + 1);
    let mut multiplied = Vec::with_capacity(t.len());
    let mut kept = Vec::with_capacity(t.len());
    comodule_terms(host, &splits, left, &mut multiplied, &mut kept, &mut out)?;
    Ok(out)
}

fn comodule_terms(
    host: &AlgebraPresentation,
    splits: &[Vec<Tuple>],
    left: bool,
    multiplied: &mut Vec<u32>,
    kept: &mut Vec<u32>,
    out: &mut Element,
) -> Result<()> {
    let s = multiplied.len();
    if s == splits.len() {
        let prod = host.product_all(multiplied)?;
        let term = if left { splice(&[], &prod, kept) } else { splice(kept, &prod, &[]) };
        out.add_assign(&term);
        return Ok(());
    }
    for pair in &splits[s] {
        let (m, k) = if left { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        multiplied.push(m);
        kept.push(k);
        comodule_terms(host, splits, left, multiplied, kept, out)?;
        multiplied.pop();
        kept.pop();
    }
    Ok(())
}

fn check_same_basis(host: &AlgebraPresentation, f: &dyn Evaluate) -> Result<()> {
    if !f.source().same(host.basis()) || !f.target().same(host.basis()) {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Which of the three differentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Differential {
    Nabla,
    Partial,
    Delta,
}

impl Differential {
    /// Tridegree of the image of a part of tridegree `(p, m, n)`.
    pub fn target(self, (p, m, n): Tridegree) -> Tridegree {
        match self {
            Differential::Nabla => (p + 1, m, n),
            Differential::Partial => (p, m + 1, n),
            Differential::Delta => (p, m, n + 1),
        }
    }

    /// Tridegree of the part that lands in `(p, m, n)`, if there is one.
    pub fn source(self, (p, m, n): Tridegree) -> Option<Tridegree> {
        match self {
            Differential::Nabla => Some((p - 1, m, n)),
            Differential::Partial if m > 1 => Some((p, m - 1, n)),
            Differential::Delta if n > 1 => Some((p, m, n - 1)),
            _ => None,
        }
    }
}

/// Linear operation applied to a value `f(P)` inside a differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Post {
    Identity,
    /// `y ↦ λ^n(x ⊗ y)`.
    LeftAction(u32),
    /// `y ↦ ρ^n(y ⊗ x)`.
    RightAction(u32),
    /// `y ↦ prefix ⊗ y`.
    Prefix(Tuple),
    /// `y ↦ y ⊗ suffix`.
    Suffix(Tuple),
    /// `y ↦ Σ 1⊗…⊗Δ⊗…⊗1 (y)`.
    DeltaSlots,
    /// `y ↦ Σ 1⊗…⊗d⊗…⊗1 (y)`.
    DSlots,
}

impl Post {
    pub fn apply(&self, host: &AlgebraPresentation, y: &[u32]) -> Result<Element> {
        match self {
            Post::Identity => Ok(Element::from_tuple(host.basis(), y.to_vec())),
            Post::LeftAction(x) => left_module(host, *x, y),
            Post::RightAction(x) => right_module(host, y, *x),
            Post::Prefix(pre) => Ok(Element::from_tuple(host.basis(), [pre.as_slice(), y].concat())),
            Post::Suffix(suf) => Ok(Element::from_tuple(host.basis(), [y, suf.as_slice()].concat())),
            Post::DeltaSlots => host.delta_slots(y),
            Post::DSlots => host.d_slots(y),
        }
    }
}

/// The value of a differential of `f` at `t` is `Σ post(f(P))` over the
/// returned pairs `(P, post)`; repeated pairs cancel.
pub fn dependencies(host: &AlgebraPresentation, which: Differential, t: &[u32]) -> Result<Arc<Vec<(Tuple, Post)>>> {
    let cache = host.dependency_cache();
    let key = (which, t.to_vec());
    if let Some(hit) = cache.0.lock().expect("dependency cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let deps = Arc::new(compute_dependencies(host, which, t)?);
    cache.0.lock().expect("dependency cache poisoned").insert(key, Arc::clone(&deps));
    Ok(deps)
}

type Dependencies = Arc<Vec<(Tuple, Post)>>;

/// Per-host memo for [`dependencies`].
#[derive(Debug, Default)]
pub struct DependencyCache(
    Mutex<HashMap<(Differential, Tuple), Dependencies>>,
    Mutex<HashMap<(u32, usize), Arc<Element>>>,
);

fn cached_coproduct_iter(host: &AlgebraPresentation, x: u32, n: usize) -> Result<Arc<Element>> {
    let cache = &host.dependency_cache().1;
    if let Some(hit) = cache.lock().expect("coproduct cache poisoned").get(&(x, n)) {
        return Ok(Arc::clone(hit));
    }
    let value = Arc::new(host.coproduct_iter(x, n)?);
    cache.lock().expect("coproduct cache poisoned").insert((x, n), Arc::clone(&value));
    Ok(value)
}

fn compute_dependencies(host: &AlgebraPresentation, which: Differential, t: &[u32]) -> Result<Vec<(Tuple, Post)>> {
    let mut out = Vec::new();
    match which {
        Differential::Nabla => {
            out.push((t.to_vec(), Post::DSlots));
            for u in host.d_slots(t)?.terms() {
                out.push((u.clone(), Post::Identity));
            }
        }
        Differential::Partial => {
            let m = t.len() - 1;
            out.push((t[1..].to_vec(), Post::LeftAction(t[0])));
            for u in host.mu_slots(t)?.terms() {
                out.push((u.clone(), Post::Identity));
            }
            out.push((t[..m].to_vec(), Post::RightAction(t[m])));
        }
        Differential::Delta => {
            for c in left_comodule(host, t)?.terms() {
                out.push((c[1..].to_vec(), Post::Prefix(c[..1].to_vec())));
            }
            out.push((t.to_vec(), Post::DeltaSlots));
            for c in right_comodule(host, t)?.terms() {
                let m = c.len() - 1;
                out.push((c[..m].to_vec(), Post::Suffix(c[m..].to_vec())));
            }
        }
    }
    Ok(out)
}

/// A differential applied to a part, evaluated lazily on tuples.
pub struct Derived<'a> {
    host: &'a AlgebraPresentation,
    f: &'a dyn Evaluate,
    which: Differential,
}

impl<'a> Derived<'a> {
    pub fn new(host: &'a AlgebraPresentation, f: &'a dyn Evaluate, which: Differential) -> Result<Self> {
        check_same_basis(host, f)?;
        if which == Differential::Delta {
            host.coproduct()?;
        }
        Ok(Self { host, f, which })
    }
}

impl Evaluate for Derived<'_> {
    fn source(&self) -> &Arc<GradedBasis> {
        self.host.basis()
    }
    fn target(&self) -> &Arc<GradedBasis> {
        self.host.basis()
    }
    fn arity_in(&self) -> usize {
        self.f.arity_in() + usize::from(self.which == Differential::Partial)
    }
    fn arity_out(&self) -> usize {
        self.f.arity_out() + usize::from(self.which == Differential::Delta)
    }
    fn degree(&self) -> i32 {
        self.f.degree() + i32::from(self.which == Differential::Nabla)
    }
    fn eval(&self, t: &[u32]) -> Result<Element> {
        if t.len() != self.arity_in() {
            return Err(Error::Arity { expected: self.arity_in(), found: t.len() });
        }
        let mut out = Element::zero(self.host.basis(), self.arity_out());
        for (input, post) in dependencies(self.host, self.which, t)?.iter() {
            for y in self.f.eval(input)?.terms() {
                out.add_assign(&post.apply(self.host, y)?);
            }
        }
        Ok(out)
    }
}

/// `∇f`, tabulated on inputs of total degree at most `window`.
pub fn nabla(host: &AlgebraPresentation, f: &MultiMap, window: i32) -> Result<MultiMap> {
    MultiMap::materialize(&Derived::new(host, f, Differential::Nabla)?, window)
}

/// `∂f`, tabulated on inputs of total degree at most `window`.
pub fn gs_partial(host: &AlgebraPresentation, f: &MultiMap, window: i32) -> Result<MultiMap> {
    MultiMap::materialize(&Derived::new(host, f, Differential::Partial)?, window)
}

/// `δf`, tabulated on inputs of total degree at most `window`.
pub fn gs_delta(host: &AlgebraPresentation, f: &MultiMap, window: i32) -> Result<MultiMap> {
    MultiMap::materialize(&Derived::new(host, f, Differential::Delta)?, window)
}

/// `D(c) = ∇c + ∂c + δc`, each part tabulated up to `window`. The `∇` terms
/// are skipped when the host differential is zero.
pub fn total_d(host: &AlgebraPresentation, c: &GSCochain, window: i32) -> Result<GSCochain> {
    let mut out = GSCochain::new();
    for f in c.parts.values() {
        if !host.has_zero_differential() {
            out.add_part(nabla(host, f, window)?)?;
        }
        out.add_part(gs_partial(host, f, window)?)?;
        out.add_part(gs_delta(host, f, window)?)?;
    }
    Ok(out)
}

/// Tridegrees `(p, m, n)` with `m, n ≥ 1`, `m + n ≤ max_arity` and `p` in
/// `internal`.
pub fn tridegrees_up_to(max_arity: usize, internal: RangeInclusive<i32>) -> Vec<Tridegree> {
    let mut out = Vec::new();
    for p in internal {
        for m in 1..max_arity {
            for n in 1..=max_arity - m {
                out.push((p, m, n));
            }
        }
    }
    out
}

fn window_after(host: &AlgebraPresentation, window: i32) -> i32 {
    window - i32::from(!host.has_zero_differential())
}

/// `D(D(c)) = 0` on `samples` seeded random cochains with one to three parts
/// drawn from `tridegrees`, inputs of degree at most `window`.
pub fn d_squared_check(
    host: &AlgebraPresentation,
    tridegrees: &[Tridegree],
    window: i32,
    samples: usize,
    seed: u64,
) -> Check {
    let name = format!("D(D(c)) = 0 on {samples} random cochains");
    let outcome = (|| -> Result<Option<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (once, twice) = (window_after(host, window), window_after(host, window_after(host, window)));
        for sample in 0..samples {
            let k = rng.gen_range(1..=3usize).min(tridegrees.len());
            let picked: Vec<Tridegree> = tridegrees.choose_multiple(&mut rng, k).copied().collect();
            let c = random_cochain(host, &picked, window, 0.3, &mut rng)?;
            let ddc = total_d(host, &total_d(host, &c, once)?, twice)?;
            if let Some((&(p, m, n), f)) = ddc.parts.iter().find(|(_, f)| !f.is_zero()) {
                let (k, v) = f.table().iter().next().expect("nonzero part has an entry");
                return Ok(Some(format!(
                    "sample {sample}: part ({p},{m},{n}) at {}: {v}",
                    render_tuple(host.basis(), k)
                )));
            }
        }
        Ok(None)
    })();
    Check::from_outcome(name, outcome)
}

/// `∂δ = δ∂`, and `∇∂ = ∂∇`, `∇δ = δ∇` when the host differential is
/// nonzero, on every part of `c`.
pub fn commutation_checks(host: &AlgebraPresentation, c: &GSCochain, window: i32) -> Vec<Check> {
    use Differential::{Delta, Nabla, Partial};
    let mut pairs = vec![(Partial, Delta, "∂δ = δ∂")];
    if !host.has_zero_differential() {
        pairs.push((Nabla, Partial, "∇∂ = ∂∇"));
        pairs.push((Nabla, Delta, "∇δ = δ∇"));
    }
    let apply = |which: Differential, f: &MultiMap, w: i32| -> Result<MultiMap> {
        MultiMap::materialize(&Derived::new(host, f, which)?, w)
    };
    let mut checks = Vec::new();
    for (first, second, name) in pairs {
        let outcome = (|| -> Result<Option<String>> {
            let inner = window_after(host, window);
            let outer = window_after(host, inner);
            for f in c.parts.values() {
                let a = apply(first, &apply(second, f, inner)?, outer)?;
                let b = apply(second, &apply(first, f, inner)?, outer)?;
                if let Some(w) = compare_maps(&a, &b, outer)? {
                    return Ok(Some(format!("part ({},{},{}): {w}", f.p(), f.m(), f.n())));
                }
            }
            Ok(None)
        })();
        checks.push(Check::from_outcome(name, outcome));
    }
    checks
}

fn render_tuple(b: &GradedBasis, t: &Tuple) -> String {
    t.iter().map(|&i| b.name(i)).collect::<Vec<_>>().join(" (x) ")
}

/// Cocycle test for `ω^{1,3} + ω^{2,2} + ω^{3,1}`, both componentwise and as
/// a single `D(ω) = 0` computation, on inputs of degree at most `window`.
/// The last check records whether the two computations agree.
pub fn is_gs_2cocycle(
    host: &AlgebraPresentation,
    w13: &MultiMap,
    w22: &MultiMap,
    w31: &MultiMap,
    window: i32,
) -> Result<Vec<Check>> {
    let b = host.basis();
    for (f, m, n) in [(w13, 3, 1), (w22, 2, 2), (w31, 1, 3)] {
        if (f.m(), f.n()) != (m, n) {
            return Err(Error::Arity { expected: m, found: f.m() });
        }
    }
    let p = w22.p();
    if w13.p() != p || w31.p() != p {
        return Err(Error::Degree("the three parts must share one internal degree".into()));
    }
    let render = |t: &Tuple| render_tuple(b, t);
    fn part<'a>(host: &'a AlgebraPresentation, f: &'a MultiMap, which: Differential) -> Result<Derived<'a>> {
        Derived::new(host, f, which)
    }
    use Differential::{Delta, Nabla, Partial};
    let (p13, d13, p22, d22, p31, d31) = (
        part(host, w13, Partial)?,
        part(host, w13, Delta)?,
        part(host, w22, Partial)?,
        part(host, w22, Delta)?,
        part(host, w31, Partial)?,
        part(host, w31, Delta)?,
    );
    let zero = |n: usize| move |_: &Tuple| Ok(Element::zero(b, n));
    let mut checks = vec![
        Check::equality("partial w13 = 0", b.tuples_up_to(4, window), render, |t| p13.eval(t), zero(1)),
        Check::equality("partial w22 = delta w13", b.tuples_up_to(3, window), render, |t| p22.eval(t), |t| d13.eval(t)),
        Check::equality("partial w31 = delta w22", b.tuples_up_to(2, window), render, |t| p31.eval(t), |t| d22.eval(t)),
        Check::equality("delta w31 = 0", b.tuples_up_to(1, window), render, |t| d31.eval(t), zero(4)),
    ];
    if !host.has_zero_differential() {
        let w = window - 1;
        for (f, m, n, name) in
            [(w13, 3, 1, "nabla w13 = 0"), (w22, 2, 2, "nabla w22 = 0"), (w31, 1, 3, "nabla w31 = 0")]
        {
            let nf = part(host, f, Nabla)?;
            checks.push(Check::equality(name, b.tuples_up_to(m, w), render, |t| nf.eval(t), zero(n)));
        }
    }
    let mut omega = GSCochain::new();
    for f in [w13, w22, w31] {
        omega.add_part(f.clone())?;
    }
    let single = total_d_is_zero(host, &omega, window);
    let components_pass = checks.iter().all(Check::passed);
    let single_pass = matches!(single, Ok(None));
    checks.push(Check::from_outcome("D(omega) = 0", single));
    checks.push(if components_pass == single_pass {
        Check::pass("componentwise and total tests agree", "")
    } else {
        Check::fail("componentwise and total tests agree", "the two computations disagree")
    });
    Ok(checks)
}

/// [`is_gs_2cocycle`] on the arity-4 parts of a cochain; missing parts are
/// zero. Every part must have total arity 4 and one shared internal degree.
pub fn cocycle_checks(host: &AlgebraPresentation, omega: &GSCochain, window: i32) -> Result<Vec<Check>> {
    let b = host.basis();
    let mut p = None;
    for &(q, m, n) in omega.parts.keys() {
        if m + n != 4 {
            return Err(Error::Invalid(format!("part ({q},{m},{n}) is not of total arity 4")));
        }
        if p.is_some_and(|p| p != q) {
            return Err(Error::Degree("the parts must share one internal degree".into()));
        }
        p = Some(q);
    }
    let p = p.unwrap_or(-1);
    let get = |m: usize, n: usize| omega.part(p, m, n).cloned().unwrap_or_else(|| MultiMap::zero(b, b, m, n, p));
    is_gs_2cocycle(host, &get(3, 1), &get(2, 2), &get(1, 3), window)
}

/// `Ok(None)` when every part of `D(c)` vanishes on inputs up to `window`.
fn total_d_is_zero(host: &AlgebraPresentation, c: &GSCochain, window: i32) -> Result<Option<String>> {
    let nabla_window = if host.has_zero_differential() { window } else { window - 1 };
    let dc = total_d(host, c, nabla_window)?;
    Ok(dc.parts.iter().find(|(_, f)| !f.is_zero()).map(|(&(p, m, n), f)| {
        let (k, v) = f.table().iter().next().expect("nonzero part has an entry");
        format!("D(omega) part ({p},{m},{n}) at {}: {}", render_tuple(host.basis(), k), v)
    }))
}

/// Parses `omega <n> <m> : <names> -> <element>` lines. The internal degree
/// of each line is read off the degrees (GS 2-cochain degree `3 - m - n` for
/// zero values); omitted entries are zero.
pub fn parse_cochain(text: &str, host: &AlgebraPresentation) -> Result<GSCochain> {
    let b = host.basis();
    let mut parts: BTreeMap<Tridegree, MultiMap> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let (head, rest) = body.split_once(':').ok_or_else(|| err("expected `omega <n> <m> : ...`".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 3 || head[0] != "omega" {
            return Err(err("expected `omega <n> <m> : <names> -> <element>`".into()));
        }
        let n: usize = head[1].parse().map_err(|_| err(format!("bad output arity `{}`", head[1])))?;
        let m: usize = head[2].parse().map_err(|_| err(format!("bad input arity `{}`", head[2])))?;
        if n == 0 || m == 0 {
            return Err(err("arities must be positive".into()));
        }
        let (inputs, value) = rest.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
        let tuple: Tuple =
            inputs.split_whitespace().map(|s| b.lookup(s)).collect::<Result<_>>().map_err(|e| err(e.to_string()))?;
        if tuple.len() != m {
            return Err(err(format!("expected {m} input names, found {}", tuple.len())));
        }
        let value = Element::parse(b, value, Some(n)).map_err(|e| err(e.to_string()))?;
        let p = match value.degree() {
            Some(out) => out - b.tuple_degree(&tuple),
            None if value.is_zero() => 3 - (m + n) as i32,
            None => return Err(err("inhomogeneous value".into())),
        };
        let part = parts.entry((p, m, n)).or_insert_with(|| MultiMap::zero(b, b, m, n, p));
        if part.table().contains_key(&tuple) {
            return Err(err("duplicate entry".into()));
        }
        part.insert(tuple, value).map_err(|e| err(e.to_string()))?;
    }
    let mut out = GSCochain::new();
    for part in parts.into_values() {
        out.add_part(part)?;
    }
    Ok(out)
}

/// A pseudorandom cochain: for each chosen tridegree, every input tuple of
/// degree at most `window` gets, with probability `density`, a sum of up to
/// three random output tuples of the right degree.
pub fn random_cochain<R: Rng>(
    host: &AlgebraPresentation,
    tridegrees: &[Tridegree],
    window: i32,
    density: f64,
    rng: &mut R,
) -> Result<GSCochain> {
    let b = host.basis();
    let mut out = GSCochain::new();
    for &(p, m, n) in tridegrees {
        let mut f = MultiMap::zero(b, b, m, n, p);
        for t in b.tuples_up_to(m, window) {
            if !rng.gen_bool(density) {
                continue;
            }
            let targets = b.tuples_of_degree(n, b.tuple_degree(&t) + p);
            if targets.is_empty() {
                continue;
            }
            let k = rng.gen_range(1..=3usize);
            let picked: Vec<Tuple> = (0..k).filter_map(|_| targets.choose(rng).cloned()).collect();
            f.insert(t, Element::from_tuples(b, n, picked))?;
        }
        out.add_part(f.with_domain_cap(Some(window)))?;
    }
    Ok(out)
}

/// First mismatch between two evaluators on all tuples up to `window`.
pub fn compare_maps(a: &dyn Evaluate, b: &dyn Evaluate, window: i32) -> Result<Option<String>> {
    let basis = a.source();
    first_mismatch(basis.tuples_up_to(a.arity_in(), window), |t| render_tuple(basis, t), |t| a.eval(t), |t| b.eval(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    /// Primitively generated on `x` (degree 2) and `z` (degree 3), truncated
    /// above degree 5.
    fn small_host() -> AlgebraPresentation {
        let h = parse_presentation(
            "field 2\ncap 5\nbasis 1 0\nbasis x 2\nbasis y 4\nbasis z 3\nbasis w 5\nunit 1\n\
             mu x x = y\nmu x z = w\nmu z x = w\n\
             delta x = 1*x + x*1\ndelta y = 1*y + y*1\ndelta z = 1*z + z*1\n\
             delta w = 1*w + x*z + z*x + w*1\n",
        )
        .unwrap();
        assert!(h.validate_dgha().iter().all(Check::passed));
        h
    }

    #[test]
    fn actions_in_arity_one_are_the_structure_maps() {
        let h = small_host();
        let b = h.basis();
        let x = b.lookup("x").unwrap();
        assert_eq!(left_comodule(&h, &[x]).unwrap(), h.delta().unwrap().eval(&[x]).unwrap());
        assert_eq!(right_comodule(&h, &[x]).unwrap(), h.delta().unwrap().eval(&[x]).unwrap());
        assert_eq!(left_module(&h, x, &[x]).unwrap(), h.mu().eval(&[x, x]).unwrap());
        assert_eq!(right_module(&h, &[x], x).unwrap(), h.mu().eval(&[x, x]).unwrap());
    }

    #[test]
    fn unit_collapses_actions() {
        let h = small_host();
        let b = h.basis();
        let (one, x, z) = (h.unit(), b.lookup("x").unwrap(), b.lookup("z").unwrap());
        assert_eq!(left_comodule(&h, &[one, one]).unwrap(), Element::from_tuple(b, vec![one, one, one]));
        assert_eq!(left_module(&h, one, &[x, z]).unwrap(), Element::from_tuple(b, vec![x, z]));
        let two = left_comodule(&h, &[x, x]).unwrap();
        let expected = Element::parse(b, "1*x*x + x*1*x + x*x*1 + y*1*1", None).unwrap();
        assert_eq!(two, expected);
    }

    #[test]
    fn differentials_of_zero() {
        let h = small_host();
        let b = h.basis();
        let f = MultiMap::zero(b, b, 2, 1, -1);
        assert!(gs_partial(&h, &f, 5).unwrap().is_zero());
        assert!(gs_delta(&h, &f, 5).unwrap().is_zero());
        assert!(nabla(&h, &f, 4).unwrap().is_zero());
    }

    #[test]
    fn parse_cochain_examples() {
        let h = small_host();
        assert!(parse_cochain("", &h).unwrap().is_zero());
        let c = parse_cochain("# comment\nomega 2 2 : x x -> 1*z + x*x\n", &h);
        assert!(matches!(c, Err(Error::Parse { line: 2, .. })));
        let c = parse_cochain("omega 1 2 : x x -> z\n", &h).unwrap();
        assert_eq!(c.part(-1, 2, 1).unwrap().eval(&[1, 1]).unwrap().render(), "z");
        assert!(matches!(parse_cochain("omega 1 2 : x -> z\n", &h), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn d_squared_vanishes_on_random_cochains() {
        use rand::SeedableRng;
        let h = small_host();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let c = random_cochain(&h, &[(-1, 2, 1), (-1, 1, 2), (0, 1, 1)], 5, 0.5, &mut rng).unwrap();
            let dc = total_d(&h, &c, 5).unwrap();
            let ddc = total_d(&h, &dc, 5).unwrap();
            assert!(ddc.is_zero(), "{}", ddc.render());
        }
    }
}
