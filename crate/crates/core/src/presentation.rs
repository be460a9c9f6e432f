//! Finitely presented DG (Hopf) algebras: parsing, axiom checks and the
//! order-4 homotopy relations.
//!
//! A presentation file is line oriented:
//!
//! ```text
//! field 2
//! cap 8
//! basis one 0
//! basis x 2
//! unit one
//! d x = 0
//! mu x x = 0
//! delta x = one*x + x*one
//! E 1 1 x ; x = 0
//! ```
//!
//! Omitted `d`, `mu`, `E` lines are zero except for the unit laws, which are
//! implied. If the file has at least one `delta` line, omitted coproducts are
//! `1⊗1` on the unit and primitive elsewhere; without any `delta` line the
//! presentation is a plain DG algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{splice, Element, Evaluate, GradedBasis, MultiMap, Tuple, Weight};
use crate::gs::DependencyCache;
use crate::report::Check;
use crate::weights::weight_grading;

/// Structure constants of a DG (Hopf) algebra over GF(2).
#[derive(Clone, Debug)]
pub struct AlgebraPresentation {
    basis: Arc<GradedBasis>,
    unit: u32,
    d: MultiMap,
    mu: MultiMap,
    delta: Option<MultiMap>,
    e: BTreeMap<usize, MultiMap>,
    dependencies: Arc<DependencyCache>,
}

impl AlgebraPresentation {
    /// Assembles a presentation from its tables. Domain windows are set from
    /// the basis cap: `d` up to `cap - 1`, `mu` and `delta` up to `cap`,
    /// `E_{1,q}` up to `cap + q`.
    pub fn from_parts(
        basis: Arc<GradedBasis>,
        unit: u32,
        d: MultiMap,
        mu: MultiMap,
        delta: Option<MultiMap>,
        e: BTreeMap<usize, MultiMap>,
    ) -> Result<Self> {
        if basis.degree(unit) != 0 {
            return Err(Error::Degree(format!("unit `{}` must have degree 0", basis.name(unit))));
        }
        let cap = basis.cap();
        let shape = |f: &MultiMap, m: usize, n: usize, p: i32, what: &str| -> Result<()> {
            if !f.source().same(&basis) || !f.target().same(&basis) {
                return Err(Error::BasisMismatch);
            }
            if (f.m(), f.n(), f.p()) != (m, n, p) {
                return Err(Error::Invalid(format!(
                    "{what} must have shape ({m},{n},{p}), found ({},{},{})",
                    f.m(),
                    f.n(),
                    f.p()
                )));
            }
            Ok(())
        };
        shape(&d, 1, 1, 1, "d")?;
        shape(&mu, 2, 1, 0, "mu")?;
        if let Some(delta) = &delta {
            shape(delta, 1, 2, 0, "delta")?;
        }
        for (&q, f) in &e {
            if q == 0 {
                return Err(Error::Invalid("E_{1,0} is the identity and cannot be given".into()));
            }
            shape(f, q + 1, 1, -(q as i32), &format!("E_{{1,{q}}}"))?;
        }
        Ok(Self {
            d: d.with_domain_cap(Some(cap - 1)),
            mu: mu.with_domain_cap(Some(cap)),
            delta: delta.map(|f| f.with_domain_cap(Some(cap))),
            e: e.into_iter().map(|(q, f)| (q, f.with_domain_cap(Some(cap + q as i32)))).collect(),
            basis,
            unit,
            dependencies: Arc::default(),
        })
    }

    /// The same presentation over a basis carrying `weights`.
    pub fn with_weights(&self, weights: Vec<Weight>) -> Result<Self> {
        let b = Arc::new(self.basis.reweighted(weights)?);
        Ok(Self {
            unit: self.unit,
            d: self.d.rebased(&b, &b),
            mu: self.mu.rebased(&b, &b),
            delta: self.delta.as_ref().map(|f| f.rebased(&b, &b)),
            e: self.e.iter().map(|(&q, f)| (q, f.rebased(&b, &b))).collect(),
            basis: b,
            dependencies: Arc::default(),
        })
    }

    /// Memo of the cochain-independent parts of the GS differentials.
    pub(crate) fn dependency_cache(&self) -> &DependencyCache {
        &self.dependencies
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn unit(&self) -> u32 {
        self.unit
    }

    pub fn cap(&self) -> i32 {
        self.basis.cap()
    }

    pub fn d(&self) -> &MultiMap {
        &self.d
    }

    pub fn mu(&self) -> &MultiMap {
        &self.mu
    }

    pub fn delta(&self) -> Option<&MultiMap> {
        self.delta.as_ref()
    }

    /// The coproduct, or an error for a plain DG algebra.
    pub fn coproduct(&self) -> Result<&MultiMap> {
        self.delta.as_ref().ok_or_else(|| Error::Invalid("the presentation has no coproduct".into()))
    }

    /// `E_{1,q}` for `q ≥ 1`, if present.
    pub fn e(&self, q: usize) -> Option<&MultiMap> {
        self.e.get(&q)
    }

    pub fn e_family(&self) -> &BTreeMap<usize, MultiMap> {
        &self.e
    }

    pub fn has_zero_differential(&self) -> bool {
        self.d.is_zero()
    }

    /// Largest input degree at which a computation raising degrees by
    /// `shift` beyond the input stays inside the cap.
    pub fn safe_window(&self, shift: i32) -> i32 {
        self.cap() - shift
    }

    /// Counit: the coefficient of the unit.
    pub fn counit(&self, x: u32) -> bool {
        x == self.unit
    }

    /// `d` applied to each slot in turn: `Σ 1⊗…⊗d⊗…⊗1`.
    pub fn d_slots(&self, tuple: &[u32]) -> Result<Element> {
        let mut out = Element::zero(&self.basis, tuple.len());
        for s in 0..tuple.len() {
            let dx = self.d.eval(&tuple[s..=s])?;
            out.add_assign(&splice(&tuple[..s], &dx, &tuple[s + 1..]));
        }
        Ok(out)
    }

    /// Products of adjacent slots: `Σ 1⊗…⊗μ⊗…⊗1`.
    pub fn mu_slots(&self, tuple: &[u32]) -> Result<Element> {
        let mut out = Element::zero(&self.basis, tuple.len().saturating_sub(1));
        for s in 0..tuple.len().saturating_sub(1) {
            let xy = self.mu.eval(&tuple[s..s + 2])?;
            out.add_assign(&splice(&tuple[..s], &xy, &tuple[s + 2..]));
        }
        Ok(out)
    }

    /// Coproduct on each slot in turn: `Σ 1⊗…⊗Δ⊗…⊗1`.
    pub fn delta_slots(&self, tuple: &[u32]) -> Result<Element> {
        let delta = self.coproduct()?;
        let mut out = Element::zero(&self.basis, tuple.len() + 1);
        for s in 0..tuple.len() {
            let dx = delta.eval(&tuple[s..=s])?;
            out.add_assign(&splice(&tuple[..s], &dx, &tuple[s + 1..]));
        }
        Ok(out)
    }

    /// Linear extension of [`Self::d_slots`].
    pub fn d_slots_of(&self, e: &Element) -> Result<Element> {
        extend(e, e.arity(), |t| self.d_slots(t))
    }

    pub fn mu_slots_of(&self, e: &Element) -> Result<Element> {
        extend(e, e.arity().saturating_sub(1), |t| self.mu_slots(t))
    }

    pub fn delta_slots_of(&self, e: &Element) -> Result<Element> {
        extend(e, e.arity() + 1, |t| self.delta_slots(t))
    }

    /// Product of all slots, left to right; the empty product is the unit.
    pub fn product_all(&self, tuple: &[u32]) -> Result<Element> {
        let mut acc = Element::from_tuple(&self.basis, vec![self.unit]);
        for &x in tuple {
            let mut next = Element::zero(&self.basis, 1);
            for t in acc.terms() {
                next.add_assign(&self.mu.eval(&[t[0], x])?);
            }
            acc = next;
            if acc.is_zero() {
                break;
            }
        }
        Ok(acc)
    }

    /// Iterated coproduct `x ↦ Σ x(1)⊗…⊗x(k)` for `k ≥ 1`.
    pub fn coproduct_iter(&self, x: u32, k: usize) -> Result<Element> {
        assert!(k >= 1, "iterated coproduct needs at least one output");
        let delta = self.coproduct()?;
        let mut acc = Element::from_tuple(&self.basis, vec![x]);
        for _ in 1..k {
            let mut next = Element::zero(&self.basis, acc.arity() + 1);
            for t in acc.terms() {
                next.add_assign(&splice(&[], &delta.eval(&t[..1])?, &t[1..]));
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Hom differential of a map between tensor powers of this algebra:
    /// `∇f(t) = d_(n) f(t) + f(d_(m) t)`.
    pub fn nabla_at(&self, f: &dyn Evaluate, tuple: &[u32]) -> Result<Element> {
        let mut out = self.d_slots_of(&f.eval(tuple)?)?;
        out.add_assign(&f.apply(&self.d_slots(tuple)?)?);
        Ok(out)
    }

    fn tuples(&self, arity: usize, window: i32) -> Vec<Tuple> {
        self.basis.tuples_up_to(arity, window)
    }

    fn render(&self, t: &Tuple) -> String {
        format!("({})", t.iter().map(|&i| self.basis.name(i)).collect::<Vec<_>>().join(", "))
    }

    fn one(&self, x: u32) -> Element {
        Element::from_tuple(&self.basis, vec![x])
    }

    /// Checks every order-≤3 axiom exhaustively on the basis tuples that fit
    /// the cap: `d² = 0`, the unit laws, derivation, associativity and, when a
    /// coproduct is present, counit laws, coderivation, coassociativity and
    /// Hopf compatibility.
    pub fn validate_dgha(&self) -> Vec<Check> {
        let render = |t: &Tuple| self.render(t);
        let zero1 = |_: &Tuple| Ok(Element::zero(&self.basis, 1));
        let mut checks = vec![
            Check::equality(
                "d^2 = 0",
                self.tuples(1, self.safe_window(2)),
                render,
                |t| self.d.apply(&self.d.eval(t)?),
                zero1,
            ),
            Check::equality(
                "unit law",
                (0..self.basis.len() as u32).flat_map(|x| [vec![self.unit, x], vec![x, self.unit]]),
                render,
                |t| self.mu.eval(t),
                |t| Ok(self.one(if t[0] == self.unit { t[1] } else { t[0] })),
            ),
            Check::equality(
                "d(unit) = 0",
                self.tuples(1, self.safe_window(1)).into_iter().filter(|t| t[0] == self.unit),
                render,
                |t| self.d.eval(t),
                zero1,
            ),
            Check::equality(
                "d is a derivation",
                self.tuples(2, self.safe_window(1)),
                render,
                |t| self.d.apply(&self.mu.eval(t)?),
                |t| self.mu.apply(&self.d_slots(t)?),
            ),
            Check::equality(
                "mu is associative",
                self.tuples(3, self.safe_window(0)),
                render,
                |t| self.mu.apply(&splice(&[], &self.mu.eval(&t[..2])?, &t[2..])),
                |t| self.mu.apply(&splice(&t[..1], &self.mu.eval(&t[1..])?, &[])),
            ),
        ];
        let Some(delta) = &self.delta else {
            return checks;
        };
        let counit_side = |t: &Tuple, left: bool| -> Result<Element> {
            let mut out = Element::zero(&self.basis, 1);
            for pair in delta.eval(t)?.terms() {
                let (drop, keep) = if left { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
                if self.counit(drop) {
                    out.add_tuple(vec![keep]);
                }
            }
            Ok(out)
        };
        checks.extend([
            Check::equality(
                "counit law",
                self.tuples(1, self.cap()),
                render,
                |t| Ok(counit_side(t, true)?.sum(&counit_side(t, false)?).sum(&self.one(t[0]))),
                |t| Ok(self.one(t[0])),
            ),
            Check::equality(
                "d is a coderivation",
                self.tuples(1, self.safe_window(1)),
                render,
                |t| delta.apply(&self.d.eval(t)?),
                |t| self.d_slots_of(&delta.eval(t)?),
            ),
            Check::equality(
                "delta is coassociative",
                self.tuples(1, self.safe_window(0)),
                render,
                |t| self.coassociator_part(delta, t, true),
                |t| self.coassociator_part(delta, t, false),
            ),
            Check::equality(
                "Hopf compatibility",
                self.tuples(2, self.safe_window(0)),
                render,
                |t| delta.apply(&self.mu.eval(t)?),
                |t| self.hopf_side(delta, t),
            ),
        ]);
        checks
    }

    /// `(Δ⊗1)Δx` (left) or `(1⊗Δ)Δx`.
    fn coassociator_part(&self, delta: &MultiMap, t: &[u32], left: bool) -> Result<Element> {
        let mut out = Element::zero(&self.basis, 3);
        for pair in delta.eval(t)?.terms() {
            if left {
                out.add_assign(&splice(&[], &delta.eval(&pair[..1])?, &pair[1..]));
            } else {
                out.add_assign(&splice(&pair[..1], &delta.eval(&pair[1..])?, &[]));
            }
        }
        Ok(out)
    }

    /// `(μ⊗μ)σ_{2,2}(Δx⊗Δy)`.
    pub fn hopf_side(&self, delta: &MultiMap, t: &[u32]) -> Result<Element> {
        let both = delta.eval(&t[..1])?.tensor(&delta.eval(&t[1..2])?)?.sigma_permute(2, 2)?;
        crate::graded::apply_product(&[&self.mu, &self.mu], &both)
    }

    /// The three order-4 homotopy relations
    /// `∇ω13 = μ(μ⊗1) + μ(1⊗μ)`, `∇ω22 = Δμ + (μ⊗μ)σ(Δ⊗Δ)`,
    /// `∇ω31 = (Δ⊗1)Δ + (1⊗Δ)Δ`, on every basis tuple of degree at most
    /// `window` (defaults to the cap minus one).
    pub fn check_kk_order4(
        &self,
        w13: &MultiMap,
        w22: &MultiMap,
        w31: &MultiMap,
        window: Option<i32>,
    ) -> Result<Vec<Check>> {
        let delta = self.coproduct()?;
        for (f, m, n) in [(w13, 3, 1), (w22, 2, 2), (w31, 1, 3)] {
            if (f.m(), f.n(), f.p()) != (m, n, -1) {
                return Err(Error::Invalid(format!(
                    "expected a ({m},{n},-1) map, found ({},{},{})",
                    f.m(),
                    f.n(),
                    f.p()
                )));
            }
            if !f.source().same(&self.basis) || !f.target().same(&self.basis) {
                return Err(Error::BasisMismatch);
            }
        }
        let window = window.unwrap_or(self.safe_window(1));
        let render = |t: &Tuple| self.render(t);
        Ok(vec![
            Check::equality(
                "nabla w13 = associator",
                self.tuples(3, window),
                render,
                |t| self.nabla_at(w13, t),
                |t| {
                    let a = self.mu.apply(&splice(&[], &self.mu.eval(&t[..2])?, &t[2..]))?;
                    Ok(a.sum(&self.mu.apply(&splice(&t[..1], &self.mu.eval(&t[1..])?, &[]))?))
                },
            ),
            Check::equality(
                "nabla w22 = Hopf defect",
                self.tuples(2, window),
                render,
                |t| self.nabla_at(w22, t),
                |t| Ok(delta.apply(&self.mu.eval(t)?)?.sum(&self.hopf_side(delta, t)?)),
            ),
            Check::equality(
                "nabla w31 = coassociator",
                self.tuples(1, window),
                render,
                |t| self.nabla_at(w31, t),
                |t| Ok(self.coassociator_part(delta, t, true)?.sum(&self.coassociator_part(delta, t, false)?)),
            ),
        ])
    }

    /// Serializes to the presentation grammar; parsing the output gives back
    /// the same tables.
    pub fn emit(&self) -> String {
        let b = &self.basis;
        let mut out = String::from("field 2\n");
        out.push_str(&format!("cap {}\n", b.cap()));
        for (i, name) in b.names().iter().enumerate() {
            out.push_str(&format!("basis {name} {}\n", b.degree(i as u32)));
        }
        out.push_str(&format!("unit {}\n", b.name(self.unit)));
        let names = |t: &Tuple| t.iter().map(|&i| b.name(i)).collect::<Vec<_>>().join(" ");
        for (k, v) in self.d.table() {
            out.push_str(&format!("d {} = {v}\n", names(k)));
        }
        for x in 0..b.len() as u32 {
            for y in 0..b.len() as u32 {
                let k = vec![x, y];
                match self.mu.table().get(&k) {
                    Some(v) => out.push_str(&format!("mu {} = {v}\n", names(&k))),
                    // the parser fills in unit laws, so zero there must be explicit
                    None if x == self.unit || y == self.unit => out.push_str(&format!("mu {} = 0\n", names(&k))),
                    None => {}
                }
            }
        }
        if let Some(delta) = &self.delta {
            for x in 0..b.len() as u32 {
                let v = delta.table().get(&vec![x]).map_or_else(|| "0".to_string(), Element::render);
                out.push_str(&format!("delta {} = {v}\n", b.name(x)));
            }
        }
        for (q, f) in &self.e {
            for (k, v) in f.table() {
                out.push_str(&format!("E 1 {q} {} ; {} = {v}\n", b.name(k[0]), names(&k[1..].to_vec())));
            }
        }
        out
    }
}

fn extend(e: &Element, arity: usize, f: impl Fn(&[u32]) -> Result<Element>) -> Result<Element> {
    let mut out = Element::zero(e.basis(), arity);
    for t in e.terms() {
        out.add_assign(&f(t)?);
    }
    Ok(out)
}

struct Line<'a> {
    number: usize,
    tokens: Vec<&'a str>,
    rhs: Option<&'a str>,
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                return None;
            }
            let (lhs, rhs) = match body.split_once('=') {
                Some((l, r)) => (l, Some(r.trim())),
                None => (body, None),
            };
            Some(Line { number: i + 1, tokens: lhs.split_whitespace().collect(), rhs })
        })
        .collect()
}

fn at_line<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    })
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(['*', '+', ';', '=', '#']) && name != "0"
}

/// Parses a presentation file (see the module docs for the grammar).
pub fn parse_presentation(text: &str) -> Result<AlgebraPresentation> {
    let lines = lines(text);
    let mut field = None;
    let mut cap = None;
    let mut basis_lines = Vec::new();
    let mut unit_name = None;
    for l in &lines {
        let n = l.number;
        match l.tokens.first().copied() {
            Some("field") => {
                if l.tokens.len() != 2 || l.rhs.is_some() {
                    return Err(Error::parse(n, "expected `field 2`"));
                }
                if l.tokens[1] != "2" {
                    return Err(Error::parse(n, format!("only field 2 is supported, found `{}`", l.tokens[1])));
                }
                field = Some(());
            }
            Some("cap") => {
                let c = l.tokens.get(1).and_then(|s| s.parse::<i32>().ok()).filter(|_| l.tokens.len() == 2);
                cap = Some(c.ok_or_else(|| Error::parse(n, "expected `cap <integer>`"))?);
            }
            Some("basis") => {
                let deg = l.tokens.get(2).and_then(|s| s.parse::<i32>().ok()).filter(|_| l.tokens.len() == 3);
                let deg = deg.ok_or_else(|| Error::parse(n, "expected `basis <name> <degree>`"))?;
                if !valid_name(l.tokens[1]) {
                    return Err(Error::parse(n, format!("invalid basis name `{}`", l.tokens[1])));
                }
                basis_lines.push((n, l.tokens[1].to_string(), deg));
            }
            Some("unit") => {
                if l.tokens.len() != 2 {
                    return Err(Error::parse(n, "expected `unit <name>`"));
                }
                unit_name = Some((n, l.tokens[1]));
            }
            Some("d" | "mu" | "delta" | "E") => {
                if l.rhs.is_none() {
                    return Err(Error::parse(n, "missing `= <element>`"));
                }
            }
            Some(other) => return Err(Error::parse(n, format!("unknown directive `{other}`"))),
            None => return Err(Error::parse(n, "empty left-hand side")),
        }
    }
    if field.is_none() {
        return Err(Error::parse(1, "missing `field 2` line"));
    }
    let cap = cap.unwrap_or_else(|| basis_lines.iter().map(|b| b.2).max().unwrap_or(0));
    for (n, name, deg) in &basis_lines {
        if *deg > cap {
            return Err(Error::parse(*n, format!("`{name}` has degree {deg} above the cap {cap}")));
        }
    }
    let first_basis_line = basis_lines.first().map_or(1, |b| b.0);
    let basis = Arc::new(at_line(
        first_basis_line,
        GradedBasis::new(basis_lines.iter().map(|(_, name, deg)| (name.clone(), *deg)), cap),
    )?);
    let (unit_line, unit_name) = unit_name.ok_or_else(|| Error::parse(1, "missing `unit` line"))?;
    let unit = at_line(unit_line, basis.lookup(unit_name))?;
    if basis.degree(unit) != 0 {
        return Err(Error::parse(unit_line, "the unit must have degree 0"));
    }

    let mut d = MultiMap::zero(&basis, &basis, 1, 1, 1);
    let mut mu = MultiMap::zero(&basis, &basis, 2, 1, 0);
    let mut delta: Option<MultiMap> = None;
    let mut e: BTreeMap<usize, MultiMap> = BTreeMap::new();
    let mut seen: BTreeSet<(String, Tuple)> = BTreeSet::new();
    for l in &lines {
        let n = l.number;
        let Some(rhs) = l.rhs else { continue };
        let kind = l.tokens[0];
        let names: Vec<&str> = l.tokens[1..].to_vec();
        let (key, q, arity_out) = match kind {
            "d" | "delta" => {
                if names.len() != 1 {
                    return Err(Error::parse(n, format!("`{kind}` takes one input name")));
                }
                (names, 0, if kind == "d" { 1 } else { 2 })
            }
            "mu" => {
                if names.len() != 2 {
                    return Err(Error::parse(n, "`mu` takes two input names"));
                }
                (names, 0, 1)
            }
            "E" => {
                let q = names.get(1).and_then(|s| s.parse::<usize>().ok());
                if names.first() != Some(&"1") || q.is_none() || names.get(3) != Some(&";") {
                    return Err(Error::parse(n, "expected `E 1 <q> <name> ; <name> ... = <element>`"));
                }
                let q = q.unwrap_or(0);
                let inputs: Vec<&str> = std::iter::once(names[2]).chain(names[4..].iter().copied()).collect();
                if q == 0 || inputs.len() != q + 1 {
                    return Err(Error::parse(n, format!("E_{{1,{q}}} needs exactly {q} names after `;`")));
                }
                (inputs, q, 1)
            }
            _ => continue,
        };
        let tuple = at_line(n, key.iter().map(|s| basis.lookup(s)).collect::<Result<Tuple>>())?;
        let tag = if kind == "E" { format!("E{q}") } else { kind.to_string() };
        if !seen.insert((tag, tuple.clone())) {
            return Err(Error::parse(n, format!("duplicate `{kind}` entry")));
        }
        let value = at_line(n, Element::parse(&basis, rhs, Some(arity_out)))?;
        let target = match kind {
            "d" => &mut d,
            "mu" => &mut mu,
            "delta" => delta.get_or_insert_with(|| MultiMap::zero(&basis, &basis, 1, 2, 0)),
            _ => e.entry(q).or_insert_with(|| MultiMap::zero(&basis, &basis, q + 1, 1, -(q as i32))),
        };
        at_line(n, target.insert(tuple, value))?;
    }

    for x in 0..basis.len() as u32 {
        for key in [vec![unit, x], vec![x, unit]] {
            if !seen.contains(&("mu".to_string(), key.clone())) {
                mu.insert(key, Element::from_tuple(&basis, vec![x]))?;
            }
        }
    }
    if let Some(delta) = &mut delta {
        for x in 0..basis.len() as u32 {
            if seen.contains(&("delta".to_string(), vec![x])) {
                continue;
            }
            let value = if x == unit {
                Element::from_tuple(&basis, vec![unit, unit])
            } else {
                Element::from_tuples(&basis, 2, [vec![unit, x], vec![x, unit]])
            };
            delta.insert(vec![x], value)?;
        }
    }
    let p = AlgebraPresentation::from_parts(basis, unit, d, mu, delta, e)?;
    p.with_weights(weight_grading(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    const EXAMPLE_A: &str = "field 2\ncap 20\nbasis 1 0\nbasis a2 2\nbasis a3 3\nbasis b3 3\nbasis a2a3 5\nunit 1\n\
                             mu a2 a3 = a2a3\nmu a3 a2 = a2a3\n";

    #[test]
    fn trivial_hopf_algebra() {
        let p = parse_presentation("field 2\ncap 0\nbasis one 0\nunit one\nmu one one = one\ndelta one = one*one\n")
            .unwrap();
        assert_eq!(p.basis().len(), 1);
        let checks = p.validate_dgha();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn example_dga_parses_and_validates() {
        let p = parse_presentation(EXAMPLE_A).unwrap();
        assert_eq!(p.basis().len(), 5);
        assert!(p.delta().is_none());
        let checks = p.validate_dgha();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn inhomogeneous_entry_is_rejected() {
        let text = EXAMPLE_A.replace("mu a2 a3 = a2a3", "mu a2 a3 = a3");
        let err = parse_presentation(&text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 9, .. }), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_presentation("field 2\nbasis x 0\nunit x\nmu x y = x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = parse_presentation("field 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_presentation("field 2\nbasis x 0\nunit x\nfoo\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn hopf_failure_has_witness() {
        let text = "field 2\ncap 12\nbasis 1 0\nbasis a2 2\nbasis a3 3\nbasis a2a3 5\nunit 1\n\
                    mu a2 a3 = a2a3\nmu a3 a2 = 0\n\
                    delta a2a3 = 1*a2a3 + a2*a3 + a3*a2 + a2a3*1\n";
        let p = parse_presentation(text).unwrap();
        let checks = p.validate_dgha();
        let hopf = checks.iter().find(|c| c.name == "Hopf compatibility").unwrap();
        assert_eq!(hopf.status, Status::Fail);
        assert!(hopf.witness.starts_with("at (a3, a2)"), "{}", hopf.witness);
        assert!(checks.iter().filter(|c| c.name != "Hopf compatibility").all(Check::passed));
    }

    #[test]
    fn emit_round_trips() {
        let text = "field 2\ncap 4\nbasis 1 0\nbasis x 2\nbasis y 4\nunit 1\nmu x x = y\n\
                    delta y = 1*y + y*1\nE 1 1 x ; x = 0\nd x = 0\n";
        let p = parse_presentation(text).unwrap();
        let q = parse_presentation(&p.emit()).unwrap();
        assert_eq!(p.emit(), q.emit());
        let checks = p.validate_dgha();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn strict_case_of_order4_relations() {
        let text = "field 2\ncap 4\nbasis 1 0\nbasis x 2\nbasis y 4\nunit 1\nmu x x = y\n\
                    delta x = 1*x + x*1\n";
        let p = parse_presentation(text).unwrap();
        let b = p.basis();
        let z = |m, n| MultiMap::zero(b, b, m, n, -1);
        let checks = p.check_kk_order4(&z(3, 1), &z(2, 2), &z(1, 3), None).unwrap();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn safe_window_examples() {
        let p = parse_presentation("field 2\ncap 10\nbasis one 0\nunit one\n").unwrap();
        assert_eq!(p.safe_window(0), 10);
        assert_eq!(p.safe_window(1), 9);
    }
}
