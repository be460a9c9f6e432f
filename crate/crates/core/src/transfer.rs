//! Homotopy transfer of an order-4 A∞-bialgebra structure from a bar
//! construction to its homology.
//!
//! Homotopies `g_m^n` map `H^{⊗m}` to `B^{⊗n}` and lower degree by
//! `m + n − 2`; the transferred operations `ω^{n,m}` on `H` lower degree by
//! `m + n − 3`. Since `d_H = 0`, every relation reduces to one equation per
//! input tuple: `d g_m^n(P) = g^{⊗n} ω^{n,m}(P) + φ(P)`, where `φ` collects the
//! already-known terms.

use std::collections::BTreeMap;

use crate::demos::Pipeline;
use crate::error::{Error, Result};
use crate::graded::{apply_product, eval_product, splice, Element, Evaluate, MultiMap, Tuple};
use crate::gs::{cocycle_checks, GSCochain};
use crate::presentation::AlgebraPresentation;
use crate::report::Check;
use crate::triviality::{decide_triviality, Certificate, Verdict};

/// A user-supplied value for one homotopy on one input tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pin {
    pub m: usize,
    pub n: usize,
    pub input: Tuple,
    pub value: Element,
}

/// Parses `pin g <m> <n> : <H-name> ... -> <bar element>` lines. `m` counts
/// inputs and `n` outputs.
pub fn parse_pins(text: &str, pipeline: &Pipeline) -> Result<Vec<Pin>> {
    let h = pipeline.host.basis();
    let b = pipeline.bar.basis();
    let mut pins: Vec<Pin> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        let (head, rest) = body.split_once(':').ok_or_else(|| err("expected `pin g <m> <n> : ...`".into()))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 4 || head[0] != "pin" || head[1] != "g" {
            return Err(err("expected `pin g <m> <n> : <names> -> <bar element>`".into()));
        }
        let m: usize = head[2].parse().map_err(|_| err(format!("bad input arity `{}`", head[2])))?;
        let n: usize = head[3].parse().map_err(|_| err(format!("bad output arity `{}`", head[3])))?;
        if !HOMOTOPIES.contains(&(m, n)) {
            return Err(err(format!("no homotopy g {m} {n} at order 3 or 4")));
        }
        let (inputs, value) = rest.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
        let input: Tuple =
            inputs.split_whitespace().map(|s| h.lookup(s)).collect::<Result<_>>().map_err(|e| err(e.to_string()))?;
        if input.len() != m {
            return Err(err(format!("expected {m} input names, found {}", input.len())));
        }
        let value = Element::parse(b, value, Some(n)).map_err(|e| err(e.to_string()))?;
        let want = h.tuple_degree(&input) + 2 - (m + n) as i32;
        if value.terms().iter().any(|t| b.tuple_degree(t) != want) {
            return Err(err(format!("value must have degree {want}")));
        }
        if pins.iter().any(|p| p.m == m && p.n == n && p.input == input) {
            return Err(err("duplicate pin".into()));
        }
        pins.push(Pin { m, n, input, value });
    }
    Ok(pins)
}

/// `(inputs, outputs)` of the homotopies computed here, in solving order.
pub const HOMOTOPIES: [(usize, usize); 5] = [(2, 1), (1, 2), (3, 1), (2, 2), (1, 3)];

/// Homotopies and transferred operations, filled in by the two stages.
pub struct TransferState<'a> {
    pub pipeline: &'a Pipeline,
    pub window: i32,
    pub pins: Vec<Pin>,
    pub homotopies: BTreeMap<(usize, usize), MultiMap>,
    /// `ω^{n,m}` keyed by `(m, n)`.
    pub transferred: BTreeMap<(usize, usize), MultiMap>,
}

impl<'a> TransferState<'a> {
    /// Empty state; homotopies and operations are computed on input tuples
    /// of degree at most `window`, which may not exceed the bar cap.
    pub fn new(pipeline: &'a Pipeline, pins: Vec<Pin>, window: i32) -> Result<Self> {
        if window > pipeline.bar.cap() {
            return Err(Error::Window(format!("window {window} exceeds the bar cap {}", pipeline.bar.cap())));
        }
        if let Some(p) = pins.iter().find(|p| pipeline.host.basis().tuple_degree(&p.input) > window) {
            return Err(Error::Window(format!(
                "pin on {} lies outside the window {window}",
                pipeline.host.basis().render_tuple(&p.input)
            )));
        }
        Ok(Self { pipeline, window, pins, homotopies: BTreeMap::new(), transferred: BTreeMap::new() })
    }

    fn h(&self) -> &AlgebraPresentation {
        &self.pipeline.host
    }

    fn b(&self) -> &AlgebraPresentation {
        &self.pipeline.bar_host
    }

    fn g(&self) -> &MultiMap {
        self.pipeline.homology.g()
    }

    /// The homotopy `g_m^n`; panics if its stage has not run.
    pub fn homotopy(&self, m: usize, n: usize) -> &MultiMap {
        &self.homotopies[&(m, n)]
    }

    /// `ω^{n,m}`; panics if order 4 has not run.
    pub fn omega(&self, m: usize, n: usize) -> &MultiMap {
        &self.transferred[&(m, n)]
    }

    /// The transferred operations as a cochain on `H`.
    pub fn omega_cochain(&self) -> Result<GSCochain> {
        let mut out = GSCochain::new();
        for f in self.transferred.values() {
            out.add_part(f.clone())?;
        }
        Ok(out)
    }

    fn pin(&self, m: usize, n: usize, input: &[u32]) -> Option<&Pin> {
        self.pins.iter().find(|p| p.m == m && p.n == n && p.input == input)
    }

    /// Solves `d g_m^n(P) = g^{⊗n}(class) + φ(P)` on every input tuple.
    /// `class` must vanish when `record` is false.
    fn solve_stage(
        &mut self,
        m: usize,
        n: usize,
        phi: impl Fn(&Self, &[u32]) -> Result<Element>,
        record: bool,
    ) -> Result<()> {
        let h = self.h().basis().clone();
        let bb = self.pipeline.bar.basis().clone();
        let mut homotopy = MultiMap::zero(&h, &bb, m, n, 2 - (m + n) as i32).with_domain_cap(Some(self.window));
        let mut omega = MultiMap::zero(&h, &h, m, n, 3 - (m + n) as i32).with_domain_cap(Some(self.window));
        for t in h.tuples_up_to(m, self.window) {
            let rhs = phi(self, &t)?;
            let z = self.b().d_slots_of(&rhs)?;
            if !z.is_zero() {
                return Err(Error::NotACocycle(format!(
                    "boundary cochain for g {m} {n} at {} has d = {z}",
                    h.render_tuple(&t)
                )));
            }
            let (class, pre) = self.pipeline.homology.pullback(&rhs, self.b())?;
            if !record && !class.is_zero() {
                return Err(Error::NotACocycle(format!(
                    "right-hand side for g {m} {n} at {} is not exact: {rhs} has class {class}",
                    h.render_tuple(&t)
                )));
            }
            let value = match self.pin(m, n, &t) {
                Some(p) => {
                    let lifted = apply_product(&vec![self.g() as &dyn Evaluate; n], &class)?;
                    if self.b().d_slots_of(&p.value)? != rhs.sum(&lifted) {
                        return Err(Error::Invalid(format!(
                            "pin g {m} {n} at {} does not solve d(value) = {}",
                            h.render_tuple(&t),
                            rhs.sum(&lifted)
                        )));
                    }
                    p.value.clone()
                }
                None => pre,
            };
            homotopy.insert(t.clone(), value)?;
            omega.insert(t, class)?;
        }
        self.homotopies.insert((m, n), homotopy);
        if record {
            self.transferred.insert((m, n), omega);
        }
        Ok(())
    }

    /// `g_2^1` and `g_1^2`.
    pub fn order3(&mut self) -> Result<()> {
        self.solve_stage(2, 1, Self::phi21, false)?;
        self.solve_stage(1, 2, Self::phi12, false)
    }

    /// `ω^{1,3}, ω^{2,2}, ω^{3,1}` with `g_3^1, g_2^2, g_1^3`.
    pub fn order4(&mut self) -> Result<()> {
        if !self.homotopies.contains_key(&(1, 2)) {
            return Err(Error::Invalid("order 3 must be solved first".into()));
        }
        self.solve_stage(3, 1, Self::phi31, true)?;
        self.solve_stage(2, 2, Self::phi22, true)?;
        self.solve_stage(1, 3, Self::phi13, true)
    }

    /// `μ_B(g⊗g) + g μ_H`.
    pub fn phi21(&self, t: &[u32]) -> Result<Element> {
        let g = self.g();
        let a = self.b().mu().apply(&eval_product(&[g, g], t)?)?;
        Ok(a.sum(&g.apply(&self.h().mu().eval(t)?)?))
    }

    /// `Δ_B g + (g⊗g) Δ_H`.
    pub fn phi12(&self, t: &[u32]) -> Result<Element> {
        let g = self.g();
        let a = self.b().coproduct()?.apply(&g.eval(t)?)?;
        Ok(a.sum(&apply_product(&[g, g], &self.h().coproduct()?.eval(t)?)?))
    }

    /// `μ_B(g_2^1⊗g) + μ_B(g⊗g_2^1) + g_2^1(μ⊗1) + g_2^1(1⊗μ)`.
    pub fn phi31(&self, t: &[u32]) -> Result<Element> {
        let (g, g21, mu_b, mu_h) = (self.g(), self.homotopy(2, 1), self.b().mu(), self.h().mu());
        let mut out = mu_b.apply(&eval_product(&[g21, g], t)?)?;
        out.add_assign(&mu_b.apply(&eval_product(&[g, g21], t)?)?);
        out.add_assign(&g21.apply(&splice(&[], &mu_h.eval(&t[..2])?, &t[2..]))?);
        out.add_assign(&g21.apply(&splice(&t[..1], &mu_h.eval(&t[1..])?, &[]))?);
        Ok(out)
    }

    /// `Δ_B g_2^1 + (μ_B⊗μ_B)σ(Δ_B g ⊗ g_1^2 + g_1^2 ⊗ (g⊗g)Δ_H)
    ///  + (μ_B(g⊗g) ⊗ g_2^1 + g_2^1 ⊗ g μ_H)σ(Δ_H⊗Δ_H) + g_1^2 μ_H`.
    pub fn phi22(&self, t: &[u32]) -> Result<Element> {
        let (g, g21, g12) = (self.g(), self.homotopy(2, 1), self.homotopy(1, 2));
        let (mu_b, mu_h) = (self.b().mu(), self.h().mu());
        let (delta_b, delta_h) = (self.b().coproduct()?, self.h().coproduct()?);
        let mut out = delta_b.apply(&g21.eval(t)?)?;
        let left = delta_b.apply(&g.eval(&t[..1])?)?.tensor(&g12.eval(&t[1..])?)?;
        let right = g12.eval(&t[..1])?.tensor(&apply_product(&[g, g], &delta_h.eval(&t[1..])?)?)?;
        out.add_assign(&apply_product(&[mu_b, mu_b], &left.sum(&right).sigma_permute(2, 2)?)?);
        let split = eval_product(&[delta_h, delta_h], t)?.sigma_permute(2, 2)?;
        for s in split.terms() {
            let front = mu_b.apply(&eval_product(&[g, g], &s[..2])?)?;
            out.add_assign(&front.tensor(&g21.eval(&s[2..])?)?);
            let back = g.apply(&mu_h.eval(&s[2..])?)?;
            out.add_assign(&g21.eval(&s[..2])?.tensor(&back)?);
        }
        out.add_assign(&g12.apply(&mu_h.eval(t)?)?);
        Ok(out)
    }

    /// `(Δ_B⊗1 + 1⊗Δ_B) g_1^2 + (g_1^2⊗g + g⊗g_1^2) Δ_H`.
    pub fn phi13(&self, t: &[u32]) -> Result<Element> {
        let (g, g12) = (self.g(), self.homotopy(1, 2));
        let mut out = self.b().delta_slots_of(&g12.eval(t)?)?;
        let split = self.h().coproduct()?.eval(t)?;
        out.add_assign(&apply_product(&[g12, g], &split)?);
        out.add_assign(&apply_product(&[g, g12], &split)?);
        Ok(out)
    }

    /// Re-derives every relation `d g_m^n = g^{⊗n} ω^{n,m} + φ` from the
    /// stored maps.
    pub fn relation_checks(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        type Phi<'s, 'a> = fn(&'s TransferState<'a>, &[u32]) -> Result<Element>;
        let stages: [((usize, usize), Phi<'_, 'a>); 5] = [
            ((2, 1), Self::phi21),
            ((1, 2), Self::phi12),
            ((3, 1), Self::phi31),
            ((2, 2), Self::phi22),
            ((1, 3), Self::phi13),
        ];
        let h = self.h().basis();
        for ((m, n), phi) in stages {
            let Some(homotopy) = self.homotopies.get(&(m, n)) else { continue };
            let omega = self.transferred.get(&(m, n));
            checks.push(Check::equality(
                format!("relation for g {m} {n}"),
                h.tuples_up_to(m, self.window),
                |t| h.render_tuple(t),
                |t| self.b().d_slots_of(&homotopy.eval(t)?),
                |t| {
                    let mut rhs = phi(self, t)?;
                    if let Some(w) = omega {
                        rhs.add_assign(&apply_product(&vec![self.g() as &dyn Evaluate; n], &w.eval(t)?)?);
                    }
                    Ok(rhs)
                },
            ));
        }
        checks
    }

    /// Homotopies as `g <m> <n> : <names> -> <bar element>` lines.
    pub fn render_homotopies(&self) -> String {
        let mut out = String::new();
        for &(m, n) in &HOMOTOPIES {
            let Some(f) = self.homotopies.get(&(m, n)) else { continue };
            for (k, v) in f.table() {
                let inputs: Vec<&str> = k.iter().map(|&i| f.source().name(i)).collect();
                out.push_str(&format!("g {m} {n} : {} -> {}\n", inputs.join(" "), v));
            }
        }
        out
    }
}

/// Runs both stages on input tuples up to the bar cap.
pub fn transfer(pipeline: &Pipeline, pins: Vec<Pin>) -> Result<TransferState<'_>> {
    let mut state = TransferState::new(pipeline, pins, pipeline.bar.cap())?;
    state.order3()?;
    state.order4()?;
    Ok(state)
}

/// Named classes of the loop-space homology.
struct LoopClasses {
    unit: u32,
    alpha1: u32,
    alpha2: u32,
    beta: u32,
    gamma: u32,
}

impl LoopClasses {
    fn of(host: &AlgebraPresentation) -> Result<Self> {
        let b = host.basis();
        Ok(Self {
            unit: host.unit(),
            alpha1: b.lookup("alpha1")?,
            alpha2: b.lookup("alpha2")?,
            beta: b.lookup("beta")?,
            gamma: b.lookup("gamma")?,
        })
    }

    /// Classes `σ` with `β⊗β⊗σ` inside the window.
    fn sigmas(&self, host: &AlgebraPresentation, window: i32) -> Vec<u32> {
        let b = host.basis();
        let room = window - 2 * b.degree(self.beta);
        (0..b.len() as u32).filter(|&s| b.degree(s) <= room).collect()
    }
}

/// Value checks on a loop-space transfer with pin `g_2^1(β⊗β) = [a2|a3]`
/// (`i = 2`) or `[a3|a2]` (`i = 3`), followed by the cocycle test and the
/// triviality decision, which must come out non-trivial with `β⊗β` rows in
/// both single-differential certificates.
pub fn verify_loopspace(state: &TransferState, pin_i: u8) -> Result<(Vec<Check>, Verdict)> {
    let host = &state.pipeline.host;
    let b = host.basis();
    let c = LoopClasses::of(host)?;
    let w13 = state.omega(3, 1);
    let render = |t: &[u32]| b.render_tuple(t);
    let mut checks = Vec::new();

    let (expected, label) = match pin_i {
        2 => (vec![c.alpha1, c.alpha2], "ω^{2,2}(β⊗β) = α₁⊗α₂"),
        3 => (vec![c.alpha2, c.alpha1], "ω^{2,2}(β⊗β) = α₂⊗α₁"),
        _ => return Err(Error::Invalid(format!("pin index must be 2 or 3, found {pin_i}"))),
    };
    let got = state.omega(2, 2).eval(&[c.beta, c.beta])?;
    checks.push(if got == Element::from_tuple(b, expected) {
        Check::pass(label, "")
    } else {
        Check::fail(label, format!("computed {got}"))
    });

    let w31 = state.omega(1, 3);
    checks.push(match w31.table().iter().next() {
        None => Check::pass("ω^{3,1} = 0", ""),
        Some((k, v)) => Check::fail("ω^{3,1} = 0", format!("{} -> {v}", render(k))),
    });

    let sigmas = c.sigmas(host, state.window);
    checks.push(Check::equality(
        "ω^{1,3}(β⊗β⊗σ) = ω^{1,3}(σ⊗β⊗β)",
        sigmas.clone(),
        |s| b.name(*s).to_string(),
        |&s| w13.eval(&[c.beta, c.beta, s]),
        |&s| w13.eval(&[s, c.beta, c.beta]),
    ));
    checks.push(Check::equality(
        "ω^{1,3}(β⊗β⊗σ) = 0 for σ = 1, β",
        vec![c.unit, c.beta],
        |s| b.name(*s).to_string(),
        |&s| w13.eval(&[c.beta, c.beta, s]),
        |_| Ok(Element::zero(b, 1)),
    ));
    let support: Vec<&str> = sigmas
        .iter()
        .filter(|&&s| w13.eval(&[c.beta, c.beta, s]).map(|v| !v.is_zero()).unwrap_or(false))
        .map(|&s| b.name(s))
        .collect();
    checks.push(if support.is_empty() {
        Check::fail("ω^{1,3}(β⊗β⊗σ) ≠ 0 for some σ ≠ 1, β", "no such σ in the window")
    } else {
        Check::pass("ω^{1,3}(β⊗β⊗σ) ≠ 0 for some σ ≠ 1, β", format!("σ ∈ {{{}}}", support.join(", ")))
    });
    let generators = [c.unit, c.alpha1, c.alpha2, c.beta];
    let mut generator_triples: Vec<Tuple> = Vec::new();
    for x in generators {
        for y in generators {
            for z in generators {
                if b.tuple_degree(&[x, y, z]) <= state.window {
                    generator_triples.push(vec![x, y, z]);
                }
            }
        }
    }
    checks.push(Check::equality(
        "ω^{1,3} = 0 on 1, α₁, α₂, β",
        generator_triples,
        |t| render(t),
        |t| w13.eval(t),
        |_| Ok(Element::zero(b, 1)),
    ));

    checks.extend(state.relation_checks());
    let omega = state.omega_cochain()?;
    checks.extend(cocycle_checks(host, &omega, state.window)?);

    let verdict = decide_triviality(host, &omega, state.window)?;
    match &verdict {
        Verdict::NonTrivial(cert) => {
            checks.push(Check::pass("cls ≠ 0: NON-TRIVIAL", ""));
            let bb = [c.beta, c.beta];
            let both = [&cert.partial_only, &cert.delta_only]
                .iter()
                .all(|rows| rows.as_ref().is_some_and(|r| Certificate::mentions(r, &bb)));
            checks.push(if both {
                Check::pass("certificate has β⊗β rows for ∂ψ₁² and δψ₂¹", "")
            } else {
                Check::fail("certificate has β⊗β rows for ∂ψ₁² and δψ₂¹", cert.render(b))
            });
        }
        Verdict::Trivial(psi) => {
            checks.push(Check::fail("cls ≠ 0: NON-TRIVIAL", format!("trivialized by\n{}", psi.render())))
        }
        Verdict::Inconclusive(_, why) => checks.push(Check::inconclusive("cls ≠ 0: NON-TRIVIAL", why.clone())),
    }
    Ok((checks, verdict))
}

/// Compares transfers with pins `i = 2` and `i = 3`: `ω^{1,3}(β⊗β⊗σ)`
/// changes by `μ(γ⊗σ)` for `σ ≠ 1, β`, and the difference of the two
/// structures is a coboundary.
pub fn compare_loop_pins(two: &TransferState, three: &TransferState) -> Result<Vec<Check>> {
    let host = &two.pipeline.host;
    let b = host.basis();
    let c = LoopClasses::of(host)?;
    let window = two.window.min(three.window);
    let sigmas: Vec<u32> = c.sigmas(host, window).into_iter().filter(|&s| s != c.unit && s != c.beta).collect();
    let (a, z) = (two.omega(3, 1), three.omega(3, 1));
    let mut checks = vec![Check::equality(
        "ω^{1,3}(β⊗β⊗σ) changes by μ(γ⊗σ) between the two pins, σ ≠ 1, β",
        sigmas,
        |s| b.name(*s).to_string(),
        |&s| Ok(a.eval(&[c.beta, c.beta, s])?.sum(&z.eval(&[c.beta, c.beta, s])?)),
        |&s| host.mu().eval(&[c.gamma, s]),
    )];
    let difference = two.omega_cochain()?.sum(&three.omega_cochain()?)?;
    checks.push(match decide_triviality(host, &difference, window)? {
        Verdict::Trivial(psi) => {
            Check::pass("the two pin choices give isomorphic structures", psi.render().trim_end().to_string())
        }
        Verdict::NonTrivial(cert) => Check::fail("the two pin choices give isomorphic structures", cert.render(b)),
        Verdict::Inconclusive(_, why) => Check::inconclusive("the two pin choices give isomorphic structures", why),
    });
    Ok(checks)
}

/// The pin `g_2^1(β⊗β) = [a2|a3]` (`i = 2`) or `[a3|a2]` (`i = 3`).
pub fn loop_pin(pipeline: &Pipeline, pin_i: u8) -> Result<Vec<Pin>> {
    let value = match pin_i {
        2 => "[a2|a3]",
        3 => "[a3|a2]",
        _ => return Err(Error::Invalid(format!("pin index must be 2 or 3, found {pin_i}"))),
    };
    parse_pins(&format!("pin g 2 1 : beta beta -> {value}\n"), pipeline)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_pipeline() -> Pipeline {
        Pipeline::loopspace(6).unwrap()
    }

    #[test]
    fn pin_grammar() {
        let p = loop_pipeline();
        let pins = parse_pins("# choice\npin g 2 1 : beta beta -> [a2|a3]\n", &p).unwrap();
        assert_eq!(pins.len(), 1);
        assert_eq!((pins[0].m, pins[0].n), (2, 1));
        assert_eq!(pins[0].value.to_string(), "[a2|a3]");
        let e = parse_pins("pin g 2 1 : beta beta -> [a2]\n", &p).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        assert!(parse_pins("pin g 4 1 : beta beta beta beta -> []\n", &p).is_err());
    }

    #[test]
    fn order3_of_loop_space() {
        let p = loop_pipeline();
        let mut s = TransferState::new(&p, Vec::new(), 6).unwrap();
        s.order3().unwrap();
        assert!(s.homotopy(1, 2).is_zero());
        let h = p.host.basis();
        let beta = h.lookup("beta").unwrap();
        let generators: Vec<u32> = ["1", "alpha1", "alpha2", "beta"].iter().map(|n| h.lookup(n).unwrap()).collect();
        let mut nonzero = Vec::new();
        for &x in &generators {
            for &y in &generators {
                if !s.phi21(&[x, y]).unwrap().is_zero() {
                    nonzero.push(vec![x, y]);
                }
            }
        }
        assert_eq!(nonzero, vec![vec![beta, beta]]);
        assert_eq!(s.phi21(&[beta, beta]).unwrap().to_string(), "[a2a3]");
    }

    #[test]
    fn bad_pin_is_rejected() {
        let p = loop_pipeline();
        let pins = parse_pins("pin g 2 1 : beta beta -> [a2|a3] + [a3|a2]\n", &p).unwrap();
        let mut s = TransferState::new(&p, pins, 6).unwrap();
        assert!(matches!(s.order3(), Err(Error::Invalid(_))));
    }
}
