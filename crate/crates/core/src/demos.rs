//! Built-in inputs: the two bar-construction examples and a small algebra
//! with cup-one products for expansion spot checks.

use std::sync::Arc;

use crate::bar::{bar_basis, homology, BarComplex, BarHomology};
use crate::error::{Error, Result};
use crate::graded::{Element, Evaluate, MultiMap, Tuple};
use crate::gs::{cocycle_checks, parse_cochain, total_d, GSCochain};
use crate::presentation::{parse_presentation, AlgebraPresentation};
use crate::report::{Check, RunReport};
use crate::transfer::{compare_loop_pins, loop_pin, transfer, verify_loopspace};
use crate::triviality::{check_solution, decide_triviality, Verdict};

/// Commutative algebra on `a2`, `a3`, `b3` with `a2·a3 = a3·a2` as the only
/// nonzero product of positive-degree elements.
pub const EXAMPLE4_ALGEBRA: &str = include_str!("../data/example4.dga");

/// The same algebra with `b` in place of `b3` and one cup-one product
/// `b ⌣₁ b = a2a3`.
pub const LOOPSPACE_ALGEBRA: &str = include_str!("../data/loopspace.dga");

/// Four generators, two of which have cup-one products.
pub const CUP_ONE_ALGEBRA: &str = include_str!("../data/cup_one.dga");

/// The homotopy `ψ₂¹(β₂⊗β₂) = γ` trivializing the `example4` deformation,
/// in the cochain grammar.
pub const EXAMPLE4_PSI: &str = "omega 1 2 : beta2 beta2 -> gamma\n";

/// The single `ω^{2,2}` entry of the `example4` deformation on its own.
pub const EXAMPLE4_OMEGA22_ENTRY: &str = "omega 2 2 : beta2 beta2 -> alpha1*alpha2 + alpha2*alpha1\n";

/// Bar construction, homology and the homology Hopf algebra of a DGA.
pub struct Pipeline {
    pub algebra: AlgebraPresentation,
    pub bar: Arc<BarComplex>,
    /// Bar complex as a DG Hopf algebra (perturbed product).
    pub bar_host: AlgebraPresentation,
    pub homology: BarHomology,
    /// Homology Hopf algebra with zero differential.
    pub host: AlgebraPresentation,
}

impl Pipeline {
    /// Builds everything through bar-degree `cap`; `names` binds class names
    /// to representative cocycles given as bar elements.
    pub fn build(algebra_text: &str, cap: i32, names: &[(&str, &str)]) -> Result<Pipeline> {
        let algebra = parse_presentation(algebra_text)?;
        let bar = Arc::new(bar_basis(&algebra, cap)?);
        let bar_host = bar.to_presentation(true)?;
        let preferred: Vec<(&str, Element)> =
            names.iter().map(|(n, rep)| Ok((*n, bar.parse(rep)?))).collect::<Result<_>>()?;
        let homology = homology(Arc::clone(&bar), &preferred)?;
        let host = homology.to_presentation(&bar_host)?;
        Ok(Pipeline { algebra, bar, bar_host, homology, host })
    }

    pub fn example4(cap: i32) -> Result<Pipeline> {
        Self::build(EXAMPLE4_ALGEBRA, cap, &EXAMPLE4_NAMES)
    }

    pub fn loopspace(cap: i32) -> Result<Pipeline> {
        Self::build(LOOPSPACE_ALGEBRA, cap, &LOOPSPACE_NAMES)
    }
}

pub const EXAMPLE4_NAMES: [(&str, &str); 4] =
    [("alpha1", "[a2]"), ("alpha2", "[a3]"), ("beta2", "[b3]"), ("gamma", "[a2|a3] + [a3|a2]")];

pub const LOOPSPACE_NAMES: [(&str, &str); 4] =
    [("alpha1", "[a2]"), ("alpha2", "[a3]"), ("beta", "[b]"), ("gamma", "[a2|a3] + [a3|a2]")];

/// A demo report with its optional certificate text.
#[derive(Debug, Clone)]
pub struct DemoOutcome {
    pub report: RunReport,
    pub certificate: Option<String>,
    /// The cochain the verdict is about, in the cochain grammar.
    pub omega: Option<String>,
}

impl DemoOutcome {
    fn new(report: RunReport) -> Self {
        Self { report, certificate: None, omega: None }
    }
}

/// The `example4` demo at bar cap `cap`: `ω = D(ψ)` for `ψ₂¹(β₂⊗β₂) = γ`, its values,
/// the cocycle test and the triviality decision. With `corrupt`,
/// `ω^{2,2}(β₂⊗β₂)` is replaced by `α₁⊗α₂` before testing.
pub fn example4_report(cap: i32, corrupt: bool) -> DemoOutcome {
    let command = if corrupt { "demo example4 --corrupt" } else { "demo example4" };
    let mut out = DemoOutcome::new(RunReport::new(command));
    if let Err(e) = example4_into(cap, corrupt, &mut out) {
        out.report.abort("example4 pipeline", &e);
    }
    out
}

fn example4_into(cap: i32, corrupt: bool, out: &mut DemoOutcome) -> Result<()> {
    if cap < 4 {
        return Err(Error::Window(format!("β₂⊗β₂ has degree 4, above the cap {cap}")));
    }
    let p = Pipeline::example4(cap)?;
    let host = &p.host;
    let b = host.basis();
    let name = |s: &str| b.lookup(s);
    let (alpha1, alpha2, beta2, gamma) = (name("alpha1")?, name("alpha2")?, name("beta2")?, name("gamma")?);
    let r = &mut out.report;
    r.line(format!("homology dimensions through degree {cap}: {:?}", p.homology.dims()));
    r.line("ψ = ψ₂¹ with ψ₂¹(β₂⊗β₂) = γ, ω = D(ψ)");

    let psi = parse_cochain(EXAMPLE4_PSI, host)?;
    let mut omega = total_d(host, &psi, cap)?;
    let w22 = omega.part(-1, 2, 2).cloned().unwrap_or_else(|| MultiMap::zero(b, b, 2, 2, -1));
    let w13 = omega.part(-1, 3, 1).cloned().unwrap_or_else(|| MultiMap::zero(b, b, 3, 1, -1));
    r.line(format!("ω^{{2,2}} has {} nonzero entries, ω^{{1,3}} has {}", w22.table().len(), w13.table().len()));

    let four = Element::parse(b, "1*gamma + alpha1*alpha2 + alpha2*alpha1 + gamma*1", Some(2))?;
    let coproduct = host.coproduct()?.eval(&[gamma])?;
    r.push(if coproduct == four {
        Check::pass("Δγ = 1⊗γ + α₁⊗α₂ + α₂⊗α₁ + γ⊗1", "")
    } else {
        Check::fail("Δγ = 1⊗γ + α₁⊗α₂ + α₂⊗α₁ + γ⊗1", format!("computed {coproduct}"))
    });

    let want22 = Element::parse(b, "alpha1*alpha2 + alpha2*alpha1", Some(2))?;
    let got22 = w22.eval(&[beta2, beta2])?;
    r.push(if got22 == want22 {
        Check::pass("δψ = ω^{2,2}: δψ(β₂⊗β₂) = α₁⊗α₂ + α₂⊗α₁", "")
    } else {
        Check::fail("δψ = ω^{2,2}: δψ(β₂⊗β₂) = α₁⊗α₂ + α₂⊗α₁", format!("computed {got22}"))
    });

    let inputs = vec![
        vec![alpha1, beta2, beta2],
        vec![alpha2, beta2, beta2],
        vec![beta2, beta2, alpha1],
        vec![beta2, beta2, alpha2],
    ];
    r.push(Check::equality(
        "∂ψ = ω^{1,3}: ∂ψ(α_i⊗β₂⊗β₂) = μ(α_i⊗γ), ∂ψ(β₂⊗β₂⊗α_i) = μ(γ⊗α_i)",
        inputs,
        |t| b.render_tuple(t),
        |t| w13.eval(t),
        |t| if t[0] == beta2 { host.mu().eval(&[gamma, t[2]]) } else { host.mu().eval(&[t[0], gamma]) },
    ));
    if host.mu().eval(&[alpha1, gamma])?.is_zero() && host.mu().eval(&[alpha2, gamma])?.is_zero() {
        r.line("μ(α₁⊗γ) = μ(α₂⊗γ) = 0 over GF(2): α_i⊗γ and γ⊗α_i cancel in the bar complex");
    }

    let entry = parse_cochain(EXAMPLE4_OMEGA22_ENTRY, host)?;
    if let Some(bad) = cocycle_checks(host, &entry, cap)?.into_iter().find(|c| !c.passed()) {
        r.line(format!(
            "the entry ω^{{2,2}}(β₂⊗β₂) alone is not a cocycle ({}: {}); the full D(ψ) is used",
            bad.name, bad.witness
        ));
    }

    if corrupt {
        let mut changed = w22.clone();
        changed.insert(vec![beta2, beta2], Element::from_tuple(b, vec![alpha1, alpha2]))?;
        let mut c = GSCochain::new();
        for (key, f) in omega.parts() {
            if *key != (-1, 2, 2) {
                c.add_part(f.clone())?;
            }
        }
        c.add_part(changed)?;
        omega = c;
        r.line("corrupted: ω^{2,2}(β₂⊗β₂) replaced by α₁⊗α₂");
    }
    out.omega = Some(omega.render());

    let r = &mut out.report;
    r.extend(cocycle_checks(host, &omega, cap)?);
    match decide_triviality(host, &omega, cap)? {
        Verdict::Trivial(found) => r.push(Check::pass("cls = 0: TRIVIAL", found.render().trim_end().to_string())),
        Verdict::NonTrivial(cert) => {
            let text = cert.render(b);
            r.push(Check::fail("cls = 0: TRIVIAL", "NON-TRIVIAL, see certificate"));
            out.certificate = Some(text);
        }
        Verdict::Inconclusive(_, why) => r.push(Check::inconclusive("cls = 0: TRIVIAL", why)),
    }
    let r = &mut out.report;
    r.push(Check::from_outcome("D(ψ₂¹(β₂⊗β₂) = γ) = ω", check_solution(host, &omega, &psi, cap)));

    r.line("      ψ ----∂----> ∂ψ = ω^{1,3} ----∂----> 0");
    r.line("      |                   |");
    r.line("      δ                   δ");
    r.line("      v                   v");
    r.line("  δψ = ω^{2,2} ---∂---> ∂ω^{2,2} = δω^{1,3}");
    Ok(())
}

/// Closed-form expansions of the shuffle product, the perturbed product on
/// letters and the block transpose of `Δβ⊗Δβ`, compared with the computed
/// values.
pub fn expansion_checks(p: &Pipeline) -> Result<Vec<Check>> {
    let bar = &p.bar;
    let letters = bar.algebra().basis();
    let word = |names: &[&str]| -> Result<u32> {
        let ids = names.iter().map(|n| letters.lookup(n)).collect::<Result<Vec<_>>>()?;
        bar.index_of(&ids)
    };
    let compare = |name: &str, got: Element, want: Element| {
        if got == want {
            Check::pass(name, got.render())
        } else {
            Check::fail(name, format!("computed {}", got.render()))
        }
    };
    let mut checks = Vec::new();

    let shuffled = bar.shuffle_product(word(&["a2", "a3"])?, word(&["b"])?)?;
    checks.push(compare(
        "sh([a2|a3]⊗[b]) = [a2|a3|b] + [a2|b|a3] + [b|a2|a3]",
        shuffled,
        bar.parse("[a2|a3|b] + [a2|b|a3] + [b|a2|a3]")?,
    ));

    let cup_one = bar.algebra().e_family().get(&1);
    let positive: Vec<u32> = (0..letters.len() as u32).filter(|&x| letters.degree(x) > 0).collect();
    let pairs: Vec<Tuple> = positive.iter().flat_map(|&x| positive.iter().map(move |&y| vec![x, y])).collect();
    checks.push(Check::equality(
        "μ_BA([x]⊗[y]) = [x|y] + [y|x] + [x⌣₁y] for all letters x, y",
        pairs,
        |t| letters.render_tuple(t),
        |t| bar.perturbed_product(bar.index_of(&t[..1])?, bar.index_of(&t[1..])?),
        |t| {
            let mut want = Element::zero(bar.basis(), 1);
            want.add_tuple(vec![bar.index_of(&[t[0], t[1]])?]);
            want.add_tuple(vec![bar.index_of(&[t[1], t[0]])?]);
            if let Some(e) = cup_one {
                for c in e.eval(t)?.terms() {
                    want.add_tuple(vec![bar.index_of(c)?]);
                }
            }
            Ok(want)
        },
    ));
    checks.push(compare(
        "μ_BA([b]⊗[b]) = [b|b] + [b|b] + [b⌣₁b] = [a2a3]",
        bar.perturbed_product(word(&["b"])?, word(&["b"])?)?,
        bar.parse("[a2a3]")?,
    ));

    let h = p.host.basis();
    let beta = h.lookup("beta")?;
    let coproduct = p.host.coproduct()?.eval(&[beta])?;
    checks.push(compare(
        "σ₂,₂(Δβ⊗Δβ) = 1⊗1⊗β⊗β + β⊗1⊗1⊗β + 1⊗β⊗β⊗1 + β⊗β⊗1⊗1",
        coproduct.tensor(&coproduct)?.sigma_permute(2, 2)?,
        Element::parse(h, "1*1*beta*beta + beta*1*1*beta + 1*beta*beta*1 + beta*beta*1*1", Some(4))?,
    ));
    Ok(checks)
}

/// Options of the loop-space demo.
#[derive(Debug, Clone)]
pub struct LoopOptions {
    pub cap: i32,
    /// 2 pins `g₂¹(β⊗β) = [a2|a3]`, 3 pins `[a3|a2]`.
    pub pin_i: u8,
    /// A cochain to decide instead of running the transfer.
    pub omega: Option<String>,
}

impl Default for LoopOptions {
    fn default() -> Self {
        Self { cap: 8, pin_i: 2, omega: None }
    }
}

/// Loop-space demo: transfer with the chosen pin, value checks, cocycle test
/// and the triviality decision, which must be non-trivial.
pub fn loopspace_report(opts: &LoopOptions) -> DemoOutcome {
    let mut command = String::from("demo loopspace");
    if opts.omega.is_some() {
        command.push_str(" --skip-transfer");
    } else if opts.pin_i != 2 {
        command.push_str(&format!(" --pin-i {}", opts.pin_i));
    }
    let mut out = DemoOutcome::new(RunReport::new(command));
    if let Err(e) = loopspace_into(opts, &mut out) {
        out.report.abort("loop-space pipeline", &e);
    }
    out
}

fn loopspace_into(opts: &LoopOptions, out: &mut DemoOutcome) -> Result<()> {
    if opts.cap < 4 {
        return Err(Error::Window(format!("β⊗β has degree 4, above the cap {}", opts.cap)));
    }
    let p = Pipeline::loopspace(opts.cap)?;
    let host = &p.host;
    let b = host.basis();
    out.report.line(format!("homology dimensions through degree {}: {:?}", opts.cap, p.homology.dims()));
    out.report.extend(expansion_checks(&p)?);

    if let Some(text) = &opts.omega {
        let omega = parse_cochain(text, host)?;
        out.report.extend(cocycle_checks(host, &omega, opts.cap)?);
        let verdict = decide_triviality(host, &omega, opts.cap)?;
        record_verdict(out, &verdict, b);
        out.omega = Some(omega.render());
        return Ok(());
    }

    let pins = loop_pin(&p, opts.pin_i)?;
    out.report.line(format!("pin g₂¹(β⊗β) = {}", pins[0].value));
    let state = transfer(&p, pins)?;
    let (checks, verdict) = verify_loopspace(&state, opts.pin_i)?;
    let w13 = state.omega(3, 1);
    let beta = b.lookup("beta")?;
    let outside: Vec<String> = w13
        .table()
        .iter()
        .filter(|(k, _)| !(k[0] == beta && k[1] == beta) && !(k[1] == beta && k[2] == beta))
        .map(|(k, v)| format!("{} -> {v}", b.render_tuple(k)))
        .collect();
    let nonzero = |m, n| if state.omega(m, n).is_zero() { "= 0" } else { "≠ 0" };
    let r = &mut out.report;
    let swapped = !state.omega(3, 1).is_zero() && state.omega(1, 3).is_zero();
    r.line(format!(
        "computed pattern: ω^{{1,3}} {}, ω^{{2,2}} {}, ω^{{3,1}} {}{}",
        nonzero(3, 1),
        nonzero(2, 2),
        nonzero(1, 3),
        if swapped { " (not ω^{1,3} = 0 with ω^{3,1} ≠ 0: the outer parts are the other way round)" } else { "" }
    ));
    if !outside.is_empty() {
        r.line(format!(
            "ω^{{1,3}} is also nonzero on {} inputs not of the form β⊗β⊗σ or σ⊗β⊗β, e.g. {}",
            outside.len(),
            outside[0]
        ));
    }
    r.extend(checks);
    if opts.pin_i == 3 {
        let other = transfer(&p, loop_pin(&p, 2)?)?;
        let checks = compare_loop_pins(&other, &state)?;
        out.report.extend(checks);
    }
    if let Verdict::NonTrivial(cert) = &verdict {
        out.certificate = Some(cert.render(b));
    }
    out.omega = Some(state.omega_cochain()?.render());
    Ok(())
}

fn record_verdict(out: &mut DemoOutcome, verdict: &Verdict, b: &crate::graded::GradedBasis) {
    match verdict {
        Verdict::NonTrivial(cert) => {
            out.report.push(Check::pass("cls ≠ 0: NON-TRIVIAL", ""));
            out.certificate = Some(cert.render(b));
        }
        Verdict::Trivial(psi) => {
            out.report.push(Check::fail("cls ≠ 0: NON-TRIVIAL", format!("trivialized by\n{}", psi.render())))
        }
        Verdict::Inconclusive(_, why) => out.report.push(Check::inconclusive("cls ≠ 0: NON-TRIVIAL", why.clone())),
    }
}
