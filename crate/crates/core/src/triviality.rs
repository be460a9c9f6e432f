//! Deciding whether a GS 2-cocycle `ω` is `D(ψ)` for a cochain `ψ` with
//! parts of tridegree `(-1,2,1)` and `(-1,1,2)`.
//!
//! `D(ψ) = ω` is a GF(2) linear system in the coefficients of `ψ`. The
//! actions in `∂` and `δ` multiply values of `ψ` by further tensor factors,
//! so the equations at one input degree involve unknowns at all lower
//! degrees; what every term preserves is the weight shift from input to
//! output. The system therefore splits by shift, and within a shift the
//! equations at inputs of degree at most `t` only involve unknowns of degree
//! at most `t`. Shifts where `ω` vanishes are solved by zero. An infeasible
//! shift is reported at the smallest such degree bound, together with an
//! irreducible infeasible set of equations: they sum to `0 = 1`, and
//! dropping any one of them makes the rest solvable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, SpanSolver};
use crate::graded::{Element, Evaluate, GradedBasis, MultiMap, Tuple, Weight};
use crate::gs::{dependencies, total_d, Differential, GSCochain, Tridegree};
use crate::presentation::AlgebraPresentation;

/// Tridegrees of the unknown parts.
pub const UNKNOWN_PARTS: [Tridegree; 2] = [(-1, 2, 1), (-1, 1, 2)];

/// Coefficient of `output` in the value of the `part` at `input`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown {
    pub part: Tridegree,
    pub input: Tuple,
    pub output: Tuple,
}

/// Coefficient of `output` in the `component` of `D(ψ)` at `input`, as a sum
/// of unknowns, with the corresponding coefficient of `ω` on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub component: Tridegree,
    pub input: Tuple,
    pub output: Tuple,
    pub unknowns: Vec<Unknown>,
    pub rhs: bool,
}

/// A subsystem: one weight shift, inputs of degree at most `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockKey {
    pub shift: Weight,
    pub max_degree: i32,
}

/// An infeasible block with the equations that witness it.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub block: BlockKey,
    pub unknowns: usize,
    pub equations: usize,
    /// Irreducible infeasible subsystem of the full block.
    pub core: Vec<Equation>,
    /// The `(-1,2,2)` equations with only `∂` of the `(-1,1,2)` part, when
    /// already infeasible on their own.
    pub partial_only: Option<Vec<Equation>>,
    /// The `(-1,2,2)` equations with only `δ` of the `(-1,2,1)` part, when
    /// already infeasible on their own.
    pub delta_only: Option<Vec<Equation>>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Trivial(GSCochain),
    NonTrivial(Box<Certificate>),
    /// The truncated system is solvable but the host differential leaves the
    /// behaviour past the window undetermined; carries the truncated solution.
    Inconclusive(GSCochain, String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Trivial(_) => "TRIVIAL",
            Verdict::NonTrivial(_) => "NON-TRIVIAL",
            Verdict::Inconclusive(..) => "INCONCLUSIVE",
        }
    }
}

/// Which `(part, differential)` contributions and which components enter a
/// system.
struct Shape {
    terms: Vec<(Tridegree, Differential)>,
    only_component: Option<Tridegree>,
}

impl Shape {
    fn full(host: &AlgebraPresentation) -> Self {
        let mut terms = vec![
            ((-1, 2, 1), Differential::Partial),
            ((-1, 2, 1), Differential::Delta),
            ((-1, 1, 2), Differential::Partial),
            ((-1, 1, 2), Differential::Delta),
        ];
        if !host.has_zero_differential() {
            terms.push(((-1, 2, 1), Differential::Nabla));
            terms.push(((-1, 1, 2), Differential::Nabla));
        }
        Shape { terms, only_component: None }
    }

    fn single(part: Tridegree, which: Differential) -> Self {
        Shape { terms: vec![(part, which)], only_component: Some(which.target(part)) }
    }
}

/// One block of the system, with rows and columns as dense GF(2) vectors.
struct Block {
    unknowns: Vec<Unknown>,
    equations: Vec<Equation>,
    columns: Vec<BitVec>,
    rhs: BitVec,
}

impl Block {
    fn solve(&self) -> Option<Vec<usize>> {
        let solver = SpanSolver::from_columns(self.equations.len(), &self.columns);
        solver.solve(&self.rhs)
    }

    /// Rows as vectors `(coefficients, rhs)` of length `unknowns + 1`.
    fn row_vectors(&self) -> Vec<BitVec> {
        let index: HashMap<&Unknown, usize> = self.unknowns.iter().enumerate().map(|(i, u)| (u, i)).collect();
        let n = self.unknowns.len();
        self.equations
            .iter()
            .map(|e| {
                let mut v = BitVec::from_indices(n + 1, e.unknowns.iter().map(|u| index[u]));
                v.set(n, e.rhs);
                v
            })
            .collect()
    }

    /// A set of rows summing to `0 = 1`, shrunk until no row can be dropped.
    fn irreducible_infeasible(&self) -> Option<Vec<Equation>> {
        let rows = self.row_vectors();
        let n = self.unknowns.len();
        let target = BitVec::unit(n + 1, n);
        let mut support = SpanSolver::from_columns(n + 1, &rows).solve(&target)?;
        let mut k = support.len();
        while k > 0 {
            k -= 1;
            let trial: Vec<BitVec> =
                support.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| rows[r].clone()).collect();
            if let Some(smaller) = SpanSolver::from_columns(n + 1, &trial).solve(&target) {
                let kept: Vec<usize> = support.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| r).collect();
                support = smaller.into_iter().map(|i| kept[i]).collect();
                k = k.min(support.len());
            }
        }
        Some(support.into_iter().map(|r| self.equations[r].clone()).collect())
    }
}

/// Caches tuples of one basis split by degree and weight.
struct TupleIndex<'a> {
    basis: &'a GradedBasis,
    cache: HashMap<(usize, i32), BTreeMap<Weight, Vec<Tuple>>>,
}

impl<'a> TupleIndex<'a> {
    fn new(basis: &'a GradedBasis) -> Self {
        Self { basis, cache: HashMap::new() }
    }

    fn all(&mut self, arity: usize, degree: i32) -> Vec<Tuple> {
        let basis = self.basis;
        let blocks = self.cache.entry((arity, degree)).or_insert_with(|| basis.tuples_by_weight(arity, degree));
        let mut out: Vec<Tuple> = blocks.values().flatten().cloned().collect();
        out.sort();
        out
    }

    fn get(&mut self, arity: usize, degree: i32, weight: &Weight) -> Vec<Tuple> {
        let basis = self.basis;
        self.cache
            .entry((arity, degree))
            .or_insert_with(|| basis.tuples_by_weight(arity, degree))
            .get(weight)
            .cloned()
            .unwrap_or_default()
    }
}

fn add_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub_weights(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn build_block(
    host: &AlgebraPresentation,
    omega: &GSCochain,
    key: &BlockKey,
    shape: &Shape,
    tuples: &mut TupleIndex,
) -> Result<Block> {
    let b = host.basis();
    let mut unknowns: Vec<Unknown> = Vec::new();
    let mut by_input: HashMap<(Tridegree, Tuple), Vec<(Tuple, usize)>> = HashMap::new();
    let parts: BTreeSet<Tridegree> = shape.terms.iter().map(|&(p, _)| p).collect();
    for &part in &parts {
        let (p, m, n) = part;
        for s in 0..=key.max_degree {
            for input in tuples.all(m, s) {
                let out_weight = add_weights(&b.tuple_weight(&input), &key.shift);
                for output in tuples.get(n, s + p, &out_weight) {
                    by_input.entry((part, input.clone())).or_default().push((output.clone(), unknowns.len()));
                    unknowns.push(Unknown { part, input: input.clone(), output });
                }
            }
        }
    }
    let mut rows: HashMap<(Tridegree, Tuple, Tuple), (BTreeSet<usize>, bool)> = HashMap::new();
    let components: BTreeSet<Tridegree> = shape.terms.iter().map(|&(p, w)| w.target(p)).collect();
    for &(part, which) in &shape.terms {
        let component = which.target(part);
        let top = if which == Differential::Nabla { key.max_degree - 1 } else { key.max_degree };
        for s in 0..=top {
            for t in tuples.all(component.1, s) {
                for (input, post) in dependencies(host, which, &t)?.iter() {
                    let Some(candidates) = by_input.get(&(part, input.clone())) else { continue };
                    for (y, u) in candidates {
                        for o in post.apply(host, y)?.terms() {
                            let row = rows.entry((component, t.clone(), o.clone())).or_default();
                            if !row.0.insert(*u) {
                                row.0.remove(u);
                            }
                        }
                    }
                }
            }
        }
    }
    for (&component, f) in omega.parts() {
        if shape.only_component.is_some_and(|c| c != component) {
            continue;
        }
        if shape.only_component.is_none() || components.contains(&component) {
            for (t, value) in f.table() {
                if b.tuple_degree(t) > key.max_degree {
                    continue;
                }
                for o in value.terms().iter().filter(|o| shift_of(b, t, o) == key.shift) {
                    let row = rows.entry((component, t.clone(), o.clone())).or_default();
                    row.1 = !row.1;
                }
            }
        }
    }
    let mut keys: Vec<_> = rows.into_iter().filter(|(_, (u, r))| !u.is_empty() || *r).collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    let mut columns = vec![BitVec::zeros(keys.len()); unknowns.len()];
    let mut rhs = BitVec::zeros(keys.len());
    let mut equations = Vec::with_capacity(keys.len());
    for (r, ((component, input, output), (us, bit))) in keys.into_iter().enumerate() {
        for &u in &us {
            columns[u].set(r, true);
        }
        rhs.set(r, bit);
        let unknowns = us.iter().map(|&u| unknowns[u].clone()).collect();
        equations.push(Equation { component, input, output, unknowns, rhs: bit });
    }
    Ok(Block { unknowns, equations, columns, rhs })
}

fn shift_of(b: &GradedBasis, t: &[u32], o: &[u32]) -> Weight {
    sub_weights(&b.tuple_weight(o), &b.tuple_weight(t))
}

/// Decides whether `omega` is `D(ψ)`, on inputs of degree at most `window`.
/// `omega` must be supported there; it is not re-checked for the cocycle
/// condition (see [`crate::gs::is_gs_2cocycle`]).
pub fn decide_triviality(host: &AlgebraPresentation, omega: &GSCochain, window: i32) -> Result<Verdict> {
    let b = host.basis();
    if window > host.cap() {
        return Err(Error::Window(format!("window {window} exceeds the host cap {}", host.cap())));
    }
    host.coproduct()?;
    let zero_d = host.has_zero_differential();
    let mut lowest: BTreeMap<Weight, i32> = BTreeMap::new();
    for f in omega.parts().values() {
        if !f.source().same(b) || !f.target().same(b) {
            return Err(Error::BasisMismatch);
        }
        for (t, value) in f.table() {
            let degree = b.tuple_degree(t);
            if degree > window {
                return Err(Error::Window(format!(
                    "omega is nonzero at {} of degree {degree} above the window {window}",
                    b.render_tuple(t)
                )));
            }
            for o in value.terms() {
                let low = lowest.entry(shift_of(b, t, o)).or_insert(degree);
                *low = (*low).min(degree);
            }
        }
    }
    let mut tuples = TupleIndex::new(b);
    let full = Shape::full(host);
    let mut parts: BTreeMap<Tridegree, MultiMap> =
        UNKNOWN_PARTS.iter().map(|&(p, m, n)| ((p, m, n), MultiMap::zero(b, b, m, n, p))).collect();
    for (shift, low) in lowest {
        let key = BlockKey { shift: shift.clone(), max_degree: window };
        let block = build_block(host, omega, &key, &full, &mut tuples)?;
        if let Some(combo) = block.solve() {
            for u in combo {
                let unknown = &block.unknowns[u];
                let part = parts.get_mut(&unknown.part).expect("unknown parts are preallocated");
                part.add_to(unknown.input.clone(), &Element::from_tuple(b, unknown.output.clone()))?;
            }
            continue;
        }
        for max_degree in low..=window {
            let key = BlockKey { shift: shift.clone(), max_degree };
            let block = build_block(host, omega, &key, &full, &mut tuples)?;
            if block.solve().is_some() {
                continue;
            }
            let core = block
                .irreducible_infeasible()
                .ok_or_else(|| Error::Invalid("inconsistent system without a contradictory row combination".into()))?;
            let mut sub = |part, which| -> Result<Option<Vec<Equation>>> {
                let block = build_block(host, omega, &key, &Shape::single(part, which), &mut tuples)?;
                Ok(block.irreducible_infeasible())
            };
            let partial_only = sub((-1, 1, 2), Differential::Partial)?;
            let delta_only = sub((-1, 2, 1), Differential::Delta)?;
            return Ok(Verdict::NonTrivial(Box::new(Certificate {
                block: key,
                unknowns: block.unknowns.len(),
                equations: block.equations.len(),
                core,
                partial_only,
                delta_only,
            })));
        }
        return Err(Error::Invalid("the full system is infeasible but no truncation is".into()));
    }
    let mut psi = GSCochain::new();
    for part in parts.into_values() {
        psi.add_part(part.with_domain_cap(Some(window)))?;
    }
    if let Some(witness) = check_solution(host, omega, &psi, window)? {
        return Err(Error::Invalid(format!("solution fails verification: {witness}")));
    }
    if zero_d {
        Ok(Verdict::Trivial(psi))
    } else {
        Ok(Verdict::Inconclusive(psi, "the host differential couples degrees past the window".into()))
    }
}

/// `None` when `D(psi)` agrees with `omega` on all inputs up to `window`
/// (`∇` components up to `window - 1`), otherwise a witness.
pub fn check_solution(
    host: &AlgebraPresentation,
    omega: &GSCochain,
    psi: &GSCochain,
    window: i32,
) -> Result<Option<String>> {
    let b = host.basis();
    let d_psi = total_d(host, &psi.clone(), window - i32::from(!host.has_zero_differential()))?;
    let keys: BTreeSet<Tridegree> = d_psi.parts().keys().chain(omega.parts().keys()).copied().collect();
    for key in keys {
        let top = if host.has_zero_differential() || key.0 == -1 { window } else { window - 1 };
        let lhs = d_psi.part(key.0, key.1, key.2);
        let rhs = omega.part(key.0, key.1, key.2);
        let inputs: BTreeSet<&Tuple> = lhs.iter().chain(rhs.iter()).flat_map(|f| f.table().keys()).collect();
        for t in inputs {
            if b.tuple_degree(t) > top {
                continue;
            }
            let value = |f: Option<&MultiMap>| {
                f.and_then(|f| f.table().get(t).cloned()).unwrap_or_else(|| Element::zero(b, key.2))
            };
            let (l, r) = (value(lhs), value(rhs));
            if l != r {
                return Ok(Some(format!(
                    "D(psi) part ({},{},{}) at {}: {} != {}",
                    key.0,
                    key.1,
                    key.2,
                    b.render_tuple(t),
                    l,
                    r
                )));
            }
        }
    }
    Ok(None)
}

fn part_name((_, m, n): Tridegree) -> String {
    format!("psi{m}{n}")
}

/// `psi12[beta -> 1*alpha1]`.
pub fn render_unknown(b: &GradedBasis, u: &Unknown) -> String {
    format!("{}[{} -> {}]", part_name(u.part), b.render_tuple(&u.input), b.render_tuple(&u.output))
}

/// `equation <degree> : <input> : (p,m,n) <output> : <unknowns> = <0|1>`.
pub fn render_equation(b: &GradedBasis, e: &Equation) -> String {
    let lhs = if e.unknowns.is_empty() {
        "0".to_string()
    } else {
        e.unknowns.iter().map(|u| render_unknown(b, u)).collect::<Vec<_>>().join(" + ")
    };
    let (p, m, n) = e.component;
    format!(
        "equation {} : {} : ({p},{m},{n}) {} : {lhs} = {}",
        b.tuple_degree(&e.input),
        b.render_tuple(&e.input),
        b.render_tuple(&e.output),
        u8::from(e.rhs)
    )
}

impl Certificate {
    /// Whether an equation of `rows` sits at the input tuple `t`.
    pub fn mentions(rows: &[Equation], t: &[u32]) -> bool {
        rows.iter().any(|e| e.input == t)
    }

    /// Byte-stable text form.
    pub fn render(&self, b: &GradedBasis) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# non-triviality certificate for D(psi21 + psi12) = omega");
        let _ = writeln!(
            out,
            "# subsystem: weight shift {:?}, inputs of degree at most {}",
            self.block.shift, self.block.max_degree
        );
        let _ = writeln!(out, "# block size: {} unknowns, {} equations", self.unknowns, self.equations);
        let _ = writeln!(out, "# psiMN[x -> y] is the coefficient of y in psiMN(x)");
        let _ = writeln!(out, "# the equations below sum to 0 = 1; dropping any one makes the rest solvable");
        for e in &self.core {
            let _ = writeln!(out, "{}", render_equation(b, e));
        }
        for (label, rows) in [
            ("partial of psi12 alone cannot reach omega(-1,2,2)", &self.partial_only),
            ("delta of psi21 alone cannot reach omega(-1,2,2)", &self.delta_only),
        ] {
            if let Some(rows) = rows {
                let _ = writeln!(out, "# {label}:");
                for e in rows {
                    let _ = writeln!(out, "{}", render_equation(b, e));
                }
            }
        }
        out
    }
}

/// Sum of the rows of `rows` as `(unknowns, rhs)`; an infeasible certificate
/// sums to no unknowns and rhs one.
pub fn sum_rows(rows: &[Equation]) -> (BTreeSet<Unknown>, bool) {
    let mut acc = BTreeSet::new();
    let mut rhs = false;
    for e in rows {
        for u in &e.unknowns {
            if !acc.insert(u.clone()) {
                acc.remove(u);
            }
        }
        rhs ^= e.rhs;
    }
    (acc, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn host() -> AlgebraPresentation {
        parse_presentation(
            "field 2\ncap 5\nbasis 1 0\nbasis x 2\nbasis y 4\nbasis z 3\nbasis w 5\nunit 1\n\
             mu x x = y\nmu x z = w\nmu z x = w\n\
             delta x = 1*x + x*1\ndelta y = 1*y + y*1\ndelta z = 1*z + z*1\n\
             delta w = 1*w + x*z + z*x + w*1\n",
        )
        .unwrap()
    }

    #[test]
    fn zero_is_trivial() {
        let h = host();
        match decide_triviality(&h, &GSCochain::new(), 5).unwrap() {
            Verdict::Trivial(psi) => assert!(psi.is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coboundaries_are_trivial() {
        let h = host();
        let b = h.basis();
        let mut psi = GSCochain::new();
        let mut f = MultiMap::zero(b, b, 1, 2, -1);
        f.insert(vec![b.lookup("w").unwrap()], Element::parse(b, "x*x", Some(2)).unwrap()).unwrap();
        psi.add_part(f).unwrap();
        let omega = total_d(&h, &psi, 5).unwrap();
        assert!(!omega.is_zero());
        match decide_triviality(&h, &omega, 5).unwrap() {
            Verdict::Trivial(found) => assert_eq!(check_solution(&h, &omega, &found, 5).unwrap(), None),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unreachable_values_give_certificates() {
        let h = host();
        let b = h.basis();
        // No unknown reaches tridegree (-2,4,1).
        let mut omega = GSCochain::new();
        let mut f = MultiMap::zero(b, b, 4, 1, -2);
        f.insert(vec![0, 0, 1, 1], Element::parse(b, "x", Some(1)).unwrap()).unwrap();
        omega.add_part(f).unwrap();
        match decide_triviality(&h, &omega, 5).unwrap() {
            Verdict::NonTrivial(cert) => {
                let (rest, rhs) = sum_rows(&cert.core);
                assert!(rest.is_empty() && rhs);
                assert!(cert.render(b).contains("equation 4 : 1*1*x*x : (-2,4,1) x : 0 = 1"), "{}", cert.render(b));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn window_is_enforced() {
        let h = host();
        assert!(matches!(decide_triviality(&h, &GSCochain::new(), 9), Err(Error::Window(_))));
    }
}
