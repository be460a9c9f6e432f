//! Brute-force references shared by the oracle and acceptance targets.

use std::collections::BTreeMap;

use hopfdeform_core::{bar_basis, homology_of_pair, parse_presentation, BarComplex, BitMatrix, BitVec, Evaluate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All ways to cut `len` letters into `k` consecutive, possibly empty pieces,
/// as the list of cut points.
fn cuts(len: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![0, len]];
    }
    let mut out = Vec::new();
    for first in 0..=len {
        for rest in cuts(len - first, k - 1) {
            let mut c = vec![0];
            c.extend(rest.iter().map(|r| r + first));
            out.push(c);
        }
    }
    out
}

/// `Σ_k E^{⊗k} ψ^{(k−1)}(u⊗v)`: the iterated coproduct of `BA⊗BA` splits
/// both words into `k` pieces each, and every pair of pieces goes through
/// `E_{0,1}`, `E_{1,0}` or `E_{1,q}`; any other pair, the empty one included,
/// contributes zero.
pub fn literal_product(bar: &BarComplex, u: &[u32], v: &[u32]) -> BTreeMap<Vec<u32>, bool> {
    let algebra = bar.algebra();
    let mut words: BTreeMap<Vec<u32>, bool> = BTreeMap::new();
    // k = 0 is the counit term, nonzero only on [] ⊗ []
    if u.is_empty() && v.is_empty() {
        words.insert(Vec::new(), true);
    }
    for k in 1..=u.len() + v.len() {
        for cu in cuts(u.len(), k) {
            for cv in cuts(v.len(), k) {
                let mut partial: Vec<Vec<u32>> = vec![Vec::new()];
                for s in 0..k {
                    let (left, right) = (&u[cu[s]..cu[s + 1]], &v[cv[s]..cv[s + 1]]);
                    let letters: Vec<u32> = match (left.len(), right.len()) {
                        (1, 0) => vec![left[0]],
                        (0, 1) => vec![right[0]],
                        (1, q) if q > 0 => match algebra.e_family().get(&q) {
                            Some(e) => {
                                let mut args = left.to_vec();
                                args.extend_from_slice(right);
                                e.eval(&args).unwrap().terms().iter().map(|t| t[0]).collect()
                            }
                            None => Vec::new(),
                        },
                        _ => Vec::new(),
                    };
                    partial = partial
                        .iter()
                        .flat_map(|w| {
                            letters.iter().map(move |&x| {
                                let mut w = w.clone();
                                w.push(x);
                                w
                            })
                        })
                        .collect();
                }
                for w in partial {
                    if w.len() == k {
                        *words.entry(w).or_default() ^= true;
                    }
                }
            }
        }
    }
    words.retain(|_, odd| *odd);
    words
}

fn engine_product(bar: &BarComplex, i: u32, j: u32) -> BTreeMap<Vec<u32>, bool> {
    bar.perturbed_product(i, j).unwrap().terms().iter().map(|t| (bar.word(t[0]).to_vec(), true)).collect()
}

/// Compares the perturbed product with the literal formula on every pair of
/// words of length at most 3 and total degree at most `cap`; returns the
/// number of pairs compared.
pub fn check_products(text: &str, cap: i32) -> Result<usize, String> {
    let algebra = parse_presentation(text).map_err(|e| e.to_string())?;
    let bar = bar_basis(&algebra, cap).map_err(|e| e.to_string())?;
    let short: Vec<u32> = (0..bar.basis().len() as u32).filter(|&i| bar.word(i).len() <= 3).collect();
    let mut compared = 0;
    for &i in &short {
        for &j in &short {
            let b = bar.basis();
            if b.degree(i) + b.degree(j) > cap {
                continue;
            }
            let literal = literal_product(&bar, bar.word(i), bar.word(j));
            if engine_product(&bar, i, j) != literal {
                return Err(format!("{} (x) {}", b.name(i), b.name(j)));
            }
            compared += 1;
        }
    }
    Ok(compared)
}

fn all_vectors(n: usize) -> impl Iterator<Item = BitVec> {
    (0u32..1 << n).map(move |bits| BitVec::from_indices(n, (0..n).filter(|&i| bits >> i & 1 == 1)))
}

fn span(columns: &[BitVec], n: usize) -> Vec<BitVec> {
    let mut out = vec![BitVec::zeros(n)];
    for c in columns {
        let extra: Vec<BitVec> = out
            .iter()
            .map(|v| {
                let mut w = v.clone();
                w.xor_assign(c);
                w
            })
            .collect();
        out.extend(extra);
    }
    out.sort_by_key(|v| v.to_bits());
    out.dedup();
    out
}

/// Random complexes on spaces of dimension at most 12, with every vector
/// enumerated: rank, cocycle test, class map, representatives and the
/// independence of the class basis modulo boundaries.
pub fn check_homology(seed: u64, trials: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let n = rng.gen_range(1..=12usize);
        let rows = rng.gen_range(0..=6usize);
        let d_out = BitMatrix::from_rows(
            &(0..rows).map(|_| (0..n).map(|_| u8::from(rng.gen_bool(0.4))).collect()).collect::<Vec<_>>(),
        );
        let d_out = if rows == 0 { BitMatrix::zeros(0, n) } else { d_out };
        let kernel: Vec<BitVec> = all_vectors(n).filter(|v| d_out.mul_vec(v).unwrap().is_zero()).collect();
        let columns: Vec<BitVec> =
            (0..rng.gen_range(0..=5usize)).map(|_| kernel[rng.gen_range(0..kernel.len())].clone()).collect();
        let d_in = BitMatrix::from_columns(n, &columns);
        let image = span(&columns, n);

        let h = homology_of_pair(&d_in, &d_out).map_err(|e| format!("trial {trial}: {e}"))?;
        let expected_rank = (kernel.len() / image.len()).trailing_zeros() as usize;
        ensure(h.rank() == expected_rank, trial, "rank")?;

        for z in all_vectors(n) {
            let in_kernel = kernel.contains(&z);
            ensure(h.is_cocycle(&z) == in_kernel, trial, "cocycle test")?;
            if in_kernel {
                let class = h.class_of(&z).map_err(|e| format!("trial {trial}: {e}"))?;
                ensure(class.is_zero() == image.contains(&z), trial, "class of a boundary")?;
                let mut back = h.representative_of(&class);
                back.xor_assign(&z);
                ensure(image.contains(&back), trial, "representative differs by a non-boundary")?;
            } else {
                ensure(h.class_of(&z).is_err(), trial, "class of a non-cocycle")?;
            }
        }
        let reps = h.class_basis();
        for subset in 1u32..1 << reps.len() {
            let mut sum = BitVec::zeros(n);
            for (k, r) in reps.iter().enumerate() {
                if subset >> k & 1 == 1 {
                    sum.xor_assign(r);
                }
            }
            ensure(!image.contains(&sum), trial, "class basis is dependent modulo boundaries")?;
        }
    }
    Ok(())
}

fn ensure(ok: bool, trial: usize, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(format!("trial {trial}: {what}"))
    }
}
