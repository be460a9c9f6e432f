//! The finest additive multigrading preserved by the structure maps of a
//! presentation.
//!
//! Every table entry `x1..xm -> Σ y1..yn` asks that each output tuple carry
//! the summed weight of its inputs. The solutions form a rational vector
//! space; its integer basis gives each basis element a weight vector. Sums of
//! maps built from the structure maps then respect weights, so linear
//! systems split into one block per weight.

use crate::graded::{MultiMap, Weight};
use crate::presentation::AlgebraPresentation;

/// One weight vector per basis element of `a`; the unit has weight zero.
pub fn weight_grading(a: &AlgebraPresentation) -> Vec<Weight> {
    let len = a.basis().len();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut unit_row = vec![0; len];
    unit_row[a.unit() as usize] = 1;
    rows.push(unit_row);
    let mut maps: Vec<&MultiMap> = vec![a.d(), a.mu()];
    maps.extend(a.delta());
    maps.extend(a.e_family().values());
    for f in maps {
        for (input, value) in f.table() {
            for output in value.terms() {
                let mut row = vec![0; len];
                for &i in output {
                    row[i as usize] += 1;
                }
                for &i in input {
                    row[i as usize] -= 1;
                }
                if row.iter().any(|&c| c != 0) {
                    rows.push(row);
                }
            }
        }
    }
    rows.sort();
    rows.dedup();
    let basis = integer_nullspace(rows, len);
    (0..len).map(|i| basis.iter().map(|v| v[i]).collect()).collect()
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn normalize(row: &mut [i128]) {
    let g = row.iter().fold(0, |g, &c| gcd(g, c));
    if g > 1 {
        row.iter_mut().for_each(|c| *c /= g);
    }
}

/// Integer basis of the rational null space of `rows`.
pub fn integer_nullspace(rows: Vec<Vec<i64>>, cols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i128>> = rows.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        let Some(r) = (next..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(next, r);
        let pivot = m[next].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != next && row[c] != 0 {
                let factor = row[c];
                for (x, &p) in row.iter_mut().zip(&pivot) {
                    *x = *x * pivot[c] - p * factor;
                }
                normalize(row);
            }
        }
        pivots.push((next, c));
        next += 1;
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
        let scale = pivots.iter().fold(1i128, |l, &(r, c)| {
            let p = m[r][c].abs();
            l / gcd(l, p) * p
        });
        let mut v = vec![0i128; cols];
        v[free] = scale;
        for &(r, c) in &pivots {
            v[c] = -m[r][free] * scale / m[r][c];
        }
        normalize(&mut v);
        out.push(v.into_iter().map(|x| x as i64).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn check_null(rows: &[Vec<i64>], v: &[i64]) {
        for r in rows {
            assert_eq!(r.iter().zip(v).map(|(a, b)| a * b).sum::<i64>(), 0);
        }
    }

    #[test]
    fn nullspace_of_small_systems() {
        let rows = vec![vec![1, 1, -1]];
        let ns = integer_nullspace(rows.clone(), 3);
        assert_eq!(ns.len(), 2);
        ns.iter().for_each(|v| check_null(&rows, v));
        let rows = vec![vec![2, -1, 0], vec![0, 3, -1]];
        let ns = integer_nullspace(rows.clone(), 3);
        assert_eq!(ns, vec![vec![1, 2, 6]]);
        assert_eq!(integer_nullspace(vec![], 2).len(), 2);
    }

    #[test]
    fn cup_one_square_ties_weights() {
        let a = parse_presentation(
            "field 2\ncap 8\nbasis 1 0\nbasis a2 2\nbasis a3 3\nbasis b 3\nbasis a2a3 5\nunit 1\n\
             mu a2 a3 = a2a3\nmu a3 a2 = a2a3\nE 1 1 b ; b = a2a3\n",
        )
        .unwrap();
        let w = weight_grading(&a);
        assert_eq!(w[0].len(), 2);
        assert!(w[0].iter().all(|&x| x == 0));
        let sum = |i: usize, j: usize| -> Vec<i64> { w[i].iter().zip(&w[j]).map(|(x, y)| x + y).collect() };
        assert_eq!(sum(1, 2), w[4]);
        assert_eq!(sum(3, 3), w[4]);
        assert_ne!(w[1], w[2]);
    }
}
