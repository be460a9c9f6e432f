use std::sync::OnceLock;

use hopfdeform_core::graded::sigma_tuple;
use hopfdeform_core::gs::{commutation_checks, random_cochain, tridegrees_up_to};
use hopfdeform_core::{
    d_squared_check, kernel_basis, rref, solve_affine, AlgebraPresentation, BitMatrix, BitVec, Pipeline, Status,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small() -> &'static Pipeline {
    static PIPELINE: OnceLock<Pipeline> = OnceLock::new();
    PIPELINE.get_or_init(|| Pipeline::loopspace(5).unwrap())
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = BitMatrix> {
    proptest::collection::vec(proptest::collection::vec(0u8..2, cols), rows).prop_map(move |r| {
        if r.is_empty() {
            BitMatrix::zeros(0, cols)
        } else {
            BitMatrix::from_rows(&r)
        }
    })
}

fn sized_matrix() -> impl Strategy<Value = BitMatrix> {
    (0usize..8, 1usize..10).prop_flat_map(|(r, c)| matrix(r, c))
}

fn assert_weights_preserved(host: &AlgebraPresentation) {
    let b = host.basis();
    let mut maps = vec![host.d(), host.mu()];
    maps.extend(host.delta());
    for f in maps {
        for (input, value) in f.table() {
            for output in value.terms() {
                assert_eq!(b.tuple_weight(input), b.tuple_weight(output), "{}", b.render_tuple(input));
            }
        }
    }
}

#[test]
fn structure_maps_preserve_weights() {
    let p = small();
    assert_weights_preserved(&p.bar_host);
    assert_weights_preserved(&p.host);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_plus_nullity_is_the_width(m in sized_matrix()) {
        let kernel = kernel_basis(&m);
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for k in &kernel {
            prop_assert!(m.mul_vec(k).unwrap().is_zero());
        }
    }

    #[test]
    fn reduced_form_is_idempotent(m in sized_matrix()) {
        let (once, pivots) = rref(&m);
        let (twice, again) = rref(&once);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(pivots, again);
    }

    #[test]
    fn affine_solutions_solve(m in sized_matrix(), x in proptest::collection::vec(0u8..2, 9)) {
        let x = BitVec::from_bits(&x[..m.cols()]);
        let b = m.mul_vec(&x).unwrap();
        let found = solve_affine(&m, &b).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul_vec(&found).unwrap(), b);
    }

    #[test]
    fn block_transpose_inverts(m in 1usize..4, n in 1usize..4, seed in any::<u64>()) {
        let t: Vec<u32> = (0..m * n).map(|i| (seed.rotate_left(i as u32 * 7) % 11) as u32).collect();
        prop_assert_eq!(sigma_tuple(n, m, &sigma_tuple(m, n, &t)), t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn total_differential_squares_to_zero(seed in any::<u64>()) {
        let p = small();
        for host in [&p.host, &p.bar_host] {
            let c = d_squared_check(host, &tridegrees_up_to(4, -2..=0), 4, 2, seed);
            prop_assert_eq!(c.status, Status::Pass, "{}", c.witness);
        }
    }

    #[test]
    fn differentials_commute(seed in any::<u64>()) {
        let p = small();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tridegrees = tridegrees_up_to(3, -1..=0);
        let c = random_cochain(&p.bar_host, &tridegrees, 4, 0.3, &mut rng).unwrap();
        prop_assume!(!c.is_zero());
        let checks = commutation_checks(&p.bar_host, &c, 4);
        prop_assert_eq!(checks.len(), 3);
        for check in checks {
            prop_assert_eq!(check.status, Status::Pass, "{}: {}", check.name, check.witness);
        }
    }
}
