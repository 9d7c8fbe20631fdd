use proptest::prelude::*;
use pwquant_core::oracle::{
    brute_force_finite, brute_force_infinite, lloyd_multistart, relative_error, LloydOptions,
};
use pwquant_core::rational::r;
use pwquant_core::{
    optimal_allocations, optimal_error, sequence_of_order, PiecewiseUniform, Rational, UniformPiece,
};

#[test]
fn exhaustive_search_agrees_with_induction() {
    for n in 2..=16 {
        assert_eq!(
            brute_force_infinite(n).unwrap(),
            sequence_of_order(n).unwrap(),
            "n = {n}"
        );
    }
}

#[test]
fn exhaustive_allocations_agree_on_three_piece() {
    let d = PiecewiseUniform::three_piece();
    for n in 3..=40 {
        assert_eq!(
            brute_force_finite(&d, n).unwrap(),
            optimal_allocations(&d, n).unwrap(),
            "n = {n}"
        );
    }
}

/// Random finite distributions: 2 to 5 pieces with small integer lengths,
/// gaps and weights, rescaled to total mass 1.
fn arb_pieces() -> impl Strategy<Value = PiecewiseUniform> {
    prop::collection::vec((1i64..4, 0i64..3, 1i64..6), 2..=5).prop_map(|spec| {
        let total: i64 = spec.iter().map(|&(_, _, w)| w).sum();
        let mut left = 0i64;
        let mut pieces = Vec::new();
        for (len, gap, w) in spec {
            let lo = left + gap;
            // mass w / total spread over length len
            let density = r(w, total * len);
            pieces.push(
                UniformPiece::new(Rational::integer(lo), Rational::integer(lo + len), density)
                    .unwrap(),
            );
            left = lo + len;
        }
        PiecewiseUniform::finite(pieces).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn greedy_allocation_matches_exhaustive_search(d in arb_pieces(), extra in 0usize..14) {
        let n = d.piece_count().unwrap() + extra;
        prop_assert_eq!(brute_force_finite(&d, n).unwrap(), optimal_allocations(&d, n).unwrap());
    }
}

fn lloyd_agrees(dist: &PiecewiseUniform, n: usize, exact: &Rational) {
    let s = lloyd_multistart(dist, n, &LloydOptions::default()).unwrap();
    let rel = relative_error(s.distortion, exact);
    assert!(
        rel <= 1e-9,
        "n = {n}: lloyd {} vs exact {exact} (relative {rel:e})",
        s.distortion
    );
}

#[test]
fn lloyd_reaches_exact_optimum_on_geometric_family() {
    let d = PiecewiseUniform::InfiniteGeometric;
    for n in 1..=6 {
        lloyd_agrees(&d, n, &optimal_error(&d, n).unwrap());
    }
}

#[test]
fn lloyd_reaches_exact_optimum_on_three_piece() {
    let d = PiecewiseUniform::three_piece();
    lloyd_agrees(&d, 2, &r(11, 972));
    for n in [1, 3, 4, 5, 6] {
        lloyd_agrees(&d, n, &optimal_error(&d, n).unwrap());
    }
}
