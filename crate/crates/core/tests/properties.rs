use pwquant_core::{
    optimal_allocations, quantizer_of_sequence, sequence_error, CanonicalChain, CanonicalSequence,
    PiecewiseUniform, Rational,
};

/// Canonical sequences and their errors for orders 2..=max, in order.
fn chain(max: usize) -> Vec<(CanonicalSequence, Rational)> {
    CanonicalChain::new()
        .take(max - 1)
        .map(Result::unwrap)
        .collect()
}

#[test]
fn blocks_decrease_then_end_in_one() {
    for (s, _) in chain(200) {
        let b = s.blocks();
        if b.len() >= 2 {
            assert_eq!(*b.last().unwrap(), 1, "{s}");
            assert!(b[..b.len() - 1].windows(2).all(|w| w[0] > w[1]), "{s}");
            assert!(b[b.len() - 2] >= b[b.len() - 1], "{s}");
        }
    }
}

#[test]
fn every_suffix_is_canonical_for_its_own_order() {
    let all = chain(200);
    for (s, _) in &all {
        let b = s.blocks();
        for m in 1..b.len() {
            let suffix = CanonicalSequence::new(b[m..].to_vec()).unwrap();
            assert_eq!(suffix, all[suffix.order() - 2].0, "suffix {m} of {s}");
        }
    }
}

#[test]
fn each_step_increments_one_block_or_appends_one() {
    let all = chain(200);
    for w in all.windows(2) {
        let (a, b) = (w[0].0.blocks(), w[1].0.blocks());
        if b.len() == a.len() + 1 {
            assert_eq!(&b[..a.len()], a);
            assert_eq!(b[a.len()], 1);
        } else {
            assert_eq!(a.len(), b.len(), "{} -> {}", w[0].0, w[1].0);
            let diffs: Vec<_> = a.iter().zip(b).filter(|(x, y)| x != y).collect();
            assert_eq!(diffs.len(), 1);
            assert_eq!(*diffs[0].0 + 1, *diffs[0].1);
        }
    }
}

#[test]
fn quantizer_error_equals_sequence_error() {
    let d = PiecewiseUniform::InfiniteGeometric;
    for (s, e) in chain(200) {
        let q = quantizer_of_sequence(&s);
        assert_eq!(q.len(), s.order());
        assert_eq!(d.distortion(&q.points).unwrap(), e, "{s}");
        assert_eq!(sequence_error(&s), e);
    }
}

#[test]
fn errors_strictly_decrease() {
    let all = chain(200);
    let v1 = PiecewiseUniform::InfiniteGeometric.variance();
    assert!(all[0].1 < v1);
    for w in all.windows(2) {
        assert!(w[1].1 < w[0].1, "{} -> {}", w[0].0, w[1].0);
    }
}

#[test]
fn equal_pieces_get_symmetric_allocations() {
    let d = PiecewiseUniform::three_piece();
    for n in 4..=200 {
        let all = optimal_allocations(&d, n).unwrap();
        for a in &all {
            let c = &a.counts;
            assert!(2 * c[0] as usize >= n, "n = {n}: {c:?}");
            let swapped = vec![c[0], c[2], c[1]];
            assert!(all.iter().any(|b| b.counts == swapped), "n = {n}: {c:?}");
            assert!(c[1].abs_diff(c[2]) <= 1);
        }
        // two optima exactly when the last two pieces cannot split evenly
        let rest = n as u32 - all[0].counts[0];
        assert_eq!(all.len(), if rest % 2 == 1 { 2 } else { 1 }, "n = {n}");
    }
}
