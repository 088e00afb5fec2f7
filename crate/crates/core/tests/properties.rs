//! Properties that cross module boundaries: streams restricted by selections,
//! counted by empirics and compared with measures.

use normlab_core::empirics::{block_frequencies, pattern_frequency, WildcardPattern};
use normlab_core::measures::{predicted_restricted_frequency, MeasureSpec, PredictionOptions, SpreadBlock};
use normlab_core::selectors::{
    compose, restrict, superficial_decomposition, DecompositionParams, GapRule, ListSet, SetSpec,
};
use normlab_core::sources::{
    build_preserving_pair, Alphabet, GarciaHedlundStream, SymbolStreamExt, ThueMorseStream, VecStream,
};
use proptest::prelude::*;

fn specs() -> Vec<MeasureSpec> {
    vec![
        MeasureSpec::fair_coin(),
        MeasureSpec::bernoulli(vec![0.2, 0.3, 0.5]),
        MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]]),
        MeasureSpec::Periodic { pattern: vec![0, 0, 1, 1] },
        MeasureSpec::GaussCf,
    ]
}

fn increasing(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

#[test]
fn automatic_sequences_along_their_own_progressions() {
    let n = 100_000;
    let gh = GarciaHedlundStream::new().take_prefix(3 * n);
    for i in 1..=n {
        assert_eq!(gh[3 * i - 1], gh[i - 1], "n = {i}");
    }
    let tm = ThueMorseStream::new().take_prefix(2 * n);
    for i in 1..=n {
        assert_eq!(tm[2 * i - 2], tm[i - 1]);
        assert_eq!(tm[2 * i - 1], 1 - tm[i - 1]);
    }
}

#[test]
fn preserving_pair_along_everything_is_the_identity() {
    let n = 50_000;
    let y = vec![1u8; n];
    let dec = superficial_decomposition(&y, DecompositionParams::default()).unwrap();
    let spec = MeasureSpec::bernoulli(vec![0.3, 0.7]);
    let z = spec.sample_stream(4).unwrap().take_prefix(n);
    let x = build_preserving_pair(spec.sample_stream(4).unwrap(), &dec)
        .unwrap()
        .take_prefix(n);
    assert_eq!(x, z);
}

#[test]
fn restricted_markov_pattern_tracks_its_prediction() {
    let mu = MeasureSpec::markov(vec![vec![0.9, 0.1], vec![0.1, 0.9]]);
    let set = SetSpec::Gaps {
        rule: GapRule::IidGaps {
            values: vec![1, 3],
            weights: vec![0.5, 0.5],
        },
        seed: 11,
    };
    let sb = SpreadBlock::contiguous(vec![0, 0]).unwrap();
    let nu = set.derived_measure().unwrap();
    let p = predicted_restricted_frequency(&mu, &nu, &sb, PredictionOptions::default()).unwrap();
    // consecutive members at distance 1 or 3, each with probability 1/2
    let oracle = 0.5 * 0.25 * (1.0 + 0.8) + 0.5 * 0.25 * (1.0 + 0.8f64.powi(3));
    assert!((p.value - oracle).abs() < 1e-12);
    let xs = restrict(mu.sample_stream(2).unwrap(), set.build().unwrap()).take_prefix(1_000_000);
    let fr = pattern_frequency(&xs, &WildcardPattern::from_spread_block(&sb)).unwrap();
    assert!((fr - oracle).abs() < 0.01, "{fr}");
}

#[test]
fn zero_gaps_spread_equals_cylinder() {
    for spec in specs() {
        let blocks: Vec<Vec<u64>> = match spec.alphabet() {
            Alphabet::Naturals => vec![vec![1], vec![2, 1], vec![1, 3, 1]],
            Alphabet::Finite(_) => vec![vec![0], vec![1, 0], vec![0, 1, 1], vec![1, 1, 0, 0]],
        };
        for b in blocks {
            let sb = SpreadBlock::contiguous(b.clone()).unwrap();
            assert_eq!(spec.spread_cylinder_measure(&sb).unwrap(), spec.cylinder_measure(&b).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_sampler_replays(seed in any::<u64>(), which in 0usize..5, n in 1usize..2000) {
        let spec = &specs()[which];
        let a = spec.sample_stream(seed).unwrap().take_prefix(n);
        let b = spec.sample_stream(seed).unwrap().take_prefix(n);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn restricting_twice_is_restricting_once(
        x in prop::collection::vec(0u64..2, 400),
        s in prop::collection::vec(1u64..=400, 1..200),
        t in prop::collection::vec(1u64..=60, 1..40),
    ) {
        let s = increasing(s);
        let t: Vec<u64> = increasing(t).into_iter().filter(|&i| i as usize <= s.len()).collect();
        prop_assume!(!t.is_empty());
        let stream = || VecStream::new(Alphabet::binary(), x.clone()).unwrap().boxed();
        let inner = restrict(stream(), Box::new(ListSet::new(s.clone()))).boxed();
        let twice = restrict(inner, Box::new(ListSet::new(t.clone()))).take_prefix(t.len());
        let composed = compose(Box::new(ListSet::new(s.clone())), Box::new(ListSet::new(t.clone())));
        let once = restrict(stream(), Box::new(composed)).take_prefix(t.len());
        let direct: Vec<u64> = t.iter().map(|&i| x[(s[i as usize - 1] - 1) as usize]).collect();
        prop_assert_eq!(&twice, &direct);
        prop_assert_eq!(&once, &direct);
    }

    #[test]
    fn restricting_to_everything_changes_nothing(seed in any::<u64>(), n in 1usize..3000) {
        let spec = MeasureSpec::bernoulli(vec![0.25, 0.75]);
        let x = spec.sample_stream(seed).unwrap().take_prefix(n);
        let all = SetSpec::Progression { start: 1, step: 1 }.build().unwrap();
        let y = restrict(spec.sample_stream(seed).unwrap(), all).take_prefix(n);
        prop_assert_eq!(x, y);
    }

    #[test]
    fn star_free_patterns_are_block_lookups(x in prop::collection::vec(0u64..3, 8..300), b in prop::collection::vec(0u64..3, 1..5)) {
        prop_assume!(b.len() <= x.len());
        let table = block_frequencies(&x, Alphabet::Finite(3), b.len(), None).unwrap();
        let fr = pattern_frequency(&x, &WildcardPattern::contiguous(&b).unwrap()).unwrap();
        prop_assert_eq!(fr, table.frequency(&b));
    }
}
