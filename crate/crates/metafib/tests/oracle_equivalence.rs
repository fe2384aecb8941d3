//! Cross-checks between the compiled engine, the memoized reference
//! evaluator, and the text round trip. The heavyweight 200-spec version of
//! the equivalence check runs in the acceptance suite; this one keeps the
//! property alive at a size quick enough for every test run.

mod common;

use common::{assert_engine_matches_reference, random_spec};
use metafib::dsl::{parse, validate};
use metafib::families::Family;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn presets_agree_with_the_reference() {
    let presets = [
        Family::Q,
        Family::Qdl { d: 4, l: 2 },
        Family::Conway { i: 1 },
        Family::Aij { i: 1, j: 1 },
        Family::Aij { i: 1, j: 2 },
        Family::Hk { k: 3 },
        Family::Hk { k: 7 },
        Family::Vc,
        Family::Qrs { r: 1, s: 4 },
    ];
    for preset in presets {
        assert_engine_matches_reference(&preset.spec().unwrap(), 2_000);
    }
}

#[test]
fn fuzzed_rules_agree_with_the_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..64 {
        let spec = random_spec(&mut rng);
        assert_engine_matches_reference(&spec, 2_000);
    }
}

#[test]
fn printed_rules_parse_back_to_the_same_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    for _ in 0..128 {
        let spec = random_spec(&mut rng);
        let text = spec.pretty();
        let reparsed = validate(
            &parse(&text).unwrap_or_else(|e| panic!("printed rule must parse: {text:?}: {e}")),
        )
        .unwrap_or_else(|e| panic!("printed rule must validate: {text:?}: {e:?}"));
        assert_eq!(reparsed, spec, "round trip of {text:?}");
        assert_eq!(reparsed.pretty(), text, "printing is a fixed point");
    }
}
