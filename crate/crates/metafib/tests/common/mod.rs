//! Shared helpers for integration tests: a seeded generator of valid rules
//! and the engine-vs-reference equivalence check.

use metafib::dsl::{
    validate, IndexExpr, InitPattern, RecurrenceSpec, Sign, Summand, ValidatedSpec,
};
use metafib::eval::{compile, run, run_reference, ElementWidth, RunConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `A(n - c)` with a literal offset the threshold can cover.
fn lookback(rng: &mut ChaCha8Rng, start_after: u64) -> IndexExpr {
    IndexExpr::n()
        .sub(IndexExpr::int(rng.gen_range(1..=start_after)))
        .call()
}

/// One summand argument, drawn from shapes the validator accepts: literal
/// offsets within the threshold, phi only under floor/ceil, literal
/// divisors. Arguments may still go out of range at run time — death is a
/// result, not a generator bug.
fn random_argument(rng: &mut ChaCha8Rng, start_after: u64) -> IndexExpr {
    match rng.gen_range(0..6) {
        // n - A(n-c): the meta-Fibonacci workhorse
        0 => IndexExpr::n().sub(lookback(rng, start_after)),
        // A(n-c): direct nesting, Conway-style
        1 => lookback(rng, start_after),
        // n - A(n-c1) - A(n-c2)
        2 => IndexExpr::n()
            .sub(lookback(rng, start_after))
            .sub(lookback(rng, start_after)),
        // n - floor(A(n-c) * phi)
        3 => IndexExpr::n().sub(lookback(rng, start_after).mul(IndexExpr::phi()).floor()),
        // ceil((n + A(n-c)) / d)
        4 => IndexExpr::n()
            .add(lookback(rng, start_after))
            .ceil_div(IndexExpr::int(rng.gen_range(2..=5))),
        // n - A(n - A(n-c)): value-dependent offset inside the call
        _ => IndexExpr::n().sub(IndexExpr::n().sub(lookback(rng, start_after)).call()),
    }
}

/// A random rule that passes validation by construction.
pub fn random_spec(rng: &mut ChaCha8Rng) -> ValidatedSpec {
    let start_after = rng.gen_range(3..=8u64);
    let summands = (0..rng.gen_range(1..=3))
        .map(|i| Summand {
            sign: if i == 0 || rng.gen_bool(0.85) {
                Sign::Plus
            } else {
                Sign::Minus
            },
            argument: random_argument(rng, start_after),
        })
        .collect();
    let init = match rng.gen_range(0..4) {
        0 => InitPattern::ClosedForm(IndexExpr::n().ceil_div(IndexExpr::int(2))),
        1 => InitPattern::ClosedForm(
            IndexExpr::n()
                .mul(IndexExpr::int(2))
                .ceil_div(IndexExpr::int(3)),
        ),
        2 => InitPattern::ClosedForm(
            IndexExpr::n()
                .add(IndexExpr::int(2))
                .floor_div(IndexExpr::int(1).add(IndexExpr::phi())),
        ),
        _ => InitPattern::List(
            (0..start_after)
                .map(|_| rng.gen_range(1..=2 * start_after))
                .collect(),
        ),
    };
    let spec = RecurrenceSpec {
        name: "A".into(),
        summands,
        init,
        start_after,
    };
    validate(&spec).unwrap_or_else(|e| panic!("generator must emit valid specs: {e:?}"))
}

/// Asserts the compiled engine and the memoized reference agree on every
/// term, the outcome, and the death point, up to `cap_n`.
pub fn assert_engine_matches_reference(spec: &ValidatedSpec, cap_n: u64) {
    let config = RunConfig {
        cap_n,
        budget_bytes: 1 << 30,
        width: ElementWidth::W64,
    };
    let (history, outcome) = run(&compile(spec), spec.init(), &config);
    let (memo, ref_outcome) = run_reference(spec, cap_n);
    assert_eq!(outcome, ref_outcome, "outcome for {}", spec.pretty());
    assert_eq!(
        history.len(),
        memo.len() as u64,
        "length for {}",
        spec.pretty()
    );
    for (i, &expected) in memo.iter().enumerate() {
        let n = i as u64 + 1;
        assert_eq!(
            history.term(n),
            Some(expected),
            "term {n} of {}",
            spec.pretty()
        );
    }
}
