use proptest::prelude::*;

use rrz_core::negabinary::{
    decode, delta_interval, encode, j_closed_form, j_value, verify_bijection, NegabinaryWord,
};

#[test]
fn recurrence_matches_closed_form() {
    for n in 0..=62u32 {
        let step = j_value(n + 1).unwrap();
        let odd = i128::from(n % 2 == 1);
        assert_eq!(step, -2 * j_value(n).unwrap() + odd, "n = {n}");
        assert_eq!(j_value(n).unwrap(), j_closed_form(n));
    }
}

#[test]
fn endpoint_sums() {
    for n in 1..=20u32 {
        let d = delta_interval(n).unwrap();
        let lo: i128 = (0..)
            .take_while(|&l| 2 * l + 1 < n)
            .map(|l| (-2i128).pow(2 * l + 1))
            .sum();
        let hi: i128 = (0..)
            .take_while(|&l| 2 * l < n)
            .map(|l| (-2i128).pow(2 * l))
            .sum();
        assert_eq!((d.lo, d.hi), (lo, hi), "n = {n}");
        assert_eq!(d.cardinality(), 1u128 << n);
    }
}

#[test]
fn bijective_up_to_twenty() {
    for n in 1..=20 {
        let rep = verify_bijection(n, 20).unwrap();
        assert!(rep.passed, "n = {n}: {rep:?}");
        assert_eq!(rep.distinct_values, 1 << n);
    }
    assert!(verify_bijection(21, 20).is_err());
}

fn width_and_value() -> impl Strategy<Value = (u32, i128)> {
    (1u32..=20).prop_flat_map(|n| {
        let d = delta_interval(n).unwrap();
        (Just(n), d.lo..=d.hi)
    })
}

proptest! {
    #[test]
    fn decode_encode_roundtrip((n, q) in width_and_value()) {
        let w = encode(q, n).unwrap();
        prop_assert_eq!(w.width(), n);
        prop_assert_eq!(decode(&w), q);
    }

    #[test]
    fn encode_decode_roundtrip(n in 1u32..=20, mask in any::<u64>()) {
        let w = NegabinaryWord::from_mask(mask & ((1 << n) - 1), n);
        prop_assert_eq!(encode(decode(&w), n).unwrap(), w);
    }

    #[test]
    fn outside_is_rejected(n in 1u32..=20, off in 1i128..1000) {
        let d = delta_interval(n).unwrap();
        prop_assert!(encode(d.hi + off, n).is_err());
        prop_assert!(encode(d.lo - off, n).is_err());
    }
}
