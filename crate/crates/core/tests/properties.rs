mod common;

use std::collections::BTreeMap;

use filtrate_core::coeff::{integer_rank, RingSpec};
use filtrate_core::emap::{ideal_member, EMap};
use filtrate_core::filt::{member_series, phi, product_sampler, SampleBudget};
use filtrate_core::magnus::{magnus, TruncSeries};
use filtrate_core::massey::{necklace, pairing_row, pairing_value};
use filtrate_core::words::{enumerate_monomials, lyndon_words, parse_word, GroupWord, Monomial};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring() -> impl Strategy<Value = RingSpec> {
    prop_oneof![Just(RingSpec::integers()), (1u32..=12).prop_map(RingSpec::modulo)]
}

fn word(alphabet: u32, max_len: usize) -> impl Strategy<Value = GroupWord> {
    let letter = (1..=alphabet as i32).prop_flat_map(|i| prop_oneof![Just(i), Just(-i)]);
    prop::collection::vec(letter, 0..=max_len).prop_map(move |ls| GroupWord::from_letters(alphabet, ls).unwrap())
}

fn series(ring: RingSpec, alphabet: u32, cap: usize) -> impl Strategy<Value = TruncSeries> {
    let term = (prop::collection::vec(1..=alphabet, 0..=cap), -6i64..=6);
    prop::collection::vec(term, 0..8).prop_map(move |ts| {
        TruncSeries::from_terms(ring.clone(), alphabet, cap, ts.into_iter().map(|(w, c)| (Monomial::new(w), BigInt::from(c))))
            .unwrap()
    })
}

fn emap() -> impl Strategy<Value = EMap> {
    prop_oneof![
        Just(EMap::Trivial),
        (0u64..=6).prop_map(EMap::constant),
        prop::collection::vec(0u64..=8, 6).prop_map(EMap::sequence_gcd),
        (prop::sample::select(vec![2u64, 3, 5]), 1u32..=2).prop_map(|(p, t)| EMap::zassenhaus(p, t).unwrap()),
    ]
}

/// Rank over `Q` by plain Gaussian elimination with rational pivots.
fn rational_rank(m: &[Vec<BigInt>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> =
        m.iter().map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in (0..cols).rev() {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduce_is_an_idempotent_ring_map(r in ring(), a in -1000i64..1000, b in -1000i64..1000) {
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let ra = r.reduce(&a);
        prop_assert_eq!(r.reduce(&ra), ra.clone());
        prop_assert_eq!(r.reduce(&(&a + &b)), r.reduce(&(&ra + r.reduce(&b))));
        prop_assert_eq!(r.reduce(&(&a * &b)), r.reduce(&(&ra * r.reduce(&b))));
    }

    #[test]
    fn bareiss_rank_matches_rational_elimination(
        m in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 6)
    ) {
        let m: Vec<Vec<BigInt>> = m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        prop_assert_eq!(integer_rank(&m), rational_rank(&m));
    }

    #[test]
    fn word_print_parse_round_trip(g in word(3, 12)) {
        prop_assert_eq!(parse_word(&g.to_string(), 3).unwrap(), g);
    }

    #[test]
    fn word_group_axioms(g in word(3, 8), h in word(3, 8), k in word(3, 8)) {
        prop_assert_eq!(g.multiply(&h).multiply(&k), g.multiply(&h.multiply(&k)));
        prop_assert!(g.multiply(&g.invert()).is_identity());
        prop_assert_eq!(g.multiply(&h).invert(), h.invert().multiply(&g.invert()));
    }

    #[test]
    fn magnus_is_a_homomorphism(
        g in word(2, 8), h in word(2, 8), cap in 1usize..=5,
        r in prop_oneof![Just(RingSpec::integers()), Just(RingSpec::modulo(6u32))]
    ) {
        let lhs = magnus(&g.multiply(&h), &r, cap);
        let rhs = magnus(&g, &r, cap).mul(&magnus(&h, &r, cap)).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(magnus(&g.invert(), &r, cap), magnus(&g, &r, cap).inverse().unwrap());
    }

    /// `(1 + β)⁻¹ = Σ (−β)^k` for `β` in the augmentation ideal.
    #[test]
    fn geometric_series_inverse(beta in series(RingSpec::integers(), 2, 4)) {
        let one = TruncSeries::one(RingSpec::integers(), 2, 4);
        let beta = beta.sub(&TruncSeries::one(RingSpec::integers(), 2, 4).scale(&beta.constant_term())).unwrap();
        let minus = beta.scale(&BigInt::from(-1));
        let mut sum = one.clone();
        let mut power = one.clone();
        for _ in 0..4 {
            power = power.mul(&minus).unwrap();
            sum = sum.add(&power).unwrap();
        }
        let unit = one.add(&beta).unwrap();
        prop_assert_eq!(unit.inverse().unwrap(), sum.clone());
        prop_assert!(unit.mul(&sum).unwrap().is_one());
    }

    #[test]
    fn series_ring_laws(
        (a, b, c) in ring().prop_flat_map(|r| (series(r.clone(), 2, 3), series(r.clone(), 2, 3), series(r, 2, 3)))
    ) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    /// Entry `(i, j)` of `φ_w(g)` is the coefficient of `x_{w_i}⋯x_{w_{j−1}}` in `μ(g)`.
    #[test]
    fn phi_entries_are_magnus_coefficients(
        g in word(3, 10), w in prop::collection::vec(1u32..=3, 1..=4), r in ring()
    ) {
        let w = Monomial::new(w);
        let m = phi(&w, &g, &r).unwrap();
        let s = magnus(&g, &r, w.len());
        for i in 1..=w.len() + 1 {
            for j in 1..=w.len() + 1 {
                let expected = match i.cmp(&j) {
                    std::cmp::Ordering::Greater => BigInt::zero(),
                    std::cmp::Ordering::Equal => r.reduce(&BigInt::one()),
                    std::cmp::Ordering::Less => s.coefficient(&w.subword(i - 1, j - 1)).unwrap(),
                };
                prop_assert_eq!(m.get(i, j), &expected, "entry ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn phi_is_a_homomorphism(g in word(3, 10), h in word(3, 10), w in prop::collection::vec(1u32..=3, 1..=4), r in ring()) {
        let w = Monomial::new(w);
        let lhs = phi(&w, &g.multiply(&h), &r).unwrap();
        prop_assert_eq!(lhs, phi(&w, &g, &r).unwrap().mul(&phi(&w, &h, &r).unwrap()));
    }

    #[test]
    fn evaluate_is_a_divisibility_chain(e in emap(), n in 1usize..=7) {
        let row = e.row(n).unwrap();
        prop_assert!(row[n - 1].is_one());
        for i in 1..n {
            let (a, b) = (&row[i - 1], &row[i]);
            prop_assert!(if b.is_zero() { a.is_zero() } else { (a % b).is_zero() }, "e({},{}) = {} vs {}", n, i, a, b);
        }
    }

    #[test]
    fn normalize_preserves_membership(
        rows in prop::collection::vec(0i64..=12, 1..=5), s in series(RingSpec::integers(), 2, 4)
    ) {
        let n = rows.len();
        let mut table: Vec<BigInt> = rows.into_iter().map(BigInt::from).collect();
        table[n - 1] = BigInt::one();
        let e = EMap::explicit(BTreeMap::from([(n, table)])).unwrap();
        let normal = e.normalize(n).unwrap();
        prop_assert!(normal.check_descending(n).is_ok());
        let s = s.sub(&TruncSeries::one(RingSpec::integers(), 2, 4).scale(&s.constant_term())).unwrap();
        prop_assert_eq!(ideal_member(&s, &e, n).unwrap(), ideal_member(&s, &normal, n).unwrap());
    }

    #[test]
    fn zassenhaus_over_z_matches_magnus_mod_p(g in word(2, 10), p in prop::sample::select(vec![2u64, 3]), n in 1usize..=5) {
        let e = EMap::zassenhaus(p, 1).unwrap();
        prop_assert_eq!(member_series(&g, &e, n).unwrap().member, magnus(&g, &RingSpec::modulo(p), n - 1).is_one());
    }
}

#[test]
fn lyndon_counts_are_necklace_numbers() {
    for m in 1..=3u32 {
        for n in 1..=7 {
            assert_eq!(BigInt::from(lyndon_words(m, n).len()), necklace(m as u64, n as u64), "m={m} n={n}");
        }
    }
}

#[test]
fn rational_rank_oracle_sanity() {
    let m = |rows: &[&[i64]]| -> Vec<Vec<BigInt>> { rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect() };
    assert_eq!(rational_rank(&m(&[&[1, 2], &[2, 4]])), 1);
    assert_eq!(rational_rank(&m(&[&[0, 1], &[1, 0]])), 2);
    assert_eq!(rational_rank(&m(&[&[0, 0]])), 0);
}

/// Weight-`(n+1)` commutators pair to zero, and pairing is additive on level-`n` elements.
#[test]
fn massey_pairing_additivity_and_vanishing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=4 {
        let alphabet = 2;
        let members = product_sampler(&EMap::Trivial, alphabet, n, &SampleBudget::with_count(25), rng.gen()).unwrap();
        let deeper = product_sampler(&EMap::Trivial, alphabet, n + 1, &SampleBudget::with_count(25), rng.gen()).unwrap();
        for k in 0..100 {
            let weights: BTreeMap<Monomial, BigInt> = enumerate_monomials(alphabet, n)
                .map(|w| (w, BigInt::from(rng.gen_range(-4..=4))))
                .collect();
            let g = &members[k % members.len()];
            let h = &members[rng.gen_range(0..members.len())];
            let pv = |x: &GroupWord| pairing_value(x, &weights, n).unwrap();
            assert_eq!(pv(&g.multiply(h)), pv(g) + pv(h));
            assert!(pv(&deeper[k % deeper.len()]).is_zero());
        }
    }
}

/// Oversampling level-`n` elements never pushes the rank past the necklace count.
#[test]
fn oversampled_rows_stay_below_necklace() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (alphabet, n) in [(2u32, 3usize), (2, 4), (3, 3)] {
        let rows: Vec<Vec<BigInt>> = product_sampler(&EMap::Trivial, alphabet, n, &SampleBudget::with_count(60), rng.gen())
            .unwrap()
            .iter()
            .map(|g| pairing_row(g, n))
            .collect();
        let r = integer_rank(&rows);
        assert!(BigInt::from(r) <= necklace(alphabet as u64, n as u64), "alphabet {alphabet}, n={n}: rank {r}");
    }
}

#[test]
fn seeded_words_close_under_membership() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = EMap::constant(2);
    for _ in 0..200 {
        let g = common::test_word(&mut rng, 2, 10);
        let h = common::test_word(&mut rng, 2, 10);
        for n in 1..=4 {
            let m = |x: &GroupWord| member_series(x, &e, n).unwrap().member;
            if m(&g) && m(&h) {
                assert!(m(&g.multiply(&h)) && m(&g.invert()));
            }
        }
    }
}
