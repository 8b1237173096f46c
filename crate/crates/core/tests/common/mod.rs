#![allow(dead_code)]

use filtrate_core::filt::random_word;
use filtrate_core::words::GroupWord;
use rand::Rng;

/// Random word of at most `max_len` letters, biased towards elements deep in
/// the filtrations: besides uniform reduced words it draws short products of
/// generator powers and commutators of powers.
pub fn test_word<R: Rng>(rng: &mut R, alphabet: u32, max_len: usize) -> GroupWord {
    if rng.gen_bool(0.4) {
        return random_word(rng, alphabet, max_len);
    }
    const EXPONENTS: [i64; 10] = [1, -1, 2, -2, 3, 4, -4, 6, 8, 9];
    let gen = |rng: &mut R| GroupWord::generator(alphabet, rng.gen_range(1..=alphabet));
    let mut out = GroupWord::identity(alphabet);
    for _ in 0..rng.gen_range(1..=4) {
        let block = match rng.gen_range(0..3) {
            0 => gen(rng).power(EXPONENTS[rng.gen_range(0..EXPONENTS.len())]),
            1 => {
                let a = gen(rng).power(EXPONENTS[rng.gen_range(0..4)]);
                let b = gen(rng).power(EXPONENTS[rng.gen_range(0..4)]);
                a.commutator(&b)
            }
            _ => {
                let a = gen(rng);
                let b = gen(rng);
                a.commutator(&b).commutator(&gen(rng))
            }
        };
        let next = out.multiply(&block);
        if next.len() <= max_len {
            out = next;
        }
    }
    out
}
