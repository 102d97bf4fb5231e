//! Reed–Solomon over GF(256) with generator roots α^0 … α^(ec_len−1).
//!
//! Codewords are stored highest-degree coefficient first, the layout QR symbols
//! use: data bytes followed by parity bytes. Decoding is Berlekamp–Massey for
//! the error locator, Chien search for positions and Forney for magnitudes.

use super::gf::{alpha_pow, gf_div, gf_mul};
use thiserror::Error;

pub const MAX_EC_LEN: usize = 30;
pub const MAX_CODEWORD_LEN: usize = 255;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("parity length {0} outside 1..={MAX_EC_LEN}")]
    BadEcLength(usize),
    #[error("no data bytes")]
    EmptyData,
    #[error("codeword of {len} bytes does not fit a block with {ec_len} parity bytes")]
    BadCodewordLength { len: usize, ec_len: usize },
    #[error("too many errors to correct")]
    Uncorrectable,
}

fn check_ec_len(ec_len: usize) -> Result<(), RsError> {
    if (1..=MAX_EC_LEN).contains(&ec_len) {
        Ok(())
    } else {
        Err(RsError::BadEcLength(ec_len))
    }
}

/// ∏ (x − α^i) for i in 0..ec_len, monic, highest degree first.
pub fn generator_poly(ec_len: usize) -> Vec<u8> {
    let mut g = vec![1u8];
    for i in 0..ec_len {
        let root = alpha_pow(i as i64);
        let mut next = vec![0u8; g.len() + 1];
        for (j, &c) in g.iter().enumerate() {
            next[j] ^= c;
            next[j + 1] ^= gf_mul(c, root);
        }
        g = next;
    }
    g
}

fn remainder(data: &[u8], generator: &[u8]) -> Vec<u8> {
    let ec_len = generator.len() - 1;
    let mut parity = vec![0u8; ec_len];
    for &d in data {
        let factor = d ^ parity[0];
        parity.rotate_left(1);
        parity[ec_len - 1] = 0;
        for (p, &g) in parity.iter_mut().zip(&generator[1..]) {
            *p ^= gf_mul(g, factor);
        }
    }
    parity
}

/// Parity bytes: data·x^ec_len mod g(x).
pub fn rs_encode(data: &[u8], ec_len: usize) -> Result<Vec<u8>, RsError> {
    check_ec_len(ec_len)?;
    if data.is_empty() {
        return Err(RsError::EmptyData);
    }
    if data.len() + ec_len > MAX_CODEWORD_LEN {
        return Err(RsError::BadCodewordLength {
            len: data.len() + ec_len,
            ec_len,
        });
    }
    Ok(remainder(data, &generator_poly(ec_len)))
}

/// S_i = c(α^i) for i in 0..ec_len.
pub fn syndromes(codeword: &[u8], ec_len: usize) -> Vec<u8> {
    (0..ec_len)
        .map(|i| {
            let x = alpha_pow(i as i64);
            codeword.iter().fold(0u8, |acc, &c| gf_mul(acc, x) ^ c)
        })
        .collect()
}

/// Evaluates a lowest-degree-first polynomial.
fn eval_low_first(poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| gf_mul(acc, x) ^ c)
}

/// Error locator Λ(x), lowest degree first, and its length L.
fn berlekamp_massey(synd: &[u8]) -> (Vec<u8>, usize) {
    let n = synd.len();
    let mut lambda = vec![0u8; n + 1];
    let mut prev = vec![0u8; n + 1];
    lambda[0] = 1;
    prev[0] = 1;
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = 1u8;

    for r in 0..n {
        let mut disc = synd[r];
        for i in 1..=len {
            disc ^= gf_mul(lambda[i], synd[r - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let coef = gf_div(disc, prev_disc).expect("previous discrepancy is nonzero");
        let snapshot = lambda.clone();
        for i in 0..=n - shift {
            lambda[i + shift] ^= gf_mul(coef, prev[i]);
        }
        if 2 * len <= r {
            len = r + 1 - len;
            prev = snapshot;
            prev_disc = disc;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    lambda.truncate(len + 1);
    (lambda, len)
}

/// Corrects up to `floor(ec_len / 2)` byte errors in place and returns the
/// data portion with the number of bytes changed.
///
/// A result is only returned if re-encoding the corrected data reproduces the
/// corrected parity; anything else is [`RsError::Uncorrectable`].
pub fn rs_correct(codeword: &[u8], ec_len: usize) -> Result<(Vec<u8>, usize), RsError> {
    check_ec_len(ec_len)?;
    let n = codeword.len();
    if n <= ec_len || n > MAX_CODEWORD_LEN {
        return Err(RsError::BadCodewordLength { len: n, ec_len });
    }
    let synd = syndromes(codeword, ec_len);
    if synd.iter().all(|&s| s == 0) {
        return Ok((codeword[..n - ec_len].to_vec(), 0));
    }

    let (lambda, errors) = berlekamp_massey(&synd);
    if errors == 0 || 2 * errors > ec_len || lambda[errors] == 0 {
        return Err(RsError::Uncorrectable);
    }

    // Chien search: index j carries x^(n-1-j), so its locator is α^(n-1-j).
    let positions: Vec<usize> = (0..n)
        .filter(|&j| eval_low_first(&lambda, alpha_pow(-((n - 1 - j) as i64))) == 0)
        .collect();
    if positions.len() != errors {
        return Err(RsError::Uncorrectable);
    }

    // Ω(x) = S(x)Λ(x) mod x^ec_len
    let mut omega = vec![0u8; ec_len];
    for (i, &l) in lambda.iter().enumerate() {
        for (j, &s) in synd.iter().enumerate() {
            if i + j < ec_len {
                omega[i + j] ^= gf_mul(l, s);
            }
        }
    }
    // Formal derivative: only odd-degree terms survive in characteristic 2.
    let lambda_prime: Vec<u8> = (1..lambda.len())
        .map(|i| if i % 2 == 1 { lambda[i] } else { 0 })
        .collect();

    let mut fixed = codeword.to_vec();
    for &j in &positions {
        let power = (n - 1 - j) as i64;
        let x = alpha_pow(power);
        let x_inv = alpha_pow(-power);
        let denom = eval_low_first(&lambda_prime, x_inv);
        let magnitude = gf_mul(
            x,
            gf_div(eval_low_first(&omega, x_inv), denom).map_err(|_| RsError::Uncorrectable)?,
        );
        if magnitude == 0 {
            return Err(RsError::Uncorrectable);
        }
        fixed[j] ^= magnitude;
    }

    let (data, parity) = fixed.split_at(n - ec_len);
    if remainder(data, &generator_poly(ec_len)) != parity {
        return Err(RsError::Uncorrectable);
    }
    Ok((data.to_vec(), positions.len()))
}

#[cfg(test)]
mod tests {
    use super::super::gf::REDUCTION_POLY;
    use super::*;
    use rand::{Rng, SeedableRng};

    fn slow_mul(mut a: u8, mut b: u8) -> u8 {
        let mut acc = 0u8;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            let carry = a & 0x80 != 0;
            a <<= 1;
            if carry {
                a ^= (REDUCTION_POLY & 0xFF) as u8;
            }
            b >>= 1;
        }
        acc
    }

    fn slow_alpha(i: usize) -> u8 {
        (0..i).fold(1u8, |acc, _| slow_mul(acc, 2))
    }

    /// Multiplies out the linear factors lowest degree first, then reverses.
    fn factor_product(ec_len: usize) -> Vec<u8> {
        let mut p = vec![1u8];
        for i in 0..ec_len {
            let root = slow_alpha(i);
            let mut next = vec![0u8; p.len() + 1];
            for (k, &c) in p.iter().enumerate() {
                next[k] ^= slow_mul(c, root);
                next[k + 1] ^= c;
            }
            p = next;
        }
        p.reverse();
        p
    }

    fn slow_syndromes(cw: &[u8], ec_len: usize) -> Vec<u8> {
        (0..ec_len)
            .map(|i| {
                let x = slow_alpha(i);
                cw.iter().fold(0u8, |acc, &c| slow_mul(acc, x) ^ c)
            })
            .collect()
    }

    #[test]
    fn generator_matches_factor_product() {
        for ec_len in 1..=MAX_EC_LEN {
            assert_eq!(generator_poly(ec_len), factor_product(ec_len), "ec_len {ec_len}");
        }
        // Well-known 7-parity generator (log form 0, 87, 229, 146, 149, 238, 102, 21).
        let logs: Vec<u8> = generator_poly(7)
            .iter()
            .map(|&c| crate::qrcode::gf::gf_log(c).unwrap())
            .collect();
        assert_eq!(logs, [0, 87, 229, 146, 149, 238, 102, 21]);
    }

    #[test]
    fn zero_data_gives_zero_parity() {
        assert_eq!(rs_encode(&[0; 19], 7).unwrap(), vec![0; 7]);
    }

    #[test]
    fn encoded_codewords_have_zero_syndromes() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for ec_len in [7, 10, 15, 16, 26] {
            for _ in 0..50 {
                let len = rng.gen_range(1..=60);
                let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                let mut cw = data.clone();
                cw.extend(rs_encode(&data, ec_len).unwrap());
                assert!(slow_syndromes(&cw, ec_len).iter().all(|&s| s == 0));
                assert_eq!(syndromes(&cw, ec_len), slow_syndromes(&cw, ec_len));
            }
        }
    }

    #[test]
    fn reference_codeword() {
        // "HELLO WORLD" 1-M data codewords and parity from the QR specification's worked example.
        let data = [
            0x20, 0x5B, 0x0B, 0x78, 0xD1, 0x72, 0xDC, 0x4D, 0x43, 0x40, 0xEC, 0x11, 0xEC, 0x11,
            0xEC, 0x11,
        ];
        assert_eq!(
            rs_encode(&data, 10).unwrap(),
            [0xC4, 0x23, 0x27, 0x77, 0xEB, 0xD7, 0xE7, 0xE2, 0x5D, 0x17]
        );
    }

    #[test]
    fn argument_errors() {
        assert_eq!(rs_encode(&[1], 0), Err(RsError::BadEcLength(0)));
        assert_eq!(rs_encode(&[1], 31), Err(RsError::BadEcLength(31)));
        assert_eq!(rs_encode(&[], 7), Err(RsError::EmptyData));
        assert!(matches!(rs_encode(&[0; 250], 7), Err(RsError::BadCodewordLength { .. })));
        assert!(matches!(rs_correct(&[0; 7], 7), Err(RsError::BadCodewordLength { .. })));
    }

    #[test]
    fn clean_codeword_needs_no_correction() {
        let data = b"HCTIS1|ENG|1|N07|S1042".to_vec();
        let mut cw = data.clone();
        cw.extend(rs_encode(&data, 7).unwrap());
        assert_eq!(rs_correct(&cw, 7).unwrap(), (data, 0));
    }

    #[test]
    fn single_error_at_every_position() {
        let data: Vec<u8> = (0..19u8).map(|i| i.wrapping_mul(37).wrapping_add(5)).collect();
        let mut cw = data.clone();
        cw.extend(rs_encode(&data, 7).unwrap());
        for pos in 0..cw.len() {
            for flip in [0x01, 0x80, 0x5A, 0xFF] {
                let mut bad = cw.clone();
                bad[pos] ^= flip;
                assert_eq!(rs_correct(&bad, 7).unwrap(), (data.clone(), 1), "pos {pos}");
            }
        }
    }

    #[test]
    fn four_errors_with_seven_parity_never_silently_wrong() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        for _ in 0..2000 {
            let data: Vec<u8> = (0..19).map(|_| rng.gen()).collect();
            let mut cw = data.clone();
            cw.extend(rs_encode(&data, 7).unwrap());
            let mut positions: Vec<usize> = (0..cw.len()).collect();
            for k in 0..4 {
                let j = rng.gen_range(k..positions.len());
                positions.swap(k, j);
                cw[positions[k]] ^= rng.gen_range(1..=255u8);
            }
            match rs_correct(&cw, 7) {
                Err(RsError::Uncorrectable) => {}
                Ok((fixed, n)) => {
                    // Landing on a different valid codeword is the only other outcome.
                    assert_ne!(fixed, data);
                    assert!(n <= 3);
                    let mut re = fixed.clone();
                    re.extend(rs_encode(&fixed, 7).unwrap());
                    assert!(syndromes(&re, 7).iter().all(|&s| s == 0));
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
}
