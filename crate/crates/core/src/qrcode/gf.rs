//! Arithmetic in GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x^2 + 1.
//!
//! α = 2 generates the multiplicative group. Log/antilog tables are computed at
//! compile time.

use thiserror::Error;

pub const REDUCTION_POLY: u16 = 0x11D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("division by zero in GF(256)")]
    DivisionByZero,
}

struct Tables {
    // exp is doubled so that log[a] + log[b] indexes without a modulo.
    exp: [u8; 512],
    log: [u8; 256],
}

static TABLES: Tables = build_tables();

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= REDUCTION_POLY;
        }
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

#[inline]
pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        return 0;
    }
    TABLES.exp[TABLES.log[a as usize] as usize + TABLES.log[b as usize] as usize]
}

#[inline]
pub fn gf_div(a: u8, b: u8) -> Result<u8, GfError> {
    if b == 0 {
        return Err(GfError::DivisionByZero);
    }
    if a == 0 {
        return Ok(0);
    }
    Ok(TABLES.exp[TABLES.log[a as usize] as usize + 255 - TABLES.log[b as usize] as usize])
}

#[inline]
pub fn gf_inv(a: u8) -> Result<u8, GfError> {
    gf_div(1, a)
}

/// `a^e`, with `0^0 = 1`.
pub fn gf_pow(a: u8, e: u32) -> u8 {
    if e == 0 {
        return 1;
    }
    if a == 0 {
        return 0;
    }
    let l = (TABLES.log[a as usize] as u64 * e as u64) % 255;
    TABLES.exp[l as usize]
}

/// α^i for any integer exponent.
#[inline]
pub fn alpha_pow(i: i64) -> u8 {
    TABLES.exp[i.rem_euclid(255) as usize]
}

/// Discrete log base α; `None` for zero.
#[inline]
pub fn gf_log(a: u8) -> Option<u8> {
    (a != 0).then(|| TABLES.log[a as usize])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Carry-less multiply with reduction, independent of the tables.
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

    #[test]
    fn table_mul_matches_carryless_mul() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(gf_mul(a, b), slow_mul(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn identity_and_zero() {
        for x in 0..=255u8 {
            assert_eq!(gf_mul(x, 1), x);
            assert_eq!(gf_mul(x, 0), 0);
        }
    }

    #[test]
    fn alpha_has_order_255() {
        let mut acc = 1u8;
        for k in 1..255 {
            acc = slow_mul(acc, 2);
            assert_ne!(acc, 1, "alpha^{k} = 1");
            assert_eq!(gf_pow(2, k), acc);
        }
        assert_eq!(slow_mul(acc, 2), 1);
        assert_eq!(gf_pow(2, 255), 1);
    }

    #[test]
    fn every_nonzero_element_has_an_inverse() {
        for a in 1..=255u8 {
            let inv = gf_inv(a).unwrap();
            assert_eq!(gf_mul(a, inv), 1);
            assert_eq!(gf_div(a, a), Ok(1));
        }
        assert_eq!(gf_div(7, 0), Err(GfError::DivisionByZero));
        assert_eq!(gf_inv(0), Err(GfError::DivisionByZero));
    }

    #[test]
    fn field_axioms_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(0x11D);
        for _ in 0..20_000 {
            let (a, b, c): (u8, u8, u8) = (rng.gen(), rng.gen(), rng.gen());
            assert_eq!(gf_mul(a, b), gf_mul(b, a));
            assert_eq!(gf_mul(gf_mul(a, b), c), gf_mul(a, gf_mul(b, c)));
            assert_eq!(gf_mul(a, b ^ c), gf_mul(a, b) ^ gf_mul(a, c));
        }
    }

    #[test]
    fn log_and_alpha_pow_agree() {
        for a in 1..=255u8 {
            assert_eq!(alpha_pow(gf_log(a).unwrap() as i64), a);
        }
        assert_eq!(gf_log(0), None);
        assert_eq!(alpha_pow(-1), gf_inv(2).unwrap());
        assert_eq!(gf_pow(0, 0), 1);
        assert_eq!(gf_pow(0, 3), 0);
    }
}
