//! GF(2⁸) arithmetic with reduction polynomial x⁸+x⁴+x³+x²+1.

use std::ops::{Add, Mul};

pub const REDUCTION: u16 = 0x11D;

const fn build_tables() -> ([u8; 512], [u8; 256]) {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= REDUCTION;
        }
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    (exp, log)
}

const TABLES: ([u8; 512], [u8; 256]) = build_tables();
static EXP: [u8; 512] = TABLES.0;
static LOG: [u8; 256] = TABLES.1;

/// `α^e` for any exponent; `α = 0x02`.
pub fn exp(e: usize) -> u8 {
    EXP[e % 255]
}

pub fn gf_mul(a: u8, b: u8) -> u8 {
    if a == 0 || b == 0 {
        0
    } else {
        EXP[LOG[a as usize] as usize + LOG[b as usize] as usize]
    }
}

/// Multiplicative inverse; `None` for zero.
pub fn gf_inv(a: u8) -> Option<u8> {
    (a != 0).then(|| EXP[255 - LOG[a as usize] as usize])
}

pub fn gf_div(a: u8, b: u8) -> Option<u8> {
    gf_inv(b).map(|ib| gf_mul(a, ib))
}

/// Field element wrapper; addition is XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct GfElement(pub u8);

impl GfElement {
    pub fn inv(self) -> Option<Self> {
        gf_inv(self.0).map(GfElement)
    }
}

impl Add for GfElement {
    type Output = Self;
    // Addition in characteristic 2 is XOR.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        GfElement(self.0 ^ rhs.0)
    }
}

impl Mul for GfElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        GfElement(gf_mul(self.0, rhs.0))
    }
}

/// Evaluates a polynomial with coefficients highest degree first.
pub(crate) fn poly_eval_be(p: &[u8], x: u8) -> u8 {
    p.iter().fold(0, |acc, &c| gf_mul(acc, x) ^ c)
}

/// Evaluates a polynomial with coefficients lowest degree first.
pub(crate) fn poly_eval_le(p: &[u8], x: u8) -> u8 {
    p.iter().rev().fold(0, |acc, &c| gf_mul(acc, x) ^ c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RandomStream;

    fn mul_oracle(a: u8, b: u8) -> u8 {
        let (mut a, mut b, mut p) = (a as u16, b, 0u16);
        while b != 0 {
            if b & 1 != 0 {
                p ^= a;
            }
            a <<= 1;
            if a & 0x100 != 0 {
                a ^= REDUCTION;
            }
            b >>= 1;
        }
        p as u8
    }

    #[test]
    fn known_products() {
        assert_eq!(gf_mul(0x02, 0x80), 0x1D);
        for a in 0..=255u8 {
            assert_eq!(gf_mul(a, 1), a);
            assert_eq!(gf_mul(a, 0), 0);
        }
    }

    #[test]
    fn table_matches_shift_and_reduce() {
        let mut s = RandomStream::new(256);
        for _ in 0..10_000 {
            let a = s.index(256) as u8;
            let b = s.index(256) as u8;
            assert_eq!(gf_mul(a, b), mul_oracle(a, b));
        }
    }

    #[test]
    fn field_axioms() {
        for a in 1..=255u8 {
            let ga = GfElement(a);
            assert_eq!(ga * ga.inv().unwrap(), GfElement(1));
            for b in [0u8, 1, 7, 0x53, 0xCA, 0xFF] {
                for c in [0u8, 2, 0x1D, 0x8E, 0xFE] {
                    let (gb, gc) = (GfElement(b), GfElement(c));
                    assert_eq!(ga * (gb + gc), ga * gb + ga * gc);
                }
            }
        }
        assert_eq!(GfElement(0).inv(), None);
    }

    #[test]
    fn exp_log_inverse() {
        for a in 1..=255u8 {
            assert_eq!(exp(LOG[a as usize] as usize), a);
        }
        assert_eq!(exp(255), 1);
        assert_eq!(poly_eval_be(&[1, 0, 3], 2), poly_eval_le(&[3, 0, 1], 2));
    }
}
