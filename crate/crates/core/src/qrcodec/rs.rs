//! Reed–Solomon coding over GF(2⁸) with generator roots `α⁰ … α^{ec−1}`.

use super::gf::{exp, gf_div, gf_mul, poly_eval_be, poly_eval_le};
use super::QrError;

/// Generator polynomial, highest degree first, monic.
fn generator(ec_count: usize) -> Vec<u8> {
    let mut g = vec![1u8];
    for i in 0..ec_count {
        let root = exp(i);
        let mut next = vec![0u8; g.len() + 1];
        for (j, &c) in g.iter().enumerate() {
            next[j] ^= c;
            next[j + 1] ^= gf_mul(c, root);
        }
        g = next;
    }
    g
}

fn check_ec(ec_count: usize) -> Result<(), QrError> {
    if (1..=254).contains(&ec_count) {
        Ok(())
    } else {
        Err(QrError::EcCount(ec_count))
    }
}

/// EC codewords: remainder of `data·x^ec` modulo the generator.
pub fn rs_encode(data: &[u8], ec_count: usize) -> Result<Vec<u8>, QrError> {
    check_ec(ec_count)?;
    let g = generator(ec_count);
    let mut rem = vec![0u8; ec_count];
    for &d in data {
        let factor = d ^ rem[0];
        rem.rotate_left(1);
        rem[ec_count - 1] = 0;
        for (r, &gc) in rem.iter_mut().zip(&g[1..]) {
            *r ^= gf_mul(gc, factor);
        }
    }
    Ok(rem)
}

/// Syndromes `S_j = r(α^j)`, lowest index first.
fn syndromes(received: &[u8], ec_count: usize) -> Vec<u8> {
    (0..ec_count).map(|j| poly_eval_be(received, exp(j))).collect()
}

/// Berlekamp–Massey; returns the error locator, lowest degree first.
fn berlekamp_massey(s: &[u8]) -> Vec<u8> {
    let mut lambda = vec![1u8];
    let mut prev = vec![1u8];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut b = 1u8;
    for n in 0..s.len() {
        let mut d = s[n];
        for i in 1..=l.min(lambda.len() - 1) {
            d ^= gf_mul(lambda[i], s[n - i]);
        }
        if d == 0 {
            shift += 1;
            continue;
        }
        let coef = gf_div(d, b).expect("b nonzero");
        let mut next = lambda.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, 0);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] ^= gf_mul(coef, p);
        }
        if 2 * l <= n {
            prev = std::mem::replace(&mut lambda, next);
            l = n + 1 - l;
            b = d;
            shift = 1;
        } else {
            lambda = next;
            shift += 1;
        }
    }
    while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
        lambda.pop();
    }
    lambda
}

/// Corrects up to `⌊ec/2⌋` byte errors. Returns the data part and the
/// number of corrected bytes, or an explicit failure.
pub fn rs_decode(received: &[u8], ec_count: usize) -> Result<(Vec<u8>, usize), QrError> {
    check_ec(ec_count)?;
    let n = received.len();
    if n < ec_count + 1 || n > 255 {
        return Err(QrError::BlockLength { len: n, ec_count });
    }
    let s = syndromes(received, ec_count);
    if s.iter().all(|&x| x == 0) {
        return Ok((received[..n - ec_count].to_vec(), 0));
    }
    let lambda = berlekamp_massey(&s);
    let nu = lambda.len() - 1;
    if nu == 0 || 2 * nu > ec_count {
        return Err(QrError::Uncorrectable);
    }

    // Chien search over degree positions p = n−1−i.
    let mut positions = Vec::with_capacity(nu);
    for p in 0..n {
        let x_inv = exp(255 - p % 255);
        if poly_eval_le(&lambda, x_inv) == 0 {
            positions.push(p);
        }
    }
    if positions.len() != nu {
        return Err(QrError::Uncorrectable);
    }

    // Ω = S·Λ mod x^ec.
    let mut omega = vec![0u8; ec_count];
    for (i, &si) in s.iter().enumerate() {
        for (j, &lj) in lambda.iter().enumerate() {
            if i + j < ec_count {
                omega[i + j] ^= gf_mul(si, lj);
            }
        }
    }
    // Formal derivative keeps odd-degree terms.
    let deriv: Vec<u8> = lambda
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
        .collect();

    let mut corrected = received.to_vec();
    for &p in &positions {
        let x = exp(p);
        let x_inv = exp(255 - p % 255);
        let num = gf_mul(x, poly_eval_le(&omega, x_inv));
        let den = poly_eval_le(&deriv, x_inv);
        let e = gf_div(num, den).ok_or(QrError::Uncorrectable)?;
        corrected[n - 1 - p] ^= e;
    }
    if syndromes(&corrected, ec_count).iter().any(|&x| x != 0) {
        return Err(QrError::Uncorrectable);
    }
    corrected.truncate(n - ec_count);
    Ok((corrected, nu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RandomStream;
    use proptest::prelude::*;

    /// Parity by solving the syndrome equations directly with Gaussian
    /// elimination over GF(256).
    fn parity_oracle(data: &[u8], ec: usize) -> Vec<u8> {
        let n = data.len() + ec;
        // Row i: Σ_k p_k α^{i(ec−1−k)} = Σ_j d_j α^{i(n−1−j)}.
        let mut a: Vec<Vec<u8>> = (0..ec)
            .map(|i| {
                let mut row: Vec<u8> = (0..ec).map(|k| exp(i * (ec - 1 - k))).collect();
                let rhs = data
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (j, &d)| acc ^ gf_mul(d, exp(i * (n - 1 - j))));
                row.push(rhs);
                row
            })
            .collect();
        for col in 0..ec {
            let piv = (col..ec).find(|&r| a[r][col] != 0).unwrap();
            a.swap(col, piv);
            let inv = gf_div(1, a[col][col]).unwrap();
            for v in a[col].iter_mut() {
                *v = gf_mul(*v, inv);
            }
            for r in 0..ec {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    let pivot_row = a[col].clone();
                    for (v, p) in a[r].iter_mut().zip(pivot_row) {
                        *v ^= gf_mul(f, p);
                    }
                }
            }
        }
        a.iter().map(|row| row[ec]).collect()
    }

    const KNOWN_DATA: [u8; 16] = [
        0x10, 0x20, 0x0C, 0x56, 0x61, 0x80, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC, 0x11, 0xEC,
        0x11,
    ];

    #[test]
    fn known_vector() {
        let ec = rs_encode(&KNOWN_DATA, 10).unwrap();
        assert_eq!(ec, parity_oracle(&KNOWN_DATA, 10));
        assert_eq!(ec, [0xA5, 0x24, 0xD4, 0xC1, 0xED, 0x36, 0xC7, 0x87, 0x2C, 0x55]);
    }

    #[test]
    fn encoder_matches_oracle() {
        let mut s = RandomStream::new(11);
        for _ in 0..50 {
            let k = 1 + s.index(40);
            let ec = 1 + s.index(30);
            let data: Vec<u8> = (0..k).map(|_| s.index(256) as u8).collect();
            assert_eq!(rs_encode(&data, ec).unwrap(), parity_oracle(&data, ec));
        }
    }

    #[test]
    fn zero_data_zero_parity() {
        assert!(rs_encode(&[0; 20], 13).unwrap().iter().all(|&b| b == 0));
        assert!(rs_encode(&[1], 0).is_err());
        assert!(rs_encode(&[1], 255).is_err());
    }

    #[test]
    fn clean_block_passes_through() {
        let mut cw = KNOWN_DATA.to_vec();
        cw.extend(rs_encode(&KNOWN_DATA, 10).unwrap());
        assert_eq!(rs_decode(&cw, 10).unwrap(), (KNOWN_DATA.to_vec(), 0));
        assert!(rs_decode(&cw[..10], 10).is_err());
    }

    #[test]
    fn every_single_byte_error() {
        let mut cw = KNOWN_DATA.to_vec();
        cw.extend(rs_encode(&KNOWN_DATA, 10).unwrap());
        for pos in 0..cw.len() {
            for e in [1u8, 0x80, 0xFF] {
                let mut r = cw.clone();
                r[pos] ^= e;
                assert_eq!(rs_decode(&r, 10).unwrap(), (KNOWN_DATA.to_vec(), 1), "pos {pos}");
            }
        }
    }

    fn corrupt(cw: &mut [u8], count: usize, s: &mut RandomStream) {
        let mut positions: Vec<usize> = (0..cw.len()).collect();
        for i in 0..count {
            let j = i + s.index(positions.len() - i);
            positions.swap(i, j);
            cw[positions[i]] ^= 1 + s.index(255) as u8;
        }
    }

    #[test]
    fn random_correctable_errors() {
        let mut s = RandomStream::new(5);
        for _ in 0..1000 {
            let ec = 2 + s.index(29);
            let k = 1 + s.index(60);
            let data: Vec<u8> = (0..k).map(|_| s.index(256) as u8).collect();
            let mut cw = data.clone();
            cw.extend(rs_encode(&data, ec).unwrap());
            let t = ec / 2;
            let count = s.index(t + 1);
            corrupt(&mut cw, count, &mut s);
            assert_eq!(rs_decode(&cw, ec).unwrap(), (data, count));
        }
    }

    #[test]
    fn beyond_capacity_is_reported() {
        let mut s = RandomStream::new(6);
        let mut failures = 0;
        for _ in 0..1000 {
            let data: Vec<u8> = (0..16).map(|_| s.index(256) as u8).collect();
            let mut cw = data.clone();
            cw.extend(rs_encode(&data, 10).unwrap());
            corrupt(&mut cw, 6, &mut s);
            match rs_decode(&cw, 10) {
                Err(_) => failures += 1,
                Ok((d, _)) => assert_ne!(d, data),
            }
        }
        assert!(failures >= 990, "{failures}");
    }

    proptest! {
        #[test]
        fn corrupt_within_t_round_trips(data in proptest::collection::vec(any::<u8>(), 1..100), ec in 1usize..40, seed in any::<u64>()) {
            prop_assume!(data.len() + ec <= 255);
            let mut s = RandomStream::new(seed);
            let mut cw = data.clone();
            cw.extend(rs_encode(&data, ec).unwrap());
            let count = s.index(ec / 2 + 1);
            corrupt(&mut cw, count, &mut s);
            prop_assert_eq!(rs_decode(&cw, ec).unwrap(), (data, count));
        }
    }
}
