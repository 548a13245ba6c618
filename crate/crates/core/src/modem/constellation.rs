use std::f64::consts::PI;

use num_complex::Complex64;

use super::MappingError;

/// Binary-reflected Gray code of `m`.
pub fn gray(m: u32) -> u32 {
    m ^ (m >> 1)
}

/// Inverse of [`gray`].
pub fn gray_inverse(mut g: u32) -> u32 {
    let mut m = g;
    while g > 0 {
        g >>= 1;
        m ^= g;
    }
    m
}

/// Unit-circle M-PSK with Gray labels: point `m` is `e^{j2πm/M}` and carries
/// the label `gray(m)`, most significant bit first.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: u32,
    bits: usize,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn psk(order: u32) -> Result<Self, MappingError> {
        if order < 2 || !order.is_power_of_two() {
            return Err(MappingError::UnsupportedOrder(order));
        }
        let points = (0..order)
            .map(|m| {
                let (s, c) = (2.0 * PI * f64::from(m) / f64::from(order)).sin_cos();
                // Snap the axis points so symmetric inputs see exact ties.
                let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
                Complex64::new(snap(c), snap(s))
            })
            .collect();
        Ok(Self {
            order,
            bits: order.trailing_zeros() as usize,
            points,
        })
    }

    pub fn bpsk() -> Self {
        Self::psk(2).expect("valid order")
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn label(&self, index: usize) -> u32 {
        gray(index as u32)
    }

    pub fn index_of_label(&self, label: u32) -> usize {
        gray_inverse(label) as usize
    }

    /// Number of differing label bits between two point indices.
    pub fn bit_distance(&self, a: usize, b: usize) -> u32 {
        (self.label(a) ^ self.label(b)).count_ones()
    }

    /// Minimum-distance decision; exact ties go to the smaller index.
    pub fn nearest(&self, y: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (m, x) in self.points.iter().enumerate() {
            let d = (y - x).norm_sqr();
            if d < best_d {
                best_d = d;
                best = m;
            }
        }
        best
    }

    /// Decision by phase sector, `round(arg(y)·M/2π) mod M`.
    pub fn nearest_by_phase(&self, y: Complex64) -> usize {
        let m = f64::from(self.order);
        let k = (y.arg() * m / (2.0 * PI)).round() as i64;
        k.rem_euclid(i64::from(self.order)) as usize
    }

    /// Label bits of a point, MSB first.
    pub fn label_bits(&self, index: usize) -> impl Iterator<Item = bool> + '_ {
        let label = self.label(index);
        (0..self.bits).rev().map(move |b| (label >> b) & 1 == 1)
    }

    /// Index of the point labelled by `bits` (MSB first).
    pub fn index_of_bits(&self, bits: &[bool]) -> usize {
        debug_assert_eq!(bits.len(), self.bits);
        let label = bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
        self.index_of_label(label)
    }
}

/// Maps consecutive `log₂M`-bit groups to constellation points.
pub fn bits_to_symbols(bits: &[bool], c: &Constellation) -> Result<Vec<Complex64>, MappingError> {
    let k = c.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(MappingError::BitLength {
            len: bits.len(),
            bits_per_symbol: k,
        });
    }
    Ok(bits.chunks(k).map(|g| c.point(c.index_of_bits(g))).collect())
}

/// Nearest-point demapping back to bits.
pub fn symbols_to_bits(symbols: &[Complex64], c: &Constellation) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|&y| c.label_bits(c.nearest(y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::RandomStream;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn bpsk_map() {
        let s = bits_to_symbols(&[false, true], &Constellation::bpsk()).unwrap();
        assert!(close(s[0], Complex64::new(1.0, 0.0)));
        assert!(close(s[1], Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn qpsk_gray_sequence() {
        let c = Constellation::psk(4).unwrap();
        let bits = [false, false, false, true, true, true, true, false];
        let s = bits_to_symbols(&bits, &c).unwrap();
        for (m, x) in s.iter().enumerate() {
            assert!(close(*x, Complex64::from_polar(1.0, PI / 2.0 * m as f64)));
        }
    }

    #[test]
    fn rejects_bad_lengths_and_orders() {
        let c = Constellation::psk(8).unwrap();
        assert!(bits_to_symbols(&[true; 4], &c).is_err());
        assert!(Constellation::psk(6).is_err());
        assert!(Constellation::psk(1).is_err());
    }

    #[test]
    fn gray_adjacency() {
        for order in [2u32, 4, 8, 16, 32] {
            let c = Constellation::psk(order).unwrap();
            for m in 0..order as usize {
                let next = (m + 1) % order as usize;
                assert_eq!(c.bit_distance(m, next), 1, "M={order} m={m}");
                assert!((c.point(m).norm() - 1.0).abs() < 1e-15);
            }
            for g in 0..order {
                assert_eq!(gray(gray_inverse(g)), g);
            }
        }
    }

    #[test]
    fn bit_round_trip() {
        let mut s = RandomStream::new(17);
        for order in [2u32, 4, 8, 16, 32] {
            let c = Constellation::psk(order).unwrap();
            let n = 4096 - 4096 % c.bits_per_symbol();
            let bits: Vec<bool> = (0..n).map(|_| s.bit()).collect();
            let sym = bits_to_symbols(&bits, &c).unwrap();
            assert_eq!(symbols_to_bits(&sym, &c), bits);
        }
    }

    #[test]
    fn ties_go_to_smaller_index() {
        let c = Constellation::psk(4).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c.nearest(Complex64::new(s, s)), 0);
        assert_eq!(c.nearest(Complex64::new(0.0, 0.0)), 0);
        let b = Constellation::bpsk();
        assert_eq!(b.nearest(Complex64::new(0.0, 0.3)), 0);
    }

    #[test]
    fn nearest_point_equals_phase_sector() {
        let mut s = RandomStream::new(3);
        for order in [2u32, 4, 8, 16, 32] {
            let c = Constellation::psk(order).unwrap();
            for _ in 0..10_000 {
                let y = s.complex_gaussian(2.0);
                assert_eq!(c.nearest(y), c.nearest_by_phase(y), "M={order} y={y}");
            }
        }
    }
}
