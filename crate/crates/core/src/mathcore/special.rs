//! Gaussian tail probabilities and the exact M-PSK symbol error integral.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::MathError;

/// Gaussian tail `Q(x) = P(N(0,1) > x)`, evaluated as `erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (only the non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate drops below `abs_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> Result<f64, MathError> {
    let (v, e) = gauss_kronrod(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= abs_tol {
            break;
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(MathError::NoConvergence {
                iterations: pieces.len(),
            });
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(&f, lo, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    // Sum in interval order so the result does not depend on refinement history.
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pieces.iter().map(|p| p.2).sum())
}

pub(crate) fn check_psk_order(m: u32) -> Result<(), MathError> {
    if m >= 2 && m.is_power_of_two() {
        Ok(())
    } else {
        Err(MathError::InvalidArgument(format!(
            "PSK order must be a power of two >= 2, got {m}"
        )))
    }
}

/// Exact M-PSK symbol error probability at symbol SNR `snr` (linear) in
/// circular Gaussian noise, from the single-integral form
/// `(1/π) ∫₀^{π(M−1)/M} exp(−snr·sin²(π/M)/sin²φ) dφ`.
pub fn mpsk_sep_exact(snr: f64, m: u32) -> Result<f64, MathError> {
    check_psk_order(m)?;
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(MathError::InvalidArgument(format!(
            "snr must be positive and finite, got {snr}"
        )));
    }
    let mf = f64::from(m);
    let s2 = (PI / mf).sin().powi(2);
    let integrand = |phi: f64| {
        let sp = phi.sin();
        if sp == 0.0 {
            0.0
        } else {
            (-snr * s2 / (sp * sp)).exp()
        }
    };
    let upper = PI * (mf - 1.0) / mf;
    // The 1/π prefactor scales the error too.
    let v = integrate(integrand, 0.0, upper, 1e-10 * PI)? / PI;
    Ok(v.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathcore::oracle;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn q_known_values() {
        assert_eq!(q_function(0.0), 0.5);
        // Frozen from oracle::gaussian_tail (adaptive Simpson on the density).
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((q_function(-2.0) - 0.977_249_868_051_820_8).abs() < 1e-15);
    }

    #[test]
    fn q_matches_quadrature_oracle() {
        for &x in &[0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 8.0, 10.0] {
            let want = oracle::gaussian_tail(x);
            let got = q_function(x);
            assert!(((got - want) / want).abs() <= 1e-12, "x={x}: {got} vs {want}");
            let got_neg = q_function(-x);
            assert!(((got_neg - (1.0 - want)) / (1.0 - want)).abs() <= 1e-12);
        }
    }

    #[test]
    fn q_reflection_and_monotone() {
        let mut prev = f64::INFINITY;
        for i in -400..=400 {
            let x = f64::from(i) / 40.0;
            let q = q_function(x);
            assert!((q + q_function(-x) - 1.0).abs() <= 1e-12);
            // Near x = −10, 1 − Q(x) is below half an ulp of 1.
            if x > -8.0 {
                assert!(q < prev);
            } else {
                assert!(q <= prev);
            }
            prev = q;
        }
    }

    #[test]
    fn integrate_polynomial_and_gaussian() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-13).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = integrate(|x| (-x * x).exp(), -8.0, 8.0, 1e-13).unwrap();
        assert!((v - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bpsk_reduces_to_q() {
        for &snr in &[0.1, 1.0, 10.0] {
            let exact = mpsk_sep_exact(snr, 2).unwrap();
            assert!((exact - q_function((2.0 * snr).sqrt())).abs() <= 1e-9, "snr {snr}");
        }
        assert!((mpsk_sep_exact(1.0, 2).unwrap() - 0.078_649_603_525_142_57).abs() < 1e-9);
    }

    #[test]
    fn low_snr_limit_is_guessing() {
        let v = mpsk_sep_exact(1e-12, 4).unwrap();
        assert!((v - 0.75).abs() < 1e-6);
    }

    #[test]
    fn qpsk_matches_closed_form() {
        // QPSK: SEP = 2Q(√snr) − Q(√snr)².
        for &snr in &[0.5, 2.0, 20.0] {
            let q = q_function(f64::sqrt(snr));
            let closed = 2.0 * q - q * q;
            assert!((mpsk_sep_exact(snr, 4).unwrap() - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_order_and_snr() {
        assert!(mpsk_sep_exact(1.0, 3).is_err());
        assert!(mpsk_sep_exact(1.0, 1).is_err());
        assert!(mpsk_sep_exact(0.0, 4).is_err());
    }
}
