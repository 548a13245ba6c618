use std::f64::consts::PI;

use crate::error::Result;
use crate::mathcore::{check_psk_order, mpsk_sep_exact, q_function};

fn check_c(c_ll: f64) -> Result<()> {
    if !(c_ll > 0.0) || c_ll.is_nan() {
        return Err(crate::Error::InvalidParameter(format!(
            "noise variance C_ll must be positive, got {c_ll}"
        )));
    }
    Ok(())
}

/// Closed-form bit error probability of one element with post-equalization
/// noise variance `c_ll`:
///
/// * BPSK: `Q(√(2/C))`
/// * QPSK: `Q(√((1 − cos(π/2))/C))`
/// * M > 4: `(2/log₂M)·[Q(√((1 − cos(2π/M))/C)) + Q(√((1 − cos(4π/M))/C))]`
pub fn abep_theoretical(c_ll: f64, m: u32) -> Result<f64> {
    check_psk_order(m)?;
    check_c(c_ll)?;
    let p = match m {
        2 => q_function((2.0 / c_ll).sqrt()),
        4 => q_function(((1.0 - (PI / 2.0).cos()) / c_ll).sqrt()),
        _ => {
            let mf = f64::from(m);
            let k = mf.log2();
            let a = q_function(((1.0 - (2.0 * PI / mf).cos()) / c_ll).sqrt());
            let b = q_function(((1.0 - (4.0 * PI / mf).cos()) / c_ll).sqrt());
            2.0 / k * (a + b)
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Exact symbol error probability at symbol SNR `1/c_ll`.
pub fn asep_theoretical(c_ll: f64, m: u32) -> Result<f64> {
    check_psk_order(m)?;
    check_c(c_ll)?;
    if c_ll.is_infinite() {
        return Ok((f64::from(m) - 1.0) / f64::from(m));
    }
    Ok(mpsk_sep_exact(1.0 / c_ll, m)?)
}
