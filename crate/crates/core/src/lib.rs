//! Link-level simulation of QR codes displayed on an intelligent reflecting
//! surface and read by a multi-antenna receiver.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod experiment;
pub mod mathcore;
pub mod modem;
pub mod phy;
pub mod qrcodec;

pub use error::{Error, Result};
