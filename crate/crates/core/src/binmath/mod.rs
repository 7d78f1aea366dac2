//! Exact arithmetic over ℤ₂ⁿ: bitstring algebra, the Walsh–Hadamard (group
//! Fourier) transform, group convolution and GF(2) linear algebra.

mod gf2;
mod mask;
mod table;

pub use gf2::{
    basis_gf2, min_syndrome_weight, min_syndrome_weight_capped, nullspace_gf2, rank_gf2, span_gf2,
    MatrixRecord, MeasurementMatrix, DEFAULT_SYNDROME_CAP,
};
pub use mask::{dot_mod2, SubsystemMask, MAX_MASK_QUBITS};
pub use table::{convolve, inverse_walsh, walsh_transform, RealTable};

pub(crate) use mask::parity;
pub(crate) use table::{fwht_in_place, pow_u32};
