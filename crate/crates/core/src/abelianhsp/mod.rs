//! Output distributions of the same circuit over a general finite abelian
//! group `ℤ_{N₁} × … × ℤ_{N_m}`, driven by the overlap `⟨Ψ|U(g)|Ψ⟩`.

mod distribution;
mod group;

pub use distribution::{
    character_mixture_overlap, characteristic_function, convolution_power,
    distribution_from_overlap, group_convolve, random_character_mixture, GroupDistribution,
    GroupTableRecord, OverlapFunction, IMAGINARY_RESIDUE_THRESHOLD, OVERLAP_TOLERANCE,
};
pub use group::{fourier_entry, AbelianGroupSpec, GroupElement, DEFAULT_GROUP_ORDER_CAP};
