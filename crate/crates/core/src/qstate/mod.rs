//! Dense statevectors and entanglement accounting: random and planted-cut
//! states, partial traces and the subsystem purity function `P(s)`.

mod purity;
mod state;

pub use purity::{
    apply_swap_mask, pair_state, purity, purity_table, purity_table_capped, reduced_density,
    swap_overlap, DensityMatrix, PurityTable, DEFAULT_PURITY_TABLE_CAP,
};
pub use state::{
    apply_controlled_rx, haar_random_state, mix_states, tensor_product, StateRecord, StateVector,
    MAX_STATE_QUBITS, NORM_TOLERANCE,
};
