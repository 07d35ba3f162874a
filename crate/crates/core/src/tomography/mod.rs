//! Readout correction, state and process tomography post-processing, and the
//! finite-temperature √iSWAP gate model.

pub mod process;
pub mod readout;
pub mod state;
pub mod thermal;

pub use process::{
    gate_fidelity, nonphysical_error, pauli_basis, process_tomography_inputs, ptm_from_channel, ptm_from_unitary,
    reconstruct_ptm, PauliTransferMatrix,
};
pub use readout::{correct_readout, ReadoutCalibration};
pub use state::{concurrence, project_physical, state_fidelity};
pub use thermal::{
    sqrt_iswap, thermal_iswap_fidelity, thermal_population, thermal_sweep, ThermalGateModel, ThermalPoint,
};
