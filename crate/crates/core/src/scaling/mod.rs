//! Energy-targeted sweeps over system sizes and power-law fits of the
//! finite-size exponents.

mod fit;
mod sweep;
mod target;

pub use fit::{fit_power_law, ratio_with_error, PowerLawFit};
pub use sweep::{
    extract_exponents, prepare_size, sweep_order_parameter, ExponentReport, PairingPolicy, PreparedSize,
    SizeExponent, SizeSweep, SweepGrid, SweepPoint, SweepSpec, ValueWithError, CLEAN_R_SQUARED,
};
pub use target::{
    adaptive_n_max, initial_coupling_range, target_energy, Targeted, TruncationChoice, GROUND_ENERGY_TOL,
    SCAN_POINTS, TARGET_TOLERANCE,
};
