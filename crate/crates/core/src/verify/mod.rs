//! Experiment drivers: operator-norm decay, almost orthogonality, Hörmander
//! integrals, mean-value ratios, convex chords, smoothing sweeps and the
//! randomised-sign second moment.

mod ca;
mod chord;
mod decay;
mod hormander;
mod khintchine;
mod mean_value;

pub use ca::{ca_sweep, CaSweep, CaSweepRow};
pub use chord::{convex_double_point, DoublePoint};
pub use decay::{almost_orthogonality_experiment, l2_decay_experiment, AoRow, AoTable, L2Decay};
pub use hormander::{
    hormander_integral, hormander_kernel, hormander_sum, HormanderKernel, HormanderSum,
};
pub use khintchine::{khintchine_check, Khintchine};
pub use mean_value::{mean_value_check, mean_value_from_norms, right_derivative_norms, MeanValue};
