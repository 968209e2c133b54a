//! Runnable studies tying the solver to the structural claims it is built
//! around: the deep-water limit with its rate, the scaling symmetry, the
//! depth-rescaling transform between the two finite-depth forms, and a
//! frequency-window probe of the data-map's regularity threshold.

pub mod limit;
pub mod probe;
pub mod scaling;
pub mod transform;

pub use limit::{limit_study, LimitStudyResult};
pub use probe::{illposed_probe, illposed_probe_with_resolution, ProbeResult};
pub use scaling::{scaled_data, scaling_check};
pub use transform::transform_check;
