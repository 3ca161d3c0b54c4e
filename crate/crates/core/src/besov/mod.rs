//! Littlewood–Paley norms: spatial and parabolic Besov, parabolic Sobolev, Lorentz.
//!
//! Space-time norms are computed for the windowed reflection extension of the
//! sampled field on a periodic box in time and measured on the original
//! domain `T^3 × (0, T)`. They bound the restriction norm from above and are
//! labelled "E-proxy" in reports.

pub mod battery;
pub mod extension;
pub mod lorentz;
pub mod norms;
pub mod profile;
pub mod sobolev;
pub mod spec;
mod timeline;

pub use battery::{battery_corpus, estimate_battery, BatteryConfig, BatteryReport, BatterySample, Inequality};
pub use extension::{extend_fn, extension_coefficients, extension_operator, ExtendedField};
pub use lorentz::{lorentz_from_samples, lorentz_norm};
pub use norms::{
    anisotropic_band, anisotropic_block_norms, besov_norm_anisotropic, besov_norm_spatial, spatial_band,
    spatial_block, spatial_block_norms,
};
pub use profile::{build_dyadic_profile, DyadicProfile, Flavor};
pub use sobolev::{parabolic_derivative_norms, sobolev_norm_multiplier, sobolev_norm_parabolic};
pub use spec::{lq_sum, BesovReport, BesovSpec, BlockEntry, BlockNorms};
pub use timeline::{spacetime_lp, MIN_TIME_SAMPLES};
