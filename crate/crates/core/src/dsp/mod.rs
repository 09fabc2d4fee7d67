//! Numerical primitives shared by every salience layer: analysis windows,
//! real/even Fourier transforms, the power-law activation and the diagonal
//! high-pass masks.

mod activation;
mod fourier;
mod mask;
mod window;

pub use activation::{activate, activate_in_place, Activation, ActivationVariant};
pub use fourier::{dft_magnitude, inverse_dft_real, FourierPlan, FourierScratch};
pub use mask::{
    apply_mask, cutoff_to_frequency_index, cutoff_to_quefrency_index, Bias, HighPassMask,
    MaskDomain,
};
pub use window::{make_window, WindowKind, WindowSpec};

pub(crate) use fourier::mirror as mirror_half;
