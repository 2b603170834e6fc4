//! Complex fields on a physical grid and band-limited angular-spectrum
//! propagation between the object plane and the scattering-medium plane.

mod fft;
mod field;
mod propagate;

pub use fft::Fft2;
pub use field::{ComplexField, RealImage, Rect};
pub(crate) use propagate::replace_modulus;
pub use propagate::{
    angular_spectrum_propagate, fft_bin, intensity, modulus_replace, transfer_function,
    transfer_undersampled, AngularSpectrum, SpatialFrequencyGrid,
};
