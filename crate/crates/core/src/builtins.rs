//! Canonical built-in spectra and systems, so checks can run without fixture
//! files.

use crate::characterization::WaveletSystem;
use crate::error::Error;
use crate::fiber::VectorFunction;
use crate::rational::RationalPi;
use crate::spectrum::StepSpectrum;
use crate::structure::AffineStructure;

/// `chi_{±[pi, 2pi)}`: the orthonormal MSF wavelet for scale 2.
pub fn shannon_wavelet() -> StepSpectrum {
    StepSpectrum::symmetric_indicator(RationalPi::pi(), RationalPi::from_integer(2))
}

/// `chi_{[-pi, pi)}`: the Shannon scaling spectrum.
pub fn shannon_scaling() -> StepSpectrum {
    StepSpectrum::indicator(RationalPi::from_integer(-1), RationalPi::pi())
}

/// `chi_{±[pi/2, pi)}`: a tight-frame (non-orthonormal) wavelet for scale 2.
pub fn half_shannon_wavelet() -> StepSpectrum {
    StepSpectrum::symmetric_indicator(RationalPi::new(1, 2), RationalPi::pi())
}

/// The two-member orthonormal MSF family for scale 3:
/// `{chi_{±[pi, 2pi)}, chi_{±[2pi, 3pi)}}`.
pub fn shannon_3band_wavelets() -> Vec<StepSpectrum> {
    vec![
        StepSpectrum::symmetric_indicator(RationalPi::pi(), RationalPi::from_integer(2)),
        StepSpectrum::symmetric_indicator(RationalPi::from_integer(2), RationalPi::from_integer(3)),
    ]
}

/// Names accepted by `builtin_system` / the CLI `--builtin` flag.
pub const BUILTIN_NAMES: &[&str] = &[
    "shannon",
    "shannon-scaling",
    "half-shannon",
    "shannon-3band",
];

/// A named builtin as a candidate wavelet system over its natural structure.
/// `shannon-scaling` is exposed as a single-generator system for the trace
/// and spectral commands.
pub fn builtin_system(name: &str) -> Result<WaveletSystem, Error> {
    let scalar_system = |scale: u32, labeled: Vec<(String, StepSpectrum)>| {
        WaveletSystem::candidate(
            AffineStructure::classical(scale),
            labeled
                .into_iter()
                .map(|(label, s)| VectorFunction::scalar(label, s))
                .collect(),
        )
    };
    match name {
        "shannon" => scalar_system(2, vec![("shannon".into(), shannon_wavelet())]),
        "shannon-scaling" => scalar_system(2, vec![("shannon-scaling".into(), shannon_scaling())]),
        "half-shannon" => scalar_system(2, vec![("half-shannon".into(), half_shannon_wavelet())]),
        "shannon-3band" => scalar_system(
            3,
            shannon_3band_wavelets()
                .into_iter()
                .enumerate()
                .map(|(idx, s)| (format!("shannon-3band-{}", idx + 1), s))
                .collect(),
        ),
        other => Err(Error::schema(
            "--builtin",
            format!(
                "unknown builtin `{other}` (expected one of {})",
                BUILTIN_NAMES.join(", ")
            ),
        )),
    }
}
