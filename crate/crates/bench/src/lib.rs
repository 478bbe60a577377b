//! Shared fixtures for the benchmarks.

use spherewave::signal::random_signal;
use spherewave::wavelet::optimal_profile;
use spherewave::{build_frame, CoefficientVector, DirectionalProfile, FilterProfile, Frame};

pub fn profile(d: usize, k: usize) -> DirectionalProfile {
    if k == 0 {
        DirectionalProfile::zonal()
    } else if d == 3 {
        DirectionalProfile::d3_convention(k)
    } else {
        optimal_profile(d, k).expect("valid profile")
    }
}

pub fn frame(d: usize, k: usize, j_max: usize) -> Frame {
    build_frame(d, k, j_max, FilterProfile::SmoothBump, profile(d, k)).expect("valid frame")
}

/// Unit-norm random signal that fits the frame bandwidth.
pub fn signal(frame: &Frame, seed: u64) -> CoefficientVector {
    random_signal(frame.d(), frame.bandwidth(), seed).expect("valid signal")
}
