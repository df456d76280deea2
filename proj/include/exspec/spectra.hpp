// spectra.hpp — Post-processing of time-domain responses: rotating frame,
// noise-aware tail truncation with zero-padding, and Fourier transforms to 1D
// absorption spectra and 2D frequency maps.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exspec/response.hpp"

namespace exspec::spectra {

using alg::cxd;

struct Spectrum1D {
    std::vector<double> omega_ev;   // ascending, shifted back by the frame
    std::vector<double> amplitude;  // absorptive (real) part
    double rotating_frame_ev{0.0};
    int pad_length{0};
    int cut_index{-1};  // -1 = no cut applied
};

struct Spectrum2D {
    std::vector<double> omega1_ev;
    std::vector<double> omega3_ev;
    Eigen::MatrixXd amplitude;  // |S|, rows = omega1, cols = omega3
    double t2_fs{0.0};
    std::vector<std::string> pathways;
    double rotating_frame_ev{0.0};
};

// Multiply by exp(+i·sense·ω_RF·t/ħ) along every coherence axis (sense ≠ 0)
// so undersampled signals alias into the reported band; spectrum axes are
// shifted back by ω_RF afterwards.
response::ResponseGrid apply_rotating_frame(response::ResponseGrid grid, double omega_rf_ev);

// Zero the tail from the first point where a short running-max envelope of
// |R| drops below the noise floor, then extend each coherence axis with zeros
// to pad_to points. cut_indices (optional) records the per-axis cut.
response::ResponseGrid snr_cut_and_pad(const response::ResponseGrid& grid,
                                       double noise_floor_estimate, int pad_to,
                                       std::vector<int>* cut_indices = nullptr);

// Noise floor implied by the per-point shot variance recorded in the grid;
// zero for exact-engine grids.
double shot_noise_floor(const response::ResponseGrid& grid);

// DFT along the single delay axis: S(ω) = Δt Σ_k R(t_k) e^{+i sense ω t_k/ħ};
// the real part is returned on an ascending axis shifted by ω_RF. The input
// is expected in the rotating frame with the i^M prefactor already removed.
Spectrum1D absorption_spectrum(const response::ResponseGrid& grid);

// 2D transform at fixed waiting time: conjugate kernel along t1, direct along
// t3 (senses taken from the grids), responses summed over pathways before the
// modulus. Grids must share axes; axis 1 (t2) must have count 1.
Spectrum2D spectrum_2d(const std::vector<response::ResponseGrid>& pathway_grids, double t2_fs);

// Optional apodization (off by default in the pipeline).
response::ResponseGrid apply_hann_window(const response::ResponseGrid& grid);

// Analysis helpers.
int peak_bin(const Spectrum1D& s);
double peak_position(const Spectrum1D& s);
double fwhm(const Spectrum1D& s);
double amplitude_at(const Spectrum2D& s, double w1_ev, double w3_ev);
// Excess-kurtosis-style tail weight of a lineshape restricted to a window
// around its peak; larger = heavier tails.
double window_kurtosis(const Spectrum1D& s, double half_window_ev);

} // namespace exspec::spectra
