#pragma once

#include "ofdmrad/detect.hpp"

namespace ofdmrad {

struct CztConfig {
    int roi_bins = 8;      // B_roi
    int zoom_factor = 100; // L
    int points() const { return roi_bins * zoom_factor; }

    void validate() const;
};

/// Sub-bin parameter estimate of one target. alpha_mag is on the
/// transmit-power-included scale (|alpha_tilde|); theta_global references the
/// phase to t = 0 for time-domain reconstruction.
struct TargetEstimate {
    double tau_s = 0;
    double doppler_hz = 0;
    double alpha_mag = 0;
    double theta_raw_rad = 0;     // phase at the fine peak
    double theta_global_rad = 0;  // Doppler-window rotation removed
    int coarse_range_bin = 0;
    int coarse_doppler_bin = 0;
    double fine_range_index = 0;   // k* (or parabola vertex) on the zoom grid
    double fine_doppler_index = 0; // p*
    double l_isi = 1, l_dop = 1, l_win = 1;
    bool roi_clamped = false;
    bool at_roi_border = false;

    cd alpha_tilde() const { return std::polar(alpha_mag, theta_global_rad); }
};

namespace estimate {

/// Chirp-Z transform, Bluestein's FFT convolution:
///   X_k = sum_n x[n] e^{j(alpha n + omega n k)},  k in [0, K).
CVec czt(const cd* x, int len, int k_out, double alpha, double omega);
CVec czt(const CVec& x, int k_out, double alpha, double omega);

/// Two-stage zoomed transform around a coarse peak. Axes are absolute:
/// range bins nu(k) = nu_start + k/L, signed Doppler bins q(p) = q_start + p/L.
struct FineImage {
    CMat z;           // N_czt x N_czt
    double nu_start = 0;
    double q_start = 0;
    int zoom_factor = 1;
    int symbol_cols = 0;
    bool roi_clamped = false;
};

FineImage czt_zoom(const CMat& h, const CoarsePeak& peak, const CztConfig& czt_cfg);

/// Transform value at one fractional (range-bin, Doppler-bin) point,
/// matching the zoom normalization.
cd transform_point(const CMat& h, double nu_bins, double q_bins);

struct RefinedPeak {
    double tau_s = 0;
    double doppler_hz = 0;
    int k_star = 0, p_star = 0;
    double k_fine = 0, p_fine = 0;  // equals k_star/p_star unless quadratic
    bool at_roi_border = false;
};

/// Peak pick plus optional quadratic (parabolic) vertex interpolation of
/// |Z|^2 in each dimension.
RefinedPeak refine_peak(const FineImage& zoom, const CztConfig& czt_cfg, bool quadratic,
                        const OfdmConfig& cfg, const DerivedParams& p);

struct Losses {
    double l_isi = 1;
    double l_dop = 1;
    double l_win = 1;
};

/// Window-mismatch, Doppler-spread and 2D-window power losses at the given
/// estimate. eta_override = 1 models a next-symbol-compensated peak.
Losses losses(double tau_s, double doppler_hz, const WindowSpec& w, const OfdmConfig& cfg,
              const DerivedParams& p, double eta_override = -1.0);

/// Invert the peak power through processing gain and losses:
/// |alpha| = |peak| / sqrt(Gp * Lwin * Lisi * Ldop). Throws when eta = 0.
double invert_peak_magnitude(double peak_abs, const Losses& l, const DerivedParams& p);

struct EstimateOptions {
    bool quadratic = true;       // parabola vertex before readout
    bool vertex_readout = true;  // evaluate the transform at the vertex
    bool compensated_peak = false;  // peak already recovered by next-symbol add
    // Snap estimates within this many bins of the sample grid onto it. The
    // interference mask steps at integer boundaries, so an epsilon-biased
    // estimate of an exactly on-grid target would flip one sample per symbol
    // in the reconstruction; snapping removes that cliff. 0 disables.
    double grid_snap_bins = 0.01;
};

/// Full single-target estimation from a windowed channel matrix.
TargetEstimate estimate_target(const CMat& h, const CoarsePeak& peak, const CztConfig& czt_cfg,
                               const WindowSpec& w, const OfdmConfig& cfg,
                               const DerivedParams& p, const EstimateOptions& opts = {});

/// Least-squares projection of the frame onto the steering model (baseline
/// estimator); exact for on-grid static targets, biased off-grid.
cd projection_alpha(const CMat& y, const SymbolFrame& x, double tau_s, double doppler_hz,
                    const OfdmConfig& cfg, const DerivedParams& p);

/// Removes the deterministic Doppler rotation accumulated over the effective
/// receive window so the phase references t = 0 (calibrated closed form; see
/// the calibration test).
double sw_phase_correction(double theta_raw, double tau_s, double doppler_hz,
                           const OfdmConfig& cfg, const DerivedParams& p);

} // namespace estimate
} // namespace ofdmrad
