#pragma once

#include <string>
#include <vector>

#include "ofdmrad/channel.hpp"

namespace ofdmrad {

enum class WindowKind { Rectangular, Hamming, Chebyshev };

struct WindowSpec {
    WindowKind kind = WindowKind::Rectangular;
    double sidelobe_db = 60.0;  // Chebyshev only
    DVec range_taps;            // w_r, length N
    DVec doppler_taps;          // w_d, length M
    double window_loss = 1.0;   // L_win = (mean w_r)^2 (mean w_d)^2
};

WindowSpec make_window(WindowKind kind, int n, int m, double sidelobe_db = 60.0);
WindowKind window_kind_from_string(const std::string& s);

/// Complex range-Doppler image. Columns are velocity bins with zero velocity
/// at column M/2; rows are range bins.
struct RangeDopplerImage {
    CMat img;
    DVec range_axis_m;
    DVec velocity_axis_mps;
    WindowKind window = WindowKind::Rectangular;
    std::uint64_t config_hash = 0;
};

namespace rxproc {

/// Per-symbol CP drop + unitary DFT, inverse of the synthesis scaling up to
/// the sqrt(Ptx) amplitude carried by the channel. window_offset shifts every
/// receive window forward (sliding-window support).
CMat demodulate(const TimeSignal& rx, const OfdmConfig& cfg, int window_offset = 0,
                int num_symbols = -1);

/// Zero-forcing equalization and 2D windowing: H = (Y ./ X) .* (w_r w_d^T).
CMat equalize_and_window(const CMat& y, const SymbolFrame& x, const WindowSpec& w);

/// Unitary IDFT along subcarriers, unitary DFT along symbols, columns permuted
/// so zero velocity is centered.
RangeDopplerImage range_doppler_image(const CMat& h, const OfdmConfig& cfg, const DerivedParams& p,
                                      const WindowSpec& w);

/// Full conventional chain: demodulate -> equalize/window -> image.
RangeDopplerImage conventional_processing(const TimeSignal& rx, const SymbolFrame& x,
                                          const OfdmConfig& cfg, const DerivedParams& p,
                                          const WindowSpec& w, int window_offset = 0);
RangeDopplerImage conventional_processing_fd(const CMat& y, const SymbolFrame& x,
                                             const OfdmConfig& cfg, const DerivedParams& p,
                                             const WindowSpec& w);

struct PeakQuery {
    int range_bin = 0;
    int doppler_bin = 0;
};

struct TargetMetric {
    int range_bin = 0;
    int doppler_bin = 0;       // location of the measured maximum
    double peak_power_dbm = 0;
    double sinr_db = 0;
};

struct ImageMetrics {
    double floor_dbm = 0;  // exponential-mean estimate from the median
    std::vector<TargetMetric> targets;
};

/// Floor = median cell power outside exclusion zones, corrected by 1/ln 2 so
/// it estimates the mean of exponential noise. Per-target SINR = peak within
/// +-search_radius of the query minus the floor. When local_rows > 0 the floor
/// for each target is taken over that many rows around it (composite images
/// built from independent segments have banded statistics).
ImageMetrics image_metrics(const RangeDopplerImage& image, const std::vector<PeakQuery>& truth,
                           int exclusion_range_bins = 16, int exclusion_doppler_bins = 8,
                           int search_radius = 2, int local_rows = 0);

/// Median-based floor of |I|^2 with exclusion zones; exposed for reuse.
double image_floor_dbm(const CMat& img, const std::vector<PeakQuery>& exclude,
                       int excl_range, int excl_doppler, int row_lo = 0, int row_hi = -1);

} // namespace rxproc
} // namespace ofdmrad
