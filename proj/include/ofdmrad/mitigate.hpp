#pragma once

#include <map>
#include <optional>

#include "ofdmrad/estimate.hpp"

namespace ofdmrad {

struct SwShiftPlan {
    int shift_count = 0;            // S = ceil(N/Ncp)
    std::vector<int> segment_start; // s*Ncp
    std::vector<int> segment_len;   // min(Ncp, N - s*Ncp)
};

SwShiftPlan make_shift_plan(int subcarriers, int cp_length);

struct MitigationResult {
    RangeDopplerImage final_image;
    std::vector<TargetEstimate> targets;   // estimated (cancelled/restored) targets
    std::vector<CoarsePeak> detections;    // full deduplicated detection list
    double floor_dbm = 0;
    std::map<std::string, double> timings_ms;
    std::optional<RangeDopplerImage> initial_image;
    std::optional<RangeDopplerImage> cleaned_image;
    bool fdcc_last_term_omitted = false;
};

struct MitigateOptions {
    bool quadratic = true;       // parabola-refined readout in the estimator
    bool vertex_readout = true;
    int sic_iterations = 15;
    bool keep_stage_images = false;
};

namespace mitigate {

/// Time-domain reconstruction of one estimated target (same primitive as the
/// channel oracle, noiseless).
TimeSignal reconstruct_td(const TargetEstimate& est, const SymbolFrame& x, const OfdmConfig& cfg,
                          const DerivedParams& p);

/// Frequency-domain reconstruction: demodulated time-domain reconstruction.
/// Exact for moving targets as well, unlike the per-symbol matrix model.
CMat reconstruct_fd(const TargetEstimate& est, const SymbolFrame& x, const OfdmConfig& cfg,
                    const DerivedParams& p);

/// Next-symbol coherent compensation: out_m = y_m + C .* y_{m+1} with
/// C(k) = e^{-j 2 pi k Ncp / N}. Uses the extra frame column when present,
/// otherwise omits the term for the last symbol (flagged).
CMat fdcc(const CMat& y, const OfdmConfig& cfg, bool* last_term_omitted = nullptr);

/// Joint interference cancellation with coherent compensation (frequency
/// domain): detect strong targets, cancel them, recover weak targets through
/// next-symbol compensation, re-estimate, final restore.
MitigationResult jic_cc(const CMat& y, const SymbolFrame& x, const OfdmConfig& cfg,
                        const DerivedParams& p, const WindowSpec& w, const CfarConfig& cfar_cfg,
                        const CztConfig& czt_cfg, const MitigateOptions& opts = {});

/// Full-reconstruction sliding window (time domain): cancel detected targets
/// in the sample stream, then stitch the in-CP bands of window-shifted images
/// into an extended-range image.
MitigationResult fr_sw(const TimeSignal& y, const SymbolFrame& x, const OfdmConfig& cfg,
                       const DerivedParams& p, const WindowSpec& w, const CfarConfig& cfar_cfg,
                       const CztConfig& czt_cfg, const MitigateOptions& opts = {});

/// Iterative cancel-then-detect baseline with grid-level projection estimates.
MitigationResult sic_baseline(const CMat& y, const SymbolFrame& x, const OfdmConfig& cfg,
                              const DerivedParams& p, const CfarConfig& cfar_cfg,
                              const MitigateOptions& opts = {});

/// Merge detections within one range and one Doppler bin, keeping the stronger.
std::vector<CoarsePeak> dedup_detections(std::vector<CoarsePeak> dets);

} // namespace mitigate
} // namespace ofdmrad
