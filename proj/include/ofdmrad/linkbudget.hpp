#pragma once

#include <optional>
#include <vector>

#include "ofdmrad/config.hpp"

namespace ofdmrad {

/// Ground-truth scene entry. Exactly one of rcs_m2 / attenuation (linear |alpha|)
/// must be set; attenuation-defined targets bypass the radar range equation.
struct TargetSpec {
    double range_m = 0;
    double velocity_mps = 0;
    std::optional<double> rcs_m2;
    std::optional<double> attenuation;  // linear amplitude |alpha|
    double phase_rad = 0;

    void validate(const DerivedParams& p) const;
};

struct LinkBudgetReport {
    double thermal_noise_w = 0;
    double quantization_noise_w = 0;
    std::vector<double> interference_w;        // per excess-delay target
    double dominant_noise_w = 0;               // max(thermal, quant, sum interference)
    std::vector<double> ideal_snr;             // per target, linear
    std::vector<double> actual_sinr;           // per target, linear
    std::vector<double> max_detectable_range_m;  // per RCS-defined target, 17 dB bound
};

namespace linkbudget {

/// Captured signal fraction for a round-trip delay tau.
double eta(double tau_s, const DerivedParams& p);

double thermal_noise_power(const OfdmConfig& cfg);

/// Post-processing SNR with thermal noise only; requires rcs.
double ideal_snr(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p);

/// Signal-to-quantization-noise ratio in dB: 6.02*Nbit + 10log10(3F).
double sqnr_db(int adc_bits, double papr_factor);

/// Quantization noise floor referenced to the Tx-Rx spillover peak.
double quantization_floor(const OfdmConfig& cfg);

/// Interference power contributed by one excess-delay target (0 inside the CP).
double interference_power(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p);

/// Echo power at the receiver input (range equation, no processing gain).
double received_power(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p);

/// SINR with window-mismatch loss and the dominant noise/interference floor.
double actual_sinr(const TargetSpec& t, double dominant_noise_w,
                   const OfdmConfig& cfg, const DerivedParams& p);

/// Range (bin-gridded) at which a target of the given RCS maximizes its
/// interference power.
double worst_case_interferer_range(double rcs_m2, const OfdmConfig& cfg, const DerivedParams& p);

struct MaxRangeResult {
    double range_m = 0;
    bool capped = false;             // limited by the unambiguous range
    bool below_threshold = false;    // no range satisfies the threshold
};

/// Largest range where actual_sinr >= threshold, capped at the unambiguous
/// range. SINR is monotone decreasing in range, so bisection applies.
MaxRangeResult max_detectable_range(double target_rcs_m2,
                                    const std::optional<TargetSpec>& interferer,
                                    double threshold_db,
                                    const OfdmConfig& cfg, const DerivedParams& p);

LinkBudgetReport make_report(const std::vector<TargetSpec>& targets,
                             const OfdmConfig& cfg, const DerivedParams& p);

} // namespace linkbudget
} // namespace ofdmrad
