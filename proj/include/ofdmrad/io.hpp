#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ofdmrad/mitigate.hpp"

namespace ofdmrad {

/// Parsed scenario file: config + scene + processing selection.
struct Scenario {
    OfdmConfig config;
    WindowKind window = WindowKind::Rectangular;
    double window_sidelobe_db = 60.0;
    std::vector<TargetSpec> targets;
    bool noise_enabled = true;
    std::optional<double> noise_power_dbm;  // overrides the thermal level
    std::uint64_t seed = 1;
    std::string algorithm = "conventional";  // conventional | jic_cc | fr_sw | sic
    int sic_iterations = 15;
    bool extra_symbol = true;
    CfarConfig cfar;
    CztConfig czt;
};

namespace io {

Scenario scenario_from_json(const std::string& json_text);
Scenario load_scenario(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

/// Image power in dBm as CSV; the first row carries the velocity axis and the
/// first column the range axis. Row stride > 1 thins large images.
void write_image_csv(const std::string& path, const RangeDopplerImage& image, int row_stride = 1);

/// Interleaved little-endian float64 I/Q pairs plus a JSON sidecar.
void dump_time_signal(const std::string& path, const TimeSignal& ts, std::uint64_t seed);
void dump_image_binary(const std::string& path, const RangeDopplerImage& image);

std::string detections_to_json(const std::vector<CoarsePeak>& dets);
std::string estimates_to_json(const std::vector<TargetEstimate>& ests, const OfdmConfig& cfg,
                              const DerivedParams& p);

/// Manifest accompanying every output directory: config hash, seed, tool
/// version, produced files.
void write_manifest(const std::string& out_dir, const OfdmConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& files);

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace io
} // namespace ofdmrad
