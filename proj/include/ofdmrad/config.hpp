#pragma once

#include <cstdint>
#include <string>

#include "ofdmrad/types.hpp"

namespace ofdmrad {

/// Static OFDM system parameters. Gains and noise figure are stored linear;
/// the JSON file format takes dB/dBm and converts on load.
struct OfdmConfig {
    double carrier_frequency_hz = 3.5e9;
    double bandwidth_hz = 200e6;
    int subcarriers = 6652;       // N
    int cp_length = 458;          // N_cp, samples
    int symbols = 280;            // M
    double tx_power_w = dbm_to_watt(49.0);
    double tx_gain = db_to_lin(25.8);
    double rx_gain = db_to_lin(25.8);
    double noise_figure = db_to_lin(8.0);
    double ambient_temperature_k = 290.0;
    double tx_rx_isolation_db = 60.0;
    int adc_bits = 12;
    // Average-power to squared-peak-amplitude ratio of the spillover waveform.
    // Default calibrated so the interference-vs-floor analysis lands on the
    // reference gap; see quantization_floor().
    double papr_factor = 0.2558;

    void validate() const;  // throws ConfigError naming the offending field
};

/// Quantities derived from OfdmConfig; immutable after derive_params().
struct DerivedParams {
    double subcarrier_spacing_hz = 0;  // B/N
    double sample_period_s = 0;        // 1/B
    double data_duration_s = 0;        // N*Ts
    double cp_duration_s = 0;          // Ncp*Ts
    double symbol_duration_s = 0;      // Tcp + Td
    double wavelength_m = 0;           // c/fc
    double isi_free_range_m = 0;       // c*Tcp/2
    double unambiguous_range_m = 0;    // c*Td/2
    double max_ici_velocity_mps = 0;   // 0.1*df*lambda/2
    double processing_gain = 0;        // N*M
    double range_bin_m = 0;            // c*Ts/2
    int shift_count = 0;               // ceil(N/Ncp), 0 when Ncp = 0
};

DerivedParams derive_params(const OfdmConfig& cfg);

/// Loads a config from JSON text with unit-suffixed keys
/// (bandwidth_hz, tx_power_dbm, ...). Unknown keys are rejected.
OfdmConfig config_from_json(const std::string& json_text);
std::string config_to_json(const OfdmConfig& cfg);

/// FNV-1a over the canonical JSON form; used in output manifests.
std::uint64_t config_hash(const OfdmConfig& cfg);

/// Reference simulation parameter set (200 MHz, N=6652, long frame).
OfdmConfig simulation_config();
/// Measurement-style parameter set (500 MHz, N=1024, attenuation-defined targets).
OfdmConfig measurement_config();
/// Reduced configuration (N=1024, Ncp=128, M=64) for fast runs.
OfdmConfig desk_config();

} // namespace ofdmrad
