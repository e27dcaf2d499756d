#include "ofdmrad/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

namespace ofdmrad {

using nlohmann::json;

void OfdmConfig::validate() const {
    if (subcarriers <= 0) throw ConfigError("subcarriers", "must be > 0");
    if (symbols <= 0) throw ConfigError("symbols", "must be > 0");
    if (symbols % 2 != 0) throw ConfigError("symbols", "must be even (centered velocity axis)");
    if (cp_length < 0 || cp_length >= subcarriers)
        throw ConfigError("cp_length", "must satisfy 0 <= cp_length < subcarriers");
    if (bandwidth_hz <= 0) throw ConfigError("bandwidth_hz", "must be > 0");
    if (carrier_frequency_hz <= bandwidth_hz / 2)
        throw ConfigError("carrier_frequency_hz", "must exceed half the bandwidth");
    if (tx_power_w <= 0) throw ConfigError("tx_power_dbm", "transmit power must be positive");
    if (tx_gain <= 0 || rx_gain <= 0) throw ConfigError("tx_gain_dbi", "antenna gains must be positive");
    if (noise_figure < 1.0) throw ConfigError("noise_figure_db", "noise figure must be >= 0 dB");
    if (ambient_temperature_k <= 0) throw ConfigError("ambient_temperature_k", "must be > 0");
    if (adc_bits < 1) throw ConfigError("adc_bits", "must be >= 1");
    if (papr_factor <= 0) throw ConfigError("papr_factor", "must be > 0");
}

DerivedParams derive_params(const OfdmConfig& cfg) {
    cfg.validate();
    DerivedParams p;
    p.subcarrier_spacing_hz = cfg.bandwidth_hz / cfg.subcarriers;
    p.sample_period_s = 1.0 / cfg.bandwidth_hz;
    p.data_duration_s = cfg.subcarriers * p.sample_period_s;
    p.cp_duration_s = cfg.cp_length * p.sample_period_s;
    p.symbol_duration_s = p.cp_duration_s + p.data_duration_s;
    p.wavelength_m = kSpeedOfLight / cfg.carrier_frequency_hz;
    p.isi_free_range_m = kSpeedOfLight * p.cp_duration_s / 2.0;
    p.unambiguous_range_m = kSpeedOfLight * p.data_duration_s / 2.0;
    p.max_ici_velocity_mps = 0.1 * p.subcarrier_spacing_hz * p.wavelength_m / 2.0;
    p.processing_gain = static_cast<double>(cfg.subcarriers) * cfg.symbols;
    p.range_bin_m = kSpeedOfLight * p.sample_period_s / 2.0;
    p.shift_count = cfg.cp_length > 0
                        ? static_cast<int>((cfg.subcarriers + cfg.cp_length - 1) / cfg.cp_length)
                        : 0;
    return p;
}

OfdmConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("json", e.what());
    }
    static const std::set<std::string> known = {
        "carrier_frequency_hz", "bandwidth_hz", "subcarriers", "cp_length", "symbols",
        "tx_power_dbm", "tx_gain_dbi", "rx_gain_dbi", "noise_figure_db",
        "ambient_temperature_k", "tx_rx_isolation_db", "adc_bits", "papr_factor"};
    for (auto& [key, val] : j.items()) {
        (void)val;
        if (!known.count(key)) throw ConfigError(key, "unknown config key");
    }
    OfdmConfig c;
    auto get = [&](const char* key, auto&& setter) {
        if (j.contains(key)) {
            if (!j[key].is_number()) throw ConfigError(key, "must be a number");
            setter(j[key].get<double>());
        }
    };
    get("carrier_frequency_hz", [&](double v) { c.carrier_frequency_hz = v; });
    get("bandwidth_hz", [&](double v) { c.bandwidth_hz = v; });
    get("subcarriers", [&](double v) { c.subcarriers = static_cast<int>(v); });
    get("cp_length", [&](double v) { c.cp_length = static_cast<int>(v); });
    get("symbols", [&](double v) { c.symbols = static_cast<int>(v); });
    get("tx_power_dbm", [&](double v) { c.tx_power_w = dbm_to_watt(v); });
    get("tx_gain_dbi", [&](double v) { c.tx_gain = db_to_lin(v); });
    get("rx_gain_dbi", [&](double v) { c.rx_gain = db_to_lin(v); });
    get("noise_figure_db", [&](double v) { c.noise_figure = db_to_lin(v); });
    get("ambient_temperature_k", [&](double v) { c.ambient_temperature_k = v; });
    get("tx_rx_isolation_db", [&](double v) { c.tx_rx_isolation_db = v; });
    get("adc_bits", [&](double v) { c.adc_bits = static_cast<int>(v); });
    get("papr_factor", [&](double v) { c.papr_factor = v; });
    c.validate();
    return c;
}

std::string config_to_json(const OfdmConfig& c) {
    json j;
    j["carrier_frequency_hz"] = c.carrier_frequency_hz;
    j["bandwidth_hz"] = c.bandwidth_hz;
    j["subcarriers"] = c.subcarriers;
    j["cp_length"] = c.cp_length;
    j["symbols"] = c.symbols;
    j["tx_power_dbm"] = watt_to_dbm(c.tx_power_w);
    j["tx_gain_dbi"] = lin_to_db(c.tx_gain);
    j["rx_gain_dbi"] = lin_to_db(c.rx_gain);
    j["noise_figure_db"] = lin_to_db(c.noise_figure);
    j["ambient_temperature_k"] = c.ambient_temperature_k;
    j["tx_rx_isolation_db"] = c.tx_rx_isolation_db;
    j["adc_bits"] = c.adc_bits;
    j["papr_factor"] = c.papr_factor;
    return j.dump(2);
}

std::uint64_t config_hash(const OfdmConfig& cfg) {
    std::string s = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

OfdmConfig simulation_config() { return OfdmConfig{}; }

OfdmConfig measurement_config() {
    OfdmConfig c;
    c.carrier_frequency_hz = 3.68e9;
    c.bandwidth_hz = 500e6;
    c.subcarriers = 1024;
    c.cp_length = 256;
    c.symbols = 1024;
    c.tx_power_w = 1.0;  // attenuation-defined targets; absolute scale is free
    c.tx_gain = 1.0;
    c.rx_gain = 1.0;
    return c;
}

OfdmConfig desk_config() {
    OfdmConfig c;
    c.subcarriers = 1024;
    c.cp_length = 128;
    c.symbols = 64;
    return c;
}

} // namespace ofdmrad
