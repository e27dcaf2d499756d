#include "ofdmrad/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ofdmrad {
namespace io {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("file", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("file", "cannot write '" + path + "'");
    f << text;
}

Scenario scenario_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("json", e.what());
    }
    Scenario s;
    if (j.contains("config")) s.config = config_from_json(j["config"].dump());
    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("kind")) s.window = window_kind_from_string(w["kind"].get<std::string>());
        if (w.contains("sidelobe_db")) s.window_sidelobe_db = w["sidelobe_db"].get<double>();
    }
    if (j.contains("targets")) {
        for (const auto& t : j["targets"]) {
            TargetSpec spec;
            if (!t.contains("range_m")) throw ConfigError("targets.range_m", "required");
            spec.range_m = t["range_m"].get<double>();
            if (t.contains("velocity_mps")) spec.velocity_mps = t["velocity_mps"].get<double>();
            if (t.contains("velocity_kmh")) spec.velocity_mps = t["velocity_kmh"].get<double>() / 3.6;
            if (t.contains("rcs_dbsm")) spec.rcs_m2 = db_to_lin(t["rcs_dbsm"].get<double>());
            if (t.contains("rcs_m2")) spec.rcs_m2 = t["rcs_m2"].get<double>();
            if (t.contains("attenuation_db"))
                spec.attenuation = std::pow(10.0, -t["attenuation_db"].get<double>() / 20.0);
            if (t.contains("phase_deg")) spec.phase_rad = t["phase_deg"].get<double>() * kPi / 180.0;
            s.targets.push_back(spec);
        }
    }
    if (j.contains("noise")) {
        const auto& n = j["noise"];
        if (n.contains("enabled")) s.noise_enabled = n["enabled"].get<bool>();
        if (n.contains("power_dbm")) s.noise_power_dbm = n["power_dbm"].get<double>();
        if (n.contains("seed")) s.seed = n["seed"].get<std::uint64_t>();
    }
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("algorithm")) s.algorithm = j["algorithm"].get<std::string>();
    if (j.contains("algorithm_params")) {
        const auto& a = j["algorithm_params"];
        if (a.contains("sic_iterations")) s.sic_iterations = a["sic_iterations"].get<int>();
        if (a.contains("extra_symbol")) s.extra_symbol = a["extra_symbol"].get<bool>();
        if (a.contains("cfar")) {
            const auto& c = a["cfar"];
            if (c.contains("guard_range")) s.cfar.guard_range = c["guard_range"].get<int>();
            if (c.contains("guard_doppler")) s.cfar.guard_doppler = c["guard_doppler"].get<int>();
            if (c.contains("train_range")) s.cfar.train_range = c["train_range"].get<int>();
            if (c.contains("train_doppler")) s.cfar.train_doppler = c["train_doppler"].get<int>();
            if (c.contains("pfa")) s.cfar.pfa = c["pfa"].get<double>();
            if (c.contains("max_detections")) s.cfar.max_detections = c["max_detections"].get<int>();
        }
        if (a.contains("czt")) {
            const auto& c = a["czt"];
            if (c.contains("roi_bins")) s.czt.roi_bins = c["roi_bins"].get<int>();
            if (c.contains("zoom_factor")) s.czt.zoom_factor = c["zoom_factor"].get<int>();
        }
    }
    if (s.algorithm != "conventional" && s.algorithm != "jic_cc" && s.algorithm != "fr_sw" &&
        s.algorithm != "sic")
        throw ConfigError("algorithm", "unknown algorithm '" + s.algorithm + "'");
    s.cfar.validate();
    s.czt.validate();
    return s;
}

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_file(path)); }

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

void write_image_csv(const std::string& path, const RangeDopplerImage& image, int row_stride) {
    std::ostringstream out;
    const CMat& img = image.img;
    out << "range_m\\velocity_mps";
    for (int c = 0; c < img.cols; ++c) out << "," << fmt(image.velocity_axis_mps[c]);
    out << "\n";
    for (int r = 0; r < img.rows; r += row_stride) {
        out << fmt(image.range_axis_m[r]);
        for (int c = 0; c < img.cols; ++c) out << "," << fmt(watt_to_dbm(std::norm(img(r, c))));
        out << "\n";
    }
    write_file(path, out.str());
}

void dump_time_signal(const std::string& path, const TimeSignal& ts, std::uint64_t seed) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    for (const cd& s : ts.samples) {
        double iq[2] = {s.real(), s.imag()};
        f.write(reinterpret_cast<const char*>(iq), sizeof(iq));
    }
    ordered_json side;
    side["format"] = "complex_float64_interleaved";
    side["byte_order"] = "little_endian";
    side["sample_rate_hz"] = 1.0 / ts.sample_period_s;
    side["num_samples"] = ts.samples.size();
    side["start_offset_samples"] = ts.start_offset;
    side["tail_samples"] = ts.tail_samples;
    side["seed"] = seed;
    side["tool_version"] = kToolVersion;
    write_file(path + ".json", side.dump(2) + "\n");
}

void dump_image_binary(const std::string& path, const RangeDopplerImage& image) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    for (const cd& s : image.img.a) {
        double iq[2] = {s.real(), s.imag()};
        f.write(reinterpret_cast<const char*>(iq), sizeof(iq));
    }
    ordered_json side;
    side["format"] = "complex_float64_interleaved_column_major";
    side["rows"] = image.img.rows;
    side["cols"] = image.img.cols;
    side["range_bin_m"] = image.range_axis_m.size() > 1 ? image.range_axis_m[1] : 0.0;
    side["velocity_bin_mps"] = image.velocity_axis_mps.size() > 1
                                   ? image.velocity_axis_mps[1] - image.velocity_axis_mps[0]
                                   : 0.0;
    side["config_hash"] = image.config_hash;
    side["tool_version"] = kToolVersion;
    write_file(path + ".json", side.dump(2) + "\n");
}

std::string detections_to_json(const std::vector<CoarsePeak>& dets) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : dets) {
        ordered_json e;
        e["range_bin"] = d.range_bin;
        e["doppler_bin"] = d.doppler_bin;
        e["power_dbm"] = d.power_dbm;
        arr.push_back(e);
    }
    return arr.dump(2) + "\n";
}

std::string estimates_to_json(const std::vector<TargetEstimate>& ests, const OfdmConfig& cfg,
                              const DerivedParams& p) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : ests) {
        ordered_json o;
        o["range_m"] = e.tau_s * kSpeedOfLight / 2.0;
        o["velocity_mps"] = e.doppler_hz * p.wavelength_m / 2.0;
        o["alpha_db"] = 20.0 * std::log10(e.alpha_mag / std::sqrt(cfg.tx_power_w));
        o["phase_deg"] = e.theta_global_rad * 180.0 / kPi;
        o["losses"] = {{"l_isi", e.l_isi}, {"l_dop", e.l_dop}, {"l_win", e.l_win}};
        arr.push_back(o);
    }
    return arr.dump(2) + "\n";
}

void write_manifest(const std::string& out_dir, const OfdmConfig& cfg, std::uint64_t seed,
                    const std::vector<std::string>& files) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = seed;
    j["files"] = files;
    write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
}

} // namespace io
} // namespace ofdmrad
