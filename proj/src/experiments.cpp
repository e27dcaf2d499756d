#include "ofdmrad/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "ofdmrad/rng.hpp"

namespace ofdmrad {
namespace experiments {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kDetectionThresholdDb = 17.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

CheckResult check(const std::string& name, bool pass, double value, const std::string& detail) {
    return {name, pass, value, detail};
}

} // namespace

void write_summary(const ExperimentResult& result, const std::string& out_dir) {
    ordered_json j;
    j["kind"] = result.kind;
    j["all_pass"] = result.all_pass();
    j["checks"] = ordered_json::array();
    for (const auto& c : result.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["value"] = c.value;
        e["detail"] = c.detail;
        j["checks"].push_back(e);
    }
    io::write_file(out_dir + "/summary.json", j.dump(2) + "\n");
}

namespace {

struct Simulated {
    SymbolFrame frame;
    TimeSignal rx;
    std::vector<TargetDerived> derived;
};

Simulated simulate(const OfdmConfig& cfg, const DerivedParams& p,
                   const std::vector<TargetSpec>& targets, double noise_w, std::uint64_t seed,
                   bool extra_symbol = true) {
    Simulated s;
    s.frame = waveform::generate_data_frame(cfg, rng::derive(seed, 0xF0A3), extra_symbol);
    TimeSignal tx = waveform::synthesize_time_signal(s.frame, cfg);
    for (const auto& t : targets) s.derived.push_back(channel::target_derived(t, cfg, p));
    s.rx = channel::apply_channel_time(tx, s.frame, s.derived, noise_w, rng::derive(seed, 0x9015), cfg);
    return s;
}

bool in_detections(const std::vector<CoarsePeak>& dets, int range_bin, int doppler_bin, int tol) {
    for (const auto& d : dets)
        if (std::abs(d.range_bin - range_bin) <= tol && std::abs(d.doppler_bin - doppler_bin) <= tol)
            return true;
    return false;
}

double median_of(std::vector<double> v) {
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

} // namespace

// ---------------------------------------------------------------------------
// Analytic floors (received power profile vs range)
// ---------------------------------------------------------------------------

ExperimentResult run_noise_floors(const std::string& out_dir) {
    ExperimentResult res;
    res.kind = "noise-floors";
    OfdmConfig cfg = simulation_config();
    DerivedParams p = derive_params(cfg);

    const double thermal = linkbudget::thermal_noise_power(cfg);
    const double quant = linkbudget::quantization_floor(cfg);
    const double floor_dbm = watt_to_dbm(std::max(thermal, quant));
    const int n_points = 2000;

    TargetSpec t;
    t.rcs_m2 = db_to_lin(20.0);

    std::ostringstream csv;
    csv << "range_m,thermal_dbm,quant_dbm,interference_dbm,rx_power_dbm,image_peak_dbm\n";
    double max_gap = -1e9, max_loss = 0;
    for (int i = 1; i <= n_points; ++i) {
        t.range_m = i * p.unambiguous_range_m / (n_points + 1);
        double pr = linkbudget::received_power(t, cfg, p);
        double pint = linkbudget::interference_power(t, cfg, p);
        double e = linkbudget::eta(2.0 * t.range_m / kSpeedOfLight, p);
        double rx_dbm = watt_to_dbm(pr * p.processing_gain);
        double peak_dbm = e > 0 ? watt_to_dbm(pr * p.processing_gain * e * e) : -400.0;
        csv << fmt(t.range_m) << "," << fmt(watt_to_dbm(thermal)) << "," << fmt(watt_to_dbm(quant))
            << "," << (pint > 0 ? fmt(watt_to_dbm(pint)) : "-inf") << "," << fmt(rx_dbm) << ","
            << fmt(peak_dbm) << "\n";
        if (pint > 0) max_gap = std::max(max_gap, watt_to_dbm(pint) - floor_dbm);
        if (e > 0) max_loss = std::max(max_loss, rx_dbm - peak_dbm);
    }
    io::write_file(out_dir + "/noise_floors.csv", csv.str());
    res.files.push_back("noise_floors.csv");

    res.checks.push_back(check("floors_interference_gap_db", std::abs(max_gap - 22.6) <= 1.0, max_gap,
                               "max(interference - max(thermal,quant)), bound 22.6 +- 1.0 dB"));
    res.checks.push_back(check("floors_window_mismatch_loss_db", std::abs(max_loss - 22.7) <= 0.5,
                               max_loss, "max image-peak loss vs no-mismatch curve, bound 22.7 +- 0.5 dB"));
    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, 0, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Maximum detectable range vs interferer RCS
// ---------------------------------------------------------------------------

ExperimentResult run_max_range(const std::string& out_dir) {
    ExperimentResult res;
    res.kind = "max-range";
    OfdmConfig cfg = simulation_config();
    DerivedParams p = derive_params(cfg);

    const double worst_r = linkbudget::worst_case_interferer_range(db_to_lin(20.0), cfg, p);
    const std::vector<double> target_rcs_dbsm = {0.0, 10.0, 20.0};

    std::ostringstream csv;
    csv << "interferer_rcs_dbsm,max_range_m_rcs0,max_range_m_rcs10,max_range_m_rcs20\n";
    std::vector<std::vector<double>> curves(target_rcs_dbsm.size());
    for (int i_dbsm = 0; i_dbsm <= 30; ++i_dbsm) {
        TargetSpec interferer;
        interferer.range_m = worst_r;
        interferer.rcs_m2 = db_to_lin(static_cast<double>(i_dbsm));
        csv << i_dbsm;
        for (std::size_t k = 0; k < target_rcs_dbsm.size(); ++k) {
            auto r = linkbudget::max_detectable_range(db_to_lin(target_rcs_dbsm[k]), interferer,
                                                      kDetectionThresholdDb, cfg, p);
            curves[k].push_back(r.range_m);
            csv << "," << fmt(r.range_m);
        }
        csv << "\n";
    }
    io::write_file(out_dir + "/max_range.csv", csv.str());
    res.files.push_back("max_range.csv");

    bool monotone = true;
    for (const auto& c : curves)
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i] > c[i - 1] + 1e-6) monotone = false;
    res.checks.push_back(check("maxrange_monotone_nonincreasing", monotone, monotone ? 1 : 0,
                               "every curve non-increasing in interferer RCS"));

    auto nocap = linkbudget::max_detectable_range(db_to_lin(20.0), std::nullopt,
                                                  kDetectionThresholdDb, cfg, p);
    bool capped = nocap.capped && std::abs(nocap.range_m - p.unambiguous_range_m) < 1e-6;
    res.checks.push_back(check("maxrange_cap_no_interferer", capped, nocap.range_m,
                               "20 dBsm target without interferer capped at the unambiguous range"));
    bool weak_cap = true;
    for (std::size_t k = 0; k < curves.size(); ++k)
        if (curves[k][0] < 0.95 * p.unambiguous_range_m) weak_cap = false;
    res.checks.push_back(check("maxrange_cap_weak_interferer", weak_cap, curves[0][0],
                               "all curves >= 95% of the cap at 0 dBsm interferer"));
    bool collapse = true;
    for (std::size_t k = 0; k < curves.size(); ++k)
        if (curves[k].back() > 0.95 * p.unambiguous_range_m) collapse = false;
    res.checks.push_back(check("maxrange_strong_interferer_pulls_off_cap", collapse, curves[0].back(),
                               "all curves < 95% of the cap at 30 dBsm interferer"));
    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, 0, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Weak-target SINR sweep (Monte Carlo)
// ---------------------------------------------------------------------------

SinrSweepSetup sinr_sweep_setup_full() {
    SinrSweepSetup s;
    s.cfg = simulation_config();
    DerivedParams p = derive_params(s.cfg);
    s.weak_bin = static_cast<int>(std::lround(4839.0 / p.range_bin_m));
    s.interferer_bin = static_cast<int>(
        std::lround(linkbudget::worst_case_interferer_range(db_to_lin(20.0), s.cfg, p) / p.range_bin_m));
    s.weak_rcs_dbsm = {-15, -10, -5, 0, 5, 10, 15, 20};
    s.trials = 10;
    s.label = "full";
    return s;
}

SinrSweepSetup sinr_sweep_setup_desk() {
    SinrSweepSetup s;
    s.cfg = desk_config();
    DerivedParams p = derive_params(s.cfg);
    s.weak_bin = 993;  // near the unambiguous edge, on-grid
    s.interferer_bin = static_cast<int>(
        std::lround(linkbudget::worst_case_interferer_range(db_to_lin(20.0), s.cfg, p) / p.range_bin_m));
    s.weak_rcs_dbsm = {-45, -40, -35, -30, -25, -20, -15};
    s.trials = 10;
    s.label = "desk";
    s.strict_bounds = false;
    return s;
}

ExperimentResult run_sinr_sweep(const SinrSweepSetup& setup, const std::string& out_dir) {
    ExperimentResult res;
    res.kind = "sinr-sweep-" + setup.label;
    const OfdmConfig& cfg = setup.cfg;
    DerivedParams p = derive_params(cfg);
    const int m = cfg.symbols;
    const double thermal = linkbudget::thermal_noise_power(cfg);

    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, m);
    // Detector pinned to the reliable-detection bound the benchmark defines;
    // the breakdown of the iterative baseline happens exactly at this level.
    CfarConfig cfar;
    cfar.pfa = detect::pfa_for_threshold_db(kDetectionThresholdDb,
                                            detect::interior_training_cells(cfar));
    cfar.max_detections = 10;
    CztConfig czt;

    const double weak_range = setup.weak_bin * p.range_bin_m;
    const double int_range = setup.interferer_bin * p.range_bin_m;

    TargetSpec weak_probe;
    weak_probe.range_m = weak_range;
    weak_probe.rcs_m2 = 1.0;
    const double eta_w = linkbudget::eta(2.0 * weak_range / kSpeedOfLight, p);

    const int n_pts = static_cast<int>(setup.weak_rcs_dbsm.size());
    const int n_algos = 4;
    enum { Conv = 0, Sic = 1, Jic = 2, Frsw = 3 };
    std::vector<std::vector<double>> sinr(n_pts * n_algos);
    std::vector<std::vector<int>> detected(n_pts * n_algos);
    for (auto& v : sinr) v.resize(setup.trials, 0.0);
    for (auto& v : detected) v.resize(setup.trials, 0);

    std::vector<rxproc::PeakQuery> truth = {{setup.interferer_bin, m / 2}, {setup.weak_bin, m / 2}};

#pragma omp parallel for schedule(dynamic) collapse(2)
    for (int pt = 0; pt < n_pts; ++pt) {
        for (int trial = 0; trial < setup.trials; ++trial) {
            std::uint64_t tseed = rng::derive(setup.seed, pt, trial);
            TargetSpec interferer;
            interferer.range_m = int_range;
            interferer.rcs_m2 = db_to_lin(setup.interferer_rcs_dbsm);
            interferer.phase_rad = 2.0 * kPi * rng::uniform(tseed, 0x1111, 0);
            TargetSpec weak;
            weak.range_m = weak_range;
            weak.rcs_m2 = db_to_lin(setup.weak_rcs_dbsm[pt]);
            weak.phase_rad = 2.0 * kPi * rng::uniform(tseed, 0x2222, 0);

            Simulated sim = simulate(cfg, p, {interferer, weak}, thermal, tseed, true);
            CMat y_all = rxproc::demodulate(sim.rx, cfg, 0, m + 1);
            CMat y_main(cfg.subcarriers, m);
            for (int c = 0; c < m; ++c)
                std::copy(y_all.col(c), y_all.col(c) + cfg.subcarriers, y_main.col(c));

            auto record = [&](int algo, const RangeDopplerImage& img,
                              const std::vector<CoarsePeak>& dets) {
                auto metrics = rxproc::image_metrics(img, truth, 16, 8, 2, 64);
                double s = metrics.targets[1].sinr_db;
                sinr[pt * n_algos + algo][trial] = s;
                bool det = in_detections(dets, setup.weak_bin, m / 2, 1) &&
                           s >= kDetectionThresholdDb;
                detected[pt * n_algos + algo][trial] = det ? 1 : 0;
            };

            RangeDopplerImage conv_img = rxproc::conventional_processing_fd(y_main, sim.frame, cfg, p, w);
            record(Conv, conv_img, detect::cfar_detect(conv_img, cfar));

            MitigateOptions mopt;
            MitigationResult sic = mitigate::sic_baseline(y_main, sim.frame, cfg, p, cfar, mopt);
            record(Sic, sic.final_image, sic.detections);

            MitigationResult jic = mitigate::jic_cc(y_all, sim.frame, cfg, p, w, cfar, czt, mopt);
            record(Jic, jic.final_image, jic.detections);

            MitigationResult frsw = mitigate::fr_sw(sim.rx, sim.frame, cfg, p, w, cfar, czt, mopt);
            record(Frsw, frsw.final_image, frsw.detections);
        }
    }

    std::ostringstream csv;
    csv << "weak_rcs_dbsm,ideal_snr_db,conv_sinr_db,sic_sinr_db,jic_sinr_db,frsw_sinr_db,"
           "conv_rate,sic_rate,jic_rate,frsw_rate\n";
    std::vector<double> ideal_db(n_pts), mean_sinr(n_pts * n_algos), rate(n_pts * n_algos);
    for (int pt = 0; pt < n_pts; ++pt) {
        weak_probe.rcs_m2 = db_to_lin(setup.weak_rcs_dbsm[pt]);
        ideal_db[pt] = lin_to_db(linkbudget::ideal_snr(weak_probe, cfg, p));
        csv << fmt(setup.weak_rcs_dbsm[pt]) << "," << fmt(ideal_db[pt]);
        for (int a = 0; a < n_algos; ++a) {
            double s = 0, d = 0;
            for (int t = 0; t < setup.trials; ++t) {
                s += sinr[pt * n_algos + a][t];
                d += detected[pt * n_algos + a][t];
            }
            mean_sinr[pt * n_algos + a] = s / setup.trials;
            rate[pt * n_algos + a] = d / setup.trials;
        }
        for (int a = 0; a < n_algos; ++a) csv << "," << fmt(mean_sinr[pt * n_algos + a]);
        for (int a = 0; a < n_algos; ++a) csv << "," << fmt(rate[pt * n_algos + a]);
        csv << "\n";
    }
    io::write_file(out_dir + "/sinr_sweep_" + setup.label + ".csv", csv.str());
    res.files.push_back("sinr_sweep_" + setup.label + ".csv");

    if (setup.strict_bounds) {
        // (a) FR-SW tracks the ideal curve.
        double worst_frsw = 0;
        for (int pt = 0; pt < n_pts; ++pt)
            worst_frsw = std::max(worst_frsw, std::abs(mean_sinr[pt * n_algos + Frsw] - ideal_db[pt]));
        res.checks.push_back(check("sweep_frsw_within_1p5db_of_ideal", worst_frsw <= 1.5, worst_frsw,
                                   "max |mean FR-SW SINR - ideal| over the sweep"));

        // (b) JIC-CC near-ideal and above the detection threshold where ideal >= 21 dB.
        double worst_jic = 0, min_jic = 1e9;
        for (int pt = 0; pt < n_pts; ++pt) {
            if (ideal_db[pt] < 21.0) continue;
            worst_jic = std::max(worst_jic, std::abs(mean_sinr[pt * n_algos + Jic] - ideal_db[pt]));
            min_jic = std::min(min_jic, mean_sinr[pt * n_algos + Jic]);
        }
        res.checks.push_back(check("sweep_jic_within_4p5db_of_ideal", worst_jic <= 4.5, worst_jic,
                                   "max |mean JIC-CC SINR - ideal| where ideal >= 21 dB"));
        res.checks.push_back(check("sweep_jic_above_threshold", min_jic >= kDetectionThresholdDb,
                                   min_jic, "min mean JIC-CC SINR where ideal >= 21 dB"));
    } else {
        // Reduced scale: relative orderings only (mean over trials).
        bool order_ok = true;
        double min_gap = 1e9, min_fj = 1e9;
        for (int pt = 0; pt < n_pts; ++pt) {
            if (ideal_db[pt] < 26.0) continue;
            double c = mean_sinr[pt * n_algos + Conv];
            double j = mean_sinr[pt * n_algos + Jic];
            double fr = mean_sinr[pt * n_algos + Frsw];
            min_gap = std::min(min_gap, j - c);
            min_fj = std::min(min_fj, fr - j);
            if (j < c + 10.0 || fr < j - 1.0) order_ok = false;
        }
        res.checks.push_back(check("sweep_orderings", order_ok, min_gap,
                                   "mean JIC-CC >= conventional + 10 dB and FR-SW >= JIC-CC - 1 dB "
                                   "where ideal >= 26 dB (min FR-SW - JIC gap " + fmt(min_fj) + ")"));
    }

    // (c) SIC breakdown contrast: points where the mismatch-degraded SINR
    // available to SIC's detector sits clearly below the reliable-detection
    // bound while the compensation path still recovers the target.
    bool contrast_ok = true;
    int contrast_pts = 0;
    double worst_sic_rate = 0, worst_jic_rate = 1;
    for (int pt = 0; pt < n_pts; ++pt) {
        double degraded = ideal_db[pt] + 20.0 * std::log10(eta_w);
        if (ideal_db[pt] < 26.0 || degraded >= kDetectionThresholdDb - 2.0) continue;
        ++contrast_pts;
        worst_sic_rate = std::max(worst_sic_rate, rate[pt * n_algos + Sic]);
        worst_jic_rate = std::min(worst_jic_rate, rate[pt * n_algos + Jic]);
        if (!(rate[pt * n_algos + Sic] < 0.2 && rate[pt * n_algos + Jic] > 0.8)) contrast_ok = false;
    }
    res.checks.push_back(check("sweep_sic_breakdown_vs_jic", contrast_ok && contrast_pts > 0,
                               worst_sic_rate,
                               "SIC rate < 0.2 and JIC rate > 0.8 at " + std::to_string(contrast_pts) +
                                   " breakdown points (worst SIC rate / JIC rate " +
                                   fmt(worst_sic_rate) + " / " + fmt(worst_jic_rate) + ")"));

    // Per-trial monotone improvement where the weak peak is resolvable.
    bool monotone = true;
    for (int pt = 0; pt < n_pts; ++pt) {
        if (ideal_db[pt] < 26.0) continue;
        for (int t = 0; t < setup.trials; ++t) {
            double c = sinr[pt * n_algos + Conv][t];
            if (c > sinr[pt * n_algos + Jic][t] + 0.5 || c > sinr[pt * n_algos + Frsw][t] + 0.5)
                monotone = false;
        }
    }
    res.checks.push_back(check("sweep_monotone_improvement", monotone, monotone ? 1 : 0,
                               "conventional <= JIC-CC and <= FR-SW per trial where ideal >= 26 dB"));

    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, setup.seed, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Estimator accuracy and residual floors around half-bin offsets
// ---------------------------------------------------------------------------

ExperimentResult run_estimator_mae(const std::string& out_dir, std::uint64_t seed) {
    ExperimentResult res;
    res.kind = "estimator-mae";
    OfdmConfig cfg = simulation_config();
    DerivedParams p = derive_params(cfg);
    const int m = cfg.symbols;
    const double thermal = linkbudget::thermal_noise_power(cfg);
    const double thermal_dbm = watt_to_dbm(thermal);

    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, m);
    CfarConfig cfar;
    cfar.pfa = 1e-6;
    cfar.max_detections = 4;
    CztConfig czt;

    const int center_bin = 1000;  // nominal 750 m, on the range grid
    const std::vector<double> offsets = {-0.5, -0.4, -0.3, -0.2, -0.1, 0.0,
                                         0.1,  0.2,  0.3,  0.4,  0.5};
    const std::vector<double> dopplers = {0.0, 0.1 * p.subcarrier_spacing_hz};

    std::ostringstream csv;
    csv << "doppler_hz,offset_bins,czt_amp_err_db,czt_phase_err_deg,czt_floor_dbm,"
           "proj_amp_err_db,proj_floor_dbm\n";

    double czt_amp_mae = 0, czt_phase_mae = 0, proj_amp_mae = 0;
    double worst_floor_dev = 0;
    double corner_proj_floor = 0;
    int n_runs = 0;
    bool corner_seen = false;

    for (double fd : dopplers) {
        for (double off : offsets) {
            std::uint64_t tseed = rng::derive(seed, static_cast<std::uint64_t>(fd),
                                              static_cast<std::uint64_t>((off + 1.0) * 1000));
            TargetSpec spec;
            spec.range_m = (center_bin + off) * p.range_bin_m;
            spec.rcs_m2 = db_to_lin(20.0);
            spec.velocity_mps = fd * p.wavelength_m / 2.0;
            spec.phase_rad = 2.0 * kPi * rng::uniform(tseed, 0xBEEF, 0);

            Simulated sim = simulate(cfg, p, {spec}, thermal, tseed, false);
            CMat y = rxproc::demodulate(sim.rx, cfg, 0, m);
            RangeDopplerImage img = rxproc::conventional_processing_fd(y, sim.frame, cfg, p, w);
            auto dets = detect::cfar_detect(img, cfar);
            if (dets.empty()) throw ConfigError("estimator-mae", "target not detected");
            CoarsePeak pk = dets.front();

            const cd alpha_true = sim.derived[0].amplitude;

            // Zoom-based estimate and exact reconstruction subtraction.
            CMat h = rxproc::equalize_and_window(y, sim.frame, w);
            TargetEstimate est = estimate::estimate_target(h, pk, czt, w, cfg, p, {});
            double amp_err = std::abs(20.0 * std::log10(est.alpha_mag / std::abs(alpha_true)));
            double ph_err = std::arg(est.alpha_tilde() * std::conj(alpha_true)) * 180.0 / kPi;
            ph_err = std::abs(ph_err);

            CMat rec = mitigate::reconstruct_fd(est, sim.frame, cfg, p);
            CMat resid = y;
            for (std::size_t i = 0; i < resid.a.size(); ++i) resid.a[i] -= rec.a[i];
            RangeDopplerImage rimg = rxproc::conventional_processing_fd(resid, sim.frame, cfg, p, w);
            double czt_floor =
                rxproc::image_floor_dbm(rimg.img, {{pk.range_bin, pk.doppler_bin}}, 16, 8);

            // Grid-level projection baseline.
            double tau_g = pk.range_bin * p.sample_period_s;
            double fd_g = (pk.doppler_bin - m / 2) / (m * p.symbol_duration_s);
            cd alpha_proj = estimate::projection_alpha(y, sim.frame, tau_g, fd_g, cfg, p);
            double proj_amp_err = std::abs(20.0 * std::log10(std::abs(alpha_proj) / std::abs(alpha_true)));
            TargetDerived proj_tgt = channel::target_from_params(alpha_proj, tau_g, fd_g, p);
            CMat proj_rec = channel::model_received_frame_fd(sim.frame, {proj_tgt}, cfg, p);
            CMat proj_resid = y;
            for (std::size_t i = 0; i < proj_resid.a.size(); ++i) proj_resid.a[i] -= proj_rec.a[i];
            RangeDopplerImage pimg =
                rxproc::conventional_processing_fd(proj_resid, sim.frame, cfg, p, w);
            double proj_floor =
                rxproc::image_floor_dbm(pimg.img, {{pk.range_bin, pk.doppler_bin}}, 16, 8);

            csv << fmt(fd) << "," << fmt(off) << "," << fmt(amp_err) << "," << fmt(ph_err) << ","
                << fmt(czt_floor) << "," << fmt(proj_amp_err) << "," << fmt(proj_floor) << "\n";

            czt_amp_mae += amp_err;
            czt_phase_mae += ph_err;
            proj_amp_mae += proj_amp_err;
            worst_floor_dev = std::max(worst_floor_dev, std::abs(czt_floor - thermal_dbm));
            if (std::abs(off) >= 0.5 && fd > 0) {
                corner_proj_floor = proj_floor;
                corner_seen = true;
            }
            ++n_runs;
        }
    }
    czt_amp_mae /= n_runs;
    czt_phase_mae /= n_runs;
    proj_amp_mae /= n_runs;

    io::write_file(out_dir + "/estimator_mae.csv", csv.str());
    res.files.push_back("estimator_mae.csv");

    res.checks.push_back(check("estimator_czt_floor_within_1db_of_thermal", worst_floor_dev <= 1.0,
                               worst_floor_dev, "max |residual floor - (-82.965 dBm)| over all offsets"));
    res.checks.push_back(check("estimator_proj_floor_10db_above_thermal_at_corner",
                               corner_seen && corner_proj_floor >= thermal_dbm + 10.0,
                               corner_proj_floor,
                               "projection residual floor at the off-grid moving corner"));
    res.checks.push_back(check("estimator_czt_amp_mae_db", czt_amp_mae < 0.1, czt_amp_mae,
                               "zoom-path amplitude MAE bound 0.1 dB"));
    res.checks.push_back(check("estimator_czt_phase_mae_deg", czt_phase_mae < 0.05, czt_phase_mae,
                               "zoom-path phase MAE bound 0.05 deg"));
    res.checks.push_back(check("estimator_proj_worse_than_czt", proj_amp_mae > czt_amp_mae, proj_amp_mae,
                               "projection amplitude MAE exceeds the zoom path"));
    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, seed, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Six-target measurement-style scenario
// ---------------------------------------------------------------------------

ExperimentResult run_table_scenario(const std::string& out_dir, std::uint64_t seed) {
    ExperimentResult res;
    res.kind = "scenario";
    OfdmConfig cfg = measurement_config();
    DerivedParams p = derive_params(cfg);
    const int m = cfg.symbols;

    struct Row {
        double range_m, vel_kmh, atten_db;
    };
    const std::vector<Row> rows = {{72, 0, 0},  {150, -220, 0}, {162, 220, 0},
                                   {222, 0, 50}, {228, 0, 50},  {240, 0, 0}};
    std::vector<TargetSpec> targets;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        TargetSpec t;
        t.range_m = rows[i].range_m;
        t.velocity_mps = rows[i].vel_kmh / 3.6;
        t.attenuation = std::pow(10.0, -rows[i].atten_db / 20.0);
        t.phase_rad = 2.0 * kPi * rng::uniform(seed, 0xAB, i);
        targets.push_back(t);
    }

    // Noise floor placed 85 dB below the weakest strong-target image peak so
    // every strong target clears 60 dB and weak targets stay recoverable.
    double eta240 = linkbudget::eta(2.0 * 240.0 / kSpeedOfLight, p);
    double noise_w = p.processing_gain * eta240 * eta240 * cfg.tx_power_w / db_to_lin(85.0);

    WindowSpec w = make_window(WindowKind::Chebyshev, cfg.subcarriers, m, 60.0);
    CfarConfig cfar;
    cfar.pfa = detect::pfa_for_threshold_db(kDetectionThresholdDb,
                                            detect::interior_training_cells(cfar));
    cfar.max_detections = 12;
    CztConfig czt;  // L = 100 per the measurement parameter set

    Simulated sim = simulate(cfg, p, targets, noise_w, seed, true);
    CMat y_all = rxproc::demodulate(sim.rx, cfg, 0, m + 1);
    CMat y_main(cfg.subcarriers, m);
    for (int c = 0; c < m; ++c)
        std::copy(y_all.col(c), y_all.col(c) + cfg.subcarriers, y_main.col(c));

    std::vector<rxproc::PeakQuery> truth;
    std::vector<int> doppler_bins;
    for (const auto& d : sim.derived) {
        int rb = static_cast<int>(std::lround(d.delay_samples));
        double q = d.doppler_hz * m * p.symbol_duration_s;
        int db = static_cast<int>(std::lround(q)) + m / 2;
        truth.push_back({rb, db});
        doppler_bins.push_back(db);
    }
    const int weak_a = 3, weak_b = 4;  // 50 dB attenuated entries

    RangeDopplerImage conv_img = rxproc::conventional_processing_fd(y_main, sim.frame, cfg, p, w);
    auto conv_dets = detect::cfar_detect(conv_img, cfar);
    MitigationResult jic = mitigate::jic_cc(y_all, sim.frame, cfg, p, w, cfar, czt, {});
    MitigationResult frsw = mitigate::fr_sw(sim.rx, sim.frame, cfg, p, w, cfar, czt, {});

    auto conv_metrics = rxproc::image_metrics(conv_img, truth, 16, 8, 2);
    auto jic_metrics = rxproc::image_metrics(jic.final_image, truth, 16, 8, 2);
    auto frsw_metrics = rxproc::image_metrics(frsw.final_image, truth, 16, 8, 2);

    double min_strong_sinr = 1e9;
    for (int i : {0, 1, 2, 5}) min_strong_sinr = std::min(min_strong_sinr, frsw_metrics.targets[i].sinr_db);
    res.checks.push_back(check("scenario_strong_targets_60db_above_floor", min_strong_sinr >= 60.0,
                               min_strong_sinr, "min strong-target SINR in the FR-SW image"));

    bool conv_misses = !in_detections(conv_dets, truth[weak_a].range_bin, doppler_bins[weak_a], 2) ||
                       !in_detections(conv_dets, truth[weak_b].range_bin, doppler_bins[weak_b], 2);
    res.checks.push_back(check("scenario_conventional_misses_weak", conv_misses,
                               conv_misses ? 1 : 0, "conventional CFAR misses at least one 50 dB target"));

    auto weak_ok = [&](const MitigationResult& r, const rxproc::ImageMetrics& met) {
        bool ok = true;
        for (int i : {weak_a, weak_b}) {
            bool det = in_detections(r.detections, truth[i].range_bin, doppler_bins[i], 2);
            ok = ok && det && met.targets[i].sinr_db >= kDetectionThresholdDb;
        }
        return ok;
    };
    res.checks.push_back(check("scenario_jic_reveals_both_weak", weak_ok(jic, jic_metrics),
                               std::min(jic_metrics.targets[weak_a].sinr_db,
                                        jic_metrics.targets[weak_b].sinr_db),
                               "both 50 dB targets detected with SINR >= 17 dB (JIC-CC)"));
    res.checks.push_back(check("scenario_frsw_reveals_both_weak", weak_ok(frsw, frsw_metrics),
                               std::min(frsw_metrics.targets[weak_a].sinr_db,
                                        frsw_metrics.targets[weak_b].sinr_db),
                               "both 50 dB targets detected with SINR >= 17 dB (FR-SW)"));

    double jic_floor = rxproc::image_floor_dbm(jic.final_image.img, truth, 16, 8);
    double frsw_floor = rxproc::image_floor_dbm(frsw.final_image.img, truth, 16, 8);
    res.checks.push_back(check("scenario_frsw_floor_not_above_jic", frsw_floor <= jic_floor,
                               frsw_floor - jic_floor, "FR-SW final floor minus JIC-CC final floor (dB)"));

    ordered_json metrics;
    metrics["conventional_floor_dbm"] = conv_metrics.floor_dbm;
    metrics["jic_floor_dbm"] = jic_floor;
    metrics["frsw_floor_dbm"] = frsw_floor;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ordered_json t;
        t["range_m"] = rows[i].range_m;
        t["conv_sinr_db"] = conv_metrics.targets[i].sinr_db;
        t["jic_sinr_db"] = jic_metrics.targets[i].sinr_db;
        t["frsw_sinr_db"] = frsw_metrics.targets[i].sinr_db;
        metrics["targets"].push_back(t);
    }
    io::write_file(out_dir + "/scenario_metrics.json", metrics.dump(2) + "\n");
    io::write_image_csv(out_dir + "/scenario_frsw_image.csv", frsw.final_image, 1);
    res.files = {"scenario_metrics.json", "scenario_frsw_image.csv"};
    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, seed, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Complexity scaling
// ---------------------------------------------------------------------------

ExperimentResult run_complexity(const std::string& out_dir) {
    ExperimentResult res;
    res.kind = "complexity";
    WindowSpec w;
    CfarConfig cfar;
    cfar.pfa = 1e-6;
    cfar.max_detections = 6;
    CztConfig czt;
    czt.zoom_factor = 50;

    std::vector<int> cps = {256, 128, 64};
    std::vector<double> s_vals, t_vals;
    std::ostringstream csv;
    csv << "cp_length,shift_count,frsw_total_ms\n";
    for (int ncp : cps) {
        OfdmConfig cfg = desk_config();
        cfg.cp_length = ncp;
        DerivedParams p = derive_params(cfg);
        w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
        TargetSpec t;
        t.range_m = 0.8 * p.unambiguous_range_m;
        t.rcs_m2 = db_to_lin(20.0);
        Simulated sim = simulate(cfg, p, {t}, linkbudget::thermal_noise_power(cfg), 7, true);
        std::vector<double> times;
        for (int rep = 0; rep < 5; ++rep) {
            MitigationResult r = mitigate::fr_sw(sim.rx, sim.frame, cfg, p, w, cfar, czt, {});
            times.push_back(r.timings_ms.at("total"));
        }
        double med = median_of(times);
        s_vals.push_back(p.shift_count);
        t_vals.push_back(med);
        csv << ncp << "," << p.shift_count << "," << fmt(med) << "\n";
    }
    io::write_file(out_dir + "/complexity_frsw.csv", csv.str());
    res.files.push_back("complexity_frsw.csv");

    // Affine fit t = a + b*S, coefficient of determination.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(s_vals.size());
    for (int i = 0; i < n; ++i) {
        sx += s_vals[i];
        sy += t_vals[i];
        sxx += s_vals[i] * s_vals[i];
        sxy += s_vals[i] * t_vals[i];
    }
    double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double a = (sy - b * sx) / n;
    double ss_res = 0, ss_tot = 0, mean_t = sy / n;
    for (int i = 0; i < n; ++i) {
        ss_res += std::pow(t_vals[i] - (a + b * s_vals[i]), 2);
        ss_tot += std::pow(t_vals[i] - mean_t, 2);
    }
    double r2 = 1.0 - ss_res / ss_tot;
    res.checks.push_back(check("scaling_frsw_linear_in_shift_count", r2 > 0.9 && b > 0, r2,
                               "R^2 of affine fit of FR-SW wall time vs S"));

    // JIC-CC cost vs two conventional passes plus per-target zoom cost.
    {
        OfdmConfig cfg = desk_config();
        DerivedParams p = derive_params(cfg);
        w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
        TargetSpec t;
        t.range_m = 0.8 * p.unambiguous_range_m;
        t.rcs_m2 = db_to_lin(20.0);
        Simulated sim = simulate(cfg, p, {t}, linkbudget::thermal_noise_power(cfg), 9, true);
        CMat y_all = rxproc::demodulate(sim.rx, cfg, 0, cfg.symbols + 1);
        CMat y_main(cfg.subcarriers, cfg.symbols);
        for (int c = 0; c < cfg.symbols; ++c)
            std::copy(y_all.col(c), y_all.col(c) + cfg.subcarriers, y_main.col(c));

        std::vector<double> t_conv, t_czt, t_jic;
        int h_d = 1;
        for (int rep = 0; rep < 5; ++rep) {
            auto t0 = Clock::now();
            RangeDopplerImage img = rxproc::conventional_processing_fd(y_main, sim.frame, cfg, p, w);
            t_conv.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
            auto dets = detect::cfar_detect(img, cfar);
            h_d = std::max<int>(1, static_cast<int>(dets.size()));
            CMat h = rxproc::equalize_and_window(y_main, sim.frame, w);
            t0 = Clock::now();
            estimate::estimate_target(h, dets.front(), czt, w, cfg, p, {});
            t_czt.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
            MitigationResult jic = mitigate::jic_cc(y_all, sim.frame, cfg, p, w, cfar, czt, {});
            t_jic.push_back(jic.timings_ms.at("total"));
        }
        double bound = 4.0 * (2.0 * median_of(t_conv) + h_d * median_of(t_czt));
        double jic_med = median_of(t_jic);
        res.checks.push_back(check("scaling_jic_within_4x_budget", jic_med <= bound, jic_med,
                                   "JIC-CC wall time vs 4x(2 conv + Hd zoom) = " + fmt(bound) + " ms"));
    }
    OfdmConfig manifest_cfg = desk_config();
    res.files.push_back("summary.json");
    write_summary(res, out_dir);
    io::write_manifest(out_dir, manifest_cfg, 0, res.files);
    return res;
}

// ---------------------------------------------------------------------------
// Scenario file runner
// ---------------------------------------------------------------------------

ExperimentResult run_scenario_file(const Scenario& s, const std::string& out_dir,
                                   std::uint64_t seed_override) {
    ExperimentResult res;
    res.kind = "scenario-file";
    OfdmConfig cfg = s.config;
    DerivedParams p = derive_params(cfg);
    const int m = cfg.symbols;
    std::uint64_t seed = seed_override ? seed_override : s.seed;

    double noise_w = 0;
    if (s.noise_enabled)
        noise_w = s.noise_power_dbm ? dbm_to_watt(*s.noise_power_dbm)
                                    : linkbudget::thermal_noise_power(cfg);

    WindowSpec w = make_window(s.window, cfg.subcarriers, m, s.window_sidelobe_db);
    Simulated sim = simulate(cfg, p, s.targets, noise_w, seed, s.extra_symbol);

    std::vector<rxproc::PeakQuery> truth;
    for (const auto& d : sim.derived) {
        int rb = static_cast<int>(std::lround(d.delay_samples));
        int db = static_cast<int>(std::lround(d.doppler_hz * m * p.symbol_duration_s)) + m / 2;
        truth.push_back({rb, db});
    }

    RangeDopplerImage image;
    std::vector<CoarsePeak> dets;
    std::vector<TargetEstimate> ests;
    std::map<std::string, double> timings;
    bool last_term_omitted = false;

    if (s.algorithm == "conventional") {
        auto t0 = Clock::now();
        image = rxproc::conventional_processing(sim.rx, sim.frame, cfg, p, w);
        dets = detect::cfar_detect(image, s.cfar);
        timings["total"] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    } else if (s.algorithm == "jic_cc") {
        CMat y = rxproc::demodulate(sim.rx, cfg, 0, s.extra_symbol ? m + 1 : m);
        MitigationResult r = mitigate::jic_cc(y, sim.frame, cfg, p, w, s.cfar, s.czt, {});
        image = std::move(r.final_image);
        dets = std::move(r.detections);
        ests = std::move(r.targets);
        timings = std::move(r.timings_ms);
        last_term_omitted = r.fdcc_last_term_omitted;
    } else if (s.algorithm == "fr_sw") {
        MitigationResult r = mitigate::fr_sw(sim.rx, sim.frame, cfg, p, w, s.cfar, s.czt, {});
        image = std::move(r.final_image);
        dets = std::move(r.detections);
        ests = std::move(r.targets);
        timings = std::move(r.timings_ms);
    } else {  // sic
        CMat y = rxproc::demodulate(sim.rx, cfg, 0, m);
        MitigateOptions opt;
        opt.sic_iterations = s.sic_iterations;
        MitigationResult r = mitigate::sic_baseline(y, sim.frame, cfg, p, s.cfar, opt);
        image = std::move(r.final_image);
        dets = std::move(r.detections);
        ests = std::move(r.targets);
        timings = std::move(r.timings_ms);
    }

    int stride = std::max(1, image.img.rows / 2048);
    io::write_image_csv(out_dir + "/image.csv", image, stride);
    io::write_file(out_dir + "/detections.json", io::detections_to_json(dets));
    io::write_file(out_dir + "/estimates.json", io::estimates_to_json(ests, cfg, p));

    ordered_json metrics;
    metrics["algorithm"] = s.algorithm;
    metrics["seed"] = seed;
    metrics["noise_power_dbm"] = noise_w > 0 ? watt_to_dbm(noise_w) : -400.0;
    metrics["floor_dbm"] = rxproc::image_floor_dbm(image.img, truth, 16, 8);
    metrics["fdcc_last_term_omitted"] = last_term_omitted;
    if (!truth.empty()) {
        auto met = rxproc::image_metrics(image, truth, 16, 8, 2);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            ordered_json t;
            t["range_m"] = s.targets[i].range_m;
            t["range_bin"] = truth[i].range_bin;
            t["peak_dbm"] = met.targets[i].peak_power_dbm;
            t["sinr_db"] = met.targets[i].sinr_db;
            t["detected"] = in_detections(dets, truth[i].range_bin, truth[i].doppler_bin, 2);
            metrics["targets"].push_back(t);
        }
    }
    io::write_file(out_dir + "/metrics.json", metrics.dump(2) + "\n");
    // Wall times live outside metrics.json, which is byte-stable per seed.
    ordered_json tj;
    for (const auto& [k, v] : timings) tj[k] = v;
    io::write_file(out_dir + "/timings.json", tj.dump(2) + "\n");

    res.checks.push_back(check("scenario_completed", true, 1, "end-to-end run finished"));
    res.files = {"image.csv", "detections.json", "estimates.json", "metrics.json",
                 "timings.json", "summary.json"};
    write_summary(res, out_dir);
    io::write_manifest(out_dir, cfg, seed, res.files);
    return res;
}

} // namespace experiments
} // namespace ofdmrad
