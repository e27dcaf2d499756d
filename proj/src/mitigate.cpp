#include "ofdmrad/mitigate.hpp"

#include <chrono>
#include <cmath>

namespace ofdmrad {

SwShiftPlan make_shift_plan(int subcarriers, int cp_length) {
    if (cp_length <= 0) throw ConfigError("cp_length", "sliding window needs cp_length > 0");
    SwShiftPlan plan;
    plan.shift_count = (subcarriers + cp_length - 1) / cp_length;
    for (int s = 0; s < plan.shift_count; ++s) {
        plan.segment_start.push_back(s * cp_length);
        plan.segment_len.push_back(std::min(cp_length, subcarriers - s * cp_length));
    }
    return plan;
}

namespace mitigate {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void subtract_inplace(CMat& a, const CMat& b) {
    for (std::size_t i = 0; i < a.a.size(); ++i) a.a[i] -= b.a[i];
}

void add_image_inplace(CMat& a, const CMat& b) {
    for (std::size_t i = 0; i < a.a.size(); ++i) a.a[i] += b.a[i];
}

// Restored "shape" of a cancelled target: the image of its interference-free
// steering response (rank-1, data-independent). Re-adding the full
// reconstruction would reinstate the very ISI/ICI floor the algorithms remove.
CMat steering_shape_image(const TargetEstimate& est, const OfdmConfig& cfg,
                          const DerivedParams& p, const WindowSpec& w) {
    const int n = cfg.subcarriers, m = cfg.symbols;
    CVec b = channel::steering_delay(est.tau_s, cfg, p);
    CVec c = channel::steering_doppler(est.doppler_hz, m, p);
    const cd amp = est.alpha_tilde();
    CMat h(n, m);
    for (int col = 0; col < m; ++col) {
        cd ac = amp * c[col] * w.doppler_taps[col];
        cd* hc = h.col(col);
        for (int k = 0; k < n; ++k) hc[k] = ac * b[k] * w.range_taps[k];
    }
    return rxproc::range_doppler_image(h, cfg, p, w).img;
}

std::vector<rxproc::PeakQuery> detection_queries(const std::vector<CoarsePeak>& dets) {
    std::vector<rxproc::PeakQuery> q;
    q.reserve(dets.size());
    for (const auto& d : dets) q.push_back({d.range_bin, d.doppler_bin});
    return q;
}

SymbolFrame x_first_cols(const SymbolFrame& x, int m) {
    if (x.data.cols == m) return x;
    SymbolFrame out;
    out.seed = x.seed;
    out.modulation = x.modulation;
    out.data = CMat(x.data.rows, m);
    for (int c = 0; c < m; ++c)
        std::copy(x.data.col(c), x.data.col(c) + x.data.rows, out.data.col(c));
    return out;
}

} // namespace

std::vector<CoarsePeak> dedup_detections(std::vector<CoarsePeak> dets) {
    std::sort(dets.begin(), dets.end(), [](const CoarsePeak& a, const CoarsePeak& b) {
        if (a.power_dbm != b.power_dbm) return a.power_dbm > b.power_dbm;
        if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
        return a.doppler_bin < b.doppler_bin;
    });
    std::vector<CoarsePeak> out;
    for (const auto& d : dets) {
        bool merged = false;
        for (const auto& kept : out) {
            if (std::abs(kept.range_bin - d.range_bin) <= 1 &&
                std::abs(kept.doppler_bin - d.doppler_bin) <= 1) {
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(d);
    }
    return out;
}

TimeSignal reconstruct_td(const TargetEstimate& est, const SymbolFrame& x, const OfdmConfig& cfg,
                          const DerivedParams& p) {
    TimeSignal shape;
    shape.sample_period_s = p.sample_period_s;
    shape.tail_samples = cfg.subcarriers + cfg.cp_length;
    shape.samples.assign(
        static_cast<std::size_t>(x.data.cols) * (cfg.subcarriers + cfg.cp_length) + shape.tail_samples,
        cd(0, 0));
    TargetDerived tgt = channel::target_from_params(est.alpha_tilde(), est.tau_s, est.doppler_hz, p);
    return channel::apply_channel_time(shape, x, {tgt}, 0.0, 0, cfg);
}

CMat reconstruct_fd(const TargetEstimate& est, const SymbolFrame& x, const OfdmConfig& cfg,
                    const DerivedParams& p) {
    TimeSignal td = reconstruct_td(est, x, cfg, p);
    return rxproc::demodulate(td, cfg, 0, x.data.cols);
}

CMat fdcc(const CMat& y, const OfdmConfig& cfg, bool* last_term_omitted) {
    const int n = cfg.subcarriers;
    const int m = cfg.symbols;
    if (y.rows != n || y.cols < m)
        throw ConfigError("fdcc", "frame must have at least M symbol columns");
    const bool have_extra = y.cols > m;
    if (last_term_omitted) *last_term_omitted = !have_extra;

    CVec c(n);
    for (int k = 0; k < n; ++k)
        c[k] = std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * cfg.cp_length / n);

    CMat out(n, m);
    for (int col = 0; col < m; ++col) {
        const cd* cur = y.col(col);
        cd* o = out.col(col);
        if (col + 1 < y.cols) {
            const cd* nxt = y.col(col + 1);
            for (int k = 0; k < n; ++k) o[k] = cur[k] + c[k] * nxt[k];
        } else {
            for (int k = 0; k < n; ++k) o[k] = cur[k];
        }
    }
    return out;
}

MitigationResult jic_cc(const CMat& y, const SymbolFrame& x, const OfdmConfig& cfg,
                        const DerivedParams& p, const WindowSpec& w, const CfarConfig& cfar_cfg,
                        const CztConfig& czt_cfg, const MitigateOptions& opts) {
    MitigationResult res;
    auto t_all = Clock::now();

    // Step 1: strong-target detection on the plain frame (first M columns).
    auto t0 = Clock::now();
    CMat y_main(cfg.subcarriers, cfg.symbols);
    for (int c = 0; c < cfg.symbols; ++c)
        std::copy(y.col(c), y.col(c) + cfg.subcarriers, y_main.col(c));
    RangeDopplerImage init = rxproc::conventional_processing_fd(y_main, x, cfg, p, w);
    std::vector<CoarsePeak> p_init = detect::cfar_detect(init, cfar_cfg);
    res.timings_ms["initial_processing"] = ms_since(t0);

    // Step 2: precision estimation and joint cancellation.
    t0 = Clock::now();
    estimate::EstimateOptions eopt;
    eopt.quadratic = opts.quadratic;
    eopt.vertex_readout = opts.vertex_readout;
    CMat h_init = rxproc::equalize_and_window(y_main, x, w);
    std::vector<TargetEstimate> strong;
    CMat y_clean = y;
    for (const auto& pk : p_init) {
        TargetEstimate est = estimate::estimate_target(h_init, pk, czt_cfg, w, cfg, p, eopt);
        CMat rec = reconstruct_fd(est, x, cfg, p);
        subtract_inplace(y_clean, rec);
        strong.push_back(est);
    }
    res.timings_ms["estimation_cancellation"] = ms_since(t0);

    // Step 3: next-symbol compensation reveals targets hit by window mismatch.
    t0 = Clock::now();
    CMat y_fdcc = fdcc(y_clean, cfg, &res.fdcc_last_term_omitted);
    RangeDopplerImage clean_img = rxproc::conventional_processing_fd(y_fdcc, x, cfg, p, w);
    std::vector<CoarsePeak> p_weak = detect::cfar_detect(clean_img, cfar_cfg);
    res.timings_ms["fdcc_detection"] = ms_since(t0);

    // Recovery pass: estimate the newly found targets on the compensated
    // image (their peaks are mismatch-free there), then cancel everything and
    // compensate once more so the final floor carries no fold-in interference.
    t0 = Clock::now();
    std::vector<TargetEstimate> weak;
    if (!p_weak.empty()) {
        CMat h_fdcc = rxproc::equalize_and_window(y_fdcc, x, w);
        estimate::EstimateOptions eopt2 = eopt;
        eopt2.compensated_peak = true;
        for (const auto& pk : p_weak) {
            bool known = false;
            for (const auto& s : strong)
                if (std::abs(s.coarse_range_bin - pk.range_bin) <= 1 &&
                    std::abs(s.coarse_doppler_bin - pk.doppler_bin) <= 1)
                    known = true;
            if (known) continue;
            weak.push_back(estimate::estimate_target(h_fdcc, pk, czt_cfg, w, cfg, p, eopt2));
        }
    }
    CMat y_clean2 = y;
    for (const auto& est : strong) subtract_inplace(y_clean2, reconstruct_fd(est, x, cfg, p));
    for (const auto& est : weak) subtract_inplace(y_clean2, reconstruct_fd(est, x, cfg, p));
    CMat y_fdcc2 = fdcc(y_clean2, cfg, nullptr);
    RangeDopplerImage final_img = rxproc::conventional_processing_fd(y_fdcc2, x, cfg, p, w);
    res.timings_ms["recovery_pass"] = ms_since(t0);

    // Step 4: restore every cancelled target's shape.
    t0 = Clock::now();
    for (const auto& est : strong) add_image_inplace(final_img.img, steering_shape_image(est, cfg, p, w));
    for (const auto& est : weak) add_image_inplace(final_img.img, steering_shape_image(est, cfg, p, w));
    res.timings_ms["restore"] = ms_since(t0);

    std::vector<CoarsePeak> dets = p_init;
    dets.insert(dets.end(), p_weak.begin(), p_weak.end());
    res.detections = dedup_detections(std::move(dets));
    res.targets = std::move(strong);
    res.targets.insert(res.targets.end(), weak.begin(), weak.end());
    res.final_image = std::move(final_img);
    res.floor_dbm = rxproc::image_floor_dbm(
        res.final_image.img, detection_queries(res.detections), 16, 8);
    if (opts.keep_stage_images) {
        res.initial_image = std::move(init);
        res.cleaned_image = std::move(clean_img);
    }
    res.timings_ms["total"] = ms_since(t_all);
    return res;
}

MitigationResult fr_sw(const TimeSignal& y, const SymbolFrame& x, const OfdmConfig& cfg,
                       const DerivedParams& p, const WindowSpec& w, const CfarConfig& cfar_cfg,
                       const CztConfig& czt_cfg, const MitigateOptions& opts) {
    const int n = cfg.subcarriers;
    const int m = cfg.symbols;
    const SwShiftPlan plan = make_shift_plan(n, cfg.cp_length);
    const std::size_t need = static_cast<std::size_t>(m - 1) * (n + cfg.cp_length) + cfg.cp_length +
                             (plan.shift_count - 1) * cfg.cp_length + n;
    if (y.samples.size() < need)
        throw ConfigError("fr_sw", "time signal too short for the sliding-window shifts");

    MitigationResult res;
    auto t_all = Clock::now();

    // Step 1: initial detection and time-domain cleaning.
    auto t0 = Clock::now();
    RangeDopplerImage init = rxproc::conventional_processing(y, x, cfg, p, w);
    std::vector<CoarsePeak> p_init = detect::cfar_detect(init, cfar_cfg);
    res.timings_ms["initial_processing"] = ms_since(t0);

    t0 = Clock::now();
    estimate::EstimateOptions eopt;
    eopt.quadratic = opts.quadratic;
    eopt.vertex_readout = opts.vertex_readout;
    CMat y_demod = rxproc::demodulate(y, cfg, 0, m);
    CMat h_init = rxproc::equalize_and_window(y_demod, x, w);
    TimeSignal y_clean = y;
    std::vector<TargetEstimate> ests;
    for (const auto& pk : p_init) {
        TargetEstimate est = estimate::estimate_target(h_init, pk, czt_cfg, w, cfg, p, eopt);
        TimeSignal rec = reconstruct_td(est, x, cfg, p);
        const std::size_t lim = std::min(rec.samples.size(), y_clean.samples.size());
        for (std::size_t i = 0; i < lim; ++i) y_clean.samples[i] -= rec.samples[i];
        ests.push_back(est);
    }
    res.timings_ms["estimation_cancellation"] = ms_since(t0);

    // Step 2: fractional stitching loop.
    t0 = Clock::now();
    RangeDopplerImage final_img;
    std::vector<CoarsePeak> dets = p_init;
    for (int s = 0; s < plan.shift_count; ++s) {
        RangeDopplerImage aux =
            rxproc::conventional_processing(y_clean, x, cfg, p, w, s * cfg.cp_length);
        if (s == 0) {
            final_img = aux;
            final_img.img.fill(cd(0, 0));
        }
        const int seg = plan.segment_len[s];
        const int start = plan.segment_start[s];
        for (int c = 0; c < m; ++c) {
            const cd* src = aux.img.col(c);
            cd* dst = final_img.img.col(c);
            for (int r = 0; r < seg; ++r) dst[start + r] = src[r];
        }
        for (const auto& pk : detect::cfar_detect(aux, cfar_cfg)) {
            if (pk.range_bin < seg)
                dets.push_back({pk.range_bin + start, pk.doppler_bin, pk.power_dbm});
        }
    }
    res.timings_ms["stitching"] = ms_since(t0);

    // Step 3: restore the removed targets' shapes.
    t0 = Clock::now();
    for (const auto& est : ests) add_image_inplace(final_img.img, steering_shape_image(est, cfg, p, w));
    res.timings_ms["restore"] = ms_since(t0);

    res.detections = dedup_detections(std::move(dets));
    res.targets = std::move(ests);
    res.final_image = std::move(final_img);
    res.floor_dbm = rxproc::image_floor_dbm(
        res.final_image.img, detection_queries(res.detections), 16, 8);
    if (opts.keep_stage_images) res.initial_image = std::move(init);
    res.timings_ms["total"] = ms_since(t_all);
    return res;
}

MitigationResult sic_baseline(const CMat& y, const SymbolFrame& x, const OfdmConfig& cfg,
                              const DerivedParams& p, const CfarConfig& cfar_cfg,
                              const MitigateOptions& opts) {
    if (opts.sic_iterations < 1) throw ConfigError("sic_iterations", "must be >= 1");
    const int m = cfg.symbols;
    // Benchmark conditions: no windowing, grid-level estimates.
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, m);
    const SymbolFrame xm = x_first_cols(x, m);

    MitigationResult res;
    auto t_all = Clock::now();

    CMat residual(cfg.subcarriers, m);
    for (int c = 0; c < m; ++c)
        std::copy(y.col(c), y.col(c) + cfg.subcarriers, residual.col(c));

    std::vector<TargetEstimate> acc;  // accumulated per merged detection
    std::vector<CoarsePeak> dets;
    for (int it = 0; it < opts.sic_iterations; ++it) {
        RangeDopplerImage img = rxproc::conventional_processing_fd(residual, x, cfg, p, w);
        if (it == 0 && opts.keep_stage_images) res.initial_image = img;
        std::vector<CoarsePeak> found = detect::cfar_detect(img, cfar_cfg);
        if (found.empty()) break;
        for (const auto& pk : found) {
            double tau = pk.range_bin * p.sample_period_s;
            double fd = (pk.doppler_bin - m / 2) / (m * p.symbol_duration_s);
            cd alpha = estimate::projection_alpha(residual, x, tau, fd, cfg, p);
            TargetEstimate est;
            est.tau_s = tau;
            est.doppler_hz = fd;
            est.alpha_mag = std::abs(alpha);
            est.theta_raw_rad = est.theta_global_rad = std::arg(alpha);
            est.coarse_range_bin = pk.range_bin;
            est.coarse_doppler_bin = pk.doppler_bin;
            TargetDerived tgt = channel::target_from_params(alpha, tau, fd, p);
            CMat rec = channel::model_received_frame_fd(xm, {tgt}, cfg, p);
            subtract_inplace(residual, rec);

            bool merged = false;
            for (auto& a : acc) {
                if (std::abs(a.coarse_range_bin - pk.range_bin) <= 1 &&
                    std::abs(a.coarse_doppler_bin - pk.doppler_bin) <= 1) {
                    cd sum = a.alpha_tilde() + alpha;
                    a.alpha_mag = std::abs(sum);
                    a.theta_raw_rad = a.theta_global_rad = std::arg(sum);
                    merged = true;
                    break;
                }
            }
            if (!merged) acc.push_back(est);
            dets.push_back(pk);
        }
    }

    RangeDopplerImage final_img = rxproc::conventional_processing_fd(residual, x, cfg, p, w);
    for (const auto& est : acc)
        add_image_inplace(final_img.img, steering_shape_image(est, cfg, p, w));

    res.detections = dedup_detections(std::move(dets));
    res.targets = std::move(acc);
    res.final_image = std::move(final_img);
    res.floor_dbm = rxproc::image_floor_dbm(
        res.final_image.img, detection_queries(res.detections), 16, 8);
    res.timings_ms["total"] = ms_since(t_all);
    return res;
}

} // namespace mitigate
} // namespace ofdmrad
