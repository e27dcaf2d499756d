#include "ofdmrad/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "ofdmrad/fft.hpp"
#include "ofdmrad/linkbudget.hpp"

namespace ofdmrad {

void CztConfig::validate() const {
    if (roi_bins < 3) throw ConfigError("czt.roi_bins", "must be >= 3");
    if (zoom_factor < 1) throw ConfigError("czt.zoom_factor", "must be >= 1");
}

namespace estimate {

CVec czt(const cd* x, int len, int k_out, double alpha, double omega) {
    const int conv_len = fft::next_pow2(len + k_out - 1);
    CVec a(conv_len, cd(0, 0)), b(conv_len, cd(0, 0));
    for (int n = 0; n < len; ++n)
        a[n] = x[n] * std::polar(1.0, alpha * n + 0.5 * omega * static_cast<double>(n) * n);
    // b[q] = e^{-j omega q^2 / 2} for q in (-len, K), laid out circularly.
    for (int q = 0; q < k_out; ++q)
        b[q] = std::polar(1.0, -0.5 * omega * static_cast<double>(q) * q);
    for (int q = 1; q < len; ++q)
        b[conv_len - q] = std::polar(1.0, -0.5 * omega * static_cast<double>(q) * q);

    CVec fa(conv_len), fb(conv_len);
    fft::dft(a.data(), fa.data(), conv_len);
    fft::dft(b.data(), fb.data(), conv_len);
    for (int i = 0; i < conv_len; ++i) fa[i] *= fb[i];
    fft::idft(fa.data(), fb.data(), conv_len);

    CVec out(k_out);
    const double inv = 1.0 / conv_len;
    for (int k = 0; k < k_out; ++k)
        out[k] = fb[k] * inv * std::polar(1.0, 0.5 * omega * static_cast<double>(k) * k);
    return out;
}

CVec czt(const CVec& x, int k_out, double alpha, double omega) {
    return czt(x.data(), static_cast<int>(x.size()), k_out, alpha, omega);
}

FineImage czt_zoom(const CMat& h, const CoarsePeak& peak, const CztConfig& czt_cfg) {
    czt_cfg.validate();
    const int n = h.rows, m = h.cols;
    const int k_out = czt_cfg.points();
    const int l = czt_cfg.zoom_factor;

    FineImage f;
    f.zoom_factor = l;
    f.symbol_cols = m;
    f.nu_start = peak.range_bin - czt_cfg.roi_bins / 2.0;
    if (f.nu_start < 0) {
        f.nu_start = 0;
        f.roi_clamped = true;
    }
    if (f.nu_start > n - czt_cfg.roi_bins) {
        f.nu_start = n - czt_cfg.roi_bins;
        f.roi_clamped = true;
    }
    f.q_start = (peak.doppler_bin - m / 2.0) - czt_cfg.roi_bins / 2.0;

    // Stage 1: zoom along subcarriers (positive-exponent direction).
    const double alpha_r = 2.0 * kPi * f.nu_start / n;
    const double omega_r = 2.0 * kPi / (static_cast<double>(l) * n);
    CMat zr(k_out, m);
    const double sn = 1.0 / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < m; ++c) {
        CVec col = czt(h.col(c), n, k_out, alpha_r, omega_r);
        for (int k = 0; k < k_out; ++k) zr(k, c) = col[k] * sn;
    }
    // Stage 2: zoom along symbols (DFT direction).
    const double alpha_d = -2.0 * kPi * f.q_start / m;
    const double omega_d = -2.0 * kPi / (static_cast<double>(l) * m);
    f.z = CMat(k_out, k_out);
    const double sm = 1.0 / std::sqrt(static_cast<double>(m));
    CVec row(m);
    for (int k = 0; k < k_out; ++k) {
        for (int c = 0; c < m; ++c) row[c] = zr(k, c);
        CVec o = czt(row.data(), m, k_out, alpha_d, omega_d);
        for (int p = 0; p < k_out; ++p) f.z(k, p) = o[p] * sm;
    }
    return f;
}

cd transform_point(const CMat& h, double nu_bins, double q_bins) {
    const int n = h.rows, m = h.cols;
    cd acc(0, 0);
    CVec er(n);
    for (int k = 0; k < n; ++k) er[k] = std::polar(1.0, 2.0 * kPi * k * nu_bins / n);
    for (int c = 0; c < m; ++c) {
        const cd* col = h.col(c);
        cd s(0, 0);
        for (int k = 0; k < n; ++k) s += col[k] * er[k];
        acc += s * std::polar(1.0, -2.0 * kPi * c * q_bins / m);
    }
    return acc / std::sqrt(static_cast<double>(n) * m);
}

namespace {

// Parabola vertex through three equally spaced |.|^2 samples.
double parabola_vertex(double sm, double s0, double sp) {
    double denom = sm + sp - 2.0 * s0;
    if (denom >= 0) return 0.0;  // not a maximum; stay on the grid
    return 0.5 * (sm - sp) / denom;
}

} // namespace

RefinedPeak refine_peak(const FineImage& zoom, const CztConfig& czt_cfg, bool quadratic,
                        const OfdmConfig& cfg, const DerivedParams& p) {
    (void)cfg;
    (void)czt_cfg;
    const CMat& z = zoom.z;
    const int k_out = z.rows;
    RefinedPeak r;
    double best = -1;
    for (int pp = 0; pp < k_out; ++pp)
        for (int kk = 0; kk < k_out; ++kk) {
            double pw = std::norm(z(kk, pp));
            if (pw > best) {
                best = pw;
                r.k_star = kk;
                r.p_star = pp;
            }
        }
    r.k_fine = r.k_star;
    r.p_fine = r.p_star;
    r.at_roi_border = (r.k_star == 0 || r.k_star == k_out - 1 || r.p_star == 0 || r.p_star == k_out - 1);
    if (quadratic && !r.at_roi_border) {
        double s0 = std::norm(z(r.k_star, r.p_star));
        r.k_fine += parabola_vertex(std::norm(z(r.k_star - 1, r.p_star)), s0,
                                    std::norm(z(r.k_star + 1, r.p_star)));
        r.p_fine += parabola_vertex(std::norm(z(r.k_star, r.p_star - 1)), s0,
                                    std::norm(z(r.k_star, r.p_star + 1)));
    }
    const double nu = zoom.nu_start + r.k_fine / zoom.zoom_factor;
    const double q = zoom.q_start + r.p_fine / zoom.zoom_factor;
    r.tau_s = nu * p.sample_period_s;
    r.doppler_hz = q / (zoom.symbol_cols * p.symbol_duration_s);
    return r;
}

Losses losses(double tau_s, double doppler_hz, const WindowSpec& w, const OfdmConfig& cfg,
              const DerivedParams& p, double eta_override) {
    Losses l;
    double e;
    if (eta_override >= 0) {
        e = eta_override;
    } else {
        // Sample-quantized captured fraction: the receive window keeps whole
        // samples, so the coherent gain steps at integer mask boundaries.
        // Agrees with the continuous form at integer delays and within 1/N
        // elsewhere.
        double nh = tau_s / p.sample_period_s;
        int i0 = std::clamp(static_cast<int>(std::ceil(nh - cfg.cp_length - 1e-9)), 0,
                            cfg.subcarriers);
        e = static_cast<double>(cfg.subcarriers - i0) / cfg.subcarriers;
    }
    l.l_isi = e * e;
    l.l_win = w.window_loss;
    double x = kPi * doppler_hz * e / p.subcarrier_spacing_hz;
    if (std::abs(x) < 1e-12) {
        l.l_dop = 1.0;
    } else {
        double ratio = std::sin(x) / (cfg.subcarriers * std::sin(x / cfg.subcarriers));
        l.l_dop = ratio * ratio;
    }
    return l;
}

double invert_peak_magnitude(double peak_abs, const Losses& l, const DerivedParams& p) {
    double denom = p.processing_gain * l.l_win * l.l_isi * l.l_dop;
    if (denom <= 0)
        throw ConfigError("losses", "target fully outside the receive window (eta = 0)");
    return peak_abs / std::sqrt(denom);
}

TargetEstimate estimate_target(const CMat& h, const CoarsePeak& peak, const CztConfig& czt_cfg,
                               const WindowSpec& w, const OfdmConfig& cfg,
                               const DerivedParams& p, const EstimateOptions& opts) {
    FineImage zoom = czt_zoom(h, peak, czt_cfg);
    RefinedPeak rp = refine_peak(zoom, czt_cfg, opts.quadratic, cfg, p);
    const int m = h.cols;
    double nu = zoom.nu_start + rp.k_fine / zoom.zoom_factor;
    double q = zoom.q_start + rp.p_fine / zoom.zoom_factor;
    bool snapped = false;
    if (opts.grid_snap_bins > 0) {
        if (std::abs(nu - std::round(nu)) < opts.grid_snap_bins) {
            nu = std::round(nu);
            snapped = true;
        }
        if (std::abs(q - std::round(q)) < opts.grid_snap_bins) {
            q = std::round(q);
            snapped = true;
        }
    }

    cd v = (opts.vertex_readout && opts.quadratic) || snapped
               ? transform_point(h, nu, q)
               : zoom.z(rp.k_star, rp.p_star);

    TargetEstimate est;
    est.tau_s = nu * p.sample_period_s;
    est.doppler_hz = q / (m * p.symbol_duration_s);
    est.coarse_range_bin = peak.range_bin;
    est.coarse_doppler_bin = peak.doppler_bin;
    est.fine_range_index = rp.k_fine;
    est.fine_doppler_index = rp.p_fine;
    est.roi_clamped = zoom.roi_clamped;
    est.at_roi_border = rp.at_roi_border;

    Losses l = losses(est.tau_s, est.doppler_hz, w, cfg, p,
                      opts.compensated_peak ? 1.0 : -1.0);
    est.l_isi = l.l_isi;
    est.l_dop = l.l_dop;
    est.l_win = l.l_win;
    est.alpha_mag = invert_peak_magnitude(std::abs(v), l, p);
    est.theta_raw_rad = std::arg(v);
    est.theta_global_rad =
        sw_phase_correction(est.theta_raw_rad, est.tau_s, est.doppler_hz, cfg, p);
    return est;
}

cd projection_alpha(const CMat& y, const SymbolFrame& x, double tau_s, double doppler_hz,
                    const OfdmConfig& cfg, const DerivedParams& p) {
    const int n = y.rows, m = y.cols;
    CVec b = channel::steering_delay(tau_s, cfg, p);
    CVec c = channel::steering_doppler(doppler_hz, m, p);
    cd acc(0, 0);
    for (int col = 0; col < m; ++col) {
        const cd* yc = y.col(col);
        const cd* xc = x.data.col(col);
        cd s(0, 0);
        for (int k = 0; k < n; ++k) s += std::conj(b[k] * xc[k]) * yc[k];
        acc += s * std::conj(c[col]);
    }
    return acc / (static_cast<double>(n) * m);
}

double sw_phase_correction(double theta_raw, double tau_s, double doppler_hz,
                           const OfdmConfig& cfg, const DerivedParams& p) {
    double nh = tau_s / p.sample_period_s;
    int i0 = std::max(0, static_cast<int>(std::ceil(nh - cfg.cp_length - 1e-9)));
    double rot = kPi * doppler_hz * p.sample_period_s * (i0 + cfg.subcarriers - 1);
    double theta = theta_raw - rot;
    while (theta > kPi) theta -= 2.0 * kPi;
    while (theta < -kPi) theta += 2.0 * kPi;
    return theta;
}

} // namespace estimate
} // namespace ofdmrad
