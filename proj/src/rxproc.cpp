#include "ofdmrad/rxproc.hpp"

#include <algorithm>
#include <cmath>

#include "ofdmrad/fft.hpp"

namespace ofdmrad {

namespace {

double cheby_poly(int n, double x) {
    if (std::abs(x) <= 1.0) return std::cos(n * std::acos(x));
    if (x > 1.0) return std::cosh(n * std::acosh(x));
    double v = std::cosh(n * std::acosh(-x));
    return (n % 2 == 0) ? v : -v;
}

// Dolph-Chebyshev window, peak-normalized. Built from its exact frequency
// response T_{N-1}(x0 cos(pi k/N)) so the equiripple level holds for both
// parities; even lengths need the half-sample phase shift.
DVec chebyshev_taps(int n, double atten_db) {
    DVec w(n, 1.0);
    if (n == 1) return w;
    const int order = n - 1;
    const double x0 = std::cosh(std::acosh(std::pow(10.0, atten_db / 20.0)) / order);
    CVec spec(n), taps(n);
    for (int k = 0; k < n; ++k) {
        double v = cheby_poly(order, x0 * std::cos(kPi * k / n));
        spec[k] = (n % 2 == 0) ? v * std::polar(1.0, kPi * k / n) : cd(v, 0);
    }
    fft::dft(spec.data(), taps.data(), n);
    if (n % 2 == 1) {
        const int half = (n + 1) / 2;
        for (int i = 0; i < half; ++i) w[half - 1 + i] = taps[i].real();
        for (int i = 1; i < half; ++i) w[half - 1 - i] = taps[i].real();
    } else {
        const int half = n / 2 + 1;
        for (int j = 0; j < n; ++j) {
            int idx = (j < half - 1) ? (half - 1 - j) : (j - half + 2);
            w[j] = taps[idx].real();
        }
    }
    double mx = *std::max_element(w.begin(), w.end());
    for (auto& v : w) v /= mx;
    return w;
}

DVec hamming_taps(int n) {
    DVec w(n, 1.0);
    if (n == 1) return w;
    for (int i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * i / (n - 1));
    return w;
}

double mean(const DVec& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
}

} // namespace

WindowSpec make_window(WindowKind kind, int n, int m, double sidelobe_db) {
    WindowSpec w;
    w.kind = kind;
    w.sidelobe_db = sidelobe_db;
    switch (kind) {
        case WindowKind::Rectangular:
            w.range_taps.assign(n, 1.0);
            w.doppler_taps.assign(m, 1.0);
            break;
        case WindowKind::Hamming:
            w.range_taps = hamming_taps(n);
            w.doppler_taps = hamming_taps(m);
            break;
        case WindowKind::Chebyshev:
            w.range_taps = chebyshev_taps(n, sidelobe_db);
            w.doppler_taps = chebyshev_taps(m, sidelobe_db);
            break;
    }
    double mr = mean(w.range_taps), md = mean(w.doppler_taps);
    w.window_loss = mr * mr * md * md;
    return w;
}

WindowKind window_kind_from_string(const std::string& s) {
    if (s == "rectangular" || s == "rect" || s == "none") return WindowKind::Rectangular;
    if (s == "hamming") return WindowKind::Hamming;
    if (s == "chebyshev" || s == "cheb") return WindowKind::Chebyshev;
    throw ConfigError("window.kind", "unknown window kind '" + s + "'");
}

namespace rxproc {

CMat demodulate(const TimeSignal& rx, const OfdmConfig& cfg, int window_offset, int num_symbols) {
    const int n = cfg.subcarriers;
    const int ncp = cfg.cp_length;
    const int sym_len = n + ncp;
    const int m_cols = num_symbols > 0 ? num_symbols : cfg.symbols;
    const std::size_t need =
        static_cast<std::size_t>(m_cols - 1) * sym_len + ncp + window_offset + n;
    if (rx.samples.size() < need)
        throw ConfigError("rx", "time signal too short for requested demodulation window");

    CMat y(n, m_cols);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < m_cols; ++m) {
        const cd* in = rx.samples.data() + static_cast<std::size_t>(m) * sym_len + ncp + window_offset;
        fft::dft(in, y.col(m), n);
        cd* out = y.col(m);
        for (int k = 0; k < n; ++k) out[k] *= scale;
    }
    return y;
}

CMat equalize_and_window(const CMat& y, const SymbolFrame& x, const WindowSpec& w) {
    const int n = y.rows, m = y.cols;
    if (x.data.rows != n || x.data.cols < m)
        throw ConfigError("frame", "reference frame smaller than received frame");
    CMat h(n, m);
    for (int c = 0; c < m; ++c) {
        const cd* yc = y.col(c);
        const cd* xc = x.data.col(c);
        cd* hc = h.col(c);
        const double wd = w.doppler_taps[c % w.doppler_taps.size()];
        for (int k = 0; k < n; ++k) {
            if (xc[k] == cd(0, 0))
                throw ConfigError("frame", "zero data symbol breaks zero-forcing equalization");
            hc[k] = yc[k] / xc[k] * (w.range_taps[k] * wd);
        }
    }
    return h;
}

RangeDopplerImage range_doppler_image(const CMat& h, const OfdmConfig& cfg, const DerivedParams& p,
                                      const WindowSpec& w) {
    const int n = h.rows, m = h.cols;
    RangeDopplerImage im;
    im.window = w.kind;
    im.config_hash = config_hash(cfg);
    im.img = CMat(n, m);

    // Unitary IDFT along subcarriers (contiguous columns).
    const double sn = 1.0 / std::sqrt(static_cast<double>(n));
    for (int c = 0; c < m; ++c) {
        fft::idft(h.col(c), im.img.col(c), n);
        cd* col = im.img.col(c);
        for (int k = 0; k < n; ++k) col[k] *= sn;
    }
    // Unitary DFT along symbols with the centering permutation folded in:
    // output column j takes raw Doppler bin (j + M/2) mod M.
    const double sm = 1.0 / std::sqrt(static_cast<double>(m));
    CVec row(m), spec(m);
    CMat out(n, m);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < m; ++c) row[c] = im.img(r, c);
        fft::dft(row.data(), spec.data(), m);
        for (int j = 0; j < m; ++j) out(r, j) = spec[(j + m / 2) % m] * sm;
    }
    im.img = std::move(out);

    im.range_axis_m.resize(n);
    for (int r = 0; r < n; ++r) im.range_axis_m[r] = r * p.range_bin_m;
    im.velocity_axis_mps.resize(m);
    for (int j = 0; j < m; ++j)
        im.velocity_axis_mps[j] =
            (j - m / 2) / (m * p.symbol_duration_s) * p.wavelength_m / 2.0;
    return im;
}

RangeDopplerImage conventional_processing(const TimeSignal& rx, const SymbolFrame& x,
                                          const OfdmConfig& cfg, const DerivedParams& p,
                                          const WindowSpec& w, int window_offset) {
    CMat y = demodulate(rx, cfg, window_offset, cfg.symbols);
    CMat h = equalize_and_window(y, x, w);
    return range_doppler_image(h, cfg, p, w);
}

RangeDopplerImage conventional_processing_fd(const CMat& y, const SymbolFrame& x,
                                             const OfdmConfig& cfg, const DerivedParams& p,
                                             const WindowSpec& w) {
    CMat h = equalize_and_window(y, x, w);
    return range_doppler_image(h, cfg, p, w);
}

double image_floor_dbm(const CMat& img, const std::vector<PeakQuery>& exclude,
                       int excl_range, int excl_doppler, int row_lo, int row_hi) {
    const int n = img.rows, m = img.cols;
    if (row_hi < 0) row_hi = n;
    row_lo = std::max(0, row_lo);
    row_hi = std::min(n, row_hi);
    std::vector<double> pw;
    pw.reserve(static_cast<std::size_t>(row_hi - row_lo) * m);
    for (int c = 0; c < m; ++c) {
        for (int r = row_lo; r < row_hi; ++r) {
            bool excluded = false;
            for (const auto& q : exclude) {
                if (std::abs(r - q.range_bin) <= excl_range &&
                    std::abs(c - q.doppler_bin) <= excl_doppler) {
                    excluded = true;
                    break;
                }
            }
            if (!excluded) pw.push_back(std::norm(img(r, c)));
        }
    }
    if (pw.empty()) throw ConfigError("image_metrics", "exclusion zones cover the whole image");
    auto mid = pw.begin() + pw.size() / 2;
    std::nth_element(pw.begin(), mid, pw.end());
    // Median of exponential cell power underestimates the mean by ln 2.
    return watt_to_dbm(*mid / std::log(2.0));
}

ImageMetrics image_metrics(const RangeDopplerImage& image, const std::vector<PeakQuery>& truth,
                           int exclusion_range_bins, int exclusion_doppler_bins,
                           int search_radius, int local_rows) {
    const CMat& img = image.img;
    const int n = img.rows, m = img.cols;
    for (const auto& q : truth)
        if (q.range_bin < 0 || q.range_bin >= n || q.doppler_bin < 0 || q.doppler_bin >= m)
            throw ConfigError("image_metrics", "query outside image bounds");

    ImageMetrics out;
    out.floor_dbm = image_floor_dbm(img, truth, exclusion_range_bins, exclusion_doppler_bins);

    for (const auto& q : truth) {
        TargetMetric t;
        double best = -1;
        for (int dr = -search_radius; dr <= search_radius; ++dr)
            for (int dc = -search_radius; dc <= search_radius; ++dc) {
                int r = q.range_bin + dr, c = q.doppler_bin + dc;
                if (r < 0 || r >= n || c < 0 || c >= m) continue;
                double pw = std::norm(img(r, c));
                if (pw > best) {
                    best = pw;
                    t.range_bin = r;
                    t.doppler_bin = c;
                }
            }
        t.peak_power_dbm = watt_to_dbm(best);
        double floor = out.floor_dbm;
        if (local_rows > 0) {
            floor = image_floor_dbm(img, truth, exclusion_range_bins, exclusion_doppler_bins,
                                    q.range_bin - local_rows, q.range_bin + local_rows + 1);
        }
        t.sinr_db = t.peak_power_dbm - floor;
        out.targets.push_back(t);
    }
    return out;
}

} // namespace rxproc
} // namespace ofdmrad
