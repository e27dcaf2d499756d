#include "ofdmrad/detect.hpp"

#include <algorithm>
#include <cmath>

namespace ofdmrad {

void CfarConfig::validate() const {
    if (train_range <= 0 || train_doppler <= 0)
        throw ConfigError("cfar.train", "training cells must be > 0 in each dimension");
    if (guard_range < 0 || guard_doppler < 0)
        throw ConfigError("cfar.guard", "guard cells must be >= 0");
    if (!(pfa > 0.0 && pfa < 1.0)) throw ConfigError("cfar.pfa", "must lie in (0, 1)");
    if (max_detections < 1) throw ConfigError("cfar.max_detections", "must be >= 1");
}

namespace detect {

namespace {

// Summed-area table with one row/col of zero padding.
struct Integral {
    int rows, cols;
    std::vector<double> s;
    Integral(const CMat& img) : rows(img.rows), cols(img.cols), s((rows + 1) * (cols + 1), 0.0) {
        for (int c = 0; c < cols; ++c) {
            double run = 0;
            for (int r = 0; r < rows; ++r) {
                run += std::norm(img(r, c));
                s[(r + 1) * (cols + 1) + (c + 1)] = s[(r + 1) * (cols + 1) + c] + run;
            }
        }
    }
    // Inclusive rectangle sum, clamped to bounds.
    double sum(int r0, int r1, int c0, int c1) const {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, rows - 1);
        c1 = std::min(c1, cols - 1);
        if (r0 > r1 || c0 > c1) return 0.0;
        const int w = cols + 1;
        return s[(r1 + 1) * w + (c1 + 1)] - s[r0 * w + (c1 + 1)] - s[(r1 + 1) * w + c0] +
               s[r0 * w + c0];
    }
    static int count(int r0, int r1, int c0, int c1, int rows, int cols) {
        r0 = std::max(r0, 0);
        c0 = std::max(c0, 0);
        r1 = std::min(r1, rows - 1);
        c1 = std::min(c1, cols - 1);
        if (r0 > r1 || c0 > c1) return 0;
        return (r1 - r0 + 1) * (c1 - c0 + 1);
    }
};

} // namespace

int interior_training_cells(const CfarConfig& cfg) {
    int outer = (2 * (cfg.guard_range + cfg.train_range) + 1) *
                (2 * (cfg.guard_doppler + cfg.train_doppler) + 1);
    int inner = (2 * cfg.guard_range + 1) * (2 * cfg.guard_doppler + 1);
    return outer - inner;
}

double pfa_for_threshold_db(double threshold_db, int n_train) {
    double alpha = db_to_lin(threshold_db);
    return std::exp(-n_train * std::log1p(alpha / n_train));
}

std::vector<CoarsePeak> cfar_detect(const RangeDopplerImage& image, const CfarConfig& cfg) {
    cfg.validate();
    const CMat& img = image.img;
    const int n = img.rows, m = img.cols;
    const int er = cfg.guard_range + cfg.train_range;
    const int ed = cfg.guard_doppler + cfg.train_doppler;
    if (n < 2 * er + 1 || m < 2 * ed + 1)
        throw ConfigError("cfar", "image smaller than the training+guard footprint");

    Integral integ(img);
    std::vector<char> hit(static_cast<std::size_t>(n) * m, 0);

    for (int c = 0; c < m; ++c) {
        for (int r = 0; r < n; ++r) {
            double outer = integ.sum(r - er, r + er, c - ed, c + ed);
            double inner = integ.sum(r - cfg.guard_range, r + cfg.guard_range,
                                     c - cfg.guard_doppler, c + cfg.guard_doppler);
            int n_outer = Integral::count(r - er, r + er, c - ed, c + ed, n, m);
            int n_inner = Integral::count(r - cfg.guard_range, r + cfg.guard_range,
                                          c - cfg.guard_doppler, c + cfg.guard_doppler, n, m);
            int n_train = n_outer - n_inner;
            if (n_train <= 0) continue;
            double z = (outer - inner) / n_train;
            // Exact CA-CFAR scaling for exponential cells and n_train references.
            double alpha = n_train * (std::pow(cfg.pfa, -1.0 / n_train) - 1.0);
            if (std::norm(img(r, c)) > alpha * z) hit[static_cast<std::size_t>(c) * n + r] = 1;
        }
    }

    // Connected components (8-neighborhood); one peak per component.
    std::vector<CoarsePeak> peaks;
    std::vector<int> stack;
    for (int c0 = 0; c0 < m; ++c0) {
        for (int r0 = 0; r0 < n; ++r0) {
            std::size_t idx0 = static_cast<std::size_t>(c0) * n + r0;
            if (!hit[idx0]) continue;
            hit[idx0] = 0;
            stack.assign(1, static_cast<int>(idx0));
            double best = -1;
            int best_r = r0, best_c = c0;
            while (!stack.empty()) {
                int idx = stack.back();
                stack.pop_back();
                int r = idx % n, c = idx / n;
                double pw = std::norm(img(r, c));
                if (pw > best) {
                    best = pw;
                    best_r = r;
                    best_c = c;
                }
                for (int dc = -1; dc <= 1; ++dc)
                    for (int dr = -1; dr <= 1; ++dr) {
                        int rr = r + dr, cc = c + dc;
                        if (rr < 0 || rr >= n || cc < 0 || cc >= m) continue;
                        std::size_t ii = static_cast<std::size_t>(cc) * n + rr;
                        if (hit[ii]) {
                            hit[ii] = 0;
                            stack.push_back(static_cast<int>(ii));
                        }
                    }
            }
            peaks.push_back({best_r, best_c, watt_to_dbm(best)});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [](const CoarsePeak& a, const CoarsePeak& b) {
        if (a.power_dbm != b.power_dbm) return a.power_dbm > b.power_dbm;
        if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
        return a.doppler_bin < b.doppler_bin;
    });
    if (static_cast<int>(peaks.size()) > cfg.max_detections) peaks.resize(cfg.max_detections);
    return peaks;
}

} // namespace detect
} // namespace ofdmrad
