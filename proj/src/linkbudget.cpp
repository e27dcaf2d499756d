#include "ofdmrad/linkbudget.hpp"

#include <algorithm>
#include <cmath>

namespace ofdmrad {

void TargetSpec::validate(const DerivedParams& p) const {
    if (range_m <= 0 || range_m > p.unambiguous_range_m)
        throw ConfigError("range_m", "must lie in (0, unambiguous range]");
    if (rcs_m2.has_value() == attenuation.has_value())
        throw ConfigError("rcs_m2/attenuation", "exactly one of rcs and attenuation must be set");
    if (rcs_m2 && *rcs_m2 <= 0) throw ConfigError("rcs_m2", "must be > 0");
    if (attenuation && *attenuation <= 0) throw ConfigError("attenuation", "must be > 0");
}

namespace linkbudget {

double eta(double tau_s, const DerivedParams& p) {
    return std::max(0.0, std::min(1.0 - (tau_s - p.cp_duration_s) / p.data_duration_s, 1.0));
}

double thermal_noise_power(const OfdmConfig& cfg) {
    return kBoltzmann * cfg.bandwidth_hz * cfg.ambient_temperature_k * cfg.noise_figure;
}

double received_power(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p) {
    if (t.attenuation) return cfg.tx_power_w * (*t.attenuation) * (*t.attenuation);
    double four_pi = 4.0 * kPi;
    return cfg.tx_power_w * cfg.tx_gain * cfg.rx_gain * (*t.rcs_m2) * p.wavelength_m * p.wavelength_m /
           (four_pi * four_pi * four_pi * std::pow(t.range_m, 4));
}

double ideal_snr(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p) {
    if (!t.rcs_m2)
        throw ConfigError("rcs_m2", "ideal SNR needs an RCS-defined target");
    return received_power(t, cfg, p) * p.processing_gain / thermal_noise_power(cfg);
}

double sqnr_db(int adc_bits, double papr_factor) {
    return 6.02 * adc_bits + 10.0 * std::log10(3.0 * papr_factor);
}

double quantization_floor(const OfdmConfig& cfg) {
    double spillover_avg_w = cfg.tx_power_w / db_to_lin(cfg.tx_rx_isolation_db);
    double spillover_peak_w = spillover_avg_w / cfg.papr_factor;
    return spillover_peak_w / db_to_lin(sqnr_db(cfg.adc_bits, cfg.papr_factor));
}

double interference_power(const TargetSpec& t, const OfdmConfig& cfg, const DerivedParams& p) {
    double e = eta(2.0 * t.range_m / kSpeedOfLight, p);
    return received_power(t, cfg, p) * (1.0 - e * e);
}

double actual_sinr(const TargetSpec& t, double dominant_noise_w,
                   const OfdmConfig& cfg, const DerivedParams& p) {
    double e = eta(2.0 * t.range_m / kSpeedOfLight, p);
    return received_power(t, cfg, p) * p.processing_gain * e * e / dominant_noise_w;
}

double worst_case_interferer_range(double rcs_m2, const OfdmConfig& cfg, const DerivedParams& p) {
    TargetSpec t;
    t.rcs_m2 = rcs_m2;
    double best_r = p.range_bin_m;
    double best_p = -1.0;
    for (int n = 1; n < cfg.subcarriers; ++n) {
        t.range_m = n * p.range_bin_m;
        double pi_w = interference_power(t, cfg, p);
        if (pi_w > best_p) {
            best_p = pi_w;
            best_r = t.range_m;
        }
    }
    return best_r;
}

MaxRangeResult max_detectable_range(double target_rcs_m2,
                                    const std::optional<TargetSpec>& interferer,
                                    double threshold_db,
                                    const OfdmConfig& cfg, const DerivedParams& p) {
    if (threshold_db <= 0) throw ConfigError("threshold_db", "must be > 0");
    double p_dom = std::max(thermal_noise_power(cfg), quantization_floor(cfg));
    if (interferer) p_dom = std::max(p_dom, interference_power(*interferer, cfg, p));

    double thr = db_to_lin(threshold_db);
    TargetSpec t;
    t.rcs_m2 = target_rcs_m2;

    auto sinr_at = [&](double r) {
        t.range_m = r;
        return actual_sinr(t, p_dom, cfg, p);
    };

    MaxRangeResult res;
    double r_hi = p.unambiguous_range_m;
    if (sinr_at(r_hi) >= thr) {
        res.range_m = r_hi;
        res.capped = true;
        return res;
    }
    double r_lo = p.range_bin_m;
    if (sinr_at(r_lo) < thr) {
        res.below_threshold = true;
        return res;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (r_lo + r_hi);
        if (sinr_at(mid) >= thr)
            r_lo = mid;
        else
            r_hi = mid;
    }
    res.range_m = 0.5 * (r_lo + r_hi);
    return res;
}

LinkBudgetReport make_report(const std::vector<TargetSpec>& targets,
                             const OfdmConfig& cfg, const DerivedParams& p) {
    LinkBudgetReport rep;
    rep.thermal_noise_w = thermal_noise_power(cfg);
    rep.quantization_noise_w = quantization_floor(cfg);
    double int_sum = 0;
    for (const auto& t : targets) {
        t.validate(p);
        double pi_w = interference_power(t, cfg, p);
        rep.interference_w.push_back(pi_w);
        int_sum += pi_w;
    }
    rep.dominant_noise_w = std::max({rep.thermal_noise_w, rep.quantization_noise_w, int_sum});
    for (const auto& t : targets) {
        rep.ideal_snr.push_back(t.rcs_m2 ? ideal_snr(t, cfg, p) : 0.0);
        rep.actual_sinr.push_back(actual_sinr(t, rep.dominant_noise_w, cfg, p));
        if (t.rcs_m2) {
            TargetSpec probe = t;
            const double thr = db_to_lin(17.0);
            double lo = p.range_bin_m, hi = p.unambiguous_range_m;
            probe.range_m = hi;
            if (actual_sinr(probe, rep.dominant_noise_w, cfg, p) >= thr) {
                rep.max_detectable_range_m.push_back(hi);
            } else {
                probe.range_m = lo;
                if (actual_sinr(probe, rep.dominant_noise_w, cfg, p) < thr) {
                    rep.max_detectable_range_m.push_back(0.0);
                } else {
                    for (int it = 0; it < 200; ++it) {
                        probe.range_m = 0.5 * (lo + hi);
                        (actual_sinr(probe, rep.dominant_noise_w, cfg, p) >= thr ? lo : hi) =
                            probe.range_m;
                    }
                    rep.max_detectable_range_m.push_back(0.5 * (lo + hi));
                }
            }
        } else {
            rep.max_detectable_range_m.push_back(0.0);
        }
    }
    return rep;
}

} // namespace linkbudget
} // namespace ofdmrad
