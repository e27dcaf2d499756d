#include "ofdmrad/channel.hpp"

#include <cmath>

#include "ofdmrad/fft.hpp"
#include "ofdmrad/rng.hpp"

namespace ofdmrad {
namespace channel {

namespace {

// ceil with a one-nanosample guard: delays that land a rounding error above
// an integer boundary must not shift the whole echo window by a sample.
int ceil_guarded(double x) { return static_cast<int>(std::ceil(x - 1e-9)); }

} // namespace

TargetDerived target_derived(const TargetSpec& spec, const OfdmConfig& cfg, const DerivedParams& p) {
    spec.validate(p);
    TargetDerived d;
    d.delay_s = 2.0 * spec.range_m / kSpeedOfLight;
    d.delay_samples = d.delay_s / p.sample_period_s;
    d.doppler_hz = 2.0 * spec.velocity_mps / p.wavelength_m;
    double alpha_mag;
    if (spec.rcs_m2) {
        double four_pi = 4.0 * kPi;
        alpha_mag = std::sqrt(cfg.tx_gain * cfg.rx_gain * (*spec.rcs_m2) * p.wavelength_m * p.wavelength_m /
                              (four_pi * four_pi * four_pi * std::pow(spec.range_m, 4)));
    } else {
        alpha_mag = *spec.attenuation;
    }
    d.amplitude = std::polar(std::sqrt(cfg.tx_power_w) * alpha_mag, spec.phase_rad);
    d.doppler_above_ici_limit = std::abs(d.doppler_hz) > 0.1 * p.subcarrier_spacing_hz;
    return d;
}

TargetDerived target_from_params(cd alpha_tilde, double tau_s, double doppler_hz,
                                 const DerivedParams& p) {
    TargetDerived d;
    d.delay_s = tau_s;
    d.delay_samples = tau_s / p.sample_period_s;
    d.doppler_hz = doppler_hz;
    d.amplitude = alpha_tilde;
    d.doppler_above_ici_limit = std::abs(doppler_hz) > 0.1 * p.subcarrier_spacing_hz;
    return d;
}

TimeSignal apply_channel_time(const TimeSignal& tx, const SymbolFrame& frame,
                              const std::vector<TargetDerived>& targets,
                              double noise_power_w, std::uint64_t noise_seed,
                              const OfdmConfig& cfg) {
    const int n = cfg.subcarriers;
    const int ncp = cfg.cp_length;
    const int sym_len = n + ncp;
    const int m_cols = frame.data.cols;
    const std::size_t len = tx.samples.size();
    const double ts = tx.sample_period_s;

    TimeSignal rx;
    rx.sample_period_s = ts;
    rx.start_offset = tx.start_offset;
    rx.tail_samples = tx.tail_samples;
    rx.samples.assign(len, cd(0, 0));

    const double synth_scale = std::sqrt(cfg.tx_power_w / n);
    CVec ramped(n), z(n);

    for (const auto& tgt : targets) {
        const double nh = tgt.delay_samples;
        const int d_ceil = ceil_guarded(nh);
        const double mu = d_ceil - nh;  // in (-1e-9, 1)
        // alpha_tilde already carries sqrt(Ptx); the waveform scale below must not.
        const cd amp = tgt.amplitude / std::sqrt(cfg.tx_power_w);
        for (int m = 0; m < m_cols; ++m) {
            const cd* x = frame.data.col(m);
            for (int k = 0; k < n; ++k)
                ramped[k] = x[k] * std::polar(1.0, 2.0 * kPi * k * mu / n);
            fft::idft(ramped.data(), z.data(), n);
            // Symbol m of the echo covers samples g in [m*S + Nh, m*S + Nh + S);
            // z, being N-periodic, supplies the CP region as well.
            const long g0 = static_cast<long>(m) * sym_len + d_ceil;
            for (int j = 0; j < sym_len; ++j) {
                const long g = g0 + j;
                if (g < 0 || g >= static_cast<long>(len)) continue;
                const long w = g - ncp - m * static_cast<long>(sym_len) - d_ceil;  // j - ncp
                int idx = static_cast<int>(((w % n) + n) % n);
                const double t_g = (g - ncp) * ts;
                rx.samples[g] += amp * synth_scale * z[idx] *
                                 std::polar(1.0, 2.0 * kPi * tgt.doppler_hz * t_g);
            }
        }
    }

    if (noise_power_w > 0) {
        const double sigma = std::sqrt(noise_power_w);
        for (std::size_t g = 0; g < len; ++g)
            rx.samples[g] += sigma * rng::gauss_c(noise_seed, 0x7a11, g);
    }
    return rx;
}

namespace {

// Valid interference window [i0, N): i0 = ceil(Nh - Ncp) clamped to [0, N].
int mask_start(double delay_samples, const OfdmConfig& cfg) {
    double raw = delay_samples - cfg.cp_length;
    if (raw <= 0) return 0;
    return std::min(std::max(ceil_guarded(raw), 0), cfg.subcarriers);
}

} // namespace

void phi_apply(double delay_samples, const cd* in, cd* out, const OfdmConfig& cfg) {
    const int n = cfg.subcarriers;
    if (delay_samples <= cfg.cp_length || delay_samples > cfg.subcarriers + cfg.cp_length) {
        std::fill(out, out + n, cd(0, 0));
        return;
    }
    const int i0 = mask_start(delay_samples, cfg);
    CVec t(n);
    fft::idft(in, t.data(), n);
    std::fill(t.begin(), t.begin() + i0, cd(0, 0));
    fft::dft(t.data(), out, n);
    const double inv_n = 1.0 / n;
    for (int i = 0; i < n; ++i) out[i] *= inv_n;
}

CVec phi_apply(double delay_samples, const CVec& v, const OfdmConfig& cfg) {
    CVec out(v.size());
    phi_apply(delay_samples, v.data(), out.data(), cfg);
    return out;
}

CMat phi_dense(double delay_samples, const OfdmConfig& cfg) {
    const int n = cfg.subcarriers;
    CMat phi(n, n);
    if (delay_samples <= cfg.cp_length || delay_samples > cfg.subcarriers + cfg.cp_length)
        return phi;
    const int i0 = mask_start(delay_samples, cfg);
    for (int p = 0; p < n; ++p)
        for (int k = 0; k < n; ++k) {
            cd s(0, 0);
            for (int i = i0; i < n; ++i)
                s += std::polar(1.0, 2.0 * kPi * (k - p) * i / n);
            phi(p, k) = s / static_cast<double>(n);
        }
    return phi;
}

CVec steering_delay(double tau_s, const OfdmConfig& cfg, const DerivedParams& p) {
    CVec b(cfg.subcarriers);
    for (int k = 0; k < cfg.subcarriers; ++k)
        b[k] = std::polar(1.0, -2.0 * kPi * k * p.subcarrier_spacing_hz * tau_s);
    return b;
}

CVec steering_doppler(double doppler_hz, int m_cols, const DerivedParams& p) {
    CVec c(m_cols);
    for (int m = 0; m < m_cols; ++m)
        c[m] = std::polar(1.0, 2.0 * kPi * m * doppler_hz * p.symbol_duration_s);
    return c;
}

namespace {

CMat model_fd_impl(const SymbolFrame& frame, const std::vector<TargetDerived>& targets,
                   const OfdmConfig& cfg, const DerivedParams& p, double isi_sign) {
    const int n = cfg.subcarriers;
    const int m_cols = frame.data.cols;
    CMat y(n, m_cols);

    CVec free_col(n), prev_col(n), tmp(n);
    for (const auto& tgt : targets) {
        const bool excess = tgt.delay_samples > cfg.cp_length;
        const CVec b = steering_delay(tgt.delay_s, cfg, p);
        const CVec b_shift = steering_delay(tgt.delay_s - p.cp_duration_s, cfg, p);
        const CVec c = steering_doppler(tgt.doppler_hz, m_cols, p);
        for (int m = 0; m < m_cols; ++m) {
            const cd* x = frame.data.col(m);
            cd* out = y.col(m);
            const cd amp_c = tgt.amplitude * c[m];
            if (!excess) {
                for (int k = 0; k < n; ++k) out[k] += amp_c * b[k] * x[k];
                continue;
            }
            // Tail of the current symbol, captured through the interference mask.
            for (int k = 0; k < n; ++k) tmp[k] = b[k] * x[k];
            phi_apply(tgt.delay_samples, tmp.data(), free_col.data(), cfg);
            // Head samples carry the previous symbol: complementary mask (I - Phi).
            if (m >= 1) {
                const cd* xp = frame.data.col(m - 1);
                for (int k = 0; k < n; ++k) tmp[k] = b_shift[k] * xp[k];
                phi_apply(tgt.delay_samples, tmp.data(), prev_col.data(), cfg);
                for (int k = 0; k < n; ++k)
                    out[k] += amp_c * (free_col[k] + isi_sign * (b_shift[k] * xp[k] - prev_col[k]));
            } else {
                for (int k = 0; k < n; ++k) out[k] += amp_c * free_col[k];
            }
        }
    }
    return y;
}

} // namespace

CMat model_received_frame_fd(const SymbolFrame& frame, const std::vector<TargetDerived>& targets,
                             const OfdmConfig& cfg, const DerivedParams& p) {
    return model_fd_impl(frame, targets, cfg, p, +1.0);
}

CMat model_received_frame_fd_flipped_sign(const SymbolFrame& frame,
                                          const std::vector<TargetDerived>& targets,
                                          const OfdmConfig& cfg, const DerivedParams& p) {
    return model_fd_impl(frame, targets, cfg, p, -1.0);
}

} // namespace channel
} // namespace ofdmrad
