#pragma once

#include <cstdint>
#include <vector>

#include "ofdmrad/linkbudget.hpp"
#include "ofdmrad/waveform.hpp"

namespace ofdmrad {

/// Per-target channel parameters in sample/Hz units. `amplitude` carries the
/// transmit power: |amplitude|^2 = Ptx * |alpha|^2.
struct TargetDerived {
    double delay_s = 0;
    double delay_samples = 0;     // delay / Ts, fractional
    double doppler_hz = 0;
    cd amplitude{0, 0};           // alpha_tilde = sqrt(Ptx) * alpha * e^{j theta}
    bool doppler_above_ici_limit = false;
};

namespace channel {

TargetDerived target_derived(const TargetSpec& spec, const OfdmConfig& cfg, const DerivedParams& p);

/// Build a TargetDerived directly from estimator-style parameters
/// (alpha_tilde includes sqrt(Ptx) and the phase).
TargetDerived target_from_params(cd alpha_tilde, double tau_s, double doppler_hz,
                                 const DerivedParams& p);

/// Time-domain oracle: sample-exact evaluation of the delayed, Doppler-shifted
/// transmit waveform plus complex white Gaussian noise of total power
/// noise_power_w. Fractional delays enter through a per-symbol spectral phase
/// ramp, so the piecewise-defined waveform is evaluated exactly at every
/// sample instant. Noise draws are counter-based on the sample index.
TimeSignal apply_channel_time(const TimeSignal& tx, const SymbolFrame& frame,
                              const std::vector<TargetDerived>& targets,
                              double noise_power_w, std::uint64_t noise_seed,
                              const OfdmConfig& cfg);

/// Applies the excess-delay interference operator to one symbol column without
/// materializing the N x N matrix: DFT(mask . IDFT(v)) where the mask keeps
/// sample indices [ceil(Nh - Ncp), N). Zero outside Ncp < Nh <= N + Ncp.
void phi_apply(double delay_samples, const cd* in, cd* out, const OfdmConfig& cfg);
CVec phi_apply(double delay_samples, const CVec& v, const OfdmConfig& cfg);

/// Dense interference matrix (test-oracle sizes only).
CMat phi_dense(double delay_samples, const OfdmConfig& cfg);

/// Delay steering vector b(tau): b_n = e^{-j 2 pi n df tau}.
CVec steering_delay(double tau_s, const OfdmConfig& cfg, const DerivedParams& p);
/// Doppler steering vector c(fD): c_m = e^{+j 2 pi m fD T}.
CVec steering_doppler(double doppler_hz, int m_cols, const DerivedParams& p);

/// Frequency-domain matrix model of the received frame (noiseless), the
/// per-symbol-Doppler counterpart of the oracle. Columns:
///   Y_m = amp * c_m * [ Phi(b(tau) . X_m) + (I - Phi)(b(tau - Tcp) . X_{m-1}) ]
/// which is the sign-resolved interference decomposition; for in-CP targets it
/// collapses to the pure steering product.
CMat model_received_frame_fd(const SymbolFrame& frame, const std::vector<TargetDerived>& targets,
                             const OfdmConfig& cfg, const DerivedParams& p);

/// Same model with the interference term's sign flipped; exists so tests can
/// pin which sign matches the time-domain oracle.
CMat model_received_frame_fd_flipped_sign(const SymbolFrame& frame,
                                          const std::vector<TargetDerived>& targets,
                                          const OfdmConfig& cfg, const DerivedParams& p);

} // namespace channel
} // namespace ofdmrad
