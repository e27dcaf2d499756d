#include "ofdmrad/waveform.hpp"

#include <cmath>

#include "ofdmrad/fft.hpp"
#include "ofdmrad/rng.hpp"

namespace ofdmrad {
namespace waveform {

SymbolFrame generate_data_frame(const OfdmConfig& cfg, std::uint64_t seed, bool extra_symbol) {
    cfg.validate();
    const int n = cfg.subcarriers;
    const int m = cfg.symbols + (extra_symbol ? 1 : 0);
    SymbolFrame f;
    f.seed = seed;
    f.data = CMat(n, m);
    const double s = 1.0 / std::sqrt(2.0);
    for (int c = 0; c < m; ++c) {
        cd* col = f.data.col(c);
        for (int k = 0; k < n; ++k) {
            std::uint64_t bits = rng::mix(seed, 0x0fd3, static_cast<std::uint64_t>(c) * n + k);
            col[k] = cd(bits & 1 ? -s : s, bits & 2 ? -s : s);
        }
    }
    return f;
}

TimeSignal synthesize_time_signal(const SymbolFrame& frame, const OfdmConfig& cfg) {
    const int n = cfg.subcarriers;
    const int ncp = cfg.cp_length;
    const int sym_len = n + ncp;
    const int m = frame.data.cols;
    if (frame.data.rows != n)
        throw ConfigError("frame", "symbol frame row count does not match config subcarriers");

    TimeSignal ts;
    ts.sample_period_s = 1.0 / cfg.bandwidth_hz;
    ts.tail_samples = sym_len;
    ts.samples.assign(static_cast<std::size_t>(m) * sym_len + ts.tail_samples, cd(0, 0));

    const double scale = std::sqrt(cfg.tx_power_w / n);
    CVec t(n);
    for (int c = 0; c < m; ++c) {
        fft::idft(frame.data.col(c), t.data(), n);
        cd* out = ts.samples.data() + static_cast<std::size_t>(c) * sym_len;
        for (int i = 0; i < ncp; ++i) out[i] = scale * t[n - ncp + i];
        for (int i = 0; i < n; ++i) out[ncp + i] = scale * t[i];
    }
    return ts;
}

} // namespace waveform
} // namespace ofdmrad
