#pragma once

#include <cstdint>

#include "ofdmrad/config.hpp"

namespace ofdmrad {

/// Unit-average-power QPSK data grid, N rows x (M or M+1) columns.
/// The optional extra column models the first symbol of the following frame
/// so next-symbol compensation has real content at the frame edge.
struct SymbolFrame {
    CMat data;
    std::uint64_t seed = 0;
    std::string modulation = "qpsk";
};

/// Sampled baseband stream. Sample g corresponds to t = (g - cp_length)*Ts,
/// i.e. t=0 at the start of the first data-carrying part.
struct TimeSignal {
    CVec samples;
    double sample_period_s = 0;
    int start_offset = 0;        // samples, relative to frame start
    int tail_samples = 0;        // zero-padded region past the last symbol
};

namespace waveform {

SymbolFrame generate_data_frame(const OfdmConfig& cfg, std::uint64_t seed, bool extra_symbol = false);

/// CP-OFDM synthesis: per symbol, scaled inverse DFT plus cyclic prefix,
/// symbols concatenated, one symbol duration of zero tail appended.
TimeSignal synthesize_time_signal(const SymbolFrame& frame, const OfdmConfig& cfg);

} // namespace waveform
} // namespace ofdmrad
