#include <doctest.h>

#include "test_common.hpp"

using namespace ofdmrad;
using testutil::tiny_config;

TEST_CASE("data frames are deterministic unit-power QPSK") {
    OfdmConfig cfg = tiny_config(128, 16, 10);
    SymbolFrame a = waveform::generate_data_frame(cfg, 99);
    SymbolFrame b = waveform::generate_data_frame(cfg, 99);
    SymbolFrame c = waveform::generate_data_frame(cfg, 100);

    double power = 0;
    bool identical = true, differs = false;
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < a.data.a.size(); ++i) {
        power += std::norm(a.data.a[i]);
        identical = identical && a.data.a[i] == b.data.a[i];
        differs = differs || a.data.a[i] != c.data.a[i];
        CHECK(std::abs(std::abs(a.data.a[i].real()) - s) < 1e-15);
        CHECK(std::abs(std::abs(a.data.a[i].imag()) - s) < 1e-15);
    }
    CHECK(power / a.data.a.size() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("extra symbol column extends the frame by one") {
    OfdmConfig cfg = tiny_config();
    CHECK(waveform::generate_data_frame(cfg, 1, true).data.cols == cfg.symbols + 1);
    CHECK(waveform::generate_data_frame(cfg, 1, false).data.cols == cfg.symbols);
}

TEST_CASE("synthesis: cyclic prefix copies the symbol tail, length is as declared") {
    OfdmConfig cfg = tiny_config();
    SymbolFrame f = waveform::generate_data_frame(cfg, 5);
    TimeSignal ts = waveform::synthesize_time_signal(f, cfg);
    const int sym = cfg.subcarriers + cfg.cp_length;
    CHECK(static_cast<int>(ts.samples.size()) == cfg.symbols * sym + ts.tail_samples);
    CHECK(ts.tail_samples == sym);
    for (int m = 0; m < cfg.symbols; ++m)
        for (int i = 0; i < cfg.cp_length; ++i)
            CHECK(ts.samples[m * sym + i] == ts.samples[m * sym + cfg.subcarriers + i]);
    for (int i = 0; i < ts.tail_samples; ++i)
        CHECK(ts.samples[cfg.symbols * sym + i] == cd(0, 0));
}

TEST_CASE("average sample power equals the transmit power") {
    OfdmConfig cfg = tiny_config(256, 32, 32);
    cfg.tx_power_w = dbm_to_watt(49.0);
    SymbolFrame f = waveform::generate_data_frame(cfg, 17);
    TimeSignal ts = waveform::synthesize_time_signal(f, cfg);
    double acc = 0;
    const std::size_t n_live = ts.samples.size() - ts.tail_samples;
    for (std::size_t i = 0; i < n_live; ++i) acc += std::norm(ts.samples[i]);
    CHECK(acc / n_live == doctest::Approx(cfg.tx_power_w).epsilon(0.01));
}

TEST_CASE("demodulate inverts synthesis up to the sqrt(Ptx) amplitude") {
    OfdmConfig cfg = tiny_config();
    cfg.tx_power_w = 4.0;
    SymbolFrame f = waveform::generate_data_frame(cfg, 21);
    TimeSignal ts = waveform::synthesize_time_signal(f, cfg);
    CMat y = rxproc::demodulate(ts, cfg);
    double scale = std::sqrt(cfg.tx_power_w);
    double worst = 0;
    for (int m = 0; m < cfg.symbols; ++m)
        for (int k = 0; k < cfg.subcarriers; ++k)
            worst = std::max(worst, std::abs(y(k, m) - scale * f.data(k, m)) / scale);
    CHECK(worst < 1e-9);
}

TEST_CASE("synthesis is linear in the data") {
    OfdmConfig cfg = tiny_config(32, 8, 4);
    SymbolFrame a = waveform::generate_data_frame(cfg, 31);
    SymbolFrame b = waveform::generate_data_frame(cfg, 32);
    SymbolFrame sum = a;
    for (std::size_t i = 0; i < sum.data.a.size(); ++i) sum.data.a[i] += b.data.a[i];
    TimeSignal ta = waveform::synthesize_time_signal(a, cfg);
    TimeSignal tb = waveform::synthesize_time_signal(b, cfg);
    TimeSignal tsum = waveform::synthesize_time_signal(sum, cfg);
    for (std::size_t i = 0; i < tsum.samples.size(); ++i)
        CHECK(std::abs(tsum.samples[i] - ta.samples[i] - tb.samples[i]) < 1e-12);
}

TEST_CASE("frame dimension mismatch is rejected") {
    OfdmConfig cfg = tiny_config();
    SymbolFrame f = waveform::generate_data_frame(cfg, 1);
    cfg.subcarriers *= 2;
    CHECK_THROWS_AS(waveform::synthesize_time_signal(f, cfg), ConfigError);
}
