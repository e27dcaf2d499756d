#include <doctest.h>

#include "ofdmrad/rng.hpp"
#include "test_common.hpp"

using namespace ofdmrad;
using testutil::tiny_config;

namespace {

RangeDopplerImage image_of_target(const OfdmConfig& cfg, const DerivedParams& p,
                                  double delay_samples, double doppler_frac, cd amp,
                                  const WindowSpec& w, double noise_w = 0,
                                  std::uint64_t seed = 1) {
    SymbolFrame f = waveform::generate_data_frame(cfg, seed);
    TimeSignal tx = waveform::synthesize_time_signal(f, cfg);
    TargetDerived t;
    t.delay_samples = delay_samples;
    t.delay_s = delay_samples * p.sample_period_s;
    t.doppler_hz = doppler_frac * p.subcarrier_spacing_hz;
    t.amplitude = amp;
    TimeSignal rx = channel::apply_channel_time(tx, f, {t}, noise_w, seed + 1, cfg);
    return rxproc::conventional_processing(rx, f, cfg, p, w);
}

} // namespace

TEST_CASE("Chebyshev taps match reference values for both parities") {
    // Frozen from an independent implementation (60 dB design).
    WindowSpec even = make_window(WindowKind::Chebyshev, 16, 4, 60.0);
    const double want_even[4] = {0.024081690520, 0.078911239909, 0.182342247444, 0.337574880004};
    for (int i = 0; i < 4; ++i)
        CHECK(even.range_taps[i] == doctest::Approx(want_even[i]).epsilon(1e-9));
    WindowSpec odd = make_window(WindowKind::Chebyshev, 15, 4, 60.0);
    const double want_odd[4] = {0.025183395051, 0.086456393940, 0.203060705772, 0.376446882533};
    for (int i = 0; i < 4; ++i)
        CHECK(odd.range_taps[i] == doctest::Approx(want_odd[i]).epsilon(1e-9));
    CHECK(odd.range_taps[7] == doctest::Approx(1.0));
}

TEST_CASE("window loss: rectangular is lossless, Chebyshev suppresses sidelobes") {
    OfdmConfig cfg = tiny_config(256, 32, 16);
    WindowSpec rect = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    CHECK(rect.window_loss == doctest::Approx(1.0));

    WindowSpec cheb = make_window(WindowKind::Chebyshev, cfg.subcarriers, cfg.symbols, 60.0);
    CHECK(cheb.window_loss < 1.0);
    CHECK(cheb.window_loss > 0.0);
    CHECK(*std::max_element(cheb.range_taps.begin(), cheb.range_taps.end()) ==
          doctest::Approx(1.0));

    // Single on-grid target: range cells outside the (wider) main lobe sit at
    // the designed equiripple level.
    DerivedParams p = derive_params(cfg);
    RangeDopplerImage img = image_of_target(cfg, p, 8.0, 0.0, cd(1, 0), cheb);
    double peak = 0;
    for (const auto& v : img.img.a) peak = std::max(peak, std::norm(v));
    const int dop0 = cfg.symbols / 2;
    for (int r = 0; r < cfg.subcarriers; ++r) {
        if (std::abs(r - 8) <= 4) continue;
        CHECK(10.0 * std::log10(std::norm(img.img(r, dop0)) / peak) <= -59.5);
    }
}

TEST_CASE("equalize: all-ones data and rectangular window pass the frame through") {
    OfdmConfig cfg = tiny_config(32, 8, 4);
    SymbolFrame f;
    f.data = CMat(cfg.subcarriers, cfg.symbols);
    f.data.fill(cd(1, 0));
    CMat y(cfg.subcarriers, cfg.symbols);
    for (int i = 0; i < static_cast<int>(y.a.size()); ++i) y.a[i] = cd(i * 0.1, -i * 0.05);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    CMat h = rxproc::equalize_and_window(y, f, w);
    for (std::size_t i = 0; i < y.a.size(); ++i) CHECK(h.a[i] == y.a[i]);
}

TEST_CASE("equalize: windowing is a rank-1 multiplicative pattern") {
    OfdmConfig cfg = tiny_config(32, 8, 4);
    SymbolFrame f = waveform::generate_data_frame(cfg, 3);
    CMat y(cfg.subcarriers, cfg.symbols);
    for (auto& v : y.a) v = cd(1.0, 0.5);
    WindowSpec w = make_window(WindowKind::Hamming, cfg.subcarriers, cfg.symbols);
    CMat h = rxproc::equalize_and_window(y, f, w);
    for (int m = 0; m < cfg.symbols; ++m)
        for (int k = 0; k < cfg.subcarriers; ++k) {
            cd ratio = h(k, m) / (y(k, m) / f.data(k, m));
            CHECK(std::abs(ratio - cd(w.range_taps[k] * w.doppler_taps[m], 0)) < 1e-12);
        }
}

TEST_CASE("equalize rejects zero data symbols") {
    OfdmConfig cfg = tiny_config(16, 4, 2);
    SymbolFrame f = waveform::generate_data_frame(cfg, 1);
    f.data(3, 1) = cd(0, 0);
    CMat y(cfg.subcarriers, cfg.symbols);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    CHECK_THROWS_AS(rxproc::equalize_and_window(y, f, w), ConfigError);
}

TEST_CASE("single static on-grid target peaks at (bin, M/2) with full processing gain") {
    OfdmConfig cfg = tiny_config(64, 16, 8);
    DerivedParams p = derive_params(cfg);
    for (WindowKind kind : {WindowKind::Rectangular, WindowKind::Chebyshev}) {
        WindowSpec w = make_window(kind, cfg.subcarriers, cfg.symbols, 60.0);
        RangeDopplerImage img = image_of_target(cfg, p, 5.0, 0.0, cd(0.8, 0.6), w);
        int best_r = 0, best_c = 0;
        double best = -1;
        for (int c = 0; c < cfg.symbols; ++c)
            for (int r = 0; r < cfg.subcarriers; ++r)
                if (std::norm(img.img(r, c)) > best) {
                    best = std::norm(img.img(r, c));
                    best_r = r;
                    best_c = c;
                }
        CHECK(best_r == 5);
        CHECK(best_c == cfg.symbols / 2);
        double want = p.processing_gain * w.window_loss * std::norm(cd(0.8, 0.6));
        CHECK(std::abs(10.0 * std::log10(best / want)) < 0.1);
    }
}

TEST_CASE("image formation preserves energy (Parseval)") {
    OfdmConfig cfg = tiny_config(32, 8, 8);
    DerivedParams p = derive_params(cfg);
    CMat h(cfg.subcarriers, cfg.symbols);
    for (std::size_t i = 0; i < h.a.size(); ++i) h.a[i] = rng::gauss_c(5, 0, i);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    RangeDopplerImage img = rxproc::range_doppler_image(h, cfg, p, w);
    CHECK(testutil::frame_energy(img.img) ==
          doctest::Approx(testutil::frame_energy(h)).epsilon(1e-9));
}

TEST_CASE("image formation is linear") {
    OfdmConfig cfg = tiny_config(32, 8, 4);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    CMat a(cfg.subcarriers, cfg.symbols), b(cfg.subcarriers, cfg.symbols);
    for (std::size_t i = 0; i < a.a.size(); ++i) {
        a.a[i] = rng::gauss_c(8, 0, i);
        b.a[i] = rng::gauss_c(9, 0, i);
    }
    CMat sum = a;
    for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += b.a[i];
    RangeDopplerImage ia = rxproc::range_doppler_image(a, cfg, p, w);
    RangeDopplerImage ib = rxproc::range_doppler_image(b, cfg, p, w);
    RangeDopplerImage is = rxproc::range_doppler_image(sum, cfg, p, w);
    for (std::size_t i = 0; i < is.img.a.size(); ++i)
        CHECK(std::abs(is.img.a[i] - ia.img.a[i] - ib.img.a[i]) < 1e-10);
}

TEST_CASE("half-bin target leaks symmetrically about its two neighbours") {
    OfdmConfig cfg = tiny_config(64, 16, 8);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    RangeDopplerImage img = image_of_target(cfg, p, 10.5, 0.0, cd(1, 0), w);
    const int c0 = cfg.symbols / 2;
    CHECK(std::abs(std::norm(img.img(10, c0)) - std::norm(img.img(11, c0))) /
              std::norm(img.img(10, c0)) <
          1e-6);
    CHECK(std::abs(std::norm(img.img(9, c0)) - std::norm(img.img(12, c0))) /
              std::norm(img.img(9, c0)) <
          1e-6);
}

TEST_CASE("demodulate window offset shifts the apparent delay") {
    OfdmConfig cfg = tiny_config(64, 16, 4);
    DerivedParams p = derive_params(cfg);
    SymbolFrame f = waveform::generate_data_frame(cfg, 2, true);
    TimeSignal tx = waveform::synthesize_time_signal(f, cfg);
    TargetDerived t;
    t.delay_samples = 12;
    t.delay_s = 12 * p.sample_period_s;
    t.amplitude = cd(1, 0);
    TimeSignal rx = channel::apply_channel_time(tx, f, {t}, 0, 0, cfg);
    CMat y = rxproc::demodulate(rx, cfg, 8, cfg.symbols);  // shift by 8 samples
    // Apparent delay becomes 4 samples: phase ramp e^{-j 2 pi k 4 / N}.
    for (int k = 0; k < cfg.subcarriers; ++k) {
        cd expect = f.data(k, 0) * std::polar(1.0, -2.0 * kPi * k * 4.0 / cfg.subcarriers);
        CHECK(std::abs(y(k, 0) - expect) < 1e-9);
    }
}

TEST_CASE("demodulate rejects short signals") {
    OfdmConfig cfg = tiny_config(64, 16, 4);
    TimeSignal ts;
    ts.sample_period_s = 1.0 / cfg.bandwidth_hz;
    ts.samples.assign(100, cd(0, 0));
    CHECK_THROWS_AS(rxproc::demodulate(ts, cfg), ConfigError);
}

TEST_CASE("noise-only floor estimate matches the injected power") {
    OfdmConfig cfg = tiny_config(128, 16, 32);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    const double noise_w = 3.2e-9;
    double acc = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        SymbolFrame f = waveform::generate_data_frame(cfg, 100 + t);
        TimeSignal tx = waveform::synthesize_time_signal(f, cfg);
        TimeSignal rx = channel::apply_channel_time(tx, f, {}, noise_w, 200 + t, cfg);
        RangeDopplerImage img = rxproc::conventional_processing(rx, f, cfg, p, w);
        acc += rxproc::image_floor_dbm(img.img, {}, 0, 0);
    }
    CHECK(std::abs(acc / trials - watt_to_dbm(noise_w)) < 0.5);
}

TEST_CASE("noiseless single target: image SINR limited only by numerics") {
    OfdmConfig cfg = tiny_config(64, 16, 8);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    RangeDopplerImage img = image_of_target(cfg, p, 5.0, 0.0, cd(1, 0), w);
    auto met = rxproc::image_metrics(img, {{5, cfg.symbols / 2}}, 4, 4, 1);
    CHECK(met.targets[0].sinr_db > 250.0);
}

TEST_CASE("image metrics reject out-of-bounds queries") {
    OfdmConfig cfg = tiny_config(32, 8, 4);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);
    RangeDopplerImage img = image_of_target(cfg, p, 5.0, 0.0, cd(1, 0), w);
    CHECK_THROWS_AS(rxproc::image_metrics(img, {{cfg.subcarriers, 0}}, 4, 4, 1), ConfigError);
}

TEST_CASE("in-CP on-grid target SINR matches the analytic SNR") {
    OfdmConfig cfg = tiny_config(256, 32, 64);
    cfg.tx_power_w = dbm_to_watt(30.0);
    DerivedParams p = derive_params(cfg);
    WindowSpec w = make_window(WindowKind::Rectangular, cfg.subcarriers, cfg.symbols);

    TargetSpec spec;
    spec.range_m = 20 * p.range_bin_m;
    spec.rcs_m2 = 5.0;
    TargetDerived t = channel::target_derived(spec, cfg, p);
    double noise_w = linkbudget::thermal_noise_power(cfg);

    double acc = 0;
    const int trials = 10;
    for (int k = 0; k < trials; ++k) {
        SymbolFrame f = waveform::generate_data_frame(cfg, 50 + k);
        TimeSignal tx = waveform::synthesize_time_signal(f, cfg);
        TimeSignal rx = channel::apply_channel_time(tx, f, {t}, noise_w, 70 + k, cfg);
        RangeDopplerImage img = rxproc::conventional_processing(rx, f, cfg, p, w);
        auto met = rxproc::image_metrics(img, {{20, cfg.symbols / 2}}, 8, 8, 1);
        acc += met.targets[0].sinr_db;
    }
    double ideal = lin_to_db(linkbudget::ideal_snr(spec, cfg, p));
    CHECK(std::abs(acc / trials - ideal) < 0.5);
}
