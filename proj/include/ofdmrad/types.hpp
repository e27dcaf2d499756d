#pragma once

#include <complex>
#include <cstdlib>
#include <cstddef>
#include <cmath>
#include <new>
#include <stdexcept>
#include <vector>

namespace ofdmrad {

using cd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;   // m/s
inline constexpr double kBoltzmann = 1.380649e-23;     // J/K
inline constexpr double kPi = 3.14159265358979323846;

/// 64-byte aligned allocator so complex buffers satisfy FFTW's SIMD alignment.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::size_t alignment = 64;

    AlignedAllocator() noexcept = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        if (n == 0) return nullptr;
        void* p = std::aligned_alloc(alignment, ((n * sizeof(T) + alignment - 1) / alignment) * alignment);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { std::free(p); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
    template <typename U>
    bool operator!=(const AlignedAllocator<U>&) const noexcept { return false; }
};

using CVec = std::vector<cd, AlignedAllocator<cd>>;
using DVec = std::vector<double>;

/// Dense complex matrix, column-major (column = OFDM symbol, row = subcarrier/range bin).
struct CMat {
    int rows = 0;
    int cols = 0;
    CVec a;

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    cd& operator()(int r, int c) { return a[static_cast<std::size_t>(c) * rows + r]; }
    const cd& operator()(int r, int c) const { return a[static_cast<std::size_t>(c) * rows + r]; }

    cd* col(int c) { return a.data() + static_cast<std::size_t>(c) * rows; }
    const cd* col(int c) const { return a.data() + static_cast<std::size_t>(c) * rows; }

    std::size_t size() const { return a.size(); }
    void fill(cd v) { std::fill(a.begin(), a.end(), v); }
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Error thrown for invalid configuration or scenario input; carries the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

} // namespace ofdmrad
