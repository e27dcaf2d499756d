#pragma once

#include <span>

#include "ofdmrad/types.hpp"

namespace ofdmrad {
namespace fft {

/// Unnormalized DFT: out[p] = sum_n in[n] e^{-j2*pi*n*p/N}. in/out may alias.
void dft(const cd* in, cd* out, int n);
/// Unnormalized inverse DFT: out[i] = sum_k in[k] e^{+j2*pi*k*i/N}.
void idft(const cd* in, cd* out, int n);

void dft(const CVec& in, CVec& out);
void idft(const CVec& in, CVec& out);

/// Smallest power of two >= n (Bluestein convolution sizes).
int next_pow2(int n);

} // namespace fft
} // namespace ofdmrad
