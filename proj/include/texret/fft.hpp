#pragma once

#include <complex>
#include <vector>

#include "texret/core.hpp"

namespace texret {

// Unnormalized forward 2-D DFT of a real matrix, row-major spectrum of
// the same rows x cols shape. Thread-safe (FFTW planning is serialized
// internally; execution runs concurrently).
std::vector<std::complex<double>> dft2d(const Matrix& in);

// Inverse 2-D DFT scaled by 1/(rows*cols); returns the real part.
Matrix idft2d_real(const std::vector<std::complex<double>>& freq,
                   std::size_t rows, std::size_t cols);

}  // namespace texret
