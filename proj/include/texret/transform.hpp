#pragma once

#include <string>
#include <vector>

#include "texret/core.hpp"

namespace texret {

// Multiscale + directional decomposition parameters. The default matches
// the configuration used for all retrieval experiments: 3 scale levels,
// 8 directions per level, critically sampled.
struct RctPlusConfig {
    std::size_t levels = 3;
    std::vector<std::size_t> directions = {8, 8, 8};
    double sigma0 = 1.0;
    bool critically_sampled = true;

    void validate() const;  // throws Error{config}
    std::size_t subband_count() const;  // sum(directions) + 1
};

// Samples of a Gaussian with sigma_l = sigma0 * 2^(level-1), truncated at
// radius ceil(4 sigma_l) and normalized to sum exactly 1. Returned as the
// full symmetric kernel of odd length 2r + 1.
std::vector<double> pseudo_gaussian_kernel(std::size_t level, double sigma0);

// 1-D convolution with mirror (symmetric half-sample) boundary extension.
// Exposed for the separable smoother and for tests.
std::vector<double> convolve_mirror(const std::vector<double>& signal,
                                    const std::vector<double>& kernel);

struct RlpPyramid {
    std::vector<Matrix> details;  // one full-size detail per level
    Matrix approximation;
};

// Undecimated Laplacian pyramid: C_0 = img, C_l = smooth(C_{l-1}) with the
// level-l kernel, detail_l = C_{l-1} - C_l. All outputs keep the input
// size, so sum(details) + approximation reconstructs the input exactly.
RlpPyramid rlp_decompose(const GrayImage& img, std::size_t levels, double sigma0);

// Wedge index in [0, num_dirs) for every frequency bin of a rows x cols
// spectrum (row-major). Wedge d covers angles [pi d/D, pi (d+1)/D) plus
// the antipodal sector; bins exactly on a boundary go to the lower-indexed
// wedge, and the DC bin plus Nyquist row/column go to wedge 0.
std::vector<int> dfb_wedge_map(std::size_t rows, std::size_t cols,
                               std::size_t num_dirs);

// True when wedge d's angular center lies within pi/4 of the vertical
// frequency axis; such wedges decimate rows by D/2 and columns by 2,
// the others columns by D/2 and rows by 2.
bool dfb_wedge_is_vertical(std::size_t wedge, std::size_t num_dirs);

// Directional filter bank: brick-wall wedge masks applied in the DFT
// domain. Undecimated mode returns num_dirs full-size filtered images;
// critically sampled mode decimates each by a total factor of num_dirs.
std::vector<Matrix> dfb_decompose(const Matrix& detail, std::size_t num_dirs,
                                  bool critically_sampled);

struct Subband {
    std::size_t scale;      // 1..L, or L for the approximation
    std::size_t direction;  // 1..D_l; 0 marks the approximation
    Matrix coefficients;

    bool is_approximation() const { return direction == 0; }
};

struct RctPlusDecomposition {
    RctPlusConfig config;
    std::vector<Subband> subbands;  // scale-major, approximation last
};

RctPlusDecomposition rct_plus(const GrayImage& img, const RctPlusConfig& config);

// Debug dump: one binary file per subband under dir, ASCII header line
// "RCTP1 <scale> <dir> <K> <M>" followed by K*M little-endian doubles.
void dump_decomposition(const RctPlusDecomposition& decomp,
                        const std::string& dir);

}  // namespace texret
