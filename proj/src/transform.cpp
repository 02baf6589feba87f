#include "texret/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "texret/fft.hpp"

namespace texret {

namespace {

bool allowed_direction_count(std::size_t d) {
    return d == 2 || d == 4 || d == 8 || d == 16;
}

// Mirror (symmetric half-sample) index: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
std::size_t reflect(long i, long n) {
    while (i < 0 || i >= n) {
        if (i < 0) {
            i = -i - 1;
        } else {
            i = 2 * n - 1 - i;
        }
    }
    return static_cast<std::size_t>(i);
}

void convolve_mirror_into(const double* src, std::size_t n, std::ptrdiff_t stride,
                          const std::vector<double>& kernel, double* dst) {
    const long radius = static_cast<long>(kernel.size() / 2);
    const long ln = static_cast<long>(n);
    const double* center = kernel.data() + radius;
    for (long i = 0; i < ln; ++i) {
        double acc = 0.0;
        if (i >= radius && i + radius < ln) {
            for (long k = -radius; k <= radius; ++k) {
                acc += center[k] * src[(i + k) * stride];
            }
        } else {
            for (long k = -radius; k <= radius; ++k) {
                acc += center[k] * src[static_cast<std::ptrdiff_t>(reflect(i + k, ln)) * stride];
            }
        }
        dst[i] = acc;
    }
}

// Separable smoothing, rows then columns.
Matrix smooth(const Matrix& in, const std::vector<double>& kernel) {
    Matrix tmp(in.rows, in.cols);
    for (std::size_t r = 0; r < in.rows; ++r) {
        convolve_mirror_into(&in.data[r * in.cols], in.cols, 1, kernel,
                             &tmp.data[r * in.cols]);
    }
    Matrix out(in.rows, in.cols);
    std::vector<double> col(in.rows);
    for (std::size_t c = 0; c < in.cols; ++c) {
        convolve_mirror_into(&tmp.data[c], in.rows,
                             static_cast<std::ptrdiff_t>(in.cols), kernel, col.data());
        for (std::size_t r = 0; r < in.rows; ++r) {
            out.data[r * in.cols + c] = col[r];
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> decimation_steps(std::size_t wedge,
                                                     std::size_t num_dirs) {
    const std::size_t half = std::max<std::size_t>(num_dirs / 2, 1);
    if (dfb_wedge_is_vertical(wedge, num_dirs)) {
        return {half, 2};  // rows by D/2, columns by 2
    }
    return {2, half};  // rows by 2, columns by D/2
}

}  // namespace

void RctPlusConfig::validate() const {
    if (levels < 1) {
        throw Error(Error::Kind::config, "number of scale levels must be >= 1");
    }
    if (directions.size() != levels) {
        throw Error(Error::Kind::config,
                    "expected " + std::to_string(levels) +
                        " direction counts, got " +
                        std::to_string(directions.size()));
    }
    for (std::size_t d : directions) {
        if (!allowed_direction_count(d)) {
            throw Error(Error::Kind::config,
                        "direction count must be one of {2, 4, 8, 16}, got " +
                            std::to_string(d));
        }
    }
    if (!(sigma0 > 0.0)) {
        throw Error(Error::Kind::config, "sigma0 must be positive");
    }
}

std::size_t RctPlusConfig::subband_count() const {
    std::size_t n = 1;
    for (std::size_t d : directions) {
        n += d;
    }
    return n;
}

std::vector<double> pseudo_gaussian_kernel(std::size_t level, double sigma0) {
    if (level < 1) {
        throw Error(Error::Kind::config, "kernel level must be >= 1");
    }
    if (!(sigma0 > 0.0)) {
        throw Error(Error::Kind::config, "sigma0 must be positive");
    }
    const double sigma = sigma0 * std::pow(2.0, static_cast<double>(level - 1));
    const long radius = static_cast<long>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (long i = -radius; i <= radius; ++i) {
        const double x = static_cast<double>(i) / sigma;
        kernel[i + radius] = std::exp(-0.5 * x * x);
        sum += kernel[i + radius];
    }
    for (double& v : kernel) {
        v /= sum;
    }
    return kernel;
}

std::vector<double> convolve_mirror(const std::vector<double>& signal,
                                    const std::vector<double>& kernel) {
    std::vector<double> out(signal.size());
    convolve_mirror_into(signal.data(), signal.size(), 1, kernel, out.data());
    return out;
}

RlpPyramid rlp_decompose(const GrayImage& img, std::size_t levels, double sigma0) {
    if (levels < 1) {
        throw Error(Error::Kind::config, "number of scale levels must be >= 1");
    }
    if (img.size() == 0) {
        throw Error(Error::Kind::dimension, "empty image");
    }
    {
        const std::size_t support = pseudo_gaussian_kernel(levels, sigma0).size();
        if (img.rows < support || img.cols < support) {
            std::cerr << "warning: image " << img.rows << "x" << img.cols
                      << " is smaller than the level-" << levels
                      << " kernel support (" << support
                      << "); boundary extension dominates\n";
        }
    }
    RlpPyramid pyr;
    Matrix current = img;
    for (std::size_t l = 1; l <= levels; ++l) {
        Matrix smoothed = smooth(current, pseudo_gaussian_kernel(l, sigma0));
        Matrix detail(current.rows, current.cols);
        for (std::size_t i = 0; i < detail.size(); ++i) {
            detail.data[i] = current.data[i] - smoothed.data[i];
        }
        pyr.details.push_back(std::move(detail));
        current = std::move(smoothed);
    }
    pyr.approximation = std::move(current);
    return pyr;
}

std::vector<int> dfb_wedge_map(std::size_t rows, std::size_t cols,
                               std::size_t num_dirs) {
    if (!allowed_direction_count(num_dirs)) {
        throw Error(Error::Kind::config,
                    "direction count must be one of {2, 4, 8, 16}, got " +
                        std::to_string(num_dirs));
    }
    const long h = static_cast<long>(rows);
    const long w = static_cast<long>(cols);
    const long d = static_cast<long>(num_dirs);
    std::vector<int> map(rows * cols, 0);
    for (long u = 0; u < h; ++u) {
        for (long v = 0; v < w; ++v) {
            // DC and Nyquist row/column carry no orientation; wedge 0.
            if ((u == 0 && v == 0) || (h % 2 == 0 && u == h / 2) ||
                (w % 2 == 0 && v == w / 2)) {
                continue;
            }
            long fy = (u <= (h - 1) / 2) ? u : u - h;
            long fx = (v <= (w - 1) / 2) ? v : v - w;
            // Fold antipodal pairs onto angles in [0, pi).
            if (fy < 0 || (fy == 0 && fx < 0)) {
                fy = -fy;
                fx = -fx;
            }
            int wedge;
            if (fy == 0) {
                wedge = 0;  // theta = 0, boundary shared with wedge D-1
            } else if (fx == 0) {
                wedge = static_cast<int>(d / 2) - 1;  // theta = pi/2 boundary
            } else if (fy == fx && d % 4 == 0) {
                wedge = static_cast<int>(d / 4) - 1;  // theta = pi/4 boundary
            } else if (fy == -fx && d % 4 == 0) {
                wedge = static_cast<int>(3 * d / 4) - 1;  // theta = 3pi/4 boundary
            } else {
                // Integer lattice points cannot land on the remaining
                // (irrational-tangent) boundaries, so floor is safe.
                const double theta = std::atan2(static_cast<double>(fy),
                                                static_cast<double>(fx));
                wedge = static_cast<int>(theta * static_cast<double>(d) / M_PI);
                wedge = std::clamp(wedge, 0, static_cast<int>(d) - 1);
            }
            map[static_cast<std::size_t>(u) * cols + static_cast<std::size_t>(v)] =
                wedge;
        }
    }
    return map;
}

bool dfb_wedge_is_vertical(std::size_t wedge, std::size_t num_dirs) {
    // |center - pi/2| < pi/4 <=> |2 wedge + 1 - D| < D/2, in integers.
    const long lhs = std::labs(2 * static_cast<long>(wedge) + 1 -
                               static_cast<long>(num_dirs));
    return 2 * lhs < static_cast<long>(num_dirs);
}

std::vector<Matrix> dfb_decompose(const Matrix& detail, std::size_t num_dirs,
                                  bool critically_sampled) {
    if (!allowed_direction_count(num_dirs)) {
        throw Error(Error::Kind::config,
                    "direction count must be one of {2, 4, 8, 16}, got " +
                        std::to_string(num_dirs));
    }
    if (critically_sampled) {
        for (std::size_t wedge = 0; wedge < num_dirs; ++wedge) {
            auto [row_step, col_step] = decimation_steps(wedge, num_dirs);
            if (detail.rows % row_step != 0 || detail.cols % col_step != 0) {
                throw Error(Error::Kind::dimension,
                            "critical sampling with D=" + std::to_string(num_dirs) +
                                " needs dimensions divisible by " +
                                std::to_string(std::max(row_step, col_step)) +
                                ", got " + std::to_string(detail.rows) + "x" +
                                std::to_string(detail.cols));
            }
        }
    }
    const auto spectrum = dft2d(detail);
    const auto wedges = dfb_wedge_map(detail.rows, detail.cols, num_dirs);
    std::vector<Matrix> out;
    out.reserve(num_dirs);
    std::vector<std::complex<double>> masked(spectrum.size());
    for (std::size_t wedge = 0; wedge < num_dirs; ++wedge) {
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            masked[i] = (wedges[i] == static_cast<int>(wedge))
                            ? spectrum[i]
                            : std::complex<double>(0.0, 0.0);
        }
        Matrix filtered = idft2d_real(masked, detail.rows, detail.cols);
        if (!critically_sampled) {
            out.push_back(std::move(filtered));
            continue;
        }
        auto [row_step, col_step] = decimation_steps(wedge, num_dirs);
        Matrix dec(detail.rows / row_step, detail.cols / col_step);
        for (std::size_t r = 0; r < dec.rows; ++r) {
            for (std::size_t c = 0; c < dec.cols; ++c) {
                dec.at(r, c) = filtered.at(r * row_step, c * col_step);
            }
        }
        out.push_back(std::move(dec));
    }
    return out;
}

RctPlusDecomposition rct_plus(const GrayImage& img, const RctPlusConfig& config) {
    config.validate();
    RctPlusDecomposition decomp;
    decomp.config = config;
    RlpPyramid pyr = rlp_decompose(img, config.levels, config.sigma0);
    for (std::size_t l = 0; l < config.levels; ++l) {
        auto bands = dfb_decompose(pyr.details[l], config.directions[l],
                                   config.critically_sampled);
        for (std::size_t d = 0; d < bands.size(); ++d) {
            decomp.subbands.push_back({l + 1, d + 1, std::move(bands[d])});
        }
    }
    decomp.subbands.push_back({config.levels, 0, std::move(pyr.approximation)});
    return decomp;
}

void dump_decomposition(const RctPlusDecomposition& decomp,
                        const std::string& dir) {
    static_assert(std::endian::native == std::endian::little,
                  "dump format is little-endian");
    std::filesystem::create_directories(dir);
    for (const auto& sb : decomp.subbands) {
        const std::string name = "subband_" + std::to_string(sb.scale) + "_" +
                                 std::to_string(sb.direction) + ".bin";
        std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
        if (!out) {
            throw Error(Error::Kind::io, dir + "/" + name + ": cannot write");
        }
        out << "RCTP1 " << sb.scale << " " << sb.direction << " "
            << sb.coefficients.rows << " " << sb.coefficients.cols << "\n";
        out.write(reinterpret_cast<const char*>(sb.coefficients.data.data()),
                  static_cast<std::streamsize>(sb.coefficients.data.size() *
                                               sizeof(double)));
    }
}

}  // namespace texret
