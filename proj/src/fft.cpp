#include "texret/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace texret {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    fftw_complex* ptr;
    explicit FftwBuffer(std::size_t n)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {}
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

std::vector<std::complex<double>> run_dft(const std::complex<double>* in,
                                          std::size_t rows, std::size_t cols,
                                          int sign) {
    const std::size_t n = rows * cols;
    FftwBuffer buf_in(n), buf_out(n);
    for (std::size_t i = 0; i < n; ++i) {
        buf_in.ptr[i][0] = in[i].real();
        buf_in.ptr[i][1] = in[i].imag();
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                                buf_in.ptr, buf_out.ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    std::vector<std::complex<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {buf_out.ptr[i][0], buf_out.ptr[i][1]};
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> dft2d(const Matrix& in) {
    std::vector<std::complex<double>> tmp(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        tmp[i] = {in.data[i], 0.0};
    }
    return run_dft(tmp.data(), in.rows, in.cols, FFTW_FORWARD);
}

Matrix idft2d_real(const std::vector<std::complex<double>>& freq,
                   std::size_t rows, std::size_t cols) {
    auto full = run_dft(freq.data(), rows, cols, FFTW_BACKWARD);
    Matrix out(rows, cols);
    const double scale = 1.0 / static_cast<double>(rows * cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data[i] = full[i].real() * scale;
    }
    return out;
}

}  // namespace texret
