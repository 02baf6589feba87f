#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace texret {

// Error taxonomy shared by all modules. The CLI maps every Error to exit
// code 2 (bad input / bad configuration); anything else is a runtime
// failure (exit 1).
class Error : public std::runtime_error {
public:
    enum class Kind {
        io,            // unreadable input file
        format,        // recognized file, unusable contents
        config,        // invalid parameter combination
        dimension,     // shape constraint violated
        manifest,      // dataset manifest problem
        incompatible,  // feature vectors with mismatched method/layout
        metric,        // metric not applicable to the feature method
        measure,       // undefined statistical measure (e.g. 0 predictions)
    };

    Error(Kind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Dense row-major matrix of doubles. Grayscale images are matrices whose
// values are intensities in [0, 255] right after loading; downstream
// stages keep full double precision.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return rows * cols; }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
};

using GrayImage = Matrix;

}  // namespace texret
