#include "schro/kernels.hpp"

namespace schro::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

double weighted_dot_scalar(const double* a, const double* b, const double* w, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i] * w[i];
    return sum;
}

double weighted_sum_scalar(const double* a, const double* w, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * w[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void csr_matvec_scalar(const std::int32_t* offsets, const std::int32_t* indices, const double* values,
                       std::size_t rows, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (std::int32_t p = offsets[r]; p < offsets[r + 1]; ++p) sum += values[p] * x[indices[p]];
        y[r] = sum;
    }
}

}  // namespace schro::kernels::detail
