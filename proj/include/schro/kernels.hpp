#pragma once

// Data-parallel reductions used on every hot path: integrals against the
// vertex measure, W-inner products, cluster Gram matrices and CSR mat-vecs.
// Each kernel has a scalar reference and an AVX2/FMA variant; the active
// table is chosen once at startup from CPUID (override with SCHRO_ISA=scalar).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace schro::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a_i * b_i * w_i
    double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
    // sum_i a_i * w_i
    double (*weighted_sum)(const double* a, const double* w, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y = A x for a compressed sparse matrix with row offsets / column indices.
    void (*csr_matvec)(const std::int32_t* offsets, const std::int32_t* indices, const double* values,
                       std::size_t rows, const double* x, double* y);
};

const KernelTable& scalar_table();
// Falls back to the scalar table when the CPU lacks AVX2+FMA.
const KernelTable& avx2_table();
bool cpu_has_avx2();

// Table selected at first use.
const KernelTable& active();
std::string_view isa_name(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> a, std::span<const double> b, std::span<const double> w) {
    return active().weighted_dot(a.data(), b.data(), w.data(), a.size());
}

inline double weighted_sum(std::span<const double> a, std::span<const double> w) {
    return active().weighted_sum(a.data(), w.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
double weighted_dot_scalar(const double* a, const double* b, const double* w, std::size_t n);
double weighted_sum_scalar(const double* a, const double* w, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void csr_matvec_scalar(const std::int32_t* offsets, const std::int32_t* indices, const double* values,
                       std::size_t rows, const double* x, double* y);

double dot_avx2(const double* a, const double* b, std::size_t n);
double weighted_dot_avx2(const double* a, const double* b, const double* w, std::size_t n);
double weighted_sum_avx2(const double* a, const double* w, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void csr_matvec_avx2(const std::int32_t* offsets, const std::int32_t* indices, const double* values,
                     std::size_t rows, const double* x, double* y);
}  // namespace detail

}  // namespace schro::kernels
