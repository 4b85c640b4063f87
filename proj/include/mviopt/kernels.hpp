#pragma once

#include <cstddef>

namespace mviopt::kern {

// Dense kernels behind Vector/DenseMatrix arithmetic. The production entry
// points below parallelize with OpenMP above a size threshold. Reductions use
// fixed-size blocks whose partial sums are combined in block order, so results
// are bit-identical for any thread count (including 1).
//
// kern::ref holds the plain serial loops. They are the reference the unit
// tests and tools/bench_kernels compare against.

namespace ref {

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double nrm2sq(const double* a, std::size_t n);
double nrm1(const double* a, std::size_t n);
double nrminf(const double* a, std::size_t n);
// y = A x, A row-major m-by-n
void gemv(const double* a, const double* x, double* y, std::size_t m, std::size_t n);
// y = A^T x
void gemv_t(const double* a, const double* x, double* y, std::size_t m, std::size_t n);
// y += alpha * x
void axpy(double* y, double alpha, const double* x, std::size_t n);
void scal(double* x, double alpha, std::size_t n);
// out_i = |x_i|^(e-1) * x_i  (signed power, e >= 1)
void signed_pow(const double* x, double* out, double e, std::size_t n);

}  // namespace ref

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double nrm2sq(const double* a, std::size_t n);
double nrm1(const double* a, std::size_t n);
double nrminf(const double* a, std::size_t n);
void gemv(const double* a, const double* x, double* y, std::size_t m, std::size_t n);
void gemv_t(const double* a, const double* x, double* y, std::size_t m, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
void scal(double* x, double alpha, std::size_t n);
void signed_pow(const double* x, double* out, double e, std::size_t n);

}  // namespace mviopt::kern
