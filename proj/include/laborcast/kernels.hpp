#pragma once

#include <cstddef>
#include <vector>

#include "laborcast/parallel.hpp"

namespace laborcast::kernels {

// Dense row-major kernels used by the LSTM forward/backward passes and the
// tree split scan. Each has a serial reference path and an OpenMP path that
// parallelizes over output rows only; the per-element summation order is the
// same in both, so outputs are bit-identical across modes and thread counts.

/// C(m x n) = A(m x k) * B(k x n). C is overwritten.
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, Exec mode = default_exec());

/// C(m x n) += A(m x k) * B(k x n).
void gemm_nn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode = default_exec());

/// C(m x n) += A^T * B with A stored (k x m), B stored (k x n).
void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode = default_exec());

/// C(m x n) += A(m x k) * B^T with B stored (n x k). Internally transposes B
/// once so the inner summation order matches gemm_nn.
void gemm_nt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode = default_exec());

/// out(n x m) = transpose of in(m x n).
void transpose(const double* in, double* out, std::size_t m, std::size_t n);

} // namespace laborcast::kernels
