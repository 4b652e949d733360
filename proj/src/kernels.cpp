#include "laborcast/kernels.hpp"

#include <cstring>

namespace laborcast::kernels {

namespace {

inline void row_nn(const double* a, const double* b, double* c_row, std::size_t i,
                   std::size_t k, std::size_t n) {
    const double* a_row = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double av = a_row[kk];
        if (av == 0.0) continue;
        const double* b_row = b + kk * n;
        for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
    }
}

} // namespace

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n, Exec mode) {
    std::memset(c, 0, m * n * sizeof(double));
    gemm_nn_acc(a, b, c, m, k, n, mode);
}

void gemm_nn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode) {
    parallel_for(
        m, [&](std::size_t i) { row_nn(a, b, c + i * n, i, k, n); }, mode);
}

void gemm_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode) {
    // c[i][j] += sum_r a[r][i] * b[r][j]; row i of C depends on column i of A.
    parallel_for(
        m,
        [&](std::size_t i) {
            double* c_row = c + i * n;
            for (std::size_t r = 0; r < k; ++r) {
                const double av = a[r * m + i];
                if (av == 0.0) continue;
                const double* b_row = b + r * n;
                for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
            }
        },
        mode);
}

void gemm_nt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                 std::size_t n, Exec mode) {
    std::vector<double> bt(k * n);
    transpose(b, bt.data(), n, k);
    gemm_nn_acc(a, bt.data(), c, m, k, n, mode);
}

void transpose(const double* in, double* out, std::size_t m, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = in[i * n + j];
}

} // namespace laborcast::kernels
