#include <array>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "laborcast/kernels.hpp"
#include "laborcast/rng.hpp"

using namespace laborcast;
using kernels::gemm_nn;
using kernels::gemm_nn_acc;
using kernels::gemm_nt_acc;
using kernels::gemm_tn_acc;
using kernels::transpose;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

// Same per-element accumulation order as the kernels: ascending p.
std::vector<double> naive_nn(const std::vector<double>& a, const std::vector<double>& b,
                             std::size_t m, std::size_t k, std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t p = 0; p < k; ++p) c[i * n + j] += a[i * k + p] * b[p * n + j];
    return c;
}

bool bitwise_equal(const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() &&
           std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("gemm_nn hand oracle") {
    const std::vector<double> a = {1, 2, 3, 4};
    const std::vector<double> b = {5, 6, 7, 8};
    std::vector<double> c(4, -1.0);
    gemm_nn(a.data(), b.data(), c.data(), 2, 2, 2, Exec::serial);
    CHECK(c == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("gemm_nn_acc accumulates into c") {
    const std::vector<double> a = {1, 2, 3, 4};
    const std::vector<double> b = {5, 6, 7, 8};
    std::vector<double> c = {100, 100, 100, 100};
    gemm_nn_acc(a.data(), b.data(), c.data(), 2, 2, 2, Exec::serial);
    CHECK(c == std::vector<double>{119, 122, 143, 150});
}

TEST_CASE("gemm_tn_acc matches explicit transpose") {
    Rng rng(7);
    const std::size_t m = 5, k = 4, n = 3;
    const auto a_t = random_vec(k * m, rng);  // A stored k x m
    const auto b = random_vec(k * n, rng);
    std::vector<double> a(m * k);
    transpose(a_t.data(), a.data(), k, m);
    std::vector<double> want(m * n, 0.0), got(m * n, 0.0);
    gemm_nn_acc(a.data(), b.data(), want.data(), m, k, n, Exec::serial);
    gemm_tn_acc(a_t.data(), b.data(), got.data(), m, k, n, Exec::serial);
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("gemm_nt_acc matches gemm against pre-transposed B bitwise") {
    Rng rng(8);
    const std::size_t m = 4, k = 6, n = 5;
    const auto a = random_vec(m * k, rng);
    const auto b_t = random_vec(n * k, rng);  // B stored n x k
    std::vector<double> b(k * n);
    transpose(b_t.data(), b.data(), n, k);
    std::vector<double> want(m * n, 0.0), got(m * n, 0.0);
    gemm_nn_acc(a.data(), b.data(), want.data(), m, k, n, Exec::serial);
    gemm_nt_acc(a.data(), b_t.data(), got.data(), m, k, n, Exec::serial);
    CHECK(bitwise_equal(want, got));
}

TEST_CASE("transpose round trip") {
    Rng rng(9);
    const std::size_t m = 7, n = 3;
    const auto a = random_vec(m * n, rng);
    std::vector<double> t(n * m), back(m * n);
    transpose(a.data(), t.data(), m, n);
    transpose(t.data(), back.data(), n, m);
    CHECK(bitwise_equal(a, back));
    CHECK(t[0 * m + 2] == a[2 * n + 0]);
}

TEST_CASE("kernels match a naive reference in the same summation order") {
    Rng rng(10);
    for (const auto [m, k, n] : {std::array<std::size_t, 3>{1, 1, 1},
                                 std::array<std::size_t, 3>{3, 17, 2},
                                 std::array<std::size_t, 3>{16, 8, 24}}) {
        auto a = random_vec(m * k, rng);
        const auto b = random_vec(k * n, rng);
        a[0] = 0.0;  // exercise the zero-skip path
        if (a.size() > 3) a[3] = 0.0;
        std::vector<double> c(m * n);
        gemm_nn(a.data(), b.data(), c.data(), m, k, n, Exec::serial);
        CHECK(bitwise_equal(c, naive_nn(a, b, m, k, n)));
    }
}

TEST_CASE("serial and parallel execution are bit-identical") {
    Rng rng(11);
    for (const auto [m, k, n] :
         {std::array<std::size_t, 3>{1, 5, 9}, std::array<std::size_t, 3>{33, 21, 64},
          std::array<std::size_t, 3>{64, 64, 64}}) {
        const auto a = random_vec(m * k, rng);
        const auto b = random_vec(k * n, rng);
        const auto a_t = random_vec(k * m, rng);
        const auto b_t = random_vec(n * k, rng);

        std::vector<double> s(m * n), p(m * n);
        gemm_nn(a.data(), b.data(), s.data(), m, k, n, Exec::serial);
        gemm_nn(a.data(), b.data(), p.data(), m, k, n, Exec::parallel);
        CHECK(bitwise_equal(s, p));

        std::vector<double> s2(m * n, 0.5), p2(m * n, 0.5);
        gemm_nn_acc(a.data(), b.data(), s2.data(), m, k, n, Exec::serial);
        gemm_nn_acc(a.data(), b.data(), p2.data(), m, k, n, Exec::parallel);
        CHECK(bitwise_equal(s2, p2));

        std::vector<double> s3(m * n, 0.0), p3(m * n, 0.0);
        gemm_tn_acc(a_t.data(), b.data(), s3.data(), m, k, n, Exec::serial);
        gemm_tn_acc(a_t.data(), b.data(), p3.data(), m, k, n, Exec::parallel);
        CHECK(bitwise_equal(s3, p3));

        std::vector<double> s4(m * n, 0.0), p4(m * n, 0.0);
        gemm_nt_acc(a.data(), b_t.data(), s4.data(), m, k, n, Exec::serial);
        gemm_nt_acc(a.data(), b_t.data(), p4.data(), m, k, n, Exec::parallel);
        CHECK(bitwise_equal(s4, p4));
    }
}
