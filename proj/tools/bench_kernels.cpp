#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "laborcast/kernels.hpp"
#include "laborcast/parallel.hpp"
#include "laborcast/rng.hpp"

using namespace laborcast;

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Case {
    const char* name;
    std::size_t m, k, n;
};

double bench(const Case& c, Exec mode, int reps, const std::vector<double>& a,
             const std::vector<double>& b, std::vector<double>& out) {
    kernels::gemm_nn(a.data(), b.data(), out.data(), c.m, c.k, c.n, mode);  // warm up
    const double t0 = now_s();
    for (int r = 0; r < reps; ++r)
        kernels::gemm_nn(a.data(), b.data(), out.data(), c.m, c.k, c.n, mode);
    return (now_s() - t0) / reps;
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 5;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) reps = std::atoi(argv[++i]);

    // Shapes drawn from the network the toolkit trains: batch x input gemms
    // against fused four-gate weight blocks, plus one square case for scale.
    const Case cases[] = {
        {"batch32 x 21 -> 4*256", 32, 21, 1024},
        {"batch32 x 256 -> 4*256", 32, 256, 1024},
        {"batch32 x 256 -> 4*64", 32, 256, 256},
        {"batch32 x 64 -> 4*32", 32, 64, 128},
        {"square 384", 384, 384, 384},
    };

    std::printf("%-26s %6s %12s %12s %9s %10s\n", "case", "reps", "serial(ms)", "openmp(ms)",
                "speedup", "bit-equal");
    for (const Case& c : cases) {
        Rng rng(42);
        std::vector<double> a(c.m * c.k);
        std::vector<double> b(c.k * c.n);
        for (auto& v : a) v = rng.uniform(-1.0, 1.0);
        for (auto& v : b) v = rng.uniform(-1.0, 1.0);
        std::vector<double> serial_out(c.m * c.n);
        std::vector<double> parallel_out(c.m * c.n);

        const double ts = bench(c, Exec::serial, reps, a, b, serial_out);
        const double tp = bench(c, Exec::parallel, reps, a, b, parallel_out);
        const bool same =
            std::memcmp(serial_out.data(), parallel_out.data(), sizeof(double) * c.m * c.n) == 0;
        std::printf("%-26s %6d %12.3f %12.3f %8.2fx %10s\n", c.name, reps, ts * 1e3, tp * 1e3,
                    ts / tp, same ? "yes" : "NO");
        if (!same) return 1;
    }
    return 0;
}
