#include "laborcast/parallel.hpp"

#include <omp.h>

namespace laborcast {

namespace {
Exec g_exec = Exec::parallel;
int g_threads = 0;
} // namespace

Exec default_exec() { return g_exec; }
void set_default_exec(Exec mode) { g_exec = mode; }

int thread_cap() { return g_threads; }
void set_thread_cap(int n) { g_threads = n < 0 ? 0 : n; }

namespace detail {

void run_indexed(std::size_t n, void* ctx, void (*fn)(void*, std::size_t), Exec mode,
                 bool dynamic_schedule) {
    if (mode == Exec::serial || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(ctx, i);
        return;
    }
    const int cap = g_threads;
    if (dynamic_schedule) {
        if (cap > 0) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(cap)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(ctx, static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(dynamic, 1)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(ctx, static_cast<std::size_t>(i));
        }
    } else {
        if (cap > 0) {
#pragma omp parallel for schedule(static) num_threads(cap)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(ctx, static_cast<std::size_t>(i));
        } else {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                fn(ctx, static_cast<std::size_t>(i));
        }
    }
}

} // namespace detail
} // namespace laborcast
