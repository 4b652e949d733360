#pragma once

#include <cstddef>

namespace laborcast {

/// Execution mode for the data-parallel kernels. Every kernel has one code
/// path for the arithmetic; `parallel` only distributes independent output
/// rows (or jobs) across OpenMP threads, so serial and parallel runs produce
/// bit-identical results.
enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec mode);

/// Thread cap for parallel regions started by this library. 0 = OpenMP default.
int thread_cap();
void set_thread_cap(int n);

namespace detail {
void run_indexed(std::size_t n, void* ctx, void (*fn)(void*, std::size_t), Exec mode,
                 bool dynamic_schedule);
}

/// Runs fn(0..n-1). In parallel mode, iterations are distributed statically;
/// fn must not throw and iterations must write to disjoint state.
template <typename F>
void parallel_for(std::size_t n, F&& fn, Exec mode = default_exec()) {
    detail::run_indexed(
        n, &fn, [](void* ctx, std::size_t i) { (*static_cast<F*>(ctx))(i); }, mode, false);
}

/// Same contract as parallel_for but with dynamic scheduling, for uneven jobs.
template <typename F>
void parallel_jobs(std::size_t n, F&& fn, Exec mode = default_exec()) {
    detail::run_indexed(
        n, &fn, [](void* ctx, std::size_t i) { (*static_cast<F*>(ctx))(i); }, mode, true);
}

} // namespace laborcast
