#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace laborcast {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    double initial_step = 0.1;
    std::size_t max_iter = 2000;
    double tolerance = 1e-8;    // objective spread across the simplex
    double x_tolerance = 1e-8;  // simplex diameter, infinity norm
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// Derivative-free simplex minimization. Deterministic: the initial simplex is
// x0 plus one axis step per dimension, and ordering ties keep insertion order.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& x0,
                             const NelderMeadOptions& options = {});

}  // namespace laborcast
