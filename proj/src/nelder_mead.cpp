#include "laborcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>

#include "laborcast/errors.hpp"

namespace laborcast {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& x0, const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw ArgumentError("nelder_mead needs at least one dimension");

    std::vector<std::vector<double>> simplex;
    simplex.reserve(n + 1);
    simplex.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = x0;
        v[i] += options.initial_step;
        simplex.push_back(std::move(v));
    }
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = objective(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    auto sort_order = [&] {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
    };

    NelderMeadResult result;
    std::size_t iter = 0;
    for (; iter < options.max_iter; ++iter) {
        sort_order();
        const double spread = fvals[order[n]] - fvals[order[0]];
        // A flat spread alone is not convergence: a simplex straddling the
        // minimum symmetrically has equal objective values at full width.
        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diameter = std::max(
                    diameter, std::fabs(simplex[order[i]][j] - simplex[order[0]][j]));
        if (spread <= options.tolerance && diameter <= options.x_tolerance) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[i]][j];
        for (double& c : centroid) c /= static_cast<double>(n);

        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];
        const std::size_t best = order[0];

        std::vector<double> reflected(n);
        for (std::size_t j = 0; j < n; ++j)
            reflected[j] = centroid[j] + options.reflection * (centroid[j] - simplex[worst][j]);
        const double f_reflected = objective(reflected);

        if (f_reflected < fvals[best]) {
            std::vector<double> expanded(n);
            for (std::size_t j = 0; j < n; ++j)
                expanded[j] = centroid[j] + options.expansion * (reflected[j] - centroid[j]);
            const double f_expanded = objective(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = std::move(expanded);
                fvals[worst] = f_expanded;
            } else {
                simplex[worst] = std::move(reflected);
                fvals[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < fvals[second_worst]) {
            simplex[worst] = std::move(reflected);
            fvals[worst] = f_reflected;
            continue;
        }

        std::vector<double> contracted(n);
        if (f_reflected < fvals[worst]) {
            for (std::size_t j = 0; j < n; ++j)
                contracted[j] = centroid[j] + options.contraction * (reflected[j] - centroid[j]);
            const double f_contracted = objective(contracted);
            if (f_contracted <= f_reflected) {
                simplex[worst] = std::move(contracted);
                fvals[worst] = f_contracted;
                continue;
            }
        } else {
            for (std::size_t j = 0; j < n; ++j)
                contracted[j] =
                    centroid[j] + options.contraction * (simplex[worst][j] - centroid[j]);
            const double f_contracted = objective(contracted);
            if (f_contracted < fvals[worst]) {
                simplex[worst] = std::move(contracted);
                fvals[worst] = f_contracted;
                continue;
            }
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] =
                    simplex[best][j] + options.shrink * (simplex[i][j] - simplex[best][j]);
            fvals[i] = objective(simplex[i]);
        }
    }

    sort_order();
    result.x = simplex[order[0]];
    result.fx = fvals[order[0]];
    result.iterations = iter;
    return result;
}

}  // namespace laborcast
