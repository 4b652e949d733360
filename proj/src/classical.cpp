#include "laborcast/classical.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "laborcast/errors.hpp"

namespace laborcast {

DifferencedSeries difference(const std::vector<double>& x, int d, int D, int s) {
    if (d < 0 || D < 0) throw ArgumentError("differencing orders must be non-negative");
    if (D > 0 && s < 2) throw ArgumentError("seasonal differencing needs season length >= 2");
    const std::size_t need = static_cast<std::size_t>(d) + static_cast<std::size_t>(D) *
                                                              static_cast<std::size_t>(s);
    if (x.size() <= need)
        throw InsufficientDataError("series of length " + std::to_string(x.size()) +
                                    " is too short for d=" + std::to_string(d) +
                                    ", D=" + std::to_string(D) + ", s=" + std::to_string(s));

    DifferencedSeries out;
    out.state.d = d;
    out.state.D = D;
    out.state.s = s;
    out.values = x;
    for (int round = 0; round < D; ++round) {
        std::vector<double> prefix(out.values.begin(), out.values.begin() + s);
        out.state.seasonal_tails.emplace_back(out.values.end() - s, out.values.end());
        std::vector<double> next(out.values.size() - static_cast<std::size_t>(s));
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = out.values[i + static_cast<std::size_t>(s)] - out.values[i];
        out.state.seasonal_prefixes.push_back(std::move(prefix));
        out.values = std::move(next);
    }
    for (int round = 0; round < d; ++round) {
        out.state.ordinary_prefixes.push_back(out.values.front());
        out.state.ordinary_tails.push_back(out.values.back());
        std::vector<double> next(out.values.size() - 1);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = out.values[i + 1] - out.values[i];
        out.values = std::move(next);
    }
    return out;
}

std::vector<double> undifference(const std::vector<double>& z, const DifferenceState& state) {
    std::vector<double> cur = z;
    for (std::size_t round = state.ordinary_prefixes.size(); round-- > 0;) {
        std::vector<double> next(cur.size() + 1);
        next[0] = state.ordinary_prefixes[round];
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = next[i] + cur[i];
        cur = std::move(next);
    }
    const auto s = static_cast<std::size_t>(state.s);
    for (std::size_t round = state.seasonal_prefixes.size(); round-- > 0;) {
        const auto& prefix = state.seasonal_prefixes[round];
        std::vector<double> next(cur.size() + s);
        for (std::size_t i = 0; i < s; ++i) next[i] = prefix[i];
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + s] = next[i] + cur[i];
        cur = std::move(next);
    }
    return cur;
}

namespace {

// Solves A b = y for symmetric positive semi-definite normal equations by
// Gaussian elimination with partial pivoting. A consistent zero pivot row
// marks a free coefficient, which is set to 0 (any exact least-squares
// solution yields the same fitted values).
std::vector<double> solve_normal_equations(std::vector<std::vector<double>> a,
                                           std::vector<double> y) {
    const std::size_t k = y.size();
    double scale = 0.0;
    for (const auto& row : a)
        for (double v : row) scale = std::max(scale, std::abs(v));
    for (double v : y) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    const double tol = 1e-12 * scale;

    std::vector<std::size_t> pivot_col(k, k);
    std::size_t row = 0;
    for (std::size_t col = 0; col < k && row < k; ++col) {
        std::size_t best = row;
        for (std::size_t r = row + 1; r < k; ++r)
            if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
        if (std::abs(a[best][col]) <= tol) continue;
        std::swap(a[row], a[best]);
        std::swap(y[row], y[best]);
        for (std::size_t r = row + 1; r < k; ++r) {
            const double f = a[r][col] / a[row][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < k; ++c) a[r][c] -= f * a[row][c];
            y[r] -= f * y[row];
        }
        pivot_col[row] = col;
        ++row;
    }
    for (std::size_t r = row; r < k; ++r)
        if (std::abs(y[r]) > tol * 1e3)
            throw SingularMatrixError("normal equations are rank-deficient and inconsistent");

    std::vector<double> b(k, 0.0);
    for (std::size_t r = row; r-- > 0;) {
        const std::size_t col = pivot_col[r];
        double acc = y[r];
        for (std::size_t c = col + 1; c < k; ++c) acc -= a[r][c] * b[c];
        b[col] = acc / a[r][col];
    }
    return b;
}

}  // namespace

ARModel fit_ar(const std::vector<double>& x, int p, bool intercept) {
    if (p < 1) throw ArgumentError("AR order must be >= 1");
    const auto up = static_cast<std::size_t>(p);
    if (x.size() < 2 * up + 2)
        throw InsufficientDataError("AR(" + std::to_string(p) + ") needs at least " +
                                    std::to_string(2 * up + 2) + " observations, got " +
                                    std::to_string(x.size()));

    const std::size_t k = up + (intercept ? 1 : 0);
    const std::size_t n_obs = x.size() - up;
    std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    std::vector<double> reg(k);
    for (std::size_t t = up; t < x.size(); ++t) {
        std::size_t idx = 0;
        if (intercept) reg[idx++] = 1.0;
        for (std::size_t j = 1; j <= up; ++j) reg[idx++] = x[t - j];
        for (std::size_t i = 0; i < k; ++i) {
            xty[i] += reg[i] * x[t];
            for (std::size_t j = i; j < k; ++j) xtx[i][j] += reg[i] * reg[j];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];

    const std::vector<double> beta = solve_normal_equations(xtx, xty);

    ARModel model;
    model.p = p;
    model.intercept = intercept ? beta[0] : 0.0;
    model.phi.assign(beta.begin() + (intercept ? 1 : 0), beta.end());

    double sse = 0.0;
    for (std::size_t t = up; t < x.size(); ++t) {
        double pred = model.intercept;
        for (std::size_t j = 1; j <= up; ++j) pred += model.phi[j - 1] * x[t - j];
        const double e = x[t] - pred;
        sse += e * e;
    }
    model.sigma2 = n_obs > k ? sse / static_cast<double>(n_obs - k) : 0.0;
    model.history.assign(x.end() - static_cast<std::ptrdiff_t>(up), x.end());
    return model;
}

std::vector<double> ARModel::forecast(std::size_t h) const {
    if (h < 1) throw ArgumentError("forecast horizon must be >= 1");
    if (history.size() < static_cast<std::size_t>(p))
        throw DimensionError("AR model state is missing history");
    std::vector<double> ext = history;
    ext.reserve(ext.size() + h);
    for (std::size_t m = 0; m < h; ++m) {
        double pred = intercept;
        for (std::size_t j = 1; j <= static_cast<std::size_t>(p); ++j)
            pred += phi[j - 1] * ext[ext.size() - j];
        ext.push_back(pred);
    }
    return {ext.end() - static_cast<std::ptrdiff_t>(h), ext.end()};
}

namespace {

// Coefficients of the product of 1 - sum(a_i L^i) and 1 - sum(b_j L^(j*s)),
// returned as f with f[k] such that the product is 1 - sum(f[k] L^(k+1)) when
// negate is true, or of (1 + ...)(1 + ...) as 1 + sum(f[k] L^(k+1)) otherwise.
std::vector<double> expand_poly(const std::vector<double>& nonseasonal,
                                const std::vector<double>& seasonal, int s, bool negate) {
    std::vector<double> a{1.0};
    for (double v : nonseasonal) a.push_back(negate ? -v : v);
    std::vector<double> b{1.0};
    if (!seasonal.empty()) {
        b.resize(seasonal.size() * static_cast<std::size_t>(s) + 1, 0.0);
        for (std::size_t j = 0; j < seasonal.size(); ++j)
            b[(j + 1) * static_cast<std::size_t>(s)] = negate ? -seasonal[j] : seasonal[j];
    }
    std::vector<double> prod(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] += a[i] * b[j];
    std::vector<double> f(prod.begin() + 1, prod.end());
    if (negate)
        for (double& v : f) v = -v;
    return f;
}

struct CssLayout {
    bool use_constant = false;
    int p = 0, q = 0, P = 0, Q = 0, s = 0;

    std::size_t n_params() const {
        return (use_constant ? 1u : 0u) + static_cast<std::size_t>(p + q + P + Q);
    }
};

struct CssExpanded {
    double c = 0.0;
    std::vector<double> arf;  // arf[k-1] multiplies z_{t-k}
    std::vector<double> maf;  // maf[k-1] multiplies eps_{t-k}
};

void split_params(const CssLayout& lay, const std::vector<double>& params, double& c,
                  std::vector<double>& phi, std::vector<double>& theta,
                  std::vector<double>& sphi, std::vector<double>& stheta) {
    std::size_t idx = 0;
    c = lay.use_constant ? params[idx++] : 0.0;
    phi.assign(params.begin() + static_cast<std::ptrdiff_t>(idx),
               params.begin() + static_cast<std::ptrdiff_t>(idx + lay.p));
    idx += static_cast<std::size_t>(lay.p);
    theta.assign(params.begin() + static_cast<std::ptrdiff_t>(idx),
                 params.begin() + static_cast<std::ptrdiff_t>(idx + lay.q));
    idx += static_cast<std::size_t>(lay.q);
    sphi.assign(params.begin() + static_cast<std::ptrdiff_t>(idx),
                params.begin() + static_cast<std::ptrdiff_t>(idx + lay.P));
    idx += static_cast<std::size_t>(lay.P);
    stheta.assign(params.begin() + static_cast<std::ptrdiff_t>(idx),
                  params.begin() + static_cast<std::ptrdiff_t>(idx + lay.Q));
}

CssExpanded expand_params(const CssLayout& lay, const std::vector<double>& params) {
    double c;
    std::vector<double> phi, theta, sphi, stheta;
    split_params(lay, params, c, phi, theta, sphi, stheta);
    CssExpanded e;
    e.c = c;
    e.arf = expand_poly(phi, sphi, lay.s, true);
    e.maf = expand_poly(theta, stheta, lay.s, false);
    return e;
}

// One-step CSS residuals with zero pre-sample shocks; eps_t is defined for
// t >= |arf| and earlier entries stay 0.
double css_objective(const std::vector<double>& z, const CssExpanded& e,
                     std::vector<double>* residuals_out) {
    const std::size_t n = z.size();
    const std::size_t pf = e.arf.size();
    const std::size_t qf = e.maf.size();
    std::vector<double> eps(n, 0.0);
    double obj = 0.0;
    for (std::size_t t = pf; t < n; ++t) {
        double pred = e.c;
        for (std::size_t k = 1; k <= pf; ++k) pred += e.arf[k - 1] * z[t - k];
        const std::size_t mq = std::min(qf, t);
        for (std::size_t k = 1; k <= mq; ++k) pred += e.maf[k - 1] * eps[t - k];
        const double err = z[t] - pred;
        eps[t] = err;
        obj += err * err;
    }
    if (residuals_out) *residuals_out = std::move(eps);
    return obj;
}

std::vector<double> warm_start(const CssLayout& lay, const std::vector<double>& z) {
    std::vector<double> params(lay.n_params(), 0.0);
    double c0 = 0.0;
    std::vector<double> phi0(static_cast<std::size_t>(lay.p), 0.0);
    if (lay.p > 0 && z.size() >= 2 * static_cast<std::size_t>(lay.p) + 2) {
        try {
            const ARModel warm = fit_ar(z, lay.p, lay.use_constant);
            phi0 = warm.phi;
            c0 = warm.intercept;
        } catch (const SingularMatrixError&) {
        }
    } else if (lay.use_constant && !z.empty()) {
        c0 = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    }
    std::size_t idx = 0;
    if (lay.use_constant) params[idx++] = c0;
    for (int i = 0; i < lay.p; ++i) params[idx++] = phi0[static_cast<std::size_t>(i)];
    return params;
}

struct CssFit {
    std::vector<double> params;
    std::vector<double> residuals;
    double sigma2 = 0.0;
    std::size_t iterations = 0;
};

CssFit fit_css(const std::vector<double>& z, const CssLayout& lay,
               const NelderMeadOptions& optimizer) {
    const std::size_t k = lay.n_params();
    CssFit fit;
    if (k == 0) {
        const CssExpanded e = expand_params(lay, {});
        const double obj = css_objective(z, e, &fit.residuals);
        const std::size_t pf = e.arf.size();
        fit.sigma2 = z.size() > pf ? obj / static_cast<double>(z.size() - pf) : 0.0;
        return fit;
    }

    auto objective = [&](const std::vector<double>& params) {
        const double obj = css_objective(z, expand_params(lay, params), nullptr);
        return std::isfinite(obj) ? obj : 1e300;
    };

    const std::vector<double> start = warm_start(lay, z);
    const double f_start = objective(start);
    const NelderMeadResult rs = nelder_mead(objective, start, optimizer);
    if (!rs.converged)
        throw ConvergenceError("CSS optimizer did not converge within " +
                                   std::to_string(optimizer.max_iter) + " iterations",
                               rs.x);

    fit.params = rs.fx <= f_start ? rs.x : start;
    fit.iterations = rs.iterations;
    const CssExpanded e = expand_params(lay, fit.params);
    const double obj = css_objective(z, e, &fit.residuals);
    const std::size_t pf = e.arf.size();
    fit.sigma2 = z.size() > pf ? obj / static_cast<double>(z.size() - pf) : 0.0;
    return fit;
}

void root_warnings(const std::vector<double>& arf, const std::vector<double>& maf,
                   std::vector<std::string>& warnings) {
    auto describe = [](const char* which, double modulus) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s polynomial has a root inside the unit circle (modulus %.4f)",
                      which, modulus);
        return std::string(buf);
    };
    std::vector<double> ar_coeffs(arf);
    for (double& v : ar_coeffs) v = -v;  // 1 - sum arf L^k written as 1 + sum coeffs
    for (double m : polynomial_root_moduli(ar_coeffs))
        if (m < 1.0 - 1e-9) {
            warnings.push_back(describe("AR", m));
            break;
        }
    for (double m : polynomial_root_moduli(maf))
        if (m < 1.0 - 1e-9) {
            warnings.push_back(describe("MA", m));
            break;
        }
}

// Integrates future differenced values back to the original scale using the
// stage tails, so in-sample observations are never recomputed and a pure
// random walk forecasts the last observed value bit for bit.
std::vector<double> extend_undifference(std::vector<double> future, const DifferenceState& st) {
    for (std::size_t round = st.ordinary_tails.size(); round-- > 0;) {
        double prev = st.ordinary_tails[round];
        for (double& v : future) {
            v += prev;
            prev = v;
        }
    }
    const auto s = static_cast<std::size_t>(st.s);
    for (std::size_t round = st.seasonal_tails.size(); round-- > 0;) {
        const auto& tail = st.seasonal_tails[round];
        for (std::size_t k = 0; k < future.size(); ++k)
            future[k] += k < s ? tail[k] : future[k - s];
    }
    return future;
}

std::vector<double> css_forecast(const std::vector<double>& z,
                                 const std::vector<double>& residuals, const CssExpanded& e,
                                 const DifferenceState& recon, std::size_t h) {
    const std::size_t n = z.size();
    const std::size_t pf = e.arf.size();
    const std::size_t qf = e.maf.size();
    std::vector<double> zx = z;
    zx.reserve(n + h);
    std::vector<double> ex = residuals;
    ex.resize(n + h, 0.0);
    for (std::size_t t = n; t < n + h; ++t) {
        double pred = e.c;
        const std::size_t mp = std::min(pf, t);
        for (std::size_t k = 1; k <= mp; ++k) pred += e.arf[k - 1] * zx[t - k];
        const std::size_t mq = std::min(qf, t);
        for (std::size_t k = 1; k <= mq; ++k) pred += e.maf[k - 1] * ex[t - k];
        zx.push_back(pred);
    }
    return extend_undifference({zx.end() - static_cast<std::ptrdiff_t>(h), zx.end()}, recon);
}

}  // namespace

ARIMAModel fit_arima(const std::vector<double>& x, int p, int d, int q,
                     const NelderMeadOptions& optimizer) {
    if (p < 0 || d < 0 || q < 0) throw ArgumentError("ARIMA orders must be non-negative");
    DifferencedSeries dz = difference(x, d, 0, 0);
    const std::size_t need = 2 * static_cast<std::size_t>(p + q) + 4;
    if (dz.values.size() < need)
        throw InsufficientDataError("ARIMA(" + std::to_string(p) + "," + std::to_string(d) +
                                    "," + std::to_string(q) + ") needs a differenced length of " +
                                    std::to_string(need) + ", got " +
                                    std::to_string(dz.values.size()));

    CssLayout lay;
    lay.use_constant = d == 0;
    lay.p = p;
    lay.q = q;
    const CssFit fit = fit_css(dz.values, lay, optimizer);

    ARIMAModel model;
    model.p = p;
    model.d = d;
    model.q = q;
    double c;
    std::vector<double> sphi, stheta;
    split_params(lay, fit.params, c, model.ar, model.ma, sphi, stheta);
    model.intercept = c;
    model.sigma2 = fit.sigma2;
    model.z = std::move(dz.values);
    model.residuals = fit.residuals;
    model.recon = std::move(dz.state);
    model.optimizer_iterations = fit.iterations;
    root_warnings(expand_poly(model.ar, {}, 0, true), expand_poly(model.ma, {}, 0, false),
                  model.warnings);
    return model;
}

std::vector<double> ARIMAModel::forecast(std::size_t h) const {
    if (h < 1) throw ArgumentError("forecast horizon must be >= 1");
    CssExpanded e;
    e.c = intercept;
    e.arf = expand_poly(ar, {}, 0, true);
    e.maf = expand_poly(ma, {}, 0, false);
    return css_forecast(z, residuals, e, recon, h);
}

SARIMAModel fit_sarima(const std::vector<double>& x, std::array<int, 3> order,
                       std::array<int, 4> seasonal_order, const NelderMeadOptions& optimizer) {
    const auto [p, d, q] = order;
    const auto [P, D, Q] = std::array<int, 3>{seasonal_order[0], seasonal_order[1],
                                              seasonal_order[2]};
    const int s = seasonal_order[3];
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0)
        throw ArgumentError("SARIMA orders must be non-negative");
    if ((P > 0 || D > 0 || Q > 0) && s < 2)
        throw ArgumentError("seasonal orders require season length >= 2");

    const std::size_t need = static_cast<std::size_t>(d) +
                             static_cast<std::size_t>(D) * static_cast<std::size_t>(s) +
                             static_cast<std::size_t>(std::max(p + P * s, q + Q * s)) + 4;
    if (x.size() <= need)
        throw InsufficientDataError("SARIMA needs more than " + std::to_string(need) +
                                    " observations, got " + std::to_string(x.size()));

    DifferencedSeries dz = difference(x, d, D, s);

    CssLayout lay;
    lay.use_constant = d == 0 && D == 0;
    lay.p = p;
    lay.q = q;
    lay.P = P;
    lay.Q = Q;
    lay.s = s;
    const CssFit fit = fit_css(dz.values, lay, optimizer);

    SARIMAModel model;
    model.p = p;
    model.d = d;
    model.q = q;
    model.P = P;
    model.D = D;
    model.Q = Q;
    model.s = s;
    double c;
    split_params(lay, fit.params, c, model.ar, model.ma, model.sar, model.sma);
    model.intercept = c;
    model.sigma2 = fit.sigma2;
    model.z = std::move(dz.values);
    model.residuals = fit.residuals;
    model.recon = std::move(dz.state);
    model.optimizer_iterations = fit.iterations;
    root_warnings(expand_poly(model.ar, model.sar, s, true),
                  expand_poly(model.ma, model.sma, s, false), model.warnings);
    return model;
}

std::vector<double> SARIMAModel::forecast(std::size_t h) const {
    if (h < 1) throw ArgumentError("forecast horizon must be >= 1");
    CssExpanded e;
    e.c = intercept;
    e.arf = expand_poly(ar, sar, s, true);
    e.maf = expand_poly(ma, sma, s, false);
    return css_forecast(z, residuals, e, recon, h);
}

HWState hw_step(const HWState& state, double x, double alpha, double beta, double gamma) {
    if (state.seasonal.empty()) throw ArgumentError("Holt-Winters state has no seasonal terms");
    const double s_old = state.seasonal[state.phase];
    HWState out = state;
    out.level = alpha * (x - s_old) + (1.0 - alpha) * (state.level + state.trend);
    out.trend = beta * (out.level - state.level) + (1.0 - beta) * state.trend;
    out.seasonal[state.phase] = gamma * (x - out.level) + (1.0 - gamma) * s_old;
    out.phase = (state.phase + 1) % state.seasonal.size();
    return out;
}

namespace {

HWState hw_init(const std::vector<double>& x, int s) {
    const auto us = static_cast<std::size_t>(s);
    double mean1 = 0.0;
    double mean2 = 0.0;
    for (std::size_t i = 0; i < us; ++i) {
        mean1 += x[i];
        mean2 += x[i + us];
    }
    mean1 /= static_cast<double>(us);
    mean2 /= static_cast<double>(us);

    HWState st;
    st.level = mean1;
    st.trend = (mean2 - mean1) / static_cast<double>(us);
    st.seasonal.resize(us);
    double mean_dev = 0.0;
    for (std::size_t i = 0; i < us; ++i) {
        st.seasonal[i] = x[i] - mean1;
        mean_dev += st.seasonal[i];
    }
    mean_dev /= static_cast<double>(us);
    for (double& v : st.seasonal) v -= mean_dev;
    st.phase = 0;
    return st;
}

// One-step SSE scored after the initialization season, in the style of R's
// HoltWinters; the recursion itself still consumes every observation. Scoring
// the init season would punish weights for transients the initialization
// itself created.
double hw_sse(const std::vector<double>& x, const HWState& init, double alpha, double beta,
              double gamma, HWState* final_state) {
    HWState st = init;
    const std::size_t skip = st.seasonal.size();
    double sse = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (t >= skip) {
            const double pred = st.level + st.trend + st.seasonal[st.phase];
            const double err = x[t] - pred;
            sse += err * err;
        }
        st = hw_step(st, x[t], alpha, beta, gamma);
    }
    if (final_state) *final_state = std::move(st);
    return sse;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

HoltWintersModel fit_holt_winters(const std::vector<double>& x, int s,
                                  std::optional<std::array<double, 3>> weights,
                                  const NelderMeadOptions& optimizer) {
    if (s < 2) throw ArgumentError("season length must be >= 2");
    if (x.size() < 2 * static_cast<std::size_t>(s))
        throw InsufficientDataError(
            "Holt-Winters needs two full seasons (" + std::to_string(2 * s) +
            " observations) for initialization, got " + std::to_string(x.size()));

    const HWState init = hw_init(x, s);

    double alpha;
    double beta;
    double gamma;
    if (weights) {
        alpha = (*weights)[0];
        beta = (*weights)[1];
        gamma = (*weights)[2];
        if (alpha < 0 || alpha > 1 || beta < 0 || beta > 1 || gamma < 0 || gamma > 1)
            throw ArgumentError("smoothing weights must lie in [0, 1]");
    } else {
        double best_sse = std::numeric_limits<double>::infinity();
        std::array<double, 3> best{0.0, 0.0, 0.0};
        for (int ia = 0; ia <= 10; ++ia)
            for (int ib = 0; ib <= 10; ++ib)
                for (int ig = 0; ig <= 10; ++ig) {
                    const double a = ia / 10.0;
                    const double b = ib / 10.0;
                    const double g = ig / 10.0;
                    const double sse = hw_sse(x, init, a, b, g, nullptr);
                    if (sse < best_sse) {
                        best_sse = sse;
                        best = {a, b, g};
                    }
                }
        auto objective = [&](const std::vector<double>& w) {
            return hw_sse(x, init, clamp01(w[0]), clamp01(w[1]), clamp01(w[2]), nullptr);
        };
        const NelderMeadResult rs =
            nelder_mead(objective, {best[0], best[1], best[2]}, optimizer);
        if (rs.fx <= best_sse) {
            alpha = clamp01(rs.x[0]);
            beta = clamp01(rs.x[1]);
            gamma = clamp01(rs.x[2]);
        } else {
            alpha = best[0];
            beta = best[1];
            gamma = best[2];
        }
    }

    HoltWintersModel model;
    model.alpha = alpha;
    model.beta = beta;
    model.gamma = gamma;
    model.s = s;
    model.sse = hw_sse(x, init, alpha, beta, gamma, &model.state);
    return model;
}

std::vector<double> HoltWintersModel::forecast(std::size_t h) const {
    if (h < 1) throw ArgumentError("forecast horizon must be >= 1");
    if (state.seasonal.empty()) throw DimensionError("Holt-Winters model state is empty");
    std::vector<double> out(h);
    const std::size_t us = state.seasonal.size();
    for (std::size_t m = 1; m <= h; ++m) {
        const std::size_t slot = (state.phase + m - 1) % us;
        out[m - 1] = state.level + static_cast<double>(m) * state.trend + state.seasonal[slot];
    }
    return out;
}

std::vector<double> forecast(const ClassicalModel& model, std::size_t h) {
    return std::visit([h](const auto& m) { return m.forecast(h); }, model);
}

std::vector<double> polynomial_root_moduli(const std::vector<double>& coeffs) {
    std::size_t deg = coeffs.size();
    while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
    if (deg == 0) return {};

    using cplx = std::complex<double>;
    std::vector<cplx> monic(deg + 1);
    const double lead = coeffs[deg - 1];
    monic[0] = 1.0 / lead;
    for (std::size_t i = 1; i < deg; ++i) monic[i] = coeffs[i - 1] / lead;
    monic[deg] = 1.0;

    auto eval = [&](cplx zv) {
        cplx acc = monic[deg];
        for (std::size_t i = deg; i-- > 0;) acc = acc * zv + monic[i];
        return acc;
    };

    std::vector<cplx> roots(deg);
    const cplx seed(0.4, 0.9);
    cplx pw = seed;
    for (std::size_t i = 0; i < deg; ++i) {
        roots[i] = pw;
        pw *= seed;
    }
    for (int iter = 0; iter < 500; ++iter) {
        double max_step = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            cplx den = 1.0;
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) den *= roots[i] - roots[j];
            if (std::abs(den) < 1e-300) den = 1e-300;
            const cplx delta = eval(roots[i]) / den;
            roots[i] -= delta;
            max_step = std::max(max_step, std::abs(delta));
        }
        if (max_step < 1e-13) break;
    }

    std::vector<double> moduli(deg);
    for (std::size_t i = 0; i < deg; ++i) moduli[i] = std::abs(roots[i]);
    std::sort(moduli.begin(), moduli.end());
    return moduli;
}

namespace {

nlohmann::json recon_to_json(const DifferenceState& st) {
    return nlohmann::json{{"d", st.d},
                          {"D", st.D},
                          {"s", st.s},
                          {"seasonal_prefixes", st.seasonal_prefixes},
                          {"ordinary_prefixes", st.ordinary_prefixes},
                          {"seasonal_tails", st.seasonal_tails},
                          {"ordinary_tails", st.ordinary_tails}};
}

DifferenceState recon_from_json(const nlohmann::json& j) {
    DifferenceState st;
    st.d = j.at("d").get<int>();
    st.D = j.at("D").get<int>();
    st.s = j.at("s").get<int>();
    st.seasonal_prefixes = j.at("seasonal_prefixes").get<std::vector<std::vector<double>>>();
    st.ordinary_prefixes = j.at("ordinary_prefixes").get<std::vector<double>>();
    st.seasonal_tails = j.at("seasonal_tails").get<std::vector<std::vector<double>>>();
    st.ordinary_tails = j.at("ordinary_tails").get<std::vector<double>>();
    return st;
}

}  // namespace

nlohmann::json model_to_json(const ClassicalModel& model) {
    nlohmann::json j;
    if (const auto* ar = std::get_if<ARModel>(&model)) {
        j["type"] = "ar";
        j["orders"] = {{"p", ar->p}};
        j["coefficients"] = {{"phi", ar->phi}, {"intercept", ar->intercept}};
        j["state"] = {{"history", ar->history}, {"sigma2", ar->sigma2}};
    } else if (const auto* a = std::get_if<ARIMAModel>(&model)) {
        j["type"] = "arima";
        j["orders"] = {{"p", a->p}, {"d", a->d}, {"q", a->q}};
        j["coefficients"] = {{"ar", a->ar}, {"ma", a->ma}, {"intercept", a->intercept}};
        j["state"] = {{"z", a->z},
                      {"residuals", a->residuals},
                      {"recon", recon_to_json(a->recon)},
                      {"sigma2", a->sigma2},
                      {"warnings", a->warnings},
                      {"optimizer_iterations", a->optimizer_iterations}};
    } else if (const auto* sa = std::get_if<SARIMAModel>(&model)) {
        j["type"] = "sarima";
        j["orders"] = {{"p", sa->p}, {"d", sa->d}, {"q", sa->q},
                       {"P", sa->P}, {"D", sa->D}, {"Q", sa->Q}, {"s", sa->s}};
        j["coefficients"] = {{"ar", sa->ar},
                             {"ma", sa->ma},
                             {"sar", sa->sar},
                             {"sma", sa->sma},
                             {"intercept", sa->intercept}};
        j["state"] = {{"z", sa->z},
                      {"residuals", sa->residuals},
                      {"recon", recon_to_json(sa->recon)},
                      {"sigma2", sa->sigma2},
                      {"warnings", sa->warnings},
                      {"optimizer_iterations", sa->optimizer_iterations}};
    } else if (const auto* hw = std::get_if<HoltWintersModel>(&model)) {
        j["type"] = "holt_winters";
        j["orders"] = {{"s", hw->s}};
        j["coefficients"] = {{"alpha", hw->alpha}, {"beta", hw->beta}, {"gamma", hw->gamma}};
        j["state"] = {{"level", hw->state.level},
                      {"trend", hw->state.trend},
                      {"seasonal", hw->state.seasonal},
                      {"phase", hw->state.phase},
                      {"sse", hw->sse}};
    }
    return j;
}

namespace {

ClassicalModel parse_model_fields(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "ar") {
        ARModel m;
        m.p = j.at("orders").at("p").get<int>();
        m.phi = j.at("coefficients").at("phi").get<std::vector<double>>();
        m.intercept = j.at("coefficients").at("intercept").get<double>();
        m.history = j.at("state").at("history").get<std::vector<double>>();
        m.sigma2 = j.at("state").at("sigma2").get<double>();
        return m;
    }
    if (type == "arima") {
        ARIMAModel m;
        m.p = j.at("orders").at("p").get<int>();
        m.d = j.at("orders").at("d").get<int>();
        m.q = j.at("orders").at("q").get<int>();
        m.ar = j.at("coefficients").at("ar").get<std::vector<double>>();
        m.ma = j.at("coefficients").at("ma").get<std::vector<double>>();
        m.intercept = j.at("coefficients").at("intercept").get<double>();
        m.z = j.at("state").at("z").get<std::vector<double>>();
        m.residuals = j.at("state").at("residuals").get<std::vector<double>>();
        m.recon = recon_from_json(j.at("state").at("recon"));
        m.sigma2 = j.at("state").at("sigma2").get<double>();
        m.warnings = j.at("state").at("warnings").get<std::vector<std::string>>();
        m.optimizer_iterations = j.at("state").at("optimizer_iterations").get<std::size_t>();
        return m;
    }
    if (type == "sarima") {
        SARIMAModel m;
        m.p = j.at("orders").at("p").get<int>();
        m.d = j.at("orders").at("d").get<int>();
        m.q = j.at("orders").at("q").get<int>();
        m.P = j.at("orders").at("P").get<int>();
        m.D = j.at("orders").at("D").get<int>();
        m.Q = j.at("orders").at("Q").get<int>();
        m.s = j.at("orders").at("s").get<int>();
        m.ar = j.at("coefficients").at("ar").get<std::vector<double>>();
        m.ma = j.at("coefficients").at("ma").get<std::vector<double>>();
        m.sar = j.at("coefficients").at("sar").get<std::vector<double>>();
        m.sma = j.at("coefficients").at("sma").get<std::vector<double>>();
        m.intercept = j.at("coefficients").at("intercept").get<double>();
        m.z = j.at("state").at("z").get<std::vector<double>>();
        m.residuals = j.at("state").at("residuals").get<std::vector<double>>();
        m.recon = recon_from_json(j.at("state").at("recon"));
        m.sigma2 = j.at("state").at("sigma2").get<double>();
        m.warnings = j.at("state").at("warnings").get<std::vector<std::string>>();
        m.optimizer_iterations = j.at("state").at("optimizer_iterations").get<std::size_t>();
        return m;
    }
    if (type == "holt_winters") {
        HoltWintersModel m;
        m.s = j.at("orders").at("s").get<int>();
        m.alpha = j.at("coefficients").at("alpha").get<double>();
        m.beta = j.at("coefficients").at("beta").get<double>();
        m.gamma = j.at("coefficients").at("gamma").get<double>();
        m.state.level = j.at("state").at("level").get<double>();
        m.state.trend = j.at("state").at("trend").get<double>();
        m.state.seasonal = j.at("state").at("seasonal").get<std::vector<double>>();
        m.state.phase = j.at("state").at("phase").get<std::size_t>();
        m.sse = j.at("state").at("sse").get<double>();
        return m;
    }
    throw FormatError("unknown model type '" + type + "'");
}

}  // namespace

ClassicalModel model_from_json(const nlohmann::json& j) {
    try {
        return parse_model_fields(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model JSON: ") + e.what());
    }
}

void save_model(const ClassicalModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << model_to_json(model).dump(2) << '\n';
}

ClassicalModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("'" + path + "' is not valid model JSON: " + e.what());
    }
    return model_from_json(j);
}

}  // namespace laborcast
