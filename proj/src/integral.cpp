#include "pathhedge/integral.hpp"

#include <cmath>
#include <stdexcept>

namespace pathhedge {

namespace {

std::optional<double> geometric_tail(const std::vector<IntegralEstimate::LevelSum>& levels) {
    const std::size_t n = levels.size();
    if (n < 3) return std::nullopt;
    const double d1 = levels[n - 2].value - levels[n - 3].value;
    const double d2 = levels[n - 1].value - levels[n - 2].value;
    if (std::abs(d1) < 1e-300) return std::nullopt;
    const double r = d2 / d1;
    if (!(r > 0.25 && r < 0.75)) return std::nullopt;
    if (n >= 4) {
        const double d0 = levels[n - 3].value - levels[n - 4].value;
        if (std::abs(d0) < 1e-300) return std::nullopt;
        if (const double r0 = d1 / d0; !(r0 > 0.25 && r0 < 0.75)) return std::nullopt;
    }
    return levels[n - 1].value + d2 * r / (1.0 - r);
}

}  // namespace

double IntegralEstimate::level_value(int level) const {
    for (const auto& l : levels)
        if (l.level == level) return l.value;
    throw std::out_of_range("IntegralEstimate: no such level");
}

double riemann_sum(const std::vector<Functional>& phi, const CadlagPath& path,
                   const PartitionLadder& ladder, int level, double t) {
    const int dim = path.dim();
    if (static_cast<int>(phi.size()) != dim)
        throw std::invalid_argument("riemann_sum: integrand dimension mismatch");
    const auto& g = ladder.points(level);
    const CadlagPath xn = approximate(path, ladder, level);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        if (!time_le(g[i], t)) break;
        bool moved = false;
        Vec inc(dim);
        const Vec a = path.at(g[i + 1]), b = path.at(g[i]);
        for (int k = 0; k < dim; ++k) {
            inc[k] = a[k] - b[k];
            moved = moved || inc[k] != 0.0;
        }
        if (!moved) continue;  // zero increment contributes nothing
        const CadlagPath stopped = xn.stop(g[i], StopSide::before);
        for (int k = 0; k < dim; ++k)
            if (inc[k] != 0.0) acc += phi[static_cast<std::size_t>(k)](g[i], stopped) * inc[k];
    }
    return acc;
}

IntegralEstimate pathwise_integral(const std::vector<Functional>& phi, const CadlagPath& path,
                                   const PartitionLadder& ladder, double t,
                                   const IntegralOptions& opts) {
    IntegralEstimate est;
    for (int level : ladder.levels())
        est.levels.push_back({level, riemann_sum(phi, path, ladder, level, t)});

    const std::size_t n = est.levels.size();
    if (n >= 2) {
        est.top_gap = std::abs(est.levels[n - 1].value - est.levels[n - 2].value);
        const double tol =
            std::max(opts.abs_tol, opts.rel_tol * std::abs(est.levels[n - 1].value));
        if (est.top_gap < tol) {
            est.converged = true;
            est.limit = est.levels[n - 1].value;
        }
        if (opts.extrapolate) {
            if (auto tail = geometric_tail(est.levels)) {
                est.converged = true;
                est.limit = *tail;
            }
        }
    }
    return est;
}

IntegralEstimate pathwise_integral(const Functional& phi, const CadlagPath& path,
                                   const PartitionLadder& ladder, double t,
                                   const IntegralOptions& opts) {
    return pathwise_integral(std::vector<Functional>{phi}, path, ladder, t, opts);
}

}  // namespace pathhedge
