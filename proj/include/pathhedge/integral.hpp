#pragma once

#include <optional>
#include <vector>

#include "pathhedge/functional.hpp"
#include "pathhedge/path.hpp"

namespace pathhedge {

struct IntegralOptions {
    double abs_tol = 1e-6;
    double rel_tol = 1e-4;
    bool extrapolate = true;
};

/// Per-level left Riemann sums I(t, x^n_t) = sum_{t_i <= t} phi(t_i, x^n_{t_i-})
/// (x(t_{i+1}) - x(t_i)) along the ladder, and the declared limit. The limit
/// is declared by a two-level Cauchy criterion (tolerance: the looser of
/// abs_tol and rel_tol * |top|); when the level gaps decay at a stable
/// geometric ratio the declared value is the extrapolated tail sum.
struct IntegralEstimate {
    struct LevelSum {
        int level;
        double value;
    };
    std::vector<LevelSum> levels;
    std::optional<double> limit;
    bool converged = false;
    double top_gap = 0.0;

    double level_value(int level) const;
    double top() const { return levels.back().value; }
};

IntegralEstimate pathwise_integral(const Functional& phi, const CadlagPath& path,
                                   const PartitionLadder& ladder, double t,
                                   const IntegralOptions& opts = {});

/// d > 1 integrand: one component functional per asset, dotted with the
/// increment vector.
IntegralEstimate pathwise_integral(const std::vector<Functional>& phi, const CadlagPath& path,
                                   const PartitionLadder& ladder, double t,
                                   const IntegralOptions& opts = {});

/// Single-level Riemann sum (same summation as pathwise_integral at one level).
double riemann_sum(const std::vector<Functional>& phi, const CadlagPath& path,
                   const PartitionLadder& ladder, int level, double t);

}  // namespace pathhedge
