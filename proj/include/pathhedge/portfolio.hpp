#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathhedge/functional.hpp"
#include "pathhedge/integral.hpp"
#include "pathhedge/path.hpp"

namespace pathhedge {

/// Trading strategy: asset positions phi (one functional per asset) and the
/// numeraire position psi, both regulated. Strategies built from a value
/// functional carry it, together with an optional exact terminal-gain
/// evaluator for the path classes where the integral has a closed form.
struct Strategy {
    std::string label;
    std::vector<Functional> phi;
    Functional psi;
    std::optional<Functional> value;
    std::optional<std::function<double(const CadlagPath&, double)>> exact_gain;

    int dim() const { return static_cast<int>(phi.size()); }
};

/// psi := V - phi . x, the cash leg that makes V the portfolio value.
Strategy strategy_from_value(std::string label, const Functional& V,
                             std::vector<Functional> phi);

Strategy buy_and_hold(double shares, double cash = 0.0);
Strategy cash_only(double cash);
/// phi(t, x_t) = 2 (x(t) - x(0-)); the classic continuous-path free lunch.
/// Its value functional subtracts the accumulated squared jumps, which is the
/// exact quadratic variation for step paths and zero for continuous
/// piecewise-linear ones.
Strategy free_lunch_strategy();

double portfolio_value(const Strategy& s, double t, const CadlagPath& x_t);

struct PortfolioValueReport {
    double value = 0.0;      // phi(t, x_t) . x(t) + psi(t, x_t)
    double left_form = 0.0;  // phi(t, x_{t-}) . x(t) + psi(t, x_{t-})
    double difference = 0.0;
};
PortfolioValueReport portfolio_value_report(const Strategy& s, double t, const CadlagPath& x_t);

// ---------------------------------------------------------------------------

enum class SelfFinancingCondition { jump, horizontal };

struct SelfFinancingReport {
    struct Record {
        double t;
        SelfFinancingCondition condition;
        double h;  // 0 for the jump condition
        double residual;
    };
    std::vector<Record> records;
    double max_residual = 0.0;
    bool pass = false;
    std::string to_json() const;
};

/// Condition (jump): instantaneous rebalances are cash neutral,
/// |dphi(t, x_{t-} -> x_t) . x(t) + dpsi| at each grid time. Condition
/// (horizontal): rebalances at frozen prices are cash neutral; reported as a
/// rate, |(phi(t+h, x_t) - phi(t, x_t)) . x(t) + psi(t+h, x_t) - psi(t, x_t)| / h.
SelfFinancingReport self_financing_check(const Strategy& s, const CadlagPath& path,
                                         std::span<const double> grid,
                                         std::span<const double> hs = {},
                                         double tol = 1e-8);

// ---------------------------------------------------------------------------

struct GainReport {
    IntegralEstimate integral;
    double v0 = 0.0;              // portfolio value at (0, x_{0-})
    double vT = 0.0;              // portfolio value at (T, x_T)
    double vT_level = 0.0;        // value functional on the top-level scenario
    double residual_limit = 0.0;  // |vT - v0 - limit|
    double residual_level = 0.0;  // |vT_level - v0 - top sum|; needs a value functional
    bool has_level_residual = false;
};

GainReport gain(const Strategy& s, const CadlagPath& path, const PartitionLadder& ladder,
                double T, const IntegralOptions& opts = {});

// ---------------------------------------------------------------------------

struct ArbitrageReport {
    std::string strategy_label;
    std::size_t n_paths = 0;
    double min_gain = 0.0;
    double max_gain = 0.0;
    std::size_t n_negative = 0;
    std::size_t n_positive = 0;
    bool all_nonnegative = true;
    bool some_positive = false;
    bool arbitrage_evidence = false;       // all >= 0 and at least one > 0
    bool class_restricted_arbitrage = false;  // evidence over a jump-free class
    std::optional<std::size_t> falsifier_index;
    std::optional<double> falsifier_gain;
    std::optional<CadlagPath> falsifier;
    std::string to_json() const;
};

struct ArbitrageProbeOptions {
    double zero_tol = 1e-8;      // |gain| below this counts as zero
    bool adversarial = true;     // single-jump perturbation family
    bool jump_free_class = false;  // scenario class cannot produce jumps
};

/// Scans generated scenarios (plus a deterministic single-jump perturbation
/// family when the class allows jumps) for a path with negative terminal
/// gain. Gains use the strategy's exact evaluator when present, else the
/// declared pathwise-integral limit.
ArbitrageReport arbitrage_probe(const Strategy& s, std::span<const CadlagPath> paths,
                                const PartitionLadder& ladder, double T,
                                const ArbitrageProbeOptions& opts = {});

}  // namespace pathhedge
