#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pathhedge/functional.hpp"
#include "pathhedge/path.hpp"
#include "pathhedge/portfolio.hpp"

namespace pathhedge {

enum class PayoffKind { asian, lookback, portfolio_call };

/// Maturity-T payoff with its closed-form response to a vertical bump
/// x_{t-} + e 1_[t,inf). One-dimensional underlying.
struct Payoff {
    PayoffKind kind = PayoffKind::asian;
    double maturity = 1.0;
    double strike = 0.0;
    std::optional<Strategy> portfolio;  // portfolio_call only

    double terminal(const CadlagPath& x) const;             // H(x) = H(x_T)
    double running(double t, const CadlagPath& x_t) const;  // H(x_t)
    // Closed form for H(x_{t-} + e 1_[t,inf)).
    double perturbed(double t, const CadlagPath& x, double e) const;
    // Oracle: build the perturbed path and evaluate the terminal payoff.
    double perturbed_bruteforce(double t, const CadlagPath& x, double e) const;

    Functional running_functional() const;
    std::string label() const;
};

Payoff make_payoff(PayoffKind kind, double maturity, double strike = 0.0,
                   std::optional<Strategy> portfolio = {});

// ---------------------------------------------------------------------------

struct AffineWitness {
    double t = 0.0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
    double curvature = 0.0;
    std::size_t path_index = 0;
};

struct AffineCheck {
    bool affine = true;
    double max_curvature = 0.0;
    std::optional<AffineWitness> witness;
};

/// Second divided differences of e -> H(x_{t-} + e 1) across the grid;
/// affine iff all vanish (within tol).
AffineCheck affine_check(const Payoff& p, double t, const CadlagPath& x,
                         std::span<const double> e_grid, double tol = 1e-9);

class NotAffinePayoff : public std::domain_error {
public:
    explicit NotAffinePayoff(const AffineWitness& w);
    AffineWitness witness;
};

struct PerfectHedge {
    Strategy strategy;
    Payoff payoff;
    double initial_price(const CadlagPath& x) const;  // V(0, x_0) = H(x_0)
};

/// Builds the replicating strategy of a vertically affine payoff: the hedge
/// ratio is the (exact, two-point) slope of the bump map, the value
/// functional is H itself. Refuses with a witness if the certification
/// corpus exhibits curvature: non-affine payoffs admit no perfect hedge.
/// Certification: every breakpoint of every corpus path, an 11-point e-grid
/// spanning 80% of the admissible neighbourhood.
PerfectHedge perfect_hedge(const Payoff& p, std::span<const CadlagPath> certification,
                           double tol = 1e-9);

}  // namespace pathhedge
