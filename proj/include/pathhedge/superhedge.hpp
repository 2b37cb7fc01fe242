#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pathhedge/functional.hpp"
#include "pathhedge/integral.hpp"
#include "pathhedge/path.hpp"
#include "pathhedge/portfolio.hpp"

namespace pathhedge {

struct ScenarioBounds {
    double a = 0.0;
    double b = 0.0;  // paths admitted iff a < x(t) < b, strictly
    bool valid() const { return a >= 0.0 && b > a; }
};

struct AsianParams {
    double maturity = 1.0;
    double strike = 0.0;
    ScenarioBounds bounds;
};

struct AsianState {
    double t = 0.0;
    double avg_integral = 0.0;  // int_0^t x(s) ds
    double spot = 0.0;
};

// Cost-to-go U = H+ p + H- (1 - p) with
//   H+ = ((A + b(T-t))/T - K)+,  H- = ((A + a(T-t))/T - K)+,  p = (x-a)/(b-a).
double asian_cost_to_go(const AsianParams& P, const AsianState& s);
// Optimal hedge ratio (H+ - H-)/(b - a).
double asian_delta(const AsianParams& P, const AsianState& s);
// Time decay (x-b)(x-a)/(T(b-a)) on {H+ > 0, H- = 0}, zero elsewhere; <= 0.
double asian_theta(const AsianParams& P, const AsianState& s);

// Unbounded-scenario limit (A/T - K)+ + x (T-t)/T, and the finite-b gap.
double whole_space_limit(double t, double avg_integral, double spot, double maturity,
                         double strike);
double whole_space_gap(const AsianParams& P, const AsianState& s);

AsianState asian_state(const CadlagPath& x_t, double t);

// Functionals over paths (state extracted exactly from the path), with
// analytic derivatives attached.
Functional asian_value_functional(const AsianParams& P);
Functional asian_delta_functional(const AsianParams& P);

/// Exact integral of s -> asian_theta(s, z_s) over [s0, s1] along a step
/// path, with per-segment branch-switch times solved in closed form.
double asian_theta_integral(const AsianParams& P, const CadlagPath& z, double s0, double s1);

/// Self-financing strategy whose value is the hedged book
/// V(t, x_t) = U(t, x_t) - int_{t0}^{t} theta ds, with phi the closed-form
/// delta. The value functional needs piecewise-constant paths past t0.
Strategy asian_superhedge_strategy(const AsianParams& P, double t0 = 0.0);

// ---------------------------------------------------------------------------
// Verification of sup_z int_t^T theta(s, z_s) ds = 0 via the waiting
// scenarios z_eps (hold x(t) for eps, then sit at b - eps).

struct VerificationReport {
    struct EpsRow {
        double eps;
        double theta_integral;
        double lower_bound;  // -eps (1 - eps/(b-a))
        bool within;
    };
    std::vector<EpsRow> rows;
    double sup_estimate = 0.0;
    bool sup_increasing = true;  // toward 0 as eps decreases
    bool all_within_bound = true;
    double theta_scan_max = 0.0;
    bool theta_nonpositive = true;
    bool pass = false;
    std::string to_json() const;
};

VerificationReport verification_check(const AsianParams& P, const CadlagPath& x, double t,
                                      std::span<const double> epsilons, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Backtest. All bookkeeping at a given level is done along the step scenario
// x^n (itself an admissible scenario), which makes the terminal identity
// V(T) = H + (-theta integral) hold to rounding at every level. Step inputs
// additionally get an exact roll-forward along the original path, used to
// measure each level's gap to the limit.

struct HedgeLevelRow {
    int level = 0;
    double gain = 0.0;
    double price = 0.0;       // U(t0, .) anchored on x^n
    double value_T = 0.0;     // price + gain
    double payoff = 0.0;      // H(x^n_T)
    double theta_integral = 0.0;
    double slack = 0.0;       // value_T - payoff
    double identity_residual = 0.0;  // |value_T - payoff + theta_integral|
};

struct HedgeExact {
    double gain = 0.0;
    double value_T = 0.0;
    double payoff = 0.0;
    double theta_integral = 0.0;
    double slack = 0.0;
    double identity_residual = 0.0;
};

struct HedgeReport {
    double t0 = 0.0;
    double price = 0.0;           // U(t0, x_{t0}) on the original path
    double payoff_original = 0.0; // H(x_T) on the original path
    std::vector<HedgeLevelRow> levels;
    std::vector<std::pair<double, double>> delta_trace;  // top level, decimated

    // headline = top level row
    double value_T = 0.0;
    double payoff = 0.0;
    double pnl = 0.0;
    double theta_integral = 0.0;
    double domination_slack = 0.0;
    double identity_residual = 0.0;
    bool integral_converged = false;

    std::optional<HedgeExact> exact;  // step-mode originals only
    std::string to_json() const;
};

HedgeReport superhedge_backtest(const AsianParams& P, const CadlagPath& path,
                                const PartitionLadder& ladder, double t0);

// ---------------------------------------------------------------------------
// Lattice minimax oracle: backward induction over per-step-constant
// adversary moves, the hedger's one-step problem solved exactly by the upper
// concave envelope (chord) construction. Independent cross-check of the
// closed form.

struct OracleConfig {
    int n_steps = 32;
    int value_grid = 64;
    int avg_grid = 128;
    // Distance of the extreme adversary candidates from the open bounds.
    // < 0: auto, (b-a) / (1e6 value_grid) -- tightens as the grid refines.
    double delta_margin = -1.0;
};

double lattice_minimax_oracle(const AsianParams& P, const OracleConfig& cfg, double t0,
                              double avg0, double spot0);

}  // namespace pathhedge
