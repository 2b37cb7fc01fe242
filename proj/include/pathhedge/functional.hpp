#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pathhedge/path.hpp"

namespace pathhedge {

/// Scalar non-anticipative functional F(t, x_t). Callers are expected to pass
/// stopped paths; the evaluator must not look past t. Analytic derivatives
/// are optional and, when present, take precedence over finite differences.
class Functional {
public:
    using Eval = std::function<double(double, const CadlagPath&)>;
    using GradEval = std::function<Vec(double, const CadlagPath&)>;

    Functional() = default;
    Functional(std::string label, Eval eval) : label_(std::move(label)), eval_(std::move(eval)) {}

    Functional& with_vertical(GradEval g) {
        grad_ = std::move(g);
        return *this;
    }
    Functional& with_horizontal(Eval h) {
        dt_ = std::move(h);
        return *this;
    }

    double operator()(double t, const CadlagPath& x_t) const { return eval_(t, x_t); }
    // F_-(t, x_t) := F(t, x_{t-})
    double left(double t, const CadlagPath& x_t) const {
        return eval_(t, x_t.stop(t, StopSide::before));
    }

    bool has_vertical() const { return static_cast<bool>(grad_); }
    bool has_horizontal() const { return static_cast<bool>(dt_); }
    Vec analytic_vertical(double t, const CadlagPath& x_t) const { return grad_(t, x_t); }
    double analytic_horizontal(double t, const CadlagPath& x_t) const { return dt_(t, x_t); }
    const std::string& label() const { return label_; }
    bool valid() const { return static_cast<bool>(eval_); }

private:
    std::string label_;
    Eval eval_;
    GradEval grad_;
    Eval dt_;
};

struct DerivativeOptions {
    double step = -1.0;  // < 0: auto 1e-4 * max(1, |x(t)|)
    bool richardson = false;
};

double derivative_step(const CadlagPath& x_t, double t, double requested = -1.0);

/// Central finite difference of e -> F(t, x_t + e e_i 1_[t,inf)); the step
/// shrinks per component when a downward bump would break positivity.
Vec vertical_derivative_fd(const Functional& F, double t, const CadlagPath& x_t, double h = -1.0);
/// Analytic vertical derivative when the functional carries one, else the
/// finite difference.
Vec vertical_derivative(const Functional& F, double t, const CadlagPath& x_t, double h = -1.0);

/// One-sided forward difference (F(t+h, x_t) - F(t, x_t))/h with the path
/// frozen at x_t. Optional first-order Richardson refinement.
double horizontal_derivative_fd(const Functional& F, double t, const CadlagPath& x_t,
                                double h = 1e-6, bool richardson = false);
double horizontal_derivative(const Functional& F, double t, const CadlagPath& x_t,
                             double h = 1e-6, bool richardson = false);

// ---------------------------------------------------------------------------
// Strict-causality probe: |F - F_-| against the finite-difference gradient
// norm, sample by sample. The two criteria should agree everywhere.

enum class CausalityVerdict { strictly_causal, not_strictly_causal, inconsistent };

struct CausalityRecord {
    std::size_t path_index = 0;
    double t = 0.0;
    double f_gap = 0.0;      // |F(t, x_t) - F(t, x_{t-})|
    double grad_norm = 0.0;  // max-norm of finite-difference gradient
    bool gap_small = false;
    bool grad_small = false;
    bool agree = false;
};

struct CausalityReport {
    std::vector<CausalityRecord> records;
    std::size_t n_disagree = 0;
    double agreement_fraction = 1.0;
    bool causal_by_gap = true;
    bool causal_by_grad = true;
    CausalityVerdict verdict = CausalityVerdict::strictly_causal;
    std::string to_json() const;
};

CausalityReport causality_probe(const Functional& F, std::span<const CadlagPath> paths,
                                std::span<const double> times, double h = -1.0,
                                double tol = 1e-7);

// ---------------------------------------------------------------------------
// Sampled continuity diagnostic: approach limits along the path (s up t,
// s down t) and along ladder approximations (predecessor / successor grid
// times). A sampled check, not a proof of membership.

struct ContinuityCondition {
    std::string name;
    std::vector<double> deviations;  // coarse -> fine
    double final_deviation = 0.0;
    double peak_deviation = 0.0;
    // deviations collapsed toward zero: final < max(tol, 0.05 * peak)
    bool pass = false;
};

struct ContinuityReport {
    std::vector<ContinuityCondition> conditions;
    bool pass = false;
    std::string note = "sampled diagnostic, not a proof";
    std::string to_json() const;
};

ContinuityReport continuity_probe(const Functional& F, const CadlagPath& path,
                                  const PartitionLadder& ladder, double t, double tol = 1e-6);

}  // namespace pathhedge
