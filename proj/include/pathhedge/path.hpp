#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pathhedge {

using Vec = std::vector<double>;

// Absolute tolerance used for all time comparisons (grid membership must be
// deterministic even after arithmetic on grid points).
inline constexpr double kTimeTol = 1e-12;

inline bool time_eq(double a, double b) { return a >= b - kTimeTol && a <= b + kTimeTol; }
inline bool time_lt(double a, double b) { return a < b - kTimeTol; }
inline bool time_le(double a, double b) { return a <= b + kTimeTol; }

enum class PathMode { step, linear };
enum class StopSide { at, before };

struct PathSample {
    Vec value;
    Vec left_limit;
    Vec jump;
};

/// Right-continuous path with left limits, represented by a finite breakpoint
/// list. Two interpolation modes: `step` (native cadlag) and `linear`
/// (sampled continuous proxy; jumps only where a breakpoint carries an
/// explicit left value). Evaluation past the last breakpoint is constant.
///
/// Instances share immutable breakpoint storage; stopping and vertical
/// perturbation return O(1) views (the path equals the base before a cut
/// time and a constant after it).
class CadlagPath {
public:
    CadlagPath() = default;

    // values[i] is the value at times[i]; row-major when dim > 1.
    static CadlagPath make(PathMode mode, std::vector<double> times,
                           std::vector<Vec> values, std::optional<Vec> initial_value = {});

    // d = 1 conveniences.
    static CadlagPath step(std::vector<std::pair<double, double>> breakpoints,
                           std::optional<double> initial_value = {});
    static CadlagPath linear(std::vector<std::pair<double, double>> breakpoints,
                             std::optional<double> initial_value = {});
    static CadlagPath constant(double value, double at_time = 0.0);

    // Declares a left limit distinct from the breakpoint value (linear mode
    // jump). Returns a new path; `t` must match an existing breakpoint.
    CadlagPath with_left_value(double t, const Vec& left) const;

    int dim() const;
    PathMode mode() const;
    const Vec& initial_value() const;  // x(0-)
    double last_time() const;
    std::size_t breakpoint_count() const;
    double breakpoint_time(std::size_t i) const;
    Vec breakpoint_value(std::size_t i) const;

    Vec at(double t) const;
    Vec left_limit(double t) const;
    Vec jump(double t) const;
    PathSample sample(double t) const;

    // d = 1 conveniences.
    double value(double t) const;
    double left(double t) const;
    double jump1(double t) const;

    CadlagPath stop(double t, StopSide side) const;
    // x_{t-} + e 1_[t,inf);  requires e > -x(t-) componentwise.
    CadlagPath vertical_perturb(double t, const Vec& e) const;
    CadlagPath vertical_perturb(double t, double e) const;
    // x_t + e 1_[t,inf) (keeps the jump at t; used by derivative probes).
    CadlagPath bump(double t, const Vec& e) const;
    CadlagPath bump(double t, double e) const;

    // Exact running statistics (closed form per mode, prefix-cached).
    double running_integral(double t, int k = 0) const;  // int_0^t x_k(s) ds
    double running_max(double t, int k = 0) const;       // sup_{[0,t]} x_k
    double running_max_before(double t, int k = 0) const;  // sup_{[0,t)}, -inf if empty
    // Sum of squared jumps over [0,t] (includes a jump at 0 when x(0) != x(0-)).
    double jump_qv(double t, int k = 0) const;
    std::vector<double> jump_times(double up_to) const;

    bool positive() const;
    // Strictly inside (lo, hi) on [t0, t1] (values and left limits).
    bool within_bounds(double lo, double hi, double t0, double t1, int k = 0) const;

    // Snapshot of this view as standalone storage (used by IO and when a
    // perturbation lands after an existing cut).
    CadlagPath materialize() const;

    bool has_tail() const { return tail_.has_value(); }

private:
    struct Data;
    struct Tail {
        double time;
        Vec value;
    };

    CadlagPath(std::shared_ptr<const Data> data, std::optional<Tail> tail)
        : data_(std::move(data)), tail_(std::move(tail)) {}

    const Data& d() const { return *data_; }
    Vec base_at(double t) const;
    Vec base_left(double t) const;
    double base_at1(double t, int k) const;
    double base_left1(double t, int k) const;
    // Index of last breakpoint with time <= t (tolerance), or -1.
    std::ptrdiff_t index_at(double t) const;
    // Index of last breakpoint with time < t (tolerance), or -1.
    std::ptrdiff_t index_before(double t) const;
    double base_integral(double t, int k) const;
    double base_max(double t, int k, bool closed) const;
    double base_qv(double t, int k, bool include_at_t) const;

    std::shared_ptr<const Data> data_;
    std::optional<Tail> tail_;
};

/// Refining sequence of grids on [0, T]. Each level's points are sorted,
/// start at 0 and end at T; the mesh strictly decreases with the level.
class PartitionLadder {
public:
    static PartitionLadder dyadic(double horizon, int min_level, int max_level);
    static PartitionLadder from_grids(double horizon, std::vector<std::vector<double>> grids);

    double horizon() const { return horizon_; }
    const std::vector<int>& levels() const { return labels_; }
    int min_level() const { return labels_.front(); }
    int max_level() const { return labels_.back(); }
    const std::vector<double>& points(int level) const;
    double mesh(int level) const;

    // max { t_i < t }, with max(empty) := 0.
    double predecessor(int level, double t) const;
    // min { t_i >= t }, with min(empty) := last grid point.
    double successor(int level, double t) const;

private:
    double horizon_ = 0.0;
    std::vector<int> labels_;
    std::vector<std::vector<double>> grids_;
    std::size_t slot(int level) const;
};

/// Look-ahead piecewise-constant approximation: value x(t_{i+1}) on
/// [t_i, t_{i+1}), value x(t_k) at and after the last grid point. The result
/// is a step path sharing the original's initial value.
CadlagPath approximate(const CadlagPath& path, const PartitionLadder& ladder, int level);

struct VariationEstimate {
    struct LevelValue {
        int level;
        Vec tensor;  // single entry when dim == 1, row-major d*d for p == 2
    };
    int p = 2;
    int dim = 1;
    std::vector<LevelValue> levels;
    std::optional<Vec> limit;
    bool converged = false;
    double top_gap = 0.0;

    double scalar_level(int level) const;
    double scalar_limit() const;  // requires dim == 1 and converged
};

struct VariationOptions {
    double rel_tol = 1e-3;
    double abs_tol = 1e-12;
};

/// Per-level increment power sums along the ladder. Limit is declared by a
/// two-level Cauchy gap, with a geometric-tail extrapolation when the gaps
/// decay at a stable ratio (covers sequences like c 2^-n -> 0).
VariationEstimate p_variation(const CadlagPath& path, const PartitionLadder& ladder, int p,
                              double t, const VariationOptions& opts = {});

}  // namespace pathhedge
