#include "pathhedge/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pathhedge {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

struct CadlagPath::Data {
    PathMode mode = PathMode::step;
    int dim = 1;
    std::vector<double> times;
    std::vector<double> values;       // row-major, times.size() * dim
    std::vector<double> left_values;  // same layout; meaningful where has_left
    std::vector<std::uint8_t> has_left;
    Vec x0;

    // prefix caches, per component, length times.size()
    std::vector<double> prefix_integral;  // int_0^{t_i}
    std::vector<double> prefix_max;       // sup over [0, t_i]
    std::vector<double> prefix_qv;        // sum of squared jumps over [0, t_i]

    double val(std::size_t i, int k) const { return values[i * dim + k]; }
    double leftval(std::size_t i, int k) const {
        return has_left[i] ? left_values[i * dim + k] : values[i * dim + k];
    }

    void build_caches() {
        const std::size_t n = times.size();
        prefix_integral.assign(n * dim, 0.0);
        prefix_max.assign(n * dim, 0.0);
        prefix_qv.assign(n * dim, 0.0);
        for (int k = 0; k < dim; ++k) {
            prefix_max[k] = val(0, k);
            const double j0 = val(0, k) - x0[k];
            prefix_qv[k] = j0 * j0;
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double dt = times[i] - times[i - 1];
            for (int k = 0; k < dim; ++k) {
                double seg;
                if (mode == PathMode::step) {
                    seg = val(i - 1, k) * dt;
                } else {
                    seg = 0.5 * (val(i - 1, k) + leftval(i, k)) * dt;
                }
                prefix_integral[i * dim + k] = prefix_integral[(i - 1) * dim + k] + seg;
                const double reach = (mode == PathMode::step) ? val(i - 1, k)
                                                              : std::max(val(i - 1, k), leftval(i, k));
                prefix_max[i * dim + k] = std::max(prefix_max[(i - 1) * dim + k],
                                                   std::max(reach, val(i, k)));
                const double dj = val(i, k) - leftval(i, k);
                const double lj = (mode == PathMode::step) ? val(i, k) - val(i - 1, k) : dj;
                prefix_qv[i * dim + k] = prefix_qv[(i - 1) * dim + k] + lj * lj;
            }
        }
    }
};

CadlagPath CadlagPath::make(PathMode mode, std::vector<double> times, std::vector<Vec> values,
                            std::optional<Vec> initial_value) {
    if (times.empty() || times.size() != values.size())
        throw std::invalid_argument("CadlagPath: need matching, non-empty times/values");
    if (!time_eq(times.front(), 0.0))
        throw std::invalid_argument("CadlagPath: first breakpoint must be at t = 0");
    const int dim = static_cast<int>(values.front().size());
    if (dim < 1) throw std::invalid_argument("CadlagPath: dim must be >= 1");
    auto data = std::make_shared<Data>();
    data->mode = mode;
    data->dim = dim;
    data->times = std::move(times);
    data->values.reserve(data->times.size() * dim);
    for (std::size_t i = 0; i < data->times.size(); ++i) {
        if (i > 0 && !(data->times[i] > data->times[i - 1] + kTimeTol))
            throw std::invalid_argument("CadlagPath: times must be strictly increasing");
        if (static_cast<int>(values[i].size()) != dim)
            throw std::invalid_argument("CadlagPath: inconsistent value dimension");
        for (double v : values[i]) {
            if (!(v > 0.0)) throw std::invalid_argument("CadlagPath: values must be positive");
            data->values.push_back(v);
        }
    }
    data->left_values.assign(data->values.begin(), data->values.end());
    data->has_left.assign(data->times.size(), 0);
    if (initial_value) {
        if (static_cast<int>(initial_value->size()) != dim)
            throw std::invalid_argument("CadlagPath: initial value dimension mismatch");
        for (double v : *initial_value)
            if (!(v > 0.0)) throw std::invalid_argument("CadlagPath: initial value must be positive");
        data->x0 = std::move(*initial_value);
    } else {
        data->x0.assign(data->values.begin(), data->values.begin() + dim);
    }
    data->build_caches();
    return CadlagPath(std::move(data), std::nullopt);
}

CadlagPath CadlagPath::step(std::vector<std::pair<double, double>> breakpoints,
                            std::optional<double> initial_value) {
    std::vector<double> ts;
    std::vector<Vec> vs;
    ts.reserve(breakpoints.size());
    vs.reserve(breakpoints.size());
    for (auto& [t, v] : breakpoints) {
        ts.push_back(t);
        vs.push_back(Vec{v});
    }
    std::optional<Vec> x0;
    if (initial_value) x0 = Vec{*initial_value};
    return make(PathMode::step, std::move(ts), std::move(vs), std::move(x0));
}

CadlagPath CadlagPath::linear(std::vector<std::pair<double, double>> breakpoints,
                              std::optional<double> initial_value) {
    std::vector<double> ts;
    std::vector<Vec> vs;
    for (auto& [t, v] : breakpoints) {
        ts.push_back(t);
        vs.push_back(Vec{v});
    }
    std::optional<Vec> x0;
    if (initial_value) x0 = Vec{*initial_value};
    return make(PathMode::linear, std::move(ts), std::move(vs), std::move(x0));
}

CadlagPath CadlagPath::constant(double value, double at_time) {
    if (!time_eq(at_time, 0.0))
        return step({{0.0, value}, {at_time, value}});
    return step({{0.0, value}});
}

CadlagPath CadlagPath::with_left_value(double t, const Vec& left) const {
    CadlagPath flat = materialize();
    auto data = std::make_shared<Data>(*flat.data_);
    const auto idx = flat.index_at(t);
    if (idx < 0 || !time_eq(data->times[static_cast<std::size_t>(idx)], t))
        throw std::invalid_argument("with_left_value: t is not a breakpoint");
    if (static_cast<int>(left.size()) != data->dim)
        throw std::invalid_argument("with_left_value: dimension mismatch");
    for (int k = 0; k < data->dim; ++k) {
        if (!(left[k] > 0.0)) throw std::invalid_argument("with_left_value: left value must be positive");
        data->left_values[static_cast<std::size_t>(idx) * data->dim + k] = left[k];
    }
    data->has_left[static_cast<std::size_t>(idx)] = 1;
    data->build_caches();
    return CadlagPath(std::move(data), std::nullopt);
}

int CadlagPath::dim() const { return d().dim; }
PathMode CadlagPath::mode() const { return d().mode; }
const Vec& CadlagPath::initial_value() const { return d().x0; }

double CadlagPath::last_time() const {
    double t = d().times.back();
    if (tail_) t = std::max(t, tail_->time);
    return t;
}

std::size_t CadlagPath::breakpoint_count() const { return d().times.size(); }
double CadlagPath::breakpoint_time(std::size_t i) const { return d().times[i]; }

Vec CadlagPath::breakpoint_value(std::size_t i) const {
    Vec out(d().dim);
    for (int k = 0; k < d().dim; ++k) out[k] = d().val(i, k);
    return out;
}

std::ptrdiff_t CadlagPath::index_at(double t) const {
    const auto& ts = d().times;
    auto it = std::upper_bound(ts.begin(), ts.end(), t + kTimeTol);
    return static_cast<std::ptrdiff_t>(it - ts.begin()) - 1;
}

std::ptrdiff_t CadlagPath::index_before(double t) const {
    const auto& ts = d().times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t - kTimeTol);
    return static_cast<std::ptrdiff_t>(it - ts.begin()) - 1;
}

double CadlagPath::base_at1(double t, int k) const {
    const auto idx = index_at(t);
    if (idx < 0) return d().x0[k];  // not reachable for t >= 0 (first bp at 0)
    const auto i = static_cast<std::size_t>(idx);
    if (d().mode == PathMode::step || i + 1 >= d().times.size()) return d().val(i, k);
    const double t0 = d().times[i], t1 = d().times[i + 1];
    if (time_eq(t, t0)) return d().val(i, k);
    const double w = (t - t0) / (t1 - t0);
    return d().val(i, k) + w * (d().leftval(i + 1, k) - d().val(i, k));
}

double CadlagPath::base_left1(double t, int k) const {
    if (time_le(t, 0.0)) return d().x0[k];
    const auto idx = index_before(t);
    if (idx < 0) return d().x0[k];
    const auto i = static_cast<std::size_t>(idx);
    if (d().mode == PathMode::step) return d().val(i, k);
    if (i + 1 >= d().times.size()) return d().val(i, k);
    const double t0 = d().times[i], t1 = d().times[i + 1];
    if (time_eq(t, t1)) return d().leftval(i + 1, k);
    const double w = (t - t0) / (t1 - t0);
    return d().val(i, k) + w * (d().leftval(i + 1, k) - d().val(i, k));
}

Vec CadlagPath::base_at(double t) const {
    Vec out(d().dim);
    for (int k = 0; k < d().dim; ++k) out[k] = base_at1(t, k);
    return out;
}

Vec CadlagPath::base_left(double t) const {
    Vec out(d().dim);
    for (int k = 0; k < d().dim; ++k) out[k] = base_left1(t, k);
    return out;
}

Vec CadlagPath::at(double t) const {
    if (t < -kTimeTol) throw std::invalid_argument("CadlagPath::at: t must be >= 0");
    if (tail_ && time_le(tail_->time, t)) return tail_->value;
    return base_at(t);
}

Vec CadlagPath::left_limit(double t) const {
    if (t < -kTimeTol) throw std::invalid_argument("CadlagPath::left_limit: t must be >= 0");
    if (tail_ && time_lt(tail_->time, t)) return tail_->value;
    return base_left(t);
}

Vec CadlagPath::jump(double t) const {
    Vec v = at(t), l = left_limit(t);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= l[k];
    return v;
}

PathSample CadlagPath::sample(double t) const {
    PathSample s;
    s.value = at(t);
    s.left_limit = left_limit(t);
    s.jump = s.value;
    for (std::size_t k = 0; k < s.jump.size(); ++k) s.jump[k] -= s.left_limit[k];
    return s;
}

double CadlagPath::value(double t) const {
    if (dim() != 1) throw std::logic_error("value(): path is not one-dimensional");
    return at(t)[0];
}

double CadlagPath::left(double t) const {
    if (dim() != 1) throw std::logic_error("left(): path is not one-dimensional");
    return left_limit(t)[0];
}

double CadlagPath::jump1(double t) const {
    if (dim() != 1) throw std::logic_error("jump1(): path is not one-dimensional");
    return jump(t)[0];
}

CadlagPath CadlagPath::stop(double t, StopSide side) const {
    if (t < -kTimeTol) throw std::invalid_argument("stop: t must be >= 0");
    t = std::max(t, 0.0);
    if (side == StopSide::at) {
        if (tail_ && time_le(tail_->time, t)) return *this;
        return CadlagPath(data_, Tail{t, at(t)});
    }
    if (tail_ && time_lt(tail_->time, t)) return *this;
    return CadlagPath(data_, Tail{t, left_limit(t)});
}

CadlagPath CadlagPath::vertical_perturb(double t, const Vec& e) const {
    if (t < -kTimeTol) throw std::invalid_argument("vertical_perturb: t must be >= 0");
    if (static_cast<int>(e.size()) != dim())
        throw std::invalid_argument("vertical_perturb: dimension mismatch");
    t = std::max(t, 0.0);
    Vec l = left_limit(t);
    Vec nv(l.size());
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (!(e[k] > -l[k]))
            throw std::domain_error("vertical_perturb: e <= -x(t-) violates positivity");
        nv[k] = l[k] + e[k];
    }
    if (tail_ && time_lt(tail_->time, t)) return materialize().vertical_perturb(t, e);
    return CadlagPath(data_, Tail{t, std::move(nv)});
}

CadlagPath CadlagPath::vertical_perturb(double t, double e) const {
    return vertical_perturb(t, Vec{e});
}

CadlagPath CadlagPath::bump(double t, const Vec& e) const {
    if (static_cast<int>(e.size()) != dim()) throw std::invalid_argument("bump: dimension mismatch");
    Vec l = left_limit(t), v = at(t);
    Vec shifted(e.size());
    for (std::size_t k = 0; k < e.size(); ++k) {
        shifted[k] = v[k] - l[k] + e[k];  // jump + e
        if (!(shifted[k] > -l[k])) throw std::domain_error("bump: result not positive");
    }
    return vertical_perturb(t, shifted);
}

CadlagPath CadlagPath::bump(double t, double e) const { return bump(t, Vec{e}); }

double CadlagPath::base_integral(double t, int k) const {
    const auto idx = index_at(t);
    if (idx < 0) return 0.0;
    const auto i = static_cast<std::size_t>(idx);
    double acc = d().prefix_integral[i * d().dim + k];
    const double dt = t - d().times[i];
    if (dt <= 0.0) return acc;
    if (d().mode == PathMode::step || i + 1 >= d().times.size()) {
        acc += d().val(i, k) * dt;
    } else {
        acc += 0.5 * (d().val(i, k) + base_at1(t, k)) * dt;
    }
    return acc;
}

double CadlagPath::running_integral(double t, int k) const {
    if (t <= kTimeTol) return 0.0;
    if (!tail_ || time_le(t, tail_->time)) return base_integral(t, k);
    return base_integral(tail_->time, k) + tail_->value[k] * (t - tail_->time);
}

double CadlagPath::base_max(double t, int k, bool closed) const {
    // closed: sup over [0, t]; else sup over [0, t)
    if (!closed && t <= kTimeTol) return kNegInf;
    const auto idx = closed ? index_at(t) : index_before(t);
    if (idx < 0) return closed ? base_at1(t, k) : kNegInf;
    const auto i = static_cast<std::size_t>(idx);
    double m = d().prefix_max[i * d().dim + k];
    if (d().mode == PathMode::step) return m;
    const double edge = closed ? base_at1(t, k) : base_left1(t, k);
    return std::max(m, edge);
}

double CadlagPath::running_max(double t, int k) const {
    if (!tail_ || time_lt(t, tail_->time)) return base_max(t, k, true);
    double m = tail_->value[k];
    const double before = base_max(tail_->time, k, false);
    if (before > m) m = before;
    return m;
}

double CadlagPath::running_max_before(double t, int k) const {
    if (!tail_ || time_le(t, tail_->time)) return base_max(t, k, false);
    double m = tail_->value[k];
    const double before = base_max(tail_->time, k, false);
    if (before > m) m = before;
    return m;
}

double CadlagPath::base_qv(double t, int k, bool include_at_t) const {
    const auto idx = include_at_t ? index_at(t) : index_before(t);
    if (idx < 0) return 0.0;
    return d().prefix_qv[static_cast<std::size_t>(idx) * d().dim + k];
}

double CadlagPath::jump_qv(double t, int k) const {
    if (!tail_ || time_lt(t, tail_->time)) return base_qv(t, k, true);
    const double tj = tail_->value[k] - base_left1(tail_->time, k);
    return base_qv(tail_->time, k, false) + tj * tj;
}

std::vector<double> CadlagPath::jump_times(double up_to) const {
    std::vector<double> out;
    const auto& dd = d();
    for (std::size_t i = 0; i < dd.times.size(); ++i) {
        const double ti = dd.times[i];
        if (time_lt(up_to, ti)) break;
        if (tail_ && !time_lt(ti, tail_->time)) break;
        for (int k = 0; k < dd.dim; ++k) {
            const double left = (i == 0) ? dd.x0[k]
                                         : (dd.mode == PathMode::step ? dd.val(i - 1, k)
                                                                      : dd.leftval(i, k));
            if (dd.val(i, k) != left) {
                out.push_back(ti);
                break;
            }
        }
    }
    if (tail_ && time_le(tail_->time, up_to)) {
        Vec l = base_left(tail_->time);
        for (int k = 0; k < d().dim; ++k) {
            if (tail_->value[k] != l[k]) {
                out.push_back(tail_->time);
                break;
            }
        }
    }
    return out;
}

bool CadlagPath::positive() const {
    const auto& dd = d();
    for (double v : dd.values)
        if (!(v > 0.0)) return false;
    for (std::size_t i = 0; i < dd.times.size(); ++i)
        if (dd.has_left[i])
            for (int k = 0; k < dd.dim; ++k)
                if (!(dd.leftval(i, k) > 0.0)) return false;
    for (double v : dd.x0)
        if (!(v > 0.0)) return false;
    if (tail_)
        for (double v : tail_->value)
            if (!(v > 0.0)) return false;
    return true;
}

bool CadlagPath::within_bounds(double lo, double hi, double t0, double t1, int k) const {
    auto inside = [&](double v) { return v > lo && v < hi; };
    if (!inside(at(t0)[k]) || !inside(left_limit(t0)[k])) return false;
    const auto& dd = d();
    for (std::size_t i = 0; i < dd.times.size(); ++i) {
        const double ti = dd.times[i];
        if (time_lt(ti, t0) || time_lt(t1, ti)) continue;
        if (tail_ && time_lt(tail_->time, ti)) break;
        if (!inside(dd.val(i, k)) || !inside(dd.leftval(i, k))) return false;
    }
    if (tail_ && time_le(t0, tail_->time) && time_le(tail_->time, t1)) {
        if (!inside(tail_->value[k])) return false;
    }
    if (!inside(at(t1)[k]) || !inside(left_limit(t1)[k])) return false;
    return true;
}

CadlagPath CadlagPath::materialize() const {
    if (!tail_) return *this;
    const auto& dd = d();
    const double tau = tail_->time;
    std::vector<double> ts;
    std::vector<Vec> vs;
    for (std::size_t i = 0; i < dd.times.size() && time_lt(dd.times[i], tau); ++i) {
        ts.push_back(dd.times[i]);
        Vec v(dd.dim);
        for (int k = 0; k < dd.dim; ++k) v[k] = dd.val(i, k);
        vs.push_back(std::move(v));
    }
    std::optional<Vec> left_at_tau;
    if (dd.mode == PathMode::linear && !ts.empty()) {
        left_at_tau = base_left(tau);
    }
    if (ts.empty() || !time_eq(ts.back(), tau)) {
        ts.push_back(std::max(tau, 0.0));
        vs.push_back(tail_->value);
    }
    CadlagPath flat = make(dd.mode, std::move(ts), std::move(vs), dd.x0);
    if (left_at_tau && dd.mode == PathMode::linear) {
        flat = flat.with_left_value(tau, *left_at_tau);
    }
    // carry over explicit left values before the cut
    for (std::size_t i = 0; i < dd.times.size() && time_lt(dd.times[i], tau); ++i) {
        if (dd.has_left[i]) {
            Vec lv(dd.dim);
            for (int k = 0; k < dd.dim; ++k) lv[k] = dd.leftval(i, k);
            flat = flat.with_left_value(dd.times[i], lv);
        }
    }
    return flat;
}

// ---------------------------------------------------------------------------
// PartitionLadder

PartitionLadder PartitionLadder::dyadic(double horizon, int min_level, int max_level) {
    if (!(horizon > 0.0)) throw std::invalid_argument("PartitionLadder: horizon must be > 0");
    if (min_level < 0 || max_level < min_level || max_level > 26)
        throw std::invalid_argument("PartitionLadder: bad level range");
    PartitionLadder l;
    l.horizon_ = horizon;
    for (int n = min_level; n <= max_level; ++n) {
        const std::size_t cells = std::size_t{1} << n;
        std::vector<double> pts(cells + 1);
        for (std::size_t i = 0; i <= cells; ++i)
            pts[i] = horizon * std::ldexp(static_cast<double>(i), -n);
        l.labels_.push_back(n);
        l.grids_.push_back(std::move(pts));
    }
    return l;
}

PartitionLadder PartitionLadder::from_grids(double horizon, std::vector<std::vector<double>> grids) {
    if (grids.empty()) throw std::invalid_argument("PartitionLadder: no grids");
    PartitionLadder l;
    l.horizon_ = horizon;
    double prev_mesh = std::numeric_limits<double>::infinity();
    int label = 0;
    for (auto& g : grids) {
        if (g.size() < 2 || !time_eq(g.front(), 0.0) || !time_eq(g.back(), horizon))
            throw std::invalid_argument("PartitionLadder: grid must run from 0 to horizon");
        double mesh = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i) {
            if (!(g[i] > g[i - 1] + kTimeTol))
                throw std::invalid_argument("PartitionLadder: grid not strictly increasing");
            mesh = std::max(mesh, g[i] - g[i - 1]);
        }
        if (!(mesh < prev_mesh)) throw std::invalid_argument("PartitionLadder: mesh must strictly decrease");
        prev_mesh = mesh;
        l.labels_.push_back(label++);
        l.grids_.push_back(std::move(g));
    }
    return l;
}

std::size_t PartitionLadder::slot(int level) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == level) return i;
    throw std::out_of_range("PartitionLadder: no such level");
}

const std::vector<double>& PartitionLadder::points(int level) const { return grids_[slot(level)]; }

double PartitionLadder::mesh(int level) const {
    const auto& g = grids_[slot(level)];
    double m = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) m = std::max(m, g[i] - g[i - 1]);
    return m;
}

double PartitionLadder::predecessor(int level, double t) const {
    const auto& g = grids_[slot(level)];
    auto it = std::lower_bound(g.begin(), g.end(), t - kTimeTol);
    if (it == g.begin()) return 0.0;  // max(empty) := 0
    return *std::prev(it);
}

double PartitionLadder::successor(int level, double t) const {
    const auto& g = grids_[slot(level)];
    auto it = std::lower_bound(g.begin(), g.end(), t - kTimeTol);
    if (it == g.end()) return g.back();  // min(empty) := last point
    return *it;
}

// ---------------------------------------------------------------------------
// approximate

CadlagPath approximate(const CadlagPath& path, const PartitionLadder& ladder, int level) {
    const auto& g = ladder.points(level);
    std::vector<double> ts;
    std::vector<Vec> vs;
    ts.reserve(g.size());
    vs.reserve(g.size());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        ts.push_back(g[i]);
        vs.push_back(path.at(g[i + 1]));
    }
    ts.push_back(g.back());
    vs.push_back(path.at(g.back()));
    return CadlagPath::make(PathMode::step, std::move(ts), std::move(vs), path.initial_value());
}

// ---------------------------------------------------------------------------
// p-th order variation

namespace {

// Geometric-tail extrapolation: when the last gaps decay at a stable ratio r,
// the tail sums to gap * r / (1 - r) beyond the top estimate.
std::optional<double> geometric_limit(const std::vector<double>& est) {
    const std::size_t n = est.size();
    if (n < 3) return std::nullopt;
    const double d1 = est[n - 2] - est[n - 3];
    const double d2 = est[n - 1] - est[n - 2];
    if (std::abs(d1) < 1e-300) return std::nullopt;
    const double r = d2 / d1;
    if (!(r > 0.25 && r < 0.75)) return std::nullopt;
    if (n >= 4) {
        const double d0 = est[n - 3] - est[n - 4];
        if (std::abs(d0) < 1e-300) return std::nullopt;
        const double r0 = d1 / d0;
        if (!(r0 > 0.25 && r0 < 0.75)) return std::nullopt;
    }
    return est[n - 1] + d2 * r / (1.0 - r);
}

}  // namespace

double VariationEstimate::scalar_level(int level) const {
    for (const auto& lv : levels)
        if (lv.level == level) return lv.tensor[0];
    throw std::out_of_range("VariationEstimate: no such level");
}

double VariationEstimate::scalar_limit() const {
    if (!limit) throw std::logic_error("VariationEstimate: no limit declared");
    return (*limit)[0];
}

VariationEstimate p_variation(const CadlagPath& path, const PartitionLadder& ladder, int p,
                              double t, const VariationOptions& opts) {
    if (p < 2 || p % 2 != 0) throw std::invalid_argument("p_variation: p must be a positive even integer");
    const int dim = path.dim();
    if (dim > 1 && p != 2)
        throw std::invalid_argument("p_variation: d > 1 supports p = 2 only");
    if (time_lt(ladder.horizon(), t)) throw std::invalid_argument("p_variation: t beyond horizon");

    VariationEstimate est;
    est.p = p;
    est.dim = dim;
    const std::size_t tensor_size = (dim == 1) ? 1 : static_cast<std::size_t>(dim) * dim;

    for (int level : ladder.levels()) {
        const auto& g = ladder.points(level);
        Vec acc(tensor_size, 0.0);
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
            if (!time_le(g[i], t)) break;
            if (dim == 1) {
                const double inc = path.value(g[i + 1]) - path.value(g[i]);
                double pw = 1.0;
                for (int q = 0; q < p; ++q) pw *= inc;
                acc[0] += pw;
            } else {
                Vec a = path.at(g[i + 1]), b = path.at(g[i]);
                for (int r = 0; r < dim; ++r)
                    for (int c = 0; c < dim; ++c)
                        acc[static_cast<std::size_t>(r) * dim + c] += (a[r] - b[r]) * (a[c] - b[c]);
            }
        }
        est.levels.push_back({level, std::move(acc)});
    }

    const std::size_t n = est.levels.size();
    if (n >= 2) {
        double gap = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < tensor_size; ++k) {
            gap = std::max(gap, std::abs(est.levels[n - 1].tensor[k] - est.levels[n - 2].tensor[k]));
            scale = std::max(scale, std::abs(est.levels[n - 1].tensor[k]));
        }
        est.top_gap = gap;
        const double tol = std::max(opts.abs_tol, opts.rel_tol * scale);
        bool cauchy = gap < tol;
        Vec lim(tensor_size);
        bool geo_all = true;
        for (std::size_t k = 0; k < tensor_size; ++k) {
            std::vector<double> seq;
            seq.reserve(n);
            for (const auto& lv : est.levels) seq.push_back(lv.tensor[k]);
            if (auto gl = geometric_limit(seq)) {
                const bool diagonal = dim == 1 || (k / dim == k % dim);
                lim[k] = diagonal ? std::max(0.0, *gl) : *gl;
            } else {
                geo_all = false;
                lim[k] = seq.back();
            }
        }
        if (cauchy || geo_all) {
            est.converged = true;
            est.limit = geo_all ? lim : est.levels.back().tensor;
        }
    }
    return est;
}

}  // namespace pathhedge
