#include "pathhedge/superhedge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace pathhedge {

namespace {

void check_params(const AsianParams& P) {
    if (!(P.maturity > 0.0)) throw std::invalid_argument("asian: maturity must be > 0");
    if (P.strike < 0.0) throw std::invalid_argument("asian: strike must be >= 0");
    if (!P.bounds.valid()) throw std::invalid_argument("asian: need 0 <= a < b");
}

void check_state(const AsianParams& P, const AsianState& s) {
    if (s.t < -kTimeTol || time_lt(P.maturity, s.t))
        throw std::domain_error("asian: t outside [0, T]");
    if (!(s.spot > P.bounds.a && s.spot < P.bounds.b))
        throw std::domain_error("asian: spot outside (a, b)");
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

double branch_plus(const AsianParams& P, const AsianState& s) {
    return pos((s.avg_integral + P.bounds.b * (P.maturity - s.t)) / P.maturity - P.strike);
}

double branch_minus(const AsianParams& P, const AsianState& s) {
    return pos((s.avg_integral + P.bounds.a * (P.maturity - s.t)) / P.maturity - P.strike);
}

}  // namespace

double asian_cost_to_go(const AsianParams& P, const AsianState& s) {
    check_params(P);
    check_state(P, s);
    const double p = (s.spot - P.bounds.a) / (P.bounds.b - P.bounds.a);
    return branch_plus(P, s) * p + branch_minus(P, s) * (1.0 - p);
}

double asian_delta(const AsianParams& P, const AsianState& s) {
    check_params(P);
    check_state(P, s);
    return (branch_plus(P, s) - branch_minus(P, s)) / (P.bounds.b - P.bounds.a);
}

double asian_theta(const AsianParams& P, const AsianState& s) {
    check_params(P);
    check_state(P, s);
    const double hp = (s.avg_integral + P.bounds.b * (P.maturity - s.t)) / P.maturity - P.strike;
    const double hm = (s.avg_integral + P.bounds.a * (P.maturity - s.t)) / P.maturity - P.strike;
    if (hp > 0.0 && hm <= 0.0)
        return (s.spot - P.bounds.b) * (s.spot - P.bounds.a) /
               (P.maturity * (P.bounds.b - P.bounds.a));
    return 0.0;
}

double whole_space_limit(double t, double avg_integral, double spot, double maturity,
                         double strike) {
    if (!(maturity > 0.0)) throw std::invalid_argument("whole_space_limit: maturity must be > 0");
    if (t < -kTimeTol || time_lt(maturity, t))
        throw std::domain_error("whole_space_limit: t outside [0, T]");
    return pos(avg_integral / maturity - strike) + spot * (maturity - t) / maturity;
}

double whole_space_gap(const AsianParams& P, const AsianState& s) {
    return asian_cost_to_go(P, s) -
           whole_space_limit(s.t, s.avg_integral, s.spot, P.maturity, P.strike);
}

AsianState asian_state(const CadlagPath& x_t, double t) {
    AsianState s;
    s.t = t;
    s.avg_integral = x_t.running_integral(t);
    s.spot = x_t.value(t);
    return s;
}

Functional asian_value_functional(const AsianParams& P) {
    Functional F("asian_cost_to_go",
                 [P](double t, const CadlagPath& x) { return asian_cost_to_go(P, asian_state(x, t)); });
    F.with_vertical([P](double t, const CadlagPath& x) {
        return Vec{asian_delta(P, asian_state(x, t))};
    });
    F.with_horizontal([P](double t, const CadlagPath& x) {
        return asian_theta(P, asian_state(x, t));
    });
    return F;
}

Functional asian_delta_functional(const AsianParams& P) {
    return Functional("asian_delta",
                      [P](double t, const CadlagPath& x) { return asian_delta(P, asian_state(x, t)); });
}

Strategy asian_superhedge_strategy(const AsianParams& P, double t0) {
    Functional value("asian_superhedge.value", [P, t0](double t, const CadlagPath& x) {
        const double u = asian_cost_to_go(P, asian_state(x, t));
        const double decay =
            t > t0 + kTimeTol ? asian_theta_integral(P, x.stop(t, StopSide::at), t0, t) : 0.0;
        return u - decay;
    });
    Strategy s = strategy_from_value("asian_superhedge", value, {asian_delta_functional(P)});
    AsianParams params = P;
    s.exact_gain = [params, t0](const CadlagPath& x, double horizon) {
        double gain = 0.0;
        for (double u : x.jump_times(std::min(horizon, params.maturity))) {
            if (!time_lt(t0, u)) continue;
            const AsianState st{u, x.running_integral(u), x.left(u)};
            gain += asian_delta(params, st) * x.jump1(u);
        }
        return gain;
    };
    return s;
}

// ---------------------------------------------------------------------------
// Exact theta integral along a step path. On a constant piece z starting at
// (u0, A0), the H+ branch argument decreases at rate (z - b)/T < 0 and the
// H- argument increases at rate (z - a)/T > 0, so the {H+ > 0, H- <= 0}
// window of the piece is an initial interval with closed-form endpoints.

namespace {

struct Piece {
    double start;
    double end;
    double value;
};

// Constant pieces of a path covering [s0, s1]. The path must be piecewise
// constant there (step mode, or a linear path past its cut time).
std::vector<Piece> constant_pieces(const CadlagPath& z, double s0, double s1) {
    const CadlagPath flat = z.materialize();
    std::vector<double> cuts{s0};
    for (std::size_t i = 0; i < flat.breakpoint_count(); ++i) {
        const double ti = flat.breakpoint_time(i);
        if (time_lt(s0, ti) && time_lt(ti, s1)) cuts.push_back(ti);
    }
    cuts.push_back(s1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= kTimeTol) continue;
        const double v = flat.value(cuts[i]);
        if (flat.mode() == PathMode::linear &&
            (flat.value(0.5 * (cuts[i] + cuts[i + 1])) != v || flat.left(cuts[i + 1]) != v))
            throw std::invalid_argument(
                "asian_theta_integral: path not piecewise constant on [s0, s1]");
        pieces.push_back({cuts[i], cuts[i + 1], v});
    }
    return pieces;
}

}  // namespace

double asian_theta_integral(const AsianParams& P, const CadlagPath& z, double s0, double s1) {
    check_params(P);
    if (time_lt(s1, s0)) throw std::invalid_argument("asian_theta_integral: s1 < s0");
    if (s1 - s0 <= kTimeTol) return 0.0;
    const double T = P.maturity, K = P.strike;
    const double a = P.bounds.a, b = P.bounds.b;
    double A = z.running_integral(s0);
    double acc = 0.0;
    for (const Piece& pc : constant_pieces(z, s0, s1)) {
        const double len = pc.end - pc.start;
        const double zv = pc.value;
        // H+ active until d_plus past pc.start, H- inactive until d_minus
        const double rhs_p = K * T - A - b * (T - pc.start);  // H+ > 0 iff negative
        const double rhs_m = K * T - A - a * (T - pc.start);  // H- <= 0 while (z-a) d <= rhs_m
        double active = 0.0;
        if (rhs_p < 0.0) {
            const double d_plus = -rhs_p / (b - zv);
            const double d_minus = rhs_m / (zv - a);  // may be negative: H- already > 0
            active = std::min(len, std::min(d_plus, d_minus));
            active = std::max(active, 0.0);
        }
        acc += (zv - b) * (zv - a) / (T * (b - a)) * active;
        A += zv * len;
    }
    return acc;
}

// ---------------------------------------------------------------------------

VerificationReport verification_check(const AsianParams& P, const CadlagPath& x, double t,
                                      std::span<const double> epsilons, double tol) {
    check_params(P);
    const double T = P.maturity;
    const double a = P.bounds.a, b = P.bounds.b;
    if (time_lt(T, t)) throw std::invalid_argument("verification_check: t beyond maturity");
    const double spot = x.value(t);
    if (!(spot > a && spot < b)) throw std::domain_error("verification_check: spot out of bounds");

    VerificationReport rep;

    // theta sign scan over (s, z) states reachable from (t, A_t)
    const double A_t = x.running_integral(t);
    for (int i = 0; i <= 24; ++i) {
        const double s = t + (T - t) * i / 24.0;
        for (int j = 1; j < 24; ++j) {
            const double zv = a + (b - a) * j / 24.0;
            const AsianState st{s, A_t + zv * (s - t), zv};
            const double th = asian_theta(P, st);
            rep.theta_scan_max = std::max(rep.theta_scan_max, th);
            rep.theta_nonpositive = rep.theta_nonpositive && th <= tol;
        }
    }

    std::vector<double> eps_sorted(epsilons.begin(), epsilons.end());
    std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
    double prev_integral = -std::numeric_limits<double>::infinity();
    rep.sup_estimate = -std::numeric_limits<double>::infinity();
    bool all_within = true;
    for (double eps : eps_sorted) {
        if (!(eps > 0.0) || !(eps < b - a) || !(b - eps > a))
            throw std::invalid_argument("verification_check: bad epsilon");
        // z_eps: x(t) on [t, t+eps), b - eps afterwards
        CadlagPath z = x.stop(t, StopSide::at);
        if (t + eps < T) z = z.vertical_perturb(t + eps, (b - eps) - spot);
        const double integral = asian_theta_integral(P, z, t, T);
        VerificationReport::EpsRow row;
        row.eps = eps;
        row.theta_integral = integral;
        row.lower_bound = -eps * (1.0 - eps / (b - a));
        row.within = integral >= row.lower_bound - tol && integral <= tol;
        all_within = all_within && row.within;
        if (integral < prev_integral - tol) rep.sup_increasing = false;
        prev_integral = integral;
        rep.sup_estimate = std::max(rep.sup_estimate, integral);
        rep.rows.push_back(row);
    }
    rep.all_within_bound = all_within;
    rep.pass = all_within && rep.theta_nonpositive && rep.sup_increasing;
    return rep;
}

std::string VerificationReport::to_json() const {
    nlohmann::json j;
    j["sup_estimate"] = sup_estimate;
    j["sup_increasing"] = sup_increasing;
    j["theta_scan_max"] = theta_scan_max;
    j["theta_nonpositive"] = theta_nonpositive;
    j["pass"] = pass;
    for (const auto& r : rows) {
        j["epsilons"].push_back(
            {{"eps", r.eps}, {"theta_integral", r.theta_integral},
             {"lower_bound", r.lower_bound}, {"within", r.within}});
    }
    return j.dump();
}

// ---------------------------------------------------------------------------

HedgeReport superhedge_backtest(const AsianParams& P, const CadlagPath& path,
                                const PartitionLadder& ladder, double t0) {
    check_params(P);
    const double T = P.maturity;
    if (t0 < -kTimeTol || !time_lt(t0, T))
        throw std::invalid_argument("superhedge_backtest: need 0 <= t0 < T");
    if (!time_eq(ladder.horizon(), T))
        throw std::invalid_argument("superhedge_backtest: ladder horizon must equal maturity");
    if (!path.within_bounds(P.bounds.a, P.bounds.b, t0, T))
        throw std::domain_error("superhedge_backtest: path leaves (a, b) on [t0, T]");

    HedgeReport rep;
    rep.t0 = t0;
    rep.price = asian_cost_to_go(P, asian_state(path, t0));
    {
        AsianState terminal{T, path.running_integral(T), path.value(T)};
        rep.payoff_original = std::max(0.0, terminal.avg_integral / T - P.strike);
    }

    for (int level : ladder.levels()) {
        const auto& g = ladder.points(level);
        const CadlagPath xn = approximate(path, ladder, level);
        HedgeLevelRow row;
        row.level = level;

        // locate the first grid index >= t0
        std::size_t i0 = 0;
        while (i0 < g.size() && time_lt(g[i0], t0)) ++i0;

        // price anchored on the level scenario: A from x^n, spot x(t_{i0})
        double A = xn.running_integral(g[i0]);
        const double spot0 = path.value(g[i0]);
        row.price = asian_cost_to_go(P, AsianState{g[i0], A, spot0});

        const bool top = level == ladder.max_level();
        std::vector<std::pair<double, double>> trace;
        for (std::size_t i = i0; i + 1 < g.size(); ++i) {
            if (!time_le(g[i], T)) break;
            const double inc = path.value(g[i + 1]) - path.value(g[i]);
            const double delta =
                (inc != 0.0 || top)
                    ? asian_delta(P, AsianState{g[i], A, path.value(g[i])})
                    : 0.0;
            if (inc != 0.0) row.gain += delta * inc;
            if (top) trace.emplace_back(g[i], delta);
            A += path.value(g[i + 1]) * (g[i + 1] - g[i]);
        }
        row.theta_integral = asian_theta_integral(P, xn, g[i0], T);
        row.payoff = std::max(0.0, xn.running_integral(T) / T - P.strike);
        row.value_T = row.price + row.gain;
        row.slack = row.value_T - row.payoff;
        row.identity_residual = std::abs(row.value_T - row.payoff + row.theta_integral);
        rep.levels.push_back(row);

        if (top) {
            const std::size_t stride = std::max<std::size_t>(1, trace.size() / 128);
            for (std::size_t i = 0; i < trace.size(); i += stride) rep.delta_trace.push_back(trace[i]);
        }
    }

    const HedgeLevelRow& head = rep.levels.back();
    rep.value_T = head.value_T;
    rep.payoff = head.payoff;
    rep.pnl = head.value_T - head.payoff;
    rep.theta_integral = head.theta_integral;
    rep.domination_slack = head.slack;
    rep.identity_residual = head.identity_residual;
    if (rep.levels.size() >= 2) {
        const double gap = std::abs(rep.levels.back().value_T - rep.levels[rep.levels.size() - 2].value_T);
        rep.integral_converged = gap < std::max(1e-6, 1e-4 * std::abs(rep.value_T));
    }

    if (path.mode() == PathMode::step && !path.has_tail()) {
        HedgeExact ex;
        double gain = 0.0;
        for (double s : path.jump_times(T)) {
            if (!time_lt(t0, s)) continue;
            AsianState st{s, path.running_integral(s), path.left(s)};
            gain += asian_delta(P, st) * path.jump1(s);
        }
        ex.gain = gain;
        ex.value_T = rep.price + gain;
        ex.payoff = rep.payoff_original;
        ex.theta_integral = asian_theta_integral(P, path, t0, T);
        ex.slack = ex.value_T - ex.payoff;
        ex.identity_residual = std::abs(ex.value_T - ex.payoff + ex.theta_integral);
        rep.exact = ex;
    }
    return rep;
}

std::string HedgeReport::to_json() const {
    nlohmann::json j;
    j["t0"] = t0;
    j["price"] = price;
    j["payoff_original"] = payoff_original;
    j["value_T"] = value_T;
    j["payoff"] = payoff;
    j["pnl"] = pnl;
    j["theta_integral"] = theta_integral;
    j["domination_slack"] = domination_slack;
    j["identity_residual"] = identity_residual;
    j["integral_converged"] = integral_converged;
    for (const auto& r : levels) {
        j["levels"].push_back({{"level", r.level},
                               {"gain", r.gain},
                               {"price", r.price},
                               {"value_T", r.value_T},
                               {"payoff", r.payoff},
                               {"theta_integral", r.theta_integral},
                               {"slack", r.slack},
                               {"identity_residual", r.identity_residual}});
    }
    if (exact) {
        j["exact"] = {{"gain", exact->gain},
                      {"value_T", exact->value_T},
                      {"payoff", exact->payoff},
                      {"theta_integral", exact->theta_integral},
                      {"slack", exact->slack},
                      {"identity_residual", exact->identity_residual}};
    }
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& [t, dlt] : delta_trace) jt.push_back({t, dlt});
    j["delta_trace"] = jt;
    return j.dump();
}

}  // namespace pathhedge
