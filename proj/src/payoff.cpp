#include "pathhedge/payoff.hpp"

#include <algorithm>
#include <cmath>

namespace pathhedge {

namespace {
double pos(double v) { return v > 0.0 ? v : 0.0; }
}

Payoff make_payoff(PayoffKind kind, double maturity, double strike,
                   std::optional<Strategy> portfolio) {
    if (!(maturity > 0.0)) throw std::invalid_argument("make_payoff: maturity must be > 0");
    if (strike < 0.0) throw std::invalid_argument("make_payoff: strike must be >= 0");
    if (kind == PayoffKind::portfolio_call && !portfolio)
        throw std::invalid_argument("make_payoff: portfolio_call needs a strategy");
    if (kind == PayoffKind::lookback && strike != 0.0)
        throw std::invalid_argument("make_payoff: lookback takes no strike");
    Payoff p;
    p.kind = kind;
    p.maturity = maturity;
    p.strike = strike;
    p.portfolio = std::move(portfolio);
    return p;
}

std::string Payoff::label() const {
    switch (kind) {
        case PayoffKind::asian: return "asian";
        case PayoffKind::lookback: return "lookback";
        case PayoffKind::portfolio_call: return "portfolio_call";
    }
    return "?";
}

double Payoff::terminal(const CadlagPath& x) const {
    if (x.dim() != 1) throw std::invalid_argument("payoff: one-dimensional underlying required");
    const double T = maturity;
    switch (kind) {
        case PayoffKind::asian:
            return pos(x.running_integral(T) / T - strike);
        case PayoffKind::lookback:
            return pos(x.running_max(T) - x.value(T));
        case PayoffKind::portfolio_call:
            return pos(portfolio_value(*portfolio, T, x.stop(T, StopSide::at)) - strike);
    }
    return 0.0;
}

double Payoff::running(double t, const CadlagPath& x_t) const {
    return terminal(x_t.stop(t, StopSide::at));
}

double Payoff::perturbed(double t, const CadlagPath& x, double e) const {
    if (x.dim() != 1) throw std::invalid_argument("payoff: one-dimensional underlying required");
    if (t < -kTimeTol) throw std::invalid_argument("perturbed: t must be >= 0");
    const double T = maturity;
    if (time_lt(T, t)) return terminal(x);  // bump after maturity leaves H(x_T)
    const double left = x.left(t);
    if (!(e > -left)) throw std::domain_error("perturbed: e <= -x(t-)");
    switch (kind) {
        case PayoffKind::asian: {
            const double A = x.running_integral(t);
            return pos((A + (T - t) * (left + e)) / T - strike);
        }
        case PayoffKind::lookback: {
            const double m = x.running_max_before(t);  // -inf at t = 0
            return std::max(m - left - e, 0.0);
        }
        case PayoffKind::portfolio_call: {
            const CadlagPath before = x.stop(t, StopSide::before);
            const double v = portfolio_value(*portfolio, t, before);
            const double grad = (*portfolio).phi[0](t, before);
            return pos(v + grad * e - strike);
        }
    }
    return 0.0;
}

double Payoff::perturbed_bruteforce(double t, const CadlagPath& x, double e) const {
    return terminal(x.vertical_perturb(t, e));
}

Functional Payoff::running_functional() const {
    Payoff self = *this;
    return Functional(label(), [self](double t, const CadlagPath& x) { return self.running(t, x); });
}

// ---------------------------------------------------------------------------

AffineCheck affine_check(const Payoff& p, double t, const CadlagPath& x,
                         std::span<const double> e_grid, double tol) {
    if (e_grid.size() < 3) throw std::invalid_argument("affine_check: need >= 3 grid points");
    std::vector<double> es(e_grid.begin(), e_grid.end());
    std::sort(es.begin(), es.end());
    std::vector<double> fs(es.size());
    for (std::size_t i = 0; i < es.size(); ++i) fs[i] = p.perturbed(t, x, es[i]);
    AffineCheck chk;
    for (std::size_t i = 0; i + 2 < es.size(); ++i) {
        const double s01 = (fs[i + 1] - fs[i]) / (es[i + 1] - es[i]);
        const double s12 = (fs[i + 2] - fs[i + 1]) / (es[i + 2] - es[i + 1]);
        const double curv = std::abs((s12 - s01) / (es[i + 2] - es[i]));
        if (curv > chk.max_curvature) {
            chk.max_curvature = curv;
            if (curv > tol) {
                chk.affine = false;
                chk.witness = AffineWitness{t, es[i], es[i + 1], es[i + 2], curv, 0};
            }
        }
    }
    return chk;
}

NotAffinePayoff::NotAffinePayoff(const AffineWitness& w)
    : std::domain_error("payoff is not vertically affine (curvature " +
                        std::to_string(w.curvature) + " at t = " + std::to_string(w.t) + ")"),
      witness(w) {}

double PerfectHedge::initial_price(const CadlagPath& x) const {
    return payoff.running(0.0, x.stop(0.0, StopSide::at));
}

PerfectHedge perfect_hedge(const Payoff& p, std::span<const CadlagPath> certification,
                           double tol) {
    for (std::size_t pi = 0; pi < certification.size(); ++pi) {
        const CadlagPath& path = certification[pi];
        for (std::size_t bi = 0; bi < path.breakpoint_count(); ++bi) {
            const double t = path.breakpoint_time(bi);
            if (time_lt(p.maturity, t)) break;
            const double left = path.left(t);
            std::vector<double> grid(11);
            for (int k = 0; k < 11; ++k) grid[static_cast<std::size_t>(k)] =
                -0.8 * left + 1.6 * left * k / 10.0;
            AffineCheck chk = affine_check(p, t, path, grid, tol);
            if (!chk.affine) {
                chk.witness->path_index = pi;
                throw NotAffinePayoff(*chk.witness);
            }
        }
    }

    Payoff payoff = p;
    Functional phi(payoff.label() + ".hedge", [payoff](double t, const CadlagPath& x) {
        const double d = x.jump1(t);
        const double step = 0.1 * std::max(1.0, x.value(t));
        return (payoff.perturbed(t, x, d + step) - payoff.perturbed(t, x, d)) / step;
    });
    Functional value(payoff.label() + ".value",
                     [payoff](double t, const CadlagPath& x) { return payoff.running(t, x); });
    Strategy s = strategy_from_value(payoff.label() + ".perfect_hedge", value, {phi});
    s.exact_gain = [payoff](const CadlagPath& x, double) {
        return payoff.terminal(x) - payoff.running(0.0, x.stop(0.0, StopSide::before));
    };
    PerfectHedge hedge{std::move(s), std::move(payoff)};
    return hedge;
}

}  // namespace pathhedge
