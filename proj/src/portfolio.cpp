#include "pathhedge/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace pathhedge {

Strategy strategy_from_value(std::string label, const Functional& V,
                             std::vector<Functional> phi) {
    Strategy s;
    s.label = std::move(label);
    s.phi = std::move(phi);
    std::vector<Functional> phis = s.phi;
    Functional value = V;
    s.psi = Functional(s.label + ".psi", [value, phis](double t, const CadlagPath& x) {
        double acc = value(t, x);
        const Vec spot = x.at(t);
        for (std::size_t k = 0; k < phis.size(); ++k) acc -= phis[k](t, x) * spot[k];
        return acc;
    });
    s.value = V;
    return s;
}

Strategy buy_and_hold(double shares, double cash) {
    Strategy s;
    s.label = "buy_and_hold";
    s.phi = {Functional("phi", [shares](double, const CadlagPath&) { return shares; })};
    s.psi = Functional("psi", [cash](double, const CadlagPath&) { return cash; });
    s.value = Functional("value", [shares, cash](double t, const CadlagPath& x) {
        return shares * x.value(t) + cash;
    });
    s.exact_gain = [shares](const CadlagPath& x, double T) {
        return shares * (x.value(T) - x.initial_value()[0]);
    };
    return s;
}

Strategy cash_only(double cash) {
    Strategy s;
    s.label = "cash_only";
    s.phi = {Functional("phi", [](double, const CadlagPath&) { return 0.0; })};
    s.psi = Functional("psi", [cash](double, const CadlagPath&) { return cash; });
    s.value = s.psi;
    s.exact_gain = [](const CadlagPath&, double) { return 0.0; };
    return s;
}

Strategy free_lunch_strategy() {
    Functional value("free_lunch.value", [](double t, const CadlagPath& x) {
        const double disp = x.value(t) - x.initial_value()[0];
        return disp * disp - x.jump_qv(t);
    });
    Functional phi("free_lunch.phi", [](double t, const CadlagPath& x) {
        return 2.0 * (x.value(t) - x.initial_value()[0]);
    });
    Strategy s = strategy_from_value("free_lunch", value, {phi});
    s.exact_gain = [](const CadlagPath& x, double T) {
        const double disp = x.value(T) - x.initial_value()[0];
        return disp * disp - x.jump_qv(T);
    };
    return s;
}

double portfolio_value(const Strategy& s, double t, const CadlagPath& x_t) {
    const Vec spot = x_t.at(t);
    double acc = s.psi(t, x_t);
    for (std::size_t k = 0; k < s.phi.size(); ++k) acc += s.phi[k](t, x_t) * spot[k];
    return acc;
}

PortfolioValueReport portfolio_value_report(const Strategy& s, double t, const CadlagPath& x_t) {
    PortfolioValueReport rep;
    rep.value = portfolio_value(s, t, x_t);
    const CadlagPath before = x_t.stop(t, StopSide::before);
    const Vec spot = x_t.at(t);
    double acc = s.psi(t, before);
    for (std::size_t k = 0; k < s.phi.size(); ++k) acc += s.phi[k](t, before) * spot[k];
    rep.left_form = acc;
    rep.difference = rep.value - rep.left_form;
    return rep;
}

// ---------------------------------------------------------------------------

SelfFinancingReport self_financing_check(const Strategy& s, const CadlagPath& path,
                                         std::span<const double> grid,
                                         std::span<const double> hs, double tol) {
    static constexpr double kDefaultHs[] = {1e-2, 1e-3};
    if (hs.empty()) hs = kDefaultHs;
    SelfFinancingReport rep;
    for (double t : grid) {
        const CadlagPath at_t = path.stop(t, StopSide::at);
        const CadlagPath before_t = path.stop(t, StopSide::before);
        const Vec spot = path.at(t);

        double jump_res = s.psi(t, at_t) - s.psi(t, before_t);
        for (std::size_t k = 0; k < s.phi.size(); ++k)
            jump_res += (s.phi[k](t, at_t) - s.phi[k](t, before_t)) * spot[k];
        rep.records.push_back({t, SelfFinancingCondition::jump, 0.0, std::abs(jump_res)});

        for (double h : hs) {
            double res = s.psi(t + h, at_t) - s.psi(t, at_t);
            for (std::size_t k = 0; k < s.phi.size(); ++k)
                res += (s.phi[k](t + h, at_t) - s.phi[k](t, at_t)) * spot[k];
            rep.records.push_back(
                {t, SelfFinancingCondition::horizontal, h, std::abs(res) / h});
        }
    }
    for (const auto& r : rep.records) rep.max_residual = std::max(rep.max_residual, r.residual);
    rep.pass = rep.max_residual < tol;
    return rep;
}

std::string SelfFinancingReport::to_json() const {
    nlohmann::json j;
    j["max_residual"] = max_residual;
    j["pass"] = pass;
    j["n_checks"] = records.size();
    return j.dump();
}

// ---------------------------------------------------------------------------

GainReport gain(const Strategy& s, const CadlagPath& path, const PartitionLadder& ladder,
                double T, const IntegralOptions& opts) {
    GainReport rep;
    rep.integral = pathwise_integral(s.phi, path, ladder, T, opts);
    rep.v0 = portfolio_value(s, 0.0, path.stop(0.0, StopSide::before));
    rep.vT = portfolio_value(s, T, path.stop(T, StopSide::at));
    const double declared = rep.integral.limit.value_or(rep.integral.top());
    rep.residual_limit = std::abs(rep.vT - rep.v0 - declared);
    if (s.value) {
        const CadlagPath xn = approximate(path, ladder, ladder.max_level());
        rep.vT_level = (*s.value)(T, xn.stop(T, StopSide::at));
        rep.residual_level = std::abs(rep.vT_level - rep.v0 - rep.integral.top());
        rep.has_level_residual = true;
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

double terminal_gain(const Strategy& s, const CadlagPath& path, const PartitionLadder& ladder,
                     double T) {
    if (s.exact_gain) return (*s.exact_gain)(path, T);
    const IntegralEstimate est = pathwise_integral(s.phi, path, ladder, T);
    return est.limit.value_or(est.top());
}

}  // namespace

ArbitrageReport arbitrage_probe(const Strategy& s, std::span<const CadlagPath> paths,
                                const PartitionLadder& ladder, double T,
                                const ArbitrageProbeOptions& opts) {
    ArbitrageReport rep;
    rep.strategy_label = s.label;

    std::vector<CadlagPath> probe_set(paths.begin(), paths.end());
    if (opts.adversarial && !opts.jump_free_class) {
        // deterministic single-jump perturbations of the first few scenarios
        const std::size_t n_bases = std::min<std::size_t>(paths.size(), 8);
        const auto& grid = ladder.points(ladder.min_level());
        for (std::size_t p = 0; p < n_bases; ++p) {
            for (double t : grid) {
                if (!(t > 0.0) || !time_lt(t, T)) continue;
                const double left = paths[p].left(t);
                for (double frac : {-0.5, -0.25, 0.25, 0.5}) {
                    probe_set.push_back(paths[p].vertical_perturb(t, frac * left));
                }
            }
        }
    }

    rep.n_paths = probe_set.size();
    bool first = true;
    for (std::size_t i = 0; i < probe_set.size(); ++i) {
        const double g = terminal_gain(s, probe_set[i], ladder, T);
        if (first || g < rep.min_gain) rep.min_gain = g;
        if (first || g > rep.max_gain) rep.max_gain = g;
        first = false;
        if (g < -opts.zero_tol) {
            ++rep.n_negative;
            if (!rep.falsifier || g < *rep.falsifier_gain) {
                rep.falsifier_index = i;
                rep.falsifier_gain = g;
                rep.falsifier = probe_set[i];
            }
        } else if (g > opts.zero_tol) {
            ++rep.n_positive;
        }
    }
    rep.all_nonnegative = rep.n_negative == 0;
    rep.some_positive = rep.n_positive > 0;
    rep.arbitrage_evidence = rep.all_nonnegative && rep.some_positive;
    rep.class_restricted_arbitrage = rep.arbitrage_evidence && opts.jump_free_class;
    return rep;
}

std::string ArbitrageReport::to_json() const {
    nlohmann::json j;
    j["strategy_label"] = strategy_label;
    j["n_paths"] = n_paths;
    j["min_gain"] = min_gain;
    j["max_gain"] = max_gain;
    j["n_negative"] = n_negative;
    j["n_positive"] = n_positive;
    j["all_nonnegative"] = all_nonnegative;
    j["some_positive"] = some_positive;
    j["arbitrage_evidence"] = arbitrage_evidence;
    j["class_restricted_arbitrage"] = class_restricted_arbitrage;
    j["falsifier_found"] = falsifier.has_value();
    if (falsifier_gain) j["falsifier_gain"] = *falsifier_gain;
    return j.dump();
}

}  // namespace pathhedge
