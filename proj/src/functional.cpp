#include "pathhedge/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace pathhedge {

double derivative_step(const CadlagPath& x_t, double t, double requested) {
    if (requested > 0.0) return requested;
    double scale = 1.0;
    for (double v : x_t.at(t)) scale = std::max(scale, std::abs(v));
    return 1e-4 * scale;
}

Vec vertical_derivative_fd(const Functional& F, double t, const CadlagPath& x_t, double h) {
    const int dim = x_t.dim();
    const Vec spot = x_t.at(t);
    const double step0 = derivative_step(x_t, t, h);
    Vec out(dim, 0.0);
    for (int k = 0; k < dim; ++k) {
        double hk = step0;
        if (spot[k] - hk <= 0.0) hk = 0.5 * spot[k];
        if (!(hk > 0.0)) throw std::domain_error("vertical_derivative: cannot bump component");
        Vec up(dim, 0.0), dn(dim, 0.0);
        up[k] = hk;
        dn[k] = -hk;
        const double fu = F(t, x_t.bump(t, up));
        const double fd = F(t, x_t.bump(t, dn));
        out[k] = (fu - fd) / (2.0 * hk);
    }
    return out;
}

Vec vertical_derivative(const Functional& F, double t, const CadlagPath& x_t, double h) {
    if (F.has_vertical()) return F.analytic_vertical(t, x_t);
    return vertical_derivative_fd(F, t, x_t, h);
}

double horizontal_derivative_fd(const Functional& F, double t, const CadlagPath& x_t, double h,
                                bool richardson) {
    if (!(h > 0.0)) throw std::invalid_argument("horizontal_derivative: h must be > 0");
    const CadlagPath frozen = x_t.stop(t, StopSide::at);
    auto fwd = [&](double hh) { return (F(t + hh, frozen) - F(t, frozen)) / hh; };
    const double d1 = fwd(h);
    if (!richardson) return d1;
    const double d2 = fwd(0.5 * h);
    return 2.0 * d2 - d1;
}

double horizontal_derivative(const Functional& F, double t, const CadlagPath& x_t, double h,
                             bool richardson) {
    if (F.has_horizontal()) return F.analytic_horizontal(t, x_t);
    return horizontal_derivative_fd(F, t, x_t, h, richardson);
}

// ---------------------------------------------------------------------------

CausalityReport causality_probe(const Functional& F, std::span<const CadlagPath> paths,
                                std::span<const double> times, double h, double tol) {
    CausalityReport rep;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        for (double t : times) {
            const CadlagPath stopped = paths[p].stop(t, StopSide::at);
            CausalityRecord rec;
            rec.path_index = p;
            rec.t = t;
            rec.f_gap = std::abs(F(t, stopped) - F.left(t, stopped));
            const Vec g = vertical_derivative_fd(F, t, stopped, h);
            for (double gk : g) rec.grad_norm = std::max(rec.grad_norm, std::abs(gk));
            rec.gap_small = rec.f_gap < tol;
            rec.grad_small = rec.grad_norm < tol;
            rec.agree = rec.gap_small == rec.grad_small;
            if (!rec.agree) ++rep.n_disagree;
            rep.causal_by_gap = rep.causal_by_gap && rec.gap_small;
            rep.causal_by_grad = rep.causal_by_grad && rec.grad_small;
            rep.records.push_back(rec);
        }
    }
    if (!rep.records.empty())
        rep.agreement_fraction =
            1.0 - static_cast<double>(rep.n_disagree) / static_cast<double>(rep.records.size());
    if (rep.causal_by_gap != rep.causal_by_grad)
        rep.verdict = CausalityVerdict::inconsistent;
    else
        rep.verdict = rep.causal_by_gap ? CausalityVerdict::strictly_causal
                                        : CausalityVerdict::not_strictly_causal;
    return rep;
}

std::string CausalityReport::to_json() const {
    nlohmann::json j;
    j["n_samples"] = records.size();
    j["n_disagree"] = n_disagree;
    j["agreement_fraction"] = agreement_fraction;
    j["causal_by_gap"] = causal_by_gap;
    j["causal_by_grad"] = causal_by_grad;
    switch (verdict) {
        case CausalityVerdict::strictly_causal: j["verdict"] = "STRICTLY_CAUSAL"; break;
        case CausalityVerdict::not_strictly_causal: j["verdict"] = "NOT_STRICTLY_CAUSAL"; break;
        case CausalityVerdict::inconsistent: j["verdict"] = "INCONSISTENT"; break;
    }
    return j.dump();
}

// ---------------------------------------------------------------------------

ContinuityReport continuity_probe(const Functional& F, const CadlagPath& path,
                                  const PartitionLadder& ladder, double t, double tol) {
    ContinuityReport rep;
    const CadlagPath at_t = path.stop(t, StopSide::at);
    const CadlagPath before_t = path.stop(t, StopSide::before);
    const double f_left = F(t, before_t);
    const double f_right = F(t, at_t);

    ContinuityCondition c1a{"1a: s up t along x_{s-}", {}, 0.0, false};
    ContinuityCondition c2a{"2a: s down t along x_s", {}, 0.0, false};
    for (int k = 3; k <= 10; ++k) {
        const double delta = ladder.horizon() * std::ldexp(1.0, -k);
        if (t - delta > 0.0) {
            const double s = t - delta;
            c1a.deviations.push_back(std::abs(F(s, path.stop(s, StopSide::before)) - f_left));
        }
        const double s2 = t + delta;
        c2a.deviations.push_back(std::abs(F(s2, path.stop(s2, StopSide::at)) - f_right));
    }

    ContinuityCondition c1c{"1c: predecessor grid times along x^n_{t_n-}", {}, 0.0, false};
    ContinuityCondition c2c{"2c: successor grid times along x^n_{t_n}", {}, 0.0, false};
    for (int level : ladder.levels()) {
        const CadlagPath xn = approximate(path, ladder, level);
        const double tp = ladder.predecessor(level, t);
        c1c.deviations.push_back(std::abs(F(tp, xn.stop(tp, StopSide::before)) - f_left));
        const double ts = ladder.successor(level, t);
        c2c.deviations.push_back(std::abs(F(ts, xn.stop(ts, StopSide::at)) - f_right));
    }

    for (ContinuityCondition* c : {&c1a, &c2a, &c1c, &c2c}) {
        if (c->deviations.empty()) {
            c->pass = true;
        } else {
            c->final_deviation = c->deviations.back();
            for (double d : c->deviations) c->peak_deviation = std::max(c->peak_deviation, d);
            c->pass = c->final_deviation < std::max(tol, 0.05 * c->peak_deviation);
        }
        rep.conditions.push_back(*c);
    }
    rep.pass = true;
    for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass;
    return rep;
}

std::string ContinuityReport::to_json() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["note"] = note;
    for (const auto& c : conditions) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["deviations"] = c.deviations;
        jc["final_deviation"] = c.final_deviation;
        jc["pass"] = c.pass;
        j["conditions"].push_back(jc);
    }
    return j.dump();
}

}  // namespace pathhedge
