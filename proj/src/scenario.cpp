#include "pathhedge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pathhedge {

std::uint64_t Rng::next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(next_u64() % span);
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed ^ (0x517cc1b727220a95ULL * (stream + 1)));
    return r.next_u64();
}

ScenarioClass scenario_class_from_string(const std::string& s) {
    if (s == "step") return ScenarioClass::step;
    if (s == "bv_sampled") return ScenarioClass::bv_sampled;
    if (s == "jump_diffusion_sampled") return ScenarioClass::jump_diffusion_sampled;
    if (s == "adversarial") return ScenarioClass::adversarial;
    throw std::invalid_argument("unknown scenario class: " + s);
}

std::string to_string(ScenarioClass c) {
    switch (c) {
        case ScenarioClass::step: return "step";
        case ScenarioClass::bv_sampled: return "bv_sampled";
        case ScenarioClass::jump_diffusion_sampled: return "jump_diffusion_sampled";
        case ScenarioClass::adversarial: return "adversarial";
    }
    return "?";
}

namespace {

struct Range {
    double lo, hi;
};

Range value_range(const ScenarioSpec& spec) {
    if (spec.bounds) {
        if (!spec.bounds->valid())
            throw std::invalid_argument("generate_scenarios: infeasible bounds (a >= b)");
        const double margin = 1e-6 * (spec.bounds->b - spec.bounds->a);
        return {spec.bounds->a + margin, spec.bounds->b - margin};
    }
    return {spec.lo_default, spec.hi_default};
}

CadlagPath gen_step(const ScenarioSpec& spec, Rng& rng, const Range& r) {
    const int n_jumps = rng.uniform_int(spec.min_jumps, spec.max_jumps);
    std::set<int> slots;
    while (static_cast<int>(slots.size()) < n_jumps)
        slots.insert(rng.uniform_int(1, spec.time_lattice - 1));
    std::vector<std::pair<double, double>> bps;
    bps.emplace_back(0.0, rng.uniform(r.lo, r.hi));
    for (int s : slots)
        bps.emplace_back(spec.horizon * s / spec.time_lattice, rng.uniform(r.lo, r.hi));
    return CadlagPath::step(std::move(bps));
}

CadlagPath gen_bv(const ScenarioSpec& spec, Rng& rng, const Range& r) {
    const int n = std::max(2, spec.n_segments);
    std::vector<double> knots{0.0};
    for (int i = 1; i < n; ++i) knots.push_back(rng.uniform(0.0, spec.horizon));
    knots.push_back(spec.horizon);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double a, double b) { return b - a <= kTimeTol; }),
                knots.end());
    if (!time_eq(knots.back(), spec.horizon)) knots.push_back(spec.horizon);

    const double drift = rng.uniform(-spec.max_drift, spec.max_drift);
    const double wiggle_budget = std::max(0.0, spec.variation_budget - std::abs(drift));
    double x = rng.uniform(r.lo + 0.2 * (r.hi - r.lo), r.hi - 0.2 * (r.hi - r.lo));
    std::vector<std::pair<double, double>> bps;
    bps.emplace_back(0.0, x);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const double dt = knots[i] - knots[i - 1];
        const double inc = drift * dt +
                           rng.uniform(-1.0, 1.0) * wiggle_budget * dt / spec.horizon;
        x = std::clamp(x + inc, r.lo, r.hi);
        bps.emplace_back(knots[i], x);
    }
    return CadlagPath::linear(std::move(bps));
}

CadlagPath gen_jump_diffusion(const ScenarioSpec& spec, Rng& rng, const Range& r) {
    const int n = std::max(8, spec.wiggle_points);
    const double dt = spec.horizon / n;
    const double vol_step = spec.sigma * std::sqrt(dt);
    auto reflect = [&](double x) {
        if (x < r.lo) x = r.lo + (r.lo - x);
        if (x > r.hi) x = r.hi - (x - r.hi);
        return std::clamp(x, r.lo, r.hi);
    };
    std::vector<double> vals(static_cast<std::size_t>(n) + 1);
    vals[0] = rng.uniform(r.lo + 0.25 * (r.hi - r.lo), r.hi - 0.25 * (r.hi - r.lo));
    for (int i = 1; i <= n; ++i)
        vals[static_cast<std::size_t>(i)] =
            reflect(vals[static_cast<std::size_t>(i - 1)] +
                    (rng.uniform() < 0.5 ? -1.0 : 1.0) * vol_step);

    const int n_jumps = rng.uniform_int(spec.min_jd_jumps, spec.max_jd_jumps);
    std::set<int> slots;
    while (static_cast<int>(slots.size()) < n_jumps) slots.insert(rng.uniform_int(1, n - 1));
    std::vector<std::pair<int, double>> jump_lefts;
    for (int s : slots) {  // ascending; earlier shifts already applied at vals[s]
        const double left = vals[static_cast<std::size_t>(s)];
        const double size =
            rng.uniform(0.1, 0.4) * (r.hi - r.lo) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        const double pad = 0.05 * (r.hi - r.lo);
        const double target = std::clamp(left + size, r.lo + pad, r.hi - pad);
        const double shift = target - left;
        for (int i = s; i <= n; ++i)
            vals[static_cast<std::size_t>(i)] = reflect(vals[static_cast<std::size_t>(i)] + shift);
        jump_lefts.emplace_back(s, left);
    }

    std::vector<std::pair<double, double>> bps;
    bps.reserve(vals.size());
    for (int i = 0; i <= n; ++i) bps.emplace_back(i * dt, vals[static_cast<std::size_t>(i)]);
    CadlagPath path = CadlagPath::linear(std::move(bps));
    for (const auto& [s, left] : jump_lefts) path = path.with_left_value(s * dt, Vec{left});
    return path;
}

std::vector<CadlagPath> gen_adversarial(const ScenarioSpec& spec, const Range& r) {
    if (!spec.bounds) throw std::invalid_argument("adversarial scenarios need bounds");
    const double a = spec.bounds->a, b = spec.bounds->b;
    const double mid = 0.5 * (a + b);
    std::vector<CadlagPath> out;
    const CadlagPath base = CadlagPath::constant(std::clamp(mid, r.lo, r.hi));
    // waiting scenarios: hold, then sit just under the upper bound
    for (double eps : {0.1 * (b - a), 0.05 * (b - a), 0.01 * (b - a)}) {
        CadlagPath z = base.vertical_perturb(eps, (b - eps) - base.value(0.0));
        out.push_back(z.materialize());
    }
    // single-jump perturbations at dyadic times, sizes scanning the
    // admissible neighbourhood
    for (int k = 1; k < 8; ++k) {
        const double t = spec.horizon * k / 8.0;
        for (double frac : {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75}) {
            const double left = base.value(0.0);
            const double e = frac * left;
            const double target = left + e;
            if (target <= r.lo || target >= r.hi) continue;
            out.push_back(base.vertical_perturb(t, e).materialize());
        }
    }
    // a two-jump path (up then down)
    out.push_back(CadlagPath::step({{0.0, mid},
                                    {0.3 * spec.horizon, std::min(r.hi, mid * 1.4)},
                                    {0.6 * spec.horizon, std::max(r.lo, mid * 0.7)}}));
    if (spec.n_paths > 0 && static_cast<int>(out.size()) > spec.n_paths)
        out.resize(static_cast<std::size_t>(spec.n_paths));
    return out;
}

}  // namespace

std::vector<CadlagPath> generate_scenarios(const ScenarioSpec& spec) {
    if (spec.n_paths < 0) throw std::invalid_argument("generate_scenarios: n_paths < 0");
    if (!(spec.horizon > 0.0)) throw std::invalid_argument("generate_scenarios: horizon <= 0");
    const Range r = value_range(spec);
    if (spec.clazz == ScenarioClass::adversarial) return gen_adversarial(spec, r);
    std::vector<CadlagPath> out;
    out.reserve(static_cast<std::size_t>(spec.n_paths));
    for (int i = 0; i < spec.n_paths; ++i) {
        Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(i)));
        switch (spec.clazz) {
            case ScenarioClass::step: out.push_back(gen_step(spec, rng, r)); break;
            case ScenarioClass::bv_sampled: out.push_back(gen_bv(spec, rng, r)); break;
            case ScenarioClass::jump_diffusion_sampled:
                out.push_back(gen_jump_diffusion(spec, rng, r));
                break;
            case ScenarioClass::adversarial: break;  // handled above
        }
    }
    return out;
}

bool validate_class(const CadlagPath& path, const ScenarioSpec& spec, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!path.positive()) return fail("not positive");
    if (spec.bounds) {
        if (!path.within_bounds(spec.bounds->a, spec.bounds->b, 0.0, spec.horizon))
            return fail("leaves bounds");
    }
    switch (spec.clazz) {
        case ScenarioClass::step:
            if (path.mode() != PathMode::step) return fail("not a step path");
            break;
        case ScenarioClass::adversarial:
            break;  // mixed family of step and perturbed paths

        case ScenarioClass::bv_sampled: {
            if (path.mode() != PathMode::linear) return fail("not piecewise linear");
            if (!path.jump_times(spec.horizon).empty()) return fail("continuous class has jumps");
            double tv = 0.0;
            for (std::size_t i = 1; i < path.breakpoint_count(); ++i)
                tv += std::abs(path.breakpoint_value(i)[0] - path.breakpoint_value(i - 1)[0]);
            if (tv > spec.variation_budget + 1e-9) return fail("variation budget exceeded");
            break;
        }
        case ScenarioClass::jump_diffusion_sampled:
            if (path.mode() != PathMode::linear) return fail("not sampled-linear");
            break;
    }
    return true;
}

}  // namespace pathhedge
