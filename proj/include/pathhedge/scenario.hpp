#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathhedge/path.hpp"
#include "pathhedge/superhedge.hpp"

namespace pathhedge {

/// Deterministic 64-bit generator (splitmix64). Identical sequences across
/// platforms and schedulers; each path draws from its own stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);
    int uniform_int(int lo, int hi);  // inclusive
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream);

private:
    std::uint64_t state_;
};

enum class ScenarioClass { step, bv_sampled, jump_diffusion_sampled, adversarial };

struct ScenarioSpec {
    ScenarioClass clazz = ScenarioClass::step;
    std::optional<ScenarioBounds> bounds;
    double horizon = 1.0;
    int n_paths = 1000;
    std::uint64_t seed = 0;

    // step: jump times live on the lattice {j horizon / time_lattice}
    int min_jumps = 1;
    int max_jumps = 20;
    int time_lattice = 256;

    // bv_sampled: piecewise linear, |drift| + walk with capped total variation
    int n_segments = 64;
    double variation_budget = 2.0;
    double max_drift = 0.9;

    // jump_diffusion_sampled
    int wiggle_points = 256;
    double sigma = 0.3;
    int min_jd_jumps = 1;
    int max_jd_jumps = 3;

    // default value range when no bounds are given
    double lo_default = 0.1;
    double hi_default = 3.0;
};

ScenarioClass scenario_class_from_string(const std::string& s);
std::string to_string(ScenarioClass c);

std::vector<CadlagPath> generate_scenarios(const ScenarioSpec& spec);

/// Structural check: mode, bounds (strict, with margin 0), positivity, and
/// the class's shape constraints (piecewise-linearity, variation budget...).
bool validate_class(const CadlagPath& path, const ScenarioSpec& spec, std::string* why = nullptr);

}  // namespace pathhedge
