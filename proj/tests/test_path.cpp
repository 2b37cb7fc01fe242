#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pathhedge/path.hpp"
#include "pathhedge/scenario.hpp"

using namespace pathhedge;

namespace {

CadlagPath two_step() { return CadlagPath::step({{0.0, 1.0}, {0.5, 2.0}}); }

// Random step path on a dyadic time lattice, values in (0.2, 2.5).
CadlagPath random_step(Rng& rng, int max_jumps = 6) {
    std::vector<std::pair<double, double>> bps;
    bps.emplace_back(0.0, rng.uniform(0.3, 2.2));
    const int n = rng.uniform_int(1, max_jumps);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        t += rng.uniform(0.05, 0.9 / n);
        if (t >= 0.999) break;
        bps.emplace_back(t, rng.uniform(0.3, 2.2));
    }
    return CadlagPath::step(std::move(bps));
}

}  // namespace

TEST_CASE("sample: step path values, left limits and jumps") {
    const CadlagPath x = two_step();
    auto s = x.sample(0.5);
    CHECK(s.value[0] == 2.0);
    CHECK(s.left_limit[0] == 1.0);
    CHECK(s.jump[0] == 1.0);

    s = x.sample(0.25);
    CHECK(s.value[0] == 1.0);
    CHECK(s.left_limit[0] == 1.0);
    CHECK(s.jump[0] == 0.0);

    // constant extension past the last breakpoint
    CHECK(x.value(7.0) == 2.0);

    // left limit at 0 is the declared pre-start value
    const CadlagPath y = CadlagPath::step({{0.0, 1.5}}, 1.0);
    CHECK(y.left(0.0) == 1.0);
    CHECK(y.jump1(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("sample: linear interpolation has zero jumps") {
    const CadlagPath x = CadlagPath::linear({{0.0, 1.0}, {1.0, 2.0}});
    auto s = x.sample(0.5);
    CHECK(s.value[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s.left_limit[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s.jump[0] == 0.0);
    CHECK(x.jump_times(1.0).empty());
}

TEST_CASE("stop at and before") {
    const CadlagPath x = two_step();
    const CadlagPath at = x.stop(0.5, StopSide::at);
    CHECK(at.value(0.49) == 1.0);
    CHECK(at.value(0.5) == 2.0);
    CHECK(at.value(3.0) == 2.0);

    const CadlagPath before = x.stop(0.5, StopSide::before);
    CHECK(before.value(0.0) == 1.0);
    CHECK(before.value(0.5) == 1.0);
    CHECK(before.value(3.0) == 1.0);
    CHECK(before.jump1(0.5) == 0.0);
}

TEST_CASE("stopping is a semigroup: stop(stop(x,t),s) = stop(x,min(s,t))") {
    Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        const CadlagPath x = random_step(rng);
        const double t = rng.uniform(0.0, 1.2);
        const double s = rng.uniform(0.0, 1.2);
        const CadlagPath lhs = x.stop(t, StopSide::at).stop(s, StopSide::at);
        const CadlagPath rhs = x.stop(std::min(s, t), StopSide::at);
        for (int i = 0; i <= 12; ++i) {
            const double u = 0.1 * i;
            CHECK(lhs.value(u) == rhs.value(u));
            CHECK(lhs.left(u) == rhs.left(u));
        }
    }
}

TEST_CASE("vertical perturbation") {
    const CadlagPath x = two_step();

    // e = jump recovers the stopped path
    const CadlagPath p1 = x.vertical_perturb(0.5, 1.0);
    const CadlagPath stopped = x.stop(0.5, StopSide::at);
    for (int i = 0; i <= 12; ++i) {
        const double u = 0.1 * i;
        CHECK(p1.value(u) == stopped.value(u));
    }

    // e = 0 gives x_{t-}
    const CadlagPath p0 = x.vertical_perturb(0.5, 0.0);
    CHECK(p0.value(0.5) == 1.0);
    CHECK(p0.value(1.0) == 1.0);

    // inadmissible: value would hit zero
    CHECK_THROWS_AS(x.vertical_perturb(0.5, -1.0), std::domain_error);
}

TEST_CASE("perturbation after an earlier cut lands on the materialized view") {
    const CadlagPath x = two_step().stop(0.25, StopSide::at);
    const CadlagPath y = x.vertical_perturb(0.75, 0.5);
    CHECK(y.value(0.5) == 1.0);   // frozen before the second cut
    CHECK(y.value(0.75) == 1.5);  // 1.0 + 0.5
    CHECK(y.value(2.00) == 1.5);
}

TEST_CASE("approximate: linear path, level 1") {
    const CadlagPath x = CadlagPath::linear({{0.0, 1.0}, {1.0, 2.0}});
    const auto ladder = PartitionLadder::dyadic(1.0, 1, 3);
    const CadlagPath x1 = approximate(x, ladder, 1);
    CHECK(x1.value(0.0) == 1.5);
    CHECK(x1.value(0.25) == 1.5);
    CHECK(x1.value(0.5) == 2.0);
    CHECK(x1.value(0.75) == 2.0);
    CHECK(x1.value(1.0) == 2.0);
    CHECK(x1.mode() == PathMode::step);
}

TEST_CASE("approximate: constants are fixed points") {
    const CadlagPath c = CadlagPath::constant(1.7);
    const auto ladder = PartitionLadder::dyadic(1.0, 2, 6);
    for (int n : ladder.levels()) {
        const CadlagPath cn = approximate(c, ladder, n);
        for (int i = 0; i <= 10; ++i) CHECK(cn.value(0.1 * i) == 1.7);
    }
}

TEST_CASE("approximate: look-ahead shifts an on-grid jump one cell earlier") {
    const CadlagPath x = two_step();  // jump at 0.5
    const auto ladder = PartitionLadder::dyadic(1.0, 3, 3);  // mesh 1/8, 0.5 on the grid
    const CadlagPath xn = approximate(x, ladder, 3);
    CHECK(xn.value(0.5 - 0.125) == 2.0);  // cell [3/8, 4/8) already reads x(0.5)
    CHECK(xn.value(0.5 - 0.2) == 1.0);
    CHECK(xn.value(0.5) == 2.0);
}

TEST_CASE("approximate: pointwise convergence at continuity points") {
    const auto ladder = PartitionLadder::dyadic(1.0, 2, 10);
    const CadlagPath lin = CadlagPath::linear({{0.0, 1.0}, {0.37, 0.6}, {1.0, 2.0}});
    const CadlagPath stp = CadlagPath::step({{0.0, 1.0}, {0.31, 1.4}, {0.77, 0.8}});
    for (const CadlagPath& x : {lin, stp}) {
        for (double t : {0.11, 0.4999, 0.66, 0.93}) {
            double prev_err = 1e9;
            for (int n : {4, 6, 8, 10}) {
                const double err = std::abs(approximate(x, ladder, n).value(t) - x.value(t));
                CHECK(err <= prev_err + 1e-12);
                prev_err = err;
            }
            CHECK(prev_err < 2e-3);
        }
    }
}

TEST_CASE("p-variation: single jump is exact once the mesh resolves it") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.5, 1.5}});
    const auto ladder = PartitionLadder::dyadic(1.0, 1, 8);
    const auto est = p_variation(x, ladder, 2, 1.0);
    for (int n : ladder.levels()) CHECK(est.scalar_level(n) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(est.converged);
    CHECK(est.scalar_limit() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("p-variation: multiple jumps sum exactly once separated") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.3, 0.5}, {0.6, 1.5}});
    const auto ladder = PartitionLadder::dyadic(1.0, 6, 10);
    const auto est = p_variation(x, ladder, 2, 1.0);
    const double expect = 0.25 + 1.0;
    CHECK(est.scalar_level(10) == doctest::Approx(expect).epsilon(1e-14));
    // p = 4
    const auto est4 = p_variation(x, ladder, 4, 1.0);
    CHECK(est4.scalar_level(10) == doctest::Approx(0.0625 + 1.0).epsilon(1e-14));
}

TEST_CASE("p-variation: linear path estimates are 2^-n with limit 0") {
    const CadlagPath x = CadlagPath::linear({{0.0, 1.0}, {1.0, 2.0}});
    const auto ladder = PartitionLadder::dyadic(1.0, 6, 14);
    const auto est = p_variation(x, ladder, 2, 1.0);
    for (int n : ladder.levels())
        CHECK(est.scalar_level(n) == doctest::Approx(std::ldexp(1.0, -n)).epsilon(1e-12));
    REQUIRE(est.converged);
    CHECK(est.scalar_limit() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("p-variation: scaled random walk stabilizes near its discrete qv") {
    // walk sampled on 2^10 cells with increments sigma sqrt(dt)
    const int n = 1 << 10;
    const double sigma = 0.4;
    const double dt = 1.0 / n;
    Rng rng(7);
    std::vector<std::pair<double, double>> bps;
    double x = 1.0;
    bps.emplace_back(0.0, x);
    for (int i = 1; i <= n; ++i) {
        x += (rng.uniform() < 0.5 ? -1.0 : 1.0) * sigma * std::sqrt(dt);
        x = std::max(x, 0.05);
        bps.emplace_back(i * dt, x);
    }
    const CadlagPath walk = CadlagPath::linear(std::move(bps));
    const auto ladder = PartitionLadder::dyadic(1.0, 5, 9);
    const auto est = p_variation(walk, ladder, 2, 1.0);
    // diagnostic: the plateau sits near sigma^2 t
    CHECK(est.scalar_level(9) == doctest::Approx(sigma * sigma).epsilon(0.25));
}

TEST_CASE("p-variation: d = 2 outer products, p = 2 only") {
    const CadlagPath x = CadlagPath::make(
        PathMode::step, {0.0, 0.4}, {{1.0, 2.0}, {1.5, 1.0}});
    const auto ladder = PartitionLadder::dyadic(1.0, 4, 8);
    const auto est = p_variation(x, ladder, 2, 1.0);
    // single jump (0.5, -1): tensor [[0.25, -0.5], [-0.5, 1.0]]
    const auto& top = est.levels.back().tensor;
    CHECK(top[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(top[1] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(top[2] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(top[3] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(p_variation(x, ladder, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(p_variation(x, ladder, 3, 1.0), std::invalid_argument);
}

TEST_CASE("positivity is preserved by stop, approximate and admissible perturbations") {
    Rng rng(11);
    const auto ladder = PartitionLadder::dyadic(1.0, 3, 6);
    for (int rep = 0; rep < 40; ++rep) {
        const CadlagPath x = random_step(rng);
        REQUIRE(x.positive());
        const double t = rng.uniform(0.0, 1.0);
        CHECK(x.stop(t, StopSide::at).positive());
        CHECK(x.stop(t, StopSide::before).positive());
        CHECK(approximate(x, ladder, 5).positive());
        const double left = x.left(t);
        const double e = rng.uniform(-0.9, 2.0) * left;
        if (e > -left) CHECK(x.vertical_perturb(t, e).positive());
    }
}

TEST_CASE("running integral and max agree with dense sampling") {
    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const CadlagPath x = rep % 2 == 0
            ? random_step(rng)
            : CadlagPath::linear({{0.0, rng.uniform(0.5, 1.5)},
                                  {0.4, rng.uniform(0.5, 1.5)},
                                  {1.0, rng.uniform(0.5, 1.5)}});
        const double t = rng.uniform(0.1, 1.3);
        const int n = 20000;
        double riemann = 0.0, mx = -1e300;
        for (int i = 0; i < n; ++i) {
            const double u = t * (i + 0.5) / n;
            riemann += x.value(u) * (t / n);
            mx = std::max(mx, x.value(u));
        }
        mx = std::max(mx, x.value(t));
        CHECK(x.running_integral(t) == doctest::Approx(riemann).epsilon(1e-3));
        CHECK(x.running_max(t) == doctest::Approx(mx).epsilon(1e-3));
    }
}

TEST_CASE("jump qv counts squared jumps, views included") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.3, 0.5}, {0.6, 1.5}});
    CHECK(x.jump_qv(0.2) == 0.0);
    CHECK(x.jump_qv(0.3) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(x.jump_qv(1.0) == doctest::Approx(1.25).epsilon(1e-15));
    const CadlagPath pert = x.vertical_perturb(0.45, 0.25);  // left 0.5 -> 0.75
    CHECK(pert.jump_qv(1.0) == doctest::Approx(0.25 + 0.0625).epsilon(1e-15));
    const CadlagPath lin = CadlagPath::linear({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(lin.jump_qv(1.0) == 0.0);
}

TEST_CASE("ladder: dyadic grids, conventions for empty intersections") {
    const auto ladder = PartitionLadder::dyadic(2.0, 1, 4);
    CHECK(ladder.points(1).size() == 3);
    CHECK(ladder.points(4).size() == 17);
    CHECK(ladder.mesh(4) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(ladder.predecessor(2, 0.0) == 0.0);     // max(empty) := 0
    CHECK(ladder.successor(2, 5.0) == 2.0);       // min(empty) := last point
    CHECK(ladder.predecessor(2, 0.75) == 0.5);
    CHECK(ladder.successor(2, 0.75) == 1.0);
    CHECK(ladder.successor(2, 0.5) == 0.5);
    CHECK_THROWS_AS(PartitionLadder::from_grids(1.0, {{0.0, 1.0}, {0.0, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("path constructors validate invariants") {
    CHECK_THROWS_AS(CadlagPath::step({{0.1, 1.0}}), std::invalid_argument);  // must start at 0
    CHECK_THROWS_AS(CadlagPath::step({{0.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CadlagPath::step({{0.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(CadlagPath::step({{0.0, 1.0}}, -0.5), std::invalid_argument);
}
