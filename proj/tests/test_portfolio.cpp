#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pathhedge/portfolio.hpp"
#include "pathhedge/scenario.hpp"
#include "pathhedge/superhedge.hpp"

using namespace pathhedge;

namespace {

const AsianParams kCanonical{1.0, 1.0, {0.0, 2.0}};

std::vector<CadlagPath> bounded_step_corpus(int n, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.clazz = ScenarioClass::step;
    spec.bounds = ScenarioBounds{0.0, 2.0};
    spec.n_paths = n;
    spec.seed = seed;
    spec.max_jumps = 8;
    return generate_scenarios(spec);
}

std::vector<double> check_grid(const CadlagPath& x) {
    std::vector<double> g = x.jump_times(1.0);
    g.push_back(0.15);
    g.push_back(0.85);
    return g;
}

}  // namespace

TEST_CASE("portfolio value: buy-and-hold, cash, and the canonical Asian book") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.4, 2.0}});
    CHECK(portfolio_value(buy_and_hold(1.0), 0.4, x.stop(0.4, StopSide::at)) == 2.0);
    CHECK(portfolio_value(cash_only(3.25), 0.7, x.stop(0.7, StopSide::at)) == 3.25);

    const Strategy hedge = asian_superhedge_strategy(kCanonical);
    const CadlagPath flat = CadlagPath::constant(1.0);
    CHECK(hedge.phi[0](0.0, flat) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(hedge.psi(0.0, flat) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(portfolio_value(hedge, 0.0, flat) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("self-financing: constants pass, an unfunded rebalance fails condition (ii)") {
    const CadlagPath x = CadlagPath::constant(1.0);
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75};

    const auto ok = self_financing_check(buy_and_hold(2.0, 1.0), x, grid);
    CHECK(ok.pass);
    CHECK(ok.max_residual == 0.0);

    Strategy drifter;
    drifter.label = "unfunded_drift";
    drifter.phi = {Functional("phi=t", [](double t, const CadlagPath&) { return t; })};
    drifter.psi = Functional("psi=0", [](double, const CadlagPath&) { return 0.0; });
    const auto bad = self_financing_check(drifter, x, grid);
    CHECK_FALSE(bad.pass);
    // the horizontal residual is a rate: (phi(t+h) - phi(t)) x / h = 1
    double horizontal = 0.0;
    for (const auto& r : bad.records)
        if (r.condition == SelfFinancingCondition::horizontal)
            horizontal = std::max(horizontal, r.residual);
    CHECK(horizontal == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("self-financing: Asian superhedge book on bounded jump paths") {
    const Strategy hedge = asian_superhedge_strategy(kCanonical);
    for (const auto& x : bounded_step_corpus(10, 31)) {
        const auto rep = self_financing_check(hedge, x, check_grid(x), {}, 1e-8);
        CHECK(rep.pass);
    }
}

TEST_CASE("self-financing: free lunch strategy is self-financing") {
    const Strategy fl = free_lunch_strategy();
    for (const auto& x : bounded_step_corpus(10, 77)) {
        const auto rep = self_financing_check(fl, x, check_grid(x), {}, 1e-8);
        CHECK(rep.pass);
    }
}

TEST_CASE("value forms (spot vs left-limit arguments) agree for self-financing books") {
    for (const Strategy& s :
         {buy_and_hold(1.5, -0.5), free_lunch_strategy(), asian_superhedge_strategy(kCanonical)}) {
        for (const auto& x : bounded_step_corpus(6, 13)) {
            for (double t : check_grid(x)) {
                const auto rep = portfolio_value_report(s, t, x.stop(t, StopSide::at));
                CHECK(std::abs(rep.difference) < 1e-10);
            }
        }
    }
}

TEST_CASE("gain: buy-and-hold telescopes to c * displacement") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.5, 2.0}});
    const auto ladder = PartitionLadder::dyadic(1.0, 4, 10);
    const auto rep = gain(buy_and_hold(3.0), x, ladder, 1.0);
    for (const auto& l : rep.integral.levels) CHECK(l.value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(rep.residual_limit < 1e-12);
    CHECK(rep.residual_level < 1e-12);
}

TEST_CASE("gain: representation identity is exact on the level scenario") {
    const auto ladder = PartitionLadder::dyadic(1.0, 6, 12);
    const Strategy hedge = asian_superhedge_strategy(kCanonical);
    const Strategy fl = free_lunch_strategy();
    for (const auto& x : bounded_step_corpus(15, 4)) {
        for (const Strategy* s : {&hedge, &fl}) {
            const auto rep = gain(*s, x, ladder, 1.0);
            REQUIRE(rep.has_level_residual);
            CHECK(rep.residual_level < 1e-10);
        }
    }
}

TEST_CASE("gain: residual against the true limit shrinks at least 2x from level 8 to 12") {
    const Strategy hedge = asian_superhedge_strategy(kCanonical);
    const auto l8 = PartitionLadder::dyadic(1.0, 6, 8);
    const auto l12 = PartitionLadder::dyadic(1.0, 6, 12);
    double worst8 = 0.0, worst12 = 0.0;
    for (const auto& x : bounded_step_corpus(20, 99)) {
        const double exact = (*hedge.exact_gain)(x, 1.0);
        worst8 = std::max(worst8, std::abs(gain(hedge, x, l8, 1.0).integral.top() - exact));
        worst12 = std::max(worst12, std::abs(gain(hedge, x, l12, 1.0).integral.top() - exact));
    }
    CHECK(worst8 >= 2.0 * worst12);
    CHECK(worst12 < 1e-2);
}

TEST_CASE("free lunch: zero on constants, the telescoped square on fine ramps") {
    const Strategy fl = free_lunch_strategy();
    const auto ladder = PartitionLadder::dyadic(1.0, 6, 12);
    CHECK((*fl.exact_gain)(CadlagPath::constant(1.0), 1.0) == 0.0);

    const CadlagPath ramp = CadlagPath::linear({{0.0, 1.0}, {1.0, 2.0}});
    CHECK((*fl.exact_gain)(ramp, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    // level sums match (x(T)-x0)^2 - [x]^n_2 identically
    const auto est = pathwise_integral(fl.phi, ramp, ladder, 1.0);
    const auto var = p_variation(ramp, ladder, 2, 1.0);
    for (int n : ladder.levels())
        CHECK(est.level_value(n) == doctest::Approx(1.0 - var.scalar_level(n)).epsilon(1e-13));
}

TEST_CASE("free lunch: the two-jump path books a loss of 1") {
    const CadlagPath x = CadlagPath::step({{0.0, 1.0}, {0.3, 0.5}, {0.6, 1.5}});
    const Strategy fl = free_lunch_strategy();
    CHECK((*fl.exact_gain)(x, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    const auto ladder = PartitionLadder::dyadic(1.0, 6, 12);
    const auto est = pathwise_integral(fl.phi, x, ladder, 1.0);
    CHECK(est.top() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fair game: class-M gradients never sit strictly above zero over jump corpora") {
    const auto corpus = bounded_step_corpus(60, 123);
    for (const Strategy& s : {free_lunch_strategy(), buy_and_hold(1.0)}) {
        std::size_t pos = 0, neg = 0, zero = 0;
        for (const auto& x : corpus) {
            const double g = (*s.exact_gain)(x, 1.0);
            if (g > 1e-8)
                ++pos;
            else if (g < -1e-8)
                ++neg;
            else
                ++zero;
        }
        const bool all_zero = zero == corpus.size();
        const bool both_signs = pos > 0 && neg > 0;
        CHECK((all_zero || both_signs));
    }
    // and the zero strategy is identically zero
    std::size_t nonzero = 0;
    for (const auto& x : corpus)
        if (std::abs((*cash_only(1.0).exact_gain)(x, 1.0)) > 1e-8) ++nonzero;
    CHECK(nonzero == 0);
}

TEST_CASE("arbitrage probe: jump scenarios falsify the free lunch") {
    const auto ladder = PartitionLadder::dyadic(1.0, 4, 8);
    const auto corpus = bounded_step_corpus(50, 8);
    const auto rep = arbitrage_probe(free_lunch_strategy(), corpus, ladder, 1.0);
    CHECK(rep.falsifier.has_value());
    CHECK(*rep.falsifier_gain < -1e-8);
    CHECK_FALSE(rep.arbitrage_evidence);
}

TEST_CASE("arbitrage probe: continuous scenarios leave a class-restricted free lunch") {
    ScenarioSpec spec;
    spec.clazz = ScenarioClass::bv_sampled;
    spec.n_paths = 50;
    spec.seed = 17;
    spec.n_segments = 40;
    const auto corpus = generate_scenarios(spec);
    const auto ladder = PartitionLadder::dyadic(1.0, 4, 8);
    ArbitrageProbeOptions opts;
    opts.jump_free_class = true;
    const auto rep = arbitrage_probe(free_lunch_strategy(), corpus, ladder, 1.0, opts);
    CHECK_FALSE(rep.falsifier.has_value());
    CHECK(rep.all_nonnegative);
    CHECK(rep.some_positive);
    CHECK(rep.class_restricted_arbitrage);
}

TEST_CASE("arbitrage probe: the zero strategy has no gains at all") {
    const auto ladder = PartitionLadder::dyadic(1.0, 4, 8);
    const auto corpus = bounded_step_corpus(20, 55);
    const auto rep = arbitrage_probe(cash_only(2.0), corpus, ladder, 1.0);
    CHECK_FALSE(rep.falsifier.has_value());
    CHECK(rep.min_gain == 0.0);
    CHECK(rep.max_gain == 0.0);
    CHECK_FALSE(rep.arbitrage_evidence);
}
