#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathhedge/scenario.hpp"
#include "pathhedge/superhedge.hpp"

namespace pathhedge {

enum class ExperimentKind {
    integrate,
    variation,
    arbitrage_probe,
    perfect_hedge,
    superhedge_backtest,
    verify,
    oracle_compare,
};

ExperimentKind experiment_kind_from_string(const std::string& s);
std::string to_string(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::integrate;
    ScenarioSpec scenario;
    int ladder_min = 6;
    int ladder_max = 12;
    // integrate / arbitrage_probe
    std::string integrand = "unit";  // unit | spot | free_lunch
    std::string strategy = "free_lunch";  // free_lunch | buy_hold | zero
    // variation
    int p = 2;
    // perfect_hedge / superhedge / verify / oracle
    AsianParams asian{1.0, 0.0, {0.0, 2.0}};
    std::vector<double> epsilons{0.1, 0.01};
    std::vector<OracleConfig> oracle_settings{{8, 16, 32}, {32, 64, 128}, {64, 128, 256}};
    std::filesystem::path out_dir = "out";

    static ExperimentConfig from_json_file(const std::filesystem::path& file);
    std::string to_canonical_json() const;
    std::string config_hash() const;  // FNV-1a of the canonical dump
};

/// Runs the experiment over the generated corpus, writes report.json and
/// results.csv under out_dir, and returns 0 iff every asserted invariant of
/// the experiment kind held. Per-path failures are recorded in the CSV with
/// an error marker instead of aborting the run.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace pathhedge
