#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cvloss::cli {

struct OracleSuiteOptions {
    std::vector<double> xis{0.0, 0.3, 1.0};
    int single_mode_states = 4;
    int two_mode_states = 2;
    int random_density_matrices = 3;
    double max_squeezing_db = 8.0;
    int single_mode_cutoff = 110;
    int two_mode_cutoff = 60;
    /// Cutoff for the two-vertex graph used in the order comparison.
    int graph_cutoff = 40;
    /// Replaces both cutoffs above when set.
    std::optional<int> cutoff;
    std::uint64_t seed = 20240611;
    /// Only the identity-channel checks, with tolerance 1e-12.
    bool identity_channel_only = false;
};

struct OracleCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int instances = 0;
    bool reliable = true;
    /// "below": pass iff max_deviation < tolerance; "above": iff min over instances > tolerance.
    std::string criterion = "below";
    double min_deviation = 0.0;

    bool passed() const;
};

struct OracleSuiteReport {
    std::vector<OracleCheck> checks;
    double max_leakage = 0.0;

    bool inconclusive() const;
    bool all_passed() const;
    nlohmann::json to_json() const;
};

OracleSuiteReport run_oracle_suite(const OracleSuiteOptions& options);

}  // namespace cvloss::cli
