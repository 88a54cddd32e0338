#pragma once

// The acceptance suite, shared by the test binary and `verify-all`.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nilflow/certified_reals.hpp"

namespace nilflow {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    std::string line() const;  // "PASS  3 summation oracle: ... (1.2 s)"
};

struct AcceptanceOptions {
    bool quick = false;
    std::uint64_t seed = 0;
    std::string glue_config;  // empty: the bundled demo config
    std::vector<int> only;    // empty: every criterion
};

/// Path of the bundled glue demo config.
std::string default_glue_config();

/// Uniform on the grid lo + (hi - lo) * j / den, j = 0..den, from raw engine output.
Rational random_rational(std::mt19937_64& rng, const Rational& lo, const Rational& hi, long den);

int acceptance_count();
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
/// Runs the selected criteria in order, reporting each as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& report = {});

}  // namespace nilflow
