#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "helmlab/config.hpp"

namespace helmlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct IdentityCase {
    std::string test;  // morawetz, morawetz_ludwig, friedrichs, flux
    int index = 0;
    double a = 0.0, b = 0.0;  // residuals at h and h/2, (lhs, rhs) or (re_flux, lhs_21)
    double order = 0.0;       // observed order for the residual tests
    bool pass = false;
};

struct IdentityReport {
    std::vector<IdentityCase> cases;
    bool pass(const std::string& test) const;
    double min_order(const std::string& test) const;
};

/// Randomized identity checks: Morawetz and Morawetz-Ludwig residual orders (>= 1.9),
/// Friedrichs inequality, and the radiating flux inequalities (<= 1e-8).
IdentityReport identity_suite(const IdentitiesSpec& spec, std::uint64_t seed);

/// Runs one experiment, writing artifacts under cfg.output and a human-readable report to `console`.
void run_experiment(const ExperimentConfig& cfg, std::ostream& console);

/// Scans `dir` recursively for summary.json files and writes dir/manifest.json.
/// Missing CSVs are skipped with a warning; an empty directory is an error.
std::string emit_plot_inputs(const std::string& dir, std::vector<std::string>* warnings = nullptr);

}  // namespace helmlab
