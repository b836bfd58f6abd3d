#pragma once

// Experiment harness: config parsing/validation, suite runner over
// (sequence, n) cases with a bounded worker pool, and CSV/JSON/SVG emitters.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tvclt/bounds.hpp"
#include "tvclt/dist.hpp"
#include "tvclt/grid.hpp"
#include "tvclt/sums.hpp"

namespace tvclt {

struct BaseSpec {
    std::string family;  // normal | laplace | logistic | gaussian_mixture |
                         // smoothed_rademacher | smoothed_uniform
    double scale = 1.0;       // normal/laplace/logistic parameter
    double delta = 0.0;       // smoothing width of the *_smoothed families
    double half_width = 1.0;  // smoothed_uniform
    std::vector<double> weights, means, sigmas;  // gaussian_mixture
};

struct ProfileSpec {
    std::string kind = "iid";    // iid | cycle
    std::vector<double> scales;  // cycle: summand k gets scales[(k-1) % len]
};

struct SequenceSpec {
    std::string name;  // [A-Za-z0-9_-]+, used in file names
    BaseSpec base;
    ProfileSpec profile;
};

struct EpsilonGridSpec {
    std::size_t count = 50;
    double lo = 1e-3, hi = 1.0;
};

struct OutputSpec {
    std::string dir = "out";
    std::vector<std::string> formats = {"csv", "json"};
};

struct CheckToggles {
    bool identities = true;
    bool atom_smoothing = true;  // atomic base + matching-variance smoothing
};

struct ExperimentConfig {
    std::vector<SequenceSpec> sequences;
    std::vector<std::size_t> n_values;
    EpsilonGridSpec epsilon_grid;
    std::vector<double> delta_grid;  // non-ascending; empty disables the table
    GridConfig grid;
    double c_constant = 1.0;  // Kolmogorov-bound shape constant
    CheckToggles checks;
    OutputSpec output;
    std::uint64_t seed = 1;
    // runtime knob (CLI/env), not part of the config file
    std::size_t threads = 0;  // 0 = auto
};

ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& cfg, const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);  // canonical form

// materializes the first max_n summands (iid sharing one spec object)
SumSequence build_sequence(const SequenceSpec& s, std::size_t max_n);
DistPtr build_base(const BaseSpec& b);

struct CaseRow {
    std::string sequence;
    BoundReport report;
    std::string error;  // nonempty when the case failed
};

struct LindebergPoint {
    double eps = 0.0, l_n = 0.0;
};
struct LindebergTable {
    std::string sequence;
    std::size_t n = 0;
    std::vector<LindebergPoint> points;
};

struct IdentityCell {
    std::string family, test_fn;
    double ibp_gap = 0.0, kernel_gap = 0.0;
};

struct SteinCheckSummary {
    std::size_t count = 0;
    double max_residual = 0.0, max_sup_f = 0.0, max_sup_fprime = 0.0;
};

struct SmoothedAtomsRow {
    std::size_t n = 0;
    double j = 0.0;
    double tv_bound = 0.0, tv_actual = 0.0;
    bool bound_finite = false;
};

struct SmoothingTable {
    std::string sequence;
    std::size_t n = 0;
    std::vector<SmoothingRow> rows;
    std::string error;  // nonempty when the table failed
};

struct RunReport {
    std::string version;
    std::string config_text;    // canonical echo
    std::vector<CaseRow> rows;  // sorted by (sequence, n)
    std::vector<LindebergTable> lindeberg;
    std::vector<IdentityCell> identities;
    double max_identity_gap = 0.0;
    SteinCheckSummary stein;
    std::vector<SmoothedAtomsRow> smoothed_atoms;
    std::string atoms_error;  // nonempty when the demo failed
    std::vector<SmoothingTable> smoothing;
    bool ok = false;         // exit contract
    double elapsed_s = 0.0;  // console diagnostic, never serialized
};

RunReport run(const ExperimentConfig& cfg);

// fixed family x test-function identity matrix plus seeded equation checks
std::vector<IdentityCell> identity_suite();
SteinCheckSummary stein_equation_suite(std::uint64_t seed, std::size_t count);

// writes report files into cfg.output.dir per cfg.output.formats
void emit(const RunReport& report, const ExperimentConfig& cfg);

// tolerances behind the exit contract
inline constexpr double kIdentityTol = 1e-5;
inline constexpr double kResidualTol = 1e-6;

const char* version_string();

}  // namespace tvclt
