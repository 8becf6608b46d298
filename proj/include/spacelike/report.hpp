#pragma once

// Case registry, full verification pipeline and report serialization for the
// `lab` command-line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spacelike/bounds.hpp"

namespace spacelike {

inline constexpr const char* kReportSchema = "spacelike-lab-report/1";
inline constexpr const char* kSuiteSchema = "spacelike-lab-suite/1";
inline constexpr double kMinkowskiTol = 1e-3;
inline constexpr double kTraceIdentityTol = 1e-2;
inline constexpr double kAveragingTol = 5e-3;

/// Names accepted by run_case.
const std::vector<std::string>& case_registry();

enum class ReportFormat { json, csv };

struct RunConfig {
    std::string case_name = "sphere-hyperplane";
    int n = 2;
    int level = 3;
    int samples = 10;  ///< timelike directions
    std::uint64_t seed = 7;
    std::int64_t mc_samples = 100000;  ///< averaging-lemma Monte Carlo check
    double bound_tol = kBoundTol;
    double equality_tol = kEqualityTol;
    std::string spec_file;  ///< custom-spec-file only
    std::string out;
    ReportFormat format = ReportFormat::json;
    bool timings = false;  ///< include wall-clock timings in the JSON

    /// Throws UsageError.
    void validate() const;
    nlohmann::ordered_json to_json() const;
};

/// Keys mirror the long flag names (`case`, `n`, `level`, `samples`, `seed`,
/// `mc-samples`, `bound-tol`, `equality-tol`, `spec`, `out`, `format`, `timings`).
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig config_from_file(const std::string& path, RunConfig base = {});

struct IdentityResidual {
    std::string name;
    double value = 0.0;  ///< normalized as described per identity
    double tolerance = 0.0;
    bool within = false;
    std::vector<std::pair<std::string, double>> details;
};

struct EqualityRecord {
    Vec a;
    EqualityDiagnostic diagnostic;
    Expectation expected = Expectation::info;
    std::optional<Verdict> expected_verdict;
};

struct Timing {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    RunConfig config;
    std::string immersion;  ///< description of the immersion actually used
    nlohmann::ordered_json immersion_description;
    int m = 0;
    Eigen::Index vertices = 0;
    Eigen::Index elements = 0;
    double volume = 0.0;
    Vec gravity_center;
    Spectrum spectrum;
    std::optional<double> lambda1_exact;
    double lambda1_coarse = 0.0;
    double discretization_tolerance = 0.0;
    std::vector<BoundReport> bounds;
    std::vector<IdentityResidual> identities;
    std::vector<EqualityRecord> equality;
    std::vector<Timing> timings;
    std::string error;  ///< non-empty after a numerical failure
    std::string failed_stage;

    bool passed() const;
    /// "pass" | "fail" | "error"
    std::string verdict() const;
    nlohmann::ordered_json to_json() const;
    std::string to_csv() const;
    std::string summary() const;
};

/// Throws UsageError for unknown cases or invalid configs; numerical failures
/// are captured in RunReport::error with the results computed so far.
RunReport run_case(const RunConfig& config);

struct ConvergenceRow {
    std::string case_name;
    int n = 0;
    int level = 0;
    Eigen::Index vertices = 0;
    double lambda1 = 0.0;
    std::optional<double> lambda1_error;
    double minkowski = 0.0;
    double beltrami = 0.0;
    double trace_position = 0.0;
};

struct SuiteReport {
    std::vector<RunReport> runs;
    std::vector<ConvergenceRow> convergence;

    bool passed() const;
    std::vector<std::string> failing_cases() const;
    nlohmann::ordered_json to_json(bool with_runs = true) const;
    std::string summary() const;
};

/// Every case at every level. `all` in `cases` expands to the built-in
/// gallery (custom-spec-file excluded unless named with base.spec_file set).
SuiteReport run_suite(const std::vector<int>& levels, const std::vector<std::string>& cases,
                      const RunConfig& base = {});

/// Averaging-lemma Monte Carlo verification at ambient dimension m.
struct SectionAverageCheck {
    int m = 0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    struct Row {
        int q = 0;
        std::string domain;  ///< "section" | "sphere"
        Vec a;               ///< empty for the Euclidean sphere
        double exact = 0.0;
        double estimate = 0.0;
        double std_error = 0.0;
        double z = 0.0;
        double relative_error = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

/// `forms` random symmetric matrices with entries N(0,1), section integrals for
/// the canonical time axis and `boosts` sampled boosts, plus the Euclidean sphere.
SectionAverageCheck section_average_check(int m, std::int64_t samples, std::uint64_t seed, int forms = 5,
                                          int boosts = 2);

}  // namespace spacelike
