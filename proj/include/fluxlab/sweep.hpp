#pragma once

#include "fluxlab/constants.hpp"
#include "fluxlab/geometry.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxlab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SweepTask : unsigned {
    Eigenvalue = 1u << 0,
    GlEnergy = 1u << 1,
    Classify = 1u << 2,
    Constants = 1u << 3,
};

struct SweepConfig {
    DomainSpec domain = DomainSpec::disc(1.0);
    int resolution = 64;
    std::vector<double> h_values;
    std::vector<double> epsilon_values; // empty = pure AB (epsilon 0 rows)
    std::vector<double> kappa_values;   // empty = single kappa 1
    unsigned tasks = 0;
    std::string output_path; // empty = stdout
    std::string seed;        // free-form metadata echoed into the CSV header

    bool has(SweepTask t) const { return (tasks & static_cast<unsigned>(t)) != 0; }
};

/// One (h, epsilon, kappa) result row. Absent fields stay disengaged and
/// print as empty CSV cells.
struct SweepRecord {
    double h = 0.0;
    double epsilon = 0.0; // 0 for AB / PointFlux
    double kappa = 0.0;
    int resolution = 0;
    std::optional<double> lambda;
    std::optional<double> energy_total;
    std::optional<double> energy_kinetic;
    std::optional<double> energy_condensation;
    std::optional<double> energy_field;
    std::optional<std::string> classification;
    std::optional<double> sup_psi;
    std::optional<long> iterations;
    std::string error;
    double wall_time_ms = 0.0;
};

/// Parse the plain-text `key = value` sweep configuration. Unknown keys are
/// rejected. Numeric lists accept pi-expressions such as `pi/2` or `3pi/2`.
SweepConfig parse_config(std::istream& in);
SweepConfig parse_config_file(const std::string& path);
double parse_pi_expression(const std::string& token);

/// Parse a domain description: "disc R", "ellipse A B", "square L", or
/// "star r1 ... rM" (M >= 8).
DomainSpec parse_domain_spec(const std::string& value);

/// Run every (h, epsilon, kappa) point of the config on a bounded worker
/// pool. Failures become error rows; output order is the sort key order and
/// never depends on the worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, int workers = 1);

/// CSV with `#` metadata header. Columns, in order: h, epsilon, kappa,
/// resolution, lambda, energy_total, energy_kinetic, energy_condensation,
/// energy_field, classification, sup_psi, iterations, error, wall_time_ms.
/// wall_time_ms is the only column allowed to differ between identical runs.
std::string csv_table(const SweepConfig& config, const std::vector<SweepRecord>& records,
                      const std::optional<DomainConstants>& constants);

/// Witnessing pairs (h_i, h_j), h_i < h_j, with value_j < value_i - tol.
enum class SweepColumn { Lambda, EnergyTotal };
std::vector<std::pair<double, double>> detect_nonmonotone(const std::vector<SweepRecord>& table,
                                                          SweepColumn column, double tol = 1e-6);

/// Classification table at h_n = pi n, n = 1..n_max, with the AharonovBohm
/// (epsilon = 0) or Step(epsilon) potential. Asserts the small-kappa
/// precondition kappa^2 < (1 + C_*)^-1 lambda_AB(pi) before running.
std::vector<SweepRecord> oscillation_report(const DomainSpec& domain, int resolution, double kappa,
                                            int n_max, double epsilon, int workers = 1);

struct ConvergenceRow {
    double epsilon = 0.0;
    double energy_eps = 0.0;
    double gap = 0.0; // |E_eps - E_AB|
};
struct ConvergenceReport {
    double energy_ab = 0.0;
    std::vector<ConvergenceRow> rows;
};
ConvergenceReport convergence_report(const DomainSpec& domain, double h, double kappa,
                                     const std::vector<double>& epsilon_values, int resolution,
                                     int workers = 1);

/// Theorem-verification bundle: twisted-ring limit, periodicity, degenerate
/// energy, positivity, non-monotonicity scan, oscillation report n = 1..4;
/// appends every computed row to csv_out and one [ok]/[FAIL] line per check.
/// Returns true when all assertions hold.
bool verify_bundle(bool fast, int workers, std::ostream& csv_out, std::ostream& log);

} // namespace fluxlab
