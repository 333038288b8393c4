#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dcrp/fitness.hpp"
#include "dcrp/table.hpp"

namespace dcrp {

/// Checkpoint schedule t_k = k^eta with separation scale lambda_t = t^-kappa.
/// phi and rho are the auxiliary exponents the feasibility chains are written in.
struct Schedule {
    double eta;
    double kappa;
    double phi;
    double rho;
};

/// Sequential midpoints of the feasibility chain for the entry's class.
/// Weibull needs alpha > 1; throws ScheduleInfeasible otherwise.
Schedule default_schedule(const FitnessSpec& spec);

/// Throws ScheduleInfeasible naming the first violated inequality.
void validate_schedule(const FitnessSpec& spec, const Schedule& s);

enum class ExperimentKind { OneTable, TwoTable, Basic, Transitions };

ExperimentKind parse_experiment_kind(std::string_view s);
const char* to_string(ExperimentKind k);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::OneTable;
    bool kind_declared = false; // set when a config file names the experiment
    FitnessSpec spec = FitnessSpec::weibull(2.0);
    double theta = 1.0;
    std::optional<std::uint64_t> seed;
    std::uint64_t replicas = 100;
    std::vector<double> t_grid;      // one-table
    double t_max = 1000.0;           // two-table
    std::vector<std::uint64_t> n_grid; // basic, transitions (last entry is n_max)
    std::optional<double> eta, kappa, phi, rho;
    bool outside_theorem = false;    // permit Weibull alpha <= 1 in two-table runs
    std::optional<bool> include_root_table;
    std::size_t window = 10;         // checkpoints compared at each end of a two-table path
    double dip_window = 0.1;         // transitions: dip measured over [n, n (1 + dip_window)]
    std::uint64_t min_change_n = 1000;
    unsigned threads = 1;
    bool force = false;

    // Pre-registered thresholds.
    double median_share = 0.9;
    double path_fraction = 0.95;
    double separation_fraction = 0.9;
    double kn_low = 0.8;
    double kn_high = 1.2;
    double dip_level = 0.75;
};

/// Reads the TOML layout documented in experiments/README.md.
ExperimentConfig parse_experiment_config(std::string_view toml_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Resolved schedule: config overrides on top of default_schedule, validated
/// unless outside_theorem is set.
Schedule resolve_schedule(const ExperimentConfig& cfg);

/// Elementary steps the configuration will perform (tables touched or customers seated).
double expected_operations(const ExperimentConfig& cfg);

/// Throws BudgetExceeded above 1e10 operations unless cfg.force.
void check_budget(const ExperimentConfig& cfg);

struct Check {
    std::string name;
    bool pass;
    double value;
    double threshold;
    std::string detail;
};

struct ExperimentResult {
    DataTable table;
    std::vector<Check> checks;
    bool passed() const;
};

DataTable checks_table(const std::vector<Check>& checks);

/// Snapshot quantiles of the leader share along cfg.t_grid.
ExperimentResult exp_one_table(const ExperimentConfig& cfg);
/// Single-path evolution along t_k = k^eta up to cfg.t_max.
ExperimentResult exp_two_table(const ExperimentConfig& cfg);
/// Discrete-time K_n / log n, first-table share and leader birth along cfg.n_grid.
ExperimentResult exp_basic(const ExperimentConfig& cfg);
/// Leadership changes of discrete paths up to the last entry of cfg.n_grid.
ExperimentResult exp_leader_transitions(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Version string of the TOML reader, for manifests.
std::string config_library_version();

} // namespace dcrp
