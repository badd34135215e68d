#pragma once

#include "gicr/mc.hpp"
#include "gicr/noarb.hpp"
#include "gicr/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gicr {

enum ExitCode : int {
    exit_ok = 0,
    exit_audit_violation = 1,
    exit_invalid_input = 2,
    exit_unsupported = 3,
};

/// The requested operation does not exist for the scenario's model.
class UnsupportedOperation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PriceRow {
    double T;
    double price;
    std::string regime;
};

/// P(t, T) for every scenario maturity at the scenario state.
std::vector<PriceRow> price_table(const Scenario& s);

/// Drift-condition audit of the scenario model. Throws UnsupportedOperation
/// for models without analytic forward-rate coefficients.
DriftReport audit_scenario(const Scenario& s, double tolerance);

struct Comparison {
    std::string quantity;
    double time;
    double closed_form;
    mc::Estimate mc;

    double z_score() const;
    bool within(double n_se = 3.0) const;
};

struct SimulationResult {
    std::vector<Comparison> comparisons;
    std::optional<mc::MartingaleTestResult> martingale;
};

/// Monte Carlo estimates next to their closed forms, plus the martingale
/// test of discounted prices where the model has a price process.
SimulationResult simulate_scenario(const Scenario& s);

struct RiccatiRow {
    double T;
    double t;
    double A;
    double B;
    bool pre_atom_limit;
    double A_closed;
    double B_closed;
};

/// Backward Riccati solutions for every maturity with the closed form beside
/// them. cir_affine only.
std::vector<RiccatiRow> riccati_table(const Scenario& s);

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::optional<double> tolerance;
};

/// Runs price|audit|simulate|riccati on a scenario file, writes the requested
/// artifacts into opts.out_dir and returns the process exit code.
int run_command(const std::string& command, const std::filesystem::path& scenario_file,
                const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace gicr
