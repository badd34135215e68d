#pragma once

#include "gicr/affine.hpp"
#include "gicr/blackcox.hpp"
#include "gicr/curves.hpp"
#include "gicr/mc.hpp"
#include "gicr/measure.hpp"
#include "gicr/merton.hpp"
#include "gicr/noarb.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gicr {

enum class ModelKind { merton, blackcox, cir_affine, custom_curve };

std::string to_string(ModelKind kind);

/// Where the model is observed: time t, the state driving it (w for the
/// Merton and Black-Cox proxies, x for the CIR factor) and the default time
/// if it has already happened.
struct ObservationState {
    double t = 0.0;
    double w = 0.0;
    double x = 0.0;
    double tau = std::numeric_limits<double>::infinity();

    DefaultStatus status() const { return DefaultStatus{tau}; }
};

/// Deterministic curve with constant rates. Unset forward values default to
/// the ones that satisfy the drift conditions.
struct CustomCurveParams {
    double r = 0.0;
    double lambda = 0.0;
    std::vector<CompensatorJump> jumps;
    std::optional<double> ac_rate;
    std::optional<std::vector<double>> atom_values;
};

struct Scenario {
    ModelKind model = ModelKind::custom_curve;
    merton::MertonParams merton;
    blackcox::BlackCoxParams blackcox;
    affine::CirParams cir;
    CustomCurveParams custom;
    /// Replaces the atom forward values of merton or custom_curve.
    std::optional<std::vector<double>> atom_override;

    RiskyMeasure measure;
    ObservationState state;
    std::vector<double> maturities;
    double horizon = 1.0;
    mc::SimConfig sim;
    std::optional<double> tolerance;
    double riccati_step = 1e-3;
    std::vector<std::string> outputs;

    /// True if the artifact is requested (an empty list requests everything).
    bool wants(const std::string& artifact) const;
};

struct ScenarioIssue {
    std::string field;
    std::string message;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<ScenarioIssue> issues);
    ScenarioError(std::string field, std::string message)
        : ScenarioError(std::vector<ScenarioIssue>{{std::move(field), std::move(message)}}) {}
    const std::vector<ScenarioIssue>& issues() const { return issues_; }
    nlohmann::json to_json() const;

private:
    std::vector<ScenarioIssue> issues_;
};

/// Parses and validates a scenario; every problem found is reported together
/// in a ScenarioError.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& file);

/// Artifact names a scenario may request.
const std::vector<std::string>& known_artifacts();

/// The custom_curve model pieces.
ForwardCurveModel custom_curve(const Scenario& s);
CompensatorSpec custom_compensator(const Scenario& s);
ShortRateModel custom_short_rate(const Scenario& s);

}  // namespace gicr
