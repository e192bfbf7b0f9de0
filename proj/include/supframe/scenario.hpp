#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "supframe/schrodinger.hpp"
#include "supframe/superposition.hpp"

namespace supframe {

/// Initial state descriptor; also carries the grid the state lives on.
struct InitialStateSpec {
    std::string kind;  // gaussian | spike | coherent
    int n = 256;
    double extent = 8.0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    Eigen::Vector2d momentum = Eigen::Vector2d::Zero();
    double sigma = 1.0;
    int spike_ix = -1;  // -1: grid center
    int spike_iy = -1;

    GridSpec grid() const { return GridSpec::square(n, extent); }
    WaveField build(const Potential& v) const;
};

/// Parsed and validated scenario.  `echo` is the normalized form of
/// the input (defaults materialized, keys sorted); serializing a parsed
/// scenario and parsing it again is a fixed point.
struct ScenarioConfig {
    int dimension = 2;
    std::uint64_t seed = 0;
    std::vector<std::string> frames;
    std::vector<FrameSuperposition> superpositions;
    std::optional<InitialStateSpec> initial_state;
    std::optional<Potential> potential;
    std::optional<EvolutionParams> evolution;
    std::vector<std::string> outputs = {"report"};
    bool negative_control = false;
    nlohmann::json echo;

    /// Superposition whose source/target match the given frame labels.
    const FrameSuperposition& superposition_between(const std::string& source,
                                                    const std::string& target) const;
};

ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// One named numeric check: passes when |value - target| <= tolerance.
/// `expect_pass` flips the meaning for negative-control runs; a run is
/// in order when every check matches its expectation.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool expect_pass = true;

    bool as_expected() const { return pass == expect_pass; }
};

struct RunResult {
    std::string command;
    std::string config_hash;
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;
    std::vector<std::pair<std::string, double>> timings_ms;
    nlohmann::json details;

    /// Adds a check; each name may be declared only once.
    void add_check(const std::string& name, double value, double tolerance,
                   double target = 0.0, bool expect_pass = true);
    bool all_ok() const;
};

RunResult run_compose(const ScenarioConfig& cfg);
RunResult run_sample(const ScenarioConfig& cfg, std::uint64_t n);
RunResult run_invariance(const ScenarioConfig& cfg);
RunResult run_appendix_verification(const std::string& group_name, std::uint64_t trials,
                                    std::uint64_t seed);

/// Stable report payload: everything except timings.
nlohmann::json report_json(const RunResult& result);

struct FieldDump {
    std::string name;
    WaveField field;
};

/// Writes report.json (byte-stable for a fixed config and seed),
/// timings.json (volatile) and one CSV per dumped field.
void emit_outputs(const RunResult& result, const std::string& out_dir,
                  const std::vector<FieldDump>& fields = {});

/// CSV dump: header x,y,re,im; rows ordered y-major; 17 significant digits.
void write_field_csv(const WaveField& field, const std::string& path);

std::string fnv1a64_hex(const std::string& bytes);

}  // namespace supframe
