#ifndef DLCQ_SCENARIO_HPP
#define DLCQ_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlcq/diagnostics.hpp"
#include "dlcq/fock.hpp"
#include "dlcq/hamiltonian.hpp"

namespace dlcq {

/// Schema violation in a config document; what() starts with the field path.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A state given either as a register bitstring or by occupied mode labels.
/// The mode form survives changes of N_max.
struct StateSpec {
    std::string label;
    std::optional<std::string> bitstring;
    std::vector<int> fermions;
    std::vector<int> antifermions;
    std::map<int, int> bosons;  // mode -> occupancy

    FockState resolve(const QubitLayout& layout) const;
};

/// What counts as "transition". Default: every other state of the initial
/// (K, Q) sector.
struct TargetSpec {
    std::vector<StateSpec> states;
    std::optional<int> k, q;
    std::optional<int> boson_count, fermion_count, antifermion_count;

    bool is_filter() const { return states.empty(); }
};

enum class Method { Exact, Trotter };

struct EvolutionSpec {
    Method method = Method::Exact;
    std::vector<double> times;
    std::optional<int> n_steps;  // every time point split into n_steps
    std::optional<double> dt;    // one trajectory with a fixed step
    int order = 1;
    bool compare_exact = false;  // also emit exact rows on the same grid
};

struct ScenarioConfig {
    std::string scenario = "custom";
    int n_fermion = 3;
    int n_antifermion = 3;
    int n_boson = 3;
    std::vector<int> modals{3, 3, 3};
    ModelParams params;
    PartMask parts;
    std::vector<StateSpec> initial_states;
    TargetSpec target;
    EvolutionSpec evolution;
    /// Grid sweep, parameters iterated in key order, last key fastest.
    std::map<std::string, std::vector<double>> sweep;
    int shots = 0;  // 0 = statevector readout
    std::uint64_t seed = 1;
    std::string output;
    bool save_probabilities = false;

    ModeConfig modes() const { return {n_fermion, n_antifermion, n_boson, modals}; }
};

struct PresetInfo {
    std::string name;
    std::string description;
};

const std::vector<PresetInfo>& presets();

/// Preset defaults, before any user overrides. Throws ConfigError for an
/// unknown name.
ScenarioConfig preset(const std::string& name);

/// Builds a validated config from a document: preset defaults first, then
/// every given field. Schema problems throw ConfigError, physics violations
/// (non-positive masses, cutoff below N_max) std::domain_error.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_text(const std::string& text);

/// Full echo; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

/// Checks what parse_config checks; used after programmatic edits.
void validate(const ScenarioConfig& config);

/// One sweep point with its parameters applied.
struct ScenarioPoint {
    std::string label;  // e.g. "coupling=4,n_max=3", empty without a sweep
    ScenarioConfig config;
};

std::vector<ScenarioPoint> expand_sweep(const ScenarioConfig& config);

struct ResultRow {
    std::string point;
    std::string state;
    Method method = Method::Exact;
    EvolutionRecord record;
};

struct RunResult {
    std::vector<ResultRow> rows;
    nlohmann::json manifest;
};

RunResult run_scenario(const ScenarioConfig& config);

inline constexpr const char* kResultCsvHeader = "point,state,method,time,survival,transition,leak_K,leak_Q";

std::string to_csv(const RunResult& result);

/// Writes <base>.csv and <base>.json; returns the two paths.
std::pair<std::string, std::string> write_outputs(const RunResult& result, const std::string& base);

std::string to_string(Method m);

}  // namespace dlcq

#endif  // DLCQ_SCENARIO_HPP
