#include "dlcq/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "dlcq/evolve.hpp"

namespace dlcq {

using nlohmann::json;

namespace {

// ---- reading helpers: every failure names the field path ----

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(join(path, key), "unknown field");
        }
    }
}

const json& object_at(const json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    return j;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
    return v;
}

int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) {
        if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>()) return static_cast<int>(j.get<double>());
        throw ConfigError(path, "expected an integer");
    }
    return j.get<int>();
}

bool bool_at(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
    return j.get<bool>();
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ConfigError(path, "expected a string");
    return j.get<std::string>();
}

std::vector<int> int_list_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(int_at(j[i], index(path, i)));
    return out;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string default_label(const StateSpec& s) {
    std::string out;
    auto add = [&](const std::string& part) { out += (out.empty() ? "" : "+") + part; };
    for (int k : s.fermions) add("f" + std::to_string(k));
    for (int k : s.antifermions) add("fbar" + std::to_string(k));
    for (const auto& [n, occ] : s.bosons) add("phi" + std::to_string(n) + (occ > 1 ? "^" + std::to_string(occ) : ""));
    return out.empty() ? "vacuum" : out;
}

StateSpec parse_state(const json& j, const std::string& path) {
    StateSpec s;
    if (j.is_string()) {
        s.bitstring = j.get<std::string>();
        s.label = *s.bitstring;
        return s;
    }
    object_at(j, path);
    only_keys(j, path, {"label", "bitstring", "fermions", "antifermions", "bosons"});
    if (j.contains("bitstring")) {
        if (j.contains("fermions") || j.contains("antifermions") || j.contains("bosons")) {
            throw ConfigError(path, "give either a bitstring or mode lists, not both");
        }
        s.bitstring = string_at(j["bitstring"], join(path, "bitstring"));
    }
    if (j.contains("fermions")) s.fermions = int_list_at(j["fermions"], join(path, "fermions"));
    if (j.contains("antifermions")) s.antifermions = int_list_at(j["antifermions"], join(path, "antifermions"));
    if (j.contains("bosons")) {
        const std::string bp = join(path, "bosons");
        object_at(j["bosons"], bp);
        for (const auto& [key, value] : j["bosons"].items()) {
            int mode = 0;
            try {
                std::size_t used = 0;
                mode = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ConfigError(join(bp, key), "boson keys are mode numbers");
            }
            s.bosons[mode] = int_at(value, join(bp, key));
        }
    }
    s.label = j.contains("label") ? string_at(j["label"], join(path, "label"))
                                  : (s.bitstring ? *s.bitstring : default_label(s));
    return s;
}

json state_to_json(const StateSpec& s) {
    json j;
    j["label"] = s.label;
    if (s.bitstring) {
        j["bitstring"] = *s.bitstring;
        return j;
    }
    j["fermions"] = s.fermions;
    j["antifermions"] = s.antifermions;
    json b = json::object();
    for (const auto& [n, occ] : s.bosons) b[std::to_string(n)] = occ;
    j["bosons"] = b;
    return j;
}

std::vector<double> parse_times(const json& j, const std::string& path) {
    std::vector<double> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number_at(j[i], index(path, i)));
        return out;
    }
    object_at(j, path);
    only_keys(j, path, {"start", "stop", "step"});
    const double start = j.contains("start") ? number_at(j["start"], join(path, "start")) : 0.0;
    if (!j.contains("stop")) throw ConfigError(join(path, "stop"), "required");
    if (!j.contains("step")) throw ConfigError(join(path, "step"), "required");
    const double stop = number_at(j["stop"], join(path, "stop"));
    const double step = number_at(j["step"], join(path, "step"));
    if (!(step > 0.0)) throw ConfigError(join(path, "step"), "must be positive");
    if (stop < start) throw ConfigError(join(path, "stop"), "must not be below start");
    // integer count avoids drift from repeated addition
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

const std::set<std::string>& sweep_keys() {
    static const std::set<std::string> keys{"coupling", "n_max", "n_steps", "modals", "order", "fermion_mass",
                                            "boson_mass"};
    return keys;
}

std::string jw_name(JwOrdering o) { return o == JwOrdering::Global ? "global" : "per-species"; }

void apply_modes(ScenarioConfig& c, const json& j, const std::string& path) {
    object_at(j, path);
    only_keys(j, path, {"n_max", "n_fermion", "n_antifermion", "n_boson", "modals"});
    const int fill = c.modals.empty() ? 3 : c.modals.front();
    if (j.contains("n_max")) {
        const int n = int_at(j["n_max"], join(path, "n_max"));
        c.n_fermion = c.n_antifermion = c.n_boson = n;
    }
    if (j.contains("n_fermion")) c.n_fermion = int_at(j["n_fermion"], join(path, "n_fermion"));
    if (j.contains("n_antifermion")) c.n_antifermion = int_at(j["n_antifermion"], join(path, "n_antifermion"));
    if (j.contains("n_boson")) c.n_boson = int_at(j["n_boson"], join(path, "n_boson"));
    if (c.n_boson < 0) throw ConfigError(join(path, "n_boson"), "must be positive");
    if (j.contains("modals")) {
        const json& m = j["modals"];
        if (m.is_array()) {
            c.modals = int_list_at(m, join(path, "modals"));
        } else {
            c.modals.assign(static_cast<std::size_t>(c.n_boson), int_at(m, join(path, "modals")));
        }
    } else {
        c.modals.assign(static_cast<std::size_t>(c.n_boson), fill);
    }
}

void apply_model(ScenarioConfig& c, const json& j, const std::string& path) {
    object_at(j, path);
    only_keys(j, path, {"fermion_mass", "boson_mass", "coupling", "inertia_cutoff", "box_length", "include_inertias",
                        "jw_ordering"});
    ModelParams& p = c.params;
    if (j.contains("fermion_mass")) p.fermion_mass = number_at(j["fermion_mass"], join(path, "fermion_mass"));
    if (j.contains("boson_mass")) p.boson_mass = number_at(j["boson_mass"], join(path, "boson_mass"));
    if (j.contains("coupling")) p.coupling = number_at(j["coupling"], join(path, "coupling"));
    if (j.contains("inertia_cutoff")) p.inertia_cutoff = int_at(j["inertia_cutoff"], join(path, "inertia_cutoff"));
    if (j.contains("box_length")) p.box_length = number_at(j["box_length"], join(path, "box_length"));
    if (j.contains("include_inertias")) p.include_inertias = bool_at(j["include_inertias"], join(path, "include_inertias"));
    if (j.contains("jw_ordering")) {
        const std::string v = string_at(j["jw_ordering"], join(path, "jw_ordering"));
        if (v == "global") p.jw_ordering = JwOrdering::Global;
        else if (v == "per-species") p.jw_ordering = JwOrdering::PerSpecies;
        else throw ConfigError(join(path, "jw_ordering"), "expected \"global\" or \"per-species\"");
    }
}

void apply_target(ScenarioConfig& c, const json& j, const std::string& path) {
    c.target = TargetSpec{};
    if (j.is_string()) {
        if (j.get<std::string>() != "same-sector") throw ConfigError(path, "expected \"same-sector\", a list or a filter");
        return;
    }
    if (j.is_array()) {
        if (j.empty()) throw ConfigError(path, "empty target list");
        for (std::size_t i = 0; i < j.size(); ++i) c.target.states.push_back(parse_state(j[i], index(path, i)));
        return;
    }
    object_at(j, path);
    only_keys(j, path, {"K", "Q", "boson_count", "fermion_count", "antifermion_count"});
    if (j.contains("K")) c.target.k = int_at(j["K"], join(path, "K"));
    if (j.contains("Q")) c.target.q = int_at(j["Q"], join(path, "Q"));
    if (j.contains("boson_count")) c.target.boson_count = int_at(j["boson_count"], join(path, "boson_count"));
    if (j.contains("fermion_count")) c.target.fermion_count = int_at(j["fermion_count"], join(path, "fermion_count"));
    if (j.contains("antifermion_count"))
        c.target.antifermion_count = int_at(j["antifermion_count"], join(path, "antifermion_count"));
}

void apply_evolution(ScenarioConfig& c, const json& j, const std::string& path) {
    object_at(j, path);
    only_keys(j, path, {"method", "times", "n_steps", "dt", "order", "compare_exact"});
    EvolutionSpec& e = c.evolution;
    if (j.contains("method")) {
        const std::string m = string_at(j["method"], join(path, "method"));
        if (m == "exact") e.method = Method::Exact;
        else if (m == "trotter") e.method = Method::Trotter;
        else throw ConfigError(join(path, "method"), "expected \"exact\" or \"trotter\"");
    }
    if (j.contains("times")) e.times = parse_times(j["times"], join(path, "times"));
    // giving only one of n_steps / dt replaces the preset's choice
    if (j.contains("n_steps") != j.contains("dt")) {
        e.n_steps.reset();
        e.dt.reset();
    }
    if (j.contains("n_steps")) e.n_steps = int_at(j["n_steps"], join(path, "n_steps"));
    if (j.contains("dt")) e.dt = number_at(j["dt"], join(path, "dt"));
    if (j.contains("order")) e.order = int_at(j["order"], join(path, "order"));
    if (j.contains("compare_exact")) e.compare_exact = bool_at(j["compare_exact"], join(path, "compare_exact"));
}

void apply_sweep(ScenarioConfig& c, const json& j, const std::string& path) {
    object_at(j, path);
    c.sweep.clear();
    for (const auto& [key, value] : j.items()) {
        const std::string kp = join(path, key);
        if (!sweep_keys().count(key)) throw ConfigError(kp, "not a sweepable parameter");
        if (!value.is_array() || value.empty()) throw ConfigError(kp, "expected a non-empty array of numbers");
        std::vector<double> vals;
        for (std::size_t i = 0; i < value.size(); ++i) vals.push_back(number_at(value[i], index(kp, i)));
        c.sweep[key] = std::move(vals);
    }
}

void apply_sweep_value(ScenarioConfig& c, const std::string& key, double v) {
    const int iv = static_cast<int>(std::lround(v));
    if (key == "coupling") c.params.coupling = v;
    else if (key == "fermion_mass") c.params.fermion_mass = v;
    else if (key == "boson_mass") c.params.boson_mass = v;
    else if (key == "order") c.evolution.order = iv;
    else if (key == "n_steps") {
        c.evolution.n_steps = iv;
        c.evolution.dt.reset();
    } else if (key == "n_max") {
        const int fill = c.modals.empty() ? 3 : c.modals.front();
        c.n_fermion = c.n_antifermion = c.n_boson = iv;
        c.modals.assign(static_cast<std::size_t>(iv), fill);
    } else if (key == "modals") {
        c.modals.assign(static_cast<std::size_t>(c.n_boson), iv);
    }
}

// checks that do not depend on the sweep point
void validate_common(const ScenarioConfig& c) {
    for (const auto& [key, values] : c.sweep) {
        if (key == "coupling" || key == "fermion_mass" || key == "boson_mass") continue;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] != std::floor(values[i])) throw ConfigError(index("sweep." + key, i), "expected an integer");
    }
    if (c.initial_states.empty()) throw ConfigError("initial_states", "at least one initial state is required");
    const EvolutionSpec& e = c.evolution;
    if (e.times.empty()) throw ConfigError("evolution.times", "no time points");
    for (std::size_t i = 0; i < e.times.size(); ++i) {
        if (e.times[i] < 0.0) throw ConfigError(index("evolution.times", i), "times must be non-negative");
        if (i > 0 && !(e.times[i] > e.times[i - 1])) {
            throw ConfigError(index("evolution.times", i), "time grid must be strictly increasing");
        }
    }
    if (c.shots < 0) throw ConfigError("shots", "must be non-negative");
}

void validate_point(const ScenarioConfig& c) {
    try {
        c.modes().validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("modes", e.what());
    }
    for (std::size_t i = 0; i < c.modals.size(); ++i) {
        const int m = c.modals[i];
        if (((m + 1) & m) != 0) throw ConfigError(index("modes.modals", i), "modal count must be 2^t - 1");
    }
    if (qubit_count(c.modes()) > kMaxQubits) throw ConfigError("modes", "register wider than supported");
    c.params.validate(std::max({c.n_fermion, c.n_antifermion, c.n_boson}));
    const EvolutionSpec& e = c.evolution;
    if (e.order != 1 && e.order != 2) throw ConfigError("evolution.order", "must be 1 or 2");
    if (e.method == Method::Trotter) {
        if (!e.n_steps && !e.dt) throw ConfigError("evolution", "trotter evolution needs n_steps or dt");
        if (e.n_steps && *e.n_steps < 1) throw ConfigError("evolution.n_steps", "must be positive");
        if (e.dt) {
            if (!(*e.dt > 0.0)) throw ConfigError("evolution.dt", "must be positive");
            for (std::size_t i = 0; i < e.times.size(); ++i) {
                const double k = e.times[i] / *e.dt;
                if (std::abs(k - std::round(k)) > 1e-6) {
                    throw ConfigError(index("evolution.times", i), "not a whole number of steps of dt");
                }
            }
            if (e.n_steps && std::abs(*e.n_steps * *e.dt - e.times.back()) > 1e-9 * std::max(1.0, e.times.back())) {
                throw ConfigError("evolution", "n_steps * dt must equal the final time");
            }
        }
    }
    QubitLayout layout(c.modes());
    for (std::size_t i = 0; i < c.initial_states.size(); ++i) {
        try {
            c.initial_states[i].resolve(layout);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(index("initial_states", i), e.what());
        } catch (const std::out_of_range& e) {
            throw ConfigError(index("initial_states", i), e.what());
        }
    }
    for (std::size_t i = 0; i < c.target.states.size(); ++i) {
        try {
            c.target.states[i].resolve(layout);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(index("target", i), e.what());
        } catch (const std::out_of_range& e) {
            throw ConfigError(index("target", i), e.what());
        }
    }
}

StateSpec fock(std::string label, std::vector<int> f, std::vector<int> a, std::map<int, int> b) {
    StateSpec s;
    s.label = std::move(label);
    s.fermions = std::move(f);
    s.antifermions = std::move(a);
    s.bosons = std::move(b);
    return s;
}

StateSpec bits(std::string label, std::string b) {
    StateSpec s;
    s.label = std::move(label);
    s.bitstring = std::move(b);
    return s;
}

std::vector<double> grid(double start, double stop, double step) {
    return parse_times(json{{"start", start}, {"stop", stop}, {"step", step}}, "");
}

void set_uniform(ScenarioConfig& c, int n, int m) {
    c.n_fermion = c.n_antifermion = c.n_boson = n;
    c.modals.assign(static_cast<std::size_t>(n), m);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Counts {
    int n = 0, f = 0, a = 0;
};

Counts particle_counts(const FockState& s) {
    Counts c;
    for (int b : s.bosons) c.n += b;
    for (auto x : s.fermions) c.f += x;
    for (auto x : s.antifermions) c.a += x;
    return c;
}

std::vector<FockState> resolve_targets(const TargetSpec& t, const FockState& initial, const QubitLayout& layout) {
    std::vector<FockState> out;
    if (!t.is_filter()) {
        for (const auto& s : t.states) out.push_back(s.resolve(layout));
        return out;
    }
    const bool plain = !t.k && !t.q && !t.boson_count && !t.fermion_count && !t.antifermion_count;
    for (auto& s : enumerate_sector(layout.config(), t.k.value_or(k_of(initial)), t.q.value_or(q_of(initial)))) {
        if (plain && s == initial) continue;
        const Counts c = particle_counts(s);
        if (t.boson_count && c.n != *t.boson_count) continue;
        if (t.fermion_count && c.f != *t.fermion_count) continue;
        if (t.antifermion_count && c.a != *t.antifermion_count) continue;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::string to_string(Method m) { return m == Method::Exact ? "exact" : "trotter"; }

FockState StateSpec::resolve(const QubitLayout& layout) const {
    const ModeConfig& cfg = layout.config();
    if (bitstring) {
        FockState s = decode(parse_bitstring(*bitstring, layout), layout);
        if (!is_valid(s, cfg)) throw std::invalid_argument("bitstring '" + *bitstring + "' exceeds a modal cap");
        return s;
    }
    FockState s = FockState::vacuum(cfg);
    for (int k : fermions) {
        if (k < 1 || k > cfg.n_fermion) throw std::invalid_argument("fermion mode " + std::to_string(k) + " out of range");
        if (s.fermions[static_cast<std::size_t>(k - 1)]) throw std::invalid_argument("fermion mode listed twice");
        s.fermions[static_cast<std::size_t>(k - 1)] = 1;
    }
    for (int k : antifermions) {
        if (k < 1 || k > cfg.n_antifermion) {
            throw std::invalid_argument("antifermion mode " + std::to_string(k) + " out of range");
        }
        if (s.antifermions[static_cast<std::size_t>(k - 1)]) throw std::invalid_argument("antifermion mode listed twice");
        s.antifermions[static_cast<std::size_t>(k - 1)] = 1;
    }
    for (const auto& [n, occ] : bosons) {
        if (n < 1 || n > cfg.n_boson) throw std::invalid_argument("boson mode " + std::to_string(n) + " out of range");
        if (occ < 0 || occ > cfg.modals[static_cast<std::size_t>(n - 1)]) {
            throw std::invalid_argument("boson occupancy " + std::to_string(occ) + " outside the modal range");
        }
        s.bosons[static_cast<std::size_t>(n - 1)] = occ;
    }
    return s;
}

const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> list{
        {"rabi", "N=3, m=3, lambda=4: exact two-level oscillation of f2 <-> f1+phi1, t in [0, 1]"},
        {"trotter-study", "N=3, m=3, lambda=4: first-order Trotter with n_T = 1..10 against exact evolution"},
        {"coupling-sweep", "N=4, m=3, t=0.2, n_T=10: survival of four initial states for lambda = 1..5, 8192 shots"},
        {"nmax-study", "N_max = 4, 5, 6 at lambda = 1, 4: exact survival of the same four states at t=0.2"},
        {"pp-collision", "N=5, m=3, lambda=13.315: two-proton state, dt=0.005 Trotter trajectory to t=0.4"},
        {"hardware-minimal", "N=2, m=1, H_M + H_V, one Trotter step to t=0.2 at lambda = 1, 4, 8192 shots"},
        {"custom", "N=3, m=3 defaults; supply initial_states and evolution yourself"},
    };
    return list;
}

ScenarioConfig preset(const std::string& name) {
    ScenarioConfig c;
    c.scenario = name;
    c.output = name;
    c.evolution.times = {0.2};
    const StateSpec phi2 = fock("phi2", {}, {}, {{2, 1}});
    const StateSpec f2 = fock("f2", {2}, {}, {});
    const StateSpec fbar2 = fock("fbar2", {}, {2}, {});
    const StateSpec mixed = fock("f2+fbar2+phi2", {2}, {2}, {{2, 1}});
    if (name == "rabi" || name == "trotter-study") {
        set_uniform(c, 3, 3);
        c.params.coupling = 4.0;
        c.initial_states = {bits("f2", "010 000 00 00 00")};
        c.target.states = {bits("f1+phi1", "100 000 01 00 00")};
        if (name == "rabi") {
            c.evolution.times = grid(0.0, 1.0, 0.01);
        } else {
            c.evolution.method = Method::Trotter;
            c.evolution.times = grid(0.02, 0.4, 0.02);
            c.evolution.n_steps = 10;
            c.evolution.compare_exact = true;
            c.sweep["n_steps"] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        }
    } else if (name == "coupling-sweep") {
        set_uniform(c, 4, 3);
        c.initial_states = {phi2, f2, fbar2, mixed};
        c.evolution.method = Method::Trotter;
        c.evolution.n_steps = 10;
        c.evolution.compare_exact = true;
        c.sweep["coupling"] = {1, 2, 3, 4, 5};
        c.shots = 8192;
        c.seed = 2024;
    } else if (name == "nmax-study") {
        set_uniform(c, 4, 3);
        c.initial_states = {phi2, f2, fbar2, mixed};
        c.sweep["coupling"] = {1, 4};
        c.sweep["n_max"] = {4, 5, 6};
    } else if (name == "pp-collision") {
        set_uniform(c, 5, 3);
        c.params.coupling = 13.315;
        c.initial_states = {fock("f4+f5", {4, 5}, {}, {})};
        c.target.boson_count = 2;
        c.target.fermion_count = 2;
        c.target.antifermion_count = 0;
        c.evolution.method = Method::Trotter;
        c.evolution.dt = 0.005;
        c.evolution.times = grid(0.0, 0.4, 0.005);
    } else if (name == "hardware-minimal") {
        set_uniform(c, 2, 1);
        c.parts = PartMask::vertex_only();
        c.initial_states = {bits("f2", "01 00 00")};
        c.target.states = {bits("f1+phi1", "10 00 10")};
        c.evolution.method = Method::Trotter;
        c.evolution.n_steps = 1;
        c.evolution.compare_exact = true;
        c.sweep["coupling"] = {1, 4};
        c.shots = 8192;
        c.seed = 7;
    } else if (name == "custom") {
        set_uniform(c, 3, 3);
    } else {
        throw ConfigError("scenario", "unknown scenario '" + name + "' (see list-scenarios)");
    }
    return c;
}

ScenarioConfig parse_config(const json& doc) {
    object_at(doc, "<document>");
    only_keys(doc, "", {"scenario", "modes", "model", "parts", "initial_state", "initial_states", "target", "evolution",
                        "sweep", "shots", "seed", "output", "save_probabilities"});
    const std::string name = doc.contains("scenario") ? string_at(doc["scenario"], "scenario") : "custom";
    ScenarioConfig c = preset(name);
    if (doc.contains("modes")) apply_modes(c, doc["modes"], "modes");
    if (doc.contains("model")) apply_model(c, doc["model"], "model");
    if (doc.contains("parts")) {
        const json& p = doc["parts"];
        if (!p.is_array() || p.empty()) throw ConfigError("parts", "expected a non-empty array such as [\"HM\", \"HV\"]");
        c.parts = PartMask{false, false, false, false};
        for (std::size_t i = 0; i < p.size(); ++i) {
            Part part{};
            try {
                part = parse_part(string_at(p[i], index("parts", i)));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw ConfigError(index("parts", i), e.what());
            }
            switch (part) {
                case Part::Mass: c.parts.mass = true; break;
                case Part::Vertex: c.parts.vertex = true; break;
                case Part::Seagull: c.parts.seagull = true; break;
                case Part::Fork: c.parts.fork = true; break;
            }
        }
    }
    if (doc.contains("initial_state") && doc.contains("initial_states")) {
        throw ConfigError("initial_state", "give initial_state or initial_states, not both");
    }
    if (doc.contains("initial_state")) c.initial_states = {parse_state(doc["initial_state"], "initial_state")};
    if (doc.contains("initial_states")) {
        const json& s = doc["initial_states"];
        if (!s.is_array()) throw ConfigError("initial_states", "expected an array");
        c.initial_states.clear();
        for (std::size_t i = 0; i < s.size(); ++i) c.initial_states.push_back(parse_state(s[i], index("initial_states", i)));
    }
    if (doc.contains("target")) apply_target(c, doc["target"], "target");
    if (doc.contains("evolution")) apply_evolution(c, doc["evolution"], "evolution");
    if (doc.contains("sweep")) apply_sweep(c, doc["sweep"], "sweep");
    if (doc.contains("shots")) c.shots = int_at(doc["shots"], "shots");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("output")) c.output = string_at(doc["output"], "output");
    if (doc.contains("save_probabilities")) c.save_probabilities = bool_at(doc["save_probabilities"], "save_probabilities");
    validate(c);
    return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

void validate(const ScenarioConfig& config) {
    validate_common(config);
    for (const auto& p : expand_sweep(config)) validate_point(p.config);
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["modes"] = {{"n_fermion", c.n_fermion}, {"n_antifermion", c.n_antifermion}, {"n_boson", c.n_boson},
                  {"modals", c.modals}};
    const ModelParams& p = c.params;
    j["model"] = {{"fermion_mass", p.fermion_mass}, {"boson_mass", p.boson_mass},
                  {"coupling", p.coupling},         {"inertia_cutoff", p.inertia_cutoff},
                  {"box_length", p.box_length},     {"include_inertias", p.include_inertias},
                  {"jw_ordering", jw_name(p.jw_ordering)}};
    json parts = json::array();
    for (Part part : kAllParts)
        if (c.parts.contains(part)) parts.push_back(to_string(part));
    j["parts"] = parts;
    json states = json::array();
    for (const auto& s : c.initial_states) states.push_back(state_to_json(s));
    j["initial_states"] = states;
    if (c.target.is_filter()) {
        json t = json::object();
        if (c.target.k) t["K"] = *c.target.k;
        if (c.target.q) t["Q"] = *c.target.q;
        if (c.target.boson_count) t["boson_count"] = *c.target.boson_count;
        if (c.target.fermion_count) t["fermion_count"] = *c.target.fermion_count;
        if (c.target.antifermion_count) t["antifermion_count"] = *c.target.antifermion_count;
        j["target"] = t.empty() ? json("same-sector") : t;
    } else {
        json t = json::array();
        for (const auto& s : c.target.states) t.push_back(state_to_json(s));
        j["target"] = t;
    }
    json e;
    e["method"] = to_string(c.evolution.method);
    e["times"] = c.evolution.times;
    if (c.evolution.n_steps) e["n_steps"] = *c.evolution.n_steps;
    if (c.evolution.dt) e["dt"] = *c.evolution.dt;
    e["order"] = c.evolution.order;
    e["compare_exact"] = c.evolution.compare_exact;
    j["evolution"] = e;
    json sweep = json::object();
    for (const auto& [k, v] : c.sweep) sweep[k] = v;
    j["sweep"] = sweep;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["save_probabilities"] = c.save_probabilities;
    return j;
}

std::vector<ScenarioPoint> expand_sweep(const ScenarioConfig& config) {
    std::vector<ScenarioPoint> out{{"", config}};
    for (const auto& [key, values] : config.sweep) {
        std::vector<ScenarioPoint> next;
        for (const auto& p : out) {
            for (double v : values) {
                ScenarioPoint q = p;
                apply_sweep_value(q.config, key, v);
                q.label += (q.label.empty() ? "" : ";") + key + "=" + format_number(v);
                next.push_back(std::move(q));
            }
        }
        out = std::move(next);
    }
    for (auto& p : out) p.config.sweep.clear();
    return out;
}

namespace {

struct PointOutput {
    std::vector<ResultRow> rows;
    json summary;
    json records = json::array();
};

PointOutput run_point(std::size_t pi, const ScenarioPoint& sp) {
    const ScenarioConfig& c = sp.config;
    const std::string& point = sp.label;
    PointOutput out;
    const QubitLayout layout(c.modes());
    const int n = layout.total_qubits();
    const PauliOp h = build_h(c.params, layout, c.parts);
    const double scale = c.params.time_scale();
    const EvolutionSpec& ev = c.evolution;
    const TrotterPlan probe = make_plan(h, 1.0, 1, ev.order);
    const PlanCost cost = plan_cost(probe);

    json pj;
    pj["point"] = point;
    pj["qubits"] = n;
    pj["hamiltonian_terms"] = h.size();
    pj["time_scale"] = scale;
    pj["term_order"] = {{"hash", hex64(probe.term_order_hash)},
                        {"order", ev.order},
                        {"rotations_per_step", cost.rotations_total},
                        {"two_qubit_weight_per_step", cost.two_qubit_weight}};
    json state_list = json::array();

    for (std::size_t si = 0; si < c.initial_states.size(); ++si) {
        const StateSpec& spec = c.initial_states[si];
        const FockState initial = spec.resolve(layout);
        const BasisIndex i0 = encode(initial, layout);
        const int k0 = k_of(initial), q0 = q_of(initial);
        const Statevector psi0 = basis_state(n, i0);
        const std::vector<FockState> targets = resolve_targets(c.target, initial, layout);
        std::set<BasisIndex> target_idx;
        for (const auto& t : targets) target_idx.insert(encode(t, layout));
        state_list.push_back({{"label", spec.label},
                              {"bitstring", render(initial, layout)},
                              {"K", k0},
                              {"Q", q0},
                              {"target_states", targets.size()}});

        auto emit = [&](Method m, std::size_t ti, const Statevector& psi) {
            EvolutionRecord r;
            r.time = ev.times[ti];
            if (c.shots == 0) {
                r.survival = survival(psi, psi0);
                r.transition = transition_prob(psi, targets, layout);
                const Leakage l = leakage(psi, k0, q0, layout);
                r.leak_k = l.k;
                r.leak_q = l.q;
                if (c.save_probabilities) r.probabilities = probability_map(psi, layout);
            } else {
                std::uint64_t s = splitmix(c.seed);
                for (std::uint64_t part : {std::uint64_t(pi), std::uint64_t(si), std::uint64_t(m), std::uint64_t(ti)})
                    s = splitmix(s ^ part);
                const auto counts = sample_counts(psi, c.shots, s);
                const double shots = c.shots;
                long long hit = 0;
                for (const auto& [idx, cnt] : counts) {
                    if (target_idx.count(idx)) hit += cnt;
                    if (c.save_probabilities) r.probabilities[render_bitstring(idx, layout)] = cnt / shots;
                }
                const auto own = counts.find(i0);
                r.survival = own == counts.end() ? 0.0 : own->second / shots;
                r.transition = static_cast<double>(hit) / shots;
                const Leakage l = leakage(counts, k0, q0, layout);
                r.leak_k = l.k;
                r.leak_q = l.q;
            }
            r.metadata = {{"point", point}, {"state", spec.label}, {"method", to_string(m)}, {"shots", c.shots}};
            if (m == Method::Trotter) {
                r.metadata["order"] = ev.order;
                if (ev.dt) r.metadata["dt"] = *ev.dt;
                if (ev.n_steps && !ev.dt) r.metadata["n_steps"] = *ev.n_steps;
                r.metadata["term_order_hash"] = hex64(probe.term_order_hash);
            }
            if (c.save_probabilities) out.records.push_back(to_json(r));
            out.rows.push_back({point, spec.label, m, std::move(r)});
        };

        if (ev.method == Method::Exact || ev.compare_exact) {
            const ExactPropagator prop(h, sector_indices(layout, k0, q0));
            for (std::size_t ti = 0; ti < ev.times.size(); ++ti) emit(Method::Exact, ti, prop.evolve(psi0, ev.times[ti] * scale));
        }
        if (ev.method == Method::Trotter) {
            if (ev.dt) {
                const TrotterPlan plan = make_plan(h, *ev.dt * scale, 1, ev.order);
                Statevector psi = psi0;
                long long done = 0;
                for (std::size_t ti = 0; ti < ev.times.size(); ++ti) {
                    const long long need = std::llround(ev.times[ti] / *ev.dt);
                    for (; done < need; ++done) trotter_step(plan, psi);
                    emit(Method::Trotter, ti, psi);
                }
            } else {
                for (std::size_t ti = 0; ti < ev.times.size(); ++ti) {
                    const TrotterPlan plan = make_plan(h, ev.times[ti] * scale, *ev.n_steps, ev.order);
                    emit(Method::Trotter, ti, trotter_evolve(plan, psi0));
                }
            }
        }
    }
    pj["states"] = state_list;
    out.summary = std::move(pj);
    return out;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    validate(config);
    const auto sweep_points = expand_sweep(config);
    std::vector<PointOutput> outputs(sweep_points.size());
    std::vector<std::exception_ptr> errors(sweep_points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < sweep_points.size();) {
            try {
                outputs[i] = run_point(i, sweep_points[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t jobs = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, sweep_points.size());
    {
        std::vector<std::jthread> pool;
        for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    // rows in sweep order regardless of which thread finished first
    RunResult result;
    json points = json::array();
    json records = json::array();
    for (auto& o : outputs) {
        std::move(o.rows.begin(), o.rows.end(), std::back_inserter(result.rows));
        points.push_back(std::move(o.summary));
        for (auto& r : o.records) records.push_back(std::move(r));
    }
    result.manifest["generator"] = "dlcq";
    result.manifest["config"] = to_json(config);
    result.manifest["csv_header"] = kResultCsvHeader;
    result.manifest["points"] = points;
    if (config.save_probabilities) result.manifest["records"] = records;
    return result;
}

std::string to_csv(const RunResult& result) {
    std::string out = std::string(kResultCsvHeader) + "\n";
    for (const auto& row : result.rows) {
        out += row.point + "," + row.state + "," + to_string(row.method) + "," + to_csv_row(row.record) + "\n";
    }
    return out;
}

std::pair<std::string, std::string> write_outputs(const RunResult& result, const std::string& base) {
    const std::filesystem::path csv_path = base + ".csv";
    const std::filesystem::path json_path = base + ".json";
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + p.string());
        os << text;
        if (!os) throw std::runtime_error("write failed for " + p.string());
    };
    write(csv_path, to_csv(result));
    json manifest = result.manifest;
    manifest["csv"] = csv_path.filename().string();
    write(json_path, manifest.dump(2) + "\n");
    return {csv_path.string(), json_path.string()};
}

}  // namespace dlcq
