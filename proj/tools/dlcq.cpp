// dlcq: run scenarios, dump qubit Hamiltonians, inspect sectors.
//
// exit codes: 0 ok, 1 runtime failure, 2 usage, 3 config schema, 4 physics

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dlcq/scenario.hpp"

using namespace dlcq;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kUsage = 2, kConfig = 3, kPhysics = 4 };

ScenarioConfig load(const std::string& path, const std::string& scenario) {
    nlohmann::json doc = nlohmann::json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("<document>", "cannot open " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            doc = nlohmann::json::parse(ss.str());
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError("<document>", "expected an object");
    }
    if (!scenario.empty()) doc["scenario"] = scenario;
    return parse_config(doc);
}

int cmd_run(const std::string& path, const std::string& scenario, const std::string& output, bool quiet) {
    ScenarioConfig c = load(path, scenario);
    if (!output.empty()) c.output = output;
    const RunResult r = run_scenario(c);
    const auto [csv, json] = write_outputs(r, c.output);
    if (!quiet) std::cout << to_csv(r);
    std::cerr << "wrote " << csv << " and " << json << " (" << r.rows.size() << " rows)\n";
    return kOk;
}

int cmd_dump(const std::string& path, const std::string& scenario) {
    const ScenarioConfig c = load(path, scenario);
    const auto points = expand_sweep(c);
    for (const auto& p : points) {
        const QubitLayout layout(p.config.modes());
        const PauliOp h = build_h(p.config.params, layout, p.config.parts);
        nlohmann::json head{{"point", p.label}, {"qubits", layout.total_qubits()}, {"terms", h.size()},
                            {"config", to_json(p.config)}};
        std::cout << "# " << head.dump() << "\n";
        write_text(std::cout, h);
    }
    return kOk;
}

int cmd_sector(const std::string& path, const std::string& scenario, int k, int q) {
    const ScenarioConfig c = load(path, scenario);
    const QubitLayout layout(c.modes());
    for (const auto& s : enumerate_sector(c.modes(), k, q)) std::cout << render(s, layout) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discretized light-cone Yukawa model on qubits"};
    app.require_subcommand(1);

    std::string config, scenario, output;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "evolve a scenario, write <output>.csv and <output>.json");
    run->add_option("config", config, "JSON config file")->check(CLI::ExistingFile);
    run->add_option("-s,--scenario", scenario, "preset name, overrides the file's");
    run->add_option("-o,--output", output, "output base path");
    run->add_flag("-q,--quiet", quiet, "do not print the CSV to stdout");

    auto* dump = app.add_subcommand("dump-hamiltonian", "print the Pauli expansion of H");
    dump->add_option("config", config, "JSON config file")->check(CLI::ExistingFile);
    dump->add_option("-s,--scenario", scenario, "preset name");

    int k = 0, q = 0;
    auto* sector = app.add_subcommand("sector", "list the basis states of a (K, Q) sector");
    sector->add_option("config", config, "JSON config file")->check(CLI::ExistingFile);
    sector->add_option("-s,--scenario", scenario, "preset name");
    sector->add_option("-K,--K", k, "total longitudinal momentum")->required();
    sector->add_option("-Q,--Q", q, "charge")->required();

    auto* list = app.add_subcommand("list-scenarios", "list built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*list) {
            for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
            return kOk;
        }
        if (*run) return cmd_run(config, scenario, output, quiet);
        if (*dump) return cmd_dump(config, scenario);
        if (*sector) return cmd_sector(config, scenario, k, q);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return kPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
