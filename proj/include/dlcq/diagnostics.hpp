#ifndef DLCQ_DIAGNOSTICS_HPP
#define DLCQ_DIAGNOSTICS_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dlcq/evolve.hpp"
#include "dlcq/fock.hpp"
#include "dlcq/pauli.hpp"

namespace dlcq {

/// Observables of one evolved state at one time.
struct EvolutionRecord {
    double time = 0.0;
    std::map<std::string, double> probabilities;  // rendered bitstring -> probability
    double survival = 0.0;
    double transition = 0.0;
    double leak_k = 0.0;
    double leak_q = 0.0;
    nlohmann::json metadata = nlohmann::json::object();
};

/// |<psi0|psi_t>|^2
double survival(const Statevector& psi_t, const Statevector& psi0);

/// Total probability on the listed states.
double transition_prob(const Statevector& psi_t, const std::vector<FockState>& targets, const QubitLayout& layout);

struct Leakage {
    double k = 0.0;  // probability on states with K != K0
    double q = 0.0;  // probability on states with Q != Q0
};

/// States violating both charges count toward both entries.
Leakage leakage(const Statevector& psi_t, int k0, int q0, const QubitLayout& layout);

/// Same measures from a sampled histogram, normalized by the shot count.
Leakage leakage(const std::map<BasisIndex, int>& counts, int k0, int q0, const QubitLayout& layout);

/// <psi|op|psi>. Throws std::invalid_argument for a non-Hermitian operator or
/// an imaginary part above 1e-9.
double expectation(const PauliOp& op, const Statevector& psi);

/// Probabilities above `threshold`, keyed by rendered bitstring.
std::map<std::string, double> probability_map(const Statevector& psi, const QubitLayout& layout,
                                              double threshold = 1e-12);

inline constexpr const char* kRecordCsvHeader = "time,survival,transition,leak_K,leak_Q";

/// One CSV row "time,survival,transition,leak_K,leak_Q", %.12g formatting.
std::string to_csv_row(const EvolutionRecord& record);

nlohmann::json to_json(const EvolutionRecord& record);

}  // namespace dlcq

#endif  // DLCQ_DIAGNOSTICS_HPP
