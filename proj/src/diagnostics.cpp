#include "dlcq/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace dlcq {

double survival(const Statevector& psi_t, const Statevector& psi0) {
    if (psi_t.size() != psi0.size()) throw std::invalid_argument("statevector size mismatch");
    return std::norm(psi0.dot(psi_t));
}

double transition_prob(const Statevector& psi_t, const std::vector<FockState>& targets, const QubitLayout& layout) {
    if (psi_t.size() != static_cast<Eigen::Index>(layout.dimension())) {
        throw std::invalid_argument("statevector size does not match the layout");
    }
    double p = 0.0;
    for (const auto& s : targets) p += std::norm(psi_t(static_cast<Eigen::Index>(encode(s, layout))));
    return p;
}

Leakage leakage(const Statevector& psi_t, int k0, int q0, const QubitLayout& layout) {
    if (psi_t.size() != static_cast<Eigen::Index>(layout.dimension())) {
        throw std::invalid_argument("statevector size does not match the layout");
    }
    Leakage out;
    for (Eigen::Index i = 0; i < psi_t.size(); ++i) {
        const double p = std::norm(psi_t(i));
        if (p == 0.0) continue;
        const auto [k, q] = charges_of(static_cast<BasisIndex>(i), layout);
        if (k != k0) out.k += p;
        if (q != q0) out.q += p;
    }
    return out;
}

Leakage leakage(const std::map<BasisIndex, int>& counts, int k0, int q0, const QubitLayout& layout) {
    Leakage out;
    long long total = 0;
    for (const auto& [index, n] : counts) {
        total += n;
        const auto [k, q] = charges_of(index, layout);
        if (k != k0) out.k += n;
        if (q != q0) out.q += n;
    }
    if (total > 0) {
        out.k /= static_cast<double>(total);
        out.q /= static_cast<double>(total);
    }
    return out;
}

double expectation(const PauliOp& op, const Statevector& psi) {
    if (!is_hermitian(op)) throw std::invalid_argument("expectation needs a Hermitian operator");
    const Complex v = psi.dot(dlcq::apply(op, psi));
    if (std::abs(v.imag()) > 1e-9) throw std::invalid_argument("expectation value has an imaginary part");
    return v.real();
}

std::map<std::string, double> probability_map(const Statevector& psi, const QubitLayout& layout, double threshold) {
    std::map<std::string, double> out;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi(i));
        if (p > threshold) out.emplace(render_bitstring(static_cast<BasisIndex>(i), layout), p);
    }
    return out;
}

std::string to_csv_row(const EvolutionRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g", r.time, r.survival, r.transition, r.leak_k,
                  r.leak_q);
    return buf;
}

nlohmann::json to_json(const EvolutionRecord& r) {
    return {{"time", r.time},         {"survival", r.survival}, {"transition", r.transition},
            {"leak_K", r.leak_k},     {"leak_Q", r.leak_q},     {"probabilities", r.probabilities},
            {"metadata", r.metadata}};
}

}  // namespace dlcq
