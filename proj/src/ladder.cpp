#include "dlcq/ladder.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dlcq {

namespace {

PauliOp single(const char* a, Complex ca, const char* b, Complex cb) {
    return canonicalize(std::vector<PauliTerm>{PauliTerm::parse(a, ca), PauliTerm::parse(b, cb)});
}

PauliOp with_ladder(const PauliOp& create, Ladder which) {
    return which == Ladder::Create ? create : adjoint(create);
}

}  // namespace

PauliOp sigma_minus() { return single("X", {0.5, 0.0}, "Y", {0.0, -0.5}); }
PauliOp sigma_plus() { return single("X", {0.5, 0.0}, "Y", {0.0, 0.5}); }
PauliOp i_plus() { return single("I", {0.5, 0.0}, "Z", {0.5, 0.0}); }
PauliOp i_minus() { return single("I", {0.5, 0.0}, "Z", {-0.5, 0.0}); }

PauliOp embed(const PauliOp& local, int num_qubits, int first) {
    const int w = local.num_qubits();
    if (first < 0 || first + w > num_qubits) throw std::out_of_range("embedding exceeds register");
    const int shift = num_qubits - first - w;
    PauliAccumulator<Complex> acc(num_qubits);
    for (const auto& t : local.terms()) {
        acc.add(PauliTerm{t.coefficient, num_qubits, t.x << shift, t.z << shift});
    }
    return PauliOp::from_accumulator(std::move(acc));
}

PauliOp tensor(const std::vector<PauliOp>& factors) {
    int n = 0;
    for (const auto& f : factors) n += f.num_qubits();
    PauliOp out = PauliOp::identity(n);
    int pos = 0;
    for (const auto& f : factors) {
        out = product(out, embed(f, n, pos));
        pos += f.num_qubits();
    }
    return out;
}

PauliOp fermion_ladder(Species species, int mode, Ladder which, const QubitLayout& layout, JwOrdering ordering) {
    int target = 0;
    int string_start = 0;
    switch (species) {
        case Species::Fermion:
            target = layout.fermion_position(mode);
            break;
        case Species::Antifermion:
            target = layout.antifermion_position(mode);
            if (ordering == JwOrdering::PerSpecies) string_start = layout.config().n_fermion;
            break;
        case Species::Boson:
            throw std::invalid_argument("fermion_ladder called for a boson mode");
    }
    const int n = layout.total_qubits();
    BasisIndex zstring = 0;
    for (int p = string_start; p < target; ++p) zstring |= layout.bit(p);
    const PauliOp parity = canonicalize(std::vector<PauliTerm>{PauliTerm{Complex(1), n, 0, zstring}});
    const PauliOp create = product(parity, embed(sigma_minus(), n, target));
    return with_ladder(create, which);
}

PauliOp boson_ladder_local(int modals, Ladder which) {
    if (modals < 1 || !std::has_single_bit(static_cast<unsigned>(modals) + 1u)) {
        throw std::invalid_argument("binary boson encoding needs m + 1 to be a power of two, got m = " +
                                    std::to_string(modals));
    }
    const int t = qubits_for_modals(modals);
    const int top = t - 1;
    PauliAccumulator<Complex> acc(t);
    // For each p, j runs over 2^q, 2^q + 2^{q+1}, ... <= m with q = top - p.
    // The first p binary digits of j (t digits, MSB first) select I+ (0) or I- (1).
    for (int p = 0; p <= top; ++p) {
        const int q = top - p;
        for (int j = 1 << q; j <= modals; j += 1 << (q + 1)) {
            std::vector<PauliOp> factors;
            factors.reserve(static_cast<std::size_t>(t));
            for (int d = 0; d < p; ++d) {
                const bool one = (j >> (t - 1 - d)) & 1;
                factors.push_back(one ? i_minus() : i_plus());
            }
            factors.push_back(sigma_minus());
            for (int d = 0; d < q; ++d) factors.push_back(sigma_plus());
            const double weight = std::sqrt(static_cast<double>(j));
            const PauliOp string = tensor(factors);
            for (auto term : string.terms()) {
                term.coefficient *= weight;
                acc.add(term);
            }
        }
    }
    return with_ladder(PauliOp::from_accumulator(std::move(acc)), which);
}

PauliOp boson_ladder(int mode, Ladder which, const QubitLayout& layout) {
    const QubitRange r = layout.boson_range(mode);
    const int m = layout.config().modals[static_cast<std::size_t>(mode - 1)];
    return embed(boson_ladder_local(m, which), layout.total_qubits(), r.first);
}

PauliOp boson_number(int mode, const QubitLayout& layout) {
    return product(boson_ladder(mode, Ladder::Create, layout), boson_ladder(mode, Ladder::Annihilate, layout));
}

PauliOp fermion_number(Species species, int mode, const QubitLayout& layout) {
    return product(fermion_ladder(species, mode, Ladder::Create, layout),
                   fermion_ladder(species, mode, Ladder::Annihilate, layout));
}

}  // namespace dlcq
