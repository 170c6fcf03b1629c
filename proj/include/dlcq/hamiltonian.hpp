#ifndef DLCQ_HAMILTONIAN_HPP
#define DLCQ_HAMILTONIAN_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dlcq/fock.hpp"
#include "dlcq/ladder.hpp"
#include "dlcq/pauli.hpp"

namespace dlcq {

/// Physics configuration. Masses in pion-mass units, box length in inverse
/// pion masses.
struct ModelParams {
    double fermion_mass = 6.7;
    double boson_mass = 1.0;
    double coupling = 4.0;  // lambda; g = lambda / sqrt(4 pi)
    int inertia_cutoff = 2048;
    double box_length = 2.0 * std::numbers::pi;
    bool include_inertias = false;
    JwOrdering jw_ordering = JwOrdering::Global;

    double g() const { return coupling / std::sqrt(4.0 * std::numbers::pi); }

    /// Evolution time multiplier: P^- = (L / 2 pi) H.
    double time_scale() const { return box_length / (2.0 * std::numbers::pi); }

    /// Throws std::invalid_argument for non-physical values; `n_max` is the
    /// largest mode label in use.
    void validate(int n_max) const;
};

enum class Part { Mass, Vertex, Seagull, Fork };
inline constexpr std::array<Part, 4> kAllParts{Part::Mass, Part::Vertex, Part::Seagull, Part::Fork};

std::string to_string(Part part);
Part parse_part(const std::string& name);  // "HM", "HV", "HS", "HF"

/// Which parts enter build_h.
struct PartMask {
    bool mass = true;
    bool vertex = true;
    bool seagull = true;
    bool fork = true;

    bool contains(Part p) const;
    static PartMask vertex_only() { return {true, true, false, false}; }
    bool operator==(const PartMask&) const = default;
};

/// {n|m}: zero if either argument is zero, else delta_{m,-n} / n.
double bracket(int n, int m);

enum class Inertia { Alpha, Beta, Gamma };

/// Self-induced inertia of mode n summed over m = 1..cutoff.
double self_inertia(Inertia kind, int n, int cutoff);

PauliOp build_part(Part part, const ModelParams& params, const QubitLayout& layout);
PauliOp build_h(const ModelParams& params, const QubitLayout& layout, PartMask parts = {});

enum class Charge { K, Q };

/// Diagonal operator whose eigenvalue on each basis state is k_of / q_of.
PauliOp build_charge(Charge which, const QubitLayout& layout);

}  // namespace dlcq

#endif  // DLCQ_HAMILTONIAN_HPP
