#ifndef DLCQ_LADDER_HPP
#define DLCQ_LADDER_HPP

#include "dlcq/fock.hpp"
#include "dlcq/pauli.hpp"

namespace dlcq {

enum class Ladder { Annihilate, Create };

/// How Jordan-Wigner parity strings cross species.
///  Global: one ordering over fermion + antifermion qubits, so b and d anticommute.
///  PerSpecies: strings stay inside a species, so b and d commute.
enum class JwOrdering { Global, PerSpecies };

/// Single-qubit building blocks on a 1-qubit register:
/// sigma_minus = |1><0| raises occupancy, sigma_plus = |0><1| lowers it,
/// i_plus = |0><0|, i_minus = |1><1|.
PauliOp sigma_minus();
PauliOp sigma_plus();
PauliOp i_plus();
PauliOp i_minus();

/// Tensor product of per-position operators, each given on its own register
/// (widths add up to the result width).
PauliOp tensor(const std::vector<PauliOp>& factors);

/// Places `local` (acting on `local.num_qubits()` qubits) at register
/// positions [first, first + width) of an n-qubit register.
PauliOp embed(const PauliOp& local, int num_qubits, int first);

/// b_n / b_n^dagger (species Fermion) or d_n / d_n^dagger (species Antifermion).
PauliOp fermion_ladder(Species species, int mode, Ladder which, const QubitLayout& layout,
                       JwOrdering ordering = JwOrdering::Global);

/// Truncated a / a^dagger of one mode on ceil(log2(m+1)) qubits, big-endian.
/// Throws std::invalid_argument unless m + 1 is a power of two.
PauliOp boson_ladder_local(int modals, Ladder which);

/// a_n / a_n^dagger embedded in the full register.
PauliOp boson_ladder(int mode, Ladder which, const QubitLayout& layout);

/// a^dagger a of one mode.
PauliOp boson_number(int mode, const QubitLayout& layout);
PauliOp fermion_number(Species species, int mode, const QubitLayout& layout);

}  // namespace dlcq

#endif  // DLCQ_LADDER_HPP
