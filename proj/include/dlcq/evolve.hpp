#ifndef DLCQ_EVOLVE_HPP
#define DLCQ_EVOLVE_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dlcq/fock.hpp"
#include "dlcq/pauli.hpp"

namespace dlcq {

using Statevector = Eigen::VectorXcd;

inline constexpr double kNormTolerance = 1e-9;
/// Largest invariant subspace the exact propagator will diagonalize densely.
inline constexpr Eigen::Index kMaxExactDimension = 4096;

Statevector basis_state(int num_qubits, BasisIndex index);

/// Throws std::invalid_argument unless |psi| = 1 within kNormTolerance.
void require_normalized(const Statevector& psi);

/// psi <- exp(-i theta c P) psi for a term c P with real c.
/// Throws std::invalid_argument for a complex coefficient or a size mismatch.
void exp_pauli(const PauliTerm& term, double theta, Statevector& psi);

/// Dense <b_r| H |b_c> over the listed basis states.
Eigen::MatrixXcd restrict_to(const PauliOp& h, std::span<const BasisIndex> basis);

/// Smallest set of basis states containing `seeds` and closed under the
/// action of `h` (nonzero matrix elements only), ascending.
std::vector<BasisIndex> invariant_closure(const PauliOp& h, std::span<const BasisIndex> seeds,
                                          Eigen::Index max_dimension = kMaxExactDimension);

/// e^{-iHt} on an H-invariant set of basis states, diagonalized once and
/// reused for every time.
class ExactPropagator {
public:
    ExactPropagator(const PauliOp& h, std::vector<BasisIndex> basis);

    const std::vector<BasisIndex>& basis() const { return basis_; }
    const Eigen::VectorXd& energies() const { return solver_.eigenvalues(); }

    /// psi0 must vanish outside the basis (tolerance 1e-10).
    Statevector evolve(const Statevector& psi0, double t) const;

private:
    int num_qubits_;
    std::vector<BasisIndex> basis_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver_;
};

/// e^{-iHt} psi0 by dense eigendecomposition. With `sector` the dynamics is
/// restricted to those basis states (psi0 must be supported on them);
/// without it, the closure of psi0's support under H is used, which is only
/// allowed for registers of at most kMaxDenseQubits qubits.
Statevector exact_evolve(const PauliOp& h, const Statevector& psi0, double t,
                         std::optional<std::span<const BasisIndex>> sector = std::nullopt);

/// e^{-iHt} psi0 via the full 2^n x 2^n matrix. Test oracle for small registers.
Statevector exact_evolve_dense(const PauliOp& h, const Statevector& psi0, double t);

struct Rotation {
    PauliTerm pauli;  // unit coefficient
    double angle = 0.0;
};

/// One Trotter step as an ordered list of Pauli rotations exp(-i angle P).
struct TrotterPlan {
    int order = 1;
    int n_steps = 1;
    double total_time = 0.0;
    std::vector<Rotation> step;
    /// Coefficient of the identity string; applied as an exact global phase.
    double identity_energy = 0.0;
    /// FNV-1a over the letter arrays of `step`, recorded in run metadata.
    std::uint64_t term_order_hash = 0;
};

/// Order 1: one rotation per non-identity term, angle c t / n_T, canonical
/// order. Order 2: half-angle palindrome with the last term at full angle.
TrotterPlan make_plan(const PauliOp& h, double t, int n_steps, int order = 1);

/// Applies the plan's step n_steps times and the identity phase.
Statevector trotter_evolve(const TrotterPlan& plan, const Statevector& psi0);

/// Applies a single step (plus its share of the identity phase) in place.
void trotter_step(const TrotterPlan& plan, Statevector& psi);

struct PlanCost {
    long long rotations_total = 0;
    long long two_qubit_weight = 0;
    bool operator==(const PlanCost&) const = default;
};

/// Counts over all n_steps steps; two_qubit_weight sums (weight - 1).
PlanCost plan_cost(const TrotterPlan& plan);

/// Multinomial draw of `shots` outcomes from |psi|^2, reproducible per seed.
std::map<BasisIndex, int> sample_counts(const Statevector& psi, int shots, std::uint64_t seed);

}  // namespace dlcq

#endif  // DLCQ_EVOLVE_HPP
