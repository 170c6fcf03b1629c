#ifndef DLCQ_TESTS_FOCK_ORACLE_HPP
#define DLCQ_TESTS_FOCK_ORACLE_HPP

// Second-quantized operators acting directly on occupation-number states.
// Shares nothing with the Pauli mapping: signs come from counting occupied
// fermion modes, boson factors from sqrt(l + 1).

#include <Eigen/Dense>

#include <vector>

#include "dlcq/fock.hpp"
#include "dlcq/hamiltonian.hpp"

namespace oracle {

enum class Field { B, D, A, C };  // C = a / sqrt(n)

struct Op {
    Field field;
    int mode;
    bool dagger;
};

Op bd(int k);
Op b(int k);
Op dd(int k);
Op d(int k);
Op cd(int n);
Op c(int n);

struct Monomial {
    double coeff;
    std::vector<Op> ops;  // written order, applied right to left
};

/// Applies one operator in place. Returns false when the state is annihilated.
bool apply(const Op& op, dlcq::FockState& state, double& amp, const dlcq::ModeConfig& config,
           dlcq::JwOrdering ordering = dlcq::JwOrdering::Global);

/// The four Hamiltonian families as monomials over every mode triple/quadruple.
std::vector<Monomial> hamiltonian(const dlcq::ModelParams& params, const dlcq::ModeConfig& config,
                                  dlcq::PartMask parts = {});

/// <row| sum monomials |col> over the given basis (states outside it are dropped).
Eigen::MatrixXd matrix(const std::vector<Monomial>& terms, const std::vector<dlcq::FockState>& basis,
                       const dlcq::ModeConfig& config, dlcq::JwOrdering ordering = dlcq::JwOrdering::Global);

/// Every state of the register that respects the modal caps.
std::vector<dlcq::FockState> all_states(const dlcq::ModeConfig& config);

}  // namespace oracle

#endif
