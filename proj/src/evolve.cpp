#include "dlcq/evolve.hpp"

#include "kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace dlcq {

namespace {

constexpr double kSupportTolerance = 1e-10;

void rotate(Statevector& psi, BasisIndex x, BasisIndex z, int y_count, double angle) {
    kernel::rotate(reinterpret_cast<double*>(psi.data()), static_cast<BasisIndex>(psi.size()), x, z, y_count, angle);
}

// Commuting strings with one flip mask collapse into a single pass. A string
// may join a bucket up to kFuseWindow buckets back if it commutes with
// everything in between, so the operator product is unchanged.
constexpr int kFuseWindow = 8;
constexpr int kMaxFused = 8;  // extra strings per bucket; sign table 2^8

struct Bucket {
    const Rotation* lead;
    std::vector<const Rotation*> rest;
};

bool commutes_with_bucket(const PauliTerm& p, const Bucket& b) {
    if (!p.commutes_with(b.lead->pauli)) return false;
    for (const Rotation* r : b.rest) {
        if (!p.commutes_with(r->pauli)) return false;
    }
    return true;
}

std::vector<Bucket> make_buckets(const std::vector<Rotation>& rotations) {
    std::vector<Bucket> out;
    for (const auto& r : rotations) {
        bool placed = false;
        for (std::size_t back = 0; back < out.size() && back < kFuseWindow; ++back) {
            Bucket& b = out[out.size() - 1 - back];
            if (!commutes_with_bucket(r.pauli, b)) break;
            if (b.lead->pauli.x == r.pauli.x && b.rest.size() < kMaxFused) {
                b.rest.push_back(&r);
                placed = true;
                break;
            }
        }
        if (!placed) out.push_back({&r, {}});
    }
    return out;
}

// Bucket in some frame: lead string (x, z, y), relative masks d, and the
// cos/sin of the summed angle for every sign pattern.
struct FusedPass {
    BasisIndex x = 0, z = 0, outer_z = 0;
    int y_count = 0;
    std::vector<BasisIndex> d, outer_d;
    std::vector<double> cs;

    void run(double* a, BasisIndex dim, BasisIndex coset) const {
        const int flip = (std::popcount(coset & outer_z) & 1) * 2;
        if (d.empty()) {
            kernel::rotate_fused(a, dim, x, z, y_count + flip, nullptr, 0, cs.data(), 0);
            return;
        }
        unsigned pattern = 0;
        for (std::size_t r = 0; r < outer_d.size(); ++r) {
            pattern |= static_cast<unsigned>(std::popcount(coset & outer_d[r]) & 1) << r;
        }
        kernel::rotate_fused(a, dim, x, z, y_count + flip, d.data(), static_cast<int>(d.size()), cs.data(), pattern);
    }
};

// P_r = i^{y_r - y} P_lead Z^{d_r}; on a flip pair Z^{d_r} is the scalar
// (-1)^{|i & d_r|} because |x & d_r| is even for commuting strings.
template <class ToLocal>
FusedPass make_pass(const Bucket& b, BasisIndex local, ToLocal to_local) {
    const PauliTerm& lead = b.lead->pauli;
    FusedPass pass;
    pass.x = to_local(lead.x);
    pass.z = to_local(lead.z & local);
    pass.outer_z = lead.z & ~local;
    pass.y_count = lead.y_count();
    std::vector<double> weight;
    for (const Rotation* r : b.rest) {
        const BasisIndex d = r->pauli.z ^ lead.z;
        pass.d.push_back(to_local(d & local));
        pass.outer_d.push_back(d & ~local);
        const int dy = r->pauli.y_count() - pass.y_count;
        weight.push_back((dy & 3) == 0 ? r->angle : -r->angle);
    }
    const std::size_t patterns = std::size_t{1} << weight.size();
    pass.cs.resize(2 * patterns);
    for (std::size_t p = 0; p < patterns; ++p) {
        double theta = b.lead->angle;
        for (std::size_t r = 0; r < weight.size(); ++r) theta += ((p >> r) & 1) ? -weight[r] : weight[r];
        pass.cs[2 * p] = std::cos(theta);
        pass.cs[2 * p + 1] = std::sin(theta);
    }
    return pass;
}

// Cache blocking: 2^14 amplitudes (256 KiB) per block, at most 10 of those
// bits used for flips.
constexpr int kBlockBits = 14;
constexpr int kFlipBits = 10;

// Applies buckets [first, last) together. Their flip masks all lie in
// `flips`, so each coset of the bits outside a kBlockBits-wide `local` set is
// an invariant block: gather it, run the group while it sits in cache,
// scatter back. Bits touched by the fewest strings go to the bottom of the
// block so the kernel's constant-coefficient runs come out long.
void run_block_group(Statevector& psi, const Bucket* first, const Bucket* last, BasisIndex flips, int n) {
    std::vector<std::pair<long, int>> touches(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) touches[static_cast<std::size_t>(q)] = {0, q};
    const auto touch = [&](const PauliTerm& p) {
        for (BasisIndex m = p.x | p.z; m; m &= m - 1) ++touches[static_cast<std::size_t>(std::countr_zero(m))].first;
    };
    for (const Bucket* b = first; b != last; ++b) {
        touch(b->lead->pauli);
        for (const Rotation* r : b->rest) touch(r->pauli);
    }
    std::sort(touches.begin(), touches.end());
    BasisIndex local = flips;
    for (const auto& [count, q] : touches) {
        if (std::popcount(local) == kBlockBits) break;
        local |= BasisIndex{1} << q;
    }
    std::vector<int> order;  // local bit k <- global bit order[k]
    for (const auto& [count, q] : touches) {
        if ((local >> q) & 1) order.push_back(q);
    }
    const auto to_local = [&](BasisIndex g) {
        BasisIndex l = 0;
        for (std::size_t k = 0; k < order.size(); ++k) l |= ((g >> order[k]) & 1) << k;
        return l;
    };
    const std::size_t block = std::size_t{1} << order.size();
    std::vector<BasisIndex> offset(block, 0);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t half = std::size_t{1} << k;
        for (std::size_t l = 0; l < half; ++l) offset[half + l] = offset[l] | (BasisIndex{1} << order[k]);
    }
    std::vector<FusedPass> passes;
    passes.reserve(static_cast<std::size_t>(last - first));
    for (const Bucket* b = first; b != last; ++b) passes.push_back(make_pass(*b, local, to_local));

    std::vector<Complex> buf(block);
    double* bp = reinterpret_cast<double*>(buf.data());
    Complex* a = psi.data();
    const BasisIndex outer = (static_cast<BasisIndex>(psi.size()) - 1) & ~local;
    BasisIndex coset = 0;
    while (true) {
        for (std::size_t l = 0; l < block; ++l) buf[l] = a[coset | offset[l]];
        for (const auto& pass : passes) pass.run(bp, block, coset);
        for (std::size_t l = 0; l < block; ++l) a[coset | offset[l]] = buf[l];
        if (coset == outer) break;
        coset = ((coset | local) + 1) & ~local;
    }
}

void apply_rotations(Statevector& psi, const std::vector<Rotation>& rotations) {
    const auto dim = static_cast<BasisIndex>(psi.size());
    const int n = std::countr_zero(dim);
    const std::vector<Bucket> buckets = make_buckets(rotations);
    if (n <= kBlockBits) {
        const BasisIndex all = dim - 1;
        const auto same = [](BasisIndex g) { return g; };
        for (const auto& b : buckets) make_pass(b, all, same).run(reinterpret_cast<double*>(psi.data()), dim, 0);
        return;
    }
    std::size_t begin = 0;
    while (begin < buckets.size()) {
        BasisIndex flips = buckets[begin].lead->pauli.x;
        std::size_t end = begin + 1;
        while (end < buckets.size() && std::popcount(flips | buckets[end].lead->pauli.x) <= kFlipBits) {
            flips |= buckets[end].lead->pauli.x;
            ++end;
        }
        if (std::popcount(flips) > kFlipBits) {  // one string wider than a block allows
            const BasisIndex all = dim - 1;
            const auto same = [](BasisIndex g) { return g; };
            make_pass(buckets[begin], all, same).run(reinterpret_cast<double*>(psi.data()), dim, 0);
            ++begin;
            continue;
        }
        run_block_group(psi, buckets.data() + begin, buckets.data() + end, flips, n);
        begin = end;
    }
}

void require_size(const Statevector& psi, int num_qubits) {
    if (psi.size() != static_cast<Eigen::Index>(BasisIndex{1} << num_qubits)) {
        throw std::invalid_argument("statevector size does not match the register");
    }
}

std::uint64_t fnv1a(std::uint64_t hash, const std::string& s) {
    for (unsigned char ch : s) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace

Statevector basis_state(int num_qubits, BasisIndex index) {
    const auto dim = static_cast<Eigen::Index>(BasisIndex{1} << num_qubits);
    if (static_cast<Eigen::Index>(index) >= dim) throw std::out_of_range("basis index exceeds register");
    Statevector psi = Statevector::Zero(dim);
    psi(static_cast<Eigen::Index>(index)) = 1.0;
    return psi;
}

void require_normalized(const Statevector& psi) {
    if (std::abs(psi.norm() - 1.0) > kNormTolerance) {
        throw std::invalid_argument("statevector is not normalized");
    }
}

void exp_pauli(const PauliTerm& term, double theta, Statevector& psi) {
    if (std::abs(term.coefficient.imag()) > kCompareTolerance) {
        throw std::invalid_argument("exp_pauli needs a real coefficient (Hermitian term)");
    }
    require_size(psi, term.num_qubits);
    rotate(psi, term.x, term.z, term.y_count(), theta * term.coefficient.real());
}

Eigen::MatrixXcd restrict_to(const PauliOp& h, std::span<const BasisIndex> basis) {
    std::unordered_map<BasisIndex, Eigen::Index> row;
    row.reserve(basis.size() * 2);
    for (std::size_t r = 0; r < basis.size(); ++r) row.emplace(basis[r], static_cast<Eigen::Index>(r));
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        const BasisIndex i = basis[static_cast<std::size_t>(col)];
        for (const auto& t : h.terms()) {
            const auto it = row.find(i ^ t.x);
            if (it == row.end()) continue;
            m(it->second, col) += t.coefficient * t.phase_on(i);
        }
    }
    return m;
}

std::vector<BasisIndex> invariant_closure(const PauliOp& h, std::span<const BasisIndex> seeds,
                                          Eigen::Index max_dimension) {
    std::unordered_set<BasisIndex> seen(seeds.begin(), seeds.end());
    std::queue<BasisIndex> frontier;
    for (BasisIndex s : seeds) frontier.push(s);
    std::unordered_map<BasisIndex, Complex> image;
    while (!frontier.empty()) {
        const BasisIndex i = frontier.front();
        frontier.pop();
        image.clear();
        for (const auto& t : h.terms()) image[i ^ t.x] += t.coefficient * t.phase_on(i);
        for (const auto& [j, amp] : image) {
            if (std::abs(amp) <= kDropTolerance || seen.count(j)) continue;
            seen.insert(j);
            frontier.push(j);
            if (static_cast<Eigen::Index>(seen.size()) > max_dimension) {
                throw std::length_error("invariant subspace exceeds " + std::to_string(max_dimension) + " states");
            }
        }
    }
    std::vector<BasisIndex> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

ExactPropagator::ExactPropagator(const PauliOp& h, std::vector<BasisIndex> basis)
    : num_qubits_(h.num_qubits()), basis_(std::move(basis)) {
    if (static_cast<Eigen::Index>(basis_.size()) > kMaxExactDimension) {
        throw std::length_error("exact evolution limited to " + std::to_string(kMaxExactDimension) + " states");
    }
    solver_.compute(restrict_to(h, basis_));
    if (solver_.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
}

Statevector ExactPropagator::evolve(const Statevector& psi0, double t) const {
    require_size(psi0, num_qubits_);
    const auto n = static_cast<Eigen::Index>(basis_.size());
    Eigen::VectorXcd local(n);
    for (Eigen::Index r = 0; r < n; ++r) local(r) = psi0(static_cast<Eigen::Index>(basis_[static_cast<std::size_t>(r)]));
    const double outside = psi0.squaredNorm() - local.squaredNorm();
    if (outside > kSupportTolerance) {
        throw std::invalid_argument("initial state has weight outside the evolution subspace");
    }
    const Eigen::MatrixXcd& u = solver_.eigenvectors();
    Eigen::VectorXcd coeffs = u.adjoint() * local;
    const Eigen::VectorXd& e = solver_.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k) coeffs(k) *= std::exp(Complex(0.0, -e(k) * t));
    local = u * coeffs;
    Statevector out = Statevector::Zero(psi0.size());
    for (Eigen::Index r = 0; r < n; ++r) out(static_cast<Eigen::Index>(basis_[static_cast<std::size_t>(r)])) = local(r);
    return out;
}

Statevector exact_evolve(const PauliOp& h, const Statevector& psi0, double t,
                         std::optional<std::span<const BasisIndex>> sector) {
    require_size(psi0, h.num_qubits());
    require_normalized(psi0);
    if (sector) {
        return ExactPropagator(h, std::vector<BasisIndex>(sector->begin(), sector->end())).evolve(psi0, t);
    }
    if (h.num_qubits() > kMaxDenseQubits) {
        throw std::invalid_argument("exact evolution without a sector is limited to " +
                                    std::to_string(kMaxDenseQubits) + " qubits");
    }
    std::vector<BasisIndex> support;
    for (Eigen::Index i = 0; i < psi0.size(); ++i) {
        if (std::abs(psi0(i)) > 0.0) support.push_back(static_cast<BasisIndex>(i));
    }
    return ExactPropagator(h, invariant_closure(h, support)).evolve(psi0, t);
}

Statevector exact_evolve_dense(const PauliOp& h, const Statevector& psi0, double t) {
    require_size(psi0, h.num_qubits());
    require_normalized(psi0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_matrix(h));
    const Eigen::MatrixXcd& u = solver.eigenvectors();
    Eigen::VectorXcd coeffs = u.adjoint() * psi0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        coeffs(k) *= std::exp(Complex(0.0, -solver.eigenvalues()(k) * t));
    }
    return u * coeffs;
}

TrotterPlan make_plan(const PauliOp& h, double t, int n_steps, int order) {
    if (n_steps <= 0) throw std::invalid_argument("number of Trotter steps must be positive");
    if (order != 1 && order != 2) throw std::invalid_argument("Trotter order must be 1 or 2");
    if (!is_hermitian(h)) throw std::invalid_argument("Trotter plans need a Hermitian operator");
    TrotterPlan plan;
    plan.order = order;
    plan.n_steps = n_steps;
    plan.total_time = t;
    const double dt = t / n_steps;
    std::vector<Rotation> first;
    for (const auto& term : h.terms()) {
        if (term.is_identity()) {
            plan.identity_energy += term.coefficient.real();
            continue;
        }
        PauliTerm unit = term;
        unit.coefficient = 1.0;
        first.push_back({unit, term.coefficient.real() * dt});
    }
    if (order == 1 || first.size() <= 1) {
        plan.step = std::move(first);
    } else {
        const std::size_t m = first.size();
        plan.step.reserve(2 * m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) plan.step.push_back({first[k].pauli, 0.5 * first[k].angle});
        plan.step.push_back(first[m - 1]);
        for (std::size_t k = m - 1; k-- > 0;) plan.step.push_back({first[k].pauli, 0.5 * first[k].angle});
    }
    std::uint64_t hash = 14695981039346656037ull;
    for (const auto& r : plan.step) hash = fnv1a(hash, r.pauli.letters() + ';');
    plan.term_order_hash = hash;
    return plan;
}

void trotter_step(const TrotterPlan& plan, Statevector& psi) {
    if (!plan.step.empty()) require_size(psi, plan.step.front().pauli.num_qubits);
    apply_rotations(psi, plan.step);
    if (plan.identity_energy != 0.0) {
        psi *= std::exp(Complex(0.0, -plan.identity_energy * plan.total_time / plan.n_steps));
    }
}

Statevector trotter_evolve(const TrotterPlan& plan, const Statevector& psi0) {
    require_normalized(psi0);
    Statevector psi = psi0;
    for (int s = 0; s < plan.n_steps; ++s) trotter_step(plan, psi);
    return psi;
}

PlanCost plan_cost(const TrotterPlan& plan) {
    PlanCost cost;
    for (const auto& r : plan.step) cost.two_qubit_weight += std::max(r.pauli.weight() - 1, 0);
    cost.rotations_total = static_cast<long long>(plan.step.size()) * plan.n_steps;
    cost.two_qubit_weight *= plan.n_steps;
    return cost;
}

std::map<BasisIndex, int> sample_counts(const Statevector& psi, int shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be >= 1");
    std::vector<double> weights(static_cast<std::size_t>(psi.size()));
    for (Eigen::Index i = 0; i < psi.size(); ++i) weights[static_cast<std::size_t>(i)] = std::norm(psi(i));
    std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
    std::mt19937_64 rng(seed);
    std::map<BasisIndex, int> counts;
    for (int s = 0; s < shots; ++s) ++counts[static_cast<BasisIndex>(dist(rng))];
    return counts;
}

}  // namespace dlcq
