#ifndef DLCQ_PAULI_HPP
#define DLCQ_PAULI_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dlcq/fock.hpp"

namespace dlcq {

inline constexpr double kDropTolerance = 1e-12;
inline constexpr double kCompareTolerance = 1e-10;
inline constexpr int kMaxDenseQubits = 14;

enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

namespace detail {

template <typename Scalar>
Scalar i_power(int e) {
    using R = typename Scalar::value_type;
    switch (((e % 4) + 4) % 4) {
        case 0: return Scalar(R(1), R(0));
        case 1: return Scalar(R(0), R(1));
        case 2: return Scalar(R(-1), R(0));
        default: return Scalar(R(0), R(-1));
    }
}

inline int parity(BasisIndex v) { return std::popcount(v) & 1; }

}  // namespace detail

/// c * P with P a tensor product of single-qubit Paulis, stored in symplectic
/// form P = i^{|x&z|} X^x Z^z. Mask bit b refers to basis-index bit b, i.e.
/// register position num_qubits - 1 - b.
template <typename Scalar>
struct PauliString {
    using Real = typename Scalar::value_type;

    Scalar coefficient{1};
    int num_qubits = 0;
    BasisIndex x = 0;
    BasisIndex z = 0;

    static PauliString identity(int n, Scalar c = Scalar(1)) { return {c, n, 0, 0}; }

    /// Letters are written leftmost = register position 0, e.g. "IZXY".
    static PauliString parse(std::string_view letters, Scalar c = Scalar(1)) {
        const int n = static_cast<int>(letters.size());
        if (n > kMaxQubits) throw std::invalid_argument("Pauli string longer than supported register");
        PauliString p{c, n, 0, 0};
        for (int pos = 0; pos < n; ++pos) {
            const BasisIndex b = BasisIndex{1} << (n - 1 - pos);
            switch (letters[static_cast<std::size_t>(pos)]) {
                case 'I': break;
                case 'X': p.x |= b; break;
                case 'Y': p.x |= b; p.z |= b; break;
                case 'Z': p.z |= b; break;
                default: throw std::invalid_argument("invalid Pauli letter in '" + std::string(letters) + "'");
            }
        }
        return p;
    }

    Letter letter(int position) const {
        const int b = num_qubits - 1 - position;
        const bool xb = (x >> b) & 1u;
        const bool zb = (z >> b) & 1u;
        if (xb) return zb ? Letter::Y : Letter::X;
        return zb ? Letter::Z : Letter::I;
    }

    std::string letters() const {
        static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
        std::string s(static_cast<std::size_t>(num_qubits), 'I');
        for (int p = 0; p < num_qubits; ++p) s[static_cast<std::size_t>(p)] = kChars[static_cast<int>(letter(p))];
        return s;
    }

    int weight() const { return std::popcount(x | z); }
    int y_count() const { return std::popcount(x & z); }
    bool is_identity() const { return (x | z) == 0; }
    bool is_diagonal() const { return x == 0; }

    /// Base-4 number of the letter array with I<X<Y<Z, position 0 most
    /// significant. Total order used for canonical sums.
    std::uint64_t order_key() const {
        const BasisIndex lo = x ^ z;
        std::uint64_t key = 0;
        for (int b = num_qubits - 1; b >= 0; --b) {
            key = (key << 2) | (((z >> b) & 1u) << 1) | ((lo >> b) & 1u);
        }
        return key;
    }

    bool same_letters(const PauliString& o) const { return num_qubits == o.num_qubits && x == o.x && z == o.z; }
    bool commutes_with(const PauliString& o) const { return detail::parity((x & o.z) ^ (z & o.x)) == 0; }

    /// P|index> = phase * |index ^ x>; returns the phase (coefficient excluded).
    Scalar phase_on(BasisIndex index) const {
        return detail::i_power<Scalar>(y_count() + 2 * detail::parity(index & z));
    }
};

/// Product of two strings including the single-qubit phases (XY = iZ, ...).
template <typename Scalar>
PauliString<Scalar> operator*(const PauliString<Scalar>& a, const PauliString<Scalar>& b) {
    if (a.num_qubits != b.num_qubits) throw std::invalid_argument("Pauli string size mismatch");
    PauliString<Scalar> r{a.coefficient * b.coefficient, a.num_qubits, a.x ^ b.x, a.z ^ b.z};
    // i^{ya} X^xa Z^za i^{yb} X^xb Z^zb = i^{ya+yb} (-1)^{|za&xb|} X^x Z^z
    const int e = a.y_count() + b.y_count() - r.y_count() + 2 * std::popcount(a.z & b.x);
    r.coefficient *= detail::i_power<Scalar>(e);
    return r;
}

/// Hash-based accumulator of like terms; finish() yields canonical order.
template <typename Scalar>
class PauliAccumulator {
public:
    explicit PauliAccumulator(int num_qubits) : num_qubits_(num_qubits) {}

    void add(const PauliString<Scalar>& p) {
        if (p.num_qubits != num_qubits_) throw std::invalid_argument("mixed Pauli string lengths");
        const std::uint64_t key = (static_cast<std::uint64_t>(p.x) << 32) | static_cast<std::uint64_t>(p.z);
        auto [it, inserted] = terms_.try_emplace(key, p);
        if (!inserted) it->second.coefficient += p.coefficient;
    }

    int num_qubits() const { return num_qubits_; }

    std::vector<PauliString<Scalar>> finish(double tol) && {
        std::vector<PauliString<Scalar>> out;
        out.reserve(terms_.size());
        for (auto& [key, p] : terms_) {
            if (std::abs(p.coefficient) > tol) out.push_back(p);
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& l, const auto& r) { return l.order_key() < r.order_key(); });
        return out;
    }

private:
    int num_qubits_;
    std::unordered_map<std::uint64_t, PauliString<Scalar>> terms_;
};

/// Canonical sum of Pauli strings: like terms merged, negligible terms dropped,
/// letter arrays in lexicographic I<X<Y<Z order.
template <typename Scalar>
class PauliSum {
public:
    using Term = PauliString<Scalar>;
    using Real = typename Scalar::value_type;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    PauliSum() = default;
    explicit PauliSum(int num_qubits) : num_qubits_(num_qubits) {}

    static PauliSum identity(int num_qubits, Scalar c = Scalar(1)) {
        PauliSum s(num_qubits);
        if (std::abs(c) > kDropTolerance) s.terms_.push_back(Term::identity(num_qubits, c));
        return s;
    }

    static PauliSum from_accumulator(PauliAccumulator<Scalar>&& acc, double tol = kDropTolerance) {
        PauliSum s(acc.num_qubits());
        s.terms_ = std::move(acc).finish(tol);
        return s;
    }

    int num_qubits() const { return num_qubits_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Coefficient of the given letter array, zero when absent.
    Scalar coefficient_of(std::string_view letters) const {
        const Term probe = Term::parse(letters);
        for (const auto& t : terms_) {
            if (t.same_letters(probe)) return t.coefficient;
        }
        return Scalar(0);
    }

    bool is_diagonal() const {
        return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.is_diagonal(); });
    }

private:
    int num_qubits_ = 0;
    std::vector<Term> terms_;
};

template <typename Scalar>
PauliSum<Scalar> canonicalize(const std::vector<PauliString<Scalar>>& terms, double tol = kDropTolerance) {
    if (terms.empty()) return PauliSum<Scalar>(0);
    PauliAccumulator<Scalar> acc(terms.front().num_qubits);
    for (const auto& t : terms) acc.add(t);
    return PauliSum<Scalar>::from_accumulator(std::move(acc), tol);
}

namespace detail {
template <typename Scalar>
void require_same_size(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b) {
    if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("Pauli sum register size mismatch");
}
}  // namespace detail

template <typename Scalar>
PauliSum<Scalar> operator+(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b) {
    detail::require_same_size(a, b);
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (const auto& t : a.terms()) acc.add(t);
    for (const auto& t : b.terms()) acc.add(t);
    return PauliSum<Scalar>::from_accumulator(std::move(acc));
}

template <typename Scalar>
PauliSum<Scalar> operator*(Scalar c, const PauliSum<Scalar>& a) {
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (auto t : a.terms()) {
        t.coefficient *= c;
        acc.add(t);
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc));
}

template <typename Scalar>
PauliSum<Scalar> operator-(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b) {
    return a + Scalar(-1) * b;
}

template <typename Scalar>
PauliSum<Scalar> product(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b, double tol = kDropTolerance) {
    detail::require_same_size(a, b);
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) acc.add(ta * tb);
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc), tol);
}

template <typename Scalar>
PauliSum<Scalar> operator*(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b) {
    return product(a, b);
}

template <typename Scalar>
PauliSum<Scalar> commutator(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b, double tol = kDropTolerance) {
    detail::require_same_size(a, b);
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            if (ta.commutes_with(tb)) continue;
            // anticommuting strings: AB - BA = 2AB
            auto ab = ta * tb;
            ab.coefficient *= Scalar(2);
            acc.add(ab);
        }
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc), tol);
}

template <typename Scalar>
PauliSum<Scalar> anticommutator(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b, double tol = kDropTolerance) {
    detail::require_same_size(a, b);
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            if (!ta.commutes_with(tb)) continue;
            auto ab = ta * tb;
            ab.coefficient *= Scalar(2);
            acc.add(ab);
        }
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc), tol);
}

template <typename Scalar>
PauliSum<Scalar> adjoint(const PauliSum<Scalar>& a) {
    PauliAccumulator<Scalar> acc(a.num_qubits());
    for (auto t : a.terms()) {
        t.coefficient = std::conj(t.coefficient);
        acc.add(t);
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc));
}

/// Term-wise comparison of two canonical sums.
template <typename Scalar>
bool approx_equal(const PauliSum<Scalar>& a, const PauliSum<Scalar>& b, double tol = kCompareTolerance) {
    if (a.num_qubits() != b.num_qubits()) return false;
    const auto diff = a - b;
    return std::all_of(diff.terms().begin(), diff.terms().end(),
                       [tol](const auto& t) { return std::abs(t.coefficient) <= tol; });
}

template <typename Scalar>
bool is_hermitian(const PauliSum<Scalar>& a, double tol = kCompareTolerance) {
    return std::all_of(a.terms().begin(), a.terms().end(),
                       [tol](const auto& t) { return std::abs(t.coefficient.imag()) <= tol; });
}

/// Applies a string to a vector without building its matrix.
template <typename Scalar, typename Derived>
void apply_term_add(const PauliString<Scalar>& t, const Eigen::MatrixBase<Derived>& psi,
                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& out) {
    const auto dim = static_cast<BasisIndex>(psi.size());
    const Scalar base = t.coefficient * detail::i_power<Scalar>(t.y_count());
    for (BasisIndex i = 0; i < dim; ++i) {
        const Scalar a = psi(static_cast<Eigen::Index>(i));
        if (a == Scalar(0)) continue;
        const Scalar v = detail::parity(i & t.z) ? -base * a : base * a;
        out(static_cast<Eigen::Index>(i ^ t.x)) += v;
    }
}

template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(const PauliSum<Scalar>& op, const Eigen::MatrixBase<Derived>& psi) {
    const auto dim = static_cast<Eigen::Index>(BasisIndex{1} << op.num_qubits());
    if (psi.size() != dim) throw std::invalid_argument("statevector size does not match operator register");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim);
    for (const auto& t : op.terms()) apply_term_add(t, psi, out);
    return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_matrix(const PauliSum<Scalar>& op) {
    if (op.num_qubits() > kMaxDenseQubits) {
        throw std::invalid_argument("to_matrix supports at most " + std::to_string(kMaxDenseQubits) + " qubits");
    }
    const auto dim = static_cast<Eigen::Index>(BasisIndex{1} << op.num_qubits());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(dim, dim);
    for (const auto& t : op.terms()) {
        for (BasisIndex i = 0; i < static_cast<BasisIndex>(dim); ++i) {
            m(static_cast<Eigen::Index>(i ^ t.x), static_cast<Eigen::Index>(i)) += t.coefficient * t.phase_on(i);
        }
    }
    return m;
}

/// One term per line: "<re> <im> <letters>".
template <typename Scalar>
void write_text(std::ostream& os, const PauliSum<Scalar>& op) {
    char buf[64];
    for (const auto& t : op.terms()) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g ", static_cast<double>(t.coefficient.real()),
                      static_cast<double>(t.coefficient.imag()));
        os << buf << t.letters() << '\n';
    }
}

template <typename Scalar>
PauliSum<Scalar> read_text(std::istream& is, int num_qubits) {
    using R = typename Scalar::value_type;
    PauliAccumulator<Scalar> acc(num_qubits);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::istringstream ls(line);
        double re = 0;
        double im = 0;
        std::string letters;
        if (!(ls >> re >> im >> letters)) {
            throw std::invalid_argument("malformed Pauli term on line " + std::to_string(line_no));
        }
        auto t = PauliString<Scalar>::parse(letters, Scalar(static_cast<R>(re), static_cast<R>(im)));
        if (t.num_qubits != num_qubits) throw std::invalid_argument("term length differs from register size");
        acc.add(t);
    }
    return PauliSum<Scalar>::from_accumulator(std::move(acc));
}

using Complex = std::complex<double>;
using PauliTerm = PauliString<Complex>;
using PauliOp = PauliSum<Complex>;

}  // namespace dlcq

#endif  // DLCQ_PAULI_HPP
