#ifndef DLCQ_FOCK_HPP
#define DLCQ_FOCK_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dlcq {

/// Computational-basis index. Position 0 of the register (leftmost character
/// of a rendered bitstring) is the most significant bit.
using BasisIndex = std::uint64_t;

/// Largest register the bit-level encoding supports.
inline constexpr int kMaxQubits = 32;

enum class Species { Fermion, Antifermion, Boson };

/// Mode counts per species and the occupancy cap (modals) of every boson mode.
struct ModeConfig {
    int n_fermion = 1;
    int n_antifermion = 1;
    int n_boson = 1;
    std::vector<int> modals;  // one entry per boson mode

    static ModeConfig uniform(int n_max, int modals_per_mode);
    static ModeConfig uniform(int n_fermion, int n_antifermion, int n_boson, int modals_per_mode);

    /// Throws std::invalid_argument on non-positive counts or a modal list of
    /// the wrong length. Caps that are not 2^t - 1 are accepted here.
    void validate() const;
    bool modals_fill_qubits() const;

    bool operator==(const ModeConfig&) const = default;
};

/// Occupation numbers of every mode; the simulation's basis label.
struct FockState {
    std::vector<std::uint8_t> fermions;
    std::vector<std::uint8_t> antifermions;
    std::vector<int> bosons;

    static FockState vacuum(const ModeConfig& config);

    bool operator==(const FockState&) const = default;
    auto operator<=>(const FockState&) const = default;
};

/// Qubit positions for one mode: `first` is the leftmost position.
struct QubitRange {
    int first = 0;
    int width = 0;
};

/// Register layout: fermions | antifermions | bosons, mode 1 leftmost within
/// each species, boson occupancies big-endian inside their group.
class QubitLayout {
public:
    explicit QubitLayout(ModeConfig config);

    const ModeConfig& config() const { return config_; }
    int total_qubits() const { return total_qubits_; }
    BasisIndex dimension() const { return BasisIndex{1} << total_qubits_; }

    // Modes are 1-based, matching the momentum label n.
    int fermion_position(int mode) const;
    int antifermion_position(int mode) const;
    QubitRange boson_range(int mode) const;

    /// Bit of the basis index that stores register position `position`.
    BasisIndex bit(int position) const { return BasisIndex{1} << (total_qubits_ - 1 - position); }

private:
    ModeConfig config_;
    int total_qubits_ = 0;
    std::vector<QubitRange> boson_ranges_;
};

int qubits_for_modals(int modals);
int qubit_count(const ModeConfig& config);

/// Throws std::invalid_argument if `state` does not fit `config`.
void check_state(const FockState& state, const ModeConfig& config);
bool is_valid(const FockState& state, const ModeConfig& config);

BasisIndex encode(const FockState& state, const QubitLayout& layout);

/// Inverse of encode. For caps that are not 2^t - 1 a bit pattern may decode to
/// an occupancy above the cap; use is_valid to detect it.
FockState decode(BasisIndex index, const QubitLayout& layout);

int k_of(const FockState& state);
int q_of(const FockState& state);

/// Allocation-free (K, Q) of a basis index. Only meaningful for valid patterns.
std::pair<int, int> charges_of(BasisIndex index, const QubitLayout& layout);

/// Every valid state with the given charges, ascending by encoded index.
std::vector<FockState> enumerate_sector(const ModeConfig& config, int k_total, int charge);
std::vector<BasisIndex> sector_indices(const QubitLayout& layout, int k_total, int charge);

/// Species groups separated by single spaces, e.g. "010 000 00 00 00". When
/// every boson mode uses a single qubit the boson bits form one group.
std::string render_bitstring(BasisIndex index, const QubitLayout& layout);
std::string render(const FockState& state, const QubitLayout& layout);

/// Accepts a rendered bitstring with arbitrary whitespace.
BasisIndex parse_bitstring(std::string_view text, const QubitLayout& layout);

}  // namespace dlcq

#endif  // DLCQ_FOCK_HPP
