#include "dlcq/fock.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <stdexcept>

namespace dlcq {

ModeConfig ModeConfig::uniform(int n_max, int modals_per_mode) {
    return uniform(n_max, n_max, n_max, modals_per_mode);
}

ModeConfig ModeConfig::uniform(int n_fermion, int n_antifermion, int n_boson, int modals_per_mode) {
    ModeConfig c;
    c.n_fermion = n_fermion;
    c.n_antifermion = n_antifermion;
    c.n_boson = n_boson;
    c.modals.assign(static_cast<std::size_t>(std::max(n_boson, 0)), modals_per_mode);
    return c;
}

void ModeConfig::validate() const {
    if (n_fermion < 1 || n_antifermion < 1 || n_boson < 1) {
        throw std::invalid_argument("mode counts must be >= 1");
    }
    if (static_cast<int>(modals.size()) != n_boson) {
        throw std::invalid_argument("need one modal cap per boson mode");
    }
    for (int m : modals) {
        if (m < 1) throw std::invalid_argument("modal caps must be >= 1");
    }
    if (qubit_count(*this) > kMaxQubits) {
        throw std::invalid_argument("register exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
}

bool ModeConfig::modals_fill_qubits() const {
    return std::all_of(modals.begin(), modals.end(),
                       [](int m) { return std::has_single_bit(static_cast<unsigned>(m) + 1u); });
}

FockState FockState::vacuum(const ModeConfig& config) {
    FockState s;
    s.fermions.assign(static_cast<std::size_t>(config.n_fermion), 0);
    s.antifermions.assign(static_cast<std::size_t>(config.n_antifermion), 0);
    s.bosons.assign(static_cast<std::size_t>(config.n_boson), 0);
    return s;
}

int qubits_for_modals(int modals) {
    if (modals < 1) throw std::invalid_argument("modal cap must be >= 1");
    // ceil(log2(m + 1))
    return static_cast<int>(std::bit_width(static_cast<unsigned>(modals)));
}

int qubit_count(const ModeConfig& config) {
    int n = config.n_fermion + config.n_antifermion;
    for (int m : config.modals) n += qubits_for_modals(m);
    return n;
}

QubitLayout::QubitLayout(ModeConfig config) : config_(std::move(config)) {
    config_.validate();
    int pos = config_.n_fermion + config_.n_antifermion;
    boson_ranges_.reserve(config_.modals.size());
    for (int m : config_.modals) {
        const int w = qubits_for_modals(m);
        boson_ranges_.push_back({pos, w});
        pos += w;
    }
    total_qubits_ = pos;
}

int QubitLayout::fermion_position(int mode) const {
    if (mode < 1 || mode > config_.n_fermion) throw std::out_of_range("fermion mode out of range");
    return mode - 1;
}

int QubitLayout::antifermion_position(int mode) const {
    if (mode < 1 || mode > config_.n_antifermion) throw std::out_of_range("antifermion mode out of range");
    return config_.n_fermion + mode - 1;
}

QubitRange QubitLayout::boson_range(int mode) const {
    if (mode < 1 || mode > config_.n_boson) throw std::out_of_range("boson mode out of range");
    return boson_ranges_[static_cast<std::size_t>(mode - 1)];
}

void check_state(const FockState& state, const ModeConfig& config) {
    if (static_cast<int>(state.fermions.size()) != config.n_fermion ||
        static_cast<int>(state.antifermions.size()) != config.n_antifermion ||
        static_cast<int>(state.bosons.size()) != config.n_boson) {
        throw std::invalid_argument("state does not match the mode configuration");
    }
    auto bad_bit = [](std::uint8_t b) { return b > 1; };
    if (std::any_of(state.fermions.begin(), state.fermions.end(), bad_bit) ||
        std::any_of(state.antifermions.begin(), state.antifermions.end(), bad_bit)) {
        throw std::invalid_argument("fermionic occupancy must be 0 or 1");
    }
    for (std::size_t i = 0; i < state.bosons.size(); ++i) {
        if (state.bosons[i] < 0 || state.bosons[i] > config.modals[i]) {
            throw std::invalid_argument("boson occupancy of mode " + std::to_string(i + 1) +
                                        " exceeds its modal cap");
        }
    }
}

bool is_valid(const FockState& state, const ModeConfig& config) {
    try {
        check_state(state, config);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return true;
}

BasisIndex encode(const FockState& state, const QubitLayout& layout) {
    const ModeConfig& c = layout.config();
    check_state(state, c);
    BasisIndex index = 0;
    for (int n = 1; n <= c.n_fermion; ++n) {
        if (state.fermions[n - 1]) index |= layout.bit(layout.fermion_position(n));
    }
    for (int n = 1; n <= c.n_antifermion; ++n) {
        if (state.antifermions[n - 1]) index |= layout.bit(layout.antifermion_position(n));
    }
    for (int n = 1; n <= c.n_boson; ++n) {
        const QubitRange r = layout.boson_range(n);
        const auto occ = static_cast<BasisIndex>(state.bosons[n - 1]);
        // most significant occupancy bit at the leftmost position
        const int shift = layout.total_qubits() - r.first - r.width;
        index |= occ << shift;
    }
    return index;
}

FockState decode(BasisIndex index, const QubitLayout& layout) {
    const ModeConfig& c = layout.config();
    if (index >= layout.dimension()) throw std::out_of_range("basis index exceeds register");
    FockState s = FockState::vacuum(c);
    for (int n = 1; n <= c.n_fermion; ++n) {
        s.fermions[n - 1] = (index & layout.bit(layout.fermion_position(n))) ? 1 : 0;
    }
    for (int n = 1; n <= c.n_antifermion; ++n) {
        s.antifermions[n - 1] = (index & layout.bit(layout.antifermion_position(n))) ? 1 : 0;
    }
    for (int n = 1; n <= c.n_boson; ++n) {
        const QubitRange r = layout.boson_range(n);
        const int shift = layout.total_qubits() - r.first - r.width;
        s.bosons[n - 1] = static_cast<int>((index >> shift) & ((BasisIndex{1} << r.width) - 1));
    }
    return s;
}

int k_of(const FockState& state) {
    int k = 0;
    for (std::size_t i = 0; i < state.fermions.size(); ++i) k += static_cast<int>(i + 1) * state.fermions[i];
    for (std::size_t i = 0; i < state.antifermions.size(); ++i) k += static_cast<int>(i + 1) * state.antifermions[i];
    for (std::size_t i = 0; i < state.bosons.size(); ++i) k += static_cast<int>(i + 1) * state.bosons[i];
    return k;
}

int q_of(const FockState& state) {
    int q = 0;
    for (auto b : state.fermions) q += b;
    for (auto b : state.antifermions) q -= b;
    return q;
}

std::pair<int, int> charges_of(BasisIndex index, const QubitLayout& layout) {
    const ModeConfig& c = layout.config();
    const int nq = layout.total_qubits();
    int k = 0;
    int q = 0;
    for (int n = 1; n <= c.n_fermion; ++n) {
        if ((index >> (nq - n)) & 1u) {
            k += n;
            ++q;
        }
    }
    for (int n = 1; n <= c.n_antifermion; ++n) {
        if ((index >> (nq - c.n_fermion - n)) & 1u) {
            k += n;
            --q;
        }
    }
    for (int n = 1; n <= c.n_boson; ++n) {
        const QubitRange r = layout.boson_range(n);
        const int shift = nq - r.first - r.width;
        k += n * static_cast<int>((index >> shift) & ((BasisIndex{1} << r.width) - 1));
    }
    return {k, q};
}

namespace {

struct SectorWalker {
    const ModeConfig& config;
    int charge;
    FockState current;
    std::vector<FockState> out;

    // Modes are visited in a flat order: fermions, antifermions, bosons.
    void walk(int slot, int k_left, int q_now) {
        const int nf = config.n_fermion;
        const int na = config.n_antifermion;
        const int nb = config.n_boson;
        if (slot == nf + na + nb) {
            if (k_left == 0 && q_now == charge) out.push_back(current);
            return;
        }
        if (slot < nf) {
            const int n = slot + 1;
            walk(slot + 1, k_left, q_now);
            if (n <= k_left) {
                current.fermions[slot] = 1;
                walk(slot + 1, k_left - n, q_now + 1);
                current.fermions[slot] = 0;
            }
        } else if (slot < nf + na) {
            const int i = slot - nf;
            const int n = i + 1;
            walk(slot + 1, k_left, q_now);
            if (n <= k_left) {
                current.antifermions[i] = 1;
                walk(slot + 1, k_left - n, q_now - 1);
                current.antifermions[i] = 0;
            }
        } else {
            const int i = slot - nf - na;
            const int n = i + 1;
            for (int p = 0; p <= config.modals[i] && p * n <= k_left; ++p) {
                current.bosons[i] = p;
                walk(slot + 1, k_left - p * n, q_now);
            }
            current.bosons[i] = 0;
        }
    }
};

}  // namespace

std::vector<FockState> enumerate_sector(const ModeConfig& config, int k_total, int charge) {
    config.validate();
    if (k_total < 0) throw std::invalid_argument("K must be non-negative");
    SectorWalker w{config, charge, FockState::vacuum(config), {}};
    w.walk(0, k_total, 0);
    const QubitLayout layout(config);
    std::vector<std::pair<BasisIndex, FockState>> keyed;
    keyed.reserve(w.out.size());
    for (auto& s : w.out) keyed.emplace_back(encode(s, layout), std::move(s));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<FockState> states;
    states.reserve(keyed.size());
    for (auto& [idx, s] : keyed) states.push_back(std::move(s));
    return states;
}

std::vector<BasisIndex> sector_indices(const QubitLayout& layout, int k_total, int charge) {
    std::vector<BasisIndex> out;
    for (const auto& s : enumerate_sector(layout.config(), k_total, charge)) out.push_back(encode(s, layout));
    return out;
}

std::string render_bitstring(BasisIndex index, const QubitLayout& layout) {
    const ModeConfig& c = layout.config();
    const int nq = layout.total_qubits();
    std::string bits(static_cast<std::size_t>(nq), '0');
    for (int p = 0; p < nq; ++p) {
        if (index & layout.bit(p)) bits[static_cast<std::size_t>(p)] = '1';
    }
    std::string out;
    out.reserve(bits.size() + static_cast<std::size_t>(c.n_boson) + 2);
    out += bits.substr(0, static_cast<std::size_t>(c.n_fermion));
    out += ' ';
    out += bits.substr(static_cast<std::size_t>(c.n_fermion), static_cast<std::size_t>(c.n_antifermion));
    const bool single_qubit_bosons =
        std::all_of(c.modals.begin(), c.modals.end(), [](int m) { return m == 1; });
    if (single_qubit_bosons) {
        out += ' ';
        out += bits.substr(static_cast<std::size_t>(c.n_fermion + c.n_antifermion));
        return out;
    }
    for (int n = 1; n <= c.n_boson; ++n) {
        const QubitRange r = layout.boson_range(n);
        out += ' ';
        out += bits.substr(static_cast<std::size_t>(r.first), static_cast<std::size_t>(r.width));
    }
    return out;
}

std::string render(const FockState& state, const QubitLayout& layout) {
    return render_bitstring(encode(state, layout), layout);
}

BasisIndex parse_bitstring(std::string_view text, const QubitLayout& layout) {
    BasisIndex index = 0;
    int count = 0;
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        if (ch != '0' && ch != '1') throw std::invalid_argument("bitstring may only contain 0, 1 and spaces");
        index = (index << 1) | static_cast<BasisIndex>(ch == '1');
        ++count;
    }
    if (count != layout.total_qubits()) {
        throw std::invalid_argument("bitstring has " + std::to_string(count) + " bits, register has " +
                                    std::to_string(layout.total_qubits()));
    }
    return index;
}

}  // namespace dlcq
