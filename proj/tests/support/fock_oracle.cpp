#include "fock_oracle.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace oracle {

Op bd(int k) { return {Field::B, k, true}; }
Op b(int k) { return {Field::B, k, false}; }
Op dd(int k) { return {Field::D, k, true}; }
Op d(int k) { return {Field::D, k, false}; }
Op cd(int n) { return {Field::C, n, true}; }
Op c(int n) { return {Field::C, n, false}; }

namespace {

// {n|m}
double br(int n, int m) { return (n == 0 || m == 0 || m != -n) ? 0.0 : 1.0 / n; }

int occupied_before(const std::vector<std::uint8_t>& occ, int mode) {
    int count = 0;
    for (int j = 0; j < mode - 1; ++j) count += occ[static_cast<std::size_t>(j)];
    return count;
}

}  // namespace

bool apply(const Op& op, dlcq::FockState& s, double& amp, const dlcq::ModeConfig& config,
           dlcq::JwOrdering ordering) {
    const auto idx = static_cast<std::size_t>(op.mode - 1);
    switch (op.field) {
        case Field::B:
        case Field::D: {
            auto& occ = op.field == Field::B ? s.fermions : s.antifermions;
            if (occ[idx] == (op.dagger ? 1 : 0)) return false;
            int before = occupied_before(occ, op.mode);
            if (op.field == Field::D && ordering == dlcq::JwOrdering::Global) {
                for (auto f : s.fermions) before += f;
            }
            occ[idx] = op.dagger ? 1 : 0;
            if (before % 2) amp = -amp;
            return true;
        }
        case Field::A:
        case Field::C: {
            int& l = s.bosons[idx];
            const int cap = config.modals[idx];
            const double scale = op.field == Field::C ? 1.0 / std::sqrt(static_cast<double>(op.mode)) : 1.0;
            if (op.dagger) {
                if (l >= cap) return false;
                amp *= std::sqrt(static_cast<double>(l + 1)) * scale;
                ++l;
            } else {
                if (l == 0) return false;
                amp *= std::sqrt(static_cast<double>(l)) * scale;
                --l;
            }
            return true;
        }
    }
    return false;
}

std::vector<Monomial> hamiltonian(const dlcq::ModelParams& p, const dlcq::ModeConfig& cfg, dlcq::PartMask parts) {
    std::vector<Monomial> out;
    const double g = p.coupling / std::sqrt(4.0 * std::numbers::pi);
    const double mf = p.fermion_mass, mb = p.boson_mass;
    const int nb = cfg.n_boson, nf = cfg.n_fermion, na = cfg.n_antifermion;
    auto push = [&](double w, std::vector<Op> ops) {
        if (w != 0.0) out.push_back({w, std::move(ops)});
    };

    if (parts.mass) {
        // inertias written out straight from their sums, plain double
        auto alpha = [&](int n) {
            double s = 0;
            for (int m = 1; m <= p.inertia_cutoff; ++m) s += br(n - m, m - n) - br(n + m, -m - n);
            return s;
        };
        auto beta = [&](int n) {
            double s = 0;
            for (int m = 1; m <= p.inertia_cutoff; ++m) s += double(n) / m * br(n - m, m - n);
            return s;
        };
        auto gamma = [&](int n) {
            double s = 0;
            for (int m = 1; m <= p.inertia_cutoff; ++m) s += double(n) / m * br(n + m, -m - n);
            return s;
        };
        const double g2 = p.include_inertias ? g * g : 0.0;
        for (int n = 1; n <= nb; ++n) push((mb * mb + g2 * alpha(n)) / n, {{Field::A, n, true}, {Field::A, n, false}});
        for (int n = 1; n <= nf; ++n) push((mf * mf + g2 * beta(n)) / n, {bd(n), b(n)});
        for (int n = 1; n <= na; ++n) push((mf * mf + g2 * gamma(n)) / n, {dd(n), d(n)});
    }
    if (parts.vertex) {
        const double s = g * mf;
        for (int k = 1; k <= std::max(nf, na); ++k)
            for (int l = 1; l <= nb; ++l)
                for (int m = 1; m <= std::max(nf, na); ++m) {
                    const double w = s * (br(k + l, -m) + br(k, l - m));
                    if (k <= nf && m <= nf) {
                        push(w, {bd(k), b(m), cd(l)});
                        push(w, {bd(m), b(k), c(l)});
                    }
                    if (k <= na && m <= na) {
                        push(w, {dd(k), d(m), cd(l)});
                        push(w, {dd(m), d(k), c(l)});
                    }
                    if (k <= nf && m <= na) {
                        const double v = -s * (br(k - l, m) + br(k, m - l));
                        push(v, {b(k), d(m), cd(l)});
                        push(v, {dd(m), bd(k), c(l)});
                    }
                }
    }
    const double g2 = g * g;
    for (int k = 1; k <= std::max(nf, na); ++k)
        for (int l = 1; l <= nb; ++l)
            for (int m = 1; m <= std::max(nf, na); ++m)
                for (int n = 1; n <= nb; ++n) {
                    if (parts.seagull) {
                        const double w = g2 * (br(k - n, l - m) + br(k + l, -m - n));
                        if (k <= nf && m <= nf) push(w, {bd(k), b(m), cd(l), c(n)});
                        if (k <= na && m <= na) push(w, {dd(k), d(m), cd(l), c(n)});
                        if (k <= na && m <= nf) {
                            const double v = g2 * br(l - k, n - m);
                            push(v, {d(k), b(m), cd(l), cd(n)});
                            push(v, {bd(m), dd(k), c(n), c(l)});
                        }
                    }
                    if (parts.fork) {
                        const double w = g2 * br(k + l, n - m);
                        if (k <= nf && m <= nf) {
                            push(w, {bd(k), b(m), cd(l), cd(n)});
                            push(w, {bd(m), b(k), c(n), c(l)});
                        }
                        if (k <= na && m <= na) {
                            push(w, {dd(k), d(m), cd(l), cd(n)});
                            push(w, {dd(m), d(k), c(n), c(l)});
                        }
                        if (k <= nf && m <= na) {
                            const double v = g2 * (br(k - n, m + l) + br(k + l, m - n));
                            push(v, {bd(k), dd(m), cd(l), c(n)});
                            push(v, {d(m), b(k), cd(n), c(l)});
                        }
                    }
                }
    return out;
}

Eigen::MatrixXd matrix(const std::vector<Monomial>& terms, const std::vector<dlcq::FockState>& basis,
                       const dlcq::ModeConfig& config, dlcq::JwOrdering ordering) {
    std::map<dlcq::FockState, Eigen::Index> row;
    for (std::size_t i = 0; i < basis.size(); ++i) row.emplace(basis[i], static_cast<Eigen::Index>(i));
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        for (const auto& t : terms) {
            dlcq::FockState s = basis[static_cast<std::size_t>(col)];
            double amp = t.coeff;
            bool alive = true;
            for (auto it = t.ops.rbegin(); it != t.ops.rend() && alive; ++it) alive = apply(*it, s, amp, config, ordering);
            if (!alive) continue;
            const auto r = row.find(s);
            if (r != row.end()) m(r->second, col) += amp;
        }
    }
    return m;
}

std::vector<dlcq::FockState> all_states(const dlcq::ModeConfig& config) {
    std::vector<dlcq::FockState> out{dlcq::FockState::vacuum(config)};
    auto extend = [&](auto member, std::size_t count, auto cap_of) {
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<dlcq::FockState> next;
            for (const auto& s : out) {
                for (int v = 0; v <= cap_of(i); ++v) {
                    auto t = s;
                    (t.*member)[i] = static_cast<std::remove_reference_t<decltype((t.*member)[i])>>(v);
                    next.push_back(t);
                }
            }
            out = std::move(next);
        }
    };
    extend(&dlcq::FockState::fermions, static_cast<std::size_t>(config.n_fermion), [](std::size_t) { return 1; });
    extend(&dlcq::FockState::antifermions, static_cast<std::size_t>(config.n_antifermion),
           [](std::size_t) { return 1; });
    extend(&dlcq::FockState::bosons, static_cast<std::size_t>(config.n_boson),
           [&](std::size_t i) { return config.modals[i]; });
    return out;
}

}  // namespace oracle
