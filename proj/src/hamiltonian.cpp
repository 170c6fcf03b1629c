#include "dlcq/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dlcq {

void ModelParams::validate(int n_max) const {
    if (!(fermion_mass > 0.0) || !(boson_mass > 0.0)) {
        throw std::domain_error("masses must be positive");
    }
    if (!std::isfinite(coupling)) throw std::domain_error("coupling must be finite");
    if (!(box_length > 0.0) || !std::isfinite(box_length)) throw std::domain_error("box length must be positive");
    if (inertia_cutoff < n_max) {
        throw std::domain_error("inertia cutoff (" + std::to_string(inertia_cutoff) +
                                ") must be at least the largest mode label (" + std::to_string(n_max) + ")");
    }
}

std::string to_string(Part part) {
    switch (part) {
        case Part::Mass: return "HM";
        case Part::Vertex: return "HV";
        case Part::Seagull: return "HS";
        case Part::Fork: return "HF";
    }
    return "?";
}

Part parse_part(const std::string& name) {
    if (name == "HM") return Part::Mass;
    if (name == "HV") return Part::Vertex;
    if (name == "HS") return Part::Seagull;
    if (name == "HF") return Part::Fork;
    throw std::invalid_argument("unknown Hamiltonian part '" + name + "' (expected HM, HV, HS or HF)");
}

bool PartMask::contains(Part p) const {
    switch (p) {
        case Part::Mass: return mass;
        case Part::Vertex: return vertex;
        case Part::Seagull: return seagull;
        case Part::Fork: return fork;
    }
    return false;
}

double bracket(int n, int m) {
    if (n == 0 || m == 0) return 0.0;
    return m == -n ? 1.0 / n : 0.0;
}

double self_inertia(Inertia kind, int n, int cutoff) {
    if (n < 1) throw std::invalid_argument("inertia mode label must be >= 1");
    long double sum = 0.0L;
    for (int m = 1; m <= cutoff; ++m) {
        const long double ratio = static_cast<long double>(n) / m;
        switch (kind) {
            case Inertia::Alpha: sum += bracket(n - m, m - n) - bracket(n + m, -m - n); break;
            case Inertia::Beta: sum += ratio * bracket(n - m, m - n); break;
            case Inertia::Gamma: sum += ratio * bracket(n + m, -m - n); break;
        }
    }
    return static_cast<double>(sum);
}

namespace {

/// Ladder operators of every mode, built once per Hamiltonian.
struct LadderSet {
    int n_qubits;
    std::vector<PauliOp> b_dag, b, d_dag, d, c_dag, c;  // index 0 unused

    LadderSet(const QubitLayout& layout, JwOrdering ordering) : n_qubits(layout.total_qubits()) {
        const ModeConfig& cfg = layout.config();
        b_dag.resize(static_cast<std::size_t>(cfg.n_fermion) + 1);
        b.resize(b_dag.size());
        d_dag.resize(static_cast<std::size_t>(cfg.n_antifermion) + 1);
        d.resize(d_dag.size());
        c_dag.resize(static_cast<std::size_t>(cfg.n_boson) + 1);
        c.resize(c_dag.size());
        for (int k = 1; k <= cfg.n_fermion; ++k) {
            b_dag[k] = fermion_ladder(Species::Fermion, k, Ladder::Create, layout, ordering);
            b[k] = adjoint(b_dag[k]);
        }
        for (int k = 1; k <= cfg.n_antifermion; ++k) {
            d_dag[k] = fermion_ladder(Species::Antifermion, k, Ladder::Create, layout, ordering);
            d[k] = adjoint(d_dag[k]);
        }
        for (int n = 1; n <= cfg.n_boson; ++n) {
            // c_n = a_n / sqrt(n)
            c_dag[n] = Complex(1.0 / std::sqrt(static_cast<double>(n))) * boson_ladder(n, Ladder::Create, layout);
            c[n] = adjoint(c_dag[n]);
        }
    }
};

void add_scaled(PauliAccumulator<Complex>& acc, double coeff, const PauliOp& op) {
    for (auto t : op.terms()) {
        t.coefficient *= coeff;
        acc.add(t);
    }
}

/// acc += coeff * (f1 f2 ... fn), operator order preserved.
void add_product(PauliAccumulator<Complex>& acc, double coeff, std::initializer_list<const PauliOp*> factors) {
    if (coeff == 0.0) return;
    auto it = factors.begin();
    PauliOp prod = **it;
    for (++it; it != factors.end(); ++it) prod = product(prod, **it);
    add_scaled(acc, coeff, prod);
}

void build_mass(PauliAccumulator<Complex>& acc, const ModelParams& p, const QubitLayout& layout,
                const LadderSet& ops) {
    const ModeConfig& cfg = layout.config();
    const double g2 = p.include_inertias ? p.g() * p.g() : 0.0;
    const double mb2 = p.boson_mass * p.boson_mass;
    const double mf2 = p.fermion_mass * p.fermion_mass;
    auto inertia = [&](Inertia kind, int n) {
        return g2 == 0.0 ? 0.0 : g2 * self_inertia(kind, n, p.inertia_cutoff);
    };
    for (int n = 1; n <= cfg.n_boson; ++n) {
        // c_n^dag c_n = a^dag a / n, so scale back by n before the 1/n prefactor.
        add_product(acc, (mb2 + inertia(Inertia::Alpha, n)), {&ops.c_dag[n], &ops.c[n]});
    }
    for (int n = 1; n <= cfg.n_fermion; ++n) {
        add_product(acc, (mf2 + inertia(Inertia::Beta, n)) / n, {&ops.b_dag[n], &ops.b[n]});
    }
    for (int n = 1; n <= cfg.n_antifermion; ++n) {
        add_product(acc, (mf2 + inertia(Inertia::Gamma, n)) / n, {&ops.d_dag[n], &ops.d[n]});
    }
}

void build_vertex(PauliAccumulator<Complex>& acc, const ModelParams& p, const QubitLayout& layout,
                  const LadderSet& ops) {
    const ModeConfig& cfg = layout.config();
    const double scale = p.g() * p.fermion_mass;
    for (int l = 1; l <= cfg.n_boson; ++l) {
        for (int k = 1; k <= cfg.n_fermion; ++k) {
            for (int m = 1; m <= cfg.n_fermion; ++m) {
                const double w = scale * (bracket(k + l, -m) + bracket(k, l - m));
                add_product(acc, w, {&ops.b_dag[k], &ops.b[m], &ops.c_dag[l]});
                add_product(acc, w, {&ops.b_dag[m], &ops.b[k], &ops.c[l]});
            }
        }
        for (int k = 1; k <= cfg.n_antifermion; ++k) {
            for (int m = 1; m <= cfg.n_antifermion; ++m) {
                const double w = scale * (bracket(k + l, -m) + bracket(k, l - m));
                add_product(acc, w, {&ops.d_dag[k], &ops.d[m], &ops.c_dag[l]});
                add_product(acc, w, {&ops.d_dag[m], &ops.d[k], &ops.c[l]});
            }
        }
        for (int k = 1; k <= cfg.n_fermion; ++k) {
            for (int m = 1; m <= cfg.n_antifermion; ++m) {
                const double w = -scale * (bracket(k - l, m) + bracket(k, m - l));
                add_product(acc, w, {&ops.b[k], &ops.d[m], &ops.c_dag[l]});
                add_product(acc, w, {&ops.d_dag[m], &ops.b_dag[k], &ops.c[l]});
            }
        }
    }
}

void build_seagull(PauliAccumulator<Complex>& acc, const ModelParams& p, const QubitLayout& layout,
                   const LadderSet& ops) {
    const ModeConfig& cfg = layout.config();
    const double g2 = p.g() * p.g();
    for (int l = 1; l <= cfg.n_boson; ++l) {
        for (int n = 1; n <= cfg.n_boson; ++n) {
            for (int k = 1; k <= cfg.n_fermion; ++k) {
                for (int m = 1; m <= cfg.n_fermion; ++m) {
                    const double w = g2 * (bracket(k - n, l - m) + bracket(k + l, -m - n));
                    add_product(acc, w, {&ops.b_dag[k], &ops.b[m], &ops.c_dag[l], &ops.c[n]});
                }
            }
            for (int k = 1; k <= cfg.n_antifermion; ++k) {
                for (int m = 1; m <= cfg.n_antifermion; ++m) {
                    const double w = g2 * (bracket(k - n, l - m) + bracket(k + l, -m - n));
                    add_product(acc, w, {&ops.d_dag[k], &ops.d[m], &ops.c_dag[l], &ops.c[n]});
                }
            }
            for (int k = 1; k <= cfg.n_antifermion; ++k) {
                for (int m = 1; m <= cfg.n_fermion; ++m) {
                    const double w = g2 * bracket(l - k, n - m);
                    add_product(acc, w, {&ops.d[k], &ops.b[m], &ops.c_dag[l], &ops.c_dag[n]});
                    add_product(acc, w, {&ops.b_dag[m], &ops.d_dag[k], &ops.c[n], &ops.c[l]});
                }
            }
        }
    }
}

void build_fork(PauliAccumulator<Complex>& acc, const ModelParams& p, const QubitLayout& layout,
                const LadderSet& ops) {
    const ModeConfig& cfg = layout.config();
    const double g2 = p.g() * p.g();
    for (int l = 1; l <= cfg.n_boson; ++l) {
        for (int n = 1; n <= cfg.n_boson; ++n) {
            for (int k = 1; k <= cfg.n_fermion; ++k) {
                for (int m = 1; m <= cfg.n_fermion; ++m) {
                    const double w = g2 * bracket(k + l, n - m);
                    add_product(acc, w, {&ops.b_dag[k], &ops.b[m], &ops.c_dag[l], &ops.c_dag[n]});
                    add_product(acc, w, {&ops.b_dag[m], &ops.b[k], &ops.c[n], &ops.c[l]});
                }
            }
            for (int k = 1; k <= cfg.n_antifermion; ++k) {
                for (int m = 1; m <= cfg.n_antifermion; ++m) {
                    const double w = g2 * bracket(k + l, n - m);
                    add_product(acc, w, {&ops.d_dag[k], &ops.d[m], &ops.c_dag[l], &ops.c_dag[n]});
                    add_product(acc, w, {&ops.d_dag[m], &ops.d[k], &ops.c[n], &ops.c[l]});
                }
            }
            for (int k = 1; k <= cfg.n_fermion; ++k) {
                for (int m = 1; m <= cfg.n_antifermion; ++m) {
                    const double w = g2 * (bracket(k - n, m + l) + bracket(k + l, m - n));
                    add_product(acc, w, {&ops.b_dag[k], &ops.d_dag[m], &ops.c_dag[l], &ops.c[n]});
                    add_product(acc, w, {&ops.d[m], &ops.b[k], &ops.c_dag[n], &ops.c[l]});
                }
            }
        }
    }
}

void build_into(PauliAccumulator<Complex>& acc, Part part, const ModelParams& params, const QubitLayout& layout,
                const LadderSet& ops) {
    switch (part) {
        case Part::Mass: build_mass(acc, params, layout, ops); break;
        case Part::Vertex: build_vertex(acc, params, layout, ops); break;
        case Part::Seagull: build_seagull(acc, params, layout, ops); break;
        case Part::Fork: build_fork(acc, params, layout, ops); break;
    }
}

int largest_mode(const ModeConfig& c) { return std::max({c.n_fermion, c.n_antifermion, c.n_boson}); }

}  // namespace

PauliOp build_part(Part part, const ModelParams& params, const QubitLayout& layout) {
    params.validate(largest_mode(layout.config()));
    const LadderSet ops(layout, params.jw_ordering);
    PauliAccumulator<Complex> acc(layout.total_qubits());
    build_into(acc, part, params, layout, ops);
    return PauliOp::from_accumulator(std::move(acc));
}

PauliOp build_h(const ModelParams& params, const QubitLayout& layout, PartMask parts) {
    params.validate(largest_mode(layout.config()));
    const LadderSet ops(layout, params.jw_ordering);
    PauliAccumulator<Complex> acc(layout.total_qubits());
    for (Part part : kAllParts) {
        if (parts.contains(part)) build_into(acc, part, params, layout, ops);
    }
    return PauliOp::from_accumulator(std::move(acc));
}

PauliOp build_charge(Charge which, const QubitLayout& layout) {
    const ModeConfig& cfg = layout.config();
    PauliAccumulator<Complex> acc(layout.total_qubits());
    for (int n = 1; n <= cfg.n_fermion; ++n) {
        add_scaled(acc, which == Charge::K ? n : 1.0, fermion_number(Species::Fermion, n, layout));
    }
    for (int n = 1; n <= cfg.n_antifermion; ++n) {
        add_scaled(acc, which == Charge::K ? n : -1.0, fermion_number(Species::Antifermion, n, layout));
    }
    if (which == Charge::K) {
        for (int n = 1; n <= cfg.n_boson; ++n) add_scaled(acc, n, boson_number(n, layout));
    }
    return PauliOp::from_accumulator(std::move(acc));
}

}  // namespace dlcq
