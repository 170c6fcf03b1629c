// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit code 1
// if any fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dlcq/diagnostics.hpp"
#include "dlcq/evolve.hpp"
#include "dlcq/hamiltonian.hpp"
#include "dlcq/ladder.hpp"
#include "dlcq/scenario.hpp"
#include "fock_oracle.hpp"

using namespace dlcq;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[192];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

ModelParams params(double lambda, bool inertias = false) {
    ModelParams p;
    p.coupling = lambda;
    p.include_inertias = inertias;
    return p;
}

double prob(const Statevector& psi, BasisIndex i) { return std::norm(psi(static_cast<Eigen::Index>(i))); }

// ---- 1 ----

struct Factor {
    char l0, l1;
    Complex c0, c1;
};

PauliOp expand(const std::vector<Factor>& fs, double w) {
    std::vector<PauliTerm> out;
    for (unsigned pick = 0; pick < (1u << fs.size()); ++pick) {
        std::string s;
        Complex c = w;
        for (std::size_t q = 0; q < fs.size(); ++q) {
            const bool second = (pick >> q) & 1u;
            s += second ? fs[q].l1 : fs[q].l0;
            c *= second ? fs[q].c1 : fs[q].c0;
        }
        out.push_back(PauliTerm::parse(s, c));
    }
    return canonicalize(out);
}

Outcome bosonic_mapping() {
    const Complex i1(0.0, 1.0);
    const Factor sm{'X', 'Y', 0.5, -0.5 * i1}, sp{'X', 'Y', 0.5, 0.5 * i1};
    const Factor ip{'I', 'Z', 0.5, 0.5}, im{'I', 'Z', 0.5, -0.5};
    const std::vector<std::vector<Factor>> rows{{ip, ip, sm}, {ip, sm, sp}, {ip, im, sm}, {sm, sp, sp},
                                                {im, ip, sm}, {im, sm, sp}, {im, im, sm}};
    PauliOp want = expand(rows[0], 1.0);
    for (std::size_t l = 1; l < rows.size(); ++l) want = want + expand(rows[l], std::sqrt(double(l + 1)));
    const PauliOp got = boson_ladder_local(7, Ladder::Create);
    Outcome o;
    o.check(got.size() == want.size(), std::to_string(got.size()) + " terms vs " + std::to_string(want.size()));
    double err = 0;
    bool letters = got.size() == want.size();
    for (std::size_t i = 0; letters && i < got.size(); ++i) {
        letters = got.terms()[i].same_letters(want.terms()[i]);
        err = std::max(err, std::abs(got.terms()[i].coefficient - want.terms()[i].coefficient));
    }
    o.check(letters, "letters match");
    o.check(err <= 1e-12, fmt("max coefficient error %.1e", err));
    return o;
}

// ---- 2 ----

Outcome ladder_oracle() {
    Outcome o;
    for (int m : {1, 3, 7, 15}) {
        Eigen::MatrixXcd def = Eigen::MatrixXcd::Zero(m + 1, m + 1);
        for (int l = 0; l < m; ++l) def(l + 1, l) = std::sqrt(double(l + 1));
        const Eigen::MatrixXcd ad = to_matrix(boson_ladder_local(m, Ladder::Create));
        const Eigen::MatrixXcd a = to_matrix(boson_ladder_local(m, Ladder::Annihilate));
        Eigen::MatrixXcd comm_want = Eigen::MatrixXcd::Identity(m + 1, m + 1);
        comm_want(m, m) -= double(m + 1);
        const double e1 = (ad - def).cwiseAbs().maxCoeff();
        const double e2 = (a - def.adjoint()).cwiseAbs().maxCoeff();
        const double e3 = (a * ad - ad * a - comm_want).cwiseAbs().maxCoeff();
        const double e4 = (to_matrix(commutator(boson_ladder_local(m, Ladder::Annihilate),
                                                boson_ladder_local(m, Ladder::Create))) - comm_want)
                              .cwiseAbs()
                              .maxCoeff();
        const double worst = std::max({e1, e2, e3, e4});
        o.check(worst <= 1e-10, "m=" + std::to_string(m) + fmt(" err %.1e", worst));
    }
    return o;
}

// ---- 3 ----

std::vector<std::vector<BasisIndex>> sectors(const QubitLayout& lay) {
    const ModeConfig& c = lay.config();
    int k_max = (c.n_fermion * (c.n_fermion + 1) + c.n_antifermion * (c.n_antifermion + 1)) / 2;
    for (int n = 1; n <= c.n_boson; ++n) k_max += n * c.modals[static_cast<std::size_t>(n - 1)];
    std::vector<std::vector<BasisIndex>> out;
    for (int k = 0; k <= k_max; ++k)
        for (int q = -c.n_antifermion; q <= c.n_fermion; ++q) {
            auto s = sector_indices(lay, k, q);
            if (!s.empty()) out.push_back(std::move(s));
        }
    return out;
}

Outcome dual_construction() {
    Outcome o;
    for (int n = 1; n <= 4; ++n) {
        const ModeConfig cfg = ModeConfig::uniform(n, 3);
        const QubitLayout lay(cfg);
        const auto secs = sectors(lay);
        double worst = 0;
        int checked = 0;
        for (double lambda : {0.0, 1.0, 4.0})
            for (bool inertia : {false, true}) {
                const ModelParams p = params(lambda, inertia);
                const PauliOp h = build_h(p, lay);
                const auto mono = oracle::hamiltonian(p, cfg);
                for (const auto& sec : secs) {
                    if (sec.size() > 200) continue;
                    std::vector<FockState> basis;
                    for (BasisIndex i : sec) basis.push_back(decode(i, lay));
                    const Eigen::MatrixXcd got = restrict_to(h, sec);
                    const Eigen::MatrixXd want = oracle::matrix(mono, basis, cfg);
                    worst = std::max(worst, (got - want.cast<Complex>()).cwiseAbs().maxCoeff());
                    ++checked;
                }
            }
        o.check(worst <= 1e-9, "N=" + std::to_string(n) + ": " + std::to_string(checked) + " sector blocks" +
                                   fmt(", max diff %.1e", worst));
    }
    return o;
}

// ---- 4 ----

Outcome conservation() {
    Outcome o;
    for (int n = 1; n <= 3; ++n) {
        const QubitLayout lay(ModeConfig::uniform(n, 3));
        double worst = 0;
        for (bool inertia : {false, true}) {
            const PauliOp h = build_h(params(4.0, inertia), lay);
            for (Charge c : {Charge::K, Charge::Q}) {
                const PauliOp comm = commutator(h, build_charge(c, lay), 0.0);
                for (const auto& t : comm.terms()) worst = std::max(worst, std::abs(t.coefficient));
            }
        }
        o.check(worst <= 1e-10, "N=" + std::to_string(n) + fmt(" max |[H, K or Q]| coefficient %.1e", worst));
    }
    // unrestricted exact evolution, no sector given
    const QubitLayout lay(ModeConfig::uniform(3, 3));
    const PauliOp h = build_h(params(4.0), lay);
    double leak = 0;
    for (const char* init : {"010 000 00 00 00", "100 100 00 00 00", "000 000 00 01 00", "011 000 01 00 00",
                             "001 010 10 00 00"}) {
        const BasisIndex i0 = parse_bitstring(init, lay);
        const auto [k0, q0] = charges_of(i0, lay);
        for (double t : {0.1, 0.5, 1.0}) {
            const Leakage l = leakage(exact_evolve(h, basis_state(lay.total_qubits(), i0), t), k0, q0, lay);
            leak = std::max({leak, l.k, l.q});
        }
    }
    o.check(leak <= 1e-10, fmt("exact-evolution leakage %.1e", leak));
    return o;
}

// ---- 5 ----

Outcome rabi_reproduction() {
    Outcome o;
    const ScenarioConfig cfg = parse_config(json{{"scenario", "rabi"}});
    const QubitLayout lay(cfg.modes());
    const PauliOp h = build_h(cfg.params, lay);
    const BasisIndex f2 = parse_bitstring("010 000 00 00 00", lay);
    const BasisIndex f1b1 = parse_bitstring("100 000 01 00 00", lay);

    // closed-form two-level curve from the occupation-number matrix
    const std::vector<FockState> pair{decode(f2, lay), decode(f1b1, lay)};
    const Eigen::MatrixXd blk = oracle::matrix(oracle::hamiltonian(cfg.params, cfg.modes()), pair, cfg.modes());
    const double v2 = blk(0, 1) * blk(0, 1);
    const double half_gap = (blk(1, 1) - blk(0, 0)) / 2;
    const double omega = std::sqrt(v2 + half_gap * half_gap);
    auto rabi = [&](double t) { return v2 / (omega * omega) * std::pow(std::sin(omega * t), 2); };

    const RunResult run = run_scenario(cfg);
    double curve_err = 0, peak = -1, peak_t = 0;
    bool rising = true;
    for (const auto& row : run.rows) {
        curve_err = std::max(curve_err, std::abs(row.record.transition - rabi(row.record.time)));
        // first maximum of the oscillation on the grid
        if (rising && row.record.transition >= peak) {
            peak = row.record.transition;
            peak_t = row.record.time;
        } else {
            rising = false;
        }
    }
    double outside = 0;
    for (double t : {0.1, 0.2, 0.5, 1.0}) {
        const Statevector psi = exact_evolve(h, basis_state(lay.total_qubits(), f2), t);
        outside = std::max(outside, 1.0 - prob(psi, f2) - prob(psi, f1b1));
    }
    o.check(sector_indices(lay, 2, 1).size() == 2 && outside <= 1e-10,
            fmt("probability outside the two states %.1e", outside));
    o.check(curve_err <= 1e-8, fmt("max deviation from two-level formula %.1e", curve_err));
    o.check(std::abs(peak - 0.25) <= 0.05, fmt("first peak transition %.4f (want 0.25 +- 0.05)", peak));
    o.check(std::abs(peak_t - 0.2) <= 0.03, fmt("peak time %.2f (want 0.20 +- 0.03)", peak_t));
    const double first_peak_t = std::numbers::pi / (2 * omega);
    o.detail += fmt("; |V| = %.4f, detuning = %.4f, first maximum at t = %.4f", std::sqrt(v2), 2 * half_gap, first_peak_t);
    return o;
}

// ---- 6 ----

Outcome trotter_reproduction() {
    Outcome o;
    const QubitLayout lay(ModeConfig::uniform(3, 3));
    const PauliOp h = build_h(params(4.0), lay);
    const BasisIndex f2 = parse_bitstring("010 000 00 00 00", lay);
    const BasisIndex f1b1 = parse_bitstring("100 000 01 00 00", lay);
    const Statevector psi0 = basis_state(lay.total_qubits(), f2);
    const double exact = prob(exact_evolve(h, psi0, 0.2, sector_indices(lay, 2, 1)), f1b1);
    std::vector<double> dev;
    double min_allowed = 1;
    double p10 = 0;
    for (int n = 5; n <= 10; ++n) {
        const Statevector psi = trotter_evolve(make_plan(h, 0.2, n), psi0);
        const double p = prob(psi, f1b1);
        dev.push_back(std::abs(p - exact));
        if (n >= 7) min_allowed = std::min(min_allowed, p + prob(psi, f2));
        if (n == 10) p10 = p;
    }
    const double rel = std::abs(p10 - exact) / exact;
    o.check(rel <= 0.05, fmt("n_T=10 transition %.5f vs exact %.5f, relative deviation %.1f%%", p10, exact, 100 * rel));
    o.check(min_allowed >= 0.999, fmt("n_T>=7 probability on the two allowed states >= %.5f", min_allowed));
    bool monotone = true;
    for (std::size_t i = 1; i < dev.size(); ++i) monotone = monotone && dev[i] <= dev[i - 1] + 1e-6;
    o.check(monotone, fmt("deviation non-increasing over n_T=5..10 (%.2e down to %.2e)", dev.front(), dev.back()));
    return o;
}

// ---- 7 ----

Outcome coupling_sweep() {
    Outcome o;
    const ScenarioConfig cfg = parse_config(json{{"scenario", "coupling-sweep"}});
    const QubitLayout lay(cfg.modes());
    const int nq = lay.total_qubits();
    const double t = cfg.evolution.times.at(0);
    const int steps = *cfg.evolution.n_steps;
    const int shots = cfg.shots;
    std::vector<BasisIndex> idx;
    for (const auto& s : cfg.initial_states) idx.push_back(encode(s.resolve(lay), lay));
    const BasisIndex angel = idx[0], f2 = idx[1], d2 = idx[2];

    double angel_worst = 0, angel_exact_worst = 0, fd_exact = 0, fd_trotter = 0;
    bool fd_sampled = true;
    std::string sampled_note;
    std::vector<double> f2_trotter, f2_exact;
    std::uint64_t seed = cfg.seed;
    for (double lambda : cfg.sweep.at("coupling")) {
        ModelParams p = cfg.params;
        p.coupling = lambda;
        const PauliOp h = build_h(p, lay);
        const TrotterPlan plan = make_plan(h, t, steps);
        auto survive = [&](BasisIndex i, bool exact) {
            const Statevector psi0 = basis_state(nq, i);
            const auto [k, q] = charges_of(i, lay);
            return exact ? prob(exact_evolve(h, psi0, t, sector_indices(lay, k, q)), i)
                         : prob(trotter_evolve(plan, psi0), i);
        };
        angel_worst = std::max(angel_worst, std::abs(1.0 - survive(angel, false)));
        angel_exact_worst = std::max(angel_exact_worst, std::abs(1.0 - survive(angel, true)));
        const double sf = survive(f2, true), sd = survive(d2, true);
        fd_exact = std::max(fd_exact, std::abs(sf - sd));
        f2_exact.push_back(sf);

        const Statevector pf = trotter_evolve(plan, basis_state(nq, f2));
        const Statevector pd = trotter_evolve(plan, basis_state(nq, d2));
        const double tf = prob(pf, f2), td = prob(pd, d2);
        fd_trotter = std::max(fd_trotter, std::abs(tf - td));
        f2_trotter.push_back(tf);
        const auto cf = sample_counts(pf, shots, ++seed);
        const auto cd = sample_counts(pd, shots, ++seed);
        const double hf = cf.count(f2) ? cf.at(f2) / double(shots) : 0.0;
        const double hd = cd.count(d2) ? cd.at(d2) / double(shots) : 0.0;
        const double pbar = (hf + hd) / 2;
        const double sigma = std::sqrt(std::max(2 * pbar * (1 - pbar) / shots, 1.0 / (shots * double(shots))));
        if (std::abs(hf - hd) > 2 * sigma) {
            fd_sampled = false;
            sampled_note += fmt(" lambda=%.0f: %.4f vs %.4f", lambda, hf, hd);
        }
    }
    o.check(angel_worst <= 1e-6, fmt("angel-state Trotter survival within %.1e of 1 (exact evolution: %.1e)",
                                     angel_worst, angel_exact_worst));
    o.check(fd_exact <= 1e-6, fmt("f2 / fbar2 exact survival differ by at most %.1e", fd_exact));
    o.check(fd_sampled, "f2 / fbar2 sampled survival within 2 sigma at " + std::to_string(shots) + " shots" + sampled_note);
    o.check(f2_trotter[0] > f2_trotter[2],
            fmt("f2 Trotter survival lambda=1 %.5f > lambda=3 %.5f", f2_trotter[0], f2_trotter[2]));
    o.detail += fmt(" (exact: %.5f vs %.5f", f2_exact[0], f2_exact[2]) +
                fmt("; f2 / fbar2 Trotter statevector differ by %.1e)", fd_trotter);
    return o;
}

// ---- 8 ----

Outcome pp_collision() {
    Outcome o;
    const ScenarioConfig cfg = parse_config(json{{"scenario", "pp-collision"}});
    const RunResult run = run_scenario(cfg);
    double best = -1, best_t = 0, lk1 = 0, lq1 = 0, lk4 = 0, lq4 = 0, p0 = 1, p1 = 0;
    for (const auto& row : run.rows) {
        const auto& r = row.record;
        if (r.transition > best) {
            best = r.transition;
            best_t = r.time;
        }
        if (std::abs(r.time) < 1e-12) p0 = r.transition;
        if (std::abs(r.time - 0.005) < 1e-12) p1 = r.transition;
        if (std::abs(r.time - 0.1) < 1e-9) {
            lk1 = r.leak_k;
            lq1 = r.leak_q;
        }
        if (std::abs(r.time - 0.4) < 1e-9) {
            lk4 = r.leak_k;
            lq4 = r.leak_q;
        }
    }
    o.check(p0 == 0.0 && p1 > p0, fmt("transition starts at %.1e and rises to %.2e after one step", p0, p1));
    o.check(best_t >= 0.05 - 1e-9 && best_t <= 0.2 + 1e-9, fmt("maximum %.4f at t = %.3f", best, best_t));
    o.check(lk4 > lk1, fmt("leak_K %.2e at t=0.1, %.2e at t=0.4", lk1, lk4));
    o.check(lq4 > lq1, fmt("leak_Q %.2e at t=0.1, %.2e at t=0.4", lq1, lq4));
    o.detail += "; " + std::to_string(run.manifest["points"][0]["qubits"].get<int>()) + " qubits, " +
                std::to_string(run.manifest["points"][0]["states"][0]["target_states"].get<int>()) + " target states";
    return o;
}

// ---- 9 ----

Outcome hardware_minimal() {
    Outcome o;
    const ScenarioConfig sampled = parse_config(json{{"scenario", "hardware-minimal"}});
    ScenarioConfig exact_readout = sampled;
    exact_readout.shots = 0;
    const RunResult sv = run_scenario(exact_readout);
    const RunResult sh = run_scenario(sampled);
    auto trotter_p = [](const RunResult& r, const std::string& point) {
        for (const auto& row : r.rows)
            if (row.point == point && row.method == Method::Trotter) return row.record.transition;
        return std::numeric_limits<double>::quiet_NaN();
    };
    struct Want {
        const char* point;
        double value, tol;
    };
    for (const Want& w : {Want{"coupling=1", 0.28, 0.03}, Want{"coupling=4", 0.60, 0.05}}) {
        const double p = trotter_p(sv, w.point);
        const double s = trotter_p(sh, w.point);
        const double sigma = std::sqrt(p * (1 - p) / sampled.shots);
        o.check(std::abs(p - w.value) <= w.tol, std::string(w.point) + fmt(" statevector %.4f (want %.2f)", p, w.value));
        o.check(std::abs(s - w.value) <= w.tol + 3 * sigma, std::string(w.point) + fmt(" sampled %.4f", s));
    }
    return o;
}

// ---- 10 ----

Outcome cost_ratio() {
    Outcome o;
    const QubitLayout lay(ModeConfig::uniform(3, 3));
    const PauliOp h = build_h(params(4.0), lay);
    const PlanCost c1 = plan_cost(make_plan(h, 0.2, 1, 1));
    const PlanCost c2 = plan_cost(make_plan(h, 0.2, 1, 2));
    const double ratio = double(c2.rotations_total) / double(c1.rotations_total);
    o.check(ratio >= 1.8 && ratio <= 2.0, fmt("rotations per step %.0f vs %.0f, ratio %.4f", double(c2.rotations_total),
                                              double(c1.rotations_total), ratio));
    return o;
}

// ---- 11 ----

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "dlcq_acceptance_determinism";
    std::filesystem::remove_all(dir);
    for (const char* name : {"hardware-minimal", "rabi", "trotter-study"}) {
        json doc{{"scenario", name}};
        if (std::string(name) == "trotter-study") doc["sweep"] = {{"n_steps", {3, 10}}};
        std::string csv[2], manifest[2];
        for (int run = 0; run < 2; ++run) {
            const ScenarioConfig c = parse_config(doc);
            const auto [cp, mp] = write_outputs(run_scenario(c), (dir / (std::string(name) + std::to_string(run))).string());
            csv[run] = slurp(cp);
            manifest[run] = slurp(mp);
        }
        const bool same_manifest = json::parse(manifest[0]).at("points") == json::parse(manifest[1]).at("points");
        o.check(!csv[0].empty() && csv[0] == csv[1] && same_manifest,
                std::string(name) + ": " + std::to_string(csv[0].size()) + " CSV bytes identical");
    }
    std::filesystem::remove_all(dir);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all{
        {1, "bosonic mapping exactness", bosonic_mapping},
        {2, "ladder-oracle equivalence", ladder_oracle},
        {3, "dual Hamiltonian construction", dual_construction},
        {4, "conservation", conservation},
        {5, "two-level oscillation (N=3, lambda=4)", rabi_reproduction},
        {6, "Trotter convergence at t=0.2", trotter_reproduction},
        {7, "coupling sweep properties (N=4)", coupling_sweep},
        {8, "pp collision (N=5, lambda=13.315)", pp_collision},
        {9, "hardware-minimal numbers", hardware_minimal},
        {10, "order-2 / order-1 cost ratio", cost_ratio},
        {11, "determinism", determinism},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s: %s (%.1f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
