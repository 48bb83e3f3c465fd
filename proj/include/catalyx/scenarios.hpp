// scenarios.hpp — end-to-end protocol runs: refuelling, depletion, absorption,
// conservation law and free-randomness accounting

#pragma once

#include "constructions.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace catalyx {

struct ScenarioStep {
    std::string actor;
    std::string operation;
    LedgerRecord ledger;
    std::map<std::string, double> marginals;
};

struct ScenarioTrace {
    std::string name;
    std::vector<ScenarioStep> steps;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config;
    std::vector<std::string> notes;

    const ScenarioStep& last() const {
        if (steps.empty()) throw std::logic_error("ScenarioTrace: no steps");
        return steps.back();
    }
};

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// One row per step: actor, operation, dS, dI, residual, then every marginal key seen in the trace.
inline std::string to_csv(const ScenarioTrace& t) {
    std::vector<std::string> keys;
    for (const auto& s : t.steps)
        for (const auto& [k, v] : s.marginals)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::ostringstream os;
    os << "step,actor,operation,dS,dI,residual";
    for (const auto& k : keys) os << ',' << k;
    os << '\n';
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& s = t.steps[i];
        os << i << ',' << s.actor << ',' << s.operation << ',' << format_g12(s.ledger.S_out - s.ledger.S_in) << ','
           << format_g12(s.ledger.I_after - s.ledger.I_before) << ',' << format_g12(s.ledger.residual);
        for (const auto& k : keys) {
            os << ',';
            auto it = s.marginals.find(k);
            if (it != s.marginals.end()) os << format_g12(it->second);
        }
        os << '\n';
    }
    return os.str();
}

// ---- multi-party refuelling ----

// Pure-state dimension limit for the refuelling dilation.
inline constexpr long refuel_dimension_cap = 1L << 16;

namespace detail {

inline std::vector<int> append(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace detail

// Turns alternate A, B, A, ... Subsystem 0 is the catalyst C, 1 its purifier, then one d^2 register per turn.
inline ScenarioTrace multiparty_refuel(int d, int rounds, std::uint64_t seed = 0) {
    if (d < 2) throw std::invalid_argument("multiparty_refuel: d must be >= 2");
    if (rounds < 2) throw std::invalid_argument("multiparty_refuel: rounds must be >= 2");
    ScenarioTrace tr;
    tr.name = "multiparty";
    tr.seed = seed;
    tr.config = {{"d", std::to_string(d)}, {"rounds", std::to_string(rounds)}};

    const int n = d * d;
    long total = static_cast<long>(d) * d;
    int turns = 0;
    while (turns < rounds && total * n <= refuel_dimension_cap) {
        total *= n;
        ++turns;
    }
    if (turns < rounds)
        tr.notes.push_back("truncated to " + std::to_string(turns) + " turns: pure-state dimension cap " +
                           std::to_string(refuel_dimension_cap));

    const Mat u = multiparty_unitary(d).matrix;
    std::vector<int> dims{d, d};
    Vec psi = gamma_vector(d) / std::sqrt(static_cast<double>(d));
    Vec plus = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    std::vector<int> regs_a, regs_b;
    const std::vector<int> c{0};

    for (int t = 0; t < turns; ++t) {
        const bool is_a = t % 2 == 0;
        auto& mine = is_a ? regs_a : regs_b;
        const int fresh = static_cast<int>(dims.size());
        Vec before = kronv(psi, plus);
        dims.push_back(n);
        Vec after = apply_local(before, dims, u, {fresh, 0});

        ScenarioStep st;
        st.actor = is_a ? "A" : "B";
        st.operation = "dephase fresh register " + std::to_string(fresh);
        st.ledger = ledger_pure(before, after, dims, {fresh}, mine, c);
        mine.push_back(fresh);
        psi = after;

        const double ia = regs_a.empty() ? 0.0 : pure_mutual_information(psi, dims, regs_a, c);
        const double ib = regs_b.empty() ? 0.0 : pure_mutual_information(psi, dims, regs_b, c);
        const double sc = pure_marginal_entropy(psi, dims, c);
        st.marginals["I(A:C)"] = ia;
        st.marginals["I(B:C)"] = ib;
        st.marginals["S(C)"] = sc;
        st.marginals["mono_slack"] = 2 * sc - ia - ib;
        st.marginals["catalyst_dist"] = trace_distance(reduced_density(psi, dims, c), maximally_mixed(d));
        if (!regs_a.empty()) {
            auto keep = detail::append(regs_a, c);
            Mat tau = reduced_density(psi, dims, keep);
            st.marginals["tau_AC_dist"] = trace_distance(tau, maximally_mixed(tau.rows()));
        }
        // the agent that just acted owns the depletion; the idle one must be refuelled
        st.marginals["I(idle:C)"] = is_a ? ib : ia;
        tr.steps.push_back(std::move(st));
    }
    return tr;
}

// Turns A, B, A with a classical catalyst controlling Z^c on every register. B's turn leaves c untouched,
// so A's two uses share the same phase. Returns the trace distance of A's two registers from the product
// of dephased outputs.
inline double classical_refuel_deviation(int d) {
    const long n = static_cast<long>(d) * d;
    Vec plus = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    Mat rho = plus * plus.adjoint();
    Mat joint = Mat::Zero(n * n, n * n);
    for (long c = 0; c < n; ++c) {
        Mat z = clock(n, c);
        Mat one = z * rho * z.adjoint();
        joint += kron(one, one) / static_cast<double>(n);
    }
    Mat d1 = dephase(rho);
    return trace_distance(joint, kron(d1, d1));
}

// Quantum counterpart: turns A, B, A through multiparty_unitary with C purified by C'.
inline double quantum_refuel_deviation(int d) {
    const int n = d * d;
    const std::vector<int> dims{d, d, n, n, n};
    Vec plus = Vec::Ones(n) / std::sqrt(static_cast<double>(n));
    Vec psi = kronv(kronv(kronv(gamma_vector(d) / std::sqrt(static_cast<double>(d)), plus), plus), plus);
    const Mat u = multiparty_unitary(d).matrix;
    for (int reg : {2, 3, 4}) psi = apply_local(psi, dims, u, {reg, 0});
    Mat joint = reduced_density(psi, dims, {2, 4});
    Mat d1 = dephase(Mat(plus * plus.adjoint()));
    return trace_distance(joint, kron(d1, d1));
}

// ---- conservation law on 4-partite pure states ----

struct ConservationReport {
    double max_residual = 0;   // max |2S(Y) - I(X:Y) - I(Y:WZ)|
    double min_slack = 0;      // min 2S(Y) - I(X:Y) - I(Y:Z), never negative
    int samples = 0;
};

// Subsystems ordered W, X, Y, Z.
inline ConservationReport conservation_terms(const Vec& xi, const std::vector<int>& dims, ConservationReport r = {}) {
    const double sy = pure_marginal_entropy(xi, dims, {2});
    const double ixy = pure_mutual_information(xi, dims, {1}, {2});
    const double iywz = pure_mutual_information(xi, dims, {2}, {0, 3});
    const double iyz = pure_mutual_information(xi, dims, {2}, {3});
    const double res = std::abs(2 * sy - ixy - iywz);
    const double slack = 2 * sy - ixy - iyz;
    if (r.samples == 0 || res > r.max_residual) r.max_residual = res;
    if (r.samples == 0 || slack < r.min_slack) r.min_slack = slack;
    ++r.samples;
    return r;
}

inline ConservationReport conservation_law_check(std::uint64_t seed, int n_samples, std::vector<int> dims = {2, 2, 2, 2}) {
    if (dims.size() != 4) throw std::invalid_argument("conservation_law_check: need four subsystems");
    for (int x : dims)
        if (x < 1 || x > 3) throw std::invalid_argument("conservation_law_check: factor dimensions must be in 1..3");
    Rng rng(seed);
    ConservationReport r;
    for (int k = 0; k < n_samples; ++k) r = conservation_terms(haar_vector(detail::total(dims), rng), dims, r);
    return r;
}

// ---- depletion ----

inline double saturation_bound(double sg1, double sg2, double s_diamond) { return sg1 + sg2 - s_diamond; }

// Map used twice with catalyst 1/d: the Weyl-twirl erasure for odd d, the d^2-dim Weyl dephasing otherwise.
inline CatalysisInstance depletion_instance(int d) { return d % 2 ? erasure_catalysis(d) : multiparty_catalysis(d); }

// Layout: R1, A1, R2, A2, C, C'. Each use starts from a maximally entangled R_i A_i.
inline ScenarioTrace depletion_demo(int d, std::uint64_t seed = 0) {
    if (d < 2) throw std::invalid_argument("depletion_demo: d must be >= 2");
    auto inst = depletion_instance(d);
    const int da = static_cast<int>(inst.da());
    const int db = static_cast<int>(inst.db());
    ScenarioTrace tr;
    tr.name = "depletion";
    tr.seed = seed;
    tr.config = {{"d", std::to_string(d)}, {"map", d % 2 ? "erasure" : "weyl dephasing"}};

    const std::vector<int> dims{da, da, da, da, db, db};
    const Vec phi = gamma_vector(da) / std::sqrt(static_cast<double>(da));
    const Vec cat = purify(inst.sigma).amplitudes;
    Vec psi = kronv(kronv(phi, phi), cat);

    const double s_diamond = catalytic_entropy(eigenspace_decompose(inst.sigma.matrix, tol().group));
    // global production of each use on its optimal input equals the output entropy of R_i A_i
    double sg = 0;
    for (int use = 0; use < 2; ++use) {
        const int a = 2 * use + 1;
        Vec after = apply_local(psi, dims, inst.U.matrix, {a, 4});
        ScenarioStep st;
        st.actor = "A";
        st.operation = use == 0 ? "first use" : "second use, correlated intermediate";
        const std::vector<int> mine{a - 1, a};
        const std::vector<int> prior = use == 0 ? std::vector<int>{} : std::vector<int>{0, 1};
        st.ledger = ledger_pure(psi, after, dims, mine, prior, {4});
        psi = after;
        const double prod = pure_marginal_entropy(psi, dims, mine);
        if (use == 0) sg = prod;
        st.marginals["production"] = prod;
        st.marginals["I(A1:C)"] = pure_mutual_information(psi, dims, {0, 1}, {4});
        st.marginals["catalyst_dist"] = trace_distance(reduced_density(psi, dims, {4}), inst.sigma.matrix);
        if (use == 1) {
            st.marginals["I(A1:A2)"] = pure_mutual_information(psi, dims, {0, 1}, {2, 3});
            st.marginals["bound"] = saturation_bound(sg, sg, s_diamond);
        }
        st.marginals["S_diamond"] = s_diamond;
        tr.steps.push_back(std::move(st));
    }
    return tr;
}

// ---- entropy absorption ----

struct AbsorptionReport {
    double max_local_decrease = 0;
    double min_global_increase_at_max = 0;
    bool ok = false;
};

// (Phi (x) id) on a state of A (x) C with A leading.
inline Mat apply_first(const KrausChannel& phi, const Mat& rho, long dc) {
    Mat id = Mat::Identity(dc, dc);
    Mat out = Mat::Zero(phi.dout * dc, phi.dout * dc);
    for (const auto& k : phi.ops) {
        Mat kk = kron(k, id);
        out += kk * rho * kk.adjoint();
    }
    return out;
}

inline AbsorptionReport absorption_check(const KrausChannel& phi, int n_samples, std::uint64_t seed) {
    const long d = phi.din;
    Rng rng(seed);
    std::vector<Mat> gammas{maximally_mixed(d)};
    for (long i = 0; i < d; ++i) gammas.push_back(Mat(basis_vector(d, i) * basis_vector(d, i).adjoint()));
    std::uniform_int_distribution<int> rank(1, static_cast<int>(d));
    for (int k = 0; k < n_samples; ++k) gammas.push_back(random_density(d, rank(rng), rng));

    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        const double dec = von_neumann(gammas[i]) - von_neumann(phi.apply(gammas[i]));
        if (dec > best + 1e-12) {
            best = dec;
            arg = i;
        }
    }
    auto pur = purify(DensityOperator{gammas[arg], SubsystemLayout({static_cast<int>(d)})});
    Mat full = pur.amplitudes * pur.amplitudes.adjoint();
    const double inc = von_neumann(apply_first(phi, full, d));
    return {best, inc, inc >= best - 1e-7};
}

// ---- free randomness in a classically correlated intermediate ----

inline double free_bits(const Mat& sigma_a2b, const std::vector<int>& dims) {
    return 2 * von_neumann(partial_trace(sigma_a2b, dims, {1})) - mutual_information(sigma_a2b, dims, {0}, {1});
}

struct FreeRandomness {
    double free_bits = 0;
    double free_bits_uncorrelated = 0;
    double max_output_deviation = 0;     // erased output vs 1/d
    double max_catalyst_deviation = 0;   // B marginal vs 1/d
    double max_residual = 0;
    int samples = 0;
};

// A1, A2, B each of dim d: record A1 into B with a controlled shift, then pad A1 with A2.
inline Mat cq_erasure_unitary(int d) {
    const std::vector<int> dims{d, d, d};
    Mat ctrl = Mat::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (long a = 0; a < d; ++a) {
        Mat p = Mat::Zero(d, d);
        p(a, a) = 1.0;
        ctrl += kron(p, shift(d, a));
    }
    Mat record = embed(ctrl, dims, {0, 2});
    Mat pad = Mat::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (long i = 0; i < d; ++i) {
        Mat p = Mat::Zero(d, d);
        p(i, i) = 1.0;
        pad += kron(shift(d, i), p);
    }
    return embed(pad, dims, {0, 1}) * record;
}

inline Mat classical_correlated(int d) {
    Mat s = Mat::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (long i = 0; i < d; ++i) s(i * d + i, i * d + i) = 1.0 / d;
    return s;
}

inline FreeRandomness cq_free_randomness(int d, int n_samples = 20, std::uint64_t seed = 0) {
    if (d < 2) throw std::invalid_argument("cq_free_randomness: d must be >= 2");
    const Mat sigma = classical_correlated(d);
    FreeRandomness r;
    r.free_bits = free_bits(sigma, {d, d});
    r.free_bits_uncorrelated = free_bits(kron(maximally_mixed(d), maximally_mixed(d)), {d, d});
    const Mat u = cq_erasure_unitary(d);
    Rng rng(seed);
    std::vector<Mat> inputs;
    Vec plus = Vec::Ones(d) / std::sqrt(static_cast<double>(d));
    inputs.push_back(plus * plus.adjoint());
    for (int k = 0; k < n_samples; ++k) inputs.push_back(random_density(d, 1 + k % d, rng));
    for (const auto& rho : inputs) {
        auto t = execute_transition(u, {d}, {d}, {d}, sigma, rho);
        Mat out = partial_trace(t.output, {d, d, d}, {0});
        Mat b = partial_trace(t.output, {d, d, d}, {2});
        r.max_output_deviation = std::max(r.max_output_deviation, trace_distance(out, maximally_mixed(d)));
        r.max_catalyst_deviation = std::max(r.max_catalyst_deviation, trace_distance(b, maximally_mixed(d)));
        r.max_residual = std::max(r.max_residual, t.record.residual);
        ++r.samples;
    }
    return r;
}

// ---- initialization with a correlated intermediate ----

inline ScenarioTrace initialization_scenario(int d, std::uint64_t seed = 0) {
    auto g = initialization_classical(d);
    ScenarioTrace tr;
    tr.name = "initialization";
    tr.seed = seed;
    tr.config = {{"d", std::to_string(d)}};
    const Mat ground = basis_vector(d, 0) * basis_vector(d, 0).adjoint();

    auto record = [&](const std::string& op, const Mat& rho, bool with_reference) {
        ScenarioStep st;
        st.actor = "A";
        st.operation = op;
        const double i_before = mutual_information(g.sigma, {d, d}, {0}, {1});
        if (!with_reference) {
            auto t = execute_transition(g.U, {d}, {d}, {d}, g.sigma, rho);
            st.ledger = t.record;
            const std::vector<int> dims{d, d, d};
            st.marginals["S(A)_in"] = von_neumann(rho);
            st.marginals["S(A)_out"] = von_neumann(partial_trace(t.output, dims, {0}));
            st.marginals["ground_dist"] = trace_distance(partial_trace(t.output, dims, {0}), ground);
            st.marginals["catalyst_dist"] = trace_distance(partial_trace(t.output, dims, {2}), maximally_mixed(d));
            st.marginals["I(A':B)_before"] = i_before;
            st.marginals["I(A':B)_after"] = mutual_information(t.output, dims, {1}, {2});
        } else {
            Mat u = kron(Mat(Mat::Identity(d, d)), g.U);
            auto t = execute_transition(u, {d, d}, {d}, {d}, g.sigma, rho);
            st.ledger = t.record;
            const std::vector<int> dims{d, d, d, d};
            st.marginals["S(RA)_in"] = von_neumann(rho);
            st.marginals["S(RA)_out"] = von_neumann(partial_trace(t.output, dims, {0, 1}));
            st.marginals["ground_dist"] = trace_distance(partial_trace(t.output, dims, {1}), ground);
            st.marginals["catalyst_dist"] = trace_distance(partial_trace(t.output, dims, {3}), maximally_mixed(d));
            st.marginals["I(A':B)_before"] = i_before;
            st.marginals["I(A':B)_after"] = mutual_information(t.output, dims, {2}, {3});
        }
        tr.steps.push_back(std::move(st));
    };

    Rng rng(seed);
    record("maximally mixed input", maximally_mixed(d), false);
    Vec v = haar_vector(d, rng);
    record("pure input", Mat(v * v.adjoint()), false);
    record("maximally entangled with R", maximally_entangled(d), true);
    return tr;
}

}  // namespace catalyx
