// catalysis.hpp — partial-transpose certification, compatibility, canonical form,
// channel execution, sub-catalyses, the mutual-information ledger and recovery

#pragma once

#include "entropy.hpp"
#include "parallel.hpp"

#include <ctime>
#include <mutex>
#include <optional>

namespace catalyx {

// ---- channels ----

struct KrausChannel {
    std::vector<Mat> ops;
    long din = 0;
    long dout = 0;

    KrausChannel() = default;
    explicit KrausChannel(std::vector<Mat> k) : ops(std::move(k)) {
        if (ops.empty()) throw std::invalid_argument("KrausChannel: no operators");
        dout = ops[0].rows();
        din = ops[0].cols();
        for (const auto& m : ops)
            if (m.rows() != dout || m.cols() != din) throw std::invalid_argument("KrausChannel: inconsistent shapes");
    }

    double completeness_defect() const {
        Mat s = Mat::Zero(din, din);
        for (const auto& k : ops) s += k.adjoint() * k;
        return (s - Mat::Identity(din, din)).norm();
    }

    Mat apply(const Mat& rho) const {
        if (rho.rows() != din) throw std::invalid_argument("KrausChannel: input dimension mismatch");
        Mat out = Mat::Zero(dout, dout);
        for (const auto& k : ops) out += k * rho * k.adjoint();
        return out;
    }

    // (id_R (x) Phi) on a state of R (x) A with R leading.
    Mat apply_extended(const Mat& rho, long dr) const {
        if (rho.rows() != dr * din) throw std::invalid_argument("KrausChannel: extended input dimension mismatch");
        Mat id = Mat::Identity(dr, dr);
        Mat out = Mat::Zero(dr * dout, dr * dout);
        for (const auto& k : ops) {
            Mat kk = kron(id, k);
            out += kk * rho * kk.adjoint();
        }
        return out;
    }

    Mat adjoint_apply(const Mat& x) const {
        Mat out = Mat::Zero(din, din);
        for (const auto& k : ops) out += k.adjoint() * x * k;
        return out;
    }

    // Complementary channel output, [Phi^c(rho)]_jk = Tr(K_j rho K_k^dag).
    Mat complementary(const Mat& rho) const {
        const auto n = static_cast<Eigen::Index>(ops.size());
        Mat out(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k)
                out(j, k) = (ops[static_cast<std::size_t>(j)] * rho * ops[static_cast<std::size_t>(k)].adjoint()).trace();
        return out;
    }

    Mat complementary_adjoint(const Mat& x) const {
        Mat out = Mat::Zero(din, din);
        for (std::size_t j = 0; j < ops.size(); ++j)
            for (std::size_t k = 0; k < ops.size(); ++k)
                out += x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * ops[k].adjoint() * ops[j];
        return out;
    }
};

inline KrausChannel unitary_channel(const Mat& u) { return KrausChannel({u}); }

inline KrausChannel identity_channel(long d) { return KrausChannel({Mat(Mat::Identity(d, d))}); }

// Computational-basis dephasing, Kraus Z^k / sqrt d.
inline KrausChannel dephasing_channel(long d) {
    std::vector<Mat> ks;
    for (long k = 0; k < d; ++k) ks.push_back(clock(d, k) / std::sqrt(static_cast<double>(d)));
    return KrausChannel(std::move(ks));
}

// Replaces every input by 1/d.
inline KrausChannel replacer_channel(long d) {
    std::vector<Mat> ks;
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) {
            Mat k = Mat::Zero(d, d);
            k(i, j) = 1.0 / std::sqrt(static_cast<double>(d));
            ks.push_back(k);
        }
    return KrausChannel(std::move(ks));
}

// Uniform Weyl twirl. Same action as the replacer, with d^2 unitary Kraus operators.
inline KrausChannel depolarizing_channel(long d) {
    std::vector<Mat> ks;
    for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b) ks.push_back(weyl(d, a, b) / static_cast<double>(d));
    return KrausChannel(std::move(ks));
}

// Resets every input to |0>.
inline KrausChannel initialization_channel(long d) {
    std::vector<Mat> ks;
    for (long i = 0; i < d; ++i) {
        Mat k = Mat::Zero(d, d);
        k(0, i) = 1.0;
        ks.push_back(k);
    }
    return KrausChannel(std::move(ks));
}

// Haar Stinespring isometry A -> B (x) E, Kraus ops (1 (x) <e|) V.
inline KrausChannel random_channel(long din, long dout, long env, Rng& rng) {
    if (dout * env < din) throw std::invalid_argument("random_channel: environment too small for an isometry");
    Mat v = haar_unitary(dout * env, rng).leftCols(din);
    std::vector<Mat> ks;
    for (long e = 0; e < env; ++e) {
        Mat k(dout, din);
        for (long b = 0; b < dout; ++b) k.row(b) = v.row(b * env + e);
        ks.push_back(k);
    }
    return KrausChannel(std::move(ks));
}

// ---- instance ----

struct Certification {
    double defect = 0;
    double entropy_gap = 0;
    double max_deviation = 0;
    std::string timestamp;
    std::uint64_t seed = 0;
};

struct CatalysisInstance {
    UnitaryOperator U;                        // canonical: preserves sigma exactly
    DensityOperator sigma;
    SubsystemLayout layout_a;
    SubsystemLayout layout_b;
    std::optional<UnitaryOperator> canonical_V;  // empty when the input was already canonical
    bool classical = false;                   // catalyst acts only through a fixed basis
    Certification certification;

    long da() const { return layout_a.total(); }
    long db() const { return layout_b.total(); }
    std::vector<int> dims() const { return concat(layout_a, layout_b).dims; }
    std::vector<int> a_indices() const { return range_indices(0, static_cast<int>(layout_a.size())); }
    std::vector<int> b_indices() const {
        return range_indices(static_cast<int>(layout_a.size()), static_cast<int>(layout_a.size() + layout_b.size()));
    }
};

// Split U's layout into (A, B) given the catalyst layout occupying the trailing subsystems.
inline std::pair<SubsystemLayout, SubsystemLayout> split_layout(const SubsystemLayout& ul, const SubsystemLayout& bl) {
    if (bl.size() == 0 || bl.size() >= ul.size())
        throw std::invalid_argument("unitary layout must list the system subsystems followed by the catalyst's");
    const std::size_t na = ul.size() - bl.size();
    for (std::size_t i = 0; i < bl.size(); ++i)
        if (ul.dims[na + i] != bl.dims[i])
            throw std::invalid_argument("catalyst layout does not match trailing subsystems of the unitary");
    return {ul.subset(range_indices(0, static_cast<int>(na))), ul.subset(range_indices(static_cast<int>(na), static_cast<int>(ul.size())))};
}

// ---- partial transpose test ----

struct UnitarityVerdict {
    bool verdict;
    double defect;
};

inline UnitarityVerdict is_catalysis_unitary(const Mat& u, const std::vector<int>& dims, const std::vector<int>& a_side) {
    if (a_side.empty() || a_side.size() >= dims.size()) throw std::invalid_argument("is_catalysis_unitary: bad partition");
    Mat pt = partial_transpose(u, dims, a_side);
    double d = unitarity_defect(pt);
    return {d <= tol().unitary, d};
}

// A = every subsystem but the last.
inline UnitarityVerdict is_catalysis_unitary(const UnitaryOperator& u) {
    if (u.layout.size() < 2) throw std::invalid_argument("is_catalysis_unitary: layout needs at least two subsystems");
    return is_catalysis_unitary(u.matrix, u.layout.dims, range_indices(0, static_cast<int>(u.layout.size()) - 1));
}

inline UnitarityVerdict is_catalysis_unitary(const UnitaryOperator& u, const std::vector<int>& a_side) {
    return is_catalysis_unitary(u.matrix, u.layout.dims, a_side);
}

// ---- compatibility ----

inline Mat evolve(const Mat& u, const Mat& rho) { return u * rho * u.adjoint(); }

inline Mat catalyst_output(const Mat& u, long da, long db, const Mat& rho, const Mat& sigma) {
    Mat out = evolve(u, kron(rho, sigma));
    return partial_trace(out, {static_cast<int>(da), static_cast<int>(db)}, {1});
}

inline Mat system_output(const Mat& u, long da, long db, const Mat& rho, const Mat& sigma) {
    Mat out = evolve(u, kron(rho, sigma));
    return partial_trace(out, {static_cast<int>(da), static_cast<int>(db)}, {0});
}

struct CompatibilityVerdict {
    bool verdict;
    double entropy_gap;
};

inline constexpr double compatibility_tol = 1e-8;

inline CompatibilityVerdict check_compatibility(const UnitaryOperator& u, const DensityOperator& sigma) {
    auto [la, lb] = split_layout(u.layout, sigma.layout);
    auto pt = is_catalysis_unitary(u.matrix, u.layout.dims, range_indices(0, static_cast<int>(la.size())));
    if (!pt.verdict) throw std::invalid_argument("check_compatibility: U is not a catalysis unitary");
    Mat xi = catalyst_output(u.matrix, la.total(), lb.total(), maximally_mixed(la.total()), sigma.matrix);
    double gap = std::abs(von_neumann(xi) - von_neumann(sigma.matrix));
    return {gap <= compatibility_tol, gap};
}

// ---- sampling plan for "for all rho" checks ----

inline std::vector<Mat> sample_inputs(long d, int n_samples, Rng& rng) {
    std::vector<Mat> out;
    for (int k = 0; k < n_samples; ++k) {
        Vec v = haar_vector(d, rng);
        out.push_back(v * v.adjoint());
    }
    for (long k = 0; k < d; ++k) {
        Vec e = basis_vector(d, k);
        out.push_back(e * e.adjoint());
    }
    out.push_back(maximally_mixed(d));
    for (int k = 0; k < std::max(1, n_samples / 8); ++k) {
        std::uniform_int_distribution<int> rk(1, static_cast<int>(d));
        out.push_back(random_density(d, rk(rng), rng));
    }
    return out;
}

// Unitary V with V sigma V^dag = xi, block-matched by eigenvalue, closest to identity per block.
inline std::optional<Mat> spectral_match(const Mat& sigma, const Mat& xi, double group_tol) {
    auto ds = eigenspace_decompose(sigma, group_tol);
    auto dx = eigenspace_decompose(xi, group_tol);
    if (ds.eigenvalues.size() != dx.eigenvalues.size() || ds.kernel.cols() != dx.kernel.cols()) return std::nullopt;
    const double scale = std::max(1.0, ds.eigenvalues.empty() ? 1.0 : ds.eigenvalues[0]);
    for (std::size_t i = 0; i < ds.eigenvalues.size(); ++i)
        if (ds.multiplicities[i] != dx.multiplicities[i] ||
            std::abs(ds.eigenvalues[i] - dx.eigenvalues[i]) > std::max(1e-7, group_tol * 10) * scale)
            return std::nullopt;
    const long n = sigma.rows();
    Mat v = Mat::Zero(n, n);
    auto add_block = [&](const Mat& b, const Mat& c) {
        if (b.cols() == 0) return;
        Mat m = b.adjoint() * c;
        Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Mat w = svd.matrixV() * svd.matrixU().adjoint();
        v += c * w * b.adjoint();
    };
    for (std::size_t i = 0; i < ds.bases.size(); ++i) add_block(ds.bases[i], dx.bases[i]);
    add_block(ds.kernel, dx.kernel);
    return v;
}

struct ExhaustiveReport {
    double max_deviation;
    std::optional<UnitaryOperator> implied_V;
};

inline ExhaustiveReport verify_catalysis_exhaustive(const UnitaryOperator& u, const DensityOperator& sigma,
                                                    int n_samples = 64, std::uint64_t seed = 0) {
    auto [la, lb] = split_layout(u.layout, sigma.layout);
    const long da = la.total(), db = lb.total();
    Rng rng(seed);
    auto inputs = sample_inputs(da, n_samples, rng);
    Mat ref = catalyst_output(u.matrix, da, db, maximally_mixed(da), sigma.matrix);
    auto devs = parallel_map<double>(inputs.size(), [&](std::size_t i) {
        return trace_distance(catalyst_output(u.matrix, da, db, inputs[i], sigma.matrix), ref);
    });
    double m = *std::max_element(devs.begin(), devs.end());
    ExhaustiveReport r{m, std::nullopt};
    if (auto v = spectral_match(sigma.matrix, ref, tol().group)) r.implied_V = UnitaryOperator{*v, lb};
    return r;
}

// ---- canonical form ----

inline std::string utc_timestamp();

inline CatalysisInstance canonical_form(const UnitaryOperator& u, const DensityOperator& sigma, int n_samples = 64,
                                        std::uint64_t seed = 0) {
    auto [la, lb] = split_layout(u.layout, sigma.layout);
    auto pt = is_catalysis_unitary(u.matrix, u.layout.dims, range_indices(0, static_cast<int>(la.size())));
    if (!pt.verdict) throw std::invalid_argument("canonical_form: U is not a catalysis unitary");
    auto comp = check_compatibility(u, sigma);
    if (!comp.verdict) throw std::invalid_argument("canonical_form: U is not compatible with sigma");
    auto ex = verify_catalysis_exhaustive(u, sigma, n_samples, seed);
    if (ex.max_deviation > tol().state) throw std::invalid_argument("canonical_form: catalyst output depends on the input");
    if (!ex.implied_V) throw std::invalid_argument("canonical_form: catalyst spectrum not preserved");
    const long da = la.total(), db = lb.total();
    Mat v = ex.implied_V->matrix;
    const bool identity = (v - Mat::Identity(db, db)).norm() <= tol().unitary;
    Mat uc = identity ? u.matrix : Mat(kron(Mat::Identity(da, da), v.adjoint()) * u.matrix);

    CatalysisInstance inst;
    inst.U = UnitaryOperator{uc, u.layout};
    inst.sigma = sigma;
    inst.layout_a = la;
    inst.layout_b = lb;
    if (!identity) inst.canonical_V = UnitaryOperator{v, lb};
    inst.certification.defect = pt.defect;
    inst.certification.entropy_gap = comp.entropy_gap;
    inst.certification.max_deviation = ex.max_deviation;
    inst.certification.seed = seed;
    inst.certification.timestamp = utc_timestamp();

    // post: canonical unitary returns sigma itself
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (const auto& rho : sample_inputs(da, 8, rng))
        if (trace_distance(catalyst_output(uc, da, db, rho, sigma.matrix), sigma.matrix) > tol().state)
            throw std::runtime_error("canonical_form: canonicalized unitary does not preserve sigma");
    return inst;
}

inline CatalysisInstance canonical_form(const Mat& u, const SubsystemLayout& ul, const Mat& sigma,
                                        const SubsystemLayout& sl, int n_samples = 64, std::uint64_t seed = 0) {
    return canonical_form(make_unitary(u, ul), make_density(sigma, sl), n_samples, seed);
}

// ---- execution ----

inline DensityOperator implement_channel(const CatalysisInstance& inst, const DensityOperator& rho) {
    if (rho.matrix.rows() != inst.da()) throw std::invalid_argument("implement_channel: dimension mismatch");
    Mat out = system_output(inst.U.matrix, inst.da(), inst.db(), rho.matrix, inst.sigma.matrix);
    return DensityOperator{0.5 * (out + out.adjoint()), inst.layout_a};
}

inline Mat implement_channel(const CatalysisInstance& inst, const Mat& rho) {
    return implement_channel(inst, DensityOperator{rho, inst.layout_a}).matrix;
}

// Merge Kraus operators that are exact multiples of each other.
inline std::vector<Mat> merge_parallel(const std::vector<Mat>& ks, double eps = 1e-12) {
    std::vector<Mat> dirs;
    std::vector<double> weight;
    for (const auto& k : ks) {
        double n = k.norm();
        if (n < eps) continue;
        Mat u = k / n;
        bool merged = false;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            cd ov = (dirs[i].adjoint() * u).trace();
            if (std::abs(std::abs(ov) - 1.0) < 1e-10) {
                weight[i] += n * n;
                merged = true;
                break;
            }
        }
        if (!merged) {
            dirs.push_back(u);
            weight.push_back(n * n);
        }
    }
    std::vector<Mat> out;
    for (std::size_t i = 0; i < dirs.size(); ++i) out.push_back(std::sqrt(weight[i]) * dirs[i]);
    return out;
}

inline KrausChannel channel_to_kraus(const CatalysisInstance& inst) {
    const long da = inst.da(), db = inst.db();
    auto sp = spectrum(inst.sigma.matrix);
    std::vector<Mat> ks;
    for (long k = 0; k < db; ++k) {
        double p = sp.values(k);
        if (p < tol().psd) continue;
        Mat in = kron(Mat::Identity(da, da), Mat(sp.vectors.col(k)));
        for (long b = 0; b < db; ++b) {
            Mat out = kron(Mat::Identity(da, da), Mat(basis_vector(db, b).adjoint()));
            ks.push_back(std::sqrt(p) * out * inst.U.matrix * in);
        }
    }
    return KrausChannel(merge_parallel(ks));
}

// ---- sub-catalyses ----

struct SubCatalysis {
    double weight;
    CatalysisInstance instance;
    Mat projector;   // Pi_i on B
    Mat basis;       // isometry from the block into B
};

inline std::vector<SubCatalysis> decompose_subcatalyses(const CatalysisInstance& inst) {
    const long da = inst.da(), db = inst.db();
    std::vector<Mat> bases;
    std::vector<double> weights;
    if (inst.classical) {
        for (long x = 0; x < db; ++x) {
            double p = inst.sigma.matrix(x, x).real();
            if (p < tol().psd) continue;
            bases.push_back(Mat(basis_vector(db, x)));
            weights.push_back(p);
        }
    } else {
        auto dec = eigenspace_decompose(inst.sigma.matrix, tol().group);
        for (std::size_t i = 0; i < dec.bases.size(); ++i) {
            bases.push_back(dec.bases[i]);
            weights.push_back(dec.eigenvalues[i] * dec.multiplicities[i]);
        }
    }
    std::vector<SubCatalysis> out;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        Mat proj = bases[i] * bases[i].adjoint();
        Mat p = kron(Mat::Identity(da, da), proj);
        double comm = (inst.U.matrix * p - p * inst.U.matrix).norm();
        if (comm > tol().unitary)
            throw std::invalid_argument("decompose_subcatalyses: U does not commute with eigenprojector " + std::to_string(i));
        Mat iso = kron(Mat::Identity(da, da), bases[i]);
        Mat ui = iso.adjoint() * inst.U.matrix * iso;
        const int ri = static_cast<int>(bases[i].cols());
        SubsystemLayout lb({ri});
        SubCatalysis sc;
        sc.weight = weights[i];
        sc.projector = proj;
        sc.basis = bases[i];
        sc.instance.U = UnitaryOperator{ui, concat(inst.layout_a, lb)};
        sc.instance.sigma = DensityOperator{maximally_mixed(ri), lb};
        sc.instance.layout_a = inst.layout_a;
        sc.instance.layout_b = lb;
        sc.instance.classical = inst.classical;
        sc.instance.certification.defect = unitarity_defect(ui);
        out.push_back(std::move(sc));
    }
    return out;
}

// ---- classical catalysis ----

inline CatalysisInstance classical_catalysis(const std::vector<double>& probs, const std::vector<Mat>& unitaries,
                                             const SubsystemLayout& la = {}) {
    if (probs.empty() || probs.size() != unitaries.size())
        throw std::invalid_argument("classical_catalysis: probabilities and unitaries must match");
    double s = 0;
    for (double p : probs) {
        if (p < 0) throw std::invalid_argument("classical_catalysis: negative probability");
        s += p;
    }
    if (std::abs(s - 1.0) > tol().norm) throw std::invalid_argument("classical_catalysis: probabilities do not sum to 1");
    const long da = unitaries[0].rows();
    const long db = static_cast<long>(probs.size());
    Mat u = Mat::Zero(da * db, da * db);
    Mat sigma = Mat::Zero(db, db);
    for (long x = 0; x < db; ++x) {
        const Mat& ux = unitaries[static_cast<std::size_t>(x)];
        if (ux.rows() != da || unitarity_defect(ux) > tol().unitary)
            throw std::invalid_argument("classical_catalysis: operator " + std::to_string(x) + " is not a unitary on A");
        Mat px = Mat::Zero(db, db);
        px(x, x) = 1.0;
        u += kron(ux, px);
        sigma(x, x) = probs[static_cast<std::size_t>(x)];
    }
    CatalysisInstance inst;
    inst.layout_a = la.size() ? la : SubsystemLayout({static_cast<int>(da)});
    inst.layout_b = SubsystemLayout({static_cast<int>(db)});
    inst.U = UnitaryOperator{u, concat(inst.layout_a, inst.layout_b)};
    inst.sigma = DensityOperator{sigma, inst.layout_b};
    inst.classical = true;
    inst.certification.defect = is_catalysis_unitary(u, inst.dims(), inst.a_indices()).defect;
    inst.certification.timestamp = utc_timestamp();
    return inst;
}

// ---- ledger ----

struct LedgerRecord {
    double I_before = 0;
    double I_after = 0;
    double S_in = 0;
    double S_out = 0;
    double residual = 0;
};

inline constexpr double ledger_tol = 1e-8;

// Every ledger computation in the process reports here.
class LedgerAudit {
public:
    void record(double residual) {
        std::lock_guard<std::mutex> g(m_);
        ++count_;
        max_ = std::max(max_, residual);
    }
    long count() const {
        std::lock_guard<std::mutex> g(m_);
        return count_;
    }
    double max_residual() const {
        std::lock_guard<std::mutex> g(m_);
        return max_;
    }
    void reset() {
        std::lock_guard<std::mutex> g(m_);
        count_ = 0;
        max_ = 0;
    }

private:
    mutable std::mutex m_;
    long count_ = 0;
    double max_ = 0;
};

inline LedgerAudit& ledger_audit() {
    static LedgerAudit a;
    return a;
}

inline LedgerRecord finish_record(LedgerRecord r) {
    r.residual = std::abs((r.I_after - r.I_before) - (r.S_out - r.S_in));
    ledger_audit().record(r.residual);
    return r;
}

struct Transition {
    LedgerRecord record;
    Mat tau_a1a2;   // output intermediate on A1 (x) A2
    Mat output;     // full output on A1 (x) A2 (x) B
};

// U acts on A1 (x) A2 (x) B; input rho_{A1} (x) sigma_{A2 B}.
inline Transition execute_transition(const Mat& u, const std::vector<int>& a1, const std::vector<int>& a2,
                                     const std::vector<int>& b, const Mat& sigma_a2b, const Mat& rho_a1) {
    std::vector<int> dims = a1;
    dims.insert(dims.end(), a2.begin(), a2.end());
    dims.insert(dims.end(), b.begin(), b.end());
    const int n1 = static_cast<int>(a1.size()), n2 = static_cast<int>(a2.size()), nb = static_cast<int>(b.size());
    if (u.rows() != detail::total(dims)) throw std::invalid_argument("ledger: unitary does not match layout");
    if (rho_a1.rows() != detail::total(a1) || sigma_a2b.rows() != detail::total(a2) * detail::total(b))
        throw std::invalid_argument("ledger: state dimensions do not match layout");
    auto ia1 = range_indices(0, n1);
    auto ia2 = range_indices(n1, n1 + n2);
    auto ib = range_indices(n1 + n2, n1 + n2 + nb);
    std::vector<int> ia = ia1;
    ia.insert(ia.end(), ia2.begin(), ia2.end());

    Mat before = kron(rho_a1, sigma_a2b);
    Mat after = evolve(u, before);
    Mat sb_before = partial_trace(before, dims, ib);
    Mat sb_after = partial_trace(after, dims, ib);
    if (trace_distance(sb_before, sb_after) > tol().state)
        throw std::invalid_argument("ledger: catalyst altered, transition is not a catalysis");

    LedgerRecord r;
    std::vector<int> b_local = range_indices(n2, n2 + nb);
    std::vector<int> a2_local = range_indices(0, n2);
    std::vector<int> a2b_dims = a2;
    a2b_dims.insert(a2b_dims.end(), b.begin(), b.end());
    r.I_before = n2 == 0 ? 0.0 : mutual_information(sigma_a2b, a2b_dims, a2_local, b_local);
    r.I_after = mutual_information(after, dims, ia, ib);
    r.S_in = von_neumann(rho_a1) + (n2 == 0 ? 0.0 : von_neumann(partial_trace(sigma_a2b, a2b_dims, a2_local)));
    Mat tau = partial_trace(after, dims, ia);
    r.S_out = von_neumann(tau);
    return {finish_record(r), tau, after};
}

inline LedgerRecord ledger(const Mat& u, const std::vector<int>& a1, const std::vector<int>& a2,
                           const std::vector<int>& b, const Mat& sigma_a2b, const Mat& rho_a1) {
    return execute_transition(u, a1, a2, b, sigma_a2b, rho_a1).record;
}

inline LedgerRecord ledger(const CatalysisInstance& inst, const Mat& rho) {
    return ledger(inst.U.matrix, inst.layout_a.dims, {}, inst.layout_b.dims, inst.sigma.matrix, rho);
}

// Same accounting on global pure states; subsystems outside a1, a2, b act as purifiers.
inline LedgerRecord ledger_pure(const Vec& before, const Vec& after, const std::vector<int>& dims,
                                const std::vector<int>& a1, const std::vector<int>& a2, const std::vector<int>& b) {
    std::vector<int> a2b = a2;
    a2b.insert(a2b.end(), b.begin(), b.end());
    if (pure_mutual_information(before, dims, a1, a2b) > 1e-9)
        throw std::invalid_argument("ledger: input is correlated with the intermediate");
    Mat b0 = reduced_density(before, dims, b);
    Mat b1 = reduced_density(after, dims, b);
    if (trace_distance(b0, b1) > tol().state) throw std::invalid_argument("ledger: catalyst altered, transition is not a catalysis");
    std::vector<int> a = a1;
    a.insert(a.end(), a2.begin(), a2.end());
    LedgerRecord r;
    r.I_before = a2.empty() ? 0.0 : pure_mutual_information(before, dims, a2, b);
    r.I_after = pure_mutual_information(after, dims, a, b);
    r.S_in = pure_marginal_entropy(before, dims, a1) + (a2.empty() ? 0.0 : pure_marginal_entropy(before, dims, a2));
    r.S_out = pure_marginal_entropy(after, dims, a);
    return finish_record(r);
}

// ---- cost bound ----

struct CostBound {
    double lhs;
    double rhs;
    bool ok;
};

inline Mat maximally_entangled(long d) {
    Vec g = gamma_vector(d) / std::sqrt(static_cast<double>(d));
    return g * g.adjoint();
}

inline CostBound cost_bound_check(const CatalysisInstance& inst, const KrausChannel& phi, int n_samples, std::uint64_t seed) {
    const long d = inst.da();
    Rng rng(seed);
    std::vector<Mat> inputs{maximally_entangled(d)};
    for (int k = 0; k < n_samples; ++k) {
        Vec v = haar_vector(d * d, rng);
        inputs.push_back(v * v.adjoint());
    }
    auto vals = parallel_map<double>(inputs.size(), [&](std::size_t i) {
        return std::abs(von_neumann(phi.apply_extended(inputs[i], d)) - von_neumann(inputs[i]));
    });
    double m = *std::max_element(vals.begin(), vals.end());
    double factor = inst.classical ? 1.0 : 0.5;
    double lhs = von_neumann(inst.sigma.matrix);
    double rhs = factor * m;
    return {lhs, rhs, lhs + 1e-9 >= rhs};
}

inline CostBound cost_bound_check(const CatalysisInstance& inst, int n_samples = 64, std::uint64_t seed = 0) {
    return cost_bound_check(inst, channel_to_kraus(inst), n_samples, seed);
}

// ---- recovery ----

// U_{AC}^{T_B}: the canonical unitary transposed on the catalyst, read as acting on A (x) C.
inline UnitaryOperator recovery_unitary(const CatalysisInstance& inst) {
    auto sp = spectrum(inst.sigma.matrix);
    if (sp.values.size() > 0 && sp.values(sp.values.size() - 1) < tol().psd)
        throw std::invalid_argument("recovery_unitary: sigma must have full support");
    Mat r = partial_transpose(inst.U.matrix, inst.dims(), inst.b_indices());
    SubsystemLayout lc = inst.layout_b;
    lc.labels.assign(lc.size(), "C");
    return UnitaryOperator{r, concat(inst.layout_a, lc)};
}

// ---- misc ----

inline std::string utc_timestamp() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace catalyx
