// constructions.hpp — explicit catalysis unitaries and optimal catalysts

#pragma once

#include "catalysis.hpp"

#include <numeric>

namespace catalyx {

inline constexpr long dimension_cap = 4096;
inline constexpr long extraction_register_cap = 64;

inline void check_dimension(long n, const char* what) {
    if (n > dimension_cap)
        throw std::invalid_argument(std::string(what) + ": total dimension " + std::to_string(n) + " exceeds cap " +
                                    std::to_string(dimension_cap));
}

// Certification data for an instance whose unitary already preserves sigma.
inline CatalysisInstance certified_instance(const Mat& u, const Mat& sigma, const SubsystemLayout& la,
                                            const SubsystemLayout& lb, bool classical = false, int n_samples = 8) {
    CatalysisInstance inst;
    inst.layout_a = la;
    inst.layout_b = lb;
    inst.U = UnitaryOperator{u, concat(la, lb)};
    inst.sigma = DensityOperator{sigma, lb};
    inst.classical = classical;
    inst.certification.defect = is_catalysis_unitary(u, inst.dims(), inst.a_indices()).defect;
    if (inst.certification.defect > tol().unitary) throw std::runtime_error("construction failed the partial transpose test");
    Mat xi = catalyst_output(u, la.total(), lb.total(), maximally_mixed(la.total()), sigma);
    inst.certification.entropy_gap = std::abs(von_neumann(xi) - von_neumann(sigma));
    inst.certification.max_deviation = verify_catalysis_exhaustive(inst.U, inst.sigma, n_samples, 0).max_deviation;
    inst.certification.timestamp = utc_timestamp();
    return inst;
}

// ---- dephasing from a degeneracy vector ----

inline Mat conserved_optimal_catalyst(const DegeneracyVector& r) {
    const long n = r.sum();
    const double n2 = static_cast<double>(r.norm2sq());
    Mat s = Mat::Zero(n, n);
    long k = 0;
    for (int ri : r.r)
        for (int j = 0; j < ri; ++j, ++k) s(k, k) = ri / n2;
    return s;
}

inline Mat dephasing_unitary(const DegeneracyVector& r) {
    const long N = r.norm2sq();
    const long db = r.sum();
    check_dimension(N * db, "dephasing_catalysis");
    Mat w = Mat::Zero(N * db, N * db);
    long offset = 0;  // S_m
    long base = 0;    // first catalyst index of block m
    for (int rm : r.r) {
        const double norm = 1.0 / std::sqrt(static_cast<double>(rm));
        for (int i = 0; i < rm; ++i)
            for (int j = 0; j < rm; ++j) {
                const cd phase = root_of_unity(rm, static_cast<long>(i) * j) * norm;
                const long k = offset + static_cast<long>(i) * rm + j;
                for (long a = 0; a < N; ++a) w(a * db + base + i, a * db + base + j) += phase * root_of_unity(N, a * k);
            }
        // W is a direct sum over catalyst eigenblocks; check each W_m on its own
        std::vector<long> idx;
        for (long a = 0; a < N; ++a)
            for (int i = 0; i < rm; ++i) idx.push_back(a * db + base + i);
        Mat wm(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
        for (std::size_t x = 0; x < idx.size(); ++x)
            for (std::size_t y = 0; y < idx.size(); ++y) wm(static_cast<long>(x), static_cast<long>(y)) = w(idx[x], idx[y]);
        if (unitarity_defect(wm) > tol().unitary) throw std::runtime_error("dephasing_catalysis: block unitary check failed");
        offset += static_cast<long>(rm) * rm;
        base += rm;
    }
    return w;
}

inline CatalysisInstance dephasing_catalysis(const DegeneracyVector& r) {
    const int N = static_cast<int>(r.norm2sq());
    const int db = static_cast<int>(r.sum());
    return certified_instance(dephasing_unitary(r), conserved_optimal_catalyst(r), SubsystemLayout({N}, {"A"}),
                              SubsystemLayout({db}, {"B"}));
}

inline Mat dephase(const Mat& rho) { return Mat(rho.diagonal().asDiagonal()); }

// ---- maximal extraction ----

struct ExtractionCatalysis {
    CatalysisInstance inst;
    StateVector input;   // Psi on A (x) E, A = A1 (x) A2
    long R = 0;
    long n = 0;
};

inline ExtractionCatalysis max_extraction_catalysis(const DensityOperator& sigma) {
    auto dec = eigenspace_decompose(sigma.matrix, tol().group);
    const long n = static_cast<long>(dec.eigenvalues.size());
    long R = 1;
    for (int r : dec.multiplicities) R = std::lcm(R, static_cast<long>(r) * r);
    if (R > extraction_register_cap)
        throw std::invalid_argument("max_extraction_catalysis: register size R = " + std::to_string(R) +
                                    " exceeds cap " + std::to_string(extraction_register_cap) + "; use a catalyst with smaller eigenspaces");
    const long db = sigma.matrix.rows();
    const long da = n * R;
    check_dimension(da * db, "max_extraction_catalysis");

    Mat u = Mat::Zero(da * db, da * db);
    for (long i = 0; i < n; ++i) {
        const long ri = dec.multiplicities[static_cast<std::size_t>(i)];
        const long block = R / (ri * ri);
        const Mat& basis = dec.bases[static_cast<std::size_t>(i)];
        Mat vi = clock(n, i);
        for (long a = 0; a < ri; ++a)
            for (long b = 0; b < ri; ++b) {
                const long j = a * ri + b;
                Mat p = Mat::Zero(R, R);
                for (long t = j * block; t < (j + 1) * block; ++t) p(t, t) = 1.0;
                Mat w = basis * weyl(ri, a, b) * basis.adjoint();
                u += kron(kron(vi, p), w);
            }
    }
    if (dec.kernel.cols() > 0) u += kron(Mat(Mat::Identity(da, da)), Mat(dec.kernel * dec.kernel.adjoint()));

    ExtractionCatalysis out;
    out.n = n;
    out.R = R;
    out.inst = certified_instance(u, sigma.matrix, SubsystemLayout({static_cast<int>(n), static_cast<int>(R)}, {"A1", "A2"}),
                                  SubsystemLayout({static_cast<int>(db)}, {"B"}));
    Vec psi = gamma_vector(da) / std::sqrt(static_cast<double>(da));
    out.input = StateVector{psi, SubsystemLayout({static_cast<int>(n), static_cast<int>(R), static_cast<int>(da)}, {"A1", "A2", "E"})};
    return out;
}

// Output of (Phi (x) id_E) on the companion state, A leading.
inline Mat extraction_output(const ExtractionCatalysis& ex) {
    const long da = ex.inst.da();
    auto k = channel_to_kraus(ex.inst);
    Mat in = ex.input.amplitudes * ex.input.amplitudes.adjoint();
    // input is ordered A (x) E; apply Phi on the leading factor
    Mat out = Mat::Zero(da * da, da * da);
    Mat id = Mat::Identity(da, da);
    for (const auto& op : k.ops) {
        Mat kk = kron(op, id);
        out += kk * in * kk.adjoint();
    }
    return out;
}

// ---- generalized transitions ----

// A unitary on A1 (x) A2 (x) B meant to act on rho_{A1} (x) sigma_{A2 B}.
struct GeneralizedCatalysis {
    Mat U;
    SubsystemLayout layout;          // full ordered layout
    std::vector<int> a1, a2, b;      // subsystem indices of each role
    Mat sigma;                       // intermediate on A2 (x) B, in layout order
    std::vector<int> pt_cut;         // subsystems whose partial transpose keeps U unitary
};

inline Mat permutation_unitary(const std::vector<int>& dims, const std::vector<int>& perm) {
    const long n = detail::total(dims);
    auto p = permutation_map(dims, perm);
    Mat u = Mat::Zero(n, n);
    for (long i = 0; i < n; ++i) u(p[static_cast<std::size_t>(i)], i) = 1.0;
    return u;
}

inline GeneralizedCatalysis initialization_classical(int d) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("initialization_classical: d must be odd and >= 3");
    const long n = static_cast<long>(d) * d * d;
    check_dimension(n, "initialization_classical");
    auto idx = [d](long a, long b, long c) { return (a * d + b) * d + c; };
    auto md = [d](long x) { return ((x % d) + d) % d; };
    Mat u = Mat::Zero(n, n);
    for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j)
            for (long k = 0; k < d; ++k) u(idx(j, md(i + j + k), k), idx(md(i + 2 * k), i, md(i + j))) += 1.0;
    if (unitarity_defect(u) > tol().unitary) throw std::runtime_error("initialization_classical: not unitary");
    Mat sigma = Mat::Zero(static_cast<long>(d) * d, static_cast<long>(d) * d);
    for (long i = 0; i < d; ++i) sigma(i * d + i, i * d + i) = 1.0 / d;
    return {u, SubsystemLayout({d, d, d}, {"A", "A'", "B"}), {0}, {1}, {2}, sigma, {1}};
}

inline GeneralizedCatalysis initialization_masking(int m) {
    if (m < 2) throw std::invalid_argument("initialization_masking: m must be >= 2");
    // subsystems: A = (Ax, Ay), A1, A2, B2, B1
    const std::vector<int> dims{m, m, m, m, m, m};
    const long n = detail::total(dims);
    check_dimension(n, "initialization_masking");
    // swap (Ax, Ay) <-> (A2, B2)
    Mat s1 = permutation_unitary(dims, {3, 4, 2, 0, 1, 5});
    // mask A2 with B1: controlled shift X^k on A2 for B1 = k
    Mat ctrl = Mat::Zero(static_cast<long>(m) * m, static_cast<long>(m) * m);
    for (long k = 0; k < m; ++k) {
        Mat p = Mat::Zero(m, m);
        p(k, k) = 1.0;
        ctrl += kron(shift(m, k), p);
    }
    Mat s2 = embed(ctrl, dims, {3, 5});
    // mask B2 with A1: exchange the two registers
    Mat s3 = permutation_unitary(dims, {0, 1, 4, 3, 2, 5});
    Mat u = s3 * s2 * s1;
    Vec psi = gamma_vector(m) / std::sqrt(static_cast<double>(m));
    Mat sigma = kron(kron(maximally_mixed(m), Mat(psi * psi.adjoint())), maximally_mixed(m));
    GeneralizedCatalysis g{u, SubsystemLayout(dims, {"Ax", "Ay", "A1", "A2", "B2", "B1"}), {0, 1}, {2, 3}, {4, 5}, sigma, {}};
    // record a cut under which the partial transpose stays unitary, if any
    for (int mask = 1; mask < (1 << 6) - 1; ++mask) {
        std::vector<int> cut;
        for (int s = 0; s < 6; ++s)
            if (mask & (1 << s)) cut.push_back(s);
        if (unitarity_defect(partial_transpose(u, dims, cut)) <= tol().unitary) {
            g.pt_cut = cut;
            break;
        }
    }
    return g;
}

// ---- double random unitary ----

inline CatalysisInstance double_random(int d, const std::vector<Mat>& us, const std::vector<Mat>& vs) {
    if (static_cast<int>(us.size()) != d || static_cast<int>(vs.size()) != d)
        throw std::invalid_argument("double_random: need exactly d unitaries in each list");
    const long da = us[0].rows();
    for (std::size_t x = 0; x < us.size(); ++x)
        for (std::size_t y = 0; y < vs.size(); ++y)
            if ((us[x] * vs[y] - vs[y] * us[x]).norm() > tol().unitary)
                throw std::invalid_argument("double_random: U_" + std::to_string(x) + " and V_" + std::to_string(y) +
                                            " do not commute");
    Mat f = fourier_matrix(d);
    Mat first = Mat::Zero(da * d, da * d), second = Mat::Zero(da * d, da * d);
    for (long x = 0; x < d; ++x) {
        Mat px = Mat::Zero(d, d);
        px(x, x) = 1.0;
        first += kron(us[static_cast<std::size_t>(x)], px);
        Vec fy = f.col(x);
        second += kron(vs[static_cast<std::size_t>(x)], Mat(fy * fy.adjoint()));
    }
    return certified_instance(second * first, maximally_mixed(d), SubsystemLayout({static_cast<int>(da)}, {"A"}),
                              SubsystemLayout({d}, {"B"}));
}

// Pr(Y = y | X = x) = |<y~|x>|^2 for the Fourier second stage.
inline Eigen::MatrixXd double_random_conditional(int d) {
    Mat f = fourier_matrix(d);
    Eigen::MatrixXd p(d, d);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) p(x, y) = std::norm(f(x, y));
    return p;
}

// ---- multiparty ----

inline std::vector<Mat> weyl_set(long d) {
    std::vector<Mat> out;
    for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b) out.push_back(weyl(d, a, b));
    return out;
}

inline UnitaryOperator multiparty_unitary(int d) {
    if (d < 2) throw std::invalid_argument("multiparty_unitary: d must be >= 2");
    const long n = static_cast<long>(d) * d;
    check_dimension(n * d, "multiparty_unitary");
    auto ws = weyl_set(d);
    Mat u = Mat::Zero(n * d, n * d);
    for (long i = 0; i < n; ++i) {
        Mat p = Mat::Zero(n, n);
        p(i, i) = 1.0;
        u += kron(p, ws[static_cast<std::size_t>(i)]);
    }
    return UnitaryOperator{u, SubsystemLayout({static_cast<int>(n), d}, {"A", "C"})};
}

inline CatalysisInstance multiparty_catalysis(int d) {
    auto u = multiparty_unitary(d);
    return certified_instance(u.matrix, maximally_mixed(d), SubsystemLayout({d * d}, {"A"}), SubsystemLayout({d}, {"C"}));
}

// ---- erasure (odd d) ----

// sum_{c,c'} X^{c+c'} Z^{2c+c'} (x) |c><c'| / sqrt(d): replaces any input by 1/d using catalyst 1/d.
inline Mat erasure_unitary(int d) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("erasure_unitary: d must be odd and >= 3");
    const long n = static_cast<long>(d) * d;
    Mat u = Mat::Zero(n, n);
    for (long c = 0; c < d; ++c)
        for (long cp = 0; cp < d; ++cp) {
            Mat e = Mat::Zero(d, d);
            e(c, cp) = 1.0;
            u += kron(weyl(d, c + cp, 2 * c + cp), e);
        }
    return u / std::sqrt(static_cast<double>(d));
}

inline CatalysisInstance erasure_catalysis(int d) {
    return certified_instance(erasure_unitary(d), maximally_mixed(d), SubsystemLayout({d}, {"A"}), SubsystemLayout({d}, {"B"}));
}

// ---- optimal catalysts ----

struct AngularMomentumCatalyst {
    DensityOperator sigma;
    double s_cat;
    DegeneracyVector r;
};

inline AngularMomentumCatalyst angular_momentum_catalyst(int l_max) {
    if (l_max < 0) throw std::invalid_argument("angular_momentum_catalyst: l_M must be >= 0");
    std::vector<int> r;
    for (int l = 0; l <= l_max; ++l) r.push_back(2 * l + 1);
    DegeneracyVector dv(r);
    const double denom = static_cast<double>(l_max + 1) * (2 * l_max + 1) * (2 * l_max + 3);
    const long n = dv.sum();
    Mat s = Mat::Zero(n, n);
    long k = 0;
    for (int l = 0; l <= l_max; ++l)
        for (int m = -l; m <= l; ++m, ++k) s(k, k) = 3.0 * (2 * l + 1) / denom;
    return {DensityOperator{s, SubsystemLayout({static_cast<int>(n)})}, std::log2(denom / 3.0), dv};
}

// Catalytic entropy of a state whose spectral blocks are fixed externally (superselection).
inline double block_catalytic_entropy(const std::vector<double>& lambda, const DegeneracyVector& r) {
    return catalytic_entropy(SpectralData{lambda, r.r});
}

inline std::vector<double> thermal_levels(const DegeneracyVector& r, double e_inf) {
    std::vector<double> e;
    for (int ri : r.r) e.push_back(e_inf - std::log2(static_cast<double>(ri)));
    return e;
}

// Per-state Gibbs populations at beta = ln 2 for levels with degeneracies r.
inline std::vector<double> gibbs_populations(const std::vector<double>& energies, const DegeneracyVector& r) {
    if (energies.size() != r.r.size()) throw std::invalid_argument("gibbs_populations: size mismatch");
    double z = 0;
    for (std::size_t i = 0; i < energies.size(); ++i) z += r.r[i] * std::exp2(-energies[i]);
    std::vector<double> p;
    for (double e : energies) p.push_back(std::exp2(-e) / z);
    return p;
}

}  // namespace catalyx
