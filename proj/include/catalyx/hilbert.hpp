// hilbert.hpp — dense multipartite linear algebra: layouts, partial trace/transpose,
// spectral grouping, purification, Weyl operators, seeded sampling

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace catalyx {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Rng = std::mt19937_64;

inline constexpr double pi = 3.14159265358979323846;

// ---- tolerances ----

struct Tolerances {
    double unitary = 1e-9;
    double herm = 1e-9;
    double psd = 1e-10;
    double state = 1e-9;
    double norm = 1e-10;
    double group = 1e-8;
    double multiplicity = 1e-6;
};

// Process-wide defaults. Only the CLI mutates this, once, before any work starts.
inline Tolerances& tolerance_config() {
    static Tolerances t;
    return t;
}
inline const Tolerances& tol() { return tolerance_config(); }

// ---- layout ----

struct SubsystemLayout {
    std::vector<int> dims;
    std::vector<std::string> labels;

    SubsystemLayout() = default;
    SubsystemLayout(std::vector<int> d, std::vector<std::string> l = {})
        : dims(std::move(d)), labels(std::move(l)) {
        for (int x : dims)
            if (x < 1) throw std::invalid_argument("SubsystemLayout: dims must be positive");
        if (!labels.empty() && labels.size() != dims.size())
            throw std::invalid_argument("SubsystemLayout: labels/dims length mismatch");
    }

    std::size_t size() const { return dims.size(); }
    long total() const {
        long n = 1;
        for (int x : dims) n *= x;
        return n;
    }
    void check_index(std::size_t i) const {
        if (i >= dims.size()) throw std::out_of_range("subsystem index out of range");
    }
    long total_of(const std::vector<int>& idx) const {
        long n = 1;
        for (int i : idx) {
            check_index(static_cast<std::size_t>(i));
            n *= dims[static_cast<std::size_t>(i)];
        }
        return n;
    }
    SubsystemLayout subset(const std::vector<int>& idx) const {
        SubsystemLayout out;
        for (int i : idx) {
            check_index(static_cast<std::size_t>(i));
            out.dims.push_back(dims[static_cast<std::size_t>(i)]);
            if (!labels.empty()) out.labels.push_back(labels[static_cast<std::size_t>(i)]);
        }
        return out;
    }
    std::string label(std::size_t i) const {
        check_index(i);
        return labels.empty() ? std::to_string(i) : labels[i];
    }
    bool operator==(const SubsystemLayout& o) const { return dims == o.dims; }
};

inline SubsystemLayout concat(const SubsystemLayout& a, const SubsystemLayout& b) {
    SubsystemLayout out;
    out.dims = a.dims;
    out.dims.insert(out.dims.end(), b.dims.begin(), b.dims.end());
    if (!a.labels.empty() || !b.labels.empty()) {
        for (std::size_t i = 0; i < a.size(); ++i) out.labels.push_back(a.label(i));
        for (std::size_t i = 0; i < b.size(); ++i) out.labels.push_back(b.label(i));
    }
    return out;
}

inline std::vector<int> complement(const std::vector<int>& idx, std::size_t n) {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(n); ++i)
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) out.push_back(i);
    return out;
}

inline std::vector<int> range_indices(int begin, int end) {
    std::vector<int> out;
    for (int i = begin; i < end; ++i) out.push_back(i);
    return out;
}

// ---- value types ----

struct StateVector {
    Vec amplitudes;
    SubsystemLayout layout;
};

struct DensityOperator {
    Mat matrix;
    SubsystemLayout layout;
};

struct UnitaryOperator {
    Mat matrix;
    SubsystemLayout layout;
};

struct EigenspaceDecomposition {
    std::vector<double> eigenvalues;   // strictly descending, nonzero
    std::vector<Mat> projectors;
    std::vector<int> multiplicities;
    std::vector<Mat> bases;            // orthonormal columns spanning each eigenspace
    Mat kernel;                        // orthonormal columns spanning the dropped zero space
};

inline double hermiticity_defect(const Mat& m) { return (m - m.adjoint()).norm(); }
inline double unitarity_defect(const Mat& u) {
    return (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).norm();
}

inline void check_layout(const SubsystemLayout& l, Eigen::Index n, const char* what) {
    if (l.total() != n) throw std::invalid_argument(std::string(what) + ": layout does not match matrix size");
}

inline Eigen::SelfAdjointEigenSolver<Mat> hermitian_eig(const Mat& m) {
    Mat h = 0.5 * (m + m.adjoint());
    return Eigen::SelfAdjointEigenSolver<Mat>(h);
}

inline DensityOperator make_density(Mat m, SubsystemLayout l) {
    if (m.rows() != m.cols()) throw std::invalid_argument("density: matrix not square");
    check_layout(l, m.rows(), "density");
    if (hermiticity_defect(m) > tol().herm) throw std::invalid_argument("density: not Hermitian");
    if (std::abs(m.trace() - cd(1.0)) > tol().norm * std::max<double>(1.0, static_cast<double>(m.rows())))
        throw std::invalid_argument("density: trace is not 1");
    auto es = hermitian_eig(m);
    if (es.eigenvalues().minCoeff() < -tol().psd) throw std::invalid_argument("density: not positive semidefinite");
    return DensityOperator{0.5 * (m + m.adjoint()), std::move(l)};
}

inline DensityOperator make_density(Mat m) {
    const int n = static_cast<int>(m.rows());
    return make_density(std::move(m), SubsystemLayout({n}));
}

inline UnitaryOperator make_unitary(Mat m, SubsystemLayout l) {
    if (m.rows() != m.cols()) throw std::invalid_argument("unitary: matrix not square");
    check_layout(l, m.rows(), "unitary");
    if (unitarity_defect(m) > tol().unitary) throw std::invalid_argument("unitary: U^dag U != 1");
    return UnitaryOperator{std::move(m), std::move(l)};
}

inline StateVector make_state(Vec v, SubsystemLayout l) {
    check_layout(l, v.size(), "state");
    if (std::abs(v.norm() - 1.0) > tol().norm) throw std::invalid_argument("state: not normalized");
    return StateVector{std::move(v), std::move(l)};
}

inline DensityOperator projector(const StateVector& s) {
    return DensityOperator{s.amplitudes * s.amplitudes.adjoint(), s.layout};
}

inline Mat maximally_mixed(long d) { return Mat::Identity(d, d) / static_cast<double>(d); }

inline Vec basis_vector(long d, long k) {
    if (k < 0 || k >= d) throw std::out_of_range("basis_vector: index out of range");
    Vec v = Vec::Zero(d);
    v(k) = 1.0;
    return v;
}

inline double trace_distance(const Mat& a, const Mat& b) {
    auto es = hermitian_eig(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// ---- tensor ----

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec kronv(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

inline Mat kron_all(const std::vector<Mat>& ms) {
    Mat out = Mat::Identity(1, 1);
    for (const auto& m : ms) out = kron(out, m);
    return out;
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator{kron(a.matrix, b.matrix), concat(a.layout, b.layout)};
}
inline UnitaryOperator tensor(const UnitaryOperator& a, const UnitaryOperator& b) {
    return UnitaryOperator{kron(a.matrix, b.matrix), concat(a.layout, b.layout)};
}
inline StateVector tensor(const StateVector& a, const StateVector& b) {
    return StateVector{kronv(a.amplitudes, b.amplitudes), concat(a.layout, b.layout)};
}

// ---- index bookkeeping ----

namespace detail {

inline std::vector<long> strides(const std::vector<int>& dims) {
    std::vector<long> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[static_cast<std::size_t>(k)] = s[static_cast<std::size_t>(k) + 1] * dims[static_cast<std::size_t>(k) + 1];
    return s;
}

inline long total(const std::vector<int>& dims) {
    long n = 1;
    for (int d : dims) n *= d;
    return n;
}

// For every full index, the index it takes inside the sub-register `idx` (ordered as given).
inline std::vector<long> sub_index_map(const std::vector<int>& dims, const std::vector<int>& idx) {
    const long n = total(dims);
    auto full = strides(dims);
    std::vector<int> sub_dims;
    for (int i : idx) sub_dims.push_back(dims[static_cast<std::size_t>(i)]);
    auto sub = strides(sub_dims);
    std::vector<long> out(static_cast<std::size_t>(n));
    for (long f = 0; f < n; ++f) {
        long s = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            auto i = static_cast<std::size_t>(idx[k]);
            s += ((f / full[i]) % dims[i]) * sub[k];
        }
        out[static_cast<std::size_t>(f)] = s;
    }
    return out;
}

inline void check_indices(const std::vector<int>& dims, const std::vector<int>& idx) {
    std::vector<int> seen;
    for (int i : idx) {
        if (i < 0 || i >= static_cast<int>(dims.size())) throw std::out_of_range("subsystem index out of range");
        if (std::find(seen.begin(), seen.end(), i) != seen.end())
            throw std::invalid_argument("subsystem index repeated");
        seen.push_back(i);
    }
}

}  // namespace detail

// New subsystem k is old subsystem perm[k].
inline std::vector<long> permutation_map(const std::vector<int>& dims, const std::vector<int>& perm) {
    if (perm.size() != dims.size()) throw std::invalid_argument("permutation: wrong length");
    detail::check_indices(dims, perm);
    return detail::sub_index_map(dims, perm);  // old full index -> new full index
}

inline Mat permute_subsystems(const Mat& m, const std::vector<int>& dims, const std::vector<int>& perm) {
    auto p = permutation_map(dims, perm);
    Mat out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]) = m(i, j);
    return out;
}

inline Vec permute_subsystems(const Vec& v, const std::vector<int>& dims, const std::vector<int>& perm) {
    auto p = permutation_map(dims, perm);
    Vec out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(p[static_cast<std::size_t>(i)]) = v(i);
    return out;
}

inline std::vector<int> permuted_dims(const std::vector<int>& dims, const std::vector<int>& perm) {
    std::vector<int> out;
    for (int i : perm) out.push_back(dims[static_cast<std::size_t>(i)]);
    return out;
}

// Operator `op` acting on the ordered subsystems `targets`, identity elsewhere.
inline Mat embed(const Mat& op, const std::vector<int>& dims, const std::vector<int>& targets) {
    detail::check_indices(dims, targets);
    std::vector<int> tdims;
    for (int t : targets) tdims.push_back(dims[static_cast<std::size_t>(t)]);
    if (op.rows() != detail::total(tdims) || op.cols() != op.rows())
        throw std::invalid_argument("embed: operator size does not match targets");
    auto rest = complement(targets, dims.size());
    std::vector<int> order = targets;
    order.insert(order.end(), rest.begin(), rest.end());
    Mat k = kron(op, Mat::Identity(detail::total(dims) / op.rows(), detail::total(dims) / op.rows()));
    // k lives on ordering `order`; move back to natural ordering.
    std::vector<int> inv(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) inv[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    return permute_subsystems(k, permuted_dims(dims, order), inv);
}

// Apply `op` on `targets` of a state vector without forming the full operator.
inline Vec apply_local(const Vec& v, const std::vector<int>& dims, const Mat& op, const std::vector<int>& targets) {
    detail::check_indices(dims, targets);
    auto rest = complement(targets, dims.size());
    std::vector<int> order = targets;
    order.insert(order.end(), rest.begin(), rest.end());
    const long dt = detail::total(permuted_dims(dims, targets));
    if (op.rows() != dt || op.cols() != dt) throw std::invalid_argument("apply_local: operator size mismatch");
    Vec w = permute_subsystems(v, dims, order);
    const long dr = v.size() / dt;
    // row-major reshape: amplitude index = t * dr + r
    Eigen::Map<Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(w.data(), dt, dr);
    Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = op * M;
    Vec out = Eigen::Map<Vec>(R.data(), v.size());
    std::vector<int> inv(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) inv[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    return permute_subsystems(out, permuted_dims(dims, order), inv);
}

// ---- partial trace / transpose ----

inline Mat partial_trace(const Mat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
    detail::check_indices(dims, keep);
    if (m.rows() != detail::total(dims) || m.cols() != m.rows())
        throw std::invalid_argument("partial_trace: matrix does not match dims");
    auto traced = complement(keep, dims.size());
    auto ki = detail::sub_index_map(dims, keep);
    auto ti = detail::sub_index_map(dims, traced);
    long dk = 1;
    for (int k : keep) dk *= dims[static_cast<std::size_t>(k)];
    const long dt = m.rows() / dk;
    std::vector<std::vector<long>> groups(static_cast<std::size_t>(dt));
    for (long f = 0; f < m.rows(); ++f) groups[static_cast<std::size_t>(ti[static_cast<std::size_t>(f)])].push_back(f);
    Mat out = Mat::Zero(dk, dk);
    for (const auto& g : groups)
        for (long a : g)
            for (long b : g)
                out(ki[static_cast<std::size_t>(a)], ki[static_cast<std::size_t>(b)]) += m(a, b);
    return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
    return DensityOperator{partial_trace(rho.matrix, rho.layout.dims, keep), rho.layout.subset(keep)};
}

inline Mat partial_transpose(const Mat& m, const std::vector<int>& dims, const std::vector<int>& subsystems) {
    detail::check_indices(dims, subsystems);
    if (m.rows() != detail::total(dims) || m.cols() != m.rows())
        throw std::invalid_argument("partial_transpose: matrix does not match dims");
    auto st = detail::strides(dims);
    const long n = m.rows();
    // digit of every transposed subsystem contributes `digit * stride`; swap those between row and column
    std::vector<long> part(static_cast<std::size_t>(n), 0);
    for (long f = 0; f < n; ++f)
        for (int s : subsystems) {
            auto k = static_cast<std::size_t>(s);
            part[static_cast<std::size_t>(f)] += ((f / st[k]) % dims[k]) * st[k];
        }
    Mat out(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            long pi_ = part[static_cast<std::size_t>(i)], pj = part[static_cast<std::size_t>(j)];
            out(i - pi_ + pj, j - pj + pi_) = m(i, j);
        }
    return out;
}

inline Mat partial_transpose(const Mat& m, const std::vector<int>& dims, int subsystem) {
    return partial_transpose(m, dims, std::vector<int>{subsystem});
}

// Gram matrix of the smaller side of a pure state's bipartition `keep | rest`.
// Its nonzero spectrum equals that of the reduced state on `keep`.
inline Mat reduced_gram(const Vec& v, const std::vector<int>& dims, const std::vector<int>& keep) {
    detail::check_indices(dims, keep);
    auto rest = complement(keep, dims.size());
    std::vector<int> order = keep;
    order.insert(order.end(), rest.begin(), rest.end());
    Vec w = permute_subsystems(v, dims, order);
    const long dk = detail::total(permuted_dims(dims, keep));
    const long dr = v.size() / dk;
    Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(w.data(), dk, dr);
    if (dk <= dr) return M * M.adjoint();
    return (M.adjoint() * M).transpose();
}

// Reduced density matrix of a pure state on `keep`, in the order given.
inline Mat reduced_density(const Vec& v, const std::vector<int>& dims, const std::vector<int>& keep) {
    detail::check_indices(dims, keep);
    auto rest = complement(keep, dims.size());
    std::vector<int> order = keep;
    order.insert(order.end(), rest.begin(), rest.end());
    Vec w = permute_subsystems(v, dims, order);
    const long dk = detail::total(permuted_dims(dims, keep));
    const long dr = v.size() / dk;
    Eigen::Map<const Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(w.data(), dk, dr);
    return M * M.adjoint();
}

// ---- spectra ----

struct Spectrum {
    RVec values;   // descending
    Mat vectors;   // columns match values
};

inline bool is_diagonal(const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != cd(0.0)) return false;
    return true;
}

inline Spectrum spectrum(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectrum: matrix not square");
    if (hermiticity_defect(m) > tol().herm * std::max(1.0, m.norm())) throw std::invalid_argument("spectrum: non-Hermitian input");
    const Eigen::Index n = m.rows();
    RVec vals(n);
    Mat vecs;
    if (is_diagonal(m)) {
        for (Eigen::Index i = 0; i < n; ++i) vals(i) = m(i, i).real();
        vecs = Mat::Identity(n, n);
    } else {
        auto es = hermitian_eig(m);
        vals = es.eigenvalues();
        vecs = es.eigenvectors();
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals(a) > vals(b); });
    Spectrum s{RVec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        s.values(k) = vals(order[static_cast<std::size_t>(k)]);
        s.vectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return s;
}

inline RVec eigenvalues_desc(const Mat& m) { return spectrum(m).values; }

inline EigenspaceDecomposition eigenspace_decompose(const Mat& m, double group_tol) {
    auto sp = spectrum(m);
    const Eigen::Index n = m.rows();
    const double lmax = n > 0 ? sp.values(0) : 0.0;
    EigenspaceDecomposition dec;
    std::vector<Eigen::Index> kernel_cols;
    Eigen::Index k = 0;
    while (k < n) {
        if (sp.values(k) < tol().psd) {
            kernel_cols.push_back(k);
            ++k;
            continue;
        }
        Eigen::Index e = k + 1;
        while (e < n && sp.values(e) >= tol().psd && sp.values(e - 1) - sp.values(e) < group_tol * lmax) ++e;
        double mean = sp.values.segment(k, e - k).mean();
        Mat basis = sp.vectors.middleCols(k, e - k);
        Mat proj = basis * basis.adjoint();
        double tr = proj.trace().real();
        double r = std::round(tr);
        if (std::abs(tr - r) > tol().multiplicity) throw std::runtime_error("eigenspace_decompose: non-integral multiplicity");
        dec.eigenvalues.push_back(mean);
        dec.projectors.push_back(proj);
        dec.multiplicities.push_back(static_cast<int>(r));
        dec.bases.push_back(basis);
        k = e;
    }
    dec.kernel = Mat(n, static_cast<Eigen::Index>(kernel_cols.size()));
    for (std::size_t j = 0; j < kernel_cols.size(); ++j) dec.kernel.col(static_cast<Eigen::Index>(j)) = sp.vectors.col(kernel_cols[j]);
    return dec;
}

inline EigenspaceDecomposition eigenspace_decompose(const DensityOperator& rho, double group_tol) {
    return eigenspace_decompose(rho.matrix, group_tol);
}
inline EigenspaceDecomposition eigenspace_decompose(const DensityOperator& rho) {
    return eigenspace_decompose(rho.matrix, tol().group);
}

inline Mat reconstruct(const EigenspaceDecomposition& dec) {
    if (dec.projectors.empty()) throw std::invalid_argument("reconstruct: empty decomposition");
    Mat out = Mat::Zero(dec.projectors[0].rows(), dec.projectors[0].cols());
    for (std::size_t i = 0; i < dec.projectors.size(); ++i) out += dec.eigenvalues[i] * dec.projectors[i];
    return out;
}

// Functional calculus on a Hermitian matrix; f sees eigenvalues clamped at zero when `psd`.
template <class F>
Mat hermitian_function(const Mat& m, F&& f) {
    auto sp = spectrum(m);
    RVec fv(sp.values.size());
    for (Eigen::Index i = 0; i < sp.values.size(); ++i) fv(i) = f(sp.values(i));
    return sp.vectors * fv.asDiagonal() * sp.vectors.adjoint();
}

inline Mat sqrt_psd(const Mat& m) {
    return hermitian_function(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

// ---- purification ----

inline StateVector purify(const DensityOperator& sigma) {
    const long d = sigma.matrix.rows();
    Mat s = sqrt_psd(sigma.matrix);
    Vec psi(d * d);
    for (long b = 0; b < d; ++b)
        for (long i = 0; i < d; ++i) psi(b * d + i) = s(b, i);
    psi /= psi.norm();
    SubsystemLayout l = sigma.layout;
    SubsystemLayout c({static_cast<int>(d)}, {"C"});
    return StateVector{psi, concat(l, c)};
}

// ---- canonical operators ----

struct CanonicalOperators {
    Mat Z;        // clock
    Mat X;        // shift
    Mat F;        // swap on d (x) d
    Vec gamma;    // sum_i |ii>, unnormalized
    Mat fourier;  // F_nm = exp(2 pi i n m / d) / sqrt(d)
};

inline cd root_of_unity(long d, long k) {
    long r = ((k % d) + d) % d;
    double a = 2.0 * pi * static_cast<double>(r) / static_cast<double>(d);
    return {std::cos(a), std::sin(a)};
}

inline Mat clock(long d, long power = 1) {
    Mat z = Mat::Zero(d, d);
    for (long k = 0; k < d; ++k) z(k, k) = root_of_unity(d, k * power);
    return z;
}

inline Mat shift(long d, long power = 1) {
    Mat x = Mat::Zero(d, d);
    for (long k = 0; k < d; ++k) x((((k + power) % d) + d) % d, k) = 1.0;
    return x;
}

inline Mat weyl(long d, long a, long b) { return shift(d, a) * clock(d, b); }

inline Mat swap_operator(long d1, long d2) {
    Mat f = Mat::Zero(d1 * d2, d1 * d2);
    for (long i = 0; i < d1; ++i)
        for (long j = 0; j < d2; ++j) f(j * d1 + i, i * d2 + j) = 1.0;
    return f;
}

inline Vec gamma_vector(long d) {
    Vec g = Vec::Zero(d * d);
    for (long i = 0; i < d; ++i) g(i * d + i) = 1.0;
    return g;
}

inline Mat fourier_matrix(long d) {
    Mat f(d, d);
    for (long n = 0; n < d; ++n)
        for (long m = 0; m < d; ++m) f(n, m) = root_of_unity(d, n * m) / std::sqrt(static_cast<double>(d));
    return f;
}

inline CanonicalOperators canonical_operators(long d) {
    if (d < 1) throw std::invalid_argument("canonical_operators: d must be >= 1");
    return {clock(d), shift(d), swap_operator(d, d), gamma_vector(d), fourier_matrix(d)};
}

// ---- sampling ----

inline Mat ginibre(long rows, long cols, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            double re = g(rng);
            double im = g(rng);
            m(i, j) = cd(re, im) / std::sqrt(2.0);
        }
    return m;
}

inline Mat haar_unitary(long d, Rng& rng) {
    if (d < 1) throw std::invalid_argument("haar_unitary: d must be >= 1");
    Mat g = ginibre(d, d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ() * Mat::Identity(d, d);
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long k = 0; k < d; ++k) {
        cd rk = r(k, k);
        double a = std::abs(rk);
        q.col(k) *= a > 0 ? rk / a : cd(1.0);
    }
    return q;
}

inline UnitaryOperator haar_unitary(long d, std::uint64_t seed) {
    Rng rng(seed);
    return UnitaryOperator{haar_unitary(d, rng), SubsystemLayout({static_cast<int>(d)})};
}

inline Vec haar_vector(long d, Rng& rng) {
    Vec v = ginibre(d, 1, rng).col(0);
    return v / v.norm();
}

inline StateVector haar_state(const SubsystemLayout& l, std::uint64_t seed) {
    Rng rng(seed);
    return StateVector{haar_vector(l.total(), rng), l};
}

inline std::vector<double> simplex_weights(int k, Rng& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(static_cast<std::size_t>(k));
    double s = 0;
    for (auto& x : w) {
        x = e(rng);
        s += x;
    }
    for (auto& x : w) x /= s;
    return w;
}

inline Mat random_density(long d, int rank, Rng& rng, bool equal_weights = false) {
    if (rank < 1 || rank > d) throw std::invalid_argument("random_density: rank out of range");
    Mat u = haar_unitary(d, rng);
    std::vector<double> w = equal_weights ? std::vector<double>(static_cast<std::size_t>(rank), 1.0 / rank)
                                          : simplex_weights(rank, rng);
    Mat rho = Mat::Zero(d, d);
    for (int k = 0; k < rank; ++k) rho += w[static_cast<std::size_t>(k)] * u.col(k) * u.col(k).adjoint();
    return 0.5 * (rho + rho.adjoint());
}

inline DensityOperator random_density(const SubsystemLayout& l, int rank, std::uint64_t seed, bool equal_weights = false) {
    Rng rng(seed);
    return DensityOperator{random_density(l.total(), rank, rng, equal_weights), l};
}

}  // namespace catalyx
