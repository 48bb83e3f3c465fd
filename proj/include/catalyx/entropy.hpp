// entropy.hpp — von Neumann / Renyi entropies, divergences and the catalytic family

#pragma once

#include "hilbert.hpp"

#include <limits>
#include <map>
#include <optional>

namespace catalyx {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double alpha_snap = 1e-9;

// ---- alpha dispatch ----

enum class AlphaKind { zero, one, infinite, finite };

inline AlphaKind classify_alpha(double alpha) {
    if (std::isnan(alpha) || alpha < 0) throw std::invalid_argument("renyi: alpha must be >= 0");
    if (std::isinf(alpha) || alpha > 1.0 / alpha_snap) return AlphaKind::infinite;
    if (alpha <= alpha_snap) return AlphaKind::zero;
    if (std::abs(alpha - 1.0) <= alpha_snap) return AlphaKind::one;
    return AlphaKind::finite;
}

// ---- distributions ----

inline std::vector<double> positive_part(const RVec& p) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) >= tol().psd) out.push_back(p(i));
    return out;
}

inline double shannon(const std::vector<double>& p) {
    double s = 0;
    for (double x : p)
        if (x >= tol().psd) s -= x * std::log2(x);
    return s;
}

inline double renyi(const std::vector<double>& p_in, double alpha) {
    std::vector<double> p;
    for (double x : p_in)
        if (x >= tol().psd) p.push_back(x);
    if (p.empty()) throw std::invalid_argument("renyi: empty distribution");
    switch (classify_alpha(alpha)) {
        case AlphaKind::zero: return std::log2(static_cast<double>(p.size()));
        case AlphaKind::one: return shannon(p);
        case AlphaKind::infinite: return -std::log2(*std::max_element(p.begin(), p.end()));
        case AlphaKind::finite: break;
    }
    // sum p^alpha scaled by the largest term to keep large alpha finite
    double pm = *std::max_element(p.begin(), p.end());
    double s = 0;
    for (double x : p) s += std::pow(x / pm, alpha);
    return (std::log2(s) + alpha * std::log2(pm)) / (1.0 - alpha);
}

inline std::vector<double> to_vector(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// ---- states ----

inline double von_neumann(const Mat& rho) { return shannon(to_vector(eigenvalues_desc(rho))); }
inline double von_neumann(const DensityOperator& rho) { return von_neumann(rho.matrix); }

inline double renyi(const Mat& rho, double alpha) { return renyi(to_vector(eigenvalues_desc(rho)), alpha); }
inline double renyi(const DensityOperator& rho, double alpha) { return renyi(rho.matrix, alpha); }

inline void check_disjoint(const std::vector<int>& x, const std::vector<int>& y) {
    for (int i : x)
        if (std::find(y.begin(), y.end(), i) != y.end())
            throw std::invalid_argument("mutual_information: parts overlap");
}

// Parts need not cover the layout; the remainder is traced out first.
inline double mutual_information(const Mat& rho, const std::vector<int>& dims, const std::vector<int>& x,
                                 const std::vector<int>& y) {
    check_disjoint(x, y);
    std::vector<int> xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    Mat rxy = partial_trace(rho, dims, xy);
    auto sub = permuted_dims(dims, xy);
    auto lx = range_indices(0, static_cast<int>(x.size()));
    auto ly = range_indices(static_cast<int>(x.size()), static_cast<int>(xy.size()));
    return von_neumann(partial_trace(rxy, sub, lx)) + von_neumann(partial_trace(rxy, sub, ly)) - von_neumann(rxy);
}

inline double mutual_information(const DensityOperator& rho, const std::vector<int>& x, const std::vector<int>& y) {
    return mutual_information(rho.matrix, rho.layout.dims, x, y);
}

// Entropy of a marginal of a pure state, computed on the cheaper side of the cut.
inline double pure_marginal_entropy(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& keep) {
    if (keep.empty() || keep.size() == dims.size()) return 0.0;
    return von_neumann(reduced_gram(psi, dims, keep));
}

inline double pure_mutual_information(const Vec& psi, const std::vector<int>& dims, const std::vector<int>& x,
                                      const std::vector<int>& y) {
    check_disjoint(x, y);
    std::vector<int> xy = x;
    xy.insert(xy.end(), y.begin(), y.end());
    return pure_marginal_entropy(psi, dims, x) + pure_marginal_entropy(psi, dims, y) - pure_marginal_entropy(psi, dims, xy);
}

// ---- divergences ----

inline double renyi_divergence(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
    if (p.size() != q.size()) throw std::invalid_argument("renyi_divergence: length mismatch");
    auto kind = classify_alpha(alpha);
    std::vector<std::pair<double, double>> pq;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        if (q[i] <= 0) throw std::invalid_argument("renyi_divergence: support of p not contained in support of q");
        pq.emplace_back(p[i], q[i]);
    }
    if (pq.empty()) throw std::invalid_argument("renyi_divergence: p has empty support");
    switch (kind) {
        case AlphaKind::zero: {
            double s = 0;
            for (auto [a, b] : pq) s += b;
            return -std::log2(s);
        }
        case AlphaKind::one: {
            double s = 0;
            for (auto [a, b] : pq) s += a * std::log2(a / b);
            return s;
        }
        case AlphaKind::infinite: {
            double m = -inf;
            for (auto [a, b] : pq) m = std::max(m, std::log2(a / b));
            return m;
        }
        case AlphaKind::finite: break;
    }
    // log-sum-exp over log2 terms alpha*log p + (1-alpha)*log q
    std::vector<double> t;
    for (auto [a, b] : pq) t.push_back(alpha * std::log2(a) + (1.0 - alpha) * std::log2(b));
    double m = *std::max_element(t.begin(), t.end());
    double s = 0;
    for (double x : t) s += std::exp2(x - m);
    return (m + std::log2(s)) / (alpha - 1.0);
}

// ---- degeneracy data ----

struct DegeneracyVector {
    std::vector<int> r;

    DegeneracyVector() = default;
    explicit DegeneracyVector(std::vector<int> v) : r(std::move(v)) {
        if (r.empty()) throw std::invalid_argument("DegeneracyVector: empty");
        for (int x : r)
            if (x < 1) throw std::invalid_argument("DegeneracyVector: entries must be >= 1");
    }
    long norm2sq() const {
        long s = 0;
        for (int x : r) s += static_cast<long>(x) * x;
        return s;
    }
    long sum() const {
        long s = 0;
        for (int x : r) s += x;
        return s;
    }
};

// Lightweight (lambda_i, r_i) view used by the catalytic formulas.
struct SpectralData {
    std::vector<double> lambda;
    std::vector<int> r;
};

inline SpectralData spectral_data(const EigenspaceDecomposition& dec) {
    if (dec.eigenvalues.size() != dec.multiplicities.size() || dec.eigenvalues.empty())
        throw std::invalid_argument("invalid eigenspace decomposition");
    return {dec.eigenvalues, dec.multiplicities};
}

inline double average_degeneracy(const SpectralData& s) {
    double out = 0;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) out += s.lambda[i] * s.r[i] * std::log2(static_cast<double>(s.r[i]));
    return out;
}

inline double catalytic_entropy(const SpectralData& s) {
    double out = 0;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) out -= s.lambda[i] * s.r[i] * std::log2(s.lambda[i] / s.r[i]);
    return out;
}

inline double catalytic_min(const SpectralData& s) {
    double m = -inf;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) m = std::max(m, std::log2(s.lambda[i] / s.r[i]));
    return -m;
}

inline double catalytic_max(const SpectralData& s) {
    double t = 0;
    for (int x : s.r) t += static_cast<double>(x) * x;
    return std::log2(t);
}

inline double catalytic_renyi(const SpectralData& s, double alpha) {
    switch (classify_alpha(alpha)) {
        case AlphaKind::zero: return catalytic_max(s);
        case AlphaKind::one: return catalytic_entropy(s);
        case AlphaKind::infinite: return catalytic_min(s);
        case AlphaKind::finite: break;
    }
    std::vector<double> t;
    for (std::size_t i = 0; i < s.lambda.size(); ++i)
        t.push_back(alpha * std::log2(s.lambda[i]) + (2.0 - alpha) * std::log2(static_cast<double>(s.r[i])));
    double m = *std::max_element(t.begin(), t.end());
    double acc = 0;
    for (double x : t) acc += std::exp2(x - m);
    return (m + std::log2(acc)) / (1.0 - alpha);
}

struct DivergenceForm {
    double value;
    double residual;
};

inline DivergenceForm catalytic_renyi_divergence_form(const SpectralData& s, double alpha) {
    double n2 = 0;
    for (int x : s.r) n2 += static_cast<double>(x) * x;
    std::vector<double> p, t;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        p.push_back(s.lambda[i] * s.r[i]);
        t.push_back(static_cast<double>(s.r[i]) * s.r[i] / n2);
    }
    double value = std::log2(n2) - renyi_divergence(p, t, alpha);
    return {value, std::abs(value - catalytic_renyi(s, alpha))};
}

inline double average_degeneracy(const EigenspaceDecomposition& d) { return average_degeneracy(spectral_data(d)); }
inline double catalytic_entropy(const EigenspaceDecomposition& d) { return catalytic_entropy(spectral_data(d)); }
inline double catalytic_min(const EigenspaceDecomposition& d) { return catalytic_min(spectral_data(d)); }
inline double catalytic_max(const EigenspaceDecomposition& d) { return catalytic_max(spectral_data(d)); }
inline double catalytic_renyi(const EigenspaceDecomposition& d, double alpha) {
    return catalytic_renyi(spectral_data(d), alpha);
}
inline DivergenceForm catalytic_renyi_divergence_form(const EigenspaceDecomposition& d, double alpha) {
    return catalytic_renyi_divergence_form(spectral_data(d), alpha);
}

// ---- report ----

struct EntropyReport {
    double vn = 0;
    std::map<double, double> renyi;
    double min = 0;
    double max = 0;
    double catalytic_vn = 0;
    std::map<double, double> catalytic_renyi;
    double catalytic_min = 0;
    double catalytic_max = 0;
    double avg_degeneracy = 0;
};

inline EntropyReport entropy_report(const Mat& rho, const std::vector<double>& alphas, double group_tol) {
    auto p = to_vector(eigenvalues_desc(rho));
    auto dec = eigenspace_decompose(rho, group_tol);
    auto sd = spectral_data(dec);
    EntropyReport r;
    r.vn = renyi(p, 1.0);
    r.min = renyi(p, inf);
    r.max = renyi(p, 0.0);
    r.catalytic_vn = catalytic_entropy(sd);
    r.catalytic_min = catalytic_min(sd);
    r.catalytic_max = catalytic_max(sd);
    r.avg_degeneracy = average_degeneracy(sd);
    for (double a : alphas) {
        r.renyi[a] = renyi(p, a);
        r.catalytic_renyi[a] = catalytic_renyi(sd, a);
    }
    return r;
}

}  // namespace catalyx
