// optimize.hpp — entropy-production maximization, entanglement-assisted capacity
// and the capacity/randomness tradeoff

#pragma once

#include "catalysis.hpp"

#include <functional>
#include <memory>

namespace catalyx {

inline constexpr double tol_grad = 1e-7;
inline constexpr double eig_floor = 1e-15;

struct OptimizationResult {
    double value = 0;
    Mat argmax;             // density operator of the optimizer
    Vec argmax_vector;      // pure-state optimizer on R (x) A, empty for mixed searches
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
    double gradient_norm_at_end = 0;
    double stationarity_gap = 0;   // Frank-Wolfe gap, ea_capacity only
};

// ---- entropy with its derivative ----

struct ValueGrad {
    double value;
    Mat grad;   // dS = Tr(grad d omega)
};

inline void check_supported_alpha(double alpha) {
    if (std::isinf(alpha) || alpha > 1e9) return;
    for (double a : {0.5, 1.0, 2.0})
        if (std::abs(alpha - a) <= alpha_snap) return;
    throw std::invalid_argument("optimize: unsupported alpha " + std::to_string(alpha) + " (use 0.5, 1, 2 or inf)");
}

// Finite alpha only; at alpha = 1 this is the von Neumann gradient.
inline ValueGrad entropy_value_grad(const Mat& w, double alpha) {
    auto sp = spectrum(w);
    const Eigen::Index n = sp.values.size();
    RVec dv(n);
    double value = 0;
    if (std::abs(alpha - 1.0) <= alpha_snap) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = std::max(sp.values(i), eig_floor);
            if (sp.values(i) > 0) value -= sp.values(i) * std::log2(sp.values(i));
            dv(i) = -(std::log2(x) + 1.0 / std::log(2.0));
        }
    } else {
        double t = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (sp.values(i) > 0) t += std::pow(sp.values(i), alpha);
        value = std::log2(t) / (1 - alpha);
        const double c = alpha / ((1 - alpha) * std::log(2.0) * t);
        for (Eigen::Index i = 0; i < n; ++i) dv(i) = c * std::pow(std::max(sp.values(i), eig_floor), alpha - 1);
    }
    return {value, sp.vectors * dv.asDiagonal() * sp.vectors.adjoint()};
}

// Supergradient of the min-entropy from the top eigenvector.
inline ValueGrad min_entropy_value_grad(const Mat& w) {
    auto sp = spectrum(w);
    const double l = std::max(sp.values(0), eig_floor);
    Vec v = sp.vectors.col(0);
    return {-std::log2(l), Mat(-(v * v.adjoint()) / (l * std::log(2.0)))};
}

inline ValueGrad renyi_value_grad(const Mat& w, double alpha) {
    if (std::isinf(alpha) || alpha > 1e9) return min_entropy_value_grad(w);
    return entropy_value_grad(w, alpha);
}

// ---- sphere ascent ----

struct SphereProblem {
    std::function<double(const Vec&)> f;
    std::function<std::pair<double, Vec>(const Vec&)> fg;   // value and Euclidean gradient
    std::function<bool(const Vec&, const Vec&)> done;       // optional extra stopping rule
};

struct AscentResult {
    Vec x;
    double value;
    int iterations;
    double grad_norm;
    bool converged;
};

inline Vec tangent(const Vec& x, const Vec& g) { return g - (x.dot(g)).real() * x; }

// Riemannian gradient ascent on the unit sphere with Barzilai-Borwein steps and Armijo backtracking.
inline AscentResult sphere_ascent(const SphereProblem& p, Vec x, int max_iter, double gtol) {
    x.normalize();
    auto [fx, g] = p.fg(x);
    Vec gt = tangent(x, g);
    double step = 1.0;
    int it = 0;
    int stalls = 0;
    bool converged = false;
    for (; it < max_iter; ++it) {
        const double gn = gt.norm();
        if (gn <= gtol || (p.done && p.done(x, gt))) {
            converged = true;
            break;
        }
        bool accepted = false;
        Vec xn;
        double fn = fx;
        for (int k = 0; k < 50; ++k) {
            xn = (x + step * gt).normalized();
            fn = p.f(xn);
            if (fn >= fx + 1e-4 * step * gn * gn) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        auto [fnew, gnew] = p.fg(xn);
        Vec gtn = tangent(xn, gnew);
        Vec s = xn - x;
        Vec y = gt - gtn;
        const double sy = s.dot(y).real();
        step = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-8, 1e4) : std::min(step * 2, 1e4);
        stalls = fnew - fx <= 1e-15 * std::max(1.0, std::abs(fx)) ? stalls + 1 : 0;
        x = xn;
        fx = fnew;
        gt = gtn;
        if (stalls >= 5) break;
    }
    return {x, fx, it, gt.norm(), converged};
}

// Independent restarts; best value wins, ties go to the lowest index.
template <class Run>
std::pair<AscentResult, std::size_t> best_of(int restarts, Run&& run) {
    auto results = parallel_map<AscentResult>(static_cast<std::size_t>(restarts), run);
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].value > results[best].value) best = i;
    return {results[best], best};
}

inline std::uint64_t restart_seed(std::uint64_t seed, std::size_t k) { return seed * 0x9e3779b97f4a7c15ULL + k + 1; }

// Surrogate schedule for the non-smooth min-entropy.
inline const std::vector<double>& min_entropy_schedule() {
    static const std::vector<double> s{2.0, 8.0, 32.0, 128.0};
    return s;
}

// Runs `make(alpha)` problems in sequence for alpha = inf, then polishes on the exact objective.
template <class Make>
AscentResult ascend_alpha(Make&& make, const Vec& x0, double alpha, int max_iter) {
    if (!(std::isinf(alpha) || alpha > 1e9)) return sphere_ascent(make(alpha), x0, max_iter, tol_grad);
    Vec x = x0;
    int iters = 0;
    for (double a : min_entropy_schedule()) {
        auto r = sphere_ascent(make(a), x, max_iter, tol_grad);
        x = r.x;
        iters += r.iterations;
    }
    auto exact = make(inf);
    auto r = sphere_ascent(exact, x, max_iter / 4 + 1, tol_grad);
    r.iterations += iters;
    return r;
}

// ---- global production over pure inputs on R (x) A ----

inline Mat extended_output(const KrausChannel& phi, const Vec& psi) {
    const long dr = psi.size() / phi.din;
    return phi.apply_extended(psi * psi.adjoint(), dr);
}

inline SphereProblem global_problem(const KrausChannel& phi, double alpha) {
    const long d = phi.din;
    auto lift = std::make_shared<std::vector<Mat>>();
    for (const auto& k : phi.ops) lift->push_back(kron(Mat(Mat::Identity(d, d)), k));
    SphereProblem p;
    p.f = [phi, alpha](const Vec& x) { return renyi(extended_output(phi, x), alpha); };
    p.fg = [phi, alpha, lift](const Vec& x) {
        Mat w = extended_output(phi, x);
        auto vg = renyi_value_grad(w, alpha);
        Vec g = Vec::Zero(x.size());
        for (const auto& l : *lift) g += 2.0 * (l.adjoint() * (vg.grad * (l * x)));
        return std::make_pair(vg.value, g);
    };
    return p;
}

inline OptimizationResult max_entropy_production_global(const KrausChannel& phi, double alpha, int restarts = 16,
                                                        std::uint64_t seed = 0, int max_iter = 2000) {
    check_supported_alpha(alpha);
    if (restarts < 1) throw std::invalid_argument("optimize: restarts must be >= 1");
    const long d = phi.din;
    auto [best, idx] = best_of(restarts, [&](std::size_t k) {
        Rng rng(restart_seed(seed, k));
        Vec x0 = haar_vector(d * d, rng);
        return ascend_alpha([&](double a) { return global_problem(phi, a); }, x0, alpha, max_iter);
    });
    (void)idx;
    OptimizationResult r;
    r.argmax_vector = best.x;
    r.argmax = best.x * best.x.adjoint();
    r.value = renyi(extended_output(phi, best.x), alpha);
    r.iterations = best.iterations;
    r.restarts = restarts;
    r.converged = best.converged;
    r.gradient_norm_at_end = best.grad_norm;
    return r;
}

// ---- local production over mixed inputs, rho = L L^dag / Tr ----

inline Mat factor_to_density(const Vec& x, long d) {
    Eigen::Map<const Mat> l(x.data(), d, x.size() / d);
    Mat rho = l * l.adjoint();
    return rho / rho.trace().real();
}

// Euclidean gradient in L for an objective with density gradient G, flattened column-major.
inline Vec factor_gradient(const Vec& x, long d, const Mat& g) {
    Eigen::Map<const Mat> l(x.data(), d, x.size() / d);
    const double t = (l * l.adjoint()).trace().real();
    Mat rho = l * l.adjoint() / t;
    const cd c = (g * rho).trace();
    Mat a = (2.0 / t) * (g - c * Mat::Identity(d, d)) * l;
    return Eigen::Map<const Vec>(a.data(), a.size());
}

inline SphereProblem local_problem(const KrausChannel& phi, double alpha) {
    const long d = phi.din;
    SphereProblem p;
    p.f = [phi, alpha, d](const Vec& x) {
        Mat rho = factor_to_density(x, d);
        return renyi(phi.apply(rho), alpha) - renyi(rho, alpha);
    };
    p.fg = [phi, alpha, d](const Vec& x) {
        Mat rho = factor_to_density(x, d);
        auto out = renyi_value_grad(phi.apply(rho), alpha);
        auto in = renyi_value_grad(rho, alpha);
        Mat g = phi.adjoint_apply(out.grad) - in.grad;
        return std::make_pair(out.value - in.value, factor_gradient(x, d, g));
    };
    return p;
}

inline OptimizationResult max_entropy_production_local(const KrausChannel& phi, double alpha, int restarts = 16,
                                                       std::uint64_t seed = 0, int max_iter = 2000) {
    check_supported_alpha(alpha);
    if (restarts < 1) throw std::invalid_argument("optimize: restarts must be >= 1");
    const long d = phi.din;
    auto [best, idx] = best_of(restarts, [&](std::size_t k) {
        Rng rng(restart_seed(seed, k));
        // even restarts search pure inputs: a rank-one factor stays rank one under the flow
        Mat l = Mat::Zero(d, d);
        if (k % 2 == 0)
            l.col(0) = haar_vector(d, rng);
        else
            l = ginibre(d, d, rng);
        Vec x0 = Eigen::Map<Vec>(l.data(), l.size());
        return ascend_alpha([&](double a) { return local_problem(phi, a); }, x0, alpha, max_iter);
    });
    (void)idx;
    OptimizationResult r;
    r.argmax = factor_to_density(best.x, d);
    r.value = renyi(phi.apply(r.argmax), alpha) - renyi(r.argmax, alpha);
    r.iterations = best.iterations;
    r.restarts = restarts;
    r.converged = best.converged;
    r.gradient_norm_at_end = best.grad_norm;
    return r;
}

// ---- entanglement-assisted capacity ----

// I(rho, Phi) = S(rho) + S(Phi(rho)) - S(Phi^c(rho)).
inline double ea_objective(const KrausChannel& phi, const Mat& rho) {
    return von_neumann(rho) + von_neumann(phi.apply(rho)) - von_neumann(phi.complementary(rho));
}

inline ValueGrad ea_value_grad(const KrausChannel& phi, const Mat& rho) {
    auto a = entropy_value_grad(rho, 1.0);
    auto b = entropy_value_grad(phi.apply(rho), 1.0);
    auto c = entropy_value_grad(phi.complementary(rho), 1.0);
    Mat g = a.grad + phi.adjoint_apply(b.grad) - phi.complementary_adjoint(c.grad);
    return {a.value + b.value - c.value, 0.5 * (g + g.adjoint())};
}

// lambda_max(G) - Tr(rho G); bounds the distance to the maximum of a concave objective.
inline double frank_wolfe_gap(const Mat& g, const Mat& rho) {
    return eigenvalues_desc(g)(0) - (g * rho).trace().real();
}

inline OptimizationResult ea_capacity(const KrausChannel& phi, double tol = tol_grad, std::uint64_t seed = 0,
                                      int max_iter = 5000) {
    const long d = phi.din;
    SphereProblem p;
    p.f = [&](const Vec& x) { return ea_objective(phi, factor_to_density(x, d)); };
    p.fg = [&](const Vec& x) {
        auto vg = ea_value_grad(phi, factor_to_density(x, d));
        return std::make_pair(vg.value, factor_gradient(x, d, vg.grad));
    };
    p.done = [&](const Vec& x, const Vec&) {
        Mat rho = factor_to_density(x, d);
        return frank_wolfe_gap(ea_value_grad(phi, rho).grad, rho) <= tol;
    };
    Rng rng(seed);
    Mat l = Mat::Identity(d, d) + 0.1 * ginibre(d, d, rng);
    Vec x0 = Eigen::Map<Vec>(l.data(), l.size());
    auto a = sphere_ascent(p, x0, max_iter, 0.0);

    OptimizationResult r;
    r.argmax = factor_to_density(a.x, d);
    r.value = ea_objective(phi, r.argmax);
    r.stationarity_gap = frank_wolfe_gap(ea_value_grad(phi, r.argmax).grad, r.argmax);
    r.iterations = a.iterations;
    r.restarts = 1;
    r.converged = r.stationarity_gap <= tol;
    r.gradient_norm_at_end = a.grad_norm;
    return r;
}

// Best I(rho, Phi) over diagonal rho on a simplex grid with the given step.
inline double ea_diagonal_grid(const KrausChannel& phi, double step) {
    const long d = phi.din;
    const int n = static_cast<int>(std::lround(1.0 / step));
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> c(static_cast<std::size_t>(d), 0);
    std::function<void(long, int)> rec = [&](long i, int left) {
        if (i == d - 1) {
            c[static_cast<std::size_t>(i)] = left;
            Mat rho = Mat::Zero(d, d);
            for (long k = 0; k < d; ++k) rho(k, k) = c[static_cast<std::size_t>(k)] / static_cast<double>(n);
            best = std::max(best, ea_objective(phi, rho));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            c[static_cast<std::size_t>(i)] = v;
            rec(i + 1, left - v);
        }
    };
    rec(0, n);
    return best;
}

// Largest relative mismatch between analytic directional derivatives of I(rho, Phi) and central differences,
// both along density directions and along factor directions.
inline double ea_gradient_check(const KrausChannel& phi, int n_points, std::uint64_t seed, double h = 1e-5) {
    const long d = phi.din;
    Rng rng(seed);
    double worst = 0;
    for (int t = 0; t < n_points; ++t) {
        Mat rho = random_density(d, static_cast<int>(d), rng);
        Mat hdir = ginibre(d, d, rng);
        hdir = (0.5 * (hdir + hdir.adjoint())).eval();
        hdir -= hdir.trace() / static_cast<double>(d) * Mat::Identity(d, d);
        hdir /= hdir.norm();
        const double an = (ea_value_grad(phi, rho).grad * hdir).trace().real();
        const double fd = (ea_objective(phi, rho + h * hdir) - ea_objective(phi, rho - h * hdir)) / (2 * h);
        worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(fd), 1e-8));

        Mat l = sqrt_psd(rho);
        Vec x = Eigen::Map<Vec>(l.data(), l.size());
        Vec dx = ginibre(d * d, 1, rng).col(0);
        dx.normalize();
        auto f = [&](const Vec& y) { return ea_objective(phi, factor_to_density(y, d)); };
        Vec g = factor_gradient(x, d, ea_value_grad(phi, rho).grad);
        const double an2 = g.dot(dx).real();
        const double fd2 = (f(x + h * dx) - f(x - h * dx)) / (2 * h);
        worst = std::max(worst, std::abs(an2 - fd2) / std::max(std::abs(fd2), 1e-8));
    }
    return worst;
}

// ---- tradeoff between capacity and catalyst randomness ----

struct TradeoffReport {
    double lhs = 0;
    double rhs = 0;
    bool ok = false;
    double capacity = 0;
    double capacity_upper = 0;
};

inline TradeoffReport tradeoff_check(const CatalysisInstance& inst, std::uint64_t seed = 0) {
    auto phi = channel_to_kraus(inst);
    if (phi.din != phi.dout) throw std::invalid_argument("tradeoff_check: channel must be square");
    auto c = ea_capacity(phi, tol_grad, seed);
    TradeoffReport r;
    r.capacity = c.value;
    r.capacity_upper = c.value + std::max(0.0, c.stationarity_gap);
    // the optimizer value is a lower bound on the capacity, so this lhs is an upper bound
    r.lhs = 2 * std::log2(static_cast<double>(phi.din)) - c.value;
    r.rhs = catalytic_min(eigenspace_decompose(inst.sigma.matrix, tol().group));
    r.ok = r.lhs <= r.rhs + 1e-4;
    return r;
}

}  // namespace catalyx
