#include <catalyx/entropy.hpp>

#include <gtest/gtest.h>

using namespace catalyx;

namespace {

Mat diag(std::vector<double> p) {
    Mat m = Mat::Zero(static_cast<long>(p.size()), static_cast<long>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<long>(i), static_cast<long>(i)) = p[i];
    return m;
}

SpectralData sd(std::vector<double> lambda, std::vector<int> r) { return {std::move(lambda), std::move(r)}; }

// Random (lambda, r) pair with sum lambda_i r_i = 1.
SpectralData random_spectral(Rng& rng) {
    std::uniform_int_distribution<int> n(1, 5), rr(1, 4);
    int k = n(rng);
    std::vector<int> r;
    for (int i = 0; i < k; ++i) r.push_back(rr(rng));
    auto w = simplex_weights(k, rng);
    std::vector<double> lambda;
    for (int i = 0; i < k; ++i) lambda.push_back(w[static_cast<std::size_t>(i)] / r[static_cast<std::size_t>(i)]);
    return {lambda, r};
}

}  // namespace

TEST(VonNeumann, Examples) {
    Rng rng(1);
    Vec v = haar_vector(3, rng);
    EXPECT_NEAR(von_neumann(Mat(v * v.adjoint())), 0.0, 1e-10);
    EXPECT_NEAR(von_neumann(maximally_mixed(6)), std::log2(6.0), 1e-12);
    EXPECT_NEAR(von_neumann(diag({0.5, 0.25, 0.25})), 1.5, 1e-15);
}

TEST(Renyi, Examples) {
    for (double a : {0.0, 0.5, 1.0, 2.0, 7.0, inf}) EXPECT_NEAR(renyi(maximally_mixed(5), a), std::log2(5.0), 1e-12);
    EXPECT_NEAR(renyi(diag({0.5, 0.25, 0.25}), inf), 1.0, 1e-15);
    EXPECT_NEAR(renyi(diag({0.5, 0.25, 0.25}), 2.0), -std::log2(3.0 / 8.0), 1e-14);
    EXPECT_THROW(renyi(diag({1.0}), -0.1), std::invalid_argument);
}

TEST(Renyi, LimitContinuityAndSnap) {
    Rng rng(6);
    for (int t = 0; t < 50; ++t) {
        Mat rho = random_density(4, 4, rng);
        double s = von_neumann(rho);
        EXPECT_NEAR(renyi(rho, 1 + 1e-6), s, 1e-4);
        EXPECT_NEAR(renyi(rho, 1 - 1e-6), s, 1e-4);
        EXPECT_DOUBLE_EQ(renyi(rho, 1 + 1e-10), s);
    }
}

TEST(Renyi, ChainOnRandomSpectra) {
    Rng rng(7);
    std::uniform_real_distribution<double> ua(1.01, 8.0), ub(0.01, 0.99);
    for (int t = 0; t < 1000; ++t) {
        std::uniform_int_distribution<int> n(1, 8);
        auto p = simplex_weights(n(rng), rng);
        double a = ua(rng), b = ub(rng);
        double smin = renyi(p, inf), sa = renyi(p, a), s = renyi(p, 1.0), sb = renyi(p, b);
        EXPECT_LE(smin, sa + 1e-12);
        EXPECT_LE(sa, s + 1e-12);
        EXPECT_LE(s, sb + 1e-12);
    }
}

TEST(MutualInformation, Examples) {
    Rng rng(2);
    Mat rho = random_density(2, 2, rng), sigma = random_density(3, 3, rng);
    EXPECT_NEAR(mutual_information(kron(rho, sigma), {2, 3}, {0}, {1}), 0.0, 1e-10);

    Vec b = gamma_vector(2) / std::sqrt(2.0);
    EXPECT_NEAR(mutual_information(Mat(b * b.adjoint()), {2, 2}, {0}, {1}), 2.0, 1e-12);

    Mat cl = Mat::Zero(9, 9);
    for (int i = 0; i < 3; ++i) cl(i * 3 + i, i * 3 + i) = 1.0 / 3;
    EXPECT_NEAR(mutual_information(cl, {3, 3}, {0}, {1}), std::log2(3.0), 1e-12);

    EXPECT_THROW(mutual_information(cl, {3, 3}, {0}, {0, 1}), std::invalid_argument);
}

TEST(MutualInformation, PureShortcutAgreesWithDense) {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        Vec v = haar_vector(24, rng);
        Mat r = v * v.adjoint();
        EXPECT_NEAR(pure_mutual_information(v, {2, 3, 4}, {0}, {2}), mutual_information(r, {2, 3, 4}, {0}, {2}), 1e-9);
        EXPECT_NEAR(pure_marginal_entropy(v, {2, 3, 4}, {1, 2}), von_neumann(partial_trace(r, {2, 3, 4}, {1, 2})), 1e-9);
    }
}

TEST(RenyiDivergence, Examples) {
    std::vector<double> p{0.2, 0.3, 0.5};
    for (double a : {0.0, 0.5, 1.0, 2.0, inf}) EXPECT_NEAR(renyi_divergence(p, p, a), 0.0, 1e-12);
    EXPECT_NEAR(renyi_divergence({1, 0}, {0.5, 0.5}, 2.0), 1.0, 1e-14);
    double kl = 0.9 * std::log2(0.9 / 0.5) + 0.1 * std::log2(0.1 / 0.5);
    EXPECT_NEAR(renyi_divergence({0.9, 0.1}, {0.5, 0.5}, 1.0), kl, 1e-14);
    EXPECT_NEAR(kl, 0.531, 5e-4);
    EXPECT_NEAR(renyi_divergence({0.9, 0.1}, {0.5, 0.5}, 1.0 + 1e-6), kl, 1e-5);
    EXPECT_THROW(renyi_divergence({0.5, 0.5}, {1.0, 0.0}, 2.0), std::invalid_argument);
    EXPECT_THROW(renyi_divergence({1.0}, {0.5, 0.5}, 2.0), std::invalid_argument);
}

TEST(Catalytic, AverageDegeneracyExamples) {
    EXPECT_NEAR(average_degeneracy(sd({0.5, 0.3, 0.2}, {1, 1, 1})), 0.0, 1e-15);
    EXPECT_NEAR(average_degeneracy(eigenspace_decompose(maximally_mixed(4), 1e-8)), 2.0, 1e-13);
    EXPECT_NEAR(average_degeneracy(eigenspace_decompose(diag({0.5, 0.25, 0.25}), 1e-8)), 0.5, 1e-15);
}

TEST(Catalytic, EntropyExamples) {
    EXPECT_NEAR(catalytic_entropy(sd({1.0}, {1})), 0.0, 1e-15);
    EXPECT_NEAR(catalytic_entropy(eigenspace_decompose(maximally_mixed(3), 1e-8)), 2 * std::log2(3.0), 1e-13);
    EXPECT_NEAR(catalytic_entropy(eigenspace_decompose(diag({0.5, 0.25, 0.25}), 1e-8)), 2.0, 1e-15);
}

TEST(Catalytic, RenyiExamples) {
    auto d = eigenspace_decompose(diag({0.5, 0.25, 0.25}), 1e-8);
    EXPECT_NEAR(catalytic_renyi(d, inf), 1.0, 1e-15);
    EXPECT_NEAR(catalytic_renyi(d, 2.0), std::log2(16.0 / 5.0), 1e-14);
    EXPECT_NEAR(catalytic_renyi(d, 0.0), std::log2(5.0), 1e-15);
    EXPECT_NEAR(catalytic_renyi(d, 1.0), catalytic_entropy(d), 1e-15);
    EXPECT_NEAR(catalytic_renyi(d, 1.0 + 1e-7), catalytic_entropy(d), 1e-5);
    EXPECT_NEAR(catalytic_renyi(d, 1e6), catalytic_renyi(d, inf), 1e-5);
    EXPECT_THROW(catalytic_renyi(d, -1.0), std::invalid_argument);
}

TEST(Catalytic, DivergenceFormExamples) {
    std::vector<int> r{1, 3, 2};
    double n2 = 14;
    std::vector<double> opt{1 / n2, 3 / n2, 2 / n2};
    for (double a : {0.5, 1.0, 2.0, inf}) {
        auto f = catalytic_renyi_divergence_form(sd(opt, r), a);
        EXPECT_NEAR(f.value, std::log2(n2), 1e-12);
        EXPECT_LE(f.residual, 1e-12);
    }
    auto d = eigenspace_decompose(diag({0.5, 0.25, 0.25}), 1e-8);
    auto f = catalytic_renyi_divergence_form(d, 2.0);
    EXPECT_NEAR(f.value, std::log2(16.0 / 5.0), 1e-12);
    EXPECT_LT(f.residual, 1e-12);
    for (double a : {0.0, 0.3, 1.0, 3.0, inf})
        EXPECT_NEAR(catalytic_renyi_divergence_form(sd({0.25}, {4}), a).value, 2 * std::log2(4.0), 1e-12);
}

TEST(Catalytic, PropertiesOnRandomDecompositions) {
    Rng rng(99);
    std::uniform_real_distribution<double> ua(0.05, 10.0);
    for (int t = 0; t < 1000; ++t) {
        auto s = random_spectral(rng);
        double a = ua(rng), b = ua(rng);
        if (a < b) std::swap(a, b);
        double cmin = catalytic_min(s), ca = catalytic_renyi(s, a), cb = catalytic_renyi(s, b), cmax = catalytic_max(s);
        EXPECT_LE(cmin, ca + 1e-10);
        EXPECT_LE(ca, cb + 1e-10);
        EXPECT_LE(cb, cmax + 1e-10);

        std::vector<double> p;
        for (std::size_t i = 0; i < s.lambda.size(); ++i)
            for (int k = 0; k < s.r[i]; ++k) p.push_back(s.lambda[i]);
        EXPECT_NEAR(catalytic_entropy(s), shannon(p) + average_degeneracy(s), 1e-10);
        EXPECT_LE(renyi(p, inf), cmin + 1e-12);
        EXPECT_GE(average_degeneracy(s), -1e-15);
        EXPECT_LE(average_degeneracy(s), shannon(p) + 1e-12);
        for (double al : {0.0, a, 1.0, inf}) EXPECT_LE(catalytic_renyi_divergence_form(s, al).residual, 1e-9);
    }
}

TEST(Report, FieldsAndOrdering) {
    auto r = entropy_report(diag({0.5, 0.25, 0.25}), {0.5, 2.0}, 1e-8);
    EXPECT_NEAR(r.vn, 1.5, 1e-14);
    EXPECT_NEAR(r.min, 1.0, 1e-14);
    EXPECT_NEAR(r.max, std::log2(3.0), 1e-14);
    EXPECT_NEAR(r.catalytic_vn, 2.0, 1e-14);
    EXPECT_NEAR(r.catalytic_min, 1.0, 1e-14);
    EXPECT_NEAR(r.catalytic_max, std::log2(5.0), 1e-14);
    EXPECT_NEAR(r.avg_degeneracy, 0.5, 1e-14);
    EXPECT_LE(r.min, r.renyi.at(2.0));
    EXPECT_LE(r.renyi.at(2.0), r.vn);
    EXPECT_LE(r.vn, r.renyi.at(0.5));
    EXPECT_LE(r.catalytic_renyi.at(2.0), r.catalytic_renyi.at(0.5));
}
