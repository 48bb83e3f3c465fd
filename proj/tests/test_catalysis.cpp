#include <catalyx/constructions.hpp>

#include <gtest/gtest.h>

using namespace catalyx;

namespace {

Mat cnot() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

Mat pauli(int k) {
    Mat m = Mat::Zero(2, 2);
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, cd(0, -1), cd(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

Mat plus_state(long d) {
    Vec v = Vec::Ones(d) / std::sqrt(static_cast<double>(d));
    return v * v.adjoint();
}

Mat ket0(long d) {
    Vec v = basis_vector(d, 0);
    return v * v.adjoint();
}

const SubsystemLayout L22({2, 2});
const SubsystemLayout L2({2});

DensityOperator half() { return DensityOperator{maximally_mixed(2), L2}; }

CatalysisInstance cnot_instance() { return canonical_form(UnitaryOperator{cnot(), L22}, half()); }

}  // namespace

TEST(PartialTransposeTest, Examples) {
    EXPECT_TRUE(is_catalysis_unitary(UnitaryOperator{cnot(), L22}).verdict);
    auto sw = is_catalysis_unitary(UnitaryOperator{swap_operator(2, 2), L22});
    EXPECT_FALSE(sw.verdict);
    EXPECT_GT(sw.defect, 1.0);
    Rng rng(1);
    for (int k = 0; k < 100; ++k)
        EXPECT_FALSE(is_catalysis_unitary(UnitaryOperator{haar_unitary(16, rng), SubsystemLayout({4, 4})}).verdict);
    EXPECT_THROW(is_catalysis_unitary(cnot(), {2, 2}, {}), std::invalid_argument);
    EXPECT_THROW(is_catalysis_unitary(cnot(), {2, 2}, {0, 1}), std::invalid_argument);
}

TEST(Compatibility, Examples) {
    auto good = check_compatibility(UnitaryOperator{cnot(), L22}, half());
    EXPECT_TRUE(good.verdict);
    EXPECT_LT(good.entropy_gap, 1e-12);
    auto bad = check_compatibility(UnitaryOperator{cnot(), L22}, DensityOperator{ket0(2), L2});
    EXPECT_FALSE(bad.verdict);
    EXPECT_NEAR(bad.entropy_gap, 1.0, 1e-12);
    EXPECT_THROW(check_compatibility(UnitaryOperator{swap_operator(2, 2), L22}, half()), std::invalid_argument);
    // every catalysis unitary is compatible with the maximally mixed catalyst
    auto inst = dephasing_catalysis(DegeneracyVector({1, 2}));
    EXPECT_TRUE(check_compatibility(inst.U, DensityOperator{maximally_mixed(3), inst.layout_b}).verdict);
}

TEST(Exhaustive, Examples) {
    auto inst = dephasing_catalysis(DegeneracyVector({2}));
    EXPECT_LE(verify_catalysis_exhaustive(inst.U, inst.sigma, 200, 3).max_deviation, 1e-9);

    // swap hands the input to the catalyst: deviation is the largest distance from the 1/d output
    Mat s = Mat::Zero(2, 2);
    s(0, 0) = 0.8;
    s(1, 1) = 0.2;
    auto sw = verify_catalysis_exhaustive(UnitaryOperator{swap_operator(2, 2), L22}, DensityOperator{s, L2}, 64, 1);
    EXPECT_GT(sw.max_deviation, 0.4);

    auto c = verify_catalysis_exhaustive(UnitaryOperator{cnot(), L22}, half(), 64, 2);
    ASSERT_TRUE(c.implied_V.has_value());
    EXPECT_LT(unitarity_defect(c.implied_V->matrix), 1e-12);
    EXPECT_NEAR(std::abs(c.implied_V->matrix.trace()), 2.0, 1e-12);
}

TEST(CanonicalForm, RecoversCatalystRotation) {
    auto inst = cnot_instance();
    EXPECT_FALSE(inst.canonical_V.has_value());

    Mat s = Mat::Zero(3, 3);
    s(0, 0) = 0.5;
    s(1, 1) = 0.3;
    s(2, 2) = 0.2;
    // classical catalysis on a qubit with a non-degenerate catalyst, then rotate the catalyst
    auto base = classical_catalysis({0.5, 0.3, 0.2}, {pauli(0), pauli(3), pauli(1)});
    Rng rng(4);
    for (int t = 0; t < 5; ++t) {
        Mat w = haar_unitary(3, rng);
        Mat u = kron(Mat(Mat::Identity(2, 2)), w) * base.U.matrix;
        auto c = canonical_form(UnitaryOperator{u, SubsystemLayout({2, 3})}, DensityOperator{s, SubsystemLayout({3})});
        ASSERT_TRUE(c.canonical_V.has_value());
        // V^dag W commutes with sigma: V equals W up to a phase per eigenvector
        Mat q = c.canonical_V->matrix.adjoint() * w;
        EXPECT_LT((q * s - s * q).norm(), 1e-8);
        Rng r2(t);
        for (int k = 0; k < 10; ++k) {
            Mat rho = random_density(2, 2, r2);
            EXPECT_LT(trace_distance(catalyst_output(c.U.matrix, 2, 3, rho, s), s), 1e-9);
            EXPECT_LT(trace_distance(implement_channel(c, rho), implement_channel(base, rho)), 1e-9);
        }
    }
    EXPECT_THROW(canonical_form(UnitaryOperator{cnot(), L22}, DensityOperator{ket0(2), L2}), std::invalid_argument);
}

TEST(ImplementChannel, Examples) {
    auto inst = cnot_instance();
    EXPECT_LT(trace_distance(implement_channel(inst, plus_state(2)), maximally_mixed(2)), 1e-12);

    auto d2 = dephasing_catalysis(DegeneracyVector({2}));
    Mat out = implement_channel(d2, plus_state(4));
    EXPECT_LT(trace_distance(out, maximally_mixed(4)), 1e-12);
    EXPECT_NEAR(von_neumann(out) - von_neumann(plus_state(4)), 2.0, 1e-10);

    for (const auto& i : {inst, d2})
        EXPECT_LT(trace_distance(implement_channel(i, maximally_mixed(i.da())), maximally_mixed(i.da())), 1e-9);
    EXPECT_THROW(implement_channel(inst, DensityOperator{maximally_mixed(3), SubsystemLayout({3})}), std::invalid_argument);
}

TEST(Kraus, Examples) {
    auto inst = cnot_instance();
    auto k = channel_to_kraus(inst);
    EXPECT_EQ(k.ops.size(), 2u);
    EXPECT_LT(k.completeness_defect(), 1e-12);
    Rng rng(9);
    for (int t = 0; t < 50; ++t) {
        Mat rho = random_density(2, 2, rng);
        EXPECT_LT(trace_distance(k.apply(rho), implement_channel(inst, rho)), 1e-9);
    }

    Mat h = fourier_matrix(2);
    auto unitary_inst = canonical_form(UnitaryOperator{h, SubsystemLayout({2, 1})}, DensityOperator{ket0(1), SubsystemLayout({1})});
    auto ku = channel_to_kraus(unitary_inst);
    ASSERT_EQ(ku.ops.size(), 1u);
    EXPECT_NEAR(std::abs((ku.ops[0].adjoint() * h).trace()), 2.0, 1e-12);

    auto d2 = dephasing_catalysis(DegeneracyVector({2}));
    auto kd = channel_to_kraus(d2);
    ASSERT_EQ(kd.ops.size(), 4u);
    for (const auto& op : kd.ops) {
        // each op is a phase times Z^k / 2
        bool matched = false;
        for (long p = 0; p < 4; ++p) {
            cd ov = (clock(4, p).adjoint() * op).trace() / 4.0;
            if (std::abs(std::abs(ov) - 0.5) < 1e-12 && (op - ov * clock(4, p)).norm() < 1e-12) matched = true;
        }
        EXPECT_TRUE(matched);
    }
    for (int t = 0; t < 50; ++t) {
        Mat rho = random_density(4, 4, rng);
        EXPECT_LT(trace_distance(kd.apply(rho), implement_channel(d2, rho)), 1e-9);
    }
}

TEST(SubCatalyses, Examples) {
    // block compatible unitary for diag(1/2,1/4,1/4): identity on block 1, CNOT-like dephasing on block 2
    Mat s = Mat::Zero(3, 3);
    s(0, 0) = 0.5;
    s(1, 1) = s(2, 2) = 0.25;
    auto cl = classical_catalysis({0.5, 0.25, 0.25}, {pauli(0), pauli(0), pauli(3)});
    Mat u = cl.U.matrix;
    CatalysisInstance inst = canonical_form(UnitaryOperator{u, SubsystemLayout({2, 3})}, DensityOperator{s, SubsystemLayout({3})});
    auto parts = decompose_subcatalyses(inst);
    ASSERT_EQ(parts.size(), 2u);
    EXPECT_NEAR(parts[0].weight, 0.5, 1e-12);
    EXPECT_NEAR(parts[1].weight, 0.5, 1e-12);
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        Mat rho = random_density(2, 2, rng);
        Mat mix = Mat::Zero(2, 2);
        for (const auto& p : parts) mix += p.weight * implement_channel(p.instance, rho);
        EXPECT_LT(trace_distance(mix, implement_channel(inst, rho)), 1e-9);
    }
    for (const auto& p : parts) {
        EXPECT_LT(unitarity_defect(p.instance.U.matrix), 1e-9);
        EXPECT_LT(verify_catalysis_exhaustive(p.instance.U, p.instance.sigma, 16, 1).max_deviation, 1e-9);
    }

    auto c3 = classical_catalysis({1.0 / 3, 1.0 / 3, 1.0 / 3}, {clock(3, 0), clock(3, 1), clock(3, 2)});
    auto blocks = decompose_subcatalyses(c3);
    EXPECT_EQ(blocks.size(), 3u);
    for (const auto& b : blocks) EXPECT_EQ(b.instance.db(), 1);

    Mat h = fourier_matrix(2);
    auto unitary_inst = canonical_form(UnitaryOperator{h, SubsystemLayout({2, 1})}, DensityOperator{ket0(1), SubsystemLayout({1})});
    EXPECT_EQ(decompose_subcatalyses(unitary_inst).size(), 1u);

    // a unitary that mixes eigenspaces is reported with the offending block
    CatalysisInstance broken = inst;
    Mat perm = Mat::Zero(3, 3);
    perm(0, 1) = perm(1, 0) = perm(2, 2) = 1;
    broken.U.matrix = kron(Mat(Mat::Identity(2, 2)), perm) * u;
    try {
        decompose_subcatalyses(broken);
        FAIL() << "expected an error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("eigenprojector 0"), std::string::npos);
    }
}

TEST(Classical, Examples) {
    auto deph = classical_catalysis({0.5, 0.5}, {pauli(0), pauli(3)});
    EXPECT_TRUE(deph.classical);
    EXPECT_LT(trace_distance(implement_channel(deph, plus_state(2)), maximally_mixed(2)), 1e-12);

    Mat h = fourier_matrix(2);
    auto single = classical_catalysis({1.0}, {h});
    Rng rng(3);
    Mat rho = random_density(2, 2, rng);
    EXPECT_LT(trace_distance(implement_channel(single, rho), h * rho * h.adjoint()), 1e-12);

    auto dep = classical_catalysis({0.25, 0.25, 0.25, 0.25}, {pauli(0), pauli(1), pauli(2), pauli(3)});
    for (int t = 0; t < 10; ++t) {
        Mat r = random_density(2, 2, rng);
        EXPECT_LT(trace_distance(implement_channel(dep, r), maximally_mixed(2)), 1e-12);
    }
    EXPECT_THROW(classical_catalysis({0.5, 0.6}, {pauli(0), pauli(3)}), std::invalid_argument);
}

TEST(Ledger, Examples) {
    ledger_audit().reset();
    auto d2 = dephasing_catalysis(DegeneracyVector({2}));
    auto rec = ledger(d2, plus_state(4));
    EXPECT_NEAR(rec.I_before, 0.0, 1e-12);
    EXPECT_NEAR(rec.I_after, 2.0, 1e-10);
    EXPECT_LE(rec.residual, 1e-8);

    Mat h = fourier_matrix(2);
    auto unitary_inst = canonical_form(UnitaryOperator{h, SubsystemLayout({2, 1})}, DensityOperator{ket0(1), SubsystemLayout({1})});
    auto ru = ledger(unitary_inst, plus_state(2));
    EXPECT_NEAR(ru.I_before, 0.0, 1e-12);
    EXPECT_NEAR(ru.I_after, 0.0, 1e-10);

    // identity channel with a correlated intermediate: nothing changes
    Rng rng(8);
    Mat sigma_ab = random_density(4, 4, rng);
    Mat rho = random_density(2, 2, rng);
    auto ri = ledger(Mat(Mat::Identity(8, 8)), {2}, {2}, {2}, sigma_ab, rho);
    EXPECT_NEAR(ri.I_after, ri.I_before, 1e-10);
    EXPECT_GE(ledger_audit().count(), 3);
    EXPECT_LE(ledger_audit().max_residual(), 1e-8);

    // a swap with the catalyst is not a catalysis
    EXPECT_THROW(ledger(swap_operator(2, 2), {2}, {}, {2}, ket0(2), plus_state(2)), std::invalid_argument);
}

TEST(Ledger, PureStateAccountingMatchesDense) {
    Rng rng(12);
    auto inst = multiparty_catalysis(2);
    Vec in = haar_vector(4, rng);
    Vec cat = gamma_vector(2) / std::sqrt(2.0);   // C with its purifier P
    Vec before = kronv(in, cat);                   // A, C, P
    Vec after = apply_local(before, {4, 2, 2}, inst.U.matrix, {0, 1});
    auto rp = ledger_pure(before, after, {4, 2, 2}, {0}, {}, {1});
    auto rd = ledger(inst, Mat(in * in.adjoint()));
    EXPECT_NEAR(rp.I_after, rd.I_after, 1e-9);
    EXPECT_NEAR(rp.S_out, rd.S_out, 1e-9);
    EXPECT_LE(rp.residual, 1e-8);
}

TEST(CostBound, Examples) {
    auto d2 = dephasing_catalysis(DegeneracyVector({2}));
    auto c = cost_bound_check(d2, 16, 1);
    EXPECT_NEAR(c.lhs, 1.0, 1e-12);
    EXPECT_NEAR(c.rhs, 1.0, 1e-9);
    EXPECT_TRUE(c.ok);

    Mat h = fourier_matrix(2);
    auto unitary_inst = canonical_form(UnitaryOperator{h, SubsystemLayout({2, 1})}, DensityOperator{ket0(1), SubsystemLayout({1})});
    auto cu = cost_bound_check(unitary_inst, 16, 1);
    EXPECT_NEAR(cu.rhs, 0.0, 1e-9);
    EXPECT_TRUE(cu.ok);

    auto cl = classical_catalysis({0.5, 0.5}, {pauli(0), pauli(3)});
    auto cc = cost_bound_check(cl, 16, 1);
    EXPECT_NEAR(cc.lhs, 1.0, 1e-12);
    EXPECT_NEAR(cc.rhs, 1.0, 1e-9);
    EXPECT_TRUE(cc.ok);
}

TEST(Recovery, IdentityOfEvolutions) {
    auto check = [](const CatalysisInstance& inst, int samples, std::uint64_t seed) {
        auto rec = recovery_unitary(inst);
        auto psi = purify(inst.sigma);
        const long da = inst.da(), db = inst.db();
        std::vector<int> dims{static_cast<int>(da), static_cast<int>(db), static_cast<int>(db)};
        Rng rng(seed);
        double worst = 0;
        for (int t = 0; t < samples; ++t) {
            Vec k = haar_vector(da, rng);
            Vec full = kronv(k, psi.amplitudes);
            Vec v1 = apply_local(full, dims, inst.U.matrix, {0, 1});
            Vec v2 = apply_local(full, dims, rec.matrix, {0, 2});
            worst = std::max(worst, trace_distance(Mat(v1 * v1.adjoint()), Mat(v2 * v2.adjoint())));
        }
        return worst;
    };
    EXPECT_LT(check(cnot_instance(), 5, 1), 1e-10);
    EXPECT_LT(check(dephasing_catalysis(DegeneracyVector({2})), 20, 2), 1e-9);
    EXPECT_LT(check(dephasing_catalysis(DegeneracyVector({1, 2})), 20, 3), 1e-9);

    Mat h = fourier_matrix(2);
    auto unitary_inst = canonical_form(UnitaryOperator{h, SubsystemLayout({2, 1})}, DensityOperator{ket0(1), SubsystemLayout({1})});
    EXPECT_LT((recovery_unitary(unitary_inst).matrix - h).norm(), 1e-14);

    auto cl = classical_catalysis({1.0, 0.0}, {pauli(0), pauli(3)});
    EXPECT_THROW(recovery_unitary(cl), std::invalid_argument);
}

TEST(Closure, AdjointAndPartySwap) {
    std::vector<CatalysisInstance> all{cnot_instance(), dephasing_catalysis(DegeneracyVector({2})),
                                       dephasing_catalysis(DegeneracyVector({1, 2})), multiparty_catalysis(2)};
    for (const auto& inst : all) {
        auto dims = inst.dims();
        Mat f = swap_operator(inst.da(), inst.db());
        Mat fuf = f * inst.U.matrix * f.adjoint();
        EXPECT_TRUE(is_catalysis_unitary(inst.U.matrix.adjoint(), dims, inst.a_indices()).verdict);
        EXPECT_TRUE(is_catalysis_unitary(fuf, {static_cast<int>(inst.db()), static_cast<int>(inst.da())}, {0}).verdict);
    }
}

TEST(EigenspacePreservation, ProjectedCatalystsAreCompatible) {
    auto inst = dephasing_catalysis(DegeneracyVector({1, 2}));
    auto dec = eigenspace_decompose(inst.sigma.matrix, 1e-8);
    for (std::size_t i = 0; i < dec.projectors.size(); ++i) {
        Mat pi = dec.projectors[i] / static_cast<double>(dec.multiplicities[i]);
        EXPECT_TRUE(check_compatibility(inst.U, DensityOperator{pi, inst.layout_b}).verdict);
    }
}
