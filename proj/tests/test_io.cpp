#include <catalyx/catalyx.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace catalyx;

TEST(Json, OperatorRoundTrip) {
    Rng rng(1);
    Mat u = haar_unitary(4, rng);
    SubsystemLayout l({2, 2}, {"A", "C"});
    auto back = operator_from_json(json::parse(operator_json(u, l).dump()));
    EXPECT_EQ((back.matrix - u).norm(), 0.0);
    EXPECT_EQ(back.layout.dims, l.dims);
    EXPECT_EQ(back.layout.labels, l.labels);
}

TEST(Json, StateRoundTripAndProjector) {
    Rng rng(2);
    Vec v = haar_vector(6, rng);
    SubsystemLayout l({2, 3});
    auto s = state_from_json(json::parse(state_json(v, l).dump()));
    EXPECT_EQ((s.amplitudes - v).norm(), 0.0);
    auto rho = density_from_json(state_json(v, l));
    EXPECT_NEAR((rho.matrix - v * v.adjoint()).norm(), 0.0, 1e-14);
}

TEST(Json, ImaginaryPartOptional) {
    auto f = operator_from_json(json::parse(R"({"dims":[2],"re":[[0.5,0],[0,0.5]]})"));
    EXPECT_NEAR((f.matrix - maximally_mixed(2)).norm(), 0.0, 1e-15);
}

TEST(Json, RejectsInconsistentPayloads) {
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[2],"re":[[1,0,0],[0,1,0]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[3],"re":[[1,0],[0,1]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[2],"re":[[1,0],[0]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"re":[[1]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[1],"re":[["x"]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[2],"re":[[1,0],[0,1]],"im":[[0,0]]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse(R"({"dims":[2],"labels":["A","B"],"re":[[1,0],[0,1]]})")), parse_error);
    EXPECT_THROW(state_from_json(json::parse(R"({"dims":[2],"amps_re":[1,0,0]})")), parse_error);
    EXPECT_THROW(state_from_json(json::parse(R"({"dims":[2],"amps_re":[1,0],"amps_im":[0]})")), parse_error);
    EXPECT_THROW(operator_from_json(json::parse("[1,2]")), parse_error);
}

TEST(Json, KrausRoundTripAndValidation) {
    auto k = dephasing_channel(3);
    auto back = kraus_from_json(json::parse(kraus_json(k).dump()));
    ASSERT_EQ(back.ops.size(), k.ops.size());
    for (std::size_t i = 0; i < k.ops.size(); ++i) EXPECT_EQ((back.ops[i] - k.ops[i]).norm(), 0.0);
    EXPECT_THROW(kraus_from_json(json::parse(R"({"kraus":[{"re":[[1,0],[0,0]]}]})")), parse_error);
    EXPECT_THROW(kraus_from_json(json::parse(R"({"kraus":[{"re":[[1,0],[0,1]]},{"re":[[1]]}]})")), parse_error);
    EXPECT_THROW(kraus_from_json(json::parse(R"({"ops":[]})")), parse_error);
}

TEST(Json, EntropyReportKeys) {
    Mat rho = Mat::Zero(3, 3);
    rho.diagonal() << 0.5, 0.25, 0.25;
    auto j = to_json(entropy_report(rho, {0.5, 2.0, inf}, tol().group));
    for (const char* k : {"vn", "renyi", "min", "max", "catalytic_vn", "catalytic_renyi", "catalytic_min", "catalytic_max", "avg_degeneracy"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_NEAR(j["vn"].get<double>(), 1.5, 1e-12);
    EXPECT_NEAR(j["catalytic_vn"].get<double>(), 2.0, 1e-12);
    EXPECT_TRUE(j["renyi"].contains("0.5"));
    EXPECT_TRUE(j["renyi"].contains("2"));
    EXPECT_TRUE(j["renyi"].contains("inf"));
    EXPECT_EQ(alpha_key(inf), "inf");
}

TEST(Json, BundleAndTraceAndResult) {
    auto inst = dephasing_catalysis(DegeneracyVector({2}));
    auto b = bundle_json(inst, "u.json", "s.json");
    EXPECT_EQ(b["unitary_file"], "u.json");
    EXPECT_EQ(b["layout"]["b"]["dims"], json::array({2}));
    EXPECT_TRUE(b["certification"].contains("timestamp"));
    EXPECT_LE(b["certification"]["defect"].get<double>(), 1e-9);

    auto tr = to_json(multiparty_refuel(2, 2, 7));
    EXPECT_EQ(tr["seed"], 7);
    EXPECT_EQ(tr["steps"].size(), 2u);
    EXPECT_TRUE(tr["steps"][1]["marginals"].contains("I(A:C)"));

    auto r = to_json(max_entropy_production_global(dephasing_channel(2), 1.0, 2, 1));
    EXPECT_EQ(r["argmax"]["dims"], json::array({4}));
    EXPECT_EQ(r["argmax_vector"]["dims"], json::array({2, 2}));
    auto psi = state_from_json(r["argmax_vector"]);
    EXPECT_NEAR(psi.amplitudes.norm(), 1.0, 1e-12);
}

TEST(Tolerances, NamespacedOverrides) {
    Tolerances t;
    apply_tolerance_override(t, "tol.unitary=1e-6");
    apply_tolerance_override(t, "tol.group=2.5e-7");
    EXPECT_EQ(t.unitary, 1e-6);
    EXPECT_EQ(t.group, 2.5e-7);
    EXPECT_THROW(apply_tolerance_override(t, "unitary=1e-6"), parse_error);
    EXPECT_THROW(apply_tolerance_override(t, "tol.bogus=1"), parse_error);
    EXPECT_THROW(apply_tolerance_override(t, "tol.psd=abc"), parse_error);
    EXPECT_THROW(apply_tolerance_override(t, "tol.psd=-1"), parse_error);
    EXPECT_THROW(apply_tolerance_override(t, "tol.psd"), parse_error);
    EXPECT_EQ(to_json(t)["unitary"], 1e-6);
}

TEST(Files, AtomicWriteAndRead) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "catalyx_io_test";
    fs::remove_all(dir);
    const std::string path = (dir / "sub" / "x.json").string();
    write_atomic(path, R"({"a":1})");
    EXPECT_FALSE(fs::exists(path + ".tmp"));
    EXPECT_EQ(read_json_file(path)["a"], 1);
    write_atomic(path, "{oops");
    EXPECT_THROW(read_json_file(path), parse_error);
    EXPECT_THROW(read_json_file((dir / "missing.json").string()), parse_error);
    fs::remove_all(dir);
}
