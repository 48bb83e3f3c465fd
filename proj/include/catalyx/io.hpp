// io.hpp — JSON interchange for operators, states, channels and reports

#pragma once

#include "optimize.hpp"
#include "scenarios.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>

namespace catalyx {

using json = nlohmann::json;

// Malformed or inconsistent input files.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- matrices ----

inline json real_part(const Mat& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (long j = 0; j < m.cols(); ++j) r.push_back(m(i, j).real());
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json imag_part(const Mat& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (long j = 0; j < m.cols(); ++j) r.push_back(m(i, j).imag());
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json layout_json(const SubsystemLayout& l) {
    json j{{"dims", l.dims}};
    if (!l.labels.empty()) j["labels"] = l.labels;
    return j;
}

inline json operator_json(const Mat& m, const SubsystemLayout& l) {
    json j = layout_json(l);
    j["re"] = real_part(m);
    j["im"] = imag_part(m);
    return j;
}

inline json state_json(const Vec& v, const SubsystemLayout& l) {
    json j = layout_json(l);
    std::vector<double> re(static_cast<std::size_t>(v.size())), im(static_cast<std::size_t>(v.size()));
    for (long i = 0; i < v.size(); ++i) {
        re[static_cast<std::size_t>(i)] = v(i).real();
        im[static_cast<std::size_t>(i)] = v(i).imag();
    }
    j["amps_re"] = re;
    j["amps_im"] = im;
    return j;
}

namespace detail {

inline std::vector<std::vector<double>> rows_of(const json& j, const char* key) {
    if (!j.contains(key)) throw parse_error(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw parse_error(std::string("field \"") + key + "\" must be an array of numeric rows");
    }
}

inline SubsystemLayout layout_of(const json& j, long total) {
    if (!j.contains("dims")) throw parse_error("missing field \"dims\"");
    std::vector<int> dims;
    std::vector<std::string> labels;
    try {
        dims = j.at("dims").get<std::vector<int>>();
        if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw parse_error("\"dims\" must be an integer array and \"labels\" a string array");
    }
    if (dims.empty()) throw parse_error("\"dims\" is empty");
    long n = 1;
    for (int d : dims) {
        if (d < 1) throw parse_error("\"dims\" entries must be positive");
        n *= d;
    }
    if (n != total) throw parse_error("dims product " + std::to_string(n) + " does not match payload size " + std::to_string(total));
    try {
        return SubsystemLayout(dims, labels);
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
}

// Rectangular complex matrix from "re"/"im" rows; "im" may be omitted.
inline Mat matrix_of(const json& j) {
    auto re = rows_of(j, "re");
    std::vector<std::vector<double>> im;
    if (j.contains("im")) im = rows_of(j, "im");
    if (re.empty()) throw parse_error("empty matrix");
    const std::size_t cols = re[0].size();
    if (cols == 0) throw parse_error("empty matrix row");
    if (!im.empty() && im.size() != re.size()) throw parse_error("\"re\" and \"im\" row counts differ");
    Mat m(static_cast<long>(re.size()), static_cast<long>(cols));
    for (std::size_t r = 0; r < re.size(); ++r) {
        if (re[r].size() != cols || (!im.empty() && im[r].size() != cols)) throw parse_error("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<long>(r), static_cast<long>(c)) = cd(re[r][c], im.empty() ? 0.0 : im[r][c]);
    }
    return m;
}

}  // namespace detail

struct OperatorFile {
    Mat matrix;
    SubsystemLayout layout;
};

inline OperatorFile operator_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("operator payload must be an object");
    Mat m = detail::matrix_of(j);
    if (m.rows() != m.cols()) throw parse_error("operator is not square");
    return {m, detail::layout_of(j, m.rows())};
}

inline StateVector state_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("state payload must be an object");
    std::vector<double> re, im;
    try {
        re = j.at("amps_re").get<std::vector<double>>();
        if (j.contains("amps_im")) im = j.at("amps_im").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw parse_error("state needs numeric \"amps_re\" (and optional \"amps_im\") arrays");
    }
    if (re.empty()) throw parse_error("empty state");
    if (!im.empty() && im.size() != re.size()) throw parse_error("\"amps_re\" and \"amps_im\" lengths differ");
    Vec v(static_cast<long>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) v(static_cast<long>(i)) = cd(re[i], im.empty() ? 0.0 : im[i]);
    return {v, detail::layout_of(j, v.size())};
}

// Either an operator payload or a state payload; states come back as projectors.
inline OperatorFile density_from_json(const json& j) {
    if (j.is_object() && j.contains("amps_re")) {
        auto s = state_from_json(j);
        return {s.amplitudes * s.amplitudes.adjoint() / s.amplitudes.squaredNorm(), s.layout};
    }
    return operator_from_json(j);
}

inline json kraus_json(const KrausChannel& k) {
    json ops = json::array();
    for (const auto& m : k.ops) ops.push_back(json{{"re", real_part(m)}, {"im", imag_part(m)}});
    return json{{"kraus", ops}};
}

inline KrausChannel kraus_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kraus") || !j.at("kraus").is_array()) throw parse_error("channel needs a \"kraus\" array");
    std::vector<Mat> ops;
    for (const auto& o : j.at("kraus")) ops.push_back(detail::matrix_of(o));
    try {
        KrausChannel k(ops);
        if (k.completeness_defect() > 1e-8) throw parse_error("Kraus operators are not trace preserving");
        return k;
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
}

// ---- files ----

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

// ---- reports ----

inline std::string alpha_key(double a) {
    if (std::isinf(a) || a > 1e9) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

inline json renyi_map_json(const std::map<double, double>& m) {
    json j = json::object();
    for (const auto& [a, v] : m) j[alpha_key(a)] = v;
    return j;
}

inline json to_json(const EntropyReport& r) {
    return json{{"vn", r.vn},
                {"renyi", renyi_map_json(r.renyi)},
                {"min", r.min},
                {"max", r.max},
                {"catalytic_vn", r.catalytic_vn},
                {"catalytic_renyi", renyi_map_json(r.catalytic_renyi)},
                {"catalytic_min", r.catalytic_min},
                {"catalytic_max", r.catalytic_max},
                {"avg_degeneracy", r.avg_degeneracy}};
}

inline json to_json(const LedgerRecord& r) {
    return json{{"I_before", r.I_before}, {"I_after", r.I_after}, {"S_in", r.S_in}, {"S_out", r.S_out}, {"residual", r.residual}};
}

inline json to_json(const Certification& c) {
    return json{{"defect", c.defect},
                {"entropy_gap", c.entropy_gap},
                {"max_deviation", c.max_deviation},
                {"timestamp", c.timestamp},
                {"seed", c.seed}};
}

inline json bundle_json(const CatalysisInstance& inst, const std::string& unitary_file, const std::string& sigma_file) {
    return json{{"unitary_file", unitary_file},
                {"sigma_file", sigma_file},
                {"layout", json{{"a", layout_json(inst.layout_a)}, {"b", layout_json(inst.layout_b)}}},
                {"classical", inst.classical},
                {"canonical_V_applied", inst.canonical_V.has_value()},
                {"certification", to_json(inst.certification)}};
}

inline json to_json(const ScenarioTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json m = json::object();
        for (const auto& [k, v] : s.marginals) m[k] = v;
        steps.push_back(json{{"actor", s.actor}, {"operation", s.operation}, {"ledger", to_json(s.ledger)}, {"marginals", m}});
    }
    return json{{"scenario", t.name}, {"seed", t.seed}, {"config", t.config}, {"notes", t.notes}, {"steps", steps}};
}

inline json to_json(const OptimizationResult& r) {
    json j{{"value", r.value},
           {"iterations", r.iterations},
           {"restarts", r.restarts},
           {"converged", r.converged},
           {"gradient_norm_at_end", r.gradient_norm_at_end},
           {"stationarity_gap", r.stationarity_gap}};
    const int d = static_cast<int>(r.argmax.rows());
    j["argmax"] = operator_json(r.argmax, SubsystemLayout({d}));
    if (r.argmax_vector.size() > 0) {
        const int da = static_cast<int>(std::lround(std::sqrt(static_cast<double>(r.argmax_vector.size()))));
        j["argmax_vector"] = state_json(r.argmax_vector, SubsystemLayout({da, da}, {"R", "A"}));
    }
    return j;
}

inline json to_json(const TradeoffReport& r) {
    return json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.ok}, {"capacity", r.capacity}, {"capacity_upper", r.capacity_upper}};
}

inline json to_json(const Tolerances& t) {
    return json{{"unitary", t.unitary}, {"herm", t.herm},   {"psd", t.psd},
                {"state", t.state},     {"norm", t.norm},   {"group", t.group},
                {"multiplicity", t.multiplicity}};
}

// "tol.<field>=<value>" overrides; unknown keys are rejected.
inline void apply_tolerance_override(Tolerances& t, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw parse_error("tolerance override must look like tol.<name>=<value>: " + kv);
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    double v = 0;
    try {
        std::size_t used = 0;
        v = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
        throw parse_error("tolerance override value is not a number: " + kv);
    }
    if (!(v > 0)) throw parse_error("tolerance override must be positive: " + kv);
    const std::map<std::string, double Tolerances::*> fields{
        {"tol.unitary", &Tolerances::unitary}, {"tol.herm", &Tolerances::herm},   {"tol.psd", &Tolerances::psd},
        {"tol.state", &Tolerances::state},     {"tol.norm", &Tolerances::norm},   {"tol.group", &Tolerances::group},
        {"tol.multiplicity", &Tolerances::multiplicity}};
    auto it = fields.find(key);
    if (it == fields.end()) {
        std::string names;
        for (const auto& [k, p] : fields) names += (names.empty() ? "" : ", ") + k;
        throw parse_error("unknown tolerance key " + key + " (valid: " + names + ")");
    }
    t.*(it->second) = v;
}

}  // namespace catalyx
