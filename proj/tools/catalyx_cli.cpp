// catalyx command-line front end

#include <catalyx/catalyx.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <regex>
#include <set>

using namespace catalyx;

namespace {

// Bad flags, unknown kinds, unreadable inputs: exit 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    std::vector<std::string> tol_overrides;
};

struct Outcome {
    json result = json::object();
    std::map<std::string, std::string> config;
    std::vector<std::string> summary;
    std::optional<ScenarioTrace> trace;
    bool ok = true;
};

std::string fmt(const char* pattern, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
    return s;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

double parse_alpha(const std::string& s) {
    if (s == "inf" || s == "infinity") return inf;
    try {
        std::size_t used = 0;
        double a = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return a;
    } catch (const std::exception&) {
        throw usage_error("invalid alpha: " + s);
    }
}

// ---- flattened CSV for non-trace results ----

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
    } else if (j.is_number_float()) {
        rows.emplace_back(prefix, format_g12(j.get<double>()));
    } else if (j.is_string()) {
        rows.emplace_back(prefix, j.get<std::string>());
    } else {
        rows.emplace_back(prefix, j.dump());
    }
}

std::string render(const std::string& command, const Globals& g, const Outcome& o) {
    if (g.format == "csv") {
        std::string s = "# command=" + command + "\n# seed=" + std::to_string(g.seed) + "\n";
        for (const auto& [k, v] : o.config) s += "# " + k + "=" + v + "\n";
        if (o.trace) return s + to_csv(*o.trace);
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(o.result, "", rows);
        s += "key,value\n";
        for (const auto& [k, v] : rows) s += k + "," + v + "\n";
        return s;
    }
    json env{{"command", command},
             {"seed", g.seed},
             {"config", o.config},
             {"tolerances", to_json(tol())},
             {"ok", o.ok},
             {"result", o.result}};
    return env.dump(2) + "\n";
}

// ---- shared inputs ----

KrausChannel channel_from_name(const std::string& name) {
    static const std::regex pat("(dephasing|erasure|identity|depolarizing|initialization)([0-9]+)");
    std::smatch m;
    if (std::regex_match(name, m, pat)) {
        const long d = std::stol(m[2].str());
        if (d < 2 || d > 64) throw usage_error("channel dimension must be in [2, 64]: " + name);
        const std::string kind = m[1].str();
        if (kind == "dephasing") return dephasing_channel(d);
        if (kind == "erasure") return replacer_channel(d);
        if (kind == "identity") return identity_channel(d);
        if (kind == "depolarizing") return depolarizing_channel(d);
        return initialization_channel(d);
    }
    if (!std::filesystem::exists(name))
        throw usage_error("unknown channel " + name +
                          " (use dephasingN, erasureN, identityN, depolarizingN, initializationN or a Kraus JSON file)");
    return kraus_from_json(read_json_file(name));
}

OperatorFile read_operator(const std::string& path) { return operator_from_json(read_json_file(path)); }

DensityOperator read_density(const std::string& path) {
    auto f = density_from_json(read_json_file(path));
    try {
        return make_density(f.matrix, f.layout);
    } catch (const std::invalid_argument& e) {
        throw usage_error(path + ": " + e.what());
    }
}

UnitaryOperator read_unitary(const std::string& path, const std::vector<int>& layout) {
    auto f = read_operator(path);
    SubsystemLayout l = f.layout;
    if (!layout.empty()) {
        long n = 1;
        for (int d : layout) n *= d;
        if (n != f.matrix.rows()) throw usage_error("--layout product does not match the unitary dimension");
        l = SubsystemLayout(layout);
    }
    try {
        return make_unitary(f.matrix, l);
    } catch (const std::invalid_argument& e) {
        throw usage_error(path + ": " + e.what());
    }
}

// The catalyst is the trailing `catalyst` subsystems of U's layout.
SubsystemLayout catalyst_layout(const UnitaryOperator& u, int catalyst) {
    if (catalyst < 1 || catalyst >= static_cast<int>(u.layout.size()))
        throw usage_error("--catalyst must leave at least one system subsystem (layout has " + std::to_string(u.layout.size()) + ")");
    const int n = static_cast<int>(u.layout.size());
    return u.layout.subset(range_indices(n - catalyst, n));
}

json instance_json(const CatalysisInstance& inst) {
    json j{{"defect", inst.certification.defect},
           {"entropy_gap", inst.certification.entropy_gap},
           {"max_deviation", inst.certification.max_deviation},
           {"catalytic_entropy", catalytic_entropy(eigenspace_decompose(inst.sigma.matrix, tol().group))},
           {"layout_a", layout_json(inst.layout_a)},
           {"layout_b", layout_json(inst.layout_b)}};
    return j;
}

// Options given on `sub` outside `allowed` are rejected.
void restrict_options(CLI::App* sub, const std::string& what, const std::set<std::string>& allowed) {
    for (const CLI::Option* o : sub->get_options()) {
        const std::string n = o->get_name();
        if (o->count() == 0 || n == "--help" || n == "kind" || n == "name" || n == "target") continue;
        if (!allowed.count(n)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : " ") + a;
            throw usage_error(n + " does not apply to " + what + " (accepted: " + (list.empty() ? "none" : list) + ")");
        }
    }
}

// ---- verify ----

struct VerifyArgs {
    std::string unitary, sigma;
    std::vector<int> layout;
    int catalyst = 1;
    int samples = 64;
};

Outcome cmd_verify(const VerifyArgs& a, const Globals& g) {
    Outcome o;
    auto u = read_unitary(a.unitary, a.layout);
    auto lb = catalyst_layout(u, a.catalyst);
    const int n = static_cast<int>(u.layout.size());
    o.config = {{"unitary", a.unitary}, {"layout", join(u.layout.dims)}, {"catalyst", std::to_string(a.catalyst)},
                {"samples", std::to_string(a.samples)}};
    auto pt = is_catalysis_unitary(u, range_indices(0, n - a.catalyst));
    o.result["pt_unitary"] = pt.verdict;
    o.result["defect"] = pt.defect;
    o.ok = pt.verdict;
    o.summary.push_back("partial transpose defect = " + fmt("%.3e", pt.defect) + (pt.verdict ? " (pass)" : " (fail)"));
    if (!a.sigma.empty()) {
        o.config["sigma"] = a.sigma;
        auto sigma = read_density(a.sigma);
        if (sigma.layout.dims != lb.dims)
            throw usage_error("sigma dims [" + join(sigma.layout.dims) + "] do not match the catalyst subsystems [" + join(lb.dims) + "]");
        sigma.layout = lb;
        if (pt.verdict) {
            auto c = check_compatibility(u, sigma);
            auto ex = verify_catalysis_exhaustive(u, sigma, a.samples, g.seed);
            const bool preserved = ex.max_deviation <= tol().state;
            o.result["compatible"] = c.verdict;
            o.result["entropy_gap"] = c.entropy_gap;
            o.result["max_deviation"] = ex.max_deviation;
            o.result["spectrum_matched"] = ex.implied_V.has_value();
            o.ok = c.verdict && preserved;
            o.summary.push_back("entropy gap = " + fmt("%.3e", c.entropy_gap) + (c.verdict ? " (pass)" : " (fail)"));
            o.summary.push_back("max catalyst deviation = " + fmt("%.3e", ex.max_deviation) + (preserved ? " (pass)" : " (fail)"));
        } else {
            o.result["compatible"] = false;
        }
    }
    o.summary.push_back(o.ok ? "verdict: catalysis" : "verdict: not a catalysis");
    return o;
}

// ---- entropy ----

struct EntropyArgs {
    std::string state;
    std::vector<std::string> alphas{"0.5", "2", "inf"};
    double group_tol = -1;
};

Outcome cmd_entropy(const EntropyArgs& a) {
    Outcome o;
    std::vector<double> alphas;
    for (const auto& s : a.alphas) alphas.push_back(parse_alpha(s));
    const double gt = a.group_tol > 0 ? a.group_tol : tol().group;
    auto rho = read_density(a.state);
    EntropyReport r;
    try {
        r = entropy_report(rho.matrix, alphas, gt);
    } catch (const std::invalid_argument& e) {
        throw usage_error(e.what());
    }
    o.config = {{"state", a.state}, {"alpha", join(a.alphas)}, {"group_tol", format_g12(gt)}};
    o.result = to_json(r);
    o.summary.push_back("S = " + fmt("%.6f", r.vn) + " bits");
    for (const auto& [al, v] : r.renyi) o.summary.push_back("S_" + alpha_key(al) + " = " + fmt("%.6f", v) + " bits");
    o.summary.push_back("S_min = " + fmt("%.6f", r.min) + " bits");
    o.summary.push_back("S_max = " + fmt("%.6f", r.max) + " bits");
    o.summary.push_back("S_cat = " + fmt("%.6f", r.catalytic_vn) + " bits");
    for (const auto& [al, v] : r.catalytic_renyi) o.summary.push_back("S_cat_" + alpha_key(al) + " = " + fmt("%.6f", v) + " bits");
    o.summary.push_back("S_cat_min = " + fmt("%.6f", r.catalytic_min) + " bits");
    o.summary.push_back("S_cat_max = " + fmt("%.6f", r.catalytic_max) + " bits");
    o.summary.push_back("avg degeneracy = " + fmt("%.6f", r.avg_degeneracy) + " bits");
    return o;
}

// ---- construct ----

struct ConstructArgs {
    std::string kind;
    std::vector<int> r;
    int d = 0, m = 0, lM = -1;
    std::vector<double> spectrum;
    std::string sigma;
    double e_inf = 0;
};

const std::vector<std::string>& construct_kinds() {
    static const std::vector<std::string> k{"dephasing",       "max_extraction", "initialization_classical",
                                            "initialization_masking", "double_random", "multiparty",
                                            "erasure",         "conserved_optimal", "angular_momentum",
                                            "thermal_levels"};
    return k;
}

struct Artifacts {
    std::vector<std::pair<std::string, json>> files;   // (suffix, payload)
};

Outcome cmd_construct(const ConstructArgs& a, CLI::App* sub, Artifacts& art) {
    Outcome o;
    o.config["kind"] = a.kind;
    auto need_d = [&](int deflt) {
        const int d = a.d > 0 ? a.d : deflt;
        o.config["d"] = std::to_string(d);
        return d;
    };
    auto need_r = [&]() {
        if (a.r.empty()) throw usage_error(a.kind + " needs --r");
        o.config["r"] = join(a.r);
        try {
            return DegeneracyVector(a.r);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
    };
    auto emit_instance = [&](const CatalysisInstance& inst) {
        o.result = instance_json(inst);
        o.result["bundle"] = bundle_json(inst, a.kind + "_unitary.json", a.kind + "_sigma.json");
        art.files.push_back({"_unitary.json", operator_json(inst.U.matrix, inst.U.layout)});
        art.files.push_back({"_sigma.json", operator_json(inst.sigma.matrix, inst.sigma.layout)});
        o.ok = inst.certification.defect <= tol().unitary && inst.certification.max_deviation <= tol().state;
        o.summary.push_back("S_cat = " + fmt("%.6f", o.result["catalytic_entropy"].get<double>()) + " bits");
        o.summary.push_back("partial transpose defect = " + fmt("%.3e", inst.certification.defect));
    };
    auto emit_generalized = [&](const GeneralizedCatalysis& gc) {
        const double defect = unitarity_defect(partial_transpose(gc.U, gc.layout.dims, gc.pt_cut));
        o.result = json{{"layout", layout_json(gc.layout)}, {"a1", gc.a1}, {"a2", gc.a2}, {"b", gc.b}, {"pt_cut", gc.pt_cut}, {"defect", defect},
                        {"unitary_file", a.kind + "_unitary.json"}, {"sigma_file", a.kind + "_sigma.json"}};
        std::vector<int> sdims;
        for (int i : gc.a2) sdims.push_back(gc.layout.dims[static_cast<std::size_t>(i)]);
        for (int i : gc.b) sdims.push_back(gc.layout.dims[static_cast<std::size_t>(i)]);
        art.files.push_back({"_unitary.json", operator_json(gc.U, gc.layout)});
        art.files.push_back({"_sigma.json", operator_json(gc.sigma, SubsystemLayout(sdims))});
        o.ok = defect <= tol().unitary;
        o.summary.push_back("partial transpose defect = " + fmt("%.3e", defect) + " on cut [" + join(gc.pt_cut) + "]");
    };

    if (a.kind == "dephasing") {
        restrict_options(sub, a.kind, {"--r"});
        emit_instance(dephasing_catalysis(need_r()));
    } else if (a.kind == "max_extraction") {
        restrict_options(sub, a.kind, {"--spectrum", "--sigma"});
        DensityOperator sigma;
        if (!a.sigma.empty()) {
            o.config["sigma"] = a.sigma;
            sigma = read_density(a.sigma);
        } else if (!a.spectrum.empty()) {
            std::string s;
            for (double x : a.spectrum) s += (s.empty() ? "" : ",") + format_g12(x);
            o.config["spectrum"] = s;
            Mat m = Mat::Zero(static_cast<long>(a.spectrum.size()), static_cast<long>(a.spectrum.size()));
            for (std::size_t i = 0; i < a.spectrum.size(); ++i) m(static_cast<long>(i), static_cast<long>(i)) = a.spectrum[i];
            try {
                sigma = make_density(m);
            } catch (const std::invalid_argument& e) {
                throw usage_error(std::string("--spectrum: ") + e.what());
            }
        } else {
            throw usage_error("max_extraction needs --spectrum or --sigma");
        }
        auto ex = max_extraction_catalysis(sigma);
        emit_instance(ex.inst);
        const double production = von_neumann(extraction_output(ex));
        o.result["production"] = production;
        o.result["R"] = ex.R;
        art.files.push_back({"_input.json", state_json(ex.input.amplitudes, ex.input.layout)});
        o.summary.push_back("production = " + fmt("%.6f", production) + " bits");
    } else if (a.kind == "initialization_classical") {
        restrict_options(sub, a.kind, {"--d"});
        emit_generalized(initialization_classical(need_d(3)));
    } else if (a.kind == "initialization_masking") {
        restrict_options(sub, a.kind, {"--m"});
        const int m = a.m > 0 ? a.m : 2;
        o.config["m"] = std::to_string(m);
        emit_generalized(initialization_masking(m));
    } else if (a.kind == "double_random") {
        restrict_options(sub, a.kind, {"--d"});
        const int d = need_d(2);
        std::vector<Mat> zs;
        for (long x = 0; x < d; ++x) zs.push_back(clock(d, x));
        emit_instance(double_random(d, zs, zs));
    } else if (a.kind == "multiparty") {
        restrict_options(sub, a.kind, {"--d"});
        emit_instance(multiparty_catalysis(need_d(2)));
    } else if (a.kind == "erasure") {
        restrict_options(sub, a.kind, {"--d"});
        emit_instance(erasure_catalysis(need_d(3)));
    } else if (a.kind == "conserved_optimal") {
        restrict_options(sub, a.kind, {"--r"});
        auto r = need_r();
        Mat s = conserved_optimal_catalyst(r);
        const double sc = catalytic_entropy(eigenspace_decompose(s, tol().group));
        o.result = json{{"catalytic_entropy", sc}, {"sigma_file", a.kind + "_sigma.json"}};
        art.files.push_back({"_sigma.json", operator_json(s, SubsystemLayout({static_cast<int>(s.rows())}))});
        o.summary.push_back("S_cat = " + fmt("%.6f", sc) + " bits");
    } else if (a.kind == "angular_momentum") {
        restrict_options(sub, a.kind, {"--lM"});
        const int l = a.lM >= 0 ? a.lM : 1;
        o.config["lM"] = std::to_string(l);
        auto c = angular_momentum_catalyst(l);
        o.result = json{{"s_cat", c.s_cat}, {"r", c.r.r}, {"sigma_file", a.kind + "_sigma.json"}};
        art.files.push_back({"_sigma.json", operator_json(c.sigma.matrix, c.sigma.layout)});
        o.summary.push_back("S_cat = " + fmt("%.6f", c.s_cat) + " bits");
    } else if (a.kind == "thermal_levels") {
        restrict_options(sub, a.kind, {"--r", "--e-inf"});
        auto r = need_r();
        o.config["e_inf"] = format_g12(a.e_inf);
        auto e = thermal_levels(r, a.e_inf);
        auto p = gibbs_populations(e, r);
        o.result = json{{"energies", e}, {"populations", p}};
        std::string line = "E =";
        for (double x : e) line += " " + fmt("%.6f", x);
        o.summary.push_back(line);
    } else {
        throw usage_error("unknown construction kind '" + a.kind + "'; valid kinds: " + join(construct_kinds()));
    }
    return o;
}

// ---- scenario ----

struct ScenarioArgs {
    std::string name;
    int d = 0, rounds = 2, samples = 0;
    std::vector<int> dims;
    std::string channel;
};

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> k{"multiparty", "depletion", "initialization", "conservation", "absorption", "free_randomness"};
    return k;
}

bool trace_ledger_ok(const ScenarioTrace& t) {
    for (const auto& s : t.steps)
        if (s.ledger.residual > ledger_tol) return false;
    return true;
}

Outcome cmd_scenario(const ScenarioArgs& a, CLI::App* sub, const Globals& g) {
    Outcome o;
    o.config["name"] = a.name;
    auto with_trace = [&](ScenarioTrace t) {
        for (const auto& [k, v] : t.config) o.config[k] = v;
        o.result = to_json(t);
        o.ok = trace_ledger_ok(t);
        o.trace = std::move(t);
    };
    auto dim = [&](int deflt) {
        const int d = a.d > 0 ? a.d : deflt;
        o.config["d"] = std::to_string(d);
        return d;
    };
    auto n_samples = [&](int deflt) {
        const int n = a.samples > 0 ? a.samples : deflt;
        o.config["samples"] = std::to_string(n);
        return n;
    };
    if (a.name == "multiparty") {
        restrict_options(sub, a.name, {"--d", "--rounds"});
        const int d = dim(2);
        o.config["rounds"] = std::to_string(a.rounds);
        with_trace(multiparty_refuel(d, a.rounds, g.seed));
        const double classical = classical_refuel_deviation(d);
        o.result["classical_control_deviation"] = classical;
        o.summary.push_back("turn actor      I(A:C)      I(B:C)       S(C)  catalyst_dist    residual");
        for (std::size_t k = 0; k < o.trace->steps.size(); ++k) {
            const auto& s = o.trace->steps[k];
            char buf[160];
            std::snprintf(buf, sizeof buf, "%4zu %5s %11.6f %11.6f %10.6f %14.3e %11.3e", k + 1, s.actor.c_str(), s.marginals.at("I(A:C)"),
                          s.marginals.at("I(B:C)"), s.marginals.at("S(C)"), s.marginals.at("catalyst_dist"), s.ledger.residual);
            o.summary.push_back(buf);
        }
        for (const auto& n : o.trace->notes) o.summary.push_back("note: " + n);
        o.summary.push_back("I(A:C) = " + fmt("%.6f", o.trace->last().marginals.at("I(A:C)")) + " bits after turn " +
                            std::to_string(o.trace->steps.size()));
        o.summary.push_back("classical control deviation = " + fmt("%.6f", classical));
    } else if (a.name == "depletion") {
        restrict_options(sub, a.name, {"--d"});
        with_trace(depletion_demo(dim(2), g.seed));
        const auto& last = o.trace->last();
        const double i12 = last.marginals.at("I(A1:A2)"), bound = last.marginals.at("bound");
        o.ok = o.ok && i12 >= bound - 1e-7;
        o.summary.push_back("I(A1:A2) = " + fmt("%.6f", i12) + " bits (bound " + fmt("%.6f", bound) + ")");
    } else if (a.name == "initialization") {
        restrict_options(sub, a.name, {"--d"});
        with_trace(initialization_scenario(dim(3), g.seed));
        for (const auto& s : o.trace->steps)
            o.summary.push_back(s.operation + ": dI = " + fmt("%.6f", s.ledger.I_after - s.ledger.I_before) + " bits, residual " +
                                fmt("%.3e", s.ledger.residual));
    } else if (a.name == "conservation") {
        restrict_options(sub, a.name, {"--samples", "--dims"});
        const int n = n_samples(100);
        std::vector<int> dims = a.dims.empty() ? std::vector<int>{2, 2, 2, 2} : a.dims;
        if (dims.size() != 4) throw usage_error("--dims needs four entries (W,X,Y,Z)");
        o.config["dims"] = join(dims);
        auto r = conservation_law_check(g.seed, n, dims);
        o.result = json{{"max_residual", r.max_residual}, {"min_slack", r.min_slack}, {"samples", r.samples}};
        o.ok = r.max_residual <= 1e-9 && r.min_slack >= -1e-9;
        o.summary.push_back("max residual = " + fmt("%.3e", r.max_residual) + " over " + std::to_string(r.samples) + " states");
    } else if (a.name == "absorption") {
        restrict_options(sub, a.name, {"--channel", "--samples"});
        if (a.channel.empty()) throw usage_error("absorption needs --channel");
        o.config["channel"] = a.channel;
        const int n = n_samples(20);
        auto r = absorption_check(channel_from_name(a.channel), n, g.seed);
        o.result = json{{"max_local_decrease", r.max_local_decrease}, {"min_global_increase_at_max", r.min_global_increase_at_max}, {"ok", r.ok}};
        o.ok = r.ok;
        o.summary.push_back("max local decrease = " + fmt("%.6f", r.max_local_decrease) + " bits, global increase = " +
                            fmt("%.6f", r.min_global_increase_at_max) + " bits");
    } else if (a.name == "free_randomness") {
        restrict_options(sub, a.name, {"--d", "--samples"});
        const int d = dim(2);
        auto r = cq_free_randomness(d, n_samples(20), g.seed);
        o.result = json{{"free_bits", r.free_bits},
                        {"free_bits_uncorrelated", r.free_bits_uncorrelated},
                        {"max_output_deviation", r.max_output_deviation},
                        {"max_catalyst_deviation", r.max_catalyst_deviation},
                        {"max_residual", r.max_residual},
                        {"samples", r.samples}};
        o.ok = r.max_residual <= ledger_tol && r.max_output_deviation <= 1e-9 && r.max_catalyst_deviation <= 1e-9;
        o.summary.push_back("free bits = " + fmt("%.6f", r.free_bits) + " (uncorrelated " + fmt("%.6f", r.free_bits_uncorrelated) + ")");
    } else {
        throw usage_error("unknown scenario '" + a.name + "'; valid scenarios: " + join(scenario_names()));
    }
    return o;
}

// ---- optimize ----

struct OptimizeArgs {
    std::string target, channel, unitary, sigma;
    std::string alpha = "1";
    int restarts = 16, max_iter = 2000, catalyst = 1;
    double tol = tol_grad;
    std::vector<int> r;
};

const std::vector<std::string>& optimize_targets() {
    static const std::vector<std::string> k{"global", "local", "ea", "tradeoff"};
    return k;
}

Outcome cmd_optimize(const OptimizeArgs& a, CLI::App* sub, const Globals& g) {
    Outcome o;
    o.config["target"] = a.target;
    auto channel = [&]() {
        if (a.channel.empty()) throw usage_error(a.target + " needs --channel");
        o.config["channel"] = a.channel;
        return channel_from_name(a.channel);
    };
    if (a.target == "global" || a.target == "local") {
        restrict_options(sub, a.target, {"--channel", "--alpha", "--restarts", "--max-iter"});
        auto phi = channel();
        const double alpha = parse_alpha(a.alpha);
        o.config["alpha"] = a.alpha;
        o.config["restarts"] = std::to_string(a.restarts);
        o.config["max_iter"] = std::to_string(a.max_iter);
        if (a.restarts < 1) throw usage_error("--restarts must be >= 1");
        OptimizationResult r;
        try {
            r = a.target == "global" ? max_entropy_production_global(phi, alpha, a.restarts, g.seed, a.max_iter)
                                     : max_entropy_production_local(phi, alpha, a.restarts, g.seed, a.max_iter);
        } catch (const std::invalid_argument& e) {
            throw usage_error(e.what());
        }
        o.result = to_json(r);
        o.summary.push_back(std::string(a.target == "global" ? "S_G" : "S_local") + "_" + alpha_key(alpha) + " = " + fmt("%.6f", r.value) + " bits");
    } else if (a.target == "ea") {
        restrict_options(sub, a.target, {"--channel", "--tol", "--max-iter"});
        auto phi = channel();
        o.config["tol"] = format_g12(a.tol);
        const int iters = sub->get_option("--max-iter")->count() ? a.max_iter : 5000;
        o.config["max_iter"] = std::to_string(iters);
        auto r = ea_capacity(phi, a.tol, g.seed, iters);
        o.result = to_json(r);
        o.ok = r.converged;
        o.summary.push_back("C_EA = " + fmt("%.6f", r.value) + " bits");
        o.summary.push_back("stationarity gap = " + fmt("%.3e", r.stationarity_gap));
    } else if (a.target == "tradeoff") {
        restrict_options(sub, a.target, {"--r", "--unitary", "--sigma", "--catalyst"});
        CatalysisInstance inst;
        if (!a.r.empty()) {
            if (!a.unitary.empty() || !a.sigma.empty()) throw usage_error("tradeoff takes either --r or --unitary/--sigma");
            o.config["r"] = join(a.r);
            try {
                inst = dephasing_catalysis(DegeneracyVector(a.r));
            } catch (const std::invalid_argument& e) {
                throw usage_error(e.what());
            }
        } else {
            if (a.unitary.empty() || a.sigma.empty()) throw usage_error("tradeoff needs --r or both --unitary and --sigma");
            o.config["unitary"] = a.unitary;
            o.config["sigma"] = a.sigma;
            o.config["catalyst"] = std::to_string(a.catalyst);
            auto u = read_unitary(a.unitary, {});
            auto lb = catalyst_layout(u, a.catalyst);
            auto sigma = read_density(a.sigma);
            if (sigma.layout.dims != lb.dims) throw usage_error("sigma dims do not match the catalyst subsystems");
            sigma.layout = lb;
            if (!is_catalysis_unitary(u, range_indices(0, static_cast<int>(u.layout.size()) - a.catalyst)).verdict) {
                o.ok = false;
                o.result = json{{"error", "not a catalysis unitary"}};
                o.summary.push_back("not a catalysis unitary");
                return o;
            }
            inst = canonical_form(u, sigma, 64, g.seed);
        }
        auto t = tradeoff_check(inst, g.seed);
        o.result = to_json(t);
        o.ok = t.ok;
        o.summary.push_back("C_EA = " + fmt("%.6f", t.capacity) + " bits");
        o.summary.push_back("lhs = " + fmt("%.6f", t.lhs) + " bits, rhs = " + fmt("%.6f", t.rhs) + " bits" + (t.ok ? " (holds)" : " (violated)"));
    } else {
        throw usage_error("unknown optimization target '" + a.target + "'; valid targets: " + join(optimize_targets()));
    }
    return o;
}

// ---- selftest ----

Outcome cmd_selftest() {
    Outcome o;
    json checks = json::array();
    auto check = [&](const std::string& name, bool pass, double value) {
        checks.push_back(json{{"name", name}, {"pass", pass}, {"value", value}});
        o.summary.push_back(std::string(pass ? "PASS " : "FAIL ") + name + " (" + fmt("%.3e", value) + ")");
        o.ok = o.ok && pass;
    };
    Mat cnot = kron(Mat(basis_vector(2, 0) * basis_vector(2, 0).adjoint()), Mat(Mat::Identity(2, 2))) +
               kron(Mat(basis_vector(2, 1) * basis_vector(2, 1).adjoint()), shift(2, 1));
    auto c = is_catalysis_unitary(cnot, {2, 2}, {0});
    check("cnot passes partial transpose", c.verdict, c.defect);
    auto s = is_catalysis_unitary(swap_operator(2, 2), {2, 2}, {0});
    check("swap fails partial transpose", !s.verdict, s.defect);
    Mat rho = Mat::Zero(3, 3);
    rho.diagonal() << 0.5, 0.25, 0.25;
    const double sc = catalytic_entropy(eigenspace_decompose(rho, tol().group));
    check("catalytic entropy of (1/2,1/4,1/4)", std::abs(sc - 2.0) <= 1e-10, std::abs(sc - 2.0));
    auto deph = dephasing_catalysis(DegeneracyVector({1, 2}));
    Rng rng(1);
    Mat in = random_density(5, 5, rng);
    Mat out = implement_channel(deph, in);
    const double off = (out - dephase(out)).norm() + (dephase(out) - dephase(in)).norm();
    check("dephasing catalysis is exact dephasing", off <= 1e-10, off);
    auto refuel = multiparty_refuel(2, 2);
    check("refuelled catalyst uncorrelated with A", refuel.last().marginals.at("I(A:C)") <= 1e-9, refuel.last().marginals.at("I(A:C)"));
    auto cons = conservation_law_check(1, 10);
    check("4-partite conservation identity", cons.max_residual <= 1e-9, cons.max_residual);
    auto am = angular_momentum_catalyst(1);
    check("angular momentum catalyst l=1", std::abs(am.s_cat - std::log2(10.0)) <= 1e-10, std::abs(am.s_cat - std::log2(10.0)));
    o.result["checks"] = checks;
    return o;
}

int emit(const std::string& command, const Globals& g, const Outcome& o) {
    for (const auto& line : o.summary) std::cout << line << "\n";
    const std::string text = render(command, g, o);
    if (g.out.empty()) {
        std::cout << text;
    } else {
        write_atomic(g.out, text);
        std::cout << "wrote " << g.out << "\n";
    }
    return o.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"catalyx: catalysis unitaries, catalytic entropies and refuelling experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed echoed in every output");
    app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", g.out, "report path (construct: output directory)");
    app.add_option("--tol-override", g.tol_overrides, "tolerance override tol.<name>=<value>, repeatable");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "certify a catalysis unitary");
    verify->add_option("--unitary", va.unitary, "unitary JSON file")->required();
    verify->add_option("--layout", va.layout, "subsystem dims of U, catalyst last")->delimiter(',');
    verify->add_option("--catalyst", va.catalyst, "number of trailing catalyst subsystems");
    verify->add_option("--sigma", va.sigma, "catalyst state JSON file");
    verify->add_option("--samples", va.samples, "input samples for the exhaustive check");

    EntropyArgs ea;
    auto* entropy = app.add_subcommand("entropy", "plain and catalytic entropies of a state");
    entropy->add_option("--state", ea.state, "state or operator JSON file")->required();
    entropy->add_option("--alpha", ea.alphas, "Renyi orders (inf allowed)")->delimiter(',');
    entropy->add_option("--group-tol", ea.group_tol, "eigenvalue grouping tolerance");

    ConstructArgs ca;
    auto* construct = app.add_subcommand("construct", "build a certified construction");
    construct->add_option("kind", ca.kind, "one of: " + join(construct_kinds()))->required();
    construct->add_option("--r", ca.r, "degeneracy vector")->delimiter(',');
    construct->add_option("--d", ca.d, "dimension");
    construct->add_option("--m", ca.m, "masking dimension");
    construct->add_option("--lM", ca.lM, "maximal angular momentum");
    construct->add_option("--spectrum", ca.spectrum, "catalyst eigenvalues")->delimiter(',');
    construct->add_option("--sigma", ca.sigma, "catalyst JSON file");
    construct->add_option("--e-inf", ca.e_inf, "energy cap");

    ScenarioArgs sa;
    auto* scenario = app.add_subcommand("scenario", "run a protocol experiment");
    scenario->add_option("name", sa.name, "one of: " + join(scenario_names()))->required();
    scenario->add_option("--d", sa.d, "dimension");
    scenario->add_option("--rounds", sa.rounds, "number of agent turns");
    scenario->add_option("--samples", sa.samples, "sample count");
    scenario->add_option("--dims", sa.dims, "W,X,Y,Z dims")->delimiter(',');
    scenario->add_option("--channel", sa.channel, "channel name or Kraus JSON file");

    OptimizeArgs oa;
    auto* optimize = app.add_subcommand("optimize", "entropy production and capacity optimizers");
    optimize->add_option("target", oa.target, "one of: " + join(optimize_targets()))->required();
    optimize->add_option("--channel", oa.channel, "channel name or Kraus JSON file");
    optimize->add_option("--alpha", oa.alpha, "Renyi order (0.5, 1, 2, inf)");
    optimize->add_option("--restarts", oa.restarts, "ascent restarts");
    optimize->add_option("--max-iter", oa.max_iter, "iteration cap per run");
    optimize->add_option("--tol", oa.tol, "stationarity tolerance");
    optimize->add_option("--r", oa.r, "degeneracy vector of a dephasing catalysis")->delimiter(',');
    optimize->add_option("--unitary", oa.unitary, "unitary JSON file");
    optimize->add_option("--sigma", oa.sigma, "catalyst JSON file");
    optimize->add_option("--catalyst", oa.catalyst, "number of trailing catalyst subsystems");

    auto* selftest = app.add_subcommand("selftest", "quick consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        for (const auto& kv : g.tol_overrides) apply_tolerance_override(tolerance_config(), kv);
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        Outcome o;
        if (sub == verify) {
            o = cmd_verify(va, g);
        } else if (sub == entropy) {
            o = cmd_entropy(ea);
        } else if (sub == construct) {
            Artifacts art;
            const std::string out_dir = g.out;
            Globals gg = g;
            gg.out.clear();
            o = cmd_construct(ca, construct, art);
            if (!out_dir.empty()) {
                for (const auto& [suffix, payload] : art.files)
                    write_atomic((std::filesystem::path(out_dir) / (ca.kind + suffix)).string(), payload.dump(2) + "\n");
                gg.out = (std::filesystem::path(out_dir) / (ca.kind + (g.format == "csv" ? ".csv" : ".json"))).string();
            }
            return emit(name, gg, o);
        } else if (sub == scenario) {
            o = cmd_scenario(sa, scenario, g);
        } else if (sub == optimize) {
            o = cmd_optimize(oa, optimize, g);
        } else if (sub == selftest) {
            o = cmd_selftest();
        }
        return emit(name, g, o);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const catalyx::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
}
