#include "gaussmet/io.hpp"

#include "gaussmet/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gaussmet::io {

namespace {

[[noreturn]] void schema_error(const std::string& what)
{
    throw Error(ErrorCode::ParseError, what);
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object()) schema_error("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& j, const char* what)
{
    if (!j.is_number()) schema_error(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " is not finite");
    return v;
}

std::vector<double> number_list(const json& j, const char* what)
{
    if (!j.is_array()) schema_error(std::string(what) + " must be an array");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number(x, what));
    return out;
}

std::array<double, 2> number_pair(const json& j, const char* what)
{
    const auto v = number_list(j, what);
    if (v.size() != 2) schema_error(std::string(what) + " must have two entries");
    return {v[0], v[1]};
}

// Rejects keys outside the schema so that typos do not pass silently.
void only_keys(const json& j, std::initializer_list<const char*> keys, const char* what)
{
    if (!j.is_object()) schema_error(std::string(what) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) schema_error(std::string("unknown field '") + it.key() + "' in " + what);
    }
}

}  // namespace

double round_sig(double x, int digits)
{
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return std::strtod(buf, nullptr);
}

json complex_to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

cplx complex_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2) schema_error("complex numbers must be [re, im] arrays");
    return {number(j[0], "real part"), number(j[1], "imaginary part")};
}

json vector_to_json(const ComplexVector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
    return a;
}

ComplexVector vector_from_json(const json& j)
{
    if (!j.is_array()) schema_error("expected an array of complex numbers");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

json matrix_to_json(const ComplexMatrix& A)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back(vector_to_json(A.row(i).transpose()));
    return rows;
}

ComplexMatrix matrix_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) schema_error("expected a non-empty matrix (array of rows)");
    const size_t rows = j.size();
    if (!j[0].is_array()) schema_error("matrix rows must be arrays");
    const size_t cols = j[0].size();
    ComplexMatrix A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) schema_error("matrix rows must have equal length");
        for (size_t c = 0; c < cols; ++c)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
    }
    return A;
}

json state_to_json(const GaussianPureState& s)
{
    return json{{"n_modes", s.n_modes},
                {"beta", vector_to_json(s.beta)},
                {"f", matrix_to_json(s.f)},
                {"basis_label", s.basis_label}};
}

GaussianPureState state_from_json(const json& j)
{
    only_keys(j, {"n_modes", "beta", "f", "basis_label"}, "state");
    GaussianPureState s;
    const json& n = field(j, "n_modes");
    if (!n.is_number_integer()) schema_error("n_modes must be an integer");
    s.n_modes = n.get<int>();
    s.beta = vector_from_json(field(j, "beta"));
    s.f = matrix_from_json(field(j, "f"));
    if (j.contains("basis_label")) {
        if (!j["basis_label"].is_string()) schema_error("basis_label must be a string");
        s.basis_label = j["basis_label"].get<std::string>();
    }
    validate(s);
    return s;
}

json generator_to_json(const Generator& g)
{
    return json{{"G", matrix_to_json(g.G)}, {"signal_tol", g.signal_tol}};
}

Generator generator_from_json(const json& j)
{
    only_keys(j, {"G", "signal_tol"}, "generator");
    const ComplexMatrix G = matrix_from_json(field(j, "G"));
    if (G.rows() != G.cols()) throw Error(ErrorCode::DimensionMismatch, "generator matrix must be square");
    const double tol = j.contains("signal_tol") ? number(j["signal_tol"], "signal_tol") : kDefaultSignalTol;
    return from_matrix(G, tol);
}

json grid_to_json(const DiscretizationGrid& g)
{
    json j{{"z_min", g.z_min}, {"z_max", g.z_max}, {"n_bins", g.n_bins}};
    if (g.p_min) j["p_min"] = *g.p_min;
    return j;
}

DiscretizationGrid grid_from_json(const json& j)
{
    only_keys(j, {"z_min", "z_max", "n_bins", "p_min"}, "grid");
    DiscretizationGrid g;
    g.z_min = number(field(j, "z_min"), "z_min");
    g.z_max = number(field(j, "z_max"), "z_max");
    const json& n = field(j, "n_bins");
    if (!n.is_number_integer()) schema_error("n_bins must be an integer");
    g.n_bins = n.get<int>();
    if (j.contains("p_min")) g.p_min = number(j["p_min"], "p_min");
    validate(g);
    return g;
}

json resources_to_json(const ResourceTriple& r, int digits)
{
    return json{{"n_signal", round_sig(r.n_signal, digits)},
                {"g_mean", round_sig(r.g_mean, digits)},
                {"g_var", round_sig(r.g_var, digits)},
                {"defined", r.defined}};
}

json report_to_json(const QfiReport& r, int digits)
{
    return json{{"qfi", round_sig(r.qfi, digits)},
                {"terms",
                 {{"squeeze_a", round_sig(r.term_squeeze_a, digits)},
                  {"squeeze_b", round_sig(r.term_squeeze_b, digits)},
                  {"disp", round_sig(r.term_disp, digits)},
                  {"cross", round_sig(r.term_cross, digits)}}},
                {"resources", resources_to_json(r.resources, digits)},
                {"bound", round_sig(r.bound, digits)},
                {"bound_satisfied", r.bound_satisfied}};
}

ProbeSpec probe_spec_from_json(const json& j)
{
    only_keys(j, {"kind", "n_signal", "target_gmean", "target_gvar", "squeeze_angles", "mode_choice", "mode_vector",
                  "residual_tol"},
              "probe spec");
    ProbeSpec s;
    const json& k = field(j, "kind");
    if (!k.is_string()) schema_error("kind must be a string");
    s.kind = parse_probe_kind(k.get<std::string>());
    s.n_signal = number(field(j, "n_signal"), "n_signal");
    if (j.contains("target_gmean")) s.target_gmean = number(j["target_gmean"], "target_gmean");
    if (j.contains("target_gvar")) s.target_gvar = number(j["target_gvar"], "target_gvar");
    if (j.contains("squeeze_angles")) s.squeeze_angles = number_pair(j["squeeze_angles"], "squeeze_angles");
    if (j.contains("mode_choice")) {
        if (!j["mode_choice"].is_array()) schema_error("mode_choice must be an array");
        for (const auto& x : j["mode_choice"]) {
            if (!x.is_number_integer()) schema_error("mode_choice entries must be integers");
            s.mode_choice.push_back(x.get<Eigen::Index>());
        }
    }
    if (j.contains("mode_vector")) s.mode_vector = vector_from_json(j["mode_vector"]);
    if (j.contains("residual_tol")) s.residual_tol = number(j["residual_tol"], "residual_tol");
    return s;
}

json probe_spec_to_json(const ProbeSpec& s)
{
    json j{{"kind", to_string(s.kind)},
           {"n_signal", s.n_signal},
           {"target_gmean", s.target_gmean},
           {"target_gvar", s.target_gvar},
           {"squeeze_angles", {s.squeeze_angles[0], s.squeeze_angles[1]}},
           {"residual_tol", s.residual_tol}};
    if (!s.mode_choice.empty()) j["mode_choice"] = s.mode_choice;
    if (s.mode_vector) j["mode_vector"] = vector_to_json(*s.mode_vector);
    return j;
}

json probe_result_to_json(const ProbeResult& r, int digits)
{
    return json{{"kind", to_string(r.kind_used)},
                {"state", state_to_json(assemble(r.state))},
                {"achieved", resources_to_json(r.achieved, digits)},
                {"eigen_residual", round_sig(r.eigen_residual, digits)},
                {"predicted_qfi", round_sig(r.predicted_qfi, digits)}};
}

HomodyneSetup homodyne_setup_from_json(const json& j)
{
    only_keys(j, {"mode_indices", "phases", "eta", "sigma_env_sq", "true_param"}, "homodyne setup");
    HomodyneSetup s;
    if (j.contains("mode_indices")) {
        if (!j["mode_indices"].is_array()) schema_error("mode_indices must be an array");
        for (const auto& x : j["mode_indices"]) {
            if (!x.is_number_integer()) schema_error("mode_indices entries must be integers");
            s.mode_indices.push_back(x.get<Eigen::Index>());
        }
    }
    if (j.contains("phases")) {
        const json& p = j["phases"];
        if (p.is_string()) {
            if (p.get<std::string>() != "auto") schema_error("phases must be \"auto\" or a list of numbers");
        } else {
            s.phases = number_list(p, "phases");
        }
    }
    if (j.contains("eta")) s.eta = number(j["eta"], "eta");
    if (j.contains("sigma_env_sq")) s.sigma_env_sq = number(j["sigma_env_sq"], "sigma_env_sq");
    if (j.contains("true_param")) s.true_param = number(j["true_param"], "true_param");
    validate(s);
    return s;
}

json homodyne_setup_to_json(const HomodyneSetup& s)
{
    json j{{"mode_indices", s.mode_indices}, {"eta", s.eta}, {"sigma_env_sq", s.sigma_env_sq},
           {"true_param", s.true_param}};
    if (s.phases)
        j["phases"] = *s.phases;
    else
        j["phases"] = "auto";
    return j;
}

json homodyne_result_to_json(const HomodyneResult& r, int digits)
{
    auto rounded = [&](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(round_sig(x, digits));
        return a;
    };
    return json{{"fi", round_sig(r.fi, digits)},
                {"per_mode_fi", rounded(r.per_mode_fi)},
                {"variances", rounded(r.variances)},
                {"phases_used", rounded(r.phases_used)}};
}

RegularizedModePair pair_from_json(const json& j)
{
    only_keys(j, {"center_z", "center_p", "sigma_z", "theta", "r"}, "mode pair");
    RegularizedModePair p;
    p.center_z = number_pair(field(j, "center_z"), "center_z");
    p.center_p = number_pair(field(j, "center_p"), "center_p");
    p.sigma_z = number(field(j, "sigma_z"), "sigma_z");
    if (j.contains("theta")) p.theta = number_pair(j["theta"], "theta");
    if (j.contains("r")) p.r = number_pair(j["r"], "r");
    validate(p);
    return p;
}

json pair_to_json(const RegularizedModePair& p)
{
    return json{{"center_z", p.center_z}, {"center_p", p.center_p}, {"sigma_z", p.sigma_z},
                {"theta", p.theta}, {"r", p.r}};
}

ScenarioConfig scenario_config_from_json(const json& j)
{
    only_keys(j, {"kind", "pair", "n_signal", "physical_scale", "n_hg_levels", "sweep"}, "scenario config");
    ScenarioConfig c;
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) schema_error("kind must be a string");
        std::string k = j["kind"].get<std::string>();
        for (auto& ch : k)
            if (ch == '-') ch = '_';
        c.kind = parse_shift_domain(k);
    }
    c.pair = pair_from_json(field(j, "pair"));
    if (j.contains("n_signal")) c.n_signal = number(j["n_signal"], "n_signal");
    if (j.contains("physical_scale")) c.physical_scale = number(j["physical_scale"], "physical_scale");
    if (j.contains("n_hg_levels")) {
        if (!j["n_hg_levels"].is_number_integer()) schema_error("n_hg_levels must be an integer");
        c.n_hg_levels = j["n_hg_levels"].get<int>();
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        only_keys(s, {"n_signal", "eta", "probe_kinds"}, "sweep");
        if (s.contains("n_signal")) c.sweep.n_signal = number_list(s["n_signal"], "sweep.n_signal");
        if (s.contains("eta")) c.sweep.eta = number_list(s["eta"], "sweep.eta");
        if (s.contains("probe_kinds")) {
            if (!s["probe_kinds"].is_array()) schema_error("sweep.probe_kinds must be an array");
            c.sweep.probe_kinds.clear();
            for (const auto& x : s["probe_kinds"]) {
                if (!x.is_string()) schema_error("probe kinds must be strings");
                c.sweep.probe_kinds.push_back(x.get<std::string>());
            }
        }
    }
    validate(c);
    return c;
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "'" + path + "': " + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move output into '" + path + "'");
    }
}

}  // namespace gaussmet::io
