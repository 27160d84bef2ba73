#include "gaussmet/cli.hpp"

#include "gaussmet/errors.hpp"
#include "gaussmet/focksim.hpp"
#include "gaussmet/io.hpp"
#include "gaussmet/measurement.hpp"
#include "gaussmet/metrology.hpp"
#include "gaussmet/optimal.hpp"
#include "gaussmet/parallel.hpp"
#include "gaussmet/randomized.hpp"
#include "gaussmet/scenarios.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace gaussmet::cli {

namespace {

using io::json;

int digits(bool full)
{
    return full ? 17 : 12;
}

void emit(const std::string& text, const std::string& out_path)
{
    if (out_path.empty())
        std::cout << text;
    else
        io::write_file_atomic(out_path, text);
}

std::vector<double> parse_number_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (...) {
            throw Error(ErrorCode::InvalidArgument, "cannot parse number '" + item + "'");
        }
        if (pos != item.size() || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<Eigen::Index> to_indices(const std::vector<int>& v)
{
    return {v.begin(), v.end()};
}

// ---- verify suites -------------------------------------------------------

struct SuiteOutcome {
    std::string name;
    bool pass = true;
    std::string detail;
};

SuiteOutcome suite_bound(int trials, std::uint64_t seed)
{
    std::vector<double> excess(static_cast<size_t>(trials));
    parallel_for(static_cast<size_t>(trials), [&](size_t i) {
        randomized::Rng rng(seed + i);
        std::uniform_int_distribution<int> md(1, 8);
        const int m = md(rng);
        const DisentangledForm d = randomized::state(m, rng, 4.0, 4.0);
        const Generator gen = from_matrix(randomized::hermitian(m, rng, 2.0));
        const QfiReport rep = qfi(d, gen);
        excess[i] = (rep.qfi - rep.bound) / std::max(1.0, rep.bound);
    });
    const double worst = excess.empty() ? -1.0 : *std::max_element(excess.begin(), excess.end());
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d states, max (qfi - bound)/max(1, bound) = %.3e (limit 1e-9)", trials, worst);
    return {"bound", worst <= 1e-9, buf};
}

SuiteOutcome suite_oracle(int trials, std::uint64_t seed)
{
    std::vector<double> rel(static_cast<size_t>(trials));
    parallel_for(static_cast<size_t>(trials), [&](size_t i) {
        randomized::Rng rng(seed + i);
        std::uniform_int_distribution<int> md(1, 3);
        const int m = md(rng);
        const DisentangledForm d = randomized::state(m, rng, 0.05, 0.5);
        const Generator gen = from_matrix(randomized::hermitian(m, rng));
        OracleConfig cfg;
        cfg.cutoff = 26;
        cfg.tail_tol = 1e-12;
        const double fq = fock_qfi(fock_build(d, cfg), gen);
        const double q = qfi(d, gen).qfi;
        rel[i] = std::abs(fq - q) / std::max(q, 1e-12);
    });
    const double worst = rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end());
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d probes, max |fock_qfi - qfi|/qfi = %.3e (limit 1e-6)", trials, worst);
    return {"oracle", worst <= 1e-6, buf};
}

SuiteOutcome suite_lemma2(int trials, std::uint64_t seed)
{
    std::vector<double> gaps(static_cast<size_t>(trials));
    parallel_for(static_cast<size_t>(trials), [&](size_t i) {
        randomized::Rng rng(seed + i);
        std::uniform_int_distribution<int> md(1, 10);
        const int m = md(rng);
        const ComplexMatrix H = randomized::hermitian(m, rng);
        const ComplexMatrix Q = randomized::psd(m, rng);
        const double scale = std::max(1.0, std::pow(max_norm(H) * max_norm(Q) * m, 2));
        gaps[i] = lemma2_gap(H, Q) / scale;
    });
    const double worst = gaps.empty() ? 0.0 : *std::min_element(gaps.begin(), gaps.end());
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d pairs, min gap/scale = %.3e (min gap >= -1e-9)", trials, worst);
    return {"lemma2", worst >= -1e-9, buf};
}

// ---- subcommands -----------------------------------------------------------

int cmd_qfi(const std::string& state_path, const std::string& gen_path, const std::string& out, bool full)
{
    const GaussianPureState s = io::state_from_json(io::read_json_file(state_path));
    const Generator g = io::generator_from_json(io::read_json_file(gen_path));
    const QfiReport rep = qfi(s, g);
    emit(io::report_to_json(rep, digits(full)).dump(2) + "\n", out);
    return kOk;
}

int cmd_build(const std::string& kind, double ns, double gbar, double dg, const std::string& gen_path,
              const std::string& out, std::array<double, 2> angles, const std::vector<int>& modes, double residual_tol,
              bool full)
{
    const Generator g = io::generator_from_json(io::read_json_file(gen_path));
    ProbeSpec spec;
    spec.kind = parse_probe_kind(kind);
    spec.n_signal = ns;
    spec.target_gmean = gbar;
    spec.target_gvar = dg * dg;
    spec.squeeze_angles = angles;
    spec.mode_choice = to_indices(modes);
    spec.residual_tol = residual_tol;
    if (dg < 0.0) throw Error(ErrorCode::InvalidArgument, "--dg must be >= 0");
    const ProbeResult res = build_probe(spec, g);
    const std::string state_text = io::state_to_json(assemble(res.state, g.basis_label)).dump(2) + "\n";
    const std::string report = io::probe_result_to_json(res, digits(full)).dump(2) + "\n";
    io::write_file_atomic(out, state_text);
    std::cout << report;
    return kOk;
}

int cmd_homodyne(const std::string& state_path, const std::string& gen_path, double eta, double nb,
                 const std::string& phases, double lambda, const std::vector<int>& modes, long long samples,
                 std::uint64_t seed, const std::string& samples_out, const std::string& out, bool full)
{
    const DisentangledForm d = disentangle(io::state_from_json(io::read_json_file(state_path)));
    const Generator g = io::generator_from_json(io::read_json_file(gen_path));
    HomodyneSetup setup;
    setup.eta = eta;
    setup.sigma_env_sq = sigma_env_from_thermal(nb, eta);
    setup.true_param = lambda;
    setup.mode_indices = to_indices(modes);
    if (phases != "auto") setup.phases = parse_number_list(phases);
    validate(setup);
    if (samples < 0) throw Error(ErrorCode::InvalidArgument, "--samples must be >= 0");

    const HomodyneResult res = homodyne_fi(d, g, setup);
    json j = io::homodyne_result_to_json(res, digits(full));
    j["sigma_env_sq"] = io::round_sig(setup.sigma_env_sq, digits(full));
    if (samples > 0) {
        const auto n = static_cast<std::size_t>(samples);
        j["empirical_fi"] = io::round_sig(empirical_fi(d, g, setup, n, seed), digits(full));
        j["samples"] = samples;
        j["seed"] = seed;
        if (!samples_out.empty()) {
            const auto draws = sample_homodyne(d, g, setup, n, seed);
            const auto used = setup.mode_indices.empty() ? populated_modes(d, g) : setup.mode_indices;
            for (size_t k = 0; k < draws.size(); ++k) {
                std::string text;
                text.reserve(draws[k].size() * 24);
                char buf[64];
                for (double x : draws[k]) {
                    std::snprintf(buf, sizeof buf, "%.*g\n", digits(full), x);
                    text += buf;
                }
                io::write_file_atomic(samples_out + "_mode" + std::to_string(used[k]) + ".csv", text);
            }
        }
    }
    emit(j.dump(2) + "\n", out);
    return kOk;
}

int cmd_scenario(const std::string& kind, const std::string& config_path, const std::string& out, bool full)
{
    json j = io::read_json_file(config_path);
    if (!kind.empty()) {
        std::string k = kind;
        std::replace(k.begin(), k.end(), '-', '_');
        if (j.is_object()) j["kind"] = k;
    }
    const ScenarioConfig cfg = io::scenario_config_from_json(j);
    const ScenarioTable table = run_scenario(cfg);
    emit(scenario_csv(table, digits(full)), out);
    return kOk;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed)
{
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "--trials must be >= 1");
    std::vector<SuiteOutcome> results;
    if (suite == "bound" || suite == "all") results.push_back(suite_bound(trials, seed));
    if (suite == "oracle" || suite == "all") results.push_back(suite_oracle(trials, seed));
    if (suite == "lemma2" || suite == "all") results.push_back(suite_lemma2(trials, seed));
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        ok = ok && r.pass;
    }
    return ok ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args)
{
    std::vector<char*> argv;
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, char** argv)
{
    CLI::App app{"Gaussian-state metrology for mode parameter estimation"};
    app.require_subcommand(1);
    bool full = false;
    app.add_flag("--full-precision", full, "Print 17 significant digits instead of 12");

    std::string state_path, gen_path, out_path;

    auto* qfi_cmd = app.add_subcommand("qfi", "QFI, resources and bound of a state");
    qfi_cmd->add_option("--state", state_path, "State JSON")->required();
    qfi_cmd->add_option("--generator", gen_path, "Generator JSON")->required();
    qfi_cmd->add_option("--out", out_path, "Write the report here instead of stdout");
    qfi_cmd->add_flag("--full-precision", full, "Print 17 significant digits");

    std::string kind;
    double ns = 0.0, gbar = 0.0, dg = 0.0, phi_i = 0.0, phi_j = 0.0, residual_tol = 1e-9;
    std::vector<int> modes;
    auto* build_cmd = app.add_subcommand("build-state", "Construct a named probe state");
    build_cmd->add_option("--kind", kind, "optimal|variance-optimal|mean-optimal|derivative|idler")
        ->required()
        ->check(CLI::IsMember({"optimal", "variance-optimal", "mean-optimal", "derivative", "idler"}));
    build_cmd->add_option("--ns", ns, "Signal photon number")->required();
    build_cmd->add_option("--gbar", gbar, "Target mean generator eigenvalue");
    build_cmd->add_option("--dg", dg, "Target generator standard deviation");
    build_cmd->add_option("--generator", gen_path, "Generator JSON")->required();
    build_cmd->add_option("--out", out_path, "State JSON output")->required();
    build_cmd->add_option("--phi-i", phi_i, "Squeezing angle of the first mode");
    build_cmd->add_option("--phi-j", phi_j, "Squeezing angle of the second mode");
    build_cmd->add_option("--modes", modes, "Explicit mode indices")->delimiter(',');
    build_cmd->add_option("--residual-tol", residual_tol, "Tolerated eigenvalue mismatch (relative)");
    build_cmd->add_flag("--full-precision", full, "Print 17 significant digits");

    double eta = 1.0, nb = 0.0, lambda = 0.0;
    std::string phases = "auto", samples_out;
    long long samples = 0;
    std::uint64_t seed = 1;
    auto* hom_cmd = app.add_subcommand("homodyne", "Homodyne Fisher information in the generator eigenbasis");
    hom_cmd->add_option("--state", state_path, "State JSON")->required();
    hom_cmd->add_option("--generator", gen_path, "Generator JSON")->required();
    hom_cmd->add_option("--eta", eta, "Transmissivity in (0, 1]");
    hom_cmd->add_option("--nb", nb, "Thermal photons of the environment");
    hom_cmd->add_option("--phases", phases, "auto or comma separated phases");
    hom_cmd->add_option("--lambda", lambda, "True parameter value");
    hom_cmd->add_option("--modes", modes, "Eigenmode indices (default: populated)")->delimiter(',');
    hom_cmd->add_option("--samples", samples, "Monte Carlo samples for the empirical FI");
    hom_cmd->add_option("--seed", seed, "Sampling seed");
    hom_cmd->add_option("--samples-out", samples_out, "Write per-mode samples to PREFIX_mode<k>.csv");
    hom_cmd->add_option("--out", out_path, "Write the result here instead of stdout");
    hom_cmd->add_flag("--full-precision", full, "Print 17 significant digits");

    std::string config_path;
    auto* sc_cmd = app.add_subcommand("scenario", "Sweep probe kinds for a physical shift scenario");
    sc_cmd->add_option("--kind", kind, "time-shift|frequency-shift|beam-displacement|beam-tilt")
        ->check(CLI::IsMember({"time-shift", "frequency-shift", "beam-displacement", "beam-tilt", "time_shift",
                               "frequency_shift", "beam_displacement", "beam_tilt"}));
    sc_cmd->add_option("--config", config_path, "Scenario config JSON")->required();
    sc_cmd->add_option("--out", out_path, "CSV output (default stdout)");
    sc_cmd->add_flag("--full-precision", full, "Print 17 significant digits");

    std::string suite = "all";
    int trials = 100;
    auto* ver_cmd = app.add_subcommand("verify", "Randomized property and oracle checks");
    ver_cmd->add_option("--suite", suite, "bound|oracle|lemma2|all")
        ->check(CLI::IsMember({"bound", "oracle", "lemma2", "all"}));
    ver_cmd->add_option("--trials", trials, "Number of randomized trials");
    ver_cmd->add_option("--seed", seed, "Base seed (trial i uses seed + i)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*qfi_cmd) return cmd_qfi(state_path, gen_path, out_path, full);
        if (*build_cmd)
            return cmd_build(kind, ns, gbar, dg, gen_path, out_path, {phi_i, phi_j}, modes, residual_tol, full);
        if (*hom_cmd)
            return cmd_homodyne(state_path, gen_path, eta, nb, phases, lambda, modes, samples, seed, samples_out,
                                out_path, full);
        if (*sc_cmd) return cmd_scenario(kind, config_path, out_path, full);
        if (*ver_cmd) return cmd_verify(suite, trials, seed);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}

}  // namespace gaussmet::cli
