// pfaff command-line front end: batch simulation, invariant checking, and
// reaction-network compilation.
//
//   pfaff simulate <config.json> [...] [--param k=v] [--jobs N] [--out-dir D]
//   pfaff check    <config.json> [...] [--param k=v] [--jobs N] [--out-dir D]
//   pfaff compile  <network.txt>
//
// Exit codes: 0 ok, 1 config/parse error, 2 numerical failure, 3 check failure.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "pfaff/pfaff.hpp"

using nlohmann::json;
using namespace pfaff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitCheckFailed = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --param a.b.c=value, value parsed as JSON when possible, else as string
void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dotp = key.find('.', pos);
        const std::string part = key.substr(pos, dotp - pos);
        if (part.empty()) throw ConfigError("--param: empty key segment in '" + key + "'");
        if (dotp == std::string::npos) {
            json parsed = json::parse(val, nullptr, false);
            (*node)[part] = parsed.is_discarded() ? json(val) : parsed;
            return;
        }
        node = &(*node)[part];
        pos = dotp + 1;
    }
}

struct BuiltSystem {
    SystemDef sys;
    EffectiveInvariant invariant;
    std::optional<ZooEntry> zoo;
    std::string label;
};

ReservoirSpec reservoir_from_json(const json& j, int dim) {
    ReservoirSpec spec;
    spec.against_index = j.at("against").get<int>();
    if (spec.against_index < 0 || spec.against_index >= dim)
        throw ConfigError("reservoir 'against' index out of range");
    spec.initial_value = j.value("initial", 0.0);
    struct Mono {
        double coef;
        std::vector<int> powers;
    };
    std::vector<Mono> monos;
    for (const auto& m : j.at("monomials")) {
        Mono mo;
        mo.coef = m.at("coef").get<double>();
        mo.powers = m.at("powers").get<std::vector<int>>();
        if (static_cast<int>(mo.powers.size()) != dim)
            throw ConfigError("reservoir monomial powers length != dimension");
        monos.push_back(std::move(mo));
    }
    spec.integrand = [monos](const Vec& x) {
        double sum = 0.0;
        for (const auto& m : monos) {
            double term = m.coef;
            for (std::size_t i = 0; i < x.size(); ++i)
                for (int e = 0; e < m.powers[i]; ++e) term *= x[i];
            sum += term;
        }
        return sum;
    };
    return spec;
}

BuiltSystem build_system(const json& cfg) {
    BuiltSystem out;
    const json& sys = cfg.at("system");
    if (sys.contains("name")) {
        Params params;
        if (sys.contains("params"))
            for (const auto& [k, v] : sys.at("params").items())
                params[k] = v.get<double>();
        ZooEntry z = build(sys.at("name").get<std::string>(), params);
        out.label = z.name;
        out.sys = z.sys;
        out.invariant = z.invariant;
        out.zoo = std::move(z);
    } else if (sys.contains("network")) {
        const std::string path = sys.at("network").get<std::string>();
        ReactionNetwork net = parse_network(read_file(path));
        out.label = "network:" + path;
        out.sys = mass_action_odes(net);
        out.invariant.dim = out.sys.dim;
    } else {
        throw ConfigError("config: system needs either 'name' or 'network'");
    }

    const std::string mode = cfg.value("reservoirs", "auto");
    if (cfg.contains("reservoirs") && cfg.at("reservoirs").is_array()) {
        out.invariant.potential.reset();
        out.invariant.reservoirs.clear();
        for (const auto& r : cfg.at("reservoirs"))
            out.invariant.reservoirs.push_back(reservoir_from_json(r, out.sys.dim));
    } else if (mode == "none") {
        out.invariant.potential.reset();
        out.invariant.reservoirs.clear();
    } else if (mode != "auto") {
        throw ConfigError("config: reservoirs must be \"auto\", \"none\" or a list");
    }
    return out;
}

IntegratorConfig integrator_from_json(const json& cfg) {
    IntegratorConfig ic;
    const std::string m = cfg.value("method", "rk4");
    if (m == "rk4") ic.method = Method::rk4;
    else if (m == "implicit_midpoint") ic.method = Method::implicit_midpoint;
    else if (m == "discrete_gradient") ic.method = Method::discrete_gradient;
    else throw ConfigError("config: unknown method '" + m + "'");
    ic.h = cfg.at("h").get<double>();
    ic.newton_tol = cfg.value("newton_tol", 1e-12);
    ic.newton_max_iter = cfg.value("newton_max_iter", 50);
    if (!(ic.h > 0)) throw ConfigError("config: h must be positive");
    return ic;
}

std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    const int d = traj.x.empty() ? 0 : static_cast<int>(traj.x[0].size());
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    for (std::size_t r = 1; r <= traj.reservoirs.size(); ++r) out << ",w" << r;
    out << ",H,K,div\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_g17(traj.t[k]);
        for (int i = 0; i < d; ++i) out << "," << format_g17(traj.x[k][i]);
        for (const auto& w : traj.reservoirs) out << "," << format_g17(w[k]);
        out << "," << format_g17(traj.series_H.size() == traj.size() ? traj.series_H[k] : 0.0);
        out << "," << format_g17(traj.series_K.size() == traj.size() ? traj.series_K[k] : 0.0);
        out << "," << format_g17(traj.series_div.size() == traj.size() ? traj.series_div[k] : 0.0);
        out << "\n";
    }
}

std::string out_path(const std::string& dir, const std::string& path) {
    if (dir.empty() || path.empty() || path.front() == '/') return path;
    return dir + "/" + path;
}

int cmd_simulate(const json& cfg, const std::string& out_dir) {
    BuiltSystem bs = build_system(cfg);
    const IntegratorConfig ic = integrator_from_json(cfg);
    const double T = cfg.at("T").get<double>();
    const double t0 = cfg.value("t0", 0.0);
    if (!(T > 0)) throw ConfigError("config: T must be positive");
    if (ic.h > T) throw ConfigError("config: h must not exceed T");

    PhaseState s0{t0, cfg.at("initial").get<Vec>()};
    if (s0.dim() != bs.sys.dim)
        throw ConfigError("config: initial state dimension does not match system");

    IntegrateOptions opt;
    opt.reservoirs = bs.invariant.reservoirs;
    if (bs.invariant.potential) opt.potential = &*bs.invariant.potential;

    const auto wall0 = std::chrono::steady_clock::now();
    Trajectory traj = integrate(bs.sys, s0, ic, T, opt);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    const json& outputs = cfg.value("outputs", json::object());
    const std::string csv = out_path(out_dir, outputs.value("trajectory", ""));
    if (!csv.empty()) write_csv(csv, traj);

    json report;
    report["system"] = bs.label;
    report["method"] = method_name(ic.method);
    report["h"] = ic.h;
    report["steps"] = traj.size() - 1;
    report["wall_time"] = wall;
    if (!bs.invariant.reservoirs.empty() || bs.invariant.potential) {
        const KSeries ks = effective_K(bs.invariant, traj);
        report["k_initial"] = ks.initial;
        report["k_drift_max"] = ks.max_drift;
    }
    if (traj.aborted()) report["error"] = traj.error;

    const std::string rep = out_path(out_dir, outputs.value("report", ""));
    if (!rep.empty()) {
        std::ofstream f(rep, std::ios::binary);
        if (!f) throw ConfigError("cannot write file: " + rep);
        f << report.dump(2) << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }

    if (traj.aborted()) {
        std::cerr << "numerical failure: " << traj.error << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

json run_check_suites(const json& cfg) {
    BuiltSystem bs = build_system(cfg);
    const json tols = cfg.value("check", json::object());
    const int n_samples = tols.value("samples", 1000);
    const double tol_pointwise = tols.value("tol_pointwise", 1e-10);
    const double tol_skew = tols.value("tol_skew", 1e-12);
    const double tol_bh = tols.value("tol_skew_gradient", 1e-8);
    const double tol_casimir = tols.value("tol_casimir", 1e-10);
    const double tol_jacobi = tols.value("tol_jacobi", 1e-6);
    const double perturb = tols.value("perturb_pfaffian", 0.0);  // fault injection

    Vec lo(bs.sys.dim, -2.0), hi(bs.sys.dim, 2.0);
    if (bs.zoo) { lo = bs.zoo->sample_lo; hi = bs.zoo->sample_hi; }
    else if (bs.sys.domain_guard) { lo.assign(bs.sys.dim, 0.1); hi.assign(bs.sys.dim, 2.0); }

    std::mt19937 rng(tols.value("seed", 20260826u));
    auto sample = [&] {
        Vec x(bs.sys.dim);
        for (int i = 0; i < bs.sys.dim; ++i) {
            std::uniform_real_distribution<double> u(lo[i], hi[i]);
            x[i] = u(rng);
        }
        return x;
    };

    json suites = json::array();
    bool all_ok = true;
    auto add = [&](const std::string& name, bool pass, double residual,
                   const std::string& note = "") {
        json s;
        s["suite"] = name;
        s["pass"] = pass;
        s["max_residual"] = residual;
        if (!note.empty()) s["note"] = note;
        suites.push_back(s);
        if (!pass) all_ok = false;
    };

    // pointwise conservation identity dK(f) = 0
    if (!bs.invariant.reservoirs.empty() || bs.invariant.potential) {
        PfaffianForm form = bs.invariant.to_pfaffian();
        if (perturb != 0.0) {
            auto base = form.components[0];
            form.components[0] = [base, perturb](const Vec& x) { return base(x) + perturb; };
        }
        double worst = 0.0;
        for (int k = 0; k < n_samples; ++k) {
            const Vec x = sample();
            PhaseState s{0.0, x};
            worst = std::max(worst, std::abs(pfaffian_contract(form, s, bs.sys.field(x))));
        }
        add("pointwise_dK_f", worst <= tol_pointwise, worst);
    }

    std::vector<PhaseState> states;
    for (int k = 0; k < std::min(n_samples, 100); ++k) states.push_back({0.0, sample()});

    if (bs.sys.skew) {
        const SkewReport rep = check_skew(*bs.sys.skew, states);
        add("skew_symmetry", std::max(rep.max_quadform, rep.max_symmetry) <= tol_skew,
            std::max(rep.max_quadform, rep.max_symmetry));
    }
    if (bs.sys.skew && bs.sys.hamiltonian) {
        double worst = 0.0;
        for (const auto& s : states)
            worst = std::max(worst, skew_gradient_residual(bs.sys, s.x));
        add("skew_gradient_f_eq_BgradH", worst <= tol_bh, worst);
    }
    if (bs.sys.skew) {
        double worst = 0.0;
        for (const auto& s : states)
            worst = std::max(worst, check_jacobi(*bs.sys.skew, s, 1e-4).normalized());
        const bool expect_pass = !bs.zoo || bs.zoo->skew_is_poisson;
        if (expect_pass) {
            add("jacobi_identity", worst <= tol_jacobi, worst);
        } else {
            // the paper's mass-action structure is skew but not Poisson
            add("jacobi_identity", worst > tol_jacobi, worst, "expected-fail");
        }
    }
    if (bs.zoo && bs.zoo->structure) {
        double worst = 0.0;
        for (const auto& s : states)
            worst = std::max(worst, check_jacobi(*bs.zoo->structure, s, 1e-4).normalized());
        add("jacobi_identity_structure", worst <= tol_jacobi, worst);
    }
    if (bs.zoo && bs.zoo->casimir && bs.zoo->structure) {
        const CasimirReport rep = verify_casimir(*bs.zoo->structure, *bs.zoo->casimir, states);
        add("casimir", rep.max_residual <= tol_casimir, rep.max_residual);
    }

    json report;
    report["system"] = bs.label;
    report["suites"] = suites;
    report["pass"] = all_ok;
    return report;
}

int cmd_check(const json& cfg, const std::string& out_dir) {
    const json report = run_check_suites(cfg);
    const json& outputs = cfg.value("outputs", json::object());
    const std::string rep = out_path(out_dir, outputs.value("report", ""));
    if (!rep.empty()) {
        std::ofstream f(rep, std::ios::binary);
        if (!f) throw ConfigError("cannot write file: " + rep);
        f << report.dump(2) << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return report.at("pass").get<bool>() ? kExitOk : kExitCheckFailed;
}

int cmd_compile(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::vector<std::string> warnings;
    ReactionNetwork net;
    try {
        net = parse_network(text, &warnings);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitConfig;
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    if (net.species.empty()) {
        std::cerr << "warning: empty network\n";
        return kExitOk;
    }

    std::cout << "species:";
    for (const auto& s : net.species) std::cout << " " << s;
    std::cout << "\n";

    const auto rhs = rhs_strings(net);
    for (int i = 0; i < net.species_count(); ++i)
        std::cout << "d" << net.species[i] << "/dt = " << rhs[i] << "\n";

    const StoichMatrix N = stoich_matrix(net);
    std::cout << "stoichiometric matrix (species x reactions):\n";
    for (int i = 0; i < N.n_species; ++i) {
        for (int k = 0; k < N.n_reactions; ++k)
            std::cout << (k ? " " : "  ") << N(i, k);
        std::cout << "\n";
    }

    const auto basis = linear_invariants(net);
    if (basis.empty()) {
        std::cout << "conserved: none\n";
    } else {
        for (const auto& c : basis) {
            std::cout << "conserved: ";
            bool first = true;
            for (int i = 0; i < net.species_count(); ++i) {
                if (c[i] == 0) continue;
                if (!first) std::cout << (c[i] < 0 ? " - " : " + ");
                else if (c[i] < 0) std::cout << "-";
                const long long mag = std::llabs(c[i]);
                if (mag != 1) std::cout << mag << " ";
                std::cout << net.species[i];
                first = false;
            }
            std::cout << "\n";
        }
    }
    return kExitOk;
}

int run_batch(const std::vector<std::string>& configs,
              const std::vector<std::string>& params, const std::string& out_dir,
              int jobs, int (*fn)(const json&, const std::string&)) {
    std::vector<json> cfgs;
    for (const auto& path : configs) {
        json cfg;
        try {
            cfg = json::parse(read_file(path));
            for (const auto& kv : params) apply_override(cfg, kv);
        } catch (const json::exception& e) {
            std::cerr << "error: " << path << ": " << e.what() << "\n";
            return kExitConfig;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        cfgs.push_back(std::move(cfg));
    }

    std::atomic<int> next{0};
    std::vector<int> codes(cfgs.size(), kExitOk);
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= static_cast<int>(cfgs.size())) return;
            try {
                codes[i] = fn(cfgs[i], out_dir);
            } catch (const ConfigError& e) {
                std::cerr << "error: " << configs[i] << ": " << e.what() << "\n";
                codes[i] = kExitConfig;
            } catch (const Error& e) {
                std::cerr << "error: " << configs[i] << ": " << e.what() << "\n";
                codes[i] = kExitNumerical;
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cfgs.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    int worst = kExitOk;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving dynamical-systems toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    std::vector<std::string> params;
    std::string out_dir;
    int jobs = 1;
    std::string network_path;

    auto* sim = app.add_subcommand("simulate", "integrate a configured run");
    sim->add_option("config", configs, "JSON run configuration(s)")->required();
    sim->add_option("--param", params, "dotted-key overrides, key=value");
    sim->add_option("--out-dir", out_dir, "directory prefix for output files");
    sim->add_option("--jobs", jobs, "concurrent runs for multi-config sweeps");

    auto* chk = app.add_subcommand("check", "run invariant suites");
    chk->add_option("config", configs, "JSON run configuration(s)")->required();
    chk->add_option("--param", params, "dotted-key overrides, key=value");
    chk->add_option("--out-dir", out_dir, "directory prefix for output files");
    chk->add_option("--jobs", jobs, "concurrent runs for multi-config sweeps");

    auto* comp = app.add_subcommand("compile", "compile a reaction-network DSL file");
    comp->add_option("network", network_path, "network DSL file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (comp->parsed()) return cmd_compile(network_path);
        if (sim->parsed()) return run_batch(configs, params, out_dir, jobs, &cmd_simulate);
        return run_batch(configs, params, out_dir, jobs, &cmd_check);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
