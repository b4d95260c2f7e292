// Command-line front end: validate systems, compute decay certificates,
// run parameter sweeps, simulate, and check certified envelopes.
//
// Exit codes: 0 ok, 1 internal error, 2 unparseable config, 3 validation
// failure, 4 uncertifiable system, 5 envelope violation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phsdecay/catalog.hpp"
#include "phsdecay/certifier.hpp"
#include "phsdecay/io.hpp"
#include "phsdecay/simulator.hpp"

namespace {

using namespace phsdecay;

// "p/q" fractions in value lists are parsed exactly.
double parse_value(const std::string& s) {
    const auto slash = s.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
        return v;
    }
    const double num = std::stod(s.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument("bad number '" + s + "'");
    const std::string den_s = s.substr(slash + 1);
    const double den = std::stod(den_s, &used);
    if (used != den_s.size() || den == 0.0)
        throw std::invalid_argument("bad fraction '" + s + "'");
    return num / den;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const std::string tok =
            list.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) out.push_back(parse_value(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty value list");
    return out;
}

struct Options {
    std::string system_file;
    std::string catalog_name;
    std::string multiplier = "auto";
    std::string xi_text;
    double beta = 0.0;
    bool beta_set = false;
    double k = 1.0;
    bool k_set = false;
    int grid = 0;
    int N = 200;
    double dt = 1e-3;
    double T = 0.0;
    bool T_set = false;
    double alpha_override = 0.0;
    bool alpha_set = false;
    std::string out_path;
    std::string csv_path;
    std::string dump_path;
    std::string sweep_var;
    std::string sweep_values;
};

struct LoadedSystem {
    PHSystem sys;
    std::uint64_t hash = 0;
    std::optional<CatalogEntry> entry;  // set when loaded from the catalog
};

LoadedSystem load(const Options& opt) {
    LoadedSystem ls;
    if (!opt.system_file.empty()) {
        ls.sys = load_system(opt.system_file, &ls.hash);
        return ls;
    }
    CatalogEntry e = find_catalog_entry(opt.catalog_name);
    if (opt.k_set) {
        if (opt.catalog_name == "wave-unit")
            e = wave_constant(1.0, 1.0, opt.k, 0.0, 1.0);
        else if (opt.catalog_name.rfind("timoshenko", 0) == 0)
            throw std::invalid_argument("--k override supported for wave-unit only");
        else
            throw std::invalid_argument("--k override supported for wave-unit only");
    }
    ls.sys = e.system;
    ls.hash = fnv1a64(system_to_json(e.system).dump());
    ls.entry = std::move(e);
    return ls;
}

double pick_xi(const Options& opt, const LoadedSystem& ls) {
    if (!opt.xi_text.empty()) return parse_value(opt.xi_text);
    if (ls.entry) return ls.entry->recommended_xi;
    return 0.5;
}

int grid_size(const Options& opt) {
    return opt.grid > 0 ? opt.grid : default_grid_size();
}

int run_validation(const PHSystem& sys, int grid, bool print) {
    const ValidationReport rep = validate_system(sys, grid);
    if (print) {
        for (const auto& c : rep.checks) {
            const char* tag = c.passed ? "pass" : (c.warning_only ? "warn" : "FAIL");
            std::printf("[%s] %s%s%s\n", tag, c.name.c_str(),
                        c.detail.empty() ? "" : ": ", c.detail.c_str());
        }
        std::printf("validation %s\n", rep.passed ? "passed" : "failed");
    }
    return rep.passed ? 0 : 3;
}

struct CertifyOutcome {
    std::optional<Certificate> cert;
    std::vector<CandidateFailure> failures;
    std::string message;
};

CertifyOutcome certify_one(const PHSystem& sys, const LoadedSystem& ls,
                           const Options& opt, double xi, int grid) {
    CertifyOutcome out;
    if (opt.multiplier == "auto") {
        if (ls.entry && !opt.beta_set) {
            CertifyResult r =
                assemble_certificate(sys, ls.entry->recommended_multiplier, xi, grid);
            if (r.certified()) {
                out.cert = r.certificate;
                return out;
            }
        }
        BestCertificateResult r = best_certificate(sys, xi, {}, grid);
        out.cert = r.certificate;
        out.failures = r.failures;
        return out;
    }
    MultiplierSpec m = MultiplierSpec::linear(sys.a);
    if (opt.multiplier == "exponential") {
        const double beta = opt.beta_set
                                ? opt.beta
                                : optimize_beta(sys, xi, grid).beta_op;
        m = MultiplierSpec::exponential(1.0, beta, sys.a);
    } else if (opt.multiplier == "affine") {
        BestCertificateResult r =
            best_certificate(sys, xi, {MultiplierFamily::Affine}, grid);
        out.cert = r.certificate;
        out.failures = r.failures;
        return out;
    } else if (opt.multiplier != "linear") {
        throw std::invalid_argument("unknown multiplier family '" +
                                    opt.multiplier + "'");
    }
    CertifyResult r = assemble_certificate(sys, m, xi, grid);
    if (r.certified())
        out.cert = r.certificate;
    else {
        out.failures.push_back(
            {m.family(), r.positivity.argmin_x, r.positivity.margin});
        out.message = r.message;
    }
    return out;
}

void print_certificate(const Certificate& c) {
    std::printf("multiplier   %s\n", c.multiplier.describe().c_str());
    std::printf("c            %.12g\n", c.c);
    std::printf("eps0         %.12g\n", c.eps0);
    std::printf("eps1         %.12g\n", c.eps1);
    std::printf("xi           %.12g\n", c.xi);
    std::printf("eps          %.12g\n", c.eps);
    std::printf("M            %.12g\n", c.M);
    std::printf("alpha        %.12g\n", c.alpha);
    std::printf("margin       %.12g\n", c.positivity_margin);
    std::printf("grid_size    %d%s\n", c.grid_size,
                c.converged ? "" : " (NOT converged)");
    for (const auto& w : c.warnings) std::printf("warning      %s\n", w.c_str());
}

int report_uncertifiable(const CertifyOutcome& out) {
    std::fprintf(stderr, "uncertifiable: no multiplier candidate stays positive\n");
    for (const auto& f : out.failures)
        std::fprintf(stderr, "  %s multiplier fails at x=%.12g (margin %.6g)\n",
                     to_string(f.family), f.failing_x, f.margin);
    if (!out.message.empty()) std::fprintf(stderr, "  %s\n", out.message.c_str());
    return 4;
}

int cmd_certify(const Options& opt) {
    const LoadedSystem ls = load(opt);
    const int grid = grid_size(opt);
    if (int rc = run_validation(ls.sys, grid, false)) {
        std::fprintf(stderr, "system failed validation (run 'validate' for details)\n");
        return rc;
    }
    const double xi = pick_xi(opt, ls);
    const CertifyOutcome out = certify_one(ls.sys, ls, opt, xi, grid);
    if (!out.cert) return report_uncertifiable(out);
    print_certificate(*out.cert);
    if (!opt.out_path.empty()) save_certificate(opt.out_path, *out.cert, ls.hash);
    return 0;
}

int cmd_sweep(const Options& opt) {
    if (opt.sweep_var != "k" && opt.sweep_var != "xi" && opt.sweep_var != "beta")
        throw std::invalid_argument("--var must be one of k, xi, beta");
    const std::vector<double> values = parse_values(opt.sweep_values);
    const int grid = grid_size(opt);

    std::vector<SweepRow> rows;
    for (const double v : values) {
        Options o = opt;
        if (opt.sweep_var == "k") {
            o.k = v;
            o.k_set = true;
        } else if (opt.sweep_var == "beta") {
            o.beta = v;
            o.beta_set = true;
            o.multiplier = "exponential";
        }
        const LoadedSystem ls = load(o);
        if (int rc = run_validation(ls.sys, grid, false)) return rc;
        const double xi = opt.sweep_var == "xi" ? v : pick_xi(o, ls);
        const CertifyOutcome out = certify_one(ls.sys, ls, o, xi, grid);
        if (!out.cert) return report_uncertifiable(out);
        const Certificate& c = *out.cert;
        rows.push_back({v, c.eps0, c.eps1, c.c, c.M, c.alpha,
                        c.positivity_margin});
    }
    if (opt.csv_path.empty()) {
        write_sweep_csv(std::cout, rows);
    } else {
        std::ofstream f(opt.csv_path);
        if (!f) throw std::runtime_error("cannot write " + opt.csv_path);
        write_sweep_csv(f, rows);
    }
    return 0;
}

SimulationTrace run_simulation(const PHSystem& sys, const Options& opt,
                               double T) {
    const Discretization disc = discretize(sys, opt.N);
    const StateField z0 = default_initial_condition(sys, opt.N);
    return simulate(disc, z0, T, opt.dt);
}

int cmd_simulate(const Options& opt) {
    const LoadedSystem ls = load(opt);
    if (int rc = run_validation(ls.sys, grid_size(opt), false)) return rc;
    const double T = opt.T_set ? opt.T : 10.0;
    const SimulationTrace tr = run_simulation(ls.sys, opt, T);
    const DecayFit fit = fit_decay(tr);
    std::printf("H(0)=%.12g H(T)=%.12g alpha_emp=%.6g (R^2=%.6g)\n",
                tr.energy.front(), tr.energy.back(), fit.alpha_emp,
                fit.r_squared);
    if (!opt.csv_path.empty()) {
        std::ofstream f(opt.csv_path);
        if (!f) throw std::runtime_error("cannot write " + opt.csv_path);
        write_trace_csv(f, tr);
    } else {
        write_trace_csv(std::cout, tr);
    }
    if (!opt.dump_path.empty()) write_state_dump(opt.dump_path, tr);
    return 0;
}

int cmd_verify(const Options& opt) {
    const LoadedSystem ls = load(opt);
    const int grid = grid_size(opt);
    if (int rc = run_validation(ls.sys, grid, false)) return rc;
    const double xi = pick_xi(opt, ls);
    const CertifyOutcome out = certify_one(ls.sys, ls, opt, xi, grid);
    if (!out.cert) return report_uncertifiable(out);
    Certificate cert = *out.cert;
    if (opt.alpha_set) cert.alpha = opt.alpha_override;
    const double T = opt.T_set ? opt.T : 5.0 / cert.alpha;
    const SimulationTrace tr = run_simulation(ls.sys, opt, T);
    const EnvelopeCheck chk = verify_certificate(cert, tr);
    const DecayFit fit = fit_decay(tr);
    std::printf("M=%.9g alpha=%.9g alpha_emp=%.6g envelope %s "
                "(max violation %.3g)\n",
                cert.M, cert.alpha, fit.alpha_emp,
                chk.passed ? "ok" : "VIOLATED", chk.max_violation);
    if (!opt.out_path.empty()) save_certificate(opt.out_path, cert, ls.hash);
    return chk.passed ? 0 : 5;
}

int cmd_catalog(const Options& opt) {
    if (!opt.catalog_name.empty()) {
        const CatalogEntry e = find_catalog_entry(opt.catalog_name);
        if (!opt.out_path.empty())
            save_system(opt.out_path, e.system);
        else
            std::cout << system_to_json(e.system).dump(2) << '\n';
        return 0;
    }
    for (const auto& e : catalog_entries())
        std::printf("%-22s n=%d [%g,%g]  %s\n", e.name.c_str(), e.system.n,
                    e.system.a, e.system.b, e.description.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decay-rate certificates for boundary-damped port-Hamiltonian systems"};
    app.require_subcommand(1);

    Options opt;
    std::string cmd;
    for (const char* name :
         {"validate", "certify", "sweep", "simulate", "verify", "catalog"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->callback([&cmd, name] { cmd = name; });
        sub->add_option("--system", opt.system_file, "system description file");
        sub->add_option("--catalog", opt.catalog_name, "built-in system name");
        sub->add_option("--multiplier", opt.multiplier,
                        "linear|exponential|affine|auto");
        sub->add_option("--xi", opt.xi_text, "perturbation fraction in (0,1]");
        sub->add_option("--beta", opt.beta, "exponential multiplier rate")
            ->each([&](const std::string&) { opt.beta_set = true; });
        sub->add_option("--k", opt.k, "boundary gain override (wave-unit)")
            ->each([&](const std::string&) { opt.k_set = true; });
        sub->add_option("--grid", opt.grid, "spatial scan resolution");
        sub->add_option("--N", opt.N, "simulation cells");
        sub->add_option("--dt", opt.dt, "time step");
        sub->add_option("--T", opt.T, "final time")
            ->each([&](const std::string&) { opt.T_set = true; });
        sub->add_option("--alpha", opt.alpha_override,
                        "check the envelope against this rate instead of the "
                        "certified one (verify)")
            ->each([&](const std::string&) { opt.alpha_set = true; });
        sub->add_option("--out", opt.out_path, "certificate/system output file");
        sub->add_option("--csv", opt.csv_path, "CSV output file");
        sub->add_option("--dump", opt.dump_path, "binary state dump file");
        sub->add_option("--var", opt.sweep_var, "sweep variable: k|xi|beta");
        sub->add_option("--values", opt.sweep_values,
                        "comma-separated sweep values (fractions allowed)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (opt.system_file.empty() == opt.catalog_name.empty() &&
            cmd != "catalog")
            throw std::invalid_argument("give exactly one of --system, --catalog");

        if (cmd == "validate") {
            const LoadedSystem ls = load(opt);
            return run_validation(ls.sys, grid_size(opt), true);
        }
        if (cmd == "certify") return cmd_certify(opt);
        if (cmd == "sweep") return cmd_sweep(opt);
        if (cmd == "simulate") return cmd_simulate(opt);
        if (cmd == "verify") return cmd_verify(opt);
        return cmd_catalog(opt);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
