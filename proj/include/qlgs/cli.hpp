#pragma once

// Batch front door: flat key = value config parsing, the five subcommands
// (solve, fiber-dump, check-potential, verify, sweep), and deterministic
// file outputs for profiles, fiber curves, summaries, and sweep tables.

#include <qlgs/fiber.hpp>
#include <qlgs/functionals.hpp>
#include <qlgs/grid.hpp>
#include <qlgs/model.hpp>
#include <qlgs/solver.hpp>
#include <qlgs/verify.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlgs {

struct RunConfig {
    int dimension = 3;
    double alpha = 0.0;
    double beta = 0.0;
    double coupling_B = 0.0;
    std::string potential_name;
    double A0 = 0.0;
    double Ainf = 0.0;
    double r_max = 0.0;
    int node_count = 0;
    int deriv_order = 4;
    SolveOptions solver;
    std::string output_dir = ".";
    double a2_bound = 1e308;      // slope-bound check passes unless tightened
    double fiber_t_min = 0.1;
    double fiber_t_max = 10.0;
    int fiber_t_count = 200;
    std::vector<double> sweep_alphas;
    std::vector<double> sweep_betas;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key \"" + key +
                                    "\" needs a number, got \"" + value + "\"");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key \"" + key +
                                    "\" needs an integer, got \"" + value + "\"");
    }
}

inline bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw std::invalid_argument("config key \"" + key +
                                "\" needs on/off, got \"" + value + "\"");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw std::invalid_argument("config key \"" + key +
                                        "\" has an empty list entry");
        out.push_back(parse_real(key, item));
    }
    return out;
}

// Shortest round-trip-exact decimal rendering used in every output file.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt(xs[i]);
    }
    return out;
}

} // namespace detail

inline RadialGrid make_grid_from(const RunConfig& cfg) {
    return make_grid(cfg.dimension, cfg.r_max, cfg.node_count, cfg.deriv_order);
}

inline ModelParams make_model_from(const RunConfig& cfg) {
    return make_model(cfg.dimension, cfg.alpha, cfg.beta, cfg.coupling_B);
}

inline PotentialSpec make_potential_from(const RunConfig& cfg) {
    return make_potential(cfg.potential_name, cfg.A0, cfg.Ainf, cfg.r_max);
}

// Parses the flat key = value grammar (one pair per line, # comments,
// comma-separated lists) and validates the resulting configuration by
// constructing the model, grid, and potential it describes.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;

    std::stringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not a key = value pair: \"" + line + "\"");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " has an empty key");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config key \"" + key + "\" appears twice");

        if (key == "N") cfg.dimension = detail::parse_int(key, value);
        else if (key == "alpha") cfg.alpha = detail::parse_real(key, value);
        else if (key == "beta") cfg.beta = detail::parse_real(key, value);
        else if (key == "B") cfg.coupling_B = detail::parse_real(key, value);
        else if (key == "potential") cfg.potential_name = value;
        else if (key == "A0") cfg.A0 = detail::parse_real(key, value);
        else if (key == "Ainf") cfg.Ainf = detail::parse_real(key, value);
        else if (key == "r_max") cfg.r_max = detail::parse_real(key, value);
        else if (key == "M") cfg.node_count = detail::parse_int(key, value);
        else if (key == "deriv_order") cfg.deriv_order = detail::parse_int(key, value);
        else if (key == "max_outer") cfg.solver.max_outer = detail::parse_int(key, value);
        else if (key == "descent_tol") cfg.solver.descent_tol = detail::parse_real(key, value);
        else if (key == "step0") cfg.solver.step0 = detail::parse_real(key, value);
        else if (key == "backtrack") cfg.solver.backtrack = detail::parse_real(key, value);
        else if (key == "armijo") cfg.solver.armijo = detail::parse_real(key, value);
        else if (key == "seed_count") cfg.solver.seed_count = detail::parse_int(key, value);
        else if (key == "positivity") cfg.solver.positivity = detail::parse_flag(key, value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "a2_bound") cfg.a2_bound = detail::parse_real(key, value);
        else if (key == "t_min") cfg.fiber_t_min = detail::parse_real(key, value);
        else if (key == "t_max") cfg.fiber_t_max = detail::parse_real(key, value);
        else if (key == "t_count") cfg.fiber_t_count = detail::parse_int(key, value);
        else if (key == "alphas") cfg.sweep_alphas = detail::parse_list(key, value);
        else if (key == "betas") cfg.sweep_betas = detail::parse_list(key, value);
        else throw std::invalid_argument("unknown config key \"" + key + "\"");
    }

    for (const char* required : {"N", "alpha", "beta", "B", "potential", "A0", "r_max", "M"})
        if (!seen.count(required))
            throw std::invalid_argument("missing required config key \"" +
                                        std::string(required) + "\"");
    if (!seen.count("Ainf")) cfg.Ainf = cfg.A0;

    validate_options(cfg.solver);
    make_model_from(cfg);
    make_grid_from(cfg);
    make_potential_from(cfg);
    return cfg;
}

namespace detail {

// The complete effective configuration, defaults included, in a fixed order.
inline void write_config_echo(std::ostream& os, const RunConfig& cfg) {
    os << "[config]\n";
    os << "N = " << cfg.dimension << "\n";
    os << "alpha = " << fmt(cfg.alpha) << "\n";
    os << "beta = " << fmt(cfg.beta) << "\n";
    os << "B = " << fmt(cfg.coupling_B) << "\n";
    os << "potential = " << cfg.potential_name << "\n";
    os << "A0 = " << fmt(cfg.A0) << "\n";
    os << "Ainf = " << fmt(cfg.Ainf) << "\n";
    os << "r_max = " << fmt(cfg.r_max) << "\n";
    os << "M = " << cfg.node_count << "\n";
    os << "deriv_order = " << cfg.deriv_order << "\n";
    os << "max_outer = " << cfg.solver.max_outer << "\n";
    os << "descent_tol = " << fmt(cfg.solver.descent_tol) << "\n";
    os << "step0 = " << fmt(cfg.solver.step0) << "\n";
    os << "backtrack = " << fmt(cfg.solver.backtrack) << "\n";
    os << "armijo = " << fmt(cfg.solver.armijo) << "\n";
    os << "seed_count = " << cfg.solver.seed_count << "\n";
    os << "positivity = " << (cfg.solver.positivity ? "on" : "off") << "\n";
    os << "output_dir = " << cfg.output_dir << "\n";
    os << "a2_bound = " << fmt(cfg.a2_bound) << "\n";
    os << "t_min = " << fmt(cfg.fiber_t_min) << "\n";
    os << "t_max = " << fmt(cfg.fiber_t_max) << "\n";
    os << "t_count = " << cfg.fiber_t_count << "\n";
    os << "alphas = " << fmt_list(cfg.sweep_alphas) << "\n";
    os << "betas = " << fmt_list(cfg.sweep_betas) << "\n";
}

inline std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    const auto path = std::filesystem::path(cfg.output_dir) / name;
    std::ofstream os(path, std::ios::binary); // fixed newlines on every platform
    if (!os)
        throw std::runtime_error("cannot open output file " + path.string());
    return os;
}

// Replaces field-breaking characters so messages embed into one CSV cell.
inline std::string csv_safe(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

} // namespace detail

// solve: ground-state run; writes profile.csv and summary.txt.
inline int run_solve(const RunConfig& cfg, bool quiet) {
    const RadialGrid grid = make_grid_from(cfg);
    const ModelParams model = make_model_from(cfg);
    const PotentialSpec pot = make_potential_from(cfg);

    const SolveReport rep = solve(grid, model, pot, cfg.solver);

    {
        auto os = detail::open_output(cfg, "profile.csv");
        os << "r,u,v\n";
        for (int i = 0; i < grid.node_count; ++i)
            os << detail::fmt(grid.nodes[i]) << "," << detail::fmt(rep.pair.u[i])
               << "," << detail::fmt(rep.pair.v[i]) << "\n";
    }
    {
        const EnergyBreakdown b = breakdown(grid, model, pot, rep.pair);
        auto os = detail::open_output(cfg, "summary.txt");
        detail::write_config_echo(os, cfg);
        os << "[energy]\n";
        os << "kin = " << detail::fmt(b.kin) << "\n";
        os << "potA = " << detail::fmt(b.potA) << "\n";
        os << "potB = " << detail::fmt(b.potB) << "\n";
        os << "quasi = " << detail::fmt(b.quasi) << "\n";
        os << "gradA = " << detail::fmt(b.gradA) << "\n";
        os << "coupling = " << detail::fmt(b.coupling) << "\n";
        os << "[residuals]\n";
        os << "g = " << detail::fmt(rep.g_residual) << "\n";
        os << "p = " << detail::fmt(rep.p_residual) << "\n";
        os << "el = " << detail::fmt(rep.el_norm) << "\n";
        os << "[result]\n";
        os << "m = " << detail::fmt(rep.m_value) << "\n";
        os << "iterations = " << rep.iterations << "\n";
        os << "converged = " << (rep.converged ? "true" : "false") << "\n";
        os << "seed_index = " << rep.seed_index << "\n";
    }

    if (!quiet) {
        if (!rep.notes.empty()) std::cout << rep.notes;
        std::cout << "m = " << detail::fmt(rep.m_value) << " ("
                  << (rep.converged ? "converged" : "not converged") << ", seed "
                  << rep.seed_index << ", " << rep.iterations << " iterations)\n";
    }
    return rep.converged ? 0 : 1;
}

// fiber-dump: projects the canonical seed pair onto the manifold and writes
// the (t, h, h') samples of its fiber curve.
inline int run_fiber_dump(const RunConfig& cfg, bool quiet) {
    const RadialGrid grid = make_grid_from(cfg);
    const ModelParams model = make_model_from(cfg);
    const PotentialSpec pot = make_potential_from(cfg);

    const FieldPair pair = project(grid, model, pot, initial_pair(grid, model, 0));
    const FiberCurve curve = fiber_curve(grid, model, pot, pair, cfg.fiber_t_min,
                                         cfg.fiber_t_max, cfg.fiber_t_count);

    auto os = detail::open_output(cfg, "fiber.csv");
    os << "t,h,h_prime\n";
    for (std::size_t i = 0; i < curve.t_values.size(); ++i)
        os << detail::fmt(curve.t_values[i]) << "," << detail::fmt(curve.h_values[i])
           << "," << detail::fmt(curve.h_prime_values[i]) << "\n";

    if (!quiet)
        std::cout << "fiber maximizer t_bar = " << detail::fmt(curve.t_bar) << " ("
                  << curve.t_values.size() << " samples)\n";
    return 0;
}

// check-potential: prints one verdict per hypothesis check.
inline int run_check_potential(const RunConfig& cfg, bool quiet) {
    const RadialGrid grid = make_grid_from(cfg);
    const ModelParams model = make_model_from(cfg);
    const PotentialSpec pot = make_potential_from(cfg);

    const CheckResult a1 = check_A1(pot, grid);
    const CheckResult a2 = check_A2(pot, grid, cfg.a2_bound);
    const CheckResult a3 = check_A3(pot, model, grid);

    if (!quiet) {
        auto verdict = [](const char* name, const CheckResult& c) {
            std::cout << name << " " << (c.pass ? "PASS" : "FAIL") << " (worst "
                      << detail::fmt(c.worst_value) << " at "
                      << detail::fmt(c.worst_location) << ")";
            if (!c.note.empty()) std::cout << " " << c.note;
            std::cout << "\n";
        };
        verdict("A1", a1);
        verdict("A2", a2);
        verdict("A3", a3);
    }
    return (a1.pass && a2.pass && a3.pass) ? 0 : 1;
}

// verify: runs the independent check suite and prints the aligned report.
inline int run_verify_cmd(const RunConfig& cfg, bool quiet) {
    const RadialGrid grid = make_grid_from(cfg);
    const ModelParams model = make_model_from(cfg);
    const PotentialSpec pot = make_potential_from(cfg);

    const VerifyReport rep = run_verify(grid, model, pot, cfg.solver);
    if (!quiet) {
        std::cout << "identity_max_rel_err = " << detail::fmt(rep.identity_max_rel_err) << "\n";
        std::cout << "holder_worst_slack   = " << detail::fmt(rep.holder_worst_slack) << "\n";
        std::cout << "oracle_energy        = " << detail::fmt(rep.oracle_energy) << "\n";
        std::cout << "oracle_el_norm       = " << detail::fmt(rep.oracle_el_norm) << "\n";
        std::cout << "comparison_margin    = " << detail::fmt(rep.comparison_margin) << "\n";
        for (const auto& note : rep.notes) std::cout << "note: " << note << "\n";
        std::cout << (rep.pass() ? "PASS" : "FAIL") << "\n";
    }
    return rep.pass() ? 0 : 1;
}

// sweep: one solve per (alpha, beta) combination; inadmissible exponent
// pairs are recorded with a reason instead of aborting the run.
inline int run_sweep(const RunConfig& cfg, bool quiet) {
    if (cfg.sweep_alphas.empty() || cfg.sweep_betas.empty())
        throw std::invalid_argument("sweep requires the alphas and betas config keys");

    const RadialGrid grid = make_grid_from(cfg);
    const PotentialSpec pot = make_potential_from(cfg);

    auto os = detail::open_output(cfg, "sweep.csv");
    os << "alpha,beta,m,converged,reason\n";

    bool all_ok = true;
    for (const double a : cfg.sweep_alphas) {
        for (const double b : cfg.sweep_betas) {
            ModelParams model;
            try {
                model = make_model(cfg.dimension, a, b, cfg.coupling_B);
            } catch (const std::exception& e) {
                os << detail::fmt(a) << "," << detail::fmt(b) << ",,skipped,"
                   << detail::csv_safe(e.what()) << "\n";
                if (!quiet)
                    std::cout << "alpha = " << detail::fmt(a) << ", beta = "
                              << detail::fmt(b) << ": skipped (" << e.what() << ")\n";
                continue;
            }
            std::string reason;
            double m_value = 0.0;
            bool converged = false;
            try {
                const SolveReport rep = solve(grid, model, pot, cfg.solver);
                m_value = rep.m_value;
                converged = rep.converged;
                if (!converged) reason = "did not converge within max_outer";
            } catch (const std::exception& e) {
                reason = e.what();
            }
            os << detail::fmt(a) << "," << detail::fmt(b) << ","
               << detail::fmt(m_value) << "," << (converged ? "true" : "false")
               << "," << detail::csv_safe(reason) << "\n";
            if (!quiet)
                std::cout << "alpha = " << detail::fmt(a) << ", beta = "
                          << detail::fmt(b) << ": m = " << detail::fmt(m_value)
                          << (converged ? "" : " (not converged)") << "\n";
            if (!converged) all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

inline int usage(std::ostream& os) {
    os << "usage: qlgs <solve|fiber-dump|check-potential|verify|sweep>"
          " --config <path> [--out <dir>] [--seed-count <n>] [--quiet]\n";
    return 2;
}

// Entry point shared by the binary and the end-to-end tests.
inline int main_entry(int argc, char** argv) {
    if (argc < 2) return usage(std::cerr);
    const std::string cmd = argv[1];
    const bool known = cmd == "solve" || cmd == "fiber-dump" ||
                       cmd == "check-potential" || cmd == "verify" || cmd == "sweep";
    if (!known) {
        std::cerr << "unknown subcommand \"" << cmd << "\"\n";
        return usage(std::cerr);
    }

    std::string config_path, out_dir, seed_count;
    bool quiet = false;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> std::string {
            if (i + 1 >= argc) {
                throw std::invalid_argument("flag " + arg + " needs a value");
            }
            return argv[++i];
        };
        try {
            if (arg == "--config") config_path = next();
            else if (arg == "--out") out_dir = next();
            else if (arg == "--seed-count") seed_count = next();
            else if (arg == "--quiet") quiet = true;
            else {
                std::cerr << "unknown flag \"" << arg << "\"\n";
                return usage(std::cerr);
            }
        } catch (const std::invalid_argument& e) {
            std::cerr << e.what() << "\n";
            return usage(std::cerr);
        }
    }
    if (config_path.empty()) {
        std::cerr << "missing --config <path>\n";
        return usage(std::cerr);
    }

    try {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read config file " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();

        RunConfig cfg = parse_config(buf.str());
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (!seed_count.empty()) {
            cfg.solver.seed_count = detail::parse_int("--seed-count", seed_count);
            validate_options(cfg.solver);
        }

        if (cmd == "solve") return run_solve(cfg, quiet);
        if (cmd == "fiber-dump") return run_fiber_dump(cfg, quiet);
        if (cmd == "check-potential") return run_check_potential(cfg, quiet);
        if (cmd == "verify") return run_verify_cmd(cfg, quiet);
        return run_sweep(cfg, quiet);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace qlgs
