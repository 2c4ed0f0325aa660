// Command-line front end: admissibility validation, Riccati flows, Laplace
// transforms, path simulation, Monte Carlo cross-checks, canonicalization
// and boundary audits over JSON parameter files.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "affine/json_io.hpp"

#ifdef __unix__
#include <sys/utsname.h>
#endif

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;
constexpr const char* kVersion = "0.1.0";

using affine::Json;

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
    return buf;
}

std::string host_descriptor() {
#ifdef __unix__
    utsname u{};
    if (uname(&u) == 0) return std::string(u.sysname) + " " + u.machine;
#endif
    return "unknown";
}

// Every output artifact embeds the manifest so results stay auditable.
Json manifest(const std::string& command, const Json& config,
              const std::map<std::string, std::string>& inputs, uint64_t seed) {
    Json m;
    m["command"] = command;
    m["config"] = config;
    Json digests;
    for (const auto& [path, digest] : inputs) digests[path] = digest;
    m["inputs"] = std::move(digests);
    m["library_version"] = kVersion;
    m["seed"] = seed;
    m["wall_clock_utc"] = iso_now();
    m["host"] = host_descriptor();
    return m;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows, const Json& man) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# manifest: " << man.dump() << "\n";
    out << header << "\n";
    out.precision(17);
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

std::vector<affine::SymMat> load_symmat_list(const std::string& path) {
    const Json j = affine::load_json_file(path);
    std::vector<affine::SymMat> out;
    if (j.is_array())
        for (const Json& e : j) out.push_back(affine::symmat_from_json(e));
    else
        out.push_back(affine::symmat_from_json(j));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"affine processes on the cone of positive semidefinite matrices"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // validate
    auto* validate = app.add_subcommand("validate", "check a parameter file for admissibility");
    std::string v_file;
    int v_pairs = 64;
    uint64_t v_seed = 0;
    validate->add_option("file", v_file, "parameter JSON")->required();
    validate->add_option("--pairs", v_pairs, "random complementary pairs for the drift check");
    validate->add_option("--seed", v_seed, "RNG seed for the randomized pairs");

    // riccati
    auto* riccati = app.add_subcommand("riccati", "solve the generalized Riccati equations");
    std::string r_file, r_u, r_out;
    double r_t = 1.0;
    int r_grid = 64;
    double r_rtol = 1e-8, r_atol = 1e-10;
    riccati->add_option("file", r_file, "parameter JSON")->required();
    riccati->add_option("--u", r_u, "initial condition SymMat JSON file")->required();
    riccati->add_option("--t", r_t, "horizon")->required();
    riccati->add_option("--grid", r_grid, "output grid intervals");
    riccati->add_option("--rtol", r_rtol, "relative tolerance");
    riccati->add_option("--atol", r_atol, "absolute tolerance");
    riccati->add_option("--out", r_out, "CSV output path (default stdout)");

    // transform (Laplace transform evaluation)
    auto* transform = app.add_subcommand("transform", "evaluate the Laplace transform");
    std::string t_file, t_x, t_u, t_closed;
    double t_t = 1.0;
    transform->add_option("file", t_file, "parameter JSON")->required();
    transform->add_option("--x", t_x, "initial state SymMat JSON file")->required();
    transform->add_option("--u", t_u, "transform argument SymMat JSON file")->required();
    transform->add_option("--t", t_t, "horizon")->required();
    transform->add_option("--closed-form", t_closed,
                          "closed-form oracle instead of the solver, e.g. wishart:2");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "simulate paths of the jump-diffusion");
    std::string s_file, s_x0, s_out = "summary.json", s_ulist, s_scheme = "euler-project";
    affine::SimConfig s_cfg;
    simulate->add_option("file", s_file, "parameter JSON")->required();
    simulate->add_option("--x0", s_x0, "initial state SymMat JSON file")->required();
    simulate->add_option("--dt", s_cfg.dt, "step size")->required();
    simulate->add_option("--t", s_cfg.t_end, "horizon")->required();
    simulate->add_option("--paths", s_cfg.n_paths, "number of paths")->required();
    simulate->add_option("--seed", s_cfg.seed, "RNG seed");
    simulate->add_option("--workers", s_cfg.workers, "worker threads (0 = hardware)");
    simulate->add_option("--scheme", s_scheme, "euler-project | euler-regularized");
    simulate->add_option("--eps", s_cfg.eps, "regularization epsilon");
    simulate->add_option("--cutoff-n", s_cfg.cutoff_n, "coefficient cutoff radius");
    simulate->add_option("--record", s_cfg.record_grid, "record times (default: horizon)");
    simulate->add_option("--u-list", s_ulist, "SymMat list JSON for MC Laplace estimates");
    simulate->add_option("--out", s_out, "output: paths.csv or summary.json by extension");

    // compare
    auto* compare = app.add_subcommand("compare", "Monte Carlo vs Riccati cross-validation");
    std::string c_file, c_x0, c_ulist, c_out = "report.json";
    std::vector<double> c_tlist;
    affine::CompareConfig c_cfg;
    compare->add_option("file", c_file, "parameter JSON")->required();
    compare->add_option("--x0", c_x0, "initial state SymMat JSON file")->required();
    compare->add_option("--u-list", c_ulist, "SymMat list JSON")->required();
    compare->add_option("--t-list", c_tlist, "query times")->required();
    compare->add_option("--dt", c_cfg.sim.dt, "step size");
    compare->add_option("--paths", c_cfg.sim.n_paths, "number of paths")->required();
    compare->add_option("--seed", c_cfg.sim.seed, "RNG seed");
    compare->add_option("--workers", c_cfg.sim.workers, "worker threads (0 = hardware)");
    compare->add_option("--bias-budget", c_cfg.bias_budget, "bias allowance at dt = 1e-3");
    compare->add_option("--convergence-dts", c_cfg.convergence_dts,
                        "extra dt values for a convergence table");
    compare->add_option("--out", c_out, "report JSON path");

    // canonicalize
    auto* canonicalize = app.add_subcommand("canonicalize", "canonical representation of a set");
    std::string k_file, k_out;
    double k_rank_tol = 1e-10;
    canonicalize->add_option("file", k_file, "parameter JSON")->required();
    canonicalize->add_option("--rank-tol", k_rank_tol, "relative rank tolerance for alpha");
    canonicalize->add_option("--out", k_out, "output JSON path (default stdout)");

    // audit
    auto* audit = app.add_subcommand("audit", "boundary viability audit");
    std::string a_file;
    double a_eps = 1e-6, a_n = 1e6;
    int a_samples = 200;
    uint64_t a_seed = 0;
    audit->add_option("file", a_file, "parameter JSON")->required();
    audit->add_option("--eps", a_eps, "regularization epsilon");
    audit->add_option("--n", a_n, "coefficient cutoff radius");
    audit->add_option("--samples", a_samples, "boundary sample count");
    audit->add_option("--seed", a_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*validate) {
            const affine::AffineParams p = affine::load_params_file(v_file);
            const affine::ValidationReport rep = affine::validate_admissible(p, v_pairs, v_seed);
            std::cout << rep.to_text();
            return rep.pass ? 0 : kExitFail;
        }

        if (*riccati) {
            const affine::AffineParams p = affine::load_params_file(r_file);
            const affine::SymMat u0 = affine::load_symmat_file(r_u);
            affine::RiccatiOptions opts;
            opts.rtol = r_rtol;
            opts.atol = r_atol;
            opts.grid = r_grid;
            const affine::RiccatiSolution sol = affine::solve_riccati(p, u0, r_t, opts);
            std::vector<std::vector<double>> rows;
            for (size_t k = 0; k < sol.times.size(); ++k) {
                std::vector<double> row{sol.times[k], sol.phi[k]};
                for (double v : sol.psi[k].packed()) row.push_back(v);
                row.push_back(affine::min_eigenvalue(sol.psi[k]));
                rows.push_back(std::move(row));
            }
            std::string header = "t,phi";
            for (int i = 0; i < p.dim; ++i)
                for (int j = i; j < p.dim; ++j)
                    header += ",psi_" + std::to_string(i + 1) + std::to_string(j + 1);
            header += ",lambda_min";
            Json cfg{{"t", r_t}, {"grid", r_grid}, {"rtol", r_rtol}, {"atol", r_atol}};
            const Json man = manifest("riccati", cfg,
                                      {{r_file, affine::file_digest(r_file)},
                                       {r_u, affine::file_digest(r_u)}},
                                      0);
            if (r_out.empty()) {
                std::cout << "# manifest: " << man.dump() << "\n" << header << "\n";
                std::cout.precision(17);
                for (const auto& row : rows) {
                    for (size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
                    std::cout << "\n";
                }
            } else {
                write_csv(r_out, header, rows, man);
            }
            return 0;
        }

        if (*transform) {
            const affine::AffineParams p = affine::load_params_file(t_file);
            const affine::SymMat x = affine::load_symmat_file(t_x);
            const affine::SymMat u = affine::load_symmat_file(t_u);
            double value;
            if (!t_closed.empty()) {
                const auto pos = t_closed.find(':');
                if (t_closed.substr(0, pos) != "wishart" || pos == std::string::npos) {
                    std::cerr << "unknown closed form '" << t_closed << "'\n";
                    return kExitUsage;
                }
                const double delta = std::stod(t_closed.substr(pos + 1));
                value = affine::wishart_closed_form(delta, x, u, t_t).laplace;
            } else {
                value = affine::laplace_transform(p, x, u, t_t);
            }
            std::cout.precision(17);
            std::cout << value << "\n";
            return 0;
        }

        if (*simulate) {
            const affine::AffineParams p = affine::load_params_file(s_file);
            const affine::SymMat x0 = affine::load_symmat_file(s_x0);
            if (s_scheme == "euler-project")
                s_cfg.scheme = affine::Scheme::euler_project;
            else if (s_scheme == "euler-regularized")
                s_cfg.scheme = affine::Scheme::euler_regularized;
            else {
                std::cerr << "unknown scheme '" << s_scheme << "'\n";
                return kExitUsage;
            }
            if (s_cfg.record_grid.empty()) s_cfg.record_grid = {s_cfg.t_end};
            const affine::PathEnsemble ens = affine::simulate_paths(p, x0, s_cfg);
            Json cfg{{"dt", s_cfg.dt},     {"t", s_cfg.t_end},   {"paths", s_cfg.n_paths},
                     {"scheme", s_scheme}, {"eps", s_cfg.eps},   {"cutoff_n", s_cfg.cutoff_n},
                     {"record", s_cfg.record_grid}};
            std::map<std::string, std::string> inputs{{s_file, affine::file_digest(s_file)},
                                                      {s_x0, affine::file_digest(s_x0)}};
            if (!s_ulist.empty()) inputs[s_ulist] = affine::file_digest(s_ulist);
            const Json man = manifest("simulate", cfg, inputs, s_cfg.seed);

            if (s_out.size() > 4 && s_out.substr(s_out.size() - 4) == ".csv") {
                std::vector<std::vector<double>> rows;
                for (int path = 0; path < ens.n_paths; ++path)
                    for (size_t g = 0; g < ens.grid.size(); ++g) {
                        std::vector<double> row{static_cast<double>(path), ens.grid[g]};
                        for (double v : ens.state(path, static_cast<int>(g)).packed())
                            row.push_back(v);
                        row.push_back(ens.survival[path]);
                        rows.push_back(std::move(row));
                    }
                std::string header = "path,t";
                for (int i = 0; i < p.dim; ++i)
                    for (int j = i; j < p.dim; ++j)
                        header += ",x_" + std::to_string(i + 1) + std::to_string(j + 1);
                header += ",survival";
                write_csv(s_out, header, rows, man);
            } else {
                Json summary;
                summary["schema"] = "affine-psd/1";
                Json grid = Json::array();
                for (size_t g = 0; g < ens.grid.size(); ++g) {
                    Json entry;
                    entry["t"] = ens.grid[g];
                    entry["mean"] = affine::to_json(ens.mean_state(static_cast<int>(g)));
                    if (!s_ulist.empty()) {
                        Json est = Json::array();
                        for (const affine::SymMat& u : load_symmat_list(s_ulist)) {
                            const auto e = ens.laplace_estimate(static_cast<int>(g), u);
                            est.push_back(Json{{"u", affine::to_json(u)},
                                               {"estimate", e.value},
                                               {"stderr", e.stderr_}});
                        }
                        entry["laplace"] = std::move(est);
                    }
                    grid.push_back(std::move(entry));
                }
                summary["grid"] = std::move(grid);
                summary["clamp_mass_mean"] = ens.clamp_mass_mean;
                summary["manifest"] = man;
                affine::save_json_file(s_out, summary);
            }
            return 0;
        }

        if (*compare) {
            const affine::AffineParams p = affine::load_params_file(c_file);
            const affine::SymMat x0 = affine::load_symmat_file(c_x0);
            const std::vector<affine::SymMat> u_list = load_symmat_list(c_ulist);
            const affine::CompareReport rep = affine::compare(p, x0, u_list, c_tlist, c_cfg);
            Json out = affine::to_json(rep);
            Json cfg{{"dt", c_cfg.sim.dt},
                     {"paths", c_cfg.sim.n_paths},
                     {"t_list", c_tlist},
                     {"bias_budget", c_cfg.bias_budget}};
            out["manifest"] = manifest("compare", cfg,
                                       {{c_file, affine::file_digest(c_file)},
                                        {c_x0, affine::file_digest(c_x0)},
                                        {c_ulist, affine::file_digest(c_ulist)}},
                                       c_cfg.sim.seed);
            affine::save_json_file(c_out, out);
            std::cout << rep.to_text();
            return rep.pass ? 0 : kExitFail;
        }

        if (*canonicalize) {
            const affine::AffineParams p = affine::load_params_file(k_file);
            const affine::CanonicalResult res = affine::canonicalize(p, k_rank_tol);
            Json out;
            out["schema"] = "affine-psd/1";
            out["params"] = affine::to_json(res.params);
            Json g = Json::array();
            for (int i = 0; i < res.g.dim(); ++i) {
                Json row = Json::array();
                for (int j = 0; j < res.g.dim(); ++j) row.push_back(res.g(i, j));
                g.push_back(std::move(row));
            }
            out["g"] = std::move(g);
            out["manifest"] = manifest("canonicalize", Json{{"rank_tol", k_rank_tol}},
                                       {{k_file, affine::file_digest(k_file)}}, 0);
            if (k_out.empty())
                std::cout << out.dump(2) << "\n";
            else
                affine::save_json_file(k_out, out);
            return 0;
        }

        if (*audit) {
            const affine::AffineParams p = affine::load_params_file(a_file);
            const affine::AuditReport rep = affine::viability_audit(p, a_eps, a_n, a_samples, a_seed);
            Json out = affine::to_json(rep);
            out["manifest"] = manifest("audit",
                                       Json{{"eps", a_eps}, {"n", a_n}, {"samples", a_samples}},
                                       {{a_file, affine::file_digest(a_file)}}, a_seed);
            std::cout << out.dump(2) << "\n";
            return rep.pass ? 0 : kExitFail;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const affine::SolverError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitUsage;
}
