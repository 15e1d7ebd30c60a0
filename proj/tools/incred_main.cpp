// incred: command-line front end for reductions, derivatives, grid
// certification, Matrosov analysis, simulation and gradient validation.
//
// Exit codes: 0 success or CERTIFIED, 1 negative analysis result,
// 2 unreadable input or bad usage, 3 semantic or evaluation error.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "incred/certify.hpp"
#include "incred/derivative.hpp"
#include "incred/error.hpp"
#include "incred/format.hpp"
#include "incred/reduction.hpp"
#include "incred/report.hpp"
#include "incred/simulate.hpp"
#include "incred/system.hpp"

namespace fs = std::filesystem;
using incred::report::Json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kSemantic = 3 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string input;
    std::string out;
    std::size_t grid = 0;
    std::string grid_file;
    std::optional<double> tol;
    std::optional<double> h;
    std::optional<double> T;
    std::optional<std::uint64_t> seed;
    std::string strategy;
    bool baseline = false;
    std::string x0;
    std::vector<std::string> points;
    std::string function;
    double radius = 1e-5;
    std::size_t samples = 200;
    bool quiet = false;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw UsageError(std::string(flag) + ": cannot read '" + item + "' as a number");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw incred::ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

incred::GridSpec effective_grid(const RunConfig& cfg, const incred::SystemDef& sys) {
    incred::GridSpec g = sys.grid;
    if (!cfg.grid_file.empty()) g = incred::parse_grid(read_file(cfg.grid_file), sys.n);
    if (cfg.grid != 0) {
        if (cfg.grid < 2) throw UsageError("--grid: need at least 2 nodes per axis");
        g.counts.assign(sys.n, cfg.grid);
    }
    return g;
}

bool grid_overridden(const RunConfig& cfg) { return cfg.grid != 0 || !cfg.grid_file.empty(); }

/// --point values, else the file's probes, else grid nodes at each time node.
std::vector<incred::StatePoint> evaluation_points(const RunConfig& cfg,
                                                  const incred::SystemDef& sys) {
    std::vector<incred::StatePoint> pts;
    const auto grid = effective_grid(cfg, sys);
    if (!cfg.points.empty()) {
        for (const auto& text : cfg.points) {
            auto v = parse_list(text, "--point");
            incred::StatePoint p;
            if (v.size() == sys.n + 1) {
                p.t = v.back();
                v.pop_back();
            } else if (v.size() == sys.n) {
                p.t = grid.time_nodes.front();
            } else {
                throw UsageError("--point: expected " + std::to_string(sys.n) + " or " +
                                 std::to_string(sys.n + 1) + " coordinates");
            }
            p.x = std::move(v);
            pts.push_back(std::move(p));
        }
        return pts;
    }
    if (!sys.probes.empty() && !grid_overridden(cfg)) return sys.probes;
    const auto times = sys.autonomous() ? std::vector<double>{grid.time_nodes.front()}
                                        : grid.time_nodes;
    for (const auto& x : grid.state_nodes(sys.domain)) {
        for (double t : times) pts.push_back({x, t});
    }
    return pts;
}

/// Writes `name` under --out when given; the first artifact goes to stdout
/// otherwise.
class Output {
public:
    explicit Output(const RunConfig& cfg) : dir_(cfg.out), quiet_(cfg.quiet) {
        if (!dir_.empty()) fs::create_directories(dir_);
    }

    void artifact(const std::string& name, const std::string& body) {
        if (!dir_.empty()) {
            std::ofstream f(fs::path(dir_) / name, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write " + (fs::path(dir_) / name).string());
            f << body;
        } else if (!printed_) {
            std::cout << body;
            printed_ = true;
        }
    }

    void json(const std::string& name, const Json& j) { artifact(name, j.dump(2) + "\n"); }

    /// Short human summary, shown only when artifacts go to files.
    void summary(const std::string& text) {
        if (!dir_.empty() && !quiet_) std::cout << text;
    }

private:
    std::string dir_;
    bool quiet_;
    bool printed_ = false;
};

const incred::RegularFunctionSpec& require_V(const incred::SystemDef& sys, const char* what) {
    if (!sys.V) throw incred::SemanticError(std::string(what) + " needs a V in the system file");
    return *sys.V;
}

int cmd_reduce(const RunConfig& cfg, const incred::SystemDef& sys) {
    const auto pts = evaluation_points(cfg, sys);
    const auto rows = incred::tabulate_reduction(sys.F, sys.U, pts);
    Output out(cfg);
    const std::string table = incred::reduction_table(rows);
    out.artifact("reduction.csv", incred::reduction_csv(rows, sys.n));
    out.artifact("reduction.txt", table);
    out.summary(table);
    return kOk;
}

int cmd_deriv(const RunConfig& cfg, const incred::SystemDef& sys) {
    const auto& V = require_V(sys, "deriv");
    const auto pts = evaluation_points(cfg, sys);
    std::vector<incred::RegularFunctionSpec> Us = sys.U;
    if (cfg.baseline) Us = {V};

    std::ostringstream csv;
    for (std::size_t i = 1; i <= sys.n; ++i) csv << 'x' << i << ',';
    csv << "t,u_generalized,empty_reduction,bc_max,ps_lo,ps_hi,ps_empty\n";
    std::size_t empties = 0;
    for (const auto& p : pts) {
        const auto u = incred::u_generalized_derivative(V, sys.F, Us, p.x, p.t);
        const auto ps = incred::baseline_ps_interval(V, sys.F, p.x, p.t);
        csv << incred::format_reals(p.x) << ',' << incred::format_real(p.t) << ','
            << u.max.to_string() << ',' << (u.empty_reduction ? 1 : 0) << ',';
        if (V.regular) {
            csv << incred::baseline_bc_max(V, sys.F, p.x, p.t).max.to_string();
        } else {
            csv << "nan";
        }
        if (ps.range.is_empty()) {
            csv << ",nan,nan,1\n";
        } else {
            csv << ',' << incred::format_real(ps.range.lo()) << ','
                << incred::format_real(ps.range.hi()) << ",0\n";
        }
        if (u.empty_reduction) ++empties;
    }
    Output out(cfg);
    out.artifact("deriv.csv", csv.str());
    out.summary("derivatives at " + std::to_string(pts.size()) + " points, " +
                std::to_string(empties) + " with empty reduction" +
                (cfg.baseline ? " (U = {V})" : "") + "\n");
    return kOk;
}

int cmd_certify(const RunConfig& cfg, const incred::SystemDef& sys) {
    if (!sys.certify) throw incred::SemanticError("certify needs a \"certify\" block");
    require_V(sys, "certify");
    const auto& cs = *sys.certify;
    const auto grid = effective_grid(cfg, sys);
    const auto mode = cfg.baseline ? incred::DerivativeMode::Baseline
                                   : incred::DerivativeMode::Reduced;
    const double tol = cfg.tol.value_or(incred::kCertifyTol);

    incred::Certificate cert;
    if (cs.kind == "semidefinite") {
        cert = incred::certify_semidefinite(sys, cs.W, grid, mode, tol);
    } else {
        incred::LyapunovOptions opt;
        opt.mode = mode;
        opt.W_lower = cs.W_lower;
        opt.W_upper = cs.W_upper;
        opt.tol = tol;
        cert = incred::certify_lyapunov(sys, cs.W, grid, opt);
    }
    Output out(cfg);
    out.json("certificate.json", incred::report::certificate(cert));
    out.artifact("certificate.txt", cert.summary_text());
    out.summary(cert.summary_text());
    return cert.verdict == incred::Verdict::Certified ? kOk : kNegative;
}

int cmd_invariance(const RunConfig& cfg, const incred::SystemDef& sys) {
    require_V(sys, "invariance");
    incred::InvarianceSettings settings = sys.invariance.value_or(incred::InvarianceSettings{});
    if (cfg.tol) settings.zero_tol = *cfg.tol;
    const auto report =
        incred::invariance_data(sys, effective_grid(cfg, sys), settings.zero_tol, settings.candidates);
    Output out(cfg);
    out.json("invariance.json", incred::report::invariance(report));

    std::ostringstream s;
    s << "semidefinite decrease: " << incred::to_string(report.semidefinite.verdict) << '\n'
      << "nodes with zero derivative: " << report.e_nodes.size() << '\n';
    for (const auto& c : report.candidates) {
        s << "  candidate (" << incred::format_reals(c.x, ", ") << "): "
          << (c.equilibrium ? "equilibrium" : "rejected, 0 not in F") << '\n';
    }
    out.summary(s.str());
    return report.semidefinite.verdict == incred::Verdict::Certified ? kOk : kNegative;
}

int cmd_matrosov(const RunConfig& cfg, const incred::SystemDef& sys) {
    if (!sys.matrosov) throw incred::SemanticError("matrosov needs a \"matrosov\" block");
    incred::MatrosovProblem prob = *sys.matrosov;
    if (cfg.tol) prob.eq_tol = *cfg.tol;
    const auto grid = effective_grid(cfg, sys);

    const auto chain = incred::matrosov_chain(prob, sys, grid);
    std::optional<incred::MatrosovConstants> constants;
    if (chain.verdict == incred::Verdict::Certified) {
        constants = incred::matrosov_constants(prob, sys, grid);
    }
    const auto bounds = incred::matrosov_derivative_bounds(prob, sys, grid);
    const auto bounded = incred::matrosov_boundedness(prob, sys, grid);

    const bool ok = chain.verdict == incred::Verdict::Certified && constants &&
                    constants->certificate.verdict == incred::Verdict::Certified;
    Json j;
    j["verdict"] = ok ? "CERTIFIED" : incred::to_string(chain.verdict == incred::Verdict::Certified
                                                              ? constants->certificate.verdict
                                                              : chain.verdict);
    j["annulus"] = Json{{"delta", incred::report::real(prob.delta)},
                        {"Delta", incred::report::real(prob.Delta)}};
    j["M"] = prob.M();
    j["eq_tol"] = incred::report::real(prob.eq_tol);
    j["chain"] = incred::report::certificate(chain);
    j["constants"] = constants ? incred::report::constants(*constants) : Json(nullptr);
    Json b = Json::array();
    for (const auto& c : bounds) b.push_back(incred::report::condition(c));
    j["derivative_bounds"] = b;
    j["boundedness"] = incred::report::boundedness(bounded);

    Output out(cfg);
    out.json("matrosov.json", j);

    std::ostringstream s;
    s << "chain: " << incred::to_string(chain.verdict) << '\n';
    if (chain.worst && chain.verdict != incred::Verdict::Certified) {
        s << "  witness x=(" << incred::format_reals(chain.worst->at.x, ", ") << ")";
        if (!chain.worst->detail.empty()) s << " " << chain.worst->detail;
        s << '\n';
    }
    if (constants) {
        s << "constants: " << incred::to_string(constants->certificate.verdict);
        if (!constants->K.empty()) s << " K=(" << incred::format_reals(constants->K, ", ") << ")";
        s << " zeta=" << incred::format_real(constants->zeta) << '\n';
    }
    for (const auto& c : bounds) s << c.id << ": " << incred::to_string(c.verdict) << '\n';
    out.summary(s.str());
    return ok ? kOk : kNegative;
}

int cmd_simulate(const RunConfig& cfg, const incred::SystemDef& sys) {
    incred::SimulateSettings st = sys.simulate.value_or(incred::SimulateSettings{});
    if (!cfg.x0.empty()) st.x0 = parse_list(cfg.x0, "--x0");
    if (st.x0.empty()) throw UsageError("simulate: give --x0 or a \"simulate\" block");
    if (st.x0.size() != sys.n) {
        throw UsageError("--x0: expected " + std::to_string(sys.n) + " coordinates");
    }
    if (cfg.h) st.h = *cfg.h;
    if (cfg.T) st.T = *cfg.T;
    if (cfg.seed) st.seed = *cfg.seed;
    if (!cfg.strategy.empty()) st.strategy = cfg.strategy;
    const auto strategy = incred::parse_strategy(st.strategy);

    const auto traj = incred::integrate(sys, st.x0, st.t0, st.h, st.T, strategy, st.seed);
    const auto membership = incred::check_reduction_membership(traj, sys, cfg.tol.value_or(1e-2));
    bool ok = membership.pass && !traj.exited_domain;

    Json j;
    j["strategy"] = incred::to_string(strategy);
    j["seed"] = st.seed;
    j["x0"] = incred::report::reals(st.x0);
    j["t0"] = incred::report::real(st.t0);
    j["h"] = incred::report::real(st.h);
    j["T"] = incred::report::real(st.T);
    j["steps"] = traj.steps();
    j["exited_domain"] = traj.exited_domain;
    j["final_x"] = incred::report::reals(traj.samples.back().x);
    j["final_norm"] = incred::report::real(traj.final_norm());
    j["membership"] = incred::report::membership(membership);
    if (st.W && sys.V) {
        const auto d = incred::check_lyapunov_descent(traj, sys, *st.W);
        j["descent"] = incred::report::descent(d);
        ok = ok && d.pass;
    } else {
        j["descent"] = nullptr;
    }
    if (const auto& tail = st.tail ? st.tail : st.W) {
        const auto c = incred::check_partial_convergence(traj, *tail, st.tail_fraction);
        j["convergence"] = incred::report::convergence(c);
        ok = ok && c.pass;
    } else {
        j["convergence"] = nullptr;
    }
    j["verdict"] = ok ? "PASS" : "FAIL";

    Output out(cfg);
    out.artifact("trajectory.csv", incred::trajectory_csv(traj));
    out.json("report.json", j);
    out.summary("steps " + std::to_string(traj.steps()) + ", |x(T)| = " +
                incred::format_real(traj.final_norm()) + ", membership violations " +
                std::to_string(membership.violations) + ", " + (ok ? "PASS" : "FAIL") + "\n");
    return ok ? kOk : kNegative;
}

int cmd_validate_gradient(const RunConfig& cfg, const incred::SystemDef& sys) {
    std::vector<const incred::RegularFunctionSpec*> fns;
    if (sys.V) fns.push_back(&*sys.V);
    for (const auto& u : sys.U) fns.push_back(&u);
    if (sys.matrosov) {
        for (const auto& w : sys.matrosov->W) fns.push_back(&w);
    }
    std::vector<const incred::RegularFunctionSpec*> chosen;
    for (const auto* f : fns) {
        const bool seen = std::any_of(chosen.begin(), chosen.end(),
                                      [&](const auto* c) { return c->name == f->name; });
        if (seen) continue;
        if (cfg.function.empty() || cfg.function == f->name) chosen.push_back(f);
    }
    if (chosen.empty()) {
        throw incred::SemanticError(cfg.function.empty() ? "no functions to validate"
                                                         : "no function named '" + cfg.function + "'");
    }
    if (!(cfg.radius > 0.0)) throw UsageError("--radius must be positive");

    const auto pts = evaluation_points(cfg, sys);
    const std::uint64_t seed = cfg.seed.value_or(0x5eed);
    Json results = Json::array();
    std::size_t failures = 0;
    std::ostringstream s;
    for (const auto* f : chosen) {
        for (const auto& p : pts) {
            const auto g = incred::validate_gradient(*f, p.x, p.t, cfg.radius, cfg.samples, seed);
            Json r{{"function", f->name},
                   {"x", incred::report::reals(p.x)},
                   {"t", incred::report::real(p.t)}};
            r.update(incred::report::gradient_validation(g));
            results.push_back(r);
            if (!g.pass) {
                ++failures;
                s << "FAIL " << f->name << " at (" << incred::format_reals(p.x, ", ")
                  << "): inside " << incred::format_real(g.fraction_inside) << '\n';
            }
        }
    }
    Output out(cfg);
    out.json("gradients.json", Json{{"radius", incred::report::real(cfg.radius)},
                                    {"samples", cfg.samples},
                                    {"seed", seed},
                                    {"failures", failures},
                                    {"results", results}});
    s << results.size() << " checks, " << failures << " failed\n";
    out.summary(s.str());
    return failures == 0 ? kOk : kNegative;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("-i,--input", cfg.input, "System definition (JSON)")->required();
    sub->add_option("-o,--out", cfg.out,
                    "Output directory; without it the main artifact goes to stdout");
    auto* grid = sub->add_option("--grid", cfg.grid, "Uniform nodes per axis (overrides the file)");
    sub->add_option("--grid-file", cfg.grid_file, "JSON grid block replacing the file's grid")
        ->excludes(grid);
    sub->add_flag("-q,--quiet", cfg.quiet, "Suppress the summary on stdout");
}

int run(const RunConfig& cfg) {
    const auto sys = incred::load_system(cfg.input);
    if (cfg.command == "reduce") return cmd_reduce(cfg, sys);
    if (cfg.command == "deriv") return cmd_deriv(cfg, sys);
    if (cfg.command == "certify") return cmd_certify(cfg, sys);
    if (cfg.command == "invariance") return cmd_invariance(cfg, sys);
    if (cfg.command == "matrosov") return cmd_matrosov(cfg, sys);
    if (cfg.command == "simulate") return cmd_simulate(cfg, sys);
    return cmd_validate_gradient(cfg, sys);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced differential inclusions: reductions, derivatives and certificates"};
    app.require_subcommand(1);
    // "--h" is the step size, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_help_all_flag("--help-all", "Show help for every subcommand");
    app.footer("Exit codes: 0 success, 1 negative result, 2 input/usage error, 3 semantic error.\n"
               "INCRED_THREADS caps the number of worker threads.");

    RunConfig cfg;

    auto* reduce = app.add_subcommand("reduce", "Tabulate F and its reduction by the collection U");
    add_common(reduce, cfg);
    reduce->add_option("--point", cfg.points, "Evaluation point x1,..,xn[,t] (repeatable)");

    auto* deriv = app.add_subcommand("deriv", "Tabulate the reduced derivative and the BC/PS baselines");
    add_common(deriv, cfg);
    deriv->add_option("--point", cfg.points, "Evaluation point x1,..,xn[,t] (repeatable)");
    deriv->add_flag("--baseline", cfg.baseline, "Use U = {V}");

    auto* certify = app.add_subcommand("certify", "Grid-certify the decrease condition");
    add_common(certify, cfg);
    certify->add_option("--tol", cfg.tol, "Absolute slack on each inequality (default 1e-9)");
    certify->add_flag("--baseline", cfg.baseline, "Use U = {V}");

    auto* inv = app.add_subcommand("invariance", "Zero set of the derivative and equilibrium screening");
    add_common(inv, cfg);
    inv->add_option("--tol", cfg.tol, "Zero tolerance for the derivative (default from file, else 1e-9)");

    auto* mat = app.add_subcommand("matrosov", "Nested Matrosov chain and constant search");
    add_common(mat, cfg);
    mat->add_option("--tol", cfg.tol, "Vanishing tolerance for Y_j (default from file, else 1e-6)");

    auto* sim = app.add_subcommand("simulate", "Forward Euler selection with membership diagnostics");
    add_common(sim, cfg);
    sim->add_option("--x0", cfg.x0, "Initial state x1,..,xn");
    sim->add_option("--h", cfg.h, "Step size (default from file, else 1e-3)");
    sim->add_option("--T", cfg.T, "Final time (default from file, else 10)");
    sim->add_option("--seed", cfg.seed, "Seed for random-extreme (default from file, else 1)");
    sim->add_option("--strategy", cfg.strategy, "reduced-descent, midpoint or random-extreme")
        ->check(CLI::IsMember({"reduced-descent", "midpoint", "random-extreme"}));
    sim->add_option("--tol", cfg.tol, "Relative membership tolerance (default 1e-2)");

    auto* val = app.add_subcommand("validate-gradient", "Finite-difference check of declared gradients");
    add_common(val, cfg);
    val->add_option("--point", cfg.points, "Probe point x1,..,xn[,t] (repeatable)");
    val->add_option("--function", cfg.function, "Only this function (default: V, U and Matrosov W)");
    val->add_option("--radius", cfg.radius, "Sampling radius (default 1e-5)");
    val->add_option("--samples", cfg.samples, "Samples per point (default 200)");
    val->add_option("--seed", cfg.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        return run(cfg);
    } catch (const UsageError& e) {
        std::cerr << "incred: " << e.what() << '\n';
        return kUsage;
    } catch (const incred::ParseError& e) {
        std::cerr << "incred: parse error: " << e.what();
        const std::string msg = e.what();
        if (e.offset() != std::string::npos && msg.find("offset") == std::string::npos) std::cerr << " (offset " << e.offset() << ')';
        std::cerr << '\n';
        return kUsage;
    } catch (const incred::SemanticError& e) {
        std::cerr << "incred: " << e.what() << '\n';
        return kSemantic;
    } catch (const incred::EvalError& e) {
        std::cerr << "incred: evaluation error: " << e.what() << '\n';
        return kSemantic;
    } catch (const std::exception& e) {
        std::cerr << "incred: " << e.what() << '\n';
        return kSemantic;
    }
}
