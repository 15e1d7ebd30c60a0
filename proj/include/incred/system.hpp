#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "incred/expr.hpp"
#include "incred/grid.hpp"
#include "incred/interval.hpp"
#include "incred/setmap.hpp"

namespace incred {

struct CertifySettings {
    std::string kind = "lyapunov";  // or "semidefinite"
    expr::ScalarExpr W;
    std::optional<expr::ScalarExpr> W_lower;
    std::optional<expr::ScalarExpr> W_upper;
};

struct InvarianceSettings {
    double zero_tol = 1e-9;
    std::vector<std::vector<double>> candidates;
};

struct SimulateSettings {
    std::vector<double> x0;
    double t0 = 0.0;
    double h = 1e-3;
    double T = 10.0;
    std::string strategy = "reduced-descent";
    std::uint64_t seed = 1;
    /// Function whose tail values should vanish, if any.
    /// Decrease rate for the V-descent check (V' <= -W).
    std::optional<expr::ScalarExpr> W;
    /// Quantity whose tail maximum must vanish; defaults to W.
    std::optional<expr::ScalarExpr> tail;
    double tail_fraction = 0.25;
};

/// Data of a nested Matrosov check: annulus D(delta, Delta), bound gamma,
/// auxiliary functions Y_j(x, z) with z = (phi_1(x), ..., phi_k(x)),
/// optional functions W_j with their collections U_j for the derivative
/// bounds.
struct MatrosovProblem {
    double delta = 0.1;
    double Delta = 1.0;
    double gamma = 1.0;
    double eq_tol = 1e-6;
    std::optional<double> zeta_target;
    std::size_t z_count = 5;
    std::size_t cap_exponent = 20;
    std::vector<expr::ScalarExpr> phi;
    std::vector<expr::ScalarExpr> Y;
    std::vector<RegularFunctionSpec> W;
    std::vector<std::vector<RegularFunctionSpec>> U;

    std::size_t M() const noexcept { return Y.size(); }
};

/// Everything a system file describes.
struct SystemDef {
    std::string name;
    std::size_t n = 0;
    expr::Symbols symbols;
    PiecewiseBoxMap F;
    std::optional<RegularFunctionSpec> V;
    std::vector<RegularFunctionSpec> U;
    Box domain;
    GridSpec grid;
    std::vector<StatePoint> probes;
    std::optional<CertifySettings> certify;
    std::optional<InvarianceSettings> invariance;
    std::optional<SimulateSettings> simulate;
    std::optional<MatrosovProblem> matrosov;

    /// True when neither F nor any declared function depends on t.
    bool autonomous() const;
};

/// Throws ParseError (with a JSON path in the message) on malformed input,
/// unknown keys or DSL errors; SemanticError on inconsistent content.
SystemDef parse_system(std::string_view json_text);
SystemDef load_system(const std::filesystem::path& path);

/// A standalone grid block with the same keys as the system file's "grid".
GridSpec parse_grid(std::string_view json_text, std::size_t n);

}  // namespace incred
