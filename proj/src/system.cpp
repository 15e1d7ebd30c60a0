#include "incred/system.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "incred/error.hpp"

namespace incred {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ParseError(path + ": " + msg);
}

void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) fail(path, "unknown key '" + item.key() + "'");
    }
}

const Json* find(const Json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
    const Json* j = find(obj, key);
    if (!j) fail(path, std::string("missing key '") + key + "'");
    return *j;
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        fail(path, "expected a nonnegative integer");
    }
    return j.get<std::size_t>();
}

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

bool as_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::vector<double> as_reals(const Json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<double> as_point(const Json& j, const std::string& path, std::size_t n) {
    auto p = as_reals(j, path);
    if (p.size() != n) {
        throw SemanticError(path + ": expected " + std::to_string(n) + " coordinates, got " +
                            std::to_string(p.size()));
    }
    return p;
}

/// Wraps a DSL parse so the error names the JSON location.
template <class F>
auto dsl(const std::string& path, F&& parse) {
    try {
        return parse();
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what(), e.offset());
    }
}

expr::ScalarExpr scalar_at(const Json& j, const std::string& path, const expr::Symbols& sym) {
    const std::string src = as_string(j, path);
    return dsl(path, [&] { return expr::parse_scalar(src, sym); });
}

/// Per-axis node lists: either one list per axis or a single flat list
/// applied to every axis.
std::vector<std::vector<double>> per_axis_lists(const Json& j, const std::string& path,
                                                std::size_t n) {
    if (!j.is_array()) fail(path, "expected an array");
    if (j.empty()) return std::vector<std::vector<double>>(n);
    if (j[0].is_array()) {
        if (j.size() != n) {
            throw SemanticError(path + ": expected " + std::to_string(n) + " axis lists");
        }
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(as_reals(j[i], path + "[" + std::to_string(i) + "]"));
        }
        return out;
    }
    return std::vector<std::vector<double>>(n, as_reals(j, path));
}

PiecewiseBoxMap map_at(const Json& j, const std::string& path, std::size_t n, std::size_t out_dims,
                       bool allow_state_only, const expr::Symbols& sym) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of pieces");
    std::vector<Piece> pieces;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string pp = path + "[" + std::to_string(k) + "]";
        check_keys(j[k], pp, {"guard", "value"});
        Piece piece;
        const std::string guard = as_string(require(j[k], "guard", pp), pp + ".guard");
        piece.guard = dsl(pp + ".guard", [&] { return expr::parse_guard(guard, sym); });
        const Json& vals = require(j[k], "value", pp);
        if (!vals.is_array()) fail(pp + ".value", "expected an array of set expressions");
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const std::string vp = pp + ".value[" + std::to_string(i) + "]";
            const std::string src = as_string(vals[i], vp);
            piece.values.push_back(dsl(vp, [&] { return expr::parse_set(src, sym); }));
        }
        if (allow_state_only && piece.values.size() + 1 == out_dims) {
            piece.values.push_back(expr::parse_set("{0}"));
        }
        if (piece.values.size() != out_dims) {
            throw SemanticError(pp + ".value: expected " + std::to_string(out_dims) +
                                " entries, got " + std::to_string(piece.values.size()));
        }
        pieces.push_back(std::move(piece));
    }
    try {
        return PiecewiseBoxMap(n, out_dims, std::move(pieces));
    } catch (const SemanticError& e) {
        throw SemanticError(path + ": " + e.what());
    }
}

RegularFunctionSpec function_at(const Json& j, const std::string& path, std::size_t n,
                                const expr::Symbols& sym) {
    check_keys(j, path, {"name", "value", "gradient", "regular"});
    RegularFunctionSpec f;
    f.name = as_string(require(j, "name", path), path + ".name");
    f.value = scalar_at(require(j, "value", path), path + ".value", sym);
    f.gradient = map_at(require(j, "gradient", path), path + ".gradient", n, n + 1, true, sym);
    if (const Json* r = find(j, "regular")) f.regular = as_bool(*r, path + ".regular");
    return f;
}

/// A function given inline, or by the name of V or of an entry of U.
RegularFunctionSpec function_ref(const Json& j, const std::string& path, const SystemDef& sys) {
    if (j.is_object()) return function_at(j, path, sys.n, sys.symbols);
    const std::string name = as_string(j, path);
    if (sys.V && sys.V->name == name) return *sys.V;
    for (const auto& u : sys.U) {
        if (u.name == name) return u;
    }
    throw SemanticError(path + ": no function named '" + name + "'");
}

GridSpec grid_at(const Json& j, const std::string& path, std::size_t n) {
    check_keys(j, path, {"counts", "nodes", "include", "time"});
    GridSpec g;
    if (const Json* c = find(j, "counts")) {
        if (c->is_array()) {
            if (c->size() != n) throw SemanticError(path + ".counts: expected one count per axis");
            for (std::size_t i = 0; i < n; ++i) {
                g.counts.push_back(as_count((*c)[i], path + ".counts[" + std::to_string(i) + "]"));
            }
        } else {
            g.counts.assign(n, as_count(*c, path + ".counts"));
        }
    }
    if (const Json* v = find(j, "nodes")) g.nodes = per_axis_lists(*v, path + ".nodes", n);
    if (const Json* v = find(j, "include")) g.include = per_axis_lists(*v, path + ".include", n);
    if (const Json* v = find(j, "time")) {
        g.time_nodes = as_reals(*v, path + ".time");
        if (g.time_nodes.empty()) throw SemanticError(path + ".time: need at least one time node");
    }
    return g;
}

MatrosovProblem matrosov_at(const Json& j, const std::string& path, const SystemDef& sys) {
    check_keys(j, path, {"delta", "Delta", "gamma", "eq_tol", "zeta_target", "z_count",
                         "cap_exponent", "phi", "Y", "W", "U"});
    MatrosovProblem m;
    m.delta = as_number(require(j, "delta", path), path + ".delta");
    m.Delta = as_number(require(j, "Delta", path), path + ".Delta");
    if (const Json* v = find(j, "gamma")) m.gamma = as_number(*v, path + ".gamma");
    if (const Json* v = find(j, "eq_tol")) m.eq_tol = as_number(*v, path + ".eq_tol");
    if (const Json* v = find(j, "zeta_target")) m.zeta_target = as_number(*v, path + ".zeta_target");
    if (const Json* v = find(j, "z_count")) m.z_count = as_count(*v, path + ".z_count");
    if (const Json* v = find(j, "cap_exponent")) m.cap_exponent = as_count(*v, path + ".cap_exponent");
    if (!(0.0 < m.delta && m.delta < m.Delta)) {
        throw SemanticError(path + ": need 0 < delta < Delta");
    }

    const Json& phi = require(j, "phi", path);
    if (!phi.is_array()) fail(path + ".phi", "expected an array of expressions");
    for (std::size_t i = 0; i < phi.size(); ++i) {
        m.phi.push_back(scalar_at(phi[i], path + ".phi[" + std::to_string(i) + "]", sys.symbols));
    }

    expr::Symbols ysym = sys.symbols;
    ysym.z_dims = m.phi.size();
    const Json& Y = require(j, "Y", path);
    if (!Y.is_array() || Y.empty()) fail(path + ".Y", "expected a nonempty array of expressions");
    for (std::size_t i = 0; i < Y.size(); ++i) {
        m.Y.push_back(scalar_at(Y[i], path + ".Y[" + std::to_string(i) + "]", ysym));
    }

    if (const Json* W = find(j, "W")) {
        if (!W->is_array() || W->size() != m.M()) {
            throw SemanticError(path + ".W: expected one function per Y");
        }
        for (std::size_t i = 0; i < W->size(); ++i) {
            m.W.push_back(function_ref((*W)[i], path + ".W[" + std::to_string(i) + "]", sys));
        }
        const Json& U = require(j, "U", path);
        if (!U.is_array() || U.size() != m.M()) {
            throw SemanticError(path + ".U: expected one collection per Y");
        }
        for (std::size_t i = 0; i < U.size(); ++i) {
            const std::string up = path + ".U[" + std::to_string(i) + "]";
            if (!U[i].is_array() || U[i].empty()) fail(up, "expected a nonempty array");
            std::vector<RegularFunctionSpec> coll;
            for (std::size_t k = 0; k < U[i].size(); ++k) {
                coll.push_back(function_ref(U[i][k], up + "[" + std::to_string(k) + "]", sys));
            }
            m.U.push_back(std::move(coll));
        }
    } else if (find(j, "U")) {
        fail(path + ".U", "given without W");
    }
    return m;
}

}  // namespace

bool SystemDef::autonomous() const {
    if (F.time_dependent()) return false;
    if (V && V->time_dependent()) return false;
    for (const auto& u : U) {
        if (u.time_dependent()) return false;
    }
    return true;
}

SystemDef parse_system(std::string_view json_text) {
    Json root;
    try {
        root = Json::parse(json_text.begin(), json_text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    const std::string top = "$";
    check_keys(root, top, {"name", "n", "params", "F", "V", "U", "domain", "grid", "probes",
                           "certify", "invariance", "simulate", "matrosov"});

    SystemDef sys;
    sys.name = as_string(require(root, "name", top), "$.name");
    sys.n = as_count(require(root, "n", top), "$.n");
    if (sys.n == 0 || sys.n > 9) throw SemanticError("$.n: state dimension must be 1..9");
    sys.symbols.state_dims = sys.n;

    if (const Json* params = find(root, "params")) {
        if (!params->is_object()) fail("$.params", "expected an object");
        for (const auto& item : params->items()) {
            const std::string pp = "$.params." + item.key();
            if (sys.symbols.find_param(item.key())) fail(pp, "duplicate parameter");
            auto e = scalar_at(item.value(), pp, sys.symbols);
            sys.symbols.params.emplace_back(item.key(), std::move(e));
        }
    }

    sys.F = map_at(require(root, "F", top), "$.F", sys.n, sys.n, false, sys.symbols);
    if (const Json* v = find(root, "V")) sys.V = function_at(*v, "$.V", sys.n, sys.symbols);
    if (const Json* u = find(root, "U")) {
        if (!u->is_array()) fail("$.U", "expected an array of functions");
        for (std::size_t i = 0; i < u->size(); ++i) {
            sys.U.push_back(function_at((*u)[i], "$.U[" + std::to_string(i) + "]", sys.n, sys.symbols));
        }
    }

    const Json& dom = require(root, "domain", top);
    check_keys(dom, "$.domain", {"lo", "hi"});
    const auto lo = as_point(require(dom, "lo", "$.domain"), "$.domain.lo", sys.n);
    const auto hi = as_point(require(dom, "hi", "$.domain"), "$.domain.hi", sys.n);
    std::vector<Interval> axes;
    for (std::size_t i = 0; i < sys.n; ++i) {
        if (!(lo[i] < hi[i])) throw SemanticError("$.domain: need lo < hi on every axis");
        axes.emplace_back(lo[i], hi[i]);
    }
    sys.domain = Box(std::move(axes));

    if (const Json* g = find(root, "grid")) {
        sys.grid = grid_at(*g, "$.grid", sys.n);
    } else {
        sys.grid.counts.assign(sys.n, 21);
    }

    if (const Json* probes = find(root, "probes")) {
        if (!probes->is_array()) fail("$.probes", "expected an array of points");
        for (std::size_t i = 0; i < probes->size(); ++i) {
            const std::string pp = "$.probes[" + std::to_string(i) + "]";
            auto p = as_reals((*probes)[i], pp);
            StatePoint sp;
            if (p.size() == sys.n + 1) {
                sp.t = p.back();
                p.pop_back();
            } else if (p.size() == sys.n) {
                sp.t = sys.grid.time_nodes.front();
            } else {
                throw SemanticError(pp + ": expected n or n+1 coordinates");
            }
            sp.x = std::move(p);
            sys.probes.push_back(std::move(sp));
        }
    }

    if (const Json* c = find(root, "certify")) {
        check_keys(*c, "$.certify", {"kind", "W", "W_lower", "W_upper"});
        CertifySettings cs;
        if (const Json* k = find(*c, "kind")) cs.kind = as_string(*k, "$.certify.kind");
        if (cs.kind != "lyapunov" && cs.kind != "semidefinite") {
            fail("$.certify.kind", "expected 'lyapunov' or 'semidefinite'");
        }
        if (const Json* w = find(*c, "W")) cs.W = scalar_at(*w, "$.certify.W", sys.symbols);
        if (const Json* w = find(*c, "W_lower")) cs.W_lower = scalar_at(*w, "$.certify.W_lower", sys.symbols);
        if (const Json* w = find(*c, "W_upper")) cs.W_upper = scalar_at(*w, "$.certify.W_upper", sys.symbols);
        sys.certify = std::move(cs);
    }

    if (const Json* inv = find(root, "invariance")) {
        check_keys(*inv, "$.invariance", {"zero_tol", "candidates"});
        InvarianceSettings is;
        if (const Json* z = find(*inv, "zero_tol")) is.zero_tol = as_number(*z, "$.invariance.zero_tol");
        if (const Json* cands = find(*inv, "candidates")) {
            if (!cands->is_array()) fail("$.invariance.candidates", "expected an array of points");
            for (std::size_t i = 0; i < cands->size(); ++i) {
                is.candidates.push_back(as_point(
                    (*cands)[i], "$.invariance.candidates[" + std::to_string(i) + "]", sys.n));
            }
        }
        sys.invariance = std::move(is);
    }

    if (const Json* s = find(root, "simulate")) {
        const std::string sp = "$.simulate";
        check_keys(*s, sp, {"x0", "t0", "h", "T", "strategy", "seed", "W", "tail", "tail_fraction"});
        SimulateSettings ss;
        ss.x0 = as_point(require(*s, "x0", sp), sp + ".x0", sys.n);
        if (const Json* v = find(*s, "t0")) ss.t0 = as_number(*v, sp + ".t0");
        if (const Json* v = find(*s, "h")) ss.h = as_number(*v, sp + ".h");
        if (const Json* v = find(*s, "T")) ss.T = as_number(*v, sp + ".T");
        if (const Json* v = find(*s, "strategy")) ss.strategy = as_string(*v, sp + ".strategy");
        if (const Json* v = find(*s, "seed")) ss.seed = as_count(*v, sp + ".seed");
        if (const Json* v = find(*s, "W")) ss.W = scalar_at(*v, sp + ".W", sys.symbols);
        if (const Json* v = find(*s, "tail")) ss.tail = scalar_at(*v, sp + ".tail", sys.symbols);
        if (const Json* v = find(*s, "tail_fraction")) ss.tail_fraction = as_number(*v, sp + ".tail_fraction");
        sys.simulate = std::move(ss);
    }

    if (const Json* m = find(root, "matrosov")) sys.matrosov = matrosov_at(*m, "$.matrosov", sys);

    return sys;
}

GridSpec parse_grid(std::string_view json_text, std::size_t n) {
    Json root;
    try {
        root = Json::parse(json_text.begin(), json_text.end());
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    GridSpec g = grid_at(root, "$", n);
    if (g.counts.empty()) g.counts.assign(n, 21);
    return g;
}

SystemDef load_system(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open system file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system(buf.str());
}

}  // namespace incred
