#include "incred/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <variant>

#include "incred/error.hpp"
#include "incred/format.hpp"

namespace incred::expr {

// ---------------------------------------------------------------------------
// AST

enum class Func { Abs, Max, Min, Sgn, Sgn1, Exp, Sin, Cos };

struct FuncInfo {
    std::string_view name;
    Func func;
    std::size_t arity;
};

constexpr FuncInfo kFunctions[] = {
    {"abs", Func::Abs, 1},   {"max", Func::Max, 2}, {"min", Func::Min, 2},
    {"sgn", Func::Sgn, 1},   {"sgn1", Func::Sgn1, 1}, {"exp", Func::Exp, 1},
    {"sin", Func::Sin, 1},   {"cos", Func::Cos, 1},
};

const FuncInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

using ScalarPtr = std::shared_ptr<const ScalarNode>;
using SetPtr = std::shared_ptr<const SetNode>;
using GuardPtr = std::shared_ptr<const GuardNode>;

struct NumberLit {
    double value;
    std::string text;
};
struct StateVar {
    std::size_t index;  // 1-based
};
struct AuxVar {
    std::size_t index;  // 1-based
};
struct TimeVar {};
struct ParamRef {
    std::string name;
    ScalarExpr definition;
};
struct Negate {
    ScalarPtr operand;
};
struct Binary {
    char op;
    ScalarPtr lhs, rhs;
};
struct Call {
    const FuncInfo* func;
    std::vector<ScalarPtr> args;
};
struct ScalarGroup {
    ScalarPtr inner;
};

struct ScalarNode {
    std::variant<NumberLit, StateVar, AuxVar, TimeVar, ParamRef, Negate, Binary, Call, ScalarGroup>
        v;
};

struct SingletonSet {
    ScalarPtr value;
};
struct IntervalSet {
    ScalarPtr lo, hi;
};
struct HullSet {
    ScalarPtr a, b;
};
struct EmptySet {};
struct SumSet {
    SetPtr lhs, rhs;
};
struct ScaledSet {
    ScalarPtr factor;
    SetPtr set;
};
struct SetGroup {
    SetPtr inner;
};

struct SetNode {
    std::variant<SingletonSet, IntervalSet, HullSet, EmptySet, SumSet, ScaledSet, SetGroup> v;
};

enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

struct Compare {
    Cmp op;
    ScalarPtr lhs, rhs;
};
struct AndGuard {
    GuardPtr lhs, rhs;
};
struct OrGuard {
    GuardPtr lhs, rhs;
};
struct NotGuard {
    GuardPtr operand;
};
struct GuardGroup {
    GuardPtr inner;
};
struct ConstGuard {
    bool value;
    std::string text;  // "otherwise", "true", "false"
};

struct GuardNode {
    std::variant<Compare, AndGuard, OrGuard, NotGuard, GuardGroup, ConstGuard> v;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

template <class T>
ScalarPtr make_scalar(T node) {
    return std::make_shared<const ScalarNode>(ScalarNode{std::move(node)});
}
template <class T>
SetPtr make_set(T node) {
    return std::make_shared<const SetNode>(SetNode{std::move(node)});
}
template <class T>
GuardPtr make_guard(T node) {
    return std::make_shared<const GuardNode>(GuardNode{std::move(node)});
}

// ---------------------------------------------------------------------------
// Evaluation

double sgn(double y) noexcept { return y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0); }

double sgn1(double y) noexcept { return (-1.0 < y && y < 1.0) ? 0.0 : sgn(y); }

namespace {

double eval_scalar(const ScalarNode& n, const Env& env);

double eval_call(const Call& c, const Env& env) {
    const double a = eval_scalar(*c.args[0], env);
    switch (c.func->func) {
        case Func::Abs: return std::abs(a);
        case Func::Max: return std::max(a, eval_scalar(*c.args[1], env));
        case Func::Min: return std::min(a, eval_scalar(*c.args[1], env));
        case Func::Sgn: return sgn(a);
        case Func::Sgn1: return sgn1(a);
        case Func::Exp: return std::exp(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
    }
    return 0.0;
}

double eval_scalar(const ScalarNode& n, const Env& env) {
    return std::visit(
        overloaded{
            [](const NumberLit& v) { return v.value; },
            [&](const StateVar& v) {
                if (v.index > env.x.size()) {
                    throw std::invalid_argument("x" + std::to_string(v.index) +
                                                " referenced but state has dimension " +
                                                std::to_string(env.x.size()));
                }
                return env.x[v.index - 1];
            },
            [&](const AuxVar& v) {
                if (v.index > env.z.size()) {
                    throw std::invalid_argument("z" + std::to_string(v.index) +
                                                " referenced but auxiliary argument has dimension " +
                                                std::to_string(env.z.size()));
                }
                return env.z[v.index - 1];
            },
            [&](const TimeVar&) { return env.t; },
            [&](const ParamRef& p) { return p.definition.eval(env); },
            [&](const Negate& v) { return -eval_scalar(*v.operand, env); },
            [&](const Binary& b) {
                const double l = eval_scalar(*b.lhs, env);
                const double r = eval_scalar(*b.rhs, env);
                switch (b.op) {
                    case '+': return l + r;
                    case '-': return l - r;
                    case '*': return l * r;
                    default:
                        if (std::abs(r) < kMinDenominator) {
                            throw EvalError("division by zero (denominator " + format_real(r) + ")");
                        }
                        return l / r;
                }
            },
            [&](const Call& c) { return eval_call(c, env); },
            [&](const ScalarGroup& g) { return eval_scalar(*g.inner, env); },
        },
        n.v);
}

Interval eval_set(const SetNode& n, const Env& env) {
    return std::visit(
        overloaded{
            [&](const SingletonSet& s) { return Interval::point(eval_scalar(*s.value, env)); },
            [&](const IntervalSet& s) {
                const double lo = eval_scalar(*s.lo, env);
                const double hi = eval_scalar(*s.hi, env);
                if (!(lo <= hi)) {
                    throw EvalError("interval literal evaluates to [" + format_real(lo) + ", " +
                                    format_real(hi) + "] with lo > hi");
                }
                return Interval(lo, hi);
            },
            [&](const HullSet& s) {
                return Interval::hull(eval_scalar(*s.a, env), eval_scalar(*s.b, env));
            },
            [](const EmptySet&) { return Interval::empty(); },
            [&](const SumSet& s) { return eval_set(*s.lhs, env) + eval_set(*s.rhs, env); },
            [&](const ScaledSet& s) {
                return scale(eval_scalar(*s.factor, env), eval_set(*s.set, env));
            },
            [&](const SetGroup& g) { return eval_set(*g.inner, env); },
        },
        n.v);
}

bool compare(Cmp op, double l, double r) {
    switch (op) {
        case Cmp::Eq: return l == r;
        case Cmp::Ne: return l != r;
        case Cmp::Lt: return l < r;
        case Cmp::Le: return l <= r;
        case Cmp::Gt: return l > r;
        case Cmp::Ge: return l >= r;
    }
    return false;
}

bool eval_guard(const GuardNode& n, const Env& env) {
    return std::visit(
        overloaded{
            [&](const Compare& c) {
                return compare(c.op, eval_scalar(*c.lhs, env), eval_scalar(*c.rhs, env));
            },
            [&](const AndGuard& g) { return eval_guard(*g.lhs, env) && eval_guard(*g.rhs, env); },
            [&](const OrGuard& g) { return eval_guard(*g.lhs, env) || eval_guard(*g.rhs, env); },
            [&](const NotGuard& g) { return !eval_guard(*g.operand, env); },
            [&](const GuardGroup& g) { return eval_guard(*g.inner, env); },
            [](const ConstGuard& g) { return g.value; },
        },
        n.v);
}

// ---------------------------------------------------------------------------
// Printing

std::string print_scalar(const ScalarNode& n) {
    return std::visit(
        overloaded{
            [](const NumberLit& v) { return v.text; },
            [](const StateVar& v) { return "x" + std::to_string(v.index); },
            [](const AuxVar& v) { return "z" + std::to_string(v.index); },
            [](const TimeVar&) { return std::string("t"); },
            [](const ParamRef& p) { return p.name; },
            [](const Negate& v) { return "-" + print_scalar(*v.operand); },
            [](const Binary& b) {
                return print_scalar(*b.lhs) + ' ' + b.op + ' ' + print_scalar(*b.rhs);
            },
            [](const Call& c) {
                std::string s(c.func->name);
                s += '(';
                for (std::size_t i = 0; i < c.args.size(); ++i) {
                    if (i) s += ", ";
                    s += print_scalar(*c.args[i]);
                }
                return s + ')';
            },
            [](const ScalarGroup& g) { return "(" + print_scalar(*g.inner) + ")"; },
        },
        n.v);
}

std::string print_set(const SetNode& n) {
    return std::visit(
        overloaded{
            [](const SingletonSet& s) { return "{" + print_scalar(*s.value) + "}"; },
            [](const IntervalSet& s) {
                return "[" + print_scalar(*s.lo) + ", " + print_scalar(*s.hi) + "]";
            },
            [](const HullSet& s) {
                return "hull(" + print_scalar(*s.a) + ", " + print_scalar(*s.b) + ")";
            },
            [](const EmptySet&) { return std::string("empty"); },
            [](const SumSet& s) { return print_set(*s.lhs) + " + " + print_set(*s.rhs); },
            [](const ScaledSet& s) { return print_scalar(*s.factor) + " * " + print_set(*s.set); },
            [](const SetGroup& g) { return "(" + print_set(*g.inner) + ")"; },
        },
        n.v);
}

const char* cmp_text(Cmp op) {
    switch (op) {
        case Cmp::Eq: return "==";
        case Cmp::Ne: return "!=";
        case Cmp::Lt: return "<";
        case Cmp::Le: return "<=";
        case Cmp::Gt: return ">";
        case Cmp::Ge: return ">=";
    }
    return "?";
}

std::string print_guard(const GuardNode& n) {
    return std::visit(
        overloaded{
            [](const Compare& c) {
                return print_scalar(*c.lhs) + ' ' + cmp_text(c.op) + ' ' + print_scalar(*c.rhs);
            },
            [](const AndGuard& g) { return print_guard(*g.lhs) + " and " + print_guard(*g.rhs); },
            [](const OrGuard& g) { return print_guard(*g.lhs) + " or " + print_guard(*g.rhs); },
            [](const NotGuard& g) { return "not " + print_guard(*g.operand); },
            [](const GuardGroup& g) { return "(" + print_guard(*g.inner) + ")"; },
            [](const ConstGuard& g) { return g.text; },
        },
        n.v);
}

// ---------------------------------------------------------------------------
// Dependency queries

struct Deps {
    bool time = false;
    std::size_t max_x = 0;
    std::size_t max_z = 0;

    void merge(const Deps& o) {
        time = time || o.time;
        max_x = std::max(max_x, o.max_x);
        max_z = std::max(max_z, o.max_z);
    }
};

Deps scalar_deps(const ScalarNode& n) {
    Deps d;
    std::visit(overloaded{
                   [](const NumberLit&) {},
                   [&](const StateVar& v) { d.max_x = v.index; },
                   [&](const AuxVar& v) { d.max_z = v.index; },
                   [&](const TimeVar&) { d.time = true; },
                   [&](const ParamRef& p) { d = scalar_deps(*p.definition.node()); },
                   [&](const Negate& v) { d = scalar_deps(*v.operand); },
                   [&](const Binary& b) {
                       d = scalar_deps(*b.lhs);
                       d.merge(scalar_deps(*b.rhs));
                   },
                   [&](const Call& c) {
                       for (const auto& a : c.args) d.merge(scalar_deps(*a));
                   },
                   [&](const ScalarGroup& g) { d = scalar_deps(*g.inner); },
               },
               n.v);
    return d;
}

Deps set_deps(const SetNode& n) {
    Deps d;
    std::visit(overloaded{
                   [&](const SingletonSet& s) { d = scalar_deps(*s.value); },
                   [&](const IntervalSet& s) {
                       d = scalar_deps(*s.lo);
                       d.merge(scalar_deps(*s.hi));
                   },
                   [&](const HullSet& s) {
                       d = scalar_deps(*s.a);
                       d.merge(scalar_deps(*s.b));
                   },
                   [](const EmptySet&) {},
                   [&](const SumSet& s) {
                       d = set_deps(*s.lhs);
                       d.merge(set_deps(*s.rhs));
                   },
                   [&](const ScaledSet& s) {
                       d = scalar_deps(*s.factor);
                       d.merge(set_deps(*s.set));
                   },
                   [&](const SetGroup& g) { d = set_deps(*g.inner); },
               },
               n.v);
    return d;
}

Deps guard_deps(const GuardNode& n) {
    Deps d;
    std::visit(overloaded{
                   [&](const Compare& c) {
                       d = scalar_deps(*c.lhs);
                       d.merge(scalar_deps(*c.rhs));
                   },
                   [&](const AndGuard& g) {
                       d = guard_deps(*g.lhs);
                       d.merge(guard_deps(*g.rhs));
                   },
                   [&](const OrGuard& g) {
                       d = guard_deps(*g.lhs);
                       d.merge(guard_deps(*g.rhs));
                   },
                   [&](const NotGuard& g) { d = guard_deps(*g.operand); },
                   [&](const GuardGroup& g) { d = guard_deps(*g.inner); },
                   [](const ConstGuard&) {},
               },
               n.v);
    return d;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Cmp,
    End
};

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t offset;
};

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
            while (i < src.size() && is_digit(src[i])) ++i;
            if (i < src.size() && src[i] == '.') {
                ++i;
                while (i < src.size() && is_digit(src[i])) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (j < src.size() && is_digit(src[j])) {
                    i = j;
                    while (i < src.size() && is_digit(src[i])) ++i;
                } else {
                    throw ParseError("malformed exponent in number at offset " +
                                         std::to_string(start),
                                     start);
                }
            }
            out.push_back({Tok::Number, src.substr(start, i - start), start});
            continue;
        }
        if (is_ident_start(c)) {
            while (i < src.size() && is_ident_char(src[i])) ++i;
            out.push_back({Tok::Ident, src.substr(start, i - start), start});
            continue;
        }
        auto single = [&](Tok k) {
            out.push_back({k, src.substr(start, 1), start});
            ++i;
        };
        switch (c) {
            case '+': single(Tok::Plus); continue;
            case '-': single(Tok::Minus); continue;
            case '*': single(Tok::Star); continue;
            case '/': single(Tok::Slash); continue;
            case '(': single(Tok::LParen); continue;
            case ')': single(Tok::RParen); continue;
            case '{': single(Tok::LBrace); continue;
            case '}': single(Tok::RBrace); continue;
            case '[': single(Tok::LBracket); continue;
            case ']': single(Tok::RBracket); continue;
            case ',': single(Tok::Comma); continue;
            default: break;
        }
        if (c == '=' || c == '!' || c == '<' || c == '>') {
            const bool two = i + 1 < src.size() && src[i + 1] == '=';
            if ((c == '=' || c == '!') && !two) {
                throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                                     std::to_string(start) + " (did you mean '" + c + "='?)",
                                 start);
            }
            const std::size_t len = two ? 2 : 1;
            out.push_back({Tok::Cmp, src.substr(start, len), start});
            i += len;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "' at offset " +
                             std::to_string(start),
                         start);
    }
    out.push_back({Tok::End, {}, src.size()});
    return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    Parser(std::string_view src, const Symbols& symbols)
        : tokens_(tokenize(src)), symbols_(symbols) {}

    ScalarPtr parse_scalar_all() {
        auto e = scalar(false);
        expect_end();
        return e;
    }
    SetPtr parse_set_all() {
        auto e = set();
        expect_end();
        return e;
    }
    GuardPtr parse_guard_all() {
        auto e = guard();
        expect_end();
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
    bool at(Tok k) const { return peek().kind == k; }
    bool at_ident(std::string_view name, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == name;
    }

    [[noreturn]] void fail(const std::string& msg, const Token& tok) const {
        const std::string found = tok.kind == Tok::End ? "end of input"
                                                       : "'" + std::string(tok.text) + "'";
        throw ParseError(msg + ", found " + found + " at offset " + std::to_string(tok.offset),
                         tok.offset);
    }

    const Token& expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what, peek());
        return next();
    }

    void expect_end() {
        if (!at(Tok::End)) fail("unexpected trailing input", peek());
    }

    // Runs `attempt`; on ParseError restores the position and returns
    // nullopt, remembering the furthest failure for diagnostics.
    template <class F>
    auto try_parse(F&& attempt) -> std::optional<decltype(attempt())> {
        const std::size_t saved = pos_;
        try {
            return attempt();
        } catch (const ParseError& e) {
            if (!furthest_ || e.offset() >= furthest_->offset()) furthest_ = e;
            pos_ = saved;
            return std::nullopt;
        }
    }

    [[noreturn]] void rethrow_furthest(const ParseError& latest) {
        if (furthest_ && furthest_->offset() > latest.offset()) throw *furthest_;
        throw latest;
    }

    // scalar := term (('+'|'-') term)*
    ScalarPtr scalar(bool in_set) {
        auto lhs = term(in_set);
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const char op = next().text[0];
            auto rhs = term(in_set);
            lhs = make_scalar(Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    bool starts_set_atom_keyword(std::size_t ahead) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::LBrace || t.kind == Tok::LBracket || at_ident("hull", ahead) ||
               at_ident("empty", ahead);
    }

    // term := factor (('*'|'/') factor)*
    // Inside set expressions a '*' followed by a set atom ends the term.
    ScalarPtr term(bool in_set) {
        auto lhs = factor();
        while (at(Tok::Star) || at(Tok::Slash)) {
            const char op = peek().text[0];
            if (in_set && op == '*') {
                if (starts_set_atom_keyword(1)) break;
                const std::size_t saved = pos_;
                next();
                auto rhs = try_parse([&] { return factor(); });
                if (!rhs) {
                    pos_ = saved;
                    break;
                }
                lhs = make_scalar(Binary{op, std::move(lhs), std::move(*rhs)});
                continue;
            }
            next();
            auto rhs = factor();
            lhs = make_scalar(Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    // factor := ['-'] atom
    ScalarPtr factor() {
        if (at(Tok::Minus)) {
            next();
            return make_scalar(Negate{atom()});
        }
        return atom();
    }

    ScalarPtr atom() {
        const Token& tok = peek();
        if (tok.kind == Tok::Number) {
            next();
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
            if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
                fail("malformed number", tok);
            }
            return make_scalar(NumberLit{v, std::string(tok.text)});
        }
        if (tok.kind == Tok::LParen) {
            next();
            auto inner = scalar(false);
            expect(Tok::RParen, "')'");
            return make_scalar(ScalarGroup{std::move(inner)});
        }
        if (tok.kind == Tok::Ident) return identifier();
        fail("expected a number, identifier or '('", tok);
    }

    ScalarPtr identifier() {
        const Token tok = next();
        const std::string_view name = tok.text;
        if (at(Tok::LParen)) {
            const FuncInfo* f = find_function(name);
            if (!f) {
                throw ParseError("unknown function '" + std::string(name) + "' at offset " +
                                     std::to_string(tok.offset),
                                 tok.offset);
            }
            next();
            std::vector<ScalarPtr> args;
            if (!at(Tok::RParen)) {
                args.push_back(scalar(false));
                while (at(Tok::Comma)) {
                    next();
                    args.push_back(scalar(false));
                }
            }
            expect(Tok::RParen, "')' closing argument list");
            if (args.size() != f->arity) {
                throw ParseError("function '" + std::string(name) + "' takes " +
                                     std::to_string(f->arity) + " argument(s), got " +
                                     std::to_string(args.size()) + " at offset " +
                                     std::to_string(tok.offset),
                                 tok.offset);
            }
            return make_scalar(Call{f, std::move(args)});
        }
        if (name == "t") return make_scalar(TimeVar{});
        if (name.size() == 2 && (name[0] == 'x' || name[0] == 'z') && name[1] >= '1' &&
            name[1] <= '9') {
            const std::size_t idx = static_cast<std::size_t>(name[1] - '0');
            const std::size_t limit = name[0] == 'x' ? symbols_.state_dims : symbols_.z_dims;
            if (idx > limit) {
                throw ParseError("variable '" + std::string(name) + "' out of range (dimension " +
                                     std::to_string(limit) + ") at offset " +
                                     std::to_string(tok.offset),
                                 tok.offset);
            }
            if (name[0] == 'x') return make_scalar(StateVar{idx});
            return make_scalar(AuxVar{idx});
        }
        if (const ScalarExpr* p = symbols_.find_param(name)) {
            return make_scalar(ParamRef{std::string(name), *p});
        }
        if (find_function(name)) {
            throw ParseError("function '" + std::string(name) + "' used without arguments at offset " +
                                 std::to_string(tok.offset),
                             tok.offset);
        }
        throw ParseError("unknown identifier '" + std::string(name) + "' at offset " +
                             std::to_string(tok.offset),
                         tok.offset);
    }

    // set := setatom ('+' setatom)*
    SetPtr set() {
        auto lhs = set_atom();
        while (at(Tok::Plus)) {
            next();
            auto rhs = set_atom();
            lhs = make_set(SumSet{std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    SetPtr set_atom() {
        if (at(Tok::LBrace)) {
            next();
            auto v = scalar(false);
            expect(Tok::RBrace, "'}' closing singleton");
            return make_set(SingletonSet{std::move(v)});
        }
        if (at(Tok::LBracket)) {
            const Token open = next();
            auto lo = scalar(false);
            if (!at(Tok::Comma)) fail("malformed interval literal: expected ','", peek());
            next();
            auto hi = scalar(false);
            if (!at(Tok::RBracket)) {
                fail("malformed interval literal opened at offset " + std::to_string(open.offset) +
                         ": expected ']'",
                     peek());
            }
            next();
            return make_set(IntervalSet{std::move(lo), std::move(hi)});
        }
        if (at_ident("hull") && peek(1).kind == Tok::LParen) {
            next();
            next();
            auto a = scalar(false);
            expect(Tok::Comma, "',' in hull(a, b)");
            auto b = scalar(false);
            expect(Tok::RParen, "')' closing hull");
            return make_set(HullSet{std::move(a), std::move(b)});
        }
        if (at_ident("empty")) {
            next();
            return make_set(EmptySet{});
        }
        if (at(Tok::LParen)) {
            auto grouped = try_parse([&] {
                next();
                auto inner = set();
                expect(Tok::RParen, "')'");
                return make_set(SetGroup{std::move(inner)});
            });
            if (grouped) return std::move(*grouped);
        }
        try {
            auto factor_expr = term(true);
            if (!at(Tok::Star)) fail("expected '*' followed by a set after scalar factor", peek());
            next();
            auto inner = set_atom();
            return make_set(ScaledSet{std::move(factor_expr), std::move(inner)});
        } catch (const ParseError& e) {
            rethrow_furthest(e);
        }
    }

    // guard := and ('or' and)* ; and := unary ('and' unary)*
    GuardPtr guard() {
        auto lhs = guard_and();
        while (at_ident("or")) {
            next();
            auto rhs = guard_and();
            lhs = make_guard(OrGuard{std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    GuardPtr guard_and() {
        auto lhs = guard_unary();
        while (at_ident("and")) {
            next();
            auto rhs = guard_unary();
            lhs = make_guard(AndGuard{std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    GuardPtr guard_unary() {
        if (at_ident("not")) {
            next();
            return make_guard(NotGuard{guard_unary()});
        }
        for (std::string_view kw : {"otherwise", "true", "false"}) {
            if (at_ident(kw)) {
                next();
                return make_guard(ConstGuard{kw != "false", std::string(kw)});
            }
        }
        if (at(Tok::LParen)) {
            auto grouped = try_parse([&] {
                next();
                auto inner = guard();
                expect(Tok::RParen, "')'");
                return make_guard(GuardGroup{std::move(inner)});
            });
            if (grouped) return std::move(*grouped);
        }
        try {
            auto lhs = scalar(false);
            if (!at(Tok::Cmp)) fail("expected comparison operator", peek());
            const std::string_view op = next().text;
            auto rhs = scalar(false);
            Cmp c = Cmp::Eq;
            if (op == "==") c = Cmp::Eq;
            else if (op == "!=") c = Cmp::Ne;
            else if (op == "<") c = Cmp::Lt;
            else if (op == "<=") c = Cmp::Le;
            else if (op == ">") c = Cmp::Gt;
            else c = Cmp::Ge;
            return make_guard(Compare{c, std::move(lhs), std::move(rhs)});
        } catch (const ParseError& e) {
            rethrow_furthest(e);
        }
    }

    std::vector<Token> tokens_;
    const Symbols& symbols_;
    std::size_t pos_ = 0;
    std::optional<ParseError> furthest_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Public surface

const ScalarExpr* Symbols::find_param(std::string_view name) const {
    for (const auto& [n, e] : params) {
        if (n == name) return &e;
    }
    return nullptr;
}

ScalarExpr::ScalarExpr() : node_(make_scalar(NumberLit{0.0, "0"})) {}

ScalarExpr ScalarExpr::constant(double v) { return ScalarExpr(make_scalar(NumberLit{v, format_real(v)})); }

double ScalarExpr::eval(const Env& env) const { return eval_scalar(*node_, env); }
std::string ScalarExpr::to_string() const { return print_scalar(*node_); }
bool ScalarExpr::depends_on_time() const { return scalar_deps(*node_).time; }
std::size_t ScalarExpr::max_state_index() const { return scalar_deps(*node_).max_x; }
std::size_t ScalarExpr::max_z_index() const { return scalar_deps(*node_).max_z; }

SetExpr::SetExpr() : node_(make_set(SingletonSet{make_scalar(NumberLit{0.0, "0"})})) {}

Interval SetExpr::eval(const Env& env) const { return eval_set(*node_, env); }
std::string SetExpr::to_string() const { return print_set(*node_); }
bool SetExpr::depends_on_time() const { return set_deps(*node_).time; }
std::size_t SetExpr::max_state_index() const { return set_deps(*node_).max_x; }

GuardExpr::GuardExpr() : node_(make_guard(ConstGuard{true, "otherwise"})) {}

bool GuardExpr::eval(const Env& env) const { return eval_guard(*node_, env); }

bool GuardExpr::is_catch_all() const {
    const auto* c = std::get_if<ConstGuard>(&node_->v);
    return c && c->value;
}

std::string GuardExpr::to_string() const { return print_guard(*node_); }
bool GuardExpr::depends_on_time() const { return guard_deps(*node_).time; }
std::size_t GuardExpr::max_state_index() const { return guard_deps(*node_).max_x; }

ScalarExpr parse_scalar(std::string_view src, const Symbols& symbols) {
    return ScalarExpr(Parser(src, symbols).parse_scalar_all());
}

SetExpr parse_set(std::string_view src, const Symbols& symbols) {
    return SetExpr(Parser(src, symbols).parse_set_all());
}

GuardExpr parse_guard(std::string_view src, const Symbols& symbols) {
    return GuardExpr(Parser(src, symbols).parse_guard_all());
}

}  // namespace incred::expr
