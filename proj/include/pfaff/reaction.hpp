#ifndef PFAFF_REACTION_HPP
#define PFAFF_REACTION_HPP

// Reaction-network DSL -> mass-action ODEs, stoichiometric matrix, and exact
// integer conservation laws (left null space of N).
//
// Grammar, one reaction per line (';' also separates reactions, '#' comments):
//   <side> -> <side> [<rate>]
//   side   = m1 S1 + m2 S2 + ...   (coefficients default to 1, '0' = empty)

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "pfaff/core.hpp"

namespace pfaff {

struct Reaction {
    std::vector<int> reactants;  // stoichiometric coefficients per species
    std::vector<int> products;
    double rate = 0.0;
};

struct ReactionNetwork {
    std::vector<std::string> species;  // first-appearance order
    std::vector<Reaction> reactions;

    int species_count() const { return static_cast<int>(species.size()); }

    bool operator==(const ReactionNetwork& o) const {
        if (species != o.species || reactions.size() != o.reactions.size()) return false;
        for (std::size_t k = 0; k < reactions.size(); ++k)
            if (reactions[k].reactants != o.reactions[k].reactants ||
                reactions[k].products != o.reactions[k].products ||
                reactions[k].rate != o.reactions[k].rate)
                return false;
        return true;
    }
};

/// N = products - reactants, species x reactions, exact integer entries.
struct StoichMatrix {
    int n_species = 0;
    int n_reactions = 0;
    std::vector<long long> a;  // row-major

    long long& operator()(int i, int k) { return a[static_cast<std::size_t>(i) * n_reactions + k]; }
    long long operator()(int i, int k) const { return a[static_cast<std::size_t>(i) * n_reactions + k]; }
};

inline StoichMatrix stoich_matrix(const ReactionNetwork& net) {
    StoichMatrix n;
    n.n_species = net.species_count();
    n.n_reactions = static_cast<int>(net.reactions.size());
    n.a.assign(static_cast<std::size_t>(n.n_species) * n.n_reactions, 0);
    for (int k = 0; k < n.n_reactions; ++k)
        for (int i = 0; i < n.n_species; ++i)
            n(i, k) = net.reactions[k].products[i] - net.reactions[k].reactants[i];
    return n;
}

namespace detail {

struct Token {
    std::string text;
    int line;
    int column;  // 1-based
};

inline std::vector<std::vector<Token>> tokenize_reactions(const std::string& text) {
    std::vector<std::vector<Token>> reactions;
    std::vector<Token> cur;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto flush = [&] {
        if (!cur.empty()) reactions.push_back(std::move(cur));
        cur.clear();
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {  // comment to end of line
            while (i < text.size() && text[i] != '\n') { ++i; ++col; }
            continue;
        }
        if (c == '\n' || c == ';') {
            flush();
            ++i;
            if (c == '\n') { ++line; col = 1; } else { ++col; }
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; ++col; continue; }
        Token tok{"", line, col};
        if (c == '+' || c == '[' || c == ']') {
            tok.text = std::string(1, c);
            ++i; ++col;
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tok.text = "->";
            i += 2; col += 2;
        } else {
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
                   std::string("+[]#;\n").find(text[i]) == std::string::npos &&
                   !(text[i] == '-' && i + 1 < text.size() && text[i + 1] == '>')) {
                tok.text += text[i];
                ++i; ++col;
            }
        }
        cur.push_back(std::move(tok));
    }
    flush();
    return reactions;
}

inline bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

inline bool is_name(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace detail

/// Parse the DSL. Species are registered in first-appearance order; duplicate
/// species within one side are merged with summed coefficients (a warning is
/// appended when `warnings` is non-null).
inline ReactionNetwork parse_network(const std::string& text,
                                     std::vector<std::string>* warnings = nullptr) {
    using detail::Token;
    ReactionNetwork net;
    std::map<std::string, int> index;

    auto species_id = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int id = net.species_count();
        index[name] = id;
        net.species.push_back(name);
        return id;
    };

    struct RawSide {
        std::vector<std::pair<int, int>> terms;  // (species id, coefficient)
    };

    for (const auto& toks : detail::tokenize_reactions(text)) {
        std::size_t pos = 0;
        auto fail = [&](const std::string& msg) -> ParseError {
            const Token& t = pos < toks.size() ? toks[pos] : toks.back();
            return ParseError(msg, t.line, t.column);
        };
        auto expect = [&](const std::string& text_) {
            if (pos >= toks.size() || toks[pos].text != text_)
                throw fail("expected '" + text_ + "'");
            ++pos;
        };
        auto parse_side = [&]() {
            RawSide side;
            if (pos < toks.size() && toks[pos].text == "0" &&
                pos + 1 < toks.size() && toks[pos + 1].text != "0" &&
                !detail::is_name(toks[pos + 1].text)) {
                ++pos;  // empty side
                return side;
            }
            while (true) {
                int coeff = 1;
                if (pos >= toks.size()) throw fail("unexpected end of reaction");
                if (detail::is_integer(toks[pos].text)) {
                    coeff = std::atoi(toks[pos].text.c_str());
                    ++pos;
                    if (coeff <= 0) { --pos; throw fail("stoichiometric coefficient must be positive"); }
                }
                if (pos >= toks.size() || !detail::is_name(toks[pos].text))
                    throw fail("expected species name");
                side.terms.emplace_back(species_id(toks[pos].text), coeff);
                ++pos;
                if (pos < toks.size() && toks[pos].text == "+") { ++pos; continue; }
                break;
            }
            return side;
        };

        const Token head = toks.front();
        const RawSide lhs = parse_side();
        expect("->");
        const RawSide rhs = parse_side();
        expect("[");
        if (pos >= toks.size()) throw fail("expected rate constant");
        char* end = nullptr;
        const double rate = std::strtod(toks[pos].text.c_str(), &end);
        if (end == toks[pos].text.c_str() || *end != '\0')
            throw fail("malformed rate constant");
        if (!(rate > 0.0)) throw fail("rate constant must be positive");
        ++pos;
        expect("]");
        if (pos != toks.size()) throw fail("trailing tokens after reaction");

        Reaction r;
        r.rate = rate;
        r.reactants.assign(net.species_count(), 0);
        r.products.assign(net.species_count(), 0);
        auto fold = [&](const RawSide& side, std::vector<int>& out) {
            for (auto [id, c] : side.terms) {
                if (out[id] != 0 && warnings)
                    warnings->push_back("line " + std::to_string(head.line) +
                                        ": duplicate species '" + net.species[id] +
                                        "' in one side; coefficients merged");
                out[id] += c;
            }
        };
        fold(lhs, r.reactants);
        fold(rhs, r.products);
        net.reactions.push_back(std::move(r));
    }

    // pad earlier reactions with species discovered later
    for (auto& r : net.reactions) {
        r.reactants.resize(net.species_count(), 0);
        r.products.resize(net.species_count(), 0);
    }
    return net;
}

inline std::string serialize_network(const ReactionNetwork& net) {
    std::string out;
    auto side = [&](const std::vector<int>& coeffs) {
        std::string s;
        for (int i = 0; i < net.species_count(); ++i) {
            if (coeffs[i] == 0) continue;
            if (!s.empty()) s += " + ";
            if (coeffs[i] != 1) s += std::to_string(coeffs[i]) + " ";
            s += net.species[i];
        }
        return s.empty() ? std::string("0") : s;
    };
    char buf[64];
    for (const auto& r : net.reactions) {
        std::snprintf(buf, sizeof buf, "%.17g", r.rate);
        out += side(r.reactants) + " -> " + side(r.products) + " [" + buf + "]\n";
    }
    return out;
}

/// Compiles the network into xdot = N r(x), r_k = rate_k prod_i x_i^{m_ik},
/// with a non-negativity domain guard and an exact analytic divergence.
inline SystemDef mass_action_odes(const ReactionNetwork& net) {
    const StoichMatrix N = stoich_matrix(net);
    const int d = N.n_species;
    SystemDef sys;
    sys.dim = d;
    sys.domain_guard = SystemDef::nonneg_guard();

    auto monomial = [net](int k, const Vec& x) {
        double m = net.reactions[k].rate;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (int e = 0; e < net.reactions[k].reactants[i]; ++e) m *= x[i];
        return m;
    };

    sys.field = [net, N, monomial, d](const Vec& x) {
        Vec f(d, 0.0);
        for (int k = 0; k < N.n_reactions; ++k) {
            const double r = monomial(k, x);
            for (int i = 0; i < d; ++i)
                if (N(i, k) != 0) f[i] += static_cast<double>(N(i, k)) * r;
        }
        return f;
    };

    sys.analytic_div = [net, N, d](const Vec& x) {
        double div = 0.0;
        for (int k = 0; k < N.n_reactions; ++k) {
            for (int i = 0; i < d; ++i) {
                const int m = net.reactions[k].reactants[i];
                if (N(i, k) == 0 || m == 0) continue;
                double term = net.reactions[k].rate * m;
                for (int j = 0; j < d; ++j) {
                    int e = net.reactions[k].reactants[j] - (j == i ? 1 : 0);
                    for (; e > 0; --e) term *= x[j];
                }
                div += static_cast<double>(N(i, k)) * term;
            }
        }
        return div;
    };
    return sys;
}

namespace detail {

/// Exact rational for the null-space elimination; magnitudes stay tiny.
struct Rat {
    long long n = 0, d = 1;
    Rat() = default;
    Rat(long long v) : n(v) {}
    Rat(long long n_, long long d_) : n(n_), d(d_) { reduce(); }
    void reduce() {
        if (d < 0) { n = -n; d = -d; }
        const long long g = std::gcd(std::abs(n), d);
        if (g > 1) { n /= g; d /= g; }
        if (n == 0) d = 1;
    }
    bool zero() const { return n == 0; }
    Rat operator*(const Rat& o) const { return Rat(n * o.n, d * o.d); }
    Rat operator-(const Rat& o) const { return Rat(n * o.d - o.n * d, d * o.d); }
    Rat operator/(const Rat& o) const { return Rat(n * o.d, d * o.n); }
};

}  // namespace detail

/// Integer-primitive basis of { c : c^T N = 0 }; each basis vector is an
/// exactly conserved linear combination c . x.
inline std::vector<std::vector<long long>> linear_invariants(const ReactionNetwork& net) {
    using detail::Rat;
    const StoichMatrix N = stoich_matrix(net);
    const int s = N.n_species, r = N.n_reactions;

    // row-reduce N^T (r x s) over the rationals: solutions of N^T c = 0
    std::vector<std::vector<Rat>> m(r, std::vector<Rat>(s));
    for (int k = 0; k < r; ++k)
        for (int i = 0; i < s; ++i) m[k][i] = Rat(N(i, k));

    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < s && row < r; ++col) {
        int piv = -1;
        for (int i = row; i < r; ++i)
            if (!m[i][col].zero()) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[row], m[piv]);
        const Rat lead = m[row][col];
        for (int j = col; j < s; ++j) m[row][j] = m[row][j] / lead;
        for (int i = 0; i < r; ++i) {
            if (i == row || m[i][col].zero()) continue;
            const Rat factor = m[i][col];
            for (int j = col; j < s; ++j)
                m[i][j] = m[i][j] - factor * m[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }

    std::vector<std::vector<long long>> basis;
    std::vector<bool> is_pivot(s, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (int free = 0; free < s; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rat> v(s, Rat(0));
        v[free] = Rat(1);
        for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
            v[pivot_col[i]] = Rat(0) - m[i][free];
        // scale to primitive integers, first nonzero positive
        long long lcm = 1;
        for (const auto& e : v) lcm = std::lcm(lcm, e.d);
        std::vector<long long> iv(s);
        for (int i = 0; i < s; ++i) iv[i] = v[i].n * (lcm / v[i].d);
        long long g = 0;
        for (long long e : iv) g = std::gcd(g, std::abs(e));
        if (g > 1)
            for (auto& e : iv) e /= g;
        for (long long e : iv) {
            if (e == 0) continue;
            if (e < 0)
                for (auto& q : iv) q = -q;
            break;
        }
        basis.push_back(std::move(iv));
    }
    return basis;
}

/// Per-species right-hand sides as polynomial strings: positive contributions
/// first, then negative, each group in reaction order (e.g. the Brusselator
/// prints "1 + x^2 y - 3 x - x" and "3 x - x^2 y").
inline std::vector<std::string> rhs_strings(const ReactionNetwork& net) {
    const StoichMatrix N = stoich_matrix(net);
    std::vector<std::string> out(N.n_species);
    char buf[64];
    for (int i = 0; i < N.n_species; ++i) {
        std::string s;
        std::vector<int> order;
        for (int k = 0; k < N.n_reactions; ++k)
            if (N(i, k) > 0) order.push_back(k);
        for (int k = 0; k < N.n_reactions; ++k)
            if (N(i, k) < 0) order.push_back(k);
        for (int k : order) {
            const double coeff = static_cast<double>(N(i, k)) * net.reactions[k].rate;
            std::string mono;
            for (int j = 0; j < N.n_species; ++j) {
                const int e = net.reactions[k].reactants[j];
                if (e == 0) continue;
                if (!mono.empty()) mono += " ";
                mono += net.species[j];
                if (e > 1) mono += "^" + std::to_string(e);
            }
            const double mag = std::abs(coeff);
            std::string term;
            if (mono.empty()) {
                std::snprintf(buf, sizeof buf, "%g", mag);
                term = buf;
            } else if (mag == 1.0) {
                term = mono;
            } else {
                std::snprintf(buf, sizeof buf, "%g", mag);
                term = std::string(buf) + " " + mono;
            }
            if (s.empty())
                s = (coeff < 0 ? "-" : "") + term;
            else
                s += (coeff < 0 ? " - " : " + ") + term;
        }
        out[i] = s.empty() ? "0" : s;
    }
    return out;
}

}  // namespace pfaff

#endif
