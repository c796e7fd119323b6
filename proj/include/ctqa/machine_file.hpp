#pragma once

// The `.ctqa` text format: a line-oriented machine + scheduler description
// with a small operator-expression language, plus the serializer that turns
// constructions back into files. parse(serialize(c)) is structurally equal
// to c; files whose machine fails validation are rejected at parse time.
//
//   # comment
//   machine lab
//   states: q0 q1
//   start: q0
//   accept: q0
//   reject: q1
//   alphabet: a b
//   ham a = NOT_PI_2
//   ham b = neg(NOT_PI_2)
//   decider: regex a*b*
//   writer.accept: uniform
//   writer.reject: pulse 1
//   cutpoint: 1/2
//
// expr ::= NOT_PI_2 | ZERO(d) | I(d) | neg(expr) | scale(expr, p/q)
//        | kron(expr, expr) | dsum(expr, expr)
//        | matrix d [ re-rows | im-rows ]     rows ';'-separated,
//          entries: decimal, p/q, or "p/q pi"
//
// Rotating (multi-sweep) machines add `sweeps: k` and per-sweep writer
// lines `writer.accept.<i>:` / `writer.reject.<i>:`. Unitary machines add
// `type: mcqfa` and use `unitary <sym> = <expr>` lines instead of `ham`;
// their decider defaults to `const 1` and they take no writer lines.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctqa/constructions.hpp"

namespace ctqa {

namespace file_detail {

[[noreturn]] inline void fail(std::size_t line, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line) + ": " + what);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

/// Recursive-descent evaluator for operator expressions. Reports positions
/// as columns within the expression text; the caller prefixes the line.
class ExprParser {
public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    ComplexMatrix parse() {
        const ComplexMatrix m = expr();
        skip_ws();
        if (pos_ != s_.size()) err("trailing input after expression");
        return m;
    }

private:
    [[noreturn]] void err(const std::string& what) const {
        throw std::runtime_error("col " + std::to_string(pos_ + 1) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    void expect(char c) {
        if (peek() != c) err(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) err("expected an operator name");
        return s_.substr(start, pos_ - start);
    }

    std::size_t integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) err("expected an integer");
        return static_cast<std::size_t>(std::stoull(s_.substr(start, pos_ - start)));
    }

    Rational rational() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/'))
            ++pos_;
        if (pos_ == start) err("expected a rational p/q");
        try {
            return Rational::from_string(s_.substr(start, pos_ - start));
        } catch (const std::exception& e) {
            err(e.what());
        }
    }

    ComplexMatrix expr() {
        const std::string op = ident();
        if (op == "NOT_PI_2") return not_pi_2();
        if (op == "ZERO" || op == "I") {
            expect('(');
            const std::size_t d = integer();
            expect(')');
            if (d == 0) err("dimension must be positive");
            return op == "I" ? ComplexMatrix::identity(d) : ComplexMatrix::zero(d);
        }
        if (op == "neg") {
            expect('(');
            const ComplexMatrix m = expr();
            expect(')');
            return m.scaled(-1.0);
        }
        if (op == "scale") {
            expect('(');
            const ComplexMatrix m = expr();
            expect(',');
            const Rational r = rational();
            expect(')');
            return m.scaled(r.to_double());
        }
        if (op == "kron" || op == "dsum") {
            expect('(');
            const ComplexMatrix a = expr();
            expect(',');
            const ComplexMatrix b = expr();
            expect(')');
            return op == "kron" ? kron(a, b) : direct_sum(a, b);
        }
        if (op == "matrix") return matrix_literal();
        err("unknown operator '" + op + "'");
    }

    // matrix d [ re-rows | im-rows ]
    ComplexMatrix matrix_literal() {
        const std::size_t d = integer();
        if (d == 0) err("dimension must be positive");
        expect('[');
        skip_ws();
        const auto close = s_.find(']', pos_);
        if (close == std::string::npos) err("missing ']' in matrix literal");
        const std::string body = s_.substr(pos_, close - pos_);
        pos_ = close + 1;

        const auto bar = body.find('|');
        if (bar == std::string::npos)
            err("matrix literal needs '|' between the real and imaginary blocks");
        const std::vector<std::vector<double>> re = block(body.substr(0, bar), d);
        const std::vector<std::vector<double>> im = block(body.substr(bar + 1), d);
        ComplexMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
        return m;
    }

    std::vector<std::vector<double>> block(const std::string& text, std::size_t d) {
        std::vector<std::vector<double>> rows;
        std::size_t pos = 0;
        while (true) {
            const auto semi = text.find(';', pos);
            rows.push_back(row_entries(text.substr(pos, semi - pos)));
            if (semi == std::string::npos) break;
            pos = semi + 1;
        }
        if (rows.size() != d) err("matrix block has " + std::to_string(rows.size()) +
                                  " rows, expected " + std::to_string(d));
        for (const auto& r : rows)
            if (r.size() != d)
                err("matrix row has " + std::to_string(r.size()) + " entries, expected " +
                    std::to_string(d));
        return rows;
    }

    // entry ::= decimal | [-]p/q | [-]p/q pi
    std::vector<double> row_entries(const std::string& row) {
        std::vector<double> out;
        const std::vector<std::string> tokens = split_ws(row);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            std::string t = tokens[i];
            double sign = 1.0;
            if (!t.empty() && t[0] == '-') {
                sign = -1.0;
                t = t.substr(1);
            }
            double v;
            if (t.find('/') != std::string::npos) {
                Rational r(0);
                try {
                    r = Rational::from_string(t);
                } catch (const std::exception& e) {
                    err(std::string("bad matrix entry '") + tokens[i] + "': " + e.what());
                }
                v = r.to_double();
                if (i + 1 < tokens.size() && tokens[i + 1] == "pi") {
                    v *= std::acos(-1.0);
                    ++i;
                }
            } else {
                char* end = nullptr;
                v = std::strtod(t.c_str(), &end);
                if (end == nullptr || *end != '\0' || t.empty())
                    err("bad matrix entry '" + tokens[i] + "'");
            }
            out.push_back(sign * v);
        }
        return out;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

inline FamilySpec parse_family_spec(std::size_t line, const std::vector<std::string>& tokens) {
    if (tokens.empty()) fail(line, "writer line needs a family name");
    const std::string& name = tokens.front();
    if (tokens.size() > 2) fail(line, "writer family takes at most one parameter");
    std::optional<Rational> param;
    if (tokens.size() == 2) {
        try {
            param = Rational::from_string(tokens[1]);
        } catch (const std::exception& e) {
            fail(line, std::string("bad family parameter: ") + e.what());
        }
    }
    if (name == "uniform") return uniform_family(param.value_or(Rational(1)));
    if (name == "pulse") return pulse_family(param.value_or(Rational(1)));
    if (name == "last_pulse") return last_pulse_family(param.value_or(Rational(1)));
    if (name == "const") {
        if (!param) fail(line, "family 'const' needs a parameter");
        return const_family(*param);
    }
    if (name == "zero") {
        if (param) fail(line, "family 'zero' takes no parameter");
        return zero_family();
    }
    fail(line, "unknown writer family '" + name + "'");
}

inline std::string family_str(const FamilySpec& f) {
    switch (f.kind) {
        case Family::uniform:
            return f.param == Rational(1) ? "uniform" : "uniform " + f.param.str();
        case Family::pulse: return "pulse " + f.param.str();
        case Family::last_pulse:
            return f.param == Rational(1) ? "last_pulse" : "last_pulse " + f.param.str();
        case Family::constant: return "const " + f.param.str();
        case Family::zero: return "zero";
        default:
            throw std::invalid_argument("serialize: custom writer families have no text form");
    }
}

inline std::string format_entry(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string matrix_literal_str(const ComplexMatrix& m) {
    std::string re, im;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i > 0) {
            re += ';';
            im += ';';
        }
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j > 0) {
                re += ' ';
                im += ' ';
            }
            re += format_entry(m(i, j).real());
            im += format_entry(m(i, j).imag());
        }
    }
    return "matrix " + std::to_string(m.rows()) + " [" + re + " | " + im + "]";
}

}  // namespace file_detail

inline NamedConstruction parse_machine_file(const std::string& text) {
    using file_detail::fail;

    // First pass: collect tagged lines so section order never matters.
    struct OpLine {
        std::size_t line;
        char sym;
        std::string expr;
        bool unitary;
    };
    struct WriterLine {
        std::size_t line;
        bool accept;
        std::size_t sweep;  // 0 = unnumbered
        std::vector<std::string> tokens;
    };
    std::map<std::string, std::pair<std::size_t, std::string>> sections;
    std::vector<OpLine> ops;
    std::vector<WriterLine> writers;

    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = file_detail::trim(raw);
        if (line.empty()) continue;

        if (line.rfind("machine", 0) == 0 &&
            (line.size() == 7 || line[7] == ' ' || line[7] == '\t')) {
            if (sections.count("machine")) fail(lineno, "duplicate 'machine' line");
            const std::string name = file_detail::trim(line.substr(7));
            if (name.empty() || name.find(' ') != std::string::npos)
                fail(lineno, "'machine' takes exactly one name");
            sections["machine"] = {lineno, name};
            continue;
        }
        if (line.rfind("ham ", 0) == 0 || line.rfind("unitary ", 0) == 0) {
            const bool unitary = line[0] == 'u';
            const std::string rest = file_detail::trim(line.substr(unitary ? 8 : 4));
            const auto eq = rest.find('=');
            if (eq == std::string::npos) fail(lineno, "expected '<symbol> = <expr>'");
            const std::string sym = file_detail::trim(rest.substr(0, eq));
            const std::string expr = file_detail::trim(rest.substr(eq + 1));
            if (sym.size() != 1) fail(lineno, "operator lines take a single-character symbol");
            if (expr.empty()) fail(lineno, "empty operator expression");
            ops.push_back({lineno, sym[0], expr, unitary});
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos)
            fail(lineno, "expected '<section>: <payload>' (unrecognized line)");
        const std::string key = file_detail::trim(line.substr(0, colon));
        const std::string payload = file_detail::trim(line.substr(colon + 1));
        if (key.rfind("writer.", 0) == 0) {
            std::string tail = key.substr(7);
            WriterLine w;
            w.line = lineno;
            w.sweep = 0;
            const auto dot = tail.find('.');
            if (dot != std::string::npos) {
                const std::string idx = tail.substr(dot + 1);
                tail = tail.substr(0, dot);
                if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
                    fail(lineno, "bad sweep index '" + idx + "'");
                w.sweep = std::stoull(idx);
                if (w.sweep == 0) fail(lineno, "sweep indices start at 1");
            }
            if (tail == "accept") w.accept = true;
            else if (tail == "reject") w.accept = false;
            else fail(lineno, "unknown writer line 'writer." + tail + "'");
            w.tokens = file_detail::split_ws(payload);
            writers.push_back(std::move(w));
            continue;
        }
        static const std::set<std::string> known = {"states", "start",    "accept", "reject",
                                                    "alphabet", "decider", "sweeps", "cutpoint",
                                                    "type"};
        if (!known.count(key)) fail(lineno, "unknown section '" + key + ":'");
        if (sections.count(key)) fail(lineno, "duplicate '" + key + ":' line");
        sections[key] = {lineno, payload};
    }

    const auto need = [&](const std::string& key) -> const std::string& {
        const auto it = sections.find(key);
        if (it == sections.end())
            throw std::runtime_error("missing '" + key + (key == "machine" ? "" : ":") + "' line");
        return it->second.second;
    };
    const auto sec_line = [&](const std::string& key) { return sections.at(key).first; };

    NamedConstruction c;
    c.name = need("machine");

    const bool is_mcqfa = sections.count("type") != 0;
    if (is_mcqfa && need("type") != "mcqfa")
        fail(sec_line("type"), "unknown machine type '" + need("type") + "'");

    // Shared machine shape.
    const std::vector<std::string> states = file_detail::split_ws(need("states"));
    if (states.empty()) fail(sec_line("states"), "empty state list");
    std::string alphabet;
    for (const std::string& t : file_detail::split_ws(need("alphabet"))) {
        if (t.size() != 1) fail(sec_line("alphabet"), "alphabet symbols are single characters");
        if (alphabet.find(t[0]) != std::string::npos)
            fail(sec_line("alphabet"), std::string("duplicate alphabet symbol '") + t[0] + "'");
        alphabet += t[0];
    }
    if (alphabet.empty()) fail(sec_line("alphabet"), "empty alphabet");
    const std::string start = need("start");
    if (start.empty() || start.find(' ') != std::string::npos)
        fail(sec_line("start"), "'start' takes exactly one state");
    std::set<std::string> accept, reject;
    if (sections.count("accept"))
        for (const std::string& q : file_detail::split_ws(sections["accept"].second))
            accept.insert(q);
    if (sections.count("reject"))
        for (const std::string& q : file_detail::split_ws(sections["reject"].second))
            reject.insert(q);

    // Operator lines: evaluate, then shape- and symmetry-check with the
    // offending line number attached.
    std::map<char, ComplexMatrix> operators;
    for (const OpLine& op : ops) {
        if (op.unitary != is_mcqfa)
            fail(op.line, is_mcqfa ? "mcqfa machines use 'unitary' lines, not 'ham'"
                                   : "'unitary' lines require 'type: mcqfa'");
        if (alphabet.find(op.sym) == std::string::npos)
            fail(op.line, std::string("symbol '") + op.sym + "' is not in the alphabet");
        if (operators.count(op.sym))
            fail(op.line, std::string("duplicate operator for symbol '") + op.sym + "'");
        ComplexMatrix m(1, 1);
        try {
            m = file_detail::ExprParser(op.expr).parse();
        } catch (const std::exception& e) {
            fail(op.line, e.what());
        }
        if (m.rows() != states.size())
            fail(op.line, "operator is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + " but the machine has " +
                              std::to_string(states.size()) + " states");
        if (!op.unitary && m.hermiticity_defect() > structural_tol)
            fail(op.line, "matrix is not Hermitian (max asymmetry " +
                              std::to_string(m.hermiticity_defect()) + ")");
        operators.emplace(op.sym, std::move(m));
        c.ham_exprs[op.sym] = op.expr;
    }
    for (char sym : alphabet)
        if (!operators.count(sym))
            throw std::runtime_error(std::string("missing operator line for symbol '") + sym +
                                     "'");

    // Decider.
    if (sections.count("decider")) {
        const std::string& payload = sections["decider"].second;
        const std::size_t line = sec_line("decider");
        const auto tokens = file_detail::split_ws(payload);
        if (tokens.empty()) fail(line, "empty decider");
        if (tokens[0] == "regex") {
            const std::string pattern =
                file_detail::trim(payload.substr(payload.find("regex") + 5));
            try {
                c.scheduler.decider = Decider(regex_to_dfa(pattern, alphabet));
            } catch (const std::exception& e) {
                fail(line, e.what());
            }
        } else if (tokens[0] == "const") {
            if (tokens.size() != 2 || (tokens[1] != "0" && tokens[1] != "1"))
                fail(line, "expected 'const 0' or 'const 1'");
            c.scheduler.decider = Decider(ConstDecider{tokens[1] == "1" ? 1 : 0, alphabet});
        } else if (tokens[0] == "predicate") {
            if (tokens.size() != 2) fail(line, "expected 'predicate <name>'");
            try {
                c.scheduler.decider = Decider(builtin_predicate(tokens[1], alphabet));
            } catch (const std::exception& e) {
                fail(line, e.what());
            }
        } else {
            fail(line, "unknown decider kind '" + tokens[0] + "'");
        }
    } else if (is_mcqfa) {
        c.scheduler.decider = Decider(ConstDecider{1, alphabet});
    } else {
        throw std::runtime_error("missing 'decider:' line");
    }

    // Sweeps and writer lines.
    std::size_t sweeps = 0;
    if (sections.count("sweeps")) {
        const std::string& payload = sections["sweeps"].second;
        if (payload.find_first_not_of("0123456789") != std::string::npos || payload.empty())
            fail(sec_line("sweeps"), "expected an integer sweep count");
        sweeps = std::stoull(payload);
        if (sweeps < 2) fail(sec_line("sweeps"), "sweep count must be at least 2");
    }
    if (is_mcqfa && !writers.empty())
        fail(writers.front().line, "mcqfa machines take no writer lines");
    Writer writer;
    if (sweeps == 0) {
        writer = Writer{uniform_family(), zero_family(), {}};
        for (const WriterLine& w : writers) {
            if (w.sweep != 0)
                fail(w.line, "per-sweep writer line without a 'sweeps:' declaration");
            (w.accept ? writer.accept_family : writer.reject_family) =
                file_detail::parse_family_spec(w.line, w.tokens);
        }
        if (is_mcqfa) writer = Writer{zero_family(), zero_family(), {}};
    } else {
        writer.sweeps.assign(sweeps, Writer{uniform_family(), zero_family(), {}});
        for (const WriterLine& w : writers) {
            if (w.sweep == 0)
                fail(w.line, "rotating machines need numbered writer lines (writer.accept.<i>:)");
            if (w.sweep > sweeps)
                fail(w.line, "sweep index " + std::to_string(w.sweep) + " exceeds sweep count " +
                                 std::to_string(sweeps));
            Writer& sub = writer.sweeps[w.sweep - 1];
            (w.accept ? sub.accept_family : sub.reject_family) =
                file_detail::parse_family_spec(w.line, w.tokens);
        }
    }
    c.scheduler.writer = std::move(writer);

    if (sections.count("cutpoint")) {
        const std::size_t line = sec_line("cutpoint");
        try {
            c.cutpoint = Rational::from_string(sections["cutpoint"].second);
        } catch (const std::exception& e) {
            fail(line, e.what());
        }
        if (c.cutpoint->is_zero() || Rational(1) < *c.cutpoint)
            fail(line, "cutpoint must lie in (0, 1]");
    }

    // Assemble the machine variant.
    if (is_mcqfa) {
        Mcqfa m;
        m.states = states;
        m.alphabet = alphabet;
        m.unitaries = std::move(operators);
        m.start = start;
        m.accept = std::move(accept);
        m.reject = std::move(reject);
        c.machine = std::move(m);
    } else {
        Ctqa base;
        base.states = states;
        base.alphabet = alphabet;
        base.hamiltonians = std::move(operators);
        base.start = start;
        base.accept = std::move(accept);
        base.reject = std::move(reject);
        if (sweeps == 0) {
            c.machine = std::move(base);
        } else {
            KCtqa k;
            k.base = std::move(base);
            k.sweeps = sweeps;
            k.counter_width = static_cast<std::size_t>(std::floor(std::log2(sweeps)));
            c.machine = std::move(k);
        }
    }

    const auto violations = validate(c);
    if (!violations.empty()) {
        std::string msg = "machine fails validation:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::runtime_error(msg);
    }
    return c;
}

inline std::string serialize_machine(const NamedConstruction& c) {
    std::ostringstream out;
    const auto join = [](const auto& items) {
        std::string s;
        for (const auto& q : items) {
            if (!s.empty()) s += ' ';
            s += q;
        }
        return s;
    };

    const bool is_mcqfa = std::holds_alternative<Mcqfa>(c.machine);
    const KCtqa* kc = std::get_if<KCtqa>(&c.machine);
    const auto& base = [&]() -> const auto& {
        if (kc != nullptr) return kc->base;
        if (is_mcqfa) throw std::logic_error("unreachable");
        return std::get<Ctqa>(c.machine);
    };

    std::vector<std::string> states;
    std::string alphabet, start;
    std::set<std::string> accept, reject;
    if (is_mcqfa) {
        const Mcqfa& m = std::get<Mcqfa>(c.machine);
        states = m.states;
        alphabet = m.alphabet;
        start = m.start;
        accept = m.accept;
        reject = m.reject;
    } else {
        const Ctqa& m = base();
        states = m.states;
        alphabet = m.alphabet;
        start = m.start;
        accept = m.accept;
        reject = m.reject;
    }

    out << "machine " << c.name << "\n";
    out << "states: " << join(states) << "\n";
    out << "start: " << start << "\n";
    if (!accept.empty()) out << "accept: " << join(accept) << "\n";
    if (!reject.empty()) out << "reject: " << join(reject) << "\n";
    {
        std::string spaced;
        for (char sym : alphabet) {
            if (!spaced.empty()) spaced += ' ';
            spaced += sym;
        }
        out << "alphabet: " << spaced << "\n";
    }
    if (is_mcqfa) out << "type: mcqfa\n";
    if (kc != nullptr) out << "sweeps: " << kc->sweeps << "\n";

    for (char sym : alphabet) {
        const char* keyword = is_mcqfa ? "unitary" : "ham";
        const auto hint = c.ham_exprs.find(sym);
        if (hint != c.ham_exprs.end()) {
            out << keyword << " " << sym << " = " << hint->second << "\n";
            continue;
        }
        const ComplexMatrix& m = is_mcqfa ? std::get<Mcqfa>(c.machine).unitaries.at(sym)
                                          : base().hamiltonians.at(sym);
        out << keyword << " " << sym << " = " << file_detail::matrix_literal_str(m) << "\n";
    }

    // Decider: only forms with a textual source serialize.
    if (const auto* dfa = c.scheduler.decider.as_dfa()) {
        if (dfa->pattern.empty())
            throw std::invalid_argument(
                "serialize: decider has no regex source (hand-built transition table)");
        out << "decider: regex " << dfa->pattern << "\n";
    } else if (const auto* cd = c.scheduler.decider.as_const()) {
        out << "decider: const " << cd->bit << "\n";
    } else {
        const auto* pred = c.scheduler.decider.as_predicate();
        try {
            builtin_predicate(pred->name, alphabet);
        } catch (const std::exception&) {
            throw std::invalid_argument("serialize: predicate '" + pred->name +
                                        "' is not a registered builtin");
        }
        out << "decider: predicate " << pred->name << "\n";
    }

    const Writer& w = c.scheduler.writer;
    if (is_mcqfa) {
        // Unitary machines consume no durations; writer lines are omitted.
    } else if (w.sweeps.empty()) {
        out << "writer.accept: " << file_detail::family_str(w.accept_family) << "\n";
        out << "writer.reject: " << file_detail::family_str(w.reject_family) << "\n";
    } else {
        for (std::size_t i = 0; i < w.sweeps.size(); ++i) {
            if (!w.sweeps[i].sweeps.empty())
                throw std::invalid_argument("serialize: nested rotating writers are not expressible");
            out << "writer.accept." << i + 1 << ": "
                << file_detail::family_str(w.sweeps[i].accept_family) << "\n";
            out << "writer.reject." << i + 1 << ": "
                << file_detail::family_str(w.sweeps[i].reject_family) << "\n";
        }
    }

    if (c.cutpoint) out << "cutpoint: " << c.cutpoint->str() << "\n";
    return out.str();
}

/// Closed-form oracles are code, not text: they cannot ride along in a
/// file. Re-attach the known one after parsing when the machine name is a
/// zoo entry (the zoo formula is a function of input statistics keyed to
/// that entry's decider and writer shape).
inline void attach_zoo_formula(NamedConstruction& c) {
    for (const std::string& name : zoo_names()) {
        if (c.name == name) {
            c.formula = build_zoo(name).formula;
            return;
        }
    }
}

}  // namespace ctqa
