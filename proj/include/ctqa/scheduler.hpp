#pragma once

// The scheduler pipeline: a decider maps the word to one classical bit, a
// writer maps (bit, length) to an exact-rational time-schedule. Writers never
// see the word itself, only its length; that information flow is part of the
// model and is enforced by the interfaces here. Also hosts the regex -> DFA
// compiler used to define regular-language deciders.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctqa/rational.hpp"

namespace ctqa {

struct TimeSchedule {
    std::vector<Rational> entries;

    std::size_t size() const { return entries.size(); }
    bool operator==(const TimeSchedule& o) const { return entries == o.entries; }
};

/// ';'-joined entries in explicit "p/q" form; the CSV schedule column format.
inline std::string schedule_str(const TimeSchedule& ts) {
    std::string s;
    for (std::size_t i = 0; i < ts.entries.size(); ++i) {
        if (i) s += ';';
        s += ts.entries[i].str_explicit();
    }
    return s;
}

inline TimeSchedule scale_schedule(const TimeSchedule& ts, const Rational& k) {
    if (k.is_zero()) throw std::invalid_argument("scale_schedule: factor must be positive");
    TimeSchedule out;
    out.entries.reserve(ts.entries.size());
    for (const Rational& e : ts.entries) out.entries.push_back(e * k);
    return out;
}

/// Interleaves sweep schedules with the zero-duration endmarker slots:
/// (0, t_1.., 0, 0, t_2.., 0, ...). Output length k·n + 2k.
inline TimeSchedule rotation_schedule(const std::vector<TimeSchedule>& per_sweep, std::size_t k) {
    if (per_sweep.size() != k)
        throw std::invalid_argument("rotation_schedule: expected " + std::to_string(k) +
                                    " per-sweep schedules, got " + std::to_string(per_sweep.size()));
    for (const TimeSchedule& ts : per_sweep)
        if (ts.size() != per_sweep.front().size())
            throw std::invalid_argument("rotation_schedule: ragged inner lengths");
    TimeSchedule out;
    out.entries.reserve(k * (per_sweep.empty() ? 0 : per_sweep.front().size()) + 2 * k);
    for (const TimeSchedule& ts : per_sweep) {
        out.entries.emplace_back();
        out.entries.insert(out.entries.end(), ts.entries.begin(), ts.entries.end());
        out.entries.emplace_back();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Deciders

struct DfaDecider {
    std::string alphabet;                  // ordered, distinct symbols
    std::size_t start = 0;
    std::vector<std::size_t> transitions;  // row-major [state][symbol index], total
    std::set<std::size_t> accepting;
    std::string pattern;  // source regex when compiled from one; not part of equality

    std::size_t state_count() const {
        return alphabet.empty() ? 0 : transitions.size() / alphabet.size();
    }

    bool operator==(const DfaDecider& o) const {
        return alphabet == o.alphabet && start == o.start && transitions == o.transitions &&
               accepting == o.accepting;
    }
};

inline int dfa_accepts(const DfaDecider& d, const std::string& x) {
    std::size_t state = d.start;
    for (char c : x) {
        const std::size_t sym = d.alphabet.find(c);
        if (sym == std::string::npos)
            throw std::invalid_argument(std::string("decider: symbol '") + c + "' outside decider alphabet");
        state = d.transitions[state * d.alphabet.size() + sym];
    }
    return d.accepting.count(state) ? 1 : 0;
}

struct ConstDecider {
    int bit = 1;
    std::string alphabet;  // empty means unrestricted

    bool operator==(const ConstDecider& o) const { return bit == o.bit && alphabet == o.alphabet; }
};

/// Injected total predicate. Serializable only when `name` refers to a
/// registered builtin; equality is identity of the underlying callable.
struct PredicateDecider {
    std::string name;
    std::string alphabet;
    std::shared_ptr<const std::function<bool(const std::string&)>> predicate;

    bool operator==(const PredicateDecider& o) const {
        return name == o.name && alphabet == o.alphabet && predicate == o.predicate;
    }
};

class Decider {
public:
    Decider() = default;
    Decider(ConstDecider d) : impl_(std::move(d)) {}
    Decider(DfaDecider d) : impl_(std::move(d)) {}
    Decider(PredicateDecider d) : impl_(std::move(d)) {
        const auto& p = std::get<PredicateDecider>(impl_);
        if (!p.predicate || !*p.predicate)
            throw std::invalid_argument("decider: predicate callable missing");
    }

    const std::string& alphabet() const {
        return std::visit([](const auto& d) -> const std::string& { return d.alphabet; }, impl_);
    }

    /// D(x). Words must stay inside the decider's alphabet when one is declared.
    int operator()(const std::string& x) const {
        check_word(x);
        if (const auto* c = std::get_if<ConstDecider>(&impl_)) return c->bit;
        if (const auto* d = std::get_if<DfaDecider>(&impl_)) return dfa_accepts(*d, x);
        return (*std::get<PredicateDecider>(impl_).predicate)(x) ? 1 : 0;
    }

    void check_word(const std::string& x) const {
        const std::string& sigma = alphabet();
        if (sigma.empty()) return;
        for (char c : x)
            if (sigma.find(c) == std::string::npos)
                throw std::invalid_argument(std::string("decider: symbol '") + c +
                                            "' outside decider alphabet");
    }

    const ConstDecider* as_const() const { return std::get_if<ConstDecider>(&impl_); }
    const DfaDecider* as_dfa() const { return std::get_if<DfaDecider>(&impl_); }
    const PredicateDecider* as_predicate() const { return std::get_if<PredicateDecider>(&impl_); }

    bool operator==(const Decider& o) const { return impl_ == o.impl_; }

private:
    std::variant<ConstDecider, DfaDecider, PredicateDecider> impl_;
};

/// Registry of named total predicates that survive serialization. Each
/// entry is one shared closure, so two lookups of the same builtin compare
/// equal; round-tripping a machine through its file form depends on that.
inline PredicateDecider builtin_predicate(const std::string& name, std::string alphabet) {
    using Pred = const std::function<bool(const std::string&)>;
    static const std::map<std::string, std::shared_ptr<Pred>> registry = {
        {"even-length", std::make_shared<Pred>(
                            [](const std::string& x) { return x.size() % 2 == 0; })},
    };
    const auto it = registry.find(name);
    if (it == registry.end())
        throw std::invalid_argument("decider: unknown builtin predicate \"" + name + "\"");
    PredicateDecider p;
    p.name = name;
    p.alphabet = std::move(alphabet);
    p.predicate = it->second;
    return p;
}

// ---------------------------------------------------------------------------
// Writers

enum class Family { uniform, pulse, last_pulse, constant, zero, custom };

/// A named schedule family. `param` scales the family's nonzero entries
/// (uniform s -> (s/n,...); pulse p -> (p,0,...); last_pulse s -> (0,...,s);
/// const p -> (p,...,p)), which is how scaled constructions stay inside the
/// family grammar. `custom` is the per-position extension point: (n, pos) ->
/// entry.
struct FamilySpec {
    Family kind = Family::uniform;
    Rational param = Rational(1);
    std::shared_ptr<const std::function<Rational(std::size_t, std::size_t)>> custom;

    bool operator==(const FamilySpec& o) const {
        return kind == o.kind && param == o.param && custom == o.custom;
    }
};

inline FamilySpec uniform_family(Rational scale = Rational(1)) {
    return FamilySpec{Family::uniform, std::move(scale), nullptr};
}
inline FamilySpec pulse_family(Rational amplitude) {
    return FamilySpec{Family::pulse, std::move(amplitude), nullptr};
}
inline FamilySpec last_pulse_family(Rational amplitude = Rational(1)) {
    return FamilySpec{Family::last_pulse, std::move(amplitude), nullptr};
}
inline FamilySpec const_family(Rational value) {
    return FamilySpec{Family::constant, std::move(value), nullptr};
}
inline FamilySpec zero_family() { return FamilySpec{Family::zero, Rational(0), nullptr}; }

inline FamilySpec custom_family(std::function<Rational(std::size_t, std::size_t)> fn) {
    FamilySpec f;
    f.kind = Family::custom;
    f.custom = std::make_shared<const std::function<Rational(std::size_t, std::size_t)>>(std::move(fn));
    return f;
}

inline TimeSchedule emit_family(const FamilySpec& f, std::size_t n) {
    TimeSchedule ts;
    ts.entries.reserve(n);
    switch (f.kind) {
        case Family::uniform:
            for (std::size_t i = 0; i < n; ++i)
                ts.entries.push_back(f.param * Rational(1, static_cast<long long>(n)));
            break;
        case Family::pulse:
            for (std::size_t i = 0; i < n; ++i)
                ts.entries.push_back(i == 0 ? f.param : Rational(0));
            break;
        case Family::last_pulse:
            for (std::size_t i = 0; i < n; ++i)
                ts.entries.push_back(i + 1 == n ? f.param : Rational(0));
            break;
        case Family::constant:
            ts.entries.assign(n, f.param);
            break;
        case Family::zero:
            ts.entries.assign(n, Rational(0));
            break;
        case Family::custom:
            if (!f.custom || !*f.custom)
                throw std::invalid_argument("writer: custom family callable missing");
            for (std::size_t i = 0; i < n; ++i) ts.entries.push_back((*f.custom)(n, i));
            break;
    }
    return ts;
}

/// One family per decider bit. A non-empty `sweeps` list turns the writer into
/// the k-sweep rotating form: each sub-writer emits one sweep's durations and
/// the result is shaped by rotation_schedule (length k·n + 2k, zeros at the
/// endmarker slots); plain writers emit exactly n entries.
struct Writer {
    FamilySpec accept_family = uniform_family();
    FamilySpec reject_family = zero_family();
    std::vector<Writer> sweeps;

    bool operator==(const Writer& o) const {
        return accept_family == o.accept_family && reject_family == o.reject_family &&
               sweeps == o.sweeps;
    }
};

inline TimeSchedule writer_emit(const Writer& w, int bit, std::size_t n) {
    if (!w.sweeps.empty()) {
        std::vector<TimeSchedule> per_sweep;
        per_sweep.reserve(w.sweeps.size());
        for (const Writer& sub : w.sweeps) {
            if (!sub.sweeps.empty())
                throw std::invalid_argument("writer: nested rotating writers unsupported");
            per_sweep.push_back(writer_emit(sub, bit, n));
        }
        return rotation_schedule(per_sweep, w.sweeps.size());
    }
    return emit_family(bit ? w.accept_family : w.reject_family, n);
}

inline FamilySpec scale_family(const FamilySpec& f, const Rational& k) {
    if (f.kind == Family::custom)
        throw std::invalid_argument("writer: cannot scale a custom family");
    if (f.kind == Family::zero) return f;
    FamilySpec out = f;
    out.param = f.param * k;
    return out;
}

inline Writer scale_writer(const Writer& w, const Rational& k) {
    if (k.is_zero()) throw std::invalid_argument("writer: scale factor must be positive");
    Writer out = w;
    if (!out.sweeps.empty()) {
        for (Writer& sub : out.sweeps) sub = scale_writer(sub, k);
        return out;
    }
    out.accept_family = scale_family(w.accept_family, k);
    out.reject_family = scale_family(w.reject_family, k);
    return out;
}

// ---------------------------------------------------------------------------
// Scheduler

struct Scheduler {
    Decider decider;
    Writer writer;

    bool operator==(const Scheduler& o) const {
        return decider == o.decider && writer == o.writer;
    }
};

inline std::pair<int, TimeSchedule> schedule(const Scheduler& s, const std::string& x) {
    const int bit = s.decider(x);  // validates the word against the alphabet
    return {bit, writer_emit(s.writer, bit, x.size())};
}

// ---------------------------------------------------------------------------
// Regex -> DFA (Thompson construction, subset construction, implicit sink)

namespace regex_detail {

struct Nfa {
    std::vector<std::vector<std::pair<char, std::size_t>>> edges;
    std::vector<std::vector<std::size_t>> eps;

    std::size_t add_state() {
        edges.emplace_back();
        eps.emplace_back();
        return edges.size() - 1;
    }
};

struct Frag {
    std::size_t start, accept;
};

class Parser {
public:
    Parser(const std::string& pattern, const std::string& alphabet, Nfa& nfa)
        : pat_(pattern), alpha_(alphabet), nfa_(nfa) {}

    Frag run() {
        const Frag f = parse_alt();
        skip_ws();
        if (pos_ != pat_.size()) fail("unexpected '" + std::string(1, pat_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("regex parse error at position " + std::to_string(pos_) +
                                    ": " + msg);
    }

    void skip_ws() {
        while (pos_ < pat_.size() && (pat_[pos_] == ' ' || pat_[pos_] == '\t')) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < pat_.size() && pat_[pos_] == c;
    }

    bool at_atom_start() {
        skip_ws();
        if (pos_ >= pat_.size()) return false;
        const char c = pat_[pos_];
        return c != '|' && c != ')' && c != '*' && c != ',' && c != '}';
    }

    Frag epsilon_frag() {
        const std::size_t s = nfa_.add_state();
        const std::size_t a = nfa_.add_state();
        nfa_.eps[s].push_back(a);
        return {s, a};
    }

    Frag literal_frag(char c) {
        if (alpha_.find(c) == std::string::npos)
            fail(std::string("symbol '") + c + "' not in alphabet");
        const std::size_t s = nfa_.add_state();
        const std::size_t a = nfa_.add_state();
        nfa_.edges[s].emplace_back(c, a);
        return {s, a};
    }

    Frag parse_alt() {
        Frag left = parse_cat();
        while (peek_is('|')) {
            ++pos_;
            const Frag right = parse_cat();
            const std::size_t s = nfa_.add_state();
            const std::size_t a = nfa_.add_state();
            nfa_.eps[s].push_back(left.start);
            nfa_.eps[s].push_back(right.start);
            nfa_.eps[left.accept].push_back(a);
            nfa_.eps[right.accept].push_back(a);
            left = {s, a};
        }
        return left;
    }

    Frag parse_cat() {
        if (!at_atom_start()) return epsilon_frag();  // empty concatenation matches ε
        Frag left = parse_rep();
        while (at_atom_start()) {
            const Frag right = parse_rep();
            nfa_.eps[left.accept].push_back(right.start);
            left = {left.start, right.accept};
        }
        return left;
    }

    Frag parse_rep() {
        Frag f = parse_atom();
        while (peek_is('*')) {
            ++pos_;
            const std::size_t s = nfa_.add_state();
            const std::size_t a = nfa_.add_state();
            nfa_.eps[s].push_back(f.start);
            nfa_.eps[s].push_back(a);
            nfa_.eps[f.accept].push_back(f.start);
            nfa_.eps[f.accept].push_back(a);
            f = {s, a};
        }
        return f;
    }

    Frag parse_atom() {
        skip_ws();
        if (pos_ >= pat_.size()) fail("expected an atom");
        const char c = pat_[pos_];
        if (c == '(') {
            ++pos_;
            const Frag f = parse_alt();
            if (!peek_is(')')) fail("missing ')'");
            ++pos_;
            return f;
        }
        if (c == '{') {
            ++pos_;
            Frag f{0, 0};
            bool have = false;
            while (true) {
                skip_ws();
                if (pos_ >= pat_.size()) fail("missing '}'");
                const char sym = pat_[pos_];
                if (sym == '}') break;
                if (sym == ',' || sym == '{' || sym == '(' || sym == ')' || sym == '|' || sym == '*')
                    fail(std::string("bad class symbol '") + sym + "'");
                ++pos_;
                const Frag lit = literal_frag(sym);
                if (!have) {
                    f = lit;
                    have = true;
                } else {
                    const std::size_t s = nfa_.add_state();
                    const std::size_t a = nfa_.add_state();
                    nfa_.eps[s].push_back(f.start);
                    nfa_.eps[s].push_back(lit.start);
                    nfa_.eps[f.accept].push_back(a);
                    nfa_.eps[lit.accept].push_back(a);
                    f = {s, a};
                }
                skip_ws();
                if (peek_is(',')) ++pos_;
            }
            ++pos_;  // consume '}'
            if (!have) fail("empty symbol class");
            return f;
        }
        if (c == ')' || c == '|' || c == '*' || c == ',' || c == '}')
            fail(std::string("unexpected '") + c + "'");
        ++pos_;
        return literal_frag(c);
    }

    const std::string& pat_;
    const std::string& alpha_;
    Nfa& nfa_;
    std::size_t pos_ = 0;
};

inline std::vector<std::size_t> eps_closure(const Nfa& nfa, std::vector<std::size_t> states) {
    std::set<std::size_t> seen(states.begin(), states.end());
    while (!states.empty()) {
        const std::size_t s = states.back();
        states.pop_back();
        for (std::size_t t : nfa.eps[s])
            if (seen.insert(t).second) states.push_back(t);
    }
    return {seen.begin(), seen.end()};  // sorted: set iteration order
}

}  // namespace regex_detail

/// Compiles a pattern over the declared alphabet into a total DFA. Syntax:
/// alphabet literals, concatenation, union '|', star '*', grouping '(...)',
/// symbol classes '{c,d}'; whitespace is insignificant. The empty pattern
/// matches only the empty word. States are numbered in discovery order
/// (breadth-first from the start subset), so equal patterns compile to equal
/// tables.
inline DfaDecider regex_to_dfa(const std::string& pattern, const std::string& alphabet) {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
        for (std::size_t j = i + 1; j < alphabet.size(); ++j)
            if (alphabet[i] == alphabet[j])
                throw std::invalid_argument("regex: duplicate alphabet symbol");

    regex_detail::Nfa nfa;
    const regex_detail::Frag frag = regex_detail::Parser(pattern, alphabet, nfa).run();

    std::map<std::vector<std::size_t>, std::size_t> subset_id;
    std::vector<std::vector<std::size_t>> subsets;
    const auto intern = [&](std::vector<std::size_t> subset) {
        const auto [it, fresh] = subset_id.emplace(subset, subsets.size());
        if (fresh) subsets.push_back(std::move(subset));
        return it->second;
    };

    DfaDecider d;
    d.alphabet = alphabet;
    d.pattern = pattern;
    d.start = intern(regex_detail::eps_closure(nfa, {frag.start}));
    for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
        for (char c : alphabet) {
            std::vector<std::size_t> next;
            for (std::size_t s : subsets[cur])
                for (const auto& [sym, t] : nfa.edges[s])
                    if (sym == c) next.push_back(t);
            d.transitions.push_back(intern(regex_detail::eps_closure(nfa, std::move(next))));
        }
    }
    for (std::size_t i = 0; i < subsets.size(); ++i)
        if (std::binary_search(subsets[i].begin(), subsets[i].end(), frag.accept))
            d.accepting.insert(i);
    return d;
}

}  // namespace ctqa
