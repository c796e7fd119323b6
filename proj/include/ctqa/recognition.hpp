#pragma once

// Verdict policies over acceptance probabilities, input-family sweeps with
// CSV output, and the two cross-checkers (closed form vs simulation,
// machine vs machine). Policy thresholds are exact rationals compared
// against the floating probabilities with no tolerance injection, so
// boundary behavior is the stated inequality and nothing else.

#include <cstdio>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctqa/constructions.hpp"

namespace ctqa {

enum class Verdict { accept, reject, unknown };

inline const char* verdict_str(Verdict v) {
    switch (v) {
        case Verdict::accept: return "accept";
        case Verdict::reject: return "reject";
        default: return "unknown";
    }
}

struct VerdictPolicy {
    enum class Kind { cutpoint, isolated, bounded } kind = Kind::cutpoint;
    Rational lambda{1, 2};  // cutpoint and isolated
    Rational alpha{0};      // isolated only
    Rational epsilon{0};    // bounded only
};

inline VerdictPolicy cutpoint_policy(const Rational& lambda) {
    if (lambda.is_zero() || Rational(1) < lambda)
        throw std::invalid_argument("cutpoint policy: lambda must lie in (0, 1]");
    return VerdictPolicy{VerdictPolicy::Kind::cutpoint, lambda, Rational(0), Rational(0)};
}

inline VerdictPolicy isolated_policy(const Rational& lambda, const Rational& alpha) {
    if (lambda.is_zero() || Rational(1) < lambda)
        throw std::invalid_argument("isolated policy: lambda must lie in (0, 1]");
    if (alpha.is_zero()) throw std::invalid_argument("isolated policy: alpha must be positive");
    return VerdictPolicy{VerdictPolicy::Kind::isolated, lambda, alpha, Rational(0)};
}

inline VerdictPolicy bounded_policy(const Rational& epsilon) {
    if (!(epsilon < Rational(1, 2)))
        throw std::invalid_argument("bounded policy: epsilon must lie in [0, 1/2)");
    return VerdictPolicy{VerdictPolicy::Kind::bounded, Rational(0), Rational(0), epsilon};
}

namespace detail {

// p >= r and p <= r with the rational side exact; compare_double places p
// relative to the threshold (-1 below, 0 equal, +1 above).
inline bool at_least(double p, const Rational& r) { return r.compare_double(p) >= 0; }
inline bool at_most(double p, const Rational& r) { return r.compare_double(p) <= 0; }

}  // namespace detail

/// Cutpoint is a binary split at λ; isolated adds an undecided gap of
/// radius α around it; bounded(ε) demands near-certainty on whichever side
/// and is the only policy that looks at p_reject.
inline Verdict classify(const RunOutcome& p, const VerdictPolicy& policy) {
    switch (policy.kind) {
        case VerdictPolicy::Kind::cutpoint:
            return detail::at_least(p.p_accept, policy.lambda) ? Verdict::accept
                                                               : Verdict::reject;
        case VerdictPolicy::Kind::isolated: {
            if (detail::at_least(p.p_accept, policy.lambda + policy.alpha))
                return Verdict::accept;
            // The rejection threshold λ−α only exists when α ≤ λ.
            if (!(policy.lambda < policy.alpha) &&
                detail::at_most(p.p_accept, policy.lambda - policy.alpha))
                return Verdict::reject;
            return Verdict::unknown;
        }
        default: {
            const Rational bar = Rational(1) - policy.epsilon;
            if (detail::at_least(p.p_accept, bar)) return Verdict::accept;
            if (detail::at_least(p.p_reject, bar)) return Verdict::reject;
            return Verdict::unknown;
        }
    }
}

/// Spec-facing alias: probability of acceptance and friends for one word.
inline RunOutcome accept_probability(const NamedConstruction& c, const std::string& x) {
    return run_construction(c, x);
}

inline constexpr std::size_t family_guard = 1'000'000;

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::string strip_spaces(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c != ' ' && c != '\t') out += c;
    return out;
}

[[noreturn]] inline void family_error(const std::string& where, const std::string& what) {
    throw std::invalid_argument("family spec error at '" + where + "': " + what);
}

inline std::size_t parse_count(const std::string& where, const std::string& digits) {
    if (digits.empty()) family_error(where, "expected a non-negative integer");
    std::size_t v = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') family_error(where, "expected a non-negative integer");
        v = v * 10 + static_cast<std::size_t>(c - '0');
        if (v > 100'000'000) family_error(where, "value too large");
    }
    return v;
}

/// "random len=L count=C [seed=S]": C pseudo-random words of length L.
inline std::vector<std::string> random_family(const std::string& spec,
                                              const std::string& alphabet, std::size_t guard,
                                              std::optional<std::uint32_t> seed_override) {
    std::istringstream in(spec);
    std::string token;
    in >> token;  // the word "random"
    std::optional<std::size_t> len, count;
    std::uint32_t seed = 0;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) family_error(token, "expected key=value");
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "len") len = parse_count(token, val);
        else if (key == "count") count = parse_count(token, val);
        else if (key == "seed") seed = static_cast<std::uint32_t>(parse_count(token, val));
        else family_error(token, "unknown key '" + key + "'");
    }
    if (!len || !count) family_error(spec, "random family needs len= and count=");
    if (*count > guard)
        family_error(spec, "family enumerates " + std::to_string(*count) +
                               " words, guard is " + std::to_string(guard));
    if (seed_override) seed = *seed_override;
    std::mt19937 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::vector<std::string> words;
    words.reserve(*count);
    for (std::size_t i = 0; i < *count; ++i) {
        std::string w;
        w.reserve(*len);
        for (std::size_t j = 0; j < *len; ++j) w += alphabet[pick(rng)];
        words.push_back(std::move(w));
    }
    return words;
}

}  // namespace detail

/// Enumerate an input family.
///
/// Template form: `a^n b^m; n=0..3; m=0..3` — atoms are either `<sym>^<var>`
/// or literal symbol runs; each variable takes every value of its declared
/// range, varying the last-declared range fastest. Random form:
/// `random len=L count=C [seed=S]`. An all-whitespace spec is the empty
/// family. The guard caps the number of enumerated words.
inline std::vector<std::string> family_words(const std::string& spec, const std::string& alphabet,
                                             std::size_t guard = family_guard,
                                             std::optional<std::uint32_t> seed_override = {}) {
    if (alphabet.empty()) throw std::invalid_argument("family: empty alphabet");
    const std::string whole = detail::trim(spec);
    if (whole.empty()) return {};
    if (whole.rfind("random", 0) == 0 &&
        (whole.size() == 6 || whole[6] == ' ' || whole[6] == '\t'))
        return detail::random_family(whole, alphabet, guard, seed_override);

    // Split template from range declarations.
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (true) {
        const auto semi = whole.find(';', pos);
        segments.push_back(detail::trim(whole.substr(pos, semi - pos)));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }

    struct Atom {
        std::string literal;  // used when var is empty
        char sym = '\0';
        std::string var;
    };
    std::vector<Atom> atoms;
    std::istringstream tpl(segments.front());
    std::string token;
    while (tpl >> token) {
        const auto caret = token.find('^');
        Atom a;
        if (caret == std::string::npos) {
            a.literal = token;
        } else {
            if (caret != 1 || token.size() < 3)
                detail::family_error(token, "expected <symbol>^<variable>");
            a.sym = token[0];
            a.var = token.substr(2);
        }
        for (char c : (caret == std::string::npos ? token : std::string(1, a.sym)))
            if (alphabet.find(c) == std::string::npos)
                detail::family_error(token, std::string("symbol '") + c +
                                                "' not in the machine alphabet '" + alphabet + "'");
        atoms.push_back(std::move(a));
    }

    struct Range {
        std::string var;
        std::size_t lo = 0, hi = 0;
    };
    std::vector<Range> ranges;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        const std::string seg = detail::strip_spaces(segments[i]);
        if (seg.empty()) continue;
        const auto eq = seg.find('=');
        const auto dots = seg.find("..");
        if (eq == std::string::npos || dots == std::string::npos || dots < eq)
            detail::family_error(segments[i], "expected <var>=<lo>..<hi>");
        Range r;
        r.var = seg.substr(0, eq);
        r.lo = detail::parse_count(segments[i], seg.substr(eq + 1, dots - eq - 1));
        r.hi = detail::parse_count(segments[i], seg.substr(dots + 2));
        if (r.hi < r.lo) detail::family_error(segments[i], "range is empty (hi < lo)");
        for (const Range& prev : ranges)
            if (prev.var == r.var) detail::family_error(segments[i], "duplicate range for variable");
        ranges.push_back(std::move(r));
    }

    // Every template variable needs a range, and vice versa.
    for (const Atom& a : atoms) {
        if (a.var.empty()) continue;
        bool found = false;
        for (const Range& r : ranges) found |= r.var == a.var;
        if (!found) detail::family_error(a.var, "no range declared for variable");
    }
    for (const Range& r : ranges) {
        bool used = false;
        for (const Atom& a : atoms) used |= a.var == r.var;
        if (!used) detail::family_error(r.var, "range declared for a variable the template never uses");
    }

    std::size_t total = 1;
    for (const Range& r : ranges) {
        const std::size_t span = r.hi - r.lo + 1;
        if (total > guard / span)
            detail::family_error(whole, "family enumerates more than " + std::to_string(guard) +
                                            " words (guard)");
        total *= span;
    }

    std::vector<std::string> words;
    words.reserve(total);
    std::vector<std::size_t> value(ranges.size());
    for (std::size_t i = 0; i < ranges.size(); ++i) value[i] = ranges[i].lo;
    while (true) {
        std::map<std::string, std::size_t> env;
        for (std::size_t i = 0; i < ranges.size(); ++i) env[ranges[i].var] = value[i];
        std::string w;
        for (const Atom& a : atoms) {
            if (a.var.empty()) w += a.literal;
            else w.append(env[a.var], a.sym);
        }
        words.push_back(std::move(w));
        // Odometer: last-declared range varies fastest.
        std::size_t i = ranges.size();
        while (i > 0) {
            --i;
            if (value[i] < ranges[i].hi) {
                ++value[i];
                break;
            }
            value[i] = ranges[i].lo;
            if (i == 0) return words;
        }
        if (ranges.empty()) return words;
    }
}

struct SweepRow {
    std::string input;
    std::size_t length = 0;
    int decider_bit = 0;
    TimeSchedule schedule;
    double p_accept = 0.0;
    double p_reject = 0.0;
    double p_neutral = 0.0;
    Verdict verdict = Verdict::unknown;
};

inline std::vector<SweepRow> sweep(const NamedConstruction& c, const std::string& family,
                                   const VerdictPolicy& policy,
                                   std::size_t guard = family_guard,
                                   std::optional<std::uint32_t> seed_override = {}) {
    std::vector<SweepRow> rows;
    for (const std::string& w : family_words(family, c.alphabet(), guard, seed_override)) {
        SweepRow row;
        row.input = w;
        row.length = w.size();
        const auto [bit, ts] = schedule(c.scheduler, w);
        row.decider_bit = bit;
        row.schedule = ts;
        const RunOutcome out = run_construction(c, w, ts);
        row.p_accept = out.p_accept;
        row.p_reject = out.p_reject;
        row.p_neutral = out.p_neutral;
        row.verdict = classify(out, policy);
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace detail {

inline std::string fmt_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", p);
    return buf;
}

}  // namespace detail

inline constexpr const char* sweep_csv_header =
    "input,length,decider_bit,schedule,p_accept,p_reject,p_neutral,verdict";

/// Byte-deterministic CSV: fixed 9-decimal probabilities, exact `p/q`
/// schedule entries joined by `;`, `\n` line endings.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = sweep_csv_header;
    out += '\n';
    for (const SweepRow& r : rows) {
        out += r.input;
        out += ',';
        out += std::to_string(r.length);
        out += ',';
        out += std::to_string(r.decider_bit);
        out += ',';
        out += schedule_str(r.schedule);
        out += ',';
        out += detail::fmt_prob(r.p_accept);
        out += ',';
        out += detail::fmt_prob(r.p_reject);
        out += ',';
        out += detail::fmt_prob(r.p_neutral);
        out += ',';
        out += verdict_str(r.verdict);
        out += '\n';
    }
    return out;
}

struct CheckReport {
    bool pass = false;
    double max_gap = 0.0;
    double tolerance = 0.0;
    std::string witness;  // word attaining the max gap
    std::size_t words_checked = 0;

    std::string text() const {
        std::ostringstream out;
        out.precision(3);
        out << (pass ? "PASS" : "FAIL") << ": " << words_checked << " words, max gap "
            << std::scientific << max_gap << " (tolerance " << tolerance << ")";
        if (!witness.empty() && max_gap > 0.0) out << " at \"" << witness << "\"";
        return out.str();
    }
};

/// Simulated acceptance probability vs the construction's closed form.
inline CheckReport oracle_check(const NamedConstruction& c, const std::string& family, double tol,
                                std::size_t guard = family_guard) {
    if (!c.formula)
        throw std::invalid_argument("oracle_check: construction '" + c.name +
                                    "' has no closed-form oracle");
    CheckReport rep;
    rep.tolerance = tol;
    for (const std::string& w : family_words(family, c.alphabet(), guard)) {
        ++rep.words_checked;
        const double sim = run_construction(c, w).p_accept;
        const double oracle = c.formula(input_stats(c.scheduler, w));
        const double gap = std::abs(sim - oracle);
        if (gap > rep.max_gap) {
            rep.max_gap = gap;
            rep.witness = w;
        }
    }
    rep.pass = rep.max_gap <= tol;
    return rep;
}

/// Largest per-channel probability gap between two runnable constructions
/// over a word set.
inline CheckReport equivalence_check(const NamedConstruction& a, const NamedConstruction& b,
                                     const std::vector<std::string>& words, double tol) {
    if (a.alphabet() != b.alphabet())
        throw std::invalid_argument("equivalence_check: alphabet mismatch ('" + a.alphabet() +
                                    "' vs '" + b.alphabet() + "')");
    CheckReport rep;
    rep.tolerance = tol;
    for (const std::string& w : words) {
        ++rep.words_checked;
        const RunOutcome pa = run_construction(a, w);
        const RunOutcome pb = run_construction(b, w);
        double gap = std::abs(pa.p_accept - pb.p_accept);
        gap = std::max(gap, std::abs(pa.p_reject - pb.p_reject));
        gap = std::max(gap, std::abs(pa.p_neutral - pb.p_neutral));
        if (gap > rep.max_gap) {
            rep.max_gap = gap;
            rep.witness = w;
        }
    }
    rep.pass = rep.max_gap <= tol;
    return rep;
}

}  // namespace ctqa
