#pragma once

// The machine zoo: named (machine, scheduler) pairs with closed-form
// acceptance-probability oracles where one is known, plus the combinators
// that build new constructions out of old ones (scaling, unions, and the
// time-independent-to-unitary conversion).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ctqa/machine.hpp"
#include "ctqa/scheduler.hpp"

namespace ctqa {

/// Order-insensitive summary of an input word. Closed-form probability
/// oracles are functions of these statistics, never of the raw word, which
/// keeps them honest about permutation invariance.
struct InputStats {
    std::size_t length = 0;
    std::map<char, std::size_t> counts;
    int decider_bit = 1;
    char last_symbol = '\0';  // '\0' for the empty word

    std::size_t count(char sym) const {
        const auto it = counts.find(sym);
        return it == counts.end() ? 0 : it->second;
    }
};

inline InputStats input_stats(const Scheduler& s, const std::string& x) {
    InputStats st;
    st.decider_bit = s.decider(x);
    st.length = x.size();
    for (char c : x) ++st.counts[c];
    if (!x.empty()) st.last_symbol = x.back();
    return st;
}

using Formula = std::function<double(const InputStats&)>;

struct NamedConstruction {
    std::string name;
    std::variant<Ctqa, KCtqa, Mcqfa> machine;
    Scheduler scheduler;
    Formula formula;                  // empty when no closed form is known
    std::optional<Rational> cutpoint;

    /// Serializer hints: per-symbol operator expressions in the machine-file
    /// grammar. Symbols without a hint fall back to matrix literals.
    std::map<char, std::string> ham_exprs;

    const std::string& alphabet() const {
        return std::visit([](const auto& m) -> const std::string& {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, KCtqa>)
                return m.base.alphabet;
            else
                return m.alphabet;
        }, machine);
    }
};

inline std::vector<std::string> validate(const NamedConstruction& c) {
    return std::visit([](const auto& m) { return validate(m); }, c.machine);
}

/// Run with a schedule the caller already computed (sweeps reuse the one
/// they log). Unitary machines ignore the schedule by definition.
inline RunOutcome run_construction(const NamedConstruction& c, const std::string& x,
                                   const TimeSchedule& ts) {
    if (const auto* u = std::get_if<Mcqfa>(&c.machine)) return run_mcqfa(*u, x);
    if (const auto* k = std::get_if<KCtqa>(&c.machine)) return run_kctqa(*k, ts, x);
    return run_ctqa(std::get<Ctqa>(c.machine), ts, x);
}

/// Run the construction end to end: decider bit, schedule, evolution, readout.
inline RunOutcome run_construction(const NamedConstruction& c, const std::string& x) {
    return run_construction(c, x, schedule(c.scheduler, x).second);
}

namespace detail {

inline double pi() { return std::acos(-1.0); }

/// cos²(π·(n−m) / (2·(n+m))), the balance profile shared by several zoo
/// entries; 1 on the empty word by convention (no evolution happens).
inline double balance_profile(double n, double m) {
    if (n + m == 0.0) return 1.0;
    const double c = std::cos(pi() * (n - m) / (2.0 * (n + m)));
    return c * c;
}

/// Two-state skeleton shared by the decider-driven constructions.
inline Ctqa two_state_rotor(const std::string& alphabet) {
    Ctqa m;
    m.states = {"q0", "q1"};
    m.alphabet = alphabet;
    for (char sym : alphabet) m.hamiltonians[sym] = not_pi_2();
    m.start = "q0";
    m.accept = {"q0"};
    m.reject = {"q1"};
    return m;
}

inline void throw_if_invalid(const NamedConstruction& c) {
    const auto violations = validate(c);
    if (violations.empty()) return;
    std::string msg = "construction '" + c.name + "' failed validation:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::logic_error(msg);
}

}  // namespace detail

/// Two-state machine steered entirely by an injected predicate: duration 4
/// (a full period, so the state is left alone) on bit 1, duration 1 (a
/// quarter turn into the rejecting state) on bit 0. Acceptance is then the
/// predicate's own verdict with probability exactly 1. The empty word gets
/// an empty schedule, so it is accepted regardless of the predicate.
inline NamedConstruction build_halting_demo(const PredicateDecider& oracle) {
    NamedConstruction c;
    c.name = "halting-demo";
    const std::string alphabet = oracle.alphabet.empty() ? "01" : oracle.alphabet;
    c.machine = detail::two_state_rotor(alphabet);
    c.scheduler.decider = Decider(oracle);
    c.scheduler.writer = Writer{pulse_family(Rational(4)), pulse_family(Rational(1)), {}};
    c.formula = [](const InputStats& st) {
        return st.length == 0 ? 1.0 : static_cast<double>(st.decider_bit);
    };
    for (char sym : alphabet) c.ham_exprs[sym] = "NOT_PI_2";
    detail::throw_if_invalid(c);
    return c;
}

/// Same skeleton driven by an arbitrary decider; recognizes exactly the
/// decider's language with zero error (empty word aside, as above).
inline NamedConstruction build_decider_embedding(const Decider& d) {
    NamedConstruction c;
    c.name = "decider-embed";
    const std::string alphabet = d.alphabet().empty() ? "01" : d.alphabet();
    c.machine = detail::two_state_rotor(alphabet);
    c.scheduler.decider = d;
    c.scheduler.writer = Writer{pulse_family(Rational(4)), pulse_family(Rational(1)), {}};
    c.formula = [](const InputStats& st) {
        return st.length == 0 ? 1.0 : static_cast<double>(st.decider_bit);
    };
    for (char sym : alphabet) c.ham_exprs[sym] = "NOT_PI_2";
    detail::throw_if_invalid(c);
    return c;
}

/// The balance machine gated by an a*b* decider: H_a drives q0 toward q1,
/// H_b drives back, the uniform writer spreads total duration 1 across the
/// word. Words of shape aⁿbᵐ land at cos²(π(n−m)/(2(n+m))); everything else
/// takes the pulse path straight into the rejecting state.
inline NamedConstruction build_lab(const Rational& lambda) {
    if (lambda.is_zero() || Rational(1) < lambda)
        throw std::invalid_argument("build_lab: cutpoint must lie in (0, 1]");
    NamedConstruction c;
    c.name = "lab";
    Ctqa m = detail::two_state_rotor("ab");
    m.hamiltonians['b'] = not_pi_2().scaled(-1.0);
    c.machine = std::move(m);
    c.scheduler.decider = Decider(regex_to_dfa("a*b*", "ab"));
    c.scheduler.writer = Writer{uniform_family(), pulse_family(Rational(1)), {}};
    c.formula = [](const InputStats& st) {
        if (st.decider_bit == 0) return 0.0;
        return detail::balance_profile(static_cast<double>(st.count('a')),
                                       static_cast<double>(st.count('b')));
    };
    c.cutpoint = lambda;
    c.ham_exprs['a'] = "NOT_PI_2";
    c.ham_exprs['b'] = "neg(NOT_PI_2)";
    detail::throw_if_invalid(c);
    return c;
}

/// Detector for "ends in 1": H_0 is flat, H_1 rotates, and the writer puts
/// its single unit pulse on the last position. Only a final 1 moves the
/// state, so acceptance is {0,1}-valued.
inline NamedConstruction build_last_one() {
    NamedConstruction c;
    c.name = "last-one";
    Ctqa m;
    m.states = {"q0", "q1"};
    m.alphabet = "01";
    m.hamiltonians['0'] = ComplexMatrix::zero(2);
    m.hamiltonians['1'] = not_pi_2();
    m.start = "q0";
    m.accept = {"q1"};
    m.reject = {"q0"};
    c.machine = std::move(m);
    c.scheduler.decider = Decider(ConstDecider{1, "01"});
    c.scheduler.writer = Writer{last_pulse_family(), zero_family(), {}};
    c.formula = [](const InputStats& st) { return st.last_symbol == '1' ? 1.0 : 0.0; };
    c.cutpoint = Rational(1, 2);
    c.ham_exprs['0'] = "ZERO(2)";
    c.ham_exprs['1'] = "NOT_PI_2";
    detail::throw_if_invalid(c);
    return c;
}

/// The balance machine with the trivial decider: every word takes the
/// uniform path, so acceptance depends only on the two symbol counts, not
/// on their order.
inline NamedConstruction build_balanced(const Rational& lambda) {
    if (lambda.is_zero() || Rational(1) < lambda)
        throw std::invalid_argument("build_balanced: cutpoint must lie in (0, 1]");
    NamedConstruction c = build_lab(lambda);
    c.name = "balanced";
    c.scheduler.decider = Decider(ConstDecider{1, "ab"});
    c.formula = [](const InputStats& st) {
        return detail::balance_profile(static_cast<double>(st.count('a')),
                                       static_cast<double>(st.count('b')));
    };
    return c;
}

/// Two commuting copies of the balance mechanism on a 4-state space: a/b
/// rotate the low factor, c/d the high factor neg-paired the same way. The
/// decider gates on a*b*(c|d)* and the uniform writer shares duration 1
/// across all of x, giving the product of two balance profiles.
inline NamedConstruction build_concat_example() {
    NamedConstruction c;
    c.name = "concat-abcd";
    Ctqa m;
    m.states = {"q00", "q01", "q10", "q11"};
    m.alphabet = "abcd";
    const ComplexMatrix low = kron(ComplexMatrix::identity(2), not_pi_2());
    const ComplexMatrix high = kron(not_pi_2(), ComplexMatrix::identity(2));
    m.hamiltonians['a'] = low;
    m.hamiltonians['b'] = low.scaled(-1.0);
    m.hamiltonians['c'] = high;
    m.hamiltonians['d'] = high.scaled(-1.0);
    m.start = "q00";
    m.accept = {"q00"};
    m.reject = {"q01", "q10", "q11"};
    c.machine = std::move(m);
    c.scheduler.decider = Decider(regex_to_dfa("a*b*(c|d)*", "abcd"));
    c.scheduler.writer = Writer{uniform_family(), pulse_family(Rational(1)), {}};
    c.formula = [](const InputStats& st) {
        if (st.decider_bit == 0) return 0.0;
        const double n = static_cast<double>(st.count('a'));
        const double mm = static_cast<double>(st.count('b'));
        const double k = static_cast<double>(st.count('c'));
        const double h = static_cast<double>(st.count('d'));
        const double total = n + mm + k + h;
        if (total == 0.0) return 1.0;
        const double lo = std::cos(detail::pi() * (mm - n) / (2.0 * total));
        const double hi = std::cos(detail::pi() * (h - k) / (2.0 * total));
        return lo * lo * hi * hi;
    };
    c.ham_exprs['a'] = "kron(I(2), NOT_PI_2)";
    c.ham_exprs['b'] = "neg(kron(I(2), NOT_PI_2))";
    c.ham_exprs['c'] = "kron(NOT_PI_2, I(2))";
    c.ham_exprs['d'] = "neg(kron(NOT_PI_2, I(2)))";
    detail::throw_if_invalid(c);
    return c;
}

/// Divide every Hamiltonian by k and multiply every emitted duration by k.
/// The product H·t per step is unchanged, so the final state is preserved;
/// schedules stay exact rationals because the factor folds into the writer
/// family parameters.
inline NamedConstruction scale_construction(const NamedConstruction& c, const Rational& k) {
    if (k.is_zero()) throw std::invalid_argument("scale_construction: factor must be positive");
    NamedConstruction out = c;
    out.name = c.name + "-scaled";
    const double inv = 1.0 / k.to_double();
    if (auto* m = std::get_if<Ctqa>(&out.machine)) {
        for (auto& [sym, h] : m->hamiltonians) h = h.scaled(inv);
    } else if (auto* km = std::get_if<KCtqa>(&out.machine)) {
        for (auto& [sym, h] : km->base.hamiltonians) h = h.scaled(inv);
    } else {
        throw std::invalid_argument("scale_construction: unitary machines have no durations");
    }
    out.scheduler.writer = scale_writer(c.scheduler.writer, k);
    const Rational inv_k = k.inverse();
    for (auto& [sym, expr] : out.ham_exprs)
        expr = "scale(" + expr + ", " + inv_k.str() + ")";
    return out;
}

/// Freeze a time-independent construction: each symbol's unitary is the
/// Hamiltonian evolved for the constant duration c.
inline Mcqfa time_independent_to_mcqfa(const Ctqa& m, const Rational& c) {
    Mcqfa u;
    u.states = m.states;
    u.alphabet = m.alphabet;
    u.start = m.start;
    u.accept = m.accept;
    u.reject = m.reject;
    for (const auto& [sym, h] : m.hamiltonians)
        u.unitaries[sym] = mat_exp_hermitian(h, c.to_double());
    return u;
}

/// NamedConstruction wrapper for the conversion; the scheduler is a stub
/// (unitary machines consume no durations).
inline NamedConstruction to_mcqfa_construction(const NamedConstruction& c, const Rational& dur) {
    const auto* m = std::get_if<Ctqa>(&c.machine);
    if (m == nullptr)
        throw std::invalid_argument("to_mcqfa_construction: expected a single-sweep machine");
    NamedConstruction out;
    out.name = c.name + "-mcqfa";
    out.machine = time_independent_to_mcqfa(*m, dur);
    out.scheduler.decider = Decider(ConstDecider{1, m->alphabet});
    out.scheduler.writer = Writer{zero_family(), zero_family(), {}};
    detail::throw_if_invalid(out);
    return out;
}

/// Enumerate words (shortest first) where the two deciders disagree.
inline std::vector<std::string> check_decider_agreement(const Decider& d1, const Decider& d2,
                                                        const std::string& alphabet,
                                                        std::size_t max_len = 8) {
    std::vector<std::string> disagreements;
    std::vector<std::string> layer{""};
    for (std::size_t len = 0; len <= max_len; ++len) {
        for (const std::string& w : layer)
            if (d1(w) != d2(w)) disagreements.push_back(w);
        if (len == max_len) break;
        std::vector<std::string> next;
        next.reserve(layer.size() * alphabet.size());
        for (const std::string& w : layer)
            for (char sym : alphabet) next.push_back(w + sym);
        layer = std::move(next);
    }
    return disagreements;
}

namespace detail {

inline const Ctqa& component_machine(const NamedConstruction& c, const char* who) {
    const auto* m = std::get_if<Ctqa>(&c.machine);
    if (m == nullptr)
        throw std::invalid_argument(std::string(who) + ": components must be single-sweep machines");
    return *m;
}

/// max{λ₁λ₂, λ₁(1−λ₂), (1−λ₁)λ₂}, the union cutpoint, exact.
inline std::optional<Rational> union_cutpoint(const std::optional<Rational>& l1,
                                              const std::optional<Rational>& l2) {
    if (!l1 || !l2) return std::nullopt;
    const Rational one(1);
    Rational best = *l1 * *l2;
    best = std::max(best, *l1 * (one - *l2));
    best = std::max(best, (one - *l1) * *l2);
    return best;
}

/// 1 − (1−p₁)(1−p₂) with component formulas fed the union's own statistics.
/// Valid where the component deciders agree (the construction precondition);
/// on decider-0 words both components take their rejecting pulse path.
inline Formula union_formula(const NamedConstruction& c1, const NamedConstruction& c2) {
    if (!c1.formula || !c2.formula) return {};
    return [f1 = c1.formula, f2 = c2.formula](const InputStats& st) {
        if (st.length > 0 && st.decider_bit == 0) return 0.0;
        const double p1 = f1(st);
        const double p2 = f2(st);
        return 1.0 - (1.0 - p1) * (1.0 - p2);
    };
}

}  // namespace detail

/// Union by time-sharing: a two-sweep machine on Q₁×Q₂×C whose Hamiltonians
/// act on component 1 while the counter reads 0 and on component 2 while it
/// reads 1. The scheduler replays each component's schedule in its own sweep.
/// Acceptance ("either component accepts") is read at the final counter
/// value; the two subspaces never entangle, so probabilities multiply.
///
/// Decider agreement is a semantic precondition that is generally
/// undecidable for opaque predicates, so it is checked only on the witness
/// words supplied here; `check_decider_agreement` does a systematic sweep.
inline NamedConstruction union_rotating(const NamedConstruction& c1, const NamedConstruction& c2,
                                        const std::vector<std::string>& agreement_witnesses = {}) {
    const Ctqa& m1 = detail::component_machine(c1, "union_rotating");
    const Ctqa& m2 = detail::component_machine(c2, "union_rotating");
    if (m1.alphabet != m2.alphabet)
        throw std::invalid_argument("union_rotating: component alphabets differ ('" + m1.alphabet +
                                    "' vs '" + m2.alphabet + "')");
    std::string disagree;
    for (const std::string& w : agreement_witnesses)
        if (c1.scheduler.decider(w) != c2.scheduler.decider(w)) disagree += " \"" + w + "\"";
    if (!disagree.empty())
        throw std::invalid_argument("union_rotating: deciders disagree on:" + disagree);

    const std::size_t d1 = m1.dim();
    const std::size_t d2 = m2.dim();
    KCtqa k;
    k.sweeps = 2;
    k.counter_width = 1;
    k.base.alphabet = m1.alphabet;

    // Joint index ((i1·d2)+i2)·2 + counter: the counter is the fastest
    // (least significant) factor, matching the evolution loop's layout.
    const auto a1 = detail::state_indices(m1.states, m1.accept);
    const auto a2 = detail::state_indices(m2.states, m2.accept);
    const auto r1 = detail::state_indices(m1.states, m1.reject);
    const auto r2 = detail::state_indices(m2.states, m2.reject);
    for (std::size_t i1 = 0; i1 < d1; ++i1)
        for (std::size_t i2 = 0; i2 < d2; ++i2)
            for (int c = 0; c < 2; ++c) {
                const std::string name =
                    m1.states[i1] + "_" + m2.states[i2] + "_c" + static_cast<char>('0' + c);
                k.base.states.push_back(name);
                // Final counter value: 2 sweeps mod range 2 = 0.
                if (c == 0) {
                    if (a1.count(i1) || a2.count(i2)) k.base.accept.insert(name);
                    else if (r1.count(i1) && r2.count(i2)) k.base.reject.insert(name);
                }
            }
    k.base.start = m1.start + "_" + m2.start + "_c0";

    const ComplexMatrix c_is_0 = projector(2, {0});
    const ComplexMatrix c_is_1 = projector(2, {1});
    for (char sym : m1.alphabet) {
        const ComplexMatrix drive1 = kron(kron(m1.hamiltonians.at(sym),
                                               ComplexMatrix::identity(d2)), c_is_0);
        const ComplexMatrix drive2 = kron(kron(ComplexMatrix::identity(d1),
                                               m2.hamiltonians.at(sym)), c_is_1);
        k.base.hamiltonians[sym] = drive1 + drive2;
    }

    NamedConstruction out;
    out.name = "union-rot";
    out.machine = std::move(k);
    out.scheduler.decider = c1.scheduler.decider;
    Writer rot;
    rot.sweeps = {c1.scheduler.writer, c2.scheduler.writer};
    out.scheduler.writer = std::move(rot);
    out.formula = detail::union_formula(c1, c2);
    out.cutpoint = detail::union_cutpoint(c1.cutpoint, c2.cutpoint);
    detail::throw_if_invalid(out);
    return out;
}

/// Union in a single pass: both components run simultaneously on Q₁×Q₂
/// under H_σ = H¹_σ⊗I + I⊗H²_σ, whose exponential factors as V⊗W (the two
/// terms commute). Requires the components to want the same schedule, hence
/// structural equality of schedulers.
inline NamedConstruction union_shared_scheduler(const NamedConstruction& c1,
                                                const NamedConstruction& c2) {
    const Ctqa& m1 = detail::component_machine(c1, "union_shared_scheduler");
    const Ctqa& m2 = detail::component_machine(c2, "union_shared_scheduler");
    if (m1.alphabet != m2.alphabet)
        throw std::invalid_argument("union_shared_scheduler: component alphabets differ ('" +
                                    m1.alphabet + "' vs '" + m2.alphabet + "')");
    if (!(c1.scheduler == c2.scheduler))
        throw std::invalid_argument(
            "union_shared_scheduler: components must share one scheduler (structural equality)");

    const std::size_t d1 = m1.dim();
    const std::size_t d2 = m2.dim();
    Ctqa m;
    m.alphabet = m1.alphabet;
    const auto a1 = detail::state_indices(m1.states, m1.accept);
    const auto a2 = detail::state_indices(m2.states, m2.accept);
    const auto r1 = detail::state_indices(m1.states, m1.reject);
    const auto r2 = detail::state_indices(m2.states, m2.reject);
    for (std::size_t i1 = 0; i1 < d1; ++i1)
        for (std::size_t i2 = 0; i2 < d2; ++i2) {
            const std::string name = m1.states[i1] + "_" + m2.states[i2];
            m.states.push_back(name);
            if (a1.count(i1) || a2.count(i2)) m.accept.insert(name);
            else if (r1.count(i1) && r2.count(i2)) m.reject.insert(name);
        }
    m.start = m1.start + "_" + m2.start;
    for (char sym : m.alphabet)
        m.hamiltonians[sym] = kron(m1.hamiltonians.at(sym), ComplexMatrix::identity(d2)) +
                              kron(ComplexMatrix::identity(d1), m2.hamiltonians.at(sym));

    NamedConstruction out;
    out.name = "union-shared";
    out.machine = std::move(m);
    out.scheduler = c1.scheduler;
    out.formula = detail::union_formula(c1, c2);
    out.cutpoint = detail::union_cutpoint(c1.cutpoint, c2.cutpoint);
    detail::throw_if_invalid(out);
    return out;
}

/// Direct-sum reading of the shared-scheduler union, kept for comparison
/// experiments only. e^{−i(H₁⊕H₂)t} = e^{−iH₁t} ⊕ e^{−iH₂t} never moves
/// amplitude between the blocks, so a run started in block 1 reproduces
/// component 1's probability exactly and ignores component 2. It does NOT
/// satisfy the union probability 1 − (1−p₁)(1−p₂); use
/// union_shared_scheduler for that.
inline NamedConstruction union_shared_direct_sum_experimental(const NamedConstruction& c1,
                                                              const NamedConstruction& c2) {
    const Ctqa& m1 = detail::component_machine(c1, "union_shared_direct_sum_experimental");
    const Ctqa& m2 = detail::component_machine(c2, "union_shared_direct_sum_experimental");
    if (m1.alphabet != m2.alphabet)
        throw std::invalid_argument(
            "union_shared_direct_sum_experimental: component alphabets differ");
    if (!(c1.scheduler == c2.scheduler))
        throw std::invalid_argument(
            "union_shared_direct_sum_experimental: components must share one scheduler");

    Ctqa m;
    m.alphabet = m1.alphabet;
    for (const auto& q : m1.states) m.states.push_back("L_" + q);
    for (const auto& q : m2.states) m.states.push_back("R_" + q);
    m.start = "L_" + m1.start;
    for (const auto& q : m1.accept) m.accept.insert("L_" + q);
    for (const auto& q : m2.accept) m.accept.insert("R_" + q);
    for (const auto& q : m1.reject) m.reject.insert("L_" + q);
    for (const auto& q : m2.reject) m.reject.insert("R_" + q);
    for (char sym : m.alphabet)
        m.hamiltonians[sym] = direct_sum(m1.hamiltonians.at(sym), m2.hamiltonians.at(sym));

    NamedConstruction out;
    out.name = "union-shared-dsum-experimental";
    out.machine = std::move(m);
    out.scheduler = c1.scheduler;
    for (char sym : m1.alphabet) {
        const auto e1 = c1.ham_exprs.find(sym);
        const auto e2 = c2.ham_exprs.find(sym);
        if (e1 != c1.ham_exprs.end() && e2 != c2.ham_exprs.end())
            out.ham_exprs[sym] = "dsum(" + e1->second + ", " + e2->second + ")";
    }
    detail::throw_if_invalid(out);
    return out;
}

/// Structural comparison for round-trip tests: everything except the
/// formula (opaque callable) and serializer hints, with matrices compared
/// entrywise at `tol`.
inline bool structurally_equal(const NamedConstruction& a, const NamedConstruction& b,
                               double tol = structural_tol) {
    if (a.machine.index() != b.machine.index()) return false;
    if (!(a.scheduler == b.scheduler)) return false;
    if (a.cutpoint != b.cutpoint) return false;

    const auto matrices_equal = [tol](const auto& ma, const auto& mb) {
        if (ma.size() != mb.size()) return false;
        for (const auto& [sym, mat] : ma) {
            const auto it = mb.find(sym);
            if (it == mb.end() || mat.rows() != it->second.rows()) return false;
            if (max_abs_diff(mat, it->second) > tol) return false;
        }
        return true;
    };
    const auto base_equal = [&](const auto& x, const auto& y) {
        return x.states == y.states && x.alphabet == y.alphabet && x.start == y.start &&
               x.accept == y.accept && x.reject == y.reject;
    };
    if (const auto* ka = std::get_if<KCtqa>(&a.machine)) {
        const auto& kb = std::get<KCtqa>(b.machine);
        return ka->sweeps == kb.sweeps && ka->counter_width == kb.counter_width &&
               base_equal(ka->base, kb.base) &&
               matrices_equal(ka->base.hamiltonians, kb.base.hamiltonians);
    }
    if (const auto* ua = std::get_if<Mcqfa>(&a.machine)) {
        const auto& ub = std::get<Mcqfa>(b.machine);
        return base_equal(*ua, ub) && matrices_equal(ua->unitaries, ub.unitaries);
    }
    const auto& ca = std::get<Ctqa>(a.machine);
    const auto& cb = std::get<Ctqa>(b.machine);
    return base_equal(ca, cb) && matrices_equal(ca.hamiltonians, cb.hamiltonians);
}

inline const std::vector<std::string>& zoo_names() {
    static const std::vector<std::string> names = {
        "halting-demo", "decider-embed", "lab",        "last-one",
        "balanced",     "concat-abcd",   "union-rot",  "union-shared",
    };
    return names;
}

/// Materialize a zoo entry with its default parameters.
inline NamedConstruction build_zoo(const std::string& name) {
    if (name == "halting-demo")
        return build_halting_demo(builtin_predicate("even-length", "01"));
    if (name == "decider-embed") return build_decider_embedding(Decider(regex_to_dfa("a*b*", "ab")));
    if (name == "lab") return build_lab(Rational(1, 2));
    if (name == "last-one") return build_last_one();
    if (name == "balanced") return build_balanced(Rational(1, 2));
    if (name == "concat-abcd") return build_concat_example();
    if (name == "union-rot")
        return union_rotating(build_lab(Rational(1, 2)), build_balanced(Rational(1, 2)));
    if (name == "union-shared")
        return union_shared_scheduler(build_balanced(Rational(1, 2)), build_balanced(Rational(1, 2)));
    std::string known;
    for (const auto& n : zoo_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown zoo entry '" + name + "' (known: " + known + ")");
}

/// Grid study of the balance machine's cutpoint region. The measured
/// region {(n,m) : p ≥ λ} coincides with the ratio inequality
/// |n−m| ≤ r·(n+m) for r = (2/π)·arccos(√λ), because p(aⁿbᵐ) =
/// cos²(π(n−m)/(2(n+m))) is monotone in |n−m|/(n+m). The report also
/// evaluates the simpler linear rule n ≥ 2m against the same grid; at
/// λ = 0.6 that rule is wrong in both directions, and `text()` shows
/// counterexamples rather than reproducing it.
struct RegionReport {
    double lambda = 0.6;
    int grid_max = 25;
    double ratio = 0.0;                                  // (2/π)·arccos(√λ)
    std::vector<std::pair<int, int>> cutpoint_region;    // simulated p ≥ λ
    bool ratio_rule_matches = false;                     // region == ratio inequality
    std::vector<std::pair<int, int>> only_in_linear;     // n ≥ 2m but p < λ
    std::vector<std::pair<int, int>> only_in_cutpoint;   // p ≥ λ but n < 2m
    double doubled_probability = 0.0;                    // p at (n,m) = (2,1)

    std::string text() const {
        std::ostringstream out;
        out.precision(10);
        out << "cutpoint region of the balance machine, lambda = " << lambda << ", grid 0.."
            << grid_max << "\n";
        out << "  measured region {(n,m) : p >= lambda} has " << cutpoint_region.size()
            << " pairs\n";
        out << "  ratio rule |n-m| <= r*(n+m), r = (2/pi)*arccos(sqrt(lambda)) = " << ratio
            << ": " << (ratio_rule_matches ? "matches the measured region exactly" : "MISMATCH")
            << "\n";
        out << "  linear rule n >= 2m: " << only_in_linear.size()
            << " pairs satisfy it but miss the cutpoint, " << only_in_cutpoint.size()
            << " pairs clear the cutpoint without it\n";
        if (!only_in_linear.empty())
            out << "    e.g. (n,m) = (" << only_in_linear.front().first << ","
                << only_in_linear.front().second << ") has n >= 2m yet p < lambda\n";
        if (!only_in_cutpoint.empty())
            out << "    e.g. (n,m) = (" << only_in_cutpoint.front().first << ","
                << only_in_cutpoint.front().second << ") has p >= lambda yet n < 2m\n";
        out << "  p(a^(2m) b^m) = " << doubled_probability
            << " for every m >= 1 (the doubling family sits strictly above 0.6)\n";
        return out.str();
    }
};

inline RegionReport lab_region_report(double lambda = 0.6, int grid_max = 25) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("lab_region_report: lambda must lie in (0, 1]");
    RegionReport rep;
    rep.lambda = lambda;
    rep.grid_max = grid_max;
    rep.ratio = (2.0 / detail::pi()) * std::acos(std::sqrt(lambda));
    const NamedConstruction lab = build_lab(Rational(1, 2));
    bool ratio_ok = true;
    for (int n = 0; n <= grid_max; ++n)
        for (int m = 0; m <= grid_max; ++m) {
            const std::string word = std::string(n, 'a') + std::string(m, 'b');
            const double p = run_construction(lab, word).p_accept;
            const bool in_cut = p >= lambda;
            const bool in_ratio =
                n + m == 0 || std::abs(n - m) <= rep.ratio * (n + m) + 1e-12;
            const bool in_linear = n >= 2 * m;
            if (in_cut) rep.cutpoint_region.emplace_back(n, m);
            if (in_cut != in_ratio) ratio_ok = false;
            if (in_linear && !in_cut) rep.only_in_linear.emplace_back(n, m);
            if (in_cut && !in_linear) rep.only_in_cutpoint.emplace_back(n, m);
        }
    rep.ratio_rule_matches = ratio_ok;
    rep.doubled_probability = run_construction(lab, "aab").p_accept;
    return rep;
}

}  // namespace ctqa
