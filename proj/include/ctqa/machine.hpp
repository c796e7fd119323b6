#pragma once

// Machine descriptions and their evolution + measurement semantics. Three
// flavors: the time-controlled automaton (per-symbol Hamiltonians driven by an
// external schedule), its time-independent unitary counterpart, and the
// k-sweep rotating variant whose state space carries a classical counter
// register. The declared state order fixes the basis, so runs are bit-stable
// across serialization.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctqa/linalg.hpp"
#include "ctqa/scheduler.hpp"

namespace ctqa {

struct Ctqa {
    std::vector<std::string> states;
    std::string alphabet;
    std::map<char, ComplexMatrix> hamiltonians;
    std::string start;
    std::set<std::string> accept;
    std::set<std::string> reject;

    std::size_t dim() const { return states.size(); }

    std::size_t state_index(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw std::invalid_argument("machine: unknown state \"" + name + "\"");
    }
};

struct Mcqfa {
    std::vector<std::string> states;
    std::string alphabet;
    std::map<char, ComplexMatrix> unitaries;
    std::string start;
    std::set<std::string> accept;
    std::set<std::string> reject;

    std::size_t dim() const { return states.size(); }

    std::size_t state_index(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw std::invalid_argument("machine: unknown state \"" + name + "\"");
    }
};

/// k-sweep machine. The base automaton lives on the joint space Q×C with the
/// counter as the least-significant index factor: joint index = q·2^w + c.
/// Endmarkers are implicit; they never appear in the alphabet.
struct KCtqa {
    Ctqa base;
    std::size_t sweeps = 2;
    std::size_t counter_width = 1;

    std::size_t counter_range() const { return std::size_t{1} << counter_width; }
};

struct RunOutcome {
    double p_accept = 0.0;
    double p_reject = 0.0;
    double p_neutral = 0.0;
    StateVector final_state;
};

namespace detail {

/// Clamp to [0,1]; values within structural tolerance of the lattice {0,1}
/// report as exact so that zero-error policies remain decidable on floating
/// simulations. Policy comparisons downstream stay exact-rational.
inline double snap_probability(double p) {
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    if (p <= structural_tol) return 0.0;
    if (p >= 1.0 - structural_tol) return 1.0;
    return p;
}

inline std::set<std::size_t> state_indices(const std::vector<std::string>& states,
                                           const std::set<std::string>& names) {
    std::set<std::size_t> idx;
    for (const std::string& n : names)
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == n) idx.insert(i);
    return idx;
}

inline RunOutcome readout(const std::vector<std::string>& states,
                          const std::set<std::string>& accept,
                          const std::set<std::string>& reject, StateVector psi) {
    double pa = 0.0, pr = 0.0;
    for (std::size_t i : state_indices(states, accept)) pa += std::norm(psi.amp[i]);
    for (std::size_t i : state_indices(states, reject)) pr += std::norm(psi.amp[i]);
    RunOutcome out;
    out.p_accept = snap_probability(pa);
    out.p_reject = snap_probability(pr);
    out.p_neutral = snap_probability(1.0 - pa - pr);
    out.final_state = std::move(psi);
    return out;
}

}  // namespace detail

inline StateVector step(const Ctqa& m, const StateVector& v, char symbol, const Rational& t) {
    const auto it = m.hamiltonians.find(symbol);
    if (it == m.hamiltonians.end())
        throw std::invalid_argument(std::string("step: unknown symbol '") + symbol + "'");
    return apply(mat_exp_hermitian(it->second, t.to_double()), v);
}

inline RunOutcome run_ctqa(const Ctqa& m, const TimeSchedule& schedule, const std::string& x) {
    if (schedule.size() != x.size())
        throw std::invalid_argument("run: schedule length ≠ input length (" +
                                    std::to_string(schedule.size()) + " vs " +
                                    std::to_string(x.size()) + ")");
    // One eigendecomposition per symbol; per-step unitaries then come from the
    // spectral form, identical to what step() computes.
    std::map<char, EighResult> spectra;
    StateVector v = StateVector::basis(m.dim(), m.state_index(m.start));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const char symbol = x[i];
        auto sp = spectra.find(symbol);
        if (sp == spectra.end()) {
            const auto h = m.hamiltonians.find(symbol);
            if (h == m.hamiltonians.end())
                throw std::invalid_argument(std::string("run: unknown symbol '") + symbol + "'");
            sp = spectra.emplace(symbol, eigh(h->second)).first;
        }
        v = apply(mat_exp_from_eigh(sp->second, schedule.entries[i].to_double()), v);
    }
    return detail::readout(m.states, m.accept, m.reject, std::move(v));
}

inline RunOutcome run_mcqfa(const Mcqfa& m, const std::string& x) {
    StateVector v = StateVector::basis(m.dim(), m.state_index(m.start));
    for (char symbol : x) {
        const auto it = m.unitaries.find(symbol);
        if (it == m.unitaries.end())
            throw std::invalid_argument(std::string("run: unknown symbol '") + symbol + "'");
        v = apply(it->second, v);
    }
    return detail::readout(m.states, m.accept, m.reject, std::move(v));
}

/// k-sweep run. The schedule must have the rotated shape k·|x| + 2k with zero
/// durations at every endmarker slot. The left endmarker acts as the
/// identity; the right endmarker increments the classical counter factor
/// (deterministically, modulo 2^counter_width). The final readout is
/// restricted to the counter value k mod 2^counter_width.
inline RunOutcome run_kctqa(const KCtqa& m, const TimeSchedule& schedule, const std::string& x) {
    const std::size_t k = m.sweeps;
    const std::size_t width = m.counter_range();
    if (m.base.dim() % width != 0)
        throw std::invalid_argument("run: joint dimension not divisible by counter range");
    if (schedule.size() != k * x.size() + 2 * k)
        throw std::invalid_argument("run: schedule length ≠ k·|x| + 2k (" +
                                    std::to_string(schedule.size()) + " vs " +
                                    std::to_string(k * x.size() + 2 * k) + ")");

    std::map<char, EighResult> spectra;
    StateVector v = StateVector::basis(m.base.dim(), m.base.state_index(m.base.start));
    std::size_t pos = 0;
    const auto endmarker_slot = [&]() {
        if (!schedule.entries[pos].is_zero())
            throw std::invalid_argument("run: nonzero duration at an endmarker slot (index " +
                                        std::to_string(pos) + ")");
        ++pos;
    };
    for (std::size_t sweep = 0; sweep < k; ++sweep) {
        endmarker_slot();  // ⊢: identity
        for (char symbol : x) {
            auto sp = spectra.find(symbol);
            if (sp == spectra.end()) {
                const auto h = m.base.hamiltonians.find(symbol);
                if (h == m.base.hamiltonians.end())
                    throw std::invalid_argument(std::string("run: unknown symbol '") + symbol + "'");
                sp = spectra.emplace(symbol, eigh(h->second)).first;
            }
            v = apply(mat_exp_from_eigh(sp->second, schedule.entries[pos].to_double()), v);
            ++pos;
        }
        endmarker_slot();  // ⊣: counter increment
        StateVector shifted;
        shifted.amp.assign(v.amp.size(), Complex(0.0, 0.0));
        for (std::size_t i = 0; i < v.amp.size(); ++i) {
            const std::size_t q = i / width, c = i % width;
            shifted.amp[q * width + (c + 1) % width] = v.amp[i];
        }
        v = std::move(shifted);
    }

    // Readout over the accept/reject sets intersected with the final counter
    // slice; with the deterministic counter all weight lives there anyway.
    const std::size_t c_final = k % width;
    double pa = 0.0, pr = 0.0;
    for (std::size_t i : detail::state_indices(m.base.states, m.base.accept))
        if (i % width == c_final) pa += std::norm(v.amp[i]);
    for (std::size_t i : detail::state_indices(m.base.states, m.base.reject))
        if (i % width == c_final) pr += std::norm(v.amp[i]);
    RunOutcome out;
    out.p_accept = detail::snap_probability(pa);
    out.p_reject = detail::snap_probability(pr);
    out.p_neutral = detail::snap_probability(1.0 - pa - pr);
    out.final_state = std::move(v);
    return out;
}

// ---------------------------------------------------------------------------
// Validation: violations are data, not errors.

namespace detail {

template <typename M>
void validate_shape(const M& m, const std::map<char, ComplexMatrix>& per_symbol,
                    const char* matrix_kind, std::vector<std::string>& out) {
    if (m.states.empty()) out.push_back("state list is empty");
    for (std::size_t i = 0; i < m.states.size(); ++i)
        for (std::size_t j = i + 1; j < m.states.size(); ++j)
            if (m.states[i] == m.states[j])
                out.push_back("duplicate state name \"" + m.states[i] + "\"");
    for (std::size_t i = 0; i < m.alphabet.size(); ++i)
        for (std::size_t j = i + 1; j < m.alphabet.size(); ++j)
            if (m.alphabet[i] == m.alphabet[j])
                out.push_back(std::string("duplicate alphabet symbol '") + m.alphabet[i] + "'");

    const auto known = [&](const std::string& name) {
        for (const std::string& s : m.states)
            if (s == name) return true;
        return false;
    };
    if (!known(m.start)) out.push_back("start state \"" + m.start + "\" not in state list");
    for (const std::string& a : m.accept)
        if (!known(a)) out.push_back("accept state \"" + a + "\" not in state list");
    for (const std::string& r : m.reject)
        if (!known(r)) out.push_back("reject state \"" + r + "\" not in state list");
    for (const std::string& a : m.accept)
        if (m.reject.count(a)) out.push_back("accept/reject overlap: " + a);

    for (char c : m.alphabet)
        if (!per_symbol.count(c))
            out.push_back(std::string("missing ") + matrix_kind + " for symbol '" + c + "'");
    for (const auto& [c, mat] : per_symbol) {
        if (m.alphabet.find(c) == std::string::npos)
            out.push_back(std::string(matrix_kind) + " for undeclared symbol '" + c + "'");
        if (mat.rows() != m.states.size() || mat.cols() != m.states.size())
            out.push_back(std::string(matrix_kind) + " for '" + c + "' has wrong dimension " +
                          std::to_string(mat.rows()) + "x" + std::to_string(mat.cols()));
        else if (!mat.all_finite())
            out.push_back(std::string(matrix_kind) + " for '" + c + "' has non-finite entries");
    }
}

}  // namespace detail

inline std::vector<std::string> validate(const Ctqa& m) {
    std::vector<std::string> out;
    detail::validate_shape(m, m.hamiltonians, "hamiltonian", out);
    for (const auto& [c, h] : m.hamiltonians) {
        if (h.rows() != h.cols() || !h.all_finite()) continue;
        const double defect = h.hermiticity_defect();
        if (defect > structural_tol)
            out.push_back(std::string("hamiltonian for '") + c +
                          "' not Hermitian: max asymmetry " + std::to_string(defect));
    }
    return out;
}

inline std::vector<std::string> validate(const Mcqfa& m) {
    std::vector<std::string> out;
    detail::validate_shape(m, m.unitaries, "unitary", out);
    for (const auto& [c, u] : m.unitaries) {
        if (u.rows() != u.cols() || !u.all_finite()) continue;
        const double defect = u.unitarity_defect();
        if (defect > structural_tol)
            out.push_back(std::string("unitary for '") + c + "' not unitary: max defect " +
                          std::to_string(defect));
    }
    return out;
}

inline std::vector<std::string> validate(const KCtqa& m) {
    std::vector<std::string> out = validate(m.base);
    if (m.sweeps < 2) out.push_back("sweeps must be at least 2");
    std::size_t expected_width = 0;
    for (std::size_t s = m.sweeps; s > 1; s >>= 1) ++expected_width;
    if (m.counter_width != expected_width)
        out.push_back("counter_width " + std::to_string(m.counter_width) +
                      " inconsistent with sweeps " + std::to_string(m.sweeps) + " (want " +
                      std::to_string(expected_width) + ")");
    if (!m.base.states.empty() && m.base.dim() % m.counter_range() != 0)
        out.push_back("state count " + std::to_string(m.base.dim()) +
                      " not divisible by counter range " + std::to_string(m.counter_range()));
    return out;
}

}  // namespace ctqa
