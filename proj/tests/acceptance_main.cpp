// Acceptance gate: the shipped behaviors pinned at their tolerances, one
// verdict line per criterion. Runtime budgets are part of the criteria and
// are measured here; the process exits nonzero if any line fails.
//
// The CSV-determinism check shells out to the real CLI binary (its path is
// compiled in), so this target depends on the ctqa tool being built.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ctqa/ctqa.hpp"

#ifndef CTQA_CLI_PATH
#define CTQA_CLI_PATH ""
#endif

namespace {

using ctqa::Rational;

struct Outcome {
    bool ok = true;
    std::string note;      // short detail for the verdict line
    std::string appendix;  // optional block printed under the line

    void fail(const std::string& why) {
        ok = false;
        add(why);
    }
    void info(const std::string& what) { add(what); }

private:
    void add(const std::string& s) {
        if (!note.empty()) note += "; ";
        note += s;
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

/// Visit every word over `alphabet` up to `max_len`, shortest first.
template <typename F>
void for_each_word(const std::string& alphabet, std::size_t max_len, bool include_empty, F&& f) {
    if (include_empty) f(std::string());
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::vector<std::size_t> idx(len, 0);
        std::string w(len, alphabet[0]);
        bool done = false;
        while (!done) {
            f(w);
            std::size_t pos = len;
            for (;;) {
                if (pos == 0) {
                    done = true;
                    break;
                }
                --pos;
                if (++idx[pos] < alphabet.size()) {
                    w[pos] = alphabet[idx[pos]];
                    break;
                }
                idx[pos] = 0;
                w[pos] = alphabet[0];
            }
        }
    }
}

double balance(double n, double m) {
    if (n + m == 0.0) return 1.0;
    const double c = std::cos(std::acos(-1.0) * (n - m) / (2.0 * (n + m)));
    return c * c;
}

// ---------------------------------------------------------------------------
// Reference regex matcher, independent of the library's DFA compiler: a tiny
// syntax tree matched with bitmasks of reachable positions (words here are
// at most 10 symbols, so a 32-bit mask covers every end position).

struct Rx {
    enum Kind { chr, seq, alt, star } kind = chr;
    char c = 0;
    std::vector<Rx> kids;
};

struct RxParser {
    const std::string& s;
    std::size_t i = 0;

    Rx alternation() {
        Rx r;
        r.kind = Rx::alt;
        r.kids.push_back(sequence());
        while (i < s.size() && s[i] == '|') {
            ++i;
            r.kids.push_back(sequence());
        }
        return r;
    }
    Rx sequence() {
        Rx r;
        r.kind = Rx::seq;
        while (i < s.size() && s[i] != '|' && s[i] != ')') r.kids.push_back(repeat());
        return r;
    }
    Rx repeat() {
        Rx a = atom();
        if (i < s.size() && s[i] == '*') {
            ++i;
            Rx st;
            st.kind = Rx::star;
            st.kids.push_back(std::move(a));
            return st;
        }
        return a;
    }
    Rx atom() {
        if (s[i] == '(') {
            ++i;
            Rx a = alternation();
            ++i;  // ')'
            return a;
        }
        Rx a;
        a.c = s[i++];
        return a;
    }
};

std::uint32_t rx_ends(const Rx& r, const std::string& w, std::uint32_t starts) {
    switch (r.kind) {
        case Rx::chr: {
            std::uint32_t out = 0;
            for (std::size_t p = 0; p < w.size(); ++p)
                if ((starts >> p & 1u) && w[p] == r.c) out |= 1u << (p + 1);
            return out;
        }
        case Rx::alt: {
            std::uint32_t out = 0;
            for (const Rx& k : r.kids) out |= rx_ends(k, w, starts);
            return out;
        }
        case Rx::seq: {
            std::uint32_t cur = starts;
            for (const Rx& k : r.kids) cur = rx_ends(k, w, cur);
            return cur;
        }
        case Rx::star: {
            std::uint32_t seen = starts, frontier = starts;
            while (frontier != 0) {
                frontier = rx_ends(r.kids[0], w, frontier) & ~seen;
                seen |= frontier;
            }
            return seen;
        }
    }
    return 0;
}

bool rx_match(const Rx& r, const std::string& w) {
    return (rx_ends(r, w, 1u) >> w.size()) & 1u;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main() {
    int index = 0;
    int failed = 0;
    const auto gate = [&](const char* label, double budget_s, auto&& body) {
        ++index;
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(out);
        } catch (const std::exception& e) {
            out.fail(std::string("exception: ") + e.what());
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (budget_s > 0.0 && dt > budget_s) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "runtime %.2f s exceeds %.0f s budget", dt, budget_s);
            out.fail(buf);
        }
        std::printf("[%2d] %s  %-46s %s (%.2f s)\n", index, out.ok ? "pass" : "FAIL", label,
                    out.note.c_str(), dt);
        if (!out.appendix.empty()) {
            std::istringstream lines(out.appendix);
            std::string line;
            while (std::getline(lines, line)) std::printf("      %s\n", line.c_str());
        }
        if (!out.ok) ++failed;
    };

    gate("rotation operator matches its closed form", 1.0, [](Outcome& out) {
        const ctqa::ComplexMatrix h = ctqa::not_pi_2();
        const double half_pi = std::acos(-1.0) / 2.0;
        std::mt19937 rng(20260816);
        std::uniform_real_distribution<double> dist(0.0, 8.0);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double t = dist(rng);
            ctqa::ComplexMatrix u(2, 2);
            u(0, 0) = u(1, 1) = std::cos(t * half_pi);
            u(0, 1) = u(1, 0) = ctqa::Complex(0.0, -std::sin(t * half_pi));
            worst = std::max(worst, ctqa::max_abs_diff(ctqa::mat_exp_hermitian(h, t), u));
        }
        if (worst > 1e-10) out.fail("random-t gap " + sci(worst) + " > 1e-10");
        const ctqa::ComplexMatrix eye = ctqa::ComplexMatrix::identity(2);
        const double at0 = ctqa::max_abs_diff(ctqa::mat_exp_hermitian(h, 0.0), eye);
        const double at4 = ctqa::max_abs_diff(ctqa::mat_exp_hermitian(h, 4.0), eye);
        if (at0 > 1e-12) out.fail("t=0 gap " + sci(at0) + " > 1e-12");
        if (at4 > 1e-12) out.fail("t=4 gap " + sci(at4) + " > 1e-12");
        if (out.ok) out.info("200 random t, max gap " + sci(std::max({worst, at0, at4})));
    });

    gate("balance formula on the 41x41 grid", 5.0, [](Outcome& out) {
        const ctqa::NamedConstruction lab = ctqa::build_zoo("lab");
        double worst = 0.0;
        for (int n = 0; n <= 40; ++n)
            for (int m = 0; m <= 40; ++m) {
                if (n + m == 0) continue;
                const std::string w = std::string(n, 'a') + std::string(m, 'b');
                const double p = ctqa::run_construction(lab, w).p_accept;
                worst = std::max(worst, std::abs(p - balance(n, m)));
            }
        if (worst > 1e-9) out.fail("grid gap " + sci(worst) + " > 1e-9");
        double min_reject = 1.0;
        std::size_t outside = 0;
        for_each_word("ab", 10, false, [&](const std::string& w) {
            if (w.find("ba") == std::string::npos) return;  // still inside a*b*
            ++outside;
            min_reject = std::min(min_reject, ctqa::run_construction(lab, w).p_reject);
        });
        if (min_reject < 1.0 - 1e-12)
            out.fail("p_reject " + sci(min_reject) + " outside a*b* below 1 - 1e-12");
        if (out.ok)
            out.info("grid gap " + sci(worst) + ", " + std::to_string(outside) +
                     " words outside a*b* all rejected");
    });

    gate("two-to-one plateau and the 0.6 cutpoint region", 0.0, [](Outcome& out) {
        const ctqa::NamedConstruction lab = ctqa::build_zoo("lab");
        double worst = 0.0;
        for (int m = 1; m <= 20; ++m) {
            const std::string w = std::string(2 * m, 'a') + std::string(m, 'b');
            worst = std::max(worst, std::abs(ctqa::run_construction(lab, w).p_accept - 0.75));
        }
        if (worst > 1e-9) out.fail("plateau gap " + sci(worst) + " > 1e-9");
        const ctqa::RegionReport rep = ctqa::lab_region_report(0.6, 25);
        if (!rep.ratio_rule_matches) out.fail("measured region deviates from the arccos rule");
        if (rep.only_in_linear.empty() || rep.only_in_cutpoint.empty())
            out.fail("expected the linear n >= 2m rule to disagree in both directions");
        if (out.ok) out.info("plateau gap " + sci(worst) + ", region matches arccos rule");
        out.appendix = rep.text();
    });

    gate("frozen durations equal the unitary conversion", 0.0, [](Outcome& out) {
        ctqa::NamedConstruction ti = ctqa::build_lab(Rational(1, 2));
        ti.scheduler.decider = ctqa::Decider(ctqa::ConstDecider{1, "ab"});
        ti.scheduler.writer =
            ctqa::Writer{ctqa::const_family(Rational(1, 4)), ctqa::zero_family(), {}};
        const ctqa::NamedConstruction frozen =
            ctqa::to_mcqfa_construction(ctqa::build_lab(Rational(1, 2)), Rational(1, 4));
        double worst = 0.0;
        std::size_t count = 0;
        for_each_word("ab", 8, false, [&](const std::string& w) {
            ++count;
            const ctqa::RunOutcome a = ctqa::run_construction(ti, w);
            const ctqa::RunOutcome b = ctqa::run_construction(frozen, w);
            worst = std::max(
                {worst, std::abs(a.p_accept - b.p_accept), std::abs(a.p_reject - b.p_reject)});
        });
        if (count != 510) out.fail("expected 510 words, saw " + std::to_string(count));
        if (worst > 1e-10) out.fail("gap " + sci(worst) + " > 1e-10");
        if (out.ok) out.info("510 words, gap " + sci(worst));
    });

    gate("last-symbol detector exact on all 2046 words", 0.0, [](Outcome& out) {
        const ctqa::NamedConstruction c = ctqa::build_zoo("last-one");
        const ctqa::VerdictPolicy policy = ctqa::cutpoint_policy(Rational(1, 2));
        std::size_t count = 0;
        double lattice = 0.0;
        std::string bad;
        for_each_word("01", 10, false, [&](const std::string& w) {
            ++count;
            const ctqa::RunOutcome p = ctqa::run_construction(c, w);
            lattice = std::max(lattice, std::min(p.p_accept, 1.0 - p.p_accept));
            const ctqa::Verdict want =
                w.back() == '1' ? ctqa::Verdict::accept : ctqa::Verdict::reject;
            if (ctqa::classify(p, policy) != want && bad.empty()) bad = w;
        });
        if (count != 2046) out.fail("expected 2046 words, saw " + std::to_string(count));
        if (lattice > 1e-12) out.fail("probability " + sci(lattice) + " away from {0,1}");
        if (!bad.empty()) out.fail("verdict disagrees with the last symbol at \"" + bad + "\"");
        if (out.ok) out.info("2046 words, lattice gap " + sci(lattice));
    });

    gate("count-only machine ignores symbol order", 0.0, [](Outcome& out) {
        const ctqa::NamedConstruction c = ctqa::build_zoo("balanced");
        std::mt19937 rng(4242);
        std::uniform_int_distribution<int> len_dist(1, 24);
        std::uniform_int_distribution<int> coin(0, 1);
        double worst_shuffle = 0.0, worst_formula = 0.0;
        for (int i = 0; i < 30; ++i) {
            std::string w;
            const int len = len_dist(rng);
            for (int j = 0; j < len; ++j) w += coin(rng) ? 'a' : 'b';
            const double p0 = ctqa::run_construction(c, w).p_accept;
            worst_formula = std::max(
                worst_formula, std::abs(p0 - c.formula(ctqa::input_stats(c.scheduler, w))));
            std::string mixed = w;
            for (int s = 0; s < 50; ++s) {
                std::shuffle(mixed.begin(), mixed.end(), rng);
                worst_shuffle = std::max(
                    worst_shuffle, std::abs(ctqa::run_construction(c, mixed).p_accept - p0));
            }
        }
        if (worst_shuffle > 1e-9) out.fail("shuffle gap " + sci(worst_shuffle) + " > 1e-9");
        if (worst_formula > 1e-9) out.fail("count-formula gap " + sci(worst_formula) + " > 1e-9");
        if (out.ok)
            out.info("30 words x 50 shuffles, gaps " + sci(worst_shuffle) + " / " +
                     sci(worst_formula));
    });

    gate("time scaling preserves states, schedules exact", 0.0, [](Outcome& out) {
        const ctqa::NamedConstruction lab = ctqa::build_lab(Rational(1, 2));
        const Rational factors[] = {Rational(2), Rational(3), Rational(7, 2)};
        double worst = 0.0;
        std::string inexact;
        for (const Rational& k : factors) {
            const ctqa::NamedConstruction scaled = ctqa::scale_construction(lab, k);
            for_each_word("ab", 8, true, [&](const std::string& w) {
                const auto [bit0, ts0] = ctqa::schedule(lab.scheduler, w);
                const auto [bit1, ts1] = ctqa::schedule(scaled.scheduler, w);
                if ((bit0 != bit1 || !(ts1 == ctqa::scale_schedule(ts0, k))) && inexact.empty())
                    inexact = "\"" + w + "\" at k=" + k.str();
                worst = std::max(worst, ctqa::max_abs_diff(
                                            ctqa::run_construction(scaled, w, ts1).final_state,
                                            ctqa::run_construction(lab, w, ts0).final_state));
            });
        }
        if (!inexact.empty()) out.fail("schedule not the exact rational multiple at " + inexact);
        if (worst > 1e-9) out.fail("final-state gap " + sci(worst) + " > 1e-9");
        if (out.ok) out.info("k in {2, 3, 7/2}, state gap " + sci(worst));
    });

    gate("two-block product formula on the 9^4 grid", 0.0, [](Outcome& out) {
        const ctqa::NamedConstruction c = ctqa::build_zoo("concat-abcd");
        const double pi = std::acos(-1.0);
        double worst = 0.0;
        for (int n = 0; n <= 8; ++n)
            for (int m = 0; m <= 8; ++m)
                for (int k = 0; k <= 8; ++k)
                    for (int h = 0; h <= 8; ++h) {
                        const double total = n + m + k + h;
                        if (total == 0.0) continue;
                        const double lo = std::cos(pi * (m - n) / (2.0 * total));
                        const double hi = std::cos(pi * (h - k) / (2.0 * total));
                        const double want = lo * lo * hi * hi;
                        const std::string w = std::string(n, 'a') + std::string(m, 'b') +
                                              std::string(k, 'c') + std::string(h, 'd');
                        worst = std::max(
                            worst, std::abs(ctqa::run_construction(c, w).p_accept - want));
                        // The c/d block may mix freely; spot-check the
                        // reversed interleaving on a diagonal slice.
                        if (k > 0 && h > 0 && (n + m + k + h) % 5 == 0) {
                            const std::string mixed = std::string(n, 'a') + std::string(m, 'b') +
                                                      std::string(h, 'd') + std::string(k, 'c');
                            worst = std::max(worst, std::abs(ctqa::run_construction(c, mixed)
                                                                 .p_accept -
                                                             want));
                        }
                    }
        if (worst > 1e-9) out.fail("grid gap " + sci(worst) + " > 1e-9");
        const std::string aacd = fmt9(ctqa::run_construction(c, "aacd").p_accept);
        if (aacd != "0.500000000") out.fail("p(aacd) prints as " + aacd);
        if (out.ok) out.info("grid gap " + sci(worst) + ", p(aacd) = " + aacd);
    });

    gate("unions compose probabilities, cutpoint exact", 10.0, [](Outcome& out) {
        const ctqa::NamedConstruction left = ctqa::build_balanced(Rational(2, 3));
        ctqa::NamedConstruction right;
        right.name = "b-fraction";
        {
            ctqa::Ctqa m;
            m.states = {"r0", "r1"};
            m.alphabet = "ab";
            m.hamiltonians['a'] = ctqa::ComplexMatrix::zero(2);
            m.hamiltonians['b'] = ctqa::not_pi_2();
            m.start = "r0";
            m.accept = {"r0"};
            m.reject = {"r1"};
            right.machine = std::move(m);
        }
        right.scheduler = left.scheduler;  // shared: const-1 decider, uniform/pulse writer
        right.cutpoint = Rational(3, 5);

        const ctqa::NamedConstruction rot = ctqa::union_rotating(left, right);
        const ctqa::NamedConstruction tied = ctqa::union_shared_scheduler(left, right);
        const Rational want_cut(2, 5);  // max{2/3*3/5, 2/3*2/5, 1/3*3/5}
        if (!rot.cutpoint || !(*rot.cutpoint == want_cut))
            out.fail("rotating union cutpoint is not 2/5");
        if (!tied.cutpoint || !(*tied.cutpoint == want_cut))
            out.fail("shared-scheduler union cutpoint is not 2/5");
        double worst = 0.0;
        std::size_t count = 0;
        for_each_word("ab", 8, true, [&](const std::string& w) {
            ++count;
            const double p1 = ctqa::run_construction(left, w).p_accept;
            const double p2 = ctqa::run_construction(right, w).p_accept;
            const double want = 1.0 - (1.0 - p1) * (1.0 - p2);
            worst = std::max({worst,
                              std::abs(ctqa::run_construction(rot, w).p_accept - want),
                              std::abs(ctqa::run_construction(tied, w).p_accept - want)});
        });
        if (worst > 1e-9) out.fail("composition gap " + sci(worst) + " > 1e-9");
        if (out.ok)
            out.info(std::to_string(count) + " words x 2 builders, gap " + sci(worst) +
                     ", cutpoint 2/5");
    });

    gate("decider embedding exact on 500 random words", 0.0, [](Outcome& out) {
        std::mt19937 rng(777);
        std::uniform_int_distribution<int> len_dist(1, 14);
        double lattice = 0.0;
        const auto probe = [&](const ctqa::NamedConstruction& c, const std::string& alphabet,
                               int count) {
            std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
            for (int i = 0; i < count; ++i) {
                std::string w;
                const int len = len_dist(rng);
                for (int j = 0; j < len; ++j) w += alphabet[pick(rng)];
                const int bit = c.scheduler.decider(w);
                const double p = ctqa::run_construction(c, w).p_accept;
                lattice = std::max(lattice, std::abs(p - bit));
            }
        };
        probe(ctqa::build_zoo("decider-embed"), "ab", 250);
        probe(ctqa::build_zoo("halting-demo"), "01", 250);
        if (lattice > 1e-12) out.fail("embedding gap " + sci(lattice) + " > 1e-12");
        if (out.ok) out.info("500 words across 2 deciders, gap " + sci(lattice));
    });

    gate("regex compiler agrees with a reference matcher", 0.0, [](Outcome& out) {
        const struct {
            const char* pattern;
            const char* alphabet;
        } corpus[] = {{"a*b*", "ab"}, {"a*b*(c|d)*", "abcd"}, {"(0|1)*1", "01"}};
        std::size_t total = 0;
        std::string bad;
        for (const auto& entry : corpus) {
            const ctqa::Decider dec(ctqa::regex_to_dfa(entry.pattern, entry.alphabet));
            const std::string pattern = entry.pattern;
            RxParser parser{pattern};
            const Rx tree = parser.alternation();
            for_each_word(entry.alphabet, 10, true, [&](const std::string& w) {
                ++total;
                if ((dec(w) == 1) != rx_match(tree, w) && bad.empty())
                    bad = pattern + " on \"" + w + "\"";
            });
        }
        if (!bad.empty()) out.fail("disagreement: " + bad);
        if (out.ok) out.info(std::to_string(total) + " words across 3 patterns");
    });

    gate("zoo round-trips; CLI sweeps byte-identical", 0.0, [](Outcome& out) {
        for (const std::string& name : ctqa::zoo_names()) {
            const ctqa::NamedConstruction original = ctqa::build_zoo(name);
            ctqa::NamedConstruction back =
                ctqa::parse_machine_file(ctqa::serialize_machine(original));
            if (!ctqa::structurally_equal(original, back)) {
                out.fail("round-trip changed " + name);
                continue;
            }
            ctqa::attach_zoo_formula(back);
            const ctqa::CheckReport rep =
                ctqa::oracle_check(back, "random len=6 count=40 seed=11", ctqa::behavioral_tol);
            if (!rep.pass) out.fail(name + " oracle: " + rep.text());
        }

        const std::string cli = CTQA_CLI_PATH;
        if (cli.empty()) {
            out.fail("CLI path not compiled in");
            return;
        }
        namespace fs = std::filesystem;
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        const fs::path dir =
            fs::temp_directory_path() / ("ctqa-acceptance-" + std::to_string(stamp));
        fs::create_directories(dir);
        const fs::path machine = dir / "lab.ctqa";
        {
            std::ofstream f(machine, std::ios::binary);
            f << ctqa::serialize_machine(ctqa::build_zoo("lab"));
        }
        const fs::path csv1 = dir / "sweep1.csv";
        const fs::path csv2 = dir / "sweep2.csv";
        const auto sweep_cmd = [&](const fs::path& csv) {
            return "\"" + cli + "\" sweep -m \"" + machine.string() +
                   "\" --family \"random len=7 count=25 seed=3\" --csv \"" + csv.string() +
                   "\" 2>/dev/null";
        };
        if (std::system(sweep_cmd(csv1).c_str()) != 0) out.fail("first CLI sweep failed");
        else if (std::system(sweep_cmd(csv2).c_str()) != 0) out.fail("second CLI sweep failed");
        else if (slurp(csv1) != slurp(csv2)) out.fail("CSV bytes differ between runs");
        else
            out.info(std::to_string(ctqa::zoo_names().size()) + " machines, CSV identical (" +
                     std::to_string(fs::file_size(csv1)) + " bytes)");
        fs::remove_all(dir);
    });

    std::printf("%d/%d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
