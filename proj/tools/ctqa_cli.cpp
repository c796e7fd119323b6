// The ctqa command: run single words, sweep word families to CSV, compose
// machines with the library's builders, validate files, and emit the
// built-in zoo. Output is byte-deterministic for fixed inputs.
//
// Exit codes: 0 accept, 1 reject, 2 unknown (run only; other commands use
// 0 for success), 3 runtime error, 64 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ctqa/ctqa.hpp"

namespace {

constexpr int exit_error = 3;
constexpr int exit_usage = 64;

// Bad argument *values* (malformed policy, wrong builder arity) are usage
// errors like malformed flags, not runtime failures.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out.flush()) throw std::runtime_error("short write to '" + path + "'");
}

ctqa::NamedConstruction load(const std::string& path) {
    try {
        return ctqa::parse_machine_file(slurp(path));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string fmt_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9f", p);
    return buf;
}

// cutpoint:<p/q> | isolated:<p/q>,<p/q> | bounded:<p/q>
ctqa::VerdictPolicy parse_policy(const std::string& spec) {
    try {
        const auto colon = spec.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("expected '<kind>:<params>'");
        const std::string kind = spec.substr(0, colon);
        const std::string args = spec.substr(colon + 1);
        if (kind == "cutpoint")
            return ctqa::cutpoint_policy(ctqa::Rational::from_string(args));
        if (kind == "bounded")
            return ctqa::bounded_policy(ctqa::Rational::from_string(args));
        if (kind == "isolated") {
            const auto comma = args.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("isolated takes '<cutpoint>,<gap>'");
            return ctqa::isolated_policy(ctqa::Rational::from_string(args.substr(0, comma)),
                                         ctqa::Rational::from_string(args.substr(comma + 1)));
        }
        throw std::invalid_argument("unknown kind '" + kind +
                                    "' (expected cutpoint, isolated, or bounded)");
    } catch (const std::exception& e) {
        throw UsageError("--policy " + spec + ": " + e.what());
    }
}

// Explicit --policy wins; otherwise the machine's own cutpoint; otherwise
// the plain majority cutpoint 1/2.
ctqa::VerdictPolicy pick_policy(const std::string& spec, const ctqa::NamedConstruction& c) {
    if (!spec.empty()) return parse_policy(spec);
    return ctqa::cutpoint_policy(c.cutpoint.value_or(ctqa::Rational(1, 2)));
}

int verdict_exit(ctqa::Verdict v) {
    switch (v) {
        case ctqa::Verdict::accept: return 0;
        case ctqa::Verdict::reject: return 1;
        default: return 2;
    }
}

std::string decider_str(const ctqa::Decider& d) {
    if (const auto* dfa = d.as_dfa())
        return dfa->pattern.empty() ? "dfa (hand-built)" : "regex " + dfa->pattern;
    if (const auto* cd = d.as_const()) return "const " + std::to_string(cd->bit);
    return "predicate " + d.as_predicate()->name;
}

int cmd_run(const std::string& path, const std::string& word, const std::string& policy_spec) {
    const ctqa::NamedConstruction c = load(path);
    const ctqa::VerdictPolicy policy = pick_policy(policy_spec, c);
    const auto [bit, ts] = ctqa::schedule(c.scheduler, word);
    const ctqa::RunOutcome out = ctqa::run_construction(c, word, ts);
    const ctqa::Verdict v = ctqa::classify(out, policy);
    std::printf("%-11s %s\n", "machine", c.name.c_str());
    std::printf("%-11s %s\n", "input", word.c_str());
    std::printf("%-11s %d\n", "decider_bit", bit);
    std::printf("%-11s %s\n", "schedule", ctqa::schedule_str(ts).c_str());
    std::printf("%-11s %s\n", "p_accept", fmt_prob(out.p_accept).c_str());
    std::printf("%-11s %s\n", "p_reject", fmt_prob(out.p_reject).c_str());
    std::printf("%-11s %s\n", "p_neutral", fmt_prob(out.p_neutral).c_str());
    std::printf("%-11s %s\n", "verdict", ctqa::verdict_str(v));
    return verdict_exit(v);
}

int cmd_sweep(const std::string& path, const std::string& family, const std::string& csv_path,
              const std::string& policy_spec, std::optional<std::uint32_t> seed) {
    const ctqa::NamedConstruction c = load(path);
    const ctqa::VerdictPolicy policy = pick_policy(policy_spec, c);
    const std::vector<ctqa::SweepRow> rows =
        ctqa::sweep(c, family, policy, ctqa::family_guard, seed);
    const std::string csv = ctqa::sweep_csv(rows);
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        spill(csv_path, csv);
        std::cerr << "wrote " << rows.size() << " rows to " << csv_path << "\n";
    }
    return 0;
}

int cmd_build(const std::string& kind, const std::vector<std::string>& args,
              const std::string& out_path) {
    const auto arity = [&](std::size_t n, const char* shape) {
        if (args.size() != n)
            throw UsageError("build " + kind + " takes " + shape + " (got " +
                             std::to_string(args.size()) + " arguments)");
    };
    ctqa::NamedConstruction built;
    if (kind == "union-rot") {
        arity(2, "two machine files");
        built = ctqa::union_rotating(load(args[0]), load(args[1]));
    } else if (kind == "union-shared") {
        arity(2, "two machine files");
        built = ctqa::union_shared_scheduler(load(args[0]), load(args[1]));
    } else if (kind == "scale") {
        arity(2, "a machine file and a factor p/q");
        built = ctqa::scale_construction(load(args[0]), ctqa::Rational::from_string(args[1]));
    } else if (kind == "to-mcqfa") {
        arity(2, "a machine file and a duration p/q");
        built = ctqa::to_mcqfa_construction(load(args[0]), ctqa::Rational::from_string(args[1]));
    } else {
        throw UsageError("build: unknown kind '" + kind +
                         "' (expected union-rot, union-shared, scale, or to-mcqfa)");
    }
    spill(out_path, ctqa::serialize_machine(built));
    std::cerr << "wrote " << built.name << " to " << out_path << "\n";
    return 0;
}

int cmd_check(const std::string& path) {
    // parse_machine_file already runs the validate() pipeline; reaching
    // this point means the machine is clean, so report the diagnostics
    // that the gate was checked against.
    const ctqa::NamedConstruction c = load(path);
    std::string kind = "single-sweep";
    double defect = 0.0;
    const char* defect_name = "hermiticity_defect";
    std::size_t states = 0;
    std::string alphabet = c.alphabet();
    if (const auto* m = std::get_if<ctqa::Ctqa>(&c.machine)) {
        states = m->states.size();
        for (const auto& [sym, h] : m->hamiltonians)
            defect = std::max(defect, h.hermiticity_defect());
    } else if (const auto* k = std::get_if<ctqa::KCtqa>(&c.machine)) {
        kind = "rotating (" + std::to_string(k->sweeps) + " sweeps)";
        states = k->base.states.size();
        for (const auto& [sym, h] : k->base.hamiltonians)
            defect = std::max(defect, h.hermiticity_defect());
    } else {
        const auto& u = std::get<ctqa::Mcqfa>(c.machine);
        kind = "unitary";
        defect_name = "unitarity_defect";
        states = u.states.size();
        for (const auto& [sym, mat] : u.unitaries)
            defect = std::max(defect, mat.unitarity_defect());
    }
    std::printf("%-11s %s\n", "machine", c.name.c_str());
    std::printf("%-11s %s\n", "kind", kind.c_str());
    std::printf("%-11s %zu\n", "states", states);
    std::printf("%-11s %s\n", "alphabet", alphabet.c_str());
    std::printf("%-11s %s\n", "decider", decider_str(c.scheduler.decider).c_str());
    if (c.cutpoint) std::printf("%-11s %s\n", "cutpoint", c.cutpoint->str().c_str());
    std::printf("%s %.3g (tolerance %g)\n", defect_name, defect, ctqa::structural_tol);
    std::printf("ok\n");
    return 0;
}

int cmd_zoo(const std::string& action, const std::string& name, const std::string& out_path) {
    if (action == "list") {
        for (const std::string& n : ctqa::zoo_names()) std::cout << n << "\n";
        return 0;
    }
    if (action == "emit") {
        if (name.empty()) throw UsageError("zoo emit takes a machine name (try 'zoo list')");
        if (out_path.empty()) throw UsageError("zoo emit requires -o <file>");
        spill(out_path, ctqa::serialize_machine(ctqa::build_zoo(name)));
        std::cerr << "wrote " << name << " to " << out_path << "\n";
        return 0;
    }
    throw UsageError("zoo: unknown action '" + action + "' (expected list or emit)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classically time-controlled quantum automata"};
    app.require_subcommand(1);
    int rc = 0;

    std::string machine_path, word, policy_spec, family, csv_path;
    std::uint32_t seed = 0;

    auto* run = app.add_subcommand("run", "run one word and print probabilities and verdict");
    run->add_option("-m,--machine", machine_path, "machine file")->required();
    run->add_option("-i,--input", word, "input word (may be empty)")->required();
    run->add_option("--policy", policy_spec,
                    "cutpoint:<p/q> | isolated:<p/q>,<p/q> | bounded:<p/q>");
    run->callback([&] { rc = cmd_run(machine_path, word, policy_spec); });

    auto* sw = app.add_subcommand("sweep", "run a word family and emit CSV");
    sw->add_option("-m,--machine", machine_path, "machine file")->required();
    sw->add_option("--family", family,
                   "template \"a^n b^m; n=0..3; m=0..3\" or \"random len=L count=C [seed=S]\"")
        ->required();
    sw->add_option("--csv", csv_path, "write CSV here instead of stdout");
    sw->add_option("--policy", policy_spec,
                   "cutpoint:<p/q> | isolated:<p/q>,<p/q> | bounded:<p/q>");
    auto* seed_opt = sw->add_option("--seed", seed, "override the random family seed");
    sw->callback([&] {
        std::optional<std::uint32_t> s;
        if (seed_opt->count() > 0) s = seed;
        rc = cmd_sweep(machine_path, family, csv_path, policy_spec, s);
    });

    std::string build_kind, out_path;
    std::vector<std::string> build_args;
    auto* build = app.add_subcommand("build", "compose machines and write the result");
    build->add_option("kind", build_kind, "union-rot | union-shared | scale | to-mcqfa")
        ->required();
    build->add_option("args", build_args, "builder arguments (files, then factors)");
    build->add_option("-o,--output", out_path, "output machine file")->required();
    build->callback([&] { rc = cmd_build(build_kind, build_args, out_path); });

    auto* check = app.add_subcommand("check", "validate a machine file and print diagnostics");
    check->add_option("-m,--machine", machine_path, "machine file")->required();
    check->callback([&] { rc = cmd_check(machine_path); });

    std::string zoo_action = "list", zoo_name;
    auto* zoo = app.add_subcommand("zoo", "list or emit the built-in machines");
    zoo->add_option("action", zoo_action, "list | emit");
    zoo->add_option("name", zoo_name, "machine name (for emit)");
    zoo->add_option("-o,--output", out_path, "output machine file (for emit)");
    zoo->callback([&] { rc = cmd_zoo(zoo_action, zoo_name, out_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const UsageError& e) {
        std::cerr << "ctqa: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "ctqa: " << e.what() << "\n";
        return exit_error;
    }
    return rc;
}
