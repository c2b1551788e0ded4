#ifndef HARMONIOUS_TOOLS_CLI_HPP
#define HARMONIOUS_TOOLS_CLI_HPP

// Subcommands of the `harmonious` tool.
//
// Exit codes: 0 success, 1 a solver or verification failure, 2 usage, format
// or I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <harmonious/harmonious.hpp>

namespace harmonious::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t to_u64(const std::string& key, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw UsageError(key + ": expected a non-negative integer, got '" + text + "'");
    }
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        throw UsageError(key + ": value out of range");
    }
}

inline double to_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw UsageError(key + ": expected a number, got '" + text + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    throw UsageError(key + ": expected true or false, got '" + text + "'");
}

inline std::vector<SolverTag> to_pipeline(const std::string& key, const std::string& text) {
    std::vector<SolverTag> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        const auto tag = parse_solver_tag(item);
        if (!tag || *tag == SolverTag::Exhaustive) throw UsageError(key + ": unknown solver '" + item + "'");
        out.push_back(*tag);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

using Setter = std::function<void(SolverConfig&, const std::string& key, const std::string& value)>;

// SolverConfig field name -> setter. Flags are the same names with '-'.
inline const std::vector<std::pair<std::string, Setter>>& knobs() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"backtrack_limit", [](auto& c, auto& k, auto& v) { c.backtrack_limit = to_u64(k, v); }},
        {"restarts", [](auto& c, auto& k, auto& v) { c.restarts = to_u64(k, v); }},
        {"perturbation", [](auto& c, auto& k, auto& v) { c.perturbation = to_double(k, v); }},
        {"sample_pairs", [](auto& c, auto& k, auto& v) { c.sample_pairs = to_u64(k, v); }},
        {"tenure", [](auto& c, auto& k, auto& v) { c.tenure = to_u64(k, v); }},
        {"max_iters", [](auto& c, auto& k, auto& v) { c.max_iters = to_u64(k, v); }},
        {"stall_limit", [](auto& c, auto& k, auto& v) { c.stall_limit = to_u64(k, v); }},
        {"twostage_runs", [](auto& c, auto& k, auto& v) { c.twostage_runs = to_u64(k, v); }},
        {"stage1_budget", [](auto& c, auto& k, auto& v) { c.stage1_budget = to_u64(k, v); }},
        {"stage2_budget", [](auto& c, auto& k, auto& v) { c.stage2_budget = to_u64(k, v); }},
        {"stage1_sum_check", [](auto& c, auto& k, auto& v) { c.stage1_sum_check = to_bool(k, v); }},
        {"pipeline", [](auto& c, auto& k, auto& v) { c.pipeline = to_pipeline(k, v); }},
    };
    return table;
}

inline std::string flag_name(std::string field) {
    for (char& ch : field) {
        if (ch == '_') ch = '-';
    }
    return "--" + field;
}

}  // namespace detail

/// Solver knobs, from an optional key=value config file overlaid by flags.
class SolverFlags {
public:
    void attach(CLI::App& app) {
        app.add_option("--config", config_file_, "File of key=value lines using SolverConfig field names");
        for (const auto& [field, setter] : detail::knobs()) {
            app.add_option(detail::flag_name(field), values_[field], "SolverConfig." + field);
        }
    }

    SolverConfig resolve() const {
        SolverConfig cfg;
        if (config_file_) apply_file(cfg, *config_file_);
        for (const auto& [field, setter] : detail::knobs()) {
            const auto it = values_.find(field);
            if (it != values_.end() && it->second) setter(cfg, detail::flag_name(field), *it->second);
        }
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }

    static void apply_file(SolverConfig& cfg, const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot read config file " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            line = line.substr(first, last - first + 1);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
            }
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t");
                const auto b = s.find_last_not_of(" \t");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const auto key = trim(line.substr(0, eq));
            const auto value = trim(line.substr(eq + 1));
            if (key == "global_seed" || key == "seed") {
                cfg.global_seed = detail::to_u64(key, value);
                continue;
            }
            bool known = false;
            for (const auto& [field, setter] : detail::knobs()) {
                if (field == key) {
                    setter(cfg, key, value);
                    known = true;
                }
            }
            if (!known) throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }

private:
    std::optional<std::string> config_file_;
    std::map<std::string, std::optional<std::string>> values_;
};

inline int run_gen(int n, bool count_only, std::ostream& out, std::ostream& err) {
    if (n < 1) {
        err << "gen: --nodes must be >= 1\n";
        return kUsage;
    }
    if (count_only) {
        out << count_free_trees_enumerated(n) << "\n";
        return kOk;
    }
    auto stream = free_trees(n);
    while (auto seq = stream.next()) out << format_level_sequence(*seq) << "\n";
    return kOk;
}

inline int run_count(int n, std::ostream& out, std::ostream& err) {
    if (n < 1 || n > 45) {
        err << "count: --nodes must be in [1, 45]\n";
        return kUsage;
    }
    const auto enumerated = count_free_trees_enumerated(n);
    const auto formula = oracle_count_otter(n);
    out << "enumerated=" << enumerated << " formula=" << formula << "\n";
    if (enumerated != formula) {
        err << "count: enumeration disagrees with the counting formula\n";
        return kFailure;
    }
    return kOk;
}

inline nlohmann::ordered_json attempts_json(const SolveOutcome& outcome) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& a : outcome.attempts) {
        nlohmann::ordered_json j;
        j["solver"] = std::string(to_string(a.solver));
        j["success"] = a.success;
        j["runs"] = a.runs;
        j["backtracks"] = a.backtracks;
        j["iterations"] = a.iterations;
        j["swaps"] = a.swaps;
        j["best_eval"] = a.best_eval;
        j["seconds"] = a.seconds;
        list.push_back(j);
    }
    return list;
}

/// `solver` is "hybrid" or a single solver tag.
inline int run_solve(const std::string& levels, const std::string& solver, std::uint64_t seed, const SolverConfig& cfg,
                     std::ostream& out, std::ostream& err) {
    LevelSequence seq;
    try {
        seq = parse_level_sequence(levels);
    } catch (const ParseError& e) {
        err << "solve: " << e.what() << "\n";
        return kUsage;
    }
    const auto tree = Tree::from_level_sequence(seq);
    SolveOutcome outcome;
    if (solver == "hybrid") {
        outcome = solve_hybrid(tree, cfg, seed);
    } else {
        const auto tag = parse_solver_tag(solver);
        if (!tag) {
            err << "solve: unknown solver '" << solver << "'\n";
            return kUsage;
        }
        if (*tag == SolverTag::Exhaustive && tree.size() > kExhaustiveMaxNodes) {
            err << "solve: the exhaustive solver supports at most " << kExhaustiveMaxNodes << " nodes\n";
            return kUsage;
        }
        Rng rng(seed);
        outcome = solve_with(*tag, tree, cfg, rng);
    }
    if (outcome.success) {
        out << to_json_line(make_certificate(tree, outcome, seed)) << "\n";
        return kOk;
    }
    nlohmann::ordered_json record;
    record["n"] = seq.size();
    record["levels"] = seq;
    record["success"] = false;
    record["seed"] = seed;
    record["attempts"] = attempts_json(outcome);
    out << record.dump() << "\n";
    return kFailure;
}

inline int run_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
    SweepResult result;
    try {
        result = sweep(opts);
    } catch (const SweepError& e) {
        err << "sweep: " << e.what() << "\n";
        if (opts.checkpoint) err << "sweep: pass --fresh to discard the checkpoint and start over\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "sweep: " << e.what() << "\n";
        return kUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "sweep: " << e.what() << "\n";
        return kUsage;
    }
    std::uint64_t failures = 0;
    for (const auto& r : result.reports) {
        out << "n=" << r.n << " trees=" << r.trees_total << " solved=" << r.trees_solved
            << " twostage=" << r.solved_by(SolverTag::TwoStage) << " backtrack=" << r.solved_by(SolverTag::Backtrack)
            << " tabu=" << r.solved_by(SolverTag::Tabu) << " failures=" << r.failures.size() << "\n";
        for (const auto& f : r.failures) {
            err << "candidate counterexample (failed all solvers): " << format_level_sequence(f) << "\n";
        }
        failures += r.failures.size();
    }
    if (!result.finished) {
        out << "stopped early; rerun with the same checkpoint to continue\n";
        return failures ? kFailure : kOk;
    }
    return failures ? kFailure : kOk;
}

inline int run_verify(const std::string& path, std::ostream& out, std::ostream& err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        err << "verify: cannot read " << path << "\n";
        return kUsage;
    }
    std::string line;
    std::uint64_t line_no = 0, records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Certificate cert;
        try {
            cert = parse_certificate(line);
        } catch (const CertificateFormatError& e) {
            err << "verify: line " << line_no << ": malformed record: " << e.what() << "\n";
            return kUsage;
        }
        ++records;
        const auto verdict = verify_certificate(cert);
        if (!verdict) {
            err << "verify: line " << line_no << ": " << describe(verdict.reason) << "\n";
            return kFailure;
        }
    }
    if (records == 0) err << "verify: warning: no certificates in " << path << "\n";
    out << "verified " << records << " certificates\n";
    return kOk;
}

/// Parses argv and dispatches. Never throws.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Harmonious labellings of free trees"};
    app.require_subcommand(1);

    int gen_nodes = 0;
    bool count_only = false;
    auto* gen = app.add_subcommand("gen", "Print the canonical level sequence of every free tree on n nodes");
    gen->add_option("--nodes,-n", gen_nodes, "Node count")->required();
    gen->add_flag("--count-only", count_only, "Print only the number of trees");

    std::string levels, solver = "hybrid";
    std::uint64_t solve_seed = SolverConfig{}.global_seed;
    SolverFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "Find a harmonious labelling of one tree");
    solve->add_option("--levels", levels, "Level sequence, e.g. 0,1,2,1")->required();
    solve->add_option("--solver", solver, "hybrid, twostage, backtrack, tabu or exhaustive");
    solve->add_option("--seed", solve_seed, "Random seed");
    solve_flags.attach(*solve);

    SweepOptions sweep_opts;
    std::string out_path, checkpoint_path, report_path;
    std::optional<std::uint64_t> sweep_seed, max_blocks;
    SolverFlags sweep_flags;
    auto* sw = app.add_subcommand("sweep", "Solve every free tree for a range of sizes");
    sw->add_option("--min", sweep_opts.n_min, "Smallest node count")->required();
    sw->add_option("--max", sweep_opts.n_max, "Largest node count")->required();
    sw->add_option("--jobs,-j", sweep_opts.workers, "Worker threads");
    sw->add_option("--seed", sweep_seed, "Global seed");
    sw->add_option("--out", out_path, "Certificate output file (JSON lines)")->required();
    sw->add_option("--checkpoint", checkpoint_path, "Checkpoint file; resumed from when present");
    sw->add_option("--report", report_path, "Per-size report file (JSON lines)");
    sw->add_option("--block-size", sweep_opts.block_size, "Trees per work unit");
    sw->add_option("--max-blocks", max_blocks, "Stop after writing this many blocks");
    sw->add_flag("--fresh", sweep_opts.fresh, "Discard an existing checkpoint");
    sweep_flags.attach(*sw);

    std::string verify_path;
    auto* verify = app.add_subcommand("verify", "Re-verify a certificate file from scratch");
    verify->add_option("path", verify_path, "Certificate file (JSON lines)")->required();

    int count_nodes = 0;
    auto* count = app.add_subcommand("count", "Compare the enumerated tree count with the counting formula");
    count->add_option("--nodes,-n", count_nodes, "Node count")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    try {
        if (*gen) return run_gen(gen_nodes, count_only, out, err);
        if (*count) return run_count(count_nodes, out, err);
        if (*verify) return run_verify(verify_path, out, err);
        if (*solve) return run_solve(levels, solver, solve_seed, solve_flags.resolve(), out, err);
        if (*sw) {
            sweep_opts.cfg = sweep_flags.resolve();
            if (sweep_seed) sweep_opts.cfg.global_seed = *sweep_seed;
            sweep_opts.results = out_path;
            if (!checkpoint_path.empty()) sweep_opts.checkpoint = checkpoint_path;
            if (!report_path.empty()) sweep_opts.report = report_path;
            sweep_opts.max_blocks = max_blocks;
            return run_sweep(sweep_opts, out, err);
        }
    } catch (const UsageError& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace harmonious::cli

#endif  // HARMONIOUS_TOOLS_CLI_HPP
