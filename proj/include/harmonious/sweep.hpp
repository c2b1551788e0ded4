#ifndef HARMONIOUS_SWEEP_HPP
#define HARMONIOUS_SWEEP_HPP

// Checkpointed sweep of the hybrid solver over every free tree of a range of
// sizes.
//
// The tree stream of each size is cut into contiguous blocks that a pool of
// workers solves independently. Each tree's seed depends only on the global
// seed, n and the tree's stream index, and finished blocks are written strictly
// in stream order, so the results file is the same for any worker count.
//
// Files:
//   results     certificate JSON lines, in stream order
//   checkpoint  one line per started size:
//                 n=<k> completed=<count> seed=<global_seed> gen=<generator-version>
//               rewritten through a temporary file and a rename after each block
//   report      one SweepReport JSON object per finished size

#include <algorithm>
#include <array>
#include <condition_variable>
#include <cstdint>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "certificate.hpp"
#include "hybrid.hpp"
#include "solver.hpp"
#include "tree.hpp"
#include "tree_enum.hpp"

namespace harmonious {

class SweepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepReport {
    int n = 0;
    std::uint64_t trees_total = 0;
    std::uint64_t trees_solved = 0;
    std::array<std::uint64_t, 3> solver_counts{};  ///< indexed by SolverTag
    std::vector<LevelSequence> failures;
    double wall_time = 0.0;
    double cpu_time = 0.0;

    std::uint64_t solved_by(SolverTag tag) const { return solver_counts[static_cast<std::size_t>(tag)]; }
};

inline nlohmann::ordered_json to_json(const SweepReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["trees_total"] = r.trees_total;
    j["trees_solved"] = r.trees_solved;
    nlohmann::ordered_json counts;
    for (auto tag : {SolverTag::TwoStage, SolverTag::Backtrack, SolverTag::Tabu}) {
        counts[std::string(to_string(tag))] = r.solved_by(tag);
    }
    j["solver_counts"] = counts;
    auto failures = nlohmann::ordered_json::array();
    for (const auto& f : r.failures) failures.push_back(format_level_sequence(f));
    j["failures"] = failures;
    j["wall_time"] = r.wall_time;
    j["cpu_time"] = r.cpu_time;
    return j;
}

struct Checkpoint {
    std::uint64_t seed = 0;
    std::string generator = kGeneratorVersion;
    std::map<int, std::uint64_t> completed;  ///< trees done per size
};

inline std::string format_checkpoint(const Checkpoint& c) {
    std::string out;
    for (auto [n, done] : c.completed) {
        out += "n=" + std::to_string(n) + " completed=" + std::to_string(done) + " seed=" + std::to_string(c.seed) +
               " gen=" + c.generator + "\n";
    }
    return out;
}

/// Parses checkpoint text. Throws SweepError on any malformed line or when
/// lines disagree on seed or generator.
inline Checkpoint parse_checkpoint(std::istream& in) {
    Checkpoint c;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> gen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        std::map<std::string, std::string> kv;
        while (fields >> field) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw SweepError("checkpoint line " + std::to_string(line_no) + ": malformed");
            kv[field.substr(0, eq)] = field.substr(eq + 1);
        }
        if (kv.size() != 4 || !kv.count("n") || !kv.count("completed") || !kv.count("seed") || !kv.count("gen")) {
            throw SweepError("checkpoint line " + std::to_string(line_no) + ": expected n, completed, seed, gen");
        }
        auto number = [&](const std::string& key) {
            const auto& text = kv[key];
            if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20) {
                throw SweepError("checkpoint line " + std::to_string(line_no) + ": bad " + key);
            }
            try {
                return std::stoull(text);
            } catch (const std::exception&) {
                throw SweepError("checkpoint line " + std::to_string(line_no) + ": bad " + key);
            }
        };
        const auto n = number("n");
        const auto done = number("completed");
        const auto s = number("seed");
        if (n < 1 || n > 1000) throw SweepError("checkpoint line " + std::to_string(line_no) + ": bad n");
        if ((seed && *seed != s) || (gen && *gen != kv["gen"])) {
            throw SweepError("checkpoint lines disagree on seed or generator");
        }
        seed = s;
        gen = kv["gen"];
        if (!c.completed.emplace(static_cast<int>(n), done).second) {
            throw SweepError("checkpoint repeats n=" + std::to_string(n));
        }
    }
    if (!seed) throw SweepError("checkpoint is empty");
    c.seed = *seed;
    c.generator = *gen;
    return c;
}

inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SweepError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw SweepError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw SweepError("cannot replace " + path.string() + ": " + ec.message());
}

struct SweepOptions {
    int n_min = 1;
    int n_max = 1;
    SolverConfig cfg;
    int workers = 1;
    std::uint64_t block_size = 1024;
    std::filesystem::path results;
    std::optional<std::filesystem::path> checkpoint;
    std::optional<std::filesystem::path> report;
    /// Ignore an existing checkpoint and start over.
    bool fresh = false;
    /// Stop after writing this many blocks; a later call resumes.
    std::optional<std::uint64_t> max_blocks;
};

struct SweepResult {
    std::vector<SweepReport> reports;  ///< one per size in range that has finished
    bool finished = false;
};

namespace detail {

struct BlockJob {
    int n = 0;
    std::uint64_t first_index = 0;
    std::vector<LevelSequence> trees;
};

struct BlockResult {
    std::vector<LevelSequence> trees;
    std::vector<std::optional<Certificate>> certificates;  // one per tree
};

inline BlockResult solve_block(BlockJob job, const SolverConfig& cfg) {
    BlockResult out;
    out.certificates.reserve(job.trees.size());
    for (std::size_t k = 0; k < job.trees.size(); ++k) {
        const auto tree = Tree::from_level_sequence(job.trees[k]);
        const auto seed = derive_seed(cfg.global_seed, job.n, job.first_index + k);
        const auto outcome = solve_hybrid(tree, cfg, seed);
        if (outcome.success) {
            auto cert = make_certificate(tree, outcome, seed);
            if (!verify_certificate(cert)) throw std::logic_error("sweep produced an unverifiable certificate");
            out.certificates.emplace_back(std::move(cert));
        } else {
            out.certificates.emplace_back();
        }
    }
    out.trees = std::move(job.trees);
    return out;
}

// Fixed pool of workers solving blocks in any order; results are collected by
// sequence number so the caller can consume them in order.
class BlockPool {
public:
    BlockPool(int workers, const SolverConfig& cfg) : cfg_(cfg) {
        for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { work(); });
    }

    ~BlockPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) t.join();
    }

    BlockPool(const BlockPool&) = delete;
    BlockPool& operator=(const BlockPool&) = delete;

    void submit(std::uint64_t sequence, BlockJob job) {
        {
            std::lock_guard lock(mutex_);
            queue_.emplace_back(sequence, std::move(job));
        }
        wake_.notify_one();
    }

    BlockResult take(std::uint64_t sequence) {
        std::unique_lock lock(mutex_);
        done_cv_.wait(lock, [&] { return error_ || done_.count(sequence); });
        if (error_) std::rethrow_exception(error_);
        auto out = std::move(done_[sequence]);
        done_.erase(sequence);
        return out;
    }

private:
    void work() {
        while (true) {
            std::pair<std::uint64_t, BlockJob> item;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stop_ || !queue_.empty(); });
                if (stop_) return;
                item = std::move(queue_.front());
                queue_.pop_front();
            }
            try {
                auto result = solve_block(std::move(item.second), cfg_);
                std::lock_guard lock(mutex_);
                done_.emplace(item.first, std::move(result));
            } catch (...) {
                std::lock_guard lock(mutex_);
                error_ = std::current_exception();
            }
            done_cv_.notify_all();
        }
    }

    const SolverConfig& cfg_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_cv_;
    std::deque<std::pair<std::uint64_t, BlockJob>> queue_;
    std::map<std::uint64_t, BlockResult> done_;
    std::exception_ptr error_;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

inline void account(SweepReport& report, const LevelSequence& tree, const std::optional<Certificate>& cert) {
    ++report.trees_total;
    if (cert) {
        ++report.trees_solved;
        ++report.solver_counts[static_cast<std::size_t>(cert->solver)];
    } else {
        report.failures.push_back(tree);
    }
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    if (!in) return lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// Brings the results file back to exactly the prefix the checkpoint vouches
// for and rebuilds the per-size tallies of that prefix.
inline std::map<int, SweepReport> reconcile_results(const std::filesystem::path& results, const Checkpoint& cp) {
    std::map<int, SweepReport> reports;
    std::map<int, FreeTreeStream> streams;
    auto stream_for = [&](int n) -> FreeTreeStream& {
        auto it = streams.find(n);
        if (it == streams.end()) {
            it = streams.emplace(n, free_trees(n)).first;
            reports[n].n = n;
        }
        return it->second;
    };

    std::uintmax_t keep_bytes = 0;
    int last_n = 0;
    for (const auto& line : read_lines(results)) {
        Certificate cert;
        try {
            cert = parse_certificate(line);
        } catch (const CertificateFormatError&) {
            break;
        }
        const int n = static_cast<int>(cert.levels.size());
        const auto it = cp.completed.find(n);
        if (n < last_n || it == cp.completed.end()) break;
        auto& stream = stream_for(n);
        auto& report = reports[n];
        bool matched = false;
        while (stream.index() < it->second) {
            auto seq = stream.next();
            if (!seq) break;
            if (*seq == cert.levels) {
                account(report, *seq, cert);
                matched = true;
                break;
            }
            account(report, *seq, std::nullopt);
        }
        if (!matched) break;
        last_n = n;
        keep_bytes += line.size() + 1;
    }
    // trees in the vouched prefix that have no certificate failed
    for (auto [n, done] : cp.completed) {
        auto& stream = stream_for(n);
        auto& report = reports[n];
        while (stream.index() < done) {
            auto seq = stream.next();
            if (!seq) break;
            account(report, *seq, std::nullopt);
        }
    }
    std::error_code ec;
    if (std::filesystem::exists(results, ec)) {
        std::filesystem::resize_file(results, keep_bytes, ec);
        if (ec) throw SweepError("cannot truncate " + results.string() + ": " + ec.message());
    } else if (keep_bytes == 0) {
        std::ofstream touch(results, std::ios::binary);
    }
    return reports;
}

inline double cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

}  // namespace detail

/// Solves every tree with n_min <= n <= n_max. Resumes from opts.checkpoint
/// when it exists (unless opts.fresh). Throws SweepError on I/O failures and on
/// a checkpoint that cannot be trusted.
inline SweepResult sweep(const SweepOptions& opts) {
    opts.cfg.validate();
    if (opts.n_min < 1 || opts.n_max < opts.n_min) throw std::invalid_argument("sweep: need 1 <= n_min <= n_max");
    if (opts.workers < 1) throw std::invalid_argument("sweep: workers must be >= 1");
    if (opts.block_size < 1) throw std::invalid_argument("sweep: block size must be >= 1");

    Checkpoint cp;
    cp.seed = opts.cfg.global_seed;
    std::map<int, SweepReport> reports;
    const bool resume = opts.checkpoint && !opts.fresh && std::filesystem::exists(*opts.checkpoint);
    if (resume) {
        std::ifstream in(*opts.checkpoint);
        if (!in) throw SweepError("cannot read checkpoint " + opts.checkpoint->string());
        cp = parse_checkpoint(in);
        if (cp.seed != opts.cfg.global_seed) throw SweepError("checkpoint was written with a different seed");
        if (cp.generator != kGeneratorVersion) throw SweepError("checkpoint was written by another generator version");
        for (auto [n, done] : cp.completed) {
            if (n < opts.n_min || n > opts.n_max) throw SweepError("checkpoint covers sizes outside the requested range");
        }
        reports = detail::reconcile_results(opts.results, cp);
    } else {
        std::ofstream truncate(opts.results, std::ios::binary | std::ios::trunc);
        if (!truncate) throw SweepError("cannot write " + opts.results.string());
    }

    // previously written report lines, kept only for sizes that are finished
    std::map<int, std::string> report_lines;
    if (resume && opts.report) {
        for (const auto& line : detail::read_lines(*opts.report)) {
            try {
                const auto j = nlohmann::json::parse(line);
                report_lines[j.at("n").get<int>()] = line;
            } catch (const std::exception&) {
                // dropped; rebuilt below if its size is finished
            }
        }
    }

    std::ofstream results(opts.results, std::ios::binary | std::ios::app);
    if (!results) throw SweepError("cannot write " + opts.results.string());
    std::string report_text;
    auto flush_report = [&](const SweepReport& r, const std::string* existing) {
        if (!opts.report) return;
        report_text += existing ? *existing : to_json(r).dump();
        report_text += "\n";
        write_file_atomically(*opts.report, report_text);
    };
    auto save_checkpoint = [&] {
        if (opts.checkpoint) write_file_atomically(*opts.checkpoint, format_checkpoint(cp));
    };
    if (opts.report && !resume) write_file_atomically(*opts.report, "");

    SweepResult out;
    std::uint64_t blocks_written = 0;
    detail::BlockPool pool(opts.workers, opts.cfg);
    const std::uint64_t window = static_cast<std::uint64_t>(opts.workers) * 2;

    for (int n = opts.n_min; n <= opts.n_max; ++n) {
        auto& report = reports[n];
        report.n = n;
        auto& completed = cp.completed[n];
        auto stream = free_trees(n);
        stream.skip(completed);

        detail::Stopwatch wall;
        const double cpu_start = detail::cpu_seconds();

        std::uint64_t submitted = 0, written = 0;
        bool exhausted = false;
        bool stopped = false;
        while (true) {
            while (!exhausted && submitted - written < window &&
                   !(opts.max_blocks && blocks_written + (submitted - written) >= *opts.max_blocks)) {
                detail::BlockJob job{n, stream.index(), {}};
                while (job.trees.size() < opts.block_size) {
                    auto seq = stream.next();
                    if (!seq) {
                        exhausted = true;
                        break;
                    }
                    job.trees.push_back(std::move(*seq));
                }
                if (job.trees.empty()) break;
                pool.submit(submitted++, std::move(job));
            }
            if (written == submitted) {
                stopped = !exhausted;
                break;
            }
            auto result = pool.take(written);
            std::string chunk;
            for (std::size_t k = 0; k < result.trees.size(); ++k) {
                const auto& cert = result.certificates[k];
                detail::account(report, result.trees[k], cert);
                if (cert) {
                    chunk += to_json_line(*cert);
                    chunk += "\n";
                }
            }
            results << chunk;
            results.flush();
            if (!results) throw SweepError("write to " + opts.results.string() + " failed");
            completed += result.certificates.size();
            ++written;
            ++blocks_written;
            save_checkpoint();
        }
        report.wall_time += wall.seconds();
        report.cpu_time += detail::cpu_seconds() - cpu_start;
        if (stopped) return out;

        save_checkpoint();
        const auto existing = report_lines.find(n);
        const bool was_finished = resume && existing != report_lines.end() && report.trees_total == completed &&
                                  written == 0;
        flush_report(report, was_finished ? &existing->second : nullptr);
        out.reports.push_back(report);
    }
    out.finished = true;
    return out;
}

}  // namespace harmonious

#endif  // HARMONIOUS_SWEEP_HPP
