#ifndef HARMONIOUS_CERTIFICATE_HPP
#define HARMONIOUS_CERTIFICATE_HPP

// Certificates: one JSON object per line,
//
//   {"n":4,"levels":[0,1,2,1],"labels":[0,0,1,2],"solver":"twostage","seed":17}
//
// labels are an onto labelling normalized so that the duplicated value is 0.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "labelling.hpp"
#include "solver.hpp"
#include "tree.hpp"

namespace harmonious {

struct Certificate {
    LevelSequence levels;
    std::vector<int> labels;
    SolverTag solver = SolverTag::TwoStage;
    std::uint64_t seed = 0;

    bool operator==(const Certificate&) const = default;
};

class CertificateFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Normalizes a successful outcome into a certificate for `tree`.
inline Certificate make_certificate(const Tree& tree, const SolveOutcome& outcome, std::uint64_t seed) {
    if (!outcome.success || !outcome.labelling || !outcome.solver) {
        throw std::invalid_argument("make_certificate: outcome is not a success");
    }
    auto normalized = normalize(tree, *outcome.labelling);
    return {{tree.levels().begin(), tree.levels().end()}, std::move(normalized.labels), *outcome.solver, seed};
}

inline std::string to_json_line(const Certificate& c) {
    nlohmann::ordered_json j;
    j["n"] = c.levels.size();
    j["levels"] = c.levels;
    j["labels"] = c.labels;
    j["solver"] = std::string(to_string(c.solver));
    j["seed"] = c.seed;
    return j.dump();
}

inline Certificate parse_certificate(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw CertificateFormatError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CertificateFormatError("record is not a JSON object");
    for (const char* key : {"n", "levels", "labels", "solver", "seed"}) {
        if (!j.contains(key)) throw CertificateFormatError(std::string("missing field '") + key + "'");
    }
    auto int_array = [&](const char* key) {
        const auto& a = j.at(key);
        if (!a.is_array()) throw CertificateFormatError(std::string("field '") + key + "' is not an array");
        std::vector<int> out;
        for (const auto& x : a) {
            if (!x.is_number_integer()) {
                throw CertificateFormatError(std::string("field '") + key + "' holds a non-integer");
            }
            const auto v = x.get<long long>();
            if (v < -1'000'000'000LL || v > 1'000'000'000LL) {
                throw CertificateFormatError(std::string("field '") + key + "' holds an out-of-range value");
            }
            out.push_back(static_cast<int>(v));
        }
        return out;
    };
    Certificate c;
    if (!j.at("n").is_number_unsigned()) throw CertificateFormatError("field 'n' is not a non-negative integer");
    const auto n = j.at("n").get<std::uint64_t>();
    c.levels = int_array("levels");
    c.labels = int_array("labels");
    if (n != c.levels.size()) throw CertificateFormatError("field 'n' does not match the level sequence");
    if (!j.at("solver").is_string()) throw CertificateFormatError("field 'solver' is not a string");
    const auto tag = parse_solver_tag(j.at("solver").get<std::string>());
    if (!tag) throw CertificateFormatError("unknown solver '" + j.at("solver").get<std::string>() + "'");
    c.solver = *tag;
    if (!j.at("seed").is_number_unsigned()) throw CertificateFormatError("field 'seed' is not an unsigned integer");
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

/// Re-checks a certificate from its level sequence and labels alone.
inline Verdict verify_certificate(const Certificate& c) {
    const auto verdict = verify_labelling(c.levels, c.labels, LabelModel::Onto);
    if (!verdict || c.levels.size() <= 1) return verdict;
    std::vector<int> seen(c.levels.size() - 1, 0);
    for (int l : c.labels) {
        if (++seen[l] == 2 && l != 0) return {VerifyReason::NotNormalized};
    }
    return {};
}

}  // namespace harmonious

#endif  // HARMONIOUS_CERTIFICATE_HPP
