#ifndef NILOPS_LAWS_HPP
#define NILOPS_LAWS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nilops/modules.hpp"

namespace nilops::laws {

struct LawParams {
    std::map<std::string, std::int64_t> ints;
    std::uint64_t seed = 0;

    std::int64_t get(const std::string& key, std::int64_t fallback) const {
        auto it = ints.find(key);
        return it == ints.end() ? fallback : it->second;
    }
};

struct LawReport {
    std::string id;
    LawParams params;
    enum class Verdict { Verified, Refuted, Undetermined };
    Verdict verdict = Verdict::Undetermined;
    bool expected_refuted = false;  // a refutation here documents a known discrepancy
    bool error = false;             // the run itself failed (exception)
    std::string domain;             // what the run actually covered
    std::string witness;            // replayable data for refutations / notes
    double seconds = 0.0;           // in-memory only; never serialized

    bool acceptable() const {
        if (error)
            return false;
        if (verdict == Verdict::Refuted)
            return expected_refuted;
        return true;
    }
};

struct LawDef {
    std::string id;
    bool expected_refuted = false;
    std::string summary;
    std::vector<LawParams> default_instances;
};

const std::vector<LawDef>& registry();

/// Run one law with explicit parameters (unknown id is an error).
LawReport run_law(const std::string& id, const LawParams& params);

/// Run the default instances of every law whose id is in the filter (all
/// when the filter is empty), with the given suite seed where an instance
/// does not pin its own. Reports come back in registry order.
std::vector<LawReport> run_suite(const std::vector<std::string>& only, std::uint64_t seed);

bool suite_ok(const std::vector<LawReport>& reports);

std::string reports_to_text(const std::vector<LawReport>& reports);
std::string reports_to_json(const std::vector<LawReport>& reports);

/// Seeded generator of valid finite unstable modules (valid by
/// construction: sums, suspensions and truncations of closed-form modules,
/// then random submodules and quotients).
modules::FiniteUnstableModule random_finite_module(std::uint64_t seed, int max_top, int max_dim);

}  // namespace nilops::laws

#endif
