#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varelim/engines.hpp"
#include "varelim/oracle.hpp"

namespace varelim {

struct VerifyConfig {
    std::vector<Rule> rules{std::begin(kEngineRules), std::end(kEngineRules)};
    std::size_t count = 500;
    std::uint64_t seed = 1;
    /// Fixed generator settings; the battery schedule otherwise.
    std::optional<GeneratorConfig> generator;
    bool parallel = true;
    EngineFault fault = EngineFault::none;
};

/// One battery instance under one rule. Optional fields are empty when the
/// check could not run (size guard) or does not apply (no solution).
struct VerifyRow {
    std::uint64_t seed = 0;
    Rule rule = Rule::exists_snake;
    std::size_t n_eliminated_naive = 0;
    std::size_t n_eliminated_engine = 0;
    bool same_result = true; ///< engine and naive agree on eliminated set and instance
    std::optional<bool> sat_before;
    std::optional<bool> sat_after;
    std::optional<bool> reconstruction_ok;
    std::string error;

    bool discrepancy() const;
};

/// Rows ordered by battery seed, then by the order of `cfg.rules`. The
/// parallel run gives the same rows as the serial one.
std::vector<VerifyRow> run_verification(const VerifyConfig& cfg);

void write_verify_csv(const std::vector<VerifyRow>& rows, std::ostream& out);

} // namespace varelim
