#pragma once

// Encounter-level ingestion and reduction to immutable per-stratum
// sufficient statistics.  Every record is a stopped encounter: `treated`
// distinguishes minority-civilian (1) from white-civilian (0) encounters and
// `outcome` is the binary force indicator.  All downstream analysis consumes
// only the per-stratum counts collected here.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sensweep {

struct EncounterRecord {
    std::string stratum_id;
    std::int8_t treated = 0;  // 1 = minority civilian, 0 = white civilian
    std::int8_t outcome = 0;  // 1 = force used
};

struct StratumSummary {
    std::string stratum_id;
    std::int64_t n1 = 0;      // treated encounters
    std::int64_t n0_obs = 0;  // observed (stopped) control encounters
    std::int64_t sum_y1 = 0;  // treated force outcomes
    std::int64_t sum_y0 = 0;  // observed control force outcomes
};

struct StudySummary {
    std::vector<StratumSummary> strata;   // sorted by stratum_id
    bool informative_only = false;
};

struct FilterResult {
    StudySummary summary;
    std::size_t strata_excluded = 0;
    double encounter_share_excluded = 0.0;
};

struct InputSchema {
    std::string stratum_col = "stratum_id";
    std::string treated_col = "treated";
    std::string outcome_col = "outcome";
    char delimiter = ',';
};

// One record per data row, in file order.  Errors name the offending data
// row (1-based, header excluded).
std::vector<EncounterRecord> load_encounters(const std::filesystem::path& path,
                                             const InputSchema& schema = {});

// Exact tallies per distinct stratum_id, sorted by id.  Order-insensitive.
StudySummary summarize(std::span<const EncounterRecord> records);

// Streaming variant: summarize a file without materializing the records.
StudySummary summarize_file(const std::filesystem::path& path,
                            const InputSchema& schema = {});

// Drop strata without at least one treated and one observed control
// encounter; reports how much was excluded.
FilterResult filter_informative(const StudySummary& summary);

void write_summary_csv(const StudySummary& summary, const std::filesystem::path& path,
                       const std::string& config_comment = {});
StudySummary read_summary_csv(const std::filesystem::path& path);

}  // namespace sensweep
