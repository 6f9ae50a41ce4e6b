#pragma once

// Demographic ceilings on the per-stratum odds bound.  For every block group
// the minority-to-white population odds is eta = f/(1-f); a stratum's ceiling
// is the ratio of the (1-xi)-th to the xi-th population-weighted quantile of
// eta over its block groups.  Strata with no usable geography inherit a
// donor's ceiling or stay unconstrained.

#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensweep/data_model.hpp"
#include "sensweep/inference.hpp"

namespace sensweep {

struct BlockGroupRecord {
    std::string stratum_id;
    std::string block_group_id;
    double minority_frac = 0.0;  // f_b in [0, 1]
    double weight = 0.0;         // population count
};

enum class CeilingProvenance { computed, inherited, absent };

struct CeilingEntry {
    double ceiling = 1.0;  // +inf when the lower quantile is zero
    CeilingProvenance provenance = CeilingProvenance::computed;
};

struct CeilingTable {
    double xi = 0.0;
    std::unordered_map<std::string, CeilingEntry> ceilings;
    std::vector<std::string> warnings;

    // Per-stratum caps for the sweeps; absent strata are simply missing
    // (unconstrained).
    CeilingMap as_caps() const;
};

// Minority-to-white odds f/(1-f); f == 1 is degenerate (no white population).
double odds(double f);

// Left-continuous population-weighted quantile: smallest value whose
// cumulative weight share reaches q.  Zero-weight entries never contribute.
double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q);

// Ceiling for one stratum's block groups; records with f == 1 are excluded
// (warning appended).  Returns +inf when the lower trimmed quantile is zero
// while the upper is not; equal quantiles give exactly 1.
double geo_ceiling(std::span<const BlockGroupRecord> records, double xi,
                   std::vector<std::string>* warnings = nullptr);

// One ceiling per stratum appearing in `records`; provenance "computed".
CeilingTable build_ceiling_table(std::span<const BlockGroupRecord> records, double xi,
                                 int threads = 0);

// Copy donor ceilings onto strata without geography.  Donors must be
// computed entries; inheriting from an inherited entry is refused.
CeilingTable inherit_ceilings(
    const CeilingTable& table,
    const std::unordered_map<std::string, std::string>& mapping);

// Encounter-weighted share of strata whose ceiling reaches `threshold`.
// Weights are augmented stratum sizes at `rho` (observed sizes when
// use_observed_sizes).  Strata missing from the table count as unconstrained.
double coverage_share(const StudySummary& summary, const CeilingTable& table,
                      double threshold, double rho, bool use_observed_sizes = false);

std::vector<BlockGroupRecord> read_block_groups_csv(const std::filesystem::path& path);
std::unordered_map<std::string, std::string> read_donor_csv(
    const std::filesystem::path& path);
void write_ceilings_csv(const CeilingTable& table, const StudySummary* summary,
                        const std::filesystem::path& path,
                        const std::string& config_comment = {});

}  // namespace sensweep
