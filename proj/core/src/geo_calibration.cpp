#include "sensweep/geo_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "sensweep/augmentation.hpp"
#include "sensweep/csv.hpp"
#include "sensweep/errors.hpp"
#include "sensweep/parallel.hpp"

namespace sensweep {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

const char* provenance_name(CeilingProvenance p) {
    switch (p) {
        case CeilingProvenance::computed: return "computed";
        case CeilingProvenance::inherited: return "inherited";
        case CeilingProvenance::absent: return "absent";
    }
    return "?";
}
}  // namespace

CeilingMap CeilingTable::as_caps() const {
    CeilingMap caps;
    caps.reserve(ceilings.size());
    for (const auto& [id, entry] : ceilings) {
        if (entry.provenance != CeilingProvenance::absent) caps.emplace(id, entry.ceiling);
    }
    return caps;
}

double odds(double f) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw validation_error("odds: minority fraction outside [0, 1]");
    }
    if (f == 1.0) {
        throw validation_error("degenerate block group: no white population");
    }
    return f / (1.0 - f);
}

double weighted_quantile(std::span<const double> values,
                         std::span<const double> weights, double q) {
    if (values.size() != weights.size()) {
        throw validation_error("weighted_quantile: size mismatch");
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw validation_error("weighted_quantile: q outside [0, 1]");
    }
    std::vector<std::size_t> idx;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (weights[i] < 0.0) throw validation_error("weighted_quantile: negative weight");
        if (!std::isfinite(values[i])) {
            throw validation_error("weighted_quantile: nonfinite value");
        }
        if (weights[i] > 0.0) {
            idx.push_back(i);
            total += weights[i];
        }
    }
    if (idx.empty()) throw validation_error("weighted_quantile: all weights zero");
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    // smallest value whose cumulative share reaches q; comparison kept in the
    // weight scale so rescaling every weight is a no-op
    const double target = q * total;
    double cum = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        cum += weights[idx[r]];
        if (cum >= target) return values[idx[r]];
    }
    return values[idx.back()];
}

double geo_ceiling(std::span<const BlockGroupRecord> records, double xi,
                   std::vector<std::string>* warnings) {
    if (!(xi >= 0.0 && xi < 0.5)) {
        throw validation_error("geo_ceiling: xi outside [0, 0.5)");
    }
    std::vector<double> etas, weights;
    etas.reserve(records.size());
    weights.reserve(records.size());
    for (const auto& rec : records) {
        if (!(rec.minority_frac >= 0.0 && rec.minority_frac <= 1.0)) {
            throw validation_error("geo_ceiling: minority fraction outside [0, 1] in " +
                                   rec.stratum_id + "/" + rec.block_group_id);
        }
        if (rec.weight < 0.0) {
            throw validation_error("geo_ceiling: negative population weight in " +
                                   rec.stratum_id + "/" + rec.block_group_id);
        }
        if (rec.minority_frac == 1.0) {
            if (warnings) {
                warnings->push_back("excluded block group " + rec.block_group_id +
                                    " in stratum " + rec.stratum_id +
                                    ": no white population");
            }
            continue;
        }
        etas.push_back(odds(rec.minority_frac));
        weights.push_back(rec.weight);
    }
    if (etas.empty()) throw validation_error("geo_ceiling: no valid block groups");
    const double lo = weighted_quantile(etas, weights, xi);
    const double hi = weighted_quantile(etas, weights, 1.0 - xi);
    if (hi == lo) return 1.0;  // no within-stratum variation, including all-zero
    if (lo == 0.0) return kInf;
    return hi / lo;
}

CeilingTable build_ceiling_table(std::span<const BlockGroupRecord> records, double xi,
                                 int threads) {
    CeilingTable table;
    table.xi = xi;
    std::map<std::string, std::vector<BlockGroupRecord>> grouped;
    for (const auto& rec : records) grouped[rec.stratum_id].push_back(rec);

    std::vector<const std::vector<BlockGroupRecord>*> groups;
    std::vector<const std::string*> ids;
    for (const auto& [id, recs] : grouped) {
        ids.push_back(&id);
        groups.push_back(&recs);
    }
    std::vector<double> ceilings(groups.size());
    std::vector<std::vector<std::string>> warnings(groups.size());
    parallel_for(groups.size(), threads, [&](std::size_t i) {
        ceilings[i] = geo_ceiling(*groups[i], xi, &warnings[i]);
    });
    for (std::size_t i = 0; i < groups.size(); ++i) {
        table.ceilings.emplace(*ids[i],
                               CeilingEntry{ceilings[i], CeilingProvenance::computed});
        for (auto& w : warnings[i]) table.warnings.push_back(std::move(w));
    }
    return table;
}

CeilingTable inherit_ceilings(
    const CeilingTable& table,
    const std::unordered_map<std::string, std::string>& mapping) {
    CeilingTable out = table;
    for (const auto& [stratum, donor] : mapping) {
        auto donor_it = out.ceilings.find(donor);
        if (donor_it == out.ceilings.end()) {
            out.warnings.push_back("unknown donor stratum '" + donor + "' for '" +
                                   stratum + "'; left absent");
            continue;
        }
        if (donor_it->second.provenance != CeilingProvenance::computed) {
            throw validation_error("transitive inheritance not allowed: donor '" +
                                   donor + "' is not a computed ceiling");
        }
        out.ceilings[stratum] =
            CeilingEntry{donor_it->second.ceiling, CeilingProvenance::inherited};
    }
    return out;
}

double coverage_share(const StudySummary& summary, const CeilingTable& table,
                      double threshold, double rho, bool use_observed_sizes) {
    if (!(threshold >= 1.0)) {
        throw validation_error("coverage_share: threshold must be >= 1");
    }
    double covered = 0.0, total = 0.0;
    for (const auto& s : summary.strata) {
        double size;
        if (use_observed_sizes) {
            size = static_cast<double>(s.n1 + s.n0_obs);
        } else {
            size = static_cast<double>(augment(s, rho).n_tilde);
        }
        double ceiling = kInf;  // absent strata are unconstrained
        auto it = table.ceilings.find(s.stratum_id);
        if (it != table.ceilings.end() &&
            it->second.provenance != CeilingProvenance::absent) {
            ceiling = it->second.ceiling;
        }
        total += size;
        if (ceiling >= threshold) covered += size;
    }
    return total > 0.0 ? covered / total : 0.0;
}

std::vector<BlockGroupRecord> read_block_groups_csv(const std::filesystem::path& path) {
    csv::reader r(path, ',');
    const int c_s = r.column("stratum_id"), c_b = r.column("block_group_id"),
              c_f = r.column("minority_frac"), c_w = r.column("population");
    if (c_s < 0 || c_b < 0 || c_f < 0 || c_w < 0) {
        throw validation_error("block-group file missing required columns: " +
                               path.string());
    }
    std::vector<BlockGroupRecord> out;
    std::vector<std::string> fields;
    while (r.next(fields)) {
        BlockGroupRecord rec;
        rec.stratum_id = fields[static_cast<std::size_t>(c_s)];
        rec.block_group_id = fields[static_cast<std::size_t>(c_b)];
        try {
            rec.minority_frac = std::stod(fields[static_cast<std::size_t>(c_f)]);
            rec.weight = std::stod(fields[static_cast<std::size_t>(c_w)]);
        } catch (const std::exception&) {
            throw validation_error("bad numeric field at row " + std::to_string(r.row()) +
                                   " in " + path.string());
        }
        if (rec.stratum_id.empty()) {
            throw validation_error("empty stratum_id at row " + std::to_string(r.row()));
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::unordered_map<std::string, std::string> read_donor_csv(
    const std::filesystem::path& path) {
    csv::reader r(path, ',');
    const int c_s = r.column("stratum_id"), c_d = r.column("donor_stratum_id");
    if (c_s < 0 || c_d < 0) {
        throw validation_error("donor file missing required columns: " + path.string());
    }
    std::unordered_map<std::string, std::string> out;
    std::vector<std::string> fields;
    while (r.next(fields)) {
        out[fields[static_cast<std::size_t>(c_s)]] =
            fields[static_cast<std::size_t>(c_d)];
    }
    return out;
}

void write_ceilings_csv(const CeilingTable& table, const StudySummary* summary,
                        const std::filesystem::path& path,
                        const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path.string());
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    out << "stratum_id,ceiling,provenance\n";
    auto write_row = [&](const std::string& id, const CeilingEntry& e) {
        out << id << ',' << csv::format_double(e.ceiling) << ','
            << provenance_name(e.provenance) << "\n";
    };
    if (summary) {
        // one row per analysis stratum, absent where no geography resolved
        for (const auto& s : summary->strata) {
            auto it = table.ceilings.find(s.stratum_id);
            if (it != table.ceilings.end()) {
                write_row(s.stratum_id, it->second);
            } else {
                write_row(s.stratum_id, CeilingEntry{kInf, CeilingProvenance::absent});
            }
        }
    } else {
        std::vector<const std::string*> ids;
        for (const auto& [id, _] : table.ceilings) ids.push_back(&id);
        std::sort(ids.begin(), ids.end(),
                  [](const std::string* a, const std::string* b) { return *a < *b; });
        for (const auto* id : ids) write_row(*id, table.ceilings.at(*id));
    }
}

}  // namespace sensweep
