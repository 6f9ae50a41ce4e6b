#include "sensweep/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <unordered_map>

#include "sensweep/csv.hpp"
#include "sensweep/errors.hpp"

namespace sensweep {

namespace {

std::int8_t parse_binary(const std::string& field, const std::string& col,
                         std::size_t row) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw validation_error("non-binary value '" + field + "' in column '" + col +
                           "' at row " + std::to_string(row));
}

struct ColumnIndices {
    int stratum, treated, outcome;
};

ColumnIndices resolve_columns(const csv::reader& r, const InputSchema& schema) {
    ColumnIndices idx{r.column(schema.stratum_col), r.column(schema.treated_col),
                      r.column(schema.outcome_col)};
    if (idx.stratum < 0)
        throw validation_error("missing column '" + schema.stratum_col + "' in " +
                               r.path().string());
    if (idx.treated < 0)
        throw validation_error("missing column '" + schema.treated_col + "' in " +
                               r.path().string());
    if (idx.outcome < 0)
        throw validation_error("missing column '" + schema.outcome_col + "' in " +
                               r.path().string());
    return idx;
}

template <typename Fn>
void for_each_encounter(const std::filesystem::path& path, const InputSchema& schema,
                        Fn&& fn) {
    csv::reader r(path, schema.delimiter);
    const ColumnIndices idx = resolve_columns(r, schema);
    const std::size_t needed =
        static_cast<std::size_t>(std::max({idx.stratum, idx.treated, idx.outcome})) + 1;
    std::vector<std::string> fields;
    while (r.next(fields)) {
        if (fields.size() < needed) {
            throw validation_error("too few fields at row " + std::to_string(r.row()) +
                                   " in " + path.string());
        }
        EncounterRecord rec;
        rec.stratum_id = fields[static_cast<std::size_t>(idx.stratum)];
        if (rec.stratum_id.empty()) {
            throw validation_error("empty stratum_id at row " + std::to_string(r.row()));
        }
        rec.treated =
            parse_binary(fields[static_cast<std::size_t>(idx.treated)],
                         schema.treated_col, r.row());
        rec.outcome =
            parse_binary(fields[static_cast<std::size_t>(idx.outcome)],
                         schema.outcome_col, r.row());
        fn(std::move(rec));
    }
}

void tally(StratumSummary& s, const EncounterRecord& rec) {
    if (rec.treated) {
        ++s.n1;
        s.sum_y1 += rec.outcome;
    } else {
        ++s.n0_obs;
        s.sum_y0 += rec.outcome;
    }
}

StudySummary finish(std::unordered_map<std::string, StratumSummary>&& acc) {
    StudySummary out;
    out.strata.reserve(acc.size());
    for (auto& [id, s] : acc) out.strata.push_back(std::move(s));
    std::sort(out.strata.begin(), out.strata.end(),
              [](const StratumSummary& a, const StratumSummary& b) {
                  return a.stratum_id < b.stratum_id;
              });
    return out;
}

std::int64_t parse_count(const std::string& field, const std::string& col,
                         std::size_t row) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || v < 0) {
        throw validation_error("bad count '" + field + "' in column '" + col +
                               "' at row " + std::to_string(row));
    }
    return v;
}

}  // namespace

std::vector<EncounterRecord> load_encounters(const std::filesystem::path& path,
                                             const InputSchema& schema) {
    std::vector<EncounterRecord> out;
    for_each_encounter(path, schema, [&](EncounterRecord&& rec) {
        out.push_back(std::move(rec));
    });
    return out;
}

StudySummary summarize(std::span<const EncounterRecord> records) {
    std::unordered_map<std::string, StratumSummary> acc;
    acc.reserve(records.size() / 4 + 16);
    for (const auto& rec : records) {
        auto [it, inserted] = acc.try_emplace(rec.stratum_id);
        if (inserted) it->second.stratum_id = rec.stratum_id;
        tally(it->second, rec);
    }
    return finish(std::move(acc));
}

StudySummary summarize_file(const std::filesystem::path& path,
                            const InputSchema& schema) {
    std::unordered_map<std::string, StratumSummary> acc;
    for_each_encounter(path, schema, [&](EncounterRecord&& rec) {
        auto [it, inserted] = acc.try_emplace(rec.stratum_id);
        if (inserted) it->second.stratum_id = rec.stratum_id;
        tally(it->second, rec);
    });
    return finish(std::move(acc));
}

FilterResult filter_informative(const StudySummary& summary) {
    FilterResult res;
    res.summary.informative_only = true;
    std::int64_t kept_encounters = 0, dropped_encounters = 0;
    for (const auto& s : summary.strata) {
        if (s.n1 >= 1 && s.n0_obs >= 1) {
            res.summary.strata.push_back(s);
            kept_encounters += s.n1 + s.n0_obs;
        } else {
            ++res.strata_excluded;
            dropped_encounters += s.n1 + s.n0_obs;
        }
    }
    if (res.summary.strata.empty()) {
        throw validation_error("no informative strata");
    }
    const std::int64_t total = kept_encounters + dropped_encounters;
    res.encounter_share_excluded =
        total > 0 ? static_cast<double>(dropped_encounters) / static_cast<double>(total)
                  : 0.0;
    return res;
}

void write_summary_csv(const StudySummary& summary, const std::filesystem::path& path,
                       const std::string& config_comment) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write file: " + path.string());
    if (!config_comment.empty()) out << "# " << config_comment << "\n";
    out << "stratum_id,n1,n0_obs,sum_y1,sum_y0\n";
    for (const auto& s : summary.strata) {
        out << s.stratum_id << ',' << s.n1 << ',' << s.n0_obs << ',' << s.sum_y1 << ','
            << s.sum_y0 << "\n";
    }
}

StudySummary read_summary_csv(const std::filesystem::path& path) {
    csv::reader r(path, ',');
    const int c_id = r.column("stratum_id"), c_n1 = r.column("n1"),
              c_n0 = r.column("n0_obs"), c_y1 = r.column("sum_y1"),
              c_y0 = r.column("sum_y0");
    if (c_id < 0 || c_n1 < 0 || c_n0 < 0 || c_y1 < 0 || c_y0 < 0) {
        throw validation_error("summary file missing required columns: " + path.string());
    }
    StudySummary out;
    std::vector<std::string> fields;
    while (r.next(fields)) {
        StratumSummary s;
        s.stratum_id = fields[static_cast<std::size_t>(c_id)];
        if (s.stratum_id.empty()) {
            throw validation_error("empty stratum_id at row " + std::to_string(r.row()));
        }
        s.n1 = parse_count(fields[static_cast<std::size_t>(c_n1)], "n1", r.row());
        s.n0_obs = parse_count(fields[static_cast<std::size_t>(c_n0)], "n0_obs", r.row());
        s.sum_y1 = parse_count(fields[static_cast<std::size_t>(c_y1)], "sum_y1", r.row());
        s.sum_y0 = parse_count(fields[static_cast<std::size_t>(c_y0)], "sum_y0", r.row());
        if (s.sum_y1 > s.n1 || s.sum_y0 > s.n0_obs) {
            throw validation_error("outcome sum exceeds count at row " +
                                   std::to_string(r.row()));
        }
        out.strata.push_back(std::move(s));
    }
    std::sort(out.strata.begin(), out.strata.end(),
              [](const StratumSummary& a, const StratumSummary& b) {
                  return a.stratum_id < b.stratum_id;
              });
    for (std::size_t i = 1; i < out.strata.size(); ++i) {
        if (out.strata[i].stratum_id == out.strata[i - 1].stratum_id) {
            throw validation_error("duplicate stratum_id in summary: " +
                                   out.strata[i].stratum_id);
        }
    }
    return out;
}

}  // namespace sensweep
