// Command-line surface for the stratified selection/assignment sensitivity
// pipeline: summarize encounter files, compute tilted estimates, sweep
// (rho, Gamma) grids, invert tests into confidence sets, extract
// changepoints, calibrate demographic ceilings, and run the oracle
// verification battery.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sensweep/augmentation.hpp"
#include "sensweep/csv.hpp"
#include "sensweep/data_model.hpp"
#include "sensweep/errors.hpp"
#include "sensweep/geo_calibration.hpp"
#include "sensweep/inference.hpp"
#include "sensweep/oracle.hpp"
#include "sensweep/parallel.hpp"

namespace {

using namespace sensweep;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitGuard = 2;
constexpr int kExitOracle = 3;

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double start = 0, stop = 0, step = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3) {
            throw validation_error("bad grid spec '" + spec + "' (want start:stop:step)");
        }
        if (!(step > 0)) throw validation_error("grid step must be > 0");
        if (stop < start) throw validation_error("grid stop below start");
        const double fuzz = step * 1e-9;
        for (int i = 0;; ++i) {
            const double v = start + i * step;
            if (v > stop + fuzz) break;
            out.push_back(std::min(v, stop));
        }
    } else {
        std::stringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw validation_error("bad grid value '" + tok + "'");
            }
        }
    }
    if (out.empty()) throw validation_error("grid spec '" + spec + "' has no points");
    return out;
}

struct InputOptions {
    std::string encounters;  // encounter-level CSV
    std::string summary;     // precomputed stratum-summary CSV
    std::string stratum_col = "stratum_id";
    std::string treated_col = "treated";
    std::string outcome_col = "outcome";
    std::string delimiter = ",";

    void attach(CLI::App* cmd, bool required) {
        auto* in = cmd->add_option("--input", encounters,
                                   "Encounter-level CSV (one row per stop)");
        auto* sm = cmd->add_option("--summary", summary,
                                   "Precomputed stratum-summary CSV");
        in->excludes(sm);
        if (required) {
            // one of the two must be present; checked at load time for a
            // friendlier message
        }
        cmd->add_option("--stratum-col", stratum_col, "Stratum id column name")
            ->capture_default_str();
        cmd->add_option("--treated-col", treated_col, "Treated indicator column name")
            ->capture_default_str();
        cmd->add_option("--outcome-col", outcome_col, "Outcome indicator column name")
            ->capture_default_str();
        cmd->add_option("--delimiter", delimiter, "Field delimiter")
            ->capture_default_str();
    }

    InputSchema schema() const {
        if (delimiter.size() != 1) {
            throw validation_error("--delimiter must be a single character");
        }
        return InputSchema{stratum_col, treated_col, outcome_col, delimiter[0]};
    }

    StudySummary load_raw() const {
        if (!summary.empty()) return read_summary_csv(summary);
        if (!encounters.empty()) return summarize_file(encounters, schema());
        throw validation_error("provide --input or --summary");
    }

    // informative summary for the analysis commands, exclusions to stderr
    StudySummary load_informative() const {
        const StudySummary raw = load_raw();
        const FilterResult res = filter_informative(raw);
        if (res.strata_excluded > 0) {
            std::fprintf(stderr,
                         "note: excluded %zu uninformative strata (%.4f of encounters)\n",
                         res.strata_excluded, res.encounter_share_excluded);
        }
        return res.summary;
    }
};

std::string grid_to_string(const std::vector<double>& g) {
    if (g.size() > 6) {
        return csv::format_double(g.front()) + ".." + csv::format_double(g.back()) +
               " (" + std::to_string(g.size()) + " points)";
    }
    std::string s;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) s += ",";
        s += csv::format_double(g[i]);
    }
    return s;
}

int direction_from(const std::string& s) {
    if (s == "+1" || s == "1" || s == "upper" || s == "greater") return +1;
    if (s == "-1" || s == "lower" || s == "less") return -1;
    throw validation_error("--direction must be upper|lower|+1|-1");
}

CeilingMap load_caps(const std::string& ceilings_path) {
    CeilingMap caps;
    if (ceilings_path.empty()) return caps;
    csv::reader r(ceilings_path, ',');
    const int c_id = r.column("stratum_id"), c_ceil = r.column("ceiling"),
              c_prov = r.column("provenance");
    if (c_id < 0 || c_ceil < 0) {
        throw validation_error("ceilings file missing stratum_id/ceiling columns");
    }
    std::vector<std::string> fields;
    while (r.next(fields)) {
        if (c_prov >= 0 && fields[static_cast<std::size_t>(c_prov)] == "absent") {
            continue;
        }
        const std::string& raw = fields[static_cast<std::size_t>(c_ceil)];
        double v;
        if (raw == "inf" || raw == "+inf") {
            v = std::numeric_limits<double>::infinity();
        } else {
            try {
                v = std::stod(raw);
            } catch (const std::exception&) {
                throw validation_error("bad ceiling value '" + raw + "' at row " +
                                       std::to_string(r.row()));
            }
        }
        caps[fields[static_cast<std::size_t>(c_id)]] = v;
    }
    return caps;
}

RhoMap load_rho_overrides(const std::string& path) {
    RhoMap out;
    if (path.empty()) return out;
    csv::reader r(path, ',');
    const int c_id = r.column("stratum_id"), c_rho = r.column("rho_lb");
    if (c_id < 0 || c_rho < 0) {
        throw validation_error("rho file missing stratum_id/rho_lb columns");
    }
    std::vector<std::string> fields;
    while (r.next(fields)) {
        double v;
        try {
            v = std::stod(fields[static_cast<std::size_t>(c_rho)]);
        } catch (const std::exception&) {
            throw validation_error("bad rho_lb value at row " + std::to_string(r.row()));
        }
        if (!(v >= 0.0 && v < 1.0)) {
            throw validation_error("rho_lb outside [0, 1) at row " + std::to_string(r.row()));
        }
        out[fields[static_cast<std::size_t>(c_id)]] = v;
    }
    return out;
}

void emit(const std::string& text, const std::string& out_path, bool to_stdout) {
    if (to_stdout || out_path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw validation_error("cannot write file: " + out_path);
        out << text;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint sequential sensitivity analysis for stratified binary outcomes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file; command-line flags override it");

    int threads = 0;
    app.add_option("--threads", threads,
                   "Worker threads (0 = all cores); env SENSWEEP_THREADS")
        ->envname("SENSWEEP_THREADS")
        ->capture_default_str();

    // ---- summarize ----------------------------------------------------------
    auto* cmd_sum = app.add_subcommand("summarize", "Reduce encounters to stratum summaries");
    InputOptions sum_in;
    sum_in.attach(cmd_sum, true);
    std::string sum_out;
    bool sum_informative = false, sum_stdout = false;
    cmd_sum->add_option("--out", sum_out, "Output summary CSV");
    cmd_sum->add_flag("--informative-only", sum_informative,
                      "Drop strata lacking a treated or a control encounter");
    cmd_sum->add_flag("--stdout", sum_stdout, "Write the CSV to standard output");

    // ---- estimate -----------------------------------------------------------
    auto* cmd_est = app.add_subcommand("estimate", "Single tilted estimate at one (rho, Gamma, tau0)");
    InputOptions est_in;
    est_in.attach(cmd_est, true);
    double est_rho = 0.0, est_gamma = 1.0, est_tau0 = 0.0;
    std::string est_dir = "upper", est_ceilings, est_out, est_rho_file;
    cmd_est->add_option("--rho", est_rho, "Selection lower bound in [0,1)")
        ->capture_default_str();
    cmd_est->add_option("--gamma", est_gamma, "Assignment odds bound >= 1")
        ->capture_default_str();
    cmd_est->add_option("--tau0", est_tau0, "Null value")->capture_default_str();
    cmd_est->add_option("--direction", est_dir, "upper|lower")->capture_default_str();
    cmd_est->add_option("--ceilings", est_ceilings, "Per-stratum ceiling CSV");
    cmd_est->add_option("--rho-file", est_rho_file,
                        "Per-stratum rho_lb CSV overriding --rho");
    cmd_est->add_option("--out", est_out, "Optional single-row CSV");

    // ---- sweep --------------------------------------------------------------
    auto* cmd_swp = app.add_subcommand("sweep", "p-value sweep over a (rho, Gamma) grid");
    InputOptions swp_in;
    swp_in.attach(cmd_swp, true);
    std::string swp_rho, swp_gamma, swp_dir = "upper", swp_ceilings, swp_out,
        swp_rho_file;
    double swp_tau0 = 0.0;
    bool swp_stdout = false;
    cmd_swp->add_option("--rho-grid", swp_rho, "start:stop:step or comma list")
        ->required();
    cmd_swp->add_option("--gamma-grid", swp_gamma, "start:stop:step or comma list")
        ->required();
    cmd_swp->add_option("--tau0", swp_tau0, "Null value")->capture_default_str();
    cmd_swp->add_option("--direction", swp_dir, "upper|lower")->capture_default_str();
    cmd_swp->add_option("--ceilings", swp_ceilings, "Per-stratum ceiling CSV");
    cmd_swp->add_option("--rho-file", swp_rho_file,
                        "Per-stratum rho_lb CSV pinning mapped strata");
    cmd_swp->add_option("--out", swp_out, "Output CSV");
    cmd_swp->add_flag("--stdout", swp_stdout, "Write the CSV to standard output");

    // ---- confset / changepoint ----------------------------------------------
    auto* cmd_cs = app.add_subcommand("confset", "Confidence sets by test inversion");
    auto* cmd_cp = app.add_subcommand("changepoint", "Smallest Gamma whose set contains zero");
    InputOptions cs_in, cp_in;
    cs_in.attach(cmd_cs, true);
    cp_in.attach(cmd_cp, true);
    struct ConfArgs {
        std::string rho, gamma, tau, ceilings, out, rho_file;
        double alpha = 0.05;
        bool to_stdout = false;
    } cs_args, cp_args;
    for (auto [cmd, args] : {std::pair{cmd_cs, &cs_args}, std::pair{cmd_cp, &cp_args}}) {
        cmd->add_option("--rho-grid", args->rho, "start:stop:step or comma list")
            ->required();
        cmd->add_option("--gamma-grid", args->gamma, "start:stop:step or comma list")
            ->required();
        cmd->add_option("--tau-grid", args->tau, "Null grid, start:stop:step or list")
            ->required();
        cmd->add_option("--alpha", args->alpha, "Level of the inverted test")
            ->capture_default_str();
        cmd->add_option("--ceilings", args->ceilings, "Per-stratum ceiling CSV");
        cmd->add_option("--rho-file", args->rho_file,
                        "Per-stratum rho_lb CSV pinning mapped strata");
        cmd->add_option("--out", args->out, "Output CSV");
        cmd->add_flag("--stdout", args->to_stdout, "Write the CSV to standard output");
    }

    // ---- calibrate ------------------------------------------------------------
    auto* cmd_cal = app.add_subcommand("calibrate", "Demographic ceilings from block groups");
    InputOptions cal_in;
    cal_in.attach(cmd_cal, false);
    std::string cal_bg, cal_donors, cal_out;
    double cal_xi = 0.0, cal_rho = 0.0, cal_threshold = 0.0;
    bool cal_stdout = false, cal_observed = false;
    cmd_cal->add_option("--blockgroups", cal_bg, "Block-group CSV")->required();
    cmd_cal->add_option("--donors", cal_donors, "Donor mapping CSV");
    cmd_cal->add_option("--xi", cal_xi, "Tail trimming fraction in [0, 0.5)")
        ->capture_default_str();
    cmd_cal->add_option("--rho", cal_rho, "Augmentation level for coverage weights")
        ->capture_default_str();
    cmd_cal->add_option("--threshold", cal_threshold,
                        "Report the encounter share with ceiling >= threshold");
    cmd_cal->add_flag("--observed-sizes", cal_observed,
                      "Weight coverage by observed instead of augmented sizes");
    cmd_cal->add_option("--out", cal_out, "Output ceilings CSV");
    cmd_cal->add_flag("--stdout", cal_stdout, "Write the CSV to standard output");

    // ---- verify ----------------------------------------------------------------
    auto* cmd_ver = app.add_subcommand("verify", "Run the oracle verification battery");
    std::uint64_t ver_seed = 20260810;
    int ver_max_n = 8;
    std::int64_t ver_reps = 2000;
    bool ver_quick = false;
    std::string ver_out;
    cmd_ver->add_option("--seed", ver_seed, "Monte Carlo seed")->capture_default_str();
    cmd_ver->add_option("--max-n", ver_max_n, "Exhaustive scan ceiling")
        ->capture_default_str();
    cmd_ver->add_option("--reps", ver_reps, "Monte Carlo replications")
        ->capture_default_str();
    cmd_ver->add_flag("--quick", ver_quick, "Skip the long Monte Carlo checks");
    cmd_ver->add_option("--out", ver_out, "Write the check report as CSV");

    // let global options (--threads, --config) appear after the subcommand
    for (auto* sc : {cmd_sum, cmd_est, cmd_swp, cmd_cs, cmd_cp, cmd_cal, cmd_ver}) {
        sc->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cmd_sum->parsed()) {
            StudySummary summary = sum_in.load_raw();
            std::string note = "sensweep summarize informative_only=" +
                               std::string(sum_informative ? "1" : "0");
            if (sum_informative) {
                const auto res = filter_informative(summary);
                std::fprintf(stderr,
                             "note: excluded %zu strata (%.4f of encounters)\n",
                             res.strata_excluded, res.encounter_share_excluded);
                summary = res.summary;
            }
            if (sum_out.empty() && !sum_stdout) {
                throw validation_error("summarize: provide --out or --stdout");
            }
            if (!sum_out.empty()) {
                write_summary_csv(summary, sum_out, note);
            }
            if (sum_stdout) {
                std::ostringstream os;
                os << "# " << note << "\nstratum_id,n1,n0_obs,sum_y1,sum_y0\n";
                for (const auto& s : summary.strata) {
                    os << s.stratum_id << ',' << s.n1 << ',' << s.n0_obs << ','
                       << s.sum_y1 << ',' << s.sum_y0 << "\n";
                }
                std::fputs(os.str().c_str(), stdout);
            }
            std::fprintf(stderr, "wrote %zu strata\n", summary.strata.size());
            return kExitOk;
        }

        if (cmd_est->parsed()) {
            const StudySummary summary = est_in.load_informative();
            const CeilingMap caps = load_caps(est_ceilings);
            const RhoMap rho_map = load_rho_overrides(est_rho_file);
            const int dir = direction_from(est_dir);
            const SweepCell cell =
                estimate_cell(summary, est_rho, est_gamma, est_tau0, dir,
                              caps.empty() ? nullptr : &caps,
                              rho_map.empty() ? nullptr : &rho_map);
            if (!cell.ok) throw guard_error(cell.error);
            if (cell.se_degenerate) {
                std::fprintf(stderr, "warning: degenerate (zero) variance estimate\n");
            }
            std::ostringstream os;
            os << "rho_lb=" << csv::format_double(cell.rho_lb)
               << " gamma=" << csv::format_double(cell.gamma)
               << " tau0=" << csv::format_double(cell.tau0)
               << " direction=" << (dir > 0 ? "upper" : "lower") << "\n"
               << "tau_tilt=" << csv::format_double(cell.tau_tilt) << "\n"
               << "se=" << csv::format_double(std::sqrt(cell.se2)) << "\n"
               << "t=" << csv::format_double(cell.t_stat) << "\n"
               << "p_upper=" << csv::format_double(cell.p_upper) << "\n"
               << "p_lower=" << csv::format_double(cell.p_lower) << "\n";
            std::fputs(os.str().c_str(), stdout);
            if (!est_out.empty()) {
                const std::vector<SweepCell> cells{cell};
                write_sweep_csv(cells, est_out,
                                "sensweep estimate rho=" + csv::format_double(est_rho) +
                                    " gamma=" + csv::format_double(est_gamma) +
                                    " tau0=" + csv::format_double(est_tau0) +
                                    " direction=" + est_dir);
            }
            return kExitOk;
        }

        if (cmd_swp->parsed()) {
            const StudySummary summary = swp_in.load_informative();
            const CeilingMap caps = load_caps(swp_ceilings);
            const RhoMap rho_map = load_rho_overrides(swp_rho_file);
            const auto rho_grid = parse_grid(swp_rho);
            const auto gamma_grid = parse_grid(swp_gamma);
            const int dir = direction_from(swp_dir);
            const auto cells =
                grid_sweep(summary, rho_grid, gamma_grid, swp_tau0, dir,
                           caps.empty() ? nullptr : &caps, threads,
                           rho_map.empty() ? nullptr : &rho_map);
            std::size_t bad = 0;
            for (const auto& c : cells) {
                if (!c.ok) ++bad;
            }
            if (bad == cells.size()) {
                throw guard_error("every sweep cell failed: " + cells.front().error);
            }
            if (bad > 0) {
                std::fprintf(stderr, "warning: %zu cells failed\n", bad);
            }
            const std::string note =
                "sensweep sweep rho_grid=" + grid_to_string(rho_grid) +
                " gamma_grid=" + grid_to_string(gamma_grid) +
                " tau0=" + csv::format_double(swp_tau0) +
                " direction=" + swp_dir +
                (swp_ceilings.empty() ? "" : " ceilings=" + swp_ceilings);
            if (swp_out.empty() && !swp_stdout) {
                throw validation_error("sweep: provide --out or --stdout");
            }
            if (!swp_out.empty()) write_sweep_csv(cells, swp_out, note);
            if (swp_stdout) {
                std::ostringstream os;
                os << "# " << note << "\nrho_lb,gamma,tau0,tau_tilt,se2,t_stat,p_upper,p_lower\n";
                for (const auto& c : cells) {
                    os << csv::format_double(c.rho_lb) << ','
                       << csv::format_double(c.gamma) << ','
                       << csv::format_double(c.tau0) << ','
                       << csv::format_double(c.tau_tilt) << ','
                       << csv::format_double(c.se2) << ','
                       << csv::format_double(c.t_stat) << ','
                       << csv::format_double(c.p_upper) << ','
                       << csv::format_double(c.p_lower) << "\n";
                }
                std::fputs(os.str().c_str(), stdout);
            }
            std::fprintf(stderr, "computed %zu cells\n", cells.size());
            return kExitOk;
        }

        if (cmd_cs->parsed() || cmd_cp->parsed()) {
            const bool is_cp = cmd_cp->parsed();
            const ConfArgs& args = is_cp ? cp_args : cs_args;
            const InputOptions& in = is_cp ? cp_in : cs_in;
            const StudySummary summary = in.load_informative();
            const CeilingMap caps = load_caps(args.ceilings);
            const RhoMap rho_map = load_rho_overrides(args.rho_file);
            const auto rho_grid = parse_grid(args.rho);
            const auto gamma_grid = parse_grid(args.gamma);
            const auto tau_grid = parse_grid(args.tau);
            const auto rows =
                conf_set_sweep(summary, rho_grid, gamma_grid, tau_grid, args.alpha,
                               caps.empty() ? nullptr : &caps, threads,
                               rho_map.empty() ? nullptr : &rho_map);
            const std::string note =
                std::string("sensweep ") + (is_cp ? "changepoint" : "confset") +
                " rho_grid=" + grid_to_string(rho_grid) +
                " gamma_grid=" + grid_to_string(gamma_grid) +
                " tau_grid=" + grid_to_string(tau_grid) +
                " alpha=" + csv::format_double(args.alpha) +
                (args.ceilings.empty() ? "" : " ceilings=" + args.ceilings);
            if (!is_cp) {
                if (args.out.empty() && !args.to_stdout) {
                    throw validation_error("confset: provide --out or --stdout");
                }
                if (!args.out.empty()) write_confset_csv(rows, args.out, note);
                if (args.to_stdout) {
                    std::ostringstream os;
                    os << "# " << note
                       << "\nrho_lb,gamma,ci_low,ci_high,tau_hl,contains_zero\n";
                    for (const auto& r : rows) {
                        os << csv::format_double(r.rho_lb) << ','
                           << csv::format_double(r.gamma) << ','
                           << csv::format_double(r.ci_low) << ','
                           << csv::format_double(r.ci_high) << ','
                           << csv::format_double(r.tau_hl) << ','
                           << (r.contains_zero ? 1 : 0) << "\n";
                    }
                    std::fputs(os.str().c_str(), stdout);
                }
            } else {
                std::ostringstream os;
                os << "# " << note << "\nrho_lb,changepoint\n";
                for (double r : rho_grid) {
                    const auto cp = changepoint(rows, r);
                    os << csv::format_double(r) << ','
                       << (cp ? csv::format_double(*cp) : std::string("none")) << "\n";
                }
                emit(os.str(), args.out, args.to_stdout || args.out.empty());
            }
            std::fprintf(stderr, "computed %zu rows\n", rows.size());
            return kExitOk;
        }

        if (cmd_cal->parsed()) {
            const auto records = read_block_groups_csv(cal_bg);
            CeilingTable table = build_ceiling_table(records, cal_xi, threads);
            if (!cal_donors.empty()) {
                table = inherit_ceilings(table, read_donor_csv(cal_donors));
            }
            for (const auto& w : table.warnings) {
                std::fprintf(stderr, "warning: %s\n", w.c_str());
            }
            StudySummary summary;
            const bool have_summary =
                !cal_in.summary.empty() || !cal_in.encounters.empty();
            if (have_summary) summary = cal_in.load_informative();
            const std::string note = "sensweep calibrate xi=" +
                                     csv::format_double(cal_xi) +
                                     " blockgroups=" + cal_bg;
            if (cal_out.empty() && !cal_stdout) {
                throw validation_error("calibrate: provide --out or --stdout");
            }
            if (!cal_out.empty()) {
                write_ceilings_csv(table, have_summary ? &summary : nullptr, cal_out,
                                   note);
            }
            if (cal_stdout) {
                std::ostringstream os;
                os << "# " << note << "\nstratum_id,ceiling,provenance\n";
                std::vector<std::string> ids;
                for (const auto& [id, _] : table.ceilings) ids.push_back(id);
                std::sort(ids.begin(), ids.end());
                for (const auto& id : ids) {
                    const auto& e = table.ceilings.at(id);
                    os << id << ',' << csv::format_double(e.ceiling) << ','
                       << (e.provenance == CeilingProvenance::computed ? "computed"
                           : e.provenance == CeilingProvenance::inherited
                               ? "inherited"
                               : "absent")
                       << "\n";
                }
                std::fputs(os.str().c_str(), stdout);
            }
            if (cal_threshold >= 1.0 && have_summary) {
                const double share = coverage_share(summary, table, cal_threshold,
                                                    cal_rho, cal_observed);
                std::printf("coverage_share=%s threshold=%s rho=%s\n",
                            csv::format_double(share).c_str(),
                            csv::format_double(cal_threshold).c_str(),
                            csv::format_double(cal_rho).c_str());
            }
            std::fprintf(stderr, "calibrated %zu strata\n", table.ceilings.size());
            return kExitOk;
        }

        if (cmd_ver->parsed()) {
            oracle::VerifyOptions opts;
            opts.seed = ver_seed;
            opts.max_n = ver_max_n;
            opts.mc_reps = ver_reps;
            opts.quick = ver_quick;
            opts.threads = threads;
            const auto results = oracle::run_verification(opts);
            bool all_pass = true;
            std::ostringstream csv_out;
            csv_out << "# sensweep verify seed=" << ver_seed << " max_n=" << ver_max_n
                    << " reps=" << ver_reps << "\ncheck,status,detail\n";
            double total_seconds = 0.0;
            for (const auto& r : results) {
                all_pass = all_pass && r.pass;
                std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
                // timing goes to stderr so the report stays byte-identical
                std::fprintf(stderr, "timing: %-28s %8.2f s\n", r.name.c_str(),
                             r.seconds);
                total_seconds += r.seconds;
                std::string detail = r.detail;
                for (auto& ch : detail) {
                    if (ch == ',') ch = ';';
                }
                csv_out << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << detail
                        << "\n";
            }
            std::fprintf(stderr, "timing: %-28s %8.2f s\n", "total", total_seconds);
            if (!ver_out.empty()) {
                std::ofstream out(ver_out);
                if (!out) throw validation_error("cannot write file: " + ver_out);
                out << csv_out.str();
            }
            return all_pass ? kExitOk : kExitOracle;
        }
    } catch (const guard_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitGuard;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
