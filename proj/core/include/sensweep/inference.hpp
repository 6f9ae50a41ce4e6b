#pragma once

// Conservative variance, normal-reference p-values, dense (rho, Gamma)
// sweeps, confidence sets by test inversion, and changepoint extraction.
//
// A sweep cell always carries both one-sided tests: p_upper comes from the
// upper-tailed tilted statistic and p_lower from the lower-tailed one, each
// with its own tilting.  Cells are pure and independent, so sweeps run as a
// deterministic parallel map; output order is row-major (rho outer, Gamma
// inner, tau0 innermost where present) regardless of thread count.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sensweep/data_model.hpp"
#include "sensweep/tilt_engine.hpp"

namespace sensweep {

struct SweepCell {
    double rho_lb = 0.0;
    double gamma = 1.0;
    double tau0 = 0.0;
    double tau_tilt = 0.0;  // statistic for the requested direction
    double se2 = 0.0;
    double t_stat = 0.0;
    double p_upper = 1.0;   // upper-tailed test, its own tilting
    double p_lower = 1.0;   // lower-tailed test, its own tilting
    bool se_degenerate = false;
    bool ok = true;
    std::string error;
};

struct ConfSetRow {
    double rho_lb = 0.0;
    double gamma = 1.0;
    double ci_low = 0.0;   // smallest nonrejected tau0
    double ci_high = 0.0;  // largest nonrejected tau0
    double tau_hl = 0.0;   // lower median of nonrejected tau0 values
    bool contains_zero = false;
    bool empty = false;    // no tau0 survived the two one-sided tests
};

// Optional per-stratum ceilings; the operative bound for stratum g is
// min(gamma, ceiling_g), strata absent from the map are unconstrained.
using CeilingMap = std::unordered_map<std::string, double>;

// HC2-style leverage-adjusted variance of the weighted tilted statistic;
// weights are n_tilde_g / n_tilde_star.  Requires >= 2 strata.
double conservative_variance(std::span<const double> lambdas,
                             std::span<const double> n_tildes);

// Normal-tail p-value; at se2 == 0 the convention is p = 0 when the
// statistic strictly favors the alternative and p = 1 otherwise.
double one_sided_pvalue(double tau_tilt, double se2, int direction);

// rho_overrides pins mapped strata to their own selection bound while the
// grid scalar applies to the rest.
std::vector<SweepCell> grid_sweep(const StudySummary& summary,
                                  std::span<const double> rho_grid,
                                  std::span<const double> gamma_grid, double tau0,
                                  int direction, const CeilingMap* ceilings = nullptr,
                                  int threads = 0,
                                  const RhoMap* rho_overrides = nullptr);

SweepCell estimate_cell(const StudySummary& summary, double rho, double gamma,
                        double tau0, int direction,
                        const CeilingMap* ceilings = nullptr,
                        const RhoMap* rho_overrides = nullptr);

std::vector<ConfSetRow> conf_set_sweep(const StudySummary& summary,
                                       std::span<const double> rho_grid,
                                       std::span<const double> gamma_grid,
                                       std::span<const double> tau_grid, double alpha,
                                       const CeilingMap* ceilings = nullptr,
                                       int threads = 0,
                                       const RhoMap* rho_overrides = nullptr);

// Smallest Gamma at rho_lb whose confidence set contains zero.
std::optional<double> changepoint(std::span<const ConfSetRow> rows, double rho_lb);

void write_sweep_csv(std::span<const SweepCell> cells, const std::filesystem::path& path,
                     const std::string& config_comment = {});
void write_confset_csv(std::span<const ConfSetRow> rows,
                       const std::filesystem::path& path,
                       const std::string& config_comment = {});

}  // namespace sensweep
