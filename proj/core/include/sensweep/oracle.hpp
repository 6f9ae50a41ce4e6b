#pragma once

// Independent validation machinery for the closed forms in the tilt engine:
// full assignment-space enumeration, brute-force probability bounds over all
// vertex configurations of the unobserved covariate, the hypergeometric
// results for stopped-control counts, the exact bias formula, and Monte
// Carlo checks of test validity and variance conservativeness.
//
// Enumeration paths run in exact rational arithmetic (any double is a
// rational, so engine inputs convert losslessly); the oracle refuses sizes
// beyond its guards instead of approximating.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sensweep/tilt_engine.hpp"

namespace sensweep::oracle {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

// Exact conversion; every finite double is a dyadic rational.
rational to_rational(double x);

bigint binomial(int n, int k);

inline constexpr int kMaxEnumerationSlots = 22;
inline constexpr std::int64_t kMaxEnumerationSize = 1'000'000;

// All assignments of n1 treated among n_tilde slots as bitmasks (bit i =
// slot i), ascending numeric order; lexicographic in the slot-vector sense.
std::vector<std::uint32_t> enumerate_assignments(int n_tilde, int n1);
std::vector<int> expand_mask(std::uint32_t mask, int n_tilde);

// ---- parametric submodel -------------------------------------------------

struct SubmodelSpec {
    std::vector<double> u;  // unobserved covariate, each in [0, 1]
    double kappa = 0.0;     // stratum intercept; cancels after conditioning
    double gamma = 1.0;
};

// Conditional distribution over enumerate_assignments(|u|, n1), computed
// through the kappa-parameterized Bernoulli route so the cancellation is
// demonstrated rather than assumed.
std::vector<double> submodel_conditional(const SubmodelSpec& spec, int n1);

// ---- exact probability bounds ---------------------------------------------

struct BruteBounds {
    rational min_p, max_p;
    bool min_attained_at_complement = false;  // u = 1 - z
    bool max_attained_at_z = false;           // u = z
};

// Min/max conditional probability of a fixed assignment over all 2^n vertex
// u-vectors; n_tilde <= 14.
BruteBounds brute_force_bounds(int n_tilde, int n1, const rational& gamma);
BruteBounds brute_force_bounds(int n_tilde, int n1, double gamma);

// The hypergeometric j-expansion of the bound denominators, evaluated
// exactly: (lower, upper).
std::pair<rational, rational> closed_form_bounds_exact(int n_tilde, int n1,
                                                       const rational& gamma);

// Number of assignments at each overlap j with a fixed assignment, counted
// by enumeration; index 0 corresponds to j = max(0, 2*n1 - n_tilde).
std::vector<bigint> overlap_counts(int n_tilde, int n1);

// The stratum tilted statistic computed the printed way: enumerate the
// assignment space, form the bound for the branch, and scale the centered
// statistic by (1/|Omega|) * bound^{-1}.  Exact internally.
double literal_tilted_stat(const AugmentedStratum& stratum, const TiltSpec& spec);

// Exact multipliers (shrink, inflate) by enumeration; cross-checks the
// engine's log-space expectations.
std::pair<rational, rational> exact_multipliers(int n_tilde, int n1,
                                                const rational& gamma);

// ---- principal-stratum configurations -------------------------------------

// Full potential-outcome table for one stratum: Always-Stop slots first,
// then Only-Minority-Stop slots whose control outcomes are structurally 0.
struct StratumConfig {
    int n1 = 1;
    std::vector<int> y1_as;   // treated outcomes on AS slots
    std::vector<int> y1_oms;  // treated outcomes on OMS slots
    std::vector<int> y0_as;   // control outcomes on AS slots

    int n_as() const { return static_cast<int>(y1_as.size()); }
    int n_oms() const { return static_cast<int>(y1_oms.size()); }
    int n_total() const { return n_as() + n_oms(); }
    int n0() const { return n_total() - n1; }
    rational tau() const;  // stratum average effect
};

// pmf of the stopped-control count C over its support, formula route.
std::vector<std::pair<int, rational>> hypergeom_stopped_controls(
    const StratumConfig& config);
// Same pmf by enumerating the assignment space.
std::vector<std::pair<int, rational>> stopped_controls_by_enumeration(
    const StratumConfig& config);

struct CondTreatProbs {
    std::optional<rational> as_slot;
    std::optional<rational> oms_slot;
};
// Conditional treatment probabilities given C = c, by enumeration.
CondTreatProbs cond_treat_probs_given_c(const StratumConfig& config, int c);

// Exact bias of the rho-adjusted estimator conditional on C >= 1, formula
// route; rho must equal n_oms / n_total.
rational exact_bias(const StratumConfig& config, const rational& rho);
// The same bias by exhaustive averaging of tau_hat - tau over assignments.
rational exhaustive_bias(const StratumConfig& config);

// Largest |augmented-minus-full| Difference-in-Means over assignments when
// the appended count equals the realized missing-control count; exactly 0.
rational max_aug_full_gap(const StratumConfig& config);

// Exact expectation of the tilted stratum statistic under the vertex-u
// mechanism at gamma, tilting at the same gamma.
rational exact_tilt_expectation(const StratumConfig& config, std::uint32_t u_mask,
                                const rational& gamma, const rational& tau0,
                                int direction);

// ---- Monte Carlo ----------------------------------------------------------

struct MechanismSpec {
    double gamma = 1.0;               // odds bound attained by the mechanism
    std::vector<std::vector<int>> u;  // per-stratum vertex u; empty = uniform
};

struct TypeIResult {
    double rejection_rate = 0.0;
    double mc_se = 0.0;
    std::int64_t rejections = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
};

TypeIResult monte_carlo_type1(std::span<const StratumConfig> configs,
                              const MechanismSpec& mech, const TiltSpec& spec,
                              std::int64_t reps, std::uint64_t seed, double alpha,
                              int threads = 0);

struct VarianceResult {
    double mean_se2 = 0.0;
    double empirical_var = 0.0;
    double mc_se = 0.0;   // combined standard error of the difference
    double z_score = 0.0; // (mean_se2 - empirical_var) / mc_se
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
};

VarianceResult monte_carlo_variance_conservatism(std::span<const StratumConfig> configs,
                                                 const MechanismSpec& mech,
                                                 const TiltSpec& spec,
                                                 std::int64_t reps, std::uint64_t seed,
                                                 int threads = 0);

// ---- verification battery ---------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    int max_n = 8;  // exhaustive-scan ceiling (vertex scans are 2^n)
    std::int64_t mc_reps = 2000;
    std::uint64_t seed = 20260810;
    int threads = 0;
    bool quick = false;
};

std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace sensweep::oracle
