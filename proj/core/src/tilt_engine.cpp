#include "sensweep/tilt_engine.hpp"

#include <cmath>

#include "sensweep/errors.hpp"
#include "sensweep/log_math.hpp"

namespace sensweep {

namespace {

void check_counts(std::int64_t n_tilde, std::int64_t n1) {
    if (n1 < 1) throw validation_error("tilt: n1 must be >= 1");
    if (n1 > n_tilde) throw validation_error("tilt: n1 exceeds stratum size");
}

void check_gamma(double gamma) {
    if (!(gamma >= 1.0)) throw validation_error("tilt: gamma must be >= 1");
}

}  // namespace

std::int64_t overlap_j_min(std::int64_t n_tilde, std::int64_t n1) {
    return std::max<std::int64_t>(0, 2 * n1 - n_tilde);
}

std::vector<double> overlap_pmf(std::int64_t n_tilde, std::int64_t n1) {
    check_counts(n_tilde, n1);
    const std::int64_t j_min = overlap_j_min(n_tilde, n1);
    std::vector<double> logs(static_cast<std::size_t>(n1 - j_min) + 1);
    for (std::int64_t j = j_min; j <= n1; ++j) {
        logs[static_cast<std::size_t>(j - j_min)] =
            lchoose(n1, j) + lchoose(n_tilde - n1, n1 - j);
    }
    const double log_total = log_sum_exp(logs);
    std::vector<double> pmf(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        pmf[i] = std::exp(logs[i] - log_total);
    }
    return pmf;
}

ProbBounds prob_bounds(std::int64_t n_tilde, std::int64_t n1, double gamma) {
    check_counts(n_tilde, n1);
    check_gamma(gamma);
    const double log_gamma = std::log(gamma);
    const std::int64_t j_min = overlap_j_min(n_tilde, n1);
    const std::size_t terms = static_cast<std::size_t>(n1 - j_min) + 1;
    std::vector<double> lo(terms), up(terms);
    for (std::int64_t j = j_min; j <= n1; ++j) {
        const double log_count = lchoose(n1, j) + lchoose(n_tilde - n1, n1 - j);
        const std::size_t i = static_cast<std::size_t>(j - j_min);
        lo[i] = log_count + static_cast<double>(n1 - j) * log_gamma;
        up[i] = log_count + static_cast<double>(j) * log_gamma;
    }
    ProbBounds b;
    b.lower = std::exp(-log_sum_exp(lo));
    b.upper = std::exp(static_cast<double>(n1) * log_gamma - log_sum_exp(up));
    return b;
}

double tilt_multiplier(std::int64_t n_tilde, std::int64_t n1, double gamma,
                       bool shrink) {
    check_counts(n_tilde, n1);
    check_gamma(gamma);
    if (gamma == 1.0) return 1.0;
    const double log_gamma = std::log(gamma);
    const std::int64_t j_min = overlap_j_min(n_tilde, n1);
    const std::size_t terms = static_cast<std::size_t>(n1 - j_min) + 1;
    std::vector<double> logs(terms), norm(terms);
    for (std::int64_t j = j_min; j <= n1; ++j) {
        const double log_count = lchoose(n1, j) + lchoose(n_tilde - n1, n1 - j);
        const double expo = shrink ? static_cast<double>(j - n1)
                                   : static_cast<double>(n1 - j);
        const std::size_t i = static_cast<std::size_t>(j - j_min);
        norm[i] = log_count;
        logs[i] = log_count + expo * log_gamma;
    }
    // normalizing by the log of |Omega| through the same summed counts keeps
    // the gamma = 1 limit exact
    return std::exp(log_sum_exp(logs) - log_sum_exp(norm));
}

double stratum_tilted_stat(const AugmentedStratum& stratum, const TiltSpec& spec) {
    const double gamma = spec.resolve_gamma(stratum.base.stratum_id);
    const double c = stratum.tau_hat_aug - spec.tau0;
    const bool shrink = static_cast<double>(spec.direction) * c >= 0.0;
    return c * tilt_multiplier(stratum.n_tilde, stratum.base.n1, gamma, shrink);
}

TiltResult aggregate_tilted_stat(std::span<const AugmentedStratum> strata,
                                 const TiltSpec& spec) {
    if (strata.empty()) throw validation_error("aggregate_tilted_stat: no strata");
    if (spec.direction != 1 && spec.direction != -1) {
        throw validation_error("aggregate_tilted_stat: direction must be +1 or -1");
    }
    TiltResult res;
    res.stratum_ids.reserve(strata.size());
    res.lambda.reserve(strata.size());
    res.weight.reserve(strata.size());
    double n_star = 0.0;
    for (const auto& s : strata) n_star += static_cast<double>(s.n_tilde);
    res.n_tilde_star = n_star;
    double total = 0.0;
    for (const auto& s : strata) {
        const double lam = stratum_tilted_stat(s, spec);
        const double w = static_cast<double>(s.n_tilde) / n_star;
        res.stratum_ids.push_back(s.base.stratum_id);
        res.lambda.push_back(lam);
        res.weight.push_back(w);
        total += w * lam;
    }
    res.tau_tilt = total;
    return res;
}

}  // namespace sensweep
