#include "sensweep/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "sensweep/errors.hpp"
#include "sensweep/inference.hpp"
#include "sensweep/log_math.hpp"
#include "sensweep/parallel.hpp"
#include "sensweep/rng.hpp"

namespace sensweep::oracle {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

std::uint32_t full_mask(int n) {
    return n >= 32 ? ~0u : ((1u << n) - 1u);
}

// scaled power table: t[k] = P^k * Q^(top - k)
std::vector<bigint> scaled_powers(const bigint& p, const bigint& q, int top) {
    std::vector<bigint> ppow(top + 1), qpow(top + 1), t(top + 1);
    ppow[0] = 1;
    qpow[0] = 1;
    for (int k = 1; k <= top; ++k) {
        ppow[k] = ppow[k - 1] * p;
        qpow[k] = qpow[k - 1] * q;
    }
    for (int k = 0; k <= top; ++k) t[k] = ppow[k] * qpow[top - k];
    return t;
}

bigint int_pow(const bigint& base, int e) {
    bigint r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void check_gamma(const rational& gamma) {
    if (gamma < 1) throw validation_error("oracle: gamma must be >= 1");
}

void validate_config(const StratumConfig& cfg) {
    if (cfg.n_total() < 1) throw validation_error("oracle: empty stratum config");
    if (cfg.n_total() > kMaxEnumerationSlots) {
        throw guard_error("oracle: stratum config exceeds enumeration guard");
    }
    if (cfg.n1 < 0 || cfg.n1 > cfg.n_total()) {
        throw validation_error("oracle: inconsistent treated count");
    }
    if (static_cast<int>(cfg.y0_as.size()) != cfg.n_as()) {
        throw validation_error("oracle: y0_as size mismatch");
    }
    auto binary = [](const std::vector<int>& v) {
        return std::all_of(v.begin(), v.end(), [](int y) { return y == 0 || y == 1; });
    };
    if (!binary(cfg.y1_as) || !binary(cfg.y1_oms) || !binary(cfg.y0_as)) {
        throw validation_error("oracle: outcomes must be 0/1");
    }
}

// bitmasks of slots with outcome 1
struct OutcomeMasks {
    std::uint32_t y1 = 0;  // treated outcome over all slots
    std::uint32_t y0 = 0;  // control outcome (AS slots only; OMS are 0)
    std::uint32_t as = 0;  // AS slot indicator
};

OutcomeMasks outcome_masks(const StratumConfig& cfg) {
    OutcomeMasks m;
    const int n_as = cfg.n_as();
    for (int i = 0; i < n_as; ++i) {
        if (cfg.y1_as[static_cast<std::size_t>(i)]) m.y1 |= 1u << i;
        if (cfg.y0_as[static_cast<std::size_t>(i)]) m.y0 |= 1u << i;
        m.as |= 1u << i;
    }
    for (int i = 0; i < cfg.n_oms(); ++i) {
        if (cfg.y1_oms[static_cast<std::size_t>(i)]) m.y1 |= 1u << (n_as + i);
    }
    return m;
}

int stopped_controls(std::uint32_t z, const OutcomeMasks& m, int n_as) {
    return n_as - std::popcount(z & m.as);
}

}  // namespace

rational to_rational(double x) {
    if (!std::isfinite(x)) throw validation_error("to_rational: nonfinite value");
    if (x == 0.0) return rational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    const auto mi = static_cast<long long>(std::ldexp(mant, 53));
    const int e2 = exp - 53;
    bigint num = mi;
    if (e2 >= 0) {
        num <<= e2;
        return rational(num);
    }
    bigint den = bigint(1) << (-e2);
    return rational(num, den);
}

bigint binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    bigint r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

std::vector<std::uint32_t> enumerate_assignments(int n_tilde, int n1) {
    if (n_tilde < 1 || n_tilde > kMaxEnumerationSlots) {
        throw guard_error("enumerate_assignments: n_tilde outside 1.." +
                          std::to_string(kMaxEnumerationSlots));
    }
    if (n1 < 0 || n1 > n_tilde) {
        throw validation_error("enumerate_assignments: n1 outside 0..n_tilde");
    }
    const bigint count = binomial(n_tilde, n1);
    if (count > kMaxEnumerationSize) {
        throw guard_error("enumerate_assignments: C(n_tilde, n1) exceeds guard");
    }
    std::vector<std::uint32_t> out;
    out.reserve(count.convert_to<std::size_t>());
    if (n1 == 0) {
        out.push_back(0);
        return out;
    }
    const std::uint32_t limit = n_tilde >= 32 ? ~0u : (1u << n_tilde);
    std::uint32_t v = full_mask(n1);
    while (v < limit) {
        out.push_back(v);
        // Gosper's hack: next bitmask with the same popcount
        const std::uint32_t t = v | (v - 1);
        if (t == ~0u) break;
        const std::uint32_t next =
            (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
        if (next <= v) break;
        v = next;
    }
    return out;
}

std::vector<int> expand_mask(std::uint32_t mask, int n_tilde) {
    std::vector<int> z(static_cast<std::size_t>(n_tilde));
    for (int i = 0; i < n_tilde; ++i) z[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
    return z;
}

std::vector<double> submodel_conditional(const SubmodelSpec& spec, int n1) {
    const int n = static_cast<int>(spec.u.size());
    for (double ui : spec.u) {
        if (!(ui >= 0.0 && ui <= 1.0)) {
            throw validation_error("submodel_conditional: u outside [0, 1]");
        }
    }
    if (!(spec.gamma >= 1.0)) {
        throw validation_error("submodel_conditional: gamma must be >= 1");
    }
    const auto masks = enumerate_assignments(n, n1);
    const double lg = std::log(spec.gamma);
    auto log_sigmoid = [](double e) {
        return e >= 0.0 ? -std::log1p(std::exp(-e)) : e - std::log1p(std::exp(e));
    };
    std::vector<double> log_p(static_cast<std::size_t>(n)),
        log_q(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double eta = spec.kappa + lg * spec.u[static_cast<std::size_t>(i)];
        log_p[static_cast<std::size_t>(i)] = log_sigmoid(eta);
        log_q[static_cast<std::size_t>(i)] = log_sigmoid(-eta);
    }
    std::vector<double> logw(masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s += (masks[k] >> i) & 1u ? log_p[static_cast<std::size_t>(i)]
                                      : log_q[static_cast<std::size_t>(i)];
        }
        logw[k] = s;
    }
    const double total = log_sum_exp(logw);
    std::vector<double> probs(masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k) probs[k] = std::exp(logw[k] - total);
    return probs;
}

BruteBounds brute_force_bounds(int n_tilde, int n1, const rational& gamma) {
    if (n_tilde < 1 || n_tilde > 14) {
        throw guard_error("brute_force_bounds: vertex scan limited to n_tilde <= 14");
    }
    if (n1 < 1 || n1 > n_tilde) {
        throw validation_error("brute_force_bounds: n1 outside 1..n_tilde");
    }
    check_gamma(gamma);
    const auto masks = enumerate_assignments(n_tilde, n1);
    const bigint p = numerator(gamma), q = denominator(gamma);
    const auto term = scaled_powers(p, q, n1);
    const std::uint32_t z = masks.front();
    const std::uint32_t everyone = full_mask(n_tilde);

    auto prob_at = [&](std::uint32_t u) {
        bigint den = 0;
        for (std::uint32_t a : masks) den += term[static_cast<std::size_t>(std::popcount(a & u))];
        const int kz = std::popcount(z & u);
        return rational(term[static_cast<std::size_t>(kz)], den);
    };

    BruteBounds b;
    bool first = true;
    for (std::uint32_t u = 0; u <= everyone; ++u) {
        const rational pz = prob_at(u);
        if (first) {
            b.min_p = b.max_p = pz;
            first = false;
        } else {
            if (pz < b.min_p) b.min_p = pz;
            if (pz > b.max_p) b.max_p = pz;
        }
    }
    b.min_attained_at_complement = prob_at(~z & everyone) == b.min_p;
    b.max_attained_at_z = prob_at(z) == b.max_p;
    return b;
}

BruteBounds brute_force_bounds(int n_tilde, int n1, double gamma) {
    return brute_force_bounds(n_tilde, n1, to_rational(gamma));
}

std::pair<rational, rational> closed_form_bounds_exact(int n_tilde, int n1,
                                                       const rational& gamma) {
    if (n1 < 1 || n1 > n_tilde) {
        throw validation_error("closed_form_bounds_exact: n1 outside 1..n_tilde");
    }
    check_gamma(gamma);
    const bigint p = numerator(gamma), q = denominator(gamma);
    bigint ppow = 1, qpow = 1;
    std::vector<bigint> pk(static_cast<std::size_t>(n1) + 1),
        qk(static_cast<std::size_t>(n1) + 1);
    for (int k = 0; k <= n1; ++k) {
        pk[static_cast<std::size_t>(k)] = ppow;
        qk[static_cast<std::size_t>(k)] = qpow;
        ppow *= p;
        qpow *= q;
    }
    const int j_min = std::max(0, 2 * n1 - n_tilde);
    bigint den_lo = 0, den_up = 0;
    for (int j = j_min; j <= n1; ++j) {
        const bigint nj = binomial(n1, j) * binomial(n_tilde - n1, n1 - j);
        den_lo += nj * pk[static_cast<std::size_t>(n1 - j)] * qk[static_cast<std::size_t>(j)];
        den_up += nj * pk[static_cast<std::size_t>(j)] * qk[static_cast<std::size_t>(n1 - j)];
    }
    return {rational(qk[static_cast<std::size_t>(n1)], den_lo),
            rational(pk[static_cast<std::size_t>(n1)], den_up)};
}

std::vector<bigint> overlap_counts(int n_tilde, int n1) {
    if (n1 < 1 || n1 > n_tilde) {
        throw validation_error("overlap_counts: n1 outside 1..n_tilde");
    }
    const auto masks = enumerate_assignments(n_tilde, n1);
    const std::uint32_t z = masks.front();
    const int j_min = std::max(0, 2 * n1 - n_tilde);
    std::vector<bigint> counts(static_cast<std::size_t>(n1 - j_min) + 1);
    for (std::uint32_t a : masks) {
        const int j = std::popcount(a & z);
        counts.at(static_cast<std::size_t>(j - j_min)) += 1;
    }
    return counts;
}

std::pair<rational, rational> exact_multipliers(int n_tilde, int n1,
                                                const rational& gamma) {
    check_gamma(gamma);
    const auto masks = enumerate_assignments(n_tilde, n1);
    const bigint p = numerator(gamma), q = denominator(gamma);
    const auto term = scaled_powers(p, q, n1);
    const std::uint32_t z = masks.front();
    bigint s_up = 0, s_low = 0;
    for (std::uint32_t a : masks) {
        const int j = std::popcount(a & z);
        s_up += term[static_cast<std::size_t>(j)];        // Gamma^j scaled
        s_low += term[static_cast<std::size_t>(n1 - j)];  // Gamma^(n1-j) scaled
    }
    const bigint omega = binomial(n_tilde, n1);
    // scaled terms carry q^n1 or p^n1 denominators back out
    const rational m_shrink(s_up, omega * int_pow(p, n1));
    const rational m_inflate(s_low, omega * int_pow(q, n1));
    return {m_shrink, m_inflate};
}

double literal_tilted_stat(const AugmentedStratum& stratum, const TiltSpec& spec) {
    const auto n = static_cast<int>(stratum.n_tilde);
    const auto k1 = static_cast<int>(stratum.base.n1);
    if (spec.direction != 1 && spec.direction != -1) {
        throw validation_error("literal_tilted_stat: direction must be +1 or -1");
    }
    const rational gamma = to_rational(spec.resolve_gamma(stratum.base.stratum_id));
    check_gamma(gamma);
    const auto masks = enumerate_assignments(n, k1);
    const bigint p = numerator(gamma), q = denominator(gamma);
    const auto term = scaled_powers(p, q, k1);
    const std::uint32_t z = masks.front();
    const std::uint32_t everyone = full_mask(n);
    bigint s_z = 0, s_comp = 0;
    for (std::uint32_t a : masks) {
        s_z += term[static_cast<std::size_t>(std::popcount(a & z))];
        s_comp += term[static_cast<std::size_t>(std::popcount(a & (~z & everyone)))];
    }
    rational tau_hat(stratum.base.sum_y1, stratum.base.n1);
    const std::int64_t control_denom = stratum.base.n0_obs + stratum.w;
    if (control_denom > 0) tau_hat -= rational(stratum.base.sum_y0, control_denom);
    const rational c = tau_hat - to_rational(spec.tau0);
    const bool shrink = spec.direction > 0 ? c >= 0 : c <= 0;
    const bigint omega = binomial(n, k1);
    rational lambda;
    if (shrink) {
        // (1/|Omega|) * c / p_upper, with p_upper = P^k1 / s_z (scaled)
        lambda = c * rational(s_z, omega * int_pow(p, k1));
    } else {
        // (1/|Omega|) * c / p_lower, with p_lower = Q^k1 / s_comp (scaled)
        lambda = c * rational(s_comp, omega * int_pow(q, k1));
    }
    return lambda.convert_to<double>();
}

rational StratumConfig::tau() const {
    validate_config(*this);
    long y1_sum = 0, y0_sum = 0;
    for (int y : y1_as) y1_sum += y;
    for (int y : y1_oms) y1_sum += y;
    for (int y : y0_as) y0_sum += y;
    return rational(y1_sum - y0_sum, n_total());
}

std::vector<std::pair<int, rational>> hypergeom_stopped_controls(
    const StratumConfig& config) {
    validate_config(config);
    const int n_as = config.n_as(), n_oms = config.n_oms(), n0 = config.n0();
    if (n0 < 0) throw validation_error("hypergeom: negative control count");
    const bigint omega = binomial(config.n_total(), n0);
    const int lo = std::max(0, n_as - config.n1);
    const int hi = std::min(n_as, n0);
    std::vector<std::pair<int, rational>> pmf;
    for (int c = lo; c <= hi; ++c) {
        pmf.emplace_back(c, rational(binomial(n_as, c) * binomial(n_oms, n0 - c), omega));
    }
    return pmf;
}

std::vector<std::pair<int, rational>> stopped_controls_by_enumeration(
    const StratumConfig& config) {
    validate_config(config);
    const auto masks = enumerate_assignments(config.n_total(), config.n1);
    const OutcomeMasks m = outcome_masks(config);
    std::map<int, bigint> hist;
    for (std::uint32_t z : masks) ++hist[stopped_controls(z, m, config.n_as())];
    const bigint omega = static_cast<long long>(masks.size());
    std::vector<std::pair<int, rational>> pmf;
    for (const auto& [c, cnt] : hist) pmf.emplace_back(c, rational(cnt, omega));
    return pmf;
}

CondTreatProbs cond_treat_probs_given_c(const StratumConfig& config, int c) {
    validate_config(config);
    const auto masks = enumerate_assignments(config.n_total(), config.n1);
    const OutcomeMasks m = outcome_masks(config);
    long long total = 0, as_treated = 0, oms_treated = 0;
    const int n_as = config.n_as();
    for (std::uint32_t z : masks) {
        if (stopped_controls(z, m, n_as) != c) continue;
        ++total;
        if (n_as >= 1 && (z & 1u)) ++as_treated;
        if (config.n_oms() >= 1 && (z >> n_as) & 1u) ++oms_treated;
    }
    if (total == 0) {
        throw validation_error("cond_treat_probs_given_c: c outside the support");
    }
    CondTreatProbs out;
    if (n_as >= 1) out.as_slot = rational(as_treated, total);
    if (config.n_oms() >= 1) out.oms_slot = rational(oms_treated, total);
    return out;
}

rational exact_bias(const StratumConfig& config, const rational& rho) {
    validate_config(config);
    if (config.n1 < 1) throw validation_error("exact_bias: needs n1 >= 1");
    if (rho != rational(config.n_oms(), config.n_total())) {
        throw validation_error("exact_bias: rho inconsistent with the config");
    }
    if (config.n_oms() == 0) return rational(0);
    const auto pmf = hypergeom_stopped_controls(config);
    rational p_event = 0;
    for (const auto& [c, p] : pmf) {
        if (c >= 1) p_event += p;
    }
    if (p_event == 0) throw validation_error("exact_bias: Pr(C >= 1) = 0");
    long y_as = 0, y_oms = 0;
    for (int y : config.y1_as) y_as += y;
    for (int y : config.y1_oms) y_oms += y;
    const rational ybar_gap =
        rational(y_as, config.n_as()) - rational(y_oms, config.n_oms());
    rational bias = 0;
    for (const auto& [c, p] : pmf) {
        if (c < 1) continue;
        const rational coef = rational(config.n_as() - c, config.n1) - (1 - rho);
        bias += coef * ybar_gap * (p / p_event);
    }
    return bias;
}

rational exhaustive_bias(const StratumConfig& config) {
    validate_config(config);
    if (config.n1 < 1) throw validation_error("exhaustive_bias: needs n1 >= 1");
    const auto masks = enumerate_assignments(config.n_total(), config.n1);
    const OutcomeMasks m = outcome_masks(config);
    const rational rho(config.n_oms(), config.n_total());
    rational total = 0;
    long long count = 0;
    for (std::uint32_t z : masks) {
        const int c = stopped_controls(z, m, config.n_as());
        if (c < 1) continue;
        const int y1_hits = std::popcount(z & m.y1);
        const int y0_hits = std::popcount(~z & m.y0);
        const rational tau_hat =
            rational(y1_hits, config.n1) - (1 - rho) * rational(y0_hits, c);
        total += tau_hat;
        ++count;
    }
    if (count == 0) throw validation_error("exhaustive_bias: Pr(C >= 1) = 0");
    return total / count - config.tau();
}

rational max_aug_full_gap(const StratumConfig& config) {
    validate_config(config);
    if (config.n1 < 1 || config.n0() < 1) {
        throw validation_error("max_aug_full_gap: needs treated and control slots");
    }
    const auto masks = enumerate_assignments(config.n_total(), config.n1);
    const OutcomeMasks m = outcome_masks(config);
    const int n0 = config.n0();
    rational worst = 0;
    for (std::uint32_t z : masks) {
        const int c = stopped_controls(z, m, config.n_as());
        const int w_realized = n0 - c;  // missing controls under this assignment
        const int y1_hits = std::popcount(z & m.y1);
        const int y0_obs = std::popcount(~z & m.y0);
        // augmented estimator with the realized missing count appended
        const rational aug =
            rational(y1_hits, config.n1) - rational(y0_obs, c + w_realized);
        // full-data estimator over all slots (OMS controls contribute zero)
        const rational full = rational(y1_hits, config.n1) - rational(y0_obs, n0);
        const rational gap = aug > full ? aug - full : full - aug;
        if (gap > worst) worst = gap;
    }
    return worst;
}

rational exact_tilt_expectation(const StratumConfig& config, std::uint32_t u_mask,
                                const rational& gamma, const rational& tau0,
                                int direction) {
    validate_config(config);
    check_gamma(gamma);
    if (direction != 1 && direction != -1) {
        throw validation_error("exact_tilt_expectation: direction must be +1 or -1");
    }
    const int n = config.n_total(), k1 = config.n1, n0 = config.n0();
    if (k1 < 1 || n0 < 1) {
        throw validation_error("exact_tilt_expectation: needs treated and controls");
    }
    if (u_mask > full_mask(n)) {
        throw validation_error("exact_tilt_expectation: u mask out of range");
    }
    const auto masks = enumerate_assignments(n, k1);
    const OutcomeMasks m = outcome_masks(config);
    const bigint p = numerator(gamma), q = denominator(gamma);
    const auto term = scaled_powers(p, q, k1);

    // multipliers by enumeration overlap against a fixed assignment
    const std::uint32_t zref = masks.front();
    bigint s_up = 0, s_low = 0;
    for (std::uint32_t a : masks) {
        const int j = std::popcount(a & zref);
        s_up += term[static_cast<std::size_t>(j)];
        s_low += term[static_cast<std::size_t>(k1 - j)];
    }
    const bigint omega = static_cast<long long>(masks.size());
    const bigint pk = int_pow(p, k1), qk = int_pow(q, k1);

    // lambda(z) with the common denominator L = (k1 n0 Td) * omega * pk * qk
    const bigint t_num = numerator(tau0), t_den = denominator(tau0);
    bigint e_num = 0, mech_den = 0;
    for (std::uint32_t z : masks) {
        const int y1_hits = std::popcount(z & m.y1);
        const int y0_obs_all = std::popcount(~z & m.y0);
        // centered statistic numerator over k1*n0*Td
        const bigint c_num = (bigint(n0) * y1_hits - bigint(k1) * y0_obs_all) * t_den -
                             t_num * k1 * n0;
        const bool shrink = direction > 0 ? c_num >= 0 : c_num <= 0;
        const bigint lam_num = shrink ? c_num * s_up * qk : c_num * s_low * pk;
        const bigint w = term[static_cast<std::size_t>(std::popcount(z & u_mask))];
        e_num += w * lam_num;
        mech_den += w;
    }
    const bigint l_den = bigint(k1) * n0 * t_den * omega * pk * qk;
    return rational(e_num, l_den * mech_den);
}

namespace {

// precomputed sampling and statistic tables for one stratum
struct PreparedStratum {
    std::vector<double> cdf;      // over the enumerated assignment space
    std::vector<double> tau_hat;  // full-data statistic per assignment
    double m_shrink = 1.0, m_inflate = 1.0;
    double n_tilde = 0.0;
};

std::vector<PreparedStratum> prepare_strata(std::span<const StratumConfig> configs,
                                            const MechanismSpec& mech,
                                            const TiltSpec& spec) {
    if (!mech.u.empty() && mech.u.size() != configs.size()) {
        throw validation_error("mechanism u must match the number of strata");
    }
    if (!(mech.gamma >= 1.0)) {
        throw validation_error("mechanism gamma must be >= 1");
    }
    std::vector<PreparedStratum> out(configs.size());
    for (std::size_t s = 0; s < configs.size(); ++s) {
        const StratumConfig& cfg = configs[s];
        validate_config(cfg);
        const int n = cfg.n_total(), k1 = cfg.n1, n0 = cfg.n0();
        if (k1 < 1 || n0 < 1) {
            throw validation_error("monte carlo: strata need treated and controls");
        }
        const auto masks = enumerate_assignments(n, k1);
        const OutcomeMasks m = outcome_masks(cfg);
        std::uint32_t u_mask = 0;
        if (!mech.u.empty()) {
            const auto& u = mech.u[s];
            if (static_cast<int>(u.size()) != n) {
                throw validation_error("mechanism u has wrong length");
            }
            for (int i = 0; i < n; ++i) {
                if (u[static_cast<std::size_t>(i)] != 0 &&
                    u[static_cast<std::size_t>(i)] != 1) {
                    throw validation_error("mechanism u must be a vertex (0/1)");
                }
                if (u[static_cast<std::size_t>(i)]) u_mask |= 1u << i;
            }
        }
        PreparedStratum& ps = out[s];
        ps.n_tilde = static_cast<double>(n);
        ps.cdf.resize(masks.size());
        ps.tau_hat.resize(masks.size());
        const double lg = std::log(mech.gamma);
        double total = 0.0;
        for (std::size_t k = 0; k < masks.size(); ++k) {
            const std::uint32_t z = masks[k];
            total += std::exp(lg * std::popcount(z & u_mask));
            ps.cdf[k] = total;
            ps.tau_hat[k] =
                static_cast<double>(std::popcount(z & m.y1)) / static_cast<double>(k1) -
                static_cast<double>(std::popcount(~z & m.y0)) / static_cast<double>(n0);
        }
        for (double& c : ps.cdf) c /= total;
        ps.cdf.back() = 1.0;
        ps.m_shrink = tilt_multiplier(n, k1, spec.gamma, true);
        ps.m_inflate = tilt_multiplier(n, k1, spec.gamma, false);
    }
    return out;
}

struct RepStats {
    double tau_tilt = 0.0;
    double se2 = 0.0;
    double p = 1.0;
};

RepStats one_replication(std::span<const PreparedStratum> strata, const TiltSpec& spec,
                         std::uint64_t seed, std::int64_t rep) {
    const std::size_t s_count = strata.size();
    std::vector<double> lambda(s_count), sizes(s_count);
    double n_star = 0.0;
    for (std::size_t s = 0; s < s_count; ++s) {
        split_rng rng(seed, static_cast<std::uint64_t>(rep) * s_count + s);
        const double x = rng.next_double();
        const auto& ps = strata[s];
        const std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(ps.cdf.begin(), ps.cdf.end(), x) - ps.cdf.begin());
        const double c = ps.tau_hat[std::min(idx, ps.cdf.size() - 1)] - spec.tau0;
        const bool shrink = static_cast<double>(spec.direction) * c >= 0.0;
        lambda[s] = c * (shrink ? ps.m_shrink : ps.m_inflate);
        sizes[s] = ps.n_tilde;
        n_star += ps.n_tilde;
    }
    RepStats r;
    for (std::size_t s = 0; s < s_count; ++s) {
        r.tau_tilt += sizes[s] / n_star * lambda[s];
    }
    r.se2 = conservative_variance(lambda, sizes);
    r.p = one_sided_pvalue(r.tau_tilt, r.se2, spec.direction);
    return r;
}

}  // namespace

TypeIResult monte_carlo_type1(std::span<const StratumConfig> configs,
                              const MechanismSpec& mech, const TiltSpec& spec,
                              std::int64_t reps, std::uint64_t seed, double alpha,
                              int threads) {
    if (reps < 100) throw validation_error("monte_carlo_type1: reps < 100");
    if (configs.size() < 2) {
        throw validation_error("monte_carlo_type1: needs >= 2 strata");
    }
    const auto strata = prepare_strata(configs, mech, spec);
    std::atomic<std::int64_t> rejections{0};
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        const RepStats r =
            one_replication(strata, spec, seed, static_cast<std::int64_t>(rep));
        if (r.p < alpha) rejections.fetch_add(1, std::memory_order_relaxed);
    });
    TypeIResult res;
    res.rejections = rejections.load();
    res.reps = reps;
    res.seed = seed;
    res.rejection_rate =
        static_cast<double>(res.rejections) / static_cast<double>(reps);
    res.mc_se = std::sqrt(res.rejection_rate * (1.0 - res.rejection_rate) /
                          static_cast<double>(reps));
    return res;
}

VarianceResult monte_carlo_variance_conservatism(std::span<const StratumConfig> configs,
                                                 const MechanismSpec& mech,
                                                 const TiltSpec& spec,
                                                 std::int64_t reps, std::uint64_t seed,
                                                 int threads) {
    if (reps < 100) throw validation_error("monte_carlo_variance_conservatism: reps < 100");
    if (configs.size() < 2) {
        throw validation_error("monte_carlo_variance_conservatism: needs >= 2 strata");
    }
    const auto strata = prepare_strata(configs, mech, spec);
    std::vector<double> taus(static_cast<std::size_t>(reps)),
        se2s(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), threads, [&](std::size_t rep) {
        const RepStats r =
            one_replication(strata, spec, seed, static_cast<std::int64_t>(rep));
        taus[rep] = r.tau_tilt;
        se2s[rep] = r.se2;
    });
    const double n = static_cast<double>(reps);
    double mean_tau = 0.0, mean_se2 = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        mean_tau += taus[i];
        mean_se2 += se2s[i];
    }
    mean_tau /= n;
    mean_se2 /= n;
    double m2 = 0.0, m4 = 0.0, var_se2 = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        const double d = taus[i] - mean_tau;
        m2 += d * d;
        m4 += d * d * d * d;
        const double e = se2s[i] - mean_se2;
        var_se2 += e * e;
    }
    const double empirical_var = m2 / (n - 1.0);
    m2 /= n;
    m4 /= n;
    var_se2 /= n - 1.0;
    const double se_mean_se2 = std::sqrt(var_se2 / n);
    const double se_var = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    VarianceResult res;
    res.mean_se2 = mean_se2;
    res.empirical_var = empirical_var;
    res.mc_se = std::hypot(se_mean_se2, se_var);
    res.z_score = res.mc_se > 0.0
                      ? (mean_se2 - empirical_var) / res.mc_se
                      : (mean_se2 >= empirical_var
                             ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity());
    res.reps = reps;
    res.seed = seed;
    return res;
}

// ---- verification battery ---------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

StratumConfig random_config(split_rng& rng, int max_slots) {
    StratumConfig cfg;
    const int n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_slots - 1)));
    const int n_as = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
    const int n_oms = n - n_as;
    cfg.n1 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
    for (int i = 0; i < n_as; ++i) {
        cfg.y1_as.push_back(static_cast<int>(rng.next_below(2)));
        cfg.y0_as.push_back(static_cast<int>(rng.next_below(2)));
    }
    for (int i = 0; i < n_oms; ++i) {
        cfg.y1_oms.push_back(static_cast<int>(rng.next_below(2)));
    }
    return cfg;
}

AugmentedStratum config_as_stratum(int n_tilde, int n1, std::int64_t sum_y1,
                                   std::int64_t sum_y0) {
    AugmentedStratum s;
    s.base.stratum_id = "cfg";
    s.base.n1 = n1;
    s.base.n0_obs = n_tilde - n1;
    s.base.sum_y1 = sum_y1;
    s.base.sum_y0 = sum_y0;
    s.w = 0;
    s.n_tilde = n_tilde;
    s.rho_lb_realized = 0.0;
    s.tau_hat_aug = static_cast<double>(sum_y1) / static_cast<double>(n1) -
                    static_cast<double>(sum_y0) / static_cast<double>(n_tilde - n1);
    return s;
}

using Check = void (*)(const VerifyOptions&, CheckResult&);

void check_bounds_vertex_scan(const VerifyOptions& opts, CheckResult& out) {
    const std::vector<rational> gammas{rational(1), rational(5, 4), rational(2),
                                       rational(5)};
    const int top = std::min(opts.max_n, 12);
    struct Case {
        int n, n1;
        rational gamma;
    };
    std::vector<Case> cases;
    for (int n = 2; n <= top; ++n) {
        for (int n1 = 1; n1 <= n - 1; ++n1) {
            for (const auto& g : gammas) cases.push_back({n, n1, g});
        }
    }
    std::vector<double> gaps(cases.size(), 0.0);
    std::vector<std::string> errors(cases.size());
    parallel_for(cases.size(), opts.threads, [&](std::size_t i) {
        const auto& c = cases[i];
        const auto brute = brute_force_bounds(c.n, c.n1, c.gamma);
        const auto closed = closed_form_bounds_exact(c.n, c.n1, c.gamma);
        if (closed.first != brute.min_p || closed.second != brute.max_p) {
            errors[i] = "closed form != vertex scan at n=" + std::to_string(c.n) +
                        " n1=" + std::to_string(c.n1);
            return;
        }
        if (!brute.min_attained_at_complement || !brute.max_attained_at_z) {
            errors[i] = "extreme not attained at the claimed vertex, n=" +
                        std::to_string(c.n);
            return;
        }
        const auto engine = prob_bounds(c.n, c.n1, c.gamma.convert_to<double>());
        gaps[i] = std::max(
            std::fabs(engine.lower - closed.first.convert_to<double>()),
            std::fabs(engine.upper - closed.second.convert_to<double>()));
    });
    for (const auto& e : errors) {
        if (!e.empty()) {
            out.detail = e;
            return;
        }
    }
    const double max_engine_gap = *std::max_element(gaps.begin(), gaps.end());
    if (max_engine_gap > 1e-12) {
        out.detail = "engine bounds off by " + fmt(max_engine_gap);
        return;
    }
    out.pass = true;
    out.detail = std::to_string(cases.size()) + " cases exact; engine gap " +
                 fmt(max_engine_gap);
}

void check_overlap_enumeration(const VerifyOptions& opts, CheckResult& out) {
    const int top = std::min(opts.max_n, 12);
    double worst = 0.0;
    for (int n = 2; n <= top; ++n) {
        for (int n1 = 1; n1 <= n; ++n1) {
            const auto counts = overlap_counts(n, n1);
            const auto pmf = overlap_pmf(n, n1);
            if (counts.size() != pmf.size()) {
                out.detail = "support mismatch at n=" + std::to_string(n);
                return;
            }
            const bigint omega = binomial(n, n1);
            double sum = 0.0;
            for (std::size_t i = 0; i < pmf.size(); ++i) {
                const double exact = rational(counts[i], omega).convert_to<double>();
                worst = std::max(worst, std::fabs(pmf[i] - exact));
                sum += pmf[i];
            }
            worst = std::max(worst, std::fabs(sum - 1.0));
        }
    }
    if (worst > 1e-12) {
        out.detail = "pmf gap " + fmt(worst);
        return;
    }
    out.pass = true;
    out.detail = "pmf matches enumeration counts; max gap " + fmt(worst);
}

void check_multiplier_identity(const VerifyOptions& opts, CheckResult& out) {
    const std::vector<rational> gammas{rational(1), rational(5, 4), rational(2),
                                       rational(5)};
    const int top = std::min(opts.max_n, 12);
    double worst = 0.0;
    for (int n = 2; n <= top; ++n) {
        for (int n1 = 1; n1 <= n - 1; ++n1) {
            for (const auto& g : gammas) {
                const auto exact = exact_multipliers(n, n1, g);
                const double gd = g.convert_to<double>();
                worst = std::max(worst,
                                 std::fabs(tilt_multiplier(n, n1, gd, true) -
                                           exact.first.convert_to<double>()));
                worst = std::max(worst,
                                 std::fabs(tilt_multiplier(n, n1, gd, false) -
                                           exact.second.convert_to<double>()));
            }
        }
    }
    // one-treated closed forms
    double worst_one = 0.0;
    for (int n = 2; n <= 50; ++n) {
        for (int g = 1; g <= 10; ++g) {
            const double gd = g;
            const auto b = prob_bounds(n, 1, gd);
            worst_one = std::max(
                worst_one, std::fabs(b.lower - 1.0 / (gd * (n - 1) + 1.0)));
            worst_one = std::max(
                worst_one, std::fabs(b.upper - gd / ((n - 1) + gd)));
        }
    }
    if (worst > 1e-12 || worst_one > 1e-12) {
        out.detail = "multiplier gap " + fmt(worst) + ", one-treated gap " +
                     fmt(worst_one);
        return;
    }
    out.pass = true;
    out.detail = "expectation identity and one-treated reductions hold; gaps " +
                 fmt(worst) + " / " + fmt(worst_one);
}

void check_literal_equivalence(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 101);
    double worst = 0.0;
    const int cases = opts.quick ? 50 : 200;
    for (int k = 0; k < cases; ++k) {
        const int n = 2 + static_cast<int>(rng.next_below(11));  // up to 12
        const int n1 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
        const std::int64_t sum_y1 = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n1 + 1)));
        const std::int64_t sum_y0 = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n - n1 + 1)));
        const AugmentedStratum s = config_as_stratum(n, n1, sum_y1, sum_y0);
        TiltSpec spec;
        spec.gamma = 1.0 + 5.0 * rng.next_double();
        spec.tau0 = rng.next_double() - 0.5;
        spec.direction = rng.next_below(2) ? 1 : -1;
        const double lit = literal_tilted_stat(s, spec);
        const double eng = stratum_tilted_stat(s, spec);
        worst = std::max(worst, std::fabs(lit - eng));
    }
    // a few larger strata near the enumeration guard
    for (int n : {16, 18, 20}) {
        const int n1 = n / 2;
        const AugmentedStratum s = config_as_stratum(n, n1, n1 / 2, 1);
        TiltSpec spec;
        spec.gamma = 1.75;
        spec.tau0 = 0.05;
        worst = std::max(worst,
                         std::fabs(literal_tilted_stat(s, spec) -
                                   stratum_tilted_stat(s, spec)));
    }
    if (worst > 1e-12) {
        out.detail = "literal vs engine gap " + fmt(worst);
        return;
    }
    out.pass = true;
    out.detail = std::to_string(cases + 3) + " strata; max gap " + fmt(worst);
}

void check_submodel(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 202);
    double worst = 0.0;
    for (int k = 0; k < 40; ++k) {
        const int n = 2 + static_cast<int>(rng.next_below(6));
        const int n1 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
        SubmodelSpec spec;
        spec.gamma = 1.0 + 3.0 * rng.next_double();
        spec.kappa = 2.0 * rng.next_double() - 1.0;
        for (int i = 0; i < n; ++i) spec.u.push_back(rng.next_double());

        // kappa cancels after conditioning
        SubmodelSpec other = spec;
        other.kappa = spec.kappa + 3.1;
        const auto a = submodel_conditional(spec, n1);
        const auto b = submodel_conditional(other, n1);
        for (std::size_t i = 0; i < a.size(); ++i) {
            worst = std::max(worst, std::fabs(a[i] - b[i]));
        }

        // gamma = 1 gives the uniform distribution and marginals n1/n
        SubmodelSpec unif = spec;
        unif.gamma = 1.0;
        const auto u = submodel_conditional(unif, n1);
        const auto masks = enumerate_assignments(n, n1);
        const double flat = 1.0 / static_cast<double>(masks.size());
        std::vector<double> marginal(static_cast<std::size_t>(n), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i) {
            worst = std::max(worst, std::fabs(u[i] - flat));
            for (int slot = 0; slot < n; ++slot) {
                if ((masks[i] >> slot) & 1u) marginal[static_cast<std::size_t>(slot)] += u[i];
            }
        }
        for (double mg : marginal) {
            worst = std::max(worst,
                             std::fabs(mg - static_cast<double>(n1) / n));
        }

        // vertex u matches the closed conditional form
        SubmodelSpec vertex = spec;
        for (auto& ui : vertex.u) ui = ui > 0.5 ? 1.0 : 0.0;
        std::uint32_t u_mask = 0;
        for (int i = 0; i < n; ++i) {
            if (vertex.u[static_cast<std::size_t>(i)] > 0.5) u_mask |= 1u << i;
        }
        const auto v = submodel_conditional(vertex, n1);
        const rational g = to_rational(vertex.gamma);
        const bigint p = numerator(g), q = denominator(g);
        const auto term = scaled_powers(p, q, n1);
        bigint den = 0;
        for (std::uint32_t zm : masks) den += term[static_cast<std::size_t>(std::popcount(zm & u_mask))];
        for (std::size_t i = 0; i < v.size(); ++i) {
            const rational exact(term[static_cast<std::size_t>(std::popcount(masks[i] & u_mask))], den);
            worst = std::max(worst, std::fabs(v[i] - exact.convert_to<double>()));
        }
    }
    if (worst > 1e-11) {
        out.detail = "submodel gap " + fmt(worst);
        return;
    }
    out.pass = true;
    out.detail = "kappa cancellation, uniform reduction, vertex form; max gap " +
                 fmt(worst);
}

void check_hypergeom(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 303);
    for (int k = 0; k < 60; ++k) {
        const StratumConfig cfg = random_config(rng, 9);
        const auto formula = hypergeom_stopped_controls(cfg);
        const auto enumd = stopped_controls_by_enumeration(cfg);
        // enumeration drops zero-probability endpoints; compare the common grid
        std::map<int, rational> f;
        for (const auto& [c, p] : formula) f[c] = p;
        rational mass = 0;
        for (const auto& [c, p] : enumd) {
            auto it = f.find(c);
            if (it == f.end() || it->second != p) {
                out.detail = "pmf mismatch at c=" + std::to_string(c);
                return;
            }
            mass += p;
        }
        if (mass != 1) {
            out.detail = "enumerated pmf does not sum to one";
            return;
        }
    }
    // rho = 0 (all Always-Stop): C degenerate at n0
    StratumConfig all_as;
    all_as.n1 = 2;
    all_as.y1_as = {1, 0, 1, 0};
    all_as.y0_as = {0, 1, 0, 0};
    const auto pmf = hypergeom_stopped_controls(all_as);
    if (pmf.size() != 1 || pmf[0].first != all_as.n0() || pmf[0].second != 1) {
        out.detail = "rho=0 pmf not degenerate at n0";
        return;
    }
    out.pass = true;
    out.detail = "formula pmf equals enumeration exactly on 60 random configs";
}

void check_cond_probs(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 404);
    for (int k = 0; k < 40; ++k) {
        const StratumConfig cfg = random_config(rng, 9);
        for (const auto& [c, p] : hypergeom_stopped_controls(cfg)) {
            if (p == 0) continue;
            const auto probs = cond_treat_probs_given_c(cfg, c);
            if (probs.as_slot &&
                *probs.as_slot != rational(cfg.n_as() - c, cfg.n_as())) {
                out.detail = "AS conditional probability mismatch";
                return;
            }
            if (probs.oms_slot &&
                *probs.oms_slot !=
                    rational(cfg.n1 - (cfg.n_as() - c), cfg.n_oms())) {
                out.detail = "OMS conditional probability mismatch";
                return;
            }
        }
    }
    out.pass = true;
    out.detail = "conditional treatment probabilities match enumeration exactly";
}

void check_aug_equals_full(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 505);
    for (int k = 0; k < 60; ++k) {
        const StratumConfig cfg = random_config(rng, 10);
        if (max_aug_full_gap(cfg) != 0) {
            out.detail = "augmented estimator differs from the full-data one";
            return;
        }
    }
    out.pass = true;
    out.detail = "augmented equals full-data estimator on 60 random configs";
}

void check_bias_formula(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 606);
    for (int k = 0; k < 60; ++k) {
        const StratumConfig cfg = random_config(rng, 9);
        const rational rho(cfg.n_oms(), cfg.n_total());
        if (exact_bias(cfg, rho) != exhaustive_bias(cfg)) {
            out.detail = "formula bias != exhaustive bias";
            return;
        }
    }
    // zero cases: all Always-Stop, and equal treated means across kinds
    StratumConfig zero1;
    zero1.n1 = 2;
    zero1.y1_as = {1, 1, 0, 0};
    zero1.y0_as = {1, 0, 1, 0};
    if (exact_bias(zero1, rational(0)) != 0) {
        out.detail = "rho=0 bias not zero";
        return;
    }
    StratumConfig zero2;
    zero2.n1 = 2;
    zero2.y1_as = {1, 0};
    zero2.y0_as = {1, 1};
    zero2.y1_oms = {1, 0};
    if (exact_bias(zero2, rational(2, 4)) != 0) {
        out.detail = "equal-treated-means bias not zero";
        return;
    }
    out.pass = true;
    out.detail = "bias formula equals exhaustive average; zero cases hold";
}

void check_prop2_exact(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 707);
    const int cases = opts.quick ? 12 : 40;
    const std::vector<rational> gammas{rational(3, 2), rational(3)};
    std::atomic<bool> failed{false};
    std::vector<StratumConfig> configs;
    for (int k = 0; k < cases; ++k) {
        configs.push_back(random_config(rng, std::min(opts.max_n, 8)));
    }
    parallel_for(configs.size(), opts.threads, [&](std::size_t i) {
        if (failed.load()) return;
        const StratumConfig& cfg = configs[i];
        const rational tau0 = cfg.tau();  // the null holds exactly
        const std::uint32_t everyone = full_mask(cfg.n_total());
        for (const auto& g : gammas) {
            for (std::uint32_t u = 0; u <= everyone; ++u) {
                if (exact_tilt_expectation(cfg, u, g, tau0, +1) > 0) failed.store(true);
                if (exact_tilt_expectation(cfg, u, g, tau0, -1) < 0) failed.store(true);
                if (failed.load()) return;
            }
        }
    });
    if (failed.load()) {
        out.detail = "a null expectation crossed zero in the alternative's direction";
        return;
    }
    out.pass = true;
    out.detail = std::to_string(cases) +
                 " null configs, all vertex mechanisms, both directions: bounded";
}

void check_mc_smoke(const VerifyOptions& opts, CheckResult& out) {
    split_rng rng(opts.seed, 808);
    std::vector<StratumConfig> configs;
    for (int s = 0; s < 20; ++s) {
        StratumConfig cfg;
        cfg.n1 = 1 + static_cast<int>(rng.next_below(5));
        for (int i = 0; i < 6; ++i) {
            const int y = static_cast<int>(rng.next_below(2));
            cfg.y1_as.push_back(y);  // sharp null: y(1) = y(0)
            cfg.y0_as.push_back(y);
        }
        configs.push_back(cfg);
    }
    TiltSpec spec;
    spec.gamma = 1.0;
    spec.tau0 = 0.0;
    spec.direction = +1;
    MechanismSpec mech;  // uniform
    mech.gamma = 1.0;
    const double alpha = 0.05;
    const auto res = monte_carlo_type1(configs, mech, spec, opts.mc_reps, opts.seed,
                                       alpha, opts.threads);
    const double bound =
        alpha + 4.0 * std::sqrt(alpha * (1 - alpha) / static_cast<double>(opts.mc_reps));
    if (res.rejection_rate > bound) {
        out.detail = "rejection rate " + fmt(res.rejection_rate) + " above " +
                     fmt(bound);
        return;
    }
    const auto var = monte_carlo_variance_conservatism(configs, mech, spec,
                                                       opts.mc_reps, opts.seed,
                                                       opts.threads);
    if (var.z_score < -3.0) {
        out.detail = "variance estimate below empirical variance, z = " +
                     fmt(var.z_score);
        return;
    }
    out.pass = true;
    out.detail = "rejection " + fmt(res.rejection_rate) + " <= " + fmt(bound) +
                 "; variance z " + fmt(var.z_score);
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
    struct Entry {
        const char* name;
        Check fn;
        bool skip_when_quick;
    };
    const Entry entries[] = {
        {"bounds-vertex-scan", check_bounds_vertex_scan, false},
        {"overlap-pmf-enumeration", check_overlap_enumeration, false},
        {"multiplier-identity", check_multiplier_identity, false},
        {"literal-tilt-equivalence", check_literal_equivalence, false},
        {"submodel-conditional", check_submodel, false},
        {"hypergeometric-pmf", check_hypergeom, false},
        {"conditional-treatment-probs", check_cond_probs, false},
        {"augmented-equals-full", check_aug_equals_full, false},
        {"bias-formula", check_bias_formula, false},
        {"null-expectation-bound", check_prop2_exact, false},
        {"monte-carlo-smoke", check_mc_smoke, true},
    };
    std::vector<CheckResult> results;
    for (const auto& e : entries) {
        if (opts.quick && e.skip_when_quick) continue;
        CheckResult r;
        r.name = e.name;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.fn(opts, r);
        } catch (const std::exception& ex) {
            r.pass = false;
            r.detail = std::string("exception: ") + ex.what();
        }
        r.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace sensweep::oracle
