#include <doctest.h>

#include <cmath>

#include "sensweep/errors.hpp"
#include "sensweep/tilt_engine.hpp"

using namespace sensweep;

namespace {

AugmentedStratum make_stratum(std::int64_t n1, std::int64_t n0, std::int64_t sy1,
                              std::int64_t sy0, std::int64_t w,
                              const std::string& id = "g") {
    AugmentedStratum s;
    s.base = {id, n1, n0, sy1, sy0};
    s.w = w;
    s.n_tilde = n1 + n0 + w;
    s.rho_lb_realized =
        static_cast<double>(w) / static_cast<double>(s.n_tilde);
    s.tau_hat_aug = static_cast<double>(sy1) / static_cast<double>(n1) -
                    static_cast<double>(sy0) / static_cast<double>(n0 + w);
    return s;
}

}  // namespace

TEST_CASE("overlap_pmf small exact values") {
    const auto p42 = overlap_pmf(4, 2);
    REQUIRE(p42.size() == 3);
    CHECK(p42[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(p42[1] == doctest::Approx(4.0 / 6.0).epsilon(1e-13));
    CHECK(p42[2] == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

    const auto p31 = overlap_pmf(3, 1);
    REQUIRE(p31.size() == 2);
    CHECK(p31[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(p31[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("overlap_pmf degenerate when every slot is treated") {
    const auto p = overlap_pmf(5, 5);
    REQUIRE(p.size() == 1);
    CHECK(p[0] == doctest::Approx(1.0));
}

TEST_CASE("overlap_pmf sums to one") {
    for (std::int64_t n = 2; n <= 40; n += 7) {
        for (std::int64_t n1 = 1; n1 <= n; n1 += 3) {
            const auto p = overlap_pmf(n, n1);
            double sum = 0.0;
            for (double v : p) sum += v;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("prob_bounds worked values") {
    const auto b31 = prob_bounds(3, 1, 2.0);
    CHECK(b31.lower == doctest::Approx(0.2).epsilon(1e-13));
    CHECK(b31.upper == doctest::Approx(0.5).epsilon(1e-13));

    const auto b42 = prob_bounds(4, 2, 2.0);
    CHECK(b42.lower == doctest::Approx(1.0 / 13.0).epsilon(1e-13));
    CHECK(b42.upper == doctest::Approx(4.0 / 13.0).epsilon(1e-13));
}

TEST_CASE("prob_bounds collapse to the uniform probability at gamma = 1") {
    for (std::int64_t n = 2; n <= 12; ++n) {
        for (std::int64_t n1 = 1; n1 < n; ++n1) {
            const auto b = prob_bounds(n, n1, 1.0);
            const double unif = std::exp(-(std::lgamma(n + 1.0) -
                                           std::lgamma(n1 + 1.0) -
                                           std::lgamma(n - n1 + 1.0)));
            CHECK(b.lower == doctest::Approx(unif).epsilon(1e-12));
            CHECK(b.upper == doctest::Approx(unif).epsilon(1e-12));
        }
    }
}

TEST_CASE("prob_bounds bracket the uniform probability") {
    for (std::int64_t n = 2; n <= 10; ++n) {
        for (std::int64_t n1 = 1; n1 < n; ++n1) {
            for (double gamma : {1.0, 1.25, 2.0, 5.0}) {
                const auto b = prob_bounds(n, n1, gamma);
                const double unif = std::exp(-(std::lgamma(n + 1.0) -
                                               std::lgamma(n1 + 1.0) -
                                               std::lgamma(n - n1 + 1.0)));
                CHECK(b.lower <= unif * (1 + 1e-12));
                CHECK(b.upper >= unif * (1 - 1e-12));
                if (gamma > 1.0) {
                    CHECK(b.lower < unif);
                    CHECK(b.upper > unif);
                }
            }
        }
    }
}

TEST_CASE("prob_bounds rejects bad inputs") {
    CHECK_THROWS_AS(prob_bounds(3, 0, 2.0), validation_error);
    CHECK_THROWS_AS(prob_bounds(3, 4, 2.0), validation_error);
    CHECK_THROWS_AS(prob_bounds(3, 1, 0.5), validation_error);
}

TEST_CASE("tilt_multiplier worked values") {
    // one treated in four: (n - 1 + gamma) / (gamma n)
    CHECK(tilt_multiplier(4, 1, 2.0, true) == doctest::Approx(5.0 / 8.0).epsilon(1e-13));
    // shared example: E[2^(J-2)] on (4, 2)
    CHECK(tilt_multiplier(4, 2, 2.0, true) ==
          doctest::Approx(13.0 / 24.0).epsilon(1e-13));
    CHECK(tilt_multiplier(4, 2, 1.0, true) == 1.0);
    CHECK(tilt_multiplier(4, 2, 1.0, false) == 1.0);
}

TEST_CASE("tilt_multiplier monotone in gamma and bracketed by 1") {
    for (std::int64_t n : {5, 9, 14}) {
        for (std::int64_t n1 = 1; n1 < n; n1 += 2) {
            double prev_shrink = 2.0, prev_inflate = 0.0;
            for (double gamma : {1.0, 1.2, 1.7, 2.5, 4.0, 8.0}) {
                const double sh = tilt_multiplier(n, n1, gamma, true);
                const double in = tilt_multiplier(n, n1, gamma, false);
                CHECK(sh <= 1.0 + 1e-12);
                CHECK(in >= 1.0 - 1e-12);
                CHECK(sh <= prev_shrink + 1e-12);
                CHECK(in >= prev_inflate - 1e-12);
                prev_shrink = sh;
                prev_inflate = in;
            }
        }
    }
}

TEST_CASE("tilt_multiplier equals the bound-inverse form") {
    // (1/|Omega|)/p_upper and (1/|Omega|)/p_lower, here on (4, 2, 2):
    // |Omega| = 6, p_upper = 4/13, p_lower = 1/13
    CHECK(tilt_multiplier(4, 2, 2.0, true) ==
          doctest::Approx((1.0 / 6.0) / (4.0 / 13.0)).epsilon(1e-13));
    CHECK(tilt_multiplier(4, 2, 2.0, false) ==
          doctest::Approx((1.0 / 6.0) / (1.0 / 13.0)).epsilon(1e-13));
}

TEST_CASE("stratum_tilted_stat reproduces the worked single-stratum example") {
    const auto s = make_stratum(1, 1, 1, 1, 2);  // tau_hat = 2/3, n_tilde = 4
    TiltSpec spec;
    spec.gamma = 2.0;
    spec.tau0 = 0.0;
    spec.direction = +1;
    CHECK(stratum_tilted_stat(s, spec) == doctest::Approx(5.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("stratum_tilted_stat is the centered statistic at gamma = 1") {
    const auto s = make_stratum(3, 4, 2, 1, 1);
    TiltSpec spec;
    spec.gamma = 1.0;
    spec.tau0 = 0.2;
    spec.direction = +1;
    CHECK(stratum_tilted_stat(s, spec) ==
          doctest::Approx(s.tau_hat_aug - 0.2).epsilon(1e-13));
}

TEST_CASE("stratum_tilted_stat inflates against the alternative") {
    // tau_hat = 0.1, tau0 = 0.3, upper-tailed: inflate by E[2^(1-J)] = 5/3
    auto s = make_stratum(1, 2, 0, 0, 0);
    s.tau_hat_aug = 0.1;  // synthetic centered value
    TiltSpec spec;
    spec.gamma = 2.0;
    spec.tau0 = 0.3;
    spec.direction = +1;
    CHECK(stratum_tilted_stat(s, spec) ==
          doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("tilting preserves sign and shrink/inflate ordering") {
    TiltSpec spec;
    spec.gamma = 3.0;
    spec.tau0 = 0.25;
    for (int d : {+1, -1}) {
        spec.direction = d;
        for (std::int64_t sy1 = 0; sy1 <= 3; ++sy1) {
            for (std::int64_t sy0 = 0; sy0 <= 2; ++sy0) {
                const auto s = make_stratum(3, 2, sy1, sy0, 1);
                const double c = s.tau_hat_aug - spec.tau0;
                const double lam = stratum_tilted_stat(s, spec);
                if (c > 0) CHECK(lam > 0);
                if (c < 0) CHECK(lam < 0);
                if (c == 0) CHECK(lam == 0);
                const bool shrunk = d * c >= 0;
                if (shrunk) {
                    CHECK(std::fabs(lam) <= std::fabs(c) + 1e-12);
                } else {
                    CHECK(std::fabs(lam) >= std::fabs(c) - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("boundary d*(tau-tau0) = 0 uses the shrink branch") {
    auto s = make_stratum(2, 2, 1, 1, 0);
    TiltSpec spec;
    spec.gamma = 2.0;
    spec.tau0 = s.tau_hat_aug;
    spec.direction = +1;
    CHECK(stratum_tilted_stat(s, spec) == 0.0);
}

TEST_CASE("aggregate_tilted_stat composes weights and lambdas") {
    TiltSpec spec;
    spec.gamma = 2.0;
    spec.tau0 = 0.0;
    spec.direction = +1;

    SUBCASE("single stratum") {
        const auto s = make_stratum(1, 1, 1, 1, 2);
        std::vector<AugmentedStratum> strata{s};
        const auto res = aggregate_tilted_stat(strata, spec);
        CHECK(res.tau_tilt == doctest::Approx(res.lambda[0]).epsilon(1e-13));
    }

    SUBCASE("two identical strata share the common lambda") {
        const auto s = make_stratum(1, 1, 1, 1, 2, "a");
        auto t = s;
        t.base.stratum_id = "b";
        std::vector<AugmentedStratum> strata{s, t};
        const auto res = aggregate_tilted_stat(strata, spec);
        CHECK(res.tau_tilt == doctest::Approx(res.lambda[0]).epsilon(1e-13));
        CHECK(res.weight[0] == doctest::Approx(0.5).epsilon(1e-15));
    }

    SUBCASE("weighted average of unequal strata") {
        // sizes 4 and 8 with lambdas 0.5 and -0.1 average to 0.1
        auto a = make_stratum(1, 3, 0, 0, 0, "a");
        auto b = make_stratum(2, 6, 0, 0, 0, "b");
        std::vector<AugmentedStratum> strata{a, b};
        TiltSpec unit;
        unit.gamma = 1.0;
        unit.direction = +1;
        unit.tau0 = 0.0;
        strata[0].tau_hat_aug = 0.5;
        strata[1].tau_hat_aug = -0.1;
        const auto res = aggregate_tilted_stat(strata, unit);
        CHECK(res.tau_tilt == doctest::Approx(0.1).epsilon(1e-13));
        CHECK(res.n_tilde_star == doctest::Approx(12.0));
    }

    SUBCASE("weights sum to one and recompose tau_tilt") {
        std::vector<AugmentedStratum> strata{
            make_stratum(2, 3, 1, 1, 1, "a"), make_stratum(1, 4, 1, 2, 0, "b"),
            make_stratum(3, 2, 2, 0, 2, "c")};
        const auto res = aggregate_tilted_stat(strata, spec);
        double wsum = 0.0, recomposed = 0.0;
        for (std::size_t i = 0; i < res.weight.size(); ++i) {
            wsum += res.weight[i];
            recomposed += res.weight[i] * res.lambda[i];
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(recomposed == doctest::Approx(res.tau_tilt).epsilon(1e-12));
    }

    SUBCASE("empty input rejected") {
        std::vector<AugmentedStratum> strata;
        CHECK_THROWS_AS(aggregate_tilted_stat(strata, spec), validation_error);
    }
}

TEST_CASE("per-stratum gamma map with uniform values matches uniform gamma") {
    std::vector<AugmentedStratum> strata{make_stratum(2, 3, 1, 1, 1, "a"),
                                         make_stratum(1, 4, 1, 2, 0, "b")};
    TiltSpec uniform;
    uniform.gamma = 1.8;
    uniform.tau0 = 0.05;
    uniform.direction = -1;
    TiltSpec mapped = uniform;
    mapped.gamma_by_stratum = {{"a", 1.8}, {"b", 1.8}};
    const auto u = aggregate_tilted_stat(strata, uniform);
    const auto m = aggregate_tilted_stat(strata, mapped);
    CHECK(u.tau_tilt == m.tau_tilt);
    CHECK(u.lambda[0] == m.lambda[0]);
    CHECK(u.lambda[1] == m.lambda[1]);
}

TEST_CASE("gamma map falls back to the uniform value for absent strata") {
    const auto s = make_stratum(1, 1, 1, 0, 0, "zzz");
    TiltSpec spec;
    spec.gamma = 2.0;
    spec.gamma_by_stratum = {{"other", 5.0}};
    spec.tau0 = 0.0;
    spec.direction = +1;
    TiltSpec plain = spec;
    plain.gamma_by_stratum.clear();
    CHECK(stratum_tilted_stat(s, spec) == stratum_tilted_stat(s, plain));
}
