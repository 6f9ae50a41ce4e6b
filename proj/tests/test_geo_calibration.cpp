#include <doctest.h>

#include <cmath>
#include <random>

#include "sensweep/errors.hpp"
#include "sensweep/geo_calibration.hpp"
#include "test_util.hpp"

using namespace sensweep;

namespace {

BlockGroupRecord bg(const std::string& stratum, const std::string& block, double f,
                    double w) {
    return {stratum, block, f, w};
}

}  // namespace

TEST_CASE("odds reference values") {
    CHECK(odds(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(odds(0.8) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(odds(0.0) == 0.0);
    CHECK_THROWS_WITH_AS(odds(1.0), doctest::Contains("degenerate block group"),
                         validation_error);
    CHECK_THROWS_AS(odds(-0.1), validation_error);
    CHECK_THROWS_AS(odds(1.1), validation_error);
}

TEST_CASE("weighted_quantile reference values") {
    const std::vector<double> v{1.0, 4.0}, w{100.0, 100.0};
    CHECK(weighted_quantile(v, w, 0.0) == 1.0);
    CHECK(weighted_quantile(v, w, 1.0) == 4.0);

    const std::vector<double> v3{1.0, 2.0, 3.0}, w3{1.0, 1.0, 2.0};
    CHECK(weighted_quantile(v3, w3, 0.5) == 2.0);

    const std::vector<double> v1{7.5}, w1{3.0};
    for (double q : {0.0, 0.3, 1.0}) CHECK(weighted_quantile(v1, w1, q) == 7.5);
}

TEST_CASE("weighted_quantile ignores zero-weight entries") {
    const std::vector<double> v{-10.0, 1.0, 2.0, 99.0}, w{0.0, 1.0, 1.0, 0.0};
    CHECK(weighted_quantile(v, w, 0.0) == 1.0);
    CHECK(weighted_quantile(v, w, 1.0) == 2.0);
    const std::vector<double> zeros{0.0, 0.0};
    const std::vector<double> vz{1.0, 2.0};
    CHECK_THROWS_AS(weighted_quantile(vz, zeros, 0.5), validation_error);
}

TEST_CASE("geo_ceiling worked examples") {
    SUBCASE("single block group gives exactly one") {
        std::vector<BlockGroupRecord> recs{bg("s", "b1", 0.37, 412)};
        CHECK(geo_ceiling(recs, 0.0) == 1.0);
        CHECK(geo_ceiling(recs, 0.25) == 1.0);
    }
    SUBCASE("two equal-weight block groups at xi = 0") {
        std::vector<BlockGroupRecord> recs{bg("s", "b1", 0.2, 50),
                                           bg("s", "b2", 0.5, 50)};
        CHECK(geo_ceiling(recs, 0.0) == doctest::Approx(4.0).epsilon(1e-13));
    }
    SUBCASE("trim pulls both quantiles into the middle mass") {
        // eta = (0.5, 1, 9) with weights (1, 8, 1); both trimmed quantiles hit
        // the middle value
        std::vector<BlockGroupRecord> recs{bg("s", "b1", 1.0 / 3.0, 1),
                                           bg("s", "b2", 0.5, 8),
                                           bg("s", "b3", 0.9, 1)};
        CHECK(geo_ceiling(recs, 0.25) == 1.0);
    }
    SUBCASE("all-white lower tail reports an infinite ceiling") {
        std::vector<BlockGroupRecord> recs{bg("s", "b1", 0.0, 10),
                                           bg("s", "b2", 0.5, 10)};
        CHECK(std::isinf(geo_ceiling(recs, 0.0)));
    }
    SUBCASE("fully minority block groups are excluded with a warning") {
        std::vector<BlockGroupRecord> recs{bg("s", "b1", 1.0, 10),
                                           bg("s", "b2", 0.5, 10)};
        std::vector<std::string> warnings;
        CHECK(geo_ceiling(recs, 0.0, &warnings) == 1.0);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("b1") != std::string::npos);
        std::vector<BlockGroupRecord> all_bad{bg("s", "b1", 1.0, 10)};
        CHECK_THROWS_AS(geo_ceiling(all_bad, 0.0), validation_error);
    }
}

TEST_CASE("geo_ceiling is nonincreasing in xi and at least one") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> funif(0.0, 0.99), wunif(1.0, 900.0);
    for (int k = 0; k < 100; ++k) {
        std::vector<BlockGroupRecord> recs;
        const int blocks = 1 + static_cast<int>(rng() % 6);
        for (int b = 0; b < blocks; ++b) {
            recs.push_back(bg("s", "b" + std::to_string(b), funif(rng), wunif(rng)));
        }
        double prev = std::numeric_limits<double>::infinity();
        for (double xi : {0.0, 0.05, 0.15, 0.25, 0.4}) {
            const double c = geo_ceiling(recs, xi);
            CHECK(c >= 1.0);
            CHECK(c <= prev + 1e-12);
            prev = c;
        }
    }
}

TEST_CASE("geo_ceiling is invariant to weight rescaling") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> funif(0.0, 0.99), wunif(1.0, 900.0);
    for (int k = 0; k < 50; ++k) {
        std::vector<BlockGroupRecord> recs;
        const int blocks = 1 + static_cast<int>(rng() % 5);
        for (int b = 0; b < blocks; ++b) {
            recs.push_back(bg("s", "b" + std::to_string(b), funif(rng), wunif(rng)));
        }
        const double base = geo_ceiling(recs, 0.2);
        for (double scale : {0.5, 2.0, 1024.0}) {  // exact binary scalings
            auto scaled = recs;
            for (auto& r : scaled) r.weight *= scale;
            CHECK(geo_ceiling(scaled, 0.2) == base);
        }
    }
}

TEST_CASE("build_ceiling_table groups by stratum") {
    std::vector<BlockGroupRecord> recs{
        bg("s1", "b1", 0.2, 50), bg("s1", "b2", 0.5, 50), bg("s2", "b3", 0.4, 10)};
    const auto table = build_ceiling_table(recs, 0.0);
    REQUIRE(table.ceilings.size() == 2);
    CHECK(table.ceilings.at("s1").ceiling == doctest::Approx(4.0));
    CHECK(table.ceilings.at("s1").provenance == CeilingProvenance::computed);
    CHECK(table.ceilings.at("s2").ceiling == 1.0);
}

TEST_CASE("inherit_ceilings copies donors and refuses chains") {
    std::vector<BlockGroupRecord> recs{bg("s2007", "b1", 0.2, 50),
                                       bg("s2007", "b2", 0.5, 50)};
    auto table = build_ceiling_table(recs, 0.0);

    SUBCASE("copy from a computed donor") {
        const auto out =
            inherit_ceilings(table, {{"s2003", "s2007"}});
        REQUIRE(out.ceilings.count("s2003") == 1);
        CHECK(out.ceilings.at("s2003").ceiling == doctest::Approx(4.0));
        CHECK(out.ceilings.at("s2003").provenance == CeilingProvenance::inherited);
    }
    SUBCASE("empty mapping is the identity") {
        const auto out = inherit_ceilings(table, {});
        CHECK(out.ceilings.size() == table.ceilings.size());
    }
    SUBCASE("unknown donor leaves the stratum absent with a warning") {
        const auto out = inherit_ceilings(table, {{"s2003", "nope"}});
        CHECK(out.ceilings.count("s2003") == 0);
        REQUIRE_FALSE(out.warnings.empty());
    }
    SUBCASE("inheriting from an inherited entry is refused") {
        auto first = inherit_ceilings(table, {{"s2003", "s2007"}});
        CHECK_THROWS_WITH_AS(inherit_ceilings(first, {{"s1999", "s2003"}}),
                             doctest::Contains("transitive"), validation_error);
    }
}

TEST_CASE("coverage_share weights strata by augmented size") {
    StudySummary sum;
    sum.strata.push_back({"a", 1, 2, 1, 0});  // observed 3
    sum.strata.push_back({"b", 3, 4, 1, 1});  // observed 7
    CeilingTable table;
    table.ceilings["a"] = {1.2, CeilingProvenance::computed};
    table.ceilings["b"] = {2.0, CeilingProvenance::computed};

    // rho = 0 keeps observed sizes: only b (7 of 10) reaches 1.5
    CHECK(coverage_share(sum, table, 1.5, 0.0) == doctest::Approx(0.7));
    CHECK(coverage_share(sum, table, 1.5, 0.0, true) == doctest::Approx(0.7));
    // every ceiling reaches a threshold of 1
    CHECK(coverage_share(sum, table, 1.0, 0.0) == doctest::Approx(1.0));
    // absent strata are unconstrained and always covered
    CeilingTable partial;
    partial.ceilings["a"] = {1.2, CeilingProvenance::computed};
    CHECK(coverage_share(sum, partial, 1.5, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("coverage_share responds to the augmentation level") {
    StudySummary sum;
    sum.strata.push_back({"a", 1, 1, 1, 0});
    sum.strata.push_back({"b", 1, 1, 1, 1});
    CeilingTable table;
    table.ceilings["a"] = {3.0, CeilingProvenance::computed};
    table.ceilings["b"] = {1.1, CeilingProvenance::computed};
    // equal observed sizes: share 1/2; augmented sizes stay equal under a
    // common rho, so the share is invariant here
    CHECK(coverage_share(sum, table, 2.0, 0.0) == doctest::Approx(0.5));
    CHECK(coverage_share(sum, table, 2.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("block-group and donor csv readers") {
    testutil::TempFile bgf(
        "stratum_id,block_group_id,minority_frac,population\n"
        "s1,b1,0.2,50\n"
        "s1,b2,0.5,50\n");
    const auto recs = read_block_groups_csv(bgf.path());
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].minority_frac == 0.5);

    testutil::TempFile donors("stratum_id,donor_stratum_id\ns2003,s2007\n");
    const auto mapping = read_donor_csv(donors.path());
    REQUIRE(mapping.size() == 1);
    CHECK(mapping.at("s2003") == "s2007");

    testutil::TempFile bad("stratum_id,block_group_id,minority_frac,population\n"
                           "s1,b1,abc,50\n");
    CHECK_THROWS_AS(read_block_groups_csv(bad.path()), validation_error);
}

TEST_CASE("ceiling csv writer covers analysis strata") {
    std::vector<BlockGroupRecord> recs{bg("s1", "b1", 0.2, 50),
                                       bg("s1", "b2", 0.5, 50)};
    const auto table = build_ceiling_table(recs, 0.0);
    StudySummary sum;
    sum.strata.push_back({"s1", 1, 1, 1, 0});
    sum.strata.push_back({"s9", 1, 1, 1, 0});
    testutil::TempFile out("");
    write_ceilings_csv(table, &sum, out.path(), "cfg");
    std::ifstream in(out.path());
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("# ", 0) == 0);
    std::getline(in, line);
    CHECK(line == "stratum_id,ceiling,provenance");
    std::getline(in, line);
    CHECK(line.find("s1") == 0);
    CHECK(line.find("computed") != std::string::npos);
    std::getline(in, line);
    CHECK(line.find("s9") == 0);
    CHECK(line.find("absent") != std::string::npos);
}
