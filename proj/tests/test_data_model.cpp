#include <doctest.h>

#include <algorithm>
#include <random>

#include "sensweep/data_model.hpp"
#include "sensweep/errors.hpp"
#include "test_util.hpp"

using namespace sensweep;

TEST_CASE("load_encounters parses canonical rows") {
    testutil::TempFile f("stratum_id,treated,outcome\ns1,1,1\ns1,0,1\n");
    const auto recs = load_encounters(f.path());
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].stratum_id == "s1");
    CHECK(recs[0].treated == 1);
    CHECK(recs[0].outcome == 1);
    CHECK(recs[1].treated == 0);
}

TEST_CASE("load_encounters reports the offending row") {
    std::string body = "stratum_id,treated,outcome\n";
    for (int i = 0; i < 6; ++i) body += "s,1,0\n";
    body += "s,2,0\n";  // row 7
    testutil::TempFile f(body);
    CHECK_THROWS_WITH_AS(load_encounters(f.path()),
                         doctest::Contains("row 7"), validation_error);
}

TEST_CASE("load_encounters schema remapping matches canonical parse") {
    testutil::TempFile canonical("stratum_id,treated,outcome\na,1,0\nb,0,1\n");
    testutil::TempFile remapped("poststratum_id,minority,force_any\na,1,0\nb,0,1\n");
    InputSchema schema;
    schema.stratum_col = "poststratum_id";
    schema.treated_col = "minority";
    schema.outcome_col = "force_any";
    const auto a = load_encounters(canonical.path());
    const auto b = load_encounters(remapped.path(), schema);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].stratum_id == b[i].stratum_id);
        CHECK(a[i].treated == b[i].treated);
        CHECK(a[i].outcome == b[i].outcome);
    }
}

TEST_CASE("load_encounters honors an alternate delimiter") {
    testutil::TempFile f("stratum_id;treated;outcome\na;1;0\na;0;1\n");
    InputSchema schema;
    schema.delimiter = ';';
    const auto recs = load_encounters(f.path(), schema);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].stratum_id == "a");
    CHECK(recs[1].outcome == 1);
}

TEST_CASE("load_encounters error cases") {
    testutil::TempFile missing_col("stratum_id,treated\na,1\n");
    CHECK_THROWS_AS(load_encounters(missing_col.path()), validation_error);
    testutil::TempFile empty_id("stratum_id,treated,outcome\n,1,0\n");
    CHECK_THROWS_AS(load_encounters(empty_id.path()), validation_error);
    CHECK_THROWS_AS(load_encounters("/nonexistent/path.csv"), validation_error);
}

TEST_CASE("summarize tallies the single-stratum example") {
    std::vector<EncounterRecord> recs{{"s1", 1, 1}, {"s1", 0, 1}};
    const auto sum = summarize(recs);
    REQUIRE(sum.strata.size() == 1);
    CHECK(sum.strata[0].n1 == 1);
    CHECK(sum.strata[0].n0_obs == 1);
    CHECK(sum.strata[0].sum_y1 == 1);
    CHECK(sum.strata[0].sum_y0 == 1);
    CHECK_FALSE(sum.informative_only);
}

TEST_CASE("summarize of empty input is empty") {
    const auto sum = summarize(std::vector<EncounterRecord>{});
    CHECK(sum.strata.empty());
}

TEST_CASE("summarize matches hand tallies across two strata") {
    std::vector<EncounterRecord> recs{
        {"a", 1, 0}, {"b", 0, 1}, {"a", 0, 0}, {"b", 1, 1}};
    const auto sum = summarize(recs);
    REQUIRE(sum.strata.size() == 2);
    CHECK(sum.strata[0].stratum_id == "a");
    CHECK(sum.strata[0].n1 == 1);
    CHECK(sum.strata[0].n0_obs == 1);
    CHECK(sum.strata[0].sum_y1 == 0);
    CHECK(sum.strata[0].sum_y0 == 0);
    CHECK(sum.strata[1].stratum_id == "b");
    CHECK(sum.strata[1].sum_y1 == 1);
    CHECK(sum.strata[1].sum_y0 == 1);
}

TEST_CASE("summarize is permutation invariant and preserves totals") {
    std::mt19937_64 rng(7);
    std::vector<EncounterRecord> recs;
    for (int i = 0; i < 200; ++i) {
        recs.push_back({"s" + std::to_string(rng() % 13),
                        static_cast<std::int8_t>(rng() % 2),
                        static_cast<std::int8_t>(rng() % 2)});
    }
    const auto base = summarize(recs);
    std::shuffle(recs.begin(), recs.end(), rng);
    const auto shuffled = summarize(recs);
    REQUIRE(base.strata.size() == shuffled.strata.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < base.strata.size(); ++i) {
        CHECK(base.strata[i].stratum_id == shuffled.strata[i].stratum_id);
        CHECK(base.strata[i].n1 == shuffled.strata[i].n1);
        CHECK(base.strata[i].n0_obs == shuffled.strata[i].n0_obs);
        CHECK(base.strata[i].sum_y1 == shuffled.strata[i].sum_y1);
        CHECK(base.strata[i].sum_y0 == shuffled.strata[i].sum_y0);
        total += base.strata[i].n1 + base.strata[i].n0_obs;
    }
    CHECK(total == 200);
}

TEST_CASE("summarize counts duplicate rows") {
    std::vector<EncounterRecord> recs{{"s", 1, 1}, {"s", 1, 1}, {"s", 1, 1}};
    const auto sum = summarize(recs);
    CHECK(sum.strata[0].n1 == 3);
    CHECK(sum.strata[0].sum_y1 == 3);
}

TEST_CASE("filter_informative keeps only two-sided strata") {
    StudySummary sum;
    sum.strata.push_back({"A", 1, 1, 1, 0});
    sum.strata.push_back({"B", 3, 0, 2, 0});
    const auto res = filter_informative(sum);
    REQUIRE(res.summary.strata.size() == 1);
    CHECK(res.summary.strata[0].stratum_id == "A");
    CHECK(res.summary.informative_only);
    CHECK(res.strata_excluded == 1);
    CHECK(res.encounter_share_excluded == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("filter_informative is the identity on informative input and idempotent") {
    StudySummary sum;
    sum.strata.push_back({"A", 2, 2, 1, 1});
    sum.strata.push_back({"B", 1, 4, 0, 2});
    const auto once = filter_informative(sum);
    CHECK(once.strata_excluded == 0);
    CHECK(once.summary.strata.size() == 2);
    const auto twice = filter_informative(once.summary);
    CHECK(twice.summary.strata.size() == once.summary.strata.size());
    CHECK(twice.strata_excluded == 0);
}

TEST_CASE("filter_informative matches the direct predicate on a mixed set") {
    std::mt19937_64 rng(11);
    StudySummary sum;
    for (int i = 0; i < 10; ++i) {
        StratumSummary s;
        s.stratum_id = "s" + std::to_string(i);
        s.n1 = static_cast<std::int64_t>(rng() % 3);
        s.n0_obs = static_cast<std::int64_t>(rng() % 3);
        if (s.n1 + s.n0_obs == 0) s.n1 = 1;
        s.sum_y1 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(s.n1 + 1));
        s.sum_y0 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(s.n0_obs + 1));
        sum.strata.push_back(s);
    }
    std::size_t expected = 0;
    for (const auto& s : sum.strata) {
        if (s.n1 >= 1 && s.n0_obs >= 1) ++expected;
    }
    if (expected == 0) {
        CHECK_THROWS_AS(filter_informative(sum), validation_error);
    } else {
        const auto res = filter_informative(sum);
        CHECK(res.summary.strata.size() == expected);
        for (const auto& s : res.summary.strata) {
            CHECK(s.n1 >= 1);
            CHECK(s.n0_obs >= 1);
        }
    }
}

TEST_CASE("filter_informative rejects an all-uninformative study") {
    StudySummary sum;
    sum.strata.push_back({"A", 0, 3, 0, 1});
    CHECK_THROWS_WITH_AS(filter_informative(sum),
                         doctest::Contains("no informative strata"), validation_error);
}

TEST_CASE("summary csv round-trips") {
    StudySummary sum;
    sum.strata.push_back({"a", 5, 8, 2, 3});
    sum.strata.push_back({"b", 1, 1, 0, 1});
    testutil::TempFile f("");
    write_summary_csv(sum, f.path(), "demo config");
    const auto back = read_summary_csv(f.path());
    REQUIRE(back.strata.size() == 2);
    CHECK(back.strata[0].stratum_id == "a");
    CHECK(back.strata[0].n1 == 5);
    CHECK(back.strata[0].sum_y0 == 3);
    CHECK(back.strata[1].n0_obs == 1);
}

TEST_CASE("summary csv reader rejects malformed counts") {
    testutil::TempFile neg("stratum_id,n1,n0_obs,sum_y1,sum_y0\na,-1,2,0,0\n");
    CHECK_THROWS_AS(read_summary_csv(neg.path()), validation_error);
    testutil::TempFile excess("stratum_id,n1,n0_obs,sum_y1,sum_y0\na,1,2,3,0\n");
    CHECK_THROWS_AS(read_summary_csv(excess.path()), validation_error);
    testutil::TempFile dup(
        "stratum_id,n1,n0_obs,sum_y1,sum_y0\na,1,2,1,0\na,2,2,1,0\n");
    CHECK_THROWS_AS(read_summary_csv(dup.path()), validation_error);
}

TEST_CASE("summarize_file streams identical tallies") {
    testutil::TempFile f("stratum_id,treated,outcome\nx,1,1\ny,0,0\nx,0,1\n");
    const auto streamed = summarize_file(f.path());
    const auto loaded = summarize(load_encounters(f.path()));
    REQUIRE(streamed.strata.size() == loaded.strata.size());
    for (std::size_t i = 0; i < streamed.strata.size(); ++i) {
        CHECK(streamed.strata[i].stratum_id == loaded.strata[i].stratum_id);
        CHECK(streamed.strata[i].n1 == loaded.strata[i].n1);
        CHECK(streamed.strata[i].sum_y0 == loaded.strata[i].sum_y0);
    }
}
