#include <doctest.h>

#include <algorithm>
#include <random>

#include "draftbench/metrics.hpp"
#include "support/oracles.hpp"

using namespace draftbench;

namespace {

CompletionRecord rec(StrategyId s, std::size_t tokens, double latency_ms,
                     TokenSource src = TokenSource::provider_reported) {
    CompletionRecord r;
    r.strategy = s;
    r.completion_tokens = tokens;
    r.latency_ms = latency_ms;
    r.token_source = src;
    return r;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("summaries") {
    const std::vector<double> one{100};
    CHECK(summarize(one).mean == 100);
    CHECK(summarize(one).median == 100);
    const std::vector<double> three{600, 100, 200};
    CHECK(summarize(three).mean == 300);
    CHECK(summarize(three).median == 200);
    const std::vector<double> four{400, 100, 300, 200};
    CHECK(summarize(four).median == 250);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), MetricsError);
}

TEST_CASE("aggregate") {
    std::vector<CompletionRecord> rs{rec(StrategyId::cot, 100, 1000), rec(StrategyId::cot, 200, 2000),
                                     rec(StrategyId::cot, 600, 6000)};
    auto s = aggregate(rs);
    CHECK(s.strategy == StrategyId::cot);
    CHECK(s.n == 3);
    CHECK(s.avg_tokens == 300);
    CHECK(s.median_tokens == 200);
    CHECK(s.avg_latency_s == doctest::Approx(3.0));
    CHECK(s.median_latency_s == doctest::Approx(2.0));
    CHECK(s.tokens_right_skewed);

    std::vector<CompletionRecord> flat{rec(StrategyId::cot, 100, 10), rec(StrategyId::cot, 100, 10)};
    CHECK_FALSE(aggregate(flat).tokens_right_skewed);

    std::vector<CompletionRecord> mixed{rec(StrategyId::cot, 1, 1), rec(StrategyId::standard, 1, 1)};
    CHECK_THROWS_AS(aggregate(mixed), MetricsError);
    std::vector<CompletionRecord> approx{rec(StrategyId::cot, 1, 1, TokenSource::approximated)};
    CHECK_THROWS_AS(aggregate(approx), MetricsError);
    CHECK(aggregate_approximated(approx).avg_tokens == 1);
    CHECK_THROWS_AS(aggregate(std::vector<CompletionRecord>{}), MetricsError);
}

TEST_CASE("order does not matter") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CompletionRecord> rs;
        const auto n = 1 + rng() % 30;
        for (std::size_t i = 0; i < n; ++i) rs.push_back(rec(StrategyId::baseline_cod, rng() % 5000, (rng() % 90000) / 7.0));
        auto a = aggregate(rs);
        std::shuffle(rs.begin(), rs.end(), rng);
        auto b = aggregate(rs);
        CHECK(a.avg_tokens == b.avg_tokens);
        CHECK(a.median_tokens == b.median_tokens);
        CHECK(a.avg_latency_s == b.avg_latency_s);
        CHECK(a.median_latency_s == b.median_latency_s);
    }
}

TEST_CASE("ratios") {
    CHECK(token_ratio(300, 600) == 50.0);
    CHECK(token_savings(300, 600) == 50.0);
    CHECK(latency_ratio(1.5, 3.0) == 50.0);
    CHECK(quality_retention(8, 10) == doctest::Approx(80.0));
    CHECK(quality_efficiency_index(50, 80) == doctest::Approx(40.0));
    CHECK_THROWS_AS(token_ratio(1, 0), MetricsError);
    CHECK_THROWS_AS(latency_ratio(1, 0), MetricsError);
    CHECK_THROWS_AS(quality_retention(1, 0), MetricsError);
    CHECK_THROWS_AS(token_ratio(1, -5), MetricsError);
}

TEST_CASE("ratio and savings sum to one hundred") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1.0, 5000.0);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng), base = u(rng);
        CHECK(token_ratio(v, base) + token_savings(v, base) == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(token_ratio(v, base) == doctest::Approx(oracle::ratio_pct(v, base)).epsilon(1e-12));
    }
}

TEST_CASE("compare_to_baseline") {
    EfficiencyStats base{StrategyId::cot, 1, 600, 600, 4.0, 4.0, false};
    EfficiencyStats v{StrategyId::baseline_cod, 1, 150, 150, 1.0, 1.0, false};
    auto c = compare_to_baseline(v, base);
    CHECK(c.token_ratio_pct == 25.0);
    CHECK(c.token_savings_pct == 75.0);
    CHECK(c.latency_ratio_pct == 25.0);
    CHECK_FALSE(c.quality_retention_pct.has_value());
    auto q = compare_to_baseline(v, base, 8.0, 10.0);
    CHECK(*q.quality_retention_pct == doctest::Approx(80.0));
    CHECK(*q.quality_efficiency_index == doctest::Approx(60.0));
}

TEST_CASE("pearson") {
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(2 * v + 1);
    CHECK(pearson(x, y).r == 1.0);
    CHECK(pearson(x, y).n == 5);
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson(x, neg).r == -1.0);

    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{2}), MetricsError);
    CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), MetricsError);
    CHECK_THROWS_AS(pearson(x, std::vector<double>(5, 3.0)), MetricsError);
    std::vector<double> with_nan = x;
    with_nan[2] = std::nan("");
    CHECK_THROWS_AS(pearson(with_nan, y), MetricsError);
}

TEST_CASE("pearson agrees with the oracle and is symmetric") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = g(rng);
            y[i] = 0.5 * x[i] + g(rng);
        }
        const double r = pearson(x, y).r;
        CHECK(std::abs(r - oracle::pearson(x, y)) < 1e-9);
        CHECK(r == pearson(y, x).r);
        CHECK(std::abs(r) <= 1.0);
    }
}

}
