#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "anwser/cascade.hpp"
#include "anwser/credit_network.hpp"
#include "anwser/random.hpp"
#include "anwser/shocks.hpp"
#include "anwser/system.hpp"
#include "support/cascade_oracle.hpp"

using namespace anwser;
using namespace anwser::oracle;

namespace {

BankingSystem two_bank_system() { return build_system(complete_network(2), 0.0, {0.1, 0.05, 0.2}); }

}  // namespace

TEST(InitialFailures, SpecializedBankHitByItsAsset) {
    const auto sys = two_bank_system();
    const auto x = Portfolio::from_rows({{1, 0}, {0, 1}});
    const std::vector<double> v = {0.1, 0.0};
    EXPECT_EQ(initial_failures(sys.sheets, x, v), std::vector<BankIndex>{0});
    EXPECT_TRUE(initial_failures(sys.sheets, x, std::vector<double>{0.0, 0.0}).empty());
}

TEST(InitialFailures, LossEqualToCapitalSurvives) {
    std::vector<BalanceSheet> sheets(1);
    sheets[0].external_assets = 1.0;
    sheets[0].equity_capital = 0.5;
    const auto x = Portfolio::from_rows({{1.0}});
    EXPECT_TRUE(initial_failures(sheets, x, std::vector<double>{0.5}).empty());
    EXPECT_EQ(initial_failures(sheets, x, std::vector<double>{std::nextafter(0.5, 1.0)}).size(), 1u);
}

TEST(Cascade, TwoBankContagionTrace) {
    const auto sys = two_bank_system();
    const auto x = Portfolio::from_rows({{1, 0}, {0, 1}});
    const std::vector<double> v = {0.0, 0.2};
    for (auto rule : {LossRule::full_loan, LossRule::capped_shortfall}) {
        const auto r = cascade(sys.sheets, sys.loans, x, v, rule);
        EXPECT_EQ(r.stage(0), std::vector<BankIndex>{1});
        EXPECT_EQ(r.final_set(), (std::vector<BankIndex>{0, 1}));
        EXPECT_EQ(r.stage_count(), 2u);
        EXPECT_EQ(reproduction_ratio(r), 2.0);
    }
}

TEST(Cascade, CappedRuleTransmitsOnlyShortfall) {
    const auto sys = two_bank_system();
    const auto x = Portfolio::from_rows({{1, 0}, {0, 1}});
    // Bank 1 loses 0.9 * 0.1 = 0.09: shortfall 0.04 passes on 0.04 < 0.05.
    const std::vector<double> v = {0.0, 0.1};
    EXPECT_EQ(cascade(sys.sheets, sys.loans, x, v, LossRule::capped_shortfall).final_count(), 1u);
    EXPECT_EQ(cascade(sys.sheets, sys.loans, x, v, LossRule::full_loan).final_count(), 2u);
}

TEST(Cascade, NothingFailsInitially) {
    const auto sys = two_bank_system();
    const auto r = cascade(sys.sheets, sys.loans, Portfolio(2, 2, 0.5), std::vector<double>{0.01, 0.01});
    EXPECT_EQ(r.stage_count(), 0u);
    EXPECT_TRUE(r.final_set().empty());
    EXPECT_FALSE(reproduction_ratio(r).has_value());
}

TEST(Cascade, NoLoansNoContagion) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto in = random_instance(rng, 6);
        in.loans = LoanMatrix::from_dense(6, std::vector<double>(36, 0.0));
        for (auto rule : {LossRule::full_loan, LossRule::capped_shortfall}) {
            const auto r = cascade(in.sheets, in.loans, in.x, in.shock, rule);
            EXPECT_EQ(r.final_set(), initial_failures(in.sheets, in.x, in.shock));
        }
    }
}

TEST(ReproductionRatio, Values) {
    CascadeResult one{{0, 1}, {1, 2}};
    EXPECT_EQ(reproduction_ratio(one), 2.0);
    CascadeResult none{{0, -1}, {1}};
    EXPECT_EQ(reproduction_ratio(none), 1.0);
    EXPECT_FALSE(reproduction_ratio(CascadeResult{{-1, -1}, {}}).has_value());
}

TEST(Cascade, MatchesBruteForceFixedPoint) {
    Rng rng(2024);
    int contagious = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto in = random_instance(rng, 2 + rng.index(9));
        const auto r = cascade(in.sheets, in.loans, in.x, in.shock, LossRule::full_loan);
        EXPECT_EQ(as_mask(r.final_set()), brute_force_final_set(in)) << "trial " << trial;
        contagious += r.final_count() > r.initial_count();
    }
    EXPECT_GT(contagious, 100);
}

TEST(Cascade, CappedMatchesDenseRestatement) {
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto in = random_instance(rng, 2 + rng.index(9));
        const auto r = cascade(in.sheets, in.loans, in.x, in.shock, LossRule::capped_shortfall);
        const auto expected = capped_stages_dense(in);
        ASSERT_EQ(r.stage_count(), expected.size()) << "trial " << trial;
        for (std::size_t j = 0; j < expected.size(); ++j) EXPECT_EQ(as_mask(r.stage(j)), expected[j]);
    }
}

TEST(Cascade, StagesNestedAndBounded) {
    Rng rng(8);
    for (int trial = 0; trial < 500; ++trial) {
        const auto in = random_instance(rng, 2 + rng.index(30));
        const std::size_t n = in.sheets.size();
        for (auto rule : {LossRule::full_loan, LossRule::capped_shortfall}) {
            const auto r = cascade(in.sheets, in.loans, in.x, in.shock, rule);
            EXPECT_LE(r.stage_count(), n);
            for (std::size_t j = 1; j < r.stage_count(); ++j) {
                EXPECT_GT(r.stage_sizes[j], r.stage_sizes[j - 1]);
                const auto prev = r.stage(j - 1), cur = r.stage(j);
                EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            }
            if (auto a = reproduction_ratio(r)) {
                EXPECT_GE(*a, 1.0);
            }
        }
    }
}

TEST(Cascade, LargerShocksNeverShrinkFailures) {
    Rng rng(9);
    for (int trial = 0; trial < 500; ++trial) {
        auto in = random_instance(rng, 2 + rng.index(9));
        for (auto rule : {LossRule::full_loan, LossRule::capped_shortfall}) {
            const auto before = cascade(in.sheets, in.loans, in.x, in.shock, rule);
            auto bigger = in.shock;
            for (double& v : bigger) v += 0.2 * rng.uniform();
            const auto after = cascade(in.sheets, in.loans, in.x, bigger, rule);
            const auto f0 = before.stage(0), g0 = after.stage(0);
            const auto f = before.final_set(), g = after.final_set();
            EXPECT_TRUE(std::includes(g0.begin(), g0.end(), f0.begin(), f0.end()));
            EXPECT_TRUE(std::includes(g.begin(), g.end(), f.begin(), f.end()));
        }
    }
}

TEST(Cascade, ScaleInvariant) {
    Rng rng(10);
    for (int trial = 0; trial < 500; ++trial) {
        const auto in = random_instance(rng, 2 + rng.index(9));
        const double c = 0.25 + 8.0 * rng.uniform();
        auto scaled = in;
        for (auto& s : scaled.sheets) {
            s.external_assets *= c;
            s.interbank_loans *= c;
            s.equity_capital *= c;
            s.interbank_borrowings *= c;
            s.deposits *= c;
            s.total_assets *= c;
        }
        for (double& w : scaled.loans.weight) w *= c;
        for (auto rule : {LossRule::full_loan, LossRule::capped_shortfall}) {
            const auto a = cascade(in.sheets, in.loans, in.x, in.shock, rule);
            const auto b = cascade(scaled.sheets, scaled.loans, scaled.x, scaled.shock, rule);
            EXPECT_EQ(a.failed_at, b.failed_at) << "trial " << trial;
        }
    }
}

TEST(Cascade, ExposureIndexReusable) {
    Rng rng(11);
    const auto params = SystemParameters::normalized(0.1, 0.07, 200);
    std::optional<BankingSystem> drawn;
    for (std::uint64_t seed = 3; !drawn && seed < 1000; ++seed) {
        try {
            drawn = build_system(generate_ba_network(200, 10, seed), 0.2, params);
        } catch (const NegativeDeposits&) {
        }
    }
    ASSERT_TRUE(drawn.has_value());
    const auto& sys = *drawn;
    const ExposureIndex index(sys.loans);
    const auto x = construct_portfolio(200, 0.3, 0.2, rng);
    for (int i = 0; i < 50; ++i) {
        const auto v = sample_shock(ShockDistribution::student_t(1.5, 0.02), 2, rng);
        EXPECT_EQ(cascade(sys.sheets, index, x, v).failed_at, cascade(sys.sheets, sys.loans, x, v).failed_at);
    }
}

TEST(Cascade, DimensionMismatchRejected) {
    const auto sys = two_bank_system();
    EXPECT_THROW(cascade(sys.sheets, sys.loans, Portfolio(3, 2, 0.5), std::vector<double>{0, 0}), ConfigError);
    EXPECT_THROW(cascade(sys.sheets, sys.loans, Portfolio(2, 2, 0.5), std::vector<double>{0}), ConfigError);
}
