#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "anwser/balance_sheet.hpp"
#include "anwser/credit_network.hpp"
#include "anwser/random.hpp"

using namespace anwser;

namespace {

Adjacency three_node() { return {3, {{0, 1}, {0, 2}, {1, 2}}}; }

double weight_of(const LoanMatrix& w, BankIndex i, BankIndex j) {
    for (std::size_t k = 0; k < w.edges.size(); ++k)
        if (w.edges[k].creditor == i && w.edges[k].debtor == j) return w.weight[k];
    return 0.0;
}

std::vector<std::size_t> total_degree(const Adjacency& t) {
    auto k = t.out_degree();
    const auto kin = t.in_degree();
    for (std::size_t i = 0; i < k.size(); ++i) k[i] += kin[i];
    return k;
}

}  // namespace

TEST(BaGenerator, ThreeBanksMatchesHandTrace) {
    const std::uint64_t seed = 2024;
    const auto t = generate_ba_network(3, 1.0, seed);

    // Replay: seed clique {0,1}, then bank 2 picks one endpoint of the list [0, 1].
    Rng rng(seed);
    std::vector<Edge> expected;
    expected.push_back(rng.coin() ? Edge{0, 1} : Edge{1, 0});
    const BankIndex target = std::vector<BankIndex>{0, 1}[rng.index(2)];
    expected.push_back(rng.coin() ? Edge{target, 2} : Edge{2, target});
    std::sort(expected.begin(), expected.end());

    EXPECT_EQ(t.edges, expected);
    EXPECT_EQ(t.edge_count(), 2u);
}

TEST(BaGenerator, Deterministic) {
    EXPECT_EQ(generate_ba_network(200, 5, 11), generate_ba_network(200, 5, 11));
    EXPECT_NE(generate_ba_network(200, 5, 11), generate_ba_network(200, 5, 12));
}

TEST(BaGenerator, SimpleDirectedGraph) {
    const auto t = generate_ba_network(300, 7, 3);
    std::set<std::pair<BankIndex, BankIndex>> pairs;
    for (const auto& e : t.edges) {
        EXPECT_NE(e.creditor, e.debtor);
        EXPECT_LT(e.creditor, 300u);
        EXPECT_LT(e.debtor, 300u);
        EXPECT_TRUE(pairs.insert({std::min(e.creditor, e.debtor), std::max(e.creditor, e.debtor)}).second);
    }
    // m(m+1)/2 seed edges + m per later bank
    EXPECT_EQ(t.edge_count(), 7u * 8u / 2u + 7u * (300u - 8u));
}

TEST(BaGenerator, AverageDegreeNearTarget) {
    for (std::uint64_t seed : {1, 2, 3}) {
        const double kappa = average_degree(generate_ba_network(500, 25, seed));
        EXPECT_GE(kappa, 22.5);
        EXPECT_LE(kappa, 27.5);
    }
}

TEST(BaGenerator, HeterogeneityGrowsWithSize) {
    auto spread = [](std::size_t n) {
        double s = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto k = total_degree(generate_ba_network(n, 3, seed));
            std::sort(k.begin(), k.end());
            s += static_cast<double>(k.back()) / static_cast<double>(k[k.size() / 2]);
        }
        return s / 5.0;
    };
    EXPECT_GT(spread(500), spread(100));
}

TEST(BaGenerator, RejectsBadDegree) {
    EXPECT_THROW(generate_ba_network(10, 0.5, 1), InvalidDegree);
    EXPECT_THROW(generate_ba_network(10, 9.5, 1), InvalidDegree);
    EXPECT_THROW(generate_ba_network(1, 1, 1), InvalidDegree);
}

TEST(LoanMatrix, ConstantWeightsAtZeroExponent) {
    const auto t = generate_ba_network(50, 3, 5);
    const auto w = loan_matrix(t, 0.0, 2.0);
    for (double x : w.weight) EXPECT_EQ(x, w.weight.front());
    EXPECT_NEAR(w.weight.front(), 2.0 / static_cast<double>(t.edge_count()), 1e-15);
}

TEST(LoanMatrix, ThreeNodeHandValues) {
    const auto w = loan_matrix(three_node(), 1.0, 1.0);
    EXPECT_NEAR(weight_of(w, 0, 1), 0.25, 1e-15);
    EXPECT_NEAR(weight_of(w, 0, 2), 0.5, 1e-15);
    EXPECT_NEAR(weight_of(w, 1, 2), 0.25, 1e-15);
    EXPECT_NEAR(weight_of(loan_matrix(three_node(), 2.0, 1.0), 0, 2), 2.0 / 3.0, 1e-15);
}

TEST(LoanMatrix, SumsToTotal) {
    for (double r : {0.0, 0.3, 1.0, 3.0, 10.0, 64.0}) {
        const auto w = loan_matrix(generate_ba_network(400, 10, 9), r, 40.0);
        EXPECT_NEAR(w.total(), 40.0, 1e-9 * 40.0) << "r=" << r;
        for (double x : w.weight) EXPECT_GE(x, 0.0);
    }
}

TEST(LoanMatrix, PositiveExactlyOnEdges) {
    const auto t = generate_ba_network(60, 4, 2);
    const auto w = loan_matrix(t, 1.5, 1.0);
    for (double x : w.weight) EXPECT_GT(x, 0.0);
    const auto dense = w.dense();
    for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(dense[i * 60 + i], 0.0);
}

TEST(LoanMatrix, PermutationEquivariant) {
    const auto t = generate_ba_network(30, 3, 8);
    std::vector<BankIndex> perm(30);
    for (std::size_t i = 0; i < 30; ++i) perm[i] = (7 * i + 3) % 30;
    Adjacency tp{30, {}};
    for (const auto& e : t.edges) tp.edges.push_back({perm[e.creditor], perm[e.debtor]});

    const auto w = loan_matrix(t, 1.3, 1.0).dense();
    const auto wp = loan_matrix(tp, 1.3, 1.0).dense();
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(wp[perm[i] * 30 + perm[j]], w[i * 30 + j], 1e-15);
}

TEST(LoanMatrix, EmptyNetworkRejected) { EXPECT_THROW(loan_matrix(Adjacency{4, {}}, 1.0, 1.0), EmptyNetwork); }

TEST(AverageDegree, Cases) {
    EXPECT_EQ(average_degree(complete_network(2)), 1.0);
    const Adjacency empty{5, {}};
    EXPECT_EQ(average_degree(empty), 0.0);
    EXPECT_FALSE((NetworkIndices{average_degree(empty), 0.5}.valid(5)));
}

TEST(Top5Share, Cases) {
    EXPECT_EQ(top5_share({1, 2, 3, 4, 5}), 1.0);
    EXPECT_DOUBLE_EQ(top5_share({5, 4, 3, 2, 1, 1, 1, 1, 1, 1}), 0.75);
    EXPECT_NEAR(top5_share(std::vector<double>(500, 0.3)), 0.01, 1e-15);
    EXPECT_THROW(top5_share({0, 0, 0}), ZeroLoans);
}

TEST(Top5Share, ScaleInvariant) {
    const std::vector<double> l = {0.3, 1.7, 0.2, 4.0, 0.9, 0.1, 2.2, 0.8};
    auto scaled = l;
    for (double& x : scaled) x *= 37.5;
    EXPECT_NEAR(top5_share(scaled), top5_share(l), 1e-15);
}

TEST(Top5Share, NondecreasingInExponent) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto t = generate_ba_network(200, 5, seed);
        double prev = 0.0;
        for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const double s = top5_share(interbank_totals(loan_matrix(t, r, 1.0)).loans);
            EXPECT_GE(s, prev - 1e-12) << "seed " << seed << " r " << r;
            prev = s;
        }
    }
}

TEST(CalibrateR, LeftEndpoint) {
    const auto t = generate_ba_network(100, 4, 6);
    const double at_zero = top5_share(interbank_totals(loan_matrix(t, 0.0, 1.0)).loans);
    EXPECT_EQ(calibrate_r(t, at_zero, 1e-3), 0.0);
}

TEST(CalibrateR, SmallGraphBisection) {
    // Needs more than five banks for the share to move.
    Adjacency t{7, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 0}}};
    auto rho = [&](double r) { return top5_share(interbank_totals(loan_matrix(t, r, 1.0)).loans); };
    const double target = 0.5 * (rho(0.0) + rho(2.0));
    const double r = calibrate_r(t, target, 1e-3);
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 2.0);
    EXPECT_NEAR(rho(r), target, 1e-3);
}

TEST(CalibrateR, PaperScaleTarget) {
    const auto t = generate_ba_network(500, 25, 4);
    const double r = calibrate_r(t, 0.25, 0.01, 50.0);
    EXPECT_GT(r, 0.0);
    EXPECT_NEAR(top5_share(interbank_totals(loan_matrix(t, r, 50.0)).loans), 0.25, 0.01);
}

TEST(CalibrateR, Unreachable) {
    const auto t = generate_ba_network(100, 4, 6);
    EXPECT_THROW(calibrate_r(t, 0.001, 1e-4), Unreachable);
}

TEST(EdgeList, OneLinePerEdgeRoundTrip) {
    const auto w = loan_matrix(generate_ba_network(20, 2, 1), 1.0, 3.0);
    const auto text = format_edge_list(w);
    std::istringstream in(text);
    std::size_t i = 0, a = 0, b = 0;
    double x = 0.0, sum = 0.0;
    while (in >> a >> b >> x) {
        ASSERT_LT(i, w.edges.size());
        EXPECT_EQ(a, w.edges[i].creditor);
        EXPECT_EQ(b, w.edges[i].debtor);
        EXPECT_EQ(x, w.weight[i]);
        sum += x;
        ++i;
    }
    EXPECT_EQ(i, w.edges.size());
    EXPECT_NEAR(sum, 3.0, 1e-9);
}
