#pragma once

#include <cstddef>
#include <vector>

namespace anwser {

using BankIndex = std::size_t;

/// Directed creditor -> debtor relation (T_{nn'} = 1).
struct Edge {
    BankIndex creditor;
    BankIndex debtor;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Binary adjacency stored as a sorted edge list; no self loops, no duplicates.
struct Adjacency {
    std::size_t n_banks = 0;
    std::vector<Edge> edges;

    std::size_t edge_count() const { return edges.size(); }

    std::vector<std::size_t> out_degree() const {
        std::vector<std::size_t> k(n_banks, 0);
        for (const auto& e : edges) ++k[e.creditor];
        return k;
    }

    std::vector<std::size_t> in_degree() const {
        std::vector<std::size_t> k(n_banks, 0);
        for (const auto& e : edges) ++k[e.debtor];
        return k;
    }

    friend bool operator==(const Adjacency&, const Adjacency&) = default;
};

/// Sparse loan matrix w; weight[i] belongs to edges[i].
struct LoanMatrix {
    std::size_t n_banks = 0;
    std::vector<Edge> edges;
    std::vector<double> weight;

    /// Row-major dense copy, mainly for tests and small systems.
    std::vector<double> dense() const {
        std::vector<double> w(n_banks * n_banks, 0.0);
        for (std::size_t i = 0; i < edges.size(); ++i)
            w[edges[i].creditor * n_banks + edges[i].debtor] += weight[i];
        return w;
    }

    /// Builds from a row-major dense matrix, keeping strictly positive
    /// off-diagonal entries.
    static LoanMatrix from_dense(std::size_t n, const std::vector<double>& w) {
        LoanMatrix m;
        m.n_banks = n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && w[i * n + j] > 0.0) {
                    m.edges.push_back({i, j});
                    m.weight.push_back(w[i * n + j]);
                }
        return m;
    }

    double total() const {
        double s = 0.0;
        for (double x : weight) s += x;
        return s;
    }
};

}  // namespace anwser
