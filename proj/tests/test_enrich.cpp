// Enrichment: set statistics, row randomization, column permutation,
// and restandardization.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fdrkit/dist.hpp"
#include "fdrkit/enrich.hpp"

using namespace fdrkit;

namespace {

// N x n matrix of iid noise with a two-group design split down the middle
ExpressionMatrix noise_matrix(std::size_t rows, std::size_t cols,
                              std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ExpressionMatrix m;
    m.values.assign(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        m.row_ids.push_back("g" + std::to_string(i));
        for (auto& v : m.values[i]) v = nd(gen);
    }
    for (std::size_t j = 0; j < cols; ++j) {
        m.col_ids.push_back("s" + std::to_string(j));
        m.group.push_back(j < cols / 2 ? 0 : 1);
    }
    return m;
}

double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    double d = 0.0;
    const double n = static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, std::fabs((i + 1) / n - p[i]));
        d = std::max(d, std::fabs(i / n - p[i]));
    }
    return d;
}

}  // namespace

TEST_CASE("set_stat basics") {
    ZSample z;
    z.values = {1.0, 2.0, 3.0, 10.0};
    z.ids = {"a", "b", "c", "d"};
    CHECK(set_stat(z, {"a", "b", "c"}) == doctest::Approx(2.0));
    CHECK(set_stat(z, {"d"}) == doctest::Approx(10.0));
    CHECK_THROWS(set_stat(z, {"a", "nope"}));
    // all members equal
    ZSample c;
    c.values = {4.0, 4.0, 4.0};
    c.ids = {"x", "y", "w"};
    CHECK(set_stat(c, {"x", "w"}) == doctest::Approx(4.0));
    // disjoint equal-size union averages the two set means
    const double u = set_stat(z, {"a", "b"}), v = set_stat(z, {"c", "d"});
    CHECK(set_stat(z, {"a", "b", "c", "d"}) ==
          doctest::Approx(0.5 * (u + v)));
}

TEST_CASE("matrix_to_z: hand-computed two-sample t") {
    ExpressionMatrix m;
    m.values = {{1.0, 2.0, 3.0, 7.0, 8.0, 9.0}};
    m.row_ids = {"g0"};
    m.col_ids = {"a", "b", "c", "d", "e", "f"};
    m.group = {0, 0, 0, 1, 1, 1};
    // means 2 and 8, pooled var 1, t = 6 / sqrt(1*(1/3+1/3)) = 7.348
    auto z = matrix_to_z(m);
    REQUIRE(z.size() == 1);
    const double t = 6.0 / std::sqrt(2.0 / 3.0);
    CHECK(z.values[0] == doctest::Approx(t_to_z(t, 4)).epsilon(1e-12));
    CHECK(z.ids[0] == "g0");
}

TEST_CASE("rowrand: all z equal gives p = 1") {
    ZSample z;
    z.values.assign(30, 1.5);
    for (int i = 0; i < 30; ++i) z.ids.push_back("g" + std::to_string(i));
    auto r = enrich_rowrand(z, {"g0", "g1", "g2"}, 999, 5);
    CHECK(r.p_two_sided == doctest::Approx(1.0));
}

TEST_CASE("rowrand: single outlier, m = 1, exceedance near 1/5") {
    ZSample z;
    z.values = {0.0, 0.0, 0.0, 0.0, 5.0};
    z.ids = {"a", "b", "c", "d", "e"};
    auto r = enrich_rowrand(z, {"e"}, 9999, 3);
    // null draws hit 5.0 with probability 1/5
    CHECK(r.p_one_sided_right == doctest::Approx(0.2).epsilon(0.1));
    CHECK(r.m == 1);
    CHECK(r.observed == doctest::Approx(5.0));
}

TEST_CASE("rowrand determinism and p-value bounds") {
    std::mt19937_64 gen(4);
    std::normal_distribution<double> nd(0.0, 1.0);
    ZSample z;
    for (int i = 0; i < 100; ++i) {
        z.values.push_back(nd(gen));
        z.ids.push_back("g" + std::to_string(i));
    }
    std::vector<std::string> set = {"g3", "g14", "g15", "g92", "g65"};
    auto a = enrich_rowrand(z, set, 999, 42);
    auto b = enrich_rowrand(z, set, 999, 42);
    CHECK(a.p_two_sided == b.p_two_sided);
    CHECK(a.p_one_sided_right == b.p_one_sided_right);
    CHECK(a.p_two_sided > 0.0);  // add-one rule forbids p = 0
    CHECK(a.p_two_sided <= 1.0);
    REQUIRE(a.null_draws.size() == 999);
}

TEST_CASE("rowrand p-values are uniform under exchangeability") {
    std::mt19937_64 gen(71);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> pvals;
    for (int trial = 0; trial < 400; ++trial) {
        ZSample z;
        for (int i = 0; i < 40; ++i) {
            z.values.push_back(nd(gen));
            z.ids.push_back("g" + std::to_string(i));
        }
        auto r = enrich_rowrand(z, {"g0", "g1", "g2", "g3", "g4"}, 999,
                                1000 + trial);
        pvals.push_back(r.p_one_sided_right);
    }
    CHECK(ks_uniform(pvals) < 0.07);
}

TEST_CASE("colperm: determinism and the exhaustion flag") {
    auto m = noise_matrix(50, 4, 6);  // only C(4,2) labelings exist
    std::vector<std::string> set = {"g1", "g2", "g3"};
    auto a = enrich_colperm(m, set, 999, 11, false);
    auto b = enrich_colperm(m, set, 999, 11, false);
    CHECK(a.p_two_sided == b.p_two_sided);
    CHECK(a.sampled_with_replacement);

    auto big = noise_matrix(50, 20, 6);
    auto c = enrich_colperm(big, set, 199, 11, false);
    CHECK_FALSE(c.sampled_with_replacement);
}

TEST_CASE("correlated in-set rows widen the colperm null versus rowrand") {
    // in-set rows share a column-level factor, so column relabelings
    // move them together; random gene subsets do not see that
    std::mt19937_64 gen(23);
    std::normal_distribution<double> nd(0.0, 1.0);
    const std::size_t rows = 120, cols = 20, m_set = 15;
    auto m = noise_matrix(rows, cols, 23);
    std::vector<double> factor(cols);
    for (auto& f : factor) f = nd(gen);
    for (std::size_t i = 0; i < m_set; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m.values[i][j] = 0.4 * m.values[i][j] + factor[j];

    std::vector<std::string> set;
    for (std::size_t i = 0; i < m_set; ++i) set.push_back(m.row_ids[i]);

    auto z = matrix_to_z(m);
    auto rr = enrich_rowrand(z, set, 2000, 31);
    auto cp = enrich_colperm(m, set, 2000, 31, false);
    auto var = [](const std::vector<double>& v) {
        double mean = 0.0, ss = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        for (double x : v) ss += (x - mean) * (x - mean);
        return ss / (v.size() - 1);
    };
    CHECK(var(cp.null_draws) > 1.5 * var(rr.null_draws));
}

TEST_CASE("restandardized colperm approximates rowrand on independent rows") {
    auto m = noise_matrix(300, 16, 77);
    std::vector<std::string> set;
    for (int i = 0; i < 12; ++i) set.push_back("g" + std::to_string(5 * i));
    auto z = matrix_to_z(m);
    auto rr = enrich_rowrand(z, set, 4000, 13);
    auto rs = enrich_colperm(m, set, 4000, 13, true);
    // same tail probability within Monte Carlo error of the two draws
    const double se = std::sqrt(0.25 / 4000.0) * 2.0;
    CHECK(std::fabs(rs.p_one_sided_right - rr.p_one_sided_right) <
          4.0 * se + 0.03);
    CHECK(rs.method == EnrichMethod::Restandardized);
}
