#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <pam/ctbp.hpp>
#include <pam/generate.hpp>
#include <pam/stats.hpp>

using namespace pam;

namespace {

// partial sum to N plus the tail integral of (x + (a+b-1)/2)^(a-b) from N + 1/2
double ratio_sum_oracle(double a, double b, long N) {
    double s = 0.0;
    for (long k = 1; k <= N; ++k) s += std::exp(std::lgamma(k + a) - std::lgamma(k + b));
    const double x0 = N + 0.5 + (a + b - 1) / 2;
    return s + std::pow(x0, a - b + 1) / (b - a - 1);
}

} // namespace

TEST(Malthusian, Values) {
    EXPECT_DOUBLE_EQ(malthusian(1.5, 0.4), 2.0);
    EXPECT_DOUBLE_EQ(malthusian(1.5, 1.0), 3.5);
    for (double delta : {-0.5, 0.0, 3.0})
        for (double pi : {0.1, 0.5, 1.0}) EXPECT_NEAR(malthusian_phi(malthusian(delta, pi), delta, pi), 1.0, 1e-15);
    EXPECT_THROW(malthusian(-1.0, 0.5), ParameterError);
    EXPECT_THROW(malthusian(1.0, 0.0), ParameterError);
}

TEST(GammaRatio, ClosedFormAgainstPartialSums) {
    EXPECT_NEAR(gamma_ratio_sum(0.0, 2.0), 1.0, 1e-15);
    EXPECT_NEAR(gamma_ratio_sum(0.5, 3.0), 0.295409, 1e-6);
    for (auto [a, b] : {std::pair{0.0, 2.0}, {0.5, 3.0}, {-0.5, 1.2}, {2.0, 5.5}})
        EXPECT_NEAR(gamma_ratio_sum(a, b), ratio_sum_oracle(a, b, 1000000), 1e-8) << a << " " << b;
    // telescoping: sum_{k<=N} 1/(k(k+1)) = 1 - 1/(N+1)
    EXPECT_NEAR(gamma_ratio_partial_sum(0.0, 2.0, 999), 1.0 - 1.0 / 1000, 1e-13);
}

TEST(GammaRatio, PartialSumsIncreaseFromBelow) {
    double prev = 0.0, limit = gamma_ratio_sum(0.5, 3.0);
    for (long n = 1; n < 100000; n *= 2) {
        double s = gamma_ratio_partial_sum(0.5, 3.0, n);
        EXPECT_GT(s, prev);
        EXPECT_LT(s, limit);
        prev = s;
    }
}

TEST(GammaRatio, RejectsBadRange) {
    EXPECT_THROW(gamma_ratio_sum(0.0, 1.0), ParameterError);
    EXPECT_THROW(gamma_ratio_sum(-1.5, 3.0), ParameterError);
}

TEST(Ctbp, GrowsTreeWithUnitJumps) {
    Stream s(1, 1);
    auto run = simulate_ctbp(1.5, 5000, s, 50);
    EXPECT_EQ(run.tree.n, 5000);
    EXPECT_EQ(run.tree.edge_count(), 4999u);
    for (int v = 2; v <= run.tree.n; ++v) EXPECT_LT(run.tree.edges[v - 2].second, v);
    ASSERT_EQ(run.trace.size(), 50u);
    for (std::size_t i = 1; i < run.trace.size(); ++i) {
        EXPECT_GE(run.trace[i].time, run.trace[i - 1].time);
        EXPECT_GE(run.trace[i].size, run.trace[i - 1].size);
    }
    // one vertex per event: sizes at checkpoints are hit exactly
    for (std::size_t i = 0; i < run.trace.size(); ++i) EXPECT_EQ(run.trace[i].size, 100 * static_cast<long>(i + 1));
    EXPECT_EQ(run.trace.back().time, run.stop_time);
}

TEST(Ctbp, StopTimeScalesWithLogN) {
    const double delta = 1.5;
    std::vector<double> ratio;
    for (int r = 0; r < 100; ++r) {
        Stream s(2, static_cast<std::uint64_t>(r));
        ratio.push_back(simulate_ctbp(delta, 10000, s, 0).stop_time / std::log(10000.0));
    }
    EXPECT_NEAR(stats::summarize(ratio).mean, 1.0 / (2.0 + delta), 0.1 / (2.0 + delta));
}

TEST(Ctbp, DegreesMatchModelD) {
    const double delta = 0.8;
    const int n = 1000;
    std::vector<double> a(40, 0.0), b(40, 0.0);
    PaConfig c;
    c.model = Model::D;
    c.delta = delta;
    c.n = n;
    for (int r = 0; r < 300; ++r) {
        Stream s(3, static_cast<std::uint64_t>(r)), t(4, static_cast<std::uint64_t>(r));
        auto tree = simulate_ctbp(delta, n, s, 0).tree;
        auto g = generate(c, t);
        for (int v = 1; v <= n; ++v) {
            a[std::min<long>(tree.degree[v], 39)] += 1;
            b[std::min<long>(g.degree[v], 39)] += 1;
        }
    }
    EXPECT_GT(stats::chi_square_two_sample(a, b).p_value, 0.01);
}

TEST(Ctbp, MartingaleStabilizes) {
    Stream s(5, 5);
    auto run = simulate_ctbp(1.5, 100000, s, 10);
    std::vector<double> v;
    for (const auto& p : run.trace) v.push_back(p.value);
    auto st = stats::summarize(v);
    EXPECT_LT(std::sqrt(st.variance) / st.mean, 0.1);
}

TEST(Ctbp, RootClusterOfFullTree) {
    Stream s(6, 6);
    auto run = simulate_ctbp(0.5, 2000, s, 0);
    EXPECT_EQ(root_cluster_size(run.tree, 1.0, s), 2000);
    EXPECT_EQ(root_cluster_size(run.tree, 0.0, s), 1);
}

TEST(Ctbp, RootClusterGrowthExponent) {
    const double delta = 1.5, pi = 0.5, chi = (1 + delta) / (2 + delta);
    std::vector<double> x, y;
    for (long n : paper_sizes({2, 3}, {10000, 30000})) {
        double total = 0.0;
        const int reps = 100;
        for (int r = 0; r < reps; ++r) {
            Stream s(7, cell_stream_id(n, r));
            auto run = simulate_ctbp(delta, n, s, 0);
            total += static_cast<double>(root_cluster_size(run.tree, pi, s));
        }
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(total / reps));
    }
    EXPECT_NEAR(stats::ols(x, y).slope, 1 - chi + pi * chi, 0.08);
}

TEST(Subcritical, SummaryMatchesRows) {
    const std::vector<double> pis{0.3, 0.6};
    const std::vector<long> sizes{200, 400, 800};
    auto res = subcritical_experiment(1, 1.5, pis, sizes, 5, 11, 1);
    ASSERT_EQ(res.rows.size(), 3u * 5u * 2u);
    ASSERT_EQ(res.summary.size(), 2u);
    for (std::size_t k = 0; k < pis.size(); ++k) {
        std::vector<double> lx, lc, ld;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            double c1 = 0, dm = 0;
            for (const auto& r : res.rows)
                if (r.n == sizes[i] && r.pi == pis[k]) {
                    c1 += r.c1;
                    dm += r.dmax;
                }
            lx.push_back(std::log(static_cast<double>(sizes[i])));
            lc.push_back(std::log(c1 / 5));
            ld.push_back(std::log(dm / 5));
        }
        const auto& sm = res.summary[k];
        EXPECT_NEAR(sm.chi_pi_target, pis[k] * 2.5 / 3.5, 1e-15);
        EXPECT_NEAR(sm.fit_c1.slope, stats::ols(lx, lc).slope, 1e-12);
        EXPECT_NEAR(sm.slope_difference(), stats::ols(lx, lc).slope - stats::ols(lx, ld).slope, 1e-12);
    }
    auto par = subcritical_experiment(1, 1.5, pis, sizes, 5, 11, 4);
    EXPECT_EQ(par.summary[0].slope_difference(), res.summary[0].slope_difference());
    EXPECT_THROW(subcritical_experiment(1, 1.5, pis, {100}, 5, 11), ParameterError);
}

TEST(Subcritical, OlsResidualsOrthogonal) {
    const std::vector<double> x{1, 2, 3, 4, 5.5}, y{2.1, 2.9, 4.2, 4.8, 6.9};
    auto f = stats::ols(x, y);
    double r0 = 0, r1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - f.intercept - f.slope * x[i];
        r0 += e;
        r1 += e * x[i];
    }
    EXPECT_NEAR(r0, 0.0, 1e-9);
    EXPECT_NEAR(r1, 0.0, 1e-9);
}

TEST(Subcritical, PaperSizes) {
    auto v = paper_sizes({2, 3}, {10000, 30000});
    ASSERT_EQ(v.size(), 20u);
    EXPECT_EQ(v.front(), 100);
    EXPECT_EQ(v[8], 900);
    EXPECT_EQ(v[9], 1000);
    EXPECT_EQ(v.back(), 30000);
}
