#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <pam/ppt.hpp>
#include <pam/stats.hpp>

using namespace pam;

namespace {

PptParams fixed(int m, double delta) {
    PptParams p;
    p.law = OutDegreeLaw::fixed(m);
    p.delta = delta;
    return p;
}

} // namespace

TEST(Ppt, DepthZeroIsRootOnly) {
    Stream s(1, 1);
    auto t = sample_ppt(fixed(2, 0.0), 0, s);
    ASSERT_EQ(t.nodes.size(), 1u);
    EXPECT_EQ(t.nodes[0].kind, NodeKind::Root);
    EXPECT_EQ(t.nodes[0].child_count, 0);
    EXPECT_THROW(sample_ppt(fixed(2, 0.0), -1, s), ParameterError);
}

TEST(Ppt, AgeOneHasNoYoungChildren) {
    EXPECT_EQ(young_intensity(1.0, 0.6), 0.0);
    PptSampler sampler(fixed(3, 1.0));
    PptNode n;
    n.age = 1.0;
    n.strength = 50.0;
    n.reserved_out = 3;
    Stream s(2, 2);
    std::vector<PptNode> kids;
    for (int i = 0; i < 100; ++i) {
        sampler.children(n, s, kids);
        ASSERT_EQ(kids.size(), 3u);
        for (const auto& k : kids) EXPECT_EQ(k.kind, NodeKind::Old);
    }
}

TEST(Ppt, MeanRootChildren) {
    // m + E[Gamma(m)] E[lambda(U)] = 2 + 2 * (1/chi - 1) = 4 at chi = 1/2
    std::vector<double> kids;
    for (int r = 0; r < 100000; ++r) {
        Stream s(3, static_cast<std::uint64_t>(r));
        kids.push_back(sample_ppt(fixed(2, 0.0), 1, s).nodes[0].child_count);
    }
    EXPECT_NEAR(stats::summarize(kids).mean, 4.0, 0.05);
}

TEST(Ppt, AgeOrderingInvariant) {
    for (auto p : {fixed(1, 1.5), fixed(2, -1.0), fixed(3, 4.0)}) {
        for (int r = 0; r < 2000; ++r) {
            Stream s(4, static_cast<std::uint64_t>(r));
            auto t = sample_ppt(p, 3, s, 20000);
            for (std::size_t i = 1; i < t.nodes.size(); ++i) {
                const auto& n = t.nodes[i];
                const double pa = t.nodes[n.parent].age;
                ASSERT_GT(n.age, 0.0);
                ASSERT_LE(n.age, 1.0);
                if (n.kind == NodeKind::Old) ASSERT_LT(n.age, pa);
                else ASSERT_GE(n.age, pa);
            }
        }
    }
}

TEST(Ppt, NodeFeatures) {
    PptSampler sampler(fixed(2, 1.0));
    Stream s(5, 5);
    std::vector<double> root_g, old_g, young_g;
    for (int i = 0; i < 200000; ++i) {
        auto r = sampler.root(s);
        EXPECT_EQ(r.reserved_out, 2);
        root_g.push_back(r.strength);
        auto o = sampler.old_node(0.5, s);
        EXPECT_EQ(o.reserved_out, 2);
        old_g.push_back(o.strength);
        auto y = sampler.young_node(0.5, s);
        EXPECT_EQ(y.reserved_out, 1);
        young_g.push_back(y.strength);
    }
    // Gamma(m + delta), Gamma(m + 1 + delta), Gamma(m - 1 + 1 + delta)
    EXPECT_NEAR(stats::summarize(root_g).mean, 3.0, 0.02);
    EXPECT_NEAR(stats::summarize(old_g).mean, 4.0, 0.02);
    EXPECT_NEAR(stats::summarize(young_g).mean, 3.0, 0.02);
}

TEST(Ppt, YoungCountIsPoisson) {
    PptSampler sampler(fixed(2, 3.0));
    const double chi = sampler.chi();
    Stream s(6, 6);
    std::vector<PptNode> kids;
    for (double age : {0.05, 0.3, 0.8}) {
        PptNode n;
        n.age = age;
        n.strength = 2.5;
        n.reserved_out = 0;
        std::vector<double> counts;
        for (int i = 0; i < 100000; ++i) {
            sampler.children(n, s, kids);
            counts.push_back(static_cast<double>(kids.size()));
        }
        const double mu = 2.5 * young_intensity(age, chi);
        auto st = stats::summarize(counts);
        EXPECT_NEAR(st.mean, mu, 4 * std::sqrt(mu / 1e5));
        EXPECT_NEAR(st.variance, mu, 6 * mu * std::sqrt(2.0 / 1e5) + 4 * std::sqrt(mu / 1e5));
    }
}

TEST(Ppt, YoungChildAgesFollowDensity) {
    PptSampler sampler(fixed(1, 1.5));
    const double chi = sampler.chi(), a = 0.2;
    Stream s(7, 7);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(sampler.young_child_age(a, s));
    const double lo = std::pow(a, 1 - chi);
    auto cdf = [&](double x) { return (std::pow(x, 1 - chi) - lo) / (1 - lo); };
    EXPECT_LT(stats::ks_statistic(xs, cdf), 0.01);
}

TEST(Ppt, DegenerateRandomLawMatchesFixed) {
    PptParams a = fixed(1, 0.5), b;
    b.law = OutDegreeLaw::geometric(1.0);
    b.delta = 0.5;
    Stream s1(8, 8), s2(8, 8);
    auto t1 = sample_ppt(a, 4, s1), t2 = sample_ppt(b, 4, s2);
    ASSERT_EQ(t1.nodes.size(), t2.nodes.size());
    for (std::size_t i = 0; i < t1.nodes.size(); ++i) {
        EXPECT_EQ(t1.nodes[i].age, t2.nodes[i].age);
        EXPECT_EQ(t1.nodes[i].strength, t2.nodes[i].strength);
    }
}

TEST(Ppt, RandomLawNodesUseSizeBiasedOutDegree) {
    PptParams p;
    p.law = OutDegreeLaw::geometric(0.5);
    p.delta = 1.0;
    PptSampler sampler(p);
    Stream s(9, 9);
    std::vector<double> old_m, young_m;
    for (int i = 0; i < 200000; ++i) {
        old_m.push_back(sampler.old_node(0.5, s).reserved_out);
        young_m.push_back(sampler.young_node(0.5, s).reserved_out + 1);
    }
    // E[M^(d)] = (E[M^2] + d E[M]) / (E[M] + d) with E[M] = 2, E[M^2] = 6
    EXPECT_NEAR(stats::summarize(old_m).mean, (6.0 + 2.0) / 3.0, 0.02);
    EXPECT_NEAR(stats::summarize(young_m).mean, 6.0 / 2.0, 0.02);
}

TEST(Ppt, TreeSerialization) {
    Stream s(10, 10);
    auto t = sample_ppt(fixed(2, 0.0), 2, s);
    std::ostringstream os;
    write_tree(os, t);
    std::istringstream is(os.str());
    std::string label, kind;
    double age, strength;
    is >> label >> age >> kind >> strength;
    EXPECT_EQ(label, "0");
    EXPECT_EQ(kind, "R");
    EXPECT_DOUBLE_EQ(age, t.nodes[0].age);
    is >> label >> age >> kind >> strength;
    EXPECT_EQ(label, "1");
    EXPECT_EQ(kind, "O");
    std::size_t lines = 2;
    for (std::string line; std::getline(is >> std::ws, line);) ++lines;
    EXPECT_EQ(lines, t.nodes.size());
}

TEST(RootDegree, PmfValuesAndNormalization) {
    EXPECT_NEAR(root_degree_pmf(2, 0.0, 2), 0.5, 1e-14);
    EXPECT_EQ(root_degree_pmf(2, 0.0, 1), 0.0);
    for (auto [m, delta] : {std::pair{1, 1.5}, {2, 0.0}, {2, 9.0}, {3, -2.0}}) {
        double sum = 0.0;
        long k = m;
        for (; k < 4000000; ++k) sum += root_degree_pmf(m, delta, k);
        // remaining tail ~ p_k k / (tau_e - 1)
        double tail = root_degree_pmf(m, delta, k) * k / (tau_e(m, delta) - 1.0);
        EXPECT_NEAR(sum + tail, 1.0, 1e-9) << m << " " << delta;
    }
}

TEST(RootDegree, PowerLawTail) {
    const double te = tau_e(2, 1.0);
    double r1 = root_degree_pmf(2, 1.0, 100000) * std::pow(100000.0, te);
    double r2 = root_degree_pmf(2, 1.0, 1000000) * std::pow(1000000.0, te);
    EXPECT_NEAR(r1 / r2, 1.0, 1e-4);
}

TEST(RootDegree, MatchesSampledTrees) {
    auto p = fixed(2, 9.0);
    std::vector<double> counts(60, 0.0), probs(60, 0.0);
    for (int r = 0; r < 100000; ++r) {
        Stream s(11, static_cast<std::uint64_t>(r));
        long d = sample_ppt(p, 1, s).nodes[0].child_count;
        counts[std::min<long>(d, 59)] += 1;
    }
    double tail = 1.0;
    for (int k = 0; k < 59; ++k) {
        probs[k] = root_degree_pmf(2, 9.0, k);
        tail -= probs[k];
    }
    probs[59] = std::max(0.0, tail);
    EXPECT_GT(stats::chi_square_gof(counts, probs).p_value, 0.01);
}

TEST(AgeDensity, OldDensityIntegratesToOne) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double chi : {0.3, 0.5, 0.8}) {
        double v = ts.integrate([&](double a) { return old_age_density(a, chi); }, 0.0, 1.0);
        EXPECT_NEAR(v, 1.0, 1e-9);
        EXPECT_NEAR(old_age_cdf(1.0, chi), 1.0, 1e-15);
    }
}

TEST(AgeDensity, OldDensityExponentNearZero) {
    const double chi = 0.8;
    double a1 = 1e-14, a2 = 1e-15;
    double slope = std::log(old_age_density(a1, chi) / old_age_density(a2, chi)) / std::log(a1 / a2);
    EXPECT_NEAR(slope, chi - 1.0, 1e-3);
}

TEST(AgeDensity, YoungDensityIntegratesToOne) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (auto [m, delta] : {std::pair{1, 1.5}, {2, 0.0}, {2, 9.0}}) {
        double v = ts.integrate([&](double a) { return neighbour_age_density(NodeKind::Young, a, m, delta); }, 0.0, 1.0);
        EXPECT_NEAR(v, 1.0, 1e-7) << m << " " << delta;
    }
}

TEST(AgeDensity, YoungIntegralSeriesAgreesWithQuadrature) {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double u : {0.1, 0.5, 0.98, 0.995}) {
        double q = ts.integrate([&](double x) { return std::pow(x, 1.5) / (1 - x); }, 0.0, u);
        EXPECT_NEAR(young_age_integral(u, 3.5), q, 1e-10 * std::max(1.0, q));
    }
}

TEST(AgeDensity, OldChildOfRootKs) {
    auto p = fixed(2, 0.0);
    PptSampler sampler(p);
    std::vector<double> ages;
    for (int r = 0; r < 100000; ++r) {
        Stream s(12, static_cast<std::uint64_t>(r));
        auto t = sample_ppt(p, 1, s);
        ages.push_back(t.nodes[t.nodes[0].first_child].age);
    }
    EXPECT_LT(stats::ks_statistic(ages, [&](double a) { return old_age_cdf(a, sampler.chi()); }), 0.01);
}

TEST(NeighbourLaws, TailExponents) {
    auto l = neighbour_degree_laws(2, 1.0);
    EXPECT_DOUBLE_EQ(l.tau_old, tau_e(2, 1.0) - 1);
    EXPECT_DOUBLE_EQ(l.tau_young, tau_e(2, 1.0) + 1);
    auto z = neighbour_degree_laws(2, 1.0, 3.0);
    EXPECT_DOUBLE_EQ(z.tau_old, 2.0);
    EXPECT_DOUBLE_EQ(z.tau_young, 2.0);
}

TEST(NeighbourLaws, PmfsSumToOne) {
    auto l = neighbour_degree_laws(2, 9.0);
    double so = 0.0, sy = 0.0;
    for (long k = 1; k < 400; ++k) {
        so += l.pmf_old(k);
        sy += l.pmf_young(k);
    }
    EXPECT_NEAR(so, 1.0, 1e-6);
    EXPECT_NEAR(sy, 1.0, 1e-6);
}

TEST(NeighbourLaws, OldNeighbourDegreeMatchesSamples) {
    auto p = fixed(2, 9.0);
    auto l = neighbour_degree_laws(2, 9.0);
    std::vector<double> counts(40, 0.0), probs(40, 0.0);
    for (int r = 0; r < 100000; ++r) {
        Stream s(13, static_cast<std::uint64_t>(r));
        auto t = sample_ppt(p, 2, s);
        const auto& old = t.nodes[t.nodes[0].first_child];
        counts[std::min(1 + old.child_count, 39)] += 1;
    }
    double tail = 1.0;
    for (int k = 0; k < 39; ++k) {
        probs[k] = l.pmf_old(k);
        tail -= probs[k];
    }
    probs[39] = std::max(0.0, tail);
    EXPECT_GT(stats::chi_square_gof(counts, probs).p_value, 0.01);
}

TEST(NeighbourLaws, YoungNeighbourDegreeMatchesConstruction) {
    // uniform root age, Young age from f_U, degree = parent edge + Old children + Young children
    auto p = fixed(2, 9.0);
    PptSampler sampler(p);
    auto l = neighbour_degree_laws(2, 9.0);
    std::vector<double> counts(40, 0.0), probs(40, 0.0);
    std::vector<PptNode> kids;
    Stream s(14, 0);
    for (int r = 0; r < 100000; ++r) {
        const double a = sampler.young_child_age(s.uniform(), s);
        auto y = sampler.young_node(a, s);
        sampler.children(y, s, kids);
        counts[std::min<int>(1 + static_cast<int>(kids.size()), 39)] += 1;
    }
    double tail = 1.0;
    for (int k = 0; k < 39; ++k) {
        probs[k] = l.pmf_young(k);
        tail -= probs[k];
    }
    probs[39] = std::max(0.0, tail);
    EXPECT_GT(stats::chi_square_gof(counts, probs).p_value, 0.01);
}
