#include <gtest/gtest.h>

#include <sstream>

#include <pam/io.hpp>

using namespace pam;

TEST(Io, FmtRoundTrips) {
    Stream s(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double x = std::ldexp(s.uniform() - 0.5, static_cast<int>(s.below(80)) - 40);
        EXPECT_EQ(std::stod(fmt(x)), x);
    }
    EXPECT_EQ(fmt(0.1), "0.1");
    EXPECT_EQ(fmt(2.0), "2");
}

TEST(Io, ProvenanceRoundTrip) {
    json meta{{"command", "giant"}, {"seed", 42}, {"pis", {0.1, 0.2}}};
    std::stringstream ss;
    write_provenance(ss, meta);
    EXPECT_EQ(ss.str().substr(0, 2), "# ");
    EXPECT_EQ(read_provenance(ss), meta);
    std::stringstream bad("n,replicate\n");
    EXPECT_THROW(read_provenance(bad), std::runtime_error);
}

TEST(Io, ExperimentCsvRoundTrip) {
    std::vector<ExperimentRecord> rows{{100, 0, 0.25, 40, 12, 9, 55, 7}, {200, 3, 1.0 / 3, 180, 3, 21, 390, 7}};
    json meta{{"seed", 7}};
    std::stringstream ss;
    write_experiment_csv(ss, meta, rows);
    json back_meta;
    auto back = read_experiment_csv(ss, &back_meta);
    EXPECT_EQ(back_meta, meta);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(back[i].n, rows[i].n);
        EXPECT_EQ(back[i].replicate, rows[i].replicate);
        EXPECT_EQ(back[i].pi, rows[i].pi);
        EXPECT_EQ(back[i].c1, rows[i].c1);
        EXPECT_EQ(back[i].c2, rows[i].c2);
        EXPECT_EQ(back[i].dmax, rows[i].dmax);
        EXPECT_EQ(back[i].kept_edges, rows[i].kept_edges);
        EXPECT_EQ(back[i].seed, rows[i].seed);
    }
}

TEST(Io, ExperimentCsvRejectsWrongColumns) {
    std::stringstream ss("# {}\nn,pi\n1,2\n");
    EXPECT_THROW(read_experiment_csv(ss), std::runtime_error);
}

TEST(Io, SummaryCsvLayout) {
    SubcriticalSummary s;
    s.pi = 0.2;
    s.chi_pi_target = 0.1;
    s.fit_c1.slope = 0.5;
    s.fit_dmax.slope = 0.375;
    std::stringstream ss;
    write_summary_csv(ss, json{{"m", 1}}, {s});
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    EXPECT_EQ(line, summary_header);
    std::getline(ss, line);
    EXPECT_EQ(line, "0.2,0.1,0.5,0.375,0.125");
}
