#ifndef PAM_IO_HPP
#define PAM_IO_HPP

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctbp.hpp"
#include "ising.hpp"
#include "percolation.hpp"

namespace pam {

using json = nlohmann::ordered_json;

// "# {...}" provenance line; every CSV starts with one
inline void write_provenance(std::ostream& os, const json& meta) { os << "# " << meta.dump() << '\n'; }

inline json read_provenance(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("missing provenance header");
    return json::parse(line.substr(2));
}

// shortest text that round-trips the double
inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    double back = 0.0;
    for (int p = 6; p <= 17; ++p) {
        std::ostringstream t;
        t << std::setprecision(p) << x;
        std::istringstream(t.str()) >> back;
        if (back == x) return t.str();
    }
    return os.str();
}

inline const char* experiment_header = "n,replicate,pi,c1,c2,dmax,kept_edges,seed";

inline void write_experiment_csv(std::ostream& os, const json& meta, const std::vector<ExperimentRecord>& rows) {
    write_provenance(os, meta);
    os << experiment_header << '\n';
    for (const auto& r : rows)
        os << r.n << ',' << r.replicate << ',' << fmt(r.pi) << ',' << r.c1 << ',' << r.c2 << ',' << r.dmax << ','
           << r.kept_edges << ',' << r.seed << '\n';
}

inline std::vector<ExperimentRecord> read_experiment_csv(std::istream& is, json* meta = nullptr) {
    json m = read_provenance(is);
    if (meta) *meta = m;
    std::string line;
    if (!std::getline(is, line) || line != experiment_header) throw std::runtime_error("unexpected CSV columns");
    std::vector<ExperimentRecord> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        ExperimentRecord r;
        char c;
        if (!(ls >> r.n >> c >> r.replicate >> c >> r.pi >> c >> r.c1 >> c >> r.c2 >> c >> r.dmax >> c >> r.kept_edges >>
              c >> r.seed))
            throw std::runtime_error("malformed CSV row: " + line);
        rows.push_back(r);
    }
    return rows;
}

inline const char* summary_header = "pi,chi_pi_target,slope_c1,slope_dmax,slope_difference";

inline void write_summary_csv(std::ostream& os, const json& meta, const std::vector<SubcriticalSummary>& rows) {
    write_provenance(os, meta);
    os << summary_header << '\n';
    for (const auto& s : rows)
        os << fmt(s.pi) << ',' << fmt(s.chi_pi_target) << ',' << fmt(s.fit_c1.slope) << ',' << fmt(s.fit_dmax.slope)
           << ',' << fmt(s.slope_difference()) << '\n';
}

inline const char* survival_header = "pi,depth_cap,reps,survivors,budget_hits,estimate,ci_low,ci_high";

struct SurvivalRow {
    double pi;
    int depth_cap;
    SurvivalEstimate est;
};

inline void write_survival_csv(std::ostream& os, const json& meta, const std::vector<SurvivalRow>& rows) {
    write_provenance(os, meta);
    os << survival_header << '\n';
    for (const auto& r : rows)
        os << fmt(r.pi) << ',' << r.depth_cap << ',' << r.est.reps << ',' << r.est.survivors << ',' << r.est.budget_hits
           << ',' << fmt(r.est.estimate) << ',' << fmt(r.est.ci_low) << ',' << fmt(r.est.ci_high) << '\n';
}

inline const char* cavity_header =
    "beta,B,magnetization,magnetization_se,internal_energy,internal_energy_se,pressure,pressure_se,"
    "pressure_shallow,depth_discrepancy,depth_discrepancy_se";

inline void write_cavity_csv(std::ostream& os, const json& meta, const CavityRun& run) {
    write_provenance(os, meta);
    os << cavity_header << '\n';
    for (const auto& p : run.points)
        os << fmt(p.params.beta) << ',' << fmt(p.params.B) << ',' << fmt(p.magnetization.mean) << ','
           << fmt(p.magnetization.se) << ',' << fmt(p.internal_energy.mean) << ',' << fmt(p.internal_energy.se) << ','
           << fmt(p.pressure.mean) << ',' << fmt(p.pressure.se) << ',' << fmt(p.pressure_shallow.mean) << ','
           << fmt(p.depth_discrepancy.mean) << ',' << fmt(p.depth_discrepancy.se) << '\n';
}

} // namespace pam

#endif
