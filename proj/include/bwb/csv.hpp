#pragma once

#include <cstdio>
#include <string>

#include "bwb/abpre.hpp"
#include "bwb/engine.hpp"
#include "bwb/spine.hpp"

namespace bwb {

/// Shortest round-trippable decimal form, locale-independent.
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string trajectory_csv(const std::vector<Trajectory>& trajectories) {
    std::string out = "rep,n,T,Tstar,Z,W,S,status\n";
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const Trajectory& t = trajectories[r];
        for (const auto& row : t.rows) {
            out += std::to_string(r);
            out += ',';
            out += std::to_string(row.n);
            out += ',';
            if (row.total_cells) out += std::to_string(*row.total_cells);
            out += ',';
            out += std::to_string(row.contaminated);
            out += ',';
            out += std::to_string(row.parasites);
            out += ',';
            out += fmt_double(row.w);
            out += ',';
            out += fmt_double(row.s);
            out += ',';
            bool last = row.n == t.rows.back().n;
            out += last ? to_string(t.status.kind) : "running";
            out += '\n';
        }
    }
    return out;
}

inline std::string summary_csv(const EnsembleSummary& summary) {
    std::string out = "n,mean_W,se_W,mean_S,se_S,mean_log_Tstar,se,extinct_frac\n";
    for (const auto& r : summary.rows) {
        out += std::to_string(r.n);
        out += ',';
        out += fmt_double(r.mean_w);
        out += ',';
        out += fmt_double(r.se_w);
        out += ',';
        out += fmt_double(r.mean_s);
        out += ',';
        out += fmt_double(r.se_s);
        out += ',';
        out += fmt_double(r.mean_log_tstar);
        out += ',';
        out += fmt_double(r.se_log_tstar);
        out += ',';
        out += fmt_double(r.extinct_frac);
        out += '\n';
    }
    return out;
}

inline std::string spine_csv(const std::vector<SpineRecord>& records) {
    std::string out = "rep,n,That,Uhat,Zspine,immigrants\n";
    for (std::size_t r = 0; r < records.size(); ++r) {
        for (const auto& row : records[r].rows) {
            bool final_row = row.that == 0;
            out += std::to_string(r);
            out += ',';
            out += std::to_string(row.n);
            out += ',';
            if (!final_row) out += std::to_string(row.that);
            out += ',';
            if (!final_row) out += std::to_string(row.uhat);
            out += ',';
            out += std::to_string(row.z_spine);
            out += ',';
            if (!final_row) out += std::to_string(row.immigrants);
            out += '\n';
        }
    }
    return out;
}

inline std::string abpre_csv(const std::vector<AbpreTrajectory>& trajs,
                             const EnvAtomStream& stream) {
    std::string out = "rep,n,Z,atom_j,atom_k,xi,prod_mu,Z_norm\n";
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        double prod_mu = 1.0;
        for (const auto& row : trajs[r].rows) {
            out += std::to_string(r);
            out += ',';
            out += std::to_string(row.n);
            out += ',';
            out += std::to_string(row.z);
            out += ',';
            if (row.atom_index) out += std::to_string(stream.atoms()[*row.atom_index].j);
            out += ',';
            if (row.atom_index) out += std::to_string(stream.atoms()[*row.atom_index].k);
            out += ",,";  // no immigration column for the plain environment
            out += fmt_double(prod_mu);
            out += ',';
            out += fmt_double(prod_mu > 0.0 ? static_cast<double>(row.z) / prod_mu : 0.0);
            out += '\n';
            if (row.atom_index) prod_mu *= stream.atoms()[*row.atom_index].offspring.mean();
        }
    }
    return out;
}

inline std::string bprei_csv(const std::vector<BpreiTrajectory>& trajs,
                             const EnvAtomStream& stream) {
    std::string out = "rep,n,Z,atom_j,atom_k,xi,prod_mu,Z_norm\n";
    for (std::size_t r = 0; r < trajs.size(); ++r) {
        for (const auto& row : trajs[r].rows) {
            out += std::to_string(r);
            out += ',';
            out += std::to_string(row.n);
            out += ',';
            out += std::to_string(row.z);
            out += ',';
            if (row.atom_index) out += std::to_string(stream.atoms()[*row.atom_index].j);
            out += ',';
            if (row.atom_index) out += std::to_string(stream.atoms()[*row.atom_index].k);
            out += ',';
            if (row.atom_index) out += std::to_string(row.xi);
            out += ',';
            out += fmt_double(row.prod_mu);
            out += ',';
            out += fmt_double(row.z_norm);
            out += '\n';
        }
    }
    return out;
}

}  // namespace bwb
