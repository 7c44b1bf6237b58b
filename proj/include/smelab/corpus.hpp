#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smelab/analysis.hpp"
#include "smelab/solver.hpp"

namespace sme {

/// A ball B_rho(center) that stays clear of the boundary for the estimate checks.
struct Probe {
    Point center;
    double rho = 0.0;
};

struct CorpusEntry {
    std::string id;
    std::string description;
    Params params;
    bool closed_form = false;
    ScalarField u;
    BoundaryData boundary;
    bool converged = true;
    double residual = 0.0;
    std::vector<Probe> probes;
};

/// Built-in fields: the closed-form cone on the unit disk plus solver outputs on a disk
/// (K = 1.5, K = 3, affine data), an annulus with cone data, a rectangle and an m = 3 disk.
std::vector<std::string> corpus_ids();
CorpusEntry make_corpus_entry(const std::string& id, double h, const SolveConfig& cfg);
std::vector<CorpusEntry> build_corpus(double h, const SolveConfig& cfg);

struct VerifyOptions {
    int trials = 10;                 // random test functions per field
    std::uint64_t seed = 12345;
    double eps = 0.5;                // stability inequality parameter
    double theta = 0.5;              // gradient bound on B_{theta rho}
    Tolerances tol;
};

/// Every estimate check over a corpus built at two resolutions (same ids, same order).
/// Refinement checks compare coarse against fine.
VerificationReport verify_corpus(const std::vector<CorpusEntry>& coarse, const std::vector<CorpusEntry>& fine,
                                 const VerifyOptions& opt);

/// Smallest eps0_probe value over every probe of every entry.
double measured_eps0(const std::vector<CorpusEntry>& corpus);

}  // namespace sme
