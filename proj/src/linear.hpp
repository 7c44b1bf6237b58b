#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <vector>

namespace sme {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

struct LinearInfo {
    int iterations = 0;
    double relative_residual = 0.0;
    bool direct = false;           // fell back to a sparse LU factorization
    std::vector<double> history;   // relative residual after each chunk of Krylov iterations
};

/// BiCGSTAB with an incomplete-LU preconditioner; a sparse LU takes over when the
/// Krylov iteration stagnates. One factorization serves several right-hand sides.
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    void compute(const SpMat& A);
    /// Throws SolverError (with the residual history) if neither method reaches tol.
    Vec solve(const Vec& b, const Vec& guess, double tol, int max_iters, LinearInfo* info = nullptr);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sme
