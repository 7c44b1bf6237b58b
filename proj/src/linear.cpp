#include "linear.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <string>

#include "smelab/errors.hpp"

namespace sme {

struct LinearSolver::Impl {
    const SpMat* A = nullptr;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> krylov;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu;
    bool krylov_ok = true;
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

void LinearSolver::compute(const SpMat& A) {
    impl_->A = &A;
    impl_->lu.reset();
    impl_->krylov.preconditioner().setDroptol(1e-4);
    impl_->krylov.preconditioner().setFillfactor(10);
    impl_->krylov.compute(A);
    impl_->krylov_ok = impl_->krylov.info() == Eigen::Success;
}

Vec LinearSolver::solve(const Vec& b, const Vec& guess, double tol, int max_iters, LinearInfo* info) {
    LinearInfo local;
    LinearInfo& out = info ? *info : local;
    out = LinearInfo{};
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Vec::Zero(b.size());
    Vec x = guess.size() == b.size() ? guess : Vec::Zero(b.size());
    if (impl_->krylov_ok && !impl_->lu) {
        const int chunk = 25;
        impl_->krylov.setTolerance(tol);
        double best = (b - *impl_->A * x).norm() / bnorm;
        int stalls = 0;
        while (out.iterations < max_iters) {
            impl_->krylov.setMaxIterations(std::min(chunk, max_iters - out.iterations));
            Vec next = impl_->krylov.solveWithGuess(b, x);
            out.iterations += int(impl_->krylov.iterations());
            const double rel = (b - *impl_->A * next).norm() / bnorm;
            if (!std::isfinite(rel)) break;
            out.history.push_back(rel);
            x = next;
            if (rel <= tol) {
                out.relative_residual = rel;
                return x;
            }
            if (rel > 0.5 * best) {
                if (++stalls >= 3) break;
            } else {
                stalls = 0;
            }
            best = std::min(best, rel);
            if (impl_->krylov.iterations() == 0) break;
        }
    }
    // Krylov stagnated: direct factorization.
    if (!impl_->lu) {
        impl_->lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
        Eigen::SparseMatrix<double> Ac = *impl_->A;
        impl_->lu->analyzePattern(Ac);
        impl_->lu->factorize(Ac);
        if (impl_->lu->info() != Eigen::Success) {
            impl_->lu.reset();
            throw SolverError("linear solve: Krylov stagnated and the LU factorization failed", out.history);
        }
    }
    x = impl_->lu->solve(b);
    out.direct = true;
    out.relative_residual = (b - *impl_->A * x).norm() / bnorm;
    out.history.push_back(out.relative_residual);
    if (!(out.relative_residual <= std::max(tol, 1e-10)))
        throw SolverError("linear solve: residual " + std::to_string(out.relative_residual) + " above tolerance",
                          out.history);
    return x;
}

}  // namespace sme
