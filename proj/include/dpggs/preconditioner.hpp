#ifndef DPGGS_PRECONDITIONER_HPP
#define DPGGS_PRECONDITIONER_HPP

#include "common.hpp"

#include <Eigen/SparseCholesky>

#include <array>
#include <memory>

namespace dpg
{

/// Block Jacobi preconditioner over the four contiguous trial blocks
/// (q, psi, qn, psihat). Each diagonal block is factored exactly.
class BlockJacobiPreconditioner
{
public:
    BlockJacobiPreconditioner() = default;

    /// `A` is a symmetric matrix on the full trial space; `offsets` has 5
    /// entries delimiting the blocks.
    BlockJacobiPreconditioner(const SpMat& A, const std::array<int, 5>& offsets) : offsets_(offsets)
    {
        static const char* names[4] = {"q", "psi", "qn", "psihat"};
        for (int b = 0; b < 4; ++b) {
            const int o = offsets[b], n = offsets[b + 1] - offsets[b];
            blocks_[b] = A.block(o, o, n, n);
            blocks_[b].makeCompressed();
            if (n == 0)
                continue;
            factors_[b] = std::make_unique<Factor>();
            factors_[b]->compute(blocks_[b]);
            if (factors_[b]->info() != Eigen::Success || (factors_[b]->vectorD().array() <= 0.0).any())
                throw SolverError(std::string("block Jacobi factorization failed on block P") +
                                  char('1' + b) + char('1' + b) + " (" + names[b] + ")");
        }
    }

    BlockJacobiPreconditioner(BlockJacobiPreconditioner&&) = default;
    BlockJacobiPreconditioner& operator=(BlockJacobiPreconditioner&&) = default;

    void apply(const Vec& x, Vec& y) const
    {
        y.resize(x.size());
        for (int b = 0; b < 4; ++b) {
            const int o = offsets_[b], n = offsets_[b + 1] - offsets_[b];
            if (n > 0)
                y.segment(o, n) = factors_[b]->solve(x.segment(o, n));
        }
    }

    /// y = P x with P the block-diagonal matrix itself.
    void multiply(const Vec& x, Vec& y) const
    {
        y.resize(x.size());
        for (int b = 0; b < 4; ++b) {
            const int o = offsets_[b], n = offsets_[b + 1] - offsets_[b];
            if (n > 0)
                y.segment(o, n) = blocks_[b] * x.segment(o, n);
        }
    }

    const Eigen::SparseMatrix<double>& block(int b) const { return blocks_[b]; }

private:
    using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>;
    std::array<int, 5> offsets_{};
    std::array<Eigen::SparseMatrix<double>, 4> blocks_;
    std::array<std::unique_ptr<Factor>, 4> factors_;
};

} // namespace dpg

#endif // DPGGS_PRECONDITIONER_HPP
