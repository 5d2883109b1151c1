#ifndef DPGGS_COMMON_HPP
#define DPGGS_COMMON_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace dpg
{

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Point = Eigen::Vector2d; // (r, z)
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Base of every error raised by the library.
class Error : public std::runtime_error
{
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class MeshError : public Error
{
public:
    using Error::Error;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    using Error::Error;
};

/// Dimension of the full polynomial space P^k in two variables.
constexpr int dim_p(int k) { return (k + 1) * (k + 2) / 2; }

} // namespace dpg

#endif // DPGGS_COMMON_HPP
