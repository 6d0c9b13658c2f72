#ifndef QUADHAM_TYPES_HPP
#define QUADHAM_TYPES_HPP

#include <complex>
#include <map>
#include <string>

#include <Eigen/Dense>

namespace quadham {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Generator name -> complex coefficient. Ordered so iteration is deterministic.
using Coefficients = std::map<std::string, cplx>;

inline constexpr cplx I_unit{0.0, 1.0};

}  // namespace quadham

#endif  // QUADHAM_TYPES_HPP
