#ifndef QUADHAM_ERRORS_HPP
#define QUADHAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace quadham {

// Base of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrices of mismatched shape handed to an algebraic routine.
class structure_error : public error {
 public:
  using error::error;
};

// Unknown generator name.
class lookup_error : public error {
 public:
  using error::error;
};

// Spectrum too close to degenerate for a routine that divides by root gaps.
class degeneracy_error : public error {
 public:
  using error::error;
};

// A pivot of a triangular/diagonal factorization vanished.
class singularity_error : public error {
 public:
  explicit singularity_error(const std::string& what, double t = 0.0)
      : error(what), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

// Fock basis or dense block larger than the configured cap.
class capacity_error : public error {
 public:
  using error::error;
};

// Fock state outside the truncated basis.
class index_error : public error {
 public:
  using error::error;
};

// Model spec invalid for the requested operation.
class model_error : public error {
 public:
  using error::error;
};

}  // namespace quadham

#endif  // QUADHAM_ERRORS_HPP
