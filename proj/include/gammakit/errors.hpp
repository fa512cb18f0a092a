#ifndef GAMMAKIT_ERRORS_HPP
#define GAMMAKIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammakit {

/// Mismatched grids, layouts, or array shapes between operands.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A field was handed to an operation in the wrong space (real vs fourier).
struct SpaceError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A pointwise tensor failed a positive-definiteness requirement.
struct DefinitenessError : std::runtime_error {
  DefinitenessError(const std::string& what, std::size_t point, double worst_eigenvalue)
      : std::runtime_error(what), point(point), worst_eigenvalue(worst_eigenvalue) {}
  std::size_t point;
  double worst_eigenvalue;
};

/// A pointwise tensor could not be inverted.
struct SingularOperatorError : std::runtime_error {
  SingularOperatorError(const std::string& what, std::size_t point)
      : std::runtime_error(what), point(point) {}
  std::size_t point;
};

/// A restricted Fourier-space inverse was singular at some wavevector.
struct SingularSymbolError : std::runtime_error {
  SingularSymbolError(const std::string& what, double kx, double ky, double kz)
      : std::runtime_error(what), k{kx, ky, kz} {}
  double k[3];
};

/// An input violated a structural constraint (e.g. a non-solenoidal velocity).
struct ConstraintError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A candidate local operator failed the annihilation test required of it.
struct InvalidNullTError : std::runtime_error {
  InvalidNullTError(const std::string& what, double kx, double ky, double kz, double violation)
      : std::runtime_error(what), k{kx, ky, kz}, violation(violation) {}
  double k[3];
  double violation;
};

/// A run configuration failed schema validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace gammakit

#endif
