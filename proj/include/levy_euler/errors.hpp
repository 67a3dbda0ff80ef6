#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace levy_euler {

//! Base class of all library errors.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A precondition on an argument was violated.
class DomainError : public Error
{
  public:
    using Error::Error;
};

//! A quadrature did not reach its tolerance; carries the achieved error.
class QuadratureError : public Error
{
  public:
    QuadratureError(std::string const& what, double achieved)
        : Error(what), achieved_(achieved)
    {
    }
    double achieved_error() const { return achieved_; }

  private:
    double achieved_;
};

//! The coefficient diffusion matrix is (numerically) singular somewhere.
class DegeneracyError : public Error
{
  public:
    DegeneracyError(std::string const& what, std::vector<double> point,
                    double det)
        : Error(what), point_(std::move(point)), det_(det)
    {
    }
    std::vector<double> const& point() const { return point_; }
    double determinant() const { return det_; }

  private:
    std::vector<double> point_;
    double det_;
};

//! A configuration failed validation; every violation is listed.
class ConfigError : public Error
{
  public:
    explicit ConfigError(std::vector<std::string> violations);
    std::vector<std::string> const& violations() const { return violations_; }

  private:
    std::vector<std::string> violations_;
};

}  // namespace levy_euler
