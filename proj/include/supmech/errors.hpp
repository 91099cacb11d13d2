#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace supmech {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class AlgebraMismatch : public Error {
   public:
    using Error::Error;
};

class NoInnerDerivations : public Error {
   public:
    using Error::Error;
};

class NotInSpan : public Error {
   public:
    NotInSpan(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

class NotIsomorphism : public Error {
   public:
    using Error::Error;
};

class BasisMismatch : public Error {
   public:
    using Error::Error;
};

class NotSpecial : public Error {
   public:
    using Error::Error;
};

/// No derivation in the structure's derivation space solves i_Y w = -dA.
class NonDegeneracyFailure : public Error {
   public:
    NonDegeneracyFailure(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

/// The Hamiltonian-derivation system is rank deficient.
class NotUnique : public Error {
   public:
    NotUnique(const std::string& what, std::size_t kernel_dimension)
        : Error(what), kernel_dimension_(kernel_dimension) {}
    std::size_t kernel_dimension() const { return kernel_dimension_; }

   private:
    std::size_t kernel_dimension_;
};

class NotLieSubalgebra : public Error {
   public:
    using Error::Error;
};

class UnclassifiedWorld : public Error {
   public:
    using Error::Error;
};

class ZeroParameter : public Error {
   public:
    using Error::Error;
};

/// Raised when two systems may not be coupled (mixed or mismatched worlds).
class ForbiddenCoupling : public Error {
   public:
    ForbiddenCoupling(const std::string& what, std::string verdict) : Error(what), verdict_(std::move(verdict)) {}
    const std::string& verdict() const { return verdict_; }

   private:
    std::string verdict_;
};

class StepTooLarge : public Error {
   public:
    StepTooLarge(const std::string& what, double estimate) : Error(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

   private:
    double estimate_;
};

class SpecParseError : public Error {
   public:
    SpecParseError(const std::string& field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

class DegreeZero : public Error {
   public:
    using Error::Error;
};

class DegreeBoundExceeded : public Error {
   public:
    using Error::Error;
};

class NotLinear : public Error {
   public:
    using Error::Error;
};

class Unsupported : public Error {
   public:
    using Error::Error;
};

}  // namespace supmech
