#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace zndstab {

// Broad classes used by the command-line front end to pick an exit code.
enum class ErrorClass { usage, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

// Invalid configuration value; `field` names the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& msg)
        : Error(ErrorClass::usage, "config field '" + field + "': " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// An operation was called outside its mathematical domain (e.g. Re lambda < 0).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, double position)
        : Error(ErrorClass::numerical, msg + " at x = " + std::to_string(position)), position_(position) {}
    double position() const noexcept { return position_; }

private:
    double position_;
};

class StepSizeUnderflow : public IntegrationError {
public:
    explicit StepSizeUnderflow(double position)
        : IntegrationError("step size underflow (stiffness or blow-up)", position) {}
};

class NonFiniteState : public IntegrationError {
public:
    explicit NonFiniteState(double position) : IntegrationError("non-finite state (overflow)", position) {}
};

// Unfactored shooting grew or shrank beyond double range.
class Overflow : public Error {
public:
    explicit Overflow(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

class ChapmanJouguetOrSonic : public Error {
public:
    explicit ChapmanJouguetOrSonic(double discriminant)
        : Error(ErrorClass::numerical,
                "wave is Chapman-Jouguet or sonic (discriminant_min = " + std::to_string(discriminant) +
                    "); only overdriven waves are supported"),
          discriminant_(discriminant) {}
    double discriminant() const noexcept { return discriminant_; }

private:
    double discriminant_;
};

class InvalidIgnitionWindow : public Error {
public:
    explicit InvalidIgnitionWindow(const std::string& msg) : Error(ErrorClass::usage, msg) {}
};

class NearCharacteristic : public Error {
public:
    explicit NearCharacteristic(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

class ResonantResolvent : public Error {
public:
    explicit ResonantResolvent(std::complex<double> lambda)
        : Error(ErrorClass::numerical, "reaction resolvent is singular at this lambda"), lambda_(lambda) {}
    std::complex<double> lambda() const noexcept { return lambda_; }

private:
    std::complex<double> lambda_;
};

class BranchAmbiguity : public Error {
public:
    explicit BranchAmbiguity(std::complex<double> lambda)
        : Error(ErrorClass::numerical, "stable eigenvalue of G_minus is not isolated at lambda = (" +
                                           std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                                           ")"),
          lambda_(lambda) {}
    std::complex<double> lambda() const noexcept { return lambda_; }

private:
    std::complex<double> lambda_;
};

// Sampled phase jumps too far between consecutive contour nodes.
class UnderSampledContour : public Error {
public:
    explicit UnderSampledContour(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

// |D| is (nearly) zero on the contour, or refinement could not resolve the phase.
class ContourThroughRoot : public Error {
public:
    ContourThroughRoot(const std::string& msg, std::complex<double> where)
        : Error(ErrorClass::numerical, msg + "; perturb the contour radius"), where_(where) {}
    std::complex<double> where() const noexcept { return where_; }

private:
    std::complex<double> where_;
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

class DegenerateRoot : public Error {
public:
    explicit DegenerateRoot(const std::string& msg) : Error(ErrorClass::numerical, msg) {}
};

} // namespace zndstab
