#pragma once

#include <stdexcept>
#include <string>

namespace cvloss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotNormalized : public Error {
public:
    using Error::Error;
};

class UnphysicalCovariance : public Error {
public:
    using Error::Error;
};

class NonOrthogonalLossModes : public Error {
public:
    using Error::Error;
};

/// The subtraction mode carries no photons, so a(g) rho a†(g) has zero trace.
class VacuumSubtraction : public Error {
public:
    using Error::Error;
};

/// Raised by the Fock oracle when a result depends on an unreliable truncation.
class TruncationLeakage : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace cvloss
