#pragma once

#include <stdexcept>
#include <string>

namespace anwser {

/// Base class for every failure raised by the model code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Feasibility failures. Monte Carlo drivers catch these and resample.
class InfeasibleTheta : public Error {
public:
    using Error::Error;
};

class NegativeDeposits : public Error {
public:
    using Error::Error;
};

class InvalidDegree : public Error {
public:
    using Error::Error;
};

class EmptyNetwork : public Error {
public:
    using Error::Error;
};

class ZeroLoans : public Error {
public:
    using Error::Error;
};

class Unreachable : public Error {
public:
    using Error::Error;
};

class TooFewAssets : public Error {
public:
    using Error::Error;
};

class InfeasibleTargets : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace anwser
