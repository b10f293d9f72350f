#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace varicurv {

// Ambient dimension is at most 3; fixed max sizes keep everything on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline constexpr int kMaxDim = 3;

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PointOffSurfaceError : public Error {
public:
    using Error::Error;
};

class NotNormalError : public Error {
public:
    using Error::Error;
};

class DegenerateElementError : public Error {
public:
    using Error::Error;
};

class OrientationError : public Error {
public:
    using Error::Error;
};

class DictionaryViolationError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class OffManifoldError : public Error {
public:
    using Error::Error;
};

class UnderdeterminedError : public Error {
public:
    using Error::Error;
};

class SolverFailureError : public Error {
public:
    using Error::Error;
};

class ZeroMultiplicityError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Projection onto the orthogonal complement of a unit vector: P = I - v v^T.
inline Mat normal_projection(const Vec& v)
{
    const auto d = v.size();
    Mat p = Mat::Identity(d, d);
    p.noalias() -= v * v.transpose();
    return p;
}

/// Neumaier compensated accumulator; summation order is the call order.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace varicurv
