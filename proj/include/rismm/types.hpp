// SPDX-License-Identifier: Apache-2.0
//
// rismm - link-level simulation and optimization for RIS-assisted mmWave downlinks
// ------------------------------------------------------------------------

#ifndef RISMM_TYPES_HPP
#define RISMM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rismm
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr cdouble j_unit{0.0, 1.0};

    // Precondition or argument violation (bad dimensions, out-of-range values)
    class InvalidArgument : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Numerical failure of an otherwise valid call (rank deficiency, undefined phase)
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    inline void require(bool condition, const std::string &message)
    {
        if (!condition)
            throw InvalidArgument(message);
    }

    inline double to_db(double linear) { return 10.0 * std::log10(linear); }
    inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

    // Unit phasor e^{j*phase}
    inline cdouble phasor(double phase) { return std::polar(1.0, phase); }
}

#endif
