#pragma once

#include <cmath>
#include <complex>

namespace bpd {

/// Neumaier-compensated accumulator. Works for double and std::complex<double>
/// (the complex case compensates real and imaginary parts independently).
template <class T>
class CompensatedSum;

template <>
class CompensatedSum<double> {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) noexcept {
        add(v);
        return *this;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <>
class CompensatedSum<std::complex<double>> {
public:
    void add(std::complex<double> v) noexcept {
        re_.add(v.real());
        im_.add(v.imag());
    }
    CompensatedSum& operator+=(std::complex<double> v) noexcept {
        add(v);
        return *this;
    }
    std::complex<double> value() const noexcept { return {re_.value(), im_.value()}; }

private:
    CompensatedSum<double> re_;
    CompensatedSum<double> im_;
};

}  // namespace bpd
