#pragma once

#include <cmath>

namespace somos {

// Neumaier's variant of Kahan summation: the rounding error of every addition
// is recycled into a separate compensation term.
class CompensatedSum {
public:
    CompensatedSum& operator+=(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

    friend bool operator==(const CompensatedSum&, const CompensatedSum&) = default;

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace somos
