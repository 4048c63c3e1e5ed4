#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace stableq {

/// Numerical routine failed to reach its accuracy target; carries the
/// error estimate that was actually achieved.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error " +
                             format_error(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    static std::string format_error(double e) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3e", e);
        return buf;
    }

    double achieved_error_;
};

}  // namespace stableq
