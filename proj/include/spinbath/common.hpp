#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace spinbath {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr cplx iu{0.0, 1.0};

// A requested table or state vector would exceed the configured memory cap.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what, std::size_t bytes)
        : std::runtime_error(what), estimated_bytes(bytes) {}
    std::size_t estimated_bytes;
};

// The bath field sits exactly on a level crossing, so "the" ground state
// is ill-defined.
struct degenerate_ground_state : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct integration_failure : std::runtime_error {
    integration_failure(const std::string& what, double drift_)
        : std::runtime_error(what), drift(drift_) {}
    double drift;
};

}  // namespace spinbath
