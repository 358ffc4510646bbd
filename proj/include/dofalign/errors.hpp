#pragma once

#include <stdexcept>
#include <string>

namespace dofalign {

// Invalid or malformed network description / point / flag combination.
class SpecError : public std::runtime_error {
public:
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// A requested DoF point lies outside the region; carries the first receiver
// whose column budget (sum of desired integer DoF plus the dominant
// interferer's) exceeds kappa*M.
class OutOfRegionError : public std::runtime_error {
public:
    OutOfRegionError(const std::string& what, int receiver)
        : std::runtime_error(what), receiver_(receiver) {}
    int receiver() const { return receiver_; }

private:
    int receiver_ = 0;
};

// Time expansion or integerization exceeds the configured cap.
class CapExceededError : public std::runtime_error {
public:
    explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

// A stacked channel matrix turned out numerically singular (probability-zero
// event under the continuous sampler; usually indicates fixture misuse).
class SingularChannelError : public std::runtime_error {
public:
    explicit SingularChannelError(const std::string& what) : std::runtime_error(what) {}
};

// Instance too large for exhaustive vertex enumeration.
class EnumerationLimitError : public std::runtime_error {
public:
    explicit EnumerationLimitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dofalign
