#pragma once

#include <stdexcept>
#include <string>

namespace lzsm {

// Input outside the domain of an operation (non-finite voltages, bad orders, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The propagator could not reach the requested accuracy.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_good_time_ns)
        : std::runtime_error(what), last_good_time_ns_(last_good_time_ns) {}

    double last_good_time_ns() const noexcept { return last_good_time_ns_; }

private:
    double last_good_time_ns_;
};

// Delta extraction failed; stage() names the step that could not proceed.
class ExtractionError : public std::runtime_error {
public:
    ExtractionError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace lzsm
