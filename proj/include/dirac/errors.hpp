#ifndef DIRAC_ERRORS_HPP
#define DIRAC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dirac {

/// Error classes shared by the library and the CLI exit-code mapping.
enum class errc {
    theorem_violation = 1,
    state_not_found   = 2,
    invalid_input     = 3,
    numerical_failure = 4,
};

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

/// Bad input: malformed documents, domain violations, hypothesis failures.
class spec_error : public error {
  public:
    explicit spec_error(const std::string& what) : error(errc::invalid_input, what) {}
};

/// Potential outside the supported singularity class.
class unsupported_potential_error : public spec_error {
  public:
    explicit unsupported_potential_error(const std::string& what) : spec_error(what) {}
};

/// Origin singularity too strong: k_d^2 <= v0^2 leaves no real indicial exponent.
class supercritical_error : public spec_error {
  public:
    explicit supercritical_error(const std::string& what) : spec_error(what) {}
};

class numerical_error : public error {
  public:
    explicit numerical_error(const std::string& what) : error(errc::numerical_failure, what) {}
};

/// Step-size underflow or related integrator breakdown; carries the failure radius.
class integration_failure : public numerical_error {
  public:
    integration_failure(const std::string& what, double radius)
        : numerical_error(what), radius_(radius)
    {
    }
    double radius() const noexcept { return radius_; }

  private:
    double radius_;
};

/// Node counting hit consecutive near-zero samples away from the endpoints.
class ambiguous_node_error : public numerical_error {
  public:
    explicit ambiguous_node_error(const std::string& what) : numerical_error(what) {}
};

/// No bracket with the requested node label; carries the labels that were found.
class state_not_found_error : public error {
  public:
    state_not_found_error(const std::string& what, std::vector<int> available)
        : error(errc::state_not_found, what), available_(std::move(available))
    {
    }
    const std::vector<int>& available_labels() const noexcept { return available_; }

  private:
    std::vector<int> available_;
};

} // namespace dirac

#endif
