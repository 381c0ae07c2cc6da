#pragma once

#include <stdexcept>
#include <string>

namespace mlg
{

/// Malformed input: wrong lengths, ranks, indices. Distinct from a failed axiom.
class StructuralError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/**
 * A model failed one of its mathematical checks. `check` is a stable label
 * (e.g. "d_model.action_cocycle") and `witness` a serialized counterexample.
 */
class ModelError : public std::runtime_error
{
public:
    ModelError(std::string check, std::string witness, const std::string& message)
        : std::runtime_error(message), check_(std::move(check)), witness_(std::move(witness))
    {
    }

    const std::string& check() const noexcept { return check_; }
    const std::string& witness() const noexcept { return witness_; }

private:
    std::string check_;
    std::string witness_;
};

} // namespace mlg
