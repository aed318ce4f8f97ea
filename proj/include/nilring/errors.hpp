#ifndef NILRING_ERRORS_HPP
#define NILRING_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nilring {

// Raised on malformed or out-of-range user configuration (CLI exit 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an enumeration would exceed the configured work budget (CLI exit 3).
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a numeric precondition fails, e.g. a kernel violating its
// size/derivative bounds or overlapping major arcs (CLI exit 4).
class NumericPreconditionError : public std::runtime_error {
public:
    explicit NumericPreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration budget measured in elementary evaluations.
struct WorkBudget {
    std::uint64_t max_ops = 100'000'000;

    void check(double estimated_ops, const std::string& what) const {
        if (!(estimated_ops <= static_cast<double>(max_ops))) {
            throw BudgetError(what + ": estimated work " + format_ops(estimated_ops) +
                              " exceeds budget " + std::to_string(max_ops));
        }
    }

private:
    static std::string format_ops(double ops);
};

}  // namespace nilring

#endif
