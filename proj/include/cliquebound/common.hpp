#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace cqb {

// Thrown when an enumeration would exceed the configured budget (CLI exit 3).
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a runtime verification fails (CLI exit 2).
struct VerificationError : std::runtime_error {
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an operation's precondition is violated by the caller.
struct ContractError : std::invalid_argument {
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

namespace detail {
inline std::uint64_t& budget_slot() {
    static std::uint64_t value = [] {
        if (const char* env = std::getenv("CLIQUE_MEASURE_BUDGET")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && v > 0) return static_cast<std::uint64_t>(v);
        }
        return std::uint64_t{10'000'000};
    }();
    return value;
}
}  // namespace detail

// Global enumeration cap. CLIQUE_MEASURE_BUDGET overrides the default,
// and the CLI --budget flag overrides both.
inline std::uint64_t enumeration_budget() { return detail::budget_slot(); }

inline void set_enumeration_budget(std::uint64_t v) {
    if (v > 0) detail::budget_slot() = v;
}

inline void check_budget(std::uint64_t work, const std::string& what) {
    if (work > enumeration_budget())
        throw BudgetError(what + ": requires " + std::to_string(work) +
                          " steps, budget is " + std::to_string(enumeration_budget()));
}

}  // namespace cqb
