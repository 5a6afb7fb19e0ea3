#pragma once

#include <stdexcept>
#include <string>

namespace circledim {

// Errors named by the failure they report. The CLI maps them to exit codes.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateFit : std::runtime_error {
    explicit DegenerateFit(const std::string& what) : std::runtime_error(what) {}
};

struct UnreliableDiagnostics : std::runtime_error {
    explicit UnreliableDiagnostics(const std::string& what) : std::runtime_error(what) {}
};

struct UnboundedDistortion : std::runtime_error {
    explicit UnboundedDistortion(const std::string& what) : std::runtime_error(what) {}
};

struct NotContracting : std::runtime_error {
    explicit NotContracting(const std::string& what) : std::runtime_error(what) {}
};

struct OverlapDetected : std::runtime_error {
    explicit OverlapDetected(const std::string& what) : std::runtime_error(what) {}
};

struct ConesOverlap : std::runtime_error {
    explicit ConesOverlap(const std::string& what) : std::runtime_error(what) {}
};

struct TooManyFixedPoints : std::runtime_error {
    explicit TooManyFixedPoints(const std::string& what) : std::runtime_error(what) {}
};

struct NoBracket : std::runtime_error {
    explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

struct NotFound : std::runtime_error {
    explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};

struct EmptySelection : std::runtime_error {
    explicit EmptySelection(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownFixture : std::runtime_error {
    explicit UnknownFixture(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct NonConvergence : std::runtime_error {
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

} // namespace circledim
