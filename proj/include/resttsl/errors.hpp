#pragma once

#include <stdexcept>
#include <string>

namespace resttsl {

enum class ErrorCode {
    // openapi
    MalformedDocument,
    UnresolvableRef,
    DuplicateEndpoint,
    UnknownTag,
    // tsl
    TslSyntax,
    MissingField,
    MatcherSyntax,
    DuplicateId,
    // prompt pipeline
    UnknownLanguage,
    InvalidExamplePack,
    EmptyDocument,
    PlanMismatch,
    UnknownPlaceholder,
    // gateway
    AuthError,
    RateLimited,
    ProviderError,
    Timeout,
    Truncated,
    CassetteMiss,
    NoRuleMatched,
    IoError,
    // codegen
    ExtractionEmpty,
    MissingCases,
    DuplicateCaseId,
    IncompleteSuite,
    UnknownFramework,
    // metrics
    ZeroTests,
    InvalidWeights,
    EmptyInput,
    MalformedReport,
    // config / cli
    BadConfig,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a stable error code alongside the human message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace resttsl
