#include "resttsl/errors.hpp"

namespace resttsl {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::UnresolvableRef: return "UnresolvableRef";
    case ErrorCode::DuplicateEndpoint: return "DuplicateEndpoint";
    case ErrorCode::UnknownTag: return "UnknownTag";
    case ErrorCode::TslSyntax: return "TslSyntax";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::MatcherSyntax: return "MatcherSyntax";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownLanguage: return "UnknownLanguage";
    case ErrorCode::InvalidExamplePack: return "InvalidExamplePack";
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::UnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::CassetteMiss: return "CassetteMiss";
    case ErrorCode::NoRuleMatched: return "NoRuleMatched";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ExtractionEmpty: return "ExtractionEmpty";
    case ErrorCode::MissingCases: return "MissingCases";
    case ErrorCode::DuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::IncompleteSuite: return "IncompleteSuite";
    case ErrorCode::UnknownFramework: return "UnknownFramework";
    case ErrorCode::ZeroTests: return "ZeroTests";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedReport: return "MalformedReport";
    case ErrorCode::BadConfig: return "BadConfig";
    }
    return "UnknownError";
}

} // namespace resttsl
