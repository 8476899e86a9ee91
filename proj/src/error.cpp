#include "fairsample/error.hpp"

namespace fairsample {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::DuplicateNode: return "DuplicateNode";
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::EdgeIntoSetting: return "EdgeIntoSetting";
        case ErrorCode::EdgeOutOfSelection: return "EdgeOutOfSelection";
        case ErrorCode::InvalidBidirected: return "InvalidBidirected";
        case ErrorCode::InvalidNonlocal: return "InvalidNonlocal";
        case ErrorCode::MultipleSelection: return "MultipleSelection";
        case ErrorCode::BidirectedPresent: return "BidirectedPresent";
        case ErrorCode::NonlocalPresent: return "NonlocalPresent";
        case ErrorCode::CardinalityOverflow: return "CardinalityOverflow";
        case ErrorCode::NoSelectionNode: return "NoSelectionNode";
        case ErrorCode::ResolutionBlowup: return "ResolutionBlowup";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::InvalidModel: return "InvalidModel";
        case ErrorCode::EmptyPostselection: return "EmptyPostselection";
        case ErrorCode::StrategyBlowup: return "StrategyBlowup";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SearchFailed: return "SearchFailed";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::RoleConflict: return "RoleConflict";
        case ErrorCode::FormatError: return "FormatError";
    }
    return "Unknown";
}

}  // namespace fairsample
