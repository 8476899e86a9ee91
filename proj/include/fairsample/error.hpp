#ifndef FAIRSAMPLE_ERROR_HPP
#define FAIRSAMPLE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fairsample {

enum class ErrorCode {
    UnknownNode,
    DuplicateNode,
    CycleDetected,
    EdgeIntoSetting,
    EdgeOutOfSelection,
    InvalidBidirected,
    InvalidNonlocal,
    MultipleSelection,
    BidirectedPresent,
    NonlocalPresent,
    CardinalityOverflow,
    NoSelectionNode,
    ResolutionBlowup,
    InvalidScenario,
    InvalidModel,
    EmptyPostselection,
    StrategyBlowup,
    DimensionMismatch,
    SearchFailed,
    SyntaxError,
    RoleConflict,
    FormatError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse errors carry a 1-based line/column position.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, int line, int column, const std::string& what)
        : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace fairsample

#endif  // FAIRSAMPLE_ERROR_HPP
