#pragma once

#include <stdexcept>
#include <string>

namespace ncr {

enum class ErrorKind {
    UnboundSymbol,
    Domain,
    RankInstability,
    NotASubalgebra,
    FrameDegenerate,
    SymbolicInversion,
    OutOfChart,
    NonUnimodular,
    SingularMetric,
    PolarizationInvalid,
    SplitIncompatible,
    NonScalar,
    UnsupportedGroup,
    NotReducible,
    BoundaryContamination,
    SingularityApproach,
    WrongEquation,
    UnknownName,
    Parse,
    Config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Position is 1-based; zero means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0, int column = 0);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }  // without the position

private:
    std::string message_;
    int line_;
    int column_;
};

}  // namespace ncr
