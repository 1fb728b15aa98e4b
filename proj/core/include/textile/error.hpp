#ifndef TEXTILE_ERROR_HPP
#define TEXTILE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace textile {

// Every failure raised by the library derives from Error so callers can map
// the kind onto an exit status or a test expectation.
enum class ErrorKind {
    Domain,
    InsufficientData,
    SingularFit,
    DegenerateGeometry,
    InvalidContour,
    InfeasibleWeave,
    EmptyModel,
    BudgetExceeded,
    SelfIntersection,
    Parse,
    Io,
    Config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define TEXTILE_DEFINE_ERROR(Name, Kind)                                  \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
    }

TEXTILE_DEFINE_ERROR(DomainError, Domain);
TEXTILE_DEFINE_ERROR(InsufficientDataError, InsufficientData);
TEXTILE_DEFINE_ERROR(SingularFitError, SingularFit);
TEXTILE_DEFINE_ERROR(DegenerateGeometryError, DegenerateGeometry);
TEXTILE_DEFINE_ERROR(InvalidContourError, InvalidContour);
TEXTILE_DEFINE_ERROR(InfeasibleWeaveError, InfeasibleWeave);
TEXTILE_DEFINE_ERROR(EmptyModelError, EmptyModel);
TEXTILE_DEFINE_ERROR(BudgetExceededError, BudgetExceeded);
TEXTILE_DEFINE_ERROR(SelfIntersectionError, SelfIntersection);
TEXTILE_DEFINE_ERROR(IoError, Io);
TEXTILE_DEFINE_ERROR(ConfigError, Config);

#undef TEXTILE_DEFINE_ERROR

// Malformed input document. Carries the offending file and field.
class ParseError : public Error {
public:
    ParseError(std::string file, std::string field, const std::string& detail)
        : Error(ErrorKind::Parse, file + ": field '" + field + "': " + detail),
          file_(std::move(file)), field_(std::move(field)) {}

    const std::string& file() const noexcept { return file_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string file_;
    std::string field_;
};

}  // namespace textile

#endif  // TEXTILE_ERROR_HPP
