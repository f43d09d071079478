#pragma once

#include <stdexcept>
#include <string>

namespace sabd {

/// Base of every error raised by the toolkit. `code()` is a stable,
/// machine-readable identifier used by the CLI diagnostics and the service
/// error payloads.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define SABD_DEFINE_ERROR(Name, Code)                                              \
    class Name : public Error {                                                    \
    public:                                                                        \
        explicit Name(const std::string& message) : Error(Code, message) {}        \
    }

SABD_DEFINE_ERROR(ParseError, "parse_error");
SABD_DEFINE_ERROR(ValidationError, "validation_error");
SABD_DEFINE_ERROR(LookupError, "lookup_error");
SABD_DEFINE_ERROR(RangeError, "range_error");
SABD_DEFINE_ERROR(GeometryError, "geometry_error");
SABD_DEFINE_ERROR(SingularityError, "singularity_error");
SABD_DEFINE_ERROR(ConfigurationError, "configuration_error");
SABD_DEFINE_ERROR(EmptyInputError, "empty_input");
SABD_DEFINE_ERROR(PreconditionError, "precondition_error");
SABD_DEFINE_ERROR(DegenerateModelError, "degenerate_model");
SABD_DEFINE_ERROR(EmptyGraspError, "empty_grasp");
SABD_DEFINE_ERROR(DrivenJointError, "driven_joint");
SABD_DEFINE_ERROR(FormatError, "format_error");
SABD_DEFINE_ERROR(StartupError, "startup_error");
SABD_DEFINE_ERROR(SessionError, "unknown_session");

#undef SABD_DEFINE_ERROR

}  // namespace sabd
