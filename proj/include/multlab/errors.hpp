#pragma once

#include <stdexcept>
#include <string>

namespace multlab {

// Base for all domain errors. `kind()` is the stable machine-readable name
// reported by the CLI; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MULTLAB_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}      \
    }

MULTLAB_DEFINE_ERROR(FieldMismatch);
MULTLAB_DEFINE_ERROR(ArityMismatch);
MULTLAB_DEFINE_ERROR(NotBiHomogeneous);
MULTLAB_DEFINE_ERROR(InnerNotPositiveValuation);
MULTLAB_DEFINE_ERROR(SingularRecursion);
MULTLAB_DEFINE_ERROR(SeedNotFixedPoint);
MULTLAB_DEFINE_ERROR(DegenerateA0);
MULTLAB_DEFINE_ERROR(CharacteristicDivision);
MULTLAB_DEFINE_ERROR(PrecisionExhausted);
MULTLAB_DEFINE_ERROR(AllInIdeal);
MULTLAB_DEFINE_ERROR(OracleMismatch);
MULTLAB_DEFINE_ERROR(CapExceeded);
MULTLAB_DEFINE_ERROR(VanishesOnCycle);
MULTLAB_DEFINE_ERROR(MissingParam);
MULTLAB_DEFINE_ERROR(ZeroVector);
MULTLAB_DEFINE_ERROR(ParseError);
MULTLAB_DEFINE_ERROR(ConfigError);

#undef MULTLAB_DEFINE_ERROR

}  // namespace multlab
