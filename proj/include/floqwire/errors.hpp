#pragma once

#include <stdexcept>
#include <string>

namespace floqwire {

// Base class for all library errors. Split into two broad families so the
// CLI can map them to distinct exit codes: InputError for malformed or
// rejected inputs, ContractError for numerical contracts that failed at
// runtime (non-integer winding, gap closings, leakage, ...).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

#define FLOQWIRE_DEFINE_ERROR(NAME, BASE)                                    \
    class NAME : public BASE {                                               \
    public:                                                                  \
        explicit NAME(const std::string& msg) : BASE(msg) {}                 \
    }

FLOQWIRE_DEFINE_ERROR(NonFiniteParameter, InputError);
FLOQWIRE_DEFINE_ERROR(OverridesPresent, InputError);
FLOQWIRE_DEFINE_ERROR(UnknownName, InputError);
FLOQWIRE_DEFINE_ERROR(OddDuration, InputError);
FLOQWIRE_DEFINE_ERROR(ScheduleNotClosed, InputError);
FLOQWIRE_DEFINE_ERROR(UnsupportedWidth, InputError);
FLOQWIRE_DEFINE_ERROR(TooLarge, InputError);
FLOQWIRE_DEFINE_ERROR(IncompatibleModes, InputError);

FLOQWIRE_DEFINE_ERROR(GapClosed, ContractError);
FLOQWIRE_DEFINE_ERROR(NonIntegerResult, ContractError);
FLOQWIRE_DEFINE_ERROR(WrongDegeneracy, ContractError);
FLOQWIRE_DEFINE_ERROR(GaugeAmbiguity, ContractError);
FLOQWIRE_DEFINE_ERROR(LeakageTooLarge, ContractError);
FLOQWIRE_DEFINE_ERROR(SubspaceDimensionChanged, ContractError);
FLOQWIRE_DEFINE_ERROR(ZeroProbabilityBranch, ContractError);
FLOQWIRE_DEFINE_ERROR(GapClosedByBreaking, ContractError);
FLOQWIRE_DEFINE_ERROR(PurityLost, ContractError);

#undef FLOQWIRE_DEFINE_ERROR

}  // namespace floqwire
