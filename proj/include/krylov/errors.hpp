// errors.hpp — exception taxonomy shared by every krylov module

#pragma once

#include <stdexcept>
#include <string>

namespace krylov {

// Base class for every failure the library can raise. `name()` is the stable
// machine-readable tag the CLI prints on stderr (and in --json-errors mode).
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define KRYLOV_DEFINE_ERROR(Tag)                                    \
    class Tag : public Error {                                      \
    public:                                                         \
        explicit Tag(const std::string& what) : Error(#Tag, what) {} \
    }

// weights
KRYLOV_DEFINE_ERROR(NonIntegrable);
KRYLOV_DEFINE_ERROR(EvalAtZeroSingularity);
KRYLOV_DEFINE_ERROR(NoClosedForm);
KRYLOV_DEFINE_ERROR(IndeterminateMomentRegime);

// pauli_liouville
KRYLOV_DEFINE_ERROR(SupportOverflow);
KRYLOV_DEFINE_ERROR(BreakdownError);

// weight_lanczos
KRYLOV_DEFINE_ERROR(PrecisionExhausted);
KRYLOV_DEFINE_ERROR(GridTooCoarse);

// coulomb_gas
KRYLOV_DEFINE_ERROR(NoBracket);
KRYLOV_DEFINE_ERROR(QuadratureNonConvergent);

// greens
KRYLOV_DEFINE_ERROR(PoleProximity);
KRYLOV_DEFINE_ERROR(SpecialFunctionDomain);

// bootstrap
KRYLOV_DEFINE_ERROR(SigmaNegative);
KRYLOV_DEFINE_ERROR(StepTooCoarse);
KRYLOV_DEFINE_ERROR(BesselDomain);
KRYLOV_DEFINE_ERROR(AiryDomain);
KRYLOV_DEFINE_ERROR(NegativePhi);

// universality
KRYLOV_DEFINE_ERROR(WeightUnavailable);
KRYLOV_DEFINE_ERROR(InversionOutOfRange);

// transport
KRYLOV_DEFINE_ERROR(FitUnstable);
KRYLOV_DEFINE_ERROR(InsufficientPoints);

#undef KRYLOV_DEFINE_ERROR

}  // namespace krylov
