#pragma once

#include <stdexcept>
#include <string>

namespace extlab {

// Common base so callers can catch everything the library throws in one clause.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define EXTLAB_ERROR(Name)                                       \
    class Name : public Error {                                  \
    public:                                                      \
        explicit Name(const std::string& what = #Name)           \
            : Error(std::string(#Name) + ": " + what) {}         \
    };

// parameters / meshes
EXTLAB_ERROR(SubcriticalityViolated)
EXTLAB_ERROR(NotFastDiffusion)
EXTLAB_ERROR(NonPositive)
EXTLAB_ERROR(UnsupportedDimension)
EXTLAB_ERROR(ResolutionTooCoarse)
EXTLAB_ERROR(MeshMismatch)
EXTLAB_ERROR(NegativeWeight)
EXTLAB_ERROR(PreconditionViolated)

// stationary solvers
EXTLAB_ERROR(NoZeroFound)
EXTLAB_ERROR(InvalidExponent)
EXTLAB_ERROR(ConvergedToZero)
EXTLAB_ERROR(MaxIterExceeded)
EXTLAB_ERROR(LostPositivity)
EXTLAB_ERROR(EmptyBand)

// spectrum
EXTLAB_ERROR(DegenerateMass)
EXTLAB_ERROR(EigensolverFailure)
EXTLAB_ERROR(NoPositiveGap)

// evolution
EXTLAB_ERROR(PositivityLost)
EXTLAB_ERROR(LinearSolveFailure)
EXTLAB_ERROR(NewtonDivergence)
EXTLAB_ERROR(BeyondExtinction)
EXTLAB_ERROR(EmptyTrajectory)

// asymptotics
EXTLAB_ERROR(NonPositiveValues)
EXTLAB_ERROR(WindowTooShort)
EXTLAB_ERROR(NotDecaying)
EXTLAB_ERROR(ModeCutoffEmpty)
EXTLAB_ERROR(MismatchedProfile)

// mode-system verifiers
EXTLAB_ERROR(BlowUp)
EXTLAB_ERROR(GridTooCoarse)
EXTLAB_ERROR(HypothesesFailed)
EXTLAB_ERROR(EtaBoundViolated)

// persistence / plotting
EXTLAB_ERROR(SchemaMismatch)
EXTLAB_ERROR(EmptySeries)

#undef EXTLAB_ERROR

} // namespace extlab
