#pragma once

#include <stdexcept>
#include <string>

namespace k2lab {

// Base class for all domain errors thrown by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotAUnit : Error {
    explicit NotAUnit(const std::string& what = "argument is not a unit") : Error(what) {}
};
struct EvenModulus : Error {
    explicit EvenModulus(const std::string& what = "modulus must be odd") : Error(what) {}
};
struct NonUnitTarget : Error {
    explicit NonUnitTarget(const std::string& what = "target residue is divisible by p") : Error(what) {}
};
struct NoPrimitiveRoot : Error {
    explicit NoPrimitiveRoot(const std::string& what = "no primitive cube root exists (p = 2 mod 3)") : Error(what) {}
};
struct SmallPrime : Error {
    explicit SmallPrime(const std::string& what = "prime must exceed 3") : Error(what) {}
};
struct BadExponent : Error {
    explicit BadExponent(const std::string& what = "exponent out of range") : Error(what) {}
};
struct NotCoprime : Error {
    explicit NotCoprime(const std::string& what = "moduli are not coprime") : Error(what) {}
};
struct ExactEngineOverflow : Error {
    explicit ExactEngineOverflow(const std::string& what = "order exceeds the exact-engine cap") : Error(what) {}
};
struct EmptyCorrelation : Error {
    explicit EmptyCorrelation(const std::string& what = "correlation needs at least one factor") : Error(what) {}
};
struct OutsideDiamond : Error {
    explicit OutsideDiamond(const std::string& what = "argument violates the cube condition") : Error(what) {}
};
struct ZeroEps : Error {
    explicit ZeroEps(const std::string& what = "epsilon vector must be nonzero") : Error(what) {}
};
struct BudgetExceeded : Error {
    explicit BudgetExceeded(const std::string& what = "enumeration budget exceeded") : Error(what) {}
};
struct NotSmooth : Error {
    explicit NotSmooth(const std::string& what = "modulus is not y-smooth") : Error(what) {}
};
struct NotUltrasmooth : Error {
    explicit NotUltrasmooth(const std::string& what = "modulus is not y-ultrasmooth") : Error(what) {}
};
struct WindowInfeasible : Error {
    explicit WindowInfeasible(const std::string& what = "greedy factorization cannot meet the windows") : Error(what) {}
};
struct HypothesisViolated : Error {
    explicit HypothesisViolated(const std::string& what = "budget hypotheses violated") : Error(what) {}
};
struct PlanInvalid : Error {
    explicit PlanInvalid(const std::string& what = "factorization plan is invalid") : Error(what) {}
};
struct UnknownSuite : Error {
    explicit UnknownSuite(const std::string& what = "unknown suite name") : Error(what) {}
};
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& what = "argument out of supported range") : Error(what) {}
};

}  // namespace k2lab
