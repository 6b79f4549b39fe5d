#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace freefront {

/** Base class for all library errors. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** Malformed scenario input: bad JSON shape, unknown keys, out-of-range values. */
class SchemaError : public Error {
public:
    using Error::Error;
};

/** Expression text that does not parse; carries the byte offset of the fault. */
class ExpressionSyntaxError : public Error {
public:
    ExpressionSyntaxError(const std::string& what, std::size_t offset)
        : Error(what), offset(offset) {}
    std::size_t offset;
};

/** Identifier in an expression that is neither a variable nor a known function. */
class UnknownIdentifierError : public Error {
public:
    UnknownIdentifierError(const std::string& what, std::size_t offset)
        : Error(what), offset(offset) {}
    std::size_t offset;
};

/** Runtime fault while evaluating an expression (division by zero, sqrt of a
 *  negative number, non-finite intermediate); carries the offending subtree. */
class ExpressionEvalError : public Error {
public:
    ExpressionEvalError(const std::string& what, std::string subexpression)
        : Error(what), subexpression(std::move(subexpression)) {}
    std::string subexpression;
};

/** Field evaluation requested outside the scenario domain. */
class EvaluationDomainError : public Error {
public:
    EvaluationDomainError(const std::string& what, double t, double x)
        : Error(what), t(t), x(x) {}
    double t, x;
};

/** The running-average infimum is degenerate for L0 > 0 (the literal average
 *  tends to zero as y approaches L0, so no positive threshold can hold). */
class DegenerateAverageError : public Error {
public:
    using Error::Error;
};

/** Adaptive integrator could not satisfy the error control above the minimum step. */
class StepUnderflowError : public Error {
public:
    StepUnderflowError(const std::string& what, double t, double stiffness)
        : Error(what), t(t), stiffness(stiffness) {}
    double t;
    double stiffness;
};

/** No feasible position exists in [x0, X_max] at the given time. */
class NoFeasiblePointError : public Error {
public:
    NoFeasiblePointError(const std::string& what, double t) : Error(what), t(t) {}
    double t;
};

/** Trajectory fails its structural invariants (ordering, monotonicity, anchoring). */
class InconsistentTrajectoryError : public Error {
public:
    using Error::Error;
};

/** An operation specific to one solve method was applied to the other. */
class WrongMethodError : public Error {
public:
    using Error::Error;
};

/** Estimate parameters outside the admissible window of the certificate. */
class InvalidEstimateParamsError : public Error {
public:
    using Error::Error;
};

/** A reconstructed atom sits outside the contact set; indicates a solver or
 *  reconstruction defect rather than bad input. */
class AtomOutsideContactSetError : public Error {
public:
    AtomOutsideContactSetError(const std::string& what, double time)
        : Error(what), time(time) {}
    double time;
};

/** The two solve methods disagree on the number of jump atoms. */
class JumpWindowsDisagreeError : public Error {
public:
    JumpWindowsDisagreeError(const std::string& what, int penalty_atoms, int projection_atoms)
        : Error(what), penalty_atoms(penalty_atoms), projection_atoms(projection_atoms) {}
    int penalty_atoms;
    int projection_atoms;
};

/** Rate fitting requires strictly positive values. */
class NonPositiveValueError : public Error {
public:
    using Error::Error;
};

/** File could not be read or written. */
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace freefront
