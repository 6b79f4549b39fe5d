#pragma once

#include <optional>
#include <string>
#include <vector>

namespace freefront {

enum class SolveMethod { penalty, projection };

/**
 * Singular (jump) part of the front motion: a forward catch-up of the
 * position over a short time window.  magnitude is the position increase
 * attributed to the constraint; mass = -magnitude is the corresponding
 * multiplier atom (always negative).
 */
struct JumpAtom {
    double time = 0.0;        // refined onset instant
    double magnitude = 0.0;   // > 0
    double mass = 0.0;        // = -magnitude
    double window_lo = 0.0;   // sample window (window_lo, window_hi] containing the jump
    double window_hi = 0.0;
};

/// Early stop marker for runs that exhaust the feasible domain.
struct Truncation {
    double time = 0.0;
    std::string reason;
};

struct Trajectory {
    SolveMethod method = SolveMethod::penalty;
    double epsilon = 0.0;  // penalty runs
    double step = 0.0;     // projection runs

    std::vector<double> times;      // strictly increasing, starts at 0
    std::vector<double> positions;  // nondecreasing, starts at L0
    std::vector<double> mu;         // penalty: mu_eps(t_i); projection: per-step multiplier

    std::vector<JumpAtom> atoms;    // projection catch-up records; empty for penalty
    std::optional<Truncation> truncation;

    std::size_t size() const { return times.size(); }
};

}  // namespace freefront
