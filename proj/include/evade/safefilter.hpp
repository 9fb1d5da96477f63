#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "evade/dynamics.hpp"
#include "evade/geometry.hpp"
#include "evade/shield.hpp"

namespace evade {

struct FilterResult {
    EvaderAction safe_action;
    bool corrected = false;
    double deviation = 0.0; // angular distance nominal -> safe [rad]
    bool feasible = true;
    double margin = 0.0; // min over constraints of c.u_safe + d [m/s]
};

namespace detail {

inline constexpr double kMarginTol = 1e-9;

inline double constraint_margin(const BarrierConstraint& k, double speed, double theta) {
    return speed * (k.c.x * std::cos(theta) + k.c.y * std::sin(theta)) + k.d;
}

inline double min_margin(const std::vector<BarrierConstraint>& ks, double speed, double theta) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& k : ks) m = std::min(m, constraint_margin(k, speed, theta));
    return m;
}

struct Candidate {
    double theta = 0.0;
    double dist = 0.0;
    double signed_delta = 0.0;
};

/// Preference order: smaller distance to the nominal heading, ties broken
/// toward the counterclockwise side.
inline bool closer(const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.signed_delta > b.signed_delta;
}

} // namespace detail

/// Returns the heading closest to the nominal one whose velocity on the speed
/// circle satisfies every constraint. Each half-plane c.u + d >= 0 meets the
/// circle in the arc cos(theta - phi) >= -d/speed around phi = atan2(c); the
/// optimum is the nominal heading when it is feasible and otherwise an arc
/// endpoint. With an empty intersection the filter falls back to the heading
/// maximizing the worst constraint margin, attained at a constraint peak or a
/// pairwise crossing.
inline FilterResult filter_action(const EvaderAction& nominal,
                                  const std::vector<BarrierConstraint>& constraints,
                                  double speed) {
    if (!(speed > 0.0)) throw std::invalid_argument("filter speed must be > 0");
    if (!std::isfinite(nominal.heading)) {
        throw std::invalid_argument("non-finite nominal heading");
    }
    for (const auto& k : constraints) {
        if (!std::isfinite(k.c.x) || !std::isfinite(k.c.y) || !std::isfinite(k.d)) {
            throw std::invalid_argument("non-finite barrier constraint");
        }
        if (std::abs(norm(k.c) - 1.0) > 1e-6) {
            throw std::invalid_argument("barrier constraint direction is not unit length");
        }
    }

    const double nom = wrap_angle(nominal.heading);
    if (constraints.empty()) {
        return {EvaderAction{nom}, false, 0.0, true, std::numeric_limits<double>::infinity()};
    }

    const double nominal_margin = detail::min_margin(constraints, speed, nom);
    if (nominal_margin >= 0.0) {
        return {EvaderAction{nom}, false, 0.0, true, nominal_margin};
    }

    auto make_candidate = [&](double theta) {
        detail::Candidate c;
        c.theta = wrap_angle(theta);
        c.signed_delta = wrap_angle(theta - nom);
        c.dist = std::abs(c.signed_delta);
        return c;
    };

    // Arc endpoints of every constraint that does not cover the full circle.
    bool have_best = false;
    detail::Candidate best;
    for (const auto& k : constraints) {
        const double m = -k.d / speed;
        if (m <= -1.0) continue; // satisfied everywhere
        if (m > 1.0) continue;   // satisfiable nowhere; handled by the fallback
        const double half_width = std::acos(std::clamp(m, -1.0, 1.0));
        const double phi = std::atan2(k.c.y, k.c.x);
        for (double theta : {phi - half_width, phi + half_width}) {
            const auto cand = make_candidate(theta);
            if (detail::min_margin(constraints, speed, cand.theta) < -detail::kMarginTol) continue;
            if (!have_best || detail::closer(cand, best)) {
                best = cand;
                have_best = true;
            }
        }
    }
    if (have_best) {
        return {EvaderAction{best.theta}, best.dist > 0.0, best.dist, true,
                detail::min_margin(constraints, speed, best.theta)};
    }

    // Empty intersection: maximize the worst margin over peaks and crossings.
    std::vector<double> fallback;
    for (const auto& k : constraints) fallback.push_back(std::atan2(k.c.y, k.c.x));
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const double phi_i = std::atan2(constraints[i].c.y, constraints[i].c.x);
        for (std::size_t j = i + 1; j < constraints.size(); ++j) {
            const double phi_j = std::atan2(constraints[j].c.y, constraints[j].c.x);
            const double s = std::sin(0.5 * (phi_j - phi_i));
            if (std::abs(s) < 1e-12) continue; // same direction: no crossing
            const double rhs = (constraints[i].d - constraints[j].d) / (2.0 * speed * s);
            if (std::abs(rhs) > 1.0) continue;
            const double mid = 0.5 * (phi_i + phi_j);
            const double base = std::asin(rhs);
            fallback.push_back(mid + base);
            fallback.push_back(mid + kPi - base);
        }
    }
    detail::Candidate least;
    double least_margin = -std::numeric_limits<double>::infinity();
    bool have_least = false;
    for (double theta : fallback) {
        const auto cand = make_candidate(theta);
        const double margin = detail::min_margin(constraints, speed, cand.theta);
        if (!have_least || margin > least_margin ||
            (margin == least_margin && detail::closer(cand, least))) {
            least = cand;
            least_margin = margin;
            have_least = true;
        }
    }
    return {EvaderAction{least.theta}, least.dist > 0.0, least.dist, false, least_margin};
}

} // namespace evade
