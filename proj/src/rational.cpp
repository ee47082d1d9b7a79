#include "chainopt/rational.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <stdexcept>

namespace chainopt {

std::int64_t nearest_numerator(double v, std::int64_t denominator) {
    if (denominator < 1) {
        throw std::invalid_argument("denominator must be at least 1");
    }
    const int mode = std::fegetround();
    std::fesetround(FE_TONEAREST);
    double r = std::nearbyint(v * static_cast<double>(denominator));
    std::fesetround(mode);
    return static_cast<std::int64_t>(r);
}

double RationalApprox::max_value_error() const {
    double m = 0.0;
    for (double e : eps) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

namespace {

RationalApprox approx_values(const ProblemInstance& instance, int R, int R_bar) {
    if (R < 1 || R_bar < 1) {
        throw std::invalid_argument("rational denominators must be at least 1");
    }
    RationalApprox ra;
    ra.R = R;
    ra.R_bar = R_bar;
    const std::size_t n = instance.part_count();
    ra.P.resize(n);
    ra.eps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = instance.relative_value(i);
        ra.P[i] = nearest_numerator(v, R);
        ra.eps[i] = v - static_cast<double>(ra.P[i]) / R;
    }
    return ra;
}

std::int64_t clamp_share(std::int64_t p_bar, int R_bar) {
    const std::int64_t lo = (R_bar + 1) / 2;
    return std::clamp<std::int64_t>(p_bar, lo, R_bar);
}

}  // namespace

RationalApprox rational_approx(const ProblemInstance& instance, int R, int R_bar) {
    RationalApprox ra = approx_values(instance, R, R_bar);
    const std::size_t n = instance.part_count();
    ra.P_bar.resize(n);
    ra.eps_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = instance.part(i).alpha;
        ra.P_bar[i] = clamp_share(nearest_numerator(a, R_bar), R_bar);
        ra.eps_bar[i] = a - static_cast<double>(ra.P_bar[i]) / R_bar;
    }
    return ra;
}

RationalApprox rational_approx_fixed_share(const ProblemInstance& instance, int R, int R_bar, std::int64_t P_bar) {
    if (2 * P_bar < R_bar || P_bar > R_bar) {
        throw std::invalid_argument("share numerator must represent a share in [0.5, 1]");
    }
    RationalApprox ra = approx_values(instance, R, R_bar);
    const std::size_t n = instance.part_count();
    ra.P_bar.assign(n, P_bar);
    ra.eps_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ra.eps_bar[i] = instance.part(i).alpha - static_cast<double>(P_bar) / R_bar;
    }
    return ra;
}

}  // namespace chainopt
