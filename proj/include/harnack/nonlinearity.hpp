#pragma once

#include "harnack/expression.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace harnack {

/// A value of w outside the admissible range of a nonlinearity.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace nl {

struct Zero {};

/// G(w) = a w^p - b w^qe, a, b > 0, qe > p >= 1.
struct PowerDiff {
    double a, b, p, qe;
};

/// G(w) = lambda(t) w + A(x, t) with lambda(t) = -int (w Lap w + w A) dmu.
struct CaffarelliLin {
    Expression source;
};

/// G(w) = |w|^{b-1} w, b > 1.
struct PurePower {
    double b;
};

/// G(w) = a w (log w)^alpha.
struct LogPower {
    double a, alpha;
};

/// G(w) = c w (1 - w^2), c > 0, 0 < w < 1.
struct AllenCahn {
    double c;
};

/// G(w) = c w (1 - w), c > 0, 0 < w < 1.
struct FisherKpp {
    double c;
};

/// Tabulated (w, G, G', G'') with strictly increasing w. G is the cubic Hermite
/// interpolant of (G, G'); G' and G'' are its exact derivatives.
struct CustomTable {
    std::vector<double> w, g, dg, d2g;
};

}  // namespace nl

using Nonlinearity =
    std::variant<nl::Zero, nl::PowerDiff, nl::CaffarelliLin, nl::PurePower, nl::LogPower, nl::AllenCahn,
                 nl::FisherKpp, nl::CustomTable>;

/// Values of the spatially varying pieces of a nonlinearity at one point. Only
/// the Caffarelli-Lin case uses them.
struct SourceTerms {
    double lambda = 0.0;
    double source = 0.0;
};

/// G and its first two w-derivatives at a point.
struct GJet {
    double g = 0.0;
    double dg = 0.0;
    double d2g = 0.0;
};

std::string case_name(const Nonlinearity& n);

/// Throws std::invalid_argument when a parameter constraint is violated.
void validate(const Nonlinearity& n);

/// Throws DomainError when w is outside the case's admissible range.
GJet g_jet(const Nonlinearity& n, double w, const SourceTerms& s = {});

double g_eval(const Nonlinearity& n, double w, const SourceTerms& s = {});
double g_prime(const Nonlinearity& n, double w, const SourceTerms& s = {});

/// G~ = G(w) / w (equivalently e^{-u} G(e^u) with u = log w).
double g_tilde(const Nonlinearity& n, double w, const SourceTerms& s = {});
/// d G~ / dw = G'(w)/w - G(w)/w^2.
double g_tilde_prime_w(const Nonlinearity& n, double w, const SourceTerms& s = {});
/// d^2 G~ / dw^2 = G''/w - 2G'/w^2 + 2G/w^3.
double g_tilde_second_w(const Nonlinearity& n, double w, const SourceTerms& s = {});

/// Analytic supremum of |G(w)|/w and |G'(w)| over the case's whole admissible
/// range, when one exists (Fisher-KPP and Allen-Cahn on (0, 1), zero case).
struct AnalyticBounds {
    double g_over_w;
    double g_prime;
};
std::optional<AnalyticBounds> analytic_bounds(const Nonlinearity& n);

struct CatalogEntry {
    std::string name;
    std::string formula;
    std::string parameters;
    std::string constraints;
};
std::vector<CatalogEntry> catalog();

}  // namespace harnack
