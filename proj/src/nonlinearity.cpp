#include "harnack/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace harnack {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// base^e restricted to where it is real and finite.
double real_pow(double base, double e, const char* what) {
    const bool integer = std::floor(e) == e;
    if (!integer && base < 0.0) {
        throw DomainError(std::string(what) + ": negative base " + num(base) + " with non-integer exponent " +
                          num(e));
    }
    if (base == 0.0 && e < 0.0) {
        throw DomainError(std::string(what) + ": zero base with negative exponent " + num(e));
    }
    return std::pow(base, e);
}

void require_positive(double w, const char* what) {
    if (!(w > 0.0)) throw DomainError(std::string(what) + ": requires w > 0, got " + num(w));
}

void require_unit_interval(double w, const char* what) {
    if (!(w > 0.0 && w < 1.0)) throw DomainError(std::string(what) + ": requires 0 < w < 1, got " + num(w));
}

GJet power_diff_jet(const nl::PowerDiff& c, double w) {
    require_positive(w, "power_diff");
    const double wp = std::pow(w, c.p);
    const double wq = std::pow(w, c.qe);
    GJet j;
    j.g = c.a * wp - c.b * wq;
    j.dg = c.a * c.p * wp / w - c.b * c.qe * wq / w;
    j.d2g = c.a * c.p * (c.p - 1.0) * wp / (w * w) - c.b * c.qe * (c.qe - 1.0) * wq / (w * w);
    return j;
}

GJet log_power_jet(const nl::LogPower& c, double w) {
    require_positive(w, "log_power");
    const double l = std::log(w);
    GJet j;
    j.g = c.a * w * real_pow(l, c.alpha, "log_power G");
    j.dg = c.a * real_pow(l, c.alpha, "log_power G'");
    if (c.alpha != 0.0) j.dg += c.a * c.alpha * real_pow(l, c.alpha - 1.0, "log_power G'");
    if (c.alpha != 0.0) {
        j.d2g = c.a * c.alpha * real_pow(l, c.alpha - 1.0, "log_power G''") / w;
        if (c.alpha != 1.0) j.d2g += c.a * c.alpha * (c.alpha - 1.0) * real_pow(l, c.alpha - 2.0, "log_power G''") / w;
    }
    return j;
}

GJet table_jet(const nl::CustomTable& t, double w) {
    if (!(w >= t.w.front() && w <= t.w.back())) {
        throw DomainError("custom_table: w = " + num(w) + " outside table range [" + num(t.w.front()) + ", " +
                          num(t.w.back()) + "]");
    }
    auto it = std::upper_bound(t.w.begin(), t.w.end(), w);
    std::size_t i = static_cast<std::size_t>(std::distance(t.w.begin(), it));
    i = std::clamp<std::size_t>(i, 1, t.w.size() - 1) - 1;
    const double h = t.w[i + 1] - t.w[i];
    const double s = (w - t.w[i]) / h;
    const double y0 = t.g[i], y1 = t.g[i + 1];
    const double m0 = t.dg[i] * h, m1 = t.dg[i + 1] * h;
    const double s2 = s * s, s3 = s2 * s;
    GJet j;
    j.g = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
    j.dg = ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * m1) / h;
    j.d2g = ((12 * s - 6) * y0 + (6 * s - 4) * m0 + (-12 * s + 6) * y1 + (6 * s - 2) * m1) / (h * h);
    return j;
}

}  // namespace

std::string case_name(const Nonlinearity& n) {
    return std::visit(overloaded{
                          [](const nl::Zero&) { return std::string("zero"); },
                          [](const nl::PowerDiff&) { return std::string("power_diff"); },
                          [](const nl::CaffarelliLin&) { return std::string("caffarelli_lin"); },
                          [](const nl::PurePower&) { return std::string("pure_power"); },
                          [](const nl::LogPower&) { return std::string("log_power"); },
                          [](const nl::AllenCahn&) { return std::string("allen_cahn"); },
                          [](const nl::FisherKpp&) { return std::string("fisher_kpp"); },
                          [](const nl::CustomTable&) { return std::string("custom_table"); },
                      },
                      n);
}

void validate(const Nonlinearity& n) {
    const auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    std::visit(overloaded{
                   [](const nl::Zero&) {},
                   [&](const nl::PowerDiff& c) {
                       if (!(c.a > 0.0)) fail("power_diff: a > 0 required (a = " + num(c.a) + ")");
                       if (!(c.b > 0.0)) fail("power_diff: b > 0 required (b = " + num(c.b) + ")");
                       if (!(c.p >= 1.0)) fail("power_diff: p >= 1 required (p = " + num(c.p) + ")");
                       if (!(c.qe > c.p)) fail("power_diff: q > p required (q = " + num(c.qe) + ", p = " + num(c.p) + ")");
                   },
                   [](const nl::CaffarelliLin&) {},
                   [&](const nl::PurePower& c) {
                       if (!(c.b > 1.0)) fail("pure_power: b > 1 required (b = " + num(c.b) + ")");
                   },
                   [&](const nl::LogPower& c) {
                       if (!std::isfinite(c.a) || !std::isfinite(c.alpha)) fail("log_power: a and alpha must be finite");
                   },
                   [&](const nl::AllenCahn& c) {
                       if (!(c.c > 0.0)) fail("allen_cahn: c > 0 required (c = " + num(c.c) + ")");
                   },
                   [&](const nl::FisherKpp& c) {
                       if (!(c.c > 0.0)) fail("fisher_kpp: c > 0 required (c = " + num(c.c) + ")");
                   },
                   [&](const nl::CustomTable& t) {
                       if (t.w.size() < 2) fail("custom_table: at least two samples required");
                       if (t.g.size() != t.w.size() || t.dg.size() != t.w.size()) {
                           fail("custom_table: w, g and g_prime must have equal length");
                       }
                       if (!t.d2g.empty() && t.d2g.size() != t.w.size()) {
                           fail("custom_table: g_second must match the length of w");
                       }
                       for (std::size_t i = 1; i < t.w.size(); ++i) {
                           if (!(t.w[i] > t.w[i - 1])) fail("custom_table: w samples must be strictly increasing");
                       }
                       for (const auto* col : {&t.w, &t.g, &t.dg, &t.d2g}) {
                           for (double v : *col) {
                               if (!std::isfinite(v)) fail("custom_table: samples must be finite");
                           }
                       }
                   },
               },
               n);
}

GJet g_jet(const Nonlinearity& n, double w, const SourceTerms& s) {
    return std::visit(overloaded{
                          [&](const nl::Zero&) {
                              require_positive(w, "zero");
                              return GJet{};
                          },
                          [&](const nl::PowerDiff& c) { return power_diff_jet(c, w); },
                          [&](const nl::CaffarelliLin&) {
                              require_positive(w, "caffarelli_lin");
                              return GJet{s.lambda * w + s.source, s.lambda, 0.0};
                          },
                          [&](const nl::PurePower& c) {
                              require_positive(w, "pure_power");
                              const double wb = std::pow(w, c.b);
                              return GJet{wb, c.b * wb / w, c.b * (c.b - 1.0) * wb / (w * w)};
                          },
                          [&](const nl::LogPower& c) { return log_power_jet(c, w); },
                          [&](const nl::AllenCahn& c) {
                              require_unit_interval(w, "allen_cahn");
                              return GJet{c.c * w * (1.0 - w * w), c.c * (1.0 - 3.0 * w * w), -6.0 * c.c * w};
                          },
                          [&](const nl::FisherKpp& c) {
                              require_unit_interval(w, "fisher_kpp");
                              return GJet{c.c * w * (1.0 - w), c.c * (1.0 - 2.0 * w), -2.0 * c.c};
                          },
                          [&](const nl::CustomTable& t) { return table_jet(t, w); },
                      },
                      n);
}

double g_eval(const Nonlinearity& n, double w, const SourceTerms& s) { return g_jet(n, w, s).g; }

double g_prime(const Nonlinearity& n, double w, const SourceTerms& s) { return g_jet(n, w, s).dg; }

double g_tilde(const Nonlinearity& n, double w, const SourceTerms& s) {
    require_positive(w, "g_tilde");
    return g_jet(n, w, s).g / w;
}

double g_tilde_prime_w(const Nonlinearity& n, double w, const SourceTerms& s) {
    require_positive(w, "g_tilde");
    const GJet j = g_jet(n, w, s);
    return j.dg / w - j.g / (w * w);
}

double g_tilde_second_w(const Nonlinearity& n, double w, const SourceTerms& s) {
    require_positive(w, "g_tilde");
    const GJet j = g_jet(n, w, s);
    return j.d2g / w - 2.0 * j.dg / (w * w) + 2.0 * j.g / (w * w * w);
}

std::optional<AnalyticBounds> analytic_bounds(const Nonlinearity& n) {
    if (std::holds_alternative<nl::Zero>(n)) return AnalyticBounds{0.0, 0.0};
    if (const auto* f = std::get_if<nl::FisherKpp>(&n)) return AnalyticBounds{f->c, f->c};
    if (const auto* a = std::get_if<nl::AllenCahn>(&n)) return AnalyticBounds{a->c, 2.0 * a->c};
    return std::nullopt;
}

std::vector<CatalogEntry> catalog() {
    return {
        {"zero", "G(w) = 0", "", "none"},
        {"power_diff", "G(w) = a w^p - b w^q", "a, b, p, q", "a > 0, b > 0, q > p >= 1"},
        {"caffarelli_lin", "G(w) = lambda(t) w + A(x,t), lambda = -int (w Lap w + w A) dx", "a_expr",
         "A is an expression over (x, y, t)"},
        {"pure_power", "G(w) = |w|^(b-1) w", "b", "b > 1"},
        {"log_power", "G(w) = a w (log w)^alpha", "a, alpha",
         "w > 1 when alpha is not an integer; w bounded away from 1 when alpha < 2"},
        {"allen_cahn", "G(w) = c w (1 - w^2)", "c", "c > 0, 0 < w < 1"},
        {"fisher_kpp", "G(w) = c w (1 - w)", "c", "c > 0, 0 < w < 1"},
        {"custom_table", "cubic Hermite interpolant of tabulated (w, G, G')", "w, g, g_prime[, g_second]",
         "strictly increasing w; evaluation inside the table range"},
    };
}

}  // namespace harnack
