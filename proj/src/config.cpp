#include "harnack/config.hpp"

#include "harnack/operators.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <functional>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace harnack {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::string out = "invalid config:";
    for (const auto& e : errors) out += "\n  " + e;
    return out;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

// Drops a trailing # or ; comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (!quoted && (line[i] == '#' || line[i] == ';')) return line.substr(0, i);
    }
    return line;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last;
}

bool is_quoted(const std::string& v) { return v.size() >= 2 && v.front() == '"' && v.back() == '"'; }

std::string show(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Typed access to raw INI values; problems accumulate instead of throwing.
class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void error(int line, const std::string& msg) { errors_.push_back("line " + std::to_string(line) + ": " + msg); }

    std::optional<double> number(const IniEntry& e) { return number_text(e.value, e.line, e.key); }

    std::optional<int> integer(const IniEntry& e) {
        const auto v = number(e);
        if (!v) return std::nullopt;
        if (*v != std::floor(*v) || std::abs(*v) > 1e9) {
            error(e.line, e.key + " must be an integer (got " + e.value + ")");
            return std::nullopt;
        }
        return static_cast<int>(*v);
    }

    std::optional<std::string> string(const IniEntry& e) {
        if (!is_quoted(e.value)) {
            error(e.line, e.key + " must be a quoted string (got " + e.value + ")");
            return std::nullopt;
        }
        return e.value.substr(1, e.value.size() - 2);
    }

    std::optional<std::string> word(const IniEntry& e) {
        if (is_quoted(e.value)) return e.value.substr(1, e.value.size() - 2);
        if (e.value.empty() || e.value.front() == '[') {
            error(e.line, e.key + " must be a word (got " + e.value + ")");
            return std::nullopt;
        }
        return e.value;
    }

    std::optional<Expression> expression(const IniEntry& e) {
        std::string text;
        if (is_quoted(e.value)) {
            text = e.value.substr(1, e.value.size() - 2);
        } else {
            double v;
            if (!parse_double(e.value, v)) {
                error(e.line, e.key + ": expressions are quoted strings (got " + e.value + ")");
                return std::nullopt;
            }
            text = e.value;
        }
        try {
            return Expression::parse(text);
        } catch (const ExpressionError& ex) {
            error(e.line, e.key + ": " + ex.what());
            return std::nullopt;
        }
    }

    /// Items of a [a, b, ...] list, raw.
    std::optional<std::vector<std::string>> list(const IniEntry& e) {
        const std::string& v = e.value;
        if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
            error(e.line, e.key + " must be a list [a, b, ...] (got " + v + ")");
            return std::nullopt;
        }
        std::vector<std::string> items;
        const std::string inner = trim(std::string_view(v).substr(1, v.size() - 2));
        if (inner.empty()) return items;
        std::string cur;
        bool quoted = false;
        for (char c : inner) {
            if (c == '"') quoted = !quoted;
            if (c == ',' && !quoted) {
                items.push_back(trim(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        items.push_back(trim(cur));
        return items;
    }

    std::optional<std::vector<double>> numbers(const IniEntry& e) {
        const auto items = list(e);
        if (!items) return std::nullopt;
        std::vector<double> out;
        for (const auto& item : *items) {
            const auto v = number_text(item, e.line, e.key);
            if (!v) return std::nullopt;
            out.push_back(*v);
        }
        return out;
    }

    std::optional<Point> point(const IniEntry& e, int dim) {
        const auto v = numbers(e);
        if (!v) return std::nullopt;
        if (static_cast<int>(v->size()) != dim) {
            error(e.line, e.key + " needs " + std::to_string(dim) + " coordinates");
            return std::nullopt;
        }
        return Point{(*v)[0], dim == 2 ? (*v)[1] : 0.0};
    }

private:
    // Plain numbers, or quoted constant expressions such as "2*pi".
    std::optional<double> number_text(const std::string& text, int line, const std::string& key) {
        double v;
        if (parse_double(text, v)) return v;
        if (is_quoted(text)) {
            try {
                const Expression ex = Expression::parse(text.substr(1, text.size() - 2));
                if (!ex.depends_on_space() && !ex.depends_on_time()) {
                    const double c = ex.constant_value();
                    if (std::isfinite(c)) return c;
                }
            } catch (const ExpressionError&) {
            }
        }
        error(line, key + " must be a number (got " + text + ")");
        return std::nullopt;
    }

    std::vector<std::string>& errors_;
};

using Handler = std::function<void(const IniEntry&)>;

void dispatch(Reader& rd, const IniSection& sec, const std::map<std::string, Handler>& handlers) {
    for (const IniEntry& e : sec.entries) {
        const auto it = handlers.find(e.key);
        if (it == handlers.end()) {
            rd.error(e.line, "unknown key '" + e.key + "' in [" + sec.name + "]");
        } else {
            it->second(e);
        }
    }
}

const IniEntry* find(const IniSection& sec, const std::string& key) {
    for (const IniEntry& e : sec.entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

void parse_manifold(Reader& rd, const IniSection& sec, Scenario& s) {
    ManifoldSpec& m = s.manifold;
    bool has_dim = false, has_lengths = false, has_counts = false;
    std::vector<double> lengths;
    std::vector<std::string> length_sources;
    std::vector<int> counts;
    int lengths_line = sec.line, counts_line = sec.line;
    dispatch(rd, sec,
             {{"dim",
               [&](const IniEntry& e) {
                   if (auto v = rd.integer(e)) {
                       if (*v != 1 && *v != 2) {
                           rd.error(e.line, "dim must be 1 or 2 (got " + e.value + ")");
                       } else {
                           m.dim = *v;
                           has_dim = true;
                       }
                   }
               }},
              {"lengths",
               [&](const IniEntry& e) {
                   lengths_line = e.line;
                   const auto items = rd.list(e);
                   if (auto v = rd.numbers(e)) {
                       lengths = *v;
                       length_sources.clear();
                       for (const auto& item : *items) {
                           length_sources.push_back(is_quoted(item) ? item.substr(1, item.size() - 2) : item);
                       }
                       has_lengths = true;
                   }
               }},
              {"counts", [&](const IniEntry& e) {
                   counts_line = e.line;
                   if (auto v = rd.numbers(e)) {
                       counts.clear();
                       for (double c : *v) counts.push_back(static_cast<int>(c));
                       has_counts = true;
                   }
               }}});
    if (!has_dim) rd.error(sec.line, "[manifold] needs dim");
    if (!has_lengths) rd.error(sec.line, "[manifold] needs lengths");
    if (!has_counts) rd.error(sec.line, "[manifold] needs counts");
    if (!has_dim) return;
    if (has_lengths) {
        if (static_cast<int>(lengths.size()) != m.dim) {
            rd.error(lengths_line, "lengths needs " + std::to_string(m.dim) + " entries");
        } else {
            for (int i = 0; i < m.dim; ++i) {
                if (!(lengths[i] > 0.0)) rd.error(lengths_line, "lengths must be positive");
                m.lengths[i] = lengths[i];
                m.length_sources[i] = length_sources[i];
            }
        }
    }
    if (has_counts) {
        if (static_cast<int>(counts.size()) != m.dim) {
            rd.error(counts_line, "counts needs " + std::to_string(m.dim) + " entries");
        } else {
            for (int i = 0; i < m.dim; ++i) {
                if (counts[i] < 4) rd.error(counts_line, "counts must be >= 4 (got " + std::to_string(counts[i]) + ")");
                m.counts[i] = counts[i];
            }
        }
    }
}

void parse_nonlinearity(Reader& rd, const IniSection& sec, Scenario& s) {
    const IniEntry* ce = find(sec, "case");
    if (!ce) {
        rd.error(sec.line, "[nonlinearity] needs case");
        return;
    }
    const auto name = rd.word(*ce);
    if (!name) return;

    std::map<std::string, double> nums;
    std::map<std::string, std::vector<double>> lists;
    std::optional<Expression> source;
    std::map<std::string, Handler> handlers{{"case", [](const IniEntry&) {}}};
    const auto num_key = [&](const std::string& key) {
        handlers[key] = [&, key](const IniEntry& e) {
            if (auto v = rd.number(e)) nums[key] = *v;
        };
    };
    const auto list_key = [&](const std::string& key) {
        handlers[key] = [&, key](const IniEntry& e) {
            if (auto v = rd.numbers(e)) lists[key] = *v;
        };
    };
    std::vector<std::string> required;
    if (*name == "zero") {
    } else if (*name == "power_diff") {
        required = {"a", "b", "p", "q"};
    } else if (*name == "caffarelli_lin") {
        handlers["a_expr"] = [&](const IniEntry& e) { source = rd.expression(e); };
    } else if (*name == "pure_power") {
        required = {"b"};
    } else if (*name == "log_power") {
        required = {"a", "alpha"};
    } else if (*name == "allen_cahn" || *name == "fisher_kpp") {
        required = {"c"};
    } else if (*name == "custom_table") {
        for (const char* k : {"w", "g", "g_prime", "g_second"}) list_key(k);
    } else {
        rd.error(ce->line, "unknown nonlinearity case '" + *name + "' (see list-cases)");
        return;
    }
    for (const auto& k : required) num_key(k);
    dispatch(rd, sec, handlers);

    bool complete = true;
    for (const auto& k : required) {
        if (!nums.count(k)) {
            rd.error(sec.line, *name + " needs " + k);
            complete = false;
        }
    }
    if (!complete) return;

    Nonlinearity nl = nl::Zero{};
    if (*name == "power_diff") {
        nl = nl::PowerDiff{nums["a"], nums["b"], nums["p"], nums["q"]};
    } else if (*name == "caffarelli_lin") {
        if (!source) {
            if (!find(sec, "a_expr")) rd.error(sec.line, "caffarelli_lin needs a_expr");
            return;
        }
        nl = nl::CaffarelliLin{*source};
    } else if (*name == "pure_power") {
        nl = nl::PurePower{nums["b"]};
    } else if (*name == "log_power") {
        nl = nl::LogPower{nums["a"], nums["alpha"]};
    } else if (*name == "allen_cahn") {
        nl = nl::AllenCahn{nums["c"]};
    } else if (*name == "fisher_kpp") {
        nl = nl::FisherKpp{nums["c"]};
    } else if (*name == "custom_table") {
        for (const char* k : {"w", "g", "g_prime"}) {
            if (!lists.count(k)) {
                rd.error(sec.line, std::string("custom_table needs ") + k);
                complete = false;
            }
        }
        if (!complete) return;
        nl = nl::CustomTable{lists["w"], lists["g"], lists["g_prime"], lists["g_second"]};
    }
    try {
        validate(nl);
    } catch (const std::exception& ex) {
        rd.error(sec.line, ex.what());
        return;
    }
    s.nonlinearity = std::move(nl);
}

void parse_solver(Reader& rd, const IniSection& sec, Scenario& s) {
    SolverSpec& sv = s.solver;
    bool has_t_end = false;
    dispatch(rd, sec,
             {{"t_end",
               [&](const IniEntry& e) {
                   if (auto v = rd.number(e)) {
                       sv.t_end = *v;
                       has_t_end = true;
                       if (!(*v > 0.0)) rd.error(e.line, "t_end > 0 required (t_end = " + e.value + ")");
                   }
               }},
              {"safety",
               [&](const IniEntry& e) {
                   if (auto v = rd.number(e)) {
                       sv.safety = *v;
                       if (!(*v > 0.0 && *v <= 1.0)) rd.error(e.line, "0 < safety <= 1 required (safety = " + e.value + ")");
                   }
               }},
              {"snapshot_count",
               [&](const IniEntry& e) {
                   if (auto v = rd.integer(e)) {
                       sv.snapshot_count = *v;
                       if (*v < 2) rd.error(e.line, "snapshot_count >= 2 required");
                   }
               }},
              {"snapshot_times",
               [&](const IniEntry& e) {
                   if (auto v = rd.numbers(e)) {
                       sv.snapshot_times = *v;
                       for (std::size_t i = 1; i < v->size(); ++i) {
                           if (!((*v)[i] > (*v)[i - 1])) {
                               rd.error(e.line, "snapshot_times must be strictly increasing");
                               break;
                           }
                       }
                   }
               }},
              {"seed",
               [&](const IniEntry& e) {
                   if (auto v = rd.integer(e)) {
                       if (*v < 0) rd.error(e.line, "seed must be non-negative");
                       sv.seed = static_cast<std::uint64_t>(*v);
                   }
               }},
              {"dt",
               [&](const IniEntry& e) {
                   if (auto v = rd.number(e)) {
                       sv.dt = *v;
                       if (!(*v > 0.0)) rd.error(e.line, "dt > 0 required (dt = " + e.value + ")");
                   }
               }},
              {"steady_threshold",
               [&](const IniEntry& e) {
                   if (auto v = rd.number(e)) sv.steady_threshold = *v;
               }},
              {"reference", [&](const IniEntry& e) { sv.reference = rd.expression(e); }},
              {"refine", [&](const IniEntry& e) {
                   if (auto v = rd.word(e)) {
                       sv.refine = *v;
                       if (*v != "grid" && *v != "time") rd.error(e.line, "refine must be grid or time (got " + *v + ")");
                   }
               }}});
    if (!has_t_end) rd.error(sec.line, "[solver] needs t_end");
    for (double t : sv.snapshot_times) {
        if (t < 0.0 || t > sv.t_end) {
            rd.error(sec.line, "snapshot time " + show(t) + " outside [0, t_end]");
            break;
        }
    }
}

void parse_check(Reader& rd, const IniSection& sec, const std::string& rest, Scenario& s) {
    CheckSpec c;
    const auto dot = rest.find('.');
    c.name = rest.substr(0, dot);
    c.label = dot == std::string::npos ? "" : rest.substr(dot + 1);
    const auto& names = check_names();
    if (std::find(names.begin(), names.end(), c.name) == names.end()) {
        rd.error(sec.line, "unknown check '" + c.name + "'");
        return;
    }
    EstimateParams& p = c.params;
    const int dim = s.manifold.dim;
    const auto num = [&](double& dst) {
        return [&](const IniEntry& e) {
            if (auto v = rd.number(e)) dst = *v;
        };
    };
    const auto opt = [&](std::optional<double>& dst) {
        return [&](const IniEntry& e) {
            if (auto v = rd.number(e)) dst = *v;
        };
    };
    const auto pt = [&](std::optional<Point>& dst) {
        return [&, dim](const IniEntry& e) {
            if (auto v = rd.point(e, dim)) dst = *v;
        };
    };
    dispatch(rd, sec,
             {{"m", num(p.m)},
              {"alpha", num(p.alpha)},
              {"epsilon", num(p.epsilon)},
              {"beta", num(p.beta)},
              {"delta", num(p.delta)},
              {"c", num(p.c)},
              {"radius", opt(p.radius)},
              {"center", pt(p.center)},
              {"a", opt(p.a_ceiling)},
              {"t_min", opt(p.t_min)},
              {"k", opt(p.k)},
              {"path_policy",
               [&](const IniEntry& e) {
                   if (auto v = rd.word(e)) p.path_policy = *v;
               }},
              {"pairs",
               [&](const IniEntry& e) {
                   if (auto v = rd.integer(e)) p.pairs = *v;
               }},
              {"seed",
               [&](const IniEntry& e) {
                   if (auto v = rd.integer(e)) p.seed = static_cast<std::uint64_t>(*v);
               }},
              {"t_range",
               [&](const IniEntry& e) {
                   if (auto v = rd.numbers(e)) {
                       if (v->size() != 2) {
                           rd.error(e.line, "t_range needs two entries");
                       } else {
                           p.t_range = std::array<double, 2>{(*v)[0], (*v)[1]};
                       }
                   }
               }},
              {"x1", pt(p.x1)},
              {"x2", pt(p.x2)},
              {"t1", opt(p.t1)},
              {"t2", opt(p.t2)},
              {"threshold", num(p.threshold)}});
    if (p.t1.has_value() != p.t2.has_value()) rd.error(sec.line, "t1 and t2 must be given together");
    const std::string where = "[" + sec.name + "]: ";
    for (const auto& msg : validate_params(c.name, p, dim, s.solver.t_end,
                                              dim == 2 ? std::min(s.manifold.lengths[0], s.manifold.lengths[1])
                                                       : s.manifold.lengths[0])) {
        rd.error(sec.line, where + msg);
    }
    s.checks.push_back(std::move(c));
}

// Needs the grid, so it runs after the blocks parsed cleanly.
void validate_fields(Reader& rd, const std::vector<IniSection>& secs, const Scenario& s) {
    const auto line_of = [&](const std::string& name) {
        for (const auto& sec : secs) {
            if (sec.name == name) return sec.line;
        }
        return 0;
    };
    const Grid grid = s.grid();
    try {
        Model model(grid, s.weight, s.potential, s.nonlinearity);
    } catch (const std::exception& ex) {
        rd.error(line_of("weight"), ex.what());
        return;
    }
    if (s.weight.f.depends_on_space()) {
        for (const auto& sec : secs) {
            if (sec.name.rfind("checks.", 0) != 0) continue;
            for (const CheckSpec& c : s.checks) {
                const std::string key = c.label.empty() ? c.name : c.name + "." + c.label;
                const bool uses_m = c.name != "hamilton_bound" && c.name != "hamilton_hessian" &&
                                    c.name != "liouville_assess" && c.name != "hessian_global" &&
                                    c.name != "hessian_local";
                const double m = c.params.m > 0.0 ? c.params.m : grid.dim;
                if (sec.name == "checks." + key && uses_m && m == grid.dim) {
                    rd.error(sec.line, "[" + sec.name + "]: m > n required when f is not constant (m = " + show(m) +
                                           ", n = " + std::to_string(grid.dim) + ")");
                }
            }
        }
    }
    ScalarField w0(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Point x = grid.node(k);
        w0[k] = s.initial.w0.evaluate(x[0], x[1], 0.0);
    }
    const int line = line_of("initial");
    if (!w0.all_finite()) {
        rd.error(line, "initial data is not finite on the grid");
        return;
    }
    const std::size_t kmin = w0.argmin();
    if (w0[kmin] < s.initial.floor) {
        const Point x = grid.node(kmin);
        rd.error(line, "min w0 >= floor required: w0(" + show(x[0]) + ", " + show(x[1]) + ") = " + show(w0[kmin]) +
                           " < " + show(s.initial.floor));
        return;
    }
    if (!std::holds_alternative<nl::CaffarelliLin>(s.nonlinearity)) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            try {
                g_jet(s.nonlinearity, w0[k]);
            } catch (const DomainError& ex) {
                const Point x = grid.node(k);
                rd.error(line, "initial data outside the nonlinearity's range at (" + show(x[0]) + ", " + show(x[1]) +
                                   "): " + ex.what());
                return;
            }
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::vector<IniSection> parse_ini(std::string_view text, std::vector<std::string>& errors) {
    std::vector<IniSection> out;
    std::set<std::string> section_names;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const auto err = [&](const std::string& msg) {
            errors.push_back("line " + std::to_string(line_no) + ": " + msg);
        };
        if (line.front() == '[') {
            if (line.back() != ']') {
                err("malformed section header '" + line + "'");
                continue;
            }
            const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            if (name.empty()) {
                err("empty section name");
                continue;
            }
            if (!section_names.insert(name).second) err("duplicate section [" + name + "]");
            out.push_back({name, line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            err("expected key = value, got '" + line + "'");
            continue;
        }
        if (out.empty()) {
            err("key outside any section");
            continue;
        }
        IniEntry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), line_no};
        if (e.key.empty()) {
            err("empty key");
            continue;
        }
        if (e.value.empty()) {
            err("empty value for '" + e.key + "'");
            continue;
        }
        if (std::any_of(e.key.begin(), e.key.end(), [](char c) { return !(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_'); })) {
            err("keys are lowercase snake case (got '" + e.key + "')");
            continue;
        }
        if (find(out.back(), e.key)) {
            err("duplicate key '" + e.key + "'");
            continue;
        }
        out.back().entries.push_back(std::move(e));
    }
    return out;
}

std::vector<IniSection> parse_ini(std::string_view text) {
    std::vector<std::string> errors;
    std::vector<IniSection> out = parse_ini(text, errors);
    if (!errors.empty()) throw ConfigError(errors);
    return out;
}

Grid Scenario::grid() const {
    return make_torus_grid(manifold.dim, std::span<const double>(manifold.lengths.data(), manifold.dim),
                           std::span<const int>(manifold.counts.data(), manifold.dim));
}

std::vector<double> Scenario::output_times() const {
    if (!solver.snapshot_times.empty()) return solver.snapshot_times;
    std::vector<double> out;
    const int n = solver.snapshot_count;
    for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? solver.t_end : solver.t_end * i / (n - 1));
    return out;
}

Scenario parse_config_text(std::string_view text, const std::string& name) {
    std::vector<std::string> errors;
    const std::vector<IniSection> secs = parse_ini(text, errors);
    Reader rd(errors);
    Scenario s;
    s.name = name;

    const auto section = [&](const std::string& n) -> const IniSection* {
        for (const auto& sec : secs) {
            if (sec.name == n) return &sec;
        }
        return nullptr;
    };
    for (const auto& sec : secs) {
        static const std::set<std::string> known{"manifold", "weight",  "potential", "nonlinearity",
                                                 "initial",  "solver", "tolerances"};
        if (!known.count(sec.name) && sec.name.rfind("checks.", 0) != 0) {
            rd.error(sec.line, "unknown section [" + sec.name + "]");
        }
    }

    // Blocks the check validation depends on come first.
    if (const auto* sec = section("manifold")) {
        parse_manifold(rd, *sec, s);
    } else {
        rd.error(1, "missing [manifold] section");
    }
    if (const auto* sec = section("solver")) {
        parse_solver(rd, *sec, s);
    } else {
        rd.error(1, "missing [solver] section");
    }
    if (const auto* sec = section("weight")) {
        dispatch(rd, *sec, {{"f", [&](const IniEntry& e) {
                                 if (auto v = rd.expression(e)) s.weight.f = *v;
                             }}});
    }
    if (const auto* sec = section("potential")) {
        dispatch(rd, *sec, {{"q", [&](const IniEntry& e) {
                                 if (auto v = rd.expression(e)) s.potential.q = *v;
                             }}});
    }
    if (const auto* sec = section("nonlinearity")) parse_nonlinearity(rd, *sec, s);
    if (const auto* sec = section("initial")) {
        bool has_w0 = false;
        dispatch(rd, *sec,
                 {{"w0",
                   [&](const IniEntry& e) {
                       if (auto v = rd.expression(e)) {
                           s.initial.w0 = *v;
                           has_w0 = true;
                       }
                   }},
                  {"floor", [&](const IniEntry& e) {
                       if (auto v = rd.number(e)) s.initial.floor = *v;
                   }}});
        if (!has_w0 && errors.empty()) rd.error(sec->line, "[initial] needs w0");
    } else {
        rd.error(1, "missing [initial] section");
    }
    if (const auto* sec = section("tolerances")) {
        dispatch(rd, *sec,
                 {{"tau_abs",
                   [&](const IniEntry& e) {
                       if (auto v = rd.number(e)) {
                           s.tolerances.tau_abs = *v;
                           if (*v < 0.0) rd.error(e.line, "tau_abs >= 0 required");
                       }
                   }},
                  {"tau_disc", [&](const IniEntry& e) {
                       if (auto v = rd.number(e)) {
                           s.tolerances.tau_disc = *v;
                           if (*v < 0.0) rd.error(e.line, "tau_disc >= 0 required");
                       }
                   }}});
    }
    const bool blocks_ok = errors.empty();
    for (const auto& sec : secs) {
        if (sec.name.rfind("checks.", 0) == 0) parse_check(rd, sec, sec.name.substr(7), s);
    }
    if (blocks_ok) validate_fields(rd, secs, s);
    if (!errors.empty()) throw ConfigError(errors);
    return s;
}

Scenario parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    if (const auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
    if (const auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    return parse_config_text(buf.str(), stem);
}

namespace {

nlohmann::json nonlinearity_json(const Nonlinearity& n) {
    nlohmann::json j;
    j["case"] = case_name(n);
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, nl::PowerDiff>) {
                j["a"] = c.a;
                j["b"] = c.b;
                j["p"] = c.p;
                j["q"] = c.qe;
            } else if constexpr (std::is_same_v<T, nl::CaffarelliLin>) {
                j["a_expr"] = c.source.normalized();
            } else if constexpr (std::is_same_v<T, nl::PurePower>) {
                j["b"] = c.b;
            } else if constexpr (std::is_same_v<T, nl::LogPower>) {
                j["a"] = c.a;
                j["alpha"] = c.alpha;
            } else if constexpr (std::is_same_v<T, nl::AllenCahn> || std::is_same_v<T, nl::FisherKpp>) {
                j["c"] = c.c;
            } else if constexpr (std::is_same_v<T, nl::CustomTable>) {
                j["w"] = c.w;
                j["g"] = c.g;
                j["g_prime"] = c.dg;
                j["g_second"] = c.d2g;
            }
        },
        n);
    return j;
}

nlohmann::json params_json(const EstimateParams& p) {
    nlohmann::json j;
    j["m"] = p.m;
    j["alpha"] = p.alpha;
    j["epsilon"] = p.epsilon;
    j["beta"] = p.beta;
    j["delta"] = p.delta;
    j["c"] = p.c;
    if (p.radius) j["radius"] = *p.radius;
    if (p.center) j["center"] = *p.center;
    if (p.a_ceiling) j["a"] = *p.a_ceiling;
    if (p.t_min) j["t_min"] = *p.t_min;
    if (p.k) j["k"] = *p.k;
    j["path_policy"] = p.path_policy;
    j["pairs"] = p.pairs;
    j["seed"] = p.seed;
    if (p.t_range) j["t_range"] = *p.t_range;
    if (p.x1) j["x1"] = *p.x1;
    if (p.x2) j["x2"] = *p.x2;
    if (p.t1) j["t1"] = *p.t1;
    if (p.t2) j["t2"] = *p.t2;
    j["threshold"] = p.threshold;
    return j;
}

}  // namespace

std::string normalized_scenario(const Scenario& s) {
    nlohmann::json j;
    const int d = s.manifold.dim;
    j["manifold"] = {{"dim", d},
                     {"lengths", std::vector<double>(s.manifold.lengths.begin(), s.manifold.lengths.begin() + d)},
                     {"counts", std::vector<int>(s.manifold.counts.begin(), s.manifold.counts.begin() + d)}};
    j["weight"] = {{"f", s.weight.f.normalized()}};
    j["potential"] = {{"q", s.potential.q.normalized()}};
    j["nonlinearity"] = nonlinearity_json(s.nonlinearity);
    j["initial"] = {{"w0", s.initial.w0.normalized()}, {"floor", s.initial.floor}};
    nlohmann::json sv;
    sv["t_end"] = s.solver.t_end;
    sv["safety"] = s.solver.safety;
    sv["snapshot_times"] = s.output_times();
    sv["seed"] = s.solver.seed;
    sv["dt"] = s.solver.dt ? nlohmann::json(*s.solver.dt) : nlohmann::json(nullptr);
    sv["steady_threshold"] = s.solver.steady_threshold;
    sv["reference"] = s.solver.reference ? nlohmann::json(s.solver.reference->normalized()) : nlohmann::json(nullptr);
    sv["refine"] = s.solver.refine;
    j["solver"] = sv;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) {
        checks.push_back({{"name", c.name}, {"label", c.label}, {"params", params_json(c.params)}});
    }
    j["checks"] = checks;
    j["tolerances"] = {{"tau_abs", s.tolerances.tau_abs}, {"tau_disc", s.tolerances.tau_disc}};
    return j.dump();
}

std::string scenario_hash(const Scenario& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : normalized_scenario(s)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace harnack
