#include "gcas/cli.hpp"

#include "gcas/fresnel2d.hpp"
#include "gcas/graphene_response.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace gcas::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(where + "." + key + ": out of range");
    return static_cast<int>(x);
}

std::string string(const json& obj, const char* key, const std::string& where) {
    const auto& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

Format parse_format(const std::string& s) {
    if (s == "csv") return Format::Csv;
    if (s == "json") return Format::Json;
    throw ConfigError("format must be 'csv' or 'json', got '" + s + "'");
}

void emit_diagnostic(const nlohmann::ordered_json& j) { std::cerr << j.dump() << '\n'; }

void emit_error(int code, const std::string& message) {
    emit_diagnostic({{"level", "error"}, {"exit_code", code}, {"message", message}});
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(std::move(cur));
    return cells;
}

double parse_double(const std::string& s) {
    if (s.empty()) return kNaN;
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("malformed number '" + s + "'");
    return x;
}

Cell value_or_empty(double x, bool present) { return present ? Cell{x} : Cell{}; }

std::string status_of(const SweepRow& r) {
    if (!r.ok) return "failed: " + r.error;
    return r.breakdown.converged() ? "ok" : "unconverged";
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string nm(double a) { return fmt("%.0f nm", a * 1e9); }

const SweepRecord* find_row(const std::vector<SweepRecord>& rows, double a) {
    for (const auto& r : rows)
        if (std::abs(r.a_m - a) <= 1e-9 * a) return &r;
    return nullptr;
}

}  // namespace

// ---------------------------------------------------------------- configuration

void RunConfig::validate() const {
    try {
        params.validate();
        summation.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
    for (std::size_t i = 0; i < separations_m.size(); ++i) {
        if (!(separations_m[i] >= 50e-9)) throw ConfigError("grid: separations must be >= 50 nm");
        if (i > 0 && !(separations_m[i] > separations_m[i - 1]))
            throw ConfigError("grid: separations must be strictly ascending");
    }
    for (const auto& p : points) {
        if (!(p.q_per_m > 0.0) || !std::isfinite(p.q_per_m)) throw ConfigError("points: q_per_m must be > 0");
        if (axis == Axis::Real && !(p.omega_rad_s >= 0.0 && std::isfinite(p.omega_rad_s)))
            throw ConfigError("points: omega_rad_s must be finite and >= 0");
        if (axis == Axis::Imaginary && p.l < 0) throw ConfigError("points: l must be >= 0");
    }
}

RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    try {
        check_keys(doc,
                   {"temperature_K", "separation_m", "material", "summation", "real_frequency", "grid", "axis",
                    "points", "format", "out", "threads"},
                   "config");
        if (doc.contains("temperature_K")) cfg.params.temperature_K = number(doc, "temperature_K", "config");
        if (doc.contains("separation_m")) cfg.params.separation_m = number(doc, "separation_m", "config");
        if (doc.contains("material")) {
            const auto& m = doc.at("material");
            check_keys(m, {"vf_over_c", "alpha"}, "material");
            if (m.contains("vf_over_c")) cfg.params.vf_over_c = number(m, "vf_over_c", "material");
            if (m.contains("alpha")) cfg.params.alpha = number(m, "alpha", "material");
        }
        if (doc.contains("summation")) {
            const auto& s = doc.at("summation");
            check_keys(s, {"rel_tol", "real_freq_rel_tol", "l_max_cap", "q_cutoff_factor", "propagating_cells"},
                       "summation");
            auto& sc = cfg.summation;
            if (s.contains("rel_tol")) sc.rel_tol = number(s, "rel_tol", "summation");
            if (s.contains("real_freq_rel_tol")) sc.real_freq_rel_tol = number(s, "real_freq_rel_tol", "summation");
            if (s.contains("l_max_cap")) sc.l_max_cap = integer(s, "l_max_cap", "summation");
            if (s.contains("q_cutoff_factor")) sc.q_cutoff_factor = number(s, "q_cutoff_factor", "summation");
            if (s.contains("propagating_cells")) sc.propagating_cells = integer(s, "propagating_cells", "summation");
        }
        if (doc.contains("real_frequency")) {
            if (!doc.at("real_frequency").is_boolean()) throw ConfigError("config.real_frequency: expected a boolean");
            cfg.real_frequency = doc.at("real_frequency").get<bool>();
            cfg.real_frequency_set = true;
        }
        if (doc.contains("grid")) {
            const auto& g = doc.at("grid");
            check_keys(g, {"separations_m", "min_m", "max_m", "points"}, "grid");
            cfg.grid_set = true;
            if (g.contains("separations_m")) {
                if (g.contains("min_m") || g.contains("max_m") || g.contains("points"))
                    throw ConfigError("grid: give either separations_m or min_m/max_m/points");
                const auto& list = g.at("separations_m");
                if (!list.is_array()) throw ConfigError("grid.separations_m: expected an array");
                for (const auto& v : list) {
                    if (!v.is_number()) throw ConfigError("grid.separations_m: expected numbers");
                    cfg.separations_m.push_back(v.get<double>());
                }
            } else {
                const double lo = number(g, "min_m", "grid"), hi = number(g, "max_m", "grid");
                const int n = integer(g, "points", "grid");
                if (n < 0 || (n > 1 && !(hi > lo)) || !(lo > 0.0))
                    throw ConfigError("grid: need 0 < min_m < max_m and points >= 0");
                cfg.separations_m = log_grid(lo, hi, n);
            }
        }
        if (doc.contains("axis")) {
            const auto a = string(doc, "axis", "config");
            if (a == "real") cfg.axis = Axis::Real;
            else if (a == "imaginary") cfg.axis = Axis::Imaginary;
            else throw ConfigError("config.axis must be 'real' or 'imaginary'");
        }
        if (doc.contains("points")) {
            const auto& list = doc.at("points");
            if (!list.is_array()) throw ConfigError("config.points: expected an array");
            for (const auto& p : list) {
                check_keys(p, {"q_per_m", "omega_rad_s", "l"}, "points[]");
                GridPoint gp;
                gp.q_per_m = number(p, "q_per_m", "points[]");
                const bool has_w = p.contains("omega_rad_s"), has_l = p.contains("l");
                if (cfg.axis == Axis::Real) {
                    if (!has_w || has_l) throw ConfigError("points[]: real axis needs omega_rad_s and no l");
                    gp.omega_rad_s = number(p, "omega_rad_s", "points[]");
                } else {
                    if (!has_l || has_w) throw ConfigError("points[]: imaginary axis needs l and no omega_rad_s");
                    gp.l = integer(p, "l", "points[]");
                }
                cfg.points.push_back(gp);
            }
        }
        if (doc.contains("format")) cfg.format = parse_format(string(doc, "format", "config"));
        if (doc.contains("out")) cfg.out = string(doc, "out", "config");
        if (doc.contains("threads")) cfg.threads = integer(doc, "threads", "config");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g;
    if (n <= 0) return g;
    if (n == 1) return {lo};
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) g.push_back(i == n - 1 ? hi : lo * std::exp(step * i));
    return g;
}

std::vector<double> default_grid() { return log_grid(200e-9, 4e-6, 25); }

std::vector<double> acceptance_grid() {
    auto g = default_grid();
    g.push_back(2e-6);
    std::sort(g.begin(), g.end());
    return g;
}

// ---------------------------------------------------------------- output

std::string format_number(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

void write_table(std::ostream& os, const Table& t, Format f) {
    if (f == Format::Csv) {
        os << "# schema=" << t.name << " version=" << kSchemaVersion << '\n';
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                std::visit(
                    [&](const auto& v) {
                        using V = std::decay_t<decltype(v)>;
                        if constexpr (std::is_same_v<V, double>) os << format_number(v);
                        else if constexpr (std::is_same_v<V, long long>) os << v;
                        else if constexpr (std::is_same_v<V, std::string>) os << csv_escape(v);
                    },
                    row[i]);
            }
            os << '\n';
        }
        return;
    }
    using ojson = nlohmann::ordered_json;
    ojson rows = ojson::array();
    for (const auto& row : t.rows) {
        ojson obj = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, std::monostate>) obj[t.columns[i]] = nullptr;
                    else obj[t.columns[i]] = v;
                },
                row[i]);
        }
        rows.push_back(std::move(obj));
    }
    const ojson doc{{"schema", t.name}, {"version", kSchemaVersion}, {"columns", t.columns}, {"rows", rows}};
    os << doc.dump(1) << '\n';
}

// ---------------------------------------------------------------- commands

Table permittivity_table(const RunConfig& cfg, bool& all_converged) {
    Table t{"permittivity",
            {"axis", "q_per_m", "omega_or_xi_rad_s", "l", "region", "re_eps_L", "im_eps_L", "re_eps_Tr", "im_eps_Tr",
             "err_est"},
            {}};
    all_converged = true;
    const double T = cfg.params.temperature_K;
    for (const auto& gp : cfg.points) {
        std::vector<Cell> row;
        PermittivityPair e;
        if (cfg.axis == Axis::Real) {
            const SpectralPoint p{gp.q_per_m, gp.omega_rad_s};
            e = eps_real_axis(p, T, cfg.params);
            row = {std::string("real"), gp.q_per_m, gp.omega_rad_s, Cell{},
                   std::string(to_string(classify_region(p, cfg.params)))};
        } else {
            const auto m = MatsubaraPoint::make(gp.q_per_m, gp.l, T);
            e = eps_imag_axis(m, T, cfg.params);
            row = {std::string("imaginary"), gp.q_per_m, m.xi, static_cast<long long>(gp.l), std::string("imaginary")};
        }
        all_converged = all_converged && e.converged;
        row.insert(row.end(), {e.eps_L.real(), e.eps_L.imag(), e.eps_Tr.real(), e.eps_Tr.imag(), e.error_estimate});
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table reflection_table(const RunConfig& cfg, bool& all_converged) {
    Table t{"reflection",
            {"axis", "q_per_m", "omega_or_xi_rad_s", "l", "region", "re_r_TM", "im_r_TM", "re_r_TE", "im_r_TE"},
            {}};
    all_converged = true;
    const double T = cfg.params.temperature_K;
    for (const auto& gp : cfg.points) {
        std::vector<Cell> row;
        ReflectionPair r;
        if (cfg.axis == Axis::Real) {
            const SpectralPoint p{gp.q_per_m, gp.omega_rad_s};
            const auto e = eps_real_axis(p, T, cfg.params);
            all_converged = all_converged && e.converged;
            r = r_pair_real(p, e);
            row = {std::string("real"), gp.q_per_m, gp.omega_rad_s, Cell{},
                   std::string(to_string(classify_region(p, cfg.params)))};
        } else {
            const auto m = MatsubaraPoint::make(gp.q_per_m, gp.l, T);
            const auto e = eps_imag_axis(m, T, cfg.params);
            all_converged = all_converged && e.converged;
            r = r_pair_imag(m, e);
            row = {std::string("imaginary"), gp.q_per_m, m.xi, static_cast<long long>(gp.l), std::string("imaginary")};
        }
        row.insert(row.end(), {r.r_TM.real(), r.r_TM.imag(), r.r_TE.real(), r.r_TE.imag()});
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table pressure_table(const RunConfig& cfg, bool split, bool& converged) {
    const bool real_freq = split || cfg.real_frequency;
    const auto b = compute_breakdown(cfg.params, cfg.summation, real_freq);
    converged = b.converged();
    PressureValue direct;
    if (split) {
        direct = pressure_propagating_direct(cfg.params, Polarization::TM, cfg.summation);
        converged = converged && direct.converged;
    }
    const auto& s = cfg.summation;
    Table t{split ? "pressure-split" : "pressure",
            {"a_m", "T_K", "P_TM_Pa", "P_TM_err_Pa", "P_TE_Pa", "P_TE_err_Pa", "P_total_Pa", "P_IM_Pa",
             "P_TM_over_P_TE", "P_TM_over_P_total", "P_total_over_P_IM", "matsubara_terms_TM", "matsubara_terms_TE",
             "P_TM_evan_Pa", "P_TM_evan_err_Pa", "P_TM_evan_plasmonic_Pa", "P_TM_evan_deep_Pa", "P_TM_prop_Pa",
             "P_TM_prop_err_Pa", "P_TM_prop_direct_Pa", "P_TM_prop_direct_err_Pa", "rel_tol", "real_freq_rel_tol",
             "q_cutoff_factor", "l_max_cap", "propagating_cells", "converged", "warning"},
            {}};
    t.rows.push_back({b.separation_m,
                      b.temperature_K,
                      b.P_TM.value,
                      b.P_TM.error,
                      b.P_TE.value,
                      b.P_TE.error,
                      b.P_total.value,
                      b.P_IM,
                      b.ratio_TM_TE(),
                      b.ratio_TM_total(),
                      b.ratio_total_IM(),
                      static_cast<long long>(b.matsubara_terms_TM),
                      static_cast<long long>(b.matsubara_terms_TE),
                      value_or_empty(b.P_TM_evan.value, real_freq),
                      value_or_empty(b.P_TM_evan.error, real_freq),
                      value_or_empty(b.P_TM_evan_plasmonic.value, real_freq),
                      value_or_empty(b.P_TM_evan_deep.value, real_freq),
                      value_or_empty(b.P_TM_prop.value, real_freq),
                      value_or_empty(b.P_TM_prop.error, real_freq),
                      value_or_empty(direct.value, split),
                      value_or_empty(direct.error, split),
                      s.rel_tol,
                      s.real_freq_rel_tol,
                      s.q_cutoff_factor,
                      static_cast<long long>(s.l_max_cap),
                      static_cast<long long>(s.propagating_cells),
                      std::string(converged ? "true" : "false"),
                      cfg.params.dirac_model_warning()});
    return t;
}

Table sweep_table(const std::vector<SweepRow>& rows, bool with_real_frequency) {
    Table t{"sweep",
            {"a_m", "P_TM_Pa", "P_TE_Pa", "P_total_Pa", "P_IM_Pa", "P_TM_evan_Pa", "P_TM_prop_Pa",
             "P_TM_evan_plasmonic_Pa", "P_TM_evan_deep_Pa", "P_TM_over_P_IM", "P_TM_evan_over_P_IM",
             "P_TM_prop_over_P_IM", "P_TM_over_P_TE", "P_TM_over_P_total", "P_TM_err_Pa", "P_TE_err_Pa",
             "P_TM_evan_err_Pa", "P_TM_prop_err_Pa", "status"},
            {}};
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        const bool ok = r.ok, rf = r.ok && with_real_frequency;
        t.rows.push_back({r.separation_m,
                          value_or_empty(b.P_TM.value, ok),
                          value_or_empty(b.P_TE.value, ok),
                          value_or_empty(b.P_total.value, ok),
                          value_or_empty(b.P_IM, ok),
                          value_or_empty(b.P_TM_evan.value, rf),
                          value_or_empty(b.P_TM_prop.value, rf),
                          value_or_empty(b.P_TM_evan_plasmonic.value, rf),
                          value_or_empty(b.P_TM_evan_deep.value, rf),
                          value_or_empty(b.P_TM.value / b.P_IM, ok),
                          value_or_empty(b.P_TM_evan.value / b.P_IM, rf),
                          value_or_empty(b.P_TM_prop.value / b.P_IM, rf),
                          value_or_empty(b.ratio_TM_TE(), ok),
                          value_or_empty(b.ratio_TM_total(), ok),
                          value_or_empty(b.P_TM.error, ok),
                          value_or_empty(b.P_TE.error, ok),
                          value_or_empty(b.P_TM_evan.error, rf),
                          value_or_empty(b.P_TM_prop.error, rf),
                          status_of(r)});
    }
    return t;
}

// ---------------------------------------------------------------- criteria

std::vector<SweepRecord> parse_sweep_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "# schema=sweep version=" + std::to_string(kSchemaVersion))
        throw ConfigError("sweep CSV: missing or unsupported schema line");
    if (!std::getline(is, line)) throw ConfigError("sweep CSV: missing header");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    auto index = [&](const char* name) {
        const auto it = col.find(name);
        if (it == col.end()) throw ConfigError(std::string("sweep CSV: missing column ") + name);
        return it->second;
    };
    const std::size_t i_a = index("a_m"), i_tm = index("P_TM_Pa"), i_te = index("P_TE_Pa"),
                      i_tot = index("P_total_Pa"), i_im = index("P_IM_Pa"), i_ev = index("P_TM_evan_Pa"),
                      i_pr = index("P_TM_prop_Pa"), i_pre = index("P_TM_prop_err_Pa"),
                      i_pl = index("P_TM_evan_plasmonic_Pa"), i_dp = index("P_TM_evan_deep_Pa"),
                      i_r1 = index("P_TM_over_P_TE"), i_r2 = index("P_TM_over_P_total"), i_st = index("status");
    std::vector<SweepRecord> out;
    while (std::getline(is, line)) {
        const auto c = split_csv_line(line);
        if (c.size() != header.size()) throw ConfigError("sweep CSV: row has the wrong number of cells");
        SweepRecord r;
        r.a_m = parse_double(c[i_a]);
        r.P_TM = parse_double(c[i_tm]);
        r.P_TE = parse_double(c[i_te]);
        r.P_total = parse_double(c[i_tot]);
        r.P_IM = parse_double(c[i_im]);
        r.P_TM_evan = parse_double(c[i_ev]);
        r.P_TM_prop = parse_double(c[i_pr]);
        r.P_TM_prop_err = parse_double(c[i_pre]);
        r.P_TM_evan_plasmonic = parse_double(c[i_pl]);
        r.P_TM_evan_deep = parse_double(c[i_dp]);
        r.ratio_TM_TE = parse_double(c[i_r1]);
        r.ratio_TM_total = parse_double(c[i_r2]);
        r.status = c[i_st];
        if (!out.empty() && !(r.a_m > out.back().a_m)) throw ConfigError("sweep CSV: rows not sorted by a_m");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<Criterion> sweep_criteria(const std::vector<SweepRecord>& rows, double max_point_time_s) {
    struct Ref {
        double a, ratio, fraction, fraction_tol;
    };
    const Ref refs[] = {{200e-9, 1530.0, 0.99935, 1e-4}, {2e-6, 1.92e4, 0.99995, 5e-5}, {4e-6, 1.49e5, 0.999993, 5e-6}};

    Criterion ratio{"ratio", true, ""}, fraction{"fraction", true, ""};
    for (const auto& ref : refs) {
        const auto* r = find_row(rows, ref.a);
        if (!r) {
            ratio.pass = fraction.pass = false;
            ratio.detail += nm(ref.a) + ": missing; ";
            fraction.detail += nm(ref.a) + ": missing; ";
            continue;
        }
        const double dev = r->ratio_TM_TE / ref.ratio - 1.0;
        const bool ok_r = std::abs(dev) <= 0.02;
        ratio.pass = ratio.pass && ok_r;
        ratio.detail += nm(ref.a) + " " + fmt("%.6g", r->ratio_TM_TE) + " vs " + fmt("%.6g", ref.ratio) + " (" +
                        fmt("%+.2f%%", 100.0 * dev) + (ok_r ? ")" : ", outside 2%)") + "; ";
        const double fdev = r->ratio_TM_total - ref.fraction;
        const bool ok_f = std::abs(fdev) <= ref.fraction_tol;
        fraction.pass = fraction.pass && ok_f;
        fraction.detail += nm(ref.a) + " " + fmt("%.8f", r->ratio_TM_total) + " vs " + fmt("%.6f", ref.fraction) +
                           " (" + fmt("%+.1e", fdev) + (ok_f ? ")" : ", outside tolerance)") + "; ";
    }
    const bool fast = max_point_time_s <= 60.0;
    ratio.pass = ratio.pass && fast;
    ratio.detail += "slowest point " + fmt("%.1f s", max_point_time_s) + (fast ? "" : " (over 60 s)");

    Criterion sign{"sign", !rows.empty(), ""};
    int n_tm = 0, n_te = 0, n_ev = 0, n_pl = 0, n_dp = 0;
    for (const auto& r : rows) {
        n_tm += !(r.P_TM < 0.0);
        n_te += !(r.P_TE < 0.0);
        n_ev += !(r.P_TM_evan < 0.0);
        n_pl += !(r.P_TM_evan_plasmonic < 0.0);
        n_dp += !(r.P_TM_evan_deep > 0.0);
    }
    sign.pass = sign.pass && n_tm + n_te + n_ev + n_pl + n_dp == 0;
    sign.detail = "violations over " + std::to_string(rows.size()) + " points: P_TM<0 " + std::to_string(n_tm) +
                  ", P_TE<0 " + std::to_string(n_te) + ", evanescent<0 " + std::to_string(n_ev) + ", plasmonic<0 " +
                  std::to_string(n_pl) + ", deep>0 " + std::to_string(n_dp);

    Criterion decomp{"decomposition", true, ""};
    double min_evan = std::numeric_limits<double>::infinity(), max_prop = -min_evan;
    bool has_large = false, has_short = false, pos = false, neg = false;
    for (const auto& r : rows) {
        if (r.a_m >= 2e-6 * (1.0 - 1e-9)) {
            has_large = true;
            min_evan = std::min(min_evan, r.P_TM_evan / r.P_TM);
        }
        if (r.a_m >= 200e-9 * (1.0 - 1e-9) && r.a_m <= 400e-9 * (1.0 + 1e-9)) {
            has_short = true;
            max_prop = std::max(max_prop, r.P_TM_prop / r.P_TM);
        }
        // A sign only counts when it exceeds the error of the propagating part.
        pos = pos || r.P_TM_prop > r.P_TM_prop_err;
        neg = neg || r.P_TM_prop < -r.P_TM_prop_err;
    }
    const bool ok_e = has_large && min_evan >= 0.9, ok_p = has_short && max_prop >= 0.1, ok_s = pos && neg;
    decomp.pass = ok_e && ok_p && ok_s;
    decomp.detail = "min P_evan/P_TM (a >= 2 um) " + fmt("%.6g", min_evan) + (ok_e ? "" : " FAIL") +
                 "; max P_prop/P_TM (200-400 nm) " + fmt("%.4g", max_prop) + (ok_p ? "" : " FAIL") +
                 "; significant P_prop signs: " + (pos ? "+" : "") + (neg ? "-" : "") + (ok_s ? "" : " FAIL");
    return {ratio, fraction, sign, decomp};
}

EquivalencePoint equivalence_at(double a_m, double temperature_K, const SummationConfig& cfg) {
    PhysicalParams p;
    p.separation_m = a_m;
    p.temperature_K = temperature_K;
    EquivalencePoint e;
    e.a_m = a_m;
    e.matsubara = pressure_matsubara(p, Polarization::TM, cfg);
    e.evanescent = pressure_evanescent(p, Polarization::TM, cfg).total;
    e.direct = pressure_propagating_direct(p, Polarization::TM, cfg);
    e.direct.error = std::max(e.direct.error, 0.01 * std::abs(e.direct.value));
    return e;
}

Criterion equivalence_criterion(const std::vector<EquivalencePoint>& points) {
    Criterion c{"equivalence", !points.empty(), ""};
    for (const auto& e : points) {
        const double diff = e.matsubara.value - (e.evanescent.value + e.direct.value);
        const double budget = 3.0 * (e.matsubara.error + e.evanescent.error + e.direct.error);
        const bool ok = std::abs(diff) <= budget && e.matsubara.converged && e.evanescent.converged;
        c.pass = c.pass && ok;
        c.detail += nm(e.a_m) + ": |diff| " + fmt("%.3e", std::abs(diff)) + " vs 3x errors " + fmt("%.3e", budget) +
                    " (P_prop direct " + fmt("%.4e", e.direct.value) + ")" + (ok ? "" : " FAIL") + "; ";
    }
    return c;
}

// ---------------------------------------------------------------- entry point

namespace {

struct Flags {
    std::string config, out, format, report;
    int threads = 0;
    double tol = 0.0, separation = 0.0, temperature = 0.0;
    bool skip_equivalence = false;
};

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text << std::flush;
        if (!std::cout) throw IoError("failed writing to standard output");
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw IoError("cannot open output file '" + cfg.out + "'");
    f << text;
    f.close();
    if (!f) throw IoError("failed writing '" + cfg.out + "'");
}

std::string render(const Table& t, Format f) {
    std::ostringstream os;
    write_table(os, t, f);
    return os.str();
}

int finish(bool converged, const std::string& what) {
    if (converged) return kExitOk;
    emit_error(kExitNumeric, what + ": not converged");
    return kExitNumeric;
}

int run_reproduce(const RunConfig& cfg, const Flags& flags) {
    const auto rows = sweep(acceptance_grid(), cfg.params.temperature_K, cfg.summation, cfg.threads, true, cfg.params);
    const auto table = sweep_table(rows);
    const std::string csv = render(table, Format::Csv);
    write_output(cfg, cfg.format == Format::Csv ? csv : render(table, cfg.format));

    double slowest = 0.0;
    for (const auto& r : rows) slowest = std::max(slowest, r.wall_time_s);
    std::istringstream is(csv);
    auto criteria = sweep_criteria(parse_sweep_csv(is), slowest);
    if (!flags.skip_equivalence) {
        SummationConfig tight = cfg.summation;
        tight.real_freq_rel_tol = std::min(tight.real_freq_rel_tol, 1e-6);
        std::vector<EquivalencePoint> pts;
        for (double a : {300e-9, 1e-6}) pts.push_back(equivalence_at(a, cfg.params.temperature_K, tight));
        criteria.insert(criteria.begin() + 2, equivalence_criterion(pts));
    }

    json report = json::array();
    for (const auto& c : criteria) {
        std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        report.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    if (!flags.report.empty()) {
        std::ofstream f(flags.report);
        f << json{{"criteria", report}, {"slowest_point_s", slowest}}.dump(1) << '\n';
        if (!f) throw IoError("failed writing '" + flags.report + "'");
    }
    bool all_ok = true;
    for (const auto& r : rows) all_ok = all_ok && r.ok && r.breakdown.converged();
    return finish(all_ok, "reproduce-paper");
}

int dispatch(const std::string& command, RunConfig& cfg, const Flags& flags) {
    const auto start = std::chrono::steady_clock::now();
    int code = kExitOk;
    if (command == "permittivity" || command == "reflection") {
        bool ok = true;
        const auto t = command == "permittivity" ? permittivity_table(cfg, ok) : reflection_table(cfg, ok);
        write_output(cfg, render(t, cfg.format));
        code = finish(ok, command);
    } else if (command == "pressure" || command == "pressure-split") {
        if (auto w = cfg.params.dirac_model_warning(); !w.empty())
            emit_diagnostic({{"level", "warning"}, {"message", w}});
        bool ok = true;
        const auto t = pressure_table(cfg, command == "pressure-split", ok);
        write_output(cfg, render(t, cfg.format));
        code = finish(ok, command);
    } else if (command == "sweep") {
        if (!cfg.real_frequency_set) cfg.real_frequency = true;
        const auto grid = cfg.grid_set ? cfg.separations_m : default_grid();
        const auto rows = sweep(grid, cfg.params.temperature_K, cfg.summation, cfg.threads, cfg.real_frequency,
                                cfg.params);
        write_output(cfg, render(sweep_table(rows, cfg.real_frequency), cfg.format));
        bool ok = true;
        for (const auto& r : rows) {
            ok = ok && r.ok && r.breakdown.converged();
            if (!r.warning.empty())
                emit_diagnostic({{"level", "warning"}, {"a_m", r.separation_m}, {"message", r.warning}});
        }
        code = finish(ok, "sweep");
    } else {
        code = run_reproduce(cfg, flags);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_diagnostic({{"level", "info"}, {"command", command}, {"wall_time_s", wall}});
    return code;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Casimir pressure between two graphene sheets"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags flags;
    app.add_option("--config", flags.config, "JSON configuration file");
    app.add_option("--out", flags.out, "output file (default: standard output)");
    app.add_option("--format", flags.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", flags.tol, "relative tolerance of the Matsubara sums")->check(CLI::PositiveNumber);
    app.add_option("--separation-m", flags.separation, "separation a in metres")->check(CLI::PositiveNumber);
    app.add_option("--temperature-K", flags.temperature, "temperature in kelvin")->check(CLI::PositiveNumber);
    app.add_subcommand("permittivity", "longitudinal and transverse permittivities on a point list");
    app.add_subcommand("reflection", "TM and TE reflection coefficients on a point list");
    app.add_subcommand("pressure", "Matsubara pressure breakdown at one separation");
    app.add_subcommand("pressure-split", "pressure with the evanescent/propagating split and the direct path");
    app.add_subcommand("sweep", "pressure breakdown over a separation grid");
    auto* rep = app.add_subcommand("reproduce-paper", "reference sweep plus a pass/fail table on stderr");
    rep->add_option("--report", flags.report, "also write the pass/fail table as JSON");
    rep->add_flag("--skip-equivalence", flags.skip_equivalence, "skip the slow representation check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);
            return kExitOk;
        }
        emit_error(kExitConfig, e.what());
        return kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = flags.config.empty() ? RunConfig{} : load_config(flags.config);
        if (!flags.out.empty()) cfg.out = flags.out;
        if (!flags.format.empty()) cfg.format = parse_format(flags.format);
        if (flags.threads > 0) cfg.threads = flags.threads;
        if (flags.tol > 0.0) cfg.summation.rel_tol = flags.tol;
        if (flags.separation > 0.0) cfg.params.separation_m = flags.separation;
        if (flags.temperature > 0.0) cfg.params.temperature_K = flags.temperature;
        cfg.validate();
        return dispatch(command, cfg, flags);
    } catch (const ConfigError& e) {
        emit_error(kExitConfig, e.what());
        return kExitConfig;
    } catch (const IoError& e) {
        emit_error(kExitIo, e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        emit_error(kExitConfig, e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        emit_error(kExitNumeric, e.what());
        return kExitNumeric;
    }
}

}  // namespace gcas::cli
