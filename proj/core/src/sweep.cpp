#include "sscat/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace sscat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_number(key, v);
    if (x != std::floor(x)) throw ConfigError("config: '" + key + "' must be integer");
    return int(x);
}

struct KindColumns {
    bool beta = false;   // comb diagnostic
    bool zg = false;     // sphere diagnostics
};

KindColumns kind_columns(ElementKind kind) {
    KindColumns c;
    c.beta = kind == ElementKind::comb;
    c.zg = kind == ElementKind::sphere;
    return c;
}

// Evaluate f(i) for i in [0, n) on `threads` workers; results land in a
// preallocated vector, so the output order never depends on scheduling.
template <class F>
void parallel_for(int n, int threads, F&& f) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

SweepConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        if (!kv.emplace(key, val).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }

    SweepConfig cfg;
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    const auto elem = take("element");
    if (!elem) throw ConfigError("config: missing required key 'element'");
    if (*elem == "loop") cfg.element = ElementKind::loop;
    else if (*elem == "comb") cfg.element = ElementKind::comb;
    else if (*elem == "sphere") cfg.element = ElementKind::sphere;
    else if (*elem == "custom-L") cfg.element = ElementKind::custom_l;
    else throw ConfigError("config: unknown element '" + *elem + "'");

    if (auto v = take("N")) cfg.N = parse_int("N", *v);
    if (auto v = take("ell")) cfg.ell = parse_number("ell", *v);
    if (auto v = take("k_min")) cfg.k_min = parse_number("k_min", *v);
    if (auto v = take("k_max")) cfg.k_max = parse_number("k_max", *v);
    if (auto v = take("k_steps")) cfg.k_steps = parse_int("k_steps", *v);
    if (auto v = take("threads")) cfg.threads = parse_int("threads", *v);
    if (auto v = take("root_tol")) cfg.root_tol = parse_number("root_tol", *v);
    if (auto v = take("series_tol")) cfg.series_tol = parse_number("series_tol", *v);
    if (auto v = take("out")) cfg.out = *v;
    if (auto v = take("format")) {
        if (*v == "csv") cfg.format = OutputFormat::csv;
        else if (*v == "json") cfg.format = OutputFormat::json;
        else throw ConfigError("config: format must be csv or json");
    }

    if (auto v = take("axis2")) {
        if (*v == "none") cfg.axis2 = Axis2::none;
        else if (*v == "Phi") cfg.axis2 = Axis2::flux;
        else if (*v == "b") cfg.axis2 = Axis2::coupling_b;
        else if (*v == "rho") cfg.axis2 = Axis2::contact_rho;
        else throw ConfigError("config: axis2 must be none|Phi|b|rho");
    }
    if (auto v = take("axis2_min")) cfg.axis2_min = parse_number("axis2_min", *v);
    if (auto v = take("axis2_max")) cfg.axis2_max = parse_number("axis2_max", *v);
    if (auto v = take("axis2_steps")) cfg.axis2_steps = parse_int("axis2_steps", *v);

    switch (cfg.element) {
        case ElementKind::loop:
            if (auto v = take("L1")) cfg.loop.L1 = parse_number("L1", *v);
            if (auto v = take("L2")) cfg.loop.L2 = parse_number("L2", *v);
            if (auto v = take("alpha1")) cfg.loop.alpha1 = parse_number("alpha1", *v);
            if (auto v = take("alpha2")) cfg.loop.alpha2 = parse_number("alpha2", *v);
            if (auto v = take("Phi")) cfg.loop.Phi = parse_number("Phi", *v);
            break;
        case ElementKind::comb:
            if (auto v = take("b")) cfg.comb.b = parse_number("b", *v);
            if (auto v = take("c")) cfg.comb.c = parse_number("c", *v);
            if (auto v = take("d")) cfg.comb.d = parse_number("d", *v);
            if (auto v = take("L")) cfg.comb.L = parse_number("L", *v);
            if (auto v = take("v0")) {
                const double v0 = parse_number("v0", *v);
                if (v0 != 0.0) cfg.comb = CombParams::with_constant_potential(cfg.comb, v0);
            }
            if (auto v = take("pole_eps")) cfg.comb.pole_eps = parse_number("pole_eps", *v);
            cfg.comb.ell = cfg.ell;
            break;
        case ElementKind::sphere:
            if (auto v = take("rho")) cfg.sphere.rho = parse_number("rho", *v);
            if (auto v = take("l_max")) cfg.sphere.l_max = parse_int("l_max", *v);
            if (auto v = take("c_G")) cfg.sphere.c_G = parse_number("c_G", *v);
            cfg.sphere.ell = cfg.ell;
            break;
        case ElementKind::custom_l:
            if (auto v = take("l11")) cfg.custom_curly[0] = parse_number("l11", *v);
            if (auto v = take("l12")) cfg.custom_curly[1] = parse_number("l12", *v);
            if (auto v = take("l21")) cfg.custom_curly[2] = parse_number("l21", *v);
            if (auto v = take("l22")) cfg.custom_curly[3] = parse_number("l22", *v);
            if (auto v = take("phi")) cfg.custom_phi = parse_number("phi", *v);
            break;
    }

    if (auto v = take("region_re_min")) cfg.region.re_lo = parse_number("region_re_min", *v);
    if (auto v = take("region_re_max")) cfg.region.re_hi = parse_number("region_re_max", *v);
    if (auto v = take("region_im_min")) cfg.region.im_lo = parse_number("region_im_min", *v);
    if (auto v = take("region_im_max")) cfg.region.im_hi = parse_number("region_im_max", *v);
    if (auto v = take("region_grid")) cfg.region_grid = parse_int("region_grid", *v);

    if (!kv.empty())
        throw ConfigError("config: unknown key '" + kv.begin()->first + "'");

    // invariants
    if (!(cfg.k_min > 0.0)) throw ConfigError("config: k_min must be > 0");
    if (!(cfg.k_max > cfg.k_min)) throw ConfigError("config: k_max must exceed k_min");
    if (!std::isfinite(cfg.k_min) || !std::isfinite(cfg.k_max))
        throw ConfigError("config: k range must be finite");
    if (cfg.k_steps < 2) throw ConfigError("config: k_steps must be >= 2");
    if (cfg.N < 1) throw ConfigError("config: N must be >= 1");
    if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
    if (cfg.axis2 != Axis2::none) {
        if (cfg.axis2_steps < 2) throw ConfigError("config: axis2_steps must be >= 2");
        if (!std::isfinite(cfg.axis2_min) || !std::isfinite(cfg.axis2_max) ||
            !(cfg.axis2_max > cfg.axis2_min))
            throw ConfigError("config: bad axis2 range");
        const bool ok = (cfg.axis2 == Axis2::flux && cfg.element == ElementKind::loop) ||
                        (cfg.axis2 == Axis2::coupling_b && cfg.element == ElementKind::comb) ||
                        (cfg.axis2 == Axis2::contact_rho && cfg.element == ElementKind::sphere);
        if (!ok) throw ConfigError("config: axis2 does not apply to this element");
    }
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

// Element family behind a uniform interface for the sweep drivers.
struct Provider {
    std::function<ElementData(double)> elem;          // may throw SingularityError
    std::function<SerialResult(int, double)> serial;  // N elements at k
    std::function<std::vector<double>(double, double)> breakers;
    std::function<double(double)> diag_beta;  // comb only
    std::function<SphereSeries(double)> diag_zg;  // sphere only
};

Provider make_provider(const SweepConfig& cfg, double axis2_value) {
    Provider prov;
    switch (cfg.element) {
        case ElementKind::loop: {
            LoopParams p = cfg.loop;
            if (cfg.axis2 == Axis2::flux) p.Phi = axis2_value;
            const double ell = cfg.ell;
            prov.elem = [p](double k) { return loop_element_data(p, k); };
            prov.serial = [p, ell](int N, double k) {
                return serial_closed_form(loop_element_data(p, k), ell, N, k);
            };
            prov.breakers = [](double, double) { return std::vector<double>{}; };
            break;
        }
        case ElementKind::comb: {
            CombParams p = cfg.comb;
            p.ell = cfg.ell;
            if (cfg.axis2 == Axis2::coupling_b) p.b = axis2_value;
            prov.elem = [p](double k) { return comb_element_data(p, k); };
            prov.serial = [p](int N, double k) { return comb_amplitudes(p, N, k); };
            prov.breakers = [p](double klo, double khi) {
                return stub_spectrum(p, klo, khi);
            };
            prov.diag_beta = [p](double k) { return comb_beta(p, k); };
            break;
        }
        case ElementKind::sphere: {
            SphereParams p = cfg.sphere;
            p.ell = cfg.ell;
            if (cfg.axis2 == Axis2::contact_rho) p.rho = axis2_value;
            const double ell = cfg.ell;
            prov.elem = [p](double k) { return sphere_element_data(p, k); };
            prov.serial = [p, ell](int N, double k) {
                if (N == 1) {
                    const SMatrix s = sphere_transmission(p, k);
                    SerialResult res;
                    res.k = k;
                    res.ell = ell;
                    res.n_elements = 1;
                    res.t = s.t;
                    res.r = s.r;
                    res.t_rev = s.t_rev;
                    res.r_rev = s.r_rev;
                    res.zeta = bloch_discriminant(sphere_element_data(p, k), ell, k);
                    res.u_val = 1.0;
                    res.in_band = std::abs(res.zeta) <= 1.0;
                    return res;
                }
                return serial_closed_form(sphere_element_data(p, k), ell, N, k);
            };
            prov.breakers = [p](double klo, double khi) {
                // eigenvalue momenta sqrt(l(l+1)) are singular for the series
                std::vector<double> out;
                for (int l = 1;; ++l) {
                    const double kk = std::sqrt(double(l) * double(l + 1));
                    if (kk >= khi) break;
                    if (kk > klo) out.push_back(kk);
                }
                return out;
            };
            prov.diag_zg = [p](double k) { return sphere_series(p, k); };
            break;
        }
        case ElementKind::custom_l: {
            const LTransfer L = LTransfer::from_curly(cfg.custom_curly, cfg.custom_phi);
            const double ell = cfg.ell;
            prov.elem = [L](double k) { return element_data(L, k); };
            prov.serial = [L, ell](int N, double k) {
                return serial_closed_form(element_data(L, k), ell, N, k);
            };
            prov.breakers = [](double, double) { return std::vector<double>{}; };
            break;
        }
    }
    return prov;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / (n - 1);
    return v;
}

std::vector<double> axis2_values(const SweepConfig& cfg) {
    if (cfg.axis2 == Axis2::none) return {0.0};
    return linspace(cfg.axis2_min, cfg.axis2_max, cfg.axis2_steps);
}

}  // namespace

Table run_sweep(const SweepConfig& cfg) {
    const KindColumns kc = kind_columns(cfg.element);
    const bool has_axis = cfg.axis2 != Axis2::none;

    Table table;
    table.columns = {"k"};
    if (has_axis) table.columns.insert(table.columns.begin() + 1, "axis2");
    for (const char* c : {"re_t", "im_t", "re_r", "im_r", "T", "R", "in_band", "zeta"})
        table.columns.push_back(c);
    if (kc.beta) table.columns.push_back("beta");
    if (kc.zg) {
        table.columns.push_back("Z");
        table.columns.push_back("g");
    }

    const auto axes = axis2_values(cfg);
    const auto ks = linspace(cfg.k_min, cfg.k_max, cfg.k_steps);
    const int n = int(axes.size()) * int(ks.size());
    std::vector<std::vector<Cell>> rows(n);

    parallel_for(n, cfg.threads, [&](int idx) {
        const double a = axes[idx / ks.size()];
        const double k = ks[idx % ks.size()];
        const Provider prov = make_provider(cfg, a);
        const SerialResult res = prov.serial(cfg.N, k);

        const double T = res.transmission(), R = res.reflection();
        const double tol = cfg.element == ElementKind::sphere ? 1e-9 : 1e-12;
        if (std::abs(T + R - 1.0) > tol)
            throw SingularityError("run_sweep: unitarity violation at k = " +
                                   format_double(k));

        std::vector<Cell> row;
        row.reserve(table.columns.size());
        row.emplace_back(k);
        if (has_axis) row.emplace_back(a);
        row.emplace_back(res.t.real());
        row.emplace_back(res.t.imag());
        row.emplace_back(res.r.real());
        row.emplace_back(res.r.imag());
        row.emplace_back(T);
        row.emplace_back(R);
        row.emplace_back(res.in_band);
        row.emplace_back(res.zeta);
        if (kc.beta)
            row.emplace_back(res.full_reflection
                                 ? std::numeric_limits<double>::infinity()
                                 : prov.diag_beta(k));
        if (kc.zg) {
            const SphereSeries s = prov.diag_zg(k);
            row.emplace_back(s.Z);
            row.emplace_back(s.g);
        }
        rows[idx] = std::move(row);
    });

    table.rows = std::move(rows);
    return table;
}

Table run_bands(const SweepConfig& cfg) {
    const bool has_axis = cfg.axis2 != Axis2::none;
    Table table;

    if (!has_axis) {
        table.columns = {"band",        "k_lo",       "k_hi",    "residual_lo",
                         "residual_hi", "depth_lo",   "depth_hi"};
        const Provider prov = make_provider(cfg, 0.0);
        const BandIntervals bands =
            band_intervals(prov.elem, cfg.ell, cfg.k_min, cfg.k_max, cfg.k_steps,
                           prov.breakers(cfg.k_min, cfg.k_max));
        long long idx = 0;
        for (const auto& b : bands.intervals) {
            table.rows.push_back({idx++, b.k_lo, b.k_hi, b.residual_lo, b.residual_hi,
                                  (long long)b.depth_lo, (long long)b.depth_hi});
        }
        return table;
    }

    table.columns = {"axis2", "k", "in_band"};
    const auto axes = axis2_values(cfg);
    const auto ks = linspace(cfg.k_min, cfg.k_max, cfg.k_steps);
    std::vector<std::vector<std::vector<Cell>>> slices(axes.size());

    parallel_for(int(axes.size()), cfg.threads, [&](int ai) {
        const double a = axes[ai];
        const Provider prov = make_provider(cfg, a);
        const BandIntervals bands =
            band_intervals(prov.elem, cfg.ell, cfg.k_min, cfg.k_max, cfg.k_steps,
                           prov.breakers(cfg.k_min, cfg.k_max));
        auto& rows = slices[ai];
        rows.reserve(ks.size());
        for (double k : ks)
            rows.push_back({a, k, bands.band_containing(k).has_value()});
    });

    for (auto& s : slices)
        for (auto& r : s) table.rows.push_back(std::move(r));
    return table;
}

Table run_poles(const SweepConfig& cfg) {
    if (cfg.element != ElementKind::comb)
        throw ConfigError("poles: only the comb element has a pole search");
    CombParams p = cfg.comb;
    p.ell = cfg.ell;

    Table table;
    table.columns = {"re_k", "im_k", "residual", "multiplicity", "origin",
                     "nearest_k_n"};
    const PoleSet raw = find_poles(p, cfg.N, cfg.region, cfg.region_grid);
    const double margin = 2.0 * pi / p.L;
    const auto kns = stub_spectrum(p, std::max(cfg.region.re_lo - margin, 1e-3),
                                   cfg.region.re_hi + margin);
    const PoleSet poles = classify_poles(raw, kns, p, cfg.N);
    for (const auto& pole : poles) {
        const char* origin = pole.origin == PoleOrigin::stub      ? "stub"
                             : pole.origin == PoleOrigin::spatial ? "spatial"
                                                                  : "unclassified";
        table.rows.push_back({pole.k.real(), pole.k.imag(), pole.residual,
                              (long long)pole.multiplicity, std::string(origin),
                              pole.nearest_k_n ? Cell(*pole.nearest_k_n)
                                               : Cell(std::string(""))});
    }
    return table;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string cell_csv(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<long long>(c))
        return std::to_string(std::get<long long>(c));
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "1" : "0";
    return std::get<std::string>(c);
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    for (size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out += ',';
        out += table.columns[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += cell_csv(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& table) {
    nlohmann::json j;
    j["columns"] = table.columns;
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) {
            if (std::holds_alternative<double>(c)) {
                const double v = std::get<double>(c);
                if (std::isfinite(v)) r.push_back(v);
                else r.push_back(format_double(v));  // JSON has no inf/nan
            } else if (std::holds_alternative<long long>(c)) {
                r.push_back(std::get<long long>(c));
            } else if (std::holds_alternative<bool>(c)) {
                r.push_back(std::get<bool>(c));
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

void write_table(const Table& table, const SweepConfig& cfg, std::ostream& fallback) {
    const std::string payload =
        cfg.format == OutputFormat::csv ? to_csv(table) : to_json(table);
    if (cfg.out.empty()) {
        fallback << payload;
        if (!fallback) throw std::ios_base::failure("write to stream failed");
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open output file: " + cfg.out);
    out << payload;
    if (!out) throw std::ios_base::failure("write failed: " + cfg.out);
}

}  // namespace sscat
