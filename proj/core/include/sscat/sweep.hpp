// Configuration-driven parameter sweeps over the element families, band maps
// and pole searches, with deterministic tabular output.  The config format is
// flat `key = value` text with `#` comments; unknown keys and keys of another
// element family are errors.  Output is CSV (17 significant digits, LF line
// ends, fixed column order) or JSON; identical configs produce byte-identical
// files regardless of the thread count.

#ifndef SSCAT_SWEEP_HPP
#define SSCAT_SWEEP_HPP

#include <iosfwd>
#include <string>
#include <variant>

#include "sscat/comb.hpp"
#include "sscat/loop.hpp"
#include "sscat/poles.hpp"
#include "sscat/serial.hpp"
#include "sscat/sphere.hpp"

namespace sscat {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class ElementKind { loop, comb, sphere, custom_l };
enum class Axis2 { none, flux, coupling_b, contact_rho };
enum class OutputFormat { csv, json };

struct SweepConfig {
    ElementKind element = ElementKind::comb;
    int N = 1;
    double ell = 1.0;
    double k_min = 0.1, k_max = 10.0;
    int k_steps = 100;

    Axis2 axis2 = Axis2::none;
    double axis2_min = 0.0, axis2_max = 0.0;
    int axis2_steps = 2;

    std::string out;  // empty: stdout
    OutputFormat format = OutputFormat::csv;
    int threads = 1;
    double root_tol = 1e-10;
    double series_tol = 1e-9;

    LoopParams loop;
    CombParams comb;
    SphereParams sphere;
    std::array<double, 4> custom_curly{1.0, 0.0, 0.0, 1.0};
    double custom_phi = 0.0;

    ComplexRect region{0.1, 1.0, -1.0, 0.0};
    int region_grid = 8;
};

SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Transmission/reflection sweep over k (and the optional second axis).
/// Every row passes a unitarity check before it is emitted; a violation
/// aborts with SingularityError instead of writing bad physics.
Table run_sweep(const SweepConfig& cfg);

/// Band intervals of the infinite array (1D), or an in-band boolean per
/// (axis2, k) cell when a second axis is configured.
Table run_bands(const SweepConfig& cfg);

/// Pole search in the configured complex-k region (comb element only).
Table run_poles(const SweepConfig& cfg);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

/// Serialize to `cfg.out` (or the stream when the path is empty).  Throws
/// std::ios_base::failure on write errors.
void write_table(const Table& table, const SweepConfig& cfg, std::ostream& fallback);

/// Deterministic shortest-17-digit rendering used by the CSV writer.
std::string format_double(double v);

}  // namespace sscat

#endif
