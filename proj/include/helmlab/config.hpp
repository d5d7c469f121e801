#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helmlab/geometry.hpp"

namespace helmlab {

enum class ExperimentKind { sweep, quasimode, coercivity, scatter, constants, geometry_check, identities };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

struct KSpec {
    enum class Mode { list, log, quantized };
    Mode mode = Mode::log;
    std::vector<double> list;
    double kmin = 10.0, kmax = 80.0;
    int count = 12;
    int m_min = 2, m_max = 12;
    double gap = 0.0;  // 0: use the geometry's facing-segment gap
};

struct ConstantsSpec {
    double R0 = 1.0, R1 = 1.4;
    double eps_fraction = 0.5;  // eps = eps_fraction * eps0
    double k = 10.0, R = 3.0;
};

struct ScatterSpec {
    double direction_angle = 0.0;
    bool field_grid = false;
    double grid_half_width = 3.0;
    int grid_points = 41;
};

struct IdentitiesSpec {
    int fields = 20;
    int friedrichs_fields = 100;
    int flux_superpositions = 20;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::sweep;
    std::string output = "out";
    std::uint64_t seed = 1;
    GeometrySpec geometry;
    KSpec ks;
    double eta_coefficient = 1.0;
    double ppw = 30.0;
    int corner_depth = 10;
    int node_cap = 12000;
    bool kernel_norms = true;
    ConstantsSpec constants;
    ScatterSpec scatter;
    IdentitiesSpec identities;
};

/// Parses INI-style text with [sections] and key = value lines. Throws ConfigError naming
/// the line or the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& c);

/// Throws ConfigError when a field is out of range.
void validate(const ExperimentConfig& c);

/// Wavenumbers described by the config (quantized mode needs the geometry gap).
std::vector<double> resolve_ks(const ExperimentConfig& c, const Boundary& b);

}  // namespace helmlab
