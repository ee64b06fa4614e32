#pragma once

#include <string>
#include <vector>

#include "ecgl/diagnostics.hpp"
#include "ecgl/integrator.hpp"

namespace ecgl {

/// Time-series CSV.  Fixed column order:
/// t,mass,kinetic,potential,energy,K,s_accum,sup_abs,
/// bubble_lambda,bubble_cx,bubble_cy,bubble_cz,boundary_mass_frac
/// Values are written with 17 significant digits (round-trip safe);
/// an absent bubble fit is written as nan.
void write_time_series(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_time_series(const std::string& path);

/// Append-friendly variant used by long runs.
class TimeSeriesWriter {
public:
    explicit TimeSeriesWriter(const std::string& path);
    ~TimeSeriesWriter();
    void write(const DiagnosticsRecord& r);

private:
    struct Impl;
    Impl* impl_;
};

struct Checkpoint {
    int d = 3;
    int n_per_axis = 0;
    double half_length = 0.0;
    double theta = 0.0;
    RunState state;
};

/// Binary snapshot: fixed header followed by the raw samples as pairs of
/// little-endian IEEE-754 binary64 (re, im).  Layout documented in
/// docs/formats.md.
void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

/// Run manifest: effective config, code version, command line, wall time.
void write_manifest(const std::string& path, const std::string& effective_config_json,
                    const std::string& command_line, double wall_seconds);

} // namespace ecgl
