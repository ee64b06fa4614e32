#include "ecgl/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ecgl {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

constexpr char kMagic[8] = {'E', 'C', 'G', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

const char* kHeader =
    "t,mass,kinetic,potential,energy,K,s_accum,sup_abs,"
    "bubble_lambda,bubble_cx,bubble_cy,bubble_cz,boundary_mass_frac";

std::string format_row(const DiagnosticsRecord& r) {
    const double nan = std::nan("");
    const double bl = r.bubble ? r.bubble->lambda : nan;
    const double bx = r.bubble ? r.bubble->center[0] : nan;
    const double by = r.bubble ? r.bubble->center[1] : nan;
    const double bz = r.bubble ? r.bubble->center[2] : nan;
    char buf[600];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g,%.17g",
                  r.t, r.mass, r.kinetic, r.potential, r.energy, r.k_functional,
                  r.s_accumulator, r.sup_abs, bl, bx, by, bz,
                  r.boundary_mass_fraction);
    return buf;
}

} // namespace

void write_time_series(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << kHeader << "\n";
    for (const auto& r : records) out << format_row(r) << "\n";
}

std::vector<DiagnosticsRecord> read_time_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw std::runtime_error("time series header mismatch in " + path);
    std::vector<DiagnosticsRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, 13> v{};
        std::stringstream ss(line);
        std::string tok;
        for (auto& x : v) {
            if (!std::getline(ss, tok, ',')) throw std::runtime_error("short CSV row");
            x = std::strtod(tok.c_str(), nullptr);
        }
        DiagnosticsRecord r;
        r.t = v[0];
        r.mass = v[1];
        r.kinetic = v[2];
        r.potential = v[3];
        r.energy = v[4];
        r.k_functional = v[5];
        r.s_accumulator = v[6];
        r.sup_abs = v[7];
        if (!std::isnan(v[8])) {
            BubbleFit b;
            b.lambda = v[8];
            b.center = {v[9], v[10], v[11], 0.0};
            r.bubble = b;
        }
        r.boundary_mass_fraction = v[12];
        records.push_back(r);
    }
    return records;
}

struct TimeSeriesWriter::Impl {
    std::ofstream out;
};

TimeSeriesWriter::TimeSeriesWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) throw std::runtime_error("cannot open for writing: " + path);
    impl_->out << kHeader << "\n";
}

TimeSeriesWriter::~TimeSeriesWriter() { delete impl_; }

void TimeSeriesWriter::write(const DiagnosticsRecord& r) {
    impl_->out << format_row(r) << "\n";
    impl_->out.flush();
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<char*>(&v), 8); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<char*>(&v), 8); };

    out.write(kMagic, 8);
    put_u32(kVersion);
    put_u32(static_cast<std::uint32_t>(cp.d));
    put_u32(static_cast<std::uint32_t>(cp.n_per_axis));
    put_u32(static_cast<std::uint32_t>(cp.state.status));
    put_f64(cp.half_length);
    put_f64(cp.theta);
    put_f64(cp.state.t);
    put_f64(cp.state.t_event);
    put_u64(static_cast<std::uint64_t>(cp.state.step_index));

    const auto& vals = cp.state.u.values;
    out.write(reinterpret_cast<const char*>(vals.data()),
              static_cast<std::streamsize>(vals.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);

    auto get_u32 = [&] {
        std::uint32_t v;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_u64 = [&] {
        std::uint64_t v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    auto get_f64 = [&] {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };

    if (get_u32() != kVersion) throw std::runtime_error("unsupported checkpoint version");
    Checkpoint cp;
    cp.d = static_cast<int>(get_u32());
    cp.n_per_axis = static_cast<int>(get_u32());
    cp.state.status = static_cast<RunStatus>(get_u32());
    cp.half_length = get_f64();
    cp.theta = get_f64();
    cp.state.t = get_f64();
    cp.state.t_event = get_f64();
    cp.state.step_index = static_cast<long>(get_u64());

    auto grid = std::make_shared<Grid>(cp.d, cp.n_per_axis, cp.half_length);
    cp.state.u = ComplexField(grid, Space::physical);
    in.read(reinterpret_cast<char*>(cp.state.u.values.data()),
            static_cast<std::streamsize>(cp.state.u.values.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return cp;
}

void write_manifest(const std::string& path, const std::string& effective_config_json,
                    const std::string& command_line, double wall_seconds) {
    nlohmann::json m;
    m["config"] = nlohmann::json::parse(effective_config_json);
    m["version"] = "ecgl 0.1.0";
    m["command_line"] = command_line;
    m["wall_seconds"] = wall_seconds;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << m.dump(2) << "\n";
}

} // namespace ecgl
