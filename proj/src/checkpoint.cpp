#include "pwsim/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pwsim {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

constexpr char kMagic[6] = {'P', 'W', 'S', 'I', 'M', '1'};

template <typename T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw Error("checkpoint: truncated or unreadable file");
    return value;
}

void put_string(std::ostream& os, const std::string& s) {
    put<std::uint64_t>(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is, std::uint64_t max_len = std::uint64_t{1} << 30) {
    const auto len = get<std::uint64_t>(is);
    if (len > max_len) throw Error("checkpoint: corrupt string length");
    std::string s(len, '\0');
    is.read(s.data(), static_cast<std::streamsize>(len));
    if (!is) throw Error("checkpoint: truncated or unreadable file");
    return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("checkpoint: cannot open " + tmp.string() + " for writing");
        os.write(kMagic, sizeof(kMagic));
        put<std::uint32_t>(os, cp.version);
        put_string(os, cp.config_json);
        put<std::uint64_t>(os, cp.step);

        const ConfigurationGrid& g = cp.state.grid();
        put<std::uint8_t>(os, g.boundary() == Boundary::periodic ? 0 : 1);
        put<std::uint64_t>(os, g.dims());
        for (const AxisSpec& ax : g.axes()) {
            put<double>(os, ax.min);
            put<double>(os, ax.max);
            put<std::uint64_t>(os, ax.points);
        }
        put<std::uint64_t>(os, cp.state.labels());
        put<double>(os, cp.state.time());
        const auto amps = cp.state.amplitudes();
        os.write(reinterpret_cast<const char*>(amps.data()),
                 static_cast<std::streamsize>(amps.size() * sizeof(Complex)));

        put<std::uint64_t>(os, cp.ensemble.size());
        for (const BeableConfiguration& q : cp.ensemble) {
            put<std::uint64_t>(os, q.size());
            os.write(reinterpret_cast<const char*>(q.coords.data()),
                     static_cast<std::streamsize>(q.size() * sizeof(double)));
        }
        put_string(os, cp.rng_state);
        if (!os) throw Error("checkpoint: write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("checkpoint: cannot open " + path.string());
    char magic[6];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error("checkpoint: bad magic in " + path.string());

    Checkpoint cp;
    cp.version = get<std::uint32_t>(is);
    if (cp.version != kCheckpointVersion) {
        std::ostringstream os;
        os << "checkpoint: file version " << cp.version << " does not match supported version "
           << kCheckpointVersion;
        throw Error(os.str());
    }
    cp.config_json = get_string(is);
    cp.step = get<std::uint64_t>(is);

    const auto boundary = get<std::uint8_t>(is) == 0 ? Boundary::periodic : Boundary::reflecting;
    const auto dims = get<std::uint64_t>(is);
    if (dims == 0 || dims > 16) throw Error("checkpoint: corrupt grid dimension");
    std::vector<AxisSpec> axes(dims);
    for (AxisSpec& ax : axes) {
        ax.min = get<double>(is);
        ax.max = get<double>(is);
        ax.points = get<std::uint64_t>(is);
    }
    ConfigurationGrid grid(axes, boundary);

    const auto labels = get<std::uint64_t>(is);
    const double time = get<double>(is);
    std::vector<Complex> amps(labels * grid.size());
    is.read(reinterpret_cast<char*>(amps.data()),
            static_cast<std::streamsize>(amps.size() * sizeof(Complex)));
    if (!is) throw Error("checkpoint: truncated amplitude block");
    cp.state = LabeledWavefunction(grid, labels, std::move(amps), time);

    const auto count = get<std::uint64_t>(is);
    cp.ensemble.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto d = get<std::uint64_t>(is);
        if (d != grid.dims()) throw Error("checkpoint: ensemble point dimension mismatch");
        std::vector<double> coords(d);
        is.read(reinterpret_cast<char*>(coords.data()),
                static_cast<std::streamsize>(d * sizeof(double)));
        if (!is) throw Error("checkpoint: truncated ensemble block");
        cp.ensemble.emplace_back(std::move(coords));
    }
    cp.rng_state = get_string(is);
    return cp;
}

}  // namespace pwsim
