#include "tumorgnn/sim/trace_io.hpp"

#include "tumorgnn/sim/params_json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tumorgnn::sim {

static_assert(std::endian::native == std::endian::little, "trace format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'U', 'M', 'T', 'R', 'A', 'C', 'E'};

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("trace: truncated file");
    return v;
}

void put_vec(std::ostream& os, const Vec3& v) {
    for (double x : v) put(os, x);
}

Vec3 get_vec(std::istream& is) {
    Vec3 v;
    for (double& x : v) x = get<double>(is);
    return v;
}

}  // namespace

void write_trace(std::ostream& os, const TumorHistory& h) {
    nlohmann::json header{{"global", h.params},
                          {"initial", h.initial},
                          {"seed", h.params.rng_seed},
                          {"schema_version", kTraceSchemaVersion},
                          {"end_time", h.end_time},
                          {"birth_count", h.birth_count},
                          {"stop", static_cast<int>(h.stop)}};
    std::string text = header.dump();
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kTraceSchemaVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(text.size()));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));

    put<std::uint64_t>(os, h.events.size());
    for (const EventRecord& e : h.events) {
        put(os, e.time);
        put(os, static_cast<std::uint8_t>(e.kind));
        put(os, e.cell_id);
        put_vec(os, e.position);
        put(os, e.mutation_id);
        put(os, e.density_at_event);
        put(os, e.daughter_ids[0]);
        put(os, e.daughter_ids[1]);
    }
    put<std::uint64_t>(os, h.cells.size());
    for (const Cell& c : h.cells) {
        put(os, c.parent_id);
        put_vec(os, c.position);
        put(os, c.mutation_id);
        put(os, c.birth_time);
        put(os, c.end_time);
    }
    put<std::uint64_t>(os, h.clones.size());
    for (const CloneRecord& c : h.clones) {
        put(os, c.parent_clone);
        put(os, c.origin_time);
        const IntrinsicParams& p = c.params;
        for (double x : {p.birth_eff, p.birth_res, p.success_eff, p.success_res, p.lifespan_eff, p.lifespan_res})
            put(os, x);
    }
    if (!os) throw std::runtime_error("trace: write failed");
}

TumorHistory read_trace(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("trace: bad magic");
    auto schema = get<std::uint32_t>(is);
    if (schema != kTraceSchemaVersion) throw std::runtime_error("trace: unsupported schema version");
    auto len = get<std::uint32_t>(is);
    std::string text(len, '\0');
    if (!is.read(text.data(), len)) throw std::runtime_error("trace: truncated header");
    auto header = nlohmann::json::parse(text);

    TumorHistory h;
    header.at("global").get_to(h.params);
    header.at("initial").get_to(h.initial);
    h.end_time = header.at("end_time").get<double>();
    h.birth_count = header.at("birth_count").get<std::uint64_t>();
    h.stop = static_cast<StopReason>(header.at("stop").get<int>());

    auto n_events = get<std::uint64_t>(is);
    h.events.resize(n_events);
    for (EventRecord& e : h.events) {
        e.time = get<double>(is);
        auto kind = get<std::uint8_t>(is);
        if (kind > 2) throw std::runtime_error("trace: bad event kind");
        e.kind = static_cast<EventKind>(kind);
        e.cell_id = get<std::uint32_t>(is);
        e.position = get_vec(is);
        e.mutation_id = get<std::uint32_t>(is);
        e.density_at_event = get<double>(is);
        e.daughter_ids[0] = get<std::uint32_t>(is);
        e.daughter_ids[1] = get<std::uint32_t>(is);
    }
    auto n_cells = get<std::uint64_t>(is);
    h.cells.resize(n_cells);
    for (std::uint64_t i = 0; i < n_cells; ++i) {
        Cell& c = h.cells[i];
        c.id = static_cast<std::uint32_t>(i);
        c.parent_id = get<std::uint32_t>(is);
        c.position = get_vec(is);
        c.mutation_id = get<std::uint32_t>(is);
        c.birth_time = get<double>(is);
        c.end_time = get<double>(is);
    }
    auto n_clones = get<std::uint64_t>(is);
    h.clones.resize(n_clones);
    for (CloneRecord& c : h.clones) {
        c.parent_clone = get<std::uint32_t>(is);
        c.origin_time = get<double>(is);
        IntrinsicParams& p = c.params;
        for (double* x : {&p.birth_eff, &p.birth_res, &p.success_eff, &p.success_res, &p.lifespan_eff,
                          &p.lifespan_res})
            *x = get<double>(is);
    }
    return h;
}

void write_trace_file(const std::string& path, const TumorHistory& h) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("trace: cannot open " + path + " for writing");
    write_trace(os, h);
}

TumorHistory read_trace_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("trace: cannot open " + path);
    return read_trace(is);
}

}  // namespace tumorgnn::sim
