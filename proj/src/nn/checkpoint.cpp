#include "tumorgnn/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace tumorgnn::nn {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void put_string(std::ostream& os, const std::string& s) {
    put<std::uint64_t>(os, s.size());
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
    auto n = get<std::uint64_t>(is);
    if (n > (1u << 30)) throw std::runtime_error("checkpoint: implausible string length");
    std::string s(n, '\0');
    if (!is.read(s.data(), static_cast<std::streamsize>(n))) throw std::runtime_error("checkpoint: truncated file");
    return s;
}

void put_matrix(std::ostream& os, const Matrix& m) {
    put<std::uint64_t>(os, m.rows);
    put<std::uint64_t>(os, m.cols);
    os.write(reinterpret_cast<const char*>(m.data.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
}

Matrix get_matrix(std::istream& is) {
    auto r = get<std::uint64_t>(is);
    auto c = get<std::uint64_t>(is);
    if (r * c > (1ull << 32)) throw std::runtime_error("checkpoint: implausible matrix shape");
    Matrix m(r, c);
    if (!is.read(reinterpret_cast<char*>(m.data.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
        throw std::runtime_error("checkpoint: truncated file");
    return m;
}

}  // namespace

Checkpoint capture(const ParameterStore& store, const AdamState& adam, std::string config, int epoch) {
    Checkpoint ck;
    ck.config = std::move(config);
    ck.epoch = epoch;
    for (std::size_t i = 0; i < store.size(); ++i) {
        ck.names.push_back(store[i].name);
        ck.values.push_back(store[i].value);
    }
    ck.adam = adam;
    return ck;
}

void apply(const Checkpoint& ck, ParameterStore& store) {
    if (ck.names.size() != store.size()) throw std::invalid_argument("checkpoint: parameter count mismatch");
    for (std::size_t i = 0; i < ck.names.size(); ++i) {
        Parameter& p = store.get(ck.names[i]);
        if (!p.value.same_shape(ck.values[i])) throw std::invalid_argument("checkpoint: shape mismatch for " + p.name);
        p.value = ck.values[i];
    }
}

void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kCheckpointVersion);
    put_string(os, ck.config);
    put<std::int32_t>(os, ck.epoch);
    put<std::uint64_t>(os, ck.names.size());
    for (std::size_t i = 0; i < ck.names.size(); ++i) {
        put_string(os, ck.names[i]);
        put_matrix(os, ck.values[i]);
    }
    put<std::uint64_t>(os, ck.adam.step);
    put<std::uint64_t>(os, ck.adam.m.size());
    for (std::size_t i = 0; i < ck.adam.m.size(); ++i) {
        put_matrix(os, ck.adam.m[i]);
        put_matrix(os, ck.adam.v[i]);
    }
    if (!os) throw std::runtime_error("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& is) {
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error("checkpoint: bad magic");
    auto version = get<std::uint32_t>(is);
    if (version != kCheckpointVersion)
        throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint ck;
    ck.config = get_string(is);
    ck.epoch = get<std::int32_t>(is);
    auto n = get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < n; ++i) {
        ck.names.push_back(get_string(is));
        ck.values.push_back(get_matrix(is));
    }
    ck.adam.step = get<std::uint64_t>(is);
    auto nm = get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < nm; ++i) {
        ck.adam.m.push_back(get_matrix(is));
        ck.adam.v.push_back(get_matrix(is));
    }
    return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_checkpoint(os, ck);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_checkpoint(is);
}

}  // namespace tumorgnn::nn
