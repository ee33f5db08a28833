#pragma once

#include "tumorgnn/nn/optim.hpp"
#include "tumorgnn/nn/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

namespace tumorgnn::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything needed to resume or evaluate a model. `config` is opaque
/// text (the model layer stores JSON there).
struct Checkpoint {
    std::string config;
    std::int32_t epoch = 0;
    std::vector<std::string> names;
    std::vector<Matrix> values;
    AdamState adam;
};

Checkpoint capture(const ParameterStore& store, const AdamState& adam, std::string config, int epoch);
/// Copies values into `store`, matching by name; throws on missing names or shape mismatch.
void apply(const Checkpoint& ck, ParameterStore& store);

void write_checkpoint(std::ostream& os, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& is);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tumorgnn::nn
