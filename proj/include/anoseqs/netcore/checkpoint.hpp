#pragma once

#include "anoseqs/netcore/network.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace anoseqs::netcore {

// Binary layout:
//   "ANOSEQ1\n"
//   key=value lines (always spec_hash and tensor_count), then an empty line
//   per tensor: u32 name length, name bytes, u32 rank, u32 shape[rank], f32 values
// All integers and floats are little-endian.

inline constexpr std::string_view kCheckpointMagic = "ANOSEQ1\n";

struct NamedTensor {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<float> values;
};

struct Checkpoint {
    std::map<std::string, std::string> header;
    std::vector<NamedTensor> tensors;

    const NamedTensor* find(std::string_view name) const;
    const std::string& at(const std::string& key) const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Header carries spec_hash and net_spec; one tensor per parameter.
Checkpoint checkpoint_from(const Network& net);

/// Copies parameter values into `net`. The checkpoint's spec_hash must equal
/// net.spec().hash() and every parameter must be present with matching shape.
/// Tensors that do not name a parameter are ignored.
void load_params(Network& net, const Checkpoint& ckpt);

/// Rebuilds the network described by the checkpoint's net_spec and loads it.
Network network_from_checkpoint(const Checkpoint& ckpt);

} // namespace anoseqs::netcore
