#pragma once

#include <filesystem>
#include <iosfwd>

#include "hwnroute/dqn/qnet.hpp"

namespace hwnroute::dqn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary little-endian network file: magic "HWNQNET\0", u32 version,
/// u32 layer count, then per layer (u32 stream, u32 in, u32 out), then per
/// layer the out x in weights in row-major order followed by the out biases,
/// all as f64. See docs/formats.md.
void write_checkpoint(std::ostream& out, const QNet& net);
QNet read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const QNet& net);
QNet load_checkpoint(const std::filesystem::path& path);

}  // namespace hwnroute::dqn
