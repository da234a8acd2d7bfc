#include "hwnroute/dqn/checkpoint.hpp"

#include <array>
#include <fstream>

#include "hwnroute/binio.hpp"

namespace hwnroute::dqn {

namespace {

constexpr std::array<char, 8> kMagic{'H', 'W', 'N', 'Q', 'N', 'E', 'T', '\0'};

}  // namespace

void write_checkpoint(std::ostream& out, const QNet& net) {
  out.write(kMagic.data(), kMagic.size());
  binio::put<std::uint32_t>(out, kCheckpointVersion);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers().size()));
  for (const DenseLayout& l : net.layers()) {
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(l.stream));
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(l.in));
    binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(l.out));
  }
  const Eigen::VectorXd& p = net.parameters();
  for (const DenseLayout& l : net.layers()) {
    // Stored column-major in memory, written row-major.
    const double* w = p.data() + l.offset;
    for (int i = 0; i < l.out; ++i) {
      for (int j = 0; j < l.in; ++j) binio::put<double>(out, w[static_cast<std::size_t>(j) * l.out + i]);
    }
    binio::put_f64s(out, w + static_cast<std::size_t>(l.in) * l.out, static_cast<std::size_t>(l.out));
  }
  if (!out) throw Error("failed writing checkpoint");
}

QNet read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not a network checkpoint (bad magic)");
  const auto version = binio::get<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw Error("unsupported checkpoint version " + std::to_string(version));
  const auto count = binio::get<std::uint32_t>(in);
  if (count < 3 || count > 64) throw Error("checkpoint layer count out of range");

  struct Dim {
    std::uint32_t stream, in, out;
  };
  std::vector<Dim> dims(count);
  for (Dim& d : dims) {
    d.stream = binio::get<std::uint32_t>(in);
    d.in = binio::get<std::uint32_t>(in);
    d.out = binio::get<std::uint32_t>(in);
    if (d.stream > 2 || d.in == 0 || d.out == 0 || d.in > 100000 || d.out > 100000) {
      throw Error("checkpoint layer table is malformed");
    }
  }

  QNetShape shape;
  shape.trunk.clear();
  shape.value.clear();
  shape.advantage.clear();
  std::vector<Dim> value, advantage;
  for (const Dim& d : dims) {
    if (d.stream == 0) {
      if (!value.empty() || !advantage.empty()) throw Error("checkpoint trunk layers must come first");
      shape.trunk.push_back(static_cast<int>(d.out));
    } else if (d.stream == 1) {
      if (!advantage.empty()) throw Error("checkpoint value layers must precede advantage layers");
      value.push_back(d);
    } else {
      advantage.push_back(d);
    }
  }
  if (shape.trunk.empty() || value.empty() || advantage.empty() || value.back().out != 1) {
    throw Error("checkpoint does not describe a dueling network");
  }
  shape.inputs = static_cast<int>(dims.front().in);
  for (std::size_t i = 0; i + 1 < value.size(); ++i) shape.value.push_back(static_cast<int>(value[i].out));
  for (std::size_t i = 0; i + 1 < advantage.size(); ++i) shape.advantage.push_back(static_cast<int>(advantage[i].out));
  shape.actions = static_cast<int>(advantage.back().out);

  QNet net(shape, 0);
  if (net.layers().size() != dims.size()) throw Error("checkpoint layer table is inconsistent");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const DenseLayout& l = net.layers()[k];
    if (static_cast<std::uint32_t>(l.in) != dims[k].in || static_cast<std::uint32_t>(l.out) != dims[k].out ||
        static_cast<std::uint32_t>(l.stream) != dims[k].stream) {
      throw Error("checkpoint layer table is inconsistent");
    }
  }
  Eigen::VectorXd& p = net.parameters();
  for (const DenseLayout& l : net.layers()) {
    double* w = p.data() + l.offset;
    for (int i = 0; i < l.out; ++i) {
      for (int j = 0; j < l.in; ++j) w[static_cast<std::size_t>(j) * l.out + i] = binio::get<double>(in);
    }
    binio::get_f64s(in, w + static_cast<std::size_t>(l.in) * l.out, static_cast<std::size_t>(l.out));
  }
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const QNet& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, net);
}

QNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  QNet net = read_checkpoint(in);
  if (in.peek() != std::ifstream::traits_type::eof()) throw Error("checkpoint has trailing bytes");
  return net;
}

}  // namespace hwnroute::dqn
