#include "marlte/checkpoint.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "marlte/seed.h"

namespace marlte {
namespace {

constexpr const char* kMagic = "marlte-checkpoint";
constexpr int kVersion = 1;

void WriteDoubles(std::ostream& out, const double* data, size_t n) {
  for (size_t i = 0; i < n; ++i) out << std::hexfloat << data[i] << "\n";
  out << std::defaultfloat;
}

std::vector<double> ReadDoubles(std::istream& in, size_t n, const char* what) {
  std::vector<double> v(n);
  std::string token;
  for (size_t i = 0; i < n; ++i) {
    if (!(in >> token)) {
      throw std::runtime_error(std::string("checkpoint truncated in ") + what);
    }
    char* end = nullptr;
    v[i] = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      throw std::runtime_error("checkpoint: bad number '" + token + "'");
    }
  }
  return v;
}

void Expect(std::istream& in, const std::string& keyword) {
  std::string got;
  if (!(in >> got) || got != keyword) {
    throw std::runtime_error("checkpoint: expected '" + keyword + "', got '" + got +
                             "'");
  }
}

}  // namespace

std::string HexHash(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string CheckpointToText(const PolicyModel& model, const AdamState& adam,
                             uint64_t config_hash, int episode) {
  std::ostringstream out;
  const MpnnConfig& c = model.config();
  const ParamSet& p = model.params();
  const AdamConfig& a = adam.config();
  out << kMagic << " " << kVersion << "\n";
  out << "config_hash " << HexHash(config_hash) << "\n";
  out << "episode " << episode << "\n";
  out << "mpnn " << c.hidden << " " << c.steps << " " << c.mlp_width << "\n";
  out << "layers " << p.layer_count() << "\n";
  for (LayerId i = 0; i < p.layer_count(); ++i) {
    out << "layer " << p.layer(i).name << " " << p.layer(i).out << " "
        << p.layer(i).in << "\n";
  }
  out << "adam " << std::hexfloat << a.learning_rate << " " << a.beta1 << " "
      << a.beta2 << " " << a.epsilon << std::defaultfloat << " " << adam.step()
      << "\n";
  out << "params " << p.size() << "\n";
  WriteDoubles(out, p.flat().data(), p.size());
  out << "first_moment\n";
  WriteDoubles(out, adam.first_moment().data(), adam.first_moment().size());
  out << "second_moment\n";
  WriteDoubles(out, adam.second_moment().data(), adam.second_moment().size());
  out << "end\n";
  return out.str();
}

Checkpoint CheckpointFromText(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic || version != kVersion) {
    throw std::runtime_error("not a marlte checkpoint (version 1)");
  }
  Expect(in, "config_hash");
  std::string hash_hex;
  in >> hash_hex;
  Expect(in, "episode");
  int episode = 0;
  in >> episode;
  Expect(in, "mpnn");
  MpnnConfig c;
  in >> c.hidden >> c.steps >> c.mlp_width;
  PolicyModel model(c);
  const ParamSet& p = model.params();

  Expect(in, "layers");
  int layers = 0;
  in >> layers;
  if (layers != p.layer_count()) throw std::runtime_error("checkpoint: layer count");
  for (LayerId i = 0; i < layers; ++i) {
    Expect(in, "layer");
    std::string name;
    int out_dim = 0;
    int in_dim = 0;
    in >> name >> out_dim >> in_dim;
    if (name != p.layer(i).name || out_dim != p.layer(i).out ||
        in_dim != p.layer(i).in) {
      throw std::runtime_error("checkpoint: layer table mismatch at " + name);
    }
  }

  Expect(in, "adam");
  std::vector<double> hyper = ReadDoubles(in, 4, "adam");
  uint64_t step = 0;
  in >> step;
  AdamConfig ac{hyper[0], hyper[1], hyper[2], hyper[3]};

  Expect(in, "params");
  size_t count = 0;
  in >> count;
  if (count != p.size()) throw std::runtime_error("checkpoint: parameter count");
  std::vector<double> values = ReadDoubles(in, count, "params");
  std::copy(values.begin(), values.end(), model.params().flat().begin());
  Expect(in, "first_moment");
  std::vector<double> m = ReadDoubles(in, count, "first_moment");
  Expect(in, "second_moment");
  std::vector<double> v = ReadDoubles(in, count, "second_moment");
  Expect(in, "end");

  AdamState adam(ac, count);
  adam.Restore(step, std::move(m), std::move(v));
  return Checkpoint{std::move(model), std::move(adam),
                    std::strtoull(hash_hex.c_str(), nullptr, 16), episode};
}

void SaveCheckpoint(const std::string& path, const PolicyModel& model,
                    const AdamState& adam, uint64_t config_hash, int episode) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << CheckpointToText(model, adam, config_hash, episode);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing checkpoint " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return CheckpointFromText(buf.str());
}

uint64_t HashFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  return Fnv1a(s.data(), s.size());
}

}  // namespace marlte
