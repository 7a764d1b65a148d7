#include "marlte/traffic_matrix.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace marlte {

TrafficMatrix::TrafficMatrix(int node_count)
    : n_(node_count), d_(static_cast<size_t>(node_count) * node_count, 0.0) {}

TrafficMatrix::TrafficMatrix(int node_count, std::vector<double> row_major)
    : n_(node_count), d_(std::move(row_major)) {
  if (d_.size() != static_cast<size_t>(n_) * n_) {
    throw std::invalid_argument("traffic matrix must be N x N");
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      double v = d_[i * n_ + j];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("traffic matrix entries must be finite and >= 0");
      }
      if (i == j && v != 0.0) {
        throw std::invalid_argument("traffic matrix diagonal must be zero");
      }
    }
  }
}

void TrafficMatrix::set_demand(NodeId src, NodeId dst, double volume) {
  if (src == dst && volume != 0.0) {
    throw std::invalid_argument("traffic matrix diagonal must be zero");
  }
  if (!(volume >= 0.0)) throw std::invalid_argument("negative demand");
  d_[src * n_ + dst] = volume;
}

double TrafficMatrix::Total() const {
  double sum = 0.0;
  for (double v : d_) sum += v;
  return sum;
}

TrafficMatrix TrafficMatrix::Scaled(double factor) const {
  TrafficMatrix out = *this;
  for (double& v : out.d_) v *= factor;
  return out;
}

std::string TrafficMatrix::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (j > 0) out << ",";
      out << d_[i * n_ + j];
    }
    out << "\n";
  }
  return out.str();
}

TrafficMatrix ParseTrafficMatrixCsv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> values;
  int rows = 0;
  int cols = -1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream cells(line);
    std::string cell;
    int count = 0;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError(rows + 1, "bad number '" + cell + "'");
      }
      ++count;
    }
    if (cols >= 0 && count != cols) {
      throw ParseError(rows + 1, "row has " + std::to_string(count) +
                                     " columns, expected " + std::to_string(cols));
    }
    cols = count;
    ++rows;
  }
  if (rows == 0 || rows != cols) {
    throw ParseError(rows, "traffic matrix must be square and non-empty");
  }
  return TrafficMatrix(rows, std::move(values));
}

TrafficMatrix LoadTrafficMatrixFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open traffic matrix file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseTrafficMatrixCsv(buf.str());
}

TrafficMatrix UniformTm(const Topology& topo, double low, double high,
                        Rng& rng) {
  if (!(low >= 0.0) || !(low <= high)) {
    throw std::invalid_argument("UniformTm requires 0 <= low <= high");
  }
  int n = topo.node_count();
  TrafficMatrix tm(n);
  std::uniform_real_distribution<double> dist(low, high);
  for (int s = 0; s < n; ++s) {
    for (int d = 0; d < n; ++d) {
      if (s == d) continue;
      // uniform_real_distribution(a, a) is undefined, so handle it directly.
      tm.set_demand(s, d, low == high ? low : dist(rng));
    }
  }
  return tm;
}

std::vector<double> DrawGravityMasses(int node_count, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> masses(node_count);
  for (double& m : masses) m = exp1(rng);
  return masses;
}

TrafficMatrix GravityTmFromMasses(const std::vector<double>& masses,
                                  double total_traffic) {
  if (!(total_traffic > 0.0)) {
    throw std::invalid_argument("gravity total_traffic must be positive");
  }
  int n = static_cast<int>(masses.size());
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) norm += masses[i] * masses[j];
    }
  }
  if (!(norm > 0.0)) throw std::invalid_argument("gravity masses sum to zero");
  TrafficMatrix tm(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) tm.set_demand(i, j, total_traffic * masses[i] * masses[j] / norm);
    }
  }
  return tm;
}

TrafficMatrix GravityTm(const Topology& topo, double total_traffic, Rng& rng) {
  if (!(total_traffic > 0.0)) {
    throw std::invalid_argument("gravity total_traffic must be positive");
  }
  return GravityTmFromMasses(DrawGravityMasses(topo.node_count(), rng),
                             total_traffic);
}

TrafficProfile::Kind ParseTrafficKind(const std::string& name) {
  if (name == "uniform") return TrafficProfile::Kind::kUniform;
  if (name == "gravity") return TrafficProfile::Kind::kGravity;
  throw std::invalid_argument("unknown traffic profile '" + name + "'");
}

std::string TrafficKindName(TrafficProfile::Kind kind) {
  return kind == TrafficProfile::Kind::kUniform ? "uniform" : "gravity";
}

TrafficMatrix GenerateTm(const TrafficProfile& profile, const Topology& topo,
                         uint64_t seed) {
  Rng rng(seed);
  if (profile.kind == TrafficProfile::Kind::kUniform) {
    return UniformTm(topo, profile.low, profile.high, rng);
  }
  return GravityTm(topo, profile.total, rng);
}

}  // namespace marlte
