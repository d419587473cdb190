#include "bayesot/cost_models.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "bayesot/rng.hpp"

namespace bayesot {

namespace {

int atom_dimension(const AtomSampler& atom) {
  if (const auto* p = std::get_if<PointMassAtom>(&atom)) return static_cast<int>(p->point.size());
  if (const auto* e = std::get_if<EmpiricalAtom>(&atom)) {
    if (e->points.empty())
      throw std::invalid_argument("HierarchicalModel: empirical atom needs at least one point");
    return static_cast<int>(e->points.front().size());
  }
  return static_cast<int>(std::get<GaussianAtom>(atom).mean.size());
}

void draw_location(const AtomSampler& atom, RandomStream& rng, std::vector<double>& out) {
  if (const auto* p = std::get_if<PointMassAtom>(&atom)) {
    out = p->point;
    return;
  }
  if (const auto* e = std::get_if<EmpiricalAtom>(&atom)) {
    const size_t count = e->points.size();
    size_t idx = static_cast<size_t>(rng.next_double() * static_cast<double>(count));
    if (idx >= count) idx = count - 1;
    out = e->points[idx];
    return;
  }
  const auto& g = std::get<GaussianAtom>(atom);
  out.resize(g.mean.size());
  for (size_t d = 0; d < out.size(); ++d) out[d] = g.mean[d] + g.sigma * rng.next_normal();
}

double pair_cost(GroundCost kind, const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t d = 0; d < x.size(); ++d) {
    const double diff = x[d] - y[d];
    s += diff * diff;
  }
  return kind == GroundCost::squared_euclidean ? s : std::sqrt(s);
}

}  // namespace

int HierarchicalModel::dimension() const {
  if (source_atoms.empty() || target_atoms.empty())
    throw std::invalid_argument("HierarchicalModel: needs at least one atom per side");
  const int d = atom_dimension(source_atoms.front());
  for (const auto& a : source_atoms)
    if (atom_dimension(a) != d)
      throw std::invalid_argument("HierarchicalModel: source atom dimension mismatch");
  for (const auto& a : target_atoms)
    if (atom_dimension(a) != d)
      throw std::invalid_argument("HierarchicalModel: target atom dimension mismatch");
  return d;
}

CostEnsemble sample_cost(const HierarchicalModel& model, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("sample_cost: n_samples must be >= 1");
  const int dim = model.dimension();
  for (const auto& a : model.source_atoms)
    if (const auto* e = std::get_if<EmpiricalAtom>(&a))
      for (const auto& p : e->points)
        if (static_cast<int>(p.size()) != dim)
          throw std::invalid_argument("sample_cost: empirical point dimension mismatch");
  for (const auto& a : model.target_atoms)
    if (const auto* e = std::get_if<EmpiricalAtom>(&a))
      for (const auto& p : e->points)
        if (static_cast<int>(p.size()) != dim)
          throw std::invalid_argument("sample_cost: empirical point dimension mismatch");

  const int n = static_cast<int>(model.source_atoms.size());
  const int m = static_cast<int>(model.target_atoms.size());

  std::vector<CostMatrix> samples;
  samples.reserve(static_cast<size_t>(n_samples));
  std::vector<std::vector<double>> xs(static_cast<size_t>(n)), ys(static_cast<size_t>(m));
  for (int k = 0; k < n_samples; ++k) {
    for (int i = 0; i < n; ++i) {
      RandomStream rng(seed, cost_stream(0, static_cast<std::uint64_t>(i),
                                         static_cast<std::uint64_t>(k)));
      draw_location(model.source_atoms[static_cast<size_t>(i)], rng, xs[static_cast<size_t>(i)]);
    }
    for (int j = 0; j < m; ++j) {
      RandomStream rng(seed, cost_stream(1, static_cast<std::uint64_t>(j),
                                         static_cast<std::uint64_t>(k)));
      draw_location(model.target_atoms[static_cast<size_t>(j)], rng, ys[static_cast<size_t>(j)]);
    }
    Matrix c(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        c(i, j) = pair_cost(model.ground_cost, xs[static_cast<size_t>(i)], ys[static_cast<size_t>(j)]);
    samples.emplace_back(std::move(c));
  }
  return CostEnsemble(std::move(samples));
}

CostMatrix profile_cost(const std::vector<std::vector<double>>& profiles_p,
                        const std::vector<std::vector<double>>& profiles_e, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("profile_cost: gamma must be > 0");
  if (profiles_p.empty() || profiles_e.empty())
    throw std::invalid_argument("profile_cost: needs at least one profile per side");
  const size_t dim = profiles_p.front().size();
  for (const auto& v : profiles_p)
    if (v.size() != dim) throw std::invalid_argument("profile_cost: profile dimension mismatch");
  for (const auto& v : profiles_e)
    if (v.size() != dim) throw std::invalid_argument("profile_cost: profile dimension mismatch");

  Matrix c(static_cast<int>(profiles_p.size()), static_cast<int>(profiles_e.size()));
  for (size_t i = 0; i < profiles_p.size(); ++i)
    for (size_t j = 0; j < profiles_e.size(); ++j) {
      double sq = 0.0;
      for (size_t d = 0; d < dim; ++d) {
        const double diff = profiles_p[i][d] - profiles_e[j][d];
        sq += diff * diff;
      }
      const double inner = 2.0 - 2.0 * std::exp(-gamma * std::sqrt(sq));
      c(static_cast<int>(i), static_cast<int>(j)) = std::sqrt(inner < 0.0 ? 0.0 : inner);
    }
  return CostMatrix(std::move(c));
}

namespace {

CostEnsemble ensemble_from_rows(int n, int m, std::vector<std::vector<double>> rows) {
  std::vector<CostMatrix> samples;
  samples.reserve(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != static_cast<size_t>(n) * static_cast<size_t>(m))
      throw std::runtime_error("ensemble: sample " + std::to_string(k) + " has " +
                               std::to_string(rows[k].size()) + " values, expected " +
                               std::to_string(static_cast<long long>(n) * m));
    try {
      samples.emplace_back(Matrix(n, m, std::move(rows[k])));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("ensemble: sample " + std::to_string(k) + ": " + e.what());
    }
  }
  return CostEnsemble(std::move(samples));
}

CostEnsemble load_ensemble_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ensemble: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("load_ensemble: " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("m") || !j.contains("samples"))
    throw std::runtime_error("load_ensemble: " + path + ": expected object with n, m, samples");
  const int n = j.at("n").get<int>();
  const int m = j.at("m").get<int>();
  if (n < 1 || m < 1) throw std::runtime_error("load_ensemble: " + path + ": n and m must be >= 1");
  if (!j.at("samples").is_array())
    throw std::runtime_error("load_ensemble: " + path + ": samples must be an array");
  if (j.at("samples").empty())
    throw std::runtime_error("load_ensemble: " + path + ": ensemble must contain at least one sample");

  std::vector<std::vector<double>> rows;
  size_t index = 0;
  for (const auto& sample : j.at("samples")) {
    if (!sample.is_array())
      throw std::runtime_error("load_ensemble: " + path + ": sample " + std::to_string(index) +
                               " is not an array");
    std::vector<double> row;
    row.reserve(sample.size());
    for (const auto& v : sample) {
      if (!v.is_number())
        throw std::runtime_error("load_ensemble: " + path + ": sample " + std::to_string(index) +
                                 " contains a non-numeric value");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
    ++index;
  }
  return ensemble_from_rows(n, m, std::move(rows));
}

CostEnsemble load_ensemble_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ensemble: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_ensemble: " + path + ": empty file");
  if (line != "sample,i,j,value")
    throw std::runtime_error("load_ensemble: " + path + ": line 1: expected header sample,i,j,value");

  struct Cell {
    long long sample, i, j;
    double value;
  };
  std::vector<Cell> cells;
  long long max_sample = -1, max_i = -1, max_j = -1;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Cell c;
    char tail;
    if (std::sscanf(line.c_str(), "%lld,%lld,%lld,%lf%c", &c.sample, &c.i, &c.j, &c.value, &tail) != 4)
      throw std::runtime_error("load_ensemble: " + path + ": line " + std::to_string(line_no) +
                               ": expected sample,i,j,value");
    if (c.sample < 0 || c.i < 0 || c.j < 0)
      throw std::runtime_error("load_ensemble: " + path + ": line " + std::to_string(line_no) +
                               ": negative index");
    max_sample = std::max(max_sample, c.sample);
    max_i = std::max(max_i, c.i);
    max_j = std::max(max_j, c.j);
    cells.push_back(c);
  }
  if (cells.empty())
    throw std::runtime_error("load_ensemble: " + path + ": ensemble must contain at least one sample");

  const long long n = max_i + 1;
  const long long m = max_j + 1;
  const long long count = max_sample + 1;
  std::vector<std::vector<double>> rows(static_cast<size_t>(count),
                                        std::vector<double>(static_cast<size_t>(n * m), 0.0));
  std::vector<std::vector<char>> seen(static_cast<size_t>(count),
                                      std::vector<char>(static_cast<size_t>(n * m), 0));
  for (const Cell& c : cells) {
    const size_t idx = static_cast<size_t>(c.i * m + c.j);
    if (seen[static_cast<size_t>(c.sample)][idx])
      throw std::runtime_error("load_ensemble: " + path + ": duplicate cell (sample " +
                               std::to_string(c.sample) + ", " + std::to_string(c.i) + ", " +
                               std::to_string(c.j) + ")");
    seen[static_cast<size_t>(c.sample)][idx] = 1;
    rows[static_cast<size_t>(c.sample)][idx] = c.value;
  }
  for (long long k = 0; k < count; ++k)
    for (long long idx = 0; idx < n * m; ++idx)
      if (!seen[static_cast<size_t>(k)][static_cast<size_t>(idx)])
        throw std::runtime_error("load_ensemble: " + path + ": sample " + std::to_string(k) +
                                 " is missing cell (" + std::to_string(idx / m) + ", " +
                                 std::to_string(idx % m) + ")");
  return ensemble_from_rows(static_cast<int>(n), static_cast<int>(m), std::move(rows));
}

}  // namespace

CostEnsemble load_ensemble(const std::string& path, EnsembleFormat format) {
  return format == EnsembleFormat::json ? load_ensemble_json(path) : load_ensemble_csv(path);
}

void save_ensemble(const CostEnsemble& ensemble, const std::string& path, EnsembleFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ensemble: cannot open " + path + " for writing");
  if (format == EnsembleFormat::json) {
    nlohmann::ordered_json j;
    j["n"] = ensemble.rows();
    j["m"] = ensemble.cols();
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (int k = 0; k < ensemble.size(); ++k) {
      const auto data = ensemble.sample(k).entries().data();
      samples.push_back(std::vector<double>(data.begin(), data.end()));
    }
    j["samples"] = std::move(samples);
    out << j.dump(2) << '\n';
  } else {
    out << "sample,i,j,value\n";
    char buf[64];
    for (int k = 0; k < ensemble.size(); ++k)
      for (int i = 0; i < ensemble.rows(); ++i)
        for (int j = 0; j < ensemble.cols(); ++j) {
          std::snprintf(buf, sizeof(buf), "%.17g", ensemble.sample(k).entries()(i, j));
          out << k << ',' << i << ',' << j << ',' << buf << '\n';
        }
  }
  if (!out) throw std::runtime_error("save_ensemble: write to " + path + " failed");
}

EnsembleFormat ensemble_format_from_path(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return EnsembleFormat::csv;
  return EnsembleFormat::json;
}

}  // namespace bayesot
