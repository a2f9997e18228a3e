#include "fsos/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsos/error.hpp"

namespace fsos {

namespace {

Json index_json(const MultiIndex& k) { return k.entries(); }

MultiIndex index_from_json(const Json& j, int dim) {
  const auto v = j.get<std::vector<int>>();
  if (static_cast<int>(v.size()) != dim)
    throw MalformedInput("frequency " + j.dump() + " does not have " + std::to_string(dim) + " entries");
  return MultiIndex(std::span<const int>(v));
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw MalformedInput(std::string("missing field '") + name + "'");
  return j.at(name);
}

template <class T>
T get(const Json& j, const char* name) {
  try {
    return field(j, name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(std::string("field '") + name + "': " + e.what());
  }
}

// Rows of {"re", "im"} objects.
Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const char* name) {
  if (!j.is_array() || j.empty()) throw MalformedInput(std::string(name) + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw MalformedInput(std::string(name) + " rows must all have " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      m(r, c) = Complex(get<double>(e, "re"), get<double>(e, "im"));
    }
  }
  return m;
}

Json lower_det_json(const LowerDet& d) {
  Json j;
  j["value"] = d.value;
  j["err"] = d.err;
  j["K"] = d.radius;
  j["f_tail"] = d.f_tail;
  j["moment_tail"] = d.moment_tail;
  return j;
}

Json lower_prob_json(const LowerProb& p) {
  Json j;
  j["value"] = p.value;
  j["err"] = p.err;
  j["mean"] = p.mean;
  j["penalty"] = p.penalty;
  j["K"] = p.samples;
  j["delta"] = p.delta;
  j["f_bound"] = p.f_bound;
  j["g_bound"] = p.g_bound;
  return j;
}

}  // namespace

Json to_json(const TrigPoly& p) {
  Json coeffs = Json::array();
  for (const auto& [k, c] : p.coeffs()) {
    if (!(k.is_zero() || k.in_positive_half())) continue;
    coeffs.push_back(Json{{"k", index_json(k)}, {"re", c.real()}, {"im", c.imag()}});
  }
  Json j;
  j["kind"] = "trig_poly";
  j["dim"] = p.dim();
  j["coeffs"] = coeffs;
  return j;
}

TrigPoly trig_poly_from_json(const Json& j) {
  const int dim = get<int>(j, "dim");
  if (dim < 1 || dim > kMaxDim) throw MalformedInput("dimension " + std::to_string(dim) + " out of range");
  CoeffTable half;
  for (const auto& e : field(j, "coeffs")) {
    const MultiIndex k = index_from_json(field(e, "k"), dim);
    if (!(k.is_zero() || k.in_positive_half()))
      throw MalformedInput("coefficient " + k.to_string() + " is outside the stored half-space");
    if (k.is_zero() && get<double>(e, "im") != 0.0) throw MalformedInput("constant coefficient must be real");
    if (!half.emplace(k, Complex(get<double>(e, "re"), get<double>(e, "im"))).second)
      throw MalformedInput("duplicate coefficient " + k.to_string());
  }
  return TrigPoly::from_half(dim, half);
}

Json to_json(const FeatureMap& map) {
  Json j;
  j["type"] = map.type();
  j["dim"] = map.dim();
  if (const auto* b = dynamic_cast<const BandLimitedMap*>(&map)) {
    j["t"] = b->bandwidth();
  } else if (const auto* k = dynamic_cast<const KernelMap*>(&map)) {
    j["n"] = k->size();
    j["rho"] = k->rho();
    j["seed"] = k->seed();
    j["nodes"] = k->nodes();
  } else {
    throw PreconditionError("feature map type '" + map.type() + "' has no serialization");
  }
  return j;
}

std::shared_ptr<FeatureMap> feature_map_from_json(const Json& j) {
  const auto type = get<std::string>(j, "type");
  const int dim = get<int>(j, "dim");
  try {
    if (type == "bandlimited") return std::make_shared<BandLimitedMap>(dim, get<int>(j, "t"));
    if (type == "kernel") {
      auto nodes = get<std::vector<std::vector<double>>>(j, "nodes");
      if (j.contains("n") && get<std::size_t>(j, "n") != nodes.size())
        throw MalformedInput("kernel map lists " + std::to_string(nodes.size()) + " nodes but n = " + j.at("n").dump());
      return std::make_shared<KernelMap>(dim, get<double>(j, "rho"), std::move(nodes),
                                         j.contains("seed") ? get<std::uint64_t>(j, "seed") : 0);
    }
  } catch (const PreconditionError& e) {
    throw MalformedInput(std::string("feature map: ") + e.what());
  } catch (const DomainError& e) {
    throw MalformedInput(std::string("feature map: ") + e.what());
  }
  throw MalformedInput("unknown feature map type '" + type + "'");
}

Json to_json(const PsdModel& model) {
  Json j;
  j["kind"] = "psd_model";
  j["map"] = to_json(model.map());
  j["form"] = model.is_factored() ? "factored" : "dense";
  j[model.is_factored() ? "U" : "A"] = matrix_json(model.stored());
  return j;
}

PsdModel psd_model_from_json(const Json& j) {
  std::shared_ptr<const FeatureMap> map = feature_map_from_json(field(j, "map"));
  const auto form = get<std::string>(j, "form");
  const int n = map->size();
  if (form == "dense") {
    Matrix a = matrix_from_json(field(j, "A"), "A");
    if (a.rows() != n || a.cols() != n)
      throw MalformedInput("A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                           " but the feature map has " + std::to_string(n) + " features");
    return PsdModel::dense(map, std::move(a));
  }
  if (form == "factored") {
    Matrix u = matrix_from_json(field(j, "U"), "U");
    if (u.rows() != n) throw MalformedInput("U row count does not match the feature map size");
    if (!u.allFinite()) throw MalformedInput("U has non-finite entries");
    return PsdModel::factored(map, std::move(u));
  }
  throw MalformedInput("unknown model form '" + form + "'");
}

Json to_json(const Certificate& cert) {
  Json j;
  j["kind"] = "certificate";
  j["lower_det"] = lower_det_json(cert.det);
  j["lower_prob"] = cert.prob ? lower_prob_json(*cert.prob) : Json(nullptr);
  j["upper"] = Json{{"value", cert.upper.value},
                    {"x", cert.upper.x},
                    {"points", cert.upper.points},
                    {"grid", cert.upper.grid}};
  j["gap"] = cert.gap;
  j["provenance"] = Json{{"K", cert.det.radius},
                         {"err_1", cert.det.err},
                         {"err_1_minus_delta", cert.prob ? Json(cert.prob->err) : Json(nullptr)},
                         {"a_norm", cert.a_norm},
                         {"m_total_sum", cert.m_total_sum},
                         {"cn_norm_bound", cert.cn_norm_bound},
                         {"eps_tail", cert.eps_tail},
                         {"seed", cert.seed}};
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput("'" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "iter,objective_estimate,grad_norm\n";
  char buf[96];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", r.iter, r.objective_estimate, r.grad_norm);
    out << buf;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

void write_plot_csv(const std::string& path, const TrigPoly& f, const PsdModel& model, int radius) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "k_degree,|f_hat|,|g_hat|,residual\n";
  char buf[128];
  for (const auto& k : ball(f.dim(), radius)) {
    if (!(k.is_zero() || k.in_positive_half())) continue;
    const Complex fk = f.coeff(k);
    const Complex gk = model.coeff_with(model.map().compute_moment(k));
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", k.degree(), std::abs(fk), std::abs(gk),
                  std::abs(fk - gk));
    out << buf;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string config_hash(const Json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fsos
