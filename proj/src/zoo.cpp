#include "qest/zoo.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "qest/imaging.hpp"
#include "qest/multiphase.hpp"

namespace qest {

namespace {

Matrix pauli_x() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}
Matrix pauli_y() {
  Matrix s(2, 2);
  s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return s;
}
Matrix pauli_z() {
  Matrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

std::map<std::string, double> parse_params(const std::string& spec, const std::string& id) {
  std::map<std::string, double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw DomainError("model id '" + id + "': expected key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    try {
      out[key] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("model id '" + id + "': bad numeric value in '" + item + "'");
    }
  }
  return out;
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

ZooEntry classical_qubit() {
  StatisticalModel m;
  m.param_dim = 1;
  m.hilbert_dim = 2;
  m.domain = {Interval{0.02, 0.98}};
  m.name = "classical-qubit";
  m.state = [](const Vector& l) -> Matrix {
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = l(0);
    rho(1, 1) = 1.0 - l(0);
    return rho;
  };
  m.derivatives = {[](const Vector&) -> Matrix {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = -1.0;
    return d;
  }};
  Vector l0(1);
  l0 << 0.3;
  return ZooEntry{std::move(m), l0, "classical-qubit"};
}

ZooEntry qubit_tomography() {
  StatisticalModel m;
  m.param_dim = 3;
  m.hilbert_dim = 2;
  m.domain.assign(3, Interval{-0.55, 0.55});
  m.name = "qubit-tomography";
  const Matrix sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  m.state = [sx, sy, sz](const Vector& l) -> Matrix {
    return (Matrix::Identity(2, 2) + l(0) * sx + l(1) * sy + l(2) * sz) / 2.0;
  };
  m.derivatives = {
      [sx](const Vector&) -> Matrix { return sx / 2.0; },
      [sy](const Vector&) -> Matrix { return sy / 2.0; },
      [sz](const Vector&) -> Matrix { return sz / 2.0; },
  };
  Vector l0(3);
  l0 << 0.2, -0.3, 0.35;
  return ZooEntry{std::move(m), l0, "qubit-tomography"};
}

ZooEntry multiphase_entry(const std::map<std::string, double>& params, const std::string& id) {
  const int d = static_cast<int>(get_param(params, "d", 2));
  const int n = static_cast<int>(get_param(params, "N", 1));
  if (d < 1 || n < 1) throw DomainError("model id '" + id + "': d and N must be >= 1");
  const MultiphaseProbe probe = optimal_probe(d, n);
  StatisticalModel m = build_multiphase_model(probe);
  Vector l0(d);
  for (int i = 0; i < d; ++i) l0(i) = (0.35 - 0.12 * i) / n;
  return ZooEntry{std::move(m), l0, id};
}

ZooEntry two_source(const std::map<std::string, double>& params, const std::string& id,
                    bool imbalance, double w_default) {
  const double sigma = get_param(params, "sigma", 1.0);
  if (!(sigma > 0.0)) throw DomainError("model id '" + id + "': sigma must be positive");
  SourceScene scene;
  scene.positions = {-sigma / 2.0, sigma / 2.0};
  if (imbalance) {
    const double w = get_param(params, "w", w_default);
    if (!(w > 0.0 && w < 1.0)) throw DomainError("model id '" + id + "': need 0 < w < 1");
    scene.weights = {w, 1.0 - w};
    scene.parametrization = SceneParametrization::CentroidSeparationImbalance;
  } else {
    scene.weights = {0.5, 0.5};
    scene.parametrization = SceneParametrization::CentroidSeparation;
  }
  SceneModel sm = build_scene_model(GaussianPsf{sigma}, scene);
  return ZooEntry{std::move(sm.model), sm.lambda, id};
}

ZooEntry n_source(const std::map<std::string, double>& params, const std::string& id) {
  const double sigma = get_param(params, "sigma", 1.0);
  const int n = static_cast<int>(get_param(params, "n", 3));
  if (!(sigma > 0.0) || n < 2) {
    throw DomainError("model id '" + id + "': need sigma > 0 and n >= 2");
  }
  SourceScene scene;
  scene.parametrization = SceneParametrization::PositionsRaw;
  for (int s = 0; s < n; ++s) {
    scene.positions.push_back((s - (n - 1) / 2.0) * sigma);
    scene.weights.push_back(1.0 / n);
  }
  SceneModel sm = build_scene_model(GaussianPsf{sigma}, scene);
  return ZooEntry{std::move(sm.model), sm.lambda, id};
}

}  // namespace

ZooEntry make_model(const std::string& id) {
  std::string head = id;
  std::string spec;
  const auto colon = id.find(':');
  if (colon != std::string::npos) {
    head = id.substr(0, colon);
    spec = id.substr(colon + 1);
  }
  const std::map<std::string, double> params =
      spec.empty() ? std::map<std::string, double>{} : parse_params(spec, id);

  if (head == "classical-qubit") return classical_qubit();
  if (head == "qubit-tomography") return qubit_tomography();
  if (head == "multiphase") return multiphase_entry(params, id);
  if (head == "two-source") return two_source(params, id, false, 0.5);
  if (head == "two-source-imbalance") return two_source(params, id, true, 0.7);
  if (head == "n-source") return n_source(params, id);
  throw DomainError("unknown model id '" + head + "'");
}

std::vector<std::string> zoo_ids() {
  return {"classical-qubit", "qubit-tomography",       "multiphase:d=2,N=1",
          "two-source:sigma=1", "n-source:sigma=1,n=3", "two-source-imbalance:w=0.7"};
}

}  // namespace qest
