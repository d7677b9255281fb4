#pragma once

#include <string>

#include "qest/model.hpp"

namespace qest {

/// A zoo model plus a sensible default evaluation point.
struct ZooEntry {
  StatisticalModel model;
  Vector default_lambda;
  std::string id;
};

/// Builds a model from a string id:
///   classical-qubit
///   qubit-tomography
///   multiphase:d=2,N=2
///   two-source:sigma=1
///   n-source:sigma=1,n=3
///   two-source-imbalance:w=0.7
/// Throws DomainError for unknown ids or malformed parameters.
ZooEntry make_model(const std::string& id);

/// Every id accepted by make_model (parametrized ones with their defaults).
std::vector<std::string> zoo_ids();

}  // namespace qest
