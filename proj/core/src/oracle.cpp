#include "obo/oracle.hpp"

namespace obo {

Vector RoundOracle::y_star(const Vector& /*x*/) const {
  throw OracleCapabilityError("oracle has no closed-form inner solution");
}

}  // namespace obo
