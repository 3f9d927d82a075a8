#include "lrnorm/error.hpp"

namespace lrnorm {

void require(bool cond, const std::string& what) {
  if (!cond) throw ParameterError(what);
}

}  // namespace lrnorm
