#include "seqlat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace seqlat {

std::size_t default_workers() {
  const char* env = std::getenv("SEQLAT_WORKERS");
  if (env == nullptr) return 1;
  try {
    const long n = std::stol(env);
    return n > 0 ? static_cast<std::size_t>(n) : 1;
  } catch (...) {
    return 1;
  }
}

}  // namespace seqlat
