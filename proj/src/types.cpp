#include "fareval/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fareval {

double discount(std::int64_t position) {
  if (position < 1) {
    throw std::invalid_argument("discount: position must be >= 1, got " +
                                std::to_string(position));
  }
  return 1.0 / std::log2(static_cast<double>(position < 2 ? 2 : position));
}

std::vector<double> discount_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = discount(static_cast<std::int64_t>(i) + 1);
  }
  return w;
}

}  // namespace fareval
