#include "osa/rewards.hpp"

#include <cmath>

#include "osa/error.hpp"

namespace osa {

void RewardParams::validate() const {
  for (double x : {phi, c_s, p_p, p_3g, gamma}) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::InvalidArgument, "reward parameters must be finite");
    }
  }
  if (c_s < 0.0 || gamma < 0.0 || p_p < 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "c_s, gamma and p_p must be non-negative");
  }
  if (!(p_3g > p_p)) {
    throw Error(ErrorKind::InvalidArgument,
                "dedicated price p_3g must exceed primary price p_p");
  }
}

} // namespace osa
