#pragma once

#include <stdexcept>

namespace steinbound {

/// The model is well formed but no approximation applies, e.g. an
/// equidispersed sum (mean equal to variance) or a fitted N not above 1.
class InfeasibleModel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace steinbound
