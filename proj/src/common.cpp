#include "gamesum/common.hpp"

#include <iostream>

namespace gamesum {

void warn_to(Diagnostics* diag, std::string message) {
  if (diag != nullptr) {
    diag->warn(std::move(message));
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

}  // namespace gamesum
