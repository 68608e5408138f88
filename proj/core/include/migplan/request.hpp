#pragma once

#include <string>

namespace migplan {

/// One VM migration demand: move memory_bytes from src to dst while pages
/// keep dirtying at dirty_rate_Bps (bytes/second).
struct MigrationRequest {
  std::string id;
  std::string src;
  std::string dst;
  double memory_bytes = 0;
  double dirty_rate_Bps = 0;
  double arrival_s = 0;
};

}  // namespace migplan
