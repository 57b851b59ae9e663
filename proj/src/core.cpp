#include "lemlab/core.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lemlab::logging {

Level level() {
  static const Level lv = [] {
    const char* e = std::getenv("LEMLAB_LOG");
    if (!e) return Level::error;
    if (std::strcmp(e, "debug") == 0) return Level::debug;
    if (std::strcmp(e, "info") == 0) return Level::info;
    return Level::error;
  }();
  return lv;
}

void log(Level lv, const std::string& msg) {
  if (lv > level()) return;
  const char* tag = lv == Level::debug ? "debug" : lv == Level::info ? "info" : "error";
  std::fprintf(stderr, "[lemlab:%s] %s\n", tag, msg.c_str());
}

}  // namespace lemlab::logging
