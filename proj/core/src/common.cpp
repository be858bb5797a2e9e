#include "dip/common.hpp"

#include <atomic>
#include <iostream>

namespace dip {

namespace {

void default_warn(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
}

std::atomic<WarnSink> g_warn_sink{&default_warn};

}  // namespace

void warn(const std::string& message) { g_warn_sink.load()(message); }

WarnSink set_warn_sink(WarnSink sink) {
  return g_warn_sink.exchange(sink ? sink : &default_warn);
}

}  // namespace dip
