#include <cstdlib>
#include <iostream>

#include "sievekit/selfcheck.hpp"

int main() {
  unsigned threads = 0;
  if (const char* env = std::getenv("SIEVEKIT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) threads = static_cast<unsigned>(v);
  }
  const bool ok = sievekit::selfcheck::run_all(std::cout, threads);
  return ok ? 0 : 1;
}
