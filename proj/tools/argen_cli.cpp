#include <cstdio>

#include "argen/types.hpp"

int main() {
  std::printf("argen %s\n", argen::kVersion);
  return 0;
}
