#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>

int main(int argc, char** argv) {
  // single-threaded BLAS keeps factorizations bitwise reproducible
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  return doctest::Context(argc, argv).run();
}
