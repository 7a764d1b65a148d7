#include <gtest/gtest.h>

#include "marlte/routing.h"

// Every routing call made by a test binary checks flow conservation and
// weight-scaling invariance.
int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  marlte::SetRoutingSelfCheck(true);
  return RUN_ALL_TESTS();
}
