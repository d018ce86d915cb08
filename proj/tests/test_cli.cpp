#include <doctest.h>
// CLI end-to-end tests live here once the binary is complete.
