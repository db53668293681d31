#pragma once

namespace pedx {

// Exit codes: 0 ok, 1 usage, 2 data validation, 3 runtime / numeric.
int run_cli(int argc, const char* const* argv);

}  // namespace pedx
