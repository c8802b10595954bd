#pragma once

namespace qem {

// Exit codes: 0 success, 2 bad input (usage, config, validation, IO),
// 3 sampling/statistics failure, 4 resource cap hit (advisory on stderr).
int cli_main(int argc, const char* const* argv);

}  // namespace qem
