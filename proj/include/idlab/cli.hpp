#pragma once

namespace idlab::cli {

/// Entry point of the idlab tool. Returns 0 on success, 1 on data errors and
/// 2 on usage errors; failures print a JSON error object to stderr.
int run(int argc, char** argv);

}  // namespace idlab::cli
