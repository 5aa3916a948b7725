#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>

namespace ssinr::harness {

// SSINR_JOBS when set and positive, otherwise the hardware thread count.
std::size_t default_jobs();
// SSINR_OUTPUT_ROOT when set, otherwise "runs".
std::filesystem::path output_root();

// Calls task(i) for i in [0, count) on up to `jobs` threads. Tasks must not
// throw; callers record their own failures.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

}  // namespace ssinr::harness
