#pragma once

#include <cstddef>
#include <functional>

namespace rpci {

/// Worker count used by parallel_for. Defaults to the RPCI_THREADS
/// environment variable when set, else std::thread::hardware_concurrency().
int thread_count();

/// Overrides the worker count; values < 1 restore the default.
void set_thread_count(int threads);

/// Calls body(i) for i in [0, n) on up to thread_count() workers. Tasks are
/// claimed dynamically; exceptions are rethrown on the calling thread (the
/// one from the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rpci
