#include "pucci3d/parallel.hpp"

namespace pucci3d {

namespace {
std::atomic<std::size_t> g_thread_limit{0};
}

void set_thread_limit(std::size_t n) { g_thread_limit = n; }

std::size_t thread_limit() {
    const std::size_t n = g_thread_limit.load();
    if (n != 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace pucci3d
