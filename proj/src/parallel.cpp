#include "chimera_sat/parallel.hpp"

#include <cstdlib>
#include <string>

namespace chimera_sat {

size_t worker_count() {
    size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHIMERA_SAT_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1) n = std::min(n, static_cast<size_t>(cap));
        } catch (...) {
        }
    }
    return n;
}

}  // namespace chimera_sat
