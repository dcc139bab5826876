#include "wnl/parallel.hpp"

#include <cstdlib>
#include <string>

namespace wnl {

unsigned thread_count() {
    if (const char* env = std::getenv("WNL_THREADS")) {
        try {
            long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

}  // namespace wnl
