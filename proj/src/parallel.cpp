#include "bpgof/parallel.hpp"

#include <cstdlib>
#include <string>

namespace bpgof {

int resolve_workers(int hint) {
    if (hint >= 1) return hint;
    if (const char* env = std::getenv("BPGOF_WORKERS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return v;
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace bpgof
