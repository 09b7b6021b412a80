#pragma once

// Breadth-first flood fill labelling, 8-connectivity.

#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

namespace oracle {

// Component sizes per pixel (0 for background).
inline std::vector<std::size_t> component_sizes(const std::vector<std::uint8_t>& mask, std::size_t ncols,
                                                std::size_t nrows) {
    std::vector<long> label(mask.size(), -1);
    std::vector<std::size_t> sizes;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        const long id = static_cast<long>(sizes.size());
        std::size_t count = 0;
        std::queue<std::size_t> q;
        q.push(start);
        label[start] = id;
        while (!q.empty()) {
            const std::size_t cur = q.front();
            q.pop();
            ++count;
            const long cc = static_cast<long>(cur % ncols), cr = static_cast<long>(cur / ncols);
            for (long dr = -1; dr <= 1; ++dr)
                for (long dc = -1; dc <= 1; ++dc) {
                    const long nc = cc + dc, nr = cr + dr;
                    if (nc < 0 || nr < 0 || nc >= static_cast<long>(ncols) || nr >= static_cast<long>(nrows)) continue;
                    const std::size_t ni = static_cast<std::size_t>(nr) * ncols + static_cast<std::size_t>(nc);
                    if (mask[ni] && label[ni] < 0) {
                        label[ni] = id;
                        q.push(ni);
                    }
                }
        }
        sizes.push_back(count);
    }
    std::vector<std::size_t> out(mask.size(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (label[i] >= 0) out[i] = sizes[static_cast<std::size_t>(label[i])];
    return out;
}

}  // namespace oracle
