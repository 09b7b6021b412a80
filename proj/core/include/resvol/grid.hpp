#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace resvol {

// Raster geometry. Rows run top to bottom; the coordinate frame has its origin at
// the lower-left grid corner with y pointing up, so cell (col, row) has its center at
// ((col + 0.5) * cell_size, (nrows - row - 0.5) * cell_size).
struct GridShape {
    std::size_t ncols = 0;
    std::size_t nrows = 0;
    double cell_size = 1.0;

    std::size_t size() const noexcept { return ncols * nrows; }
    double cell_area() const noexcept { return cell_size * cell_size; }
    double center_x(std::size_t col) const noexcept { return (static_cast<double>(col) + 0.5) * cell_size; }
    double center_y(std::size_t row) const noexcept {
        return (static_cast<double>(nrows - row) - 0.5) * cell_size;
    }
    bool operator==(const GridShape&) const = default;
};

template <class T>
struct Grid {
    GridShape shape;
    std::vector<T> values;

    Grid() = default;
    explicit Grid(const GridShape& s, T fill = T{}) : shape(s), values(s.size(), fill) {}

    std::size_t size() const noexcept { return values.size(); }
    std::size_t index(std::size_t col, std::size_t row) const noexcept { return row * shape.ncols + col; }
    T& at(std::size_t col, std::size_t row) { return values[index(col, row)]; }
    const T& at(std::size_t col, std::size_t row) const { return values[index(col, row)]; }
    T& operator[](std::size_t i) { return values[i]; }
    const T& operator[](std::size_t i) const { return values[i]; }
    bool operator==(const Grid&) const = default;
};

// Boolean raster stored as bytes (0/1).
using Mask = Grid<std::uint8_t>;

inline std::size_t count_true(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m.values) n += v != 0;
    return n;
}

}  // namespace resvol
