#pragma once

// Cube-bucketed index of weighted atoms. Each bucket is one lattice cube and
// stores its atoms column-wise so a bucket is directly a kernels::AtomBlock.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gammagibbs/kernels.hpp"
#include "gammagibbs/lattice.hpp"

namespace gammagibbs {

/// How to evaluate phi(x, y) for one query: a radial profile handled by the
/// vector kernels, or an arbitrary callable evaluated pair by pair.
struct PairEvaluator {
    const kernels::RadialProfile* profile = nullptr;
    const std::function<double(std::span<const double>, std::span<const double>)>* custom = nullptr;
};

class SpatialIndex {
public:
    explicit SpatialIndex(const CubeGrid& grid);

    const CubeGrid& grid() const { return grid_; }
    std::size_t size() const { return count_; }
    bool contains(std::size_t id) const { return id < loc_.size() && loc_[id].cell != kNone; }

    void insert(std::size_t id, std::span<const double> x, double mark);
    void erase(std::size_t id);
    /// The atom known as `from` is known as `to` from now on (`to` must be free).
    void relabel(std::size_t from, std::size_t to);
    void set_mark(std::size_t id, double mark);
    void clear();

    /// sum_y phi(x, y) s_y over indexed atoms in cubes within range of x's cube.
    /// The atom `skip`, if given, contributes zero. Buckets are visited in a
    /// fixed order and summed in storage order, so the result is reproducible.
    double field(std::span<const double> x, const PairEvaluator& phi, std::optional<std::size_t> skip = {}) const;

private:
    static constexpr std::uint32_t kNone = 0xffffffffu;

    struct Cell {
        std::vector<std::vector<double>> cols;
        std::vector<double> marks;
        std::vector<std::size_t> ids;
    };
    struct Slot {
        std::uint32_t cell = kNone;
        std::uint32_t slot = 0;
    };

    bool pack(std::span<const std::int64_t> k, std::uint64_t& key) const;
    void locate(std::span<const double> x, std::span<std::int64_t> k) const;

    CubeGrid grid_;
    int dim_;
    int bits_;
    std::int64_t limit_;
    std::vector<std::int64_t> offsets_;  // center first, then neighbor offsets; dim_ entries each
    std::unordered_map<std::uint64_t, std::uint32_t> cell_of_key_;
    std::vector<Cell> cells_;
    std::vector<Slot> loc_;
    std::size_t count_ = 0;
    mutable std::vector<double> scratch_;
};

}  // namespace gammagibbs
