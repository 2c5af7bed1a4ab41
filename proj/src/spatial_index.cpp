#include "gammagibbs/spatial_index.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace gammagibbs {

namespace {
constexpr int kMaxDim = 8;
}

SpatialIndex::SpatialIndex(const CubeGrid& grid) : grid_(grid), dim_(grid.dimension()) {
    if (dim_ > kMaxDim) throw std::invalid_argument("spatial index supports dimension <= 8");
    bits_ = dim_ == 1 ? 62 : 64 / dim_;
    limit_ = (std::int64_t{1} << (bits_ - 1)) - 1;
    offsets_.assign(static_cast<std::size_t>(dim_), 0);
    for (const auto& o : grid.neighbor_offsets())
        for (int a = 0; a < dim_; ++a) offsets_.push_back(o[a]);
}

bool SpatialIndex::pack(std::span<const std::int64_t> k, std::uint64_t& key) const {
    key = 0;
    for (int a = 0; a < dim_; ++a) {
        const std::int64_t v = k[static_cast<std::size_t>(a)];
        if (v > limit_ || v < -limit_) return false;
        key |= static_cast<std::uint64_t>(v + limit_ + 1) << (bits_ * a);
    }
    return true;
}

void SpatialIndex::locate(std::span<const double> x, std::span<std::int64_t> k) const {
    const double g = grid_.edge();
    for (int a = 0; a < dim_; ++a)
        k[static_cast<std::size_t>(a)] = static_cast<std::int64_t>(std::floor((x[static_cast<std::size_t>(a)] + 0.5 * g) / g));
}

void SpatialIndex::insert(std::size_t id, std::span<const double> x, double mark) {
    if (contains(id)) throw std::invalid_argument("spatial index: id already present");
    std::array<std::int64_t, kMaxDim> k{};
    locate(x, std::span(k.data(), static_cast<std::size_t>(dim_)));
    std::uint64_t key;
    if (!pack(std::span<const std::int64_t>(k.data(), static_cast<std::size_t>(dim_)), key))
        throw std::out_of_range("spatial index: position too far from the origin");
    auto [it, fresh] = cell_of_key_.try_emplace(key, static_cast<std::uint32_t>(cells_.size()));
    if (fresh) {
        cells_.emplace_back();
        cells_.back().cols.resize(static_cast<std::size_t>(dim_));
    }
    Cell& c = cells_[it->second];
    for (int a = 0; a < dim_; ++a) c.cols[static_cast<std::size_t>(a)].push_back(x[static_cast<std::size_t>(a)]);
    c.marks.push_back(mark);
    c.ids.push_back(id);
    if (id >= loc_.size()) loc_.resize(id + 1);
    loc_[id] = {it->second, static_cast<std::uint32_t>(c.ids.size() - 1)};
    ++count_;
}

void SpatialIndex::erase(std::size_t id) {
    if (!contains(id)) throw std::out_of_range("spatial index: unknown id");
    const Slot s = loc_[id];
    Cell& c = cells_[s.cell];
    const std::size_t last = c.ids.size() - 1;
    if (s.slot != last) {
        for (auto& col : c.cols) col[s.slot] = col[last];
        c.marks[s.slot] = c.marks[last];
        c.ids[s.slot] = c.ids[last];
        loc_[c.ids[s.slot]].slot = s.slot;
    }
    for (auto& col : c.cols) col.pop_back();
    c.marks.pop_back();
    c.ids.pop_back();
    loc_[id] = {};
    --count_;
}

void SpatialIndex::relabel(std::size_t from, std::size_t to) {
    if (from == to) return;
    if (!contains(from)) throw std::out_of_range("spatial index: unknown id");
    if (contains(to)) throw std::invalid_argument("spatial index: relabel target in use");
    const Slot s = loc_[from];
    cells_[s.cell].ids[s.slot] = to;
    if (to >= loc_.size()) loc_.resize(to + 1);
    loc_[to] = s;
    loc_[from] = {};
}

void SpatialIndex::set_mark(std::size_t id, double mark) {
    if (!contains(id)) throw std::out_of_range("spatial index: unknown id");
    cells_[loc_[id].cell].marks[loc_[id].slot] = mark;
}

void SpatialIndex::clear() {
    cell_of_key_.clear();
    cells_.clear();
    loc_.clear();
    count_ = 0;
}

double SpatialIndex::field(std::span<const double> x, const PairEvaluator& phi, std::optional<std::size_t> skip) const {
    if (count_ == 0) return 0.0;
    const auto d = static_cast<std::size_t>(dim_);
    std::array<std::int64_t, kMaxDim> k{}, kk{};
    locate(x, std::span(k.data(), d));

    std::uint32_t skip_cell = kNone, skip_slot = 0;
    if (skip && contains(*skip)) {
        skip_cell = loc_[*skip].cell;
        skip_slot = loc_[*skip].slot;
    }

    double total = 0.0;
    std::array<const double*, kMaxDim> colptr{};
    const std::size_t n_off = offsets_.size() / d;
    for (std::size_t o = 0; o < n_off; ++o) {
        for (std::size_t a = 0; a < d; ++a) kk[a] = k[a] + offsets_[o * d + a];
        std::uint64_t key;
        if (!pack(std::span<const std::int64_t>(kk.data(), d), key)) continue;
        auto it = cell_of_key_.find(key);
        if (it == cell_of_key_.end()) continue;
        const Cell& c = cells_[it->second];
        const std::size_t n = c.ids.size();
        if (n == 0) continue;
        if (scratch_.size() < n) scratch_.resize(n);
        if (phi.profile) {
            for (std::size_t a = 0; a < d; ++a) colptr[a] = c.cols[a].data();
            kernels::AtomBlock block{dim_, colptr.data(), c.marks.data(), n};
            kernels::pair_weights(x.data(), block, *phi.profile, scratch_.data());
        } else {
            std::array<double, kMaxDim> y{};
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t a = 0; a < d; ++a) y[a] = c.cols[a][i];
                scratch_[i] = (*phi.custom)(x, std::span<const double>(y.data(), d)) * c.marks[i];
            }
        }
        if (it->second == skip_cell) scratch_[skip_slot] = 0.0;
        total += kernels::ordered_sum(std::span<const double>(scratch_.data(), n));
    }
    return total;
}

}  // namespace gammagibbs
